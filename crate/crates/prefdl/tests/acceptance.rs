//! Acceptance suite: one test per criterion, each printing a PASS line.
//!
//! Every expected value here is pinned: extension counts, fixpoint traces,
//! accepted conclusions, postulate verdicts and the contraction walkthrough
//! are asserted exactly, with no tolerance.

use prefdl::{
    accepted, background_axioms, check_postulates, contract, expand_belief, extensions_compatible,
    ground_theory, least_fixpoint, parse_formula, parse_source, preferred_extensions, revise,
    Caps, Context, EpistemicState, Formula, PostulateStatus, Term,
};

fn ground(src: &str) -> prefdl::GroundTheory {
    ground_theory(&parse_source(src).unwrap()).unwrap()
}

fn state(src: &str) -> EpistemicState {
    EpistemicState::from_source(src).unwrap()
}

fn f(s: &str) -> Formula {
    parse_formula(s).unwrap()
}

fn base_names(bases: &[prefdl::ExtensionBase]) -> Vec<Vec<String>> {
    prefdl::extension::base_names(bases)
}

const TWEETY: &str = include_str!("../../../corpus/tweety.pdt");
const CYCLE: &str = include_str!("../../../corpus/preference_cycle.pdt");
const TYPED_SOURCES: &str = include_str!("../../../corpus/typed_sources.pdt");
const RECENCY: &str = include_str!("../../../corpus/recency_vs_source.pdt");
const TWINS: &str = include_str!("../../../corpus/twins.pdt");
const PENGUIN: &str = include_str!("../../../corpus/penguin_contraction.pdt");

#[test]
fn criterion_1_tweety() {
    let t = ground(TWEETY);
    let caps = Caps::default();
    let all = extensions_compatible(&t, &Context::Empty, &caps).unwrap();
    assert_eq!(all.len(), 3, "exactly 3 extension bases");
    let preferred = preferred_extensions(&t, &caps).unwrap();
    assert_eq!(preferred.len(), 1, "exactly 1 preferred extension");
    assert!(
        !preferred[0].contains_name(&prefdl::parse_term("d1(tweety)").unwrap()),
        "the preferred extension drops d1(tweety)"
    );
    assert!(accepted(&t, &f("~flies(tweety)"), &caps).unwrap());
    assert!(!accepted(&t, &f("flies(tweety)"), &caps).unwrap());
    println!("ACCEPTANCE 1 (tweety: 3 bases, 1 preferred, ~flies accepted): PASS");
}

#[test]
fn criterion_2_preference_cycle() {
    let t = ground(CYCLE);
    let caps = Caps::default();
    assert_eq!(preferred_extensions(&t, &caps).unwrap().len(), 0, "0 preferred extensions");
    let r = least_fixpoint(&t, &caps).unwrap();
    assert_eq!(r.steps, 1, "least fixed point after one productive step");
    assert!(accepted(&t, &f("d2 < d1 | d1 < d2"), &caps).unwrap());
    assert!(!accepted(&t, &f("d1 < d2"), &caps).unwrap());
    assert!(!accepted(&t, &f("false"), &caps).unwrap());
    println!("ACCEPTANCE 2 (cycle: no preferred extension, consistent beliefs): PASS");
}

#[test]
fn criterion_3_typed_sources() {
    let t = ground(TYPED_SOURCES);
    let caps = Caps::default();
    let all = extensions_compatible(&t, &Context::Empty, &caps).unwrap();
    assert_eq!(all.len(), 4, "four extensions under the empty context");
    let r = least_fixpoint(&t, &caps).unwrap();
    let final_bases = base_names(r.accepted_bases());
    assert_eq!(final_bases.len(), 1, "a single accepted base");
    assert!(
        !final_bases[0].contains(&"d4(tweety)".to_string()),
        "the accepted base drops d4(tweety)"
    );
    assert!(!accepted(&t, &f("flies(tweety)"), &caps).unwrap());
    assert!(accepted(&t, &f("~flies(tweety)"), &caps).unwrap());
    println!("ACCEPTANCE 3 (typed sources: 4 extensions, flies rejected): PASS");
}

#[test]
fn criterion_4_recency_vs_source() {
    let t = ground(RECENCY);
    let caps = Caps::default();
    let r = least_fixpoint(&t, &caps).unwrap();
    assert_eq!(r.base_counts(), [14, 2, 1], "trace of accepted-base counts");
    let second = &r.iterates[1];
    let d9_12 = prefdl::parse_term("d9(d1, d2)").unwrap();
    for b in &second.bases {
        assert!(!b.contains_name(&d9_12), "both step-2 bases drop d9(d1, d2)");
    }
    assert!(accepted(&t, &f("p"), &caps).unwrap(), "p is accepted");
    println!("ACCEPTANCE 4 (recency vs source: trace 14 -> 2 -> 1, p accepted): PASS");
}

#[test]
fn criterion_5_twins() {
    let t = ground(TWINS);
    let caps = Caps::default();
    assert!(accepted(&t, &f("~date(Anne, John)"), &caps).unwrap());
    assert!(!accepted(&t, &f("date(Anne, John)"), &caps).unwrap());
    println!("ACCEPTANCE 5 (twins: ~date(Anne, John) accepted): PASS");
}

#[test]
fn criterion_6_postulate_harness() {
    let caps = Caps::default();

    // T*1 holds and T*3 fails with witness p on the two-formula instance
    let t = state("premise d1: p. premise d2: ~p.");
    let report = check_postulates(&t, &f("d1 < d2"), &f("d2 < d1"), &[], &caps).unwrap();
    assert_eq!(report.entry("T*1").status, PostulateStatus::HoldsOnInstance);
    assert_eq!(report.entry("T*3").status, PostulateStatus::FailsOnInstance);
    assert_eq!(report.entry("T*3").witness.as_ref().unwrap().formula, "p");

    // T*2 fails: revising with ~p does not make ~p believed
    let t2 = state("premise d1: p.");
    let report2 = check_postulates(&t2, &f("~p"), &f("p"), &[], &caps).unwrap();
    assert_eq!(report2.entry("T*2").status, PostulateStatus::FailsOnInstance);

    // T*4 fails on a two-extension instance: ~A not believed, yet Bel+A
    // exceeds Bel(T*A)
    let t4 = state("premise d1: q. premise d2: ~q.");
    let report4 = check_postulates(&t4, &f("q"), &f("~q"), &[], &caps).unwrap();
    assert_eq!(report4.entry("T*4").status, PostulateStatus::FailsOnInstance);
    assert_eq!(report4.entry("T*4").witness.as_ref().unwrap().formula, "q");

    // T*5 fails: revision with contradictory input keeps beliefs consistent
    let report5 = check_postulates(&t2, &f("p & ~p"), &f("p"), &[], &caps).unwrap();
    assert_eq!(report5.entry("T*5").status, PostulateStatus::FailsOnInstance);

    // T*6 holds when A and B coincide (same fresh name for both)
    let report6 = check_postulates(&t, &f("d1 < d2"), &f("d1 < d2"), &[], &caps).unwrap();
    assert_eq!(report6.entry("T*6").status, PostulateStatus::HoldsOnInstance);

    // T*7 fails with witness p on the three-formula instance
    let t7 = state("premise d1: p. premise d2: ~p. premise d3: ~p.");
    let report7 = check_postulates(&t7, &f("d1 < d2"), &f("d1 < d3"), &[], &caps).unwrap();
    assert_eq!(report7.entry("T*7").status, PostulateStatus::FailsOnInstance);
    assert_eq!(report7.entry("T*7").witness.as_ref().unwrap().formula, "p");

    // T*8 fails: B lands in the expansion but not in the joint revision
    let t8 = state("premise d1: q. premise d2: ~q.");
    let report8 = check_postulates(&t8, &f("r"), &f("q"), &[], &caps).unwrap();
    assert_eq!(report8.entry("T*8").status, PostulateStatus::FailsOnInstance);
    assert_eq!(report8.entry("T*8").witness.as_ref().unwrap().formula, "q");

    println!("ACCEPTANCE 6 (postulate harness verdicts T*1..T*8): PASS");
}

#[test]
fn criterion_7_contraction() {
    let caps = Caps::default();
    let t = state(PENGUIN);

    // contracting ~flies(tweety) produces the three bases, name-set exact
    let c = contract(&t, &f("~flies(tweety)")).unwrap();
    let bases = extensions_compatible(&c.theory, &Context::Empty, &caps).unwrap();
    assert_eq!(
        base_names(&bases),
        [
            vec!["c1".to_string(), "d1".to_string()],
            vec!["c1".to_string(), "d2(tweety)".to_string()],
            vec!["d1".to_string(), "d2(tweety)".to_string()],
        ]
    );
    let ax = background_axioms(&c.theory);
    let bel = c.belief(&caps).unwrap();
    assert!(!bel.entails(&ax, &f("flies(tweety)"), &caps).unwrap());
    assert!(!bel.entails(&ax, &f("~flies(tweety)"), &caps).unwrap());

    // ranking the constraint below the premises restores the belief
    let r = revise(&c, &f("d1 < c1 & forall x: thing. d2(x) < c1")).unwrap();
    assert!(accepted(&r.theory, &f("~flies(tweety)"), &caps).unwrap());

    // the Harper-identity counterexample: contraction strictly exceeds
    // Bel(T) intersect Bel(T * ~A)
    let h = state("premise d1: p. premise d2: ~p.");
    let hc = contract(&h, &f("~(d1 < d2)")).unwrap();
    assert!(accepted(&hc.theory, &f("p"), &caps).unwrap());
    let bel_t = h.belief(&caps).unwrap();
    let ax_h = background_axioms(&h.theory);
    assert!(!bel_t.entails(&ax_h, &f("p"), &caps).unwrap());
    // revising with ~A = ~~(d1 < d2), i.e. accepting the preference, also
    // yields p, so the right-hand side of the identity is Bel(T) itself
    let hr = revise(&h, &f("d1 < d2")).unwrap();
    assert!(accepted(&hr.theory, &f("p"), &caps).unwrap());

    println!("ACCEPTANCE 7 (contraction: three bases, restored belief, Harper failure): PASS");
}

#[test]
fn criterion_8_property_suites() {
    // the randomized suites live in tests/properties.rs; this criterion pins
    // the deterministic halves: oracle equivalence and greedy maximality
    let caps = Caps::default();

    // partial-order counts 1, 3, 19, 219 and set equality with brute force
    for n in 1..=4usize {
        let src: String =
            (1..=n).map(|i| format!("premise d{i}: p{i}.")).collect::<Vec<_>>().join(" ");
        let t = ground(&src);
        let got = prefdl::compatible_orders(
            &t,
            &Context::Empty,
            &background_axioms(&t),
            &caps,
        )
        .unwrap();
        let want = prefdl::brute_force_partial_orders(&t.signature.names).unwrap();
        assert_eq!(got, want, "n = {n}");
        assert_eq!(got.len(), [1, 3, 19, 219][n - 1]);
    }

    // maximal-consistent-subset correspondence on the tweety theory
    let t = ground(TWEETY);
    let empty = prefdl::StrictPartialOrder::empty(t.signature.names.clone());
    let via_orders = prefdl::extensions_for_partial_order(&t, &empty, &caps).unwrap();
    let via_compat = extensions_compatible(&t, &Context::Empty, &caps).unwrap();
    assert_eq!(base_names(&via_orders), base_names(&via_compat));

    // greedy maximality: adding any skipped formula breaks consistency
    let ax = background_axioms(&t);
    for base in &via_orders {
        let conj = base.full_conjunction();
        for nf in t.formulas.iter().filter(|nf| !base.contains_name(&nf.name)) {
            let set = [conj.clone(), nf.body.clone()];
            assert!(!prefdl::is_consistent(&set, &ax, &caps).unwrap());
        }
    }

    // grounding idempotence over the whole corpus
    for src in [TWEETY, CYCLE, TYPED_SOURCES, RECENCY, TWINS, PENGUIN] {
        let once = ground(src);
        let again = ground_theory(&once.to_spec()).unwrap();
        assert_eq!(once, again);
    }

    println!("ACCEPTANCE 8 (oracle equivalence, maximality, idempotence): PASS");
}

#[test]
fn criterion_5_supplement_expansion_counterexample() {
    // the T*3 discussion instance: Bel(T)+A keeps A but not p
    let caps = Caps::default();
    let t = state("premise d1: p. premise d2: ~p.");
    let exp = expand_belief(&t, &f("d1 < d2"), &caps).unwrap();
    let ax = background_axioms(&t.theory);
    assert!(exp.entails(&ax, &f("d1 < d2"), &caps).unwrap());
    assert!(!exp.entails(&ax, &f("p"), &caps).unwrap());
    let t_a = revise(&t, &f("d1 < d2")).unwrap();
    assert!(accepted(&t_a.theory, &f("p"), &caps).unwrap());
    println!("ACCEPTANCE 6 supplement (expansion vs revision): PASS");
}

#[test]
fn criterion_4_supplement_term_universe() {
    // the schema expansion of the recency theory: 7 + 49 + 49 + 1 formulas
    let t = ground(RECENCY);
    assert_eq!(t.formulas.len(), 106);
    assert_eq!(t.signature.names.len(), 106);
    println!("ACCEPTANCE 4 supplement (106 grounded formulas): PASS");
}

#[test]
fn criterion_2_supplement_greedy_cycle() {
    // greedy on the cycle theory: the earlier formula wins
    let caps = Caps::default();
    let t = ground(CYCLE);
    let d1 = Term::constant("d1");
    let d2 = Term::constant("d2");
    let base = prefdl::extension_base(
        &t,
        &prefdl::TotalOrder::new(vec![d1.clone(), d2.clone()]),
        &caps,
    )
    .unwrap();
    assert_eq!(base.name_set(), vec![d1.clone()]);
    let base = prefdl::extension_base(
        &t,
        &prefdl::TotalOrder::new(vec![d2.clone(), d1.clone()]),
        &caps,
    )
    .unwrap();
    assert_eq!(base.name_set(), vec![d2]);
    println!("ACCEPTANCE 2 supplement (greedy on the cycle): PASS");
}
