//! Strict partial orders over name terms: diagrams, linearizations,
//! compatibility, and a brute-force enumeration used as a test oracle.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::axioms::BackgroundAxioms;
use crate::encode::Encoder;
use crate::error::{CapKind, EngineError};
use crate::extension::Context;
use crate::formula::Formula;
use crate::oracle::{enumerate_preference_models, solve_capped, Caps};
use crate::term::Term;
use crate::theory::GroundTheory;

/// An irreflexive, transitive relation over a finite carrier of name terms.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct StrictPartialOrder {
    carrier: Vec<Term>,
    rel: BTreeSet<(Term, Term)>,
}

impl StrictPartialOrder {
    /// Build an order, checking irreflexivity and transitivity.
    pub fn new(
        mut carrier: Vec<Term>,
        rel: BTreeSet<(Term, Term)>,
    ) -> Result<StrictPartialOrder, String> {
        carrier.sort();
        carrier.dedup();
        for (a, b) in &rel {
            if a == b {
                return Err(format!("reflexive pair ({a}, {a})"));
            }
            if !carrier.contains(a) || !carrier.contains(b) {
                return Err(format!("pair ({a}, {b}) outside the carrier"));
            }
        }
        for (a, b) in &rel {
            for (c, d) in &rel {
                if b == c && !rel.contains(&(a.clone(), d.clone())) {
                    return Err(format!("missing transitive pair ({a}, {d})"));
                }
            }
        }
        Ok(StrictPartialOrder { carrier, rel })
    }

    /// The empty order over a carrier.
    pub fn empty(carrier: Vec<Term>) -> StrictPartialOrder {
        StrictPartialOrder::new(carrier, BTreeSet::new()).expect("empty relation is an order")
    }

    /// Build from arbitrary pairs by taking the transitive closure; fails on
    /// cycles.
    pub fn from_pairs(
        carrier: Vec<Term>,
        pairs: impl IntoIterator<Item = (Term, Term)>,
    ) -> Result<StrictPartialOrder, String> {
        let mut rel: BTreeSet<(Term, Term)> = pairs.into_iter().collect();
        loop {
            let mut grew = false;
            let snapshot: Vec<(Term, Term)> = rel.iter().cloned().collect();
            for (a, b) in &snapshot {
                for (c, d) in &snapshot {
                    if b == c && rel.insert((a.clone(), d.clone())) {
                        grew = true;
                    }
                }
            }
            if !grew {
                break;
            }
        }
        StrictPartialOrder::new(carrier, rel)
    }

    pub fn carrier(&self) -> &[Term] {
        &self.carrier
    }

    pub fn pairs(&self) -> &BTreeSet<(Term, Term)> {
        &self.rel
    }

    pub fn holds(&self, a: &Term, b: &Term) -> bool {
        self.rel.contains(&(a.clone(), b.clone()))
    }

    pub fn is_total(&self) -> bool {
        let n = self.carrier.len();
        self.rel.len() == n * (n - 1) / 2
    }

    /// Is `other` an extension of this order (same carrier, superset
    /// relation)?
    pub fn extends(&self, other: &StrictPartialOrder) -> bool {
        self.carrier == other.carrier && other.rel.is_subset(&self.rel)
    }
}

/// A total order given as the processing sequence: earlier means preferred.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TotalOrder {
    pub sequence: Vec<Term>,
}

impl TotalOrder {
    pub fn new(sequence: Vec<Term>) -> TotalOrder {
        TotalOrder { sequence }
    }

    pub fn as_order(&self) -> StrictPartialOrder {
        let mut rel = BTreeSet::new();
        for (i, a) in self.sequence.iter().enumerate() {
            for b in &self.sequence[i + 1..] {
                rel.insert((a.clone(), b.clone()));
            }
        }
        StrictPartialOrder::new(self.sequence.clone(), rel)
            .expect("a sequence induces a strict total order")
    }
}

/// The complete diagram of an order: a positive atom per related pair and a
/// negated atom per unrelated ordered pair, each pair covered exactly once.
pub fn diagram(order: &StrictPartialOrder) -> Vec<Formula> {
    let mut out = Vec::new();
    for a in order.carrier() {
        for b in order.carrier() {
            if a == b {
                continue;
            }
            let atom = Formula::pref(a.clone(), b.clone());
            out.push(if order.holds(a, b) { atom } else { Formula::not(atom) });
        }
    }
    out
}

/// Is the order compatible with the context: is the context's characteristic
/// formula plus the full diagram satisfiable?
pub fn is_compatible(
    order: &StrictPartialOrder,
    context: &Context<'_>,
    ax: &BackgroundAxioms,
    caps: &Caps,
) -> Result<bool, EngineError> {
    let characteristic = context.characteristic();
    let kinds = ax.kinds_with(std::iter::once(&characteristic))?;
    let mut enc = Encoder::new(ax, Some(kinds));
    let v = enc.encode(&characteristic);
    enc.assert_val(v);
    for f in diagram(order) {
        let v = enc.encode(&f);
        enc.assert_val(v);
    }
    let mut solver = enc.build_solver();
    solve_capped(&mut solver, &[], caps)
}

/// Lazy enumeration of all linear extensions of an order, in lexicographic
/// carrier order.
pub fn linearizations(order: &StrictPartialOrder) -> Linearizations {
    Linearizations {
        order: order.clone(),
        stack: vec![(Vec::new(), 0)],
    }
}

/// Iterator over the linear extensions of a partial order.
pub struct Linearizations {
    order: StrictPartialOrder,
    /// depth-first stack of (chosen prefix, next candidate index to try)
    stack: Vec<(Vec<Term>, usize)>,
}

impl Iterator for Linearizations {
    type Item = TotalOrder;

    fn next(&mut self) -> Option<TotalOrder> {
        let carrier = self.order.carrier().to_vec();
        while let Some((prefix, cursor)) = self.stack.pop() {
            if prefix.len() == carrier.len() {
                return Some(TotalOrder::new(prefix));
            }
            // candidates: unused elements all of whose predecessors are used
            let mut idx = cursor;
            while idx < carrier.len() {
                let candidate = &carrier[idx];
                let used = prefix.contains(candidate);
                let ready = !used
                    && carrier.iter().all(|p| {
                        !self.order.holds(p, candidate) || prefix.contains(p)
                    });
                if ready {
                    break;
                }
                idx += 1;
            }
            if idx == carrier.len() {
                continue;
            }
            // resume after this candidate later; descend now
            self.stack.push((prefix.clone(), idx + 1));
            let mut chosen = prefix;
            chosen.push(carrier[idx].clone());
            self.stack.push((chosen, 0));
        }
        None
    }
}

/// Collect at most `caps.max_linearizations` linear extensions.
pub fn linearizations_capped(
    order: &StrictPartialOrder,
    caps: &Caps,
) -> Result<Vec<TotalOrder>, EngineError> {
    let mut out = Vec::new();
    for lin in linearizations(order) {
        out.push(lin);
        if out.len() as u64 > caps.max_linearizations {
            return Err(EngineError::cap(CapKind::Linearizations, caps.max_linearizations));
        }
    }
    Ok(out)
}

/// The strict partial orders over the theory's names whose diagram is
/// consistent with the context.
pub fn compatible_orders(
    theory: &GroundTheory,
    context: &Context<'_>,
    ax: &BackgroundAxioms,
    caps: &Caps,
) -> Result<Vec<StrictPartialOrder>, EngineError> {
    let characteristic = context.characteristic();
    let models = enumerate_preference_models(
        std::slice::from_ref(&characteristic),
        ax,
        &theory.signature.names,
        caps,
    )
    .map_err(EngineError::from)?;
    Ok(models.iter().map(|m| m.to_order()).collect())
}

/// All strict partial orders on a small carrier, by exhaustive filtering.
/// A test oracle; the carrier is limited to 6 names.
pub fn brute_force_partial_orders(names: &[Term]) -> Result<Vec<StrictPartialOrder>, EngineError> {
    let n = names.len();
    if n > 6 {
        return Err(EngineError::cap(CapKind::Models, 6));
    }
    let mut sorted = names.to_vec();
    sorted.sort();
    sorted.dedup();
    let n = sorted.len();
    let npairs = n * (n - 1);
    let mut pairs = Vec::with_capacity(npairs);
    for i in 0..n {
        for j in 0..n {
            if i != j {
                pairs.push((i, j));
            }
        }
    }
    let mut out = Vec::new();
    'masks: for mask in 0u64..(1u64 << npairs) {
        // rows as successor bitmasks
        let mut row = vec![0u32; n];
        for (k, (i, j)) in pairs.iter().enumerate() {
            if mask & (1 << k) != 0 {
                row[*i] |= 1 << *j;
            }
        }
        for i in 0..n {
            let mut succ = row[i];
            while succ != 0 {
                let j = succ.trailing_zeros() as usize;
                succ &= succ - 1;
                // successors of a successor must be successors
                if row[j] & !row[i] != 0 || row[j] & (1 << i) != 0 {
                    continue 'masks;
                }
            }
        }
        let rel: BTreeSet<(Term, Term)> = pairs
            .iter()
            .enumerate()
            .filter(|(k, _)| mask & (1 << *k) != 0)
            .map(|(_, (i, j))| (sorted[*i].clone(), sorted[*j].clone()))
            .collect();
        out.push(StrictPartialOrder { carrier: sorted.clone(), rel });
    }
    out.sort();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::axioms::background_axioms;
    use crate::fixtures::ground;
    use crate::naive::naive_preference_models;
    use crate::parser::parse_formula;

    fn names(v: &[&str]) -> Vec<Term> {
        v.iter().map(|s| Term::constant(s)).collect()
    }

    fn chain(carrier: &[&str], pairs: &[(&str, &str)]) -> StrictPartialOrder {
        StrictPartialOrder::from_pairs(
            names(carrier),
            pairs.iter().map(|(a, b)| (Term::constant(a), Term::constant(b))),
        )
        .unwrap()
    }

    #[test]
    fn diagram_of_empty_order_is_all_negative() {
        let p = StrictPartialOrder::empty(names(&["d1", "d2"]));
        let d: Vec<String> = diagram(&p).iter().map(|f| f.to_string()).collect();
        assert_eq!(d, ["~(d1 < d2)", "~(d2 < d1)"]);
    }

    #[test]
    fn diagram_of_chain() {
        let p = chain(&["d1", "d2"], &[("d2", "d1")]);
        let d: Vec<String> = diagram(&p).iter().map(|f| f.to_string()).collect();
        assert_eq!(d, ["~(d1 < d2)", "d2 < d1"]);
    }

    #[test]
    fn diagram_counts_positive_and_negative_atoms() {
        let p = chain(&["d1", "d2", "d3"], &[("d2", "d1"), ("d3", "d1")]);
        let d = diagram(&p);
        let pos = d.iter().filter(|f| matches!(f, Formula::Less(..))).count();
        assert_eq!(pos, 2);
        assert_eq!(d.len() - pos, 4);
    }

    #[test]
    fn linearization_counts() {
        // antichain on 3 names: 3! orders
        let p = StrictPartialOrder::empty(names(&["a", "b", "c"]));
        assert_eq!(linearizations(&p).count(), 6);
        // a total chain has exactly one
        let t = TotalOrder::new(names(&["a", "b", "c"]));
        assert_eq!(linearizations(&t.as_order()).count(), 1);
        // two incomparable elements below a common bound: 2
        let p = chain(&["d1", "d2", "d3"], &[("d2", "d1"), ("d3", "d1")]);
        let lins: Vec<TotalOrder> = linearizations(&p).collect();
        assert_eq!(lins.len(), 2);
        for lin in &lins {
            assert!(lin.as_order().extends(&p));
        }
    }

    #[test]
    fn linearizations_respect_cap() {
        let p = StrictPartialOrder::empty(names(&["a", "b", "c", "d"]));
        let caps = Caps { max_linearizations: 10, ..Caps::default() };
        assert!(matches!(
            linearizations_capped(&p, &caps),
            Err(EngineError::ResourceCap { kind: CapKind::Linearizations, .. })
        ));
    }

    #[test]
    fn brute_force_partial_order_counts() {
        // 1, 3, 19, 219, 4231 strict partial orders on 1..5 labeled points
        let all = ["d1", "d2", "d3", "d4", "d5"];
        for (n, want) in [(1, 1), (2, 3), (3, 19), (4, 219), (5, 4231)] {
            let got = brute_force_partial_orders(&names(&all[..n])).unwrap();
            assert_eq!(got.len(), want, "n = {n}");
        }
        assert!(brute_force_partial_orders(&names(&["a", "b", "c", "d", "e", "f", "g"]))
            .is_err());
    }

    #[test]
    fn compatible_orders_with_empty_context_are_all_orders() {
        for n in 1..=4usize {
            let src: String = (1..=n)
                .map(|i| format!("premise d{i}: p{i}."))
                .collect::<Vec<_>>()
                .join(" ");
            let t = ground(&src);
            let ax = background_axioms(&t);
            let got =
                compatible_orders(&t, &Context::Empty, &ax, &Caps::default()).unwrap();
            let want = brute_force_partial_orders(&t.signature.names).unwrap();
            assert_eq!(got, want, "n = {n}");
        }
    }

    #[test]
    fn compatibility_matches_membership_in_compatible_orders() {
        let t = ground("premise d1: d2 < d1. premise d2: d1 < d2.");
        let ax = background_axioms(&t);
        let caps = Caps::default();
        let s = [t.formulas[0].body.clone()]; // d2 < d1
        let ctx = Context::Formulas(&s);
        let all = brute_force_partial_orders(&t.signature.names).unwrap();
        let compatible = compatible_orders(&t, &ctx, &ax, &caps).unwrap();
        for p in &all {
            let direct = is_compatible(p, &ctx, &ax, &caps).unwrap();
            assert_eq!(direct, compatible.contains(p), "{p:?}");
        }
        // the context forces d2 < d1, so exactly the orders containing it
        assert!(compatible
            .iter()
            .all(|p| p.holds(&Term::constant("d2"), &Term::constant("d1"))));
    }

    #[test]
    fn two_chains_compatible_with_disjunction_but_empty_order_is_not() {
        let t = ground("premise d1: d2 < d1. premise d2: d1 < d2.");
        let ax = background_axioms(&t);
        let caps = Caps::default();
        let s = [parse_formula("d2 < d1 | d1 < d2").unwrap()];
        let ctx = Context::Formulas(&s);
        let chain_a = chain(&["d1", "d2"], &[("d1", "d2")]);
        let chain_b = chain(&["d1", "d2"], &[("d2", "d1")]);
        let empty = StrictPartialOrder::empty(names(&["d1", "d2"]));
        assert!(is_compatible(&chain_a, &ctx, &ax, &caps).unwrap());
        assert!(is_compatible(&chain_b, &ctx, &ax, &caps).unwrap());
        assert!(!is_compatible(&empty, &ctx, &ax, &caps).unwrap());
        // any order is compatible with the empty context
        assert!(is_compatible(&empty, &Context::Empty, &ax, &caps).unwrap());
    }

    #[test]
    fn inconsistent_context_has_no_compatible_orders() {
        let t = ground("premise d1: p.");
        let ax = background_axioms(&t);
        let s = [parse_formula("p & ~p").unwrap()];
        let got =
            compatible_orders(&t, &Context::Formulas(&s), &ax, &Caps::default()).unwrap();
        assert!(got.is_empty());
    }

    #[test]
    fn larger_contexts_admit_fewer_orders() {
        let t = ground(crate::fixtures::CYCLE);
        let ax = background_axioms(&t);
        let caps = Caps::default();
        let small = [parse_formula("d2 < d1 | d1 < d2").unwrap()];
        let big = [small[0].clone(), parse_formula("d2 < d1").unwrap()];
        let orders_small =
            compatible_orders(&t, &Context::Formulas(&small), &ax, &caps).unwrap();
        let orders_big =
            compatible_orders(&t, &Context::Formulas(&big), &ax, &caps).unwrap();
        for p in &orders_big {
            assert!(orders_small.contains(p));
        }
        assert!(orders_big.len() < orders_small.len());
    }

    #[test]
    fn overflow_partials_respect_derived_preferences() {
        // the typed-sources theory concludes a ranking at the first fixpoint
        // step; on its 10-name universe full enumeration of the compatible
        // orders is hopeless, but every order found before the cap trips
        // already contains the derived pairs
        use crate::extension::Context;
        use crate::oracle::{enumerate_preference_models, EnumerationError};
        let t = ground(crate::fixtures::TYPED_SOURCES);
        let ax = background_axioms(&t);
        let caps = Caps { max_models: 40, ..Caps::default() };
        let rep = crate::fixpoint::c_step(&t, &Context::Empty, &Caps::default()).unwrap();
        let guidance = [rep.guidance_formula()];
        let err =
            enumerate_preference_models(&guidance, &ax, &t.signature.names, &caps).unwrap_err();
        let EnumerationError::Overflow(overflow) = err else {
            panic!("expected the model cap to trip, got {err}");
        };
        assert_eq!(overflow.partial.len(), 41);
        let d1 = Term::constant("d1");
        let d2 = Term::constant("d2");
        let d3 = Term::constant("d3");
        let d4t = crate::parser::parse_term("d4(tweety)").unwrap();
        for p in &overflow.partial {
            assert!(p.is_true(&d2, &d1));
            assert!(p.is_true(&d3, &d1));
            assert!(p.is_true(&d1, &d4t));
        }
    }

    #[test]
    fn enumeration_agrees_with_naive_projection() {
        let t = ground("premise d1: p. premise d2: ~p. premise d3: p -> d1 < d2.");
        let ax = background_axioms(&t);
        let s = [t.formulas[2].body.clone(), t.formulas[0].body.clone()];
        let fast = compatible_orders(&t, &Context::Formulas(&s), &ax, &Caps::default()).unwrap();
        let slow = naive_preference_models(&s, &ax, &t.signature.names);
        let fast_sets: Vec<Vec<(Term, Term)>> = fast
            .iter()
            .map(|p| p.pairs().iter().cloned().collect())
            .collect();
        let slow_sets: Vec<Vec<(Term, Term)>> = slow.into_iter().collect();
        assert_eq!(fast_sets, slow_sets);
    }
}
