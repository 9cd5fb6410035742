//! Background axioms: the part of the logic that is not represented inside
//! theories.
//!
//! The preference symbol `<` over names is a strict partial order, ground
//! equality is a congruence, integer literals compare by value and
//! declared-distinct constants never coincide. The oracle instantiates these
//! axioms over the atoms each query actually touches; [`BackgroundAxioms`]
//! carries what that instantiation needs (the signature and distinctness
//! declarations) and can also materialize the axiom formulas for the
//! theory's own universe, which is what the tests inspect.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::GroundError;
use crate::formula::Formula;
use crate::kinds::{KindInfer, KindTable};
use crate::term::{Kind, Term};
use crate::theory::{GroundTheory, Signature};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BackgroundAxioms {
    pub signature: Signature,
    pub distinct: Vec<Vec<Term>>,
    distinct_pairs: BTreeSet<(Term, Term)>,
    /// Materialized equality, congruence and integer instances for the
    /// theory's own atoms (the `<`-order axioms over names are generated
    /// lazily by [`BackgroundAxioms::formulas`]).
    ground_instances: Vec<Formula>,
}

/// Compute the background axioms of a grounded theory.
pub fn background_axioms(theory: &GroundTheory) -> BackgroundAxioms {
    let mut distinct_pairs = BTreeSet::new();
    for group in &theory.distinct {
        for (i, a) in group.iter().enumerate() {
            for b in group.iter().skip(i + 1) {
                let (x, y) = if a <= b { (a, b) } else { (b, a) };
                distinct_pairs.insert((x.clone(), y.clone()));
            }
        }
    }
    let ground_instances = ground_instances(theory);
    BackgroundAxioms {
        signature: theory.signature.clone(),
        distinct: theory.distinct.clone(),
        distinct_pairs,
        ground_instances,
    }
}

impl BackgroundAxioms {
    pub fn is_declared_distinct(&self, a: &Term, b: &Term) -> bool {
        let (x, y) = if a <= b { (a, b) } else { (b, a) };
        self.distinct_pairs.contains(&(x.clone(), y.clone()))
    }

    /// Kind table extended over extra (already ground-checked) formulas, for
    /// queries that mention symbols the theory does not.
    pub fn kinds_with<'f>(
        &self,
        formulas: impl Iterator<Item = &'f Formula>,
    ) -> Result<KindTable, GroundError> {
        let mut infer = KindInfer::new(&self.signature);
        infer.preload(&self.signature.kinds);
        let mut scope = Vec::new();
        for f in formulas {
            infer.walk(f, &mut scope)?;
        }
        infer.freeze()
    }

    /// The axiom formulas for this theory's universe: strict-partial-order
    /// instances for every name pair and triple, unique-name axioms, and the
    /// materialized equality/congruence/integer instances. Lazy; the order
    /// axioms are cubic in the number of names.
    pub fn formulas(&self) -> impl Iterator<Item = Formula> + '_ {
        let names = &self.signature.names;
        let irreflexivity = names
            .iter()
            .map(|n| Formula::not(Formula::pref(n.clone(), n.clone())));
        let transitivity = names.iter().flat_map(move |a| {
            names.iter().flat_map(move |b| {
                names.iter().filter_map(move |c| {
                    if a == b || b == c {
                        return None;
                    }
                    Some(Formula::implies(
                        Formula::and(vec![
                            Formula::pref(a.clone(), b.clone()),
                            Formula::pref(b.clone(), c.clone()),
                        ]),
                        Formula::pref(a.clone(), c.clone()),
                    ))
                })
            })
        });
        let unique_names = self
            .distinct_pairs
            .iter()
            .map(|(a, b)| Formula::not(Formula::Eq(a.clone(), b.clone())));
        irreflexivity
            .chain(transitivity)
            .chain(unique_names)
            .chain(self.ground_instances.iter().cloned())
    }
}

/// Equality, congruence and integer-evaluation instances over the atoms that
/// occur in the theory.
fn ground_instances(theory: &GroundTheory) -> Vec<Formula> {
    let sig = &theory.signature;
    let mut eq_atoms: BTreeSet<(Term, Term)> = BTreeSet::new();
    let mut ilt_atoms: BTreeSet<(Term, Term)> = BTreeSet::new();
    let mut int_literals: BTreeSet<i64> = BTreeSet::new();
    let mut terms: BTreeSet<Term> = BTreeSet::new();
    let mut preds: BTreeSet<(String, Vec<Term>)> = BTreeSet::new();

    let touch_term = |t: &Term, terms: &mut BTreeSet<Term>, lits: &mut BTreeSet<i64>| {
        let mut stack = vec![t.clone()];
        while let Some(t) = stack.pop() {
            if let Term::Int(k) = t {
                lits.insert(k);
                continue;
            }
            if sig.kind_of(&t) != Kind::Name {
                terms.insert(t.clone());
            }
            stack.extend(t.args().iter().cloned());
        }
    };
    for nf in &theory.formulas {
        nf.body.visit_atoms(&mut |atom| match atom {
            Formula::Pred(p, args) => {
                preds.insert((p.clone(), args.clone()));
                for a in args {
                    touch_term(a, &mut terms, &mut int_literals);
                }
            }
            Formula::Eq(a, b) => {
                let (x, y) = if a <= b { (a, b) } else { (b, a) };
                eq_atoms.insert((x.clone(), y.clone()));
                touch_term(a, &mut terms, &mut int_literals);
                touch_term(b, &mut terms, &mut int_literals);
            }
            Formula::Less(a, b) => {
                if sig.kind_of(a) != Kind::Name {
                    ilt_atoms.insert((a.clone(), b.clone()));
                }
                touch_term(a, &mut terms, &mut int_literals);
                touch_term(b, &mut terms, &mut int_literals);
            }
            _ => {}
        });
    }

    let mut out = Vec::new();
    // reflexivity over the occurring non-name terms
    for t in &terms {
        out.push(Formula::Eq(t.clone(), t.clone()));
    }
    // symmetry and transitivity over the occurring equality atoms
    for (a, b) in &eq_atoms {
        out.push(Formula::implies(
            Formula::Eq(a.clone(), b.clone()),
            Formula::Eq(b.clone(), a.clone()),
        ));
    }
    for (a, b) in &eq_atoms {
        for (c, d) in &eq_atoms {
            if (a, b) >= (c, d) {
                continue;
            }
            // share a term: chain the remaining two
            let chain = [(a, b, c, d), (a, b, d, c), (b, a, c, d), (b, a, d, c)];
            for (x, shared, y, other) in chain {
                if shared == y {
                    out.push(Formula::implies(
                        Formula::and(vec![
                            Formula::Eq(x.clone(), shared.clone()),
                            Formula::Eq(y.clone(), other.clone()),
                        ]),
                        Formula::Eq(x.clone(), other.clone()),
                    ));
                }
            }
        }
    }
    // evaluated integer facts
    let lits: Vec<i64> = int_literals.iter().copied().collect();
    for (i, &x) in lits.iter().enumerate() {
        for &y in lits.iter().skip(i + 1) {
            let (lo, hi) = if x < y { (x, y) } else { (y, x) };
            out.push(Formula::pref(Term::Int(lo), Term::Int(hi)));
            out.push(Formula::not(Formula::pref(Term::Int(hi), Term::Int(lo))));
            out.push(Formula::not(Formula::Eq(Term::Int(lo), Term::Int(hi))));
        }
    }
    // substitutivity of integer comparison through equalities to literals
    for (s, t) in &ilt_atoms {
        let pins = |u: &Term| -> Vec<(Option<Formula>, Term)> {
            match u {
                Term::Int(_) => vec![(None, u.clone())],
                _ => eq_atoms
                    .iter()
                    .filter_map(|(a, b)| {
                        let (term, lit) = match (a, b) {
                            (t, Term::Int(_)) if t == u => (t, b),
                            (Term::Int(_), t) if t == u => (t, a),
                            _ => return None,
                        };
                        Some((
                            Some(Formula::Eq(term.clone(), lit.clone())),
                            lit.clone(),
                        ))
                    })
                    .collect(),
            }
        };
        for (cond_s, ls) in pins(s) {
            for (cond_t, lt) in pins(t) {
                let conds: Vec<Formula> =
                    [cond_s.clone(), cond_t].into_iter().flatten().collect();
                let body = Formula::iff(
                    Formula::pref(s.clone(), t.clone()),
                    Formula::pref(ls.clone(), lt.clone()),
                );
                out.push(if conds.is_empty() {
                    body
                } else {
                    Formula::implies(Formula::and(conds), body)
                });
            }
        }
    }
    // function congruence over occurring same-symbol applications
    let func_apps: Vec<&Term> = terms.iter().filter(|t| !t.args().is_empty()).collect();
    for (i, fa) in func_apps.iter().enumerate() {
        for fb in func_apps.iter().skip(i + 1) {
            if fa.head() != fb.head() || fa.args().len() != fb.args().len() {
                continue;
            }
            let conds: Vec<Formula> = fa
                .args()
                .iter()
                .zip(fb.args())
                .filter(|(x, y)| x != y)
                .map(|(x, y)| Formula::Eq(x.clone(), y.clone()))
                .collect();
            out.push(Formula::implies(
                Formula::and(conds),
                Formula::Eq((*fa).clone(), (*fb).clone()),
            ));
        }
    }
    // predicate congruence over occurring same-symbol atoms
    let pred_list: Vec<&(String, Vec<Term>)> = preds.iter().collect();
    for (i, (p, xs)) in pred_list.iter().enumerate() {
        for (q, ys) in pred_list.iter().skip(i + 1) {
            if p != q || xs.len() != ys.len() {
                continue;
            }
            let conds: Vec<Formula> = xs
                .iter()
                .zip(ys)
                .filter(|(x, y)| x != y)
                .map(|(x, y)| Formula::Eq(x.clone(), y.clone()))
                .collect();
            out.push(Formula::implies(
                Formula::and(conds),
                Formula::iff(
                    Formula::Pred(p.clone(), xs.clone()),
                    Formula::Pred(q.clone(), ys.clone()),
                ),
            ));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::ground;
    use crate::parser::parse_formula;

    #[test]
    fn order_axioms_cover_the_smallest_universe() {
        let t = ground("premise d1: p. premise d2: q.");
        let ax = background_axioms(&t);
        let all: Vec<Formula> = ax.formulas().collect();
        let has = |s: &str| all.iter().any(|f| f == &parse_formula(s).unwrap());
        assert!(has("~(d1 < d1)"));
        assert!(has("~(d2 < d2)"));
        assert!(has("d1 < d2 & d2 < d1 -> d1 < d1"));
    }

    #[test]
    fn integer_facts_and_substitutivity_instances() {
        let t = ground(
            "premise d3: time(d1) = 10. premise d4: time(d2) = 11.
             premise d1: p. premise d2: time(d1) < time(d2).",
        );
        let ax = background_axioms(&t);
        let all: Vec<Formula> = ax.formulas().collect();
        let has = |s: &str| all.iter().any(|f| f == &parse_formula(s).unwrap());
        assert!(has("10 < 11"));
        assert!(has("~(11 < 10)"));
        assert!(has(
            "time(d1) = 10 & time(d2) = 11 -> (time(d1) < time(d2) <-> 10 < 11)"
        ));
    }

    #[test]
    fn background_axioms_alone_are_consistent() {
        use crate::fixtures::{CYCLE, RECENCY, TWEETY, TWINS};
        for src in [TWEETY, CYCLE, RECENCY, TWINS] {
            let t = ground(src);
            let ax = background_axioms(&t);
            assert!(crate::oracle::is_consistent(&[], &ax, &crate::oracle::Caps::default())
                .unwrap());
        }
    }

    #[test]
    fn unique_name_axioms_for_declared_distinct_constants() {
        let t = ground(
            "distinct low, medium, high. premise d1: rel(d1) = medium.",
        );
        let ax = background_axioms(&t);
        let all: Vec<Formula> = ax.formulas().collect();
        // pairs are canonicalized, so accept either orientation
        let has = |s: &str, t: &str| {
            all.iter().any(|f| {
                f == &parse_formula(s).unwrap() || f == &parse_formula(t).unwrap()
            })
        };
        assert!(has("~(low = medium)", "~(medium = low)"));
        assert!(has("~(low = high)", "~(high = low)"));
        assert!(has("~(medium = high)", "~(high = medium)"));
        assert!(ax.is_declared_distinct(&Term::constant("low"), &Term::constant("high")));
    }
}
