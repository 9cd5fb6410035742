//! Reference semantics by explicit model enumeration.
//!
//! This module decides consistency and entailment by enumerating all truth
//! assignments over the occurring atoms and filtering them against the
//! background theory directly (transitive-closure checks for the preference
//! order, congruence closure for equality, literal evaluation for integer
//! comparison). It shares nothing with the CNF encoding or the SAT solver,
//! which makes it the independent oracle the test suites check the fast path
//! against. Exponential; inputs are capped at [`MAX_ATOMS`] atoms.

use std::collections::{BTreeMap, BTreeSet};

use crate::axioms::BackgroundAxioms;
use crate::formula::Formula;
use crate::term::{Kind, Term};

/// Largest atom count the enumerator accepts.
pub const MAX_ATOMS: usize = 22;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
enum Atom {
    Pred(String, Vec<Term>),
    Eq(Term, Term),
    NameLt(Term, Term),
    IntLt(Term, Term),
}

/// Truth value of an atom decided by the background theory alone.
fn decided(ax: &BackgroundAxioms, atom: &Atom) -> Option<bool> {
    match atom {
        Atom::Eq(a, b) => {
            if a == b {
                return Some(true);
            }
            if let (Term::Int(x), Term::Int(y)) = (a, b) {
                return Some(x == y);
            }
            let (ka, kb) = (kind(ax, a), kind(ax, b));
            if ka == Kind::Name && kb == Kind::Name {
                return Some(a == b);
            }
            if ka != kb {
                return Some(false);
            }
            if ax.is_declared_distinct(a, b) {
                return Some(false);
            }
            None
        }
        Atom::NameLt(a, b) => (a == b).then_some(false),
        Atom::IntLt(a, b) => {
            if let (Term::Int(x), Term::Int(y)) = (a, b) {
                return Some(x < y);
            }
            (a == b).then_some(false)
        }
        Atom::Pred(..) => None,
    }
}

fn kind(ax: &BackgroundAxioms, t: &Term) -> Kind {
    ax.signature.kind_of(t)
}

fn atom_of(ax: &BackgroundAxioms, f: &Formula) -> Atom {
    match f {
        Formula::Pred(p, args) => Atom::Pred(p.clone(), args.clone()),
        Formula::Eq(a, b) => {
            let (x, y) = if a <= b { (a, b) } else { (b, a) };
            Atom::Eq(x.clone(), y.clone())
        }
        Formula::Less(a, b) => {
            if kind(ax, a) == Kind::Name && kind(ax, b) == Kind::Name {
                Atom::NameLt(a.clone(), b.clone())
            } else {
                Atom::IntLt(a.clone(), b.clone())
            }
        }
        other => unreachable!("not an atom: {other}"),
    }
}

fn collect_atoms(ax: &BackgroundAxioms, formulas: &[&Formula]) -> Vec<Atom> {
    let mut set: BTreeSet<Atom> = BTreeSet::new();
    for f in formulas {
        f.visit_atoms(&mut |a| {
            let atom = atom_of(ax, a);
            if decided(ax, &atom).is_none() {
                set.insert(atom);
            }
        });
    }
    set.into_iter().collect()
}

struct Assignment<'a> {
    ax: &'a BackgroundAxioms,
    values: BTreeMap<Atom, bool>,
}

impl Assignment<'_> {
    fn value(&self, atom: &Atom) -> bool {
        decided(self.ax, atom).unwrap_or_else(|| self.values[atom])
    }

    fn eval(&self, f: &Formula) -> bool {
        match f {
            Formula::True => true,
            Formula::False => false,
            Formula::Pred(..) | Formula::Eq(..) | Formula::Less(..) => {
                self.value(&atom_of(self.ax, f))
            }
            Formula::Not(g) => !self.eval(g),
            Formula::And(gs) => gs.iter().all(|g| self.eval(g)),
            Formula::Or(gs) => gs.iter().any(|g| self.eval(g)),
            Formula::Implies(a, b) => !self.eval(a) || self.eval(b),
            Formula::Iff(a, b) => self.eval(a) == self.eval(b),
            Formula::Quant(..) => unreachable!("ground formulas only"),
        }
    }

    /// Does the assignment extend to a real model of the background theory?
    fn respects_background(&self) -> bool {
        self.preference_extends() && self.equality_extends()
    }

    /// The true preference atoms must close transitively without hitting a
    /// false atom or a cycle.
    fn preference_extends(&self) -> bool {
        let mut nodes: BTreeSet<Term> = BTreeSet::new();
        let mut edges: BTreeSet<(Term, Term)> = BTreeSet::new();
        let mut false_edges: BTreeSet<(Term, Term)> = BTreeSet::new();
        for (atom, &v) in &self.values {
            if let Atom::NameLt(a, b) = atom {
                nodes.insert(a.clone());
                nodes.insert(b.clone());
                if v {
                    edges.insert((a.clone(), b.clone()));
                } else {
                    false_edges.insert((a.clone(), b.clone()));
                }
            }
        }
        // transitive closure
        let mut closure = edges.clone();
        loop {
            let mut grew = false;
            let snapshot: Vec<(Term, Term)> = closure.iter().cloned().collect();
            for (a, b) in &snapshot {
                for (c, d) in &snapshot {
                    if b == c && !closure.contains(&(a.clone(), d.clone())) {
                        closure.insert((a.clone(), d.clone()));
                        grew = true;
                    }
                }
            }
            if !grew {
                break;
            }
        }
        for (a, b) in &closure {
            if a == b || false_edges.contains(&(a.clone(), b.clone())) {
                return false;
            }
        }
        true
    }

    /// Congruence closure over the occurring terms must not merge anything
    /// the assignment or the background declares apart, and pinned integer
    /// comparisons must evaluate correctly.
    fn equality_extends(&self) -> bool {
        // gather every term occurring in the interpreted atoms
        let mut terms: BTreeSet<Term> = BTreeSet::new();
        let add_term = |t: &Term, terms: &mut BTreeSet<Term>| {
            let mut stack = vec![t.clone()];
            while let Some(t) = stack.pop() {
                stack.extend(t.args().iter().cloned());
                terms.insert(t);
            }
        };
        for atom in self.values.keys() {
            match atom {
                Atom::Eq(a, b) | Atom::IntLt(a, b) => {
                    add_term(a, &mut terms);
                    add_term(b, &mut terms);
                }
                Atom::Pred(_, args) => {
                    for a in args {
                        add_term(a, &mut terms);
                    }
                }
                Atom::NameLt(..) => {}
            }
        }
        let terms: Vec<Term> = terms.into_iter().collect();
        let index: BTreeMap<&Term, usize> =
            terms.iter().enumerate().map(|(i, t)| (t, i)).collect();
        let mut parent: Vec<usize> = (0..terms.len()).collect();
        fn find(parent: &mut Vec<usize>, mut i: usize) -> usize {
            while parent[i] != i {
                parent[i] = parent[parent[i]];
                i = parent[i];
            }
            i
        }
        let union = |parent: &mut Vec<usize>, a: usize, b: usize| {
            let (ra, rb) = (find(parent, a), find(parent, b));
            if ra != rb {
                parent[rb] = ra;
            }
        };
        for (atom, &v) in &self.values {
            if let Atom::Eq(a, b) = atom {
                if v {
                    union(&mut parent, index[a], index[b]);
                }
            }
        }
        // congruence propagation over function applications
        loop {
            let mut grew = false;
            for (i, s) in terms.iter().enumerate() {
                for (j, t) in terms.iter().enumerate().skip(i + 1) {
                    if s.head() != t.head()
                        || s.args().len() != t.args().len()
                        || s.args().is_empty()
                    {
                        continue;
                    }
                    if kind(self.ax, s) == Kind::Name {
                        continue; // names are rigid
                    }
                    let congruent = s
                        .args()
                        .iter()
                        .zip(t.args())
                        .all(|(x, y)| match (index.get(x), index.get(y)) {
                            (Some(&ix), Some(&iy)) => {
                                find(&mut parent, ix) == find(&mut parent, iy)
                            }
                            _ => x == y,
                        });
                    if congruent && find(&mut parent, i) != find(&mut parent, j) {
                        union(&mut parent, i, j);
                        grew = true;
                    }
                }
            }
            if !grew {
                break;
            }
        }
        // no class may contain two incompatible terms
        let mut class_lit: BTreeMap<usize, i64> = BTreeMap::new();
        for (i, t) in terms.iter().enumerate() {
            let r = find(&mut parent, i);
            match t {
                Term::Int(k) => {
                    if let Some(&other) = class_lit.get(&r) {
                        if other != *k {
                            return false;
                        }
                    }
                    class_lit.insert(r, *k);
                }
                _ => {
                    if kind(self.ax, t) == Kind::Name {
                        // a name never merges with anything else
                        let alone = terms.iter().enumerate().all(|(j, u)| {
                            j == i
                                || u == t
                                || find(&mut parent, j) != find(&mut parent, i)
                        });
                        if !alone {
                            return false;
                        }
                    }
                }
            }
        }
        for (i, s) in terms.iter().enumerate() {
            for (j, t) in terms.iter().enumerate().skip(i + 1) {
                if find(&mut parent, i) == find(&mut parent, j)
                    && self.ax.is_declared_distinct(s, t)
                {
                    return false;
                }
            }
        }
        // false equalities must stay apart
        for (atom, &v) in &self.values {
            if let Atom::Eq(a, b) = atom {
                if !v && find(&mut parent, index[a]) == find(&mut parent, index[b]) {
                    return false;
                }
            }
        }
        // predicate congruence: congruent atoms agree
        let preds: Vec<(&Atom, bool)> = self
            .values
            .iter()
            .filter(|(a, _)| matches!(a, Atom::Pred(..)))
            .map(|(a, &v)| (a, v))
            .collect();
        for (i, (pa, va)) in preds.iter().enumerate() {
            for (pb, vb) in preds.iter().skip(i + 1) {
                let (Atom::Pred(p, xs), Atom::Pred(q, ys)) = (pa, pb) else { continue };
                if p != q || xs.len() != ys.len() {
                    continue;
                }
                let congruent = xs.iter().zip(ys).all(|(x, y)| {
                    x == y
                        || match (index.get(x), index.get(y)) {
                            (Some(&ix), Some(&iy)) => {
                                find(&mut parent, ix) == find(&mut parent, iy)
                            }
                            _ => false,
                        }
                });
                if congruent && va != vb {
                    return false;
                }
            }
        }
        // integer comparisons: equal classes compare false, pinned classes
        // compare by value, congruent comparisons agree
        let ilts: Vec<(&Term, &Term, bool)> = self
            .values
            .iter()
            .filter_map(|(a, &v)| match a {
                Atom::IntLt(s, t) => Some((s, t, v)),
                _ => None,
            })
            .collect();
        for (s, t, v) in &ilts {
            let rs = find(&mut parent, index[*s]);
            let rt = find(&mut parent, index[*t]);
            if rs == rt && *v {
                return false;
            }
            if let (Some(&ls), Some(&lt)) = (class_lit.get(&rs), class_lit.get(&rt)) {
                if *v != (ls < lt) {
                    return false;
                }
            }
        }
        for (i, (s1, t1, v1)) in ilts.iter().enumerate() {
            for (s2, t2, v2) in ilts.iter().skip(i + 1) {
                let same = find(&mut parent, index[*s1]) == find(&mut parent, index[*s2])
                    && find(&mut parent, index[*t1]) == find(&mut parent, index[*t2]);
                if same && v1 != v2 {
                    return false;
                }
            }
        }
        true
    }
}

fn for_each_model<F: FnMut(&Assignment<'_>) -> bool>(
    ax: &BackgroundAxioms,
    formulas: &[&Formula],
    mut visit: F,
) {
    let atoms = collect_atoms(ax, formulas);
    assert!(
        atoms.len() <= MAX_ATOMS,
        "naive oracle limited to {MAX_ATOMS} atoms, got {}",
        atoms.len()
    );
    let n = atoms.len();
    for mask in 0u64..(1u64 << n) {
        let values: BTreeMap<Atom, bool> = atoms
            .iter()
            .enumerate()
            .map(|(i, a)| (a.clone(), mask & (1 << i) != 0))
            .collect();
        let assignment = Assignment { ax, values };
        if !assignment.respects_background() {
            continue;
        }
        if !visit(&assignment) {
            return;
        }
    }
}

/// Consistency by exhaustive enumeration.
pub fn naive_consistent(formulas: &[Formula], ax: &BackgroundAxioms) -> bool {
    let refs: Vec<&Formula> = formulas.iter().collect();
    let mut sat = false;
    for_each_model(ax, &refs, |m| {
        if formulas.iter().all(|f| m.eval(f)) {
            sat = true;
            false
        } else {
            true
        }
    });
    sat
}

/// Entailment by exhaustive enumeration.
pub fn naive_entails(formulas: &[Formula], ax: &BackgroundAxioms, query: &Formula) -> bool {
    let mut refs: Vec<&Formula> = formulas.iter().collect();
    refs.push(query);
    let mut holds = true;
    for_each_model(ax, &refs, |m| {
        if formulas.iter().all(|f| m.eval(f)) && !m.eval(query) {
            holds = false;
            false
        } else {
            true
        }
    });
    holds
}

/// Distinct projections onto the `<`-atoms over `names` of the models of
/// `formulas`, by exhaustive enumeration.
pub fn naive_preference_models(
    formulas: &[Formula],
    ax: &BackgroundAxioms,
    names: &[Term],
) -> BTreeSet<Vec<(Term, Term)>> {
    // force every ordered pair into the atom universe
    let mut pair_atoms: Vec<Formula> = Vec::new();
    for a in names {
        for b in names {
            if a != b {
                pair_atoms.push(Formula::pref(a.clone(), b.clone()));
            }
        }
    }
    let mut refs: Vec<&Formula> = formulas.iter().collect();
    refs.extend(pair_atoms.iter());
    let mut out = BTreeSet::new();
    for_each_model(ax, &refs, |m| {
        if formulas.iter().all(|f| m.eval(f)) {
            let mut proj = Vec::new();
            for a in names {
                for b in names {
                    if a != b && m.eval(&Formula::pref(a.clone(), b.clone())) {
                        proj.push((a.clone(), b.clone()));
                    }
                }
            }
            out.insert(proj);
        }
        true
    });
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::axioms::background_axioms;
    use crate::fixtures::ground;
    use crate::parser::parse_formula;

    fn setup(src: &str, fs: &[&str]) -> (Vec<Formula>, BackgroundAxioms) {
        let t = ground(src);
        let ax = background_axioms(&t);
        let formulas = fs
            .iter()
            .map(|f| t.check_formula(&parse_formula(f).unwrap()).unwrap())
            .collect();
        (formulas, ax)
    }

    #[test]
    fn preference_cycles_are_refuted() {
        let (fs, ax) = setup("premise d1: p. premise d2: q.", &["d1 < d2", "d2 < d1"]);
        assert!(!naive_consistent(&fs, &ax));
    }

    #[test]
    fn partial_order_counts_on_small_universes() {
        // strict partial orders on n labeled points: 1, 3, 19, 219
        for (names, want) in [(1, 1), (2, 3), (3, 19), (4, 219)] {
            let src: String = (1..=names)
                .map(|i| format!("premise d{i}: p{i}."))
                .collect::<Vec<_>>()
                .join(" ");
            let t = ground(&src);
            let ax = background_axioms(&t);
            let models =
                naive_preference_models(&[], &ax, &t.signature.names);
            assert_eq!(models.len(), want, "n = {names}");
        }
    }

    #[test]
    fn congruence_respects_distinctness() {
        let (fs, ax) = setup(
            "distinct low, medium. premise d1: rel(d1) = medium.",
            &["rel(d1) = medium", "rel(d1) = low"],
        );
        assert!(!naive_consistent(&fs, &ax));
    }

    #[test]
    fn pinned_integers_compare_by_value() {
        let (fs, ax) = setup(
            "premise d3: time(d1) = 10. premise d4: time(d2) = 11. premise d1: p. premise d2: q.",
            &["time(d1) = 10", "time(d2) = 11"],
        );
        let q = parse_formula("time(d1) < time(d2)").unwrap();
        assert!(naive_entails(&fs, &ax, &q));
        let q2 = parse_formula("time(d2) < time(d1)").unwrap();
        assert!(!naive_entails(&fs, &ax, &q2));
        assert!(naive_entails(&fs, &ax, &parse_formula("~(time(d2) < time(d1))").unwrap()));
    }

    #[test]
    fn non_entailment_has_a_witness_model() {
        let (fs, ax) = setup(
            "premise d1: p. premise d2: q. premise d3: rel(d1) = medium & rel(d2) = medium.",
            &["rel(d1) = medium", "rel(d2) = medium"],
        );
        let q = parse_formula("d1 < d2").unwrap();
        assert!(!naive_entails(&fs, &ax, &q));
    }
}
