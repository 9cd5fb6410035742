//! Propositional encoding of ground formula sets modulo the background
//! theory.
//!
//! Atoms are interned to SAT variables; the background axioms are
//! instantiated over the closure of the atoms that actually occur:
//!
//! * name preference `<` is a strict partial order: reflexive atoms fold to
//!   false and transitivity is instantiated over the demand closure of the
//!   occurring pairs (which also yields the asymmetry clauses);
//! * name terms are rigid: equality between names folds to a constant;
//! * ground equality gets reflexivity (by folding), symmetry (by canonical
//!   orientation), transitivity over connected components, and function and
//!   predicate congruence over same-symbol occurrences;
//! * integer comparison evaluates on literals and is otherwise an
//!   uninterpreted atom constrained by congruence and by pinning terms to
//!   literals through equalities;
//! * declared-distinct constants yield folded-false equalities.

use std::collections::{BTreeMap, BTreeSet};

use crate::axioms::BackgroundAxioms;
use crate::formula::Formula;
use crate::kinds::KindTable;
use crate::sat::{Lit, Solver, Var};
use crate::term::{Kind, Term};

/// Result of encoding a formula: a literal or a constant.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EncVal {
    Const(bool),
    L(Lit),
}

impl EncVal {
    pub fn negate(self) -> EncVal {
        match self {
            EncVal::Const(b) => EncVal::Const(!b),
            EncVal::L(l) => EncVal::L(l.negate()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
enum AtomKey {
    Pred(String, Vec<Term>),
    Eq(Term, Term),
    NameLt(Term, Term),
    IntLt(Term, Term),
}

#[derive(Debug, Clone)]
enum Event {
    Lt(Term, Term),
    EqVar(Term, Term),
    Ilt(Term, Term),
    Pred(String, Vec<Term>),
    Func(String, Vec<Term>),
}

/// Incremental encoder over a fixed background context. Cloning an encoder
/// snapshots the whole instance.
#[derive(Clone)]
pub struct Encoder<'a> {
    ax: &'a BackgroundAxioms,
    kinds: KindTable,
    num_vars: u32,
    clauses: Vec<Vec<Lit>>,
    unsat: bool,
    atoms: BTreeMap<AtomKey, Var>,
    // closure indexes
    lt_out: BTreeMap<Term, BTreeSet<Term>>,
    lt_in: BTreeMap<Term, BTreeSet<Term>>,
    lt_triples: BTreeSet<(Term, Term, Term)>,
    eq_adj: BTreeMap<Term, BTreeSet<Term>>,
    eq_triples: BTreeSet<(Term, Term, Term)>,
    eq_lits: BTreeMap<Term, BTreeSet<i64>>,
    ilt_atoms: Vec<(Term, Term)>,
    ilt_by_side: BTreeMap<Term, Vec<(Term, Term)>>,
    ilt_pins: BTreeSet<(Term, Term, i64, i64)>,
    preds: BTreeMap<(String, usize), Vec<Vec<Term>>>,
    funcs: BTreeMap<(String, usize), Vec<Vec<Term>>>,
    pending: Vec<Event>,
    saturating: bool,
}

impl<'a> Encoder<'a> {
    /// Fresh encoder over a background context; `extra_kinds` resolves any
    /// symbols that do not occur in the underlying theory.
    pub fn new(ax: &'a BackgroundAxioms, extra_kinds: Option<KindTable>) -> Encoder<'a> {
        let kinds = extra_kinds.unwrap_or_else(|| ax.signature.kinds.clone());
        Encoder {
            ax,
            kinds,
            num_vars: 0,
            clauses: Vec::new(),
            unsat: false,
            atoms: BTreeMap::new(),
            lt_out: BTreeMap::new(),
            lt_in: BTreeMap::new(),
            lt_triples: BTreeSet::new(),
            eq_adj: BTreeMap::new(),
            eq_triples: BTreeSet::new(),
            eq_lits: BTreeMap::new(),
            ilt_atoms: Vec::new(),
            ilt_by_side: BTreeMap::new(),
            ilt_pins: BTreeSet::new(),
            preds: BTreeMap::new(),
            funcs: BTreeMap::new(),
            pending: Vec::new(),
            saturating: false,
        }
    }

    pub fn num_vars(&self) -> u32 {
        self.num_vars
    }

    pub fn num_clauses(&self) -> usize {
        self.clauses.len()
    }

    /// The clause list, for incremental synchronization into a solver.
    pub fn clauses(&self) -> &[Vec<Lit>] {
        &self.clauses
    }

    /// Allocate a variable outside the atom map (selectors, order search).
    pub fn new_var(&mut self) -> Var {
        let v = self.num_vars;
        self.num_vars += 1;
        v
    }

    /// Add a raw clause over already-created variables.
    pub fn add_raw_clause(&mut self, lits: &[Lit]) {
        self.clauses.push(lits.to_vec());
    }

    /// Add a clause of encoded values, folding constants.
    pub fn add_clause(&mut self, vals: &[EncVal]) {
        let mut lits = Vec::with_capacity(vals.len());
        for v in vals {
            match v {
                EncVal::Const(true) => return,
                EncVal::Const(false) => {}
                EncVal::L(l) => lits.push(*l),
            }
        }
        if lits.is_empty() {
            self.unsat = true;
        } else {
            self.clauses.push(lits);
        }
    }

    /// Assert an encoded value as a unit.
    pub fn assert_val(&mut self, v: EncVal) {
        self.add_clause(&[v]);
    }

    /// Materialize the instance into a solver. Variable indices carry over.
    pub fn build_solver(&self) -> Solver {
        let mut s = Solver::new();
        for _ in 0..self.num_vars {
            s.new_var();
        }
        if self.unsat {
            s.add_clause(&[]);
            return s;
        }
        for c in &self.clauses {
            s.add_clause(c);
        }
        s
    }

    fn kind_of(&self, t: &Term) -> Kind {
        match t {
            Term::Int(_) => Kind::Int,
            Term::Var(_) => Kind::Object,
            Term::App(head, args) => {
                if self.ax.signature.is_name(t)
                    || self.ax.signature.schema_heads.contains_key(head)
                {
                    Kind::Name
                } else if args.is_empty() {
                    Kind::Object
                } else {
                    self.kinds
                        .func_result
                        .get(&(head.clone(), args.len()))
                        .copied()
                        .unwrap_or(Kind::Object)
                }
            }
        }
    }

    fn fresh_atom(&mut self, key: AtomKey) -> (Var, bool) {
        if let Some(&v) = self.atoms.get(&key) {
            return (v, false);
        }
        let v = self.new_var();
        self.atoms.insert(key, v);
        (v, true)
    }

    /// Register every non-name function application occurring in a term.
    fn register_terms(&mut self, t: &Term) {
        let mut stack = vec![t.clone()];
        while let Some(t) = stack.pop() {
            if let Term::App(head, args) = &t {
                if !args.is_empty() && self.kind_of(&t) != Kind::Name {
                    let key = (head.clone(), args.len());
                    let entry = self.funcs.entry(key.clone()).or_default();
                    if !entry.contains(args) {
                        entry.push(args.clone());
                        self.pending.push(Event::Func(head.clone(), args.clone()));
                    }
                }
                stack.extend(args.iter().cloned());
            }
        }
    }

    /// Intern an equality atom, folding decided cases.
    fn eq_val(&mut self, a: &Term, b: &Term) -> EncVal {
        if a == b {
            return EncVal::Const(true);
        }
        let (ka, kb) = (self.kind_of(a), self.kind_of(b));
        if ka == Kind::Name && kb == Kind::Name {
            // names are rigid designators
            return EncVal::Const(false);
        }
        if let (Term::Int(x), Term::Int(y)) = (a, b) {
            return EncVal::Const(x == y);
        }
        if ka != kb {
            // ill-kinded equality; the checker rejects these upstream
            return EncVal::Const(false);
        }
        if self.ax.is_declared_distinct(a, b) {
            return EncVal::Const(false);
        }
        let (x, y) = if a <= b { (a.clone(), b.clone()) } else { (b.clone(), a.clone()) };
        self.register_terms(&x);
        self.register_terms(&y);
        let (v, new) = self.fresh_atom(AtomKey::Eq(x.clone(), y.clone()));
        if new {
            self.pending.push(Event::EqVar(x, y));
            self.saturate();
        }
        EncVal::L(Lit::pos(v))
    }

    /// Intern a name-preference atom.
    fn name_lt_val(&mut self, a: &Term, b: &Term) -> EncVal {
        if a == b {
            // irreflexivity
            return EncVal::Const(false);
        }
        let (v, new) = self.fresh_atom(AtomKey::NameLt(a.clone(), b.clone()));
        if new {
            self.pending.push(Event::Lt(a.clone(), b.clone()));
            self.saturate();
        }
        EncVal::L(Lit::pos(v))
    }

    /// Intern an integer comparison atom.
    fn int_lt_val(&mut self, a: &Term, b: &Term) -> EncVal {
        if let (Term::Int(x), Term::Int(y)) = (a, b) {
            return EncVal::Const(x < y);
        }
        if a == b {
            return EncVal::Const(false);
        }
        self.register_terms(a);
        self.register_terms(b);
        let (v, new) = self.fresh_atom(AtomKey::IntLt(a.clone(), b.clone()));
        if new {
            self.pending.push(Event::Ilt(a.clone(), b.clone()));
            self.saturate();
        }
        EncVal::L(Lit::pos(v))
    }

    fn pred_val(&mut self, p: &str, args: &[Term]) -> EncVal {
        for t in args {
            self.register_terms(t);
        }
        let key = AtomKey::Pred(p.to_string(), args.to_vec());
        let (v, new) = self.fresh_atom(key);
        if new {
            let entry = self.preds.entry((p.to_string(), args.len())).or_default();
            entry.push(args.to_vec());
            self.pending.push(Event::Pred(p.to_string(), args.to_vec()));
            self.saturate();
        }
        EncVal::L(Lit::pos(v))
    }

    /// The variable of a name-preference atom, creating it if needed.
    pub fn lt_var(&mut self, a: &Term, b: &Term) -> Option<Var> {
        match self.name_lt_val(a, b) {
            EncVal::L(l) => Some(l.var()),
            EncVal::Const(_) => None,
        }
    }

    /// Existing preference variables, with their ordered name pairs.
    pub fn lt_vars(&self) -> Vec<(Term, Term, Var)> {
        self.atoms
            .iter()
            .filter_map(|(k, &v)| match k {
                AtomKey::NameLt(a, b) => Some((a.clone(), b.clone(), v)),
                _ => None,
            })
            .collect()
    }

    // -- background axiom saturation ---------------------------------------

    fn saturate(&mut self) {
        // interning inside an axiom instance re-enters here; the outermost
        // call drains everything
        if self.saturating {
            return;
        }
        self.saturating = true;
        while let Some(ev) = self.pending.pop() {
            match ev {
                Event::Lt(a, b) => self.on_lt(a, b),
                Event::EqVar(a, b) => self.on_eq(a, b),
                Event::Ilt(s, t) => self.on_ilt(s, t),
                Event::Pred(p, args) => self.on_pred(p, args),
                Event::Func(h, args) => self.on_func(h, args),
            }
        }
        self.saturating = false;
    }

    fn lt_transitivity(&mut self, a: &Term, b: &Term, c: &Term) {
        let key = (a.clone(), b.clone(), c.clone());
        if !self.lt_triples.insert(key) {
            return;
        }
        let ab = self.name_lt_val(a, b);
        let bc = self.name_lt_val(b, c);
        let ac = self.name_lt_val(a, c);
        self.add_clause(&[ab.negate(), bc.negate(), ac]);
    }

    fn on_lt(&mut self, a: Term, b: Term) {
        self.lt_out.entry(a.clone()).or_default().insert(b.clone());
        self.lt_in.entry(b.clone()).or_default().insert(a.clone());
        for c in self.lt_out.get(&b).cloned().unwrap_or_default() {
            self.lt_transitivity(&a, &b, &c);
        }
        for x in self.lt_in.get(&a).cloned().unwrap_or_default() {
            self.lt_transitivity(&x, &a, &b);
        }
        // asymmetry appears as the a == c transitivity instance; force it
        // even when the reverse pair already exists
        if self.lt_out.get(&b).map(|s| s.contains(&a)).unwrap_or(false) {
            self.lt_transitivity(&a, &b, &a);
            self.lt_transitivity(&b, &a, &b);
        }
    }

    fn eq_transitivity(&mut self, a: &Term, b: &Term, c: &Term) {
        // triple key is the sorted term triple
        let mut key = [a.clone(), b.clone(), c.clone()];
        key.sort();
        let [x, y, z] = key;
        if !self.eq_triples.insert((x.clone(), y.clone(), z.clone())) {
            return;
        }
        let xy = self.eq_val(&x, &y);
        let yz = self.eq_val(&y, &z);
        let xz = self.eq_val(&x, &z);
        self.add_clause(&[xy.negate(), yz.negate(), xz]);
        self.add_clause(&[xy.negate(), xz.negate(), yz]);
        self.add_clause(&[xz.negate(), yz.negate(), xy]);
    }

    fn on_eq(&mut self, a: Term, b: Term) {
        self.eq_adj.entry(a.clone()).or_default().insert(b.clone());
        self.eq_adj.entry(b.clone()).or_default().insert(a.clone());
        for c in self.eq_adj.get(&a).cloned().unwrap_or_default() {
            if c != b {
                self.eq_transitivity(&b, &a, &c);
            }
        }
        for c in self.eq_adj.get(&b).cloned().unwrap_or_default() {
            if c != a {
                self.eq_transitivity(&a, &b, &c);
            }
        }
        // literal pinning feeds integer comparison evaluation
        let lit_pairs: Vec<(Term, i64)> = match (&a, &b) {
            (t, Term::Int(k)) => vec![(t.clone(), *k)],
            (Term::Int(k), t) => vec![(t.clone(), *k)],
            _ => Vec::new(),
        };
        for (t, k) in lit_pairs {
            self.eq_lits.entry(t.clone()).or_default().insert(k);
            for (s, u) in self.ilt_by_side.get(&t).cloned().unwrap_or_default() {
                self.pin_ilt(&s, &u);
            }
        }
        // equal terms never compare strictly by <
        for (x, y) in [(&a, &b), (&b, &a)] {
            if self.atoms.contains_key(&AtomKey::IntLt(x.clone(), y.clone())) {
                let e = self.eq_val(&a, &b);
                let i = self.int_lt_val(x, y);
                self.add_clause(&[e.negate(), i.negate()]);
            }
        }
    }

    /// Pins of an integer-kind term: known literal values with the equality
    /// that conditions each of them. A literal term pins itself.
    fn pins(&self, t: &Term) -> Vec<(Option<(Term, Term)>, i64)> {
        match t {
            Term::Int(k) => vec![(None, *k)],
            _ => self
                .eq_lits
                .get(t)
                .map(|ks| {
                    ks.iter().map(|&k| (Some((t.clone(), Term::Int(k))), k)).collect()
                })
                .unwrap_or_default(),
        }
    }

    fn pin_ilt(&mut self, s: &Term, t: &Term) {
        for (cond_s, ks) in self.pins(s) {
            for (cond_t, kt) in self.pins(t) {
                if !self.ilt_pins.insert((s.clone(), t.clone(), ks, kt)) {
                    continue;
                }
                let mut clause = Vec::new();
                if let Some((x, y)) = &cond_s {
                    let e = self.eq_val(x, y);
                    clause.push(e.negate());
                }
                if let Some((x, y)) = &cond_t {
                    let e = self.eq_val(x, y);
                    clause.push(e.negate());
                }
                let atom = self.int_lt_val(s, t);
                clause.push(if ks < kt { atom } else { atom.negate() });
                self.add_clause(&clause);
            }
        }
    }

    /// Congruence antecedent between two argument vectors; `None` when the
    /// vectors are provably unequal.
    fn arg_equalities(&mut self, xs: &[Term], ys: &[Term]) -> Option<Vec<EncVal>> {
        let mut conds = Vec::new();
        for (x, y) in xs.iter().zip(ys) {
            match self.eq_val(x, y) {
                EncVal::Const(true) => {}
                EncVal::Const(false) => return None,
                v => conds.push(v),
            }
        }
        Some(conds)
    }

    fn on_ilt(&mut self, s: Term, t: Term) {
        let prior = self.ilt_atoms.clone();
        self.ilt_atoms.push((s.clone(), t.clone()));
        self.ilt_by_side.entry(s.clone()).or_default().push((s.clone(), t.clone()));
        self.ilt_by_side.entry(t.clone()).or_default().push((s.clone(), t.clone()));
        self.pin_ilt(&s, &t);
        // congruence with previously seen comparisons
        for (u, v) in prior {
            let Some(conds) = self.arg_equalities(&[s.clone(), t.clone()], &[u.clone(), v.clone()])
            else {
                continue;
            };
            let a1 = self.int_lt_val(&s, &t);
            let a2 = self.int_lt_val(&u, &v);
            let mut c1: Vec<EncVal> = conds.iter().map(|c| c.negate()).collect();
            let mut c2 = c1.clone();
            c1.extend([a1.negate(), a2]);
            c2.extend([a1, a2.negate()]);
            self.add_clause(&c1);
            self.add_clause(&c2);
        }
        // equal sides never compare strictly
        let e_key = {
            let (x, y) = if s <= t { (s.clone(), t.clone()) } else { (t.clone(), s.clone()) };
            AtomKey::Eq(x, y)
        };
        if self.atoms.contains_key(&e_key) {
            let e = self.eq_val(&s, &t);
            let i = self.int_lt_val(&s, &t);
            self.add_clause(&[e.negate(), i.negate()]);
        }
    }

    fn on_pred(&mut self, p: String, args: Vec<Term>) {
        let key = (p.clone(), args.len());
        let prior: Vec<Vec<Term>> = self
            .preds
            .get(&key)
            .map(|v| v.iter().filter(|a| **a != args).cloned().collect())
            .unwrap_or_default();
        for other in prior {
            let Some(conds) = self.arg_equalities(&args, &other) else { continue };
            let a1 = self.pred_val(&p, &args);
            let a2 = self.pred_val(&p, &other);
            let mut c1: Vec<EncVal> = conds.iter().map(|c| c.negate()).collect();
            let mut c2 = c1.clone();
            c1.extend([a1.negate(), a2]);
            c2.extend([a1, a2.negate()]);
            self.add_clause(&c1);
            self.add_clause(&c2);
        }
    }

    fn on_func(&mut self, h: String, args: Vec<Term>) {
        let key = (h.clone(), args.len());
        let prior: Vec<Vec<Term>> = self
            .funcs
            .get(&key)
            .map(|v| v.iter().filter(|a| **a != args).cloned().collect())
            .unwrap_or_default();
        for other in prior {
            let Some(conds) = self.arg_equalities(&args, &other) else { continue };
            let fa = Term::App(h.clone(), args.clone());
            let fb = Term::App(h.clone(), other.clone());
            let eq = self.eq_val(&fa, &fb);
            let mut clause: Vec<EncVal> = conds.iter().map(|c| c.negate()).collect();
            clause.push(eq);
            self.add_clause(&clause);
        }
    }

    // -- formula encoding ---------------------------------------------------

    /// Tseitin-encode a ground formula; the result is equisatisfiable and the
    /// returned value is equivalent to the formula in every model.
    pub fn encode(&mut self, f: &Formula) -> EncVal {
        match f {
            Formula::True => EncVal::Const(true),
            Formula::False => EncVal::Const(false),
            Formula::Pred(p, args) => self.pred_val(p, args),
            Formula::Eq(a, b) => self.eq_val(a, b),
            Formula::Less(a, b) => match (self.kind_of(a), self.kind_of(b)) {
                (Kind::Name, Kind::Name) => self.name_lt_val(a, b),
                _ => self.int_lt_val(a, b),
            },
            Formula::Not(g) => self.encode(g).negate(),
            Formula::And(gs) => {
                let vals: Vec<EncVal> = gs.iter().map(|g| self.encode(g)).collect();
                self.encode_and(vals)
            }
            Formula::Or(gs) => {
                let vals: Vec<EncVal> = gs.iter().map(|g| self.encode(g)).collect();
                self.encode_or(vals)
            }
            Formula::Implies(a, b) => {
                let va = self.encode(a).negate();
                let vb = self.encode(b);
                self.encode_or(vec![va, vb])
            }
            Formula::Iff(a, b) => {
                let va = self.encode(a);
                let vb = self.encode(b);
                match (va, vb) {
                    (EncVal::Const(x), v) | (v, EncVal::Const(x)) => {
                        if x {
                            v
                        } else {
                            v.negate()
                        }
                    }
                    (EncVal::L(x), EncVal::L(y)) => {
                        let out = Lit::pos(self.new_var());
                        self.add_raw_clause(&[out.negate(), x.negate(), y]);
                        self.add_raw_clause(&[out.negate(), y.negate(), x]);
                        self.add_raw_clause(&[out, x, y]);
                        self.add_raw_clause(&[out, x.negate(), y.negate()]);
                        EncVal::L(out)
                    }
                }
            }
            Formula::Quant(..) => {
                unreachable!("formulas must be ground before encoding")
            }
        }
    }

    pub fn encode_and(&mut self, vals: Vec<EncVal>) -> EncVal {
        let mut lits = Vec::with_capacity(vals.len());
        for v in vals {
            match v {
                EncVal::Const(false) => return EncVal::Const(false),
                EncVal::Const(true) => {}
                EncVal::L(l) => lits.push(l),
            }
        }
        match lits.len() {
            0 => EncVal::Const(true),
            1 => EncVal::L(lits[0]),
            _ => {
                let out = Lit::pos(self.new_var());
                let mut big = vec![out];
                for l in &lits {
                    self.add_raw_clause(&[out.negate(), *l]);
                    big.push(l.negate());
                }
                self.add_raw_clause(&big);
                EncVal::L(out)
            }
        }
    }

    pub fn encode_or(&mut self, vals: Vec<EncVal>) -> EncVal {
        let negated: Vec<EncVal> = vals.into_iter().map(EncVal::negate).collect();
        self.encode_and(negated).negate()
    }
}
