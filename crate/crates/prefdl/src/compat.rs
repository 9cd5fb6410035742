//! The engine behind compatible-extension computation.
//!
//! A base `B` belongs to the extensions compatible with a context `S` exactly
//! when some total order `L` of the theory generates `B` greedily while
//! `S` plus the axioms stays satisfiable with no preference atom outside `L`
//! (a model's preference projection is then a partial order `L` extends, and
//! its diagram witnesses compatibility). The search for `L` runs inside the
//! same SAT instance as the semantic part:
//!
//! * candidate bases are the maximal consistent subsets, enumerated once per
//!   theory with selector variables and a grow-and-block loop;
//! * per base, order variables `ord(a, b)` couple the preference atoms
//!   (`a < b` forces `ord(a, b)`), asymmetry is eager, and acyclicity plus
//!   the greedy side conditions are enforced lazily: whenever a model leaves
//!   some non-member `f` consistent with the members ordered before it, a
//!   maximal such member set `M` is computed and the clause "some member
//!   outside `M` precedes `f`" is added; cycles in the chosen edges are cut
//!   by blocking the cycle.
//!
//! The refinement sets depend only on the theory and the base, so they are
//! cached and replayed across fixpoint steps.

use std::collections::{BTreeMap, BTreeSet};

use crate::axioms::BackgroundAxioms;
use crate::encode::{EncVal, Encoder};
use crate::error::{CapKind, EngineError};
use crate::extension::{canonicalize_bases, Context, ExtensionBase};
use crate::formula::Formula;
use crate::oracle::{solve_capped, Caps};
use crate::order::{linearizations, StrictPartialOrder, TotalOrder};
use crate::sat::{Lit, Solver, Var};
use crate::term::Term;
use crate::theory::GroundTheory;

const MAX_REFINEMENT_ROUNDS: u64 = 100_000;
/// Below this many linearizations, enumerate them directly (which also
/// records generating orders); above it, switch to the per-base search.
const DIRECT_LINEARIZATION_LIMIT: usize = 5_000;

/// What the compatibility context looks like after resolving belief
/// representations to formula indices.
pub(crate) enum Guidance {
    Unconstrained,
    Formulas(Vec<Formula>),
    /// Disjunction over bases of the conjunction of all members.
    Bases(Vec<Vec<usize>>),
}

pub(crate) struct CompatEngine<'t> {
    theory: &'t GroundTheory,
    pub(crate) caps: Caps,
    enc0: Encoder<'t>,
    selectors: Vec<Var>,
    roots: Vec<EncVal>,
    name_to_idx: BTreeMap<Term, usize>,
    /// shared solver for subset-consistency queries (assumptions only)
    plain: Solver,
    mcs_cache: Option<Vec<Vec<usize>>>,
    /// (base, non-member) -> maximal member sets consistent with the
    /// non-member; each yields a standing refinement clause
    blocker_cache: BTreeMap<(Vec<usize>, usize), Vec<Vec<usize>>>,
}

impl<'t> CompatEngine<'t> {
    pub fn new(
        theory: &'t GroundTheory,
        ax: &'t BackgroundAxioms,
        caps: &Caps,
    ) -> Result<Self, EngineError> {
        let mut enc = Encoder::new(ax, None);
        let mut selectors = Vec::with_capacity(theory.formulas.len());
        let mut roots = Vec::with_capacity(theory.formulas.len());
        for nf in &theory.formulas {
            let root = enc.encode(&nf.body);
            let s = enc.new_var();
            // selecting a formula asserts it
            match root {
                EncVal::Const(true) => {}
                EncVal::Const(false) => enc.add_raw_clause(&[Lit::neg(s)]),
                EncVal::L(l) => enc.add_raw_clause(&[Lit::neg(s), l]),
            }
            selectors.push(s);
            roots.push(root);
        }
        let mut plain = enc.build_solver();
        for &s in &selectors {
            plain.set_polarity(s, true);
        }
        let name_to_idx = theory
            .formulas
            .iter()
            .enumerate()
            .map(|(i, f)| (f.name.clone(), i))
            .collect();
        Ok(CompatEngine {
            theory,
            caps: *caps,
            enc0: enc,
            selectors,
            roots,
            name_to_idx,
            plain,
            mcs_cache: None,
            blocker_cache: BTreeMap::new(),
        })
    }

    fn base_from_idxs(&self, idxs: &[usize], order: Option<TotalOrder>) -> ExtensionBase {
        let mut sorted = idxs.to_vec();
        sorted.sort_unstable();
        ExtensionBase {
            members: sorted.iter().map(|&i| self.theory.formulas[i].clone()).collect(),
            generating_order: order,
        }
    }

    fn consistent(&mut self, idxs: &[usize]) -> Result<bool, EngineError> {
        let assumptions: Vec<Lit> =
            idxs.iter().map(|&i| Lit::pos(self.selectors[i])).collect();
        solve_capped(&mut self.plain, &assumptions, &self.caps)
    }

    /// Greedy extension construction along a total order.
    pub fn greedy(&mut self, order: &TotalOrder) -> Result<ExtensionBase, EngineError> {
        let idxs: Vec<usize> = order
            .sequence
            .iter()
            .map(|n| {
                self.name_to_idx.get(n).copied().ok_or_else(|| {
                    EngineError::Ground(crate::error::GroundError::UnknownName {
                        name: n.to_string(),
                    })
                })
            })
            .collect::<Result<_, _>>()?;
        let mut acc: Vec<usize> = Vec::new();
        for i in idxs {
            acc.push(i);
            if !self.consistent(&acc)? {
                acc.pop();
            }
        }
        Ok(self.base_from_idxs(&acc, Some(order.clone())))
    }

    /// Maximal consistent subsets of the theory, canonically ordered.
    pub fn mcs(&mut self) -> Result<Vec<Vec<usize>>, EngineError> {
        if let Some(m) = &self.mcs_cache {
            return Ok(m.clone());
        }
        let n = self.theory.formulas.len();
        let mut solver = self.enc0.build_solver();
        for &s in &self.selectors {
            solver.set_polarity(s, true);
        }
        let mut found: Vec<Vec<usize>> = Vec::new();
        loop {
            if !solve_capped(&mut solver, &[], &self.caps)? {
                break;
            }
            let mut cur: Vec<usize> = (0..n)
                .filter(|&i| solver.model_value(Lit::pos(self.selectors[i])))
                .collect();
            for i in 0..n {
                if cur.contains(&i) {
                    continue;
                }
                cur.push(i);
                if !self.consistent(&cur)? {
                    cur.pop();
                }
            }
            cur.sort_unstable();
            if found.len() as u64 >= self.caps.max_models {
                return Err(EngineError::cap(CapKind::Models, self.caps.max_models));
            }
            let blocking: Vec<Lit> = (0..n)
                .filter(|i| !cur.contains(i))
                .map(|i| Lit::pos(self.selectors[i]))
                .collect();
            found.push(cur);
            solver.add_clause(&blocking);
        }
        // canonical order: by member name vectors
        found.sort_by_key(|idxs| {
            let mut names: Vec<Term> =
                idxs.iter().map(|&i| self.theory.formulas[i].name.clone()).collect();
            names.sort();
            names
        });
        self.mcs_cache = Some(found.clone());
        Ok(found)
    }

    fn resolve_context(&self, ctx: &Context<'_>) -> Result<Guidance, EngineError> {
        Ok(match ctx {
            Context::Empty => Guidance::Unconstrained,
            Context::Formulas(fs) => Guidance::Formulas(fs.to_vec()),
            Context::Belief(rep) => {
                let mut bases = Vec::with_capacity(rep.bases.len());
                for b in &rep.bases {
                    let mut idxs = Vec::with_capacity(b.members.len());
                    for m in &b.members {
                        let i = self.name_to_idx.get(&m.name).copied().ok_or_else(|| {
                            EngineError::Ground(crate::error::GroundError::UnknownName {
                                name: m.name.to_string(),
                            })
                        })?;
                        idxs.push(i);
                    }
                    bases.push(idxs);
                }
                Guidance::Bases(bases)
            }
        })
    }

    /// The extensions compatible with the context.
    pub fn extensions_compatible(
        &mut self,
        ctx: &Context<'_>,
    ) -> Result<Vec<ExtensionBase>, EngineError> {
        let guidance = self.resolve_context(ctx)?;
        let candidates = self.mcs()?;
        // the empty context constrains nothing: every maximal consistent
        // subset arises from a members-first order
        if matches!(guidance, Guidance::Unconstrained) {
            let bases =
                candidates.iter().map(|b| self.base_from_idxs(b, None)).collect();
            return Ok(canonicalize_bases(bases));
        }
        let mut out = Vec::new();
        for b in candidates {
            if self.base_realizable(&b, &guidance, &[])? {
                out.push(self.base_from_idxs(&b, None));
            }
        }
        Ok(canonicalize_bases(out))
    }

    /// Extensions generated by the linearizations of a fixed partial order.
    pub fn extensions_for_partial_order(
        &mut self,
        order: &StrictPartialOrder,
    ) -> Result<Vec<ExtensionBase>, EngineError> {
        let mut lins: Vec<TotalOrder> = Vec::new();
        let mut overflow = false;
        for lin in linearizations(order) {
            if lins.len() >= DIRECT_LINEARIZATION_LIMIT {
                overflow = true;
                break;
            }
            if lins.len() as u64 >= self.caps.max_linearizations {
                return Err(EngineError::cap(
                    CapKind::Linearizations,
                    self.caps.max_linearizations,
                ));
            }
            lins.push(lin);
        }
        if !overflow {
            let mut bases = Vec::new();
            for lin in lins {
                bases.push(self.greedy(&lin)?);
            }
            return Ok(canonicalize_bases(bases));
        }
        // too many linearizations: decide per candidate base whether some
        // linearization of `order` generates it
        let forced: Vec<(Term, Term)> = order.pairs().iter().cloned().collect();
        let candidates = self.mcs()?;
        let mut out = Vec::new();
        for b in candidates {
            if self.base_realizable(&b, &Guidance::Unconstrained, &forced)? {
                out.push(self.base_from_idxs(&b, None));
            }
        }
        Ok(canonicalize_bases(out))
    }

    /// Is some linearization realizing the base available, subject to the
    /// guidance formula (semantic coupling) and to forced order edges?
    pub(crate) fn base_realizable(
        &mut self,
        base: &[usize],
        guidance: &Guidance,
        forced: &[(Term, Term)],
    ) -> Result<bool, EngineError> {
        let n = self.theory.formulas.len();
        let base_set: BTreeSet<usize> = base.iter().copied().collect();
        let nonmembers: Vec<usize> = (0..n).filter(|i| !base_set.contains(i)).collect();
        let mut enc = self.enc0.clone();
        // assert the guidance formula
        let g = match guidance {
            Guidance::Unconstrained => EncVal::Const(true),
            Guidance::Formulas(fs) => {
                let vs: Vec<EncVal> = fs.iter().map(|f| enc.encode(f)).collect();
                enc.encode_and(vs)
            }
            Guidance::Bases(bs) => {
                let disjuncts: Vec<EncVal> = bs
                    .iter()
                    .map(|b| {
                        let conj: Vec<EncVal> = b.iter().map(|&i| self.roots[i]).collect();
                        enc.encode_and(conj)
                    })
                    .collect();
                enc.encode_or(disjuncts)
            }
        };
        enc.assert_val(g);
        // order-search variables: one per preference atom (coupled) and one
        // per member-before-nonmember pair
        let mut ord: BTreeMap<(Term, Term), Var> = BTreeMap::new();
        for (a, b, v) in enc.lt_vars() {
            let o = enc.new_var();
            ord.insert((a, b), o);
            enc.add_raw_clause(&[Lit::neg(v), Lit::pos(o)]);
        }
        for &f in &nonmembers {
            let fname = self.theory.formulas[f].name.clone();
            for &m in base {
                let mname = self.theory.formulas[m].name.clone();
                let key = (mname, fname.clone());
                if !ord.contains_key(&key) {
                    let o = enc.new_var();
                    ord.insert(key, o);
                }
            }
        }
        for (a, b) in forced {
            let key = (a.clone(), b.clone());
            let o = match ord.get(&key) {
                Some(&o) => o,
                None => {
                    let o = enc.new_var();
                    ord.insert(key, o);
                    o
                }
            };
            enc.add_raw_clause(&[Lit::pos(o)]);
        }
        // eager asymmetry
        let keys: Vec<(Term, Term)> = ord.keys().cloned().collect();
        for (a, b) in &keys {
            if a < b {
                if let Some(&rev) = ord.get(&(b.clone(), a.clone())) {
                    let fwd = ord[&(a.clone(), b.clone())];
                    enc.add_raw_clause(&[Lit::neg(fwd), Lit::neg(rev)]);
                }
            }
        }
        // replay cached refinements for this base
        for &f in &nonmembers {
            if let Some(sets) = self.blocker_cache.get(&(base.to_vec(), f)) {
                let fname = &self.theory.formulas[f].name;
                for m in sets {
                    let clause: Vec<Lit> = base
                        .iter()
                        .filter(|g| !m.contains(g))
                        .map(|&g| {
                            let gname = self.theory.formulas[g].name.clone();
                            Lit::pos(ord[&(gname, fname.clone())])
                        })
                        .collect();
                    enc.add_clause(&clause.iter().map(|&l| EncVal::L(l)).collect::<Vec<_>>());
                }
            }
        }
        // node indexing for cycle detection
        let mut nodes: BTreeMap<Term, usize> = BTreeMap::new();
        for (a, b) in ord.keys() {
            let next = nodes.len();
            nodes.entry(a.clone()).or_insert(next);
            let next = nodes.len();
            nodes.entry(b.clone()).or_insert(next);
        }
        let mut solver = enc.build_solver();
        let mut rounds = 0u64;
        loop {
            rounds += 1;
            if rounds > MAX_REFINEMENT_ROUNDS {
                return Err(EngineError::cap(CapKind::Iterations, MAX_REFINEMENT_ROUNDS));
            }
            if !solve_capped(&mut solver, &[], &self.caps)? {
                return Ok(false);
            }
            let true_edges: Vec<((Term, Term), Var)> = ord
                .iter()
                .filter(|(_, &v)| solver.model_value(Lit::pos(v)))
                .map(|(k, &v)| (k.clone(), v))
                .collect();
            if let Some(cycle) = find_cycle(&true_edges, &nodes) {
                let clause: Vec<Lit> = cycle.into_iter().map(|v| Lit::neg(v)).collect();
                solver.add_clause(&clause);
                continue;
            }
            let mut all_blocked = true;
            for &f in &nonmembers {
                let fname = self.theory.formulas[f].name.clone();
                let before: Vec<usize> = base
                    .iter()
                    .copied()
                    .filter(|&m| {
                        let mname = self.theory.formulas[m].name.clone();
                        solver.model_value(Lit::pos(ord[&(mname, fname.clone())]))
                    })
                    .collect();
                let mut with_f = before.clone();
                with_f.push(f);
                if !self.consistent(&with_f)? {
                    continue; // f is rejected at its position
                }
                all_blocked = false;
                // grow to a maximal member set still consistent with f,
                // seeding from the witness model of the check above
                let mut maximal: Vec<usize> = base
                    .iter()
                    .copied()
                    .filter(|&m| self.plain.model_value(Lit::pos(self.selectors[m])))
                    .collect();
                for &m in base {
                    if maximal.contains(&m) {
                        continue;
                    }
                    let mut attempt = maximal.clone();
                    attempt.push(m);
                    attempt.push(f);
                    if self.consistent(&attempt)? {
                        maximal.push(m);
                    }
                }
                maximal.sort_unstable();
                // every realization must order some member outside the
                // maximal set before f
                let clause: Vec<Lit> = base
                    .iter()
                    .filter(|g| !maximal.contains(g))
                    .map(|&g| {
                        let gname = self.theory.formulas[g].name.clone();
                        Lit::pos(ord[&(gname, fname.clone())])
                    })
                    .collect();
                debug_assert!(
                    !clause.is_empty(),
                    "a maximal consistent subset cannot absorb a non-member"
                );
                solver.add_clause(&clause);
                self.blocker_cache
                    .entry((base.to_vec(), f))
                    .or_default()
                    .push(maximal);
            }
            if all_blocked {
                return Ok(true);
            }
        }
    }

    /// The per-base guidance for preferred-extension checks: the conjunction
    /// of the base's own formulas.
    pub(crate) fn self_guidance(&self, base: &[usize]) -> Guidance {
        Guidance::Bases(vec![base.to_vec()])
    }
}

/// Find a directed cycle among the given edges; returns the edge variables
/// along the cycle.
fn find_cycle(
    edges: &[((Term, Term), Var)],
    nodes: &BTreeMap<Term, usize>,
) -> Option<Vec<Var>> {
    let n = nodes.len();
    let mut adjacency: Vec<Vec<(usize, Var)>> = vec![Vec::new(); n];
    for ((a, b), v) in edges {
        adjacency[nodes[a]].push((nodes[b], *v));
    }
    // iterative three-color DFS keeping the edge path
    let mut color = vec![0u8; n]; // 0 white, 1 gray, 2 black
    for start in 0..n {
        if color[start] != 0 {
            continue;
        }
        // stack of (node, next child index)
        let mut stack: Vec<(usize, usize)> = vec![(start, 0)];
        let mut path_edges: Vec<Var> = Vec::new();
        let mut path_nodes: Vec<usize> = vec![start];
        color[start] = 1;
        while let Some((node, child)) = stack.last_mut() {
            if let Some(&(next, var)) = adjacency[*node].get(*child) {
                *child += 1;
                match color[next] {
                    0 => {
                        color[next] = 1;
                        path_edges.push(var);
                        path_nodes.push(next);
                        stack.push((next, 0));
                    }
                    1 => {
                        // found a cycle: edges from `next` around to `node`
                        let pos = path_nodes.iter().position(|&x| x == next).unwrap();
                        let mut cycle: Vec<Var> = path_edges[pos..].to_vec();
                        cycle.push(var);
                        return Some(cycle);
                    }
                    _ => {}
                }
            } else {
                color[*node] = 2;
                stack.pop();
                path_nodes.pop();
                path_edges.pop();
            }
        }
    }
    None
}

/// Run a preferred-extension check for each candidate base.
pub(crate) fn preferred_bases(
    theory: &GroundTheory,
    ax: &BackgroundAxioms,
    caps: &Caps,
) -> Result<Vec<ExtensionBase>, EngineError> {
    let mut engine = CompatEngine::new(theory, ax, caps)?;
    let candidates = engine.mcs()?;
    let mut out = Vec::new();
    for b in candidates {
        let guidance = engine.self_guidance(&b);
        if engine.base_realizable(&b, &guidance, &[])? {
            out.push(engine.base_from_idxs(&b, None));
        }
    }
    Ok(canonicalize_bases(out))
}
