//! Extension bases, compatible extensions, and belief representations.
//!
//! The greedy pass over a total order accumulates every formula that is
//! consistent with what was accumulated before it (modulo the background
//! axioms); the accumulated set is the extension base and its deductive
//! closure is the extension. Constraints take part in the construction and
//! in compatibility exactly like premises, but contribute nothing to derived
//! beliefs: belief queries use premise-only conjunctions, while the guidance
//! formula that drives compatibility uses the full bases.

use serde::{Deserialize, Serialize};

use crate::axioms::BackgroundAxioms;
use crate::compat::CompatEngine;
use crate::encode::Encoder;
use crate::error::EngineError;
use crate::formula::Formula;
use crate::oracle::{solve_capped, Caps};
use crate::order::{StrictPartialOrder, TotalOrder};
use crate::parser::Role;
use crate::sat::Solver;
use crate::term::Term;
use crate::theory::{GroundTheory, NamedFormula};

/// The set of formulas a compatibility check runs against: nothing, an
/// explicit formula set, or an intersection of extensions represented by its
/// bases.
#[derive(Debug, Clone, Copy)]
pub enum Context<'a> {
    Empty,
    Formulas(&'a [Formula]),
    Belief(&'a BeliefRepresentation),
}

impl Context<'_> {
    /// A single formula axiomatizing the context.
    pub fn characteristic(&self) -> Formula {
        match self {
            Context::Empty => Formula::True,
            Context::Formulas(fs) => Formula::and(fs.to_vec()),
            Context::Belief(rep) => rep.guidance_formula(),
        }
    }
}

/// A subset of a theory's named formulas produced by the greedy pass.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtensionBase {
    /// Member formulas in theory order.
    pub members: Vec<NamedFormula>,
    /// The total order that generated this base, when one did.
    pub generating_order: Option<TotalOrder>,
}

impl ExtensionBase {
    /// Member names, sorted canonically; the identity of the base.
    pub fn name_set(&self) -> Vec<Term> {
        let mut names: Vec<Term> = self.members.iter().map(|f| f.name.clone()).collect();
        names.sort();
        names
    }

    /// Conjunction of every member formula, constraints included.
    pub fn full_conjunction(&self) -> Formula {
        Formula::and(self.members.iter().map(|f| f.body.clone()).collect())
    }

    /// Conjunction of the premise members only.
    pub fn premise_conjunction(&self) -> Formula {
        Formula::and(
            self.members
                .iter()
                .filter(|f| f.role == Role::Premise)
                .map(|f| f.body.clone())
                .collect(),
        )
    }

    pub fn contains_name(&self, name: &Term) -> bool {
        self.members.iter().any(|f| &f.name == name)
    }
}

impl PartialOrd for ExtensionBase {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExtensionBase {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.name_set().cmp(&other.name_set())
    }
}

/// Sort bases canonically and drop duplicates (same member name set).
pub(crate) fn canonicalize_bases(mut bases: Vec<ExtensionBase>) -> Vec<ExtensionBase> {
    bases.sort();
    bases.dedup_by(|a, b| a.name_set() == b.name_set());
    bases
}

/// A finite representation of a deductively closed belief set as the family
/// of accepted extension bases, possibly expanded by extra formulas.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BeliefRepresentation {
    pub bases: Vec<ExtensionBase>,
    /// Extra conjuncts from belief expansion; empty for plain belief sets.
    pub expansions: Vec<Formula>,
}

impl BeliefRepresentation {
    /// Disjunction over the bases of the conjunction of all member formulas
    /// (premises and constraints). Compatibility checks run against this.
    pub fn guidance_formula(&self) -> Formula {
        Formula::or(self.bases.iter().map(|b| b.full_conjunction()).collect())
    }

    /// Disjunction of the premise-only conjunctions, with any expansion
    /// conjuncts. Belief queries run against this.
    pub fn query_formula(&self) -> Formula {
        let dis =
            Formula::or(self.bases.iter().map(|b| b.premise_conjunction()).collect());
        let mut parts = vec![dis];
        parts.extend(self.expansions.iter().cloned());
        Formula::and(parts)
    }

    /// Is `q` in the represented belief set (entailed by every base)?
    pub fn entails(
        &self,
        ax: &BackgroundAxioms,
        q: &Formula,
        caps: &Caps,
    ) -> Result<bool, EngineError> {
        let mut querier = BeliefQuerier::new(self, ax, &[q.clone()], caps)?;
        querier.entails(q)
    }

    /// Expansion `Bel + a`: the same bases with an extra conjunct. An
    /// expansion by something the belief set refutes is inconsistent and
    /// entails everything; `is_consistent` reports that.
    pub fn expand(&self, a: Formula) -> BeliefRepresentation {
        let mut out = self.clone();
        out.expansions.push(a);
        out
    }

    /// Satisfiability of the represented set (always true for plain belief
    /// sets; expansions may be inconsistent).
    pub fn is_consistent(
        &self,
        ax: &BackgroundAxioms,
        caps: &Caps,
    ) -> Result<bool, EngineError> {
        let f = self.query_formula();
        crate::oracle::is_consistent(std::slice::from_ref(&f), ax, caps)
    }

    pub fn base_name_sets(&self) -> Vec<Vec<Term>> {
        self.bases.iter().map(|b| b.name_set()).collect()
    }

    /// Same accepted bases, by member name sets.
    pub fn same_bases(&self, other: &BeliefRepresentation) -> bool {
        self.base_name_sets() == other.base_name_sets()
    }
}

/// Batched entailment queries against one belief representation.
pub struct BeliefQuerier<'a> {
    enc: Encoder<'a>,
    solver: Solver,
    synced_vars: u32,
    synced_clauses: usize,
    caps: Caps,
}

impl<'a> BeliefQuerier<'a> {
    /// `panel` lists formulas that will be queried, so their symbols resolve.
    pub fn new(
        rep: &BeliefRepresentation,
        ax: &'a BackgroundAxioms,
        panel: &[Formula],
        caps: &Caps,
    ) -> Result<Self, EngineError> {
        let base_formula = rep.query_formula();
        let kinds = ax.kinds_with(std::iter::once(&base_formula).chain(panel.iter()))?;
        let mut enc = Encoder::new(ax, Some(kinds));
        let v = enc.encode(&base_formula);
        enc.assert_val(v);
        let solver = enc.build_solver();
        let synced_vars = enc.num_vars();
        let synced_clauses = enc.num_clauses();
        Ok(BeliefQuerier { enc, solver, synced_vars, synced_clauses, caps: *caps })
    }

    pub fn entails(&mut self, q: &Formula) -> Result<bool, EngineError> {
        let root = self.enc.encode(q);
        while self.synced_vars < self.enc.num_vars() {
            self.solver.new_var();
            self.synced_vars += 1;
        }
        for c in &self.enc.clauses()[self.synced_clauses..] {
            self.solver.add_clause(c);
        }
        self.synced_clauses = self.enc.num_clauses();
        match root {
            crate::encode::EncVal::Const(b) => {
                if b {
                    return Ok(true);
                }
                // entails(false) iff the base formula is unsatisfiable
                return Ok(!solve_capped(&mut self.solver, &[], &self.caps)?);
            }
            crate::encode::EncVal::L(l) => {
                Ok(!solve_capped(&mut self.solver, &[l.negate()], &self.caps)?)
            }
        }
    }
}

/// The greedy construction along a total order: walk the sequence, keeping
/// each formula whose addition stays consistent. Total function.
pub fn extension_base(
    theory: &GroundTheory,
    order: &TotalOrder,
    caps: &Caps,
) -> Result<ExtensionBase, EngineError> {
    let ax = crate::axioms::background_axioms(theory);
    let mut engine = CompatEngine::new(theory, &ax, caps)?;
    engine.greedy(order)
}

/// All extension bases generated by linearizations of a partial order,
/// deduplicated and canonically ordered.
pub fn extensions_for_partial_order(
    theory: &GroundTheory,
    order: &StrictPartialOrder,
    caps: &Caps,
) -> Result<Vec<ExtensionBase>, EngineError> {
    let ax = crate::axioms::background_axioms(theory);
    let mut engine = CompatEngine::new(theory, &ax, caps)?;
    engine.extensions_for_partial_order(order)
}

/// The extensions of the theory compatible with the context: every base some
/// total order generates, where the order extends a partial order whose
/// diagram is consistent with the context.
pub fn extensions_compatible(
    theory: &GroundTheory,
    context: &Context<'_>,
    caps: &Caps,
) -> Result<Vec<ExtensionBase>, EngineError> {
    let ax = crate::axioms::background_axioms(theory);
    let mut engine = CompatEngine::new(theory, &ax, caps)?;
    engine.extensions_compatible(context)
}

/// Intersect a nonempty family of extensions into a belief representation.
pub fn intersect(bases: Vec<ExtensionBase>) -> Result<BeliefRepresentation, EngineError> {
    if bases.is_empty() {
        return Err(EngineError::EmptyIntersection);
    }
    Ok(BeliefRepresentation {
        bases: canonicalize_bases(bases),
        expansions: Vec::new(),
    })
}

/// Name sets of a base list, for compact assertions and rendering.
pub fn base_names(bases: &[ExtensionBase]) -> Vec<Vec<String>> {
    bases
        .iter()
        .map(|b| b.name_set().iter().map(|t| t.to_string()).collect())
        .collect()
}
