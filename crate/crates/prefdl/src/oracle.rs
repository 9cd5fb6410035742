//! Consistency, entailment and preference-model enumeration.
//!
//! Everything is decided propositionally: formulas are Tseitin-encoded over
//! interned ground atoms, the background axioms are instantiated over the
//! occurring-atom closure, and a complete CDCL search decides
//! satisfiability. Resource caps are reported as errors, never as wrong
//! answers.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::axioms::BackgroundAxioms;
use crate::encode::Encoder;
use crate::error::{CapKind, EngineError};
use crate::formula::Formula;
use crate::order::StrictPartialOrder;
use crate::sat::{Lit, SolveResult, Solver};
use crate::term::Term;

/// Resource limits for a single engine call.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Caps {
    /// Solver decisions per satisfiability query.
    pub max_decisions: u64,
    /// Enumerated assignments (models, extension bases, fixpoint steps).
    pub max_models: u64,
    /// Enumerated linearizations per partial order.
    pub max_linearizations: u64,
}

impl Default for Caps {
    fn default() -> Self {
        fn env(key: &str, fallback: u64) -> u64 {
            std::env::var(key).ok().and_then(|v| v.parse().ok()).unwrap_or(fallback)
        }
        Caps {
            max_decisions: env("PREFDL_MAX_DECISIONS", 10_000_000),
            max_models: env("PREFDL_MAX_MODELS", 100_000),
            max_linearizations: env("PREFDL_MAX_LINEARIZATIONS", 1_000_000),
        }
    }
}

pub(crate) fn solve_capped(
    solver: &mut Solver,
    assumptions: &[Lit],
    caps: &Caps,
) -> Result<bool, EngineError> {
    match solver.solve(assumptions, caps.max_decisions) {
        SolveResult::Sat => Ok(true),
        SolveResult::Unsat => Ok(false),
        SolveResult::DecisionCap => {
            Err(EngineError::cap(CapKind::Decisions, caps.max_decisions))
        }
    }
}

fn prepared<'a>(
    formulas: &[Formula],
    ax: &'a BackgroundAxioms,
    extra: &[&Formula],
) -> Result<Encoder<'a>, EngineError> {
    let kinds = ax.kinds_with(formulas.iter().chain(extra.iter().copied()))?;
    let mut enc = Encoder::new(ax, Some(kinds));
    for f in formulas {
        let v = enc.encode(f);
        enc.assert_val(v);
    }
    Ok(enc)
}

/// Is the formula set satisfiable together with the background axioms?
pub fn is_consistent(
    formulas: &[Formula],
    ax: &BackgroundAxioms,
    caps: &Caps,
) -> Result<bool, EngineError> {
    let enc = prepared(formulas, ax, &[])?;
    let mut solver = enc.build_solver();
    solve_capped(&mut solver, &[], caps)
}

/// Do the formulas and the background axioms entail the query?
pub fn entails(
    formulas: &[Formula],
    ax: &BackgroundAxioms,
    query: &Formula,
    caps: &Caps,
) -> Result<bool, EngineError> {
    let mut enc = prepared(formulas, ax, &[query])?;
    let v = enc.encode(query);
    enc.assert_val(v.negate());
    let mut solver = enc.build_solver();
    Ok(!solve_capped(&mut solver, &[], caps)?)
}

/// A total assignment to the ordered name pairs of a universe. Produced by
/// model enumeration, the true pairs always form a strict partial order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PreferenceAssignment {
    pub names: Vec<Term>,
    pub true_pairs: BTreeSet<(Term, Term)>,
}

impl PreferenceAssignment {
    pub fn is_true(&self, a: &Term, b: &Term) -> bool {
        self.true_pairs.contains(&(a.clone(), b.clone()))
    }

    pub fn to_order(&self) -> StrictPartialOrder {
        StrictPartialOrder::new(self.names.clone(), self.true_pairs.clone())
            .expect("projection of a model is a strict partial order")
    }
}

/// Overflow during model enumeration; carries what was found before the cap.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("model cap exceeded (limit {limit}); {} assignments found", partial.len())]
pub struct EnumerationOverflow {
    pub partial: Vec<PreferenceAssignment>,
    pub limit: u64,
}

impl From<EnumerationOverflow> for EngineError {
    fn from(e: EnumerationOverflow) -> Self {
        EngineError::cap(CapKind::Models, e.limit)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EnumerationError {
    #[error("{0}")]
    Engine(#[from] EngineError),
    #[error("{0}")]
    Overflow(#[from] EnumerationOverflow),
}

impl From<EnumerationError> for EngineError {
    fn from(e: EnumerationError) -> Self {
        match e {
            EnumerationError::Engine(e) => e,
            EnumerationError::Overflow(o) => o.into(),
        }
    }
}

/// All distinct projections of models of `formulas` (plus axioms) onto the
/// `<`-atoms over `name_universe`, in canonical order.
pub fn enumerate_preference_models(
    formulas: &[Formula],
    ax: &BackgroundAxioms,
    name_universe: &[Term],
    caps: &Caps,
) -> Result<Vec<PreferenceAssignment>, EnumerationError> {
    let mut enc = prepared(formulas, ax, &[]).map_err(EnumerationError::Engine)?;
    // every ordered pair becomes a projection variable; interning them all
    // instantiates the full strict-partial-order axioms over the universe
    let mut pair_vars = Vec::new();
    for a in name_universe {
        for b in name_universe {
            if a != b {
                let v = enc
                    .lt_var(a, b)
                    .expect("distinct names always yield a preference variable");
                pair_vars.push(((a.clone(), b.clone()), v));
            }
        }
    }
    let mut solver = enc.build_solver();
    let mut found: Vec<PreferenceAssignment> = Vec::new();
    loop {
        let sat = solve_capped(&mut solver, &[], caps).map_err(EnumerationError::Engine)?;
        if !sat {
            break;
        }
        let mut true_pairs = BTreeSet::new();
        let mut blocker: Vec<Lit> = Vec::with_capacity(pair_vars.len());
        for ((a, b), v) in &pair_vars {
            let l = Lit::pos(*v);
            if solver.model_value(l) {
                true_pairs.insert((a.clone(), b.clone()));
                blocker.push(l.negate());
            } else {
                blocker.push(l);
            }
        }
        found.push(PreferenceAssignment {
            names: name_universe.to_vec(),
            true_pairs,
        });
        if found.len() as u64 > caps.max_models {
            found.sort();
            return Err(EnumerationOverflow { partial: found, limit: caps.max_models }.into());
        }
        solver.add_clause(&blocker);
    }
    found.sort();
    found.dedup();
    Ok(found)
}
