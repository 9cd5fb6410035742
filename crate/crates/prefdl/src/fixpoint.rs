//! The consequence operator, its least fixed point, accepted conclusions and
//! preferred extensions.
//!
//! One step intersects the extensions compatible with what is accepted so
//! far. Starting from the empty set, the compatible-extension families can
//! only shrink along the iteration, so the belief sets grow and the
//! iteration reaches a fixed point after at most as many productive steps as
//! there are extensions. The conclusions at the fixed point are always
//! consistent, even for theories with contradictory formulas or preference
//! cycles.

use serde::{Deserialize, Serialize};

use crate::axioms::background_axioms;
use crate::compat::{preferred_bases, CompatEngine};
use crate::error::{CapKind, EngineError};
use crate::extension::{intersect, BeliefRepresentation, Context, ExtensionBase};
use crate::formula::Formula;
use crate::oracle::Caps;
use crate::theory::GroundTheory;

/// The trace of a least-fixed-point computation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FixpointResult {
    /// Belief representation after each productive step.
    pub iterates: Vec<BeliefRepresentation>,
    /// Number of productive steps until the fixed point.
    pub steps: usize,
}

impl FixpointResult {
    pub fn accepted_belief(&self) -> &BeliefRepresentation {
        self.iterates.last().expect("at least one iterate")
    }

    pub fn accepted_bases(&self) -> &[ExtensionBase] {
        &self.accepted_belief().bases
    }

    /// Accepted-base counts per step, the shape shown by `trace`.
    pub fn base_counts(&self) -> Vec<usize> {
        self.iterates.iter().map(|r| r.bases.len()).collect()
    }
}

/// One application of the consequence operator: intersect the extensions
/// compatible with the context.
pub fn c_step(
    theory: &GroundTheory,
    context: &Context<'_>,
    caps: &Caps,
) -> Result<BeliefRepresentation, EngineError> {
    let ax = background_axioms(theory);
    let mut engine = CompatEngine::new(theory, &ax, caps)?;
    let bases = engine.extensions_compatible(context)?;
    if bases.is_empty() {
        // compatible extensions exist for every consistent context
        return Err(EngineError::EmptyExtensionSet);
    }
    intersect(bases)
}

/// Iterate the consequence operator on the empty set until the accepted
/// base set repeats; returns the full trace.
pub fn least_fixpoint(
    theory: &GroundTheory,
    caps: &Caps,
) -> Result<FixpointResult, EngineError> {
    let ax = background_axioms(theory);
    let mut engine = CompatEngine::new(theory, &ax, caps)?;
    let bound = engine.mcs()?.len() as u64 + 1;
    let mut iterates: Vec<BeliefRepresentation> = Vec::new();
    loop {
        let ctx = match iterates.last() {
            None => Context::Empty,
            Some(rep) => Context::Belief(rep),
        };
        let bases = engine.extensions_compatible(&ctx)?;
        if bases.is_empty() {
            return Err(EngineError::EmptyExtensionSet);
        }
        let rep = intersect(bases)?;
        if let Some(prev) = iterates.last() {
            if prev.same_bases(&rep) {
                break;
            }
            // extension sets only shrink along the iteration
            debug_assert!(rep.bases.len() <= prev.bases.len());
        }
        iterates.push(rep);
        if iterates.len() as u64 > bound {
            return Err(EngineError::cap(CapKind::Iterations, bound));
        }
    }
    let steps = iterates.len();
    Ok(FixpointResult { iterates, steps })
}

/// Is the query an accepted conclusion: entailed by every accepted base's
/// premises at the least fixed point?
pub fn accepted(
    theory: &GroundTheory,
    query: &Formula,
    caps: &Caps,
) -> Result<bool, EngineError> {
    let query = theory.check_formula(query)?;
    let result = least_fixpoint(theory, caps)?;
    let ax = background_axioms(theory);
    result.accepted_belief().entails(&ax, &query, caps)
}

/// The extension bases that generate themselves: compatible with their own
/// deductive closure. Defined for constraint-free theories.
pub fn preferred_extensions(
    theory: &GroundTheory,
    caps: &Caps,
) -> Result<Vec<ExtensionBase>, EngineError> {
    if theory.has_constraints() {
        return Err(EngineError::PreferredWithConstraints);
    }
    let ax = background_axioms(theory);
    preferred_bases(theory, &ax, caps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extension::base_names;
    use crate::fixtures::{ground, CYCLE, TWEETY, TWINS, TYPED_SOURCES};
    use crate::parser::parse_formula;

    fn q(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    #[test]
    fn cycle_theory_reaches_the_fixed_point_in_one_step() {
        let t = ground(CYCLE);
        let caps = Caps::default();
        let r = least_fixpoint(&t, &caps).unwrap();
        assert_eq!(r.steps, 1);
        assert_eq!(r.base_counts(), [2]);
        assert!(accepted(&t, &q("d2 < d1 | d1 < d2"), &caps).unwrap());
        assert!(!accepted(&t, &q("d1 < d2"), &caps).unwrap());
        assert!(!accepted(&t, &q("false"), &caps).unwrap());
        // no preferred extension exists, yet the beliefs are consistent
        assert!(preferred_extensions(&t, &caps).unwrap().is_empty());
    }

    #[test]
    fn tweety_accepts_not_flying() {
        let t = ground(TWEETY);
        let caps = Caps::default();
        let r = least_fixpoint(&t, &caps).unwrap();
        assert_eq!(r.base_counts(), [3, 1]);
        assert_eq!(
            base_names(r.accepted_bases()),
            [["d2", "d3", "d4", "d5"]]
        );
        assert!(accepted(&t, &q("~flies(tweety)"), &caps).unwrap());
        assert!(!accepted(&t, &q("flies(tweety)"), &caps).unwrap());
        let preferred = preferred_extensions(&t, &caps).unwrap();
        assert_eq!(base_names(&preferred), [["d2", "d3", "d4", "d5"]]);
    }

    #[test]
    fn typed_sources_keeps_only_the_base_without_the_default() {
        let t = ground(TYPED_SOURCES);
        let caps = Caps::default();
        let r = least_fixpoint(&t, &caps).unwrap();
        assert_eq!(r.base_counts(), [4, 1]);
        let accepted_names = base_names(r.accepted_bases());
        assert_eq!(accepted_names.len(), 1);
        assert!(!accepted_names[0].contains(&"d4(tweety)".to_string()));
        assert!(accepted(&t, &q("~flies(tweety)"), &caps).unwrap());
        assert!(!accepted(&t, &q("flies(tweety)"), &caps).unwrap());
    }

    #[test]
    fn first_step_of_typed_sources_derives_the_meta_preferences() {
        let t = ground(TYPED_SOURCES);
        let caps = Caps::default();
        let rep = c_step(&t, &Context::Empty, &caps).unwrap();
        let ax = background_axioms(&t);
        for s in ["d2 < d1", "d3 < d1", "d1 < d4(tweety)"] {
            assert!(rep.entails(&ax, &q(s), &caps).unwrap(), "{s}");
        }
        assert!(!rep.entails(&ax, &q("flies(tweety)"), &caps).unwrap());
    }

    #[test]
    fn empty_theory_believes_only_tautologies() {
        let t = ground("");
        let caps = Caps::default();
        let r = least_fixpoint(&t, &caps).unwrap();
        assert_eq!(r.steps, 1);
        assert_eq!(r.base_counts(), [1]);
        assert!(accepted(&t, &q("p | ~p"), &caps).unwrap());
        assert!(!accepted(&t, &q("p"), &caps).unwrap());
    }

    #[test]
    fn single_formula_theory() {
        let t = ground("premise d1: p.");
        let caps = Caps::default();
        let r = least_fixpoint(&t, &caps).unwrap();
        assert_eq!(r.base_counts(), [1]);
        assert!(accepted(&t, &q("p"), &caps).unwrap());
        let preferred = preferred_extensions(&t, &caps).unwrap();
        assert_eq!(base_names(&preferred), [["d1"]]);
    }

    #[test]
    fn twins_theory_accepts_the_denial() {
        let t = ground(TWINS);
        let caps = Caps::default();
        assert!(accepted(&t, &q("~date(Anne, John)"), &caps).unwrap());
        assert!(!accepted(&t, &q("date(Anne, John)"), &caps).unwrap());
    }

    #[test]
    fn preferred_is_undefined_with_constraints() {
        let t = ground("premise d1: p. constraint c1: q.");
        assert!(matches!(
            preferred_extensions(&t, &Caps::default()),
            Err(EngineError::PreferredWithConstraints)
        ));
    }

    #[test]
    fn iterates_grow_and_bases_shrink() {
        let t = ground(TYPED_SOURCES);
        let caps = Caps::default();
        let r = least_fixpoint(&t, &caps).unwrap();
        let ax = background_axioms(&t);
        for w in r.iterates.windows(2) {
            assert!(w[1].bases.len() <= w[0].bases.len());
            // belief sets grow: the earlier guidance entails the earlier
            // conclusions, which remain accepted later
            for s in ["d2 < d1", "d3 < d1"] {
                if w[0].entails(&ax, &q(s), &caps).unwrap() {
                    assert!(w[1].entails(&ax, &q(s), &caps).unwrap());
                }
            }
        }
    }
}
