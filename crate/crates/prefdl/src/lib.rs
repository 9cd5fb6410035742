//! Belief revision over preference default theories.
//!
//! An epistemic state is a finite set of named formulas whose language can
//! talk about the names themselves, including a reserved preference symbol
//! `<` between names. Extensions are built greedily along total orders of
//! the formulas; a monotone operator intersects the extensions compatible
//! with what has been concluded so far, and its least fixed point is the set
//! of accepted conclusions. Revision adds a formula under a fresh name;
//! contraction adds a constraint. The `book/` directory of this repository
//! walks through the concepts chapter by chapter; every code snippet in it
//! is compiled and run as a doc-test of this crate.

pub mod axioms;
pub mod error;
pub mod extension;
pub mod fixpoint;
pub mod formula;
pub mod kinds;
pub mod naive;
pub mod oracle;
pub mod order;
pub mod parser;
pub mod revision;
pub mod sat;
pub mod session;
pub mod term;
pub mod theory;

mod compat;
mod encode;

pub use axioms::{background_axioms, BackgroundAxioms};
pub use error::{CapKind, EngineError, GroundError};
pub use extension::{
    extension_base, extensions_compatible, extensions_for_partial_order, intersect,
    BeliefRepresentation, Context, ExtensionBase,
};
pub use fixpoint::{accepted, c_step, least_fixpoint, preferred_extensions, FixpointResult};
pub use formula::{Binder, Formula, Quantifier};
pub use oracle::{
    entails, enumerate_preference_models, is_consistent, Caps, PreferenceAssignment,
};
pub use order::{
    brute_force_partial_orders, compatible_orders, diagram, is_compatible, linearizations,
    StrictPartialOrder, TotalOrder,
};
pub use parser::{parse_formula, parse_source, parse_term, ParseError, Role, Statement, TheorySpec};
pub use revision::{
    check_postulates, contract, expand_belief, revise, EpistemicState, PostulateReport,
    PostulateStatus,
};
pub use term::{Kind, Term};
pub use theory::{ground_theory, GroundTheory, NamedFormula, Signature};


// The book chapters double as doc-tests so the guide can never drift from
// the library.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/theories.md")]
    mod theories {}
    #[doc = include_str!("../../../book/src/extensions.md")]
    mod extensions {}
    #[doc = include_str!("../../../book/src/accepted.md")]
    mod accepted {}
    #[doc = include_str!("../../../book/src/revision.md")]
    mod revision {}
    #[doc = include_str!("../../../book/src/postulates.md")]
    mod postulates {}
    #[doc = include_str!("../../../book/src/oracle.md")]
    mod oracle {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
