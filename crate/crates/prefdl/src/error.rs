//! Error types for grounding, solving and the engines.

use crate::term::Kind;

/// Errors raised while grounding a theory or checking a formula against a
/// grounded signature.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GroundError {
    #[error("duplicate name `{name}` with a different body")]
    DuplicateName { name: String },
    #[error("duplicate declaration of sort `{id}`")]
    DuplicateSort { id: String },
    #[error("`{id}` is a reserved sort id")]
    ReservedSort { id: String },
    #[error("variable `{var}` ranges over undeclared sort `{sort}`")]
    UndeclaredSort { var: String, sort: String },
    #[error("sort `{sort}` has no members")]
    EmptySort { sort: String },
    #[error("sort `{sort}` mixes members of kind {a} and {b}")]
    MixedSort { sort: String, a: Kind, b: Kind },
    #[error("schema parameter `{var}` must range over a declared sort, not `{sort}`")]
    SchemaParamSort { var: String, sort: String },
    #[error("kind mismatch at {context}: expected {expected} term, found {found} term")]
    KindClash { context: String, expected: Kind, found: Kind },
    #[error("name `{head}` takes {expected} arguments, found {found}")]
    NameArity { head: String, expected: usize, found: usize },
    #[error("`<` needs two name terms or two integer terms; {context} compares {kind} terms")]
    BadComparison { context: String, kind: Kind },
    #[error("cannot resolve whether {context} compares names or integers")]
    AmbiguousComparison { context: String },
    #[error("unbound variable `{var}`")]
    UnboundVariable { var: String },
    #[error("unknown name `{name}`: not a member of the theory")]
    UnknownName { name: String },
    #[error("formula is not ground after expansion: `{formula}`")]
    NotGround { formula: String },
    #[error("cannot quantify over sort `{sort}`")]
    Unquantifiable { sort: String },
}

/// Which configured cap was exceeded.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CapKind {
    /// Solver decision budget for a single query.
    Decisions,
    /// Number of enumerated models / assignments.
    Models,
    /// Number of enumerated linearizations.
    Linearizations,
    /// Fixpoint iteration guard.
    Iterations,
}

impl std::fmt::Display for CapKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CapKind::Decisions => write!(f, "decision"),
            CapKind::Models => write!(f, "model"),
            CapKind::Linearizations => write!(f, "linearization"),
            CapKind::Iterations => write!(f, "iteration"),
        }
    }
}

/// Errors raised by the oracle and the engines built on it.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EngineError {
    #[error("{0}")]
    Ground(#[from] GroundError),
    #[error("{0}")]
    Parse(#[from] crate::parser::ParseError),
    #[error("{kind} cap exceeded (limit {limit})")]
    ResourceCap { kind: CapKind, limit: u64 },
    #[error("cannot intersect an empty set of extension bases")]
    EmptyIntersection,
    #[error("no extension is compatible with a consistent context; this is a bug")]
    EmptyExtensionSet,
    #[error("preferred extensions are undefined for theories with constraints")]
    PreferredWithConstraints,
}

impl EngineError {
    pub fn cap(kind: CapKind, limit: u64) -> Self {
        EngineError::ResourceCap { kind, limit }
    }
}
