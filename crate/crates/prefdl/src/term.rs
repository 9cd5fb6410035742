//! Ground terms and the three term kinds of the sorted language.
//!
//! Every term in a grounded theory is either an integer literal, a name term
//! (a formula name, possibly parameterized by other ground terms), or an
//! object term. Name terms and object terms are disjoint; which is which is
//! decided by the theory's signature, not by the term syntax itself.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

/// The kind of a ground term. Name and object terms are disjoint sets;
/// integer literals form the third, built-in kind.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Kind {
    Name,
    Object,
    Int,
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Kind::Name => write!(f, "name"),
            Kind::Object => write!(f, "object"),
            Kind::Int => write!(f, "int"),
        }
    }
}

/// A term of the language. `Var` only occurs before grounding; grounded
/// theories contain no variables.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Term {
    /// A variable bound by a quantifier or schema parameter.
    Var(String),
    /// An integer literal.
    Int(i64),
    /// A constant (empty args) or an applied symbol.
    App(String, Vec<Term>),
}

impl Term {
    pub fn constant(name: &str) -> Term {
        Term::App(name.to_string(), Vec::new())
    }

    pub fn app(head: &str, args: Vec<Term>) -> Term {
        Term::App(head.to_string(), args)
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Term::Var(_) => false,
            Term::Int(_) => true,
            Term::App(_, args) => args.iter().all(Term::is_ground),
        }
    }

    /// Head symbol of an application, if any.
    pub fn head(&self) -> Option<&str> {
        match self {
            Term::App(h, _) => Some(h),
            _ => None,
        }
    }

    pub fn args(&self) -> &[Term] {
        match self {
            Term::App(_, args) => args,
            _ => &[],
        }
    }

    /// Substitute variables by ground terms.
    pub fn substitute(&self, bind: &dyn Fn(&str) -> Option<Term>) -> Term {
        match self {
            Term::Var(v) => bind(v).unwrap_or_else(|| self.clone()),
            Term::Int(_) => self.clone(),
            Term::App(h, args) => Term::App(
                h.clone(),
                args.iter().map(|a| a.substitute(bind)).collect(),
            ),
        }
    }

    /// All subterms including the term itself, outermost first.
    pub fn subterms<'a>(&'a self, out: &mut Vec<&'a Term>) {
        out.push(self);
        for a in self.args() {
            a.subterms(out);
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => write!(f, "{v}"),
            Term::Int(i) => write!(f, "{i}"),
            Term::App(h, args) => {
                write!(f, "{h}")?;
                if !args.is_empty() {
                    write!(f, "(")?;
                    for (i, a) in args.iter().enumerate() {
                        if i > 0 {
                            write!(f, ", ")?;
                        }
                        write!(f, "{a}")?;
                    }
                    write!(f, ")")?;
                }
                Ok(())
            }
        }
    }
}

// Canonical order: lexicographic on the rendered term. This single order fixes
// every enumeration order in the crate, so results are reproducible.
impl Ord for Term {
    fn cmp(&self, other: &Self) -> Ordering {
        self.to_string().cmp(&other.to_string())
    }
}

impl PartialOrd for Term {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn display_round_trips_structure() {
        let t = Term::app(
            "d8",
            vec![Term::constant("d1"), Term::app("time", vec![Term::constant("d2")])],
        );
        assert_eq!(t.to_string(), "d8(d1, time(d2))");
    }

    #[test]
    fn canonical_order_is_lexicographic_on_rendering() {
        let d10 = Term::constant("d10");
        let d9 = Term::constant("d9");
        assert!(d10 < d9);
    }

    #[test]
    fn substitution_reaches_nested_args() {
        let t = Term::app("d4", vec![Term::Var("x".into())]);
        let g = t.substitute(&|v| (v == "x").then(|| Term::constant("tweety")));
        assert_eq!(g, Term::app("d4", vec![Term::constant("tweety")]));
        assert!(g.is_ground());
    }
}
