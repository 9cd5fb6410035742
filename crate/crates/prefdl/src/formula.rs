//! Formula ASTs over atoms, connectives and finite-sort quantifiers.
//!
//! `<` is a single surface symbol with two readings: preference between name
//! terms and comparison between integer terms. The reading is decided purely
//! by the operand kinds during sort checking; the AST keeps one `Less` atom.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::term::Term;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Quantifier {
    Forall,
    Exists,
}

/// A quantified variable together with the sort it ranges over.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Binder {
    pub var: String,
    pub sort: String,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Formula {
    True,
    False,
    /// Predicate application; a propositional atom is an application with no
    /// arguments.
    Pred(String, Vec<Term>),
    /// Equality between two terms of the same kind.
    Eq(Term, Term),
    /// `a < b`: preference when both operands are name terms, integer
    /// comparison when both are integer terms.
    Less(Term, Term),
    Not(Box<Formula>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
    Quant(Quantifier, Vec<Binder>, Box<Formula>),
}

impl Formula {
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn iff(a: Formula, b: Formula) -> Formula {
        Formula::Iff(Box::new(a), Box::new(b))
    }

    /// Conjunction that collapses the empty and singleton cases.
    pub fn and(mut fs: Vec<Formula>) -> Formula {
        match fs.len() {
            0 => Formula::True,
            1 => fs.pop().unwrap(),
            _ => Formula::And(fs),
        }
    }

    /// Disjunction that collapses the empty and singleton cases.
    pub fn or(mut fs: Vec<Formula>) -> Formula {
        match fs.len() {
            0 => Formula::False,
            1 => fs.pop().unwrap(),
            _ => Formula::Or(fs),
        }
    }

    pub fn pref(a: Term, b: Term) -> Formula {
        Formula::Less(a, b)
    }

    pub fn is_quantifier_free(&self) -> bool {
        match self {
            Formula::Quant(..) => false,
            _ => self.children().iter().all(|c| c.is_quantifier_free()),
        }
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Formula::True | Formula::False => true,
            Formula::Pred(_, args) => args.iter().all(Term::is_ground),
            Formula::Eq(a, b) | Formula::Less(a, b) => a.is_ground() && b.is_ground(),
            Formula::Quant(..) => false,
            _ => self.children().iter().all(|c| c.is_ground()),
        }
    }

    fn children(&self) -> Vec<&Formula> {
        match self {
            Formula::Not(f) => vec![f],
            Formula::And(fs) | Formula::Or(fs) => fs.iter().collect(),
            Formula::Implies(a, b) | Formula::Iff(a, b) => vec![a, b],
            Formula::Quant(_, _, f) => vec![f],
            _ => Vec::new(),
        }
    }

    /// Substitute free variables. Binders shadow outer bindings.
    pub fn substitute(&self, bind: &dyn Fn(&str) -> Option<Term>) -> Formula {
        match self {
            Formula::True | Formula::False => self.clone(),
            Formula::Pred(p, args) => {
                Formula::Pred(p.clone(), args.iter().map(|a| a.substitute(bind)).collect())
            }
            Formula::Eq(a, b) => Formula::Eq(a.substitute(bind), b.substitute(bind)),
            Formula::Less(a, b) => Formula::Less(a.substitute(bind), b.substitute(bind)),
            Formula::Not(f) => Formula::not(f.substitute(bind)),
            Formula::And(fs) => Formula::And(fs.iter().map(|f| f.substitute(bind)).collect()),
            Formula::Or(fs) => Formula::Or(fs.iter().map(|f| f.substitute(bind)).collect()),
            Formula::Implies(a, b) => Formula::implies(a.substitute(bind), b.substitute(bind)),
            Formula::Iff(a, b) => Formula::iff(a.substitute(bind), b.substitute(bind)),
            Formula::Quant(q, binders, body) => {
                let shadowed: Vec<&str> = binders.iter().map(|b| b.var.as_str()).collect();
                let inner = |v: &str| {
                    if shadowed.contains(&v) {
                        None
                    } else {
                        bind(v)
                    }
                };
                Formula::Quant(*q, binders.clone(), Box::new(body.substitute(&inner)))
            }
        }
    }

    /// Visit every atom (Pred/Eq/Less leaf) of the formula.
    pub fn visit_atoms<'a>(&'a self, visit: &mut dyn FnMut(&'a Formula)) {
        match self {
            Formula::Pred(..) | Formula::Eq(..) | Formula::Less(..) => visit(self),
            Formula::True | Formula::False => {}
            _ => {
                for c in self.children() {
                    c.visit_atoms(visit);
                }
            }
        }
    }
}

// Precedence levels for rendering: higher binds tighter. Comparisons sit
// between `~` and plain atoms so a negated comparison prints with
// parentheses.
fn prec(f: &Formula) -> u8 {
    match f {
        Formula::Quant(..) => 0,
        Formula::Iff(..) => 1,
        Formula::Implies(..) => 2,
        Formula::Or(..) => 3,
        Formula::And(..) => 4,
        Formula::Not(..) => 5,
        Formula::Eq(..) | Formula::Less(..) => 6,
        _ => 7,
    }
}

fn fmt_at(f: &Formula, parent: u8, out: &mut fmt::Formatter<'_>) -> fmt::Result {
    let p = prec(f);
    let need_parens = p < parent;
    if need_parens {
        write!(out, "(")?;
    }
    match f {
        Formula::True => write!(out, "true")?,
        Formula::False => write!(out, "false")?,
        Formula::Pred(name, args) => {
            write!(out, "{name}")?;
            if !args.is_empty() {
                write!(out, "(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        write!(out, ", ")?;
                    }
                    write!(out, "{a}")?;
                }
                write!(out, ")")?;
            }
        }
        Formula::Eq(a, b) => write!(out, "{a} = {b}")?,
        Formula::Less(a, b) => write!(out, "{a} < {b}")?,
        Formula::Not(g) => {
            write!(out, "~")?;
            fmt_at(g, 7, out)?;
        }
        Formula::And(fs) => {
            for (i, g) in fs.iter().enumerate() {
                if i > 0 {
                    write!(out, " & ")?;
                }
                // operands must bind tighter than the n-ary chain itself
                fmt_at(g, p + 1, out)?;
            }
        }
        Formula::Or(fs) => {
            for (i, g) in fs.iter().enumerate() {
                if i > 0 {
                    write!(out, " | ")?;
                }
                fmt_at(g, p + 1, out)?;
            }
        }
        Formula::Implies(a, b) => {
            fmt_at(a, p + 1, out)?;
            write!(out, " -> ")?;
            // right associative
            fmt_at(b, p, out)?;
        }
        Formula::Iff(a, b) => {
            fmt_at(a, p + 1, out)?;
            write!(out, " <-> ")?;
            fmt_at(b, p, out)?;
        }
        Formula::Quant(q, binders, body) => {
            match q {
                Quantifier::Forall => write!(out, "forall ")?,
                Quantifier::Exists => write!(out, "exists ")?,
            }
            for (i, b) in binders.iter().enumerate() {
                if i > 0 {
                    write!(out, ", ")?;
                }
                write!(out, "{}: {}", b.var, b.sort)?;
            }
            write!(out, ". ")?;
            fmt_at(body, 0, out)?;
        }
    }
    if need_parens {
        write!(out, ")")?;
    }
    Ok(())
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_at(self, 0, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn atom(s: &str) -> Formula {
        Formula::Pred(s.into(), vec![])
    }

    #[test]
    fn rendering_uses_minimal_parentheses() {
        let f = Formula::implies(
            Formula::And(vec![atom("a"), Formula::Or(vec![atom("b"), atom("c")])]),
            Formula::not(atom("d")),
        );
        assert_eq!(f.to_string(), "a & (b | c) -> ~d");
    }

    #[test]
    fn nested_implication_is_right_associative() {
        let f = Formula::implies(atom("a"), Formula::implies(atom("b"), atom("c")));
        assert_eq!(f.to_string(), "a -> b -> c");
        let g = Formula::implies(Formula::implies(atom("a"), atom("b")), atom("c"));
        assert_eq!(g.to_string(), "(a -> b) -> c");
    }

    #[test]
    fn quantifier_body_extends_right() {
        let f = Formula::Quant(
            Quantifier::Forall,
            vec![Binder { var: "x".into(), sort: "thing".into() }],
            Box::new(Formula::implies(
                Formula::Pred("penguin".into(), vec![Term::Var("x".into())]),
                Formula::not(Formula::Pred("flies".into(), vec![Term::Var("x".into())])),
            )),
        );
        assert_eq!(f.to_string(), "forall x: thing. penguin(x) -> ~flies(x)");
    }
}
