//! Parser for theory files and single formulas.
//!
//! The grammar is line-oriented UTF-8 with `#` comments:
//!
//! ```text
//! sort <id> = { t1, ..., tn }.
//! distinct t1, ..., tn.
//! premise <name>: <formula>.
//! constraint <name>: <formula>.
//! schema <name>(<v>: <sort>, ...): <formula>.
//! ```
//!
//! Formulas use `~ & | -> <->`, `forall v: sort. ...`, `exists v: sort. ...`,
//! atoms `P(t, ...)`, `t1 = t2`, `t1 < t2`, the constants `true`/`false`, and
//! integer literals of the built-in `int` sort. `->` and `<->` associate to
//! the right, quantifier bodies extend as far to the right as possible, and
//! identifiers may contain `_`, `'`, and interior `-` (as in `more-rel`).

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::formula::{Binder, Formula, Quantifier};
use crate::term::Term;

/// Role of a named formula inside a theory.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Role {
    Premise,
    Constraint,
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Role::Premise => write!(f, "premise"),
            Role::Constraint => write!(f, "constraint"),
        }
    }
}

/// One top-level statement of a theory file.
///
/// A `Named` statement's name is usually a plain constant; serialized ground
/// theories may carry parameterized names such as `d4(tweety)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Statement {
    Sort { id: String, members: Vec<Term> },
    Distinct { terms: Vec<Term> },
    Named { role: Role, name: Term, formula: Formula },
    Schema { head: String, params: Vec<Binder>, formula: Formula },
}

/// A parsed theory file: the ungrounded specification of a theory.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct TheorySpec {
    pub statements: Vec<Statement>,
}

impl fmt::Display for Statement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Statement::Sort { id, members } => {
                write!(f, "sort {id} = {{ ")?;
                for (i, m) in members.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{m}")?;
                }
                write!(f, " }}.")
            }
            Statement::Distinct { terms } => {
                write!(f, "distinct ")?;
                for (i, t) in terms.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{t}")?;
                }
                write!(f, ".")
            }
            Statement::Named { role, name, formula } => write!(f, "{role} {name}: {formula}."),
            Statement::Schema { head, params, formula } => {
                write!(f, "schema {head}(")?;
                for (i, p) in params.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{}: {}", p.var, p.sort)?;
                }
                write!(f, "): {formula}.")
            }
        }
    }
}

impl fmt::Display for TheorySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.statements {
            writeln!(f, "{s}")?;
        }
        Ok(())
    }
}

/// Parse failure with source position.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("parse error at {line}:{col}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Int(i64),
    LParen,
    RParen,
    LBrace,
    RBrace,
    Comma,
    Dot,
    Colon,
    Eq,
    Less,
    Tilde,
    Amp,
    Pipe,
    Arrow,
    DArrow,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Int(i) => write!(f, "`{i}`"),
            Tok::LParen => write!(f, "`(`"),
            Tok::RParen => write!(f, "`)`"),
            Tok::LBrace => write!(f, "`{{`"),
            Tok::RBrace => write!(f, "`}}`"),
            Tok::Comma => write!(f, "`,`"),
            Tok::Dot => write!(f, "`.`"),
            Tok::Colon => write!(f, "`:`"),
            Tok::Eq => write!(f, "`=`"),
            Tok::Less => write!(f, "`<`"),
            Tok::Tilde => write!(f, "`~`"),
            Tok::Amp => write!(f, "`&`"),
            Tok::Pipe => write!(f, "`|`"),
            Tok::Arrow => write!(f, "`->`"),
            Tok::DArrow => write!(f, "`<->`"),
            Tok::Eof => write!(f, "end of input"),
        }
    }
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
    line: usize,
    col: usize,
}

fn is_ident_start(c: u8) -> bool {
    c.is_ascii_alphabetic() || c == b'_'
}

fn is_ident_continue(c: u8) -> bool {
    c.is_ascii_alphanumeric() || c == b'_' || c == b'\''
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer { src: src.as_bytes(), pos: 0, line: 1, col: 1 }
    }

    fn bump(&mut self) -> u8 {
        let c = self.src[self.pos];
        self.pos += 1;
        if c == b'\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        c
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn peek2(&self) -> Option<u8> {
        self.src.get(self.pos + 1).copied()
    }

    fn error(&self, message: impl Into<String>) -> ParseError {
        ParseError { line: self.line, col: self.col, message: message.into() }
    }

    fn next_token(&mut self) -> Result<(Tok, usize, usize), ParseError> {
        loop {
            match self.peek() {
                Some(c) if c.is_ascii_whitespace() => {
                    self.bump();
                }
                Some(b'#') => {
                    while let Some(c) = self.peek() {
                        if c == b'\n' {
                            break;
                        }
                        self.bump();
                    }
                }
                _ => break,
            }
        }
        let (line, col) = (self.line, self.col);
        let Some(c) = self.peek() else {
            return Ok((Tok::Eof, line, col));
        };
        let tok = match c {
            b'(' => {
                self.bump();
                Tok::LParen
            }
            b')' => {
                self.bump();
                Tok::RParen
            }
            b'{' => {
                self.bump();
                Tok::LBrace
            }
            b'}' => {
                self.bump();
                Tok::RBrace
            }
            b',' => {
                self.bump();
                Tok::Comma
            }
            b'.' => {
                self.bump();
                Tok::Dot
            }
            b':' => {
                self.bump();
                Tok::Colon
            }
            b'=' => {
                self.bump();
                Tok::Eq
            }
            b'~' => {
                self.bump();
                Tok::Tilde
            }
            b'&' => {
                self.bump();
                Tok::Amp
            }
            b'|' => {
                self.bump();
                Tok::Pipe
            }
            b'<' => {
                self.bump();
                if self.peek() == Some(b'-') && self.peek2() == Some(b'>') {
                    self.bump();
                    self.bump();
                    Tok::DArrow
                } else {
                    Tok::Less
                }
            }
            b'-' => {
                self.bump();
                match self.peek() {
                    Some(b'>') => {
                        self.bump();
                        Tok::Arrow
                    }
                    Some(d) if d.is_ascii_digit() => {
                        let n = self.lex_int()?;
                        Tok::Int(-n)
                    }
                    _ => return Err(self.error("stray `-`: expected `->` or a negative integer")),
                }
            }
            d if d.is_ascii_digit() => Tok::Int(self.lex_int()?),
            c if is_ident_start(c) => {
                let mut s = String::new();
                s.push(self.bump() as char);
                loop {
                    match self.peek() {
                        Some(c) if is_ident_continue(c) => s.push(self.bump() as char),
                        // interior hyphen, as in `more-rel`; never eats `->`
                        Some(b'-')
                            if self.peek2().map(|c| c.is_ascii_alphabetic()).unwrap_or(false) =>
                        {
                            s.push(self.bump() as char)
                        }
                        _ => break,
                    }
                }
                Tok::Ident(s)
            }
            other => {
                return Err(self.error(format!("unexpected character `{}`", other as char)));
            }
        };
        Ok((tok, line, col))
    }

    fn lex_int(&mut self) -> Result<i64, ParseError> {
        let mut n: i64 = 0;
        while let Some(d) = self.peek() {
            if !d.is_ascii_digit() {
                break;
            }
            n = n
                .checked_mul(10)
                .and_then(|n| n.checked_add((d - b'0') as i64))
                .ok_or_else(|| self.error("integer literal out of range"))?;
            self.bump();
        }
        Ok(n)
    }
}

struct Parser {
    toks: Vec<(Tok, usize, usize)>,
    at: usize,
    /// stack of bound variable names, innermost last
    scope: Vec<String>,
}

impl Parser {
    fn new(src: &str) -> Result<Self, ParseError> {
        let mut lx = Lexer::new(src);
        let mut toks = Vec::new();
        loop {
            let t = lx.next_token()?;
            let eof = t.0 == Tok::Eof;
            toks.push(t);
            if eof {
                break;
            }
        }
        Ok(Parser { toks, at: 0, scope: Vec::new() })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.at].0.clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn error_here(&self, message: impl Into<String>) -> ParseError {
        let (_, line, col) = &self.toks[self.at];
        ParseError { line: *line, col: *col, message: message.into() }
    }

    fn expect(&mut self, want: Tok) -> Result<(), ParseError> {
        if *self.peek() == want {
            self.bump();
            Ok(())
        } else {
            Err(self.error_here(format!("expected {want}, found {}", self.peek())))
        }
    }

    fn expect_ident(&mut self) -> Result<String, ParseError> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok(s)
            }
            other => Err(self.error_here(format!("expected identifier, found {other}"))),
        }
    }

    fn parse_spec(&mut self) -> Result<TheorySpec, ParseError> {
        let mut statements = Vec::new();
        while *self.peek() != Tok::Eof {
            statements.push(self.parse_statement()?);
        }
        Ok(TheorySpec { statements })
    }

    fn parse_statement(&mut self) -> Result<Statement, ParseError> {
        let kw = self.expect_ident()?;
        let st = match kw.as_str() {
            "sort" => {
                let id = self.expect_ident()?;
                self.expect(Tok::Eq)?;
                self.expect(Tok::LBrace)?;
                let members = self.parse_term_list(Tok::RBrace)?;
                self.expect(Tok::RBrace)?;
                Statement::Sort { id, members }
            }
            "distinct" => {
                let terms = self.parse_term_list(Tok::Dot)?;
                Statement::Distinct { terms }
            }
            "premise" | "constraint" => {
                let role = if kw == "premise" { Role::Premise } else { Role::Constraint };
                let head = self.expect_ident()?;
                let name = if *self.peek() == Tok::LParen {
                    self.bump();
                    let args = self.parse_term_list(Tok::RParen)?;
                    self.expect(Tok::RParen)?;
                    Term::App(head, args)
                } else {
                    Term::App(head, Vec::new())
                };
                self.expect(Tok::Colon)?;
                let formula = self.parse_formula()?;
                Statement::Named { role, name, formula }
            }
            "schema" => {
                let head = self.expect_ident()?;
                self.expect(Tok::LParen)?;
                let params = self.parse_binders(Tok::RParen)?;
                self.expect(Tok::RParen)?;
                self.expect(Tok::Colon)?;
                for p in &params {
                    self.scope.push(p.var.clone());
                }
                let formula = self.parse_formula();
                for _ in &params {
                    self.scope.pop();
                }
                Statement::Schema { head, params, formula: formula? }
            }
            other => {
                return Err(self.error_here(format!(
                    "expected `sort`, `distinct`, `premise`, `constraint` or `schema`, found `{other}`"
                )))
            }
        };
        self.expect(Tok::Dot)?;
        Ok(st)
    }

    fn parse_binders(&mut self, terminator: Tok) -> Result<Vec<Binder>, ParseError> {
        let mut binders = Vec::new();
        if *self.peek() == terminator {
            return Ok(binders);
        }
        loop {
            let var = self.expect_ident()?;
            self.expect(Tok::Colon)?;
            let sort = self.expect_ident()?;
            binders.push(Binder { var, sort });
            if *self.peek() == Tok::Comma {
                self.bump();
            } else {
                break;
            }
        }
        Ok(binders)
    }

    fn parse_term_list(&mut self, terminator: Tok) -> Result<Vec<Term>, ParseError> {
        let mut terms = Vec::new();
        if *self.peek() == terminator {
            return Ok(terms);
        }
        loop {
            terms.push(self.parse_term()?);
            if *self.peek() == Tok::Comma {
                self.bump();
            } else {
                break;
            }
        }
        Ok(terms)
    }

    fn parse_term(&mut self) -> Result<Term, ParseError> {
        match self.peek().clone() {
            Tok::Int(i) => {
                self.bump();
                Ok(Term::Int(i))
            }
            Tok::Ident(name) => {
                self.bump();
                if *self.peek() == Tok::LParen {
                    self.bump();
                    let args = self.parse_term_list(Tok::RParen)?;
                    self.expect(Tok::RParen)?;
                    Ok(Term::App(name, args))
                } else if self.scope.iter().any(|v| *v == name) {
                    Ok(Term::Var(name))
                } else {
                    Ok(Term::App(name, Vec::new()))
                }
            }
            other => Err(self.error_here(format!("expected a term, found {other}"))),
        }
    }

    fn parse_formula(&mut self) -> Result<Formula, ParseError> {
        self.parse_iff()
    }

    fn parse_iff(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.parse_implies()?;
        if *self.peek() == Tok::DArrow {
            self.bump();
            let rhs = self.parse_iff()?;
            Ok(Formula::iff(lhs, rhs))
        } else {
            Ok(lhs)
        }
    }

    fn parse_implies(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.parse_or()?;
        if *self.peek() == Tok::Arrow {
            self.bump();
            let rhs = self.parse_implies()?;
            Ok(Formula::implies(lhs, rhs))
        } else {
            Ok(lhs)
        }
    }

    fn parse_or(&mut self) -> Result<Formula, ParseError> {
        let mut parts = vec![self.parse_and()?];
        while *self.peek() == Tok::Pipe {
            self.bump();
            parts.push(self.parse_and()?);
        }
        Ok(Formula::or(parts))
    }

    fn parse_and(&mut self) -> Result<Formula, ParseError> {
        let mut parts = vec![self.parse_unary()?];
        while *self.peek() == Tok::Amp {
            self.bump();
            parts.push(self.parse_unary()?);
        }
        Ok(Formula::and(parts))
    }

    fn parse_unary(&mut self) -> Result<Formula, ParseError> {
        match self.peek().clone() {
            Tok::Tilde => {
                self.bump();
                Ok(Formula::not(self.parse_unary()?))
            }
            Tok::Ident(kw) if kw == "forall" || kw == "exists" => {
                self.bump();
                let q = if kw == "forall" { Quantifier::Forall } else { Quantifier::Exists };
                let binders = self.parse_binders(Tok::Dot)?;
                if binders.is_empty() {
                    return Err(self.error_here("quantifier needs at least one binder"));
                }
                self.expect(Tok::Dot)?;
                for b in &binders {
                    self.scope.push(b.var.clone());
                }
                let body = self.parse_formula();
                for _ in &binders {
                    self.scope.pop();
                }
                Ok(Formula::Quant(q, binders, Box::new(body?)))
            }
            _ => self.parse_atom_or_paren(),
        }
    }

    fn parse_atom_or_paren(&mut self) -> Result<Formula, ParseError> {
        match self.peek().clone() {
            Tok::LParen => {
                self.bump();
                let f = self.parse_formula()?;
                self.expect(Tok::RParen)?;
                Ok(f)
            }
            Tok::Ident(kw) if kw == "true" => {
                self.bump();
                Ok(Formula::True)
            }
            Tok::Ident(kw) if kw == "false" => {
                self.bump();
                Ok(Formula::False)
            }
            _ => {
                let t = self.parse_term()?;
                match self.peek() {
                    Tok::Eq => {
                        self.bump();
                        let rhs = self.parse_term()?;
                        Ok(Formula::Eq(t, rhs))
                    }
                    Tok::Less => {
                        self.bump();
                        let rhs = self.parse_term()?;
                        Ok(Formula::Less(t, rhs))
                    }
                    _ => match t {
                        Term::App(p, args) => Ok(Formula::Pred(p, args)),
                        other => Err(self.error_here(format!(
                            "`{other}` is not a formula; expected `=`, `<` or a predicate"
                        ))),
                    },
                }
            }
        }
    }
}

/// Parse a full theory file.
pub fn parse_source(text: &str) -> Result<TheorySpec, ParseError> {
    let mut p = Parser::new(text)?;
    p.parse_spec()
}

/// Parse a single formula, e.g. from a REPL command. No trailing `.`.
pub fn parse_formula(text: &str) -> Result<Formula, ParseError> {
    let mut p = Parser::new(text)?;
    let f = p.parse_formula()?;
    if *p.peek() != Tok::Eof {
        return Err(p.error_here(format!("trailing input after formula: {}", p.peek())));
    }
    Ok(f)
}

/// Parse a single ground term, e.g. a name argument to `show`.
pub fn parse_term(text: &str) -> Result<Term, ParseError> {
    let mut p = Parser::new(text)?;
    let t = p.parse_term()?;
    if *p.peek() != Tok::Eof {
        return Err(p.error_here(format!("trailing input after term: {}", p.peek())));
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_premise_parses() {
        let spec = parse_source("premise d1: penguin(tweety).").unwrap();
        assert_eq!(spec.statements.len(), 1);
        match &spec.statements[0] {
            Statement::Named { role, name, formula } => {
                assert_eq!(*role, Role::Premise);
                assert_eq!(name, &Term::constant("d1"));
                assert_eq!(formula.to_string(), "penguin(tweety)");
            }
            other => panic!("unexpected statement {other:?}"),
        }
    }

    #[test]
    fn empty_file_gives_empty_spec() {
        let spec = parse_source("  # nothing here\n").unwrap();
        assert!(spec.statements.is_empty());
    }

    #[test]
    fn hyphen_and_prime_identifiers() {
        let f = parse_formula("more-rel(source(n'), source(n)) -> n' < n").unwrap();
        assert_eq!(f.to_string(), "more-rel(source(n'), source(n)) -> n' < n");
    }

    #[test]
    fn arrow_is_not_swallowed_by_identifier() {
        let f = parse_formula("a->b").unwrap();
        assert_eq!(f.to_string(), "a -> b");
    }

    #[test]
    fn quantifier_body_is_maximal() {
        let f = parse_formula("forall x: s. p(x) & q").unwrap();
        assert_eq!(f.to_string(), "forall x: s. p(x) & q");
        match f {
            Formula::Quant(_, _, body) => match *body {
                Formula::And(_) => {}
                other => panic!("body should be the conjunction, got {other}"),
            },
            other => panic!("expected quantifier, got {other}"),
        }
    }

    #[test]
    fn schema_statement_binds_parameters() {
        let spec =
            parse_source("schema d8(n: src, n': src): more-rel(source(n), source(n')) -> n < n'.")
                .unwrap();
        match &spec.statements[0] {
            Statement::Schema { head, params, formula } => {
                assert_eq!(head, "d8");
                assert_eq!(params.len(), 2);
                // n and n' must come back as variables, not constants
                let mut vars = Vec::new();
                formula.visit_atoms(&mut |a| {
                    if let Formula::Less(Term::Var(a), Term::Var(b)) = a {
                        vars.push((a.clone(), b.clone()));
                    }
                });
                assert_eq!(vars, vec![("n".to_string(), "n'".to_string())]);
            }
            other => panic!("unexpected statement {other:?}"),
        }
    }

    #[test]
    fn errors_carry_position() {
        let err = parse_source("premise d1 penguin(tweety).").unwrap_err();
        assert_eq!(err.line, 1);
        assert!(err.message.contains("expected `:`"), "{}", err.message);
    }

    mod round_trip {
        use super::*;
        use crate::term::Term;
        use proptest::prelude::*;

        fn term_strategy() -> impl Strategy<Value = Term> {
            prop_oneof![
                (0i64..100).prop_map(Term::Int),
                "[a-c]".prop_map(|s| Term::constant(&s)),
                ("[fg]", proptest::collection::vec("[a-c]", 1..3)).prop_map(
                    |(f, args)| Term::App(
                        f,
                        args.iter().map(|a| Term::constant(a)).collect()
                    )
                ),
            ]
        }

        fn formula_strategy() -> impl Strategy<Value = Formula> {
            let leaf = prop_oneof![
                Just(Formula::True),
                Just(Formula::False),
                ("[p-r]", proptest::collection::vec(term_strategy(), 0..3))
                    .prop_map(|(p, args)| Formula::Pred(p, args)),
                (term_strategy(), term_strategy()).prop_map(|(a, b)| Formula::Eq(a, b)),
                (term_strategy(), term_strategy()).prop_map(|(a, b)| Formula::Less(a, b)),
            ];
            leaf.prop_recursive(4, 32, 4, |inner| {
                prop_oneof![
                    inner.clone().prop_map(Formula::not),
                    proptest::collection::vec(inner.clone(), 2..4).prop_map(Formula::And),
                    proptest::collection::vec(inner.clone(), 2..4).prop_map(Formula::Or),
                    (inner.clone(), inner.clone())
                        .prop_map(|(a, b)| Formula::implies(a, b)),
                    (inner.clone(), inner).prop_map(|(a, b)| Formula::iff(a, b)),
                ]
            })
        }

        proptest! {
            // rendering any formula and parsing it back is the identity
            #[test]
            fn display_then_parse_is_identity(f in formula_strategy()) {
                let printed = f.to_string();
                let reparsed = parse_formula(&printed).unwrap();
                prop_assert_eq!(reparsed, f);
            }
        }
    }

    #[test]
    fn statement_round_trip() {
        let src = "sort thing = { tweety }.\n\
                   distinct low, medium, high.\n\
                   premise d2: forall x: thing. penguin(x) -> ~flies(x).\n\
                   schema d4(x: thing): bird(x) -> flies(x).\n\
                   premise d4(tweety): bird(tweety) -> flies(tweety).\n\
                   constraint c1: flies(tweety).\n";
        let spec = parse_source(src).unwrap();
        let printed = spec.to_string();
        let reparsed = parse_source(&printed).unwrap();
        assert_eq!(spec, reparsed);
    }
}
