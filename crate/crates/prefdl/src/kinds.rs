//! Sort checking and kind inference.
//!
//! The language has three term kinds: names, objects and integers. Constants
//! and literals carry a fixed kind; the kinds of uninterpreted function and
//! predicate argument positions are inferred by unification over the whole
//! theory. The two readings of `<` are resolved from the operand kinds.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::GroundError;
use crate::formula::Formula;
use crate::term::{Kind, Term};

/// Resolved kinds for every symbol of a grounded theory.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct KindTable {
    /// Result kind of each function symbol, by (symbol, arity).
    pub func_result: BTreeMap<(String, usize), Kind>,
    /// Argument kinds of each function symbol.
    pub func_args: BTreeMap<(String, usize), Vec<Kind>>,
    /// Argument kinds of each predicate symbol.
    pub pred_args: BTreeMap<(String, usize), Vec<Kind>>,
}

/// What the checker needs to know about the theory's naming scheme.
pub trait NameScheme {
    /// Is this exact ground term a declared formula name?
    fn is_name_term(&self, t: &Term) -> bool;
    /// Parameter kinds of a schema head, if the symbol is one.
    fn schema_params(&self, head: &str) -> Option<Vec<Kind>>;
    /// Kind of the members of a binder sort (`name`, `obj` or declared).
    fn binder_kind(&self, sort: &str) -> Option<Kind>;
}

/// Opaque handle to a kind-inference node.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Node(usize);

/// Union-find over kind expressions with an optional fixed kind at each root.
pub struct KindInfer<'a, S: NameScheme> {
    scheme: &'a S,
    parent: Vec<usize>,
    fixed: Vec<Option<Kind>>,
    func_result: BTreeMap<(String, usize), Node>,
    func_args: BTreeMap<(String, usize), Vec<Node>>,
    pred_args: BTreeMap<(String, usize), Vec<Node>>,
    /// `<` atoms awaiting kind resolution: (node, rendered atom).
    comparisons: Vec<(Node, String)>,
}

impl<'a, S: NameScheme> KindInfer<'a, S> {
    pub fn new(scheme: &'a S) -> Self {
        KindInfer {
            scheme,
            parent: Vec::new(),
            fixed: Vec::new(),
            func_result: BTreeMap::new(),
            func_args: BTreeMap::new(),
            pred_args: BTreeMap::new(),
            comparisons: Vec::new(),
        }
    }

    /// Seed the inference with already-resolved kinds (used when checking a
    /// query against a frozen theory signature).
    pub fn preload(&mut self, table: &KindTable) {
        for ((sym, arity), kind) in &table.func_result {
            let n = self.fresh(Some(*kind));
            self.func_result.insert((sym.clone(), *arity), n);
        }
        for ((sym, arity), kinds) in &table.func_args {
            let nodes = kinds.iter().map(|k| self.fresh(Some(*k))).collect();
            self.func_args.insert((sym.clone(), *arity), nodes);
        }
        for ((sym, arity), kinds) in &table.pred_args {
            let nodes = kinds.iter().map(|k| self.fresh(Some(*k))).collect();
            self.pred_args.insert((sym.clone(), *arity), nodes);
        }
    }

    fn fresh(&mut self, kind: Option<Kind>) -> Node {
        let id = self.parent.len();
        self.parent.push(id);
        self.fixed.push(kind);
        Node(id)
    }

    fn find(&mut self, n: Node) -> usize {
        let mut r = n.0;
        while self.parent[r] != r {
            r = self.parent[r];
        }
        let mut c = n.0;
        while self.parent[c] != r {
            let next = self.parent[c];
            self.parent[c] = r;
            c = next;
        }
        r
    }

    fn unify(&mut self, a: Node, b: Node, context: &str) -> Result<(), GroundError> {
        let ra = self.find(a);
        let rb = self.find(b);
        if ra == rb {
            return Ok(());
        }
        let merged = match (self.fixed[ra], self.fixed[rb]) {
            (Some(ka), Some(kb)) if ka != kb => {
                return Err(GroundError::KindClash {
                    context: context.to_string(),
                    expected: ka,
                    found: kb,
                });
            }
            (Some(k), _) | (_, Some(k)) => Some(k),
            (None, None) => None,
        };
        self.parent[rb] = ra;
        self.fixed[ra] = merged;
        Ok(())
    }

    fn require(&mut self, n: Node, kind: Kind, context: &str) -> Result<(), GroundError> {
        let k = self.fresh(Some(kind));
        // expected kind first, so clashes report it as such
        self.unify(k, n, context)
    }

    fn func_result_node(&mut self, sym: &str, arity: usize) -> Node {
        if let Some(n) = self.func_result.get(&(sym.to_string(), arity)) {
            return *n;
        }
        let n = self.fresh(None);
        self.func_result.insert((sym.to_string(), arity), n);
        n
    }

    fn func_arg_nodes(&mut self, sym: &str, arity: usize) -> Vec<Node> {
        if let Some(ns) = self.func_args.get(&(sym.to_string(), arity)) {
            return ns.clone();
        }
        let ns: Vec<Node> = (0..arity).map(|_| self.fresh(None)).collect();
        self.func_args.insert((sym.to_string(), arity), ns.clone());
        ns
    }

    fn pred_arg_nodes(&mut self, sym: &str, arity: usize) -> Vec<Node> {
        if let Some(ns) = self.pred_args.get(&(sym.to_string(), arity)) {
            return ns.clone();
        }
        let ns: Vec<Node> = (0..arity).map(|_| self.fresh(None)).collect();
        self.pred_args.insert((sym.to_string(), arity), ns.clone());
        ns
    }

    /// Node describing the kind of a term. `scope` maps bound variables to
    /// the nodes of their binder sorts.
    fn term_node(
        &mut self,
        t: &Term,
        scope: &[(String, Node)],
    ) -> Result<Node, GroundError> {
        match t {
            Term::Int(_) => Ok(self.fresh(Some(Kind::Int))),
            Term::Var(v) => scope
                .iter()
                .rev()
                .find(|(name, _)| name == v)
                .map(|(_, n)| *n)
                .ok_or_else(|| GroundError::UnboundVariable { var: v.clone() }),
            Term::App(head, args) => {
                // an exact declared name term, parameterized or not
                if self.scheme.is_name_term(t) {
                    return Ok(self.fresh(Some(Kind::Name)));
                }
                if let Some(param_kinds) = self.scheme.schema_params(head) {
                    if param_kinds.len() != args.len() {
                        return Err(GroundError::NameArity {
                            head: head.clone(),
                            expected: param_kinds.len(),
                            found: args.len(),
                        });
                    }
                    for (i, (arg, want)) in args.iter().zip(&param_kinds).enumerate() {
                        let an = self.term_node(arg, scope)?;
                        let ctx = format!("argument {} of name `{}`", i + 1, head);
                        self.require(an, *want, &ctx)?;
                    }
                    return Ok(self.fresh(Some(Kind::Name)));
                }
                if args.is_empty() {
                    // unknown bare constant: an object term
                    return Ok(self.fresh(Some(Kind::Object)));
                }
                let arg_nodes = self.func_arg_nodes(head, args.len());
                for (i, (arg, want)) in args.iter().zip(&arg_nodes).enumerate() {
                    let an = self.term_node(arg, scope)?;
                    let ctx = format!("argument {} of `{}`", i + 1, head);
                    self.unify(*want, an, &ctx)?;
                }
                Ok(self.func_result_node(head, args.len()))
            }
        }
    }

    /// Walk a formula, adding its kind constraints.
    pub fn walk(
        &mut self,
        f: &Formula,
        scope: &mut Vec<(String, Node)>,
    ) -> Result<(), GroundError> {
        match f {
            Formula::True | Formula::False => Ok(()),
            Formula::Pred(p, args) => {
                let arg_nodes = self.pred_arg_nodes(p, args.len());
                for (i, (arg, want)) in args.iter().zip(&arg_nodes).enumerate() {
                    let an = self.term_node(arg, scope)?;
                    let ctx = format!("argument {} of `{}`", i + 1, p);
                    self.unify(*want, an, &ctx)?;
                }
                Ok(())
            }
            Formula::Eq(a, b) => {
                let na = self.term_node(a, scope)?;
                let nb = self.term_node(b, scope)?;
                self.unify(na, nb, &format!("`{a} = {b}`"))
            }
            Formula::Less(a, b) => {
                let na = self.term_node(a, scope)?;
                let nb = self.term_node(b, scope)?;
                let ctx = format!("`{a} < {b}`");
                self.unify(na, nb, &ctx)?;
                self.comparisons.push((na, ctx));
                Ok(())
            }
            Formula::Not(g) => self.walk(g, scope),
            Formula::And(gs) | Formula::Or(gs) => {
                for g in gs {
                    self.walk(g, scope)?;
                }
                Ok(())
            }
            Formula::Implies(a, b) | Formula::Iff(a, b) => {
                self.walk(a, scope)?;
                self.walk(b, scope)
            }
            Formula::Quant(_, binders, body) => {
                let depth = scope.len();
                for b in binders {
                    let kind = self.scheme.binder_kind(&b.sort).ok_or_else(|| {
                        GroundError::UndeclaredSort { var: b.var.clone(), sort: b.sort.clone() }
                    })?;
                    let n = self.fresh(Some(kind));
                    scope.push((b.var.clone(), n));
                }
                let r = self.walk(body, scope);
                scope.truncate(depth);
                r
            }
        }
    }

    /// Bind a variable explicitly (for schema parameters).
    pub fn bind(&mut self, var: &str, kind: Kind, scope: &mut Vec<(String, Node)>) {
        let n = self.fresh(Some(kind));
        scope.push((var.to_string(), n));
    }

    /// Check comparison readings and freeze the resolved table.
    pub fn freeze(mut self) -> Result<KindTable, GroundError> {
        let comparisons = std::mem::take(&mut self.comparisons);
        for (node, context) in comparisons {
            let r = self.find(node);
            match self.fixed[r] {
                Some(Kind::Name) | Some(Kind::Int) => {}
                Some(Kind::Object) => {
                    return Err(GroundError::BadComparison { context, kind: Kind::Object })
                }
                None => return Err(GroundError::AmbiguousComparison { context }),
            }
        }
        let mut table = KindTable::default();
        let func_result = std::mem::take(&mut self.func_result);
        for ((sym, arity), node) in func_result {
            let r = self.find(node);
            table.func_result.insert((sym, arity), self.fixed[r].unwrap_or(Kind::Object));
        }
        let func_args = std::mem::take(&mut self.func_args);
        for ((sym, arity), nodes) in func_args {
            let kinds = nodes
                .into_iter()
                .map(|n| {
                    let r = self.find(n);
                    self.fixed[r].unwrap_or(Kind::Object)
                })
                .collect();
            table.func_args.insert((sym, arity), kinds);
        }
        let pred_args = std::mem::take(&mut self.pred_args);
        for ((sym, arity), nodes) in pred_args {
            let kinds = nodes
                .into_iter()
                .map(|n| {
                    let r = self.find(n);
                    self.fixed[r].unwrap_or(Kind::Object)
                })
                .collect();
            table.pred_args.insert((sym, arity), kinds);
        }
        Ok(table)
    }
}
