//! Named formulas, theory grounding, and the grounded signature.
//!
//! Grounding turns a parsed [`TheorySpec`] into a [`GroundTheory`]:
//!
//! * schema statements expand to one named formula per instance, with the
//!   schema head applied to the instance arguments as the formula name;
//! * quantifiers expand internally over the finite members of their binder
//!   sorts, keeping a single name per statement;
//! * every formula is checked for sorts, and the two readings of `<` are
//!   resolved;
//! * distinct formulas keep distinct names (same name, different body is an
//!   error; exact duplicates collapse).
//!
//! Grounding is idempotent: a ground theory re-grounds to itself.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::GroundError;
use crate::formula::{Formula, Quantifier};
use crate::kinds::{KindInfer, KindTable, NameScheme};
use crate::parser::{Role, Statement, TheorySpec};
use crate::term::{Kind, Term};

/// A formula paired with its ground name term and role.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NamedFormula {
    pub name: Term,
    pub body: Formula,
    pub role: Role,
}

/// A declared sort: its members (in declaration order) and their kind.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SortInfo {
    pub members: Vec<Term>,
    pub kind: Kind,
}

/// The grounded signature: sorts, universes and resolved symbol kinds.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Signature {
    /// Declared sorts, by id.
    pub sorts: BTreeMap<String, SortInfo>,
    /// All formula names, canonically ordered.
    pub names: Vec<Term>,
    /// All object constants occurring in the theory, canonically ordered.
    pub objects: Vec<Term>,
    /// Schema heads with the sort ids of their parameters.
    pub schema_heads: BTreeMap<String, Vec<String>>,
    /// Resolved kinds for functions and predicates.
    pub kinds: KindTable,
    name_set: BTreeSet<Term>,
}

impl Signature {
    pub fn is_name(&self, t: &Term) -> bool {
        self.name_set.contains(t)
    }

    /// Kind of a ground term under this signature.
    pub fn kind_of(&self, t: &Term) -> Kind {
        match t {
            Term::Int(_) => Kind::Int,
            Term::Var(_) => Kind::Object,
            Term::App(head, args) => {
                if self.name_set.contains(t) || self.schema_heads.contains_key(head) {
                    Kind::Name
                } else if args.is_empty() {
                    Kind::Object
                } else {
                    self.kinds
                        .func_result
                        .get(&(head.clone(), args.len()))
                        .copied()
                        .unwrap_or(Kind::Object)
                }
            }
        }
    }

    fn builtin_members(&self, sort: &str) -> Option<&[Term]> {
        match sort {
            "name" => Some(&self.names),
            "obj" => Some(&self.objects),
            _ => None,
        }
    }

    /// Members of a binder sort: declared sorts plus the built-ins.
    pub fn sort_members(&self, sort: &str) -> Option<&[Term]> {
        self.sorts
            .get(sort)
            .map(|s| s.members.as_slice())
            .or_else(|| self.builtin_members(sort))
    }
}

/// The schema declaration a family of instances came from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SchemaDecl {
    pub head: String,
    pub params: Vec<crate::formula::Binder>,
    pub body: Formula,
}

/// A grounded theory: a finite set of named formulas plus its signature and
/// the declared distinctness groups.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroundTheory {
    pub formulas: Vec<NamedFormula>,
    pub signature: Signature,
    /// Groups of object constants declared pairwise distinct.
    pub distinct: Vec<Vec<Term>>,
    /// The schema declarations, kept so a ground theory can be rendered back
    /// into a re-groundable spec.
    pub schemas: Vec<SchemaDecl>,
}

// ---------------------------------------------------------------------------
// Grounding

struct Scheme {
    /// Exact name terms known before quantifier expansion.
    name_terms: BTreeSet<Term>,
    /// Schema head -> parameter member kinds.
    schema_param_kinds: BTreeMap<String, Vec<Kind>>,
    /// Binder sort -> member kind (declared sorts and built-ins).
    binder_kinds: BTreeMap<String, Kind>,
}

impl NameScheme for Scheme {
    fn is_name_term(&self, t: &Term) -> bool {
        self.name_terms.contains(t)
    }

    fn schema_params(&self, head: &str) -> Option<Vec<Kind>> {
        self.schema_param_kinds.get(head).cloned()
    }

    fn binder_kind(&self, sort: &str) -> Option<Kind> {
        self.binder_kinds.get(sort).copied()
    }
}

fn product(lists: &[&[Term]]) -> Vec<Vec<Term>> {
    let mut out = vec![Vec::new()];
    for list in lists {
        let mut next = Vec::with_capacity(out.len() * list.len());
        for prefix in &out {
            for item in *list {
                let mut row = prefix.clone();
                row.push(item.clone());
                next.push(row);
            }
        }
        out = next;
    }
    out
}

/// Ground a parsed theory.
pub fn ground_theory(spec: &TheorySpec) -> Result<GroundTheory, GroundError> {
    // Pass 1: declarations and the name inventory.
    let mut sorts: BTreeMap<String, Vec<Term>> = BTreeMap::new();
    let mut distinct: Vec<Vec<Term>> = Vec::new();
    let mut schema_heads: BTreeMap<String, Vec<String>> = BTreeMap::new();
    let mut top_names: BTreeSet<Term> = BTreeSet::new();
    for st in &spec.statements {
        match st {
            Statement::Sort { id, members } => {
                if id == "name" || id == "obj" || id == "int" {
                    return Err(GroundError::ReservedSort { id: id.clone() });
                }
                if sorts.insert(id.clone(), members.clone()).is_some() {
                    return Err(GroundError::DuplicateSort { id: id.clone() });
                }
                if members.is_empty() {
                    return Err(GroundError::EmptySort { sort: id.clone() });
                }
            }
            Statement::Distinct { terms } => distinct.push(terms.clone()),
            Statement::Named { name, .. } => {
                top_names.insert(name.clone());
            }
            Statement::Schema { head, params, .. } => {
                let param_sorts: Vec<String> = params.iter().map(|p| p.sort.clone()).collect();
                if schema_heads.insert(head.clone(), param_sorts).is_some() {
                    return Err(GroundError::DuplicateName { name: head.clone() });
                }
            }
        }
    }
    // A schema head may not collide with the head of a top-level name.
    for n in &top_names {
        if let Some(h) = n.head() {
            if schema_heads.contains_key(h) && n.args().is_empty() {
                return Err(GroundError::DuplicateName { name: h.to_string() });
            }
        }
    }

    // Kinds of declared sort members. Names are recognizable already: either
    // a top-level name term or an application of a schema head.
    let is_name_syntactic = |t: &Term| -> bool {
        top_names.contains(t)
            || matches!(t, Term::App(h, args) if !args.is_empty() && schema_heads.contains_key(h))
    };
    let member_kind = |t: &Term| -> Kind {
        match t {
            Term::Int(_) => Kind::Int,
            t if is_name_syntactic(t) => Kind::Name,
            _ => Kind::Object,
        }
    };
    let mut sort_infos: BTreeMap<String, SortInfo> = BTreeMap::new();
    for (id, members) in &sorts {
        let kind = member_kind(&members[0]);
        for m in members.iter().skip(1) {
            let k = member_kind(m);
            if k != kind {
                return Err(GroundError::MixedSort { sort: id.clone(), a: kind, b: k });
            }
        }
        sort_infos.insert(id.clone(), SortInfo { members: members.clone(), kind });
    }

    // Pass 2: kind inference over the unexpanded statements.
    let mut binder_kinds: BTreeMap<String, Kind> = BTreeMap::new();
    binder_kinds.insert("name".to_string(), Kind::Name);
    binder_kinds.insert("obj".to_string(), Kind::Object);
    for (id, info) in &sort_infos {
        binder_kinds.insert(id.clone(), info.kind);
    }
    let mut schema_param_kinds: BTreeMap<String, Vec<Kind>> = BTreeMap::new();
    for st in &spec.statements {
        if let Statement::Schema { head, params, .. } = st {
            let mut kinds = Vec::new();
            for p in params {
                let info = sort_infos.get(&p.sort).ok_or_else(|| {
                    GroundError::SchemaParamSort { var: p.var.clone(), sort: p.sort.clone() }
                })?;
                kinds.push(info.kind);
            }
            schema_param_kinds.insert(head.clone(), kinds);
        }
    }
    let scheme = Scheme {
        name_terms: top_names.clone(),
        schema_param_kinds,
        binder_kinds,
    };
    let mut infer = KindInfer::new(&scheme);
    for st in &spec.statements {
        match st {
            Statement::Named { formula, .. } => {
                let mut scope = Vec::new();
                infer.walk(formula, &mut scope)?;
            }
            Statement::Schema { head, params, formula } => {
                let mut scope = Vec::new();
                let kinds = scheme.schema_params(head).unwrap();
                for (p, k) in params.iter().zip(kinds) {
                    infer.bind(&p.var, k, &mut scope);
                }
                infer.walk(formula, &mut scope)?;
            }
            _ => {}
        }
    }
    let kinds = infer.freeze()?;

    // Pass 3: schema expansion.
    struct Pending {
        name: Term,
        body: Formula,
        role: Role,
    }
    let mut pending: Vec<Pending> = Vec::new();
    for st in &spec.statements {
        match st {
            Statement::Named { role, name, formula } => pending.push(Pending {
                name: name.clone(),
                body: formula.clone(),
                role: *role,
            }),
            Statement::Schema { head, params, formula } => {
                let member_lists: Vec<&[Term]> = params
                    .iter()
                    .map(|p| sort_infos.get(&p.sort).unwrap().members.as_slice())
                    .collect();
                for tuple in product(&member_lists) {
                    let bind = |v: &str| -> Option<Term> {
                        params
                            .iter()
                            .position(|p| p.var == v)
                            .map(|i| tuple[i].clone())
                    };
                    pending.push(Pending {
                        name: Term::App(head.clone(), tuple.clone()),
                        body: formula.substitute(&bind),
                        role: Role::Premise,
                    });
                }
            }
            _ => {}
        }
    }

    // The full name universe is now known.
    let name_set: BTreeSet<Term> = pending.iter().map(|p| p.name.clone()).collect();
    let mut names: Vec<Term> = name_set.iter().cloned().collect();
    names.sort();

    // Object constants: declared sort members, distinctness declarations and
    // bare non-name constants occurring in any body.
    let mut objects: BTreeSet<Term> = BTreeSet::new();
    let mut collect_objects = |t: &Term| {
        let mut stack = vec![t];
        while let Some(t) = stack.pop() {
            if let Term::App(_, args) = t {
                if args.is_empty() && !name_set.contains(t) {
                    objects.insert(t.clone());
                }
                stack.extend(args.iter());
            }
        }
    };
    for info in sort_infos.values() {
        if info.kind == Kind::Object {
            for m in &info.members {
                collect_objects(m);
            }
        }
    }
    for group in &distinct {
        for t in group {
            collect_objects(t);
        }
    }
    for p in &pending {
        p.body.visit_atoms(&mut |atom| match atom {
            Formula::Pred(_, args) => args.iter().for_each(&mut collect_objects),
            Formula::Eq(a, b) | Formula::Less(a, b) => {
                collect_objects(a);
                collect_objects(b);
            }
            _ => {}
        });
    }
    let objects: Vec<Term> = objects.into_iter().collect();

    let signature = Signature {
        sorts: sort_infos,
        names,
        objects,
        schema_heads,
        kinds,
        name_set,
    };

    // Pass 4: quantifier expansion, groundness and name-membership checks,
    // name injectivity.
    let mut by_name: BTreeMap<Term, usize> = BTreeMap::new();
    let mut formulas: Vec<NamedFormula> = Vec::new();
    for p in pending {
        let body = expand_quantifiers(&p.body, &signature)?;
        if !body.is_ground() {
            return Err(GroundError::NotGround { formula: body.to_string() });
        }
        check_name_terms(&body, &signature)?;
        let nf = NamedFormula { name: p.name, body, role: p.role };
        match by_name.get(&nf.name) {
            Some(&i) => {
                if formulas[i].body != nf.body || formulas[i].role != nf.role {
                    return Err(GroundError::DuplicateName { name: nf.name.to_string() });
                }
                // exact duplicate: collapse
            }
            None => {
                by_name.insert(nf.name.clone(), formulas.len());
                formulas.push(nf);
            }
        }
    }

    let schemas = spec
        .statements
        .iter()
        .filter_map(|st| match st {
            Statement::Schema { head, params, formula } => Some(SchemaDecl {
                head: head.clone(),
                params: params.clone(),
                body: formula.clone(),
            }),
            _ => None,
        })
        .collect();

    Ok(GroundTheory { formulas, signature, distinct, schemas })
}

fn expand_quantifiers(f: &Formula, sig: &Signature) -> Result<Formula, GroundError> {
    Ok(match f {
        Formula::Quant(q, binders, body) => {
            let mut member_lists: Vec<&[Term]> = Vec::new();
            for b in binders {
                if b.sort == "int" {
                    return Err(GroundError::Unquantifiable { sort: b.sort.clone() });
                }
                let members = sig
                    .sort_members(&b.sort)
                    .ok_or_else(|| GroundError::UndeclaredSort {
                        var: b.var.clone(),
                        sort: b.sort.clone(),
                    })?;
                if members.is_empty() {
                    return Err(GroundError::EmptySort { sort: b.sort.clone() });
                }
                member_lists.push(members);
            }
            let mut parts = Vec::new();
            for tuple in product(&member_lists) {
                let bind = |v: &str| -> Option<Term> {
                    binders
                        .iter()
                        .position(|b| b.var == v)
                        .map(|i| tuple[i].clone())
                };
                parts.push(expand_quantifiers(&body.substitute(&bind), sig)?);
            }
            match q {
                Quantifier::Forall => Formula::and(parts),
                Quantifier::Exists => Formula::or(parts),
            }
        }
        Formula::Not(g) => Formula::not(expand_quantifiers(g, sig)?),
        Formula::And(gs) => Formula::And(
            gs.iter().map(|g| expand_quantifiers(g, sig)).collect::<Result<_, _>>()?,
        ),
        Formula::Or(gs) => Formula::Or(
            gs.iter().map(|g| expand_quantifiers(g, sig)).collect::<Result<_, _>>()?,
        ),
        Formula::Implies(a, b) => {
            Formula::implies(expand_quantifiers(a, sig)?, expand_quantifiers(b, sig)?)
        }
        Formula::Iff(a, b) => {
            Formula::iff(expand_quantifiers(a, sig)?, expand_quantifiers(b, sig)?)
        }
        _ => f.clone(),
    })
}

/// Every name-kind term in a ground formula must be a member name.
fn check_name_terms(f: &Formula, sig: &Signature) -> Result<(), GroundError> {
    let mut bad: Option<Term> = None;
    let mut check_term = |t: &Term| {
        let mut stack = vec![t];
        while let Some(t) = stack.pop() {
            if sig.kind_of(t) == Kind::Name && !sig.is_name(t) && bad.is_none() {
                bad = Some(t.clone());
            }
            stack.extend(t.args().iter());
        }
    };
    f.visit_atoms(&mut |atom| match atom {
        Formula::Pred(_, args) => args.iter().for_each(&mut check_term),
        Formula::Eq(a, b) | Formula::Less(a, b) => {
            check_term(a);
            check_term(b);
        }
        _ => {}
    });
    match bad {
        Some(t) => Err(GroundError::UnknownName { name: t.to_string() }),
        None => Ok(()),
    }
}

impl GroundTheory {
    pub fn empty() -> GroundTheory {
        ground_theory(&TheorySpec::default()).expect("empty spec grounds")
    }

    /// All formula names in theory order.
    pub fn names_in_order(&self) -> Vec<Term> {
        self.formulas.iter().map(|f| f.name.clone()).collect()
    }

    pub fn formula_by_name(&self, name: &Term) -> Option<&NamedFormula> {
        self.formulas.iter().find(|f| &f.name == name)
    }

    pub fn has_constraints(&self) -> bool {
        self.formulas.iter().any(|f| f.role == Role::Constraint)
    }

    /// Symbols that occur anywhere in the theory (as heads of names or of
    /// terms in bodies); fresh names must avoid them.
    fn occupied_symbols(&self) -> BTreeSet<String> {
        let mut syms = BTreeSet::new();
        let mut add_term = |t: &Term| {
            let mut stack = vec![t];
            while let Some(t) = stack.pop() {
                if let Term::App(h, args) = t {
                    syms.insert(h.clone());
                    stack.extend(args.iter());
                }
            }
        };
        for f in &self.formulas {
            add_term(&f.name);
            f.body.visit_atoms(&mut |atom| match atom {
                Formula::Pred(_, args) => args.iter().for_each(&mut add_term),
                Formula::Eq(a, b) | Formula::Less(a, b) => {
                    add_term(a);
                    add_term(b);
                }
                _ => {}
            });
        }
        for h in self.signature.schema_heads.keys() {
            syms.insert(h.clone());
        }
        syms
    }

    /// Fresh `d`-name for a revision: `d{j+1}` where `j` counts the
    /// non-schema top-level names, skipping upward past collisions.
    pub fn fresh_name(&self) -> Term {
        let j = self.formulas.iter().filter(|f| f.name.args().is_empty()).count();
        self.fresh_with_prefix("d", j)
    }

    /// Fresh `c`-name for a contraction constraint, numbered in its own
    /// sequence.
    pub fn fresh_constraint_name(&self) -> Term {
        let k = self.formulas.iter().filter(|f| f.role == Role::Constraint).count();
        self.fresh_with_prefix("c", k)
    }

    fn fresh_with_prefix(&self, prefix: &str, count: usize) -> Term {
        let occupied = self.occupied_symbols();
        let mut i = count + 1;
        loop {
            let candidate = format!("{prefix}{i}");
            if !occupied.contains(&candidate) {
                return Term::constant(&candidate);
            }
            i += 1;
        }
    }

    /// Render the ground theory back into statements. Grounding the result
    /// reproduces this theory exactly: the expanded instances come first (so
    /// formula order is preserved) and the schema declarations last (their
    /// re-expansion collapses into the instances already listed, keeping the
    /// schema heads in the signature).
    pub fn to_spec(&self) -> TheorySpec {
        let mut statements = Vec::new();
        for (id, info) in &self.signature.sorts {
            statements.push(Statement::Sort { id: id.clone(), members: info.members.clone() });
        }
        for group in &self.distinct {
            statements.push(Statement::Distinct { terms: group.clone() });
        }
        for f in &self.formulas {
            statements.push(Statement::Named {
                role: f.role,
                name: f.name.clone(),
                formula: f.body.clone(),
            });
        }
        for s in &self.schemas {
            statements.push(Statement::Schema {
                head: s.head.clone(),
                params: s.params.clone(),
                formula: s.body.clone(),
            });
        }
        TheorySpec { statements }
    }

    /// Check a query or revision formula against this theory: expand its
    /// quantifiers, verify sorts (new symbols are inferred against the frozen
    /// table) and require every name term to be a member name.
    pub fn check_formula(&self, f: &Formula) -> Result<Formula, GroundError> {
        let mut infer = KindInfer::new(&self.signature);
        infer.preload(&self.signature.kinds);
        let mut scope = Vec::new();
        infer.walk(f, &mut scope)?;
        infer.freeze()?;
        let expanded = expand_quantifiers(f, &self.signature)?;
        if !expanded.is_ground() {
            return Err(GroundError::NotGround { formula: expanded.to_string() });
        }
        check_name_terms(&expanded, &self.signature)?;
        Ok(expanded)
    }
}

// A frozen signature can answer the name-scheme questions of the checker.
impl NameScheme for Signature {
    fn is_name_term(&self, t: &Term) -> bool {
        self.is_name(t)
    }

    fn schema_params(&self, head: &str) -> Option<Vec<Kind>> {
        let params = self.schema_heads.get(head)?;
        Some(
            params
                .iter()
                .map(|s| self.sorts.get(s).map(|i| i.kind).unwrap_or(Kind::Object))
                .collect(),
        )
    }

    fn binder_kind(&self, sort: &str) -> Option<Kind> {
        match sort {
            "name" => Some(Kind::Name),
            "obj" => Some(Kind::Object),
            _ => self.sorts.get(sort).map(|i| i.kind),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{ground, RECENCY, TWEETY};
    use crate::parser::parse_source;

    #[test]
    fn tweety_grounds_to_five_formulas() {
        let t = ground(TWEETY);
        assert_eq!(t.formulas.len(), 5);
        let names: Vec<String> = t.formulas.iter().map(|f| f.name.to_string()).collect();
        assert_eq!(names, ["d1(tweety)", "d2", "d3", "d4", "d5"]);
        // quantifiers over the singleton sort collapse to one instance
        assert_eq!(t.formula_by_name(&Term::constant("d5")).unwrap().body.to_string(), "d2 < d1(tweety)");
    }

    #[test]
    fn empty_spec_grounds_to_empty_theory() {
        let t = ground("");
        assert!(t.formulas.is_empty());
        assert!(t.signature.names.is_empty());
    }

    #[test]
    fn schema_instances_count_by_independent_enumeration() {
        // seven plain premises, two binary schemas over a 7-member name sort,
        // one quantified premise: 7 + 7*7 + 7*7 + 1 instances
        let t = ground(RECENCY);
        let sort_size = t.signature.sorts["src"].members.len();
        let expected = 7 + sort_size * sort_size + sort_size * sort_size + 1;
        assert_eq!(sort_size, 7);
        assert_eq!(t.formulas.len(), expected);
        assert_eq!(t.formulas.len(), 106);
    }

    #[test]
    fn less_readings_resolved_by_sort() {
        let t = ground(RECENCY);
        // time's result kind is int because time(d1) = 10
        assert_eq!(
            t.signature.kinds.func_result.get(&("time".to_string(), 1)),
            Some(&Kind::Int)
        );
        assert_eq!(
            t.signature.kinds.func_result.get(&("source".to_string(), 1)),
            Some(&Kind::Object)
        );
    }

    #[test]
    fn mixed_sort_comparison_is_an_error() {
        let err = ground_theory(&parse_source("premise d1: d1 < 10.").unwrap()).unwrap_err();
        assert!(matches!(err, GroundError::KindClash { .. }), "{err}");
    }

    #[test]
    fn name_as_object_argument_is_an_error() {
        // d1's parameter ranges over an object sort; d1 itself is a name
        let src = "
            sort thing = { tweety }.
            schema d1(x: thing): bird(x) -> flies(x).
            premise d2: flies(d1(d2)).
        ";
        let err = ground_theory(&parse_source(src).unwrap()).unwrap_err();
        assert!(
            matches!(err, GroundError::KindClash { expected: Kind::Object, found: Kind::Name, .. }),
            "{err}"
        );
    }

    #[test]
    fn duplicate_name_with_different_body_is_an_error() {
        let err = ground_theory(&parse_source("premise d1: p. premise d1: q.").unwrap())
            .unwrap_err();
        assert!(matches!(err, GroundError::DuplicateName { .. }), "{err}");
        // exact duplicates collapse silently
        let t = ground("premise d1: p. premise d1: p.");
        assert_eq!(t.formulas.len(), 1);
    }

    #[test]
    fn variable_over_undeclared_sort_is_an_error() {
        let err = ground_theory(&parse_source("premise d1: forall x: nosuch. p(x).").unwrap())
            .unwrap_err();
        assert!(matches!(err, GroundError::UndeclaredSort { .. }), "{err}");
    }

    #[test]
    fn grounding_is_idempotent() {
        for src in [TWEETY, RECENCY] {
            let once = ground(src);
            let again = ground_theory(&once.to_spec()).unwrap();
            assert_eq!(once, again);
            // and the rendered spec round-trips through the parser
            let reparsed = parse_source(&once.to_spec().to_string()).unwrap();
            assert_eq!(ground_theory(&reparsed).unwrap(), once);
        }
    }

    #[test]
    fn fresh_name_counts_nonschema_names() {
        let t = ground("premise d1: p. premise d2: q.");
        assert_eq!(t.fresh_name(), Term::constant("d3"));
        let t = ground("");
        assert_eq!(t.fresh_name(), Term::constant("d1"));
        // gap: j = 2, candidate d3 collides, so d4
        let t = ground("premise d1: p. premise d3: q.");
        assert_eq!(t.fresh_name(), Term::constant("d4"));
    }

    #[test]
    fn fresh_name_avoids_schema_heads_and_body_symbols() {
        let t = ground(RECENCY);
        // 8 constant names, so j = 8; d9 and d10 are taken
        assert_eq!(t.fresh_name(), Term::constant("d11"));
        let t = ground("premise d1: p.");
        assert_eq!(t.fresh_constraint_name(), Term::constant("c1"));
    }

    #[test]
    fn name_terms_in_bodies_must_be_members() {
        let err =
            ground_theory(&parse_source("premise d1: p. premise d2: d1 < d9.").unwrap())
                .unwrap_err();
        // d9 is an unknown bare constant, so it is object-kinded and the
        // comparison clashes instead
        assert!(
            matches!(err, GroundError::KindClash { .. } | GroundError::UnknownName { .. }),
            "{err}"
        );
    }

    #[test]
    fn check_formula_expands_and_validates_queries() {
        let t = ground(TWEETY);
        let q = crate::parser::parse_formula("forall x: thing. ~flies(x)").unwrap();
        let expanded = t.check_formula(&q).unwrap();
        assert_eq!(expanded.to_string(), "~flies(tweety)");
        let bad = crate::parser::parse_formula("d2 < 3").unwrap();
        assert!(t.check_formula(&bad).is_err());
    }
}
