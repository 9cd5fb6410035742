//! Epistemic states and their lifecycle: revision, contraction, belief
//! expansion, and the postulate harness.
//!
//! Revising a state just adds the new formula under a fresh name; conflict
//! resolution is left entirely to the nonmonotonic semantics. Contracting
//! `q` ("do not believe `q`") adds a constraint with body `~q`: the
//! constraint takes part in base construction and compatibility but never in
//! derived beliefs, so `q` loses its support without `~q` being asserted.

use serde::{Deserialize, Serialize};

use crate::axioms::background_axioms;
use crate::error::EngineError;
use crate::extension::{BeliefQuerier, BeliefRepresentation};
use crate::fixpoint::least_fixpoint;
use crate::formula::Formula;
use crate::oracle::{entails, Caps};
use crate::parser::{Role, Statement, TheorySpec};
use crate::term::Term;
use crate::theory::{ground_theory, GroundTheory};

/// The kind of an applied operation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OpKind {
    Revise,
    Contract,
}

/// One applied operation: enough to replay it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HistoryEntry {
    pub op: OpKind,
    /// The operand formula, as written.
    pub formula: String,
    /// The name the operation assigned.
    pub name: String,
    /// Logical timestamp: position in the history.
    pub timestamp: u64,
}

/// An epistemic state: a ground theory plus the history that produced it
/// from the initial specification.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EpistemicState {
    /// The specification the state started from.
    pub initial: TheorySpec,
    /// The current specification: the initial one plus one statement per
    /// applied operation.
    pub spec: TheorySpec,
    pub theory: GroundTheory,
    pub history: Vec<HistoryEntry>,
}

impl EpistemicState {
    pub fn from_spec(spec: TheorySpec) -> Result<EpistemicState, EngineError> {
        let theory = ground_theory(&spec)?;
        Ok(EpistemicState {
            initial: spec.clone(),
            spec,
            theory,
            history: Vec::new(),
        })
    }

    pub fn from_source(text: &str) -> Result<EpistemicState, EngineError> {
        let spec = crate::parser::parse_source(text)?;
        EpistemicState::from_spec(spec)
    }

    /// The belief set induced by this state: the accepted conclusions.
    pub fn belief(&self, caps: &Caps) -> Result<BeliefRepresentation, EngineError> {
        Ok(least_fixpoint(&self.theory, caps)?.accepted_belief().clone())
    }

    fn apply(
        &self,
        op: OpKind,
        name: Term,
        role: Role,
        body: Formula,
        written: String,
    ) -> Result<EpistemicState, EngineError> {
        let mut spec = self.spec.clone();
        spec.statements.push(Statement::Named {
            role,
            name: name.clone(),
            formula: body,
        });
        let theory = ground_theory(&spec)?;
        let mut history = self.history.clone();
        history.push(HistoryEntry {
            op,
            formula: written,
            name: name.to_string(),
            timestamp: history.len() as u64,
        });
        Ok(EpistemicState { initial: self.initial.clone(), spec, theory, history })
    }
}

/// Revision: add the formula as a premise under a fresh name. The input
/// state is unchanged.
pub fn revise(state: &EpistemicState, p: &Formula) -> Result<EpistemicState, EngineError> {
    state.theory.check_formula(p)?;
    let name = state.theory.fresh_name();
    state.apply(OpKind::Revise, name, Role::Premise, p.clone(), p.to_string())
}

/// Contraction of `q` ("do not believe `q`"): add a constraint whose body is
/// the negation of `q`. A leading negation is stripped rather than doubled.
pub fn contract(state: &EpistemicState, q: &Formula) -> Result<EpistemicState, EngineError> {
    let body = match q {
        Formula::Not(inner) => (**inner).clone(),
        other => Formula::not(other.clone()),
    };
    state.theory.check_formula(&body)?;
    let name = state.theory.fresh_constraint_name();
    state.apply(OpKind::Contract, name, Role::Constraint, body, q.to_string())
}

/// Expansion of the induced belief set: `Bel(state) + a`.
pub fn expand_belief(
    state: &EpistemicState,
    a: &Formula,
    caps: &Caps,
) -> Result<BeliefRepresentation, EngineError> {
    let a = state.theory.check_formula(a)?;
    Ok(state.belief(caps)?.expand(a))
}

/// Status of one postulate on one instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PostulateStatus {
    /// No counterexample on the query panel; panel-relative.
    HoldsOnInstance,
    /// A machine-checked witness separates the two sides; definitive.
    FailsOnInstance,
    NotApplicable,
}

/// A formula in one side's belief set and provably absent from the other's.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PostulateWitness {
    pub formula: String,
    pub in_side: String,
    pub out_side: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PostulateEntry {
    pub id: String,
    pub status: PostulateStatus,
    pub witness: Option<PostulateWitness>,
    pub note: String,
}

/// The verdicts of the eight reformulated revision postulates on one
/// instance (a state and formulas A, B).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PostulateReport {
    pub a: String,
    pub b: String,
    pub entries: Vec<PostulateEntry>,
}

impl PostulateReport {
    pub fn entry(&self, id: &str) -> &PostulateEntry {
        self.entries.iter().find(|e| e.id == id).expect("all eight postulates reported")
    }
}

/// Belief-membership queries for one side of a postulate.
struct Side<'a> {
    label: &'a str,
    querier: BeliefQuerier<'a>,
}

impl Side<'_> {
    fn holds(&mut self, q: &Formula) -> Result<bool, EngineError> {
        self.querier.entails(q)
    }
}

/// Evaluate the eight postulates on this instance. Containment postulates
/// are decided over a finite query panel (the atoms of the state, A and B,
/// their negations, and any extra probes): a failure carries a
/// machine-checked witness and is definitive, while "holds" is relative to
/// the panel.
pub fn check_postulates(
    state: &EpistemicState,
    a: &Formula,
    b: &Formula,
    probes: &[Formula],
    caps: &Caps,
) -> Result<PostulateReport, EngineError> {
    state.theory.check_formula(a)?;
    state.theory.check_formula(b)?;
    let panel = query_panel(&state.theory, &[a, b], probes);

    let t_a = revise(state, a)?;
    let t_b = revise(state, b)?;
    let ab = Formula::and(vec![a.clone(), b.clone()]);
    let t_ab = revise(state, &ab)?;

    let bel = state.belief(caps)?;
    let bel_a = t_a.belief(caps)?;
    let bel_b = t_b.belief(caps)?;
    let bel_ab = t_ab.belief(caps)?;

    let ax = background_axioms(&state.theory);
    let ax_a = background_axioms(&t_a.theory);
    let ax_b = background_axioms(&t_b.theory);
    let ax_ab = background_axioms(&t_ab.theory);

    let mut side_bel = Side {
        label: "Bel(T)",
        querier: BeliefQuerier::new(&bel, &ax, &panel, caps)?,
    };
    let mut side_a = Side {
        label: "Bel(T * A)",
        querier: BeliefQuerier::new(&bel_a, &ax_a, &panel, caps)?,
    };
    let mut side_b = Side {
        label: "Bel(T * B)",
        querier: BeliefQuerier::new(&bel_b, &ax_b, &panel, caps)?,
    };
    let mut side_ab = Side {
        label: "Bel(T * (A & B))",
        querier: BeliefQuerier::new(&bel_ab, &ax_ab, &panel, caps)?,
    };
    let bel_plus_a = bel.expand(a.clone());
    let mut side_bel_plus_a = Side {
        label: "Bel(T) + A",
        querier: BeliefQuerier::new(&bel_plus_a, &ax, &panel, caps)?,
    };
    let bel_a_plus_b = bel_a.expand(b.clone());
    let mut side_a_plus_b = Side {
        label: "Bel(T * A) + B",
        querier: BeliefQuerier::new(&bel_a_plus_b, &ax_a, &panel, caps)?,
    };

    let mut entries = Vec::new();

    // T*1: the revision induces a belief set: consistent and closed under
    // entailment by construction.
    let consistent = !side_a.holds(&Formula::False)?;
    entries.push(PostulateEntry {
        id: "T*1".into(),
        status: if consistent {
            PostulateStatus::HoldsOnInstance
        } else {
            PostulateStatus::FailsOnInstance
        },
        witness: None,
        note: "the induced belief set is consistent and closed under entailment".into(),
    });

    // T*2: is the new information accepted?
    let has_a = side_a.holds(a)?;
    entries.push(PostulateEntry {
        id: "T*2".into(),
        status: if has_a {
            PostulateStatus::HoldsOnInstance
        } else {
            PostulateStatus::FailsOnInstance
        },
        witness: (!has_a).then(|| PostulateWitness {
            formula: a.to_string(),
            in_side: "the revision input".into(),
            out_side: side_a.label.into(),
        }),
        note: if has_a {
            "the revision input is accepted here".into()
        } else {
            "new information is not necessarily accepted".into()
        },
    });

    // T*3: Bel(T * A) within Bel(T) + A.
    entries.push(containment(
        "T*3",
        &panel,
        &mut side_a,
        &mut side_bel_plus_a,
        caps,
    )?);

    // T*4: if ~A is not believed, Bel(T) + A within Bel(T * A).
    if side_bel.holds(&Formula::not(a.clone()))? {
        entries.push(PostulateEntry {
            id: "T*4".into(),
            status: PostulateStatus::NotApplicable,
            witness: None,
            note: "~A is in Bel(T); the precondition fails".into(),
        });
    } else {
        entries.push(containment(
            "T*4",
            &panel,
            &mut side_bel_plus_a,
            &mut side_a,
            caps,
        )?);
    }

    // T*5: Bel(T * A) is inconsistent iff ~A is a tautology.
    let neg_a_tautology = entails(&[], &ax, &Formula::not(a.clone()), caps)?;
    let lhs_inconsistent = !consistent;
    entries.push(PostulateEntry {
        id: "T*5".into(),
        status: if lhs_inconsistent == neg_a_tautology {
            PostulateStatus::HoldsOnInstance
        } else {
            PostulateStatus::FailsOnInstance
        },
        witness: (lhs_inconsistent != neg_a_tautology).then(|| PostulateWitness {
            formula: Formula::False.to_string(),
            in_side: "the classical closure of contradictory input".into(),
            out_side: side_a.label.into(),
        }),
        note: if neg_a_tautology {
            "contradictory input is disregarded; the belief set stays consistent".into()
        } else {
            "both sides are false on this instance".into()
        },
    });

    // T*6: equivalent inputs under fresh names induce the same beliefs.
    let equivalent = a == b || entails(&[], &ax, &Formula::iff(a.clone(), b.clone()), caps)?;
    if !equivalent {
        entries.push(PostulateEntry {
            id: "T*6".into(),
            status: PostulateStatus::NotApplicable,
            witness: None,
            note: "A and B are not equivalent".into(),
        });
    } else {
        let mut witness = None;
        for q in &panel {
            let in_a = side_a.holds(q)?;
            let in_b = side_b.holds(q)?;
            if in_a != in_b {
                let (w_in, w_out) = if in_a {
                    (side_a.label, side_b.label)
                } else {
                    (side_b.label, side_a.label)
                };
                witness = Some(PostulateWitness {
                    formula: q.to_string(),
                    in_side: w_in.into(),
                    out_side: w_out.into(),
                });
                break;
            }
        }
        entries.push(PostulateEntry {
            id: "T*6".into(),
            status: if witness.is_none() {
                PostulateStatus::HoldsOnInstance
            } else {
                PostulateStatus::FailsOnInstance
            },
            witness,
            note: "A and B get the same fresh name, so the revisions coincide".into(),
        });
    }

    // T*7: Bel(T * (A & B)) within Bel(T * A) + B.
    entries.push(containment(
        "T*7",
        &panel,
        &mut side_ab,
        &mut side_a_plus_b,
        caps,
    )?);

    // T*8: if ~B is not in Bel(T * A), Bel(T * A) + B within Bel(T * (A & B)).
    if side_a.holds(&Formula::not(b.clone()))? {
        entries.push(PostulateEntry {
            id: "T*8".into(),
            status: PostulateStatus::NotApplicable,
            witness: None,
            note: "~B is in Bel(T * A); the precondition fails".into(),
        });
    } else {
        entries.push(containment(
            "T*8",
            &panel,
            &mut side_a_plus_b,
            &mut side_ab,
            caps,
        )?);
    }

    Ok(PostulateReport {
        a: a.to_string(),
        b: b.to_string(),
        entries,
    })
}

/// Pointwise containment of `inner` in `outer` over the panel.
fn containment(
    id: &str,
    panel: &[Formula],
    inner: &mut Side<'_>,
    outer: &mut Side<'_>,
    _caps: &Caps,
) -> Result<PostulateEntry, EngineError> {
    for q in panel {
        if inner.holds(q)? && !outer.holds(q)? {
            return Ok(PostulateEntry {
                id: id.into(),
                status: PostulateStatus::FailsOnInstance,
                witness: Some(PostulateWitness {
                    formula: q.to_string(),
                    in_side: inner.label.into(),
                    out_side: outer.label.into(),
                }),
                note: format!("{} is not contained in {}", inner.label, outer.label),
            });
        }
    }
    Ok(PostulateEntry {
        id: id.into(),
        status: PostulateStatus::HoldsOnInstance,
        witness: None,
        note: format!(
            "no counterexample on the {}-formula query panel",
            panel.len()
        ),
    })
}

/// The query panel: every atom of the theory and of the given formulas, each
/// with its negation, plus the probes, in canonical order.
fn query_panel(theory: &GroundTheory, extra: &[&Formula], probes: &[Formula]) -> Vec<Formula> {
    let mut atoms: std::collections::BTreeSet<Formula> = std::collections::BTreeSet::new();
    let mut visit = |f: &Formula| {
        f.visit_atoms(&mut |atom| {
            atoms.insert(atom.clone());
        });
    };
    for nf in &theory.formulas {
        visit(&nf.body);
    }
    for f in extra {
        visit(f);
    }
    let mut panel: Vec<Formula> = Vec::new();
    for atom in &atoms {
        panel.push(atom.clone());
    }
    for atom in &atoms {
        panel.push(Formula::not(atom.clone()));
    }
    for p in probes {
        panel.push(p.clone());
        panel.push(Formula::not(p.clone()));
    }
    let mut seen = std::collections::BTreeSet::new();
    panel.retain(|f| seen.insert(f.clone()));
    // canonical: by rendering
    panel.sort_by_key(|f| f.to_string());
    panel
}
