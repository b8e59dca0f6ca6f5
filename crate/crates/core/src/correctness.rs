//! Refinement, absolute and partial correctness, competence domains and
//! relative correctness between relations.
//!
//! Every judgment carries evidence that can be re-checked on its own:
//! competence domains as exact state sets, and the least violating pair or
//! state in canonical index order when the verdict is false.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::relcore::{format_tuple, Relation, StateSet};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum JudgmentKind {
    Refines,
    Correct,
    PartiallyCorrect,
    MoreCorrectDet,
    StrictlyMoreCorrectDet,
    MoreCorrectNondet,
}

impl JudgmentKind {
    pub fn name(self) -> &'static str {
        match self {
            JudgmentKind::Refines => "refines",
            JudgmentKind::Correct => "correct",
            JudgmentKind::PartiallyCorrect => "partially-correct",
            JudgmentKind::MoreCorrectDet => "more-correct-det",
            JudgmentKind::StrictlyMoreCorrectDet => "strictly-more-correct-det",
            JudgmentKind::MoreCorrectNondet => "more-correct-nondet",
        }
    }
}

impl fmt::Display for JudgmentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Why a verdict is false, as a single pair or state index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Witness {
    Pair { pair: (usize, usize), reason: String },
    State { state: usize, reason: String },
}

/// A state set used as evidence, with a label such as `dom(R∩P)`.
#[derive(Clone, Debug)]
pub struct Labeled {
    pub label: String,
    pub set: StateSet,
}

#[derive(Clone, Debug)]
pub struct Judgment {
    pub kind: JudgmentKind,
    pub verdict: bool,
    pub domains: Vec<Labeled>,
    /// `vector(dom(R∩P)) ∩ complement(R) ∩ P'` for the non-deterministic
    /// judgment.
    pub new_violations: Option<Relation>,
    pub witness: Option<Witness>,
}

impl Judgment {
    fn new(kind: JudgmentKind, verdict: bool) -> Self {
        Judgment {
            kind,
            verdict,
            domains: Vec::new(),
            new_violations: None,
            witness: None,
        }
    }

    fn with_domain(mut self, label: &str, set: StateSet) -> Self {
        self.domains.push(Labeled {
            label: label.to_string(),
            set,
        });
        self
    }

    pub fn domain(&self, label: &str) -> Option<&StateSet> {
        self.domains.iter().find(|d| d.label == label).map(|d| &d.set)
    }

    pub fn record(&self) -> JudgmentRecord {
        let space = self.domains.first().map(|d| d.set.space().clone());
        let fmt_state = |i: usize| match &space {
            Some(s) => format_tuple(&s.state_at(i)),
            None => i.to_string(),
        };
        JudgmentRecord {
            kind: self.kind,
            verdict: self.verdict,
            domains: self
                .domains
                .iter()
                .map(|d| DomainRecord {
                    label: d.label.clone(),
                    size: d.set.len(),
                })
                .collect(),
            new_violations: self.new_violations.as_ref().map(|r| {
                let sp = r.space();
                r.pairs()
                    .map(|(i, j)| format!("{} -> {}", format_tuple(&sp.state_at(i)), format_tuple(&sp.state_at(j))))
                    .collect()
            }),
            witness: self.witness.as_ref().map(|w| match w {
                Witness::Pair { pair: (i, j), reason } => WitnessRecord {
                    evidence: match &space {
                        Some(_) => format!("{} -> {}", fmt_state(*i), fmt_state(*j)),
                        None => format!("{i} -> {j}"),
                    },
                    reason: reason.clone(),
                },
                Witness::State { state, reason } => WitnessRecord {
                    evidence: fmt_state(*state),
                    reason: reason.clone(),
                },
            }),
        }
    }
}

/// Machine-readable form of a [`Judgment`]: sizes instead of sets, and
/// tuples in relation-literal syntax.
#[derive(Clone, Debug, Serialize)]
pub struct JudgmentRecord {
    pub kind: JudgmentKind,
    pub verdict: bool,
    pub domains: Vec<DomainRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub new_violations: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<WitnessRecord>,
}

#[derive(Clone, Debug, Serialize)]
pub struct DomainRecord {
    pub label: String,
    pub size: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct WitnessRecord {
    pub evidence: String,
    pub reason: String,
}

fn same_space(a: &Relation, b: &Relation) -> Result<()> {
    if a.space() == b.space() {
        Ok(())
    } else {
        Err(Error::SpaceMismatch {
            left: a.space().name().to_string(),
            right: b.space().name().to_string(),
        })
    }
}

fn least_pair(a: Option<(usize, usize)>, b: Option<(usize, usize)>) -> Option<(usize, usize)> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

/// `dom(r ∩ p)`: the states on which `p` satisfies `r`.
pub fn competence_domain(p: &Relation, r: &Relation) -> Result<StateSet> {
    same_space(p, r)?;
    Ok(r.intersection(p)?.domain())
}

/// Whether `r2` refines `r1`: `r1∘L ∩ r2∘L ∩ (r1 ∪ r2) = r1`.
pub fn refines(r2: &Relation, r1: &Relation) -> Result<Judgment> {
    same_space(r2, r1)?;
    let common = r1.domain().intersection(&r2.domain())?;
    let lhs = r1.union(r2)?.restrict_rows(&common)?;
    let extra = lhs.first_pair_not_in(r1);
    let missing = r1.first_pair_not_in(&lhs);
    let mut j = Judgment::new(JudgmentKind::Refines, extra.is_none() && missing.is_none())
        .with_domain("dom(R)", r1.domain())
        .with_domain("dom(R')", r2.domain());
    j.witness = least_pair(extra, missing).map(|pair| Witness::Pair {
        pair,
        reason: if Some(pair) == extra {
            "pair of R' outside R on the common domain".to_string()
        } else {
            "pair of R on a state outside dom(R')".to_string()
        },
    });
    Ok(j)
}

/// Absolute correctness: `p` refines `r`. For deterministic `p` this is
/// also decided as `dom(p ∩ r) = dom(r)`, and the two answers must agree.
pub fn is_correct(p: &Relation, r: &Relation) -> Result<Judgment> {
    let comp = competence_domain(p, r)?;
    let dom_r = r.domain();
    let missing = dom_r.first_not_in(&comp);
    let by_refinement = refines(p, r)?;
    if p.first_nondeterministic().is_none() && by_refinement.verdict != missing.is_none() {
        return Err(Error::Inconsistent(format!(
            "competence-domain test says {} but refinement says {}",
            missing.is_none(),
            by_refinement.verdict
        )));
    }
    let mut j = Judgment::new(JudgmentKind::Correct, by_refinement.verdict)
        .with_domain("dom(R∩P)", comp)
        .with_domain("dom(R)", dom_r);
    j.witness = match missing {
        Some(state) => Some(Witness::State {
            state,
            reason: "state of dom(R) outside the competence domain".to_string(),
        }),
        None => by_refinement.witness.map(|w| match w {
            Witness::Pair { pair, .. } => Witness::Pair {
                pair,
                reason: "P may end outside R on a state of dom(R)".to_string(),
            },
            w => w,
        }),
    };
    Ok(j)
}

/// Correct wherever `p` terminates: `p` refines `r ∩ vector(dom(p))`.
pub fn is_partially_correct(p: &Relation, r: &Relation) -> Result<Judgment> {
    same_space(p, r)?;
    let dom_p = p.domain();
    let target = r.restrict_rows(&dom_p)?;
    let inner = refines(p, &target)?;
    let mut j = Judgment::new(JudgmentKind::PartiallyCorrect, inner.verdict)
        .with_domain("dom(R∩P)", competence_domain(p, r)?)
        .with_domain("dom(P)", dom_p);
    j.witness = inner.witness.map(|w| match w {
        Witness::Pair { pair, .. } => Witness::Pair {
            pair,
            reason: "P violates R on a state where it terminates".to_string(),
        },
        w => w,
    });
    Ok(j)
}

fn require_deterministic(p: &Relation, which: &str) -> Result<()> {
    match p.first_nondeterministic() {
        None => Ok(()),
        Some(i) => Err(Error::NonDeterministic {
            which: which.to_string(),
            state: format_tuple(&p.space().state_at(i)),
        }),
    }
}

fn relative_det(p2: &Relation, p1: &Relation, r: &Relation, strict: bool) -> Result<Judgment> {
    same_space(p2, p1)?;
    require_deterministic(p1, "baseline")?;
    require_deterministic(p2, "candidate")?;
    let d1 = competence_domain(p1, r)?;
    let d2 = competence_domain(p2, r)?;
    let lost = d1.first_not_in(&d2);
    let verdict = lost.is_none() && (!strict || d2.len() > d1.len());
    let kind = if strict {
        JudgmentKind::StrictlyMoreCorrectDet
    } else {
        JudgmentKind::MoreCorrectDet
    };
    let mut j = Judgment::new(kind, verdict)
        .with_domain("dom(R∩P)", d1)
        .with_domain("dom(R∩P')", d2);
    j.witness = lost.map(|state| Witness::State {
        state,
        reason: "baseline is competent here, candidate is not".to_string(),
    });
    Ok(j)
}

/// Deterministic relative correctness: `dom(R∩P') ⊇ dom(R∩P)`.
pub fn more_correct_det(p2: &Relation, p1: &Relation, r: &Relation) -> Result<Judgment> {
    relative_det(p2, p1, r, false)
}

/// Strict inclusion of competence domains.
pub fn strictly_more_correct_det(p2: &Relation, p1: &Relation, r: &Relation) -> Result<Judgment> {
    relative_det(p2, p1, r, true)
}

/// Relative correctness for arbitrary relations: competence-domain
/// inclusion, and on the baseline's competence domain every pair of `p2`
/// outside `r` is already a pair of `p1`.
pub fn more_correct_nondet(p2: &Relation, p1: &Relation, r: &Relation) -> Result<Judgment> {
    same_space(p2, p1)?;
    let d1 = competence_domain(p1, r)?;
    let d2 = competence_domain(p2, r)?;
    let lost = d1.first_not_in(&d2);
    let new_violations = p2.difference(r)?.restrict_rows(&d1)?;
    let fresh = new_violations.first_pair_not_in(p1);
    let mut j = Judgment::new(JudgmentKind::MoreCorrectNondet, lost.is_none() && fresh.is_none())
        .with_domain("dom(R∩P)", d1)
        .with_domain("dom(R∩P')", d2);
    j.new_violations = Some(new_violations);
    j.witness = match (lost, fresh) {
        (Some(state), _) => Some(Witness::State {
            state,
            reason: "baseline is competent here, candidate is not".to_string(),
        }),
        (None, Some(pair)) => Some(Witness::Pair {
            pair,
            reason: "candidate adds a violation of R on the baseline's competence domain".to_string(),
        }),
        (None, None) => None,
    };
    Ok(j)
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::relcore::{StateSpace, VarDecl};

    fn line(n: i64) -> Arc<StateSpace> {
        StateSpace::new("s", vec![VarDecl::new("s", 0, n - 1)])
            .unwrap()
            .shared()
    }

    fn rel(sp: &Arc<StateSpace>, pairs: &[(usize, usize)]) -> Relation {
        Relation::from_pairs(sp.clone(), pairs.iter().copied()).unwrap()
    }

    #[test]
    fn refinement_witness_is_least_pair() {
        let s = line(4);
        let r = rel(&s, &[(1, 0), (1, 1), (2, 2)]);
        let narrower = rel(&s, &[(1, 1), (2, 2), (3, 0)]);
        assert!(refines(&narrower, &r).unwrap().verdict);
        let j = refines(&rel(&s, &[(1, 3), (2, 2)]), &r).unwrap();
        assert!(!j.verdict);
        assert_eq!(
            j.witness,
            Some(Witness::Pair {
                pair: (1, 3),
                reason: "pair of R' outside R on the common domain".into()
            })
        );
        let j = refines(&rel(&s, &[(1, 1)]), &r).unwrap();
        assert!(matches!(j.witness, Some(Witness::Pair { pair: (2, 2), .. })));
    }

    #[test]
    fn abort_is_partially_but_not_totally_correct() {
        let s = line(3);
        let r = rel(&s, &[(0, 1)]);
        let abort = Relation::empty(s.clone());
        assert!(!is_correct(&abort, &r).unwrap().verdict);
        assert!(is_partially_correct(&abort, &r).unwrap().verdict);
        assert!(competence_domain(&abort, &r).unwrap().is_empty());
    }

    #[test]
    fn nondeterministic_arguments_are_rejected() {
        let s = line(3);
        let p = rel(&s, &[(0, 1), (0, 2)]);
        let err = more_correct_det(&p, &p, &Relation::universal(s.clone())).unwrap_err();
        assert!(matches!(err, Error::NonDeterministic { .. }), "{err}");
        assert!(more_correct_nondet(&p, &p, &Relation::universal(s)).unwrap().verdict);
    }

    #[test]
    fn strictness_needs_a_larger_domain() {
        let s = line(3);
        let r = rel(&s, &[(0, 0), (1, 1)]);
        let p = rel(&s, &[(0, 0), (1, 0)]);
        let q = rel(&s, &[(0, 0), (1, 1)]);
        assert!(more_correct_det(&p, &p, &r).unwrap().verdict);
        assert!(!strictly_more_correct_det(&p, &p, &r).unwrap().verdict);
        assert!(strictly_more_correct_det(&q, &p, &r).unwrap().verdict);
    }

    #[test]
    fn record_renders_tuples() {
        let s = line(4);
        let j = refines(&rel(&s, &[(1, 3)]), &rel(&s, &[(1, 0)])).unwrap();
        let rec = j.record();
        assert_eq!(rec.witness.unwrap().evidence, "(1) -> (3)");
        assert_eq!(rec.domains[0].size, 1);
    }

    #[test]
    fn refinement_can_lose_competence_when_nondeterministic() {
        let s = line(2);
        let p = rel(&s, &[(1, 0), (1, 1)]);
        let q = rel(&s, &[(1, 1)]);
        let r = rel(&s, &[(1, 0)]);
        assert!(refines(&q, &p).unwrap().verdict);
        let j = more_correct_nondet(&q, &p, &r).unwrap();
        assert!(!j.verdict);
        assert!(matches!(j.witness, Some(Witness::State { state: 1, .. })));
    }

    #[test]
    fn nondeterministic_program_with_one_bad_outcome_is_not_correct() {
        let s = line(2);
        let p = rel(&s, &[(1, 0), (1, 1)]);
        let r = rel(&s, &[(1, 0)]);
        let j = is_correct(&p, &r).unwrap();
        assert!(!j.verdict);
        assert!(matches!(j.witness, Some(Witness::Pair { pair: (1, 1), .. })));
        assert!(is_correct(&rel(&s, &[(1, 0)]), &r).unwrap().verdict);
    }

    #[test]
    fn space_mismatch_is_an_error() {
        let a = Relation::empty(line(3));
        let b = Relation::empty(line(4));
        assert!(matches!(refines(&a, &b), Err(Error::SpaceMismatch { .. })));
    }
}
