//! Per-count record of a tabulation and its JSON file form.

use serde::{Deserialize, Serialize};

use crate::data::CandidateId;
use crate::engine::Quota;
use crate::value::{Value, ValueRepr};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CandidateStatus {
    Continuing,
    Elected,
    Excluded,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ActionKind {
    FirstPreferences,
    SurplusDistribution(CandidateId),
    Exclusion(CandidateId),
    /// Remaining continuing candidates fill the remaining vacancies.
    Declaration,
}

impl ActionKind {
    pub fn candidate(&self) -> Option<CandidateId> {
        match *self {
            ActionKind::SurplusDistribution(c) | ActionKind::Exclusion(c) => Some(c),
            ActionKind::FirstPreferences | ActionKind::Declaration => None,
        }
    }

    fn label(&self) -> &'static str {
        match self {
            ActionKind::FirstPreferences => "first-preferences",
            ActionKind::SurplusDistribution(_) => "surplus-distribution",
            ActionKind::Exclusion(_) => "exclusion",
            ActionKind::Declaration => "declaration",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountAction {
    pub kind: ActionKind,
    /// Set only for surplus distributions.
    pub transfer_value: Option<Value>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountRecord {
    /// 1-based count number.
    pub index: usize,
    pub action: CountAction,
    /// Tally of every candidate by id, zero for excluded candidates.
    pub tallies: Vec<Value>,
    /// Cumulative exhausted value.
    pub exhausted: Value,
    /// Cumulative rounding loss.
    pub rounding_loss: Value,
    pub newly_elected: Vec<CandidateId>,
    pub newly_excluded: Vec<CandidateId>,
    pub tie_events: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Elected {
    pub candidate: CandidateId,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transcript {
    pub election: String,
    pub candidates: Vec<String>,
    pub vacancies: usize,
    pub rules: String,
    pub formal_papers: u64,
    pub informal_papers: u64,
    pub quota: Quota,
    pub counts: Vec<CountRecord>,
    /// In order of election.
    pub elected: Vec<Elected>,
    pub exhausted_final: Value,
}

impl Transcript {
    pub fn winners(&self) -> Vec<CandidateId> {
        self.elected.iter().map(|e| e.candidate).collect()
    }

    pub fn last_count(&self) -> usize {
        self.counts.len()
    }

    pub fn count(&self, index: usize) -> &CountRecord {
        &self.counts[index - 1]
    }

    /// Candidate statuses at the end of count `index`.
    pub fn statuses_after(&self, index: usize) -> Vec<CandidateStatus> {
        let mut status = vec![CandidateStatus::Continuing; self.candidates.len()];
        for record in &self.counts[..index] {
            for c in &record.newly_elected {
                status[c.0] = CandidateStatus::Elected;
            }
            for c in &record.newly_excluded {
                status[c.0] = CandidateStatus::Excluded;
            }
        }
        status
    }

    /// Statuses in force while count `index` is performed, i.e. at the end
    /// of the previous count.
    pub fn statuses_before(&self, index: usize) -> Vec<CandidateStatus> {
        self.statuses_after(index - 1)
    }

    pub fn to_json(&self) -> String {
        let repr = TranscriptRepr::from(self);
        let mut s = serde_json::to_string_pretty(&repr).expect("transcripts always serialize");
        s.push('\n');
        s
    }

    pub fn from_json(s: &str) -> Result<Self, TranscriptFormatError> {
        let repr: TranscriptRepr = serde_json::from_str(s)?;
        repr.try_into()
    }
}

#[derive(Debug, thiserror::Error)]
pub enum TranscriptFormatError {
    #[error("malformed transcript: {0}")]
    Syntax(#[from] serde_json::Error),
    #[error("malformed transcript: {0}")]
    Invalid(String),
}

#[derive(Serialize, Deserialize)]
struct TranscriptRepr {
    election: String,
    rules: String,
    vacancies: usize,
    candidates: Vec<String>,
    formal_papers: u64,
    informal_papers: u64,
    quota: ValueRepr,
    counts: Vec<CountRepr>,
    elected: Vec<ElectedRepr>,
    exhausted_final: ValueRepr,
}

#[derive(Serialize, Deserialize)]
struct CountRepr {
    index: usize,
    action: String,
    candidate: Option<usize>,
    transfer_value: Option<ValueRepr>,
    tallies: Vec<ValueRepr>,
    exhausted: ValueRepr,
    rounding_loss: ValueRepr,
    newly_elected: Vec<usize>,
    newly_excluded: Vec<usize>,
    tie_events: Vec<String>,
}

#[derive(Serialize, Deserialize)]
struct ElectedRepr {
    candidate: usize,
    name: String,
    count: usize,
}

fn ids(v: &[CandidateId]) -> Vec<usize> {
    v.iter().map(|c| c.0).collect()
}

impl From<&Transcript> for TranscriptRepr {
    fn from(t: &Transcript) -> Self {
        TranscriptRepr {
            election: t.election.clone(),
            rules: t.rules.clone(),
            vacancies: t.vacancies,
            candidates: t.candidates.clone(),
            formal_papers: t.formal_papers,
            informal_papers: t.informal_papers,
            quota: ValueRepr::fixed(t.quota.value()),
            counts: t
                .counts
                .iter()
                .map(|c| CountRepr {
                    index: c.index,
                    action: c.action.kind.label().to_string(),
                    candidate: c.action.kind.candidate().map(|c| c.0),
                    transfer_value: c.action.transfer_value.as_ref().map(ValueRepr::fixed),
                    tallies: c.tallies.iter().map(ValueRepr::fixed).collect(),
                    exhausted: ValueRepr::fixed(&c.exhausted),
                    rounding_loss: ValueRepr::fixed(&c.rounding_loss),
                    newly_elected: ids(&c.newly_elected),
                    newly_excluded: ids(&c.newly_excluded),
                    tie_events: c.tie_events.clone(),
                })
                .collect(),
            elected: t
                .elected
                .iter()
                .map(|e| ElectedRepr {
                    candidate: e.candidate.0,
                    name: t.candidates[e.candidate.0].clone(),
                    count: e.count,
                })
                .collect(),
            exhausted_final: ValueRepr::fixed(&t.exhausted_final),
        }
    }
}

fn exact(v: &ValueRepr) -> Result<Value, TranscriptFormatError> {
    v.to_value()
        .ok_or_else(|| TranscriptFormatError::Invalid(format!("bad value {}/{}", v.num, v.den)))
}

fn to_ids(v: Vec<usize>) -> Vec<CandidateId> {
    v.into_iter().map(CandidateId).collect()
}

impl TryFrom<TranscriptRepr> for Transcript {
    type Error = TranscriptFormatError;

    fn try_from(r: TranscriptRepr) -> Result<Self, Self::Error> {
        let mut counts = Vec::with_capacity(r.counts.len());
        for c in r.counts {
            let candidate = || {
                c.candidate.map(CandidateId).ok_or_else(|| {
                    TranscriptFormatError::Invalid(format!("count {} lacks a candidate", c.index))
                })
            };
            let kind = match c.action.as_str() {
                "first-preferences" => ActionKind::FirstPreferences,
                "surplus-distribution" => ActionKind::SurplusDistribution(candidate()?),
                "exclusion" => ActionKind::Exclusion(candidate()?),
                "declaration" => ActionKind::Declaration,
                other => {
                    return Err(TranscriptFormatError::Invalid(format!(
                        "unknown action {other:?}"
                    )))
                }
            };
            counts.push(CountRecord {
                index: c.index,
                action: CountAction {
                    kind,
                    transfer_value: c.transfer_value.as_ref().map(exact).transpose()?,
                },
                tallies: c.tallies.iter().map(exact).collect::<Result<_, _>>()?,
                exhausted: exact(&c.exhausted)?,
                rounding_loss: exact(&c.rounding_loss)?,
                newly_elected: to_ids(c.newly_elected),
                newly_excluded: to_ids(c.newly_excluded),
                tie_events: c.tie_events,
            });
        }
        Ok(Transcript {
            election: r.election,
            candidates: r.candidates,
            vacancies: r.vacancies,
            rules: r.rules,
            formal_papers: r.formal_papers,
            informal_papers: r.informal_papers,
            quota: Quota::from_value(exact(&r.quota)?),
            counts,
            elected: r
                .elected
                .into_iter()
                .map(|e| Elected {
                    candidate: CandidateId(e.candidate),
                    count: e.count,
                })
                .collect(),
            exhausted_final: exact(&r.exhausted_final)?,
        })
    }
}
