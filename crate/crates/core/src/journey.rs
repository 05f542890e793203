//! Follows one hypothetical ballot through a count and measures what it
//! did to every candidate's tally.
//!
//! A ballot's contribution is counterfactual: the election is counted once
//! as it was and once with the ballot added, and the two transcripts are
//! compared count by count. Adding a paper raises the quota and dilutes
//! inclusive Gregory transfer values for everyone else's papers, so a
//! contribution can be negative even for a candidate the ballot ranks.

use std::collections::{BTreeMap, HashSet};

use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::data::{check_preferences, is_formal, Ballot, CandidateId, ElectionData, Problem};
use crate::engine::{tabulate, tabulate_tracking, CountError, Holder, PaperMove};
use crate::rules::RuleSet;
use crate::transcript::{ActionKind, CandidateStatus, Transcript};
use crate::value::{Value, ValueRepr};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum JourneyError {
    #[error("invalid ballot: {0}")]
    InvalidBallot(Problem),
    #[error("below minimum preferences: ballot has {given}, rules require {required}")]
    Informal { given: usize, required: usize },
    #[error("transcripts come from different rule sets ({baseline:?} and {augmented:?})")]
    RuleSetMismatch { baseline: String, augmented: String },
    #[error(transparent)]
    Count(#[from] CountError),
}

/// A single structurally valid paper entered by a user.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HypotheticalBallot {
    preferences: Vec<CandidateId>,
}

impl HypotheticalBallot {
    pub fn new(preferences: Vec<CandidateId>, data: &ElectionData) -> Result<Self, JourneyError> {
        check_preferences(&preferences, data.num_candidates())
            .map_err(JourneyError::InvalidBallot)?;
        Ok(HypotheticalBallot { preferences })
    }

    pub fn preferences(&self) -> &[CandidateId] {
        &self.preferences
    }

    pub fn check_formal(&self, rules: &RuleSet) -> Result<(), JourneyError> {
        if is_formal(&self.preferences, rules) {
            Ok(())
        } else {
            Err(JourneyError::Informal {
                given: self.preferences.len(),
                required: rules.min_preferences,
            })
        }
    }
}

/// The election with `ballot` added as one extra paper, plus the index of
/// its ballot entry.
pub fn augment(
    data: &ElectionData,
    ballot: &HypotheticalBallot,
    rules: &RuleSet,
) -> Result<(ElectionData, usize), JourneyError> {
    ballot.check_formal(rules)?;
    data.with_extra_ballot(Ballot::single(ballot.preferences.clone()))
        .map_err(|e| {
            JourneyError::InvalidBallot(e.problem().cloned().unwrap_or(Problem::EmptyPreferences))
        })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LegEnd {
    /// The holder was elected and the paper left with their surplus.
    HolderElected,
    HolderExcluded,
    /// Counting stopped with the paper still held.
    CountEnded,
    /// The paper had no continuing preference left.
    BallotExhausted,
}

/// A stretch of counts during which the paper sat with one holder at one
/// value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JourneyLeg {
    pub holder: Holder,
    pub value: Value,
    pub from_count: usize,
    pub to_count: usize,
    pub end_reason: LegEnd,
}

/// Turns the moves of a tracked paper into legs covering counts 1 through
/// the last count of `transcript`. A leg ends the count before the paper
/// arrives somewhere else.
pub fn trace_legs(moves: &[PaperMove], transcript: &Transcript) -> Vec<JourneyLeg> {
    let last = transcript.last_count();
    moves
        .iter()
        .enumerate()
        .map(|(i, m)| {
            let (to_count, end_reason) = match moves.get(i + 1) {
                Some(next) => {
                    let reason = match transcript.count(next.count).action.kind {
                        ActionKind::SurplusDistribution(_) => LegEnd::HolderElected,
                        ActionKind::Exclusion(_) => LegEnd::HolderExcluded,
                        kind => unreachable!("papers never move during {kind:?}"),
                    };
                    (next.count - 1, reason)
                }
                None if m.holder == Holder::Exhausted => (last, LegEnd::BallotExhausted),
                None => (last, LegEnd::CountEnded),
            };
            JourneyLeg {
                holder: m.holder,
                value: m.value.clone(),
                from_count: m.count,
                to_count,
                end_reason,
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContributionRecord {
    pub candidate: CandidateId,
    /// Augmented minus baseline tally at each aligned count.
    pub per_count_delta: BTreeMap<usize, Value>,
    /// Delta at the last aligned count where the candidate was still
    /// continuing or had just been elected.
    pub final_delta: Value,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Contributions {
    pub records: Vec<ContributionRecord>,
    pub outcome_changed: bool,
    /// First count at which the two transcripts stop performing the same
    /// action, if they do.
    pub divergence_count: Option<usize>,
}

/// Compares two counts of the same election, aligning them while each
/// count performs the same action on the same candidate.
pub fn contributions(
    baseline: &Transcript,
    augmented: &Transcript,
) -> Result<Contributions, JourneyError> {
    if baseline.rules != augmented.rules {
        return Err(JourneyError::RuleSetMismatch {
            baseline: baseline.rules.clone(),
            augmented: augmented.rules.clone(),
        });
    }
    let common = baseline.counts.len().min(augmented.counts.len());
    let aligned = (0..common)
        .take_while(|&i| baseline.counts[i].action.kind == augmented.counts[i].action.kind)
        .count();
    let divergence_count =
        (aligned < baseline.counts.len().max(augmented.counts.len())).then_some(aligned + 1);

    let n = augmented.candidates.len();
    let mut records: Vec<ContributionRecord> = (0..n)
        .map(|c| ContributionRecord {
            candidate: CandidateId(c),
            per_count_delta: BTreeMap::new(),
            final_delta: Value::zero(),
        })
        .collect();
    let mut status = vec![CandidateStatus::Continuing; n];
    for i in 0..aligned {
        let (base, aug) = (&baseline.counts[i], &augmented.counts[i]);
        for c in &aug.newly_elected {
            status[c.0] = CandidateStatus::Elected;
        }
        for c in &aug.newly_excluded {
            status[c.0] = CandidateStatus::Excluded;
        }
        for (c, record) in records.iter_mut().enumerate() {
            let delta = &aug.tallies[c] - &base.tallies[c];
            let live = status[c] == CandidateStatus::Continuing
                || aug.newly_elected.contains(&CandidateId(c));
            if live {
                record.final_delta = delta.clone();
            }
            record.per_count_delta.insert(aug.index, delta);
        }
    }

    let baseline_elected: HashSet<CandidateId> = baseline.winners().into_iter().collect();
    let augmented_elected: HashSet<CandidateId> = augmented.winners().into_iter().collect();
    Ok(Contributions {
        records,
        outcome_changed: divergence_count.is_some() || baseline_elected != augmented_elected,
        divergence_count,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JourneyReport {
    pub election: String,
    pub rules: String,
    pub candidates: Vec<String>,
    pub ballot: Vec<CandidateId>,
    pub legs: Vec<JourneyLeg>,
    pub contributions: Vec<ContributionRecord>,
    pub outcome_changed: bool,
    pub divergence_count: Option<usize>,
    pub baseline_elected: Vec<CandidateId>,
    pub augmented_elected: Vec<CandidateId>,
}

/// Counts the election with and without `ballot` and reports the ballot's
/// journey and contributions.
pub fn trace_journey(
    data: &ElectionData,
    ballot: &HypotheticalBallot,
    rules: &RuleSet,
) -> Result<JourneyReport, JourneyError> {
    ballot.check_formal(rules)?;
    let (augmented, index) = augment(data, ballot, rules)?;
    let (baseline, tracked) = std::thread::scope(|s| {
        let base = s.spawn(|| tabulate(data, rules));
        let tracked = tabulate_tracking(&augmented, rules, Some(index));
        (base.join().expect("baseline count panicked"), tracked)
    });
    let baseline = baseline?;
    let (augmented, moves) = tracked?;
    assemble(ballot, &baseline, &augmented, &moves)
}

/// As [`trace_journey`], reusing an already computed baseline transcript.
pub fn trace_journey_with_baseline(
    data: &ElectionData,
    baseline: &Transcript,
    ballot: &HypotheticalBallot,
    rules: &RuleSet,
) -> Result<JourneyReport, JourneyError> {
    let (augmented, index) = augment(data, ballot, rules)?;
    let (augmented, moves) = tabulate_tracking(&augmented, rules, Some(index))?;
    assemble(ballot, baseline, &augmented, &moves)
}

fn assemble(
    ballot: &HypotheticalBallot,
    baseline: &Transcript,
    augmented: &Transcript,
    moves: &[PaperMove],
) -> Result<JourneyReport, JourneyError> {
    let contributions = contributions(baseline, augmented)?;
    Ok(JourneyReport {
        election: augmented.election.clone(),
        rules: augmented.rules.clone(),
        candidates: augmented.candidates.clone(),
        ballot: ballot.preferences.clone(),
        legs: trace_legs(moves, augmented),
        contributions: contributions.records,
        outcome_changed: contributions.outcome_changed,
        divergence_count: contributions.divergence_count,
        baseline_elected: baseline.winners(),
        augmented_elected: augmented.winners(),
    })
}

#[derive(Serialize, Deserialize)]
struct ReportRepr {
    election: String,
    rules: String,
    ballot: Vec<usize>,
    legs: Vec<LegRepr>,
    contributions: Vec<ContributionRepr>,
    outcome_changed: bool,
    divergence_count: Option<usize>,
    baseline_elected: Vec<usize>,
    augmented_elected: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct LegRepr {
    /// Candidate id, or null once exhausted.
    holder: Option<usize>,
    holder_name: String,
    value: ValueRepr,
    from: usize,
    to: usize,
    reason: LegEnd,
}

#[derive(Serialize, Deserialize)]
struct ContributionRepr {
    candidate: usize,
    name: String,
    per_count: Vec<DeltaRepr>,
    final_delta: ValueRepr,
}

#[derive(Serialize, Deserialize)]
struct DeltaRepr {
    count: usize,
    delta: ValueRepr,
}

impl JourneyReport {
    pub fn holder_name(&self, holder: Holder) -> &str {
        match holder {
            Holder::Candidate(c) => &self.candidates[c.0],
            Holder::Exhausted => "exhausted",
        }
    }

    pub fn contribution(&self, c: CandidateId) -> &ContributionRecord {
        &self.contributions[c.0]
    }

    pub fn to_json(&self) -> String {
        let ids = |v: &[CandidateId]| v.iter().map(|c| c.0).collect::<Vec<_>>();
        let repr = ReportRepr {
            election: self.election.clone(),
            rules: self.rules.clone(),
            ballot: ids(&self.ballot),
            legs: self
                .legs
                .iter()
                .map(|l| LegRepr {
                    holder: match l.holder {
                        Holder::Candidate(c) => Some(c.0),
                        Holder::Exhausted => None,
                    },
                    holder_name: self.holder_name(l.holder).to_string(),
                    value: ValueRepr::significant(&l.value),
                    from: l.from_count,
                    to: l.to_count,
                    reason: l.end_reason,
                })
                .collect(),
            contributions: self
                .contributions
                .iter()
                .map(|c| ContributionRepr {
                    candidate: c.candidate.0,
                    name: self.candidates[c.candidate.0].clone(),
                    per_count: c
                        .per_count_delta
                        .iter()
                        .map(|(&count, d)| DeltaRepr {
                            count,
                            delta: ValueRepr::significant(d),
                        })
                        .collect(),
                    final_delta: ValueRepr::significant(&c.final_delta),
                })
                .collect(),
            outcome_changed: self.outcome_changed,
            divergence_count: self.divergence_count,
            baseline_elected: ids(&self.baseline_elected),
            augmented_elected: ids(&self.augmented_elected),
        };
        let mut s = serde_json::to_string_pretty(&repr).expect("reports always serialize");
        s.push('\n');
        s
    }
}
