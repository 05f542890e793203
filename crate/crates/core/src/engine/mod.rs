//! The STV count.
//!
//! A count starts by placing every formal paper with its first preference.
//! It then repeats: elect everyone at or above quota, stop if the seats are
//! filled (or declare the remaining continuing candidates if exactly enough
//! are left), otherwise distribute the oldest pending surplus, or exclude
//! the lowest continuing candidate when no surplus is pending. Each
//! distribution or exclusion is one count in the transcript.
//!
//! Arithmetic is exact throughout; rounding only happens when the rule set
//! asks for tallies truncated to whole votes.

mod quota;
mod tie;

use std::collections::{HashMap, VecDeque};

use num_traits::{One, Zero};
use thiserror::Error;

use crate::data::{is_formal, CandidateId, ElectionData};
use crate::rules::{Rounding, RuleSet, SurplusMethod};
use crate::transcript::{
    ActionKind, CandidateStatus, CountAction, CountRecord, Elected, Transcript,
};
use crate::value::{from_int, Value};

pub use quota::{compute_quota, Quota};
pub use tie::{break_tie, TieBreak, TieOutcome};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CountError {
    #[error("no formal votes to count")]
    NoFormalVotes,
    #[error("no vacancies to fill")]
    NoVacancies,
    #[error("invalid rule set {0:?}: min_preferences must be at least 1")]
    InvalidRules(String),
    #[error("malformed election: {remaining} vacancies remain but only {continuing} candidates continue")]
    Malformed { remaining: usize, continuing: usize },
    #[error("candidate {0} has no surplus to distribute")]
    NoSurplus(CandidateId),
    #[error("tracked ballot index {0} out of range")]
    UnknownBallot(usize),
}

/// Who holds a paper.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Holder {
    Candidate(CandidateId),
    Exhausted,
}

/// A tracked paper arriving with a new holder at the given count.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PaperMove {
    pub count: usize,
    pub holder: Holder,
    pub value: Value,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    Continue,
    AllVacanciesFilled,
    /// As many continuing candidates as unfilled vacancies.
    DeclareRemaining,
}

/// Papers of one ballot entry; `cursor` indexes the preference of the
/// current holder.
#[derive(Debug, Clone)]
struct Paper {
    ballot: usize,
    cursor: usize,
}

/// Papers that arrived together at the same value.
#[derive(Debug, Clone)]
struct Parcel {
    value: Value,
    papers: Vec<Paper>,
    /// Number of physical papers, counting multiplicity.
    count: u64,
}

impl Parcel {
    fn total(&self) -> Value {
        &self.value * from_int(self.count)
    }
}

/// Mutable state of one count in progress.
pub struct CountState<'a> {
    data: &'a ElectionData,
    rules: &'a RuleSet,
    quota: Quota,
    formal_papers: u64,
    informal_papers: u64,
    status: Vec<CandidateStatus>,
    tallies: Vec<Value>,
    piles: Vec<Vec<Parcel>>,
    exhausted: Value,
    rounding_loss: Value,
    pending_surpluses: VecDeque<CandidateId>,
    elected: Vec<Elected>,
    counts: Vec<CountRecord>,
    tracked: Option<usize>,
    moves: Vec<PaperMove>,
}

impl<'a> CountState<'a> {
    /// Filters informal ballots and computes the quota from the formal
    /// papers.
    pub fn new(data: &'a ElectionData, rules: &'a RuleSet) -> Result<Self, CountError> {
        if !rules.is_valid() {
            return Err(CountError::InvalidRules(rules.name.clone()));
        }
        let (formal, informal): (Vec<_>, Vec<_>) = data
            .ballots()
            .iter()
            .partition(|b| is_formal(&b.preferences, rules));
        let formal_papers: u64 = formal.iter().map(|b| b.multiplicity).sum();
        let informal_papers: u64 = informal.iter().map(|b| b.multiplicity).sum();
        let quota = compute_quota(formal_papers, data.vacancies())?;
        let n = data.num_candidates();
        Ok(CountState {
            data,
            rules,
            quota,
            formal_papers,
            informal_papers,
            status: vec![CandidateStatus::Continuing; n],
            tallies: vec![Value::zero(); n],
            piles: vec![Vec::new(); n],
            exhausted: Value::zero(),
            rounding_loss: Value::zero(),
            pending_surpluses: VecDeque::new(),
            elected: Vec::new(),
            counts: Vec::new(),
            tracked: None,
            moves: Vec::new(),
        })
    }

    /// Records every move of the papers of ballot entry `ballot`.
    pub fn track(&mut self, ballot: usize) -> Result<(), CountError> {
        if ballot >= self.data.ballots().len() {
            return Err(CountError::UnknownBallot(ballot));
        }
        self.tracked = Some(ballot);
        Ok(())
    }

    pub fn quota(&self) -> &Quota {
        &self.quota
    }

    pub fn tallies(&self) -> &[Value] {
        &self.tallies
    }

    pub fn status(&self, c: CandidateId) -> CandidateStatus {
        self.status[c.0]
    }

    pub fn counts(&self) -> &[CountRecord] {
        &self.counts
    }

    fn continuing(&self) -> impl Iterator<Item = CandidateId> + '_ {
        self.status
            .iter()
            .enumerate()
            .filter(|(_, s)| **s == CandidateStatus::Continuing)
            .map(|(i, _)| CandidateId(i))
    }

    fn push_record(&mut self, kind: ActionKind, transfer_value: Option<Value>) -> usize {
        let index = self.counts.len() + 1;
        self.counts.push(CountRecord {
            index,
            action: CountAction {
                kind,
                transfer_value,
            },
            tallies: self.tallies.clone(),
            exhausted: self.exhausted.clone(),
            rounding_loss: self.rounding_loss.clone(),
            newly_elected: Vec::new(),
            newly_excluded: Vec::new(),
            tie_events: Vec::new(),
        });
        index
    }

    fn current(&mut self) -> &mut CountRecord {
        self.counts
            .last_mut()
            .expect("first preferences not distributed yet")
    }

    /// Count 1: every formal paper goes to its first preference at full
    /// value.
    pub fn distribute_first_preferences(&mut self) -> &CountRecord {
        assert!(
            self.counts.is_empty(),
            "first preferences already distributed"
        );
        let mut parcels: Vec<Option<Parcel>> = vec![None; self.data.num_candidates()];
        for (i, ballot) in self.data.ballots().iter().enumerate() {
            if !is_formal(&ballot.preferences, self.rules) {
                continue;
            }
            let first = ballot.preferences[0];
            let parcel = parcels[first.0].get_or_insert_with(|| Parcel {
                value: Value::one(),
                papers: Vec::new(),
                count: 0,
            });
            parcel.papers.push(Paper {
                ballot: i,
                cursor: 0,
            });
            parcel.count += ballot.multiplicity;
            self.tallies[first.0] += from_int(ballot.multiplicity);
            if self.tracked == Some(i) {
                self.moves.push(PaperMove {
                    count: 1,
                    holder: Holder::Candidate(first),
                    value: Value::one(),
                });
            }
        }
        for (c, parcel) in parcels.into_iter().enumerate() {
            if let Some(p) = parcel {
                self.piles[c].push(p);
            }
        }
        self.push_record(ActionKind::FirstPreferences, None);
        self.current()
    }

    /// Orders `candidates` by descending tally; equal tallies are ordered
    /// by repeated countback.
    fn order_by_tally(&mut self, mut candidates: Vec<CandidateId>) -> Vec<CandidateId> {
        candidates.sort_by(|a, b| self.tallies[b.0].cmp(&self.tallies[a.0]).then(a.cmp(b)));
        let mut ordered = Vec::with_capacity(candidates.len());
        let mut events = Vec::new();
        let mut i = 0;
        while i < candidates.len() {
            let mut j = i + 1;
            while j < candidates.len()
                && self.tallies[candidates[j].0] == self.tallies[candidates[i].0]
            {
                j += 1;
            }
            let mut tied: Vec<CandidateId> = candidates[i..j].to_vec();
            while tied.len() > 1 {
                let out = break_tie(&tied, &self.counts, TieBreak::ElectionOrder);
                tied.retain(|c| *c != out.chosen);
                ordered.push(out.chosen);
                events.push(out.event);
            }
            ordered.extend(tied);
            i = j;
        }
        self.current().tie_events.extend(events);
        ordered
    }

    fn mark_elected(&mut self, c: CandidateId) {
        let count = self.counts.len();
        self.status[c.0] = CandidateStatus::Elected;
        self.elected.push(Elected {
            candidate: c,
            count,
        });
        self.current().newly_elected.push(c);
    }

    /// Elects every continuing candidate at or above quota, in descending
    /// tally order, and queues the ones with a surplus.
    pub fn elect_meeting_quota(&mut self) -> Vec<CandidateId> {
        let reaching: Vec<CandidateId> = self
            .continuing()
            .filter(|c| self.tallies[c.0] >= *self.quota.value())
            .collect();
        if reaching.is_empty() {
            return reaching;
        }
        let mut ordered = self.order_by_tally(reaching);
        ordered.truncate(self.data.vacancies() - self.elected.len());
        for &c in &ordered {
            self.mark_elected(c);
            if self.tallies[c.0] > *self.quota.value() {
                self.pending_surpluses.push_back(c);
            }
        }
        ordered
    }

    pub fn check_termination(&self) -> Result<Termination, CountError> {
        let remaining = self.data.vacancies() - self.elected.len();
        if remaining == 0 {
            return Ok(Termination::AllVacanciesFilled);
        }
        let continuing = self.continuing().count();
        match continuing.cmp(&remaining) {
            std::cmp::Ordering::Less => Err(CountError::Malformed {
                remaining,
                continuing,
            }),
            std::cmp::Ordering::Equal => Ok(Termination::DeclareRemaining),
            std::cmp::Ordering::Greater => Ok(Termination::Continue),
        }
    }

    /// Oldest elected candidate whose surplus has not been distributed.
    pub fn next_pending_surplus(&mut self) -> Option<CandidateId> {
        self.pending_surpluses.pop_front()
    }

    /// Elects all continuing candidates, highest tally first, as a count of
    /// its own.
    pub fn declare_remaining(&mut self) -> &CountRecord {
        self.push_record(ActionKind::Declaration, None);
        let continuing: Vec<CandidateId> = self.continuing().collect();
        for c in self.order_by_tally(continuing) {
            self.mark_elected(c);
        }
        self.current()
    }

    /// Next continuing preference at or after `from` on ballot `ballot`.
    fn next_continuing(&self, ballot: usize, from: usize) -> Option<(CandidateId, usize)> {
        let prefs = &self.data.ballots()[ballot].preferences;
        prefs[from..]
            .iter()
            .enumerate()
            .find(|(_, c)| self.status[c.0] == CandidateStatus::Continuing)
            .map(|(k, c)| (*c, from + k))
    }

    /// Moves `parcels` to each paper's next continuing preference. Each
    /// source parcel travels at `value_of(parcel)`. `leaving` is the value
    /// removed from the source candidate's tally; whatever is not credited
    /// to candidates or the exhausted total is booked as rounding loss.
    fn transfer(
        &mut self,
        parcels: Vec<Parcel>,
        value_of: impl Fn(&Parcel) -> Value,
        leaving: Value,
    ) {
        let count_index = self.counts.len() + 1;
        let mut increments: Vec<Value> = vec![Value::zero(); self.data.num_candidates()];
        let mut exhausted_increment = Value::zero();
        // (destination, value) -> index of the parcel created in this count
        let mut created: HashMap<(CandidateId, Value), usize> = HashMap::new();

        for parcel in parcels {
            let value = value_of(&parcel);
            for paper in parcel.papers {
                let multiplicity = self.data.ballots()[paper.ballot].multiplicity;
                let amount = &value * from_int(multiplicity);
                let next = self.next_continuing(paper.ballot, paper.cursor + 1);
                if self.tracked == Some(paper.ballot) {
                    self.moves.push(PaperMove {
                        count: count_index,
                        holder: next.map_or(Holder::Exhausted, |(c, _)| Holder::Candidate(c)),
                        value: value.clone(),
                    });
                }
                match next {
                    None => exhausted_increment += amount,
                    Some((dest, cursor)) => {
                        increments[dest.0] += amount;
                        let pile = &mut self.piles[dest.0];
                        let at = *created.entry((dest, value.clone())).or_insert_with(|| {
                            pile.push(Parcel {
                                value: value.clone(),
                                papers: Vec::new(),
                                count: 0,
                            });
                            pile.len() - 1
                        });
                        pile[at].papers.push(Paper {
                            ballot: paper.ballot,
                            cursor,
                        });
                        pile[at].count += multiplicity;
                    }
                }
            }
        }

        let mut credited_total = Value::zero();
        for (c, inc) in increments.into_iter().enumerate() {
            if inc.is_zero() {
                continue;
            }
            let credited = match self.rules.rounding {
                Rounding::ExactRational => inc,
                Rounding::TruncateTalliesToInteger => inc.trunc(),
            };
            credited_total += &credited;
            self.tallies[c] += credited;
        }
        self.exhausted += &exhausted_increment;
        self.rounding_loss += leaving - credited_total - exhausted_increment;
    }

    /// Passes on the surplus of an elected candidate. All of their papers
    /// move; the candidate keeps exactly a quota.
    pub fn distribute_surplus(
        &mut self,
        candidate: CandidateId,
    ) -> Result<&CountRecord, CountError> {
        let quota = self.quota.value().clone();
        if self.status[candidate.0] != CandidateStatus::Elected
            || self.tallies[candidate.0] <= quota
        {
            return Err(CountError::NoSurplus(candidate));
        }
        let surplus = &self.tallies[candidate.0] - &quota;
        let parcels = std::mem::take(&mut self.piles[candidate.0]);
        let transfer_value = match self.rules.surplus_method {
            SurplusMethod::UnweightedInclusiveGregory => {
                let papers: u64 = parcels.iter().map(|p| p.count).sum();
                &surplus / from_int(papers)
            }
            SurplusMethod::WeightedInclusiveGregory => {
                let held: Value = parcels.iter().map(Parcel::total).sum();
                &surplus / held
            }
        };
        debug_assert!(transfer_value > Value::zero() && transfer_value < Value::one());
        let method = self.rules.surplus_method;
        let tv = transfer_value.clone();
        self.tallies[candidate.0] = quota;
        self.transfer(
            parcels,
            move |p| match method {
                SurplusMethod::UnweightedInclusiveGregory => tv.clone(),
                SurplusMethod::WeightedInclusiveGregory => (&p.value * &tv).min(p.value.clone()),
            },
            surplus,
        );
        self.push_record(
            ActionKind::SurplusDistribution(candidate),
            Some(transfer_value),
        );
        Ok(self.current())
    }

    /// Excludes the continuing candidate with the lowest tally and moves
    /// their papers on at the value they hold.
    pub fn exclude_lowest(&mut self) -> &CountRecord {
        let lowest = self
            .continuing()
            .map(|c| &self.tallies[c.0])
            .min()
            .expect("exclusion needs a continuing candidate")
            .clone();
        let tied: Vec<CandidateId> = self
            .continuing()
            .filter(|c| self.tallies[c.0] == lowest)
            .collect();
        let (excluded, event) = if tied.len() == 1 {
            (tied[0], None)
        } else {
            let out = break_tie(&tied, &self.counts, TieBreak::Exclusion);
            (out.chosen, Some(out.event))
        };

        self.status[excluded.0] = CandidateStatus::Excluded;
        let leaving = std::mem::take(&mut self.tallies[excluded.0]);
        let parcels = std::mem::take(&mut self.piles[excluded.0]);
        self.transfer(parcels, |p| p.value.clone(), leaving);
        self.push_record(ActionKind::Exclusion(excluded), None);
        let record = self.current();
        record.newly_excluded.push(excluded);
        record.tie_events.extend(event);
        record
    }

    pub fn finish(self) -> (Transcript, Vec<PaperMove>) {
        let transcript = Transcript {
            election: self.data.name().to_string(),
            candidates: self
                .data
                .candidates()
                .iter()
                .map(|c| c.name.clone())
                .collect(),
            vacancies: self.data.vacancies(),
            rules: self.rules.name.clone(),
            formal_papers: self.formal_papers,
            informal_papers: self.informal_papers,
            quota: self.quota,
            counts: self.counts,
            elected: self.elected,
            exhausted_final: self.exhausted,
        };
        (transcript, self.moves)
    }
}

/// Runs a complete count.
pub fn tabulate(data: &ElectionData, rules: &RuleSet) -> Result<Transcript, CountError> {
    Ok(tabulate_tracking(data, rules, None)?.0)
}

/// Runs a complete count, also reporting every move made by the papers of
/// ballot entry `tracked`.
pub fn tabulate_tracking(
    data: &ElectionData,
    rules: &RuleSet,
    tracked: Option<usize>,
) -> Result<(Transcript, Vec<PaperMove>), CountError> {
    let mut state = CountState::new(data, rules)?;
    if let Some(b) = tracked {
        state.track(b)?;
    }
    state.distribute_first_preferences();
    loop {
        state.elect_meeting_quota();
        match state.check_termination()? {
            Termination::AllVacanciesFilled => break,
            Termination::DeclareRemaining => {
                state.declare_remaining();
                break;
            }
            Termination::Continue => {}
        }
        match state.next_pending_surplus() {
            Some(c) => {
                state.distribute_surplus(c)?;
            }
            None => {
                state.exclude_lowest();
            }
        }
    }
    Ok(state.finish())
}
