//! Election data model: candidates, groups, ballots and how-to-vote cards
//! for a single contest.
//!
//! An [`ElectionData`] is validated on construction and immutable
//! afterwards, so it can be shared freely between concurrent counts.

mod atl;
mod format;

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rules::RuleSet;

pub use atl::{AtlError, AtlMarks};
pub use format::{parse_canonical, to_canonical_json};

/// Index of a candidate in ballot-paper order. Lower ids also win the final
/// fallback of every tie-break.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CandidateId(pub usize);

impl fmt::Display for CandidateId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GroupId(pub usize);

impl fmt::Display for GroupId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Candidate {
    pub id: CandidateId,
    pub name: String,
    pub group: Option<GroupId>,
    /// Zero-based position within the group; present iff `group` is.
    pub position_in_group: Option<usize>,
}

/// A party or group column on the ballot paper.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Group {
    pub id: GroupId,
    pub name: String,
    /// Members in `position_in_group` order. Never empty.
    pub candidates: Vec<CandidateId>,
}

/// A preference ordering together with the number of identical papers
/// that carry it.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Ballot {
    pub preferences: Vec<CandidateId>,
    pub multiplicity: u64,
}

impl Ballot {
    pub fn new(preferences: Vec<CandidateId>, multiplicity: u64) -> Self {
        Ballot {
            preferences,
            multiplicity,
        }
    }

    pub fn single(preferences: Vec<CandidateId>) -> Self {
        Self::new(preferences, 1)
    }
}

/// A party's recommended preference sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HowToVoteCard {
    pub party: String,
    pub preferences: Vec<CandidateId>,
}

/// Why a record failed validation.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Problem {
    #[error("duplicate candidate {0} in preferences")]
    DuplicatePreference(CandidateId),
    #[error("candidate id {id} out of range (election has {count} candidates)")]
    CandidateOutOfRange { id: usize, count: usize },
    #[error("empty preference list")]
    EmptyPreferences,
    #[error("multiplicity must be at least 1")]
    ZeroMultiplicity,
    #[error("vacancies must be at least 1")]
    NoVacancies,
    #[error("{vacancies} vacancies but only {candidates} candidates")]
    TooManyVacancies { vacancies: usize, candidates: usize },
    #[error("group id {id} out of range (election has {count} groups)")]
    UnknownGroup { id: usize, count: usize },
    #[error("group has no candidates")]
    EmptyGroup,
    #[error("election has no ballot papers")]
    NoPapers,
    #[error("unknown how-to-vote card {0:?}")]
    UnknownCard(String),
}

#[derive(Debug, Error)]
pub enum DataError {
    #[error("malformed election file: {0}")]
    Syntax(#[from] serde_json::Error),
    #[error("{location}: {problem}")]
    Invalid { location: String, problem: Problem },
}

impl DataError {
    pub(crate) fn at(location: impl Into<String>, problem: Problem) -> Self {
        DataError::Invalid {
            location: location.into(),
            problem,
        }
    }

    /// The validation problem, if this is not a syntax error.
    pub fn problem(&self) -> Option<&Problem> {
        match self {
            DataError::Invalid { problem, .. } => Some(problem),
            DataError::Syntax(_) => None,
        }
    }
}

/// Checks a preference list against the structural ballot rules: non-empty,
/// every id in range, no repeats.
pub fn check_preferences(prefs: &[CandidateId], num_candidates: usize) -> Result<(), Problem> {
    if prefs.is_empty() {
        return Err(Problem::EmptyPreferences);
    }
    let mut seen = HashSet::with_capacity(prefs.len());
    for &c in prefs {
        if c.0 >= num_candidates {
            return Err(Problem::CandidateOutOfRange {
                id: c.0,
                count: num_candidates,
            });
        }
        if !seen.insert(c) {
            return Err(Problem::DuplicatePreference(c));
        }
    }
    Ok(())
}

/// Whether a structurally valid preference list meets the formality
/// minimum. Short lists are informal, never an error.
pub fn is_formal(prefs: &[CandidateId], rules: &RuleSet) -> bool {
    prefs.len() >= rules.min_preferences
}

/// Candidate description used when assembling an election in code.
#[derive(Debug, Clone)]
pub struct CandidateSpec {
    pub name: String,
    pub group: Option<GroupId>,
}

impl CandidateSpec {
    pub fn new(name: impl Into<String>) -> Self {
        CandidateSpec {
            name: name.into(),
            group: None,
        }
    }

    pub fn in_group(name: impl Into<String>, group: usize) -> Self {
        CandidateSpec {
            name: name.into(),
            group: Some(GroupId(group)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ElectionData {
    name: String,
    year: Option<u32>,
    region: Option<String>,
    vacancies: usize,
    candidates: Vec<Candidate>,
    groups: Vec<Group>,
    ballots: Vec<Ballot>,
    htv_cards: Vec<HowToVoteCard>,
}

impl ElectionData {
    /// Assembles and validates an election. Candidate ids follow the order
    /// of `candidates`, group ids the order of `group_names`, and positions
    /// within a group follow candidate order. Ballots are kept as given.
    pub fn new(
        name: impl Into<String>,
        vacancies: usize,
        candidates: Vec<CandidateSpec>,
        group_names: Vec<String>,
        ballots: Vec<Ballot>,
        htv_cards: Vec<HowToVoteCard>,
    ) -> Result<Self, DataError> {
        if vacancies < 1 {
            return Err(DataError::at("vacancies", Problem::NoVacancies));
        }
        if vacancies > candidates.len() {
            return Err(DataError::at(
                "vacancies",
                Problem::TooManyVacancies {
                    vacancies,
                    candidates: candidates.len(),
                },
            ));
        }

        let mut groups: Vec<Group> = group_names
            .into_iter()
            .enumerate()
            .map(|(i, name)| Group {
                id: GroupId(i),
                name,
                candidates: Vec::new(),
            })
            .collect();
        let num_groups = groups.len();
        let mut built = Vec::with_capacity(candidates.len());
        for (i, spec) in candidates.into_iter().enumerate() {
            let id = CandidateId(i);
            let position_in_group = match spec.group {
                Some(g) => {
                    let group = groups.get_mut(g.0).ok_or_else(|| {
                        DataError::at(
                            format!("candidates[{i}].group"),
                            Problem::UnknownGroup {
                                id: g.0,
                                count: num_groups,
                            },
                        )
                    })?;
                    group.candidates.push(id);
                    Some(group.candidates.len() - 1)
                }
                None => None,
            };
            built.push(Candidate {
                id,
                name: spec.name,
                group: spec.group,
                position_in_group,
            });
        }
        if let Some(empty) = groups.iter().find(|g| g.candidates.is_empty()) {
            return Err(DataError::at(
                format!("groups[{}]", empty.id),
                Problem::EmptyGroup,
            ));
        }

        let num_candidates = built.len();
        for (i, ballot) in ballots.iter().enumerate() {
            check_preferences(&ballot.preferences, num_candidates)
                .map_err(|p| DataError::at(format!("ballots[{i}].prefs"), p))?;
            if ballot.multiplicity == 0 {
                return Err(DataError::at(
                    format!("ballots[{i}].n"),
                    Problem::ZeroMultiplicity,
                ));
            }
        }
        if ballots.iter().map(|b| b.multiplicity).sum::<u64>() == 0 {
            return Err(DataError::at("ballots", Problem::NoPapers));
        }
        for (i, card) in htv_cards.iter().enumerate() {
            check_preferences(&card.preferences, num_candidates)
                .map_err(|p| DataError::at(format!("htv[{i}].prefs"), p))?;
        }

        Ok(ElectionData {
            name: name.into(),
            year: None,
            region: None,
            vacancies,
            candidates: built,
            groups,
            ballots,
            htv_cards,
        })
    }

    /// Ungrouped election with candidates named in ballot order.
    pub fn ungrouped(
        name: impl Into<String>,
        vacancies: usize,
        candidate_names: &[&str],
        ballots: Vec<Ballot>,
    ) -> Result<Self, DataError> {
        let specs = candidate_names
            .iter()
            .map(|n| CandidateSpec::new(*n))
            .collect();
        Self::new(name, vacancies, specs, Vec::new(), ballots, Vec::new())
    }

    pub fn with_metadata(mut self, year: Option<u32>, region: Option<String>) -> Self {
        self.year = year;
        self.region = region;
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn year(&self) -> Option<u32> {
        self.year
    }

    pub fn region(&self) -> Option<&str> {
        self.region.as_deref()
    }

    pub fn vacancies(&self) -> usize {
        self.vacancies
    }

    pub fn candidates(&self) -> &[Candidate] {
        &self.candidates
    }

    pub fn num_candidates(&self) -> usize {
        self.candidates.len()
    }

    pub fn candidate_name(&self, id: CandidateId) -> &str {
        &self.candidates[id.0].name
    }

    /// Looks up a candidate by exact name.
    pub fn find_candidate(&self, name: &str) -> Option<CandidateId> {
        self.candidates
            .iter()
            .find(|c| c.name == name)
            .map(|c| c.id)
    }

    pub fn groups(&self) -> &[Group] {
        &self.groups
    }

    pub fn ballots(&self) -> &[Ballot] {
        &self.ballots
    }

    pub fn htv_cards(&self) -> &[HowToVoteCard] {
        &self.htv_cards
    }

    /// Total number of papers, counting multiplicity.
    pub fn total_papers(&self) -> u64 {
        self.ballots.iter().map(|b| b.multiplicity).sum()
    }

    /// The ballot a voter would cast by following `party`'s card.
    pub fn apply_htv(&self, party: &str) -> Result<Ballot, DataError> {
        self.htv_cards
            .iter()
            .find(|c| c.party == party)
            .map(|c| Ballot::single(c.preferences.clone()))
            .ok_or_else(|| DataError::at("htv", Problem::UnknownCard(party.to_string())))
    }

    /// Returns a copy with `ballot` appended as its own entry (never merged
    /// with an identical one) and the index of that entry.
    pub fn with_extra_ballot(&self, ballot: Ballot) -> Result<(Self, usize), DataError> {
        check_preferences(&ballot.preferences, self.num_candidates())
            .map_err(|p| DataError::at("extra ballot", p))?;
        if ballot.multiplicity == 0 {
            return Err(DataError::at("extra ballot", Problem::ZeroMultiplicity));
        }
        let mut augmented = self.clone();
        augmented.ballots.push(ballot);
        let index = augmented.ballots.len() - 1;
        Ok((augmented, index))
    }

    /// Same election with every ballot split into papers of multiplicity 1.
    pub fn split_multiplicities(&self) -> Self {
        let mut split = self.clone();
        split.ballots = self
            .ballots
            .iter()
            .flat_map(|b| (0..b.multiplicity).map(move |_| Ballot::single(b.preferences.clone())))
            .collect();
        split
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ids(v: &[usize]) -> Vec<CandidateId> {
        v.iter().copied().map(CandidateId).collect()
    }

    #[test]
    fn formality_threshold() {
        let mut rules = RuleSet::default();
        assert!(is_formal(&ids(&[0]), &rules));
        rules.min_preferences = 6;
        assert!(!is_formal(&ids(&[0, 1, 2, 3, 4]), &rules));
        rules.min_preferences = 12;
        let long: Vec<usize> = (0..22).collect();
        assert!(is_formal(&ids(&long), &rules));
    }

    #[test]
    fn rejects_structural_violations() {
        assert_eq!(
            check_preferences(&ids(&[0, 0]), 2),
            Err(Problem::DuplicatePreference(CandidateId(0)))
        );
        assert_eq!(
            check_preferences(&ids(&[3]), 2),
            Err(Problem::CandidateOutOfRange { id: 3, count: 2 })
        );
        assert_eq!(check_preferences(&[], 2), Err(Problem::EmptyPreferences));
    }

    #[test]
    fn vacancy_bounds() {
        let b = vec![Ballot::single(ids(&[0]))];
        let err = ElectionData::ungrouped("x", 0, &["A"], b.clone()).unwrap_err();
        assert_eq!(err.problem(), Some(&Problem::NoVacancies));
        let err = ElectionData::ungrouped("x", 2, &["A"], b).unwrap_err();
        assert!(matches!(
            err.problem(),
            Some(Problem::TooManyVacancies { .. })
        ));
    }

    #[test]
    fn htv_cards_become_single_ballots() {
        let data = ElectionData::new(
            "x",
            1,
            vec![
                CandidateSpec::new("a"),
                CandidateSpec::new("b"),
                CandidateSpec::new("c"),
            ],
            vec![],
            vec![Ballot::single(ids(&[0]))],
            vec![
                HowToVoteCard {
                    party: "P".into(),
                    preferences: ids(&[0]),
                },
                HowToVoteCard {
                    party: "Q".into(),
                    preferences: ids(&[2, 0, 1]),
                },
            ],
        )
        .unwrap();
        assert_eq!(data.apply_htv("P").unwrap(), Ballot::new(ids(&[0]), 1));
        assert_eq!(
            data.apply_htv("Q").unwrap(),
            Ballot::new(ids(&[2, 0, 1]), 1)
        );
        let err = data.apply_htv("R").unwrap_err();
        assert_eq!(err.problem(), Some(&Problem::UnknownCard("R".into())));
    }

    #[test]
    fn extra_ballot_is_never_merged() {
        let data = ElectionData::ungrouped("x", 1, &["A", "B"], vec![Ballot::new(ids(&[0, 1]), 2)])
            .unwrap();
        let (aug, idx) = data
            .with_extra_ballot(Ballot::single(ids(&[0, 1])))
            .unwrap();
        assert_eq!(idx, 1);
        assert_eq!(aug.ballots().len(), 2);
        assert_eq!(aug.total_papers(), 3);
    }

    #[test]
    fn groups_record_positions() {
        let data = ElectionData::new(
            "x",
            1,
            vec![
                CandidateSpec::in_group("a", 1),
                CandidateSpec::in_group("b", 0),
                CandidateSpec::in_group("c", 1),
                CandidateSpec::new("d"),
            ],
            vec!["G0".into(), "G1".into()],
            vec![Ballot::single(ids(&[0]))],
            vec![],
        )
        .unwrap();
        assert_eq!(data.groups()[1].candidates, ids(&[0, 2]));
        assert_eq!(data.candidates()[2].position_in_group, Some(1));
        assert_eq!(data.candidates()[3].position_in_group, None);

        let err = ElectionData::new(
            "x",
            1,
            vec![CandidateSpec::in_group("a", 0)],
            vec!["G0".into(), "empty".into()],
            vec![Ballot::single(ids(&[0]))],
            vec![],
        )
        .unwrap_err();
        assert_eq!(err.to_string(), "groups[1]: group has no candidates");
    }
}
