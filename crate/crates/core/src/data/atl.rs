use std::collections::BTreeMap;

use thiserror::Error;

use super::{CandidateId, ElectionData, GroupId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AtlError {
    #[error("no group is ranked")]
    Empty,
    #[error("group ranks must be 1..={expected} without gaps or repeats")]
    NonContiguousRanks { expected: usize },
    #[error("unknown group id {0}")]
    UnknownGroup(GroupId),
}

/// Above-the-line marks: a 1-based rank for each marked group.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AtlMarks {
    ranks: BTreeMap<GroupId, u32>,
}

impl AtlMarks {
    /// Accepts ranks that are exactly `1..=n` for `n` marked groups.
    pub fn new(ranks: BTreeMap<GroupId, u32>) -> Result<Self, AtlError> {
        if ranks.is_empty() {
            return Err(AtlError::Empty);
        }
        let mut sorted: Vec<u32> = ranks.values().copied().collect();
        sorted.sort_unstable();
        let contiguous = sorted.iter().enumerate().all(|(i, &r)| r as usize == i + 1);
        if !contiguous {
            return Err(AtlError::NonContiguousRanks {
                expected: ranks.len(),
            });
        }
        Ok(AtlMarks { ranks })
    }

    /// Groups listed in rank order.
    pub fn groups_in_order(&self) -> Vec<GroupId> {
        let mut by_rank: Vec<(u32, GroupId)> = self.ranks.iter().map(|(&g, &r)| (r, g)).collect();
        by_rank.sort_unstable();
        by_rank.into_iter().map(|(_, g)| g).collect()
    }

    /// Candidate preferences implied by the marks: each ranked group's
    /// candidates in ballot order, groups taken in rank order.
    pub fn expand(&self, data: &ElectionData) -> Result<Vec<CandidateId>, AtlError> {
        let mut prefs = Vec::new();
        for g in self.groups_in_order() {
            let group = data.groups().get(g.0).ok_or(AtlError::UnknownGroup(g))?;
            prefs.extend_from_slice(&group.candidates);
        }
        Ok(prefs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{Ballot, CandidateSpec};

    fn marks(pairs: &[(usize, u32)]) -> Result<AtlMarks, AtlError> {
        AtlMarks::new(pairs.iter().map(|&(g, r)| (GroupId(g), r)).collect())
    }

    fn grouped(sizes: &[usize]) -> ElectionData {
        let mut specs = Vec::new();
        for (g, &n) in sizes.iter().enumerate() {
            for k in 0..n {
                specs.push(CandidateSpec::in_group(format!("g{g}c{k}"), g));
            }
        }
        let names = (0..sizes.len()).map(|g| format!("G{g}")).collect();
        ElectionData::new(
            "t",
            1,
            specs,
            names,
            vec![Ballot::single(vec![CandidateId(0)])],
            vec![],
        )
        .unwrap()
    }

    #[test]
    fn one_group() {
        let data = grouped(&[2]);
        let prefs = marks(&[(0, 1)]).unwrap().expand(&data).unwrap();
        assert_eq!(prefs, vec![CandidateId(0), CandidateId(1)]);
    }

    #[test]
    fn rank_order_wins_over_group_order() {
        let data = grouped(&[2, 1]);
        let prefs = marks(&[(0, 2), (1, 1)]).unwrap().expand(&data).unwrap();
        assert_eq!(prefs, vec![CandidateId(2), CandidateId(0), CandidateId(1)]);
    }

    #[test]
    fn six_party_card_layout() {
        // Party sizes 6, 2, 3, 3, 2, 6 ranked in column order.
        let data = grouped(&[6, 2, 3, 3, 2, 6]);
        let m = marks(&[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 6)]).unwrap();
        let prefs = m.expand(&data).unwrap();
        assert_eq!(prefs.len(), 22);
        // Preference 9 is the lead of the third party, preference 19 the
        // third candidate of the last one.
        assert_eq!(prefs[8], data.groups()[2].candidates[0]);
        assert_eq!(prefs[18], data.groups()[5].candidates[2]);
    }

    #[test]
    fn invalid_marks() {
        assert_eq!(marks(&[]), Err(AtlError::Empty));
        assert_eq!(
            marks(&[(0, 1), (1, 3)]),
            Err(AtlError::NonContiguousRanks { expected: 2 })
        );
        assert_eq!(
            marks(&[(0, 1), (1, 1)]),
            Err(AtlError::NonContiguousRanks { expected: 2 })
        );
        let data = grouped(&[1]);
        assert_eq!(
            marks(&[(0, 2), (4, 1)]).unwrap().expand(&data),
            Err(AtlError::UnknownGroup(GroupId(4)))
        );
    }
}
