//! Deterministic tie resolution: countback through earlier counts, then
//! ballot-paper order.

use crate::data::CandidateId;
use crate::transcript::CountRecord;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TieBreak {
    /// Choosing whom to exclude: the lowest earlier tally is selected.
    Exclusion,
    /// Ordering candidates elected together: the highest earlier tally
    /// goes first.
    ElectionOrder,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TieOutcome {
    pub chosen: CandidateId,
    pub event: String,
}

fn list(ids: &[CandidateId]) -> String {
    ids.iter()
        .map(|c| c.to_string())
        .collect::<Vec<_>>()
        .join(", ")
}

/// Picks one candidate out of `tied` (at least two). Counts in `history`
/// are walked from the latest back to the first; at each count only the
/// candidates with the lowest (or highest) tally stay in contention. If
/// several remain after count 1, the lowest candidate id is chosen.
pub fn break_tie(tied: &[CandidateId], history: &[CountRecord], purpose: TieBreak) -> TieOutcome {
    assert!(tied.len() >= 2, "a tie needs at least two candidates");
    let mut contenders: Vec<CandidateId> = tied.to_vec();
    contenders.sort_unstable();
    let what = match purpose {
        TieBreak::Exclusion => "exclusion",
        TieBreak::ElectionOrder => "election order",
    };
    let mut event = format!("{what} tie between candidates {}:", list(&contenders));

    for record in history.iter().rev() {
        let tally = |c: &CandidateId| &record.tallies[c.0];
        let target = match purpose {
            TieBreak::Exclusion => contenders.iter().map(tally).min(),
            TieBreak::ElectionOrder => contenders.iter().map(tally).max(),
        }
        .expect("contenders is never empty")
        .clone();
        let before = contenders.len();
        contenders.retain(|c| *tally(c) == target);
        if contenders.len() < before {
            if contenders.len() == 1 {
                event.push_str(&format!(
                    " countback at count {} selects {}",
                    record.index, contenders[0]
                ));
                return TieOutcome {
                    chosen: contenders[0],
                    event,
                };
            }
            event.push_str(&format!(
                " countback at count {} narrows to {};",
                record.index,
                list(&contenders)
            ));
        }
    }
    let chosen = contenders[0];
    event.push_str(&format!(" lowest candidate id selects {chosen}"));
    TieOutcome { chosen, event }
}
