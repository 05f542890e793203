//! Counting rule variants.

use std::fmt;

use serde::{Deserialize, Serialize};

/// How an elected candidate's surplus is passed on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SurplusMethod {
    /// Transfer value is the surplus divided by the number of papers held;
    /// every paper moves at that value regardless of what it was worth.
    UnweightedInclusiveGregory,
    /// Transfer value is the surplus divided by the total value held; each
    /// paper moves at its current value scaled by that factor.
    WeightedInclusiveGregory,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Rounding {
    ExactRational,
    /// Each candidate's increment in a transfer is truncated to a whole
    /// number of votes; the fraction is booked as rounding loss.
    TruncateTalliesToInteger,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RuleSet {
    pub name: String,
    pub surplus_method: SurplusMethod,
    pub rounding: Rounding,
    /// Shortest preference list that still counts as formal.
    pub min_preferences: usize,
}

impl RuleSet {
    pub fn new(
        name: impl Into<String>,
        surplus_method: SurplusMethod,
        rounding: Rounding,
        min_preferences: usize,
    ) -> Self {
        RuleSet {
            name: name.into(),
            surplus_method,
            rounding,
            min_preferences,
        }
    }

    /// Weighted inclusive Gregory with exact arithmetic.
    pub fn weighted() -> Self {
        Self::new(
            "weighted",
            SurplusMethod::WeightedInclusiveGregory,
            Rounding::ExactRational,
            1,
        )
    }

    pub fn is_valid(&self) -> bool {
        self.min_preferences >= 1
    }
}

impl Default for RuleSet {
    fn default() -> Self {
        Self::new(
            "default",
            SurplusMethod::UnweightedInclusiveGregory,
            Rounding::ExactRational,
            1,
        )
    }
}

impl fmt::Display for SurplusMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SurplusMethod::UnweightedInclusiveGregory => "unweighted-inclusive-gregory",
            SurplusMethod::WeightedInclusiveGregory => "weighted-inclusive-gregory",
        })
    }
}
