//! Single Transferable Vote counting with full per-count transcripts, and a
//! tracer that follows a hypothetical ballot through the count.
//!
//! - [`data`]: election model, canonical file format, above-the-line
//!   expansion and how-to-vote cards.
//! - [`engine`]: the count itself under a configurable [`RuleSet`].
//! - [`transcript`]: the per-count record a count produces.
//! - [`journey`]: where a ballot went and what it contributed.

pub mod data;
pub mod engine;
pub mod journey;
pub mod rules;
pub mod transcript;
pub mod value;

pub use data::{Ballot, CandidateId, ElectionData, GroupId};
pub use engine::{tabulate, CountError, Holder};
pub use journey::{trace_journey, HypotheticalBallot, JourneyReport};
pub use rules::{Rounding, RuleSet, SurplusMethod};
pub use transcript::Transcript;
