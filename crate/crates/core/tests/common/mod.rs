#![allow(dead_code)]

pub mod oracle;

use std::path::PathBuf;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use stv_core::data::{Ballot, CandidateId, ElectionData};
use stv_core::rules::{Rounding, RuleSet, SurplusMethod};

pub const SUITE_SEED: u64 = 0x5EED_2016;
pub const SUITE_SIZE: usize = 1000;

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests")
        .join(name)
}

pub fn load_fixture(name: &str) -> ElectionData {
    let bytes = std::fs::read(fixture_path(name)).expect("fixture readable");
    stv_core::data::parse_canonical(&bytes).expect("fixture valid")
}

pub fn oracle_election() -> ElectionData {
    load_fixture("fixtures/oracle.json")
}

/// Random preference list: a prefix of a shuffled candidate list.
pub fn random_prefs(rng: &mut impl Rng, candidates: usize) -> Vec<CandidateId> {
    let mut all: Vec<CandidateId> = (0..candidates).map(CandidateId).collect();
    all.shuffle(rng);
    let len = rng.gen_range(1..=candidates);
    all.truncate(len);
    all
}

/// At most 6 candidates, 40 papers and 3 seats.
pub fn random_election(rng: &mut impl Rng, index: usize) -> ElectionData {
    let candidates = rng.gen_range(1..=6);
    let seats = rng.gen_range(1..=candidates.min(3));
    let target = rng.gen_range(1..=40u64);
    let mut papers = 0;
    let mut ballots = Vec::new();
    while papers < target {
        let n = rng.gen_range(1..=4u64).min(target - papers);
        ballots.push(Ballot::new(random_prefs(rng, candidates), n));
        papers += n;
    }
    let names: Vec<String> = (0..candidates).map(|c| format!("C{c}")).collect();
    let names: Vec<&str> = names.iter().map(String::as_str).collect();
    ElectionData::ungrouped(format!("random-{index}"), seats, &names, ballots).unwrap()
}

/// Alternates surplus methods; every fourth election truncates tallies.
pub fn rules_for(index: usize) -> RuleSet {
    let method = if index.is_multiple_of(2) {
        SurplusMethod::UnweightedInclusiveGregory
    } else {
        SurplusMethod::WeightedInclusiveGregory
    };
    let rounding = if index % 4 >= 2 {
        Rounding::TruncateTalliesToInteger
    } else {
        Rounding::ExactRational
    };
    RuleSet::new(format!("{method}/{rounding:?}"), method, rounding, 1)
}

pub struct Case {
    pub data: ElectionData,
    pub rules: RuleSet,
    pub hypothetical: Vec<CandidateId>,
}

/// The shared random suite: elections, rules and a formal hypothetical
/// ballot for each.
pub fn random_suite() -> Vec<Case> {
    let mut rng = ChaCha8Rng::seed_from_u64(SUITE_SEED);
    (0..SUITE_SIZE)
        .map(|i| {
            let data = random_election(&mut rng, i);
            let hypothetical = random_prefs(&mut rng, data.num_candidates());
            Case {
                data,
                rules: rules_for(i),
                hypothetical,
            }
        })
        .collect()
}
