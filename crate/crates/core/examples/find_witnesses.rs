//! Randomized search for small elections that exhibit journey effects,
//! written out as canonical election files whose `witness` how-to-vote card
//! holds the hypothetical ballot.
//!
//! - `negative_contribution.json`: under unweighted inclusive Gregory, the
//!   witness ballot leaves a candidate it ranks with a lower tally than if
//!   it had not been cast, without changing the outcome.
//! - `quota_boundary.json`: 20 papers and 2 seats, so the witness ballot
//!   lifts the quota from 7 to 8 and the count takes a different course.
//!
//! Usage: `cargo run -p stv-core --example find_witnesses -- [OUT_DIR]`

use std::path::PathBuf;

use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use stv_core::data::{to_canonical_json, CandidateSpec, HowToVoteCard};
use stv_core::journey::{trace_journey, HypotheticalBallot};
use stv_core::{Ballot, CandidateId, ElectionData, RuleSet};

const SEED: u64 = 20_160_702;
const ATTEMPTS: usize = 200_000;

fn prefs(rng: &mut impl Rng, candidates: usize) -> Vec<CandidateId> {
    let mut all: Vec<CandidateId> = (0..candidates).map(CandidateId).collect();
    all.shuffle(rng);
    all.truncate(rng.gen_range(1..=candidates));
    all
}

fn election(rng: &mut impl Rng, name: &str, candidates: usize, papers: u64) -> ElectionData {
    let mut ballots = Vec::new();
    let mut placed = 0;
    while placed < papers {
        let n = rng.gen_range(1..=5u64).min(papers - placed);
        ballots.push(Ballot::new(prefs(rng, candidates), n));
        placed += n;
    }
    let names: Vec<String> = (0..candidates)
        .map(|c| char::from(b'A' + c as u8).to_string())
        .collect();
    let names: Vec<&str> = names.iter().map(String::as_str).collect();
    ElectionData::ungrouped(name, 2, &names, ballots).expect("generated election is valid")
}

fn with_witness(data: &ElectionData, witness: &[CandidateId]) -> ElectionData {
    let specs = data
        .candidates()
        .iter()
        .map(|c| CandidateSpec::new(c.name.clone()))
        .collect();
    ElectionData::new(
        data.name(),
        data.vacancies(),
        specs,
        Vec::new(),
        data.ballots().to_vec(),
        vec![HowToVoteCard {
            party: "witness".into(),
            preferences: witness.to_vec(),
        }],
    )
    .expect("witness ballot is valid")
}

fn find_negative(rng: &mut impl Rng, rules: &RuleSet) -> Option<ElectionData> {
    for _ in 0..ATTEMPTS {
        let candidates = rng.gen_range(3..=5);
        let papers = rng.gen_range(5..=30);
        let data = election(rng, "negative-contribution", candidates, papers);
        let hb = HypotheticalBallot::new(prefs(rng, candidates), &data).ok()?;
        let Ok(report) = trace_journey(&data, &hb, rules) else {
            continue;
        };
        let harmed_ranked = report
            .contributions
            .iter()
            .any(|c| c.final_delta < Zero::zero() && hb.preferences().contains(&c.candidate));
        if harmed_ranked && !report.outcome_changed {
            return Some(with_witness(&data, hb.preferences()));
        }
    }
    None
}

fn find_quota_boundary(rng: &mut impl Rng, rules: &RuleSet) -> Option<ElectionData> {
    for _ in 0..ATTEMPTS {
        let candidates = rng.gen_range(3..=5);
        let data = election(rng, "quota-boundary", candidates, 20);
        let hb = HypotheticalBallot::new(prefs(rng, candidates), &data).ok()?;
        let Ok(report) = trace_journey(&data, &hb, rules) else {
            continue;
        };
        if report.outcome_changed && report.baseline_elected != report.augmented_elected {
            return Some(with_witness(&data, hb.preferences()));
        }
    }
    None
}

fn main() {
    let out_dir = std::env::args().nth(1).map(PathBuf::from);
    let rules = RuleSet::default();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);

    let found = [
        (
            "negative_contribution.json",
            find_negative(&mut rng, &rules),
        ),
        ("quota_boundary.json", find_quota_boundary(&mut rng, &rules)),
    ];
    for (file, data) in found {
        let Some(data) = data else {
            eprintln!("no witness found for {file}");
            std::process::exit(1);
        };
        let json = to_canonical_json(&data);
        match &out_dir {
            Some(dir) => {
                let path = dir.join(file);
                std::fs::write(&path, json).expect("output writable");
                println!("wrote {}", path.display());
            }
            None => println!("// {file}\n{json}"),
        }
    }
}
