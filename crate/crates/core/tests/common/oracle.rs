//! A deliberately naive second implementation of the count, used only to
//! cross-check the engine. Every physical paper is its own record with its
//! own value, ballot multiplicities are expanded up front, and nothing is
//! shared with the engine beyond the input types.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use stv_core::data::ElectionData;
use stv_core::rules::{Rounding, RuleSet, SurplusMethod};

type Q = BigRational;

fn q(n: u64) -> Q {
    BigRational::from_integer(BigInt::from(n))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Step {
    First,
    Surplus(usize),
    Exclude(usize),
    Declare,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleCount {
    pub step: Step,
    pub transfer_value: Option<Q>,
    pub tallies: Vec<Q>,
    pub exhausted: Q,
    pub loss: Q,
    pub elected: Vec<usize>,
    pub excluded: Vec<usize>,
}

#[derive(Debug)]
pub struct OracleResult {
    pub quota: Q,
    pub counts: Vec<OracleCount>,
    pub winners: Vec<usize>,
}

struct Paper {
    prefs: Vec<usize>,
    pos: usize,
    value: Q,
    holder: Option<usize>,
}

#[derive(Clone, Copy, PartialEq)]
enum St {
    Hopeful,
    Won,
    Lost,
}

/// Walks earlier counts from the latest; keeps the lowest (or highest)
/// among `tied` until one remains, else the smallest index.
fn countback(mut tied: Vec<usize>, history: &[OracleCount], lowest: bool) -> usize {
    tied.sort();
    for rec in history.iter().rev() {
        let vals: Vec<&Q> = tied.iter().map(|&c| &rec.tallies[c]).collect();
        let pick = if lowest {
            vals.iter().min().unwrap()
        } else {
            vals.iter().max().unwrap()
        };
        let pick = (*pick).clone();
        tied.retain(|&c| rec.tallies[c] == pick);
        if tied.len() == 1 {
            return tied[0];
        }
    }
    tied[0]
}

fn order_desc(mut pool: Vec<usize>, tallies: &[Q], history: &[OracleCount]) -> Vec<usize> {
    let mut out = Vec::new();
    while !pool.is_empty() {
        let top = pool.iter().map(|&c| &tallies[c]).max().unwrap().clone();
        let tied: Vec<usize> = pool
            .iter()
            .copied()
            .filter(|&c| tallies[c] == top)
            .collect();
        let chosen = if tied.len() == 1 {
            tied[0]
        } else {
            countback(tied, history, false)
        };
        out.push(chosen);
        pool.retain(|&c| c != chosen);
    }
    out
}

pub fn count(data: &ElectionData, rules: &RuleSet) -> OracleResult {
    let ncand = data.num_candidates();
    let seats = data.vacancies();
    let mut papers: Vec<Paper> = Vec::new();
    for b in data.ballots() {
        if b.preferences.len() < rules.min_preferences {
            continue;
        }
        for _ in 0..b.multiplicity {
            papers.push(Paper {
                prefs: b.preferences.iter().map(|c| c.0).collect(),
                pos: 0,
                value: Q::one(),
                holder: Some(b.preferences[0].0),
            });
        }
    }
    let total = papers.len() as u64;
    let quota = q(total / (seats as u64 + 1) + 1);

    let mut st = vec![St::Hopeful; ncand];
    let mut tallies = vec![Q::zero(); ncand];
    for p in &papers {
        tallies[p.holder.unwrap()] += &p.value;
    }
    let mut exhausted = Q::zero();
    let mut loss = Q::zero();
    let mut queue: Vec<usize> = Vec::new();
    let mut winners: Vec<usize> = Vec::new();
    let mut counts: Vec<OracleCount> = vec![OracleCount {
        step: Step::First,
        transfer_value: None,
        tallies: tallies.clone(),
        exhausted: Q::zero(),
        loss: Q::zero(),
        elected: vec![],
        excluded: vec![],
    }];

    loop {
        // Elect.
        let reaching: Vec<usize> = (0..ncand)
            .filter(|&c| st[c] == St::Hopeful && tallies[c] >= quota)
            .collect();
        let ordered = order_desc(reaching, &tallies, &counts);
        for c in ordered.into_iter().take(seats - winners.len()) {
            st[c] = St::Won;
            winners.push(c);
            counts.last_mut().unwrap().elected.push(c);
            if tallies[c] > quota {
                queue.push(c);
            }
        }
        // Stop?
        let hopeful: Vec<usize> = (0..ncand).filter(|&c| st[c] == St::Hopeful).collect();
        if winners.len() == seats {
            break;
        }
        if hopeful.len() == seats - winners.len() {
            let ordered = order_desc(hopeful, &tallies, &counts);
            let mut rec = OracleCount {
                step: Step::Declare,
                transfer_value: None,
                tallies: tallies.clone(),
                exhausted: exhausted.clone(),
                loss: loss.clone(),
                elected: vec![],
                excluded: vec![],
            };
            for c in ordered {
                winners.push(c);
                rec.elected.push(c);
            }
            counts.push(rec);
            break;
        }

        let (step, tv, source, leaving) = if !queue.is_empty() {
            let c = queue.remove(0);
            let surplus = &tallies[c] - &quota;
            let mine: Vec<&Paper> = papers.iter().filter(|p| p.holder == Some(c)).collect();
            let tv = match rules.surplus_method {
                SurplusMethod::UnweightedInclusiveGregory => &surplus / q(mine.len() as u64),
                SurplusMethod::WeightedInclusiveGregory => {
                    let held: Q = mine.iter().map(|p| p.value.clone()).sum();
                    &surplus / held
                }
            };
            for p in papers.iter_mut().filter(|p| p.holder == Some(c)) {
                p.value = match rules.surplus_method {
                    SurplusMethod::UnweightedInclusiveGregory => tv.clone(),
                    SurplusMethod::WeightedInclusiveGregory => &p.value * &tv,
                };
            }
            tallies[c] = quota.clone();
            (Step::Surplus(c), Some(tv), c, surplus)
        } else {
            let low = hopeful.iter().map(|&c| &tallies[c]).min().unwrap().clone();
            let tied: Vec<usize> = hopeful
                .iter()
                .copied()
                .filter(|&c| tallies[c] == low)
                .collect();
            let c = if tied.len() == 1 {
                tied[0]
            } else {
                countback(tied, &counts, true)
            };
            st[c] = St::Lost;
            let leaving = std::mem::replace(&mut tallies[c], Q::zero());
            (Step::Exclude(c), None, c, leaving)
        };

        // Move every paper held by `source`.
        let mut gained = vec![Q::zero(); ncand];
        let mut exhausted_now = Q::zero();
        for p in papers.iter_mut().filter(|p| p.holder == Some(source)) {
            let mut k = p.pos + 1;
            while k < p.prefs.len() && st[p.prefs[k]] != St::Hopeful {
                k += 1;
            }
            if k < p.prefs.len() {
                p.pos = k;
                p.holder = Some(p.prefs[k]);
                gained[p.prefs[k]] += &p.value;
            } else {
                p.holder = None;
                exhausted_now += &p.value;
            }
        }
        let mut credited = Q::zero();
        for c in 0..ncand {
            let g = match rules.rounding {
                Rounding::ExactRational => gained[c].clone(),
                Rounding::TruncateTalliesToInteger => gained[c].trunc(),
            };
            credited += &g;
            tallies[c] += g;
        }
        exhausted += &exhausted_now;
        loss += leaving - credited - exhausted_now;

        let excluded = match step {
            Step::Exclude(c) => vec![c],
            _ => vec![],
        };
        counts.push(OracleCount {
            step,
            transfer_value: tv,
            tallies: tallies.clone(),
            exhausted: exhausted.clone(),
            loss: loss.clone(),
            elected: vec![],
            excluded,
        });
    }

    OracleResult {
        quota,
        counts,
        winners,
    }
}
