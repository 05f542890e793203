//! The canonical single-file election format (UTF-8 JSON).

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::{
    Ballot, CandidateId, CandidateSpec, DataError, ElectionData, GroupId, HowToVoteCard, Problem,
};

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileRepr {
    name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    year: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    region: Option<String>,
    vacancies: i64,
    candidates: Vec<CandidateRepr>,
    #[serde(default)]
    groups: Vec<GroupRepr>,
    ballots: Vec<BallotRepr>,
    #[serde(default)]
    htv: Vec<HtvRepr>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CandidateRepr {
    name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    group: Option<usize>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GroupRepr {
    name: String,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BallotRepr {
    prefs: Vec<usize>,
    #[serde(default = "one")]
    n: u64,
}

fn one() -> u64 {
    1
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct HtvRepr {
    party: String,
    prefs: Vec<usize>,
}

fn to_ids(prefs: Vec<usize>) -> Vec<CandidateId> {
    prefs.into_iter().map(CandidateId).collect()
}

/// Parses and validates a canonical election file. Ballots with identical
/// preference lists are merged (first occurrence keeps its place) with
/// their multiplicities summed.
pub fn parse_canonical(bytes: &[u8]) -> Result<ElectionData, DataError> {
    let repr: FileRepr = serde_json::from_slice(bytes)?;
    if repr.vacancies < 1 {
        return Err(DataError::at("vacancies", Problem::NoVacancies));
    }

    // Validate each ballot record before merging so errors name the
    // original record.
    let num_candidates = repr.candidates.len();
    let mut merged: Vec<Ballot> = Vec::with_capacity(repr.ballots.len());
    let mut seen: HashMap<Vec<CandidateId>, usize> = HashMap::with_capacity(repr.ballots.len());
    for (i, b) in repr.ballots.into_iter().enumerate() {
        let prefs = to_ids(b.prefs);
        super::check_preferences(&prefs, num_candidates)
            .map_err(|p| DataError::at(format!("ballots[{i}].prefs"), p))?;
        if b.n == 0 {
            return Err(DataError::at(
                format!("ballots[{i}].n"),
                Problem::ZeroMultiplicity,
            ));
        }
        match seen.get(&prefs) {
            Some(&at) => merged[at].multiplicity += b.n,
            None => {
                seen.insert(prefs.clone(), merged.len());
                merged.push(Ballot::new(prefs, b.n));
            }
        }
    }

    let candidates = repr
        .candidates
        .into_iter()
        .map(|c| CandidateSpec {
            name: c.name,
            group: c.group.map(GroupId),
        })
        .collect();
    let groups = repr.groups.into_iter().map(|g| g.name).collect();
    let htv = repr
        .htv
        .into_iter()
        .map(|h| HowToVoteCard {
            party: h.party,
            preferences: to_ids(h.prefs),
        })
        .collect();
    let data = ElectionData::new(
        repr.name,
        repr.vacancies as usize,
        candidates,
        groups,
        merged,
        htv,
    )?;
    Ok(data.with_metadata(repr.year, repr.region))
}

fn compact<T: Serialize>(item: &T) -> String {
    serde_json::to_string(item).expect("canonical records always serialize")
}

fn write_list<T: Serialize>(out: &mut String, key: &str, items: &[T], last: bool) {
    out.push_str(&format!("  \"{key}\": ["));
    if items.is_empty() {
        out.push(']');
    } else {
        for (i, item) in items.iter().enumerate() {
            out.push_str("\n    ");
            out.push_str(&compact(item));
            if i + 1 < items.len() {
                out.push(',');
            }
        }
        out.push_str("\n  ]");
    }
    out.push_str(if last { "\n" } else { ",\n" });
}

/// Serializes an election in canonical form, one record per line.
pub fn to_canonical_json(data: &ElectionData) -> String {
    let candidates: Vec<CandidateRepr> = data
        .candidates()
        .iter()
        .map(|c| CandidateRepr {
            name: c.name.clone(),
            group: c.group.map(|g| g.0),
        })
        .collect();
    let groups: Vec<GroupRepr> = data
        .groups()
        .iter()
        .map(|g| GroupRepr {
            name: g.name.clone(),
        })
        .collect();
    let ballots: Vec<BallotRepr> = data
        .ballots()
        .iter()
        .map(|b| BallotRepr {
            prefs: b.preferences.iter().map(|c| c.0).collect(),
            n: b.multiplicity,
        })
        .collect();
    let htv: Vec<HtvRepr> = data
        .htv_cards()
        .iter()
        .map(|h| HtvRepr {
            party: h.party.clone(),
            prefs: h.preferences.iter().map(|c| c.0).collect(),
        })
        .collect();

    let mut out = String::from("{\n");
    out.push_str(&format!("  \"name\": {},\n", compact(&data.name())));
    if let Some(year) = data.year() {
        out.push_str(&format!("  \"year\": {year},\n"));
    }
    if let Some(region) = data.region() {
        out.push_str(&format!("  \"region\": {},\n", compact(&region)));
    }
    out.push_str(&format!("  \"vacancies\": {},\n", data.vacancies()));
    write_list(&mut out, "candidates", &candidates, false);
    write_list(&mut out, "groups", &groups, false);
    write_list(&mut out, "ballots", &ballots, false);
    write_list(&mut out, "htv", &htv, true);
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_file() {
        let data = parse_canonical(
            br#"{"name":"m","vacancies":1,"candidates":[{"name":"A"}],"ballots":[{"prefs":[0],"n":1}]}"#,
        )
        .unwrap();
        assert_eq!(data.num_candidates(), 1);
        assert_eq!(data.total_papers(), 1);
    }

    #[test]
    fn identical_ballots_merge() {
        let data = parse_canonical(
            br#"{"name":"m","vacancies":1,"candidates":[{"name":"A"},{"name":"B"}],
                 "ballots":[{"prefs":[0,1],"n":1},{"prefs":[1]},{"prefs":[0,1],"n":2}]}"#,
        )
        .unwrap();
        assert_eq!(data.ballots().len(), 2);
        assert_eq!(
            data.ballots()[0],
            Ballot::new(vec![CandidateId(0), CandidateId(1)], 3)
        );
        assert_eq!(data.total_papers(), 4);
    }

    #[test]
    fn duplicate_preference_names_record() {
        let err = parse_canonical(
            br#"{"name":"m","vacancies":1,"candidates":[{"name":"A"},{"name":"B"}],
                 "ballots":[{"prefs":[1]},{"prefs":[0,0],"n":1}]}"#,
        )
        .unwrap_err();
        assert_eq!(
            err.to_string(),
            "ballots[1].prefs: duplicate candidate 0 in preferences"
        );
    }

    #[test]
    fn out_of_range_and_vacancy_errors() {
        let err = parse_canonical(
            br#"{"name":"m","vacancies":1,"candidates":[{"name":"A"}],"ballots":[{"prefs":[4]}]}"#,
        )
        .unwrap_err();
        assert!(err
            .to_string()
            .starts_with("ballots[0].prefs: candidate id 4 out of range"));

        let err = parse_canonical(
            br#"{"name":"m","vacancies":0,"candidates":[{"name":"A"}],"ballots":[{"prefs":[0]}]}"#,
        )
        .unwrap_err();
        assert_eq!(err.to_string(), "vacancies: vacancies must be at least 1");

        let err = parse_canonical(
            br#"{"name":"m","vacancies":1,"candidates":[{"name":"A"}],"ballots":[],"htv":[{"party":"P","prefs":[0,0]}]}"#,
        )
        .unwrap_err();
        assert_eq!(err.to_string(), "ballots: election has no ballot papers");
    }

    #[test]
    fn syntax_errors_carry_position() {
        let err = parse_canonical(b"{\"name\": \"m\",\n \"vacancies\": }").unwrap_err();
        assert!(matches!(err, DataError::Syntax(_)));
        assert!(err.to_string().contains("line 2"));
        let err = parse_canonical(
            br#"{"name":"m","vacancies":1,"candidates":[],"ballots":[],"extra":1}"#,
        )
        .unwrap_err();
        assert!(err.to_string().contains("unknown field"));
    }
}
