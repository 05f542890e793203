//! Converts a generic preference CSV plus a candidate manifest into a
//! canonical election file. The layout is described in `docs/ingest.md`.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use stv_core::data::{is_formal, CandidateSpec, DataError, HowToVoteCard};
use stv_core::{Ballot, CandidateId, ElectionData, RuleSet};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("invalid manifest: {0}")]
    Manifest(#[from] serde_json::Error),
    #[error("manifest: {0}")]
    ManifestData(DataError),
    #[error("line {line}: {found} columns but the manifest lists {expected} candidates")]
    ColumnCount {
        line: u64,
        found: usize,
        expected: usize,
    },
    #[error("header column {column} is {found:?}, manifest candidate is {expected:?}")]
    HeaderMismatch {
        column: usize,
        found: String,
        expected: String,
    },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("no formal ballots in input")]
    NoFormalBallots,
    #[error("election: {0}")]
    Election(DataError),
}

/// The canonical file without `ballots`.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Manifest {
    name: String,
    #[serde(default)]
    year: Option<u32>,
    #[serde(default)]
    region: Option<String>,
    vacancies: usize,
    candidates: Vec<ManifestCandidate>,
    #[serde(default)]
    groups: Vec<ManifestGroup>,
    #[serde(default)]
    htv: Vec<ManifestCard>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ManifestCandidate {
    name: String,
    #[serde(default)]
    group: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ManifestGroup {
    name: String,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ManifestCard {
    party: String,
    prefs: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SkippedRow {
    pub line: u64,
    pub reason: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct IngestReport {
    pub rows: u64,
    pub formal: u64,
    pub informal: u64,
    /// Formal rows whose marks continued past a gap or repeated rank.
    pub truncated: u64,
    pub skipped: Vec<SkippedRow>,
}

impl fmt::Display for IngestReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{} rows: {} formal ({} truncated), {} informal, {} skipped",
            self.rows,
            self.formal,
            self.truncated,
            self.informal,
            self.skipped.len()
        )?;
        for s in &self.skipped {
            writeln!(f, "warning: line {}: {}", s.line, s.reason)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Row {
    /// Preferences up to the first missing or repeated rank, and whether
    /// marks were dropped after it.
    Ranked(Vec<CandidateId>, bool),
    Unparseable(String),
}

fn parse_cell(cell: &str) -> Result<Option<u32>, String> {
    let cell = cell.trim();
    if cell.is_empty() {
        return Ok(None);
    }
    match cell.parse::<u32>() {
        Ok(r) if r >= 1 => Ok(Some(r)),
        _ => Err(format!("unparseable rank {cell:?}")),
    }
}

fn parse_row(record: &csv::StringRecord) -> Row {
    let mut ranks = Vec::with_capacity(record.len());
    for cell in record {
        match parse_cell(cell) {
            Ok(r) => ranks.push(r),
            Err(e) => return Row::Unparseable(e),
        }
    }
    let marked = ranks.iter().flatten().count();
    let mut prefs = Vec::new();
    for rank in 1.. {
        let mut holders = ranks
            .iter()
            .enumerate()
            .filter(|(_, r)| **r == Some(rank))
            .map(|(c, _)| CandidateId(c));
        match (holders.next(), holders.next()) {
            (Some(c), None) => prefs.push(c),
            _ => break,
        }
    }
    let truncated = prefs.len() < marked;
    Row::Ranked(prefs, truncated)
}

fn is_header(record: &csv::StringRecord) -> bool {
    record
        .iter()
        .all(|c| !c.trim().is_empty() && c.trim().parse::<i64>().is_err())
}

/// Reads rank rows in `csv` against `manifest`. Rows whose marks fall short
/// of `rules.min_preferences` are dropped as informal; rows with
/// unreadable cells are skipped and reported.
pub fn ingest(
    csv: &[u8],
    manifest: &[u8],
    rules: &RuleSet,
) -> Result<(ElectionData, IngestReport), IngestError> {
    let manifest: Manifest = serde_json::from_slice(manifest)?;
    let names: Vec<&str> = manifest
        .candidates
        .iter()
        .map(|c| c.name.as_str())
        .collect();
    let expected = names.len();

    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(csv);
    let mut report = IngestReport::default();
    let mut ballots: Vec<Ballot> = Vec::new();
    let mut seen: HashMap<Vec<CandidateId>, usize> = HashMap::new();

    for (i, record) in reader.records().enumerate() {
        let record = record?;
        let line = record.position().map_or(i as u64 + 1, |p| p.line());
        if record.len() != expected {
            return Err(IngestError::ColumnCount {
                line,
                found: record.len(),
                expected,
            });
        }
        if i == 0 && is_header(&record) {
            for (column, (found, expected)) in record.iter().zip(&names).enumerate() {
                if found.trim() != *expected {
                    return Err(IngestError::HeaderMismatch {
                        column: column + 1,
                        found: found.trim().to_string(),
                        expected: expected.to_string(),
                    });
                }
            }
            continue;
        }

        report.rows += 1;
        match parse_row(&record) {
            Row::Unparseable(reason) => report.skipped.push(SkippedRow { line, reason }),
            Row::Ranked(prefs, truncated) => {
                if prefs.is_empty() || !is_formal(&prefs, rules) {
                    report.informal += 1;
                    continue;
                }
                report.formal += 1;
                report.truncated += u64::from(truncated);
                match seen.get(&prefs) {
                    Some(&k) => ballots[k].multiplicity += 1,
                    None => {
                        seen.insert(prefs.clone(), ballots.len());
                        ballots.push(Ballot::single(prefs));
                    }
                }
            }
        }
    }
    if ballots.is_empty() {
        return Err(IngestError::NoFormalBallots);
    }

    let specs = manifest
        .candidates
        .into_iter()
        .map(|c| match c.group {
            Some(g) => CandidateSpec::in_group(c.name, g),
            None => CandidateSpec::new(c.name),
        })
        .collect();
    let cards = manifest
        .htv
        .into_iter()
        .map(|c| HowToVoteCard {
            party: c.party,
            preferences: c.prefs.into_iter().map(CandidateId).collect(),
        })
        .collect();
    let data = ElectionData::new(
        manifest.name,
        manifest.vacancies,
        specs,
        manifest.groups.into_iter().map(|g| g.name).collect(),
        ballots,
        cards,
    )
    .map_err(IngestError::Election)?
    .with_metadata(manifest.year, manifest.region);
    Ok((data, report))
}
