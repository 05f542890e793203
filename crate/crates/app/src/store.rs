//! Directory of canonical election files, indexed by file stem. Elections
//! are parsed on first use and baseline transcripts are computed once per
//! rule set; both are immutable afterwards.

use std::collections::{BTreeMap, HashMap};
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Deserialize, Serialize};
use stv_core::data::parse_canonical;
use stv_core::{tabulate, ElectionData, RuleSet, Transcript};
use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum StoreError {
    #[error("cannot read election store {path}: {reason}")]
    Unreadable { path: PathBuf, reason: String },
    #[error("{path}: {reason}")]
    BadFile { path: PathBuf, reason: String },
    #[error("unknown election {0:?}")]
    UnknownElection(String),
    #[error("count failed for {id}: {reason}")]
    Count { id: String, reason: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ElectionMeta {
    pub id: String,
    pub name: String,
    pub year: Option<u32>,
    pub region: Option<String>,
    pub vacancies: i64,
    pub candidates: usize,
}

/// Just the header fields of a canonical file.
#[derive(Deserialize)]
struct Header {
    name: String,
    #[serde(default)]
    year: Option<u32>,
    #[serde(default)]
    region: Option<String>,
    vacancies: i64,
    candidates: Vec<serde::de::IgnoredAny>,
}

type Cell<T> = Arc<OnceLock<Result<Arc<T>, StoreError>>>;

struct Entry {
    path: PathBuf,
    meta: ElectionMeta,
    data: Cell<ElectionData>,
    baselines: Mutex<HashMap<String, Cell<Transcript>>>,
}

pub struct ElectionStore {
    root: PathBuf,
    entries: BTreeMap<String, Entry>,
}

fn bad(path: &Path, reason: impl ToString) -> StoreError {
    StoreError::BadFile {
        path: path.to_path_buf(),
        reason: reason.to_string(),
    }
}

impl ElectionStore {
    /// Indexes every `*.json` file directly under `root`.
    pub fn open(root: impl Into<PathBuf>) -> Result<Self, StoreError> {
        let root = root.into();
        let unreadable = |e: std::io::Error| StoreError::Unreadable {
            path: root.clone(),
            reason: e.to_string(),
        };
        let mut entries = BTreeMap::new();
        for item in std::fs::read_dir(&root).map_err(unreadable)? {
            let path = item.map_err(unreadable)?.path();
            if path.extension().and_then(|e| e.to_str()) != Some("json") || !path.is_file() {
                continue;
            }
            let Some(id) = path
                .file_stem()
                .and_then(|s| s.to_str())
                .map(str::to_string)
            else {
                continue;
            };
            let bytes = std::fs::read(&path).map_err(|e| bad(&path, e))?;
            let header: Header = serde_json::from_slice(&bytes).map_err(|e| bad(&path, e))?;
            let meta = ElectionMeta {
                id: id.clone(),
                name: header.name,
                year: header.year,
                region: header.region,
                vacancies: header.vacancies,
                candidates: header.candidates.len(),
            };
            entries.insert(
                id,
                Entry {
                    path,
                    meta,
                    data: Cell::default(),
                    baselines: Mutex::default(),
                },
            );
        }
        Ok(ElectionStore { root, entries })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    /// Metadata for every election, sorted by id.
    pub fn list(&self) -> Vec<ElectionMeta> {
        self.entries.values().map(|e| e.meta.clone()).collect()
    }

    fn entry(&self, id: &str) -> Result<&Entry, StoreError> {
        self.entries
            .get(id)
            .ok_or_else(|| StoreError::UnknownElection(id.to_string()))
    }

    pub fn meta(&self, id: &str) -> Result<&ElectionMeta, StoreError> {
        Ok(&self.entry(id)?.meta)
    }

    pub fn election(&self, id: &str) -> Result<Arc<ElectionData>, StoreError> {
        let entry = self.entry(id)?;
        entry
            .data
            .get_or_init(|| {
                let bytes = std::fs::read(&entry.path).map_err(|e| bad(&entry.path, e))?;
                parse_canonical(&bytes)
                    .map(Arc::new)
                    .map_err(|e| bad(&entry.path, e))
            })
            .clone()
    }

    /// The count of election `id` under `rules`, computed on first request.
    /// Rule sets are identified by name.
    pub fn baseline(&self, id: &str, rules: &RuleSet) -> Result<Arc<Transcript>, StoreError> {
        let entry = self.entry(id)?;
        let cell = entry
            .baselines
            .lock()
            .expect("baseline index lock poisoned")
            .entry(rules.name.clone())
            .or_default()
            .clone();
        cell.get_or_init(|| {
            let data = self.election(id)?;
            tabulate(&data, rules)
                .map(Arc::new)
                .map_err(|e| StoreError::Count {
                    id: id.to_string(),
                    reason: e.to_string(),
                })
        })
        .clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SMALL: &str = r#"{"name":"Small","year":2016,"vacancies":1,
        "candidates":[{"name":"A"},{"name":"B"}],
        "ballots":[{"prefs":[0],"n":3},{"prefs":[1,0],"n":2}]}"#;

    #[test]
    fn indexes_sorted_by_id_and_loads_lazily() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("zeta.json"), SMALL).unwrap();
        std::fs::write(dir.path().join("alpha.json"), SMALL).unwrap();
        std::fs::write(dir.path().join("notes.txt"), "ignored").unwrap();
        let store = ElectionStore::open(dir.path()).unwrap();
        let ids: Vec<String> = store.list().into_iter().map(|m| m.id).collect();
        assert_eq!(ids, ["alpha", "zeta"]);
        assert_eq!(store.meta("alpha").unwrap().candidates, 2);
        assert_eq!(store.meta("alpha").unwrap().year, Some(2016));

        let rules = RuleSet::default();
        let first = store.baseline("alpha", &rules).unwrap();
        let again = store.baseline("alpha", &rules).unwrap();
        assert!(Arc::ptr_eq(&first, &again));
        assert!(matches!(
            store.election("missing"),
            Err(StoreError::UnknownElection(_))
        ));
    }

    #[test]
    fn bad_files_and_directories() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("broken.json"), "{").unwrap();
        assert!(matches!(
            ElectionStore::open(dir.path()),
            Err(StoreError::BadFile { .. })
        ));
        assert!(matches!(
            ElectionStore::open(dir.path().join("absent")),
            Err(StoreError::Unreadable { .. })
        ));
    }

    #[test]
    fn invalid_body_reported_on_load() {
        let dir = tempfile::tempdir().unwrap();
        let dup = SMALL.replace("[1,0]", "[1,1]");
        std::fs::write(dir.path().join("dup.json"), dup).unwrap();
        let store = ElectionStore::open(dir.path()).unwrap();
        let err = store.election("dup").unwrap_err();
        assert!(err.to_string().contains("ballots[1].prefs"), "{err}");
    }
}
