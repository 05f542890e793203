//! Optional TOML configuration: service defaults and named rule sets.
//!
//! ```toml
//! port = 8080
//! root = "elections"
//! default_rules = "senate"
//!
//! [rules.senate]
//! surplus_method = "unweighted-inclusive-gregory"
//! rounding = "truncate-tallies-to-integer"
//! min_preferences = 12
//! ```

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Deserialize;
use stv_core::{Rounding, RuleSet, SurplusMethod};
use thiserror::Error;

pub const DEFAULT_PORT: u16 = 8080;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("invalid config {path}: {source}")]
    Parse {
        path: PathBuf,
        source: toml::de::Error,
    },
    #[error("rule set {0:?} needs min_preferences of at least 1")]
    InvalidRules(String),
    #[error("unknown rule set {name:?} (known: {known})")]
    UnknownRules { name: String, known: String },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RuleSpec {
    surplus_method: SurplusMethod,
    #[serde(default = "exact")]
    rounding: Rounding,
    #[serde(default = "one")]
    min_preferences: usize,
}

fn exact() -> Rounding {
    Rounding::ExactRational
}

fn one() -> usize {
    1
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileRepr {
    port: Option<u16>,
    root: Option<PathBuf>,
    default_rules: Option<String>,
    #[serde(default)]
    rules: BTreeMap<String, RuleSpec>,
}

#[derive(Debug, Clone)]
pub struct Config {
    pub port: u16,
    pub root: Option<PathBuf>,
    pub default_rules: String,
    rules: BTreeMap<String, RuleSet>,
}

impl Default for Config {
    fn default() -> Self {
        let rules = [RuleSet::default(), RuleSet::weighted()]
            .into_iter()
            .map(|r| (r.name.clone(), r))
            .collect();
        Config {
            port: DEFAULT_PORT,
            root: None,
            default_rules: RuleSet::default().name,
            rules,
        }
    }
}

impl Config {
    pub fn parse(text: &str, path: &Path) -> Result<Self, ConfigError> {
        let file: FileRepr = toml::from_str(text).map_err(|source| ConfigError::Parse {
            path: path.to_path_buf(),
            source,
        })?;
        let mut config = Config::default();
        if let Some(port) = file.port {
            config.port = port;
        }
        // Relative store roots are taken from the config file's directory.
        config.root = file.root.map(|r| match path.parent() {
            Some(dir) if r.is_relative() => dir.join(r),
            _ => r,
        });
        for (name, spec) in file.rules {
            if spec.min_preferences < 1 {
                return Err(ConfigError::InvalidRules(name));
            }
            let rules = RuleSet::new(
                name.clone(),
                spec.surplus_method,
                spec.rounding,
                spec.min_preferences,
            );
            config.rules.insert(name, rules);
        }
        if let Some(name) = file.default_rules {
            config.rule_set(&name)?;
            config.default_rules = name;
        }
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text, path)
    }

    /// Loads `path` if given, else the built-in defaults.
    pub fn load_or_default(path: Option<&Path>) -> Result<Self, ConfigError> {
        path.map_or_else(|| Ok(Config::default()), Self::load)
    }

    pub fn rule_set(&self, name: &str) -> Result<&RuleSet, ConfigError> {
        self.rules
            .get(name)
            .ok_or_else(|| ConfigError::UnknownRules {
                name: name.to_string(),
                known: self.rule_names().join(", "),
            })
    }

    /// `name` if given, else the configured default.
    pub fn resolve(&self, name: Option<&str>) -> Result<&RuleSet, ConfigError> {
        self.rule_set(name.unwrap_or(&self.default_rules))
    }

    pub fn rule_names(&self) -> Vec<String> {
        self.rules.keys().cloned().collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn built_in_rule_sets() {
        let config = Config::default();
        assert_eq!(config.rule_names(), ["default", "weighted"]);
        assert_eq!(config.resolve(None).unwrap(), &RuleSet::default());
        assert!(config.rule_set("senate").is_err());
    }

    #[test]
    fn named_rules_and_default() {
        let text = r#"
            port = 9000
            root = "data"
            default_rules = "senate"
            [rules.senate]
            surplus_method = "unweighted-inclusive-gregory"
            rounding = "truncate-tallies-to-integer"
            min_preferences = 12
        "#;
        let config = Config::parse(text, Path::new("/etc/stv/stv.toml")).unwrap();
        assert_eq!(config.port, 9000);
        assert_eq!(config.root, Some(PathBuf::from("/etc/stv/data")));
        let senate = config.resolve(None).unwrap();
        assert_eq!(senate.min_preferences, 12);
        assert_eq!(senate.rounding, Rounding::TruncateTalliesToInteger);
    }

    #[test]
    fn rejects_bad_files() {
        let p = Path::new("x.toml");
        assert!(Config::parse("colour = 1", p).is_err());
        assert!(Config::parse("default_rules = \"nope\"", p).is_err());
        let zero =
            "[rules.r]\nsurplus_method = \"weighted-inclusive-gregory\"\nmin_preferences = 0";
        assert!(matches!(
            Config::parse(zero, p),
            Err(ConfigError::InvalidRules(_))
        ));
    }
}
