//! Word Embedding Association Test.
//!
//! A test compares two target lists `X`, `Y` against two attribute lists `A`, `B`.
//! Each target word gets the association score
//! `s(w, A, B) = mean_a cos(w, a) - mean_b cos(w, b)`; the effect size is the
//! difference of the mean scores of `X` and `Y` divided by the population standard
//! deviation over `X ∪ Y`, and the one-sided p-value is the share of equal-size
//! re-partitions of `X ∪ Y` whose statistic exceeds the observed one.

mod report;
mod stats;

use std::collections::HashSet;
use std::fmt;
use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;
use unicode_normalization::UnicodeNormalization;

use crate::embeddings::{EmbeddingError, EmbeddingTable};

pub use report::{write_results_csv, write_summary};
pub use stats::{
    association, association_of, effect_size_from_scores, partition_count, permutation_p_from_scores,
    test_statistic_from_scores, EXACT_BUDGET,
};

const BUNDLED_BATTERY: &str = include_str!("../../data/weat8.json");

/// Default Monte Carlo sample count.
pub const DEFAULT_SAMPLES: u64 = 100_000;

#[derive(Debug, Error)]
pub enum WeatError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("cannot parse test battery: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("test battery is empty")]
    EmptyBattery,
    #[error("test {name:?}: {reason}")]
    InvalidTest { name: String, reason: String },
    #[error("word {0:?} is not in the embedding table")]
    OutOfVocabulary(String),
    #[error("strict policy: {} words missing ({})", .0.len(), .0.join(", "))]
    MissingWords(Vec<String>),
    #[error("list {list} has {found} words after filtering, at least {required} required")]
    UnderFilled { list: &'static str, found: usize, required: usize },
    #[error("target lists differ in size ({x} vs {y})")]
    UnequalTargets { x: usize, y: usize },
    #[error("all association scores are equal; effect size is undefined")]
    Degenerate,
    #[error("exact enumeration needs {partitions} partitions, above the budget of {budget}; use Monte Carlo")]
    ExactBudget { partitions: u128, budget: u64 },
    #[error("Monte Carlo mode needs at least one sample")]
    ZeroSamples,
    #[error(transparent)]
    Embedding(#[from] EmbeddingError),
}

/// One association test as written in a battery file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeatTest {
    pub name: String,
    pub targets_x: Vec<String>,
    pub targets_y: Vec<String>,
    pub attributes_a: Vec<String>,
    pub attributes_b: Vec<String>,
}

impl WeatTest {
    /// Lowercases and NFC-normalizes every word, then checks the lists are
    /// non-empty, duplicate-free and pairwise disjoint.
    pub fn normalized(mut self) -> Result<Self, WeatError> {
        for list in [&mut self.targets_x, &mut self.targets_y, &mut self.attributes_a, &mut self.attributes_b] {
            for word in list.iter_mut() {
                *word = normalize_word(word);
            }
        }
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<(), WeatError> {
        let invalid = |reason: String| WeatError::InvalidTest {
            name: self.name.clone(),
            reason,
        };
        let lists = self.lists();
        let mut seen: HashSet<&str> = HashSet::new();
        for (label, list) in lists {
            if list.is_empty() {
                return Err(invalid(format!("list {label} is empty")));
            }
            for word in list {
                if word.is_empty() || word.chars().any(char::is_whitespace) {
                    return Err(invalid(format!("list {label} has an invalid word {word:?}")));
                }
                if !seen.insert(word) {
                    return Err(invalid(format!("word {word:?} appears more than once")));
                }
            }
        }
        Ok(())
    }

    pub fn lists(&self) -> [(&'static str, &[String]); 4] {
        [
            ("x", &self.targets_x),
            ("y", &self.targets_y),
            ("a", &self.attributes_a),
            ("b", &self.attributes_b),
        ]
    }

    /// The same test with `X` and `Y` exchanged.
    pub fn swap_targets(&self) -> Self {
        Self {
            targets_x: self.targets_y.clone(),
            targets_y: self.targets_x.clone(),
            ..self.clone()
        }
    }

    /// The same test with `A` and `B` exchanged.
    pub fn swap_attributes(&self) -> Self {
        Self {
            attributes_a: self.attributes_b.clone(),
            attributes_b: self.attributes_a.clone(),
            ..self.clone()
        }
    }
}

fn normalize_word(word: &str) -> String {
    let lowered = word.trim().nfc().collect::<String>().to_lowercase();
    lowered.nfc().collect()
}

/// Parses a JSON list of tests and normalizes each one.
pub fn parse_battery(json: &str) -> Result<Vec<WeatTest>, WeatError> {
    let tests: Vec<WeatTest> = serde_json::from_str(json)?;
    if tests.is_empty() {
        return Err(WeatError::EmptyBattery);
    }
    tests.into_iter().map(WeatTest::normalized).collect()
}

pub fn read_battery<R: Read>(mut reader: R) -> Result<Vec<WeatTest>, WeatError> {
    let mut text = String::new();
    reader.read_to_string(&mut text).map_err(|source| WeatError::Io {
        path: "<reader>".into(),
        source,
    })?;
    parse_battery(&text)
}

pub fn load_battery(path: &Path) -> Result<Vec<WeatTest>, WeatError> {
    let text = std::fs::read_to_string(path).map_err(|source| WeatError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_battery(&text)
}

/// The eight bundled tests.
pub fn bundled_battery() -> Vec<WeatTest> {
    parse_battery(BUNDLED_BATTERY).expect("bundled battery is valid")
}

/// Every word used by a battery; handy for loading only the needed rows of a large vector file.
pub fn battery_words(tests: &[WeatTest]) -> HashSet<String> {
    tests
        .iter()
        .flat_map(|t| t.lists().into_iter().flat_map(|(_, l)| l.iter().cloned()))
        .collect()
}

/// What happens to test words that are missing from the table.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OovPolicy {
    /// Drop missing words, then truncate the longer target list from its end.
    #[default]
    DropAndBalance,
    /// Any missing word fails the test.
    Strict,
}

impl std::str::FromStr for OovPolicy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "drop_and_balance" | "drop" => Ok(OovPolicy::DropAndBalance),
            "strict" => Ok(OovPolicy::Strict),
            other => Err(format!("unknown OOV policy {other:?} (expected drop_and_balance or strict)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PValueMode {
    Exact,
    MonteCarlo { samples: u64, seed: u64 },
}

impl fmt::Display for PValueMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PValueMode::Exact => f.write_str("exact"),
            PValueMode::MonteCarlo { samples, seed } => write!(f, "monte_carlo(n={samples};seed={seed})"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeatOptions {
    pub policy: OovPolicy,
    pub mode: PValueMode,
    /// Count partitions whose statistic equals the observed one as well.
    pub inclusive: bool,
}

impl Default for WeatOptions {
    fn default() -> Self {
        Self {
            policy: OovPolicy::DropAndBalance,
            mode: PValueMode::Exact,
            inclusive: false,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct ListCoverage {
    pub requested: usize,
    pub found: usize,
}

impl fmt::Display for ListCoverage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.found, self.requested)
    }
}

/// Words used per list; `found` counts words kept after OOV filtering and balancing.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Coverage {
    pub x: ListCoverage,
    pub y: ListCoverage,
    pub a: ListCoverage,
    pub b: ListCoverage,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeatResult {
    pub test_name: String,
    pub effect_size: f64,
    pub test_statistic: f64,
    pub p_value: f64,
    pub p_method: PValueMode,
    pub coverage: Coverage,
    pub dropped_words: Vec<String>,
}

/// Word lists of a test after applying an [`OovPolicy`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Resolved<'t> {
    pub x: Vec<&'t str>,
    pub y: Vec<&'t str>,
    pub a: Vec<&'t str>,
    pub b: Vec<&'t str>,
    pub coverage: Coverage,
    /// Missing words first, then words removed to balance the target lists.
    pub dropped_words: Vec<String>,
}

impl<'t> Resolved<'t> {
    pub fn new(test: &'t WeatTest, table: &EmbeddingTable, policy: OovPolicy) -> Self {
        let mut dropped = Vec::new();
        let mut keep = |list: &'t [String]| -> Vec<&'t str> {
            list.iter()
                .filter_map(|w| {
                    if table.vector(w).is_ok() {
                        Some(w.as_str())
                    } else {
                        dropped.push(w.clone());
                        None
                    }
                })
                .collect()
        };
        let mut x = keep(&test.targets_x);
        let mut y = keep(&test.targets_y);
        let a = keep(&test.attributes_a);
        let b = keep(&test.attributes_b);
        if policy == OovPolicy::DropAndBalance {
            let n = x.len().min(y.len());
            for longer in [&mut x, &mut y] {
                dropped.extend(longer.drain(n..).map(str::to_owned));
            }
        }
        let cov = |requested: &[String], found: &[&str]| ListCoverage {
            requested: requested.len(),
            found: found.len(),
        };
        let coverage = Coverage {
            x: cov(&test.targets_x, &x),
            y: cov(&test.targets_y, &y),
            a: cov(&test.attributes_a, &a),
            b: cov(&test.attributes_b, &b),
        };
        Self {
            x,
            y,
            a,
            b,
            coverage,
            dropped_words: dropped,
        }
    }

    /// Checks the filtered lists can support the statistics.
    pub fn check(&self, policy: OovPolicy) -> Result<(), WeatError> {
        if policy == OovPolicy::Strict && !self.dropped_words.is_empty() {
            return Err(WeatError::MissingWords(self.dropped_words.clone()));
        }
        for (list, words) in [("x", &self.x), ("y", &self.y), ("a", &self.a), ("b", &self.b)] {
            if words.len() < 2 {
                return Err(WeatError::UnderFilled {
                    list,
                    found: words.len(),
                    required: 2,
                });
            }
        }
        if self.x.len() != self.y.len() {
            return Err(WeatError::UnequalTargets {
                x: self.x.len(),
                y: self.y.len(),
            });
        }
        Ok(())
    }

    /// Association scores of `X` and `Y`.
    pub fn scores(&self, table: &EmbeddingTable) -> Result<(Vec<f64>, Vec<f64>), WeatError> {
        let score = |w: &&str| association(table, w, &self.a, &self.b);
        let sx = self.x.iter().map(score).collect::<Result<_, _>>()?;
        let sy = self.y.iter().map(score).collect::<Result<_, _>>()?;
        Ok((sx, sy))
    }
}

/// Outcome of one battery entry; failures keep their coverage report.
#[derive(Debug)]
pub struct BatteryEntry {
    pub test_name: String,
    pub coverage: Coverage,
    pub dropped_words: Vec<String>,
    pub outcome: Result<WeatResult, WeatError>,
}

/// Runs one test. `stream` selects the Monte Carlo random stream.
pub fn run_test(test: &WeatTest, table: &EmbeddingTable, options: &WeatOptions, stream: u64) -> BatteryEntry {
    let resolved = Resolved::new(test, table, options.policy);
    let outcome = (|| {
        resolved.check(options.policy)?;
        let (sx, sy) = resolved.scores(table)?;
        let effect_size = effect_size_from_scores(&sx, &sy)?;
        let test_statistic = test_statistic_from_scores(&sx, &sy);
        let p_value = permutation_p_from_scores(&sx, &sy, options.mode, options.inclusive, stream)?;
        Ok(WeatResult {
            test_name: test.name.clone(),
            effect_size,
            test_statistic,
            p_value,
            p_method: options.mode,
            coverage: resolved.coverage,
            dropped_words: resolved.dropped_words.clone(),
        })
    })();
    BatteryEntry {
        test_name: test.name.clone(),
        coverage: resolved.coverage,
        dropped_words: resolved.dropped_words,
        outcome,
    }
}

/// Runs every test in order. Test `i` uses random stream `i`, so results do not
/// depend on scheduling.
pub fn run_battery(tests: &[WeatTest], table: &EmbeddingTable, options: &WeatOptions) -> Vec<BatteryEntry> {
    use rayon::prelude::*;
    tests
        .par_iter()
        .enumerate()
        .map(|(i, t)| run_test(t, table, options, i as u64))
        .collect()
}

/// Effect size of a single test.
pub fn effect_size(test: &WeatTest, table: &EmbeddingTable, policy: OovPolicy) -> Result<f64, WeatError> {
    let resolved = Resolved::new(test, table, policy);
    resolved.check(policy)?;
    let (sx, sy) = resolved.scores(table)?;
    effect_size_from_scores(&sx, &sy)
}

/// Test statistic of a single test.
pub fn test_statistic(test: &WeatTest, table: &EmbeddingTable, policy: OovPolicy) -> Result<f64, WeatError> {
    let resolved = Resolved::new(test, table, policy);
    resolved.check(policy)?;
    let (sx, sy) = resolved.scores(table)?;
    Ok(test_statistic_from_scores(&sx, &sy))
}

/// Permutation p-value of a single test, using random stream 0.
pub fn permutation_p(test: &WeatTest, table: &EmbeddingTable, options: &WeatOptions) -> Result<f64, WeatError> {
    let resolved = Resolved::new(test, table, options.policy);
    resolved.check(options.policy)?;
    let (sx, sy) = resolved.scores(table)?;
    permutation_p_from_scores(&sx, &sy, options.mode, options.inclusive, 0)
}
