//! Song data model, ingestion and tokenization.

mod cache;
mod counts;
mod ingest;
mod tokenize;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use cache::{read_cache, write_cache, CacheError, CACHE_FORMAT, CACHE_VERSION};
pub use counts::{token_counts, EmptySelection, WordCounts};
pub use ingest::{
    ingest, ingest_reader, IngestConfig, IngestError, IngestOutcome, InputFormat, RecordError, Reject,
    RejectReport,
};
pub use tokenize::{tokenize, tokenize_text, TokenizeConfig, TokenizeError, TokenizedLyric};

/// Popularity cohort: chart hits versus everything else.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Cohort {
    Popular,
    Other,
}

impl Cohort {
    pub const ALL: [Cohort; 2] = [Cohort::Popular, Cohort::Other];

    pub fn as_str(self) -> &'static str {
        match self {
            Cohort::Popular => "popular",
            Cohort::Other => "other",
        }
    }
}

impl fmt::Display for Cohort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown cohort {0:?} (expected \"popular\" or \"other\")")]
pub struct UnknownCohort(pub String);

impl FromStr for Cohort {
    type Err = UnknownCohort;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "popular" => Ok(Cohort::Popular),
            "other" => Ok(Cohort::Other),
            other => Err(UnknownCohort(other.to_owned())),
        }
    }
}

/// One song.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SongRecord {
    pub id: String,
    pub title: String,
    pub artist: String,
    pub year: i32,
    pub duration_seconds: Option<f64>,
    pub cohort: Cohort,
    pub lyrics: String,
}

/// Where a corpus came from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub source: String,
    pub config_digest: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CorpusError {
    #[error("{records} records but {tokenized} tokenized lyrics")]
    LengthMismatch { records: usize, tokenized: usize },
    #[error("tokenized lyric at position {position} belongs to {found:?}, expected {expected:?}")]
    IdMismatch { position: usize, expected: String, found: String },
}

/// Immutable collection of songs with their tokenized lyrics, aligned by position.
#[derive(Debug, Clone, PartialEq)]
pub struct Corpus {
    records: Vec<SongRecord>,
    tokenized: Vec<TokenizedLyric>,
    provenance: Provenance,
}

impl Corpus {
    pub fn new(
        records: Vec<SongRecord>,
        tokenized: Vec<TokenizedLyric>,
        provenance: Provenance,
    ) -> Result<Self, CorpusError> {
        if records.len() != tokenized.len() {
            return Err(CorpusError::LengthMismatch {
                records: records.len(),
                tokenized: tokenized.len(),
            });
        }
        for (position, (record, lyric)) in records.iter().zip(&tokenized).enumerate() {
            if record.id != lyric.song_id() {
                return Err(CorpusError::IdMismatch {
                    position,
                    expected: record.id.clone(),
                    found: lyric.song_id().to_owned(),
                });
            }
        }
        Ok(Self {
            records,
            tokenized,
            provenance,
        })
    }

    /// Tokenizes `records` with `config`; records that produce no tokens are returned as errors.
    pub fn from_records(
        records: Vec<SongRecord>,
        config: &TokenizeConfig,
        provenance: Provenance,
    ) -> Result<Self, TokenizeError> {
        let tokenized = records
            .iter()
            .map(|r| tokenize(r, config))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self::new(records, tokenized, provenance).expect("aligned by construction"))
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn records(&self) -> &[SongRecord] {
        &self.records
    }

    pub fn tokenized(&self) -> &[TokenizedLyric] {
        &self.tokenized
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn songs(&self) -> impl Iterator<Item = (&SongRecord, &TokenizedLyric)> + '_ {
        self.records.iter().zip(&self.tokenized)
    }

    pub fn select<'a>(&'a self, filter: &'a SongFilter) -> impl Iterator<Item = (&'a SongRecord, &'a TokenizedLyric)> + 'a {
        self.songs().filter(move |(r, _)| filter.matches(r))
    }

    /// Distinct years present, ascending.
    pub fn years(&self) -> Vec<i32> {
        let mut years: Vec<i32> = self.records.iter().map(|r| r.year).collect();
        years.sort_unstable();
        years.dedup();
        years
    }
}

/// Cohort/year predicate over songs. `None` fields match everything.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SongFilter {
    pub year: Option<i32>,
    pub cohort: Option<Cohort>,
}

impl SongFilter {
    pub fn all() -> Self {
        Self::default()
    }

    pub fn year(year: i32) -> Self {
        Self { year: Some(year), cohort: None }
    }

    pub fn cohort(cohort: Cohort) -> Self {
        Self { year: None, cohort: Some(cohort) }
    }

    pub fn with_year(self, year: Option<i32>) -> Self {
        Self { year, ..self }
    }

    pub fn matches(&self, record: &SongRecord) -> bool {
        self.year.is_none_or(|y| y == record.year) && self.cohort.is_none_or(|c| c == record.cohort)
    }
}

#[cfg(test)]
pub(crate) mod test_support {
    use super::*;

    pub fn song(id: &str, year: i32, cohort: Cohort, lyrics: &str) -> SongRecord {
        SongRecord {
            id: id.into(),
            title: format!("title {id}"),
            artist: "artist".into(),
            year,
            duration_seconds: None,
            cohort,
            lyrics: lyrics.into(),
        }
    }

    pub fn corpus(songs: Vec<SongRecord>) -> Corpus {
        Corpus::from_records(
            songs,
            &TokenizeConfig::default(),
            Provenance {
                source: "memory".into(),
                config_digest: String::new(),
            },
        )
        .unwrap()
    }
}
