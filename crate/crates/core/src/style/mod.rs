//! Per-song lyric style metrics, year/cohort aggregates, word ranks and top words.

mod aggregate;
mod lexicon;
mod metrics;
mod ranks;
pub mod report;
mod syllables;

use thiserror::Error;

use crate::corpus::SongFilter;

pub use aggregate::{aggregate, YearCohortAggregate};
pub use lexicon::{LexiconError, SwearLexicon, WordList};
pub use metrics::{
    corpus_metrics, fk_grade, fk_grade_from_counts, length_words, repetitiveness, repetitiveness_of_lines, speed,
    swear_stats, StyleMetrics,
};
pub use ranks::{counts_by_year, rank_series, rank_words, top_from_counts, top_words, RankSeries};
pub use syllables::count_syllables;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StyleError {
    #[error("lyric has no lines")]
    NoLines,
    #[error("no songs match the selection {0:?}")]
    EmptySelection(SongFilter),
    #[error("word list is empty")]
    EmptyWordList,
    #[error("top-k requires k >= 1")]
    ZeroTopK,
    #[error("metrics do not match corpus: {0}")]
    MetricsMismatch(String),
}
