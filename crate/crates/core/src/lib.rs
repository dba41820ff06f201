//! Lyric style metrics and word-embedding association tests for song corpora.
//!
//! The crate is organised around the pipeline it serves:
//!
//! * [`corpus`]: the song data model, JSONL/CSV ingestion, deterministic tokenization
//!   and the on-disk corpus cache.
//! * [`style`]: per-song metrics (length, speed, repetitiveness, Flesch-Kincaid grade,
//!   swear usage), year/cohort aggregates, word-rank series and top-word lists.
//! * [`embeddings`]: word vector tables, the text vector format, cosine similarity and a
//!   skip-gram negative-sampling trainer.
//! * [`weat`]: the Word Embedding Association Test, its permutation p-value and the
//!   bundled eight-test battery.

pub mod corpus;
pub mod digest;
pub mod embeddings;
pub mod style;
pub mod weat;

pub use corpus::{Cohort, Corpus, SongFilter, SongRecord, TokenizedLyric};
pub use embeddings::{EmbeddingTable, SgnsConfig};
pub use style::{StyleMetrics, YearCohortAggregate};
pub use weat::{WeatResult, WeatTest};
