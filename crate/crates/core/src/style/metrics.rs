use std::collections::HashSet;

use rayon::prelude::*;
use serde::Serialize;

use super::lexicon::SwearLexicon;
use super::syllables::count_syllables;
use super::StyleError;
use crate::corpus::{Corpus, SongRecord, TokenizedLyric};

/// Per-song style metrics.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StyleMetrics {
    pub song_id: String,
    pub length_words: u64,
    pub duration_seconds: Option<f64>,
    /// Words per second; present iff `duration_seconds` is.
    pub speed_wps: Option<f64>,
    /// Percentage of lines that repeat an earlier line, in `[0, 100)`.
    pub repetitiveness_pct: f64,
    /// Flesch-Kincaid grade level with lyric lines as sentences.
    pub fk_grade: f64,
    pub swear_count: u64,
    pub swear_rate: f64,
}

impl StyleMetrics {
    pub fn compute(record: &SongRecord, lyric: &TokenizedLyric, swears: &SwearLexicon) -> Self {
        let length = length_words(lyric);
        let (swear_count, swear_rate) = swear_stats(lyric, swears);
        Self {
            song_id: record.id.clone(),
            length_words: length,
            duration_seconds: record.duration_seconds,
            speed_wps: record.duration_seconds.map(|d| speed(length, d)),
            repetitiveness_pct: repetitiveness(lyric),
            fk_grade: fk_grade(lyric),
            swear_count,
            swear_rate,
        }
    }
}

/// Metrics for every song of `corpus`, in corpus order.
pub fn corpus_metrics(corpus: &Corpus, swears: &SwearLexicon) -> Vec<StyleMetrics> {
    corpus
        .records()
        .par_iter()
        .zip(corpus.tokenized().par_iter())
        .map(|(record, lyric)| StyleMetrics::compute(record, lyric, swears))
        .collect()
}

/// Number of word tokens.
pub fn length_words(lyric: &TokenizedLyric) -> u64 {
    lyric.token_count() as u64
}

/// Words per second. `duration_seconds` must be positive.
pub fn speed(length_words: u64, duration_seconds: f64) -> f64 {
    debug_assert!(duration_seconds > 0.0);
    length_words as f64 / duration_seconds
}

/// `(1 - unique_lines / total_lines) * 100` over token-normalized lines.
pub fn repetitiveness(lyric: &TokenizedLyric) -> f64 {
    repetitiveness_of_lines(lyric.lines()).expect("tokenized lyrics have at least one line")
}

/// Repetitiveness of arbitrary line strings, compared exactly.
pub fn repetitiveness_of_lines<'a, I>(lines: I) -> Result<f64, StyleError>
where
    I: IntoIterator<Item = &'a str>,
{
    let mut unique = HashSet::new();
    let mut total = 0usize;
    for line in lines {
        total += 1;
        unique.insert(line);
    }
    if total == 0 {
        return Err(StyleError::NoLines);
    }
    Ok((1.0 - unique.len() as f64 / total as f64) * 100.0)
}

/// Flesch-Kincaid grade from raw counts.
pub fn fk_grade_from_counts(words: u64, sentences: u64, syllables: u64) -> f64 {
    let words_per_sentence = words as f64 / sentences as f64;
    let syllables_per_word = syllables as f64 / words as f64;
    0.39 * words_per_sentence + 11.8 * syllables_per_word - 15.59
}

/// Flesch-Kincaid grade level treating every lyric line as one sentence.
pub fn fk_grade(lyric: &TokenizedLyric) -> f64 {
    let syllables: u64 = lyric.tokens().map(|t| u64::from(count_syllables(t))).sum();
    fk_grade_from_counts(length_words(lyric), lyric.line_count() as u64, syllables)
}

/// `(count, count / length)` of tokens found in `lexicon`.
pub fn swear_stats(lyric: &TokenizedLyric, lexicon: &SwearLexicon) -> (u64, f64) {
    let count = lyric.tokens().filter(|t| lexicon.contains(t)).count() as u64;
    (count, count as f64 / length_words(lyric) as f64)
}
