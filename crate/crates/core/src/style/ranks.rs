use std::collections::{BTreeMap, HashMap};

use serde::Serialize;

use super::lexicon::WordList;
use super::StyleError;
use crate::corpus::{Cohort, Corpus, EmptySelection, SongFilter, WordCounts};

/// Frequency rank of one word across years. Years where the word does not occur
/// have no entry.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RankSeries {
    pub word: String,
    pub entries: BTreeMap<i32, u32>,
}

/// Token counts per year over the songs matching `filter` (its year is ignored).
pub fn counts_by_year(corpus: &Corpus, cohort: Option<Cohort>) -> BTreeMap<i32, WordCounts> {
    let filter = SongFilter { year: None, cohort };
    let mut by_year: BTreeMap<i32, WordCounts> = BTreeMap::new();
    for (record, lyric) in corpus.select(&filter) {
        let counts = by_year.entry(record.year).or_default();
        for token in lyric.tokens() {
            counts.add(token);
        }
    }
    by_year
}

/// 1-based ranks of every word: descending count, ascending lexicographic on ties.
pub fn rank_words(counts: &WordCounts) -> HashMap<&str, u32> {
    counts
        .ranked()
        .into_iter()
        .enumerate()
        .map(|(i, (word, _))| (word, i as u32 + 1))
        .collect()
}

/// Year-by-year ranks of `words` within the selected cohort (all cohorts for `None`).
pub fn rank_series<S: AsRef<str>>(
    corpus: &Corpus,
    words: &[S],
    cohort: Option<Cohort>,
) -> Result<Vec<RankSeries>, StyleError> {
    if words.is_empty() {
        return Err(StyleError::EmptyWordList);
    }
    let mut series: Vec<RankSeries> = words
        .iter()
        .map(|w| RankSeries {
            word: w.as_ref().to_owned(),
            entries: BTreeMap::new(),
        })
        .collect();
    for (year, counts) in counts_by_year(corpus, cohort) {
        let ranks = rank_words(&counts);
        for s in &mut series {
            if let Some(&rank) = ranks.get(s.word.as_str()) {
                s.entries.insert(year, rank);
            }
        }
    }
    Ok(series)
}

/// The `k` most frequent words, skipping `stopwords`, with their counts.
pub fn top_words(
    corpus: &Corpus,
    filter: &SongFilter,
    k: usize,
    stopwords: Option<&WordList>,
) -> Result<Vec<(String, u64)>, StyleError> {
    if k == 0 {
        return Err(StyleError::ZeroTopK);
    }
    let counts = crate::corpus::token_counts(corpus, filter).map_err(|EmptySelection(f)| StyleError::EmptySelection(f))?;
    Ok(top_from_counts(&counts, k, stopwords))
}

pub fn top_from_counts(counts: &WordCounts, k: usize, stopwords: Option<&WordList>) -> Vec<(String, u64)> {
    counts
        .ranked()
        .into_iter()
        .filter(|(w, _)| stopwords.is_none_or(|s| !s.contains(w)))
        .take(k)
        .map(|(w, n)| (w.to_owned(), n))
        .collect()
}
