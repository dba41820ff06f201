use std::collections::HashMap;

use thiserror::Error;

use super::{Corpus, SongFilter};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("no songs match the selection {0:?}")]
pub struct EmptySelection(pub SongFilter);

/// Exact token multiset over a selection of songs.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct WordCounts {
    counts: HashMap<String, u64>,
    total: u64,
}

impl WordCounts {
    pub fn add(&mut self, word: &str) {
        self.total += 1;
        if let Some(n) = self.counts.get_mut(word) {
            *n += 1;
        } else {
            self.counts.insert(word.to_owned(), 1);
        }
    }

    pub fn get(&self, word: &str) -> u64 {
        self.counts.get(word).copied().unwrap_or(0)
    }

    /// Sum of all counts.
    pub fn total(&self) -> u64 {
        self.total
    }

    /// Number of distinct words.
    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, u64)> + '_ {
        self.counts.iter().map(|(w, &n)| (w.as_str(), n))
    }

    pub fn merge(&mut self, other: &WordCounts) {
        for (word, n) in other.iter() {
            *self.counts.entry(word.to_owned()).or_insert(0) += n;
        }
        self.total += other.total;
    }

    /// Words by descending count, ties broken by ascending lexicographic order.
    pub fn ranked(&self) -> Vec<(&str, u64)> {
        let mut ranked: Vec<(&str, u64)> = self.iter().collect();
        ranked.sort_unstable_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
        ranked
    }

    pub fn into_map(self) -> HashMap<String, u64> {
        self.counts
    }
}

impl<'a> FromIterator<&'a str> for WordCounts {
    fn from_iter<I: IntoIterator<Item = &'a str>>(iter: I) -> Self {
        let mut counts = WordCounts::default();
        for word in iter {
            counts.add(word);
        }
        counts
    }
}

/// Token counts over the songs matching `filter`.
pub fn token_counts(corpus: &Corpus, filter: &SongFilter) -> Result<WordCounts, EmptySelection> {
    let mut counts = WordCounts::default();
    let mut any = false;
    for (_, lyric) in corpus.select(filter) {
        any = true;
        for token in lyric.tokens() {
            counts.add(token);
        }
    }
    if any {
        Ok(counts)
    } else {
        Err(EmptySelection(*filter))
    }
}
