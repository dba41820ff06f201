use std::collections::BTreeSet;
use std::fs;
use std::path::Path;

use thiserror::Error;

use crate::corpus::{tokenize_text, TokenizeConfig};

const BUNDLED_SWEAR_WORDS: &str = include_str!("../../data/swear_words.txt");
const BUNDLED_STOPWORDS: &str = include_str!("../../data/stopwords.txt");

#[derive(Debug, Error)]
pub enum LexiconError {
    #[error("cannot read word list {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{source_name}:{line}: entry {entry:?} does not survive tokenization unchanged (becomes {tokens:?})")]
    NotATokenForm {
        source_name: String,
        line: usize,
        entry: String,
        tokens: Vec<String>,
    },
    #[error("word list {0} is empty")]
    Empty(String),
}

/// Set of word forms loaded from a one-word-per-line file.
///
/// Lines may carry `#` comments. Every entry must tokenize to itself, so
/// membership tests against [`TokenizedLyric`](crate::corpus::TokenizedLyric)
/// tokens are exact.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WordList {
    entries: BTreeSet<String>,
    source: String,
}

/// Swear words matched exactly against tokens.
pub type SwearLexicon = WordList;

impl WordList {
    pub fn parse(text: &str, source: &str, config: &TokenizeConfig) -> Result<Self, LexiconError> {
        let mut entries = BTreeSet::new();
        for (i, line) in text.lines().enumerate() {
            let entry = line.split('#').next().unwrap_or("").trim();
            if entry.is_empty() {
                continue;
            }
            let tokens: Vec<String> = tokenize_text("lexicon", entry, config)
                .map(|t| t.tokens().map(str::to_owned).collect())
                .unwrap_or_default();
            if tokens.len() != 1 || tokens[0] != entry {
                return Err(LexiconError::NotATokenForm {
                    source_name: source.to_owned(),
                    line: i + 1,
                    entry: entry.to_owned(),
                    tokens,
                });
            }
            entries.insert(entry.to_owned());
        }
        if entries.is_empty() {
            return Err(LexiconError::Empty(source.to_owned()));
        }
        Ok(Self {
            entries,
            source: source.to_owned(),
        })
    }

    pub fn load(path: &Path, config: &TokenizeConfig) -> Result<Self, LexiconError> {
        let text = fs::read_to_string(path).map_err(|source| LexiconError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&text, &path.display().to_string(), config)
    }

    pub fn bundled_swear_words() -> Self {
        Self::parse(BUNDLED_SWEAR_WORDS, "<bundled swear_words.txt>", &TokenizeConfig::default())
            .expect("bundled swear list is valid")
    }

    pub fn bundled_stopwords() -> Self {
        Self::parse(BUNDLED_STOPWORDS, "<bundled stopwords.txt>", &TokenizeConfig::default())
            .expect("bundled stopword list is valid")
    }

    pub fn contains(&self, word: &str) -> bool {
        self.entries.contains(word)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn iter(&self) -> impl Iterator<Item = &str> + '_ {
        self.entries.iter().map(String::as_str)
    }
}
