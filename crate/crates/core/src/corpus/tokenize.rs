use std::borrow::Cow;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;
use unicode_normalization::{is_nfc_quick, IsNormalized, UnicodeNormalization};

use super::SongRecord;

/// Options controlling how raw lyrics become tokens.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct TokenizeConfig {
    /// Lowercase every token (default case folding).
    pub lowercase: bool,
    /// Drop lines fully enclosed by one of `annotation_delimiters`, e.g. `[Chorus]`.
    pub drop_annotations: bool,
    /// `(open, close)` pairs recognised as section annotations.
    pub annotation_delimiters: Vec<(char, char)>,
}

impl Default for TokenizeConfig {
    fn default() -> Self {
        Self {
            lowercase: true,
            drop_annotations: true,
            annotation_delimiters: vec![('[', ']')],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TokenizeError {
    #[error("lyrics of song {0:?} contain no tokens")]
    NoTokens(String),
    #[error("invalid token {token:?} in song {song_id:?}")]
    InvalidToken { song_id: String, token: String },
}

/// Normalized lines and word tokens for one song.
///
/// Tokens are stored in one buffer: tokens of a line are separated by a single
/// space and lines by `'\n'`. Every token is non-empty and free of whitespace, so
/// the flattened token sequence is exactly the concatenation of the lines.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct TokenizedLyric {
    song_id: String,
    text: String,
    line_count: usize,
    token_count: usize,
}

impl TokenizedLyric {
    /// Builds a lyric from explicit lines of tokens. Empty lines are skipped.
    pub fn from_lines<I, L, S>(song_id: impl Into<String>, lines: I) -> Result<Self, TokenizeError>
    where
        I: IntoIterator<Item = L>,
        L: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let song_id = song_id.into();
        let mut builder = Builder::default();
        for line in lines {
            for token in line {
                let token = token.as_ref();
                if token.is_empty() || token.chars().any(char::is_whitespace) {
                    return Err(TokenizeError::InvalidToken {
                        song_id,
                        token: token.to_owned(),
                    });
                }
                builder.push_token(token);
            }
            builder.end_line();
        }
        builder.finish(song_id)
    }

    /// Rebuilds a lyric from its [`rendered`](Self::rendered) form.
    pub fn from_rendered(song_id: impl Into<String>, text: &str) -> Result<Self, TokenizeError> {
        Self::from_lines(song_id, text.split('\n').map(|line| line.split(' ').filter(|t| !t.is_empty())))
    }

    pub fn song_id(&self) -> &str {
        &self.song_id
    }

    /// Lines with tokens joined by a single space.
    pub fn lines(&self) -> impl Iterator<Item = &str> + '_ {
        self.text.split('\n')
    }

    /// Tokens of each line.
    pub fn line_tokens(&self) -> impl Iterator<Item = std::str::Split<'_, char>> + '_ {
        self.lines().map(|line| line.split(' '))
    }

    /// Flattened token sequence.
    pub fn tokens(&self) -> impl Iterator<Item = &str> + '_ {
        self.text.split(['\n', ' '])
    }

    pub fn line_count(&self) -> usize {
        self.line_count
    }

    pub fn token_count(&self) -> usize {
        self.token_count
    }

    /// Lines joined by `'\n'`, tokens by `' '`.
    pub fn rendered(&self) -> &str {
        &self.text
    }

    pub fn to_nested(&self) -> Vec<Vec<String>> {
        self.line_tokens().map(|l| l.map(str::to_owned).collect()).collect()
    }
}

impl fmt::Debug for TokenizedLyric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TokenizedLyric")
            .field("song_id", &self.song_id)
            .field("lines", &self.to_nested())
            .finish()
    }
}

#[derive(Default)]
struct Builder {
    text: String,
    line_count: usize,
    token_count: usize,
    line_open: bool,
}

impl Builder {
    fn push_token(&mut self, token: &str) {
        if self.line_open {
            self.text.push(' ');
        } else {
            if self.line_count > 0 {
                self.text.push('\n');
            }
            self.line_open = true;
            self.line_count += 1;
        }
        self.text.push_str(token);
        self.token_count += 1;
    }

    fn end_line(&mut self) {
        self.line_open = false;
    }

    fn finish(self, song_id: String) -> Result<TokenizedLyric, TokenizeError> {
        if self.token_count == 0 {
            return Err(TokenizeError::NoTokens(song_id));
        }
        Ok(TokenizedLyric {
            song_id,
            text: self.text,
            line_count: self.line_count,
            token_count: self.token_count,
        })
    }
}

/// Tokenizes a song's lyrics.
pub fn tokenize(record: &SongRecord, config: &TokenizeConfig) -> Result<TokenizedLyric, TokenizeError> {
    tokenize_text(&record.id, &record.lyrics, config)
}

/// Tokenizes raw lyric text.
///
/// Text is NFC-normalized and split into lines on `'\n'`, then into tokens on
/// whitespace. Each token is lowercased (when configured) and stripped of leading
/// and trailing characters that are neither alphanumeric nor an apostrophe.
/// Interior punctuation such as apostrophes and hyphens is kept. Tokens with no
/// alphanumeric character, empty lines and annotation lines are removed.
pub fn tokenize_text(song_id: &str, lyrics: &str, config: &TokenizeConfig) -> Result<TokenizedLyric, TokenizeError> {
    let normalized = nfc(lyrics);
    let mut builder = Builder::default();
    let mut token = String::new();
    for line in normalized.split('\n') {
        let line = line.trim();
        if line.is_empty() || (config.drop_annotations && is_annotation(line, &config.annotation_delimiters)) {
            continue;
        }
        for raw in line.split_whitespace() {
            if normalize_token(raw, config.lowercase, &mut token) {
                builder.push_token(&token);
            }
        }
        builder.end_line();
    }
    builder.finish(song_id.to_owned())
}

fn nfc(text: &str) -> Cow<'_, str> {
    if text.is_ascii() || is_nfc_quick(text.chars()) == IsNormalized::Yes {
        Cow::Borrowed(text)
    } else {
        Cow::Owned(text.nfc().collect())
    }
}

fn is_annotation(line: &str, delimiters: &[(char, char)]) -> bool {
    delimiters
        .iter()
        .any(|&(open, close)| line.len() >= 2 && line.starts_with(open) && line.ends_with(close))
}

fn is_kept_edge(c: char) -> bool {
    c.is_alphanumeric() || c == '\''
}

fn unify_apostrophe(c: char) -> char {
    match c {
        '\u{2019}' | '\u{2018}' | '\u{02BC}' => '\'',
        other => other,
    }
}

/// Writes the normalized form of `raw` into `out`; returns false when nothing remains.
fn normalize_token(raw: &str, lowercase: bool, out: &mut String) -> bool {
    out.clear();
    let trimmed = raw.trim_matches(|c: char| !is_kept_edge(unify_apostrophe(c)));
    if !trimmed.chars().any(char::is_alphanumeric) {
        return false;
    }
    if trimmed.is_ascii() {
        if lowercase {
            out.extend(trimmed.chars().map(|c| c.to_ascii_lowercase()));
        } else {
            out.push_str(trimmed);
        }
        return true;
    }
    let unified: String = trimmed.chars().map(unify_apostrophe).collect();
    if lowercase {
        let lowered = unified.to_lowercase();
        out.extend(nfc(&lowered).chars());
    } else {
        out.push_str(&unified);
    }
    // Case mapping can expose new edge characters (e.g. a combining mark).
    let edge_clean = out.trim_matches(|c: char| !is_kept_edge(c));
    if edge_clean.len() != out.len() {
        let cleaned = edge_clean.to_owned();
        *out = cleaned;
    }
    out.chars().any(char::is_alphanumeric)
}
