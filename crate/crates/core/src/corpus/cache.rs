//! JSONL corpus cache: one header line, then one song per line with its tokens.

use std::io::{self, BufRead, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{Cohort, Corpus, Provenance, SongRecord, TokenizedLyric};

pub const CACHE_FORMAT: &str = "lyricstat-corpus";
pub const CACHE_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum CacheError {
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
    #[error("line {line}: {source}")]
    Json { line: usize, source: serde_json::Error },
    #[error("not a corpus cache (format {found:?})")]
    WrongFormat { found: String },
    #[error("unsupported cache version {0}")]
    UnsupportedVersion(u32),
    #[error("cache is empty")]
    Empty,
    #[error("line {line}: {message}")]
    Invalid { line: usize, message: String },
}

#[derive(Serialize, Deserialize)]
struct Header {
    format: String,
    version: u32,
    source: String,
    config_digest: String,
    songs: usize,
}

#[derive(Serialize, Deserialize)]
struct Entry<'a> {
    id: std::borrow::Cow<'a, str>,
    title: std::borrow::Cow<'a, str>,
    artist: std::borrow::Cow<'a, str>,
    year: i32,
    duration_seconds: Option<f64>,
    cohort: Cohort,
    lyrics: std::borrow::Cow<'a, str>,
    tokens: std::borrow::Cow<'a, str>,
}

pub fn write_cache<W: Write>(corpus: &Corpus, mut out: W) -> Result<(), CacheError> {
    let header = Header {
        format: CACHE_FORMAT.to_owned(),
        version: CACHE_VERSION,
        source: corpus.provenance().source.clone(),
        config_digest: corpus.provenance().config_digest.clone(),
        songs: corpus.len(),
    };
    serde_json::to_writer(&mut out, &header).map_err(io::Error::from)?;
    out.write_all(b"\n")?;
    for (record, lyric) in corpus.songs() {
        let entry = Entry {
            id: record.id.as_str().into(),
            title: record.title.as_str().into(),
            artist: record.artist.as_str().into(),
            year: record.year,
            duration_seconds: record.duration_seconds,
            cohort: record.cohort,
            lyrics: record.lyrics.as_str().into(),
            tokens: lyric.rendered().into(),
        };
        serde_json::to_writer(&mut out, &entry).map_err(io::Error::from)?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_cache<R: BufRead>(reader: R) -> Result<Corpus, CacheError> {
    let mut lines = reader.lines();
    let first = lines.next().ok_or(CacheError::Empty)??;
    let header: Header = serde_json::from_str(&first).map_err(|source| CacheError::Json { line: 1, source })?;
    if header.format != CACHE_FORMAT {
        return Err(CacheError::WrongFormat { found: header.format });
    }
    if header.version != CACHE_VERSION {
        return Err(CacheError::UnsupportedVersion(header.version));
    }
    let mut records = Vec::with_capacity(header.songs);
    let mut tokenized = Vec::with_capacity(header.songs);
    for (i, line) in lines.enumerate() {
        let line_no = i + 2;
        let line = line?;
        if line.is_empty() {
            continue;
        }
        let entry: Entry<'_> = serde_json::from_str(&line).map_err(|source| CacheError::Json { line: line_no, source })?;
        let lyric = TokenizedLyric::from_rendered(entry.id.as_ref(), &entry.tokens).map_err(|e| CacheError::Invalid {
            line: line_no,
            message: e.to_string(),
        })?;
        records.push(SongRecord {
            id: entry.id.into_owned(),
            title: entry.title.into_owned(),
            artist: entry.artist.into_owned(),
            year: entry.year,
            duration_seconds: entry.duration_seconds,
            cohort: entry.cohort,
            lyrics: entry.lyrics.into_owned(),
        });
        tokenized.push(lyric);
    }
    if records.len() != header.songs {
        return Err(CacheError::Invalid {
            line: 1,
            message: format!("header announces {} songs, found {}", header.songs, records.len()),
        });
    }
    let provenance = Provenance {
        source: header.source,
        config_digest: header.config_digest,
    };
    Corpus::new(records, tokenized, provenance).map_err(|e| CacheError::Invalid {
        line: 0,
        message: e.to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::test_support::{corpus, song};

    #[test]
    fn round_trip_is_byte_identical() {
        let mut s = song("a", 1965, Cohort::Popular, "Hello, \"world\"\n[Chorus]\nla la");
        s.duration_seconds = Some(123.25);
        let c = corpus(vec![s, song("b", 1970, Cohort::Other, "naïve café")]);
        let mut first = Vec::new();
        write_cache(&c, &mut first).unwrap();
        let back = read_cache(first.as_slice()).unwrap();
        assert_eq!(back, c);
        let mut second = Vec::new();
        write_cache(&back, &mut second).unwrap();
        assert_eq!(first, second);
    }

    #[test]
    fn rejects_foreign_files() {
        let err = read_cache(&b"{\"format\":\"x\",\"version\":1,\"source\":\"\",\"config_digest\":\"\",\"songs\":0}\n"[..]);
        assert!(matches!(err, Err(CacheError::WrongFormat { .. })));
        assert!(matches!(read_cache(&b""[..]), Err(CacheError::Empty)));
    }
}
