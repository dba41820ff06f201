use std::collections::HashSet;
use std::fmt;
use std::fs::File;
use std::io::{self, BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::tokenize::{tokenize, TokenizeConfig, TokenizeError, TokenizedLyric};
use super::{Cohort, Corpus, Provenance, SongRecord};
use crate::digest::config_digest;

const CHUNK: usize = 4096;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct IngestConfig {
    pub year_min: i32,
    pub year_max: i32,
    /// Ingestion fails when the rejected fraction of records exceeds this value.
    pub max_reject_fraction: f64,
    pub tokenize: TokenizeConfig,
}

impl Default for IngestConfig {
    fn default() -> Self {
        Self {
            year_min: 1900,
            year_max: 2100,
            max_reject_fraction: 0.5,
            tokenize: TokenizeConfig::default(),
        }
    }
}

impl IngestConfig {
    pub fn digest(&self) -> String {
        config_digest(self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InputFormat {
    Jsonl,
    Csv,
}

impl InputFormat {
    /// Guesses the format from a file extension.
    pub fn from_path(path: &Path) -> Option<Self> {
        match path.extension()?.to_str()?.to_ascii_lowercase().as_str() {
            "jsonl" | "ndjson" | "json" => Some(InputFormat::Jsonl),
            "csv" => Some(InputFormat::Csv),
            _ => None,
        }
    }
}

impl FromStr for InputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "jsonl" => Ok(InputFormat::Jsonl),
            "csv" => Ok(InputFormat::Csv),
            other => Err(format!("unknown input format {other:?} (expected jsonl or csv)")),
        }
    }
}

/// Why a single record was rejected.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum RecordError {
    #[error("malformed record: {0}")]
    Malformed(String),
    #[error("missing required field `{0}`")]
    MissingField(&'static str),
    #[error("invalid value {value:?} for field `{field}`")]
    InvalidField { field: &'static str, value: String },
    #[error("duplicate id {0:?}")]
    DuplicateId(String),
    #[error("year {year} outside {min}..={max}")]
    YearOutOfRange { year: i64, min: i32, max: i32 },
    #[error("duration_seconds must be > 0, got {0}")]
    InvalidDuration(f64),
    #[error("lyrics are empty")]
    EmptyLyrics,
    #[error("lyrics contain no tokens")]
    NoTokens,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Reject {
    /// 1-based physical line of the record in the input file.
    pub line_no: u64,
    pub id: Option<String>,
    pub reason: RecordError,
}

#[derive(Serialize)]
struct RejectLine<'a> {
    #[serde(skip_serializing_if = "Option::is_none")]
    id: Option<&'a str>,
    line_no: u64,
    reason: String,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RejectReport {
    pub rejects: Vec<Reject>,
    /// Records seen, accepted or not.
    pub total: usize,
}

impl RejectReport {
    pub fn rejected(&self) -> usize {
        self.rejects.len()
    }

    pub fn reject_fraction(&self) -> f64 {
        if self.total == 0 {
            0.0
        } else {
            self.rejected() as f64 / self.total as f64
        }
    }

    /// One JSON object per reject: `{"id"?, "line_no", "reason"}`.
    pub fn write_jsonl<W: Write>(&self, mut out: W) -> io::Result<()> {
        for reject in &self.rejects {
            let line = RejectLine {
                id: reject.id.as_deref(),
                line_no: reject.line_no,
                reason: reject.reason.to_string(),
            };
            serde_json::to_writer(&mut out, &line)?;
            out.write_all(b"\n")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct IngestOutcome {
    pub corpus: Corpus,
    pub report: RejectReport,
}

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("malformed header: {0}")]
    MalformedHeader(String),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("input contains no records")]
    NoRecords,
    #[error("{} of {} records rejected, above the allowed fraction {max_fraction}", .outcome.report.rejected(), .outcome.report.total)]
    TooManyRejects {
        /// Partial result with every record that was accepted.
        outcome: Box<IngestOutcome>,
        max_fraction: f64,
    },
}

/// Reads a song file into a tokenized corpus.
pub fn ingest(path: &Path, format: InputFormat, config: &IngestConfig) -> Result<IngestOutcome, IngestError> {
    let file = File::open(path).map_err(|source| IngestError::Io {
        path: path.to_owned(),
        source,
    })?;
    ingest_reader(BufReader::with_capacity(1 << 20, file), format, config, &path.display().to_string())
}

/// Like [`ingest`], over any buffered reader. `source` is recorded as provenance.
pub fn ingest_reader<R: BufRead>(
    reader: R,
    format: InputFormat,
    config: &IngestConfig,
    source: &str,
) -> Result<IngestOutcome, IngestError> {
    let mut acc = Accumulator::new(config);
    match format {
        InputFormat::Jsonl => read_jsonl(reader, &mut acc, source)?,
        InputFormat::Csv => read_csv(reader, &mut acc)?,
    }
    acc.finish(source, config)
}

/// Record fields before validation.
#[derive(Debug, Default, Deserialize)]
#[serde(default)]
struct RawRecord {
    id: Option<String>,
    title: Option<String>,
    artist: Option<String>,
    year: Option<i64>,
    duration_seconds: Option<f64>,
    cohort: Option<String>,
    lyrics: Option<String>,
}

enum Parsed {
    Json(Vec<u8>),
    Raw(RawRecord),
    Failed(RecordError),
}

type Checked = Result<(SongRecord, TokenizedLyric), (Option<String>, RecordError)>;

struct Accumulator<'c> {
    config: &'c IngestConfig,
    seen: HashSet<String>,
    records: Vec<SongRecord>,
    tokenized: Vec<TokenizedLyric>,
    report: RejectReport,
    pending: Vec<(u64, Parsed)>,
}

impl<'c> Accumulator<'c> {
    fn new(config: &'c IngestConfig) -> Self {
        Self {
            config,
            seen: HashSet::new(),
            records: Vec::new(),
            tokenized: Vec::new(),
            report: RejectReport::default(),
            pending: Vec::with_capacity(CHUNK),
        }
    }

    fn push(&mut self, line_no: u64, parsed: Parsed) {
        self.pending.push((line_no, parsed));
        if self.pending.len() >= CHUNK {
            self.flush();
        }
    }

    fn flush(&mut self) {
        let config = self.config;
        let checked: Vec<(u64, Checked)> = self
            .pending
            .par_drain(..)
            .map(|(line_no, parsed)| (line_no, check(parsed, config)))
            .collect();
        for (line_no, result) in checked {
            self.report.total += 1;
            match result {
                Ok((record, lyric)) => {
                    if self.seen.contains(&record.id) {
                        self.report.rejects.push(Reject {
                            line_no,
                            id: Some(record.id.clone()),
                            reason: RecordError::DuplicateId(record.id),
                        });
                    } else {
                        self.seen.insert(record.id.clone());
                        self.records.push(record);
                        self.tokenized.push(lyric);
                    }
                }
                Err((id, reason)) => self.report.rejects.push(Reject { line_no, id, reason }),
            }
        }
    }

    fn finish(mut self, source: &str, config: &IngestConfig) -> Result<IngestOutcome, IngestError> {
        self.flush();
        if self.report.total == 0 {
            return Err(IngestError::NoRecords);
        }
        for reject in &self.report.rejects {
            log::debug!("rejected line {}: {}", reject.line_no, reject.reason);
        }
        let provenance = Provenance {
            source: source.to_owned(),
            config_digest: config.digest(),
        };
        let corpus = Corpus::new(self.records, self.tokenized, provenance).expect("aligned by construction");
        let outcome = IngestOutcome {
            corpus,
            report: self.report,
        };
        if outcome.report.reject_fraction() > config.max_reject_fraction {
            return Err(IngestError::TooManyRejects {
                outcome: Box::new(outcome),
                max_fraction: config.max_reject_fraction,
            });
        }
        Ok(outcome)
    }
}

fn check(parsed: Parsed, config: &IngestConfig) -> Checked {
    let raw = match parsed {
        Parsed::Json(bytes) => match serde_json::from_slice::<RawRecord>(&bytes) {
            Ok(raw) => raw,
            Err(e) => return Err((None, RecordError::Malformed(e.to_string()))),
        },
        Parsed::Raw(raw) => raw,
        Parsed::Failed(err) => return Err((None, err)),
    };
    let id = raw.id.clone();
    validate(raw, config).map_err(|e| (id, e))
}

fn validate(raw: RawRecord, config: &IngestConfig) -> Result<(SongRecord, TokenizedLyric), RecordError> {
    let id = raw.id.ok_or(RecordError::MissingField("id"))?;
    if id.trim().is_empty() {
        return Err(RecordError::InvalidField { field: "id", value: id });
    }
    let year = raw.year.ok_or(RecordError::MissingField("year"))?;
    if year < i64::from(config.year_min) || year > i64::from(config.year_max) {
        return Err(RecordError::YearOutOfRange {
            year,
            min: config.year_min,
            max: config.year_max,
        });
    }
    let cohort_text = raw.cohort.ok_or(RecordError::MissingField("cohort"))?;
    let cohort: Cohort = cohort_text.parse().map_err(|_| RecordError::InvalidField {
        field: "cohort",
        value: cohort_text,
    })?;
    if let Some(d) = raw.duration_seconds {
        if !(d.is_finite() && d > 0.0) {
            return Err(RecordError::InvalidDuration(d));
        }
    }
    let lyrics = raw.lyrics.ok_or(RecordError::MissingField("lyrics"))?;
    if lyrics.trim().is_empty() {
        return Err(RecordError::EmptyLyrics);
    }
    let record = SongRecord {
        id,
        title: raw.title.unwrap_or_default(),
        artist: raw.artist.unwrap_or_default(),
        year: year as i32,
        duration_seconds: raw.duration_seconds,
        cohort,
        lyrics,
    };
    match tokenize(&record, &config.tokenize) {
        Ok(lyric) => Ok((record, lyric)),
        Err(TokenizeError::NoTokens(_)) => Err(RecordError::NoTokens),
        Err(other) => Err(RecordError::Malformed(other.to_string())),
    }
}

fn read_jsonl<R: BufRead>(mut reader: R, acc: &mut Accumulator<'_>, source: &str) -> Result<(), IngestError> {
    let mut buf = Vec::new();
    let mut line_no = 0u64;
    loop {
        buf.clear();
        let n = reader.read_until(b'\n', &mut buf).map_err(|source_err| IngestError::Io {
            path: PathBuf::from(source),
            source: source_err,
        })?;
        if n == 0 {
            break;
        }
        line_no += 1;
        if buf.iter().all(u8::is_ascii_whitespace) {
            continue;
        }
        acc.push(line_no, Parsed::Json(std::mem::take(&mut buf)));
    }
    Ok(())
}

const CSV_REQUIRED: [&str; 4] = ["id", "year", "cohort", "lyrics"];

struct CsvColumns {
    id: usize,
    title: Option<usize>,
    artist: Option<usize>,
    year: usize,
    duration: Option<usize>,
    cohort: usize,
    lyrics: usize,
}

impl CsvColumns {
    fn from_header(header: &csv::StringRecord) -> Result<Self, IngestError> {
        let find = |name: &str| header.iter().position(|h| h.trim() == name);
        let missing: Vec<&str> = CSV_REQUIRED.iter().copied().filter(|c| find(c).is_none()).collect();
        if !missing.is_empty() {
            return Err(IngestError::MalformedHeader(format!(
                "missing column(s) {} in header {:?}",
                missing.join(", "),
                header.iter().collect::<Vec<_>>()
            )));
        }
        Ok(Self {
            id: find("id").unwrap(),
            title: find("title"),
            artist: find("artist"),
            year: find("year").unwrap(),
            duration: find("duration_seconds"),
            cohort: find("cohort").unwrap(),
            lyrics: find("lyrics").unwrap(),
        })
    }

    fn parse(&self, row: &csv::StringRecord) -> Result<RawRecord, RecordError> {
        let get = |i: usize| row.get(i).map(str::to_owned);
        let year = match row.get(self.year).map(str::trim) {
            None | Some("") => None,
            Some(text) => Some(text.parse::<i64>().map_err(|_| RecordError::InvalidField {
                field: "year",
                value: text.to_owned(),
            })?),
        };
        let duration_seconds = match self.duration.and_then(|i| row.get(i)).map(str::trim) {
            None | Some("") => None,
            Some(text) => Some(text.parse::<f64>().map_err(|_| RecordError::InvalidField {
                field: "duration_seconds",
                value: text.to_owned(),
            })?),
        };
        Ok(RawRecord {
            id: get(self.id).filter(|s| !s.is_empty()),
            title: self.title.and_then(get),
            artist: self.artist.and_then(get),
            year,
            duration_seconds,
            cohort: get(self.cohort).filter(|s| !s.is_empty()),
            lyrics: get(self.lyrics).map(|s| unescape_newlines(&s)),
        })
    }
}

/// Turns the two-character escapes `\n` and `\\` into a newline and a backslash.
fn unescape_newlines(text: &str) -> String {
    if !text.contains('\\') {
        return text.to_owned();
    }
    let mut out = String::with_capacity(text.len());
    let mut chars = text.chars();
    while let Some(c) = chars.next() {
        if c != '\\' {
            out.push(c);
            continue;
        }
        match chars.next() {
            Some('n') => out.push('\n'),
            Some('\\') => out.push('\\'),
            Some(other) => {
                out.push('\\');
                out.push(other);
            }
            None => out.push('\\'),
        }
    }
    out
}

fn read_csv<R: BufRead>(reader: R, acc: &mut Accumulator<'_>) -> Result<(), IngestError> {
    let mut csv_reader = csv::ReaderBuilder::new().has_headers(true).flexible(true).from_reader(reader);
    let header = csv_reader.headers()?.clone();
    if header.is_empty() {
        return Err(IngestError::MalformedHeader("empty header".into()));
    }
    let columns = CsvColumns::from_header(&header)?;
    let mut row = csv::StringRecord::new();
    loop {
        match csv_reader.read_record(&mut row) {
            Ok(false) => break,
            Ok(true) => {
                let line_no = row.position().map_or(0, |p| p.line());
                let parsed = match columns.parse(&row) {
                    Ok(raw) => Parsed::Raw(raw),
                    Err(e) => Parsed::Failed(e),
                };
                acc.push(line_no, parsed);
            }
            Err(e) if matches!(e.kind(), csv::ErrorKind::Utf8 { .. }) => {
                let line_no = e.position().map_or(0, |p| p.line());
                acc.push(line_no, Parsed::Failed(RecordError::Malformed(e.to_string())));
            }
            Err(e) => return Err(e.into()),
        }
    }
    Ok(())
}

impl fmt::Display for InputFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            InputFormat::Jsonl => "jsonl",
            InputFormat::Csv => "csv",
        })
    }
}
