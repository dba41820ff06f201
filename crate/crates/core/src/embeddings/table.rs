use std::collections::{HashMap, HashSet};
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use super::EmbeddingError;

/// Word vectors of one fixed dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingTable {
    dim: usize,
    words: Vec<String>,
    index: HashMap<String, usize>,
    data: Vec<f64>,
}

/// Counters gathered while reading a vector file.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LoadStats {
    /// Rows in the file (excluding the header).
    pub rows: usize,
    /// Rows whose word had already been seen; the later row wins.
    pub duplicates: usize,
    /// Rows skipped by a word filter.
    pub skipped: usize,
    /// Loaded words whose vector is all zeros.
    pub zero_vectors: usize,
}

impl EmbeddingTable {
    pub fn new(dim: usize) -> Result<Self, EmbeddingError> {
        if dim == 0 {
            return Err(EmbeddingError::ZeroDimension);
        }
        Ok(Self {
            dim,
            words: Vec::new(),
            index: HashMap::new(),
            data: Vec::new(),
        })
    }

    /// Builds a table from `(word, vector)` rows; later duplicates replace earlier ones.
    pub fn from_rows<I, S, V>(dim: usize, rows: I) -> Result<Self, EmbeddingError>
    where
        I: IntoIterator<Item = (S, V)>,
        S: Into<String>,
        V: AsRef<[f64]>,
    {
        let mut table = Self::new(dim)?;
        for (word, vector) in rows {
            table.insert(word, vector.as_ref())?;
        }
        Ok(table)
    }

    /// Inserts or replaces a vector. Returns `true` when `word` was already present.
    pub fn insert(&mut self, word: impl Into<String>, vector: &[f64]) -> Result<bool, EmbeddingError> {
        if vector.len() != self.dim {
            return Err(EmbeddingError::DimensionMismatch {
                expected: self.dim,
                found: vector.len(),
            });
        }
        let word = word.into();
        if let Some(&i) = self.index.get(&word) {
            self.data[i * self.dim..(i + 1) * self.dim].copy_from_slice(vector);
            return Ok(true);
        }
        self.index.insert(word.clone(), self.words.len());
        self.words.push(word);
        self.data.extend_from_slice(vector);
        Ok(false)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn contains(&self, word: &str) -> bool {
        self.index.contains_key(word)
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    /// Raw vector, zero or not.
    pub fn get(&self, word: &str) -> Option<&[f64]> {
        self.index.get(word).map(|&i| self.row(i))
    }

    /// Vector usable in similarity queries: present and non-zero.
    pub fn vector(&self, word: &str) -> Result<&[f64], EmbeddingError> {
        let v = self.get(word).ok_or_else(|| EmbeddingError::UnknownWord(word.to_owned()))?;
        if is_zero(v) {
            return Err(EmbeddingError::ZeroVector(word.to_owned()));
        }
        Ok(v)
    }

    pub fn is_zero(&self, word: &str) -> bool {
        self.get(word).is_some_and(is_zero)
    }

    /// Words whose vector is all zeros; such words are refused by [`vector`](Self::vector).
    pub fn zero_words(&self) -> Vec<&str> {
        self.iter().filter(|(_, v)| is_zero(v)).map(|(w, _)| w).collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &[f64])> + '_ {
        self.words.iter().enumerate().map(|(i, w)| (w.as_str(), self.row(i)))
    }

    fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    /// Cosine similarity between two words.
    pub fn similarity(&self, a: &str, b: &str) -> Result<f64, EmbeddingError> {
        cosine(self.vector(a)?, self.vector(b)?)
    }

    /// Copy with every vector multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        let mut out = self.clone();
        out.data.iter_mut().for_each(|x| *x *= factor);
        out
    }

    /// Writes the text vector format: a `V D` header, then one word per line with
    /// six decimal places.
    pub fn save<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "{} {}", self.len(), self.dim)?;
        let mut line = String::new();
        for (word, vector) in self.iter() {
            use std::fmt::Write as _;
            line.clear();
            line.push_str(word);
            for x in vector {
                write!(line, " {x:.6}").expect("writing to a String cannot fail");
            }
            line.push('\n');
            out.write_all(line.as_bytes())?;
        }
        out.flush()
    }

    pub fn save_path(&self, path: &Path) -> Result<(), EmbeddingError> {
        let file = File::create(path).map_err(|e| EmbeddingError::io(path, e))?;
        self.save(std::io::BufWriter::new(file)).map_err(|e| EmbeddingError::io(path, e))
    }

    /// Reads the text vector format. The `V D` header line is optional.
    pub fn load<R: BufRead>(reader: R) -> Result<(Self, LoadStats), EmbeddingError> {
        load_impl(reader, None)
    }

    /// Like [`load`](Self::load) but keeps only rows whose word is in `keep`.
    ///
    /// Rows for other words are counted but not parsed, so malformed rows outside
    /// the filter go unnoticed.
    pub fn load_filtered<R: BufRead>(reader: R, keep: &HashSet<String>) -> Result<(Self, LoadStats), EmbeddingError> {
        load_impl(reader, Some(keep))
    }

    pub fn load_path(path: &Path, keep: Option<&HashSet<String>>) -> Result<(Self, LoadStats), EmbeddingError> {
        let file = File::open(path).map_err(|e| EmbeddingError::io(path, e))?;
        load_impl(BufReader::with_capacity(1 << 20, file), keep)
    }
}

fn is_zero(v: &[f64]) -> bool {
    v.iter().all(|&x| x == 0.0)
}

/// `u·v / (‖u‖‖v‖)`, clamped to `[-1, 1]`.
pub fn cosine(u: &[f64], v: &[f64]) -> Result<f64, EmbeddingError> {
    if u.len() != v.len() {
        return Err(EmbeddingError::DimensionMismatch {
            expected: u.len(),
            found: v.len(),
        });
    }
    let (mut dot, mut nu, mut nv) = (0.0, 0.0, 0.0);
    for (a, b) in u.iter().zip(v) {
        dot += a * b;
        nu += a * a;
        nv += b * b;
    }
    if nu == 0.0 || nv == 0.0 {
        return Err(EmbeddingError::ZeroVectorArgument);
    }
    Ok((dot / (nu.sqrt() * nv.sqrt())).clamp(-1.0, 1.0))
}

fn parse_header(fields: &[&str]) -> Option<(usize, usize)> {
    match fields {
        [v, d] => Some((v.parse().ok()?, d.parse().ok()?)),
        _ => None,
    }
}

fn load_impl<R: BufRead>(reader: R, keep: Option<&HashSet<String>>) -> Result<(EmbeddingTable, LoadStats), EmbeddingError> {
    let mut stats = LoadStats::default();
    let mut table: Option<EmbeddingTable> = None;
    let mut declared: Option<(usize, usize)> = None;
    let mut values = Vec::new();
    let mut first = true;
    for (i, line) in reader.lines().enumerate() {
        let line_no = i + 1;
        let line = line.map_err(|e| EmbeddingError::Read { line: line_no, source: e })?;
        let trimmed = line.trim_end();
        if trimmed.trim().is_empty() {
            continue;
        }
        if first {
            first = false;
            let fields: Vec<&str> = trimmed.split_whitespace().collect();
            if let Some((v, d)) = parse_header(&fields) {
                if d == 0 {
                    return Err(EmbeddingError::ZeroDimension);
                }
                declared = Some((v, d));
                table = Some(EmbeddingTable::new(d)?);
                continue;
            }
        }
        let mut fields = trimmed.split_whitespace();
        let word = fields.next().expect("non-empty line has a field");
        stats.rows += 1;
        if keep.is_some_and(|k| !k.contains(word)) {
            stats.skipped += 1;
            continue;
        }
        values.clear();
        for token in fields {
            match token.parse::<f64>() {
                Ok(x) if x.is_finite() => values.push(x),
                _ => {
                    return Err(EmbeddingError::BadNumber {
                        line: line_no,
                        token: token.to_owned(),
                    })
                }
            }
        }
        if table.is_none() {
            if values.is_empty() {
                return Err(EmbeddingError::RowDimension {
                    line: line_no,
                    expected: 1,
                    found: 0,
                });
            }
            table = Some(EmbeddingTable::new(values.len())?);
        }
        let table = table.as_mut().expect("initialised above");
        if values.len() != table.dim {
            return Err(EmbeddingError::RowDimension {
                line: line_no,
                expected: table.dim,
                found: values.len(),
            });
        }
        if table.insert(word, &values)? {
            stats.duplicates += 1;
        }
    }
    let table = table.ok_or(EmbeddingError::EmptyFile)?;
    if let Some((v, _)) = declared {
        if v != stats.rows {
            return Err(EmbeddingError::HeaderCount {
                declared: v,
                found: stats.rows,
            });
        }
    }
    if stats.rows == 0 {
        return Err(EmbeddingError::EmptyFile);
    }
    stats.zero_vectors = table.zero_words().len();
    if stats.duplicates > 0 {
        log::warn!("{} duplicate words in vector file; later rows kept", stats.duplicates);
    }
    Ok((table, stats))
}
