//! Plot-ready CSV tables.

use std::io::Write;

use super::{RankSeries, StyleMetrics, YearCohortAggregate};
use crate::corpus::{Cohort, Corpus};

fn opt(value: Option<f64>) -> String {
    value.map(|v| v.to_string()).unwrap_or_default()
}

/// One row per song, in corpus order.
pub fn write_per_song_csv<W: Write>(out: W, corpus: &Corpus, metrics: &[StyleMetrics]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "song_id",
        "year",
        "cohort",
        "length_words",
        "duration_seconds",
        "speed_wps",
        "repetitiveness_pct",
        "fk_grade",
        "swear_count",
        "swear_rate",
    ])?;
    for (record, m) in corpus.records().iter().zip(metrics) {
        w.write_record([
            m.song_id.clone(),
            record.year.to_string(),
            record.cohort.to_string(),
            m.length_words.to_string(),
            opt(m.duration_seconds),
            opt(m.speed_wps),
            m.repetitiveness_pct.to_string(),
            m.fk_grade.to_string(),
            m.swear_count.to_string(),
            m.swear_rate.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Keyed by `(year, cohort)`.
pub fn write_aggregate_csv<W: Write>(out: W, rows: &[YearCohortAggregate]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "year",
        "cohort",
        "song_count",
        "mean_length_words",
        "mean_duration_seconds",
        "duration_coverage",
        "mean_speed_wps",
        "speed_coverage",
        "mean_repetitiveness_pct",
        "mean_fk_grade",
        "mean_swear_count",
        "mean_swear_rate",
    ])?;
    for r in rows {
        w.write_record([
            r.year.to_string(),
            r.cohort.to_string(),
            r.song_count.to_string(),
            r.mean_length_words.to_string(),
            opt(r.mean_duration_seconds),
            r.duration_coverage.to_string(),
            opt(r.mean_speed_wps),
            r.speed_coverage.to_string(),
            r.mean_repetitiveness_pct.to_string(),
            r.mean_fk_grade.to_string(),
            r.mean_swear_count.to_string(),
            r.mean_swear_rate.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Keyed by `(word, year)`; years where a word is absent have no row.
pub fn write_rank_series_csv<W: Write>(out: W, series: &[RankSeries]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["word", "year", "rank"])?;
    for s in series {
        for (year, rank) in &s.entries {
            w.write_record([s.word.clone(), year.to_string(), rank.to_string()])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// One block of top words for a year.
pub struct TopWords {
    pub year: i32,
    pub cohort: Option<Cohort>,
    pub words: Vec<(String, u64)>,
}

/// Keyed by `(year, rank)`.
pub fn write_top_words_csv<W: Write>(out: W, blocks: &[TopWords]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["year", "cohort", "rank", "word", "count"])?;
    for block in blocks {
        let cohort = block.cohort.map_or("all", Cohort::as_str);
        for (i, (word, count)) in block.words.iter().enumerate() {
            w.write_record([
                block.year.to_string(),
                cohort.to_owned(),
                (i + 1).to_string(),
                word.clone(),
                count.to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}
