use std::collections::BTreeMap;

use serde::Serialize;

use super::{StyleError, StyleMetrics};
use crate::corpus::{Cohort, Corpus};

/// Mean style metrics of all songs sharing a year and cohort.
///
/// Duration and speed means cover only songs with a known duration; the
/// `*_coverage` fields count those songs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct YearCohortAggregate {
    pub year: i32,
    pub cohort: Cohort,
    pub song_count: usize,
    pub mean_length_words: f64,
    pub mean_duration_seconds: Option<f64>,
    pub duration_coverage: usize,
    pub mean_speed_wps: Option<f64>,
    pub speed_coverage: usize,
    pub mean_repetitiveness_pct: f64,
    pub mean_fk_grade: f64,
    pub mean_swear_count: f64,
    pub mean_swear_rate: f64,
}

/// Values are summed in sorted order so the mean does not depend on input order.
fn mean(values: &mut [f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    values.sort_unstable_by(f64::total_cmp);
    Some(values.iter().sum::<f64>() / values.len() as f64)
}

#[derive(Default)]
struct Cell {
    length: Vec<f64>,
    duration: Vec<f64>,
    speed: Vec<f64>,
    repetitiveness: Vec<f64>,
    fk: Vec<f64>,
    swear_count: Vec<f64>,
    swear_rate: Vec<f64>,
}

/// Per-(year, cohort) means, sorted by year then cohort. Empty cells are omitted.
///
/// `metrics` must be aligned with the corpus songs.
pub fn aggregate(corpus: &Corpus, metrics: &[StyleMetrics]) -> Result<Vec<YearCohortAggregate>, StyleError> {
    if metrics.len() != corpus.len() {
        return Err(StyleError::MetricsMismatch(format!(
            "{} metrics for {} songs",
            metrics.len(),
            corpus.len()
        )));
    }
    let mut cells: BTreeMap<(i32, Cohort), Cell> = BTreeMap::new();
    for (record, m) in corpus.records().iter().zip(metrics) {
        if record.id != m.song_id {
            return Err(StyleError::MetricsMismatch(format!(
                "metrics for {:?} aligned with song {:?}",
                m.song_id, record.id
            )));
        }
        let cell = cells.entry((record.year, record.cohort)).or_default();
        cell.length.push(m.length_words as f64);
        cell.duration.extend(m.duration_seconds);
        cell.speed.extend(m.speed_wps);
        cell.repetitiveness.push(m.repetitiveness_pct);
        cell.fk.push(m.fk_grade);
        cell.swear_count.push(m.swear_count as f64);
        cell.swear_rate.push(m.swear_rate);
    }
    Ok(cells
        .into_iter()
        .map(|((year, cohort), mut c)| YearCohortAggregate {
            year,
            cohort,
            song_count: c.length.len(),
            mean_length_words: mean(&mut c.length).unwrap_or_default(),
            duration_coverage: c.duration.len(),
            mean_duration_seconds: mean(&mut c.duration),
            speed_coverage: c.speed.len(),
            mean_speed_wps: mean(&mut c.speed),
            mean_repetitiveness_pct: mean(&mut c.repetitiveness).unwrap_or_default(),
            mean_fk_grade: mean(&mut c.fk).unwrap_or_default(),
            mean_swear_count: mean(&mut c.swear_count).unwrap_or_default(),
            mean_swear_rate: mean(&mut c.swear_rate).unwrap_or_default(),
        })
        .collect())
}
