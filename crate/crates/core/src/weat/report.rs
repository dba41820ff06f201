use std::io::Write;

use super::BatteryEntry;

/// One row per battery entry; failed tests leave the numeric cells empty and fill `error`.
pub fn write_results_csv<W: Write>(out: W, entries: &[BatteryEntry]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "test_name",
        "effect_size",
        "test_statistic",
        "p_value",
        "p_method",
        "coverage_x",
        "coverage_y",
        "coverage_a",
        "coverage_b",
        "dropped_words",
        "error",
    ])?;
    for e in entries {
        let (numbers, error) = match &e.outcome {
            Ok(r) => (
                [
                    r.effect_size.to_string(),
                    r.test_statistic.to_string(),
                    r.p_value.to_string(),
                    r.p_method.to_string(),
                ],
                String::new(),
            ),
            Err(err) => (Default::default(), err.to_string()),
        };
        let [d, s, p, method] = numbers;
        w.write_record([
            e.test_name.clone(),
            d,
            s,
            p,
            method,
            e.coverage.x.to_string(),
            e.coverage.y.to_string(),
            e.coverage.a.to_string(),
            e.coverage.b.to_string(),
            e.dropped_words.join(";"),
            error,
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Fixed-width table of effect sizes, one numbered row per test.
pub fn write_summary<W: Write>(mut out: W, entries: &[BatteryEntry]) -> std::io::Result<()> {
    let width = entries.iter().map(|e| e.test_name.chars().count()).max().unwrap_or(4).max(4);
    writeln!(
        out,
        "{:>3}  {:<width$}  {:>11}  {:>9}  {:>7}  {:>7}  {:>7}  {:>7}",
        "No.", "Test", "Effect size", "p-value", "X", "Y", "A", "B"
    )?;
    for (i, e) in entries.iter().enumerate() {
        let c = &e.coverage;
        let (d, p) = match &e.outcome {
            Ok(r) => (format!("{:.2}", r.effect_size), format!("{:.4}", r.p_value)),
            Err(_) => ("-".to_owned(), "-".to_owned()),
        };
        writeln!(
            out,
            "{:>3}  {:<width$}  {:>11}  {:>9}  {:>7}  {:>7}  {:>7}  {:>7}",
            i + 1,
            e.test_name,
            d,
            p,
            c.x.to_string(),
            c.y.to_string(),
            c.a.to_string(),
            c.b.to_string()
        )?;
        if let Err(err) = &e.outcome {
            writeln!(out, "     error: {err}")?;
        }
    }
    Ok(())
}
