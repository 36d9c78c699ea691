use std::fs;
use std::io::Write;
use std::path::Path;

use super::{AbReport, HarnessError, IntervalReport};
use crate::rl::write_trace;
use crate::vcam::TimeOfDay;

pub const INTERVALS_HEADER: [&str; 10] = [
    "interval",
    "time",
    "baseline_quality",
    "tuned_quality",
    "baseline_map",
    "tuned_map",
    "improvement_pct",
    "upper_map",
    "upper_config",
    "tuned_config",
];

pub const CDF_HEADER: [&str; 2] = ["improvement_pct", "fraction"];

/// Empirical CDF points `(value, fraction ≤ value)`, values ascending.
pub fn improvement_cdf(values: &[f64]) -> Vec<(f64, f64)> {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len() as f64;
    v.into_iter().enumerate().map(|(i, x)| (x, (i + 1) as f64 / n)).collect()
}

pub fn write_intervals<W: Write>(out: W, rows: &[IntervalReport]) -> Result<(), HarnessError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(INTERVALS_HEADER)?;
    let cfg = |c: [f64; 4]| c.map(|v| v.to_string()).join(" ");
    for r in rows {
        w.write_record([
            r.interval.to_string(),
            r.time.clone(),
            r.baseline_quality.to_string(),
            r.tuned_quality.to_string(),
            r.baseline.map.to_string(),
            r.tuned.map.to_string(),
            r.improvement_pct().to_string(),
            r.upper.map(|u| u.map.to_string()).unwrap_or_default(),
            r.upper_config.map(|c| cfg(c.to_array())).unwrap_or_default(),
            cfg(r.tuned_config.to_array()),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_cdf<W: Write>(out: W, values: &[f64]) -> Result<(), HarnessError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CDF_HEADER)?;
    for (x, f) in improvement_cdf(values) {
        w.write_record([x.to_string(), f.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// Writes `intervals.csv`, `improvement_cdf.csv`, `summary.json`,
/// `qtable.json` and one `traces/trace_HHMM.csv` per interval into `dir`.
pub fn write_report(report: &AbReport, dir: &Path) -> Result<(), HarnessError> {
    fs::create_dir_all(dir.join("traces"))?;
    write_intervals(fs::File::create(dir.join("intervals.csv"))?, &report.intervals)?;
    let gains: Vec<f64> = report.intervals.iter().map(IntervalReport::improvement_pct).collect();
    write_cdf(fs::File::create(dir.join("improvement_cdf.csv"))?, &gains)?;
    for (iv, steps) in &report.traces {
        let (h, m, _) = TimeOfDay::interval_start(*iv)?.hms();
        let path = dir.join("traces").join(format!("trace_{h:02}{m:02}.csv"));
        write_trace(fs::File::create(path)?, steps)?;
    }
    fs::write(dir.join("qtable.json"), report.q.to_json()?)?;
    let summary = serde_json::json!({
        "source_interval": report.source_interval,
        "intervals": report.intervals.len(),
        "baseline_map": report.baseline_map,
        "tuned_map": report.tuned_map,
        "mean_baseline_quality": report.mean_baseline_quality(),
        "mean_tuned_quality": report.mean_tuned_quality(),
        "quality_gain_pct": report.quality_gain_pct(),
    });
    fs::write(dir.join("summary.json"), serde_json::to_string_pretty(&summary)?)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cdf_is_sorted_and_ends_at_one() {
        let cdf = improvement_cdf(&[3.0, -1.0, 0.0, 3.0]);
        assert_eq!(cdf, vec![(-1.0, 0.25), (0.0, 0.5), (3.0, 0.75), (3.0, 1.0)]);
        assert!(improvement_cdf(&[]).is_empty());
    }

    #[test]
    fn cdf_header_is_stable() {
        let mut buf = Vec::new();
        write_cdf(&mut buf, &[2.5]).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "improvement_pct,fraction\n2.5,1\n");
    }
}
