//! CSV / JSON report writers.

use std::fs;
use std::path::{Path, PathBuf};

use super::RepeatabilityResult;
use crate::eas::format_sig9;
use crate::error::{Error, Result};

pub const REPORT_HEADER: &str = "detector,condition,top_n,n_c,repeatability";

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn results_to_csv(rows: &[RepeatabilityResult]) -> String {
    let mut out = String::from(REPORT_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            csv_field(&r.detector),
            csv_field(&r.condition),
            r.top_n,
            r.n_c,
            format_sig9(r.repeatability)
        ));
    }
    out
}

pub fn results_to_json(rows: &[RepeatabilityResult]) -> String {
    serde_json::to_string_pretty(rows).expect("results serialise")
}

/// Rows of one detector as `condition,top_n,n_c,repeatability`.
pub fn series_csv(rows: &[RepeatabilityResult], detector: &str) -> String {
    let mut out = String::from("condition,top_n,n_c,repeatability\n");
    for r in rows.iter().filter(|r| r.detector == detector) {
        out.push_str(&format!(
            "{},{},{},{}\n",
            csv_field(&r.condition),
            r.top_n,
            r.n_c,
            format_sig9(r.repeatability)
        ));
    }
    out
}

/// Writes `<stem>.<detector>.csv` next to `report` for every detector present.
pub fn write_series(report: &Path, rows: &[RepeatabilityResult]) -> Result<Vec<PathBuf>> {
    let stem = report
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "report".into());
    let dir = report.parent().unwrap_or_else(|| Path::new(""));
    let mut detectors: Vec<&str> = Vec::new();
    for r in rows {
        if !detectors.contains(&r.detector.as_str()) {
            detectors.push(&r.detector);
        }
    }
    detectors
        .into_iter()
        .map(|d| {
            let path = dir.join(format!("{stem}.{d}.csv"));
            fs::write(&path, series_csv(rows, d)).map_err(|e| Error::io(&path, e))?;
            Ok(path)
        })
        .collect()
}
