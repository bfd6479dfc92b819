//! Keypoint list serialisation.
//!
//! CSV: header `x,y,r,score,octave`, one keypoint per line, score with nine
//! significant digits. JSON: an array of objects with the same field names.

use super::Keypoint;
use crate::error::{Error, Result};

pub const CSV_HEADER: &str = "x,y,r,score,octave";

/// Formats like C's `%.9g`.
pub fn format_sig9(v: f64) -> String {
    const DIGITS: i32 = 9;
    if v == 0.0 {
        return "0".into();
    }
    if !v.is_finite() {
        return v.to_string();
    }
    let sci = format!("{:.*e}", (DIGITS - 1) as usize, v);
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("exponent digits");
    if !(-4..DIGITS).contains(&exp) {
        let mantissa = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (DIGITS - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{v:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub fn keypoints_to_csv(kps: &[Keypoint]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for k in kps {
        out.push_str(&format!("{},{},{},{},{}\n", k.x, k.y, k.r, format_sig9(k.score), k.octave));
    }
    out
}

pub fn keypoints_to_json(kps: &[Keypoint]) -> String {
    serde_json::to_string_pretty(kps).expect("keypoints serialise")
}

pub fn keypoints_from_csv(text: &str) -> Result<Vec<Keypoint>> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h.trim() == CSV_HEADER => {}
        _ => return Err(Error::Format(format!("expected CSV header `{CSV_HEADER}`"))),
    }
    lines
        .filter(|l| !l.trim().is_empty())
        .enumerate()
        .map(|(i, line)| {
            let bad = || Error::Format(format!("bad keypoint row {}: `{line}`", i + 2));
            let f: Vec<&str> = line.split(',').map(str::trim).collect();
            if f.len() != 5 {
                return Err(bad());
            }
            Ok(Keypoint {
                x: f[0].parse().map_err(|_| bad())?,
                y: f[1].parse().map_err(|_| bad())?,
                r: f[2].parse().map_err(|_| bad())?,
                score: f[3].parse().map_err(|_| bad())?,
                octave: f[4].parse().map_err(|_| bad())?,
            })
        })
        .collect()
}
