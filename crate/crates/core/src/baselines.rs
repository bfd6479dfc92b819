//! Harris and minimum-eigenvalue corner scores on the same pyramid and ranking.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::eas::{detect_with_scores, octave_moments, EasConfig, Keypoint};
use crate::error::{Error, Result};
use crate::gradients::{eigen_pair, MomentMaps};
use crate::imagecore::ImageF;

pub const DEFAULT_HARRIS_K: f64 = 0.04;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BaselineKind {
    Harris { k: f64 },
    MinEigen,
}

impl BaselineKind {
    pub fn harris() -> Self {
        BaselineKind::Harris { k: DEFAULT_HARRIS_K }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            BaselineKind::Harris { k } if !(k > 0.0 && k < 0.25) => {
                Err(Error::Config(format!("harris k must be in (0, 0.25), got {k}")))
            }
            _ => Ok(()),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            BaselineKind::Harris { .. } => "harris",
            BaselineKind::MinEigen => "min_eigen",
        }
    }
}

impl fmt::Display for BaselineKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BaselineKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "harris" => Ok(BaselineKind::harris()),
            "min_eigen" | "min-eigen" => Ok(BaselineKind::MinEigen),
            other => Err(Error::UnknownDetector(other.to_string())),
        }
    }
}

/// `det − k·trace²` for Harris, `λmin` for the minimum-eigenvalue detector.
pub fn baseline_score(m: &MomentMaps, b: BaselineKind) -> ImageF {
    let (w, h) = m.dims();
    let data = m
        .sxx
        .data()
        .iter()
        .zip(m.syy.data())
        .zip(m.sxy.data())
        .map(|((&a, &c), &bxy)| match b {
            BaselineKind::Harris { k } => {
                let trace = a + c;
                (a * c - bxy * bxy) - k * trace * trace
            }
            BaselineKind::MinEigen => eigen_pair(a, c, bxy).1,
        })
        .collect();
    ImageF::from_raw(w, h, data)
}

/// Baseline score map of one octave image, floored at zero.
pub fn baseline_score_map(level: &ImageF, octave: usize, b: BaselineKind, cfg: &EasConfig) -> Result<ImageF> {
    // baselines always use the full structure tensor
    let m = octave_moments(level, octave, cfg, false)?;
    Ok(baseline_score(&m, b).map(|v| v.max(0.0)))
}

pub fn detect_baseline(img: &ImageF, b: BaselineKind, cfg: &EasConfig, top_n: usize) -> Result<Vec<Keypoint>> {
    b.validate()?;
    detect_with_scores(img, cfg, top_n, |level, octave| baseline_score_map(level, octave, b, cfg))
}
