//! Repeatability benchmark: correspondence counting, blur sweeps and timing.
//!
//! Repeatability is `n_c / top_n`, where `n_c` counts one-to-one pairs between
//! the top-N keypoints of a reference image and of its degraded copy that land
//! on the same position once the geometric transform is accounted for.

mod report;

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use report::{results_to_csv, results_to_json, series_csv, write_series, REPORT_HEADER};

use crate::baselines::{detect_baseline, BaselineKind};
use crate::blur_lab::{apply_pipeline, BlurPipeline, BlurSpec};
use crate::eas::{detect, EasConfig, Keypoint};
use crate::error::{Error, Result};
use crate::imagecore::{warp, ImageF, WarpSpec};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Detector {
    Eas,
    Baseline(BaselineKind),
}

impl Detector {
    pub const ALL: [Detector; 3] = [
        Detector::Eas,
        Detector::Baseline(BaselineKind::Harris { k: crate::baselines::DEFAULT_HARRIS_K }),
        Detector::Baseline(BaselineKind::MinEigen),
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Detector::Eas => "eas",
            Detector::Baseline(b) => b.name(),
        }
    }

    pub fn detect(&self, img: &ImageF, cfg: &EasConfig, top_n: usize) -> Result<Vec<Keypoint>> {
        match *self {
            Detector::Eas => detect(img, cfg, top_n),
            Detector::Baseline(b) => detect_baseline(img, b, cfg, top_n),
        }
    }
}

impl fmt::Display for Detector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Detector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "eas" => Ok(Detector::Eas),
            other => other.parse().map(Detector::Baseline),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalConfig {
    pub top_n: usize,
    /// Correspondence distance in pixels; 0 demands identical integer positions.
    pub tol: f64,
    /// Geometric transform applied after the blur pipeline.
    pub transform: WarpSpec,
}

impl EvalConfig {
    pub fn new(top_n: usize, tol: f64) -> Self {
        Self {
            top_n,
            tol,
            transform: WarpSpec::identity(),
        }
    }

    pub fn with_transform(mut self, transform: WarpSpec) -> Self {
        self.transform = transform;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.top_n == 0 {
            return Err(Error::Config("top_n must be >= 1".into()));
        }
        if !(self.tol.is_finite() && self.tol >= 0.0) {
            return Err(Error::Config(format!("tol must be >= 0, got {}", self.tol)));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RepeatabilityResult {
    pub detector: String,
    pub condition: String,
    pub top_n: usize,
    pub n_c: usize,
    pub repeatability: f64,
}

/// Greedy one-to-one matching between `a` (mapped through `w`) and `b`.
///
/// `a` is visited in descending score order (stable for ties); each visit takes
/// the nearest unused keypoint of `b` within `tol`, preferring the lower index
/// on distance ties. With `tol == 0` the mapped position is rounded and must
/// equal the partner's coordinates exactly. Scale is ignored.
pub fn correspondences(a: &[Keypoint], b: &[Keypoint], w: &WarpSpec, tol: f64) -> usize {
    let mut order: Vec<usize> = (0..a.len()).collect();
    order.sort_by(|&i, &j| a[j].score.total_cmp(&a[i].score));
    let mut used = vec![false; b.len()];
    let mut count = 0;
    for i in order {
        let (px, py) = w.apply(a[i].x as f64, a[i].y as f64);
        let mut best: Option<(usize, f64)> = None;
        if tol == 0.0 {
            let (rx, ry) = (px.round(), py.round());
            best = b
                .iter()
                .enumerate()
                .find(|&(j, k)| !used[j] && k.x as f64 == rx && k.y as f64 == ry)
                .map(|(j, _)| (j, 0.0));
        } else {
            for (j, k) in b.iter().enumerate() {
                if used[j] {
                    continue;
                }
                let d = (k.x as f64 - px).hypot(k.y as f64 - py);
                if d <= tol && best.is_none_or(|(_, bd)| d < bd) {
                    best = Some((j, d));
                }
            }
        }
        if let Some((j, _)) = best {
            used[j] = true;
            count += 1;
        }
    }
    count
}

/// Human-readable description of a degradation for reports.
pub fn condition_label(pipeline: Option<&BlurPipeline>, transform: &WarpSpec) -> String {
    let blur = pipeline.map_or_else(|| "none".to_string(), |p| p.to_string());
    if transform.is_identity() {
        blur
    } else {
        let m = transform.matrix;
        format!(
            "{blur} then warp [{} {} {}; {} {} {}]",
            m[0][0], m[0][1], m[0][2], m[1][0], m[1][1], m[1][2]
        )
    }
}

/// Blurs with `pipeline` (if any) and then applies the transform.
pub fn degrade(img: &ImageF, pipeline: Option<&BlurPipeline>, transform: &WarpSpec) -> Result<ImageF> {
    let blurred = match pipeline {
        Some(p) => apply_pipeline(img, p)?,
        None => img.clone(),
    };
    if transform.is_identity() {
        Ok(blurred)
    } else {
        let size = transform.output_size(img.width(), img.height());
        warp(&blurred, transform, size, 0.0)
    }
}

pub fn repeatability(
    img: &ImageF,
    detector: Detector,
    pipeline: Option<&BlurPipeline>,
    cfg: &EvalConfig,
    eas_cfg: &EasConfig,
) -> Result<RepeatabilityResult> {
    cfg.validate()?;
    let degraded = degrade(img, pipeline, &cfg.transform)?;
    let reference = detector.detect(img, eas_cfg, cfg.top_n)?;
    let candidates = detector.detect(&degraded, eas_cfg, cfg.top_n)?;
    let n_c = correspondences(&reference, &candidates, &cfg.transform, cfg.tol);
    Ok(RepeatabilityResult {
        detector: detector.name().to_string(),
        condition: condition_label(pipeline, &cfg.transform),
        top_n: cfg.top_n,
        n_c,
        repeatability: n_c as f64 / cfg.top_n as f64,
    })
}

/// Blur parameter swept by [`sweep`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    GaussianSigma(Vec<f64>),
    MotionLength { lengths: Vec<f64>, theta: f64 },
}

impl SweepAxis {
    pub fn steps(&self) -> Vec<BlurSpec> {
        match self {
            SweepAxis::GaussianSigma(s) => s.iter().map(|&v| BlurSpec::gaussian(v)).collect(),
            SweepAxis::MotionLength { lengths, theta } => {
                lengths.iter().map(|&l| BlurSpec::motion(l, *theta)).collect()
            }
        }
    }

    pub fn len(&self) -> usize {
        match self {
            SweepAxis::GaussianSigma(s) => s.len(),
            SweepAxis::MotionLength { lengths, .. } => lengths.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Evaluates the detector × condition × top-N grid.
///
/// Each detector runs once per image at the largest top-N; smaller top-N
/// values use prefixes of that ranking. Rows are ordered by detector, then
/// condition, then top-N, following the order of the inputs.
pub fn sweep(
    img: &ImageF,
    detectors: &[Detector],
    axis: &SweepAxis,
    top_ns: &[usize],
    tol: f64,
    eas_cfg: &EasConfig,
) -> Result<Vec<RepeatabilityResult>> {
    if detectors.is_empty() || axis.is_empty() || top_ns.is_empty() {
        return Err(Error::Config("sweep needs at least one detector, condition and top_n".into()));
    }
    let max_n = *top_ns.iter().max().expect("non-empty");
    EvalConfig::new(max_n, tol).validate()?;
    if top_ns.contains(&0) {
        return Err(Error::Config("top_n must be >= 1".into()));
    }
    let references: Vec<Vec<Keypoint>> = detectors
        .par_iter()
        .map(|d| d.detect(img, eas_cfg, max_n))
        .collect::<Result<_>>()?;
    let pipelines: Vec<BlurPipeline> = axis
        .steps()
        .into_iter()
        .map(BlurPipeline::single)
        .collect::<Result<_>>()?;
    let identity = WarpSpec::identity();
    // cells[condition][detector] -> n_c per top_n
    let cells: Vec<Vec<Vec<usize>>> = pipelines
        .par_iter()
        .map(|p| -> Result<Vec<Vec<usize>>> {
            let degraded = apply_pipeline(img, p)?;
            detectors
                .par_iter()
                .zip(&references)
                .map(|(d, reference)| {
                    let found = d.detect(&degraded, eas_cfg, max_n)?;
                    Ok(top_ns
                        .iter()
                        .map(|&n| {
                            let a = &reference[..n.min(reference.len())];
                            let b = &found[..n.min(found.len())];
                            correspondences(a, b, &identity, tol)
                        })
                        .collect())
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    let mut rows = Vec::with_capacity(detectors.len() * pipelines.len() * top_ns.len());
    for (di, d) in detectors.iter().enumerate() {
        for (ci, p) in pipelines.iter().enumerate() {
            for (ni, &n) in top_ns.iter().enumerate() {
                let n_c = cells[ci][di][ni];
                rows.push(RepeatabilityResult {
                    detector: d.name().to_string(),
                    condition: condition_label(Some(p), &identity),
                    top_n: n,
                    n_c,
                    repeatability: n_c as f64 / n as f64,
                });
            }
        }
    }
    Ok(rows)
}

/// Mean repeatability of one detector over all rows with the given top-N.
pub fn mean_repeatability(rows: &[RepeatabilityResult], detector: &str, top_n: usize) -> Option<f64> {
    let vals: Vec<f64> = rows
        .iter()
        .filter(|r| r.detector == detector && r.top_n == top_n)
        .map(|r| r.repeatability)
        .collect();
    (!vals.is_empty()).then(|| vals.iter().sum::<f64>() / vals.len() as f64)
}

/// Median wall-clock milliseconds of a full detection, after one warm-up run.
pub fn timing(img: &ImageF, detector: Detector, cfg: &EasConfig, top_n: usize, repeats: usize) -> Result<f64> {
    if repeats < 3 {
        return Err(Error::Config(format!("repeats must be >= 3, got {repeats}")));
    }
    detector.detect(img, cfg, top_n)?;
    let mut times = Vec::with_capacity(repeats);
    for _ in 0..repeats {
        let start = Instant::now();
        let kps = detector.detect(img, cfg, top_n)?;
        times.push(start.elapsed().as_secs_f64() * 1e3);
        std::hint::black_box(kps);
    }
    times.sort_by(f64::total_cmp);
    let mid = times.len() / 2;
    Ok(if times.len() % 2 == 1 {
        times[mid]
    } else {
        0.5 * (times[mid - 1] + times[mid])
    })
}
