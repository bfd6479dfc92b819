//! Eigenvalue-asymmetry keypoint detector.
//!
//! For every octave of the pyramid the detector averages squared derivatives
//! over a `K × K` box, takes the per-pixel eigenvalue sum (the trace), and
//! scores each pixel by how much that trace differs across the four opposite
//! pairs of its 8-neighbourhood. Elongated (edge-like) pixels are zeroed,
//! strict local maxima survive, and all octaves are pooled into one ranking.

mod distance;
mod keypoints;
mod nms;
mod score;

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

pub use distance::DerivativeMoments;
pub use keypoints::{format_sig9, keypoints_from_csv, keypoints_to_csv, keypoints_to_json};
pub use nms::{nms, Peak};
pub use score::{eas_map, edge_mask, passes_edge_test, trace_map, EIGEN_EPS};

use crate::error::{Error, Result};
use crate::gradients::{derivatives, moment_maps, MomentMaps, MomentParams};
use crate::imagecore::ImageF;
use crate::pyramid::{build_pyramid, MAX_OCTAVES};

/// A detected keypoint in original-image coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Keypoint {
    pub x: u32,
    pub y: u32,
    /// Blob radius, `2^octave`.
    pub r: u32,
    pub score: f64,
    pub octave: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EasConfig {
    /// Upper bound on squared derivatives.
    pub clamp: f64,
    /// Use only derivatives with `ix ≥ 0, iy ≥ 0`.
    pub quadrant_mask: bool,
    /// Maximum allowed `λmax / λmin` before a pixel counts as an edge.
    pub edge_thr: f64,
    pub max_octaves: usize,
    /// Averaging window at octave 0; octave `o` uses `k_base / 2^o` made odd.
    pub k_base: f64,
    pub nms_radius: usize,
}

impl Default for EasConfig {
    fn default() -> Self {
        Self {
            clamp: 1.0,
            quadrant_mask: true,
            edge_thr: 5.0,
            max_octaves: MAX_OCTAVES,
            k_base: 10.0,
            nms_radius: 1,
        }
    }
}

impl EasConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.clamp.is_finite() && self.clamp > 0.0) {
            return Err(Error::Config(format!("clamp must be > 0, got {}", self.clamp)));
        }
        if self.edge_thr.is_nan() || self.edge_thr <= 1.0 {
            return Err(Error::Config(format!("edge_thr must be > 1, got {}", self.edge_thr)));
        }
        if !(1..=MAX_OCTAVES).contains(&self.max_octaves) {
            return Err(Error::Config(format!(
                "max_octaves must be in 1..={MAX_OCTAVES}, got {}",
                self.max_octaves
            )));
        }
        if !(self.k_base.is_finite() && self.k_base >= 1.0) {
            return Err(Error::Config(format!("k_base must be >= 1, got {}", self.k_base)));
        }
        if self.nms_radius == 0 {
            return Err(Error::Config("nms_radius must be >= 1".into()));
        }
        Ok(())
    }

    /// Box window for `octave`: `round(k_base / 2^octave)`, floored at 1, then
    /// raised to the next odd value. The defaults give 11, 5, 3, 1, 1, 1.
    pub fn window_for_octave(&self, octave: usize) -> usize {
        let k = (self.k_base / (1u64 << octave) as f64).round().max(1.0) as usize;
        k | 1
    }

    pub fn moment_params(&self, octave: usize, quadrant_mask: bool) -> MomentParams {
        MomentParams {
            clamp: self.clamp,
            quadrant_mask,
            window: self.window_for_octave(octave),
        }
    }
}

/// Moment maps of one octave image with this configuration's window schedule.
pub fn octave_moments(level: &ImageF, octave: usize, cfg: &EasConfig, quadrant_mask: bool) -> Result<MomentMaps> {
    moment_maps(&derivatives(level), cfg.moment_params(octave, quadrant_mask))
}

/// Edge-filtered EAS score map of a single octave image.
pub fn eas_score_map(level: &ImageF, octave: usize, cfg: &EasConfig) -> Result<ImageF> {
    let m = octave_moments(level, octave, cfg, cfg.quadrant_mask)?;
    let eas = eas_map(&trace_map(&m));
    Ok(eas.zip_map(&edge_mask(&m, cfg.edge_thr), |s, keep| s * keep))
}

/// Edge-filtered EAS score maps for every octave of `img`.
pub fn eas_score_maps(img: &ImageF, cfg: &EasConfig) -> Result<Vec<ImageF>> {
    cfg.validate()?;
    let pyramid = build_pyramid(img, cfg.max_octaves)?;
    pyramid
        .levels()
        .iter()
        .enumerate()
        .map(|(o, level)| eas_score_map(level, o, cfg))
        .collect()
}

/// Detects the `top_n` strongest EAS keypoints across all octaves.
pub fn detect(img: &ImageF, cfg: &EasConfig, top_n: usize) -> Result<Vec<Keypoint>> {
    detect_with_scores(img, cfg, top_n, |level, octave| eas_score_map(level, octave, cfg))
}

/// Shared pyramid → score → NMS → pooled ranking pipeline.
///
/// `score` maps an octave image and its index to a non-negative score map.
pub fn detect_with_scores<F>(img: &ImageF, cfg: &EasConfig, top_n: usize, score: F) -> Result<Vec<Keypoint>>
where
    F: Fn(&ImageF, usize) -> Result<ImageF>,
{
    cfg.validate()?;
    if top_n == 0 {
        return Err(Error::Config("top_n must be >= 1".into()));
    }
    let pyramid = build_pyramid(img, cfg.max_octaves)?;
    let (w, h) = img.dims();
    let mut pool = Vec::new();
    for (octave, level) in pyramid.levels().iter().enumerate() {
        let map = score(level, octave)?;
        let r = 1u32 << octave;
        for p in nms(&map, cfg.nms_radius) {
            let x = p.x << octave;
            let y = p.y << octave;
            debug_assert!(x < w && y < h);
            pool.push(Keypoint {
                x: x as u32,
                y: y as u32,
                r,
                score: p.score,
                octave: octave as u32,
            });
        }
    }
    pool.sort_by(rank_order);
    pool.truncate(top_n);
    Ok(pool)
}

/// Score descending, then octave, y and x ascending.
pub fn rank_order(a: &Keypoint, b: &Keypoint) -> Ordering {
    b.score
        .total_cmp(&a.score)
        .then(a.octave.cmp(&b.octave))
        .then(a.y.cmp(&b.y))
        .then(a.x.cmp(&b.x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth;

    #[test]
    fn window_schedule_defaults() {
        let cfg = EasConfig::default();
        let ks: Vec<usize> = (0..6).map(|o| cfg.window_for_octave(o)).collect();
        assert_eq!(ks, vec![11, 5, 3, 1, 1, 1]);
    }

    #[test]
    fn config_validation() {
        assert!(EasConfig::default().validate().is_ok());
        let bad = [
            EasConfig { clamp: 0.0, ..Default::default() },
            EasConfig { edge_thr: 1.0, ..Default::default() },
            EasConfig { max_octaves: 0, ..Default::default() },
            EasConfig { max_octaves: 7, ..Default::default() },
            EasConfig { nms_radius: 0, ..Default::default() },
        ];
        for cfg in bad {
            assert!(cfg.validate().is_err(), "{cfg:?}");
        }
    }

    #[test]
    fn constant_image_yields_nothing() {
        let kps = detect(&ImageF::filled(64, 64, 0.5), &EasConfig::default(), 100).unwrap();
        assert!(kps.is_empty());
    }

    #[test]
    fn too_small_is_propagated() {
        let err = detect(&ImageF::filled(8, 32, 0.5), &EasConfig::default(), 10).unwrap_err();
        assert!(matches!(err, Error::TooSmall { .. }));
    }

    #[test]
    fn keypoints_are_well_formed_and_ranked() {
        let img = synth::natural_scene(128, 96, 3);
        let kps = detect(&img, &EasConfig::default(), 300).unwrap();
        assert!(!kps.is_empty());
        for k in &kps {
            assert_eq!(k.r, 1 << k.octave);
            assert!(k.score > 0.0);
            assert!((k.x as usize) < 128 && (k.y as usize) < 96);
            assert_eq!(k.x % k.r, 0);
            assert_eq!(k.y % k.r, 0);
        }
        for pair in kps.windows(2) {
            assert_ne!(rank_order(&pair[0], &pair[1]), Ordering::Greater);
        }
    }

    #[test]
    fn top_n_is_a_prefix() {
        let img = synth::natural_scene(96, 96, 8);
        let cfg = EasConfig::default();
        let long = detect(&img, &cfg, 200).unwrap();
        let short = detect(&img, &cfg, 50).unwrap();
        assert_eq!(&long[..short.len()], &short[..]);
    }
}
