//! Blur-robust keypoint detection with the eigenvalue-asymmetry (EAS) score.
//!
//! The crate is split into:
//!
//! - [`imagecore`]: the `ImageF` raster, image files, convolution and warps
//! - [`gradients`]: derivatives, windowed moment maps and 2×2 eigenvalues
//! - [`pyramid`]: the octave stack
//! - [`eas`]: the EAS detector
//! - [`baselines`]: Harris and minimum-eigenvalue detectors
//! - [`blur_lab`]: synthetic blur and noise
//! - [`evalbench`]: repeatability, sweeps and timing
//! - [`synth`]: deterministic test images

pub mod baselines;
pub mod blur_lab;
pub mod eas;
pub mod error;
pub mod evalbench;
pub mod gradients;
pub mod imagecore;
pub mod pyramid;
pub mod synth;

pub use baselines::{detect_baseline, BaselineKind};
pub use blur_lab::{apply_pipeline, parse_pipeline, BlurKind, BlurPipeline, BlurSpec};
pub use eas::{detect, EasConfig, Keypoint};
pub use error::{Error, Result};
pub use evalbench::{Detector, EvalConfig, RepeatabilityResult};
pub use imagecore::{load_image, save_image, ImageF, Rect, SaveMode, WarpKind, WarpSpec};
