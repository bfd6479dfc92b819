//! Synthetic degradations: Gaussian, linear motion and rotational blur, plus
//! salt-and-pepper noise, each optionally confined to a rectangle.

mod pipeline_file;

use std::f64::consts::PI;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use pipeline_file::parse_pipeline;

use crate::error::{Error, Result};
use crate::imagecore::{convolve, ImageF, Kernel2D, Rect, WarpSpec};

pub const DEFAULT_ROTATION_SAMPLES: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum BlurKind {
    Gaussian {
        sigma: f64,
    },
    Motion {
        length: f64,
        theta: f64,
    },
    /// Rotation about `center` (image centre when `None`) spread over `alpha` radians.
    Rotational {
        alpha: f64,
        center: Option<(f64, f64)>,
        samples: usize,
    },
    SaltPepper {
        fraction: f64,
        seed: u64,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlurSpec {
    pub kind: BlurKind,
    /// Restrict the degradation to this rectangle; whole image when `None`.
    pub region: Option<Rect>,
}

impl BlurSpec {
    pub fn gaussian(sigma: f64) -> Self {
        Self::whole(BlurKind::Gaussian { sigma })
    }

    pub fn motion(length: f64, theta: f64) -> Self {
        Self::whole(BlurKind::Motion { length, theta })
    }

    pub fn rotational(alpha: f64, center: Option<(f64, f64)>) -> Self {
        Self::whole(BlurKind::Rotational {
            alpha,
            center,
            samples: DEFAULT_ROTATION_SAMPLES,
        })
    }

    pub fn salt_pepper(fraction: f64, seed: u64) -> Self {
        Self::whole(BlurKind::SaltPepper { fraction, seed })
    }

    fn whole(kind: BlurKind) -> Self {
        Self { kind, region: None }
    }

    pub fn in_region(mut self, region: Rect) -> Self {
        self.region = Some(region);
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        match self.kind {
            BlurKind::Gaussian { sigma } if !(sigma > 0.0 && sigma.is_finite()) => {
                bad(format!("gaussian sigma must be > 0, got {sigma}"))
            }
            BlurKind::Motion { length, theta } if !(length >= 1.0 && length.is_finite() && theta.is_finite()) => {
                bad(format!("motion length must be >= 1, got {length}"))
            }
            BlurKind::Rotational { alpha, samples, .. } if !(alpha > 0.0 && alpha < 2.0 * PI) || samples < 2 => {
                bad(format!("rotational blur needs 0 < alpha < 2π and >= 2 samples, got {alpha}, {samples}"))
            }
            BlurKind::SaltPepper { fraction, .. } if !(0.0..=1.0).contains(&fraction) => {
                bad(format!("salt-and-pepper fraction must be in [0, 1], got {fraction}"))
            }
            _ => Ok(()),
        }
    }

    /// Applies this single step to `img`.
    pub fn apply(&self, img: &ImageF) -> Result<ImageF> {
        self.validate()?;
        let degraded = match self.kind {
            BlurKind::Gaussian { sigma } => convolve(img, &gaussian_kernel(sigma)),
            BlurKind::Motion { length, theta } => convolve(img, &motion_kernel(length, theta)),
            BlurKind::Rotational { alpha, center, samples } => {
                let c = center.unwrap_or_else(|| image_center(img));
                rotational_blur(img, alpha, c, samples)
            }
            BlurKind::SaltPepper { fraction, seed } => {
                return Ok(salt_pepper(img, fraction, seed, self.region));
            }
        };
        Ok(match self.region {
            None => degraded,
            Some(region) => {
                let mut out = img.clone();
                out.paste_region(&degraded, region);
                out
            }
        })
    }
}

impl fmt::Display for BlurSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            BlurKind::Gaussian { sigma } => write!(f, "gaussian sigma={sigma}")?,
            BlurKind::Motion { length, theta } => write!(f, "motion l={length} theta={theta}")?,
            BlurKind::Rotational { alpha, center, samples } => {
                write!(f, "rotational alpha={alpha}")?;
                if let Some((cx, cy)) = center {
                    write!(f, " cx={cx} cy={cy}")?;
                }
                if samples != DEFAULT_ROTATION_SAMPLES {
                    write!(f, " samples={samples}")?;
                }
            }
            BlurKind::SaltPepper { fraction, seed } => write!(f, "saltpepper frac={fraction} seed={seed}")?,
        }
        if let Some(r) = self.region {
            write!(f, " region x={} y={} w={} h={}", r.x, r.y, r.w, r.h)?;
        }
        Ok(())
    }
}

/// Ordered, non-empty list of degradation steps.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlurPipeline {
    steps: Vec<BlurSpec>,
}

impl BlurPipeline {
    pub fn new(steps: Vec<BlurSpec>) -> Result<Self> {
        if steps.is_empty() {
            return Err(Error::Config("blur pipeline must have at least one step".into()));
        }
        for s in &steps {
            s.validate()?;
        }
        Ok(Self { steps })
    }

    pub fn single(step: BlurSpec) -> Result<Self> {
        Self::new(vec![step])
    }

    pub fn steps(&self) -> &[BlurSpec] {
        &self.steps
    }

    /// Rotational blur, then motion blur, then Gaussian blur, each over the whole image.
    pub fn complex(alpha: f64, length: f64, theta: f64, sigma: f64) -> Result<Self> {
        Self::new(vec![
            BlurSpec::rotational(alpha, None),
            BlurSpec::motion(length, theta),
            BlurSpec::gaussian(sigma),
        ])
    }

    /// Random rectangles each degraded by a randomly chosen blur type.
    ///
    /// Zoom-style radial blur has no direct model here; it is approximated by a
    /// rotational blur followed by a Gaussian blur in the same rectangle.
    pub fn random_regions(width: usize, height: usize, count: usize, seed: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut steps = Vec::new();
        for _ in 0..count.max(1) {
            let w = rng.gen_range(width / 8..=width / 3).max(1);
            let h = rng.gen_range(height / 8..=height / 3).max(1);
            let region = Rect {
                x: rng.gen_range(0..=width - w),
                y: rng.gen_range(0..=height - h),
                w,
                h,
            };
            let center = Some((region.x as f64 + w as f64 / 2.0, region.y as f64 + h as f64 / 2.0));
            match rng.gen_range(0..4) {
                0 => steps.push(BlurSpec::gaussian(rng.gen_range(1.0..6.0)).in_region(region)),
                1 => steps.push(
                    BlurSpec::motion(rng.gen_range(5.0..25.0), rng.gen_range(0.0..PI)).in_region(region),
                ),
                2 => steps.push(BlurSpec::rotational(rng.gen_range(0.1..0.8), center).in_region(region)),
                _ => {
                    steps.push(BlurSpec::rotational(rng.gen_range(0.05..0.3), center).in_region(region));
                    steps.push(BlurSpec::gaussian(rng.gen_range(1.0..3.0)).in_region(region));
                }
            }
        }
        Self::new(steps)
    }
}

impl fmt::Display for BlurPipeline {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, s) in self.steps.iter().enumerate() {
            if i > 0 {
                f.write_str(" | ")?;
            }
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

/// Applies every step of `p` in order.
pub fn apply_pipeline(img: &ImageF, p: &BlurPipeline) -> Result<ImageF> {
    let mut current = img.clone();
    for step in p.steps() {
        current = step.apply(&current)?;
    }
    Ok(current)
}

fn image_center(img: &ImageF) -> (f64, f64) {
    ((img.width() as f64 - 1.0) / 2.0, (img.height() as f64 - 1.0) / 2.0)
}

/// Separable Gaussian PSF with radius `⌈3σ⌉`, normalised to unit sum.
///
/// Panics unless `sigma > 0`.
pub fn gaussian_kernel(sigma: f64) -> Kernel2D {
    assert!(sigma > 0.0 && sigma.is_finite(), "sigma must be > 0");
    let radius = (3.0 * sigma).ceil() as isize;
    let raw: Vec<f64> = (-radius..=radius)
        .map(|d| (-((d * d) as f64) / (2.0 * sigma * sigma)).exp())
        .collect();
    let z: f64 = raw.iter().sum();
    let taps: Vec<f64> = raw.iter().map(|w| w / z).collect();
    Kernel2D::separable(taps.clone(), taps).expect("odd length")
}

/// PSF of a centred line segment of length `length` at angle `theta`.
///
/// The segment is sampled at `⌈length⌉` evenly spaced points (unit spacing for
/// integer lengths) which are splatted bilinearly and normalised. `theta` is
/// taken modulo π, so opposite directions give identical kernels.
///
/// Panics unless `length >= 1`.
pub fn motion_kernel(length: f64, theta: f64) -> Kernel2D {
    assert!(length >= 1.0 && length.is_finite(), "motion length must be >= 1");
    let theta = theta.rem_euclid(PI);
    let snap = |v: f64| if v.abs() < 1e-12 { 0.0 } else { v };
    let (s, c) = theta.sin_cos();
    let (s, c) = (snap(s), snap(c));
    let n = length.ceil() as usize;
    let half = (length - 1.0) / 2.0;
    let points: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let t = if n == 1 { 0.0 } else { -half + 2.0 * half * i as f64 / (n - 1) as f64 };
            (snap(t * c), snap(t * s))
        })
        .collect();
    let rx = points.iter().map(|p| p.0.abs().ceil() as usize).max().unwrap_or(0);
    let ry = points.iter().map(|p| p.1.abs().ceil() as usize).max().unwrap_or(0);
    let (kw, kh) = (2 * rx + 1, 2 * ry + 1);
    let mut weights = vec![0.0; kw * kh];
    let mut deposit = |gx: f64, gy: f64, w: f64| {
        if w > 0.0 {
            let col = (gx as isize + rx as isize) as usize;
            let row = (gy as isize + ry as isize) as usize;
            weights[row * kw + col] += w;
        }
    };
    for &(px, py) in &points {
        let (x0, y0) = (px.floor(), py.floor());
        let (fx, fy) = (px - x0, py - y0);
        deposit(x0, y0, (1.0 - fx) * (1.0 - fy));
        deposit(x0 + 1.0, y0, fx * (1.0 - fy));
        deposit(x0, y0 + 1.0, (1.0 - fx) * fy);
        deposit(x0 + 1.0, y0 + 1.0, fx * fy);
    }
    let z: f64 = weights.iter().sum();
    weights.iter_mut().for_each(|w| *w /= z);
    Kernel2D::new(rx, ry, weights).expect("consistent size")
}

/// Mean of `samples` bilinear rotations spanning `[−α/2, +α/2]` about `center`.
///
/// Out-of-range source positions replicate the border.
pub fn rotational_blur(img: &ImageF, alpha: f64, center: (f64, f64), samples: usize) -> ImageF {
    assert!(samples >= 2, "rotational blur needs at least two samples");
    let (w, h) = img.dims();
    // inverse maps: destination -> source for each sampled angle
    let inverses: Vec<[[f64; 3]; 3]> = (0..samples)
        .map(|i| {
            let angle = -alpha / 2.0 + alpha * i as f64 / (samples - 1) as f64;
            WarpSpec::rotation(-angle, center.0, center.1).matrix
        })
        .collect();
    let inv_n = 1.0 / samples as f64;
    let mut out = vec![0.0; w * h];
    for y in 0..h {
        for x in 0..w {
            let (xf, yf) = (x as f64, y as f64);
            let mut first = 0.0;
            let mut dev = 0.0;
            for (i, m) in inverses.iter().enumerate() {
                let sx = m[0][0] * xf + m[0][1] * yf + m[0][2];
                let sy = m[1][0] * xf + m[1][1] * yf + m[1][2];
                let v = img.sample_bilinear_clamped(sx, sy);
                if i == 0 {
                    first = v;
                } else {
                    dev += v - first;
                }
            }
            // mean as first sample plus mean deviation: exact on constant input
            out[y * w + x] = first + dev * inv_n;
        }
    }
    ImageF::from_raw(w, h, out)
}

/// Counter-based generator for pixel selection: SplitMix64 finaliser.
#[inline]
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Replaces a `fraction` of pixels with 0 or 1.
///
/// Pixel `i` is hit when `h = splitmix64(seed ^ splitmix64(i))` satisfies
/// `(h >> 11) / 2⁵³ < fraction`; it becomes 1 when `splitmix64(h)` is odd,
/// else 0. The result depends only on `(seed, i)`.
pub fn salt_pepper(img: &ImageF, fraction: f64, seed: u64, region: Option<Rect>) -> ImageF {
    let mut out = img.clone();
    let w = img.width();
    for (i, v) in out.data_mut().iter_mut().enumerate() {
        if let Some(r) = region {
            if !r.contains(i % w, i / w) {
                continue;
            }
        }
        let h = splitmix64(seed ^ splitmix64(i as u64));
        let u = (h >> 11) as f64 / (1u64 << 53) as f64;
        if u < fraction {
            *v = if splitmix64(h) & 1 == 1 { 1.0 } else { 0.0 };
        }
    }
    out
}
