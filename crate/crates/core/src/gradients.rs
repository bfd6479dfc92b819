//! Derivative fields and box-averaged second-moment maps.

use crate::error::{Error, Result};
use crate::imagecore::{box_filter, ImageF};

/// Horizontal and vertical central-difference derivatives.
#[derive(Clone, Debug)]
pub struct DerivPair {
    pub ix: ImageF,
    pub iy: ImageF,
}

/// Per-pixel expectations `E(Ix²)`, `E(Iy²)` and `E(IxIy)` over a `window × window` box.
#[derive(Clone, Debug)]
pub struct MomentMaps {
    pub sxx: ImageF,
    pub syy: ImageF,
    pub sxy: ImageF,
    pub window: usize,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MomentParams {
    /// Upper bound applied to `ix²` and `iy²` before averaging.
    pub clamp: f64,
    /// Keep only pixels with `ix ≥ 0` and `iy ≥ 0`.
    pub quadrant_mask: bool,
    /// Odd box window size.
    pub window: usize,
}

/// Central differences `(I(x+1) − I(x−1)) / 2` with replicated borders.
pub fn derivatives(img: &ImageF) -> DerivPair {
    let (w, h) = img.dims();
    let mut ix = vec![0.0; w * h];
    let mut iy = vec![0.0; w * h];
    for y in 0..h {
        let row = img.row(y);
        let up = img.row(y.saturating_sub(1));
        let down = img.row((y + 1).min(h - 1));
        let dst_x = &mut ix[y * w..(y + 1) * w];
        for x in 0..w {
            let left = row[x.saturating_sub(1)];
            let right = row[(x + 1).min(w - 1)];
            dst_x[x] = (right - left) / 2.0;
        }
        for (d, (a, b)) in iy[y * w..(y + 1) * w].iter_mut().zip(down.iter().zip(up)) {
            *d = (a - b) / 2.0;
        }
    }
    DerivPair {
        ix: ImageF::from_raw(w, h, ix),
        iy: ImageF::from_raw(w, h, iy),
    }
}

/// Clamped, optionally quadrant-masked, box-averaged derivative products.
///
/// Masked pixels contribute zeros; the divisor is always `window²`.
pub fn moment_maps(d: &DerivPair, params: MomentParams) -> Result<MomentMaps> {
    let MomentParams {
        clamp,
        quadrant_mask,
        window,
    } = params;
    if window == 0 || window % 2 == 0 {
        return Err(Error::BadWindow(window));
    }
    if !(clamp.is_finite() && clamp > 0.0) {
        return Err(Error::Config(format!("clamp must be positive and finite, got {clamp}")));
    }
    let (w, h) = d.ix.dims();
    let n = w * h;
    let (mut xx, mut yy, mut xy) = (vec![0.0; n], vec![0.0; n], vec![0.0; n]);
    for (i, (&gx, &gy)) in d.ix.data().iter().zip(d.iy.data()).enumerate() {
        if quadrant_mask && (gx < 0.0 || gy < 0.0) {
            continue;
        }
        xx[i] = (gx * gx).min(clamp);
        yy[i] = (gy * gy).min(clamp);
        xy[i] = gx * gy;
    }
    let avg = |v: Vec<f64>| box_filter(&ImageF::from_raw(w, h, v), window);
    Ok(MomentMaps {
        sxx: avg(xx)?,
        syy: avg(yy)?,
        sxy: avg(xy)?,
        window,
    })
}

/// Eigenvalues `(λmax, λmin)` of the symmetric matrix `[[sxx, sxy], [sxy, syy]]`.
#[inline]
pub fn eigen_pair(sxx: f64, syy: f64, sxy: f64) -> (f64, f64) {
    let half_trace = 0.5 * (sxx + syy);
    let half_diff = 0.5 * (sxx - syy);
    // (t² − 4·det)/4 as a sum of squares: never negative, no cancellation
    let root = (half_diff * half_diff + sxy * sxy).sqrt();
    (half_trace + root, half_trace - root)
}

impl MomentMaps {
    pub fn dims(&self) -> (usize, usize) {
        self.sxx.dims()
    }

    /// Moment triple `(sxx, syy, sxy)` at a pixel.
    #[inline]
    pub fn at(&self, x: usize, y: usize) -> (f64, f64, f64) {
        (self.sxx.get(x, y), self.syy.get(x, y), self.sxy.get(x, y))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(window: usize, quadrant_mask: bool) -> MomentParams {
        MomentParams {
            clamp: 1.0,
            quadrant_mask,
            window,
        }
    }

    #[test]
    fn constant_image_has_zero_derivatives() {
        let d = derivatives(&ImageF::filled(8, 6, 0.3));
        assert!(d.ix.data().iter().chain(d.iy.data()).all(|&v| v == 0.0));
        let m = moment_maps(&d, params(5, true)).unwrap();
        assert!(m.sxx.data().iter().chain(m.syy.data()).chain(m.sxy.data()).all(|&v| v == 0.0));
    }

    #[test]
    fn ramp_derivative() {
        let w = 8;
        let img = ImageF::from_fn(w, 5, |x, _| x as f64 / w as f64);
        let d = derivatives(&img);
        for y in 0..5 {
            for x in 1..w - 1 {
                assert!((d.ix.get(x, y) - 1.0 / w as f64).abs() < 1e-15);
            }
            // one-sided at replicated borders
            assert!((d.ix.get(0, y) - 0.5 / w as f64).abs() < 1e-15);
        }
        assert!(d.iy.data().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn step_derivative() {
        let img = ImageF::new(6, 1, vec![0.0, 0.0, 0.0, 1.0, 1.0, 1.0]).unwrap();
        let d = derivatives(&img);
        assert_eq!(d.ix.data(), &[0.0, 0.0, 0.5, 0.5, 0.0, 0.0]);
    }

    fn single_pixel_pair(gx: f64, gy: f64) -> DerivPair {
        let f = |v: f64| ImageF::from_fn(5, 5, move |x, y| if (x, y) == (2, 2) { v } else { 0.0 });
        DerivPair { ix: f(gx), iy: f(gy) }
    }

    #[test]
    fn single_pixel_products() {
        let m = moment_maps(&single_pixel_pair(0.4, 0.2), params(1, false)).unwrap();
        let (sxx, syy, sxy) = m.at(2, 2);
        assert!((sxx - 0.16).abs() < 1e-15);
        assert!((syy - 0.04).abs() < 1e-15);
        assert!((sxy - 0.08).abs() < 1e-15);
        assert_eq!(m.at(1, 2), (0.0, 0.0, 0.0));
    }

    #[test]
    fn quadrant_mask_drops_negative_ix() {
        let m = moment_maps(&single_pixel_pair(-0.4, 0.2), params(1, true)).unwrap();
        assert_eq!(m.at(2, 2), (0.0, 0.0, 0.0));
        let unmasked = moment_maps(&single_pixel_pair(-0.4, 0.2), params(1, false)).unwrap();
        assert!((unmasked.at(2, 2).2 + 0.08).abs() < 1e-15);
    }

    #[test]
    fn box_divisor_ignores_mask() {
        let m = moment_maps(&single_pixel_pair(0.3, 0.0), params(3, true)).unwrap();
        assert!((m.sxx.get(2, 2) - 0.09 / 9.0).abs() < 1e-15);
    }

    #[test]
    fn clamp_applies_to_squares_only() {
        let m = moment_maps(
            &single_pixel_pair(2.0, 3.0),
            MomentParams {
                clamp: 1.0,
                quadrant_mask: false,
                window: 1,
            },
        )
        .unwrap();
        assert_eq!(m.at(2, 2), (1.0, 1.0, 6.0));
    }

    #[test]
    fn rejects_bad_window_and_clamp() {
        let d = single_pixel_pair(0.1, 0.1);
        assert!(matches!(moment_maps(&d, params(4, false)), Err(Error::BadWindow(4))));
        assert!(matches!(moment_maps(&d, params(0, false)), Err(Error::BadWindow(0))));
        let bad = MomentParams {
            clamp: 0.0,
            ..params(3, false)
        };
        assert!(moment_maps(&d, bad).is_err());
    }

    #[test]
    fn eigen_pair_examples() {
        assert_eq!(eigen_pair(1.0, 1.0, 0.0), (1.0, 1.0));
        assert_eq!(eigen_pair(0.0, 0.0, 0.0), (0.0, 0.0));
        let (hi, lo) = eigen_pair(0.16, 0.04, 0.08);
        assert!((hi - 0.2).abs() < 1e-12);
        assert!(lo.abs() < 1e-12);
    }
}
