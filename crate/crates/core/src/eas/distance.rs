use crate::gradients::{derivatives, eigen_pair};
use crate::imagecore::ImageF;

/// Zero-mean second moments of a derivative distribution.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct DerivativeMoments {
    pub sxx: f64,
    pub syy: f64,
    pub sxy: f64,
}

impl DerivativeMoments {
    pub fn new(sxx: f64, syy: f64, sxy: f64) -> Self {
        Self { sxx, syy, sxy }
    }

    /// Mean clamped products over `(ix, iy)` samples. Masked samples count as
    /// zeros but still enter the divisor.
    pub fn from_samples(samples: impl IntoIterator<Item = (f64, f64)>, clamp: f64, quadrant_mask: bool) -> Self {
        let mut acc = Self::default();
        let mut n = 0usize;
        for (gx, gy) in samples {
            n += 1;
            if quadrant_mask && (gx < 0.0 || gy < 0.0) {
                continue;
            }
            acc.sxx += (gx * gx).min(clamp);
            acc.syy += (gy * gy).min(clamp);
            acc.sxy += gx * gy;
        }
        if n > 0 {
            let inv = 1.0 / n as f64;
            acc.sxx *= inv;
            acc.syy *= inv;
            acc.sxy *= inv;
        }
        acc
    }

    /// Moments of a whole patch's central-difference derivatives.
    pub fn from_patch(patch: &ImageF, clamp: f64, quadrant_mask: bool) -> Self {
        let d = derivatives(patch);
        let samples = d.ix.data().iter().copied().zip(d.iy.data().iter().copied());
        Self::from_samples(samples, clamp, quadrant_mask)
    }

    /// Eigenvalue sum, read off the diagonal.
    #[inline]
    pub fn trace(&self) -> f64 {
        self.sxx + self.syy
    }

    pub fn eigenvalues(&self) -> (f64, f64) {
        eigen_pair(self.sxx, self.syy, self.sxy)
    }

    /// Distance between two distributions as the difference of their traces.
    #[inline]
    pub fn distance(&self, other: &Self) -> f64 {
        (self.trace() - other.trace()).abs()
    }

    /// Same distance computed from explicit eigenvalues; agrees with [`Self::distance`] up to rounding.
    pub fn eigen_distance(&self, other: &Self) -> f64 {
        let (a_hi, a_lo) = self.eigenvalues();
        let (b_hi, b_lo) = other.eigenvalues();
        ((a_hi + a_lo) - (b_hi + b_lo)).abs()
    }
}
