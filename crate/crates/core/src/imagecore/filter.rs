use super::ImageF;
use crate::error::{Error, Result};

/// Dense 2-D filter kernel, optionally carrying its separable factors.
///
/// Kernels are applied as correlations: output `(x, y)` is
/// `Σ w(dx, dy) · I(x + dx, y + dy)`. All PSFs built in this crate are point
/// symmetric, so this coincides with convolution.
#[derive(Clone, Debug, PartialEq)]
pub struct Kernel2D {
    radius_x: usize,
    radius_y: usize,
    weights: Vec<f64>,
    separable: Option<(Vec<f64>, Vec<f64>)>,
}

/// Weights summing to 1 within this tolerance are treated as normalised.
const NORMALIZED_EPS: f64 = 1e-9;

fn is_normalized(taps: &[f64]) -> bool {
    (taps.iter().sum::<f64>() - 1.0).abs() <= NORMALIZED_EPS
}

impl Kernel2D {
    /// Dense kernel of size `(2·radius_x+1) × (2·radius_y+1)`, row-major.
    pub fn new(radius_x: usize, radius_y: usize, weights: Vec<f64>) -> Result<Self> {
        let expected = (2 * radius_x + 1) * (2 * radius_y + 1);
        if weights.len() != expected {
            return Err(Error::InvalidKernel(format!(
                "expected {expected} weights, got {}",
                weights.len()
            )));
        }
        if weights.iter().any(|w| !w.is_finite()) {
            return Err(Error::InvalidKernel("non-finite weight".into()));
        }
        Ok(Self {
            radius_x,
            radius_y,
            weights,
            separable: None,
        })
    }

    /// Outer product of a horizontal and a vertical 1-D kernel, both of odd length.
    pub fn separable(kx: Vec<f64>, ky: Vec<f64>) -> Result<Self> {
        if kx.len().is_multiple_of(2) || ky.len().is_multiple_of(2) {
            return Err(Error::InvalidKernel(format!(
                "separable factors need odd lengths, got {} and {}",
                kx.len(),
                ky.len()
            )));
        }
        let weights: Vec<f64> = ky
            .iter()
            .flat_map(|&wy| kx.iter().map(move |&wx| wx * wy))
            .collect();
        let mut k = Self::new(kx.len() / 2, ky.len() / 2, weights)?;
        k.separable = Some((kx, ky));
        Ok(k)
    }

    pub fn identity() -> Self {
        Self::separable(vec![1.0], vec![1.0]).expect("unit kernel")
    }

    #[inline]
    pub fn radius_x(&self) -> usize {
        self.radius_x
    }

    #[inline]
    pub fn radius_y(&self) -> usize {
        self.radius_y
    }

    #[inline]
    pub fn width(&self) -> usize {
        2 * self.radius_x + 1
    }

    #[inline]
    pub fn height(&self) -> usize {
        2 * self.radius_y + 1
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Weight at offset `(dx, dy)` from the center.
    pub fn at(&self, dx: isize, dy: isize) -> f64 {
        let col = dx + self.radius_x as isize;
        let row = dy + self.radius_y as isize;
        if col < 0 || row < 0 || col as usize >= self.width() || row as usize >= self.height() {
            return 0.0;
        }
        self.weights[row as usize * self.width() + col as usize]
    }

    pub fn separable_factors(&self) -> Option<(&[f64], &[f64])> {
        self.separable.as_ref().map(|(a, b)| (a.as_slice(), b.as_slice()))
    }

    /// Same weights with the separable factors dropped, forcing the direct 2-D path.
    pub fn to_dense(&self) -> Kernel2D {
        Kernel2D {
            separable: None,
            ..self.clone()
        }
    }

    pub fn sum(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// True when weights are non-negative and sum to 1 within 1e-9.
    pub fn is_normalized_psf(&self) -> bool {
        self.weights.iter().all(|&w| w >= 0.0) && is_normalized(&self.weights)
    }
}

/// Correlates `img` with `k` using replicated borders.
///
/// Separable kernels run as a horizontal then a vertical pass; others use the
/// direct 2-D sum over non-zero taps. Accumulation order is fixed per pixel.
/// Normalised kernels accumulate `Σ w·(s − centre)` on top of the centre
/// sample, so constant regions come out bit-identical.
pub fn convolve(img: &ImageF, k: &Kernel2D) -> ImageF {
    match k.separable_factors() {
        Some((kx, ky)) => {
            let tmp = pass_horizontal(img, kx);
            pass_vertical(&tmp, ky)
        }
        None => convolve_direct(img, k),
    }
}

/// Mean over the `k × k` replicate-border window centred on each pixel.
pub fn box_filter(img: &ImageF, k: usize) -> Result<ImageF> {
    if k == 0 || k.is_multiple_of(2) {
        return Err(Error::BadWindow(k));
    }
    if k == 1 {
        return Ok(img.clone());
    }
    let taps = vec![1.0 / k as f64; k];
    Ok(pass_vertical(&pass_horizontal(img, &taps), &taps))
}

fn pass_horizontal(img: &ImageF, taps: &[f64]) -> ImageF {
    let (w, h) = img.dims();
    let r = taps.len() / 2;
    let normalized = is_normalized(taps);
    let mut out = vec![0.0; w * h];
    let mut padded = vec![0.0; w + 2 * r];
    for y in 0..h {
        let row = img.row(y);
        padded[..r].fill(row[0]);
        padded[r..r + w].copy_from_slice(row);
        padded[r + w..].fill(row[w - 1]);
        let dst = &mut out[y * w..(y + 1) * w];
        for (x, o) in dst.iter_mut().enumerate() {
            let window = &padded[x..x + taps.len()];
            *o = if normalized {
                let c = window[r];
                c + window.iter().zip(taps).map(|(a, b)| (a - c) * b).sum::<f64>()
            } else {
                window.iter().zip(taps).map(|(a, b)| a * b).sum()
            };
        }
    }
    ImageF::from_raw(w, h, out)
}

fn pass_vertical(img: &ImageF, taps: &[f64]) -> ImageF {
    let (w, h) = img.dims();
    let r = taps.len() as isize / 2;
    let normalized = is_normalized(taps);
    let mut out = vec![0.0; w * h];
    for y in 0..h {
        let dst = &mut out[y * w..(y + 1) * w];
        let centre = img.row(y);
        for (j, &t) in taps.iter().enumerate() {
            let sy = (y as isize + j as isize - r).clamp(0, h as isize - 1) as usize;
            if normalized {
                for ((o, &s), &c) in dst.iter_mut().zip(img.row(sy)).zip(centre) {
                    *o += t * (s - c);
                }
            } else {
                for (o, &s) in dst.iter_mut().zip(img.row(sy)) {
                    *o += t * s;
                }
            }
        }
        if normalized {
            for (o, &c) in dst.iter_mut().zip(centre) {
                *o += c;
            }
        }
    }
    ImageF::from_raw(w, h, out)
}

fn convolve_direct(img: &ImageF, k: &Kernel2D) -> ImageF {
    let (w, h) = img.dims();
    let rx = k.radius_x as isize;
    let ry = k.radius_y as isize;
    let taps: Vec<(isize, isize, f64)> = (0..k.height())
        .flat_map(|row| (0..k.width()).map(move |col| (row, col)))
        .filter_map(|(row, col)| {
            let wgt = k.weights[row * k.width() + col];
            (wgt != 0.0).then_some((col as isize - rx, row as isize - ry, wgt))
        })
        .collect();
    let normalized = is_normalized(&k.weights);
    let mut out = vec![0.0; w * h];
    for y in 0..h as isize {
        let interior_y = y - ry >= 0 && y + ry < h as isize;
        for x in 0..w as isize {
            let interior = interior_y && x - rx >= 0 && x + rx < w as isize;
            let c = if normalized { img.get(x as usize, y as usize) } else { 0.0 };
            let mut acc = 0.0;
            if interior {
                for &(dx, dy, wgt) in &taps {
                    acc += wgt * (img.get((x + dx) as usize, (y + dy) as usize) - c);
                }
            } else {
                for &(dx, dy, wgt) in &taps {
                    acc += wgt * (img.get_clamped(x + dx, y + dy) - c);
                }
            }
            out[y as usize * w + x as usize] = c + acc;
        }
    }
    ImageF::from_raw(w, h, out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn noise(w: usize, h: usize, seed: u64) -> ImageF {
        let mut s = seed;
        ImageF::from_fn(w, h, |_, _| {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (s >> 11) as f64 / (1u64 << 53) as f64
        })
    }

    #[test]
    fn three_tap_on_impulse_row() {
        let row = ImageF::new(3, 1, vec![0.0, 1.0, 0.0]).unwrap();
        let k = Kernel2D::new(1, 0, vec![0.25, 0.5, 0.25]).unwrap();
        let out = convolve(&row, &k);
        assert_eq!(out.data(), &[0.25, 0.5, 0.25]);
    }

    #[test]
    fn identity_kernel_is_noop() {
        let img = noise(7, 5, 3);
        assert_eq!(convolve(&img, &Kernel2D::identity()), img);
        assert_eq!(convolve(&img, &Kernel2D::identity().to_dense()), img);
    }

    #[test]
    fn constant_image_stays_constant() {
        let img = ImageF::filled(9, 4, 0.3);
        let k = Kernel2D::separable(vec![0.25, 0.5, 0.25], vec![0.1, 0.2, 0.4, 0.2, 0.1]).unwrap();
        for out in [convolve(&img, &k), convolve(&img, &k.to_dense())] {
            assert!(out.data().iter().all(|&v| v == 0.3));
        }
    }

    #[test]
    fn separable_matches_direct() {
        let img = noise(23, 17, 9);
        let k = Kernel2D::separable(
            vec![0.05, 0.2, 0.5, 0.2, 0.05],
            vec![0.1, 0.3, 0.2, 0.3, 0.1, 0.0, 0.0],
        )
        .unwrap();
        let a = convolve(&img, &k);
        let b = convolve(&img, &k.to_dense());
        for (p, q) in a.data().iter().zip(b.data()) {
            assert!((p - q).abs() < 1e-6);
        }
    }

    #[test]
    fn kernel_larger_than_image() {
        let img = ImageF::new(2, 1, vec![0.0, 1.0]).unwrap();
        let k = Kernel2D::separable(vec![0.2; 5], vec![1.0]).unwrap();
        // padded row: 0 0 0 | 0 1 | 1 1 1
        let out = convolve(&img, &k);
        assert!((out.get(0, 0) - 0.4).abs() < 1e-15);
        assert!((out.get(1, 0) - 0.6).abs() < 1e-15);
    }

    #[test]
    fn box_filter_rejects_even_windows() {
        let img = ImageF::filled(4, 4, 1.0);
        assert!(matches!(box_filter(&img, 2), Err(Error::BadWindow(2))));
        assert!(matches!(box_filter(&img, 0), Err(Error::BadWindow(0))));
    }

    #[test]
    fn box_filter_is_true_mean() {
        let img = ImageF::from_fn(5, 5, |x, y| if (x, y) == (2, 2) { 9.0 } else { 0.0 });
        let out = box_filter(&img, 3).unwrap();
        assert!((out.get(2, 2) - 1.0).abs() < 1e-15);
        assert!((out.get(1, 1) - 1.0).abs() < 1e-15);
        assert_eq!(out.get(0, 0), 0.0);
    }

    #[test]
    fn kernel_validation() {
        assert!(Kernel2D::new(1, 1, vec![0.0; 8]).is_err());
        assert!(Kernel2D::separable(vec![0.5, 0.5], vec![1.0]).is_err());
        assert!(Kernel2D::identity().is_normalized_psf());
    }
}
