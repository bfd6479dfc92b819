//! Octave pyramid: 5-tap binomial smoothing followed by even-index decimation.

use crate::error::{Error, Result};
use crate::imagecore::{convolve, ImageF, Kernel2D};

/// Smallest side length an octave may have.
pub const MIN_LEVEL_SIZE: usize = 16;
/// Upper bound on the number of octaves (radii 2⁰ … 2⁵).
pub const MAX_OCTAVES: usize = 6;

/// Binomial smoothing taps, `{1, 4, 6, 4, 1} / 16`.
pub const SMOOTHING_TAPS: [f64; 5] = [1.0 / 16.0, 4.0 / 16.0, 6.0 / 16.0, 4.0 / 16.0, 1.0 / 16.0];

#[derive(Clone, Debug)]
pub struct OctaveStack {
    levels: Vec<ImageF>,
}

impl OctaveStack {
    pub fn levels(&self) -> &[ImageF] {
        &self.levels
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    /// Keypoint radius of octave `o` in original-image pixels.
    pub fn scale_r(octave: usize) -> usize {
        1 << octave
    }
}

pub fn smoothing_kernel() -> Kernel2D {
    Kernel2D::separable(SMOOTHING_TAPS.to_vec(), SMOOTHING_TAPS.to_vec()).expect("odd taps")
}

/// Halves `img` after smoothing, keeping even rows and columns.
pub fn downsample(img: &ImageF) -> ImageF {
    let smooth = convolve(img, &smoothing_kernel());
    let (w, h) = (img.width() / 2, img.height() / 2);
    ImageF::from_fn(w, h, |x, y| smooth.get(2 * x, 2 * y))
}

pub fn build_pyramid(img: &ImageF, max_octaves: usize) -> Result<OctaveStack> {
    let (w, h) = img.dims();
    if w < MIN_LEVEL_SIZE || h < MIN_LEVEL_SIZE {
        return Err(Error::TooSmall { width: w, height: h });
    }
    if !(1..=MAX_OCTAVES).contains(&max_octaves) {
        return Err(Error::Config(format!(
            "max_octaves must be in 1..={MAX_OCTAVES}, got {max_octaves}"
        )));
    }
    let mut levels = vec![img.clone()];
    while levels.len() < max_octaves {
        let last = levels.last().expect("non-empty");
        if last.width() / 2 < MIN_LEVEL_SIZE || last.height() / 2 < MIN_LEVEL_SIZE {
            break;
        }
        let next = downsample(last);
        levels.push(next);
    }
    Ok(OctaveStack { levels })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sixteen_square_gives_one_level() {
        let p = build_pyramid(&ImageF::filled(16, 16, 0.5), 6).unwrap();
        assert_eq!(p.len(), 1);
    }

    #[test]
    fn five_twelve_gives_six_levels() {
        let p = build_pyramid(&ImageF::filled(512, 512, 0.5), 6).unwrap();
        let sizes: Vec<usize> = p.levels().iter().map(|l| l.width()).collect();
        assert_eq!(sizes, vec![512, 256, 128, 64, 32, 16]);
    }

    #[test]
    fn constant_survives_every_level() {
        let p = build_pyramid(&ImageF::filled(100, 70, 0.3125), 6).unwrap();
        for level in p.levels() {
            assert!(level.data().iter().all(|&v| v == 0.3125));
        }
    }

    #[test]
    fn floor_halving_of_odd_sizes() {
        let p = build_pyramid(&ImageF::filled(135, 67, 0.0), 6).unwrap();
        let dims: Vec<_> = p.levels().iter().map(|l| l.dims()).collect();
        assert_eq!(dims, vec![(135, 67), (67, 33), (33, 16)]);
    }

    #[test]
    fn max_octaves_caps_depth() {
        let p = build_pyramid(&ImageF::filled(256, 256, 0.0), 2).unwrap();
        assert_eq!(p.len(), 2);
        assert!(build_pyramid(&ImageF::filled(256, 256, 0.0), 0).is_err());
        assert!(build_pyramid(&ImageF::filled(256, 256, 0.0), 7).is_err());
    }

    #[test]
    fn too_small_input() {
        assert!(matches!(
            build_pyramid(&ImageF::filled(15, 40, 0.0), 6),
            Err(Error::TooSmall { width: 15, height: 40 })
        ));
    }

    #[test]
    fn taps_sum_to_one() {
        assert_eq!(SMOOTHING_TAPS.iter().sum::<f64>(), 1.0);
        assert!(smoothing_kernel().is_normalized_psf());
    }
}
