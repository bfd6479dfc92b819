//! Deterministic synthetic test images.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::blur_lab::gaussian_kernel;
use crate::imagecore::{convolve, ImageF};

/// Number of strip patch pairs produced by [`strip_pair`].
pub const STRIP_PAIRS: usize = 6;

const STRIP_WIDTH: usize = 6;
const STRIP_PERIOD: usize = 16;
const STRIP_MARGIN: usize = 8;

/// Side of the square patches returned by [`strip_patch`].
pub const STRIP_PATCH_SIZE: usize = 2 * STRIP_MARGIN + STRIP_PAIRS * STRIP_PERIOD;

/// Cluttered scene of shapes, gradients and multi-scale texture in `[0, 1]`.
pub fn natural_scene(width: usize, height: usize, seed: u64) -> ImageF {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (w, h) = (width as f64, height as f64);

    let gx = rng.gen_range(-0.3..0.3) / w;
    let gy = rng.gen_range(-0.3..0.3) / h;
    let base = rng.gen_range(0.35..0.65);
    let mut data: Vec<f64> = (0..height)
        .flat_map(|y| (0..width).map(move |x| base + gx * x as f64 + gy * y as f64))
        .collect();

    let area = w * h;
    let shapes = ((area / 600.0) as usize).clamp(4, 600);
    for _ in 0..shapes {
        let cx = rng.gen_range(0.0..w);
        let cy = rng.gen_range(0.0..h);
        let rx = rng.gen_range(2.0..(w.min(h) / 6.0).max(3.0));
        let ry = rng.gen_range(2.0..(w.min(h) / 6.0).max(3.0));
        let angle = rng.gen_range(0.0..PI);
        let value = rng.gen_range(0.0..1.0);
        let opacity = rng.gen_range(0.4..1.0);
        let ellipse = rng.gen_bool(0.5);
        let (s, c) = angle.sin_cos();
        let reach = rx.max(ry).ceil() as isize + 1;
        let (x0, x1) = (cx as isize - reach, cx as isize + reach);
        let (y0, y1) = (cy as isize - reach, cy as isize + reach);
        for y in y0.max(0)..=y1.min(height as isize - 1) {
            for x in x0.max(0)..=x1.min(width as isize - 1) {
                let dx = x as f64 - cx;
                let dy = y as f64 - cy;
                let u = (c * dx + s * dy) / rx;
                let v = (-s * dx + c * dy) / ry;
                let inside = if ellipse {
                    u * u + v * v <= 1.0
                } else {
                    u.abs() <= 1.0 && v.abs() <= 1.0
                };
                if inside {
                    let p = &mut data[y as usize * width + x as usize];
                    *p += opacity * (value - *p);
                }
            }
        }
    }

    for (cell, amp) in [(32usize, 0.12), (8, 0.06), (2, 0.03)] {
        let gw = width / cell + 2;
        let gh = height / cell + 2;
        let grid: Vec<f64> = (0..gw * gh).map(|_| rng.gen_range(-1.0..1.0)).collect();
        for y in 0..height {
            let fy = y as f64 / cell as f64;
            let (iy, ty) = (fy.floor() as usize, fy.fract());
            for x in 0..width {
                let fx = x as f64 / cell as f64;
                let (ix, tx) = (fx.floor() as usize, fx.fract());
                let g = |i: usize, j: usize| grid[j * gw + i];
                let top = g(ix, iy) + (g(ix + 1, iy) - g(ix, iy)) * smooth(tx);
                let bot = g(ix, iy + 1) + (g(ix + 1, iy + 1) - g(ix, iy + 1)) * smooth(tx);
                data[y * width + x] += amp * (top + (bot - top) * smooth(ty));
            }
        }
    }

    let img = ImageF::from_raw(width, height, data);
    convolve(&img, &gaussian_kernel(0.7)).map(|v| v.clamp(0.0, 1.0))
}

fn smooth(t: f64) -> f64 {
    t * t * (3.0 - 2.0 * t)
}

/// Black `size`×`size` image with a centred white `side`×`side` square.
pub fn white_square(size: usize, side: usize) -> ImageF {
    assert!(side <= size, "square larger than image");
    let start = (size - side) / 2;
    let inside = |v: usize| v >= start && v < start + side;
    ImageF::from_fn(size, size, |x, y| if inside(x) && inside(y) { 1.0 } else { 0.0 })
}

/// Corner pixels `(left, top, right, bottom)` of the square drawn by [`white_square`].
pub fn white_square_bounds(size: usize, side: usize) -> (usize, usize, usize, usize) {
    let start = (size - side) / 2;
    (start, start, start + side - 1, start + side - 1)
}

/// Black/white checkerboard with square cells of `cell` pixels.
pub fn checkerboard(width: usize, height: usize, cell: usize) -> ImageF {
    assert!(cell > 0, "cell size must be positive");
    ImageF::from_fn(width, height, |x, y| ((x / cell + y / cell) % 2) as f64)
}

/// Radially symmetric cosine rings about `(cx, cy)`.
pub fn concentric_rings(width: usize, height: usize, cx: f64, cy: f64, period: f64) -> ImageF {
    ImageF::from_fn(width, height, |x, y| {
        let r = (x as f64 - cx).hypot(y as f64 - cy);
        0.5 + 0.5 * (2.0 * PI * r / period).cos()
    })
}

/// Square patch holding `count` full-height white strips on black,
/// transposed to horizontal strips when `vertical` is false.
pub fn strip_patch(count: usize, vertical: bool) -> ImageF {
    assert!(count <= STRIP_PAIRS, "at most {STRIP_PAIRS} strips fit");
    let n = STRIP_PATCH_SIZE;
    let on = |t: usize| {
        t >= STRIP_MARGIN && {
            let k = (t - STRIP_MARGIN) / STRIP_PERIOD;
            k < count && (t - STRIP_MARGIN) % STRIP_PERIOD < STRIP_WIDTH
        }
    };
    ImageF::from_fn(n, n, |x, y| {
        let t = if vertical { x } else { y };
        if on(t) {
            1.0
        } else {
            0.0
        }
    })
}

/// Pair `index` (1-based, up to [`STRIP_PAIRS`]): a full six-strip patch and a
/// patch with `index - 1` strips, horizontal for even indices. The strip count
/// difference falls from 6 to 1 as `index` grows.
pub fn strip_pair(index: usize) -> (ImageF, ImageF) {
    assert!((1..=STRIP_PAIRS).contains(&index), "pair index out of range");
    (strip_patch(STRIP_PAIRS, true), strip_patch(index - 1, index % 2 == 1))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn natural_scene_is_deterministic_and_in_range() {
        let a = natural_scene(80, 60, 9);
        assert_eq!(a, natural_scene(80, 60, 9));
        assert_ne!(a, natural_scene(80, 60, 10));
        let (lo, hi) = a.min_max();
        assert!(lo >= 0.0 && hi <= 1.0);
        assert!(hi - lo > 0.3, "scene should have contrast");
    }

    #[test]
    fn square_and_checkerboard() {
        let sq = white_square(16, 4);
        assert_eq!(sq.data().iter().sum::<f64>(), 16.0);
        assert_eq!(sq.get(6, 6), 1.0);
        assert_eq!(sq.get(5, 6), 0.0);
        assert_eq!(white_square_bounds(16, 4), (6, 6, 9, 9));
        let cb = checkerboard(16, 16, 8);
        assert_eq!((cb.get(0, 0), cb.get(8, 0), cb.get(8, 8)), (0.0, 1.0, 0.0));
    }

    #[test]
    fn strip_counts() {
        for count in 0..=STRIP_PAIRS {
            let p = strip_patch(count, true);
            let white = p.data().iter().sum::<f64>();
            assert_eq!(white as usize, count * STRIP_WIDTH * STRIP_PATCH_SIZE);
            assert_eq!(strip_patch(count, false), p.transpose());
        }
        let (p, q) = strip_pair(2);
        assert_eq!(p, strip_patch(6, true));
        assert_eq!(q, strip_patch(1, false));
    }
}
