use crate::imagecore::ImageF;

/// Local maximum found by [`nms`], in score-map coordinates.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Peak {
    pub x: usize,
    pub y: usize,
    pub score: f64,
}

/// Strict local maxima within a `(2·radius+1)²` window.
///
/// Out-of-bounds neighbours are ignored rather than replicated, ties suppress
/// both pixels, and non-positive scores are never reported. Peaks come back in
/// row-major order.
pub fn nms(score: &ImageF, radius: usize) -> Vec<Peak> {
    assert!(radius >= 1, "nms radius must be >= 1");
    let (w, h) = score.dims();
    let mut peaks = Vec::new();
    for y in 0..h {
        let y0 = y.saturating_sub(radius);
        let y1 = (y + radius).min(h - 1);
        'pixel: for x in 0..w {
            let v = score.get(x, y);
            if v <= 0.0 {
                continue;
            }
            let x0 = x.saturating_sub(radius);
            let x1 = (x + radius).min(w - 1);
            for ny in y0..=y1 {
                let row = score.row(ny);
                for (nx, &n) in row.iter().enumerate().take(x1 + 1).skip(x0) {
                    if (nx, ny) != (x, y) && n >= v {
                        continue 'pixel;
                    }
                }
            }
            peaks.push(Peak { x, y, score: v });
        }
    }
    peaks
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_spike() {
        let img = ImageF::from_fn(7, 7, |x, y| if (x, y) == (3, 4) { 2.0 } else { 0.0 });
        assert_eq!(nms(&img, 1), vec![Peak { x: 3, y: 4, score: 2.0 }]);
    }

    #[test]
    fn constant_map_has_no_peaks() {
        assert!(nms(&ImageF::filled(5, 5, 1.0), 1).is_empty());
    }

    #[test]
    fn equal_neighbours_suppress_each_other() {
        let img = ImageF::from_fn(6, 5, |x, y| if y == 2 && (x == 2 || x == 3) { 1.0 } else { 0.0 });
        assert!(nms(&img, 1).is_empty());
    }

    #[test]
    fn border_pixels_compare_in_bounds_only() {
        let img = ImageF::from_fn(4, 4, |x, y| if (x, y) == (0, 0) { 1.0 } else { 0.5 });
        assert_eq!(nms(&img, 1), vec![Peak { x: 0, y: 0, score: 1.0 }]);
    }

    #[test]
    fn larger_radius_widens_suppression() {
        let img = ImageF::from_fn(9, 1, |x, _| match x {
            2 => 1.0,
            5 => 2.0,
            _ => 0.0,
        });
        assert_eq!(nms(&img, 1).len(), 2);
        assert_eq!(nms(&img, 3), vec![Peak { x: 5, y: 0, score: 2.0 }]);
    }
}
