use crate::gradients::{eigen_pair, MomentMaps};
use crate::imagecore::ImageF;

/// Below this an eigenvalue counts as zero for the edge test.
pub const EIGEN_EPS: f64 = 1e-12;

/// Eigenvalue sum of each pixel's derivative distribution, `sxx + syy`.
pub fn trace_map(m: &MomentMaps) -> ImageF {
    m.sxx.zip_map(&m.syy, |a, b| a + b)
}

/// Mean absolute trace difference over the four opposite neighbour pairs.
///
/// Pairs are (top-left, bottom-right), (left, right), (bottom-left, top-right)
/// and (top, bottom), all at offset 1 with replicated borders.
pub fn eas_map(t: &ImageF) -> ImageF {
    let (w, h) = t.dims();
    let mut out = vec![0.0; w * h];
    for y in 0..h {
        let up = t.row(y.saturating_sub(1));
        let mid = t.row(y);
        let down = t.row((y + 1).min(h - 1));
        let dst = &mut out[y * w..(y + 1) * w];
        for (x, o) in dst.iter_mut().enumerate() {
            let l = x.saturating_sub(1);
            let r = (x + 1).min(w - 1);
            let diag = (up[l] - down[r]).abs();
            let horiz = (mid[l] - mid[r]).abs();
            let anti = (down[l] - up[r]).abs();
            let vert = (up[x] - down[x]).abs();
            *o = (diag + horiz + anti + vert) / 4.0;
        }
    }
    ImageF::from_raw(w, h, out)
}

/// Whether a moment triple passes the eigenvalue-ratio edge test.
#[inline]
pub fn passes_edge_test(sxx: f64, syy: f64, sxy: f64, edge_thr: f64) -> bool {
    let (hi, lo) = eigen_pair(sxx, syy, sxy);
    if hi < EIGEN_EPS {
        // flat
        return true;
    }
    if lo < EIGEN_EPS {
        return false;
    }
    hi <= edge_thr * lo
}

/// 1 where the pixel is kept, 0 where `λmax / λmin > edge_thr`.
pub fn edge_mask(m: &MomentMaps, edge_thr: f64) -> ImageF {
    let (w, h) = m.dims();
    let data = m
        .sxx
        .data()
        .iter()
        .zip(m.syy.data())
        .zip(m.sxy.data())
        .map(|((&a, &b), &c)| if passes_edge_test(a, b, c, edge_thr) { 1.0 } else { 0.0 })
        .collect();
    ImageF::from_raw(w, h, data)
}
