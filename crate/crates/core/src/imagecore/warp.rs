use serde::{Deserialize, Serialize};

use super::{bilinear, ImageF};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WarpKind {
    Rotation,
    Affine,
    Scale,
}

/// Homogeneous transform from source to destination pixel coordinates.
///
/// Points are column vectors: `[x', y', w']ᵀ = M · [x, y, 1]ᵀ`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WarpSpec {
    pub kind: WarpKind,
    pub matrix: [[f64; 3]; 3],
}

const DET_EPS: f64 = 1e-12;

impl WarpSpec {
    pub fn new(kind: WarpKind, matrix: [[f64; 3]; 3]) -> Result<Self> {
        let det = matrix[0][0] * matrix[1][1] - matrix[0][1] * matrix[1][0];
        if det.abs() <= DET_EPS || matrix.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::SingularWarp(det));
        }
        Ok(Self { kind, matrix })
    }

    pub fn identity() -> Self {
        Self {
            kind: WarpKind::Affine,
            matrix: [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
        }
    }

    /// Rotation by `angle` radians about `(cx, cy)`; positive angles turn clockwise on screen.
    pub fn rotation(angle: f64, cx: f64, cy: f64) -> Self {
        let snap = |v: f64| {
            if v.abs() < 1e-15 {
                0.0
            } else if (v.abs() - 1.0).abs() < 1e-15 {
                v.signum()
            } else {
                v
            }
        };
        let (s, c) = angle.sin_cos();
        let (s, c) = (snap(s), snap(c));
        Self {
            kind: WarpKind::Rotation,
            matrix: [
                [c, -s, cx - c * cx + s * cy],
                [s, c, cy - s * cx - c * cy],
                [0.0, 0.0, 1.0],
            ],
        }
    }

    /// Rotation about the centre of a `width × height` image.
    pub fn rotation_about_center(angle: f64, width: usize, height: usize) -> Self {
        Self::rotation(angle, (width as f64 - 1.0) / 2.0, (height as f64 - 1.0) / 2.0)
    }

    /// Scaling about the origin.
    pub fn scale(sx: f64, sy: f64) -> Result<Self> {
        Self::new(WarpKind::Scale, [[sx, 0.0, 0.0], [0.0, sy, 0.0], [0.0, 0.0, 1.0]])
    }

    /// Affine map `x' = a·x + b·y + c`, `y' = d·x + e·y + f`.
    pub fn affine(a: f64, b: f64, c: f64, d: f64, e: f64, f: f64) -> Result<Self> {
        Self::new(WarpKind::Affine, [[a, b, c], [d, e, f], [0.0, 0.0, 1.0]])
    }

    pub fn is_identity(&self) -> bool {
        self.matrix == Self::identity().matrix
    }

    /// Maps a source point to the destination frame.
    pub fn apply(&self, x: f64, y: f64) -> (f64, f64) {
        apply_matrix(&self.matrix, x, y)
    }

    pub fn inverse(&self) -> Result<WarpSpec> {
        let m = &self.matrix;
        let cof = |r0: usize, r1: usize, c0: usize, c1: usize| m[r0][c0] * m[r1][c1] - m[r0][c1] * m[r1][c0];
        let det = m[0][0] * cof(1, 2, 1, 2) - m[0][1] * cof(1, 2, 0, 2) + m[0][2] * cof(1, 2, 0, 1);
        if det.abs() <= DET_EPS {
            return Err(Error::SingularWarp(det));
        }
        let inv = [
            [cof(1, 2, 1, 2) / det, -cof(0, 2, 1, 2) / det, cof(0, 1, 1, 2) / det],
            [-cof(1, 2, 0, 2) / det, cof(0, 2, 0, 2) / det, -cof(0, 1, 0, 2) / det],
            [cof(1, 2, 0, 1) / det, -cof(0, 2, 0, 1) / det, cof(0, 1, 0, 1) / det],
        ];
        WarpSpec::new(self.kind, inv)
    }

    /// Natural destination size: scaled for [`WarpKind::Scale`], unchanged otherwise.
    pub fn output_size(&self, width: usize, height: usize) -> (usize, usize) {
        match self.kind {
            WarpKind::Scale => {
                let w = (width as f64 * self.matrix[0][0].abs()).round().max(1.0) as usize;
                let h = (height as f64 * self.matrix[1][1].abs()).round().max(1.0) as usize;
                (w, h)
            }
            _ => (width, height),
        }
    }
}

fn apply_matrix(m: &[[f64; 3]; 3], x: f64, y: f64) -> (f64, f64) {
    let u = m[0][0] * x + m[0][1] * y + m[0][2];
    let v = m[1][0] * x + m[1][1] * y + m[1][2];
    let w = m[2][0] * x + m[2][1] * y + m[2][2];
    if w == 1.0 {
        (u, v)
    } else {
        (u / w, v / w)
    }
}

/// Inverse-maps every destination pixel into `img` with bilinear interpolation.
///
/// Destination pixels whose preimage falls outside the source receive `fill`.
pub fn warp(img: &ImageF, w: &WarpSpec, out_size: (usize, usize), fill: f64) -> Result<ImageF> {
    let inv = w.inverse()?;
    let (ow, oh) = out_size;
    if ow == 0 || oh == 0 {
        return Err(Error::InvalidImage(format!("output size {ow}x{oh}")));
    }
    const EPS: f64 = 1e-9;
    let maxx = (img.width() - 1) as f64;
    let maxy = (img.height() - 1) as f64;
    let mut out = vec![fill; ow * oh];
    for y in 0..oh {
        for x in 0..ow {
            let (sx, sy) = apply_matrix(&inv.matrix, x as f64, y as f64);
            if sx >= -EPS && sy >= -EPS && sx <= maxx + EPS && sy <= maxy + EPS {
                out[y * ow + x] = bilinear(img, sx.clamp(0.0, maxx), sy.clamp(0.0, maxy));
            }
        }
    }
    ImageF::new(ow, oh, out)
}
