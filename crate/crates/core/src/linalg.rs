//! Small fixed-size linear algebra helpers shared by the filter and planner.

use nalgebra::{Matrix2, Matrix4, SymmetricEigen, Vector2};

/// Condition number above which a covariance is treated as degenerate.
pub const MAX_CONDITION: f64 = 1e12;
/// Relative jitter added to degenerate covariances (scaled by mean eigenvalue).
pub const JITTER_SCALE: f64 = 1e-8;
/// Absolute jitter used when the covariance has zero trace.
pub const JITTER_FLOOR: f64 = 1e-12;

fn jitter(trace: f64, dim: f64) -> f64 {
    (JITTER_SCALE * trace / dim).max(JITTER_FLOOR)
}

/// Symmetrize and, if the condition number exceeds [`MAX_CONDITION`], add
/// `eps * I` with `eps = 1e-8 * trace / 4`.
pub fn regularize4(cov: &Matrix4<f64>) -> Matrix4<f64> {
    let sym = 0.5 * (cov + cov.transpose());
    let eig = SymmetricEigen::new(sym);
    let max = eig.eigenvalues.max();
    let min = eig.eigenvalues.min();
    if min > 0.0 && max / min <= MAX_CONDITION {
        return sym;
    }
    let eps = jitter(sym.trace().max(0.0), 4.0);
    if min >= 0.0 {
        sym + Matrix4::identity() * eps
    } else {
        // Indefinite input: clip negative eigenvalues before adding jitter.
        let clipped = eig.eigenvalues.map(|v| v.max(0.0) + eps);
        eig.eigenvectors * Matrix4::from_diagonal(&clipped) * eig.eigenvectors.transpose()
    }
}

/// Two-dimensional counterpart of [`regularize4`] for position blocks.
pub fn regularize2(cov: &Matrix2<f64>) -> Matrix2<f64> {
    let sym = 0.5 * (cov + cov.transpose());
    let (min, max) = eigenvalues2(&sym);
    if min > 0.0 && max / min <= MAX_CONDITION {
        return sym;
    }
    let eps = jitter(sym.trace().max(0.0), 2.0);
    if min >= 0.0 {
        sym + Matrix2::identity() * eps
    } else {
        let eig = SymmetricEigen::new(sym);
        let clipped = eig.eigenvalues.map(|v| v.max(0.0) + eps);
        eig.eigenvectors * Matrix2::from_diagonal(&clipped) * eig.eigenvectors.transpose()
    }
}

/// Eigenvalues `(min, max)` of a symmetric 2x2 matrix.
pub fn eigenvalues2(m: &Matrix2<f64>) -> (f64, f64) {
    let a = m[(0, 0)];
    let d = m[(1, 1)];
    let b = 0.5 * (m[(0, 1)] + m[(1, 0)]);
    let mean = 0.5 * (a + d);
    let radius = (0.25 * (a - d) * (a - d) + b * b).sqrt();
    (mean - radius, mean + radius)
}

/// A factor `L` with `L Lᵀ = m` for a symmetric positive semi-definite `m`.
/// Uses Cholesky when possible and falls back to an eigen factor.
pub fn psd_factor4(m: &Matrix4<f64>) -> Matrix4<f64> {
    let sym = 0.5 * (m + m.transpose());
    if let Some(ch) = sym.cholesky() {
        return ch.l();
    }
    let eig = SymmetricEigen::new(sym);
    let roots = eig.eigenvalues.map(|v| v.max(0.0).sqrt());
    eig.eigenvectors * Matrix4::from_diagonal(&roots)
}

pub fn psd_factor2(m: &Matrix2<f64>) -> Matrix2<f64> {
    let sym = 0.5 * (m + m.transpose());
    if let Some(ch) = sym.cholesky() {
        return ch.l();
    }
    let eig = SymmetricEigen::new(sym);
    let roots = eig.eigenvalues.map(|v| v.max(0.0).sqrt());
    eig.eigenvectors * Matrix2::from_diagonal(&roots)
}

/// Bivariate normal density `N(diff; 0, cov)`. Returns 0 for a singular `cov`.
pub fn gaussian2_pdf(diff: &Vector2<f64>, cov: &Matrix2<f64>) -> f64 {
    let det = cov.determinant();
    if det <= 0.0 || !det.is_finite() {
        return 0.0;
    }
    let inv = Matrix2::new(cov[(1, 1)], -cov[(0, 1)], -cov[(1, 0)], cov[(0, 0)]) / det;
    let maha = (diff.transpose() * inv * diff)[(0, 0)];
    (-0.5 * maha).exp() / (2.0 * std::f64::consts::PI * det.sqrt())
}

/// Precomputed inverse and normalizer for repeated bivariate density evaluation.
#[derive(Clone, Copy, Debug)]
pub struct Gaussian2 {
    inv: Matrix2<f64>,
    norm: f64,
}

impl Gaussian2 {
    pub fn new(cov: &Matrix2<f64>) -> Option<Self> {
        let det = cov.determinant();
        if det <= 0.0 || !det.is_finite() {
            return None;
        }
        let inv = Matrix2::new(cov[(1, 1)], -cov[(0, 1)], -cov[(1, 0)], cov[(0, 0)]) / det;
        Some(Self {
            inv,
            norm: 1.0 / (2.0 * std::f64::consts::PI * det.sqrt()),
        })
    }

    #[inline]
    pub fn pdf(&self, dx: f64, dy: f64) -> f64 {
        let maha = self.inv[(0, 0)] * dx * dx
            + (self.inv[(0, 1)] + self.inv[(1, 0)]) * dx * dy
            + self.inv[(1, 1)] * dy * dy;
        self.norm * (-0.5 * maha).exp()
    }
}

pub fn matrix2_from_rows(rows: &[[f64; 2]; 2]) -> Matrix2<f64> {
    Matrix2::new(rows[0][0], rows[0][1], rows[1][0], rows[1][1])
}

pub fn matrix2_to_rows(m: &Matrix2<f64>) -> [[f64; 2]; 2] {
    [[m[(0, 0)], m[(0, 1)]], [m[(1, 0)], m[(1, 1)]]]
}

pub fn matrix4_from_rows(rows: &[[f64; 4]; 4]) -> Matrix4<f64> {
    Matrix4::from_fn(|i, j| rows[i][j])
}

pub fn matrix4_to_rows(m: &Matrix4<f64>) -> [[f64; 4]; 4] {
    let mut out = [[0.0; 4]; 4];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            *v = m[(i, j)];
        }
    }
    out
}
