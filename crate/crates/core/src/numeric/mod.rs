//! Floating point helpers shared by the spectral and monodromy layers.

pub mod dd;
pub mod roots;

use nalgebra::DMatrix;
pub use num_complex::Complex64;

pub use roots::{aberth, min_separation, RootError};

pub type CMatrix = DMatrix<Complex64>;

pub fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

/// Frobenius norm.
pub fn norm(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Singular values in decreasing order.
pub fn singular_values(m: &CMatrix) -> Vec<f64> {
    let mut s: Vec<f64> = m.clone().svd(false, false).singular_values.iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

pub fn matrix_pow(m: &CMatrix, e: u32) -> CMatrix {
    (0..e).fold(identity(m.nrows()), |acc, _| acc * m)
}

/// Numerical rank: singular values above `rel_tol` times the largest.
pub fn numerical_rank(m: &CMatrix, rel_tol: f64) -> usize {
    let s = singular_values(m);
    let top = s.first().copied().unwrap_or(0.0);
    if top == 0.0 {
        return 0;
    }
    s.iter().filter(|&&v| v > rel_tol * top).count()
}

/// Row-major nested vectors, the report encoding for matrices.
pub fn to_rows(m: &CMatrix) -> Vec<Vec<Complex64>> {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect()).collect()
}

/// Orthonormal basis of the numerical null space, from the right singular
/// vectors whose singular values fall below `rel_tol` times the larger of
/// the top singular value and 1.
pub fn null_space(m: &CMatrix, rel_tol: f64) -> Vec<nalgebra::DVector<Complex64>> {
    let cols = m.ncols();
    // pad to at least square so the thin SVD exposes every right singular vector
    let padded = if m.nrows() < cols {
        let mut p = CMatrix::zeros(cols, cols);
        p.view_mut((0, 0), (m.nrows(), cols)).copy_from(m);
        p
    } else {
        m.clone()
    };
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.expect("requested V^t");
    let top = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let mut out = Vec::new();
    for (k, &s) in svd.singular_values.iter().enumerate() {
        if s <= rel_tol * top.max(1.0) {
            out.push(v_t.row(k).adjoint());
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_and_null_space() {
        let m = CMatrix::from_row_slice(2, 3, &[c64(1.0, 0.0), c64(2.0, 0.0), c64(3.0, 0.0), c64(2.0, 0.0), c64(4.0, 0.0), c64(6.0, 0.0)]);
        assert_eq!(numerical_rank(&m, 1e-12), 1);
        let ns = null_space(&m, 1e-12);
        assert_eq!(ns.len(), 2);
        for v in ns {
            assert!((&m * v).norm() < 1e-12);
        }
        assert!((norm(&identity(4)) - 2.0).abs() < 1e-15);
    }
}
