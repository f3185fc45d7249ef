//! Eigen-analysis of `A` and the connections built from it.
//!
//! The second-model system is `∂Φ = T(A − t)^(−1) Φ` with
//! `T = diag(0, 1, …, n)`. For diagonalizable `A = A^τ` the eigenvector
//! matrix can be scaled to `C^t J C = I`, and the system splits into
//! partial fractions `Σ S_j/(t − λ_j)` with rank one residues
//! `S_j = −T C E_j C^(−1)`.

mod infinity;
mod second_model;

use nalgebra::DVector;
use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::dn::DNMatrix;
use crate::linalg::QMatrix;
use crate::numeric::{aberth, identity, norm, singular_values, CMatrix, RootError};
use crate::scalar::GaussRational;

pub use infinity::{infinity_exponents, NilpotencyCertificate, TruncatedSeriesMatrix};
pub use second_model::{adjugate_pencil, ModuleVector, SecondModel};

pub const DEFAULT_TOL: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectralError {
    #[error("eigenvalues {i} and {j} are {gap:e} apart")]
    DegenerateSpectrum { i: usize, j: usize, gap: f64 },
    #[error("column {j} has u^t J u = {value:e}")]
    NullVector { j: usize, value: f64 },
    #[error("t is {distance:e} from the eigenvalue {lambda}")]
    NearSingularity { lambda: Complex64, distance: f64 },
    #[error("truncation {truncation} is below the required {required}")]
    TruncationTooSmall { truncation: usize, required: usize },
    #[error("eigenvector matrix is singular")]
    SingularBasis,
    #[error(transparent)]
    Roots(#[from] RootError),
}

/// `diag(0, 1, …, n)`.
pub fn t_matrix(n: usize) -> CMatrix {
    CMatrix::from_fn(n + 1, n + 1, |i, j| if i == j { Complex64::new(i as f64, 0.0) } else { Complex64::new(0.0, 0.0) })
}

/// The anti-diagonal permutation, `J_ij = 1` iff `i + j = n`.
pub fn j_matrix(n: usize) -> CMatrix {
    CMatrix::from_fn(n + 1, n + 1, |i, j| if i + j == n { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) })
}

#[derive(Clone, Debug)]
pub struct ConnectionSpectrum {
    pub lambdas: Vec<Complex64>,
    /// Eigenvectors as columns, in the order of `lambdas`.
    pub c: CMatrix,
    /// Residue matrices; empty until [`residue_matrices`] runs.
    pub s: Vec<CMatrix>,
    pub normalized: bool,
}

impl ConnectionSpectrum {
    pub fn n(&self) -> usize {
        self.lambdas.len() - 1
    }

    pub fn min_gap(&self) -> f64 {
        crate::numeric::min_separation(&self.lambdas)
    }
}

/// Eigenvalues from the exact characteristic polynomial, eigenvectors by
/// back substitution from the last coordinate (never zero for these
/// matrices) followed by inverse iteration.
pub fn eigendecompose(a: &DNMatrix, tol: f64) -> Result<ConnectionSpectrum, SpectralError> {
    let n = a.n();
    let chi = a.characteristic_polynomial();
    if !chi.is_squarefree() {
        let roots = aberth(&chi.to_complex_coeffs(), 1e-15)?;
        let (i, j, gap) = closest_pair(&roots);
        return Err(SpectralError::DegenerateSpectrum { i, j, gap });
    }
    let mut lambdas = aberth(&chi.to_complex_coeffs(), 1e-15)?;
    lambdas.sort_by(|x, y| (x.re, x.im).partial_cmp(&(y.re, y.im)).expect("finite"));
    if n > 0 {
        let (i, j, gap) = closest_pair(&lambdas);
        if gap <= tol * lambdas.iter().map(|z| z.norm()).fold(1.0, f64::max) {
            return Err(SpectralError::DegenerateSpectrum { i, j, gap });
        }
    }
    let am = a.to_complex();
    let mut c = CMatrix::zeros(n + 1, n + 1);
    for (col, &lam) in lambdas.iter().enumerate() {
        let mut u = back_substitute(&am, lam);
        u = inverse_iteration(&am, lam, u);
        c.set_column(col, &u);
    }
    Ok(ConnectionSpectrum { lambdas, c, s: Vec::new(), normalized: false })
}

fn closest_pair(roots: &[Complex64]) -> (usize, usize, f64) {
    let mut best = (0, 0, f64::INFINITY);
    for i in 0..roots.len() {
        for j in i + 1..roots.len() {
            let d = (roots[i] - roots[j]).norm();
            if d < best.2 {
                best = (i, j, d);
            }
        }
    }
    best
}

/// Rows `n, n−1, …, 1` of `(A − λ)u = 0` with `u_n = 1` determine `u`.
fn back_substitute(a: &CMatrix, lam: Complex64) -> DVector<Complex64> {
    let n = a.nrows() - 1;
    let mut u = DVector::from_element(n + 1, Complex64::new(0.0, 0.0));
    u[n] = Complex64::new(1.0, 0.0);
    for i in (1..=n).rev() {
        let mut s = lam * u[i];
        for j in i..=n {
            s -= a[(i, j)] * u[j];
        }
        u[i - 1] = s;
    }
    u
}

fn inverse_iteration(a: &CMatrix, lam: Complex64, mut u: DVector<Complex64>) -> DVector<Complex64> {
    let n = a.nrows();
    let shift = lam + Complex64::new(1e-9, 1e-9) * (1.0 + lam.norm());
    let lu = (a - identity(n) * shift).lu();
    for _ in 0..2 {
        match lu.solve(&u) {
            Some(v) if v.iter().all(|z| z.re.is_finite() && z.im.is_finite()) && v[n - 1].norm() > 0.0 => {
                let last = v[n - 1];
                u = v / last;
            }
            _ => break,
        }
    }
    u
}

/// Scales each column so that `u^t J u = 1`, using the principal square
/// root. Idempotent.
pub fn normalize_basis(mut spec: ConnectionSpectrum, tol: f64) -> Result<ConnectionSpectrum, SpectralError> {
    let n = spec.n();
    for j in 0..=n {
        let u = spec.c.column(j).into_owned();
        let d: Complex64 = (0..=n).map(|i| u[i] * u[n - i]).sum();
        if d.norm() <= tol * u.norm_squared() {
            return Err(SpectralError::NullVector { j, value: d.norm() });
        }
        let scaled = u / d.sqrt();
        spec.c.set_column(j, &scaled);
    }
    spec.normalized = true;
    Ok(spec)
}

/// `S_j = −T C E_j C^(−1) = −(T u_j)(row j of C^(−1))`.
pub fn residue_matrices(mut spec: ConnectionSpectrum) -> Result<ConnectionSpectrum, SpectralError> {
    let n = spec.n();
    let cinv = spec.c.clone().try_inverse().ok_or(SpectralError::SingularBasis)?;
    let t = t_matrix(n);
    spec.s = (0..=n)
        .map(|j| {
            let tu = &t * spec.c.column(j);
            -(tu * cinv.row(j))
        })
        .collect();
    Ok(spec)
}

/// Eigendecomposition, normalization and residues in one call.
pub fn analyze_spectrum(a: &DNMatrix, tol: f64) -> Result<ConnectionSpectrum, SpectralError> {
    residue_matrices(normalize_basis(eigendecompose(a, tol)?, tol)?)
}

fn check_distance(lambdas: &[Complex64], t: Complex64, tol: f64) -> Result<(), SpectralError> {
    for &lambda in lambdas {
        let distance = (t - lambda).norm();
        if distance <= tol {
            return Err(SpectralError::NearSingularity { lambda, distance });
        }
    }
    Ok(())
}

/// `T(A − t)^(−1)` by a direct solve.
pub fn connection_rhs(a: &CMatrix, lambdas: &[Complex64], t: Complex64, tol: f64) -> Result<CMatrix, SpectralError> {
    check_distance(lambdas, t, tol)?;
    let n = a.nrows() - 1;
    let inv = (a - identity(n + 1) * t).try_inverse().ok_or(SpectralError::NearSingularity { lambda: t, distance: 0.0 })?;
    Ok(t_matrix(n) * inv)
}

/// `Σ_j S_j / (t − λ_j)`, the second evaluation path.
pub fn partial_fraction_rhs(spec: &ConnectionSpectrum, t: Complex64, tol: f64) -> Result<CMatrix, SpectralError> {
    check_distance(&spec.lambdas, t, tol)?;
    let n = spec.n();
    Ok(spec.s.iter().zip(&spec.lambdas).fold(CMatrix::zeros(n + 1, n + 1), |acc, (s, &l)| acc + s / (t - l)))
}

/// The first-model (bis) connection matrix `A − (I + T)/z`, kept exact as
/// its constant part and its residue at `z = 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FirstModelConnection {
    pub constant: QMatrix,
    pub residue: QMatrix,
}

impl FirstModelConnection {
    pub fn eval(&self, z: Complex64) -> CMatrix {
        self.constant.to_complex() + self.residue.to_complex() / z
    }
}

pub fn first_model_connection(a: &DNMatrix) -> FirstModelConnection {
    let size = a.size();
    let residue = QMatrix::from_fn(size, size, |i, j| if i == j { GaussRational::from_int(-1 - i as i64) } else { GaussRational::default() });
    FirstModelConnection { constant: a.to_qmatrix(), residue }
}

/// Measured deviations from the residue structure: trace `−n/2`, rank one,
/// `S_j u_i = 0` for `i ≠ j` and `S_j (T u_j) = −(n/2) T u_j`.
#[derive(Clone, Debug, Serialize)]
pub struct ResidueStructure {
    pub traces: Vec<Complex64>,
    pub max_trace_error: f64,
    /// `σ₂/σ₁` per residue matrix.
    pub rank_ratios: Vec<f64>,
    pub max_kernel_residual: f64,
    pub max_eigenvector_residual: f64,
    /// `‖C^t J C − I‖`.
    pub normalization_residual: f64,
}

impl ResidueStructure {
    pub fn max_rank_ratio(&self) -> f64 {
        self.rank_ratios.iter().copied().fold(0.0, f64::max)
    }
}

pub fn residue_structure(spec: &ConnectionSpectrum) -> ResidueStructure {
    let n = spec.n();
    let half = Complex64::new(n as f64 / 2.0, 0.0);
    let t = t_matrix(n);
    let mut traces = Vec::new();
    let mut rank_ratios = Vec::new();
    let mut kernel: f64 = 0.0;
    let mut eig: f64 = 0.0;
    for (j, s) in spec.s.iter().enumerate() {
        traces.push(s.trace());
        let sv = singular_values(s);
        rank_ratios.push(if sv.len() > 1 && sv[0] > 0.0 { sv[1] / sv[0] } else { 0.0 });
        for i in 0..=n {
            let u = spec.c.column(i);
            if i != j {
                kernel = kernel.max((s * u).norm() / u.norm());
            } else {
                let tu = &t * u;
                if tu.norm() > 0.0 {
                    eig = eig.max((s * &tu + &tu * half).norm() / tu.norm());
                }
            }
        }
    }
    let max_trace_error = traces.iter().map(|z| (z + half).norm()).fold(0.0, f64::max);
    let ctjc = spec.c.transpose() * j_matrix(n) * &spec.c;
    ResidueStructure {
        traces,
        max_trace_error,
        rank_ratios,
        max_kernel_residual: kernel,
        max_eigenvector_residual: eig,
        normalization_residual: norm(&(ctjc - identity(n + 1))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::c64;

    fn flip() -> DNMatrix {
        DNMatrix::from_int_rows(&[&[0, 1], &[1, 0]])
    }

    #[test]
    fn two_by_two() {
        let spec = eigendecompose(&flip(), DEFAULT_TOL).unwrap();
        assert!((spec.lambdas[0] - c64(-1.0, 0.0)).norm() < 1e-14);
        assert!((spec.lambdas[1] - c64(1.0, 0.0)).norm() < 1e-14);
        let spec = normalize_basis(spec, DEFAULT_TOL).unwrap();
        // u_+ = (1,1)/√2 up to sign, u_− = (1,−1)/(i√2) up to sign
        let up = spec.c.column(1);
        assert!((up[0].norm() - 0.5f64.sqrt()).abs() < 1e-14 && (up[0] - up[1]).norm() < 1e-14);
        let um = spec.c.column(0);
        assert!((um[0] + um[1]).norm() < 1e-14);
        assert!((um[0] * um[1] * 2.0 - c64(1.0, 0.0)).norm() < 1e-14);
        let again = normalize_basis(spec.clone(), DEFAULT_TOL).unwrap();
        assert!(norm(&(again.c - &spec.c)) < 1e-15);

        let spec = residue_matrices(spec).unwrap();
        let r = residue_structure(&spec);
        for tr in &r.traces {
            assert!((tr - c64(-0.5, 0.0)).norm() < 1e-14);
        }
        assert!(r.max_rank_ratio() < 1e-14);
        assert!(r.max_kernel_residual < 1e-14 && r.max_eigenvector_residual < 1e-14);
        let total: Complex64 = spec.s.iter().map(|s| s.trace()).sum();
        assert!((total - c64(-1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn column_sign_does_not_change_residues() {
        let spec = normalize_basis(eigendecompose(&flip(), DEFAULT_TOL).unwrap(), DEFAULT_TOL).unwrap();
        let mut flipped = spec.clone();
        let col = -flipped.c.column(0).into_owned();
        flipped.c.set_column(0, &col);
        let a = residue_matrices(spec).unwrap();
        let b = residue_matrices(flipped).unwrap();
        for (x, y) in a.s.iter().zip(&b.s) {
            assert!(norm(&(x - y)) < 1e-14);
        }
    }

    #[test]
    fn recovers_chosen_spectrum() {
        // χ = (t−1)(t² − t − 1) − (t − 1) = (t+1)(t−1)(t−2)
        let b = DNMatrix::from_int_rows(&[&[1, 1, 0], &[1, 0, 1], &[0, 1, 1]]);
        assert!(b.is_symmetric());
        assert_eq!(b.characteristic_polynomial(), crate::poly::Poly::from_ints(&[2, -1, -2, 1]));
        let spec = eigendecompose(&b, DEFAULT_TOL).unwrap();
        for (got, want) in spec.lambdas.iter().zip([-1.0, 1.0, 2.0]) {
            assert!((got - c64(want, 0.0)).norm() < 1e-10);
        }
        let am = b.to_complex();
        for (j, &l) in spec.lambdas.iter().enumerate() {
            let u = spec.c.column(j);
            assert!((&am * u - u * l).norm() < 1e-12);
        }
    }

    #[test]
    fn nilpotent_example_is_degenerate() {
        let one = GaussRational::from_int(1);
        let a = DNMatrix::from_upper(2, |i, j| match (i, j) {
            (0, 0) | (2, 2) => one.clone(),
            (0, 1) | (1, 2) => GaussRational::from_ratio(-3, 2),
            (0, 2) => GaussRational::from_int(-1),
            _ => GaussRational::from_int(-2),
        });
        assert!(matches!(eigendecompose(&a, DEFAULT_TOL), Err(SpectralError::DegenerateSpectrum { .. })));
    }

    #[test]
    fn rhs_two_paths() {
        let a = flip();
        let spec = analyze_spectrum(&a, DEFAULT_TOL).unwrap();
        let am = a.to_complex();
        for t in [c64(3.0, 0.0), c64(0.2, -1.5), c64(-40.0, 7.0)] {
            let direct = connection_rhs(&am, &spec.lambdas, t, DEFAULT_TOL).unwrap();
            assert!(direct.row(0).iter().all(|z| z.norm() == 0.0));
            let pf = partial_fraction_rhs(&spec, t, DEFAULT_TOL).unwrap();
            assert!(norm(&(direct - pf)) < 1e-12);
        }
        let big = c64(1e8, 0.0);
        let lim = connection_rhs(&am, &spec.lambdas, big, DEFAULT_TOL).unwrap() * big;
        assert!(norm(&(lim + t_matrix(1))) < 1e-6);
        assert!(matches!(connection_rhs(&am, &spec.lambdas, c64(1.0, 1e-12), DEFAULT_TOL), Err(SpectralError::NearSingularity { .. })));
    }

    #[test]
    fn first_model() {
        let a = DNMatrix::from_int_rows(&[&[7]]);
        let f = first_model_connection(&a);
        assert_eq!(f.constant, QMatrix::from_ints(&[&[7]]));
        assert_eq!(f.residue, QMatrix::from_ints(&[&[-1]]));
        let f = first_model_connection(&flip());
        assert_eq!(f.residue, QMatrix::from_ints(&[&[-1, 0], &[0, -2]]));
        let z = c64(0.5, 0.0);
        assert!((f.eval(z)[(1, 1)] - c64(-4.0, 0.0)).norm() < 1e-15);
    }
}
