//! Numerical monodromy of `∂Φ = T(A − t)^(−1)Φ` and of the operators built
//! from it.
//!
//! Transport matrices are normalized by `Φ(base) = I`, so the matrix of a
//! loop `γ` is `P_γ = Φ_γ(base)` and concatenation reverses order:
//! `P_(γδ) = P_δ P_γ`.
//!
//! The first row of `Φ` is constant (the top row of `T` vanishes), hence
//! `Φ^(−1)` has left-most column `(1, f_1, …, f_n)`: the constant function and
//! `n` more solutions of `det_right(t∂ − Ã)f = 0`. Every `P_γ` is block lower
//! triangular, and the action on the solutions modulo constants is the
//! lower-right `n × n` block, which is what [`reduce`] returns.
//!
//! Loop matrices can be far from normal (norms of `10^4` and more for nearby
//! eigenvalues), and then merely rounding them to `f64` moves the product
//! `M_∞ M_k ⋯ M_1` away from `I` by more than `10^(−7)`. Transports are
//! therefore carried in double-double, and the product and the unipotency
//! powers are formed there before rounding.

mod hypergeom;
mod integrator;
mod loops;
mod polarization;
mod taylor;

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::dn::DNMatrix;
use crate::numeric::dd::{dd_identity, dd_norm, dd_pow, to_dd, to_f64, DdMatrix};
use crate::numeric::{identity, singular_values, to_rows, CMatrix};
use crate::spectral::{eigendecompose, SpectralError, DEFAULT_TOL};

pub use hypergeom::{
    bracket_series, hprime_monodromy, hypergeom_operator, hypergeom_structure, reflection_vector, rrv_check, rrv_series,
    HprimeMonodromy, HypergeomStructure, RrvResult,
};
pub use integrator::{continue_solution, is_closed, reverse_path, transport, Path, Segment, Transport};
pub use loops::{Loop, LoopCenter, LoopGeometry};
pub use polarization::{solve_polarization, solve_polarization_precise, PolarizationForm, Symmetry};
pub use taylor::{series_transport, PolynomialSystem, CHECK_RATIO, STEP_RATIO};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MonodromyError {
    #[error("step size collapsed to {step:e} near z = {z}")]
    StepUnderflow { z: Complex64, step: f64 },
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error("loop geometry: {0}")]
    Geometry(String),
    #[error("Taylor series failed to converge at z = {z} for a step of {step:e}")]
    SeriesDivergence { z: Complex64, step: f64 },
    #[error("first row of a transport matrix deviates from e_0 by {deviation:e}")]
    QuotientIllConditioned { deviation: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Integrator {
    /// Double-double Taylor series, cross-checked at a smaller step ratio.
    TaylorSeries,
    /// Dormand–Prince 5(4) in `f64`, cross-checked at half tolerance.
    EmbeddedPair,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct MonodromyConfig {
    pub integrator: Integrator,
    /// Local error per step of the embedded pair.
    pub tol_ode: f64,
    /// Acceptance threshold for the monodromy checks.
    pub tol_mono: f64,
    pub tol_spectral: f64,
    /// Rerun every loop with finer steps and record the difference.
    pub richardson: bool,
}

impl Default for MonodromyConfig {
    fn default() -> Self {
        MonodromyConfig { integrator: Integrator::TaylorSeries, tol_ode: 1e-12, tol_mono: 1e-6, tol_spectral: DEFAULT_TOL, richardson: true }
    }
}

#[derive(Clone, Debug)]
pub struct LoopTransport {
    pub lp: Loop,
    pub precise: DdMatrix,
    pub matrix: CMatrix,
    pub steps: usize,
    pub global_error: Option<f64>,
}

/// Transport of the identity around `path` with the configured integrator.
pub fn transport_loop(sys: &PolynomialSystem, path: &[Segment], cfg: &MonodromyConfig) -> Result<(DdMatrix, usize, Option<f64>), MonodromyError> {
    match cfg.integrator {
        Integrator::TaylorSeries => {
            let (phi, steps) = series_transport(sys, path, STEP_RATIO)?;
            if !cfg.richardson {
                return Ok((phi, steps, None));
            }
            let (check, more) = series_transport(sys, path, CHECK_RATIO)?;
            let err = dd_norm(&(&phi - check));
            Ok((phi, steps + more, Some(err)))
        }
        Integrator::EmbeddedPair => {
            let t = continue_solution(&sys.rhs(), path, sys.size(), cfg.tol_ode, cfg.richardson)?;
            Ok((to_dd(&t.phi), t.steps, t.global_error))
        }
    }
}

/// Transports around every loop of `geometry`, one thread per loop.
pub fn loop_transports(sys: &PolynomialSystem, geometry: &LoopGeometry, cfg: &MonodromyConfig) -> Result<Vec<LoopTransport>, MonodromyError> {
    std::thread::scope(|scope| {
        let handles: Vec<_> = geometry
            .loops
            .iter()
            .map(|lp| {
                scope.spawn(move || {
                    transport_loop(sys, &lp.path, cfg).map(|(precise, steps, global_error)| LoopTransport {
                        lp: lp.clone(),
                        matrix: to_f64(&precise),
                        precise,
                        steps,
                        global_error,
                    })
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("integration thread panicked")).collect()
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LoopTarget {
    Eigenvalue(usize),
    Infinity,
}

/// Monodromy along the positively oriented loop about one singularity.
/// Eigenvalues are indexed as returned by the spectral decomposition.
pub fn local_monodromy(a: &DNMatrix, target: LoopTarget, cfg: &MonodromyConfig) -> Result<CMatrix, MonodromyError> {
    let spec = eigendecompose(a, cfg.tol_spectral)?;
    let geometry = LoopGeometry::new(&spec.lambdas)?;
    let lp = match target {
        LoopTarget::Infinity => geometry.infinity(),
        LoopTarget::Eigenvalue(j) => geometry.finite().iter().find(|l| l.index == Some(j)).ok_or_else(|| MonodromyError::Geometry(format!("no eigenvalue {j}")))?,
    };
    let sys = PolynomialSystem::dn(a, &spec.lambdas);
    Ok(to_f64(&transport_loop(&sys, &lp.path, cfg)?.0))
}

/// Lower-right `n × n` block, after checking that the first row is `e_0`.
pub fn reduce(m: &CMatrix, tol: f64) -> Result<CMatrix, MonodromyError> {
    reduce_precise(&to_dd(m), tol).map(|r| to_f64(&r))
}

pub fn reduce_precise(m: &DdMatrix, tol: f64) -> Result<DdMatrix, MonodromyError> {
    let size = m.nrows();
    let first = to_f64(&m.rows(0, 1).into_owned());
    let deviation = (0..size).map(|j| (first[(0, j)] - if j == 0 { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) }).norm()).fold(0.0, f64::max);
    if deviation > tol * dd_norm(m).max(1.0) {
        return Err(MonodromyError::QuotientIllConditioned { deviation });
    }
    Ok(m.view((1, 1), (size - 1, size - 1)).into_owned())
}

/// Eigenvalue structure of a pseudoreflection candidate `M = I + R` with
/// `rank R ≤ 1`: the spectrum is `1` repeated `d − 1` times and `1 + tr R`.
/// Reading the special eigenvalue off the trace avoids the square-root
/// sensitivity of a defective eigenvalue.
#[derive(Clone, Debug, Serialize)]
pub struct PseudoreflectionCheck {
    pub expected: f64,
    pub special_eigenvalue: Complex64,
    /// Second singular value of `M − I`.
    pub rank_one_defect: f64,
    /// Dimension of the eigenvalue-1 eigenspace, from the singular values of
    /// `M − I` above the threshold.
    pub eigenspace_dimension: usize,
    pub eigenvalues: Vec<Complex64>,
    pub error: f64,
    pub passed: bool,
}

pub fn pseudoreflection_check(m: &CMatrix, expected: f64, tol: f64) -> PseudoreflectionCheck {
    let d = m.nrows();
    let r = m - identity(d);
    let sv = singular_values(&r);
    let defect = sv.get(1).copied().unwrap_or(0.0);
    let special = Complex64::new(1.0, 0.0) + r.trace();
    let error = (special - expected).norm().max(defect);
    let mut eigenvalues = vec![Complex64::new(1.0, 0.0); d.saturating_sub(1)];
    eigenvalues.push(special);
    PseudoreflectionCheck {
        expected,
        special_eigenvalue: special,
        rank_one_defect: defect,
        eigenspace_dimension: d - sv.iter().filter(|&&s| s > tol.sqrt()).count(),
        eigenvalues,
        error,
        passed: error <= tol,
    }
}

/// `‖(M − I)^d‖` should vanish and `‖(M − I)^(d−1)‖` should not.
#[derive(Clone, Debug, Serialize)]
pub struct UnipotencyCheck {
    pub size: usize,
    pub top_power_norm: f64,
    pub previous_power_norm: f64,
    pub passed: bool,
}

pub const MAXIMALITY_THRESHOLD: f64 = 1e-3;

pub fn unipotency_check(m: &CMatrix, tol: f64) -> UnipotencyCheck {
    unipotency_check_precise(&to_dd(m), tol)
}

/// The powers of `M − I` are formed in double-double: in `f64` their
/// rounding error grows like `‖M − I‖^d`.
pub fn unipotency_check_precise(m: &DdMatrix, tol: f64) -> UnipotencyCheck {
    let d = m.nrows();
    let r = m - dd_identity(d);
    let top = dd_norm(&dd_pow(&r, d as u32));
    let prev = dd_norm(&dd_pow(&r, d.saturating_sub(1) as u32));
    UnipotencyCheck { size: d, top_power_norm: top, previous_power_norm: prev, passed: top <= tol && prev >= MAXIMALITY_THRESHOLD }
}

type Rows = Vec<Vec<Complex64>>;

#[derive(Clone, Debug, Serialize)]
pub struct LoopReport {
    pub center: LoopCenter,
    pub radius: f64,
    pub clearance: f64,
    pub steps: usize,
    pub global_error: Option<f64>,
    pub matrix: Rows,
    pub reduced: Rows,
}

#[derive(Clone, Debug, Serialize)]
pub struct MonodromyReport {
    pub n: usize,
    pub lambdas: Vec<Complex64>,
    pub base_point: Complex64,
    pub ordering: String,
    /// Finite loops in composition order, then `∞`.
    pub loops: Vec<LoopReport>,
    /// `‖M_∞ M_k ⋯ M_1 − I‖`.
    pub product_residual: f64,
    pub finite_checks: Vec<PseudoreflectionCheck>,
    pub infinity_check: UnipotencyCheck,
    pub reduced_finite_checks: Vec<PseudoreflectionCheck>,
    pub reduced_infinity_check: UnipotencyCheck,
    pub polarization: PolarizationForm,
    pub max_global_error: f64,
}

impl MonodromyReport {
    pub fn product_ok(&self, tol: f64) -> bool {
        self.product_residual <= tol
    }

    pub fn finite_ok(&self) -> bool {
        self.finite_checks.iter().all(|c| c.passed)
    }

    pub fn reduced_ok(&self) -> bool {
        self.reduced_finite_checks.iter().all(|c| c.passed) && self.reduced_infinity_check.passed
    }

    pub fn all_ok(&self, tol: f64) -> bool {
        self.product_ok(tol) && self.finite_ok() && self.infinity_check.passed && self.reduced_ok()
    }

    pub fn matrices(&self) -> Vec<CMatrix> {
        self.loops.iter().map(|l| from_rows(&l.matrix)).collect()
    }

    pub fn reduced_matrices(&self) -> Vec<CMatrix> {
        self.loops.iter().map(|l| from_rows(&l.reduced)).collect()
    }
}

fn from_rows(rows: &Rows) -> CMatrix {
    let r = rows.len();
    let c = rows.first().map_or(0, Vec::len);
    CMatrix::from_fn(r, c, |i, j| rows[i][j])
}

/// Ordered product `M_∞ M_k ⋯ M_1` of transports listed in composition order
/// with `∞` last.
pub fn ordered_product(ms: &[CMatrix]) -> CMatrix {
    let size = ms[0].nrows();
    ms.iter().fold(identity(size), |acc, m| m * acc)
}

pub fn ordered_product_precise(ms: &[DdMatrix]) -> DdMatrix {
    let size = ms[0].nrows();
    ms.iter().fold(dd_identity(size), |acc, m| m * acc)
}

pub fn monodromy_report(a: &DNMatrix, cfg: &MonodromyConfig) -> Result<MonodromyReport, MonodromyError> {
    let n = a.n();
    let spec = eigendecompose(a, cfg.tol_spectral)?;
    let geometry = LoopGeometry::new(&spec.lambdas)?;
    let sys = PolynomialSystem::dn(a, &spec.lambdas);
    let transports = loop_transports(&sys, &geometry, cfg)?;
    let precise: Vec<DdMatrix> = transports.iter().map(|t| t.precise.clone()).collect();
    let ms: Vec<CMatrix> = transports.iter().map(|t| t.matrix.clone()).collect();
    let product_residual = dd_norm(&(ordered_product_precise(&precise) - dd_identity(n + 1)));
    let reduced_precise: Vec<DdMatrix> = precise.iter().map(|m| reduce_precise(m, cfg.tol_mono)).collect::<Result<_, _>>()?;
    let reduced: Vec<CMatrix> = reduced_precise.iter().map(to_f64).collect();
    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
    let (fin, rfin) = (&ms[..n + 1], &reduced[..n + 1]);
    let polarization = solve_polarization_precise(&reduced_precise, cfg.tol_mono);
    Ok(MonodromyReport {
        n,
        lambdas: spec.lambdas.clone(),
        base_point: geometry.base_point,
        ordering: geometry.ordering.to_string(),
        loops: transports
            .iter()
            .zip(&reduced)
            .map(|(t, r)| LoopReport {
                center: t.lp.center,
                radius: t.lp.radius,
                clearance: t.lp.clearance(&spec.lambdas),
                steps: t.steps,
                global_error: t.global_error,
                matrix: to_rows(&t.matrix),
                reduced: to_rows(r),
            })
            .collect(),
        product_residual,
        finite_checks: fin.iter().map(|m| pseudoreflection_check(m, sign, cfg.tol_mono)).collect(),
        infinity_check: unipotency_check_precise(&precise[n + 1], cfg.tol_mono),
        reduced_finite_checks: rfin.iter().map(|m| pseudoreflection_check(m, sign, cfg.tol_mono)).collect(),
        reduced_infinity_check: unipotency_check_precise(&reduced_precise[n + 1], cfg.tol_mono),
        polarization,
        max_global_error: transports.iter().filter_map(|t| t.global_error).fold(0.0, f64::max),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{c64, norm};
    use crate::random;

    fn flip() -> DNMatrix {
        DNMatrix::from_int_rows(&[&[0, 1], &[1, 0]])
    }

    #[test]
    fn closed_form_along_the_real_axis() {
        // column 1: (0, √((b²−1)/(t²−1))); column 0: (1, (acosh b − acosh t)/√(t²−1))
        let a = flip();
        let sys = PolynomialSystem::dn(&a, &[c64(-1.0, 0.0), c64(1.0, 0.0)]);
        let (b, t) = (2.0f64, 3.5f64);
        let path = vec![Segment::Line { from: c64(b, 0.0), to: c64(t, 0.0) }];
        let s = (t * t - 1.0).sqrt();
        for integrator in [Integrator::TaylorSeries, Integrator::EmbeddedPair] {
            let cfg = MonodromyConfig { integrator, ..Default::default() };
            let (phi, _, err) = transport_loop(&sys, &path, &cfg).unwrap();
            let phi = to_f64(&phi);
            assert!(err.unwrap() < 1e-10);
            assert!((phi[(1, 1)] - c64(((b * b - 1.0) / (t * t - 1.0)).sqrt(), 0.0)).norm() < 1e-11);
            assert!((phi[(1, 0)] - c64((b.acosh() - t.acosh()) / s, 0.0)).norm() < 1e-11);
            assert!((phi[(0, 0)] - c64(1.0, 0.0)).norm() < 1e-14 && phi[(0, 1)].norm() < 1e-14);
        }
    }

    #[test]
    fn contractible_loop_is_trivial() {
        let a = flip();
        let sys = PolynomialSystem::dn(&a, &[c64(-1.0, 0.0), c64(1.0, 0.0)]);
        let path = vec![Segment::Arc { center: c64(0.0, 3.0), radius: 1.0, start: 0.0, sweep: 2.0 * std::f64::consts::PI }];
        let (phi, _) = series_transport(&sys, &path, STEP_RATIO).unwrap();
        assert!(dd_norm(&(phi - dd_identity(2))) < 1e-28);
        let rk = continue_solution(&sys.rhs(), &path, 2, 1e-12, false).unwrap().phi;
        assert!(norm(&(rk - identity(2))) < 1e-8);
    }

    #[test]
    fn two_by_two_example() {
        let cfg = MonodromyConfig::default();
        let r = monodromy_report(&flip(), &cfg).unwrap();
        assert!(r.all_ok(1e-6), "{r:#?}");
        for m in r.reduced_matrices().iter().take(2) {
            assert!((m[(0, 0)] - c64(-1.0, 0.0)).norm() < 1e-8);
        }
        assert!((r.reduced_matrices()[2][(0, 0)] - c64(1.0, 0.0)).norm() < 1e-8);
        assert_eq!(r.polarization.dimension, 1);
        assert_eq!(r.polarization.symmetry, Symmetry::Symmetric);
        let local = local_monodromy(&flip(), LoopTarget::Infinity, &cfg).unwrap();
        assert!(unipotency_check(&local, 1e-6).passed);
    }

    #[test]
    fn random_symmetric_samples() {
        let mut rng = random::rng(5);
        let cfg = MonodromyConfig::default();
        for n in 2..=3 {
            let a = random::symmetric_diagonalizable(&mut rng, n, 0.3);
            let r = monodromy_report(&a, &cfg).unwrap();
            assert!(r.all_ok(1e-6), "n = {n}: {r:#?}");
            assert_eq!(r.polarization.dimension, 1);
            let want = if n % 2 == 0 { Symmetry::Skew } else { Symmetry::Symmetric };
            assert_eq!(r.polarization.symmetry, want);
        }
    }

    #[test]
    fn reduce_rejects_a_bad_first_row() {
        let m = CMatrix::from_row_slice(2, 2, &[c64(1.0, 0.0), c64(0.5, 0.0), c64(0.0, 0.0), c64(1.0, 0.0)]);
        assert!(matches!(reduce(&m, 1e-6), Err(MonodromyError::QuotientIllConditioned { .. })));
    }
}
