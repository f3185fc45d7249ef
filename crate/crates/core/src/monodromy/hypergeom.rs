//! The operator `H = D^n − w^(n+1)(D+1)⋯(D+n)`, `D = w∂w`, its Kummer
//! quotient `H′ = D_u^n − u(D_u + 1/(n+1))⋯(D_u + n/(n+1))` with
//! `u = w^(n+1)`, and the series identity
//! `1 + Σ (U^i v, v) t^i = det(1 − tUS)/det(1 − tU)` for `S x = x − (x, v)v`.
//! Forms are bilinear, `(x, y) = x^t G y`.

use nalgebra::DVector;
use num_complex::Complex64;
use serde::Serialize;

use super::{loop_transports, ordered_product_precise, solve_polarization_precise, unipotency_check_precise, LoopCenter, LoopGeometry, PolynomialSystem, MonodromyConfig, MonodromyError, PolarizationForm, UnipotencyCheck};
use crate::dn::{check_adjoint_dn0, check_symmetry, from_dn0, reconstruct, to_canonical_dn0};
use crate::numeric::dd::{dd_identity, dd_norm, to_f64, DdMatrix};
use crate::numeric::{identity, norm, to_rows, CMatrix};
use crate::poly::Poly;
use crate::scalar::GaussRational;
use crate::weyl::WeylElement;

/// `H` in the `w`-chart (`Y = w`, `X = ∂w`).
pub fn hypergeom_operator(n: usize) -> WeylElement {
    let theta = Poly::x();
    let mut prod = Poly::one();
    for k in 1..=n as i64 {
        prod = &prod * &(&theta + &Poly::constant(GaussRational::from_int(k)));
    }
    &WeylElement::theta().pow(n as u32) - &(&WeylElement::y().pow(n as u32 + 1) * &WeylElement::from_theta(&prod))
}

#[derive(Clone, Debug, Serialize)]
pub struct HypergeomStructure {
    pub n: usize,
    /// `H` has the `DN_{0,0}` shape with `G_(n+1) = −1` and all other `G_p = 0`.
    pub dn00_form: bool,
    pub adjoint: bool,
    /// The reconstructed matrix satisfies `A = A^τ`.
    pub symmetric_matrix: bool,
    pub symmetry_check: bool,
    /// Characteristic polynomial of the reconstructed matrix, low to high.
    pub characteristic_polynomial: Vec<GaussRational>,
    /// Leading coefficient `w^n(1 − w^(n+1))` has `n + 1` distinct nonzero roots.
    pub distinct_singularities: bool,
}

impl HypergeomStructure {
    pub fn passed(&self) -> bool {
        self.dn00_form && self.adjoint && self.symmetric_matrix && self.symmetry_check && self.distinct_singularities
    }
}

pub fn hypergeom_structure(n: usize) -> HypergeomStructure {
    let h = hypergeom_operator(n);
    let big_g = to_canonical_dn0(&h, n).ok();
    let dn00_form = big_g.as_ref().is_some_and(|g| (1..=n).all(|p| g.g(p).is_zero()) && *g.g(n + 1) == Poly::constant(GaussRational::from_int(-1)));
    let (symmetric_matrix, symmetry_check, characteristic_polynomial) = match big_g.as_ref().map(from_dn0) {
        Some(c) => match reconstruct(&c) {
            Ok(a) => (a.is_symmetric(), check_symmetry(&c), a.characteristic_polynomial().coeffs().to_vec()),
            Err(_) => (false, false, Vec::new()),
        },
        None => (false, false, Vec::new()),
    };
    let lead = h.coefficient_polys()[n].clone();
    let (core, _) = lead.div_rem(&Poly::x().pow(n as u32));
    let distinct_singularities = core.degree() == Some(n + 1) && core.is_squarefree() && !num_traits::Zero::is_zero(&core.eval(&GaussRational::from_int(0)));
    HypergeomStructure { n, dn00_form, adjoint: check_adjoint_dn0(&h, n), symmetric_matrix, symmetry_check, characteristic_polynomial, distinct_singularities }
}

/// `S − I = −v v^t G^t`; returns `v` and the fit residual. `v` is determined
/// up to sign, which the brackets do not see.
pub fn reflection_vector(s: &CMatrix, g: &CMatrix) -> Option<(DVector<Complex64>, f64)> {
    let d = s.nrows();
    let r = s - identity(d);
    let col = (0..d).max_by(|&a, &b| r.column(a).norm().total_cmp(&r.column(b).norm()))?;
    let dir = r.column(col).into_owned();
    let w = &dir * (g * &dir).transpose();
    let ww: Complex64 = w.iter().map(|z| z.norm_sqr()).sum::<f64>().into();
    if ww.norm() == 0.0 {
        return None;
    }
    let wr: Complex64 = w.iter().zip(r.iter()).map(|(a, b)| a.conj() * b).sum();
    let beta = -wr / ww;
    let v = dir * beta.sqrt();
    let residual = norm(&(r + &v * (g * &v).transpose()));
    Some((v, residual))
}

/// `1, (Uv, v), (U²v, v), …` up to `t^order`.
pub fn bracket_series(u: &CMatrix, v: &DVector<Complex64>, g: &CMatrix, order: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(1.0, 0.0)];
    let gv = g * v;
    let mut x = v.clone();
    for _ in 1..=order {
        x = u * x;
        out.push(x.dot(&gv));
    }
    out
}

/// Series of `det(1 − tUS)/det(1 − tU)` to `t^order` through
/// `log det(1 − tM) = −Σ tr(M^k) t^k / k`.
pub fn rrv_series(u: &CMatrix, s: &CMatrix, order: usize) -> Vec<Complex64> {
    let us = u * s;
    let mut log = vec![Complex64::new(0.0, 0.0); order + 1];
    let (mut pu, mut pus) = (identity(u.nrows()), identity(u.nrows()));
    for (k, slot) in log.iter_mut().enumerate().skip(1) {
        pu = &pu * u;
        pus = &pus * &us;
        *slot = (pu.trace() - pus.trace()) / k as f64;
    }
    exp_series(&log)
}

/// `exp(g)` for `g(0) = 0`, from `f′ = g′f`.
fn exp_series(g: &[Complex64]) -> Vec<Complex64> {
    let mut f = vec![Complex64::new(1.0, 0.0)];
    for m in 1..g.len() {
        let s: Complex64 = (1..=m).map(|k| g[k] * f[m - k] * k as f64).sum();
        f.push(s / m as f64);
    }
    f
}

/// Coefficients of `det(1 − tM)`, low to high.
pub fn det_series(m: &CMatrix, order: usize) -> Vec<Complex64> {
    let mut log = vec![Complex64::new(0.0, 0.0); order + 1];
    let mut p = identity(m.nrows());
    for (k, slot) in log.iter_mut().enumerate().skip(1) {
        p = &p * m;
        *slot = -p.trace() / k as f64;
    }
    exp_series(&log)
}

#[derive(Clone, Debug, Serialize)]
pub struct RrvResult {
    pub order: usize,
    pub brackets: Vec<Complex64>,
    pub determinant_ratio: Vec<Complex64>,
    pub residual: f64,
    pub passed: bool,
}

pub fn rrv_check(u: &CMatrix, s: &CMatrix, v: &DVector<Complex64>, g: &CMatrix, order: usize, tol: f64) -> RrvResult {
    let brackets = bracket_series(u, v, g, order);
    let determinant_ratio = rrv_series(u, s, order);
    let residual = brackets.iter().zip(&determinant_ratio).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
    RrvResult { order, brackets, determinant_ratio, residual, passed: residual <= tol }
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

#[derive(Clone, Debug, Serialize)]
pub struct HprimeMonodromy {
    pub n: usize,
    /// Monodromy around `∞`.
    pub u: Vec<Vec<Complex64>>,
    /// Monodromy around `1`.
    pub s: Vec<Vec<Complex64>>,
    pub relation_residual: f64,
    /// `det(1 − tU)` against `1 + t + ⋯ + t^n`.
    pub u_spectrum_residual: f64,
    pub us_unipotency: UnipotencyCheck,
    pub polarization: PolarizationForm,
    pub reflection_residual: f64,
    /// `|(U^k v, v)|` for `k = 1..=n`.
    pub bracket_magnitudes: Vec<f64>,
    pub max_bracket_error: f64,
    pub rrv: RrvResult,
    pub max_global_error: f64,
}

impl HprimeMonodromy {
    pub fn passed(&self, tol_mono: f64, tol_rrv: f64) -> bool {
        self.max_bracket_error <= tol_mono && self.rrv.residual <= tol_rrv && self.polarization.dimension == 1 && self.relation_residual <= tol_mono
    }
}

pub fn hprime_monodromy(n: usize, cfg: &MonodromyConfig) -> Result<HprimeMonodromy, MonodromyError> {
    let one = Complex64::new(1.0, 0.0);
    let geometry = LoopGeometry::new(&[Complex64::new(0.0, 0.0), one])?;
    let transports = loop_transports(&PolynomialSystem::hprime(n), &geometry, cfg)?;
    let precise: Vec<DdMatrix> = transports.iter().map(|t| t.precise.clone()).collect();
    let relation_residual = dd_norm(&(ordered_product_precise(&precise) - dd_identity(n)));
    let pick = |c: LoopCenter| transports.iter().find(|t| t.lp.center == c).map(|t| t.precise.clone()).expect("loop present");
    let (u_precise, s_precise) = (pick(LoopCenter::Infinity), pick(LoopCenter::Finite(one)));
    let (u, s) = (to_f64(&u_precise), to_f64(&s_precise));
    let mut expected = vec![one; n + 1];
    expected.resize(n + 3, Complex64::new(0.0, 0.0));
    let u_spectrum_residual = det_series(&u, n + 2).iter().zip(&expected).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
    let polarization = solve_polarization_precise(&[u_precise.clone(), s_precise.clone()], cfg.tol_mono);
    let (v, reflection_residual) = reflection_vector(&s, &polarization.g).unwrap_or_else(|| (DVector::zeros(n), f64::INFINITY));
    let rrv = rrv_check(&u, &s, &v, &polarization.g, n + 2, 1e-8);
    let bracket_magnitudes: Vec<f64> = rrv.brackets[1..=n].iter().map(|z| z.norm()).collect();
    let max_bracket_error = bracket_magnitudes.iter().enumerate().map(|(i, m)| (m - binomial(n + 1, i + 1)).abs()).fold(0.0, f64::max);
    Ok(HprimeMonodromy {
        n,
        us_unipotency: unipotency_check_precise(&(&u_precise * &s_precise), cfg.tol_mono),
        u: to_rows(&u),
        s: to_rows(&s),
        relation_residual,
        u_spectrum_residual,
        polarization,
        reflection_residual,
        bracket_magnitudes,
        max_bracket_error,
        rrv,
        max_global_error: transports.iter().filter_map(|t| t.global_error).fold(0.0, f64::max),
    })
}
