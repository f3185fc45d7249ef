//! DN operators: construction from a matrix, reconstruction, the symmetry
//! and adjoint tests, and the passage between the `t` and `w = 1/t` charts.
//!
//! With `Ã_ij = a_ij ∂^(j−i+1)` the operator is
//! `L_A = det_right(t∂·I − Ã)·∂^(−1)`. Its canonical form
//! `(t∂)^n t + Σ g_p(t∂) ∂^(p−1)` carries the same information as the
//! abstract expansion `(uu*)^(n+1) + Σ_p Σ_k x^(p)_k u^p (uu*)^k` of
//! `det_right(uu*·I − Ã)` in the `u ↦ X, u* ↦ Y` model, through
//!
//! ```text
//! [θ^k] g_p(L_{B^τ}) = (−1)^(n+k+p−1) · x^(p)_k(B).
//! ```
//!
//! Note the `τ`: the sign dictionary pairs the coefficients of `L_A` with the
//! expansion of `A^τ`, not of `A`. Reconstruction therefore solves for
//! `B = A^τ` and reflects at the end.

mod fuchs;
mod matrix;
mod residues;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::detright::{detright_forward, AlmostTriangularMatrix};
use crate::linalg::QMatrix;
use crate::numeric::RootError;
use crate::poly::Poly;
use crate::scalar::GaussRational;
use crate::weyl::{to_canonical, CanonicalDN, WeylElement, WeylError};

pub use fuchs::{fuchs_test, FuchsReport, PointClass};
pub use matrix::{DNMatrix, EntryKind, MatrixError};
pub use residues::{residues, FiniteResidue, RationalFunction, ResidueReport};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DnError {
    #[error(transparent)]
    Weyl(#[from] WeylError),
    #[error("internal failure: {0}")]
    Internal(String),
    #[error("K^({p}) solve failed")]
    SingularSolve { p: usize },
    #[error("leading coefficient has a repeated root")]
    RepeatedSingularity,
    #[error("operator has order {order}, expected {n}")]
    WrongOrder { order: usize, n: usize },
    #[error(transparent)]
    Roots(#[from] RootError),
}

fn sign(e: usize) -> GaussRational {
    GaussRational::sign_pow(e as i64)
}

/// `t∂·I − Ã` in the `t`-chart.
pub fn operator_matrix(a: &DNMatrix) -> AlmostTriangularMatrix {
    AlmostTriangularMatrix::from_upper(a.size(), |i, j| {
        let entry = WeylElement::monomial(-a.upper(i, j).clone(), 0, (j - i + 1) as u32);
        if i == j {
            &WeylElement::theta() + &entry
        } else {
            entry
        }
    })
}

pub fn build_l_infinity(a: &DNMatrix) -> Result<WeylElement, DnError> {
    detright_forward(&operator_matrix(a))
        .right_divide_by_x()
        .map_err(|e| DnError::Internal(format!("determinant not divisible by ∂: {e}")))
}

/// Canonical `{g_p}` of `L_A`.
pub fn canonical_form(a: &DNMatrix) -> Result<CanonicalDN, DnError> {
    Ok(to_canonical(&build_l_infinity(a)?, a.n())?)
}

/// `g_p(x) = (−1)^(n−p+1) g_p(−x−p)` for every `p`. The same equation
/// characterizes the symmetric `G_p` of the `w`-chart.
pub fn check_symmetry(c: &CanonicalDN) -> bool {
    let n = c.order();
    (1..=n + 1).all(|p| {
        let g = c.g(p);
        let reflected = g.compose_affine(&-GaussRational::one(), &GaussRational::from_int(-(p as i64))).scale(&sign(n + 1 - p));
        *g == reflected
    })
}

/// `L^∨ = (−1)^n L`.
pub fn check_adjoint(l: &WeylElement, n: usize) -> bool {
    l.adjoint() == l.scale(&sign(n))
}

/// `K^(p)_(k,i)` = coefficient of `(uu*)^k` in `−u^p (uu* − p)^(n+1−p−i) (uu*)^i`
/// after moving `u^p` to the left, i.e. of `s^k` in `−(s−p)^(n+1−p−i) s^i`.
pub fn k_matrix(n: usize, p: usize) -> QMatrix {
    assert!((1..=n + 1).contains(&p), "p = {p} outside 1..={}", n + 1);
    let m = n + 2 - p;
    let shifted = Poly::from_coeffs(vec![GaussRational::from_int(-(p as i64)), GaussRational::one()]);
    let cols: Vec<Poly> = (0..m).map(|i| -&(&shifted.pow((m - 1 - i) as u32) * &Poly::x().pow(i as u32))).collect();
    QMatrix::from_fn(m, m, |k, i| cols[i].coeff(k))
}

/// `x^(p)_k` from the abstract expansion of `det_right(uu*·I − Ã)` with
/// `u = X`, `u* = Y`; entry `[p−1][k]`. The grade `p` slice is `h_p(θ) X^p`
/// and `u^p (uu*)^k = (θ+1+p)^k X^p`, so `Σ_k x_k s^k = h_p(s−1−p)`.
pub fn abstract_expansion(a: &DNMatrix) -> Result<Vec<Vec<GaussRational>>, DnError> {
    let n = a.n();
    let uu = &WeylElement::x() * &WeylElement::y();
    let m = AlmostTriangularMatrix::from_upper(a.size(), |i, j| {
        let entry = WeylElement::monomial(-a.upper(i, j).clone(), 0, (j - i + 1) as u32);
        if i == j {
            &uu + &entry
        } else {
            entry
        }
    });
    let det = detright_forward(&m);
    if det.grades().iter().any(|&g| g < 0 || g > n as i64 + 1) {
        return Err(DnError::Internal("expansion has grades outside 0..=n+1".into()));
    }
    let top = Poly::from_coeffs(vec![GaussRational::one(), GaussRational::one()]).pow(n as u32 + 1);
    if det.grade_slice(0).to_theta() != Some(top) {
        return Err(DnError::Internal("grade 0 part differs from (uu*)^(n+1)".into()));
    }
    let mut out = Vec::with_capacity(n + 1);
    for p in 1..=n + 1 {
        let slice = det.grade_slice(p as i64);
        let mut falling = Vec::new();
        for (&(y, _), c) in slice.terms() {
            if falling.len() <= y as usize {
                falling.resize(y as usize + 1, GaussRational::zero());
            }
            falling[y as usize] = c.clone();
        }
        let h = Poly::from_falling_basis(&falling);
        let q = h.compose_affine(&GaussRational::one(), &GaussRational::from_int(-1 - p as i64));
        out.push((0..=n + 1 - p).map(|k| q.coeff(k)).collect());
    }
    Ok(out)
}

/// The sign dictionary: `x^(p)_k = (−1)^(n+k+p−1) [θ^k] g_p`.
pub fn expansion_from_canonical(c: &CanonicalDN) -> Vec<Vec<GaussRational>> {
    let n = c.order();
    (1..=n + 1).map(|p| (0..=n + 1 - p).map(|k| &c.g(p).coeff(k) * &sign(n + k + p - 1)).collect()).collect()
}

/// The matrix `A` with `L_A = from_canonical(c)`.
///
/// Antidiagonal by antidiagonal: the degree `p` coefficients depend only on
/// entries `b_ij` with `j−i+1 ≤ p`, and linearly on those with equality
/// through `K^(p)`.
pub fn reconstruct(c: &CanonicalDN) -> Result<DNMatrix, DnError> {
    let n = c.order();
    let target = expansion_from_canonical(c);
    let mut b = DNMatrix::zeros(n);
    for p in 1..=n + 1 {
        let current = expansion_from_canonical(&canonical_form(&b.tau())?);
        let rhs: Vec<GaussRational> = target[p - 1].iter().zip(&current[p - 1]).map(|(t, x)| t - x).collect();
        let sol = k_matrix(n, p).solve(&rhs).ok_or(DnError::SingularSolve { p })?;
        for (i, v) in sol.into_iter().enumerate() {
            b.set(i, i + p - 1, v);
        }
    }
    Ok(b.tau())
}

/// Reconstructs from an operator given in expanded form.
pub fn reconstruct_operator(l: &WeylElement, n: usize) -> Result<DNMatrix, DnError> {
    reconstruct(&to_canonical(l, n)?)
}

/// `G_p(x) = (−1)^(n−p+1) g_p(−x−p)`. The map is an involution, so it also
/// converts `{G_p}` back to `{g_p}`.
pub fn to_dn0(c: &CanonicalDN) -> CanonicalDN {
    let n = c.order();
    let g = (1..=n + 1)
        .map(|p| c.g(p).compose_affine(&-GaussRational::one(), &GaussRational::from_int(-(p as i64))).scale(&sign(n + 1 - p)))
        .collect();
    CanonicalDN::new(n, g).expect("the substitution preserves degrees")
}

pub fn from_dn0(big_g: &CanonicalDN) -> CanonicalDN {
    to_dn0(big_g)
}

/// `(wD)^n + Σ w^p G_p(wD) ∏_(l=1)^(p−1) (wD+l)` with `Y = w`, `X = ∂w`.
pub fn assemble_dn0(big_g: &CanonicalDN) -> WeylElement {
    let n = big_g.order();
    let theta = WeylElement::theta();
    let mut l = theta.pow(n as u32);
    for p in 1..=n + 1 {
        let mut prod = Poly::one();
        for k in 1..p {
            prod = &prod * &Poly::from_coeffs(vec![GaussRational::from_int(k as i64), GaussRational::one()]);
        }
        let term = &WeylElement::y().pow(p as u32) * &WeylElement::from_theta(&(big_g.g(p) * &prod));
        l = &l + &term;
    }
    l
}

/// Reads `{G_p}` off a `w`-chart operator of the assembled shape.
pub fn to_canonical_dn0(l: &WeylElement, n: usize) -> Result<CanonicalDN, DnError> {
    for g in l.grades() {
        if g > 0 || g < -(n as i64) - 1 {
            return Err(WeylError::MalformedOperator(format!("grade {g} outside -{}..=0", n + 1)).into());
        }
    }
    let head = l.grade_slice(0).to_theta().expect("grade 0 slice");
    if head != Poly::x().pow(n as u32) {
        return Err(WeylError::MalformedOperator(format!("grade 0 part is not (w∂w)^{n}")).into());
    }
    let mut g = Vec::with_capacity(n + 1);
    for p in 1..=n + 1 {
        // grade −p slice is Y^p f(θ) with f = G_p · ∏(θ+l)
        let slice = l.grade_slice(-(p as i64));
        let mut falling = Vec::new();
        for (&(y, x), c) in slice.terms() {
            let k = x as usize;
            debug_assert_eq!(y as usize, k + p);
            if falling.len() <= k {
                falling.resize(k + 1, GaussRational::zero());
            }
            falling[k] = c.clone();
        }
        // Y^(k+p) X^k = Y^p θ^(k falling)
        let f = Poly::from_falling_basis(&falling);
        let mut prod = Poly::one();
        for k in 1..p {
            prod = &prod * &Poly::from_coeffs(vec![GaussRational::from_int(k as i64), GaussRational::one()]);
        }
        let gp = f.exact_div(&prod).ok_or_else(|| WeylError::MalformedOperator(format!("grade -{p} part lacks the factor ∏(w∂w+l)")))?;
        g.push(gp);
    }
    Ok(CanonicalDN::new(n, g)?)
}

/// `L_{A,0} = (wD)^n + Σ (−1)^n g_p(−wD) (−w²∂w)^(p−1) w`, the direct form
/// obtained by substituting `t = 1/w`.
pub fn l_a_zero(c: &CanonicalDN) -> WeylElement {
    let n = c.order();
    let theta = WeylElement::theta();
    let minus_w2d = -&(&WeylElement::y().pow(2) * &WeylElement::x());
    let mut l = theta.pow(n as u32);
    for p in 1..=n + 1 {
        let gp = c.g(p).compose_affine(&-GaussRational::one(), &GaussRational::zero()).scale(&sign(n));
        let term = &(&WeylElement::from_theta(&gp) * &minus_w2d.pow(p as u32 - 1)) * &WeylElement::y();
        l = &l + &term;
    }
    l
}

/// The adjoint condition in the `w`-chart. With `∨` taken in
/// `ℚ(i)[w, ∂w]` (fixing `w`, negating `∂w`) it reads `w L^∨ = (−1)^n L w`;
/// the anti-involution of the `t`-chart transported to `w` is conjugation of
/// this one by `w²`, which turns it into `L^∨ = (−1)^n w L w^(−1)`.
pub fn check_adjoint_dn0(l: &WeylElement, n: usize) -> bool {
    let w = WeylElement::y();
    &w * &l.adjoint() == (l * &w).scale(&sign(n))
}

/// `w^(n+1) · L(t = 1/w)`, which has polynomial coefficients when the
/// coefficients of `L` have degree at most `n + 1`.
pub fn substitute_inverse(l: &WeylElement, n: usize) -> WeylElement {
    let minus_w2d = -&(&WeylElement::y().pow(2) * &WeylElement::x());
    let mut out = WeylElement::zero();
    for (k, ck) in l.coefficient_polys().iter().enumerate() {
        let mut rev = vec![GaussRational::zero(); n + 2];
        for (i, c) in ck.coeffs().iter().enumerate() {
            assert!(i <= n + 1, "coefficient degree above n + 1");
            rev[n + 1 - i] = c.clone();
        }
        out = &out + &(&WeylElement::from_coefficient_polys(&[Poly::from_coeffs(rev)]) * &minus_w2d.pow(k as u32));
    }
    out
}

/// Leading coefficient check used by callers that accept raw operators.
pub fn operator_order(l: &WeylElement) -> usize {
    l.order().unwrap_or(0) as usize
}
