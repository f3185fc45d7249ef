//! Taylor-series transport in double-double arithmetic for systems
//! `p(z)Φ′ = Q(z)Φ` with scalar polynomial `p` and matrix polynomial `Q`.
//!
//! Each step re-expands `p` and `Q` at the current point and sums the series
//! of `Φ` to double-double precision. Steps are capped at a fixed fraction
//! of the distance to the nearest zero of `p`, so the series converges
//! geometrically and the arc of the path covered by a step stays inside the
//! disc of convergence.

use num_complex::Complex64;
use num_traits::Zero;

use super::integrator::Segment;
use super::MonodromyError;
use crate::dn::DNMatrix;
use crate::numeric::dd::{dd, dd_identity, dd_norm, dd_real, gauss_to_dd, recip_complex, rounded, DdComplex, DdMatrix};
use crate::numeric::CMatrix;
use crate::spectral::adjugate_pencil;

/// Step length as a fraction of the distance to the nearest singularity.
pub const STEP_RATIO: f64 = 0.35;
/// Step ratio of the cross-check run.
pub const CHECK_RATIO: f64 = 0.2;
const TERM_TOL: f64 = 1e-32;
const MAX_TERMS: usize = 600;

#[derive(Clone, Debug)]
pub struct PolynomialSystem {
    size: usize,
    p: Vec<DdComplex>,
    q: Vec<DdMatrix>,
    singularities: Vec<Complex64>,
}

impl PolynomialSystem {
    /// `singularities` must contain every zero of `p`.
    pub fn new(p: Vec<DdComplex>, q: Vec<DdMatrix>, singularities: Vec<Complex64>) -> Self {
        let size = q.first().map_or(0, |m| m.nrows());
        PolynomialSystem { size, p, q, singularities }
    }

    /// `∂Φ = T(A − z)^(−1)Φ` written as `χ(z)Φ′ = −T adj(zI − A)Φ`, with
    /// `χ` and the adjugate exact before rounding to double-double.
    pub fn dn(a: &DNMatrix, lambdas: &[Complex64]) -> Self {
        let (chi, adj) = adjugate_pencil(a);
        let size = a.size();
        let p = chi.coeffs().iter().map(gauss_to_dd).collect();
        let q = adj.iter().map(|b| DdMatrix::from_fn(size, size, |i, j| -gauss_to_dd(b.get(i, j)) * dd_real(i as f64))).collect();
        PolynomialSystem::new(p, q, lambdas.to_vec())
    }

    /// Companion system of `(1 − u)D^n f = u Σ_(m<n) e_m D^m f` in
    /// `(f, Df, …, D^(n−1)f)`, where `D = u d/du` and
    /// `∏_k (x + k/(n+1)) = x^n + Σ e_m x^m`. Multiplied through by
    /// `u(1 − u)` it reads `u(1 − u)Y′ = ((1 − u)N + uE)Y` with `N` the
    /// shift and `E` the last row `e`.
    pub fn hprime(n: usize) -> Self {
        let mut e = vec![dd_real(1.0)];
        for k in 1..=n {
            let a = dd_real(k as f64) * recip_complex(dd_real((n + 1) as f64));
            let mut next = vec![DdComplex::zero(); e.len() + 1];
            for (i, c) in e.iter().enumerate() {
                next[i] += a * c;
                next[i + 1] += c;
            }
            e = next;
        }
        let shift = DdMatrix::from_fn(n, n, |i, j| if j == i + 1 { dd_real(1.0) } else { DdComplex::zero() });
        let last = DdMatrix::from_fn(n, n, |i, j| if i + 1 == n { e[j] } else { DdComplex::zero() });
        let p = vec![DdComplex::zero(), dd_real(1.0), dd_real(-1.0)];
        let q = vec![shift.clone(), last - shift];
        PolynomialSystem::new(p, q, vec![Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)])
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn singularities(&self) -> &[Complex64] {
        &self.singularities
    }

    /// `Q(z)/p(z)`, evaluated in double-double and rounded.
    pub fn coefficient(&self, z: Complex64) -> Result<CMatrix, MonodromyError> {
        let z = dd(z);
        let p = self.p.iter().rev().fold(DdComplex::zero(), |acc, c| acc * z + c);
        if p.is_zero() {
            return Err(MonodromyError::Geometry(format!("evaluated at a singular point {}", rounded(z))));
        }
        let q = self.q.iter().rev().fold(DdMatrix::zeros(self.size, self.size), |acc, c| acc * z + c);
        let inv = recip_complex(p);
        Ok(q.map(|x| rounded(x * inv)))
    }

    /// The coefficient as a closure for the embedded-pair integrator.
    pub fn rhs(&self) -> impl Fn(Complex64) -> Result<CMatrix, MonodromyError> + Sync + '_ {
        move |z| self.coefficient(z)
    }

    fn distance_to_singularity(&self, z: Complex64) -> f64 {
        self.singularities.iter().map(|s| (s - z).norm()).fold(f64::INFINITY, f64::min)
    }

    /// `Φ(to)` from `Φ(from)`, with `h = to − from` formed in double-double.
    /// With `d_k = c_k h^k` and the coefficients of `p(from + h)` and
    /// `Q(from + h)` scaled to `p̂_i`, `Q̂_j`, the recurrence is
    /// `p̂_0 (m+1) d_(m+1) = h Σ_j Q̂_j d_(m−j) − Σ_(i≥1) p̂_i (m+1−i) d_(m+1−i)`.
    pub fn step(&self, phi: &DdMatrix, from: Complex64, to: Complex64) -> Result<DdMatrix, MonodromyError> {
        let (z, hd) = (dd(from), dd(to) - dd(from));
        let ps: Vec<DdComplex> = shift_coefficients(&self.p, z, DdComplex::zero()).into_iter().scan(dd_real(1.0), |hk, c| {
            let out = c * *hk;
            *hk *= hd;
            Some(out)
        }).collect();
        let zero = DdMatrix::zeros(self.size, self.size);
        // the extra factor h on Q̂ moves the h^(m+1) normalization onto Q
        let qs: Vec<DdMatrix> = shift_coefficients(&self.q, z, zero).into_iter().scan(hd, |hk, c| {
            let out = c * *hk;
            *hk *= hd;
            Some(out)
        }).collect();
        let inv_p0 = recip_complex(ps[0]);
        if !(inv_p0.re.is_valid() && inv_p0.im.is_valid()) {
            return Err(MonodromyError::Geometry(format!("series expanded at a singular point {from}")));
        }
        let mut d = vec![phi.clone()];
        let mut sum = phi.clone();
        let mut small = 0;
        for m in 0..MAX_TERMS {
            let mut acc = DdMatrix::zeros(self.size, self.size);
            for (j, qj) in qs.iter().enumerate().take(m + 1) {
                acc += qj * &d[m - j];
            }
            for (i, pi) in ps.iter().enumerate().skip(1).take(m + 1) {
                acc -= &d[m + 1 - i] * (*pi * dd_real((m + 1 - i) as f64));
            }
            let next = acc * (inv_p0 * recip_complex(dd_real((m + 1) as f64)));
            let size = dd_norm(&next);
            if !size.is_finite() {
                break;
            }
            sum += &next;
            d.push(next);
            small = if size <= TERM_TOL * dd_norm(&sum) { small + 1 } else { 0 };
            if small == 2 {
                return Ok(sum);
            }
        }
        Err(MonodromyError::SeriesDivergence { z: from, step: (to - from).norm() })
    }
}

/// Coefficients of `f(z + h)` in powers of `h` by repeated synthetic
/// division.
fn shift_coefficients<T>(coeffs: &[T], z: DdComplex, zero: T) -> Vec<T>
where
    T: Clone + std::ops::Add<Output = T> + std::ops::Mul<DdComplex, Output = T>,
{
    let mut c = coeffs.to_vec();
    let n = c.len();
    for k in 0..n {
        for i in (k..n - 1).rev() {
            c[i] = c[i].clone() + c[i + 1].clone() * z;
        }
    }
    if c.is_empty() {
        c.push(zero);
    }
    c
}

/// Transport of the identity along `path`, returning the result and the
/// number of steps.
pub fn series_transport(sys: &PolynomialSystem, path: &[Segment], ratio: f64) -> Result<(DdMatrix, usize), MonodromyError> {
    let mut phi = dd_identity(sys.size());
    let Some(first) = path.first() else {
        return Ok((phi, 0));
    };
    let mut z = first.start();
    let mut steps = 0;
    // joints are taken from the next segment so that rounding in arc
    // endpoints cannot open a gap; a closed path returns exactly to its start
    let last = path.len() - 1;
    let closing = path[last].end();
    let joint = |k: usize| match path.get(k + 1) {
        Some(next) => next.start(),
        None if (closing - first.start()).norm() <= 1e-9 * (1.0 + closing.norm()) => first.start(),
        None => closing,
    };
    for (k, seg) in path.iter().enumerate() {
        let length = seg.length();
        let mut s = 0.0;
        while s < 1.0 && length > 0.0 {
            let rho = sys.distance_to_singularity(z);
            if rho == 0.0 {
                return Err(MonodromyError::Geometry(format!("path meets a singularity at {z}")));
            }
            let s1 = (s + ratio * rho / length).min(1.0);
            let target = if s1 >= 1.0 { joint(k) } else { seg.point(s1) };
            phi = sys.step(&phi, z, target)?;
            z = target;
            s = s1;
            steps += 1;
        }
    }
    Ok((phi, steps))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::c64;
    use crate::numeric::dd::to_f64;
    use std::f64::consts::PI;

    #[test]
    fn shift_matches_binomial_expansion() {
        // (z + h)^2 at z = 3: 9 + 6h + h^2
        let c = shift_coefficients(&[dd_real(0.0), dd_real(0.0), dd_real(1.0)], dd_real(3.0), DdComplex::zero());
        let want = [9.0, 6.0, 1.0];
        for (a, b) in c.iter().zip(want) {
            assert_eq!(rounded(*a), c64(b, 0.0));
        }
    }

    #[test]
    fn logarithm_monodromy() {
        // zΦ′ = [[0,0],[1,0]]Φ: Φ = [[1,0],[log z − log z0, 1]]
        let n = DdMatrix::from_fn(2, 2, |i, j| if i == 1 && j == 0 { dd_real(1.0) } else { DdComplex::zero() });
        let sys = PolynomialSystem::new(vec![DdComplex::zero(), dd_real(1.0)], vec![n], vec![c64(0.0, 0.0)]);
        let path = vec![Segment::Arc { center: c64(0.0, 0.0), radius: 1.0, start: 0.0, sweep: 2.0 * PI }];
        let (phi, steps) = series_transport(&sys, &path, STEP_RATIO).unwrap();
        assert!(steps > 10);
        let m = to_f64(&phi);
        assert!((m[(1, 0)] - c64(0.0, 2.0 * PI)).norm() < 1e-14);
        assert!((m[(0, 0)] - c64(1.0, 0.0)).norm() < 1e-15);
        // the imaginary part carries double-double digits of 2π
        let err = phi[(1, 0)].im - twofloat::TwoFloat::from(2.0) * twofloat::consts::PI;
        assert!(f64::from(err).abs() < 1e-28, "{err:?}");
    }

    #[test]
    fn coefficient_agrees_with_the_connection() {
        let a = DNMatrix::from_int_rows(&[&[0, 1], &[1, 0]]);
        let sys = PolynomialSystem::dn(&a, &[c64(-1.0, 0.0), c64(1.0, 0.0)]);
        let z = c64(0.3, 0.7);
        let direct = CMatrix::from_fn(2, 2, |i, _| c64(i as f64, 0.0)).component_mul(&(a.to_complex() - CMatrix::identity(2, 2) * z).try_inverse().unwrap());
        assert!(crate::numeric::norm(&(sys.coefficient(z).unwrap() - direct)) < 1e-15);
        assert!(sys.coefficient(c64(1.0, 0.0)).is_err());
    }
}
