//! Dense univariate polynomials over the Gaussian rationals.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use num_traits::{One, Zero};

use crate::scalar::GaussRational;

/// Coefficients low to high; the zero polynomial has no coefficients and the
/// leading coefficient of any other polynomial is nonzero.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    coeffs: Vec<GaussRational>,
}

/// A polynomial in `θ = t∂t` (or `w∂w`), as used by the canonical DN forms.
pub type ThetaPolynomial = Poly;

impl Poly {
    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(GaussRational::one())
    }

    pub fn x() -> Self {
        Self::monomial(GaussRational::one(), 1)
    }

    pub fn constant(c: GaussRational) -> Self {
        Self::from_coeffs(vec![c])
    }

    pub fn monomial(c: GaussRational, k: usize) -> Self {
        let mut v = vec![GaussRational::zero(); k + 1];
        v[k] = c;
        Self::from_coeffs(v)
    }

    pub fn from_coeffs(mut coeffs: Vec<GaussRational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn from_ints(v: &[i64]) -> Self {
        Self::from_coeffs(v.iter().map(|&c| GaussRational::from_int(c)).collect())
    }

    /// `∏ (x - r)` over the given roots.
    pub fn from_roots(roots: &[GaussRational]) -> Self {
        roots.iter().fold(Poly::one(), |acc, r| &acc * &Poly::from_coeffs(vec![-r, GaussRational::one()]))
    }

    pub fn coeffs(&self) -> &[GaussRational] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> GaussRational {
        self.coeffs.get(k).cloned().unwrap_or_else(GaussRational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> GaussRational {
        self.coeffs.last().cloned().unwrap_or_else(GaussRational::zero)
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn eval(&self, x: &GaussRational) -> GaussRational {
        let mut acc = GaussRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * x) + c;
        }
        acc
    }

    pub fn eval_complex(&self, z: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for c in self.coeffs.iter().rev() {
            acc = acc * z + c.to_complex();
        }
        acc
    }

    pub fn to_complex_coeffs(&self) -> Vec<Complex64> {
        self.coeffs.iter().map(|c| c.to_complex()).collect()
    }

    pub fn scale(&self, c: &GaussRational) -> Self {
        Self::from_coeffs(self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn derivative(&self) -> Self {
        Self::from_coeffs(self.coeffs.iter().enumerate().skip(1).map(|(k, c)| c.scale(k as i64)).collect())
    }

    pub fn pow(&self, e: u32) -> Self {
        (0..e).fold(Poly::one(), |acc, _| &acc * self)
    }

    /// `P(a·x + b)`.
    pub fn compose_affine(&self, a: &GaussRational, b: &GaussRational) -> Self {
        let lin = Poly::from_coeffs(vec![b.clone(), a.clone()]);
        let mut acc = Poly::zero();
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * &lin) + &Poly::constant(c.clone());
        }
        acc
    }

    pub fn compose(&self, inner: &Poly) -> Self {
        let mut acc = Poly::zero();
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * inner) + &Poly::constant(c.clone());
        }
        acc
    }

    pub fn monic(&self) -> Self {
        match self.leading().inv() {
            Some(inv) => self.scale(&inv),
            None => Poly::zero(),
        }
    }

    /// Euclidean division; panics on a zero divisor.
    pub fn div_rem(&self, d: &Poly) -> (Poly, Poly) {
        let dd = d.degree().expect("polynomial division by zero");
        let lead_inv = d.leading().inv().expect("nonzero leading coefficient");
        let mut rem = self.coeffs.clone();
        let n = self.coeffs.len();
        if n <= dd {
            return (Poly::zero(), self.clone());
        }
        let mut quot = vec![GaussRational::zero(); n - dd];
        for k in (0..n - dd).rev() {
            let q = &rem[k + dd] * &lead_inv;
            if q.is_zero() {
                continue;
            }
            for (i, dc) in d.coeffs.iter().enumerate() {
                let t = &q * dc;
                rem[k + i] -= &t;
            }
            quot[k] = q;
        }
        rem.truncate(dd);
        (Poly::from_coeffs(quot), Poly::from_coeffs(rem))
    }

    /// Exact quotient when `d` divides `self`.
    pub fn exact_div(&self, d: &Poly) -> Option<Poly> {
        let (q, r) = self.div_rem(d);
        r.is_zero().then_some(q)
    }

    /// Monic gcd (zero only when both inputs are zero).
    pub fn gcd(&self, other: &Poly) -> Poly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.div_rem(&b).1;
            a = b;
            b = r.monic();
        }
        a.monic()
    }

    /// Inverse of `self` modulo `m`, if they are coprime.
    pub fn inverse_mod(&self, m: &Poly) -> Option<Poly> {
        // extended Euclid tracking only the coefficient of `self`
        let (mut r0, mut r1) = (m.clone(), self.div_rem(m).1);
        let (mut s0, mut s1) = (Poly::zero(), Poly::one());
        while !r1.is_zero() {
            let (q, r) = r0.div_rem(&r1);
            let s = &s0 - &(&q * &s1);
            r0 = r1;
            r1 = r;
            s0 = s1;
            s1 = s;
        }
        if r0.degree() != Some(0) {
            return None;
        }
        let inv = r0.leading().inv()?;
        Some(s0.scale(&inv).div_rem(m).1)
    }

    pub fn is_squarefree(&self) -> bool {
        match self.degree() {
            None => false,
            Some(0) => true,
            Some(_) => self.gcd(&self.derivative()).degree() == Some(0),
        }
    }

    /// Yun's square-free decomposition: monic `(factor, multiplicity)` pairs
    /// with pairwise coprime squarefree factors, `self = lc · ∏ factorᵐ`.
    pub fn squarefree_decomposition(&self) -> Vec<(Poly, usize)> {
        let mut out = Vec::new();
        if self.degree().unwrap_or(0) == 0 {
            return out;
        }
        let f = self.monic();
        let df = f.derivative();
        let a0 = f.gcd(&df);
        let mut b = f.exact_div(&a0).expect("gcd divides");
        let c = df.exact_div(&a0).expect("gcd divides");
        let mut d = &c - &b.derivative();
        let mut mult = 1;
        while b.degree().unwrap_or(0) > 0 {
            let a = b.gcd(&d);
            let nb = b.exact_div(&a).expect("gcd divides");
            let nc = d.exact_div(&a).expect("gcd divides");
            if a.degree().unwrap_or(0) > 0 {
                out.push((a, mult));
            }
            d = &nc - &nb.derivative();
            b = nb;
            mult += 1;
        }
        out
    }

    /// Falling factorial `x(x-1)⋯(x-a+1)`.
    pub fn falling_factorial(a: usize) -> Poly {
        (0..a).fold(Poly::one(), |acc, k| &acc * &Poly::from_coeffs(vec![GaussRational::from_int(-(k as i64)), GaussRational::one()]))
    }

    /// Converts `Σ c_a · x^(a falling)` to the power basis.
    pub fn from_falling_basis(c: &[GaussRational]) -> Poly {
        let mut acc = Poly::zero();
        let mut ff = Poly::one();
        for (a, ca) in c.iter().enumerate() {
            if !ca.is_zero() {
                acc = &acc + &ff.scale(ca);
            }
            ff = &ff * &Poly::from_coeffs(vec![GaussRational::from_int(-(a as i64)), GaussRational::one()]);
        }
        acc
    }

    /// Coefficients of `self` in the falling-factorial basis `x^(a falling)`.
    pub fn to_falling_basis(&self) -> Vec<GaussRational> {
        // peel the top power off with successive divisions by (x - a)
        let mut out = Vec::with_capacity(self.coeffs.len());
        let mut rest = self.clone();
        let mut a = 0i64;
        while !rest.is_zero() {
            let lin = Poly::from_coeffs(vec![GaussRational::from_int(-a), GaussRational::one()]);
            let (q, r) = rest.div_rem(&lin);
            out.push(r.coeff(0));
            rest = q;
            a += 1;
        }
        while out.last().is_some_and(|c| c.is_zero()) {
            out.pop();
        }
        out
    }
}

impl Add<&Poly> for &Poly {
    type Output = Poly;
    fn add(self, o: &Poly) -> Poly {
        let n = self.coeffs.len().max(o.coeffs.len());
        Poly::from_coeffs((0..n).map(|k| &self.coeff(k) + &o.coeff(k)).collect())
    }
}

impl Sub<&Poly> for &Poly {
    type Output = Poly;
    fn sub(self, o: &Poly) -> Poly {
        let n = self.coeffs.len().max(o.coeffs.len());
        Poly::from_coeffs((0..n).map(|k| &self.coeff(k) - &o.coeff(k)).collect())
    }
}

impl Mul<&Poly> for &Poly {
    type Output = Poly;
    fn mul(self, o: &Poly) -> Poly {
        if self.is_zero() || o.is_zero() {
            return Poly::zero();
        }
        let mut v = vec![GaussRational::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                v[i + j] += &(a * b);
            }
        }
        Poly::from_coeffs(v)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly { coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| match k {
                0 => format!("{c}"),
                1 => format!("{c}·x"),
                _ => format!("{c}·x^{k}"),
            })
            .collect();
        write!(f, "{}", terms.join(" + "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(v: &[i64]) -> Poly {
        Poly::from_ints(v)
    }

    #[test]
    fn division_and_gcd() {
        let a = &p(&[-1, 1]) * &p(&[2, 1]);
        let b = &p(&[-1, 1]) * &p(&[5, 0, 1]);
        assert_eq!(a.gcd(&b), p(&[-1, 1]));
        let (q, r) = b.div_rem(&p(&[-1, 1]));
        assert!(r.is_zero());
        assert_eq!(q, p(&[5, 0, 1]));
        assert_eq!(p(&[1, 0, 1]).gcd(&p(&[2])), Poly::one());
    }

    #[test]
    fn modular_inverse() {
        let m = p(&[-1, 0, 0, 1]);
        let a = p(&[3, 1]);
        let inv = a.inverse_mod(&m).unwrap();
        assert_eq!((&a * &inv).div_rem(&m).1, Poly::one());
        assert!(p(&[-1, 1]).inverse_mod(&m).is_none());
    }

    #[test]
    fn squarefree_parts() {
        // (x-1)^3 (x+2)^2 x
        let f = &(&p(&[-1, 1]).pow(3) * &p(&[2, 1]).pow(2)) * &p(&[0, 1]);
        let mut dec = f.squarefree_decomposition();
        dec.sort_by_key(|(_, m)| *m);
        assert_eq!(dec, vec![(p(&[0, 1]), 1), (p(&[2, 1]), 2), (p(&[-1, 1]), 3)]);
        assert!(!f.is_squarefree());
        assert!(p(&[-1, 0, 1]).is_squarefree());
    }

    #[test]
    fn falling_basis_round_trip() {
        let f = p(&[3, -1, 4, 1, -5]);
        let fb = f.to_falling_basis();
        assert_eq!(Poly::from_falling_basis(&fb), f);
        // x^2 = x(x-1) + x
        assert_eq!(p(&[0, 0, 1]).to_falling_basis(), vec![GaussRational::zero(), GaussRational::one(), GaussRational::one()]);
    }

    #[test]
    fn affine_composition() {
        // g(-x-1) for g = -2x - 1 is 2x + 1
        let g = p(&[-1, -2]);
        assert_eq!(g.compose_affine(&GaussRational::from_int(-1), &GaussRational::from_int(-1)), p(&[1, 2]));
    }
}
