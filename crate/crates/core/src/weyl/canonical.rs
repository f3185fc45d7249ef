//! The canonical θ-form `(t∂)^n t + Σ_{p=1}^{n+1} g_p(t∂) ∂^(p−1)`.
//!
//! Extraction works grade by grade: the grade `p−1` slice of such an operator
//! is exactly `g_p(θ) X^(p−1)`, and `Y^a X^(a+p−1) = θ^(a falling) X^(p−1)`.

use super::{WeylElement, WeylError};
use crate::poly::{Poly, ThetaPolynomial};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CanonicalDN {
    n: usize,
    /// `g[p-1]` holds `g_p`.
    g: Vec<ThetaPolynomial>,
}

impl CanonicalDN {
    /// Validates `deg g_p ≤ n − p + 1`; `g` must have `n + 1` entries.
    pub fn new(n: usize, g: Vec<ThetaPolynomial>) -> Result<Self, WeylError> {
        if g.len() != n + 1 {
            return Err(WeylError::MalformedOperator(format!("expected {} coefficient polynomials, got {}", n + 1, g.len())));
        }
        for (i, gp) in g.iter().enumerate() {
            let p = i + 1;
            let bound = n + 1 - p;
            if let Some(d) = gp.degree() {
                if d > bound {
                    return Err(WeylError::DegreeOverflow { p, degree: d, bound });
                }
            }
        }
        Ok(CanonicalDN { n, g })
    }

    pub fn order(&self) -> usize {
        self.n
    }

    /// `g_p` for `1 ≤ p ≤ n + 1`.
    pub fn g(&self, p: usize) -> &ThetaPolynomial {
        &self.g[p - 1]
    }

    pub fn all(&self) -> &[ThetaPolynomial] {
        &self.g
    }
}

/// Normal form of `(YX)^n Y`, the grade −1 block every canonical operator shares.
pub fn leading_block(n: usize) -> WeylElement {
    &WeylElement::theta().pow(n as u32) * &WeylElement::y()
}

pub fn to_canonical(l: &WeylElement, n: usize) -> Result<CanonicalDN, WeylError> {
    for g in l.grades() {
        if g < -1 || g > n as i64 {
            return Err(WeylError::MalformedOperator(format!("grade {g} outside -1..={n}")));
        }
    }
    if l.grade_slice(-1) != leading_block(n) {
        return Err(WeylError::MalformedOperator(format!("grade -1 part is not (t∂)^{n}·t")));
    }
    let mut g = Vec::with_capacity(n + 1);
    for p in 1..=n + 1 {
        let slice = l.grade_slice(p as i64 - 1);
        let top = slice.terms().map(|(m, _)| m.0).max().unwrap_or(0) as usize;
        let mut falling = vec![crate::scalar::GaussRational::default(); top + 1];
        for (&(a, _), c) in slice.terms() {
            falling[a as usize] = c.clone();
        }
        g.push(Poly::from_falling_basis(&falling));
    }
    CanonicalDN::new(n, g)
}

pub fn from_canonical(c: &CanonicalDN) -> WeylElement {
    let mut l = leading_block(c.n);
    for (i, gp) in c.g.iter().enumerate() {
        l = &l + &(&WeylElement::from_theta(gp) * &WeylElement::x().pow(i as u32));
    }
    l
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::GaussRational;

    fn m(c: i64, y: u32, x: u32) -> WeylElement {
        WeylElement::monomial(GaussRational::from_int(c), y, x)
    }

    #[test]
    fn example_operator_has_constant_g1() {
        // t^3 ∂^2 + 3 t^2 ∂ + t − 1
        let l = &(&m(1, 3, 2) + &m(3, 2, 1)) + &(&m(1, 1, 0) - &WeylElement::one());
        let c = to_canonical(&l, 2).unwrap();
        assert_eq!(c.g(1), &Poly::from_ints(&[-1]));
        assert!(c.g(2).is_zero() && c.g(3).is_zero());
        assert_eq!(from_canonical(&c), l);
    }

    #[test]
    fn order_zero() {
        let l = &WeylElement::y() - &WeylElement::constant(GaussRational::from_int(5));
        let c = to_canonical(&l, 0).unwrap();
        assert_eq!(c.g(1), &Poly::from_ints(&[-5]));
        assert_eq!(from_canonical(&c), l);
    }

    #[test]
    fn order_one_symmetric_example() {
        // (t∂)t − 2t∂ − 1 − ∂
        let l = &(&(&m(1, 2, 1) + &m(1, 1, 0)) - &m(2, 1, 1)) - &(&WeylElement::one() + &WeylElement::x());
        let c = to_canonical(&l, 1).unwrap();
        assert_eq!(c.g(1), &Poly::from_ints(&[-1, -2]));
        assert_eq!(c.g(2), &Poly::from_ints(&[-1]));
        assert_eq!(from_canonical(&c), l);
    }

    #[test]
    fn malformed_shapes() {
        // missing leading block
        assert!(matches!(to_canonical(&WeylElement::x(), 1), Err(WeylError::MalformedOperator(_))));
        // grade below −1
        let l = &leading_block(1) + &m(1, 2, 0);
        assert!(matches!(to_canonical(&l, 1), Err(WeylError::MalformedOperator(_))));
        // θ^2 in g_1 for n = 0
        let l = &leading_block(0) + &m(1, 2, 2);
        assert_eq!(to_canonical(&l, 0), Err(WeylError::DegreeOverflow { p: 1, degree: 2, bound: 0 }));
    }
}
