//! Regular/irregular classification of singular points by pole orders:
//! `p` is regular iff `ord_p(c_k/c_n) ≥ −(n−k)` for every `k < n`.

use num_complex::Complex64;
use num_traits::Zero;
use serde::Serialize;

use super::residues::coefficients;
use super::DnError;
use crate::numeric::aberth;
use crate::poly::Poly;
use crate::scalar::GaussRational;
use crate::weyl::WeylElement;

#[derive(Clone, Debug, Serialize)]
pub struct PointClass {
    pub point: Complex64,
    /// Multiplicity as a root of `c_n`.
    pub multiplicity: usize,
    pub regular: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct FuchsReport {
    pub finite: Vec<PointClass>,
    /// `None` when `∞` is an ordinary point.
    pub infinity: Option<PointClass>,
}

impl FuchsReport {
    pub fn is_fuchsian(&self) -> bool {
        self.finite.iter().all(|p| p.regular) && self.infinity.as_ref().is_none_or(|p| p.regular)
    }

    /// Classification of the finite point nearest to `z`, if within `tol`.
    pub fn at(&self, z: Complex64, tol: f64) -> Option<&PointClass> {
        self.finite.iter().find(|p| (p.point - z).norm() <= tol)
    }
}

/// Order of vanishing at `0`.
fn ord0(p: &Poly) -> Option<usize> {
    p.coeffs().iter().position(|c| !c.is_zero())
}

pub fn fuchs_test(l: &WeylElement, n: usize) -> Result<FuchsReport, DnError> {
    let cs = coefficients(l, n)?;
    let cn = &cs[n];

    let mut finite = Vec::new();
    for (factor, m) in cn.squarefree_decomposition() {
        if factor.degree().unwrap_or(0) == 0 {
            continue;
        }
        // roots of `regular` are the roots of `factor` where every c_k vanishes
        // to order ≥ m − (n − k)
        let mut regular = factor.clone();
        for (k, ck) in cs.iter().enumerate().take(n) {
            let need = (m + k).saturating_sub(n);
            let mut d = ck.clone();
            for _ in 0..need {
                regular = regular.gcd(&d);
                d = d.derivative();
            }
        }
        let irregular = factor.exact_div(&regular).expect("gcd divides");
        for (part, is_regular) in [(&regular, true), (&irregular, false)] {
            if part.degree().unwrap_or(0) == 0 {
                continue;
            }
            for z in aberth(&part.to_complex_coeffs(), 1e-15)? {
                finite.push(PointClass { point: z, multiplicity: m, regular: is_regular });
            }
        }
    }
    finite.sort_by(|a, b| (a.point.re, a.point.im).partial_cmp(&(b.point.re, b.point.im)).expect("finite"));

    // t = 1/w, ∂t = −w²∂w; multiply through by w^D to clear denominators
    let top = cs.iter().filter_map(Poly::degree).max().unwrap_or(0);
    let minus_w2d = -&(&WeylElement::y().pow(2) * &WeylElement::x());
    let mut lw = WeylElement::zero();
    for (k, ck) in cs.iter().enumerate() {
        let mut rev = vec![GaussRational::zero(); top + 1];
        for (i, c) in ck.coeffs().iter().enumerate() {
            rev[top - i] = c.clone();
        }
        let coeff = WeylElement::from_coefficient_polys(&[Poly::from_coeffs(rev)]);
        lw = &lw + &(&coeff * &minus_w2d.pow(k as u32));
    }
    let ws = lw.coefficient_polys();
    let m = ord0(&ws[n]).expect("leading coefficient is nonzero");
    let infinity = (m > 0).then(|| {
        let regular = (0..n).all(|k| ord0(&ws[k]).is_none_or(|o| o + n >= m + k));
        PointClass { point: Complex64::new(f64::INFINITY, 0.0), multiplicity: m, regular }
    });
    Ok(FuchsReport { finite, infinity })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dn::{build_l_infinity, DNMatrix};

    fn example(lambda: i64) -> WeylElement {
        let m = |c: i64, y, x| WeylElement::monomial(GaussRational::from_int(c), y, x);
        &(&(&m(1, 3, 2) + &m(3, 2, 1)) + &m(1, 1, 0)) - &m(lambda, 0, 0)
    }

    #[test]
    fn irregular_iff_lambda_nonzero() {
        let zero = Complex64::new(0.0, 0.0);
        let r = fuchs_test(&example(1), 2).unwrap();
        assert!(!r.at(zero, 1e-12).unwrap().regular);
        assert_eq!(r.at(zero, 1e-12).unwrap().multiplicity, 3);
        let r = fuchs_test(&example(0), 2).unwrap();
        assert!(r.at(zero, 1e-12).unwrap().regular);
    }

    #[test]
    fn first_order_is_fuchsian() {
        let l = build_l_infinity(&DNMatrix::from_int_rows(&[&[0, 1], &[1, 0]])).unwrap();
        let r = fuchs_test(&l, 1).unwrap();
        assert_eq!(r.finite.len(), 2);
        assert!(r.is_fuchsian());
        // (t²−1)∂ + t at ∞: w(1−w²)... has a simple pole, regular
        assert!(r.infinity.as_ref().unwrap().regular);
    }

    #[test]
    fn irregular_at_infinity() {
        // ∂ − 1: e^t has an irregular singularity at ∞
        let l = &WeylElement::x() - &WeylElement::one();
        let r = fuchs_test(&l, 1).unwrap();
        assert!(r.finite.is_empty());
        assert!(!r.infinity.unwrap().regular);
        // ∂ alone: ∞ is regular (−w²∂w has a double zero, order 0 coefficient absent)
        let r = fuchs_test(&WeylElement::x(), 1).unwrap();
        assert!(r.infinity.unwrap().regular);
    }
}
