//! Residues of `c_(n−1)/c_n dt` at the singular points of an operator.

use num_complex::Complex64;
use num_traits::{One, Zero};
use serde::Serialize;

use super::DnError;
use crate::numeric::aberth;
use crate::poly::Poly;
use crate::scalar::{GaussRational, Rational};
use crate::weyl::WeylElement;

/// `numerator / denominator`, gcd-reduced with a monic denominator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalFunction {
    numerator: Poly,
    denominator: Poly,
}

impl RationalFunction {
    pub fn new(numerator: Poly, denominator: Poly) -> Option<Self> {
        if denominator.is_zero() {
            return None;
        }
        let g = numerator.gcd(&denominator);
        let (mut num, mut den) = if g.is_zero() || g.is_constant() {
            (numerator, denominator)
        } else {
            (numerator.exact_div(&g).expect("gcd divides"), denominator.exact_div(&g).expect("gcd divides"))
        };
        let lc = den.leading().inv().expect("nonzero");
        num = num.scale(&lc);
        den = den.scale(&lc);
        Some(RationalFunction { numerator: num, denominator: den })
    }

    pub fn numerator(&self) -> &Poly {
        &self.numerator
    }

    pub fn denominator(&self) -> &Poly {
        &self.denominator
    }

    pub fn eval_complex(&self, z: Complex64) -> Complex64 {
        self.numerator.eval_complex(z) / self.denominator.eval_complex(z)
    }

    /// Residue of `f dt` at `∞`: minus the coefficient of `1/t` in the
    /// expansion at infinity.
    pub fn residue_at_infinity(&self) -> GaussRational {
        let d = self.denominator.degree().unwrap_or(0);
        if d == 0 {
            return GaussRational::zero();
        }
        let (_, r) = self.numerator.div_rem(&self.denominator);
        // r/den = [t^(d−1)] r / lc(den) · t^(−1) + O(t^(−2))
        -(&r.coeff(d - 1) * &self.denominator.leading().inv().expect("nonzero"))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct FiniteResidue {
    pub point: Complex64,
    /// Set when the singular point was recognized as a Gaussian rational.
    pub exact_point: Option<GaussRational>,
    pub residue: Complex64,
    pub exact_residue: Option<GaussRational>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ResidueReport {
    pub finite_points: Vec<FiniteResidue>,
    pub infinity_residue: GaussRational,
    /// `c_(n−1)·(c_n′)^(−1) mod c_n` when it is constant: then every finite
    /// residue equals it exactly.
    pub uniform_residue: Option<GaussRational>,
    /// `|Σ finite + ∞|`, zero up to rounding.
    pub sum_residual: f64,
}

/// Looks for a Gaussian rational with small denominators near `z` that is an
/// exact root of `p`.
fn exact_root_near(p: &Poly, z: Complex64) -> Option<GaussRational> {
    let approx = |x: f64| -> Option<Rational> {
        // best rational approximation with denominator up to 10^6
        let mut best = None;
        let (mut h0, mut h1) = (num_bigint::BigInt::zero(), num_bigint::BigInt::one());
        let (mut k0, mut k1) = (num_bigint::BigInt::one(), num_bigint::BigInt::zero());
        let mut r = x;
        for _ in 0..40 {
            let a = r.floor();
            if !a.is_finite() || a.abs() > 1e15 {
                break;
            }
            let ab = num_bigint::BigInt::from(a as i64);
            let h = &ab * &h1 + &h0;
            let k = &ab * &k1 + &k0;
            if k > num_bigint::BigInt::from(1_000_000) {
                break;
            }
            best = Some(Rational::new(h.clone(), k.clone()));
            h0 = std::mem::replace(&mut h1, h);
            k0 = std::mem::replace(&mut k1, k);
            let frac = r - a;
            if frac.abs() < 1e-12 {
                break;
            }
            r = 1.0 / frac;
        }
        best
    };
    let cand = GaussRational::new(approx(z.re)?, approx(z.im)?);
    p.eval(&cand).is_zero().then_some(cand)
}

/// Coefficient polynomials `c_k(t)` of `L = Σ c_k(t) ∂^k`, padded to `n+1`.
pub(crate) fn coefficients(l: &WeylElement, n: usize) -> Result<Vec<Poly>, DnError> {
    let mut cs = l.coefficient_polys();
    if cs.len() != n + 1 || cs[n].is_zero() {
        return Err(DnError::WrongOrder { order: cs.len().saturating_sub(1), n });
    }
    cs.resize(n + 1, Poly::zero());
    Ok(cs)
}

pub fn residues(l: &WeylElement, n: usize) -> Result<ResidueReport, DnError> {
    let cs = coefficients(l, n)?;
    let cn = &cs[n];
    let cn1 = if n == 0 { Poly::zero() } else { cs[n - 1].clone() };
    if !cn.is_squarefree() {
        return Err(DnError::RepeatedSingularity);
    }
    let f = RationalFunction::new(cn1.clone(), cn.clone()).expect("c_n is nonzero");
    let dcn = cn.derivative();
    let uniform = if cn.degree().unwrap_or(0) == 0 {
        None
    } else {
        let inv = dcn.inverse_mod(cn).ok_or_else(|| DnError::Internal("c_n' not invertible modulo a square-free c_n".into()))?;
        let (_, r) = (&cn1 * &inv).div_rem(cn);
        r.is_constant().then(|| r.coeff(0))
    };

    let mut finite_points = Vec::new();
    if cn.degree().unwrap_or(0) > 0 {
        for z in aberth(&cn.to_complex_coeffs(), 1e-15)? {
            let exact_point = exact_root_near(cn, z);
            let exact_residue = match (&uniform, &exact_point) {
                (Some(u), _) => Some(u.clone()),
                (None, Some(pt)) => Some(&cn1.eval(pt) * &dcn.eval(pt).inv().expect("simple root")),
                _ => None,
            };
            let point = exact_point.as_ref().map_or(z, GaussRational::to_complex);
            let residue = exact_residue.as_ref().map_or_else(|| cn1.eval_complex(point) / dcn.eval_complex(point), GaussRational::to_complex);
            finite_points.push(FiniteResidue { point, exact_point, residue, exact_residue });
        }
    }
    finite_points.sort_by(|a, b| (a.point.re, a.point.im).partial_cmp(&(b.point.re, b.point.im)).expect("finite"));
    let infinity_residue = f.residue_at_infinity();
    let total: Complex64 = finite_points.iter().map(|r| r.residue).sum::<Complex64>() + infinity_residue.to_complex();
    Ok(ResidueReport { finite_points, infinity_residue, uniform_residue: uniform, sum_residual: total.norm() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dn::{build_l_infinity, DNMatrix};

    #[test]
    fn first_order_example() {
        // A = [[0,1],[1,0]]: L = (t²−1)∂ + t
        let a = DNMatrix::from_int_rows(&[&[0, 1], &[1, 0]]);
        let l = build_l_infinity(&a).unwrap();
        let cs = l.coefficient_polys();
        assert_eq!(cs[1], Poly::from_ints(&[-1, 0, 1]));
        assert_eq!(cs[0], Poly::from_ints(&[0, 1]));
        let r = residues(&l, 1).unwrap();
        assert_eq!(r.uniform_residue, Some(GaussRational::from_ratio(1, 2)));
        assert_eq!(r.infinity_residue, GaussRational::from_int(-1));
        assert_eq!(r.finite_points.len(), 2);
        assert_eq!(r.finite_points[0].exact_point, Some(GaussRational::from_int(-1)));
        assert!(r.sum_residual < 1e-14);
    }

    #[test]
    fn rational_function_basics() {
        let f = RationalFunction::new(Poly::from_ints(&[-1, 0, 1]), Poly::from_ints(&[2, -2])).unwrap();
        // (t²−1)/(2−2t) = −(t+1)/2
        assert_eq!(f.denominator(), &Poly::one());
        assert_eq!(f.numerator(), &Poly::from_coeffs(vec![GaussRational::from_ratio(-1, 2), GaussRational::from_ratio(-1, 2)]));
        let g = RationalFunction::new(Poly::from_ints(&[0, 3]), Poly::from_ints(&[-1, 0, 1])).unwrap();
        assert_eq!(g.residue_at_infinity(), GaussRational::from_int(-3));
        assert!(RationalFunction::new(Poly::one(), Poly::zero()).is_none());
    }

    #[test]
    fn repeated_root() {
        let l = WeylElement::from_coefficient_polys(&[Poly::from_ints(&[1]), Poly::from_ints(&[0, 0, 1])]);
        assert_eq!(residues(&l, 1).unwrap_err(), DnError::RepeatedSingularity);
    }

    #[test]
    fn exact_root_recognition() {
        let p = Poly::from_ints(&[-2, 3]);
        assert_eq!(exact_root_near(&p, Complex64::new(2.0 / 3.0, 0.0)), Some(GaussRational::from_ratio(2, 3)));
        let p = Poly::from_ints(&[-2, 0, 1]);
        assert_eq!(exact_root_near(&p, Complex64::new(2f64.sqrt(), 0.0)), None);
    }
}
