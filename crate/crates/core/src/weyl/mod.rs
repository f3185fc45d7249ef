//! The Weyl algebra `ℚ(i)⟨Y, X⟩ / (XY − YX − 1)` in normal order.
//!
//! Elements are stored as sparse maps from exponent pairs `(a, b)` to the
//! coefficient of the normal-ordered monomial `Y^a X^b` (all `Y` to the left).
//! In the differential-operator reading `Y = t` and `X = ∂t`, so a key
//! `(a, b)` is the monomial `t^a ∂^b`. The same algebra houses the `w`-chart
//! operators, with `Y = w` and `X = ∂w`.

mod canonical;
mod json;

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::poly::Poly;
use crate::scalar::GaussRational;

pub use canonical::{from_canonical, leading_block, to_canonical, CanonicalDN};
pub use json::{WeylJson, WeylTermJson};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WeylError {
    #[error("element is not right-divisible by X: monomial Y^{y} has X-exponent 0")]
    NotDivisible { y: u32 },
    #[error("operator does not have the canonical DN shape: {0}")]
    MalformedOperator(String),
    #[error("g_{p} has degree {degree}, above the bound {bound}")]
    DegreeOverflow { p: usize, degree: usize, bound: usize },
}

/// Exponent pair `(y, x)` of the normal-ordered monomial `Y^y X^x`.
pub type Monomial = (u32, u32);

#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct WeylElement {
    terms: BTreeMap<Monomial, GaussRational>,
}

/// `C(b,k)·C(c,k)·k!`, the number of ways to contract `k` of the `X`s in
/// `X^b` against `Y`s in `Y^c` when reordering `X^b Y^c`.
fn contraction_count(b: u32, c: u32, k: u32) -> BigInt {
    let mut v = BigInt::one();
    for i in 0..k {
        v *= BigInt::from((b - i) as u64) * BigInt::from((c - i) as u64);
        v /= BigInt::from((i + 1) as u64);
    }
    v
}

impl WeylElement {
    pub fn zero() -> Self {
        WeylElement { terms: BTreeMap::new() }
    }

    pub fn one() -> Self {
        Self::constant(GaussRational::one())
    }

    pub fn constant(c: GaussRational) -> Self {
        Self::monomial(c, 0, 0)
    }

    pub fn monomial(c: GaussRational, y: u32, x: u32) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert((y, x), c);
        }
        WeylElement { terms }
    }

    /// The generator `Y` (`t`, or `u*` in the abstract model).
    pub fn y() -> Self {
        Self::monomial(GaussRational::one(), 1, 0)
    }

    /// The generator `X` (`∂t`, or `u` in the abstract model).
    pub fn x() -> Self {
        Self::monomial(GaussRational::one(), 0, 1)
    }

    /// `θ = YX` (`t∂t`).
    pub fn theta() -> Self {
        Self::monomial(GaussRational::one(), 1, 1)
    }

    pub fn from_terms<I: IntoIterator<Item = (Monomial, GaussRational)>>(it: I) -> Self {
        let mut e = Self::zero();
        for (m, c) in it {
            e.add_term(m, c);
        }
        e
    }

    fn add_term(&mut self, m: Monomial, c: GaussRational) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(v) => {
                *v += &c;
                if v.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &GaussRational)> {
        self.terms.iter()
    }

    pub fn coeff(&self, y: u32, x: u32) -> GaussRational {
        self.terms.get(&(y, x)).cloned().unwrap_or_else(GaussRational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn scale(&self, c: &GaussRational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        WeylElement { terms: self.terms.iter().map(|(m, v)| (*m, v * c)).collect() }
    }

    pub fn pow(&self, e: u32) -> Self {
        (0..e).fold(Self::one(), |acc, _| &acc * self)
    }

    /// Highest `X`-exponent, i.e. the order as a differential operator.
    pub fn order(&self) -> Option<u32> {
        self.terms.keys().map(|&(_, x)| x).max()
    }

    /// Grade `x − y` of a monomial; `θ` has grade 0, `X` grade 1, `Y` grade −1.
    pub fn grade(m: &Monomial) -> i64 {
        m.1 as i64 - m.0 as i64
    }

    /// The homogeneous component of the given grade.
    pub fn grade_slice(&self, g: i64) -> Self {
        WeylElement { terms: self.terms.iter().filter(|(m, _)| Self::grade(m) == g).map(|(m, c)| (*m, c.clone())).collect() }
    }

    pub fn grades(&self) -> Vec<i64> {
        let mut g: Vec<i64> = self.terms.keys().map(Self::grade).collect();
        g.sort_unstable();
        g.dedup();
        g
    }

    /// The formal adjoint: the anti-involution fixing `Y` and sending `X ↦ −X`.
    pub fn adjoint(&self) -> Self {
        let mut out = Self::zero();
        for (&(a, b), c) in &self.terms {
            // (Y^a X^b)^∨ = (−1)^b X^b Y^a
            let sign = GaussRational::sign_pow(b as i64);
            for k in 0..=a.min(b) {
                let cnt = GaussRational::from_big(contraction_count(b, a, k));
                out.add_term((a - k, b - k), &(c * &sign) * &cnt);
            }
        }
        out
    }

    /// The unique `Q` with `Q·X = self`.
    pub fn right_divide_by_x(&self) -> Result<Self, WeylError> {
        if let Some((&(y, _), _)) = self.terms.iter().find(|((_, x), _)| *x == 0) {
            return Err(WeylError::NotDivisible { y });
        }
        Ok(WeylElement { terms: self.terms.iter().map(|(&(a, b), c)| ((a, b - 1), c.clone())).collect() })
    }

    /// `P(YX)` for a polynomial `P`, via `Y^a X^a = θ(θ−1)⋯(θ−a+1)`.
    pub fn from_theta(p: &Poly) -> Self {
        Self::from_terms(p.to_falling_basis().into_iter().enumerate().map(|(a, c)| ((a as u32, a as u32), c)))
    }

    /// Inverse of [`from_theta`](Self::from_theta) on grade-0 elements.
    pub fn to_theta(&self) -> Option<Poly> {
        if self.terms.keys().any(|m| Self::grade(m) != 0) {
            return None;
        }
        let top = self.terms.keys().map(|m| m.0).max().unwrap_or(0) as usize;
        let mut falling = vec![GaussRational::zero(); top + 1];
        for (&(a, _), c) in &self.terms {
            falling[a as usize] = c.clone();
        }
        Some(Poly::from_falling_basis(&falling))
    }

    /// Coefficients `c_k(t)` of the expansion `Σ c_k(t) ∂^k`.
    pub fn coefficient_polys(&self) -> Vec<Poly> {
        let ord = match self.order() {
            Some(o) => o as usize,
            None => return Vec::new(),
        };
        let mut cols: Vec<Vec<GaussRational>> = vec![Vec::new(); ord + 1];
        for (&(a, b), c) in &self.terms {
            let col = &mut cols[b as usize];
            if col.len() <= a as usize {
                col.resize(a as usize + 1, GaussRational::zero());
            }
            col[a as usize] = c.clone();
        }
        cols.into_iter().map(Poly::from_coeffs).collect()
    }

    /// `Σ c_k(Y) X^k`.
    pub fn from_coefficient_polys(cs: &[Poly]) -> Self {
        let mut e = Self::zero();
        for (k, p) in cs.iter().enumerate() {
            for (a, c) in p.coeffs().iter().enumerate() {
                e.add_term((a as u32, k as u32), c.clone());
            }
        }
        e
    }

    pub fn max_coeff_bits(&self) -> u64 {
        self.terms.values().map(|c| c.max_bits()).max().unwrap_or(0)
    }

    /// Renders with the given names for `Y` and `X`.
    pub fn display_with(&self, yname: &str, xname: &str) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut parts = Vec::new();
        // highest order first reads like the textbook expansions
        let mut keys: Vec<&Monomial> = self.terms.keys().collect();
        keys.sort_by(|p, q| (q.1, q.0).cmp(&(p.1, p.0)));
        for m in keys {
            let c = &self.terms[m];
            let mut mono = Vec::new();
            match m.0 {
                0 => {}
                1 => mono.push(yname.to_string()),
                a => mono.push(format!("{yname}^{a}")),
            }
            match m.1 {
                0 => {}
                1 => mono.push(xname.to_string()),
                b => mono.push(format!("{xname}^{b}")),
            }
            let body = mono.join("·");
            let s = if body.is_empty() {
                format!("{c}")
            } else if c.is_one() {
                body
            } else if *c == -GaussRational::one() {
                format!("-{body}")
            } else {
                format!("{c}·{body}")
            };
            parts.push(s);
        }
        parts.join(" + ").replace("+ -", "- ")
    }
}

impl fmt::Display for WeylElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.display_with("t", "∂"))
    }
}

impl fmt::Debug for WeylElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.display_with("Y", "X"))
    }
}

impl Add<&WeylElement> for &WeylElement {
    type Output = WeylElement;
    fn add(self, o: &WeylElement) -> WeylElement {
        let mut out = self.clone();
        for (m, c) in &o.terms {
            out.add_term(*m, c.clone());
        }
        out
    }
}

impl Sub<&WeylElement> for &WeylElement {
    type Output = WeylElement;
    fn sub(self, o: &WeylElement) -> WeylElement {
        let mut out = self.clone();
        for (m, c) in &o.terms {
            out.add_term(*m, -c);
        }
        out
    }
}

impl Neg for &WeylElement {
    type Output = WeylElement;
    fn neg(self) -> WeylElement {
        WeylElement { terms: self.terms.iter().map(|(m, c)| (*m, -c)).collect() }
    }
}

impl Mul<&WeylElement> for &WeylElement {
    type Output = WeylElement;
    /// Normal-ordered product:
    /// `Y^a X^b · Y^c X^d = Σ_k C(b,k) C(c,k) k! · Y^(a+c−k) X^(b+d−k)`.
    fn mul(self, o: &WeylElement) -> WeylElement {
        let mut out = WeylElement::zero();
        for (&(a, b), c1) in &self.terms {
            for (&(c, d), c2) in &o.terms {
                let base = c1 * c2;
                for k in 0..=b.min(c) {
                    let v = if k == 0 { base.clone() } else { &base * &GaussRational::from_big(contraction_count(b, c, k)) };
                    out.add_term((a + c - k, b + d - k), v);
                }
            }
        }
        out
    }
}

macro_rules! forward_owned {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr<WeylElement> for WeylElement {
            type Output = WeylElement;
            fn $m(self, o: WeylElement) -> WeylElement { (&self).$m(&o) }
        }
        impl $tr<&WeylElement> for WeylElement {
            type Output = WeylElement;
            fn $m(self, o: &WeylElement) -> WeylElement { (&self).$m(o) }
        }
        impl $tr<WeylElement> for &WeylElement {
            type Output = WeylElement;
            fn $m(self, o: WeylElement) -> WeylElement { self.$m(&o) }
        }
    )*};
}
forward_owned!(Add add, Sub sub, Mul mul);

impl Neg for WeylElement {
    type Output = WeylElement;
    fn neg(self) -> WeylElement {
        -&self
    }
}

impl From<GaussRational> for WeylElement {
    fn from(c: GaussRational) -> Self {
        Self::constant(c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(c: i64, y: u32, x: u32) -> WeylElement {
        WeylElement::monomial(GaussRational::from_int(c), y, x)
    }

    #[test]
    fn commutation_relation() {
        let (x, y) = (WeylElement::x(), WeylElement::y());
        assert_eq!(&x * &y, &m(1, 1, 1) + &WeylElement::one());
        assert_eq!(&y * &x, m(1, 1, 1));
        let t = WeylElement::theta();
        assert_eq!(&t * &t, &m(1, 2, 2) + &m(1, 1, 1));
    }

    #[test]
    fn adjoint_examples() {
        assert_eq!(WeylElement::theta().adjoint(), &m(-1, 1, 1) - &WeylElement::one());
        assert_eq!(WeylElement::x().adjoint(), m(-1, 0, 1));
        assert_eq!(WeylElement::y().adjoint(), WeylElement::y());
    }

    #[test]
    fn right_division() {
        let l = &m(1, 2, 2) + &m(1, 1, 1);
        assert_eq!(l.right_divide_by_x().unwrap(), &m(1, 2, 1) + &m(1, 1, 0));
        assert_eq!(WeylElement::x().right_divide_by_x().unwrap(), WeylElement::one());
        let bad = &m(1, 1, 1) + &WeylElement::one();
        assert_eq!(bad.right_divide_by_x(), Err(WeylError::NotDivisible { y: 0 }));
    }

    #[test]
    fn theta_polynomials() {
        let p = Poly::from_ints(&[1, -2, 0, 3]);
        let e = WeylElement::from_theta(&p);
        assert_eq!(e.to_theta().unwrap(), p);
        let t = WeylElement::theta();
        let direct = &(&(&t * &(&t * &t)).scale(&GaussRational::from_int(3)) - &t.scale(&GaussRational::from_int(2))) + &WeylElement::one();
        assert_eq!(e, direct);
        assert!(WeylElement::x().to_theta().is_none());
    }

    #[test]
    fn coefficient_polys_round_trip() {
        let l = &(&m(1, 3, 2) + &m(3, 2, 1)) + &(&m(1, 1, 0) - &WeylElement::one());
        let cs = l.coefficient_polys();
        assert_eq!(cs[2], Poly::from_ints(&[0, 0, 0, 1]));
        assert_eq!(cs[1], Poly::from_ints(&[0, 0, 3]));
        assert_eq!(cs[0], Poly::from_ints(&[-1, 1]));
        assert_eq!(WeylElement::from_coefficient_polys(&cs), l);
    }

    #[test]
    fn display() {
        let l = &(&m(1, 3, 2) + &m(3, 2, 1)) + &(&m(1, 1, 0) - &WeylElement::one());
        assert_eq!(l.to_string(), "t^3·∂^2 + 3·t^2·∂ + t - 1");
    }
}
