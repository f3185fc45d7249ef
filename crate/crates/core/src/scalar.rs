//! Exact Gaussian rationals `a + b·i` with `a, b ∈ ℚ`.
//!
//! Every algebraic identity the toolkit checks is rational in the matrix
//! entries, so this is the coefficient field of the whole exact layer.
//! Floating point inputs enter it through [`GaussRational::from_f64`], which
//! is exact: every finite `f64` is a dyadic rational.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

/// Exact rational number, always in lowest terms with positive denominator.
pub type Rational = BigRational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ScalarError {
    #[error("malformed fraction `{0}`")]
    Malformed(String),
    #[error("non-finite floating point value")]
    NonFinite,
}

/// Parses a decimal-free fraction string such as `"-3/2"` or `"7"`.
pub fn parse_rational(s: &str) -> Result<Rational, ScalarError> {
    let t = s.trim();
    let r = Rational::from_str(t).map_err(|_| ScalarError::Malformed(s.to_string()))?;
    if r.denom().is_zero() {
        return Err(ScalarError::Malformed(s.to_string()));
    }
    Ok(r)
}

pub fn format_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn rational_to_f64(r: &Rational) -> f64 {
    match (r.numer().to_f64(), r.denom().to_f64()) {
        (Some(n), Some(d)) if n.is_finite() && d.is_finite() => n / d,
        // huge numerator or denominator: scale down by the bit length first
        _ => {
            let shift = r.numer().bits().max(r.denom().bits()).saturating_sub(900);
            let n = (r.numer() >> shift).to_f64().unwrap_or(0.0);
            let d = (r.denom() >> shift).to_f64().unwrap_or(1.0);
            n / d
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct GaussRational {
    re: Rational,
    im: Rational,
}

impl GaussRational {
    pub fn new(re: Rational, im: Rational) -> Self {
        GaussRational { re, im }
    }

    pub fn real(re: Rational) -> Self {
        GaussRational { re, im: Rational::zero() }
    }

    pub fn from_int(v: i64) -> Self {
        Self::real(Rational::from_integer(BigInt::from(v)))
    }

    pub fn from_big(v: BigInt) -> Self {
        Self::real(Rational::from_integer(v))
    }

    pub fn from_ratio(num: i64, den: i64) -> Self {
        Self::real(Rational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn i() -> Self {
        GaussRational { re: Rational::zero(), im: Rational::one() }
    }

    /// Exact conversion of a finite float.
    pub fn from_f64(v: f64) -> Result<Self, ScalarError> {
        Rational::from_float(v).map(Self::real).ok_or(ScalarError::NonFinite)
    }

    pub fn from_complex(z: Complex64) -> Result<Self, ScalarError> {
        let re = Rational::from_float(z.re).ok_or(ScalarError::NonFinite)?;
        let im = Rational::from_float(z.im).ok_or(ScalarError::NonFinite)?;
        Ok(GaussRational { re, im })
    }

    pub fn re(&self) -> &Rational {
        &self.re
    }

    pub fn im(&self) -> &Rational {
        &self.im
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        GaussRational { re: self.re.clone(), im: -self.im.clone() }
    }

    pub fn norm_sqr(&self) -> Rational {
        &self.re * &self.re + &self.im * &self.im
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let d = self.norm_sqr();
        Some(GaussRational { re: &self.re / &d, im: -(&self.im / &d) })
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    pub fn to_complex(&self) -> Complex64 {
        Complex64::new(rational_to_f64(&self.re), rational_to_f64(&self.im))
    }

    /// Scales by a small signed integer.
    pub fn scale(&self, k: i64) -> Self {
        let k = Rational::from_integer(BigInt::from(k));
        GaussRational { re: &self.re * &k, im: &self.im * &k }
    }

    /// `±1` as a scalar: `(-1)^e`.
    pub fn sign_pow(e: i64) -> Self {
        if e.rem_euclid(2) == 0 {
            Self::one()
        } else {
            -Self::one()
        }
    }

    /// Height used to bound random test data and report coefficient growth.
    pub fn max_bits(&self) -> u64 {
        [self.re.numer(), self.re.denom(), self.im.numer(), self.im.denom()]
            .iter()
            .map(|b| b.bits())
            .max()
            .unwrap_or(0)
    }
}

impl Zero for GaussRational {
    fn zero() -> Self {
        GaussRational { re: Rational::zero(), im: Rational::zero() }
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
}

impl One for GaussRational {
    fn one() -> Self {
        Self::real(Rational::one())
    }
}

impl From<i64> for GaussRational {
    fn from(v: i64) -> Self {
        Self::from_int(v)
    }
}

impl From<Rational> for GaussRational {
    fn from(v: Rational) -> Self {
        Self::real(v)
    }
}

impl fmt::Display for GaussRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            write!(f, "{}", format_rational(&self.re))
        } else if self.re.is_zero() {
            write!(f, "{}i", format_rational(&self.im))
        } else if self.im.is_negative() {
            write!(f, "({}-{}i)", format_rational(&self.re), format_rational(&-self.im.clone()))
        } else {
            write!(f, "({}+{}i)", format_rational(&self.re), format_rational(&self.im))
        }
    }
}

impl fmt::Debug for GaussRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Neg for GaussRational {
    type Output = GaussRational;
    fn neg(self) -> Self {
        GaussRational { re: -self.re, im: -self.im }
    }
}

impl Neg for &GaussRational {
    type Output = GaussRational;
    fn neg(self) -> GaussRational {
        GaussRational { re: -self.re.clone(), im: -self.im.clone() }
    }
}

impl Add<&GaussRational> for &GaussRational {
    type Output = GaussRational;
    fn add(self, o: &GaussRational) -> GaussRational {
        GaussRational { re: &self.re + &o.re, im: &self.im + &o.im }
    }
}

impl Sub<&GaussRational> for &GaussRational {
    type Output = GaussRational;
    fn sub(self, o: &GaussRational) -> GaussRational {
        GaussRational { re: &self.re - &o.re, im: &self.im - &o.im }
    }
}

impl Mul<&GaussRational> for &GaussRational {
    type Output = GaussRational;
    fn mul(self, o: &GaussRational) -> GaussRational {
        if self.im.is_zero() && o.im.is_zero() {
            return GaussRational::real(&self.re * &o.re);
        }
        GaussRational {
            re: &self.re * &o.re - &self.im * &o.im,
            im: &self.re * &o.im + &self.im * &o.re,
        }
    }
}

impl Div<&GaussRational> for &GaussRational {
    type Output = GaussRational;
    /// Panics on division by zero, like the underlying rationals.
    fn div(self, o: &GaussRational) -> GaussRational {
        let inv = o.inv().expect("division by zero Gaussian rational");
        self * &inv
    }
}

macro_rules! forward_owned {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr<GaussRational> for GaussRational {
            type Output = GaussRational;
            fn $m(self, o: GaussRational) -> GaussRational { (&self).$m(&o) }
        }
        impl $tr<&GaussRational> for GaussRational {
            type Output = GaussRational;
            fn $m(self, o: &GaussRational) -> GaussRational { (&self).$m(o) }
        }
        impl $tr<GaussRational> for &GaussRational {
            type Output = GaussRational;
            fn $m(self, o: GaussRational) -> GaussRational { self.$m(&o) }
        }
    )*};
}
forward_owned!(Add add, Sub sub, Mul mul, Div div);

impl AddAssign<&GaussRational> for GaussRational {
    fn add_assign(&mut self, o: &GaussRational) {
        self.re += &o.re;
        self.im += &o.im;
    }
}

impl AddAssign for GaussRational {
    fn add_assign(&mut self, o: GaussRational) {
        *self += &o;
    }
}

impl SubAssign<&GaussRational> for GaussRational {
    fn sub_assign(&mut self, o: &GaussRational) {
        self.re -= &o.re;
        self.im -= &o.im;
    }
}

impl MulAssign<&GaussRational> for GaussRational {
    fn mul_assign(&mut self, o: &GaussRational) {
        *self = &*self * o;
    }
}

/// Wire form of a scalar: a fraction string, a JSON number (converted
/// exactly) or an object `{"re": .., "im": ..}` whose parts are either.
#[derive(serde::Serialize, serde::Deserialize)]
#[serde(untagged)]
enum ScalarJson {
    Text(String),
    Number(f64),
    Complex { re: Box<ScalarJson>, #[serde(default)] im: Option<Box<ScalarJson>> },
}

impl ScalarJson {
    fn into_scalar(self) -> Result<GaussRational, ScalarError> {
        match self {
            ScalarJson::Text(s) => Ok(GaussRational::real(parse_rational(&s)?)),
            ScalarJson::Number(v) => GaussRational::from_f64(v),
            ScalarJson::Complex { re, im } => {
                let re = re.into_scalar()?;
                let im = match im {
                    Some(im) => im.into_scalar()?,
                    None => GaussRational::zero(),
                };
                if !re.is_real() || !im.is_real() {
                    return Err(ScalarError::Malformed("nested complex part".into()));
                }
                Ok(GaussRational::new(re.re, im.re))
            }
        }
    }

    /// True when the value came in as a JSON float rather than a fraction.
    fn is_float(&self) -> bool {
        match self {
            ScalarJson::Text(_) => false,
            ScalarJson::Number(_) => true,
            ScalarJson::Complex { re, im } => re.is_float() || im.as_ref().is_some_and(|v| v.is_float()),
        }
    }
}

impl serde::Serialize for GaussRational {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if self.im.is_zero() {
            s.serialize_str(&format_rational(&self.re))
        } else {
            ScalarJson::Complex {
                re: Box::new(ScalarJson::Text(format_rational(&self.re))),
                im: Some(Box::new(ScalarJson::Text(format_rational(&self.im)))),
            }
            .serialize(s)
        }
    }
}

impl<'de> serde::Deserialize<'de> for GaussRational {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        ScalarJson::deserialize(d)?.into_scalar().map_err(serde::de::Error::custom)
    }
}

/// Parses a JSON scalar, reporting whether any part was a float.
pub fn scalar_from_json(v: &serde_json::Value) -> Result<(GaussRational, bool), ScalarError> {
    let j: ScalarJson = serde_json::from_value(v.clone()).map_err(|e| ScalarError::Malformed(e.to_string()))?;
    let float = j.is_float();
    Ok((j.into_scalar()?, float))
}
