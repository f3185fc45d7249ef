//! Double-double complex matrices for transports whose products are too
//! ill-conditioned for `f64`.

use nalgebra::{DMatrix, DVector};
use num_bigint::BigInt;
use num_complex::{Complex, Complex64};
use num_traits::{FromPrimitive, ToPrimitive, Zero};
use twofloat::TwoFloat;

use super::CMatrix;
use crate::scalar::{GaussRational, Rational};

pub type DdComplex = Complex<TwoFloat>;
pub type DdMatrix = DMatrix<DdComplex>;

pub fn dd(z: Complex64) -> DdComplex {
    Complex::new(TwoFloat::from(z.re), TwoFloat::from(z.im))
}

pub fn dd_real(x: f64) -> DdComplex {
    dd(Complex64::new(x, 0.0))
}

pub fn rounded(z: DdComplex) -> Complex64 {
    Complex64::new(f64::from(z.re), f64::from(z.im))
}

fn bigint_to_dd(v: &BigInt) -> TwoFloat {
    let hi = v.to_f64().unwrap_or(f64::NAN);
    let lo = BigInt::from_f64(hi).map_or(0.0, |h| (v - h).to_f64().unwrap_or(0.0));
    TwoFloat::from(hi) + TwoFloat::from(lo)
}

/// `1/x` with one Newton correction. `TwoFloat / TwoFloat` in the `twofloat`
/// crate is only accurate to about `f64` precision, so divisions go through
/// this instead.
pub fn recip(x: TwoFloat) -> TwoFloat {
    let r = TwoFloat::from(1.0 / x.hi());
    r + r * (TwoFloat::from(1.0) - x * r)
}

pub fn recip_complex(z: DdComplex) -> DdComplex {
    let inv = recip(z.re * z.re + z.im * z.im);
    Complex::new(z.re * inv, -z.im * inv)
}

pub fn rational_to_dd(r: &Rational) -> TwoFloat {
    let (n, d) = (bigint_to_dd(r.numer()), bigint_to_dd(r.denom()));
    if n.is_valid() && d.is_valid() {
        n * recip(d)
    } else {
        TwoFloat::from(crate::scalar::rational_to_f64(r))
    }
}

pub fn gauss_to_dd(z: &GaussRational) -> DdComplex {
    Complex::new(rational_to_dd(z.re()), rational_to_dd(z.im()))
}

pub fn to_dd(m: &CMatrix) -> DdMatrix {
    m.map(dd)
}

pub fn to_f64(m: &DdMatrix) -> CMatrix {
    m.map(rounded)
}

pub fn dd_identity(n: usize) -> DdMatrix {
    DdMatrix::from_fn(n, n, |i, j| if i == j { dd_real(1.0) } else { DdComplex::zero() })
}

/// Frobenius norm, rounded.
pub fn dd_norm(m: &DdMatrix) -> f64 {
    let s = m.iter().fold(TwoFloat::from(0.0), |acc, z| acc + z.re * z.re + z.im * z.im);
    f64::from(s).sqrt()
}

pub fn dd_pow(m: &DdMatrix, e: u32) -> DdMatrix {
    (0..e).fold(dd_identity(m.nrows()), |acc, _| acc * m)
}

/// `√x` with one Newton correction, for the same reason as [`recip`].
pub fn dd_sqrt(x: TwoFloat) -> TwoFloat {
    if x.hi() <= 0.0 {
        return TwoFloat::from(0.0);
    }
    let s = TwoFloat::from(x.hi().sqrt());
    s + (x - s * s) * recip(s) * TwoFloat::from(0.5)
}

fn abs_sqr(z: DdComplex) -> TwoFloat {
    z.re * z.re + z.im * z.im
}

/// Householder QR with column pivoting, carried out in double-double.
pub struct PivotedQr {
    /// `R` on and above the diagonal of the leading `min(m, n)` rows.
    r: DdMatrix,
    /// Column `k` of `R` is column `perm[k]` of the input.
    perm: Vec<usize>,
}

impl PivotedQr {
    pub fn new(a: &DdMatrix) -> Self {
        let (m, n) = a.shape();
        let mut r = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..m.min(n) {
            let col_norm = |r: &DdMatrix, j: usize| (k..m).fold(TwoFloat::from(0.0), |acc, i| acc + abs_sqr(r[(i, j)]));
            let pivot = (k..n).max_by(|&x, &y| f64::from(col_norm(&r, x)).total_cmp(&f64::from(col_norm(&r, y)))).unwrap_or(k);
            r.swap_columns(k, pivot);
            perm.swap(k, pivot);
            let norm2 = col_norm(&r, k);
            if norm2.hi() == 0.0 {
                break;
            }
            let norm = dd_sqrt(norm2);
            let x0 = r[(k, k)];
            let x0_abs = dd_sqrt(abs_sqr(x0));
            // α = −e^(i arg x0)‖x‖ avoids cancellation in v_0 = x0 − α
            let phase = if x0_abs.hi() == 0.0 { dd_real(1.0) } else { x0 * Complex::new(recip(x0_abs), TwoFloat::from(0.0)) };
            let alpha = -phase * Complex::new(norm, TwoFloat::from(0.0));
            let mut v: Vec<DdComplex> = (k..m).map(|i| r[(i, k)]).collect();
            v[0] -= alpha;
            let vv = v.iter().fold(TwoFloat::from(0.0), |acc, z| acc + abs_sqr(*z));
            if vv.hi() == 0.0 {
                continue;
            }
            let beta = TwoFloat::from(2.0) * recip(vv);
            for j in k..n {
                let dot = v.iter().enumerate().fold(DdComplex::zero(), |acc, (i, vi)| acc + vi.conj() * r[(k + i, j)]);
                let f = dot * Complex::new(beta, TwoFloat::from(0.0));
                for (i, vi) in v.iter().enumerate() {
                    r[(k + i, j)] -= vi * f;
                }
            }
            for i in k + 1..m {
                r[(i, k)] = DdComplex::zero();
            }
        }
        PivotedQr { r, perm }
    }

    /// `|r_kk|`, nonincreasing up to rounding.
    pub fn diagonal(&self) -> Vec<f64> {
        let (m, n) = self.r.shape();
        (0..m.min(n)).map(|k| f64::from(dd_sqrt(abs_sqr(self.r[(k, k)])))).collect()
    }

    /// Numerical rank: diagonal entries above `rel_tol` times the larger of
    /// the first one and 1.
    pub fn rank(&self, rel_tol: f64) -> usize {
        let d = self.diagonal();
        let top = d.first().copied().unwrap_or(0.0).max(1.0);
        d.iter().take_while(|&&x| x > rel_tol * top).count()
    }

    /// A basis of the null space at the given rank, one vector per free
    /// column, each of unit norm. The basis is not orthogonalized.
    pub fn null_space(&self, rank: usize) -> Vec<DVector<DdComplex>> {
        let n = self.r.ncols();
        (rank..n)
            .map(|free| {
                let mut x = vec![DdComplex::zero(); rank];
                for i in (0..rank).rev() {
                    let mut acc = -self.r[(i, free)];
                    for (j, xj) in x.iter().enumerate().skip(i + 1) {
                        acc -= self.r[(i, j)] * xj;
                    }
                    x[i] = acc * recip_complex(self.r[(i, i)]);
                }
                let mut out = DVector::from_element(n, DdComplex::zero());
                for (i, xi) in x.into_iter().enumerate() {
                    out[self.perm[i]] = xi;
                }
                out[self.perm[free]] = dd_real(1.0);
                let norm = out.iter().fold(TwoFloat::from(0.0), |acc, z| acc + abs_sqr(*z));
                let inv = Complex::new(recip(dd_sqrt(norm)), TwoFloat::from(0.0));
                out.map(|z| z * inv)
            })
            .collect()
    }
}
