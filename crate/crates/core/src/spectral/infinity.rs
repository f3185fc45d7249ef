//! Exponents at `t = ∞` through the explicit shearing
//! `H = diag(1, x^(−1), …, x^(−n))`, `x = 1/t`.

use num_traits::Zero;
use serde::Serialize;

use super::SpectralError;
use crate::dn::DNMatrix;
use crate::linalg::QMatrix;
use crate::scalar::GaussRational;

/// `Σ_k G_k x^k` for `valuation ≤ k < precision`, exact coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncatedSeriesMatrix {
    size: usize,
    valuation: i64,
    coeffs: Vec<QMatrix>,
    precision: i64,
}

impl TruncatedSeriesMatrix {
    pub fn new(size: usize, valuation: i64, coeffs: Vec<QMatrix>, precision: i64) -> Self {
        assert!(valuation + coeffs.len() as i64 <= precision.max(valuation), "coefficients beyond the precision");
        TruncatedSeriesMatrix { size, valuation, coeffs, precision }
    }

    /// `G = T(I − Ax)^(−1) = Σ_k T A^k x^k` up to `x^(truncation−1)`.
    pub fn infinity_connection(a: &DNMatrix, truncation: usize) -> Self {
        let am = a.to_qmatrix();
        let t = QMatrix::from_fn(a.size(), a.size(), |i, j| if i == j { GaussRational::from_int(i as i64) } else { GaussRational::zero() });
        let mut power = QMatrix::identity(a.size());
        let mut coeffs = Vec::with_capacity(truncation);
        for _ in 0..truncation {
            coeffs.push(&t * &power);
            power = &power * &am;
        }
        Self::new(a.size(), 0, coeffs, truncation as i64)
    }

    pub fn valuation(&self) -> i64 {
        self.valuation
    }

    /// Exponents below this are known exactly.
    pub fn precision(&self) -> i64 {
        self.precision
    }

    pub fn coeff(&self, k: i64) -> QMatrix {
        assert!(k < self.precision, "x^{k} is beyond the truncation");
        let idx = k - self.valuation;
        if idx < 0 || idx as usize >= self.coeffs.len() {
            QMatrix::zeros(self.size, self.size)
        } else {
            self.coeffs[idx as usize].clone()
        }
    }

    /// Lowest exponent carrying a nonzero coefficient, if any is known.
    pub fn order(&self) -> Option<i64> {
        self.coeffs.iter().position(|c| !c.is_zero()).map(|i| self.valuation + i as i64)
    }

    /// `G_[H] = (DH)H^(−1) + H G H^(−1)` for `H = diag(x^(−w_0), …)` given
    /// by the weights `w`. Entry `(i, j)` of `H G H^(−1)` is `x^(w_j − w_i) G_ij`.
    pub fn shear(&self, weights: &[i64]) -> Self {
        assert_eq!(weights.len(), self.size);
        let shifts: Vec<i64> = (0..self.size).flat_map(|i| (0..self.size).map(move |j| (i, j))).map(|(i, j)| weights[j] - weights[i]).collect();
        let lo = self.valuation + shifts.iter().copied().min().unwrap_or(0).min(0);
        let precision = self.precision + shifts.iter().copied().min().unwrap_or(0).min(0);
        let len = (precision - lo).max(0) as usize;
        let mut coeffs = vec![QMatrix::zeros(self.size, self.size); len];
        for (k, c) in self.coeffs.iter().enumerate() {
            let e = self.valuation + k as i64;
            for i in 0..self.size {
                for j in 0..self.size {
                    let target = e + weights[j] - weights[i];
                    if target < precision && !c.get(i, j).is_zero() {
                        let slot = (target - lo) as usize;
                        let v = coeffs[slot].get(i, j) + c.get(i, j);
                        coeffs[slot].set(i, j, v);
                    }
                }
            }
        }
        // (DH)H^(−1) = diag(−w_i)
        if lo <= 0 && 0 < precision {
            let slot = (-lo) as usize;
            for (i, &w) in weights.iter().enumerate() {
                let v = coeffs[slot].get(i, i) - &GaussRational::from_int(w);
                coeffs[slot].set(i, i, v);
            }
        }
        Self::new(self.size, lo, coeffs, precision)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct NilpotencyCertificate {
    pub n: usize,
    pub truncation: usize,
    /// `G(0) = T` before shearing.
    pub g0_is_t: bool,
    /// The sheared matrix has no negative powers of `x`.
    pub pole_free: bool,
    /// `N = G_[H](0)`, row-major.
    pub residue: Vec<Vec<GaussRational>>,
    pub power_n_nonzero: bool,
    pub power_n_plus_1_zero: bool,
    /// Smallest `k` with `N^k = 0`.
    pub nilpotency_index: Option<usize>,
}

impl NilpotencyCertificate {
    pub fn certified(&self) -> bool {
        self.g0_is_t && self.pole_free && self.power_n_nonzero && self.power_n_plus_1_zero
    }

    pub fn residue_matrix(&self) -> QMatrix {
        let s = self.residue.len();
        QMatrix::from_fn(s, s, |i, j| self.residue[i][j].clone())
    }
}

pub fn infinity_exponents(a: &DNMatrix, truncation: usize) -> Result<NilpotencyCertificate, SpectralError> {
    let n = a.n();
    if truncation < n + 2 {
        return Err(SpectralError::TruncationTooSmall { truncation, required: n + 2 });
    }
    let g = TruncatedSeriesMatrix::infinity_connection(a, truncation);
    let t = QMatrix::from_fn(n + 1, n + 1, |i, j| if i == j { GaussRational::from_int(i as i64) } else { GaussRational::zero() });
    let g0_is_t = g.coeff(0) == t;
    let weights: Vec<i64> = (0..=n as i64).collect();
    let sheared = g.shear(&weights);
    let pole_free = (sheared.valuation()..0).all(|k| sheared.coeff(k).is_zero());
    let big_n = sheared.coeff(0);
    let mut nilpotency_index = None;
    let mut power = QMatrix::identity(n + 1);
    let mut powers = vec![power.clone()];
    for k in 1..=n + 1 {
        power = &power * &big_n;
        powers.push(power.clone());
        if nilpotency_index.is_none() && power.is_zero() {
            nilpotency_index = Some(k);
        }
    }
    Ok(NilpotencyCertificate {
        n,
        truncation,
        g0_is_t,
        pole_free,
        residue: (0..=n).map(|i| (0..=n).map(|j| big_n.get(i, j).clone()).collect()).collect(),
        power_n_nonzero: !powers[n].is_zero(),
        power_n_plus_1_zero: powers[n + 1].is_zero(),
        nilpotency_index,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_by_two() {
        let a = DNMatrix::from_int_rows(&[&[0, 1], &[1, 0]]);
        let c = infinity_exponents(&a, 3).unwrap();
        assert!(c.certified());
        assert_eq!(c.nilpotency_index, Some(2));
        // N = [[0,0],[1,0]]
        assert_eq!(c.residue_matrix(), QMatrix::from_ints(&[&[0, 0], &[1, 0]]));
        assert_eq!(infinity_exponents(&a, 2).unwrap_err(), SpectralError::TruncationTooSmall { truncation: 2, required: 3 });
    }

    #[test]
    fn nonsymmetric_and_larger() {
        let a = DNMatrix::from_int_rows(&[&[3, -1, 2, 5], &[1, 0, 4, -2], &[0, 1, 1, 1], &[0, 0, 1, -6]]);
        let c = infinity_exponents(&a, 8).unwrap();
        assert!(c.certified());
        assert_eq!(c.nilpotency_index, Some(4));
    }

    #[test]
    fn shear_bookkeeping() {
        let a = DNMatrix::from_int_rows(&[&[1, 2, 3], &[1, 4, 5], &[0, 1, 6]]);
        let g = TruncatedSeriesMatrix::infinity_connection(&a, 6);
        let s = g.shear(&[0, 1, 2]);
        assert_eq!(s.valuation(), -2);
        assert_eq!(s.precision(), 4);
        // undoing the shear restores G on the common range
        let back = s.shear(&[0, -1, -2]);
        for k in 0..back.precision() {
            assert_eq!(back.coeff(k), g.coeff(k));
        }
    }
}
