//! Matrices `A` with `1` on the subdiagonal and zeros below it.

use std::collections::BTreeMap;

use num_complex::Complex64;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::QMatrix;
use crate::numeric::CMatrix;
use crate::poly::Poly;
use crate::scalar::{scalar_from_json, GaussRational, ScalarError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MatrixError {
    #[error("malformed matrix JSON: {0}")]
    Parse(String),
    #[error("bad entry key `{0}`, expected \"i,j\"")]
    BadKey(String),
    #[error("entry ({i},{j}) is outside the upper triangle of a size {size} matrix")]
    OutOfRange { i: usize, j: usize, size: usize },
    #[error("entry ({i},{j}): {source}")]
    Scalar { i: usize, j: usize, source: ScalarError },
    #[error("matrix is flagged symmetric but a_{i}{j} differs from its reflection")]
    SymmetryFlagViolated { i: usize, j: usize },
}

/// How the entries were supplied. Float input is converted exactly (every
/// finite double is a dyadic rational), so both kinds run through the exact
/// layer; the tag is kept for reports.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EntryKind {
    Exact,
    Float,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DNMatrix {
    n: usize,
    /// Row-major `(n+1)²` storage; only `j ≥ i` is meaningful.
    upper: Vec<GaussRational>,
    kind: EntryKind,
}

impl DNMatrix {
    pub fn zeros(n: usize) -> Self {
        DNMatrix { n, upper: vec![GaussRational::zero(); (n + 1) * (n + 1)], kind: EntryKind::Exact }
    }

    /// `f(i, j)` is called for `i ≤ j` only.
    pub fn from_upper(n: usize, mut f: impl FnMut(usize, usize) -> GaussRational) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..=n {
            for j in i..=n {
                m.upper[i * (n + 1) + j] = f(i, j);
            }
        }
        m
    }

    /// Convenience constructor from the full integer matrix; the subdiagonal
    /// and lower part of `rows` are ignored.
    pub fn from_int_rows(rows: &[&[i64]]) -> Self {
        Self::from_upper(rows.len() - 1, |i, j| GaussRational::from_int(rows[i][j]))
    }

    pub fn with_kind(mut self, kind: EntryKind) -> Self {
        self.kind = kind;
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn size(&self) -> usize {
        self.n + 1
    }

    pub fn kind(&self) -> EntryKind {
        self.kind
    }

    /// Entry of the full matrix, including the implicit `1`s and `0`s.
    pub fn get(&self, i: usize, j: usize) -> GaussRational {
        if j >= i {
            self.upper[i * (self.n + 1) + j].clone()
        } else if i == j + 1 {
            GaussRational::one()
        } else {
            GaussRational::zero()
        }
    }

    pub fn upper(&self, i: usize, j: usize) -> &GaussRational {
        assert!(i <= j, "({i},{j}) is not in the upper triangle");
        &self.upper[i * (self.n + 1) + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: GaussRational) {
        assert!(i <= j, "({i},{j}) is not in the upper triangle");
        self.upper[i * (self.n + 1) + j] = v;
    }

    /// Reflection across the anti-diagonal, `a_ij ↦ a_{n−j,n−i}`.
    pub fn tau(&self) -> Self {
        let n = self.n;
        let mut t = Self::from_upper(n, |i, j| self.upper(n - j, n - i).clone());
        t.kind = self.kind;
        t
    }

    /// `A = A^τ`.
    pub fn is_symmetric(&self) -> bool {
        self.first_asymmetry().is_none()
    }

    fn first_asymmetry(&self) -> Option<(usize, usize)> {
        let n = self.n;
        for i in 0..=n {
            for j in i..=n {
                if self.upper(i, j) != self.upper(n - j, n - i) {
                    return Some((i, j));
                }
            }
        }
        None
    }

    pub fn to_qmatrix(&self) -> QMatrix {
        QMatrix::from_fn(self.size(), self.size(), |i, j| self.get(i, j))
    }

    pub fn to_complex(&self) -> CMatrix {
        CMatrix::from_fn(self.size(), self.size(), |i, j| self.get(i, j).to_complex())
    }

    /// `det(t·I − A)` by the Hessenberg recursion
    /// `p_(k+1) = (t − a_kk) p_k − Σ_(i<k) a_ik p_i`, valid because every
    /// subdiagonal entry is `1`.
    pub fn characteristic_polynomial(&self) -> Poly {
        let mut p = vec![Poly::one()];
        for k in 0..=self.n {
            let shift = Poly::from_coeffs(vec![-self.upper(k, k).clone(), GaussRational::one()]);
            let mut next = &shift * &p[k];
            for (i, pi) in p.iter().enumerate().take(k) {
                next = &next - &pi.scale(self.upper(i, k));
            }
            p.push(next);
        }
        p.pop().expect("nonempty")
    }

    pub fn trace(&self) -> GaussRational {
        (0..=self.n).fold(GaussRational::zero(), |acc, i| &acc + self.upper(i, i))
    }

    pub fn max_entry_abs(&self) -> f64 {
        self.upper.iter().map(|v| v.to_complex().norm()).fold(1.0, f64::max)
    }

    pub fn from_json_str(s: &str) -> Result<Self, MatrixError> {
        let v: serde_json::Value = serde_json::from_str(s).map_err(|e| MatrixError::Parse(e.to_string()))?;
        Self::from_json(&v)
    }

    /// `{"n":2,"entries":{"0,0":"1","0,1":"-3/2",...},"symmetric":true}`;
    /// absent upper entries are zero.
    pub fn from_json(v: &serde_json::Value) -> Result<Self, MatrixError> {
        let raw: MatrixJson = serde_json::from_value(v.clone()).map_err(|e| MatrixError::Parse(e.to_string()))?;
        let n = raw.n;
        let mut m = Self::zeros(n);
        let mut any_float = false;
        for (key, val) in &raw.entries {
            let (i, j) = parse_key(key)?;
            if i > j || j > n {
                return Err(MatrixError::OutOfRange { i, j, size: n + 1 });
            }
            let (x, float) = scalar_from_json(val).map_err(|source| MatrixError::Scalar { i, j, source })?;
            any_float |= float;
            m.set(i, j, x);
        }
        if any_float {
            m.kind = EntryKind::Float;
        }
        if raw.symmetric == Some(true) {
            if let Some((i, j)) = m.first_asymmetry() {
                return Err(MatrixError::SymmetryFlagViolated { i, j });
            }
        }
        Ok(m)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let mut entries = BTreeMap::new();
        for i in 0..=self.n {
            for j in i..=self.n {
                let v = self.upper(i, j);
                if !v.is_zero() {
                    entries.insert(format!("{i},{j}"), serde_json::to_value(v).expect("scalar serializes"));
                }
            }
        }
        serde_json::to_value(MatrixJson { n: self.n, entries, symmetric: Some(self.is_symmetric()) }).expect("matrix serializes")
    }

    /// Exact `f64` image of the entries, for reports.
    pub fn complex_rows(&self) -> Vec<Vec<Complex64>> {
        (0..self.size()).map(|i| (0..self.size()).map(|j| self.get(i, j).to_complex()).collect()).collect()
    }
}

#[derive(Serialize, Deserialize)]
struct MatrixJson {
    n: usize,
    #[serde(default)]
    entries: BTreeMap<String, serde_json::Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    symmetric: Option<bool>,
}

fn parse_key(key: &str) -> Result<(usize, usize), MatrixError> {
    let bad = || MatrixError::BadKey(key.to_string());
    let (a, b) = key.split_once(',').ok_or_else(bad)?;
    Ok((a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?))
}
