//! Small dense matrices over the Gaussian rationals.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_traits::{One, Zero};

use crate::scalar::GaussRational;

#[derive(Clone, PartialEq, Eq)]
pub struct QMatrix {
    rows: usize,
    cols: usize,
    data: Vec<GaussRational>,
}

impl QMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        QMatrix { rows, cols, data: vec![GaussRational::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { GaussRational::one() } else { GaussRational::zero() })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> GaussRational) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        QMatrix { rows, cols, data }
    }

    pub fn from_ints(rows: &[&[i64]]) -> Self {
        Self::from_fn(rows.len(), rows.first().map_or(0, |r| r.len()), |i, j| GaussRational::from_int(rows[i][j]))
    }

    pub fn diag(d: &[GaussRational]) -> Self {
        Self::from_fn(d.len(), d.len(), |i, j| if i == j { d[i].clone() } else { GaussRational::zero() })
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &GaussRational {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: GaussRational) {
        self.data[i * self.cols + j] = v;
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|c| c.is_zero())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn scale(&self, c: &GaussRational) -> Self {
        QMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|v| v * c).collect() }
    }

    pub fn pow(&self, e: u32) -> Self {
        (0..e).fold(Self::identity(self.rows), |acc, _| &acc * self)
    }

    pub fn to_complex(&self) -> DMatrix<Complex64> {
        DMatrix::from_fn(self.rows, self.cols, |i, j| self.get(i, j).to_complex())
    }

    /// Row echelon form by Gaussian elimination; returns the pivot columns.
    fn echelon(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| !self.get(i, c).is_zero()) else { continue };
            if p != r {
                for j in 0..self.cols {
                    self.data.swap(p * self.cols + j, r * self.cols + j);
                }
            }
            let inv = self.get(r, c).inv().expect("nonzero pivot");
            for j in c..self.cols {
                let v = self.get(r, j) * &inv;
                self.set(r, j, v);
            }
            for i in 0..self.rows {
                if i == r || self.get(i, c).is_zero() {
                    continue;
                }
                let f = self.get(i, c).clone();
                for j in c..self.cols {
                    let v = self.get(i, j) - &(&f * self.get(r, j));
                    self.set(i, j, v);
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        self.clone().echelon().len()
    }

    pub fn det(&self) -> GaussRational {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let n = self.rows;
        let mut m = self.clone();
        let mut det = GaussRational::one();
        for c in 0..n {
            let Some(p) = (c..n).find(|&i| !m.get(i, c).is_zero()) else { return GaussRational::zero() };
            if p != c {
                for j in 0..n {
                    m.data.swap(p * n + j, c * n + j);
                }
                det = -det;
            }
            let piv = m.get(c, c).clone();
            det = &det * &piv;
            let inv = piv.inv().expect("nonzero pivot");
            for i in c + 1..n {
                if m.get(i, c).is_zero() {
                    continue;
                }
                let f = m.get(i, c) * &inv;
                for j in c..n {
                    let v = m.get(i, j) - &(&f * m.get(c, j));
                    m.set(i, j, v);
                }
            }
        }
        det
    }

    /// Solves `self · x = b` for square invertible `self`.
    pub fn solve(&self, b: &[GaussRational]) -> Option<Vec<GaussRational>> {
        let n = self.rows;
        if self.cols != n || b.len() != n {
            return None;
        }
        let mut aug = Self::from_fn(n, n + 1, |i, j| if j < n { self.get(i, j).clone() } else { b[i].clone() });
        let piv = aug.echelon();
        if piv.len() != n || piv[n - 1] != n - 1 {
            return None;
        }
        Some((0..n).map(|i| aug.get(i, n).clone()).collect())
    }

    pub fn inverse(&self) -> Option<Self> {
        let n = self.rows;
        if self.cols != n {
            return None;
        }
        let mut aug = Self::from_fn(n, 2 * n, |i, j| {
            if j < n {
                self.get(i, j).clone()
            } else if j - n == i {
                GaussRational::one()
            } else {
                GaussRational::zero()
            }
        });
        let piv = aug.echelon();
        if piv.len() != n || piv[n - 1] != n - 1 {
            return None;
        }
        Some(Self::from_fn(n, n, |i, j| aug.get(i, n + j).clone()))
    }
}

impl Mul<&QMatrix> for &QMatrix {
    type Output = QMatrix;
    fn mul(self, o: &QMatrix) -> QMatrix {
        assert_eq!(self.cols, o.rows, "dimension mismatch");
        let mut out = QMatrix::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    let b = o.get(k, j);
                    if !b.is_zero() {
                        out.data[i * o.cols + j] += &(a * b);
                    }
                }
            }
        }
        out
    }
}

impl Add<&QMatrix> for &QMatrix {
    type Output = QMatrix;
    fn add(self, o: &QMatrix) -> QMatrix {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols), "dimension mismatch");
        QMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().zip(&o.data).map(|(a, b)| a + b).collect() }
    }
}

impl Sub<&QMatrix> for &QMatrix {
    type Output = QMatrix;
    fn sub(self, o: &QMatrix) -> QMatrix {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols), "dimension mismatch");
        QMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().zip(&o.data).map(|(a, b)| a - b).collect() }
    }
}

impl fmt::Debug for QMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "[")?;
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| self.get(i, j).to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solve_inverse_det() {
        let m = QMatrix::from_ints(&[&[2, 1, 0], &[1, 3, 1], &[0, 1, 4]]);
        assert_eq!(m.det(), GaussRational::from_int(18));
        let inv = m.inverse().unwrap();
        assert_eq!(&m * &inv, QMatrix::identity(3));
        let b = vec![GaussRational::from_int(1), GaussRational::from_int(2), GaussRational::from_int(3)];
        let x = m.solve(&b).unwrap();
        let mx: Vec<GaussRational> = (0..3).map(|i| (0..3).fold(GaussRational::zero(), |acc, j| &acc + &(m.get(i, j) * &x[j]))).collect();
        assert_eq!(mx, b);
    }

    #[test]
    fn singular_cases() {
        let m = QMatrix::from_ints(&[&[1, 2], &[2, 4]]);
        assert!(m.det().is_zero());
        assert!(m.inverse().is_none());
        assert_eq!(m.rank(), 1);
        assert!(m.solve(&[GaussRational::one(), GaussRational::one()]).is_none());
    }
}
