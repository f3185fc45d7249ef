//! Right determinants of square matrices over the Weyl algebra.
//!
//! The right determinant expands along the rightmost column, so in the full
//! permutation sum the factor from column `n` sits leftmost:
//! `Σ_σ sign(σ) M[σ(n)][n] ⋯ M[σ(0)][0]`. For almost triangular matrices the
//! same value comes out of two linear recursions over principal minors.

use thiserror::Error;

use crate::weyl::WeylElement;

/// Largest size accepted by the factorial-cost permutation expansion.
pub const DEFAULT_PERMUTATION_BOUND: usize = 7;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DetError {
    #[error("matrix must be square and nonempty")]
    NotSquare,
    #[error("entry ({i},{j}) violates the almost triangular shape")]
    NotAlmostTriangular { i: usize, j: usize },
    #[error("permutation expansion of size {size} exceeds the bound {bound}")]
    SizeExceeded { size: usize, bound: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OperatorMatrix {
    rows: Vec<Vec<WeylElement>>,
}

impl OperatorMatrix {
    pub fn new(rows: Vec<Vec<WeylElement>>) -> Result<Self, DetError> {
        let n = rows.len();
        if n == 0 || rows.iter().any(|r| r.len() != n) {
            return Err(DetError::NotSquare);
        }
        Ok(OperatorMatrix { rows })
    }

    pub fn from_fn(size: usize, mut f: impl FnMut(usize, usize) -> WeylElement) -> Self {
        assert!(size > 0, "operator matrices are nonempty");
        OperatorMatrix { rows: (0..size).map(|i| (0..size).map(|j| f(i, j)).collect()).collect() }
    }

    pub fn identity(size: usize) -> Self {
        Self::from_fn(size, |i, j| if i == j { WeylElement::one() } else { WeylElement::zero() })
    }

    pub fn size(&self) -> usize {
        self.rows.len()
    }

    pub fn get(&self, i: usize, j: usize) -> &WeylElement {
        &self.rows[i][j]
    }

    pub fn rows(&self) -> &[Vec<WeylElement>] {
        &self.rows
    }

    /// Reflection across the anti-diagonal: `(M^τ)[i][j] = M[n−j][n−i]`.
    pub fn tau(&self) -> Self {
        let n = self.size() - 1;
        Self::from_fn(n + 1, |i, j| self.rows[n - j][n - i].clone())
    }

    /// `M′[i][j] = (−1)^(j−i+1) M[i][j]`.
    pub fn sign_conjugate(&self) -> Self {
        Self::from_fn(self.size(), |i, j| {
            let e = &self.rows[i][j];
            if (j as i64 - i as i64 + 1).rem_euclid(2) == 0 {
                e.clone()
            } else {
                -e
            }
        })
    }

    /// Applies the adjoint anti-involution to every entry.
    pub fn entrywise_adjoint(&self) -> Self {
        Self::from_fn(self.size(), |i, j| self.rows[i][j].adjoint())
    }
}

/// A matrix with zeros below the subdiagonal and `−1` on it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlmostTriangularMatrix(OperatorMatrix);

impl AlmostTriangularMatrix {
    pub fn new(m: OperatorMatrix) -> Result<Self, DetError> {
        let minus_one = -&WeylElement::one();
        for i in 0..m.size() {
            for j in 0..m.size() {
                let ok = if i > j + 1 {
                    m.get(i, j).is_zero()
                } else if i == j + 1 {
                    *m.get(i, j) == minus_one
                } else {
                    true
                };
                if !ok {
                    return Err(DetError::NotAlmostTriangular { i, j });
                }
            }
        }
        Ok(AlmostTriangularMatrix(m))
    }

    /// Builds from the entries on and above the diagonal; `upper(i, j)` is only
    /// called for `i ≤ j`.
    pub fn from_upper(size: usize, mut upper: impl FnMut(usize, usize) -> WeylElement) -> Self {
        AlmostTriangularMatrix(OperatorMatrix::from_fn(size, |i, j| {
            if i <= j {
                upper(i, j)
            } else if i == j + 1 {
                -&WeylElement::one()
            } else {
                WeylElement::zero()
            }
        }))
    }

    pub fn matrix(&self) -> &OperatorMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> OperatorMatrix {
        self.0
    }

    pub fn size(&self) -> usize {
        self.0.size()
    }

    /// τ preserves the almost triangular shape.
    pub fn tau(&self) -> Self {
        AlmostTriangularMatrix(self.0.tau())
    }

    pub fn entrywise_adjoint(&self) -> Self {
        // the adjoint fixes the scalars −1 and 0
        AlmostTriangularMatrix(self.0.entrywise_adjoint())
    }
}

/// Right principal minors `P_0 = 1, P_(j+1) = Σ_(i≤j) M[i][j] P_i`.
pub fn right_principal_minors(m: &AlmostTriangularMatrix) -> Vec<WeylElement> {
    let mm = m.matrix();
    let mut p = vec![WeylElement::one()];
    for j in 0..mm.size() {
        let mut next = WeylElement::zero();
        for (i, pi) in p.iter().enumerate() {
            let e = mm.get(i, j);
            if !e.is_zero() {
                next = &next + &(e * pi);
            }
        }
        p.push(next);
    }
    p
}

pub fn detright_forward(m: &AlmostTriangularMatrix) -> WeylElement {
    right_principal_minors(m).pop().expect("at least P_0")
}

/// `Q_0 = 1, Q_(j+1) = Σ_(i≤j) Q_i M[n−j][n−i]`.
pub fn reverse_minors(m: &AlmostTriangularMatrix) -> Vec<WeylElement> {
    let mm = m.matrix();
    let n = mm.size() - 1;
    let mut q = vec![WeylElement::one()];
    for j in 0..=n {
        let mut next = WeylElement::zero();
        for (i, qi) in q.iter().enumerate() {
            let e = mm.get(n - j, n - i);
            if !e.is_zero() {
                next = &next + &(qi * e);
            }
        }
        q.push(next);
    }
    q
}

pub fn detright_reverse(m: &AlmostTriangularMatrix) -> WeylElement {
    reverse_minors(m).pop().expect("at least Q_0")
}

/// Full signed permutation sum; the independent oracle for the recursions.
pub fn detright_permutation(m: &OperatorMatrix, bound: usize) -> Result<WeylElement, DetError> {
    let size = m.size();
    if size > bound {
        return Err(DetError::SizeExceeded { size, bound });
    }
    let mut perm: Vec<usize> = (0..size).collect();
    let mut total = WeylElement::zero();
    permute(m, &mut perm, 0, 1, &mut total);
    Ok(total)
}

/// Enumerates permutations by fixing positions from column 0 upward; `sign`
/// is the parity accumulated by the swaps so far.
fn permute(m: &OperatorMatrix, perm: &mut Vec<usize>, k: usize, sign: i64, total: &mut WeylElement) {
    let size = perm.len();
    if k == size {
        // M[σ(n)][n] ⋯ M[σ(0)][0]
        let mut prod = WeylElement::one();
        for col in (0..size).rev() {
            let e = m.get(perm[col], col);
            prod = &prod * e;
        }
        *total = if sign > 0 { &*total + &prod } else { &*total - &prod };
        return;
    }
    for i in k..size {
        perm.swap(k, i);
        if !m.get(perm[k], k).is_zero() {
            permute(m, perm, k + 1, if i == k { sign } else { -sign }, total);
        }
        perm.swap(k, i);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::GaussRational;

    fn c(v: i64) -> WeylElement {
        WeylElement::constant(GaussRational::from_int(v))
    }

    fn y() -> WeylElement {
        WeylElement::y()
    }

    fn x() -> WeylElement {
        WeylElement::x()
    }

    #[test]
    fn two_by_two_factor_order() {
        // noncommuting entries make the factor order visible
        let (a, b, d) = (y(), &x() + &c(2), x());
        let m = AlmostTriangularMatrix::from_upper(2, |i, j| match (i, j) {
            (0, 0) => a.clone(),
            (0, 1) => b.clone(),
            _ => d.clone(),
        });
        let expect = &(&d * &a) + &b;
        assert_eq!(detright_forward(&m), expect);
        assert_eq!(detright_reverse(&m), expect);
        assert_eq!(detright_permutation(m.matrix(), 7).unwrap(), expect);

        let general = OperatorMatrix::new(vec![vec![a.clone(), b.clone()], vec![y(), d.clone()]]).unwrap();
        assert_eq!(detright_permutation(&general, 7).unwrap(), &(&d * &a) - &(&b * &y()));
    }

    #[test]
    fn unit_and_zero_row() {
        for size in 1..5 {
            assert_eq!(detright_permutation(&OperatorMatrix::identity(size), 7).unwrap(), WeylElement::one());
            let m = AlmostTriangularMatrix::from_upper(size, |i, j| if i == j { WeylElement::one() } else { WeylElement::zero() });
            assert_eq!(detright_forward(&m), WeylElement::one());
            assert_eq!(detright_reverse(&m), WeylElement::one());
        }
        let m = AlmostTriangularMatrix::from_upper(3, |i, j| if i == 0 { WeylElement::zero() } else { &y() * &c((i + j) as i64) });
        assert!(detright_forward(&m).is_zero());
        assert!(detright_reverse(&m).is_zero());
        assert!(detright_permutation(m.matrix(), 7).unwrap().is_zero());
    }

    #[test]
    fn minors_are_exposed() {
        let m = AlmostTriangularMatrix::from_upper(3, |i, j| c((1 + i + 2 * j) as i64));
        let p = right_principal_minors(&m);
        assert_eq!(p.len(), 4);
        assert_eq!(p[1], c(1));
        // P_2 = M01 P0 + M11 P1 = 3 + 4
        assert_eq!(p[2], c(7));
    }

    #[test]
    fn shape_validation() {
        let bad = OperatorMatrix::from_fn(2, |_, _| WeylElement::one());
        assert_eq!(AlmostTriangularMatrix::new(bad), Err(DetError::NotAlmostTriangular { i: 1, j: 0 }));
        assert_eq!(OperatorMatrix::new(vec![vec![c(1), c(2)]]), Err(DetError::NotSquare));
        let big = OperatorMatrix::identity(8);
        assert_eq!(detright_permutation(&big, DEFAULT_PERMUTATION_BOUND), Err(DetError::SizeExceeded { size: 8, bound: 7 }));
    }

    #[test]
    fn tau_and_signs() {
        let m = OperatorMatrix::from_fn(3, |i, j| &y().pow(i as u32) * &x().pow(j as u32));
        assert_eq!(m.tau().tau(), m);
        assert_eq!(*m.tau().get(0, 1), *m.get(1, 2));
        let d = OperatorMatrix::from_fn(3, |i, j| if i == j { c(i as i64 + 1) } else { WeylElement::zero() });
        assert_eq!(*d.tau().get(0, 0), c(3));
        assert_eq!(*d.tau().get(2, 2), c(1));

        let one = OperatorMatrix::new(vec![vec![y()]]).unwrap();
        // the (0,0) entry carries the sign (−1)^1, and the determinant flips with it
        assert_eq!(*one.sign_conjugate().get(0, 0), -&y());
        let det = detright_permutation(&one, 7).unwrap();
        assert_eq!(detright_permutation(&one.sign_conjugate(), 7).unwrap(), -&det);

        let two = OperatorMatrix::new(vec![vec![y(), x()], vec![&x() * &y(), c(3)]]).unwrap();
        // n = 1: (−1)^(n+1) = 1
        assert_eq!(detright_permutation(&two.sign_conjugate(), 7).unwrap(), detright_permutation(&two, 7).unwrap());
    }
}
