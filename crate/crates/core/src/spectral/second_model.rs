//! The second-model module, exactly: the free module on `η_0, …, η_n` over
//! `ℚ(i)[t, χ^(−1)]`, with the Weyl algebra acting on the right through
//! `(η_0, …, η_n)·∂ = (η_0, …, η_n)·T(A − t)^(−1)` and `η·t = t·η`.

use num_traits::Zero;

use crate::dn::DNMatrix;
use crate::linalg::QMatrix;
use crate::poly::Poly;
use crate::scalar::GaussRational;
use crate::weyl::WeylElement;

/// `Σ_i η_i · numerators_i / χ^power`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModuleVector {
    pub numerators: Vec<Poly>,
    pub power: u32,
}

impl ModuleVector {
    pub fn is_zero(&self) -> bool {
        self.numerators.iter().all(Poly::is_zero)
    }
}

pub struct SecondModel {
    size: usize,
    /// `χ = det(t·I − A)`.
    chi: Poly,
    /// `adj(t·I − A) = Σ_k t^k adj[k]`.
    adj: Vec<QMatrix>,
}

/// `χ = det(t·I − A)` and the coefficients of `adj(t·I − A) = Σ_k t^k B_k`
/// by Faddeev–LeVerrier: `B_(N−1) = I`, `B_(k−1) = A B_k + c_k I`.
pub fn adjugate_pencil(a: &DNMatrix) -> (Poly, Vec<QMatrix>) {
    let size = a.size();
    let am = a.to_qmatrix();
    let chi = a.characteristic_polynomial();
    let mut adj = vec![QMatrix::zeros(size, size); size];
    adj[size - 1] = QMatrix::identity(size);
    for k in (1..size).rev() {
        adj[k - 1] = &(&am * &adj[k]) + &QMatrix::identity(size).scale(&chi.coeff(k));
    }
    debug_assert!((&(&am * &adj[0]) + &QMatrix::identity(size).scale(&chi.coeff(0))).is_zero());
    (chi, adj)
}

impl SecondModel {
    pub fn new(a: &DNMatrix) -> Self {
        let (chi, adj) = adjugate_pencil(a);
        SecondModel { size: a.size(), chi, adj }
    }

    pub fn basis(&self, i: usize) -> ModuleVector {
        let numerators = (0..self.size).map(|k| if k == i { Poly::one() } else { Poly::zero() }).collect();
        ModuleVector { numerators, power: 0 }
    }

    pub fn zero(&self) -> ModuleVector {
        ModuleVector { numerators: vec![Poly::zero(); self.size], power: 0 }
    }

    fn raise(&self, v: &ModuleVector, power: u32) -> ModuleVector {
        let f = self.chi.pow(power - v.power);
        ModuleVector { numerators: v.numerators.iter().map(|p| p * &f).collect(), power }
    }

    pub fn add(&self, a: &ModuleVector, b: &ModuleVector) -> ModuleVector {
        let p = a.power.max(b.power);
        let (a, b) = (self.raise(a, p), self.raise(b, p));
        ModuleVector { numerators: a.numerators.iter().zip(&b.numerators).map(|(x, y)| x + y).collect(), power: p }
    }

    pub fn scale(&self, v: &ModuleVector, c: &GaussRational) -> ModuleVector {
        ModuleVector { numerators: v.numerators.iter().map(|p| p.scale(c)).collect(), power: v.power }
    }

    pub fn mul_t(&self, v: &ModuleVector) -> ModuleVector {
        ModuleVector { numerators: v.numerators.iter().map(|p| p * &Poly::x()).collect(), power: v.power }
    }

    /// `v·∂` for `v = η·c`: `(η c)∂ = (η∂)c − η c′`, with coordinates
    /// `T(A − t)^(−1) c − c′ = (−T adj·N − N′χ + m N χ′)/χ^(m+1)` for
    /// `c = N/χ^m`.
    pub fn mul_d(&self, v: &ModuleVector) -> ModuleVector {
        let m = GaussRational::from_int(v.power as i64);
        let dchi = self.chi.derivative();
        let mut out = Vec::with_capacity(self.size);
        for i in 0..self.size {
            let mut row = Poly::zero();
            for (k, b) in self.adj.iter().enumerate() {
                let mut s = Poly::zero();
                for j in 0..self.size {
                    if !b.get(i, j).is_zero() {
                        s = &s + &v.numerators[j].scale(b.get(i, j));
                    }
                }
                row = &row + &(&s * &Poly::x().pow(k as u32));
            }
            let t_part = row.scale(&GaussRational::from_int(-(i as i64)));
            let deriv = &(&v.numerators[i].derivative() * &self.chi) - &(&v.numerators[i] * &dchi).scale(&m);
            out.push(&t_part - &deriv);
        }
        ModuleVector { numerators: out, power: v.power + 1 }
    }

    /// `v·L` for a Weyl element `L = Σ c·Y^a X^b`.
    pub fn act(&self, v: &ModuleVector, l: &WeylElement) -> ModuleVector {
        let mut total = self.zero();
        for (&(a, b), c) in l.terms() {
            let mut w = v.clone();
            for _ in 0..a {
                w = self.mul_t(&w);
            }
            for _ in 0..b {
                w = self.mul_d(&w);
            }
            total = self.add(&total, &self.scale(&w, c));
        }
        total
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::detright::{detright_forward, AlmostTriangularMatrix};

    /// `∂t·I − Ã^τ`, with `(Ã^τ)_ij = a_(n−j,n−i) ∂^(j−i+1)`.
    fn reflected_operator_matrix(a: &DNMatrix) -> AlmostTriangularMatrix {
        let n = a.n();
        let dt = &WeylElement::x() * &WeylElement::y();
        AlmostTriangularMatrix::from_upper(a.size(), |i, j| {
            let e = WeylElement::monomial(-a.upper(n - j, n - i).clone(), 0, (j - i + 1) as u32);
            if i == j {
                &dt + &e
            } else {
                e
            }
        })
    }

    fn check(a: &DNMatrix) {
        let model = SecondModel::new(a);
        let n = a.n();
        let xi: Vec<ModuleVector> = (0..=n).map(|k| model.act(&model.basis(k), &WeylElement::x().pow(k as u32))).collect();
        // (ξ'_0, …, ξ'_n)(∂t − Ã) = 0 column by column
        let dt = &WeylElement::x() * &WeylElement::y();
        for j in 0..=n {
            let mut col = model.act(&xi[j], &dt);
            for (i, x) in xi.iter().enumerate().take(j + 2).filter(|(i, _)| *i <= n) {
                let entry = if i <= j {
                    WeylElement::monomial(a.upper(i, j).clone(), 0, (j - i + 1) as u32)
                } else {
                    WeylElement::one()
                };
                col = model.add(&col, &model.scale(&model.act(x, &entry), &GaussRational::from_int(-1)));
            }
            assert!(col.is_zero(), "column {j} does not vanish");
        }
        let det = detright_forward(&reflected_operator_matrix(a));
        assert!(model.act(&model.basis(0), &det).is_zero());
    }

    #[test]
    fn cayley_hamilton_annihilation() {
        check(&DNMatrix::from_int_rows(&[&[0, 1], &[1, 0]]));
        check(&DNMatrix::from_int_rows(&[&[1, 2, 3], &[1, -1, 4], &[0, 1, 2]]));
        check(&DNMatrix::from_int_rows(&[&[2, 0, 1, -1], &[1, 1, 3, 2], &[0, 1, -2, 5], &[0, 0, 1, 1]]));
    }

    #[test]
    fn other_basis_vectors_are_not_annihilated() {
        let a = DNMatrix::from_int_rows(&[&[1, 2, 3], &[1, -1, 4], &[0, 1, 2]]);
        let model = SecondModel::new(&a);
        let det = detright_forward(&reflected_operator_matrix(&a));
        assert!(!model.act(&model.basis(1), &det).is_zero());
    }
}
