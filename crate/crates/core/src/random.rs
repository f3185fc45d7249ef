//! Seeded generators for property suites. Everything is driven by a
//! `ChaCha8Rng`, so a seed reproduces a sample bit for bit.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::detright::AlmostTriangularMatrix;
use crate::dn::DNMatrix;
use crate::numeric::{aberth, min_separation};
use crate::scalar::GaussRational;
use crate::weyl::WeylElement;

pub type SeededRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `p/q` with `|p| ≤ bound`, `q ∈ {1, 2, 3}`; integers half the time.
pub fn small_rational(rng: &mut impl Rng, bound: i64) -> GaussRational {
    let p = rng.gen_range(-bound..=bound);
    let q = if rng.gen_bool(0.5) { 1 } else { rng.gen_range(2..=3) };
    GaussRational::from_ratio(p, q)
}

/// Occasionally carries an imaginary part.
pub fn small_gaussian(rng: &mut impl Rng, bound: i64) -> GaussRational {
    let re = small_rational(rng, bound);
    if rng.gen_bool(0.2) {
        &re + &(&GaussRational::i() * &small_rational(rng, bound))
    } else {
        re
    }
}

/// A Weyl element with at most `terms` monomials `Y^a X^b`, `a, b ≤ degree`.
pub fn weyl_element(rng: &mut impl Rng, degree: u32, terms: usize) -> WeylElement {
    let k = rng.gen_range(0..=terms);
    WeylElement::from_terms((0..k).map(|_| ((rng.gen_range(0..=degree), rng.gen_range(0..=degree)), small_gaussian(rng, 4))))
}

pub fn almost_triangular(rng: &mut impl Rng, size: usize, degree: u32) -> AlmostTriangularMatrix {
    AlmostTriangularMatrix::from_upper(size, |_, _| weyl_element(rng, degree, 3))
}

pub fn dn_matrix(rng: &mut impl Rng, n: usize) -> DNMatrix {
    DNMatrix::from_upper(n, |_, _| small_gaussian(rng, 3))
}

/// `A = A^τ` with rational entries.
pub fn symmetric_dn_matrix(rng: &mut impl Rng, n: usize) -> DNMatrix {
    let mut a = DNMatrix::zeros(n);
    for i in 0..=n {
        for j in i..=n {
            // (i, j) and its reflection (n−j, n−i) share one draw
            if (i, j) <= (n - j, n - i) {
                let v = small_rational(rng, 3);
                a.set(i, j, v.clone());
                a.set(n - j, n - i, v);
            }
        }
    }
    a
}

/// A symmetric matrix with squarefree characteristic polynomial whose
/// eigenvalues are at least `min_gap` apart. Rejection sampling.
pub fn symmetric_diagonalizable(rng: &mut impl Rng, n: usize, min_gap: f64) -> DNMatrix {
    loop {
        let a = symmetric_dn_matrix(rng, n);
        let chi = a.characteristic_polynomial();
        if !chi.is_squarefree() {
            continue;
        }
        let Ok(roots) = aberth(&chi.to_complex_coeffs(), 1e-13) else { continue };
        if n == 0 || min_separation(&roots) >= min_gap {
            return a;
        }
    }
}

/// Adds a nonzero rational to one entry off the reflection axis
/// `i + j = n`, which breaks `A = A^τ`. Returns the perturbed entry.
pub fn break_symmetry(rng: &mut impl Rng, a: &DNMatrix) -> (DNMatrix, (usize, usize)) {
    let n = a.n();
    assert!(n >= 1, "a 1×1 matrix is always symmetric");
    let slots: Vec<(usize, usize)> = (0..=n).flat_map(|i| (i..=n).map(move |j| (i, j))).filter(|&(i, j)| i + j != n).collect();
    let (i, j) = slots[rng.gen_range(0..slots.len())];
    let mut delta = small_rational(rng, 3);
    while delta == GaussRational::from_int(0) {
        delta = small_rational(rng, 3);
    }
    let mut b = a.clone();
    b.set(i, j, a.upper(i, j) + &delta);
    (b, (i, j))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproducible() {
        let a = symmetric_diagonalizable(&mut rng(7), 3, 0.2);
        let b = symmetric_diagonalizable(&mut rng(7), 3, 0.2);
        assert_eq!(a, b);
        assert!(a.is_symmetric());
        assert_eq!(weyl_element(&mut rng(3), 2, 4), weyl_element(&mut rng(3), 2, 4));
    }

    #[test]
    fn perturbation_breaks_symmetry() {
        let mut r = rng(11);
        for n in 1..5 {
            let a = symmetric_dn_matrix(&mut r, n);
            let (b, (i, j)) = break_symmetry(&mut r, &a);
            assert!(!b.is_symmetric());
            assert_ne!(i + j, n);
        }
    }
}
