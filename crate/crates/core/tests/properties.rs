use dnkit::detright::{detright_forward, detright_permutation, detright_reverse, AlmostTriangularMatrix};
use dnkit::dn::{build_l_infinity, canonical_form, check_adjoint, check_symmetry, from_dn0, reconstruct, to_dn0, DNMatrix};
use dnkit::random;
use dnkit::scalar::GaussRational;
use dnkit::spectral::{analyze_spectrum, eigendecompose, residue_matrices, residue_structure, DEFAULT_TOL};
use dnkit::weyl::{from_canonical, to_canonical, WeylElement};
use proptest::prelude::*;

fn scalar() -> impl Strategy<Value = GaussRational> {
    (-6i64..=6, 1i64..=4, -3i64..=3).prop_map(|(p, q, im)| GaussRational::from_ratio(p, q) + GaussRational::from_int(im) * GaussRational::i())
}

fn real_scalar() -> impl Strategy<Value = GaussRational> {
    (-6i64..=6, 1i64..=4).prop_map(|(p, q)| GaussRational::from_ratio(p, q))
}

fn weyl(max_degree: u32) -> impl Strategy<Value = WeylElement> {
    prop::collection::vec((0..=max_degree, 0..=max_degree, scalar()), 0..5).prop_map(|terms| WeylElement::from_terms(terms.into_iter().map(|(y, x, c)| ((y, x), c))))
}

fn dn_matrix(max_n: usize) -> impl Strategy<Value = DNMatrix> {
    (0..=max_n).prop_flat_map(|n| {
        let count = (n + 1) * (n + 2) / 2;
        prop::collection::vec(scalar(), count).prop_map(move |vals| {
            let mut it = vals.into_iter();
            DNMatrix::from_upper(n, |_, _| it.next().unwrap())
        })
    })
}

/// `A = A^τ` with real rational entries: each reflection pair shares a value.
fn symmetric_matrix(max_n: usize) -> impl Strategy<Value = DNMatrix> {
    (1..=max_n).prop_flat_map(|n| {
        let count = (n + 1) * (n + 2) / 2;
        prop::collection::vec(real_scalar(), count).prop_map(move |vals| {
            let mut a = DNMatrix::zeros(n);
            let mut k = 0;
            for i in 0..=n {
                for j in i..=n {
                    if (i, j) <= (n - j, n - i) {
                        a.set(i, j, vals[k].clone());
                        a.set(n - j, n - i, vals[k].clone());
                    }
                    k += 1;
                }
            }
            a
        })
    })
}

fn almost_triangular() -> impl Strategy<Value = AlmostTriangularMatrix> {
    (2usize..=4).prop_flat_map(|size| {
        prop::collection::vec(weyl(2), size * (size + 1) / 2 + size - 1).prop_map(move |vals| {
            let mut it = vals.into_iter();
            AlmostTriangularMatrix::from_upper(size, |_, _| it.next().unwrap())
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn multiplication_is_associative(a in weyl(3), b in weyl(3), c in weyl(3)) {
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
    }

    #[test]
    fn multiplication_distributes(a in weyl(3), b in weyl(3), c in weyl(3)) {
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&(&a + &b) * &c, &(&a * &c) + &(&b * &c));
    }

    #[test]
    fn commutator_of_generators_is_one(a in weyl(3)) {
        let (x, y) = (WeylElement::x(), WeylElement::y());
        let bracket = &(&x * &y) - &(&y * &x);
        prop_assert_eq!(&bracket, &WeylElement::one());
        // [X, a] = da/dY for every a, so [X, Y^k] acts as a derivation
        let lhs = &(&x * &a) - &(&a * &x);
        let derivative = WeylElement::from_terms(a.terms().filter(|((y, _), _)| *y > 0).map(|(&(y, x), c)| ((y - 1, x), c * &GaussRational::from_int(y as i64))));
        prop_assert_eq!(lhs, derivative);
    }

    #[test]
    fn adjoint_is_an_anti_involution(a in weyl(3), b in weyl(3)) {
        prop_assert_eq!((&a * &b).adjoint(), &b.adjoint() * &a.adjoint());
        prop_assert_eq!(a.adjoint().adjoint(), a.clone());
        prop_assert_eq!((&a + &b).adjoint(), &a.adjoint() + &b.adjoint());
    }

    #[test]
    fn right_division_by_x_inverts_multiplication(a in weyl(3)) {
        let ax = &a * &WeylElement::x();
        prop_assert_eq!(ax.right_divide_by_x().unwrap(), a);
    }

    #[test]
    fn determinant_routes_agree(m in almost_triangular()) {
        let forward = detright_forward(&m);
        prop_assert_eq!(&forward, &detright_reverse(&m));
        prop_assert_eq!(&forward, &detright_permutation(m.matrix(), 10_000).unwrap());
    }

    #[test]
    fn tau_is_an_involution(a in dn_matrix(4)) {
        prop_assert_eq!(a.tau().tau(), a.clone());
        prop_assert_eq!(a.tau().trace(), a.trace());
    }

    #[test]
    fn canonical_form_round_trips(a in dn_matrix(3)) {
        let l = build_l_infinity(&a).unwrap();
        let c = to_canonical(&l, a.n()).unwrap();
        prop_assert_eq!(&from_canonical(&c), &l);
        prop_assert_eq!(&c, &canonical_form(&a).unwrap());
        prop_assert_eq!(from_dn0(&to_dn0(&c)), c.clone());
        prop_assert_eq!(reconstruct(&c).unwrap(), a);
    }

    #[test]
    fn symmetric_matrices_give_self_adjoint_operators(a in symmetric_matrix(3)) {
        prop_assert!(a.is_symmetric());
        let c = canonical_form(&a).unwrap();
        prop_assert!(check_symmetry(&c));
        prop_assert!(check_adjoint(&build_l_infinity(&a).unwrap(), a.n()));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn residue_matrices_have_the_stated_structure(seed in any::<u64>(), n in 1usize..=4) {
        let mut rng = random::rng(seed);
        let a = random::symmetric_diagonalizable(&mut rng, n, 0.3);
        let spec = analyze_spectrum(&a, DEFAULT_TOL).unwrap();
        let s = residue_structure(&spec);
        prop_assert!(s.max_trace_error <= 1e-9, "{:?}", s);
        prop_assert!(s.max_rank_ratio() <= 1e-9, "{:?}", s);
        prop_assert!(s.max_kernel_residual <= 1e-9, "{:?}", s);
        prop_assert!(s.max_eigenvector_residual <= 1e-9, "{:?}", s);
    }

    #[test]
    fn residue_matrices_of_general_matrices_are_rank_one(seed in any::<u64>(), n in 1usize..=4) {
        let mut rng = random::rng(seed);
        let a = dnkit::verify::general_sample(&mut rng, n);
        // without symmetry u^t J u may vanish, so the basis is left unnormalized
        let spec = residue_matrices(eigendecompose(&a, DEFAULT_TOL).unwrap()).unwrap();
        let s = residue_structure(&spec);
        prop_assert!(s.max_rank_ratio() <= 1e-9, "{:?}", s);
        prop_assert!(s.max_kernel_residual <= 1e-9, "{:?}", s);
    }
}
