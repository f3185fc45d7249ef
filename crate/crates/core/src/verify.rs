//! Seeded property suites over every layer, shared by the command-line
//! `verify` command and the test targets. Each suite draws its own stream
//! from the seed, so adding cases to one suite leaves the others unchanged.

use rand::Rng;
use serde::Serialize;

use crate::detright::{detright_forward, detright_permutation, detright_reverse};
use crate::dn::{build_l_infinity, canonical_form, check_adjoint, check_symmetry, reconstruct, residues, DNMatrix};
use crate::monodromy::{hprime_monodromy, hypergeom_structure, monodromy_report, MonodromyConfig, Symmetry};
use crate::random::{self, SeededRng};
use crate::scalar::GaussRational;
use crate::spectral::{analyze_spectrum, eigendecompose, infinity_exponents, residue_matrices, residue_structure, DEFAULT_TOL};
use crate::weyl::WeylElement;

/// Smallest eigenvalue gap accepted for the numerical suites.
pub const SAMPLE_MIN_GAP: f64 = 0.3;
/// Tolerance for the floating-point spectral identities.
pub const SPECTRAL_CHECK_TOL: f64 = 1e-9;
/// Bound on the number of permutations the determinant oracle may expand.
const PERMUTATION_BOUND: usize = 10_000;
const KEPT_FAILURES: usize = 5;

#[derive(Clone, Debug, Serialize)]
pub struct VerifyConfig {
    pub seed: u64,
    /// Operator orders `n` to sample.
    pub sizes: Vec<usize>,
    /// Cases per size for the exact and spectral suites.
    pub cases: usize,
    /// Cases per size for the monodromy suite (orders above 4 are skipped).
    pub monodromy_cases: usize,
    pub truncation: usize,
    pub monodromy: MonodromyConfig,
    /// Feed symmetry-broken matrices to the symmetry suite while still
    /// expecting symmetric verdicts. Only that suite should fail.
    pub corrupt_symmetry: bool,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            seed: 0,
            sizes: vec![1, 2, 3, 4],
            cases: 10,
            monodromy_cases: 2,
            truncation: 12,
            monodromy: MonodromyConfig::default(),
            corrupt_symmetry: false,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteResult {
    pub name: &'static str,
    pub cases: usize,
    pub failures: usize,
    /// The first few failures, for the report.
    pub details: Vec<String>,
}

impl SuiteResult {
    fn new(name: &'static str) -> Self {
        SuiteResult { name, cases: 0, failures: 0, details: Vec::new() }
    }

    fn record(&mut self, ok: bool, detail: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            self.failures += 1;
            if self.details.len() < KEPT_FAILURES {
                self.details.push(detail());
            }
        }
    }

    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifySummary {
    pub seed: u64,
    pub sizes: Vec<usize>,
    pub suites: Vec<SuiteResult>,
    pub passed: bool,
}

impl VerifySummary {
    pub fn suite(&self, name: &str) -> Option<&SuiteResult> {
        self.suites.iter().find(|s| s.name == name)
    }

    pub fn failed_suites(&self) -> Vec<&'static str> {
        self.suites.iter().filter(|s| !s.passed()).map(|s| s.name).collect()
    }
}

pub const SUITE_NAMES: [&str; 9] = [
    "weyl_ring",
    "detright_oracles",
    "round_trip",
    "symmetry_adjoint",
    "residues",
    "residue_spectra",
    "infinity_nilpotency",
    "monodromy",
    "hypergeometric",
];

pub fn run_suites(cfg: &VerifyConfig) -> VerifySummary {
    let stream = |k: usize| random::rng(cfg.seed.wrapping_mul(0x9E37_79B9).wrapping_add(k as u64));
    let suites = vec![
        weyl_ring(cfg, &mut stream(0)),
        detright_oracles(cfg, &mut stream(1)),
        round_trip(cfg, &mut stream(2)),
        symmetry_adjoint(cfg, &mut stream(3)),
        residue_suite(cfg, &mut stream(4)),
        residue_spectra(cfg, &mut stream(5)),
        infinity_nilpotency(cfg, &mut stream(6)),
        monodromy_suite(cfg, &mut stream(7)),
        hypergeometric(cfg),
    ];
    let passed = suites.iter().all(SuiteResult::passed);
    VerifySummary { seed: cfg.seed, sizes: cfg.sizes.clone(), suites, passed }
}

fn weyl_ring(cfg: &VerifyConfig, rng: &mut SeededRng) -> SuiteResult {
    let mut r = SuiteResult::new("weyl_ring");
    let commutator = &(&WeylElement::x() * &WeylElement::y()) - &(&WeylElement::y() * &WeylElement::x());
    r.record(commutator == WeylElement::one(), || format!("XY − YX = {commutator}"));
    for _ in 0..cfg.cases * cfg.sizes.len().max(1) {
        let a = random::weyl_element(rng, 2, 3);
        let b = random::weyl_element(rng, 2, 3);
        let c = random::weyl_element(rng, 2, 3);
        let assoc = &(&a * &b) * &c == &a * &(&b * &c);
        let distrib = &a * &(&b + &c) == &(&a * &b) + &(&a * &c);
        let anti = (&a * &b).adjoint() == &b.adjoint() * &a.adjoint() && a.adjoint().adjoint() == a;
        r.record(assoc && distrib && anti, || format!("a = {a}, b = {b}, c = {c}"));
    }
    r
}

fn detright_oracles(cfg: &VerifyConfig, rng: &mut SeededRng) -> SuiteResult {
    let mut r = SuiteResult::new("detright_oracles");
    let max_size = cfg.sizes.iter().copied().max().unwrap_or(1) + 1;
    for size in 2..=max_size.clamp(2, 6) {
        for _ in 0..cfg.cases {
            let m = random::almost_triangular(rng, size, 2);
            let f = detright_forward(&m);
            let ok = f == detright_reverse(&m) && detright_permutation(m.matrix(), PERMUTATION_BOUND).is_ok_and(|p| p == f);
            r.record(ok, || format!("size {size}: determinant routes disagree"));
        }
    }
    r
}

fn round_trip(cfg: &VerifyConfig, rng: &mut SeededRng) -> SuiteResult {
    let mut r = SuiteResult::new("round_trip");
    for &n in &cfg.sizes {
        for _ in 0..cfg.cases {
            let a = random::dn_matrix(rng, n);
            let back = canonical_form(&a).and_then(|c| reconstruct(&c));
            r.record(back.as_ref() == Ok(&a), || format!("n = {n}: {} came back as {back:?}", a.to_json()));
        }
    }
    r
}

fn symmetry_adjoint(cfg: &VerifyConfig, rng: &mut SeededRng) -> SuiteResult {
    let mut r = SuiteResult::new("symmetry_adjoint");
    for &n in cfg.sizes.iter().filter(|&&n| n >= 1) {
        for _ in 0..cfg.cases {
            let sym = random::symmetric_dn_matrix(rng, n);
            let (broken, at) = random::break_symmetry(rng, &sym);
            let probe = if cfg.corrupt_symmetry { &broken } else { &sym };
            let (adj, symm) = verdicts(probe, n);
            r.record(adj == Some(true) && symm == Some(true), || format!("n = {n}: symmetric sample gave adjoint {adj:?}, symmetry {symm:?}"));
            let (adj, symm) = verdicts(&broken, n);
            r.record(adj == Some(false) && symm == Some(false), || format!("n = {n}: entry {at:?} perturbed, adjoint {adj:?}, symmetry {symm:?}"));
        }
    }
    r
}

fn verdicts(a: &DNMatrix, n: usize) -> (Option<bool>, Option<bool>) {
    let adj = build_l_infinity(a).ok().map(|l| check_adjoint(&l, n));
    let symm = canonical_form(a).ok().map(|c| check_symmetry(&c));
    (adj, symm)
}

fn residue_suite(cfg: &VerifyConfig, rng: &mut SeededRng) -> SuiteResult {
    let mut r = SuiteResult::new("residues");
    for &n in cfg.sizes.iter().filter(|&&n| n >= 1) {
        let half = GaussRational::from_ratio(n as i64, 2);
        let at_infinity = GaussRational::from_ratio(-((n * (n + 1)) as i64), 2);
        for _ in 0..cfg.cases {
            let a = random::symmetric_diagonalizable(rng, n, SAMPLE_MIN_GAP);
            let report = build_l_infinity(&a).map_err(|e| e.to_string()).and_then(|l| residues(&l, n).map_err(|e| e.to_string()));
            let ok = report.as_ref().is_ok_and(|rep| {
                rep.infinity_residue == at_infinity
                    && rep.finite_points.len() == n + 1
                    && rep.finite_points.iter().all(|p| match &p.exact_residue {
                        Some(e) => *e == half,
                        None => (p.residue - half.to_complex()).norm() <= SPECTRAL_CHECK_TOL,
                    })
            });
            r.record(ok, || format!("n = {n}: {}", report.as_ref().map_or_else(|e| e.clone(), |rep| format!("{rep:?}"))));
        }
    }
    r
}

fn residue_spectra(cfg: &VerifyConfig, rng: &mut SeededRng) -> SuiteResult {
    let mut r = SuiteResult::new("residue_spectra");
    for &n in cfg.sizes.iter().filter(|&&n| n >= 1) {
        for _ in 0..cfg.cases {
            // general matrices: rank one and the kernel hold without symmetry
            let a = general_sample(rng, n);
            let st = eigendecompose(&a, DEFAULT_TOL).and_then(residue_matrices).map(|s| residue_structure(&s));
            let ok = st.as_ref().is_ok_and(|s| s.max_rank_ratio() <= SPECTRAL_CHECK_TOL && s.max_kernel_residual <= SPECTRAL_CHECK_TOL);
            r.record(ok, || format!("n = {n}: {st:?}"));
            // symmetric ones: trace −n/2, the T u_j eigenvalue and C^t J C = I
            let a = random::symmetric_diagonalizable(rng, n, SAMPLE_MIN_GAP);
            let st = analyze_spectrum(&a, DEFAULT_TOL).map(|s| residue_structure(&s));
            let ok = st.as_ref().is_ok_and(|s| {
                s.max_trace_error <= SPECTRAL_CHECK_TOL
                    && s.max_rank_ratio() <= SPECTRAL_CHECK_TOL
                    && s.max_kernel_residual <= SPECTRAL_CHECK_TOL
                    && s.max_eigenvector_residual <= SPECTRAL_CHECK_TOL
                    && s.normalization_residual <= SPECTRAL_CHECK_TOL
            });
            r.record(ok, || format!("n = {n}: {st:?}"));
        }
    }
    r
}

/// A random matrix whose eigenvalues are at least [`SAMPLE_MIN_GAP`] apart.
pub fn general_sample(rng: &mut impl Rng, n: usize) -> DNMatrix {
    loop {
        let a = random::dn_matrix(rng, n);
        if eigendecompose(&a, DEFAULT_TOL).is_ok_and(|s| s.min_gap() >= SAMPLE_MIN_GAP) {
            return a;
        }
    }
}

fn infinity_nilpotency(cfg: &VerifyConfig, rng: &mut SeededRng) -> SuiteResult {
    let mut r = SuiteResult::new("infinity_nilpotency");
    for &n in &cfg.sizes {
        for _ in 0..cfg.cases {
            let a = random::dn_matrix(rng, n);
            let cert = infinity_exponents(&a, cfg.truncation.max(n + 2));
            r.record(cert.as_ref().is_ok_and(|c| c.certified()), || format!("n = {n}: {cert:?}"));
        }
    }
    r
}

fn monodromy_suite(cfg: &VerifyConfig, rng: &mut SeededRng) -> SuiteResult {
    let mut r = SuiteResult::new("monodromy");
    let tol = cfg.monodromy.tol_mono;
    for &n in cfg.sizes.iter().filter(|&&n| (1..=4).contains(&n)) {
        let want = if n % 2 == 0 { Symmetry::Skew } else { Symmetry::Symmetric };
        for _ in 0..cfg.monodromy_cases {
            let a = random::symmetric_diagonalizable(rng, n, SAMPLE_MIN_GAP);
            match monodromy_report(&a, &cfg.monodromy) {
                Ok(rep) => {
                    let p = &rep.polarization;
                    let ok = rep.all_ok(tol) && p.dimension == 1 && p.symmetry == want && p.residual <= tol;
                    r.record(ok, || {
                        format!(
                            "n = {n}: product {:.2e}, unipotency {:.2e}, polarization dim {} {:?} residual {:.2e}",
                            rep.product_residual, rep.infinity_check.top_power_norm, p.dimension, p.symmetry, p.residual
                        )
                    });
                }
                Err(e) => r.record(false, || format!("n = {n}: {e}")),
            }
        }
    }
    r
}

fn hypergeometric(cfg: &VerifyConfig) -> SuiteResult {
    let mut r = SuiteResult::new("hypergeometric");
    let tol = cfg.monodromy.tol_mono;
    for &n in cfg.sizes.iter().filter(|&&n| (2..=4).contains(&n)) {
        let s = hypergeom_structure(n);
        r.record(s.passed(), || format!("n = {n}: {s:?}"));
        match hprime_monodromy(n, &cfg.monodromy) {
            Ok(h) => r.record(h.passed(tol, 1e-8), || format!("n = {n}: brackets {:?}, rrv residual {:.2e}", h.bracket_magnitudes, h.rrv.residual)),
            Err(e) => r.record(false, || format!("n = {n}: {e}")),
        }
    }
    r
}
