use std::io::Read;
use std::path::Path;

use dnkit::dn::{
    build_l_infinity, canonical_form, check_adjoint, check_symmetry, fuchs_test, operator_order, reconstruct_operator, residues, to_dn0, DNMatrix, FuchsReport,
    ResidueReport,
};
use dnkit::monodromy::{monodromy_report, MonodromyReport, Symmetry};
use dnkit::poly::Poly;
use dnkit::scalar::GaussRational;
use dnkit::spectral::{analyze_spectrum, eigendecompose, infinity_exponents, residue_matrices, residue_structure, NilpotencyCertificate, ResidueStructure};
use dnkit::verify::{run_suites, VerifyConfig, VerifySummary};
use dnkit::weyl::{CanonicalDN, WeylElement, WeylJson};
use serde::Serialize;
use serde_json::Value;

use crate::config::RunConfig;
use crate::error::CliError;

pub fn read_json(path: &Path) -> Result<Value, CliError> {
    let read_err = |source| CliError::Read { path: path.display().to_string(), source };
    let mut text = String::new();
    if path.as_os_str() == "-" {
        std::io::stdin().read_to_string(&mut text).map_err(read_err)?;
    } else {
        text = std::fs::read_to_string(path).map_err(read_err)?;
    }
    serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

/// The object holding `key`-shaped data: the document itself, its `key`
/// field, or `result.key` inside a report written by this tool.
fn locate<'a>(v: &'a Value, key: &str, marker: &str) -> Option<&'a Value> {
    if v.get(marker).is_some() {
        return Some(v);
    }
    v.get(key).or_else(|| v.get("result").and_then(|r| r.get(key)))
}

pub fn load_matrix(v: &Value, cfg: &RunConfig) -> Result<DNMatrix, CliError> {
    let m = locate(v, "matrix", "entries").ok_or_else(|| CliError::Input("no matrix found in input".into()))?;
    let a = DNMatrix::from_json(m)?;
    check_n(cfg, a.n())?;
    Ok(a)
}

fn check_n(cfg: &RunConfig, n: usize) -> Result<(), CliError> {
    match cfg.n {
        Some(want) if want != n => Err(CliError::Input(format!("--n {want} does not match the input order {n}"))),
        _ => Ok(()),
    }
}

pub fn load_operator(v: &Value, cfg: &RunConfig) -> Result<(WeylElement, usize), CliError> {
    let o = locate(v, "operator", "terms").ok_or_else(|| CliError::Input("no operator found in input".into()))?;
    let json: WeylJson = serde_json::from_value(o.clone()).map_err(|e| CliError::Input(format!("operator: {e}")))?;
    let l = WeylElement::try_from(&json).map_err(|e| CliError::Input(format!("operator: {e}")))?;
    let declared = v.get("n").or_else(|| v.get("result").and_then(|r| r.get("n"))).and_then(Value::as_u64).map(|n| n as usize);
    let n = declared.or(cfg.n).unwrap_or_else(|| operator_order(&l));
    check_n(cfg, n)?;
    Ok((l, n))
}

fn coefficients(p: &Poly) -> Vec<GaussRational> {
    p.coeffs().to_vec()
}

#[derive(Debug, Serialize)]
pub struct CanonicalJson {
    /// Coefficient lists in ascending powers, `p = 1, …, n+1`.
    pub g: Vec<Vec<GaussRational>>,
}

impl From<&CanonicalDN> for CanonicalJson {
    fn from(c: &CanonicalDN) -> Self {
        CanonicalJson { g: c.all().iter().map(coefficients).collect() }
    }
}

#[derive(Debug, Serialize)]
pub struct Construction {
    pub n: usize,
    pub matrix: Value,
    pub operator: WeylJson,
    pub operator_text: String,
    pub canonical: CanonicalJson,
    pub dn0: CanonicalJson,
    pub symmetric_matrix: bool,
    pub symmetry: bool,
    pub adjoint: bool,
}

pub fn construct(a: &DNMatrix) -> Result<Construction, CliError> {
    let l = build_l_infinity(a)?;
    let c = canonical_form(a)?;
    Ok(Construction {
        n: a.n(),
        matrix: a.to_json(),
        operator: WeylJson::from(&l),
        operator_text: l.to_string(),
        canonical: CanonicalJson::from(&c),
        dn0: CanonicalJson::from(&to_dn0(&c)),
        symmetric_matrix: a.is_symmetric(),
        symmetry: check_symmetry(&c),
        adjoint: check_adjoint(&l, a.n()),
    })
}

#[derive(Debug, Serialize)]
pub struct Reconstruction {
    pub n: usize,
    pub matrix: Value,
    pub operator_text: String,
}

pub fn reconstruct(l: &WeylElement, n: usize) -> Result<Reconstruction, CliError> {
    let a = reconstruct_operator(l, n)?;
    Ok(Reconstruction { n, matrix: a.to_json(), operator_text: l.to_string() })
}

/// Either a value or the error that prevented it.
#[derive(Debug, Serialize)]
#[serde(rename_all = "lowercase", tag = "status")]
pub enum Outcome<T> {
    Ok { value: T },
    Error { message: String },
}

impl<T> Outcome<T> {
    fn from_result<E: std::fmt::Display>(r: Result<T, E>) -> Self {
        match r {
            Ok(value) => Outcome::Ok { value },
            Err(e) => Outcome::Error { message: e.to_string() },
        }
    }
}

#[derive(Debug, Serialize)]
pub struct SpectrumJson {
    pub lambdas: Vec<dnkit::numeric::Complex64>,
    pub min_gap: f64,
    pub residue_matrices: Vec<Vec<Vec<dnkit::numeric::Complex64>>>,
    pub structure: ResidueStructure,
}

#[derive(Debug, Serialize)]
pub struct Analysis {
    pub n: usize,
    pub symmetric_matrix: bool,
    pub operator_text: String,
    pub residues: Outcome<ResidueReport>,
    pub fuchs: Outcome<FuchsReport>,
    pub spectrum: Outcome<SpectrumJson>,
    pub infinity: Outcome<NilpotencyCertificate>,
}

/// Every stage that fails numerically is recorded in its field; only a
/// malformed operator aborts.
pub fn analyze(a: &DNMatrix, cfg: &RunConfig) -> Result<Analysis, CliError> {
    let n = a.n();
    let l = build_l_infinity(a)?;
    // the J-normalization needs A = A^τ; otherwise the eigenbasis is kept as is
    let spectrum = if a.is_symmetric() { analyze_spectrum(a, cfg.tol_spectral) } else { eigendecompose(a, cfg.tol_spectral).and_then(residue_matrices) };
    let spectrum = spectrum.map(|spec| SpectrumJson {
        lambdas: spec.lambdas.clone(),
        min_gap: spec.min_gap(),
        residue_matrices: spec.s.iter().map(dnkit::numeric::to_rows).collect(),
        structure: residue_structure(&spec),
    });
    Ok(Analysis {
        n,
        symmetric_matrix: a.is_symmetric(),
        operator_text: l.to_string(),
        residues: Outcome::from_result(residues(&l, n)),
        fuchs: Outcome::from_result(fuchs_test(&l, n)),
        spectrum: Outcome::from_result(spectrum),
        infinity: Outcome::from_result(infinity_exponents(a, cfg.truncation)),
    })
}

#[derive(Debug, Serialize)]
pub struct MonodromyVerdict {
    pub product: bool,
    pub finite: bool,
    pub infinity: bool,
    pub reduced: bool,
    pub polarization: bool,
    pub passed: bool,
}

#[derive(Debug, Serialize)]
pub struct Monodromy {
    pub report: MonodromyReport,
    pub verdict: MonodromyVerdict,
}

pub fn expected_symmetry(n: usize) -> Symmetry {
    if n % 2 == 0 {
        Symmetry::Skew
    } else {
        Symmetry::Symmetric
    }
}

pub fn monodromy(a: &DNMatrix, cfg: &RunConfig) -> Result<Monodromy, CliError> {
    let report = monodromy_report(a, &cfg.monodromy())?;
    let tol = cfg.tol_mono;
    let pol = &report.polarization;
    let polarization = pol.dimension == 1 && pol.symmetry == expected_symmetry(a.n()) && pol.residual <= tol;
    let mut verdict = MonodromyVerdict {
        product: report.product_ok(tol),
        finite: report.finite_ok(),
        infinity: report.infinity_check.passed,
        reduced: report.reduced_ok(),
        polarization,
        passed: false,
    };
    verdict.passed = verdict.product && verdict.finite && verdict.infinity && verdict.reduced && verdict.polarization;
    Ok(Monodromy { report, verdict })
}

pub fn verify(cfg: &RunConfig, sizes: Vec<usize>, cases: usize, monodromy_cases: usize, corrupt_symmetry: bool) -> VerifySummary {
    run_suites(&VerifyConfig {
        seed: cfg.seed,
        sizes,
        cases,
        monodromy_cases,
        truncation: cfg.truncation,
        monodromy: cfg.monodromy(),
        corrupt_symmetry,
    })
}
