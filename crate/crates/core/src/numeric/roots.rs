//! Aberth–Ehrlich simultaneous root finder.

use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RootError {
    #[error("polynomial is identically zero")]
    ZeroPolynomial,
    #[error("non-finite coefficient")]
    NonFinite,
    #[error("no convergence after {0} iterations")]
    NoConvergence(usize),
}

const MAX_ITER: usize = 500;

fn horner(c: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for a in c.iter().rev() {
        dp = dp * z + p;
        p = p * z + a;
    }
    (p, dp)
}

/// All complex roots (with multiplicity) of `Σ c_k z^k`, coefficients low to
/// high. Trailing zero coefficients are dropped; leading zero coefficients
/// become exact roots at the origin.
pub fn aberth(coeffs: &[Complex64], tol: f64) -> Result<Vec<Complex64>, RootError> {
    if coeffs.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
        return Err(RootError::NonFinite);
    }
    let mut c: Vec<Complex64> = coeffs.to_vec();
    while c.last().is_some_and(|v| v.norm() == 0.0) {
        c.pop();
    }
    if c.is_empty() {
        return Err(RootError::ZeroPolynomial);
    }
    let zeros_at_origin = c.iter().take_while(|v| v.norm() == 0.0).count();
    let c: Vec<Complex64> = c[zeros_at_origin..].to_vec();
    let deg = c.len() - 1;
    let mut roots = vec![Complex64::new(0.0, 0.0); zeros_at_origin];
    if deg == 0 {
        return Ok(roots);
    }
    let lead = c[deg];
    let monic: Vec<Complex64> = c.iter().map(|v| v / lead).collect();

    // Fujiwara-type bound for the starting circle
    let radius = (0..deg)
        .map(|k| monic[k].norm().powf(1.0 / (deg - k) as f64))
        .fold(0.0_f64, f64::max)
        .max(1e-3);
    let mut z: Vec<Complex64> = (0..deg)
        .map(|k| Complex64::from_polar(radius, 2.0 * std::f64::consts::PI * k as f64 / deg as f64 + 0.4))
        .collect();

    let mut converged = false;
    for _ in 0..MAX_ITER {
        let mut max_step: f64 = 0.0;
        for i in 0..deg {
            let (p, dp) = horner(&monic, z[i]);
            if p.norm() == 0.0 {
                continue;
            }
            let ratio = p / dp;
            let repulsion: Complex64 = (0..deg).filter(|&j| j != i).map(|j| (z[i] - z[j]).inv()).sum();
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * repulsion);
            if !step.re.is_finite() || !step.im.is_finite() {
                continue;
            }
            z[i] -= step;
            max_step = max_step.max(step.norm() / z[i].norm().max(1.0));
        }
        if max_step <= tol {
            converged = true;
            break;
        }
    }
    if !converged {
        // multiple roots converge only linearly; accept if the residuals are tiny
        let scale: f64 = monic.iter().map(|v| v.norm()).sum();
        if z.iter().any(|&zi| horner(&monic, zi).0.norm() > 1e-8 * scale * zi.norm().max(1.0).powi(deg as i32)) {
            return Err(RootError::NoConvergence(MAX_ITER));
        }
    }
    // Newton polish against the original coefficients
    for zi in z.iter_mut() {
        for _ in 0..3 {
            let (p, dp) = horner(&c, *zi);
            if dp.norm() == 0.0 {
                break;
            }
            let step = p / dp;
            if !step.re.is_finite() || step.norm() > 1e-3 * zi.norm().max(1.0) {
                break;
            }
            *zi -= step;
        }
    }
    roots.extend(z);
    Ok(roots)
}

/// Smallest pairwise distance among the roots (infinite for fewer than two).
pub fn min_separation(roots: &[Complex64]) -> f64 {
    let mut best = f64::INFINITY;
    for i in 0..roots.len() {
        for j in i + 1..roots.len() {
            best = best.min((roots[i] - roots[j]).norm());
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn sorted_re(mut v: Vec<Complex64>) -> Vec<f64> {
        v.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap());
        v.into_iter().map(|z| z.re).collect()
    }

    #[test]
    fn integer_roots() {
        // (x-1)(x-2)(x+3) = x^3 - 7x + 6
        let r = aberth(&[c(6.0), c(-7.0), c(0.0), c(1.0)], 1e-14).unwrap();
        let r = sorted_re(r);
        for (got, want) in r.iter().zip([-3.0, 1.0, 2.0]) {
            assert!((got - want).abs() < 1e-12);
        }
    }

    #[test]
    fn roots_of_unity() {
        let mut coeffs = vec![c(0.0); 6];
        coeffs[0] = c(-1.0);
        coeffs[5] = c(1.0);
        let r = aberth(&coeffs, 1e-14).unwrap();
        assert_eq!(r.len(), 5);
        for z in &r {
            assert!((z.powu(5) - 1.0).norm() < 1e-12);
        }
        assert!(min_separation(&r) > 1.0);
    }

    #[test]
    fn origin_and_degenerate_inputs() {
        let r = aberth(&[c(0.0), c(0.0), c(-4.0), c(1.0)], 1e-14).unwrap();
        assert_eq!(sorted_re(r), vec![0.0, 0.0, 4.0]);
        assert_eq!(aberth(&[c(0.0)], 1e-12), Err(RootError::ZeroPolynomial));
        assert!(aberth(&[c(f64::NAN), c(1.0)], 1e-12).is_err());
    }

    #[test]
    fn complex_coefficients() {
        // (x - i)(x + 2i) = x^2 + i x + 2
        let r = aberth(&[c(2.0), Complex64::new(0.0, 1.0), c(1.0)], 1e-14).unwrap();
        assert!(r.iter().any(|z| (z - Complex64::new(0.0, 1.0)).norm() < 1e-12));
        assert!(r.iter().any(|z| (z - Complex64::new(0.0, -2.0)).norm() < 1e-12));
    }
}
