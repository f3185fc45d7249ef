//! Dormand–Prince 5(4) transport of `dΦ/dz = B(z)Φ` along piecewise smooth
//! paths in the complex plane.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use super::MonodromyError;
use crate::numeric::{identity, norm, CMatrix};

const MAX_STEPS: usize = 2_000_000;
const MIN_STEP: f64 = 1e-13;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Segment {
    Line { from: Complex64, to: Complex64 },
    /// `center + radius·e^(i(start + s·sweep))`, `s ∈ [0, 1]`.
    Arc { center: Complex64, radius: f64, start: f64, sweep: f64 },
}

impl Segment {
    pub fn point(&self, s: f64) -> Complex64 {
        match *self {
            Segment::Line { from, to } => from + (to - from) * s,
            Segment::Arc { center, radius, start, sweep } => center + Complex64::from_polar(radius, start + s * sweep),
        }
    }

    pub fn derivative(&self, s: f64) -> Complex64 {
        match *self {
            Segment::Line { from, to } => to - from,
            Segment::Arc { radius, start, sweep, .. } => Complex64::i() * sweep * Complex64::from_polar(radius, start + s * sweep),
        }
    }

    pub fn start(&self) -> Complex64 {
        match *self {
            Segment::Line { from, .. } => from,
            _ => self.point(0.0),
        }
    }

    pub fn end(&self) -> Complex64 {
        match *self {
            Segment::Line { to, .. } => to,
            _ => self.point(1.0),
        }
    }

    /// Arc length.
    pub fn length(&self) -> f64 {
        match *self {
            Segment::Line { from, to } => (to - from).norm(),
            Segment::Arc { radius, sweep, .. } => radius * sweep.abs(),
        }
    }

    pub fn reversed(&self) -> Segment {
        match *self {
            Segment::Line { from, to } => Segment::Line { from: to, to: from },
            Segment::Arc { center, radius, start, sweep } => Segment::Arc { center, radius, start: start + sweep, sweep: -sweep },
        }
    }

    /// Smallest distance from the segment to `z`.
    pub fn distance_to(&self, z: Complex64) -> f64 {
        match *self {
            Segment::Line { from, to } => {
                let d = to - from;
                let len2 = d.norm_sqr();
                let s = if len2 == 0.0 { 0.0 } else { ((z - from) * d.conj()).re / len2 };
                (z - (from + d * s.clamp(0.0, 1.0))).norm()
            }
            Segment::Arc { center, radius, start, sweep } => {
                let rel = z - center;
                let mut best = (self.start() - z).norm().min((self.end() - z).norm());
                if rel.norm() > 0.0 {
                    // the closest circle point lies on the arc when its angle is swept
                    let ang = rel.arg();
                    let (lo, hi) = if sweep >= 0.0 { (start, start + sweep) } else { (start + sweep, start) };
                    let mut a = ang;
                    while a < lo {
                        a += 2.0 * PI;
                    }
                    if a <= hi {
                        best = best.min((rel.norm() - radius).abs());
                    }
                } else {
                    best = radius;
                }
                best
            }
        }
    }
}

pub type Path = Vec<Segment>;

pub fn reverse_path(path: &[Segment]) -> Path {
    path.iter().rev().map(Segment::reversed).collect()
}

/// Closes up within `tol`?
pub fn is_closed(path: &[Segment], tol: f64) -> bool {
    match (path.first(), path.last()) {
        (Some(a), Some(b)) => (a.start() - b.end()).norm() <= tol,
        _ => true,
    }
}

#[derive(Clone, Debug)]
pub struct Transport {
    pub phi: CMatrix,
    pub steps: usize,
    pub rejected: usize,
    /// `‖Φ(tol) − Φ(tol/2)‖` when the Richardson rerun was requested.
    pub global_error: Option<f64>,
}

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
/// Fifth-order weights minus the embedded fourth-order ones.
const E: [f64; 7] = [
    35.0 / 384.0 - 5179.0 / 57600.0,
    0.0,
    500.0 / 1113.0 - 7571.0 / 16695.0,
    125.0 / 192.0 - 393.0 / 640.0,
    -2187.0 / 6784.0 + 92097.0 / 339200.0,
    11.0 / 84.0 - 187.0 / 2100.0,
    -1.0 / 40.0,
];

/// Integrates `dΦ/dz = B(z)Φ` from `y0` along `path` with local error at most
/// `tol` per step, measured relative to `1 + |Φ_ij|`.
pub fn transport<F>(rhs: &F, path: &[Segment], y0: CMatrix, tol: f64) -> Result<Transport, MonodromyError>
where
    F: Fn(Complex64) -> Result<CMatrix, MonodromyError>,
{
    let mut y = y0;
    let mut steps = 0;
    let mut rejected = 0;
    let mut comp = CMatrix::zeros(y.nrows(), y.ncols());
    for seg in path {
        let f = |s: f64, y: &CMatrix| -> Result<CMatrix, MonodromyError> { Ok(rhs(seg.point(s))? * y * seg.derivative(s)) };
        let mut s = 0.0;
        let mut h: f64 = 0.05;
        let mut k1 = f(s, &y)?;
        while s < 1.0 {
            if steps + rejected > MAX_STEPS {
                return Err(MonodromyError::StepUnderflow { z: seg.point(s), step: h });
            }
            h = h.min(1.0 - s);
            let mut k = vec![k1.clone()];
            for stage in 1..7 {
                let mut yi = y.clone();
                for (j, kj) in k.iter().enumerate() {
                    if A[stage][j] != 0.0 {
                        yi += kj * Complex64::new(h * A[stage][j], 0.0);
                    }
                }
                k.push(f(s + C[stage] * h, &yi)?);
            }
            // stage 7 is evaluated at the fifth-order solution (FSAL)
            let mut delta = CMatrix::zeros(y.nrows(), y.ncols());
            for (j, kj) in k.iter().enumerate().take(6) {
                if A[6][j] != 0.0 {
                    delta += kj * Complex64::new(h * A[6][j], 0.0);
                }
            }
            // compensated update keeps the rounding of y + delta out of y
            let delta = delta - &comp;
            let y_new = &y + &delta;
            let mut err = CMatrix::zeros(y.nrows(), y.ncols());
            for (j, kj) in k.iter().enumerate() {
                if E[j] != 0.0 {
                    err += kj * Complex64::new(h * E[j], 0.0);
                }
            }
            let mut ratio: f64 = 0.0;
            for ((e, a), b) in err.iter().zip(y.iter()).zip(y_new.iter()) {
                let r = e.norm() / (tol * (1.0 + a.norm().max(b.norm())));
                // f64::max would drop a NaN
                ratio = if r.is_nan() { f64::INFINITY } else { ratio.max(r) };
            }
            if !ratio.is_finite() {
                return Err(MonodromyError::StepUnderflow { z: seg.point(s), step: h });
            }
            if ratio <= 1.0 {
                s += h;
                comp = (&y_new - &y) - &delta;
                y = y_new;
                k1 = k.pop().expect("seven stages");
                steps += 1;
            } else {
                rejected += 1;
            }
            let factor = if ratio == 0.0 { 5.0 } else { (0.9 * ratio.powf(-0.2)).clamp(0.2, 5.0) };
            h *= if ratio <= 1.0 { factor } else { factor.min(1.0) };
            if h < MIN_STEP && s < 1.0 {
                return Err(MonodromyError::StepUnderflow { z: seg.point(s), step: h });
            }
        }
    }
    Ok(Transport { phi: y, steps, rejected, global_error: None })
}

/// Transport of the identity, optionally cross-checked by a rerun at `tol/2`.
/// The finer run is returned.
pub fn continue_solution<F>(rhs: &F, path: &[Segment], size: usize, tol: f64, richardson: bool) -> Result<Transport, MonodromyError>
where
    F: Fn(Complex64) -> Result<CMatrix, MonodromyError>,
{
    let coarse = transport(rhs, path, identity(size), tol)?;
    if !richardson {
        return Ok(coarse);
    }
    let mut fine = transport(rhs, path, identity(size), tol / 2.0)?;
    fine.global_error = Some(norm(&(&fine.phi - &coarse.phi)));
    fine.steps += coarse.steps;
    fine.rejected += coarse.rejected;
    Ok(fine)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::c64;

    fn scalar(f: impl Fn(Complex64) -> Complex64) -> impl Fn(Complex64) -> Result<CMatrix, MonodromyError> {
        move |z| Ok(CMatrix::from_element(1, 1, f(z)))
    }

    fn circle(center: Complex64, radius: f64) -> Path {
        vec![Segment::Arc { center, radius, start: 0.0, sweep: 2.0 * PI }]
    }

    #[test]
    fn logarithm_around_the_origin() {
        // y' = a y / z picks up e^(2πia)
        let a = 0.3;
        let rhs = scalar(|z| c64(a, 0.0) / z);
        let t = continue_solution(&rhs, &circle(c64(0.0, 0.0), 1.0), 1, 1e-12, true).unwrap();
        let expected = Complex64::from_polar(1.0, 2.0 * PI * a);
        assert!((t.phi[(0, 0)] - expected).norm() < 1e-10);
        assert!(t.global_error.unwrap() < 1e-9);
    }

    #[test]
    fn exponential_along_a_line() {
        let rhs = scalar(|_| c64(1.0, 1.0));
        let path = vec![Segment::Line { from: c64(0.0, 0.0), to: c64(2.0, -1.0) }];
        let t = continue_solution(&rhs, &path, 1, 1e-12, false).unwrap();
        let expected = (c64(1.0, 1.0) * c64(2.0, -1.0)).exp();
        assert!((t.phi[(0, 0)] - expected).norm() < 1e-10 * expected.norm());
    }

    #[test]
    fn reversal_inverts() {
        let rhs = |z: Complex64| Ok(CMatrix::from_row_slice(2, 2, &[c64(0.0, 0.0), c64(1.0, 0.0) / (z - 3.0), c64(1.0, 0.0) / (z + 2.0), z]));
        let path = vec![Segment::Line { from: c64(0.0, 0.0), to: c64(1.0, 1.0) }, Segment::Arc { center: c64(0.0, 0.0), radius: 2f64.sqrt(), start: PI / 4.0, sweep: 1.0 }];
        let fwd = transport(&rhs, &path, identity(2), 1e-12).unwrap();
        let back = transport(&rhs, &reverse_path(&path), identity(2), 1e-12).unwrap();
        assert!(norm(&(&fwd.phi * &back.phi - identity(2))) < 1e-9);
    }

    #[test]
    fn hitting_a_pole_underflows() {
        let rhs = scalar(|z| c64(1.0, 0.0) / (z * z));
        let path = vec![Segment::Line { from: c64(-1.0, 0.0), to: c64(1.0, 0.0) }];
        assert!(matches!(transport(&rhs, &path, identity(1), 1e-10), Err(MonodromyError::StepUnderflow { .. })));
    }

    #[test]
    fn distances() {
        let l = Segment::Line { from: c64(0.0, 0.0), to: c64(2.0, 0.0) };
        assert!((l.distance_to(c64(1.0, 1.0)) - 1.0).abs() < 1e-15);
        assert!((l.distance_to(c64(3.0, 0.0)) - 1.0).abs() < 1e-15);
        let a = Segment::Arc { center: c64(0.0, 0.0), radius: 1.0, start: 0.0, sweep: PI };
        assert!((a.distance_to(c64(0.0, 2.0)) - 1.0).abs() < 1e-12);
        assert!((a.distance_to(c64(0.0, -2.0)) - 5f64.sqrt()).abs() < 1e-12);
    }
}
