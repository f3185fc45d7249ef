//! Loop geometry. With finite singularities inside the disc of radius `R`,
//! the base point sits at `1.5R` on the ray that best separates the
//! singularities as seen from it. Each finite loop is a lasso: a straight
//! tail to a circle of radius `0.4 ×` the distance to the nearest other
//! singularity, one positive turn, and the tail back. The loop around `∞`
//! is the circle of radius `2R` traversed clockwise.
//!
//! Tails leave the base point in distinct directions, so sorting the finite
//! loops by the angle at which they leave (counterclockwise) gives
//! `γ_1 ⋯ γ_k ≃ γ_∞^(−1)` in path order and the transport relation
//! `M_∞ M_k ⋯ M_1 = I`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use super::integrator::{Path, Segment};
use super::MonodromyError;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum LoopCenter {
    Finite(Complex64),
    Infinity,
}

#[derive(Clone, Debug, Serialize)]
pub struct Loop {
    pub center: LoopCenter,
    pub radius: f64,
    pub base_point: Complex64,
    /// Index of the singularity in the caller's list; `None` for `∞`.
    pub index: Option<usize>,
    pub path: Path,
}

impl Loop {
    /// Distance from the path to the nearest of `points`.
    pub fn clearance(&self, points: &[Complex64]) -> f64 {
        points.iter().flat_map(|&p| self.path.iter().map(move |s| s.distance_to(p))).fold(f64::INFINITY, f64::min)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct LoopGeometry {
    pub base_point: Complex64,
    /// Finite loops in composition order, then the loop around `∞`.
    pub loops: Vec<Loop>,
    pub ordering: &'static str,
}

const CANDIDATE_DIRECTIONS: usize = 120;

impl LoopGeometry {
    pub fn new(singularities: &[Complex64]) -> Result<Self, MonodromyError> {
        if singularities.is_empty() {
            return Err(MonodromyError::Geometry("no singularities".into()));
        }
        let mut gaps = vec![f64::INFINITY; singularities.len()];
        for (i, a) in singularities.iter().enumerate() {
            for (j, b) in singularities.iter().enumerate() {
                if i != j {
                    gaps[i] = gaps[i].min((a - b).norm());
                }
            }
        }
        let min_gap = gaps.iter().copied().fold(f64::INFINITY, f64::min);
        if min_gap == 0.0 {
            return Err(MonodromyError::Geometry("coincident singularities".into()));
        }
        let reach = singularities.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let r = if min_gap.is_finite() { reach.max(min_gap) } else { reach.max(1.0) };

        // pick the base direction maximizing the smallest angular separation
        let mut best: Option<(f64, Complex64)> = None;
        for k in 0..CANDIDATE_DIRECTIONS {
            let phi = 2.0 * PI * (k as f64 + 0.5) / CANDIDATE_DIRECTIONS as f64;
            let b = Complex64::from_polar(1.5 * r, phi);
            let mut angles: Vec<f64> = singularities.iter().map(|z| departure_angle(b, *z)).collect();
            angles.sort_by(f64::total_cmp);
            let sep = angles.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
            if best.is_none_or(|(s, _)| sep > s * (1.0 + 1e-12)) {
                best = Some((sep, b));
            }
        }
        let b = best.expect("candidates").1;

        let mut order: Vec<usize> = (0..singularities.len()).collect();
        order.sort_by(|&i, &j| departure_angle(b, singularities[i]).total_cmp(&departure_angle(b, singularities[j])));
        let mut loops: Vec<Loop> = order
            .iter()
            .map(|&i| {
                let lambda = singularities[i];
                let radius = if gaps[i].is_finite() { 0.4 * gaps[i] } else { 0.4 * r };
                let dir = (b - lambda) / (b - lambda).norm();
                let entry = lambda + dir * radius;
                let path = vec![
                    Segment::Line { from: b, to: entry },
                    Segment::Arc { center: lambda, radius, start: dir.arg(), sweep: 2.0 * PI },
                    Segment::Line { from: entry, to: b },
                ];
                Loop { center: LoopCenter::Finite(lambda), radius, base_point: b, index: Some(i), path }
            })
            .collect();
        let far = b * (2.0 / 1.5);
        loops.push(Loop {
            center: LoopCenter::Infinity,
            radius: 2.0 * r,
            base_point: b,
            index: None,
            path: vec![
                Segment::Line { from: b, to: far },
                Segment::Arc { center: Complex64::new(0.0, 0.0), radius: 2.0 * r, start: b.arg(), sweep: -2.0 * PI },
                Segment::Line { from: far, to: b },
            ],
        });
        Ok(LoopGeometry { base_point: b, loops, ordering: "M_inf * M_k * ... * M_1 = I, finite loops by increasing departure angle" })
    }

    pub fn finite(&self) -> &[Loop] {
        &self.loops[..self.loops.len() - 1]
    }

    pub fn infinity(&self) -> &Loop {
        self.loops.last().expect("the ∞ loop is always present")
    }
}

/// Angle of `z − b` measured from the direction `b → 0`, in `(−π, π]`.
/// All singularities lie within `asin(2/3)` of that direction.
fn departure_angle(b: Complex64, z: Complex64) -> f64 {
    ((z - b) / (-b)).arg()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::c64;

    #[test]
    fn loops_stay_clear() {
        let pts = [c64(1.0, 0.0), c64(-1.0, 0.0), c64(0.0, 0.3), c64(2.0, 2.0)];
        let g = LoopGeometry::new(&pts).unwrap();
        assert_eq!(g.loops.len(), 5);
        for l in &g.loops {
            let clear = l.clearance(&pts);
            assert!(clear > 0.1, "{:?} clearance {clear}", l.center);
            assert!(super::super::integrator::is_closed(&l.path, 1e-12));
        }
        // each finite loop winds once around its own point and not around others
        for l in g.finite() {
            let own = l.index.unwrap();
            for (i, p) in pts.iter().enumerate() {
                let w = winding(&l.path, *p);
                assert_eq!(w, if i == own { 1 } else { 0 });
            }
        }
        for p in &pts {
            assert_eq!(winding(&g.infinity().path, *p), -1);
        }
    }

    fn winding(path: &Path, p: Complex64) -> i64 {
        let mut total = 0.0;
        for s in path {
            let m = 2000;
            for k in 0..m {
                let a = s.point(k as f64 / m as f64) - p;
                let b = s.point((k + 1) as f64 / m as f64) - p;
                total += (b / a).arg();
            }
        }
        (total / (2.0 * PI)).round() as i64
    }
}
