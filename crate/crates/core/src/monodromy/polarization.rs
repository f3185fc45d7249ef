use serde::Serialize;

use crate::numeric::dd::{dd_norm, dd_real, recip_complex, rounded, to_dd, to_f64, DdMatrix, PivotedQr};
use crate::numeric::{norm, to_rows, CMatrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Symmetry {
    Symmetric,
    Skew,
    None,
}

#[derive(Clone, Debug, Serialize)]
pub struct PolarizationForm {
    #[serde(serialize_with = "rows")]
    pub g: CMatrix,
    pub symmetry: Symmetry,
    /// Dimension of `{G : M^t G M = G for every M}`.
    pub dimension: usize,
    /// `max_M ‖M^t G M − G‖` for the returned `G`.
    pub residual: f64,
}

fn rows<S: serde::Serializer>(m: &CMatrix, s: S) -> Result<S::Ok, S::Error> {
    serde::Serialize::serialize(&to_rows(m), s)
}

/// Solves `M^t G M = G` for all `M` at once through the null space of the
/// stacked `(M^t ⊗ M^t − I)` blocks (column-major `vec`), found by a
/// double-double QR with column pivoting. Each block is divided by
/// `max(‖M‖², 1)` so that one badly scaled loop matrix cannot swamp the
/// rank threshold for the others. The solution is scaled to unit Frobenius
/// norm with its first nonzero entry real positive, then classified.
///
/// The inputs here carry only `f64` accuracy, so `tol` doubles as the
/// relative rank threshold.
pub fn solve_polarization(ms: &[CMatrix], tol: f64) -> PolarizationForm {
    solve(&ms.iter().map(to_dd).collect::<Vec<_>>(), tol, tol)
}

/// Rank threshold for matrices accurate to double-double precision. Genuine
/// null directions of transported monodromy sit near `1e-30`, while
/// ill-conditioned but nonsingular directions stay above `1e-10`.
const PRECISE_RANK_TOL: f64 = 1e-20;

/// As [`solve_polarization`], for loop matrices known to double-double
/// accuracy.
pub fn solve_polarization_precise(ms: &[DdMatrix], tol: f64) -> PolarizationForm {
    solve(ms, PRECISE_RANK_TOL, tol)
}

fn solve(ms: &[DdMatrix], rank_tol: f64, tol: f64) -> PolarizationForm {
    let d = ms[0].nrows();
    let d2 = d * d;
    let mut system = DdMatrix::zeros(d2 * ms.len(), d2);
    for (k, m) in ms.iter().enumerate() {
        let inv_scale = dd_real(1.0 / dd_norm(m).powi(2).max(1.0));
        let mt = m.transpose();
        // (M^t ⊗ M^t)[(a, b)] with a = p + d·q, b = r + d·s is M^t[q,s]·M^t[p,r]
        for q in 0..d {
            for s in 0..d {
                for p in 0..d {
                    for r in 0..d {
                        let mut z = mt[(q, s)] * mt[(p, r)];
                        if p == r && q == s {
                            z -= dd_real(1.0);
                        }
                        system[(k * d2 + p + d * q, r + d * s)] = z * inv_scale;
                    }
                }
            }
        }
    }
    let qr = PivotedQr::new(&system);
    let rank = qr.rank(rank_tol);
    let dimension = d2 - rank;
    let mut g = match qr.null_space(rank).first() {
        Some(v) => DdMatrix::from_column_slice(d, d, v.as_slice()),
        None => DdMatrix::zeros(d, d),
    };
    let gn = dd_norm(&g);
    if gn > 0.0 {
        g *= dd_real(1.0 / gn);
        let rounded_g = to_f64(&g);
        let big = rounded_g.iter().map(|z| z.norm()).fold(0.0, f64::max);
        // row-major scan for the first entry that is clearly nonzero
        if let Some(z) = (0..d).flat_map(|i| (0..d).map(move |j| (i, j))).map(|(i, j)| g[(i, j)]).find(|z| rounded(*z).norm() > 1e-6 * big) {
            g *= z.conj() * recip_complex(dd_real(rounded(z).norm()));
        }
        // the phase factor has modulus one only to f64 accuracy
        g *= dd_real(1.0 / dd_norm(&g));
    }
    let rounded_g = to_f64(&g);
    let symmetry = if dimension != 1 {
        Symmetry::None
    } else {
        let sym = norm(&(&rounded_g - rounded_g.transpose()));
        let skew = norm(&(&rounded_g + rounded_g.transpose()));
        if sym <= tol.sqrt() && sym < skew {
            Symmetry::Symmetric
        } else if skew <= tol.sqrt() && skew < sym {
            Symmetry::Skew
        } else {
            Symmetry::None
        }
    };
    let residual = ms.iter().map(|m| dd_norm(&(m.transpose() * &g * m - &g))).fold(0.0, f64::max);
    PolarizationForm { g: rounded_g, symmetry, dimension, residual }
}
