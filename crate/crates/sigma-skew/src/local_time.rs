//! Symmetric local time at level 0, estimated two independent ways.
//!
//! The band estimator measures occupation of [−ε, ε] in the quadratic
//! variation clock; the Tanaka estimator is the discrete residual
//! |x_t| − |x_0| − Σ sgn(x_j)Δx_j, monotonized by its running maximum.

use crate::error::{Result, SigmaError};
use crate::path::Path;
use crate::process::sgn;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LtMethod {
    Band,
    Tanaka,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LocalTimeEstimate {
    /// Nondecreasing estimate, 0 at index 0.
    pub lt: Path,
    pub method: LtMethod,
    /// Band half-width (band method only).
    pub eps: Option<f64>,
    /// Raw (non-monotone) Tanaka residual, kept for diagnostics.
    pub raw: Option<Path>,
}

/// Band half-width balancing bias O(eps) against variance O(1/(eps·N)).
pub fn default_eps(dt: f64, terminal_qv: f64) -> f64 {
    (dt * terminal_qv).sqrt()
}

/// Occupation-band estimate: L̂_t = (1/2ε) Σ_{j≤t} 1{|x_j| ≤ ε} Δqv_j, with
/// the indicator read at the right endpoint of each cell.
pub fn lt_band(x: &Path, qv: &Path, eps: f64) -> Result<LocalTimeEstimate> {
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(SigmaError::param("eps", format!("must be positive, got {eps}")));
    }
    if !x.same_grid(qv) {
        return Err(SigmaError::Misaligned("x and qv must share one grid".into()));
    }
    let inv = 1.0 / (2.0 * eps);
    let mut values = Vec::with_capacity(x.len());
    values.push(0.0);
    let mut acc = 0.0;
    for j in 1..x.len() {
        if x.values[j].abs() <= eps {
            acc += inv * (qv.values[j] - qv.values[j - 1]);
        }
        values.push(acc);
    }
    Ok(LocalTimeEstimate {
        lt: Path {
            t0: x.t0,
            dt: x.dt,
            values,
            label: format!("lt_band({})", x.label),
        },
        method: LtMethod::Band,
        eps: Some(eps),
        raw: None,
    })
}

/// Tanaka-residual estimate from a signed path: the running maximum of
/// |x_t| − |x_0| − Σ sgn(x_j)Δx_j (sgn(0) := +1).
pub fn lt_tanaka(x: &Path) -> LocalTimeEstimate {
    let mut raw = Vec::with_capacity(x.len());
    raw.push(0.0);
    let mut integral = 0.0;
    for j in 1..x.len() {
        integral += sgn(x.values[j - 1]) * (x.values[j] - x.values[j - 1]);
        raw.push(x.values[j].abs() - x.values[0].abs() - integral);
    }
    let mut running = 0.0f64;
    let values = raw
        .iter()
        .map(|&v| {
            running = running.max(v);
            running
        })
        .collect();
    LocalTimeEstimate {
        lt: Path {
            t0: x.t0,
            dt: x.dt,
            values,
            label: format!("lt_tanaka({})", x.label),
        },
        method: LtMethod::Tanaka,
        eps: None,
        raw: Some(Path {
            t0: x.t0,
            dt: x.dt,
            values: raw,
            label: format!("lt_tanaka_raw({})", x.label),
        }),
    }
}
