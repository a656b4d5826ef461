use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::unit_ball_volume;

/// Inputs of the doubling search other than `Φ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DoublingQuery {
    pub dim: usize,
    pub big_r: f64,
    pub eps: f64,
    pub tau: f64,
    pub c_t: f64,
    pub grid: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "kebab-case")]
pub enum DoublingOutcome {
    Found { r: f64, j: u32, lhs: f64, rhs: f64 },
    Failed { min_ratio: f64, at_r: f64, tried: u32 },
}

impl DoublingOutcome {
    pub fn radius(&self) -> Option<f64> {
        match self {
            DoublingOutcome::Found { r, .. } => Some(*r),
            DoublingOutcome::Failed { .. } => None,
        }
    }
}

const REL_SLACK: f64 = 1e-12;

/// First `r = R 2^{-j}`, `j = 0..=grid`, with
/// `Φ(10r) + ε|B(x,10r)| <= c_T (Φ(τr) + ε|B(x,τr)|)`.
pub fn find_doubling_radius(phi: &dyn Fn(f64) -> f64, q: &DoublingQuery) -> Result<DoublingOutcome> {
    if q.dim == 0 {
        return Err(Error::Input("dimension must be positive".into()));
    }
    for (name, v) in [("R", q.big_r), ("eps", q.eps), ("c_T", q.c_t)] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::Input(format!("{name} must be positive, got {v}")));
        }
    }
    if !(q.tau > 0.0 && q.tau <= 1.0) {
        return Err(Error::Input(format!("tau must lie in (0, 1], got {}", q.tau)));
    }
    let alpha = unit_ball_volume(q.dim);
    let ball = |s: f64| q.eps * alpha * s.powi(q.dim as i32);
    let mut best = (f64::INFINITY, q.big_r);
    for j in 0..=q.grid {
        let r = q.big_r * 2f64.powi(-(j as i32));
        let lhs = phi(10.0 * r) + ball(10.0 * r);
        let rhs = q.c_t * (phi(q.tau * r) + ball(q.tau * r));
        if lhs <= rhs * (1.0 + REL_SLACK) {
            return Ok(DoublingOutcome::Found { r, j, lhs, rhs });
        }
        let ratio = lhs / rhs;
        if ratio < best.0 {
            best = (ratio, r);
        }
    }
    Ok(DoublingOutcome::Failed { min_ratio: best.0, at_r: best.1, tried: q.grid + 1 })
}
