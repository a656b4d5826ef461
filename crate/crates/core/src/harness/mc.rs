use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::charges::{Charge, Function1D, ScalarField};
use crate::error::{Error, Result};
use crate::harness::claim::{IntegralClaim, Notion, Verdict, FALSIFIER_NOTE};
use crate::rational::{self, Rational};

/// A strictly increasing control function `φ`.
#[derive(Clone)]
pub enum ControlFunction {
    Identity,
    Arctan,
    /// `x^3 + x`.
    Cubic,
    Custom { name: String, f: Arc<dyn Fn(f64) -> f64 + Send + Sync> },
}

impl fmt::Debug for ControlFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl ControlFunction {
    pub fn custom(name: &str, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        ControlFunction::Custom { name: name.into(), f: Arc::new(f) }
    }

    /// `identity`, `arctan`, `cubic`.
    pub fn catalog(name: &str) -> Result<Self> {
        Ok(match name {
            "identity" => ControlFunction::Identity,
            "arctan" => ControlFunction::Arctan,
            "cubic" => ControlFunction::Cubic,
            other => return Err(Error::Input(format!("unknown control function `{other}`"))),
        })
    }

    pub fn name(&self) -> String {
        match self {
            ControlFunction::Identity => "identity".into(),
            ControlFunction::Arctan => "arctan".into(),
            ControlFunction::Cubic => "cubic".into(),
            ControlFunction::Custom { name, .. } => name.clone(),
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self {
            ControlFunction::Identity => x,
            ControlFunction::Arctan => x.atan(),
            ControlFunction::Cubic => x * x * x + x,
            ControlFunction::Custom { f, .. } => f(x),
        }
    }

    /// Exact value at the rational `x`, for the polynomial controls.
    pub fn eval_exact(&self, x: &Rational) -> Option<Rational> {
        match self {
            ControlFunction::Identity => Some(x.clone()),
            ControlFunction::Cubic => Some(x * x * x + x),
            _ => None,
        }
    }

    /// `φ(x + s h) - φ(x)`, exactly when possible.
    fn increment(&self, x: f64, s: f64, h: f64) -> Increment {
        if let (Ok(xr), Ok(sr), Ok(hr)) = (rational::from_f64(x), rational::from_f64(s), rational::from_f64(h)) {
            if let (Some(a), Some(b)) = (self.eval_exact(&(&xr + &sr * &hr)), self.eval_exact(&xr)) {
                return Increment::Exact(a - b);
            }
        }
        Increment::Float(self.eval(x + s * h) - self.eval(x))
    }
}

enum Increment {
    Exact(Rational),
    Float(f64),
}

impl Increment {
    fn to_f64(&self) -> f64 {
        match self {
            Increment::Exact(r) => rational::to_f64(r),
            Increment::Float(v) => *v,
        }
    }

    fn abs_le(&self, other: &Increment) -> bool {
        match (self, other) {
            (Increment::Exact(a), Increment::Exact(b)) => rational::abs(a) <= rational::abs(b),
            _ => self.to_f64().abs() <= other.to_f64().abs(),
        }
    }
}

/// `F` is an MC_α indefinite integral of `f` with respect to `G` and `φ`.
#[derive(Clone, Debug)]
pub struct McClaim {
    pub f: ScalarField,
    pub big_f: Function1D,
    pub g: Function1D,
    pub phi: ControlFunction,
    pub alpha: f64,
}

impl McClaim {
    /// Reads an MC_α [`IntegralClaim`]; `F` and `G` as for the HK checker.
    pub fn from_claim(claim: &IntegralClaim, phi: ControlFunction) -> Result<Self> {
        let Notion::MCAlpha(alpha) = claim.notion else {
            return Err(Error::Input(format!("{:?} is not an MC notion", claim.notion)));
        };
        let line = |c: &Charge, what: &str| -> Result<Function1D> {
            match c {
                Charge::Function1D(f) => Ok(f.clone()),
                Charge::Density { field: ScalarField::Constant(k), .. } => {
                    let k = *k;
                    Ok(Function1D::new(&format!("{k}*x"), move |x| k * x))
                }
                _ => Err(Error::Input(format!("{what} must be a 1D function or a constant density"))),
            }
        };
        Ok(Self { f: claim.f.clone(), big_f: line(&claim.big_f, "F")?, g: line(&claim.g, "G")?, phi, alpha })
    }

    /// `(F(x+h) - F(x) - f(x)(G(x+h) - G(x))) / (φ(x+αh) - φ(x))`.
    pub fn quotient(&self, x: f64, h: f64) -> Result<f64> {
        let den = self.phi.increment(x, self.alpha, h).to_f64();
        if !(den * h > 0.0) {
            return Err(Error::NotIncreasing { x, h });
        }
        let num = self.big_f.eval(x + h) - self.big_f.eval(x) - self.f.eval(&[x]) * (self.g.eval(x + h) - self.g.eval(x));
        Ok(num / den)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct McConfig {
    /// Positive steps, largest first; both signs are evaluated.
    pub grid: Vec<f64>,
    /// Trailing share of the grid forming the tail.
    pub tail_fraction: f64,
    pub threshold: f64,
}

impl McConfig {
    /// `h = 2^-k` for `k = 2..=30`, last third as tail, threshold `1e-3`.
    pub fn new() -> Self {
        Self { grid: (2..=30).map(|k| 0.5f64.powi(k)).collect(), tail_fraction: 1.0 / 3.0, threshold: 1e-3 }
    }

    fn tail_start(&self) -> usize {
        let len = self.grid.len();
        let tail = ((len as f64 * self.tail_fraction).ceil() as usize).clamp(1, len);
        len - tail
    }
}

impl Default for McConfig {
    fn default() -> Self {
        Self::new()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct McPoint {
    pub x: f64,
    pub head_max: f64,
    pub tail_max: f64,
    /// Signed step where the tail maximum occurs.
    pub worst_h: f64,
    pub refuted: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct McWitness {
    pub x: f64,
    pub h: f64,
    pub quotient: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct McReport {
    pub alpha: f64,
    pub control: String,
    pub config: McConfig,
    pub points: Vec<McPoint>,
    pub verdict: Verdict<McWitness>,
    pub note: String,
}

/// Evaluates the MC_α quotient at each sample point over `±h` and refutes
/// when the tail maximum stays at or above the threshold.
pub fn mc_alpha_check(claim: &McClaim, points: &[f64], cfg: &McConfig) -> Result<McReport> {
    if !(claim.alpha >= 1.0) {
        return Err(Error::Input(format!("alpha must be at least 1, got {}", claim.alpha)));
    }
    if points.is_empty() || cfg.grid.is_empty() {
        return Err(Error::Input("need at least one sample point and one step".into()));
    }
    if cfg.grid.iter().any(|h| !(*h > 0.0)) || cfg.grid.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::Input("steps must be positive and strictly decreasing".into()));
    }
    if !(cfg.tail_fraction > 0.0 && cfg.tail_fraction <= 1.0) {
        return Err(Error::Input(format!("tail fraction must lie in (0, 1], got {}", cfg.tail_fraction)));
    }
    let start = cfg.tail_start();
    let mut out = Vec::with_capacity(points.len());
    let mut verdict = None;
    for (i, &x) in points.iter().enumerate() {
        let mut p = McPoint { x, head_max: 0.0, tail_max: 0.0, worst_h: cfg.grid[start], refuted: false };
        for (k, &h) in cfg.grid.iter().enumerate() {
            for s in [h, -h] {
                let q = claim.quotient(x, s)?.abs();
                if k < start {
                    p.head_max = p.head_max.max(q);
                } else if q > p.tail_max || q.is_nan() {
                    p.tail_max = q;
                    p.worst_h = s;
                }
            }
        }
        p.refuted = !(p.tail_max < cfg.threshold);
        if p.refuted && verdict.is_none() {
            verdict = Some(Verdict::Refuted {
                eps: cfg.threshold,
                trial: i,
                witness: McWitness { x, h: p.worst_h, quotient: claim.quotient(x, p.worst_h)? },
            });
        }
        out.push(p);
    }
    Ok(McReport {
        alpha: claim.alpha,
        control: claim.phi.name(),
        config: cfg.clone(),
        points: out,
        verdict: verdict.unwrap_or(Verdict::ConsistentAtDepth { depth: cfg.grid.len() as u32, trials: points.len() }),
        note: FALSIFIER_NOTE.into(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonotoneComparison {
    pub alpha: f64,
    pub beta: f64,
    pub checked: usize,
    /// Comparisons decided in exact arithmetic.
    pub exact: usize,
    /// `(x, h)` pairs where `|φ(x+αh) - φ(x)| > |φ(x+βh) - φ(x)|`.
    pub violations: Vec<(f64, f64)>,
}

/// Checks `|φ(x+αh) - φ(x)| ≤ |φ(x+βh) - φ(x)|` on every point and signed
/// step, so that MC_α consistency carries over to MC_β.
pub fn mc_monotone_comparison(
    phi: &ControlFunction,
    alpha: f64,
    beta: f64,
    points: &[f64],
    grid: &[f64],
) -> Result<MonotoneComparison> {
    if !(0.0 < alpha && alpha < beta) {
        return Err(Error::Input(format!("need 0 < alpha < beta, got {alpha}, {beta}")));
    }
    let mut r = MonotoneComparison { alpha, beta, checked: 0, exact: 0, violations: Vec::new() };
    for &x in points {
        for &h in grid {
            for s in [h, -h] {
                let (a, b) = (phi.increment(x, alpha, s), phi.increment(x, beta, s));
                r.checked += 1;
                if matches!((&a, &b), (Increment::Exact(_), Increment::Exact(_))) {
                    r.exact += 1;
                }
                if !a.abs_le(&b) {
                    r.violations.push((x, s));
                }
            }
        }
    }
    Ok(r)
}
