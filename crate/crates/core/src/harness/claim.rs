use serde::{Deserialize, Serialize};

use crate::charges::{Charge, ChargeSpec, ScalarField, ScalarSpec};
use crate::error::{Error, Result};
use crate::gauges::{Gauge, ZeroPart};
use crate::geometry::{BVSet1D, Figure, Interval};
use crate::rational;

/// Text attached to every report: the checkers can only refute.
pub const FALSIFIER_NOTE: &str =
    "sampled falsifier: `refuted` exhibits a concrete violating system; `consistent-at-depth` only means none was found";

pub const DEFAULT_EPS: [f64; 3] = [0.5, 0.1, 0.02];

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "notion", content = "alpha", rename_all = "kebab-case")]
pub enum Notion {
    PackingR,
    PackingRStar,
    PfefferR,
    PfefferRIntrinsic,
    RStar,
    #[serde(rename = "hk")]
    HK,
    #[serde(rename = "hks")]
    HKS,
    #[serde(rename = "mc-alpha")]
    MCAlpha(f64),
}

/// Where tags live. `Whole` samples tags in the unit cube of the given
/// dimension.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", content = "set", rename_all = "kebab-case")]
pub enum Domain {
    Figure(Figure),
    Line(BVSet1D),
    Whole(usize),
}

impl Domain {
    pub fn dim(&self) -> usize {
        match self {
            Domain::Figure(f) => f.dim(),
            Domain::Line(_) => 1,
            Domain::Whole(n) => *n,
        }
    }

    /// Figure from which tags are drawn.
    pub fn sampling_figure(&self) -> Result<Figure> {
        match self {
            Domain::Figure(f) => Ok(f.clone()),
            Domain::Whole(n) => Ok(Figure::unit(*n)),
            Domain::Line(l) => {
                let mut cubes = Vec::new();
                for (a, b) in l.intervals() {
                    let piece = Interval::new(vec![(a.clone(), b.clone())])?
                        .to_figure()
                        .map_err(|_| Error::Input("1D domain endpoints must be dyadic".into()))?;
                    cubes.extend(piece.cubes().iter().cloned());
                }
                Figure::new(1, cubes)
            }
        }
    }

    /// Exact membership of a tag in the closed domain.
    pub fn contains_tag(&self, x: &[f64]) -> bool {
        let Ok(xr) = rational::point_from_f64(x) else { return false };
        match self {
            Domain::Figure(f) => f.contains_point(&xr),
            Domain::Line(l) => l.contains_point(&xr[0]),
            Domain::Whole(_) => true,
        }
    }
}

/// A candidate indefinite integral `F` of `f` with respect to `G`.
#[derive(Clone, Debug)]
pub struct IntegralClaim {
    pub f: ScalarField,
    /// Points of the declared exceptional set; the gauge must vanish there.
    pub exceptional: Vec<ZeroPart>,
    pub big_f: Charge,
    pub g: Charge,
    pub notion: Notion,
    pub domain: Domain,
    pub tau: f64,
    pub eps: Vec<f64>,
}

/// JSON form of an [`IntegralClaim`].
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ClaimSpec {
    pub f: ScalarSpec,
    #[serde(default)]
    pub exceptional: Vec<ZeroPart>,
    #[serde(rename = "F")]
    pub big_f: ChargeSpec,
    #[serde(rename = "G")]
    pub g: ChargeSpec,
    #[serde(flatten)]
    pub notion: Notion,
    pub domain: Domain,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps: Option<Vec<f64>>,
}

impl ClaimSpec {
    pub fn build(&self) -> Result<IntegralClaim> {
        let mut c = IntegralClaim::new(self.f.build()?, self.big_f.build()?, self.g.build()?, self.notion, self.domain.clone())
            .with_exceptional(self.exceptional.clone());
        if let Some(t) = self.tau {
            c = c.with_tau(t);
        }
        if let Some(e) = &self.eps {
            c = c.with_eps(e);
        }
        Ok(c)
    }
}

impl IntegralClaim {
    pub fn new(f: ScalarField, big_f: Charge, g: Charge, notion: Notion, domain: Domain) -> Self {
        let tau = match notion {
            Notion::MCAlpha(a) if a > 0.0 => 1.0 / a,
            _ => 1.0,
        };
        Self { f, exceptional: Vec::new(), big_f, g, notion, domain, tau, eps: DEFAULT_EPS.to_vec() }
    }

    pub fn with_eps(mut self, eps: &[f64]) -> Self {
        self.eps = eps.to_vec();
        self
    }

    pub fn with_tau(mut self, tau: f64) -> Self {
        self.tau = tau;
        self
    }

    pub fn with_exceptional(mut self, parts: Vec<ZeroPart>) -> Self {
        self.exceptional = parts;
        self
    }

    /// `F - f(x) G`.
    pub fn residual_at(&self, x: &[f64]) -> Charge {
        Charge::combine(1.0, self.big_f.clone(), -self.f.eval(x), self.g.clone())
    }

    pub fn validate(&self, gauge: Option<&Gauge>) -> Result<()> {
        if !(self.tau > 0.0 && self.tau <= 1.0) {
            return Err(Error::Input(format!("tau must lie in (0, 1], got {}", self.tau)));
        }
        if self.eps.is_empty() || self.eps.iter().any(|e| !(*e > 0.0 && e.is_finite())) {
            return Err(Error::Input("eps schedule must be a nonempty list of positive numbers".into()));
        }
        if let Notion::MCAlpha(a) = self.notion {
            if !(a >= 1.0) {
                return Err(Error::Input(format!("alpha must be at least 1, got {a}")));
            }
        }
        let n = self.domain.dim();
        for c in [&self.big_f, &self.g] {
            if let Some(d) = c.dim() {
                if d != n {
                    return Err(Error::DimensionMismatch { expected: n, found: d });
                }
            }
        }
        if let Some(g) = gauge {
            let zs = g.zero_set();
            if let Some(p) = self.exceptional.iter().find(|p| !zs.contains(p)) {
                return Err(Error::Input(format!("exceptional part {p:?} is not in the gauge's zero set")));
            }
        }
        Ok(())
    }
}

/// Outcome of one `eps` in the schedule.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpsOutcome {
    pub eps: f64,
    pub max_sum: f64,
    /// Lowest trial index whose sum reached `eps`.
    pub refuting_trial: Option<usize>,
    pub sums: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum Verdict<W> {
    Refuted { eps: f64, trial: usize, witness: W },
    ConsistentAtDepth { depth: u32, trials: usize },
}

impl<W> Verdict<W> {
    pub fn refuted(&self) -> bool {
        matches!(self, Verdict::Refuted { .. })
    }

    pub fn witness(&self) -> Option<&W> {
        match self {
            Verdict::Refuted { witness, .. } => Some(witness),
            Verdict::ConsistentAtDepth { .. } => None,
        }
    }
}
