use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gauges::Gauge;
use crate::geometry::Figure;
use crate::rational::{self, Rational};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Ball {
    pub center: Vec<f64>,
    pub radius: f64,
}

impl Ball {
    pub fn new(center: Vec<f64>, radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::Input(format!("ball radius must be positive, got {radius}")));
        }
        if center.iter().any(|c| !c.is_finite()) {
            return Err(Error::Input("ball center must be finite".into()));
        }
        Ok(Self { center, radius })
    }

    pub fn center_exact(&self) -> Vec<Rational> {
        rational::point_from_f64(&self.center).expect("finite center")
    }

    pub fn radius_exact(&self) -> Rational {
        rational::from_f64(self.radius).expect("finite radius")
    }

    /// `|x_i - x_j| > r_i + r_j`, exactly.
    pub fn separated_from(&self, other: &Ball) -> bool {
        let d2 = rational::dist_sq(&self.center_exact(), &other.center_exact());
        d2 > rational::sq(&(self.radius_exact() + other.radius_exact()))
    }
}

/// A finite system of pairwise disjoint balls.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Packing {
    pub balls: Vec<Ball>,
}

/// Result of a fineness or disjointness check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FinenessReport {
    pub fine: bool,
    pub first_violation: Option<usize>,
    pub detail: Option<String>,
}

impl FinenessReport {
    pub(crate) fn ok() -> Self {
        Self { fine: true, first_violation: None, detail: None }
    }

    pub(crate) fn violation(i: usize, detail: String) -> Self {
        Self { fine: false, first_violation: Some(i), detail: Some(detail) }
    }
}

impl Packing {
    pub fn new(balls: Vec<Ball>) -> Result<Self> {
        let p = Self { balls };
        if let Some((i, j)) = p.overlapping_pair() {
            return Err(Error::Input(format!("balls {i} and {j} are not disjoint")));
        }
        Ok(p)
    }

    pub fn len(&self) -> usize {
        self.balls.len()
    }

    pub fn is_empty(&self) -> bool {
        self.balls.is_empty()
    }

    pub fn overlapping_pair(&self) -> Option<(usize, usize)> {
        for i in 0..self.balls.len() {
            for j in i + 1..self.balls.len() {
                if !self.balls[i].separated_from(&self.balls[j]) {
                    return Some((i, j));
                }
            }
        }
        None
    }

    /// `2 r_i < δ(x_i)` for every ball, exactly.
    pub fn is_delta_fine(&self, delta: &Gauge) -> FinenessReport {
        for (i, b) in self.balls.iter().enumerate() {
            let d = delta.radius_exact(&b.center);
            if b.radius_exact() * rational::int(2) >= d {
                return FinenessReport::violation(
                    i,
                    format!("2r = {} is not below δ(x) = {}", 2.0 * b.radius, rational::to_f64(&d)),
                );
            }
        }
        FinenessReport::ok()
    }
}

/// Tuning for [`sample_packing_with`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PackingSampler {
    pub count: usize,
    pub seed: u64,
    pub stream: u64,
    /// Attempts per requested ball.
    pub attempts_per_ball: usize,
}

impl PackingSampler {
    pub fn new(count: usize, seed: u64) -> Self {
        Self { count, seed, stream: 0, attempts_per_ball: 200 }
    }
}

pub fn sample_packing(region: &Figure, delta: &Gauge, count: usize, seed: u64) -> Result<Packing> {
    sample_packing_with(region, delta, &PackingSampler::new(count, seed), |_| true)
}

/// Rejection sampler: tags uniform in the closed region (and accepted by
/// `admit`), off the zero set, radius uniform in `(0, δ(x)/2)`; balls that
/// meet earlier ones are discarded.
pub fn sample_packing_with(
    region: &Figure,
    delta: &Gauge,
    cfg: &PackingSampler,
    admit: impl Fn(&[f64]) -> bool,
) -> Result<Packing> {
    if cfg.count == 0 {
        return Err(Error::Input("count must be at least 1".into()));
    }
    if region.is_empty() {
        return Err(Error::EmptySet("packing region"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(cfg.stream);
    let weights: Vec<f64> = region.cubes().iter().map(|c| c.side_f64().powi(region.dim() as i32)).collect();
    let total: f64 = weights.iter().sum();
    let budget = cfg.attempts_per_ball.saturating_mul(cfg.count).max(1000);
    let mut balls: Vec<Ball> = Vec::new();
    let mut attempts = 0;
    while balls.len() < cfg.count && attempts < budget {
        attempts += 1;
        let mut u = rng.random_range(0.0..total);
        let mut k = 0;
        while k + 1 < weights.len() && u >= weights[k] {
            u -= weights[k];
            k += 1;
        }
        let c = &region.cubes()[k];
        let s = c.side_f64();
        let x: Vec<f64> = (0..region.dim()).map(|i| c.lower_f64(i) + s * rng.random_range(0.0..=1.0)).collect();
        if !admit(&x) {
            continue;
        }
        let d = delta.radius(&x);
        if !(d > 0.0) {
            continue;
        }
        let r = rng.random_range(0.0..1.0) * d.min(1e300) / 2.0;
        if !(r > 0.0) {
            continue;
        }
        let Ok(b) = Ball::new(x, r) else { continue };
        if b.radius_exact() * rational::int(2) >= delta.radius_exact(&b.center) {
            continue;
        }
        if balls.iter().all(|o| o.separated_from(&b)) {
            balls.push(b);
        }
    }
    if balls.is_empty() {
        return Err(Error::NoPlacement { attempts });
    }
    Ok(Packing { balls })
}
