use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gauges::{Gauge, TaggedItem, TaggedPartition};
use crate::geometry::{is_eps_isoperimetric_sampled, DyadicCube, Figure, IsoSearch, Region};
use crate::harness::claim::{EpsOutcome, IntegralClaim, Notion, Verdict, FALSIFIER_NOTE};
use crate::rational;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BvCheckConfig {
    pub trials: usize,
    pub seed: u64,
    /// Target number of sets per partition.
    pub items: usize,
    /// Candidate sets drawn per partition.
    pub attempts: usize,
    pub iso: IsoSearch,
}

impl BvCheckConfig {
    pub fn new(trials: usize, seed: u64) -> Self {
        Self {
            trials,
            seed,
            items: 8,
            attempts: 400,
            iso: IsoSearch { depth: 1, random_masks: 16, random_boxes: 16, ..IsoSearch::default() },
        }
    }
}

/// Candidates dropped by each filter, summed over trials.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Rejections {
    pub not_fine: usize,
    pub outside_domain: usize,
    pub overlapping: usize,
    pub not_regular: usize,
    pub tag_outside_set: usize,
    pub not_isoperimetric: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BvWitness {
    pub eps: f64,
    pub partition: TaggedPartition,
    pub residuals: Vec<f64>,
    pub sum: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BvReport {
    pub notion: Notion,
    pub config: BvCheckConfig,
    pub outcomes: Vec<EpsOutcome>,
    pub rejections: Rejections,
    pub verdict: Verdict<BvWitness>,
    pub note: String,
}

pub fn check_bv_partition_integral(claim: &IntegralClaim, gauge: &Gauge, trials: usize, seed: u64) -> Result<BvReport> {
    check_bv_partition_integral_with(claim, gauge, &BvCheckConfig::new(trials, seed))
}

struct Trial {
    per_eps: Vec<(TaggedPartition, Vec<f64>)>,
    rejections: Rejections,
}

/// Samples `delta`-fine partitions by small dyadic boxes near random tags
/// and sums `|F(A_i) - f(x_i) G(A_i)|` over the `eps`-regular items. The
/// intrinsic notion drops sets leaving the domain; the starred notion keeps
/// only items with the tag in the set and a sampled isoperimetric set.
pub fn check_bv_partition_integral_with(claim: &IntegralClaim, gauge: &Gauge, cfg: &BvCheckConfig) -> Result<BvReport> {
    claim.validate(Some(gauge))?;
    if !matches!(claim.notion, Notion::PfefferR | Notion::PfefferRIntrinsic | Notion::RStar) {
        return Err(Error::Input(format!("{:?} is not a partition notion", claim.notion)));
    }
    if cfg.trials == 0 {
        return Err(Error::Input("trials must be at least 1".into()));
    }
    let window = claim.domain.sampling_figure()?;
    let trials: Vec<Trial> =
        (0..cfg.trials).into_par_iter().map(|t| run_trial(claim, gauge, cfg, &window, t)).collect::<Result<_>>()?;

    let mut rejections = Rejections::default();
    for t in &trials {
        let r = &t.rejections;
        rejections.not_fine += r.not_fine;
        rejections.outside_domain += r.outside_domain;
        rejections.overlapping += r.overlapping;
        rejections.not_regular += r.not_regular;
        rejections.tag_outside_set += r.tag_outside_set;
        rejections.not_isoperimetric += r.not_isoperimetric;
    }
    if trials.iter().all(|t| t.per_eps.iter().all(|(p, _)| p.items.is_empty())) && rejections.not_fine == 0 {
        return Err(Error::NoPlacement { attempts: cfg.attempts * cfg.trials });
    }
    let mut outcomes = Vec::new();
    let mut verdict = None;
    for (k, &eps) in claim.eps.iter().enumerate() {
        let sums: Vec<f64> = trials.iter().map(|t| t.per_eps[k].1.iter().sum()).collect();
        let refuting_trial = sums.iter().position(|&s| s >= eps);
        if let (None, Some(t)) = (&verdict, refuting_trial) {
            let (partition, residuals) = trials[t].per_eps[k].clone();
            verdict = Some(Verdict::Refuted { eps, trial: t, witness: BvWitness { eps, partition, residuals, sum: sums[t] } });
        }
        outcomes.push(EpsOutcome { eps, max_sum: sums.iter().copied().fold(0.0, f64::max), refuting_trial, sums });
    }
    Ok(BvReport {
        notion: claim.notion,
        config: cfg.clone(),
        outcomes,
        rejections,
        verdict: verdict.unwrap_or(Verdict::ConsistentAtDepth { depth: 0, trials: cfg.trials }),
        note: FALSIFIER_NOTE.into(),
    })
}

fn run_trial(claim: &IntegralClaim, gauge: &Gauge, cfg: &BvCheckConfig, window: &Figure, t: usize) -> Result<Trial> {
    let n = window.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(t as u64);
    let weights: Vec<f64> = window.cubes().iter().map(|c| c.side_f64().powi(n as i32)).collect();
    let total: f64 = weights.iter().sum();
    let domain = match &claim.domain {
        crate::harness::claim::Domain::Whole(_) => None,
        _ => Some(window),
    };
    let mut rej = Rejections::default();
    let mut items: Vec<(Figure, Vec<f64>)> = Vec::new();
    for _ in 0..cfg.attempts {
        if items.len() >= cfg.items {
            break;
        }
        let mut u = rng.random_range(0.0..total);
        let mut k = 0;
        while k + 1 < weights.len() && u >= weights[k] {
            u -= weights[k];
            k += 1;
        }
        let c = &window.cubes()[k];
        let s = c.side_f64();
        let x: Vec<f64> = (0..n).map(|i| c.lower_f64(i) + s * rng.random_range(0.0..=1.0)).collect();
        let delta = gauge.radius(&x);
        if !(delta > 0.0) {
            continue;
        }
        // First level whose 3-cube-wide boxes fit below delta, plus 0..=2.
        let mut level = ((3.0 * (n as f64).sqrt() / delta).log2().ceil() as i32).max(crate::geometry::MIN_LEVEL);
        while (n as f64) * (3.0 * 2f64.powi(-level)).powi(2) >= delta * delta {
            level += 1;
        }
        level += rng.random_range(0..=2);
        let scale = 2f64.powi(level);
        let shift: i64 = if rng.random_range(0..4) == 0 { if rng.random_bool(0.5) { 1 } else { -1 } } else { 0 };
        let axis_shift = rng.random_range(0..n);
        let mut cubes = Vec::new();
        let ranges: Vec<(i64, i64)> = (0..n)
            .map(|i| {
                let b = (x[i] * scale).floor() as i64 + if i == axis_shift { shift } else { 0 };
                let lo = b - rng.random_range(0..=1);
                (lo, lo + rng.random_range(0..=1))
            })
            .collect();
        let mut idx: Vec<i64> = ranges.iter().map(|r| r.0).collect();
        'cells: loop {
            cubes.push(DyadicCube { level, index: idx.clone() });
            for i in 0..n {
                if idx[i] < ranges[i].1 {
                    idx[i] += 1;
                    continue 'cells;
                }
                idx[i] = ranges[i].0;
            }
            break;
        }
        let fig = Figure::new(n, cubes)?;
        let item = TaggedItem { set: Region::Figure(fig.clone()), tag: x.clone() };
        if item.diameter_sq_with_tag()? >= rational::sq(&gauge.radius_exact(&x)) {
            rej.not_fine += 1;
            continue;
        }
        if claim.notion == Notion::PfefferRIntrinsic {
            if let Some(a) = domain {
                if !fig.difference(a)?.is_empty() {
                    rej.outside_domain += 1;
                    continue;
                }
            }
        }
        let mut overlap = false;
        for (g, _) in &items {
            if !g.intersection(&fig)?.is_empty() {
                overlap = true;
                break;
            }
        }
        if overlap {
            rej.overlapping += 1;
            continue;
        }
        items.push((fig, x));
    }

    let mut per_eps = Vec::new();
    for &eps in &claim.eps {
        let mut kept = Vec::new();
        let mut residuals = Vec::new();
        for (fig, x) in &items {
            let xr = rational::point_from_f64(x)?;
            if !fig.regularity(Some(&xr))?.exceeds(eps)? {
                rej.not_regular += 1;
                continue;
            }
            if claim.notion == Notion::RStar {
                if !fig.contains_point(&xr) {
                    rej.tag_outside_set += 1;
                    continue;
                }
                if !is_eps_isoperimetric_sampled(fig, eps, &cfg.iso)?.passed() {
                    rej.not_isoperimetric += 1;
                    continue;
                }
            }
            let v = claim.big_f.eval_figure(fig)? - claim.f.eval(x) * claim.g.eval_figure(fig)?;
            residuals.push(v.abs());
            kept.push(TaggedItem { set: Region::Figure(fig.clone()), tag: x.clone() });
        }
        per_eps.push((TaggedPartition::new(kept), residuals));
    }
    Ok(Trial { per_eps, rejections: rej })
}
