use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gauges::{sample_packing_with, Ball, Gauge, Packing, PackingSampler};
use crate::geometry::{is_eps_isoperimetric_sampled, Figure, IsoSearch};
use crate::harness::claim::{EpsOutcome, IntegralClaim, Notion, Verdict, FALSIFIER_NOTE};
use crate::harness::seminorm::{seminorm_lower_bound, Seminorm, SeminormQuery};
use crate::rational;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PackingCheckConfig {
    pub trials: usize,
    pub seed: u64,
    pub balls: usize,
    pub attempts_per_ball: usize,
    pub depth: u32,
    pub per_level: usize,
    pub iso: IsoSearch,
}

impl PackingCheckConfig {
    pub fn new(trials: usize, seed: u64) -> Self {
        Self {
            trials,
            seed,
            balls: 8,
            attempts_per_ball: 200,
            depth: 4,
            per_level: 512,
            iso: IsoSearch { depth: 1, random_masks: 16, random_boxes: 16, ..IsoSearch::default() },
        }
    }
}

/// One ball of a packing with its seminorm lower bound at `tau r`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BallTerm {
    pub ball: Ball,
    pub radius: f64,
    pub value: f64,
    pub witness: Option<Figure>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PackingWitness {
    pub eps: f64,
    /// Smallest prefix (by value) of the refuting packing whose sum reaches
    /// `eps`; single cubes replace boxes where the sum allows.
    pub terms: Vec<BallTerm>,
    pub sum: f64,
    pub full_sum: f64,
}

impl PackingWitness {
    pub fn packing(&self) -> Packing {
        Packing { balls: self.terms.iter().map(|t| t.ball.clone()).collect() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PackingReport {
    pub notion: Notion,
    pub seminorm: Seminorm,
    pub tau: f64,
    pub config: PackingCheckConfig,
    pub outcomes: Vec<EpsOutcome>,
    pub verdict: Verdict<PackingWitness>,
    pub note: String,
}

type BestCube = Option<(f64, Figure)>;

struct TrialResult {
    /// Per eps, the terms of every ball.
    terms: Vec<Vec<(BallTerm, BestCube)>>,
}

fn seminorm_kind(notion: Notion) -> Result<Seminorm> {
    match notion {
        Notion::PackingR => Ok(Seminorm::P),
        Notion::PackingRStar => Ok(Seminorm::Q),
        other => Err(Error::Input(format!("{other:?} is not a packing notion"))),
    }
}

pub fn check_packing_integral(claim: &IntegralClaim, gauge: &Gauge, trials: usize, seed: u64) -> Result<PackingReport> {
    check_packing_integral_with(claim, gauge, &PackingCheckConfig::new(trials, seed))
}

/// Samples `delta`-fine packings with tags in the domain and sums the
/// seminorm lower bounds of `F - f(x_i) G` at `B(x_i, tau r_i)`.
pub fn check_packing_integral_with(claim: &IntegralClaim, gauge: &Gauge, cfg: &PackingCheckConfig) -> Result<PackingReport> {
    claim.validate(Some(gauge))?;
    let kind = seminorm_kind(claim.notion)?;
    let window = claim.domain.sampling_figure()?;
    let trials = run_trials(claim, kind, gauge, cfg, &window, &|_| true)?;
    Ok(assemble(claim, kind, cfg, &trials))
}

fn run_trials(
    claim: &IntegralClaim,
    kind: Seminorm,
    gauge: &Gauge,
    cfg: &PackingCheckConfig,
    window: &Figure,
    keep: &(dyn Fn(&Ball) -> bool + Sync),
) -> Result<Vec<TrialResult>> {
    if cfg.trials == 0 {
        return Err(Error::Input("trials must be at least 1".into()));
    }
    (0..cfg.trials)
        .into_par_iter()
        .map(|t| {
            let sampler = PackingSampler {
                count: cfg.balls,
                seed: cfg.seed,
                stream: t as u64,
                attempts_per_ball: cfg.attempts_per_ball,
            };
            let packing = sample_packing_with(window, gauge, &sampler, |x| claim.domain.contains_tag(x))?;
            let balls: Vec<Ball> = packing.balls.into_iter().filter(|b| keep(b)).collect();
            let terms = claim
                .eps
                .iter()
                .map(|&eps| balls.iter().map(|b| ball_term(claim, kind, cfg, b, eps)).collect::<Result<Vec<_>>>())
                .collect::<Result<Vec<_>>>()?;
            Ok(TrialResult { terms })
        })
        .collect()
}

fn ball_term(
    claim: &IntegralClaim,
    kind: Seminorm,
    cfg: &PackingCheckConfig,
    b: &Ball,
    eps: f64,
) -> Result<(BallTerm, Option<(f64, Figure)>)> {
    let radius = claim.tau * b.radius;
    let mut q = SeminormQuery::new(claim.residual_at(&b.center), b.center.clone(), radius, eps, kind);
    q.depth = cfg.depth;
    q.seed = cfg.seed;
    q.per_level = cfg.per_level;
    q.iso = cfg.iso.clone();
    let bound = seminorm_lower_bound(&q)?;
    let cube = bound.best_cube.map(|(v, c)| (v, Figure::from_cube(c)));
    Ok((BallTerm { ball: b.clone(), radius, value: bound.value, witness: bound.witness }, cube))
}

fn assemble(claim: &IntegralClaim, kind: Seminorm, cfg: &PackingCheckConfig, trials: &[TrialResult]) -> PackingReport {
    let mut outcomes = Vec::new();
    let mut verdict = None;
    for (k, &eps) in claim.eps.iter().enumerate() {
        let sums: Vec<f64> = trials.iter().map(|t| t.terms[k].iter().map(|(b, _)| b.value).sum()).collect();
        let refuting_trial = sums.iter().position(|&s| s >= eps);
        if let (None, Some(t)) = (&verdict, refuting_trial) {
            verdict = Some(Verdict::Refuted { eps, trial: t, witness: minimize(&trials[t].terms[k], eps, sums[t]) });
        }
        outcomes.push(EpsOutcome { eps, max_sum: sums.iter().copied().fold(0.0, f64::max), refuting_trial, sums });
    }
    PackingReport {
        notion: claim.notion,
        seminorm: kind,
        tau: claim.tau,
        config: cfg.clone(),
        outcomes,
        verdict: verdict.unwrap_or(Verdict::ConsistentAtDepth { depth: cfg.depth, trials: trials.len() }),
        note: FALSIFIER_NOTE.into(),
    }
}

fn minimize(terms: &[(BallTerm, Option<(f64, Figure)>)], eps: f64, full_sum: f64) -> PackingWitness {
    let mut order: Vec<usize> = (0..terms.len()).collect();
    order.sort_by(|&a, &b| terms[b].0.value.total_cmp(&terms[a].0.value));
    let mut kept = Vec::new();
    let mut sum = 0.0;
    for &i in &order {
        kept.push(i);
        sum += terms[i].0.value;
        if sum >= eps {
            break;
        }
    }
    let mut out: Vec<BallTerm> = Vec::new();
    for &i in &kept {
        let (term, cube) = &terms[i];
        let mut term = term.clone();
        if let Some((v, fig)) = cube {
            if sum - term.value + v >= eps {
                sum += v - term.value;
                term.value = *v;
                term.witness = Some(fig.clone());
            }
        }
        out.push(term);
    }
    PackingWitness { eps, terms: out, sum, full_sum }
}

/// Re-checks a witness as a refutation for `notion`: every test set is
/// admissible for its ball (exactly), the residual values are recomputed,
/// and their sum reaches `eps`.
pub fn revalidate_witness(claim: &IntegralClaim, w: &PackingWitness, notion: Notion, iso: &IsoSearch) -> Result<bool> {
    let kind = seminorm_kind(notion)?;
    let mut sum = 0.0;
    for t in &w.terms {
        let Some(e) = &t.witness else { return Ok(false) };
        let x = rational::point_from_f64(&t.ball.center)?;
        if e.is_empty() || !e.inside_open_ball(&x, &rational::from_f64(t.radius)?) {
            return Ok(false);
        }
        if !e.regularity(Some(&x))?.exceeds(w.eps)? {
            return Ok(false);
        }
        if kind == Seminorm::Q && (!e.contains_point(&x) || !is_eps_isoperimetric_sampled(e, w.eps, iso)?.passed()) {
            return Ok(false);
        }
        sum += claim.residual_at(&t.ball.center).eval_figure(e)?.abs();
    }
    Ok(sum >= w.eps)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RestrictionReport {
    pub inside: PackingReport,
    pub extended: PackingReport,
    pub verdicts_agree: bool,
    pub witnesses_agree: bool,
}

/// Runs the claim for `F⌊A` and `G⌊A` twice on the same packings: once with
/// tags in `A` and integrand `f`, once with tags anywhere in the domain and
/// the zero extension of `f`. Outside `A` the gauge is capped by the
/// distance to `A`.
pub fn restriction_consistency(
    claim: &IntegralClaim,
    a: &Figure,
    gauge: &Gauge,
    cfg: &PackingCheckConfig,
) -> Result<RestrictionReport> {
    claim.validate(Some(gauge))?;
    let kind = seminorm_kind(claim.notion)?;
    let window = claim.domain.sampling_figure()?;
    let a_exact = a.clone();
    let inner = gauge.clone();
    let capped = Gauge::custom("capped-outside", gauge.zero_set(), move |x| {
        let d = inner.radius(x);
        match rational::point_from_f64(x) {
            Ok(xr) if a_exact.contains_point(&xr) => d,
            _ => d.min(0.999 * distance_to_figure(&a_exact, x)),
        }
    });

    let mut inside_claim = claim.clone();
    inside_claim.big_f = claim.big_f.restrict(a);
    inside_claim.g = claim.g.restrict(a);
    let mut extended_claim = inside_claim.clone();
    let f = claim.f.clone();
    let a_for_f = a.clone();
    extended_claim.f = crate::charges::ScalarField::custom("zero-extension", move |x| match rational::point_from_f64(x) {
        Ok(xr) if a_for_f.contains_point(&xr) => f.eval(x),
        _ => 0.0,
    });

    let in_a = |b: &Ball| rational::point_from_f64(&b.center).map(|x| a.contains_point(&x)).unwrap_or(false);
    let inside_trials = run_trials(&inside_claim, kind, &capped, cfg, &window, &in_a)?;
    let extended_trials = run_trials(&extended_claim, kind, &capped, cfg, &window, &|_| true)?;
    let inside = assemble(&inside_claim, kind, cfg, &inside_trials);
    let extended = assemble(&extended_claim, kind, cfg, &extended_trials);

    let (verdicts_agree, witnesses_agree) = match (&inside.verdict, &extended.verdict) {
        (Verdict::ConsistentAtDepth { .. }, Verdict::ConsistentAtDepth { .. }) => (true, true),
        (Verdict::Refuted { eps: e1, trial: t1, witness: w1 }, Verdict::Refuted { eps: e2, trial: t2, witness: w2 }) => {
            let same = e1 == e2 && t1 == t2 && same_up_to(a, w1, w2)?;
            (true, same)
        }
        _ => (false, false),
    };
    Ok(RestrictionReport { inside, extended, verdicts_agree, witnesses_agree })
}

fn same_up_to(a: &Figure, w1: &PackingWitness, w2: &PackingWitness) -> Result<bool> {
    if w1.terms.len() != w2.terms.len() {
        return Ok(false);
    }
    for (s, t) in w1.terms.iter().zip(&w2.terms) {
        if s.ball != t.ball {
            return Ok(false);
        }
        let cut = |w: &Option<Figure>| -> Result<Option<Figure>> { w.as_ref().map(|e| e.intersection(a)).transpose() };
        if cut(&s.witness)? != cut(&t.witness)? {
            return Ok(false);
        }
    }
    Ok(true)
}

fn distance_to_figure(a: &Figure, x: &[f64]) -> f64 {
    a.cubes()
        .iter()
        .map(|c| {
            let s = c.side_f64();
            x.iter()
                .enumerate()
                .map(|(i, &v)| {
                    let lo = c.lower_f64(i);
                    let d = (lo - v).max(v - (lo + s)).max(0.0);
                    d * d
                })
                .sum::<f64>()
                .sqrt()
        })
        .fold(f64::INFINITY, f64::min)
}
