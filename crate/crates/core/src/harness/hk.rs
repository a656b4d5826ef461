use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::charges::{Charge, Function1D, ScalarField};
use crate::error::{Error, Result};
use crate::gauges::{cousin_walk, Gauge};
use crate::harness::claim::{EpsOutcome, IntegralClaim, Notion, Verdict, DEFAULT_EPS, FALSIFIER_NOTE};
use crate::rational;

/// A Henstock–Kurzweil(–Stieltjes) claim on `[a, b]`: `F` is an indefinite
/// integral of `f` with respect to `G`.
#[derive(Clone, Debug)]
pub struct HkClaim {
    pub f: ScalarField,
    pub big_f: Function1D,
    pub g: Function1D,
    pub a: f64,
    pub b: f64,
    pub eps: Vec<f64>,
}

impl HkClaim {
    pub fn new(f: ScalarField, big_f: Function1D, g: Function1D, a: f64, b: f64) -> Self {
        Self { f, big_f, g, a, b, eps: DEFAULT_EPS.to_vec() }
    }

    pub fn with_eps(mut self, eps: &[f64]) -> Self {
        self.eps = eps.to_vec();
        self
    }

    /// Reads an HK/HKS [`IntegralClaim`] whose domain is one interval. `F`
    /// must be a 1D function; `G` a 1D function or a constant density.
    pub fn from_claim(claim: &IntegralClaim) -> Result<Self> {
        if !matches!(claim.notion, Notion::HK | Notion::HKS) {
            return Err(Error::Input(format!("{:?} is not a Henstock-Kurzweil notion", claim.notion)));
        }
        let (a, b) = match &claim.domain {
            crate::harness::claim::Domain::Line(l) if l.intervals().len() == 1 => {
                let (a, b) = &l.intervals()[0];
                (rational::to_f64(a), rational::to_f64(b))
            }
            _ => return Err(Error::Input("HK claims need a single-interval domain".into())),
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
        Ok(Self { f: claim.f.clone(), big_f: line(&claim.big_f, "F")?, g: line(&claim.g, "G")?, a, b, eps: claim.eps.clone() })
    }

    /// `F(b) - F(a)`.
    pub fn definite(&self) -> f64 {
        self.big_f.eval(self.b) - self.big_f.eval(self.a)
    }
}

/// The `hk-singular` catalog gauge with parameters tied to `eps`: `c0` at
/// `center`, `min(kappa t^4, t/2)` elsewhere.
pub fn singular_gauge(eps: f64, center: f64) -> Result<Gauge> {
    Gauge::catalog("hk-singular", &[("c0", (0.5 * eps).sqrt()), ("kappa", 0.5 * eps), ("center", center)])
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HkCheckConfig {
    pub trials: usize,
    pub seed: u64,
    pub depth_budget: u32,
    /// Probability that an interval of a sub-partition is kept.
    pub keep: f64,
    /// Largest terms kept in a witness.
    pub top_terms: usize,
}

impl HkCheckConfig {
    pub fn new(trials: usize, seed: u64) -> Self {
        Self { trials, seed, depth_budget: 60, keep: 0.5, top_terms: 16 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HkTerm {
    pub lo: f64,
    pub hi: f64,
    pub tag: f64,
    pub residual: f64,
}

/// Trial 0 is the full partition of `[a, b]`; later trials keep a random
/// subset of the intervals inside the window `[lo, hi]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HkTrial {
    pub trial: usize,
    pub lo: f64,
    pub hi: f64,
    /// Intervals of the full partition inside the window.
    pub intervals: usize,
    pub kept: usize,
    pub sum: f64,
    pub riemann_sum: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HkWitness {
    pub eps: f64,
    pub trial: HkTrial,
    /// Largest residuals of the witness, by decreasing value.
    pub top: Vec<HkTerm>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HkReport {
    pub notion: Notion,
    pub gauge: serde_json::Value,
    pub config: HkCheckConfig,
    pub a: f64,
    pub b: f64,
    /// `F(b) - F(a)`.
    pub definite: f64,
    pub trials: Vec<HkTrial>,
    pub outcomes: Vec<EpsOutcome>,
    pub verdict: Verdict<HkWitness>,
    pub note: String,
}

impl HkReport {
    pub fn max_sum(&self) -> f64 {
        self.trials.iter().map(|t| t.sum).fold(0.0, f64::max)
    }

    /// Riemann sum of the full partition, an estimate of `∫ f dG`.
    pub fn riemann_sum(&self) -> f64 {
        self.trials[0].riemann_sum
    }
}

pub fn hk_check(claim: &HkClaim, gauge: &Gauge, trials: usize, seed: u64) -> Result<HkReport> {
    hk_check_with(claim, gauge, &HkCheckConfig::new(trials, seed))
}

/// Saks–Henstock sums `Σ |F(b_i) - F(a_i) - f(ξ_i)(G(b_i) - G(a_i))|` over
/// Cousin partitions fine for `gauge`, streamed rather than stored.
pub fn hk_check_with(claim: &HkClaim, gauge: &Gauge, cfg: &HkCheckConfig) -> Result<HkReport> {
    if !(claim.a < claim.b) || !claim.a.is_finite() || !claim.b.is_finite() {
        return Err(Error::Input(format!("bad interval [{}, {}]", claim.a, claim.b)));
    }
    if claim.eps.is_empty() || claim.eps.iter().any(|e| !(*e > 0.0)) {
        return Err(Error::Input("eps schedule must be a nonempty list of positive numbers".into()));
    }
    if cfg.trials == 0 {
        return Err(Error::Input("trials must be at least 1".into()));
    }
    if !(0.0..=1.0).contains(&cfg.keep) {
        return Err(Error::Input(format!("keep probability must lie in [0, 1], got {}", cfg.keep)));
    }
    if !gauge.zero_set().is_empty() {
        return Err(Error::Input("HK gauges must be positive; drop the zero set".into()));
    }
    let delta = gauge.line_radius();
    let runs = run_trials(claim, &*delta, cfg)?;

    let mut outcomes = Vec::new();
    let mut verdict = None;
    for &eps in &claim.eps {
        let sums: Vec<f64> = runs.iter().map(|(t, _)| t.sum).collect();
        let refuting_trial = sums.iter().position(|&s| s >= eps);
        if let (None, Some(t)) = (&verdict, refuting_trial) {
            let (trial, top) = runs[t].clone();
            verdict = Some(Verdict::Refuted { eps, trial: t, witness: HkWitness { eps, trial, top } });
        }
        outcomes.push(EpsOutcome { eps, max_sum: sums.iter().copied().fold(0.0, f64::max), refuting_trial, sums });
    }
    let g_is_identity = (0..5).all(|i| {
        let x = claim.a + (claim.b - claim.a) * i as f64 / 4.0;
        claim.g.eval(x) - claim.g.eval(claim.a) == x - claim.a
    });
    Ok(HkReport {
        notion: if g_is_identity { Notion::HK } else { Notion::HKS },
        gauge: gauge.describe(),
        config: cfg.clone(),
        a: claim.a,
        b: claim.b,
        definite: claim.definite(),
        trials: runs.into_iter().map(|(t, _)| t).collect(),
        outcomes,
        verdict: verdict.unwrap_or(Verdict::ConsistentAtDepth { depth: cfg.depth_budget, trials: cfg.trials }),
        note: FALSIFIER_NOTE.into(),
    })
}

struct Selector {
    rng: ChaCha8Rng,
    trial: HkTrial,
    top: Vec<HkTerm>,
}

/// One Cousin walk of `[a, b]` shared by all trials: trial 0 keeps every
/// interval, trial `t` keeps those inside a random window, each with
/// probability `keep`, drawn from its own stream.
fn run_trials(claim: &HkClaim, delta: &dyn Fn(f64) -> f64, cfg: &HkCheckConfig) -> Result<Vec<(HkTrial, Vec<HkTerm>)>> {
    let mut sel: Vec<Selector> = (0..cfg.trials)
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(t as u64);
            let (lo, hi) = if t == 0 {
                (claim.a, claim.b)
            } else {
                let u: f64 = rng.random_range(claim.a..claim.b);
                let v: f64 = rng.random_range(claim.a..claim.b);
                (u.min(v), u.max(v))
            };
            Selector { rng, trial: HkTrial { trial: t, lo, hi, intervals: 0, kept: 0, sum: 0.0, riemann_sum: 0.0 }, top: Vec::new() }
        })
        .collect();
    let (mut fa, mut ga) = (claim.big_f.eval(claim.a), claim.g.eval(claim.a));
    let total = cousin_walk(claim.a, claim.b, delta, cfg.depth_budget, &mut |a, b, tag| {
        // the walk is left to right, so the left values carry over
        let (fb, gb) = (claim.big_f.eval(b), claim.g.eval(b));
        let dg = gb - ga;
        let ft = claim.f.eval(&[tag]);
        let r = (fb - fa - ft * dg).abs();
        (fa, ga) = (fb, gb);
        for (t, s) in sel.iter_mut().enumerate() {
            if a < s.trial.lo || b > s.trial.hi {
                continue;
            }
            s.trial.intervals += 1;
            if t > 0 && !s.rng.random_bool(cfg.keep) {
                continue;
            }
            s.trial.kept += 1;
            s.trial.sum += r;
            s.trial.riemann_sum += ft * dg;
            let top = &mut s.top;
            if cfg.top_terms > 0 && (top.len() < cfg.top_terms || r > top[top.len() - 1].residual) {
                let at = top.partition_point(|x| x.residual >= r);
                top.insert(at, HkTerm { lo: a, hi: b, tag, residual: r });
                top.truncate(cfg.top_terms);
            }
        }
    })?;
    debug_assert_eq!(total, sel[0].trial.intervals);
    Ok(sel.into_iter().map(|s| (s.trial, s.top)).collect())
}

// Gauss–Kronrod 15/7 abscissae and weights on [-1, 1], positive half.
#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

fn gk15(f: &dyn Fn(f64) -> f64, lo: f64, hi: f64) -> (f64, f64) {
    let c = 0.5 * (lo + hi);
    let h = 0.5 * (hi - lo);
    let fc = f(c);
    let mut pairs = [(0.0, 0.0); 7];
    let mut k = WGK[7] * fc;
    let mut g = WG[3] * fc;
    for i in 0..7 {
        pairs[i] = (f(c - h * XGK[i]), f(c + h * XGK[i]));
        let s = pairs[i].0 + pairs[i].1;
        k += WGK[i] * s;
        if i % 2 == 1 {
            g += WG[i / 2] * s;
        }
    }
    // QUADPACK's scaling of the Kronrod-Gauss difference
    let mean = 0.5 * k;
    let mut asc = WGK[7] * (fc - mean).abs();
    for i in 0..7 {
        asc += WGK[i] * ((pairs[i].0 - mean).abs() + (pairs[i].1 - mean).abs());
    }
    let (asc, mut err) = (asc * h.abs(), ((k - g) * h).abs());
    if asc != 0.0 && err != 0.0 {
        err = asc * (200.0 * err / asc).powf(1.5).min(1.0);
    }
    (k * h, err)
}

/// One dyadic shell (or a whole regular segment when `k` is `None`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShellStep {
    /// Singular point the shell approaches.
    pub toward: Option<f64>,
    pub k: Option<u32>,
    pub lo: f64,
    pub hi: f64,
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HkEstimate {
    pub value: f64,
    /// Quadrature error estimates plus the tail allowance of every
    /// truncated shell sequence. Not a bound.
    pub error_indicator: f64,
    pub evaluations: usize,
    pub trace: Vec<ShellStep>,
    pub note: String,
}

pub const ADAPTIVE_NOTE: &str =
    "adaptive estimate: shell contributions stabilized below tolerance; not a certified Henstock-Kurzweil value";

struct Panel {
    lo: f64,
    hi: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error).is_eq()
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.error.total_cmp(&other.error)
    }
}

struct Counter {
    evaluations: usize,
    budget: usize,
}

impl Counter {
    fn panel(&mut self, f: &dyn Fn(f64) -> f64, lo: f64, hi: f64) -> Result<Panel> {
        if self.evaluations + 15 > self.budget {
            return Err(Error::NoStabilization { budget: self.budget });
        }
        self.evaluations += 15;
        let (value, error) = gk15(f, lo, hi);
        Ok(Panel { lo, hi, value, error })
    }

    /// Bisects the panel with the largest error estimate until the total
    /// estimate drops below `tol` or rounding makes it unreachable.
    fn adaptive(&mut self, f: &dyn Fn(f64) -> f64, lo: f64, hi: f64, tol: f64) -> Result<(f64, f64)> {
        let mut heap = std::collections::BinaryHeap::new();
        let first = self.panel(f, lo, hi)?;
        let (mut value, mut error) = (first.value, first.error);
        heap.push(first);
        let mut frozen = 0.0;
        while error - frozen > tol.max(64.0 * f64::EPSILON * value.abs()) {
            let Some(p) = heap.pop() else { break };
            let mid = 0.5 * (p.lo + p.hi);
            if !(p.lo < mid && mid < p.hi) {
                frozen += p.error;
                continue;
            }
            let (l, r) = (self.panel(f, p.lo, mid)?, self.panel(f, mid, p.hi)?);
            value += l.value + r.value - p.value;
            error += l.error + r.error - p.error;
            heap.push(l);
            heap.push(r);
        }
        // re-sum to shed accumulated rounding
        let value = heap.iter().map(|p| p.value).sum::<f64>() + 0.0 * value;
        let error = heap.iter().map(|p| p.error).sum::<f64>() + frozen;
        Ok((value, error))
    }
}

/// Integrates `f` over `[a, b]` by adaptive Gauss–Kronrod on dyadic shells
/// closing in on each declared singular point; `f` is never evaluated at
/// those points. A shell sequence stops, beyond the fourth shell, once two
/// consecutive shells contribute at most `tol / 2` together; that sum is
/// booked as the tail allowance.
pub fn hk_integrate_adaptive(
    f: &(dyn Fn(f64) -> f64 + Sync),
    a: f64,
    b: f64,
    singular: &[f64],
    tol: f64,
    budget: usize,
) -> Result<HkEstimate> {
    if !(a < b) || !a.is_finite() || !b.is_finite() {
        return Err(Error::Input(format!("bad interval [{a}, {b}]")));
    }
    if !(tol > 0.0) {
        return Err(Error::Input(format!("tolerance must be positive, got {tol}")));
    }
    let mut cuts: Vec<f64> = singular.iter().copied().filter(|s| *s > a && *s < b).collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let is_singular = |x: f64| singular.contains(&x);
    let mut points = vec![a];
    points.extend(cuts);
    points.push(b);

    // Each segment carries at most one singular end.
    let mut segments: Vec<(f64, f64, Option<f64>)> = Vec::new();
    for w in points.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        match (is_singular(lo), is_singular(hi)) {
            (false, false) => segments.push((lo, hi, None)),
            (true, false) => segments.push((lo, hi, Some(lo))),
            (false, true) => segments.push((lo, hi, Some(hi))),
            (true, true) => {
                let mid = 0.5 * (lo + hi);
                segments.push((lo, mid, Some(lo)));
                segments.push((mid, hi, Some(hi)));
            }
        }
    }
    let seg_tol = tol / segments.len() as f64;
    let mut counter = Counter { evaluations: 0, budget };
    let mut est = HkEstimate { value: 0.0, error_indicator: 0.0, evaluations: 0, trace: Vec::new(), note: ADAPTIVE_NOTE.into() };
    for (lo, hi, sing) in segments {
        let Some(s) = sing else {
            let before = counter.evaluations;
            let (v, e) = counter.adaptive(f, lo, hi, 0.5 * seg_tol)?;
            est.value += v;
            est.error_indicator += e;
            est.trace.push(ShellStep { toward: None, k: None, lo, hi, value: v, error: e, evaluations: counter.evaluations - before });
            continue;
        };
        let far = if s == lo { hi } else { lo };
        let at = |k: u32| s + (far - s) * 0.5f64.powi(k as i32);
        let mut prev = f64::INFINITY;
        let mut k = 0u32;
        loop {
            let (outer, inner) = (at(k), at(k + 1));
            if inner == s || outer == inner {
                return Err(Error::NoStabilization { budget });
            }
            let (slo, shi) = if outer < inner { (outer, inner) } else { (inner, outer) };
            let before = counter.evaluations;
            let shell_tol = 0.3 * seg_tol / ((k + 1) as f64).powi(2);
            let (v, e) = counter.adaptive(f, slo, shi, shell_tol)?;
            est.value += v;
            est.error_indicator += e;
            est.trace.push(ShellStep { toward: Some(s), k: Some(k), lo: slo, hi: shi, value: v, error: e, evaluations: counter.evaluations - before });
            let tail = v.abs() + prev.abs();
            prev = v;
            if k >= 4 && tail <= 0.5 * seg_tol {
                est.error_indicator += tail;
                break;
            }
            k += 1;
        }
    }
    est.evaluations = counter.evaluations;
    Ok(est)
}
