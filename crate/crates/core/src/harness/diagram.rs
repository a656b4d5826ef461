use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::charges::{
    charge_axiom_falsifier, singular_profile, singular_profile_derivative, Charge, Flat, Function1D, ScalarField,
    VectorField,
};
use crate::error::Result;
use crate::gauges::Gauge;
use crate::geometry::{DyadicCube, Figure, IsoSearch};
use crate::harness::bv::{check_bv_partition_integral_with, BvCheckConfig};
use crate::harness::claim::{Domain, IntegralClaim, Notion};
use crate::harness::gauss_green::{gauss_green_verify, DivSource};
use crate::harness::hk::{hk_check, hk_integrate_adaptive, singular_gauge, HkClaim};
use crate::harness::mc::{mc_alpha_check, mc_monotone_comparison, ControlFunction, McClaim, McConfig};
use crate::harness::packing::{check_packing_integral_with, revalidate_witness, PackingCheckConfig};
use crate::harness::seminorm::{seminorm_lower_bound, Seminorm, SeminormQuery};
use crate::rational::int;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiagramConfig {
    pub seed: u64,
    /// Trials for the sampled falsifiers.
    pub trials: usize,
    /// Random `(x, r)` pairs for the seminorm comparison.
    pub seminorm_queries: usize,
}

impl DiagramConfig {
    pub fn new(seed: u64) -> Self {
        Self { seed, trials: 4, seminorm_queries: 12 }
    }
}

/// One experiment bearing on an edge of the inclusion diagram.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiagramEntry {
    pub id: String,
    pub relation: String,
    pub observations: serde_json::Value,
    /// Whether the observations came out as the relation predicts.
    pub supports: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiagramReport {
    pub config: DiagramConfig,
    pub entries: Vec<DiagramEntry>,
    pub note: String,
}

impl DiagramReport {
    pub fn all_supported(&self) -> bool {
        self.entries.iter().all(|e| e.supports)
    }
}

const DIAGRAM_NOTE: &str = "computational witnesses only: consistent verdicts are sampled, refutations are concrete";

pub fn run_diagram_suite(cfg: &DiagramConfig) -> Result<DiagramReport> {
    let entries = vec![
        starred_witness(cfg)?,
        linear_flux(cfg)?,
        hk_non_absolute(cfg)?,
        hk_and_mc(cfg)?,
        mc_monotone(cfg)?,
        gauss_green_l_shape()?,
        charge_separation(cfg)?,
    ];
    Ok(DiagramReport { config: cfg.clone(), entries, note: DIAGRAM_NOTE.into() })
}

fn square_claim(f: ScalarField, big_f: Charge, notion: Notion) -> IntegralClaim {
    IntegralClaim::new(f, big_f, Charge::lebesgue(), notion, Domain::Figure(Figure::unit(2)))
}

fn starred_witness(cfg: &DiagramConfig) -> Result<DiagramEntry> {
    let claim = square_claim(ScalarField::Constant(1.0), Charge::lebesgue().scaled(2.0), Notion::PackingRStar).with_eps(&[0.01]);
    let mut pcfg = PackingCheckConfig::new(cfg.trials, cfg.seed);
    pcfg.depth = 3;
    let report = check_packing_integral_with(&claim, &Gauge::constant(0.6), &pcfg)?;
    let revalidated = match report.verdict.witness() {
        Some(w) => revalidate_witness(&claim, w, Notion::PackingR, &IsoSearch::default())?,
        None => false,
    };

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let charge = Charge::flux(VectorField::catalog("quadratic", 2)?);
    let mut pairs = Vec::new();
    for k in 0..cfg.seminorm_queries {
        let x = vec![rng.random_range(0.0..1.0), rng.random_range(0.0..1.0)];
        let r = rng.random_range(0.1..0.6);
        let mut q = SeminormQuery::new(charge.clone(), x.clone(), r, 0.05, Seminorm::P);
        (q.depth, q.seed, q.per_level) = (2, cfg.seed + k as u64, 256);
        let p = seminorm_lower_bound(&q)?.value;
        q.variant = Seminorm::Q;
        let qv = seminorm_lower_bound(&q)?.value;
        pairs.push((p, qv));
    }
    let violations = pairs.iter().filter(|(p, q)| q > p).count();
    Ok(DiagramEntry {
        id: "starred-witness".into(),
        relation: "PR ⊂ PR*".into(),
        observations: json!({
            "refuted": report.verdict.refuted(),
            "witness_revalidated_for_packing_r": revalidated,
            "seminorm_pairs": pairs,
            "q_above_p": violations,
        }),
        supports: report.verdict.refuted() && revalidated && violations == 0,
    })
}

fn linear_flux(cfg: &DiagramConfig) -> Result<DiagramEntry> {
    let u = VectorField::catalog("linear", 2)?;
    let gauge = Gauge::constant(0.3);
    let mut verdicts = serde_json::Map::new();
    let mut supports = true;
    for (f, expect_refuted) in [(2.0, false), (12.0, true)] {
        for notion in [Notion::PfefferR, Notion::PfefferRIntrinsic, Notion::RStar, Notion::PackingR, Notion::PackingRStar] {
            let claim = square_claim(ScalarField::Constant(f), Charge::flux(u.clone()), notion).with_eps(&[0.05]);
            let refuted = if matches!(notion, Notion::PackingR | Notion::PackingRStar) {
                let mut pcfg = PackingCheckConfig::new(cfg.trials, cfg.seed);
                pcfg.depth = 2;
                check_packing_integral_with(&claim, &gauge, &pcfg)?.verdict.refuted()
            } else {
                check_bv_partition_integral_with(&claim, &gauge, &BvCheckConfig::new(cfg.trials, cfg.seed))?.verdict.refuted()
            };
            supports &= refuted == expect_refuted;
            verdicts.insert(format!("f={f} {notion:?}"), json!(if refuted { "refuted" } else { "consistent-at-depth" }));
        }
    }
    Ok(DiagramEntry {
        id: "linear-flux".into(),
        relation: "IR = R ⊂ GR ⊂ R* ⊂ PR*, R ⊂ PR".into(),
        observations: serde_json::Value::Object(verdicts),
        supports,
    })
}

fn singular_hk_claim() -> HkClaim {
    HkClaim::new(
        ScalarField::custom("F'", |x| singular_profile_derivative(x[0])),
        Function1D::new("F", singular_profile),
        Function1D::new("identity", |x| x),
        0.0,
        1.0,
    )
}

fn hk_non_absolute(cfg: &DiagramConfig) -> Result<DiagramEntry> {
    let claim = singular_hk_claim();
    let mut sums = Vec::new();
    let mut supports = true;
    for eps in [0.1, 0.01] {
        let r = hk_check(&claim.clone().with_eps(&[eps]), &singular_gauge(eps, 0.0)?, cfg.trials, cfg.seed)?;
        supports &= !r.verdict.refuted();
        sums.push(json!({ "eps": eps, "max_sum": r.max_sum(), "intervals": r.trials[0].intervals }));
    }
    let est = hk_integrate_adaptive(&singular_profile_derivative, 0.0, 1.0, &[0.0], 1e-4, 50_000_000)?;
    supports &= (est.value - 1f64.sin()).abs() < 1e-4;
    // ∫ |f| over the shells [2^-k-1, 2^-k] stays bounded below
    let abs_f = |x: f64| singular_profile_derivative(x).abs();
    let mut shells = Vec::new();
    let mut total = 0.0;
    for k in 0..6 {
        let (lo, hi) = (0.5f64.powi(k + 1), 0.5f64.powi(k));
        let v = hk_integrate_adaptive(&abs_f, lo, hi, &[], 1e-3, 50_000_000)?.value;
        total += v;
        shells.push(json!({ "k": k, "l1": v, "cumulative": total }));
        if k >= 2 {
            supports &= v > 0.5;
        }
    }
    Ok(DiagramEntry {
        id: "hk-non-absolute".into(),
        relation: "R ⊊ HK".into(),
        observations: json!({
            "saks_henstock": sums,
            "adaptive_value": est.value,
            "sin_1": 1f64.sin(),
            "l1_shells": shells,
        }),
        supports,
    })
}

fn hk_and_mc(cfg: &DiagramConfig) -> Result<DiagramEntry> {
    let h = singular_hk_claim();
    let points = [0.0, 0.3, 0.5, 0.8, 1.0];
    let mut tails = Vec::new();
    let mut supports = true;
    for alpha in [1.0, 2.0] {
        let claim = McClaim { f: h.f.clone(), big_f: h.big_f.clone(), g: h.g.clone(), phi: ControlFunction::Identity, alpha };
        let r = mc_alpha_check(&claim, &points, &McConfig::new())?;
        supports &= !r.verdict.refuted();
        tails.push(json!({ "alpha": alpha, "tail_max": r.points.iter().map(|p| p.tail_max).collect::<Vec<_>>() }));
    }
    let r = hk_check(&h.clone().with_eps(&[0.1]), &singular_gauge(0.1, 0.0)?, cfg.trials, cfg.seed)?;
    supports &= !r.verdict.refuted();
    Ok(DiagramEntry {
        id: "hk-mc".into(),
        relation: "HK = MC = MC_α for α ∈ [1, 2]".into(),
        observations: json!({ "points": points, "mc": tails, "hk_max_sum": r.max_sum() }),
        supports,
    })
}

fn mc_monotone(cfg: &DiagramConfig) -> Result<DiagramEntry> {
    let grid = McConfig::new().grid;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x6d63);
    let points: Vec<f64> = (0..8).map(|_| rng.random_range(-2.0..2.0)).collect();
    let mut rows = Vec::new();
    let mut supports = true;
    for phi in [ControlFunction::Identity, ControlFunction::Cubic, ControlFunction::Arctan] {
        let c = mc_monotone_comparison(&phi, 2.0, 3.0, &points, &grid)?;
        supports &= c.violations.is_empty();
        rows.push(json!({ "phi": phi.name(), "checked": c.checked, "exact": c.exact, "violations": c.violations.len() }));
    }
    Ok(DiagramEntry {
        id: "mc-monotone".into(),
        relation: "MC_α ⊂ MC_β for α < β".into(),
        observations: json!({ "alpha": 2.0, "beta": 3.0, "comparisons": rows }),
        supports,
    })
}

fn gauss_green_l_shape() -> Result<DiagramEntry> {
    let c = |i, j| DyadicCube::new(0, vec![i, j]);
    let a = Figure::new(2, vec![c(0, 0)?, c(1, 0)?, c(0, 1)?])?;
    let r = gauss_green_verify(&VectorField::catalog("quadratic", 2)?, &a, DivSource::Symbolic, 7)?;
    let exact = r.exact.as_ref().is_some_and(|e| e.equal);
    Ok(DiagramEntry {
        id: "gauss-green".into(),
        relation: "div u ∈ PR*, with F = flux of u".into(),
        observations: serde_json::to_value(&r).unwrap_or_default(),
        supports: r.abs_error <= 1e-8 && exact,
    })
}

fn charge_separation(cfg: &DiagramConfig) -> Result<DiagramEntry> {
    let density = Charge::density(ScalarField::custom("sin x + y", |x| x[0].sin() + x[1]));
    let segment = Charge::Hausdorff(Flat { axis: 1, offset: int(0), bounds: vec![(int(0), int(1))] });
    let d = charge_axiom_falsifier(&density, 0.01, 8 * cfg.trials, cfg.seed)?;
    let s = charge_axiom_falsifier(&segment, 0.5, 8 * cfg.trials, cfg.seed)?;
    Ok(DiagramEntry {
        id: "charge-separation".into(),
        relation: "densities are charges; H^1 on a segment is not".into(),
        observations: json!({ "density_passed": d.passed(), "segment_passed": s.passed() }),
        supports: d.passed() && !s.passed(),
    })
}
