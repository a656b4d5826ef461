use std::path::PathBuf;

use clap::{Args, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use gaugekit::charges::{charge_axiom_falsifier_with, ChargeSpec, FalsifierConfig};
use gaugekit::gauges::{Ball, Gauge, GaugeSpec};
use gaugekit::geometry::{Constants, DyadicCube, Region};
use gaugekit::harness::{
    check_bv_partition_integral_with, check_packing_integral_with, gauss_green_verify, hk_check_with,
    hk_integrate_adaptive, mc_alpha_check, restriction_consistency, run_diagram_suite, singular_gauge, BvCheckConfig,
    ClaimSpec, ControlFunction, DiagramConfig, DivSource, HkCheckConfig, HkClaim, IntegralClaim, McClaim, McConfig,
    Notion, PackingCheckConfig, DEFAULT_EPS,
};
use gaugekit::rational;
use gaugekit::{Error, Result};

use crate::input;

/// What a subcommand produced.
pub struct Outcome {
    pub report: Value,
    pub refuted: bool,
}

impl Outcome {
    fn ok(report: impl Serialize) -> Result<Self> {
        Ok(Self { report: to_value(report)?, refuted: false })
    }
}

fn to_value(v: impl Serialize) -> Result<Value> {
    serde_json::to_value(v).map_err(|e| Error::Input(e.to_string()))
}

#[derive(Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Volume, perimeter and regularity of a figure or 1D set.
    Geom(GeomArgs),
    /// Cube partition subordinate to a ball cover, with its postconditions.
    Partition(PartitionArgs),
    /// Flux through the boundary against the integral of the divergence.
    GaussGreen(GaussGreenArgs),
    /// One-dimensional Henstock–Kurzweil tools.
    #[command(subcommand)]
    Hk(HkCommand),
    /// Checks an integral claim with the harness matching its notion.
    Verify(VerifyArgs),
    /// Searches for sequences violating the charge axioms.
    ChargeCheck(ChargeCheckArgs),
    /// Dimension constants.
    Constants(ConstantsArgs),
    /// Inclusion-diagram witness experiments.
    Diagram(DiagramArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Geom(_) => "geom",
            Command::Partition(_) => "partition",
            Command::GaussGreen(_) => "gauss-green",
            Command::Hk(HkCommand::Integrate(_)) => "hk integrate",
            Command::Hk(HkCommand::Check(_)) => "hk check",
            Command::Verify(_) => "verify",
            Command::ChargeCheck(_) => "charge-check",
            Command::Constants(_) => "constants",
            Command::Diagram(_) => "diagram",
        }
    }

    pub fn run(&self, seed: u64) -> Result<Outcome> {
        match self {
            Command::Geom(a) => geom(a),
            Command::Partition(a) => partition(a),
            Command::GaussGreen(a) => gauss_green(a),
            Command::Hk(HkCommand::Integrate(a)) => hk_integrate(a),
            Command::Hk(HkCommand::Check(a)) => hk_check_cmd(a, seed),
            Command::Verify(a) => verify(a, seed),
            Command::ChargeCheck(a) => charge_check(a, seed),
            Command::Constants(a) => constants(a),
            Command::Diagram(a) => diagram(a, seed),
        }
    }
}

#[derive(Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum HkCommand {
    /// Adaptive integral of a scalar field over an interval.
    Integrate(HkIntegrateArgs),
    /// Saks–Henstock sums of a claim under tightening gauges.
    Check(HkCheckArgs),
}

fn parse_point(s: &str) -> Result<Vec<rational::Rational>> {
    s.split(',').map(|t| rational::parse(t.trim())).collect()
}

#[derive(Args, Serialize)]
pub struct GeomArgs {
    /// Figure or 1D set file.
    #[arg(long)]
    pub figure: PathBuf,
    /// Tag for the regularity, comma-separated `p/q` coordinates.
    #[arg(long)]
    pub tag: Option<String>,
}

fn geom(a: &GeomArgs) -> Result<Outcome> {
    let region = input::region(&a.figure)?;
    let tag = a.tag.as_deref().map(parse_point).transpose()?;
    if let Some(t) = &tag {
        if t.len() != region.dim() {
            return Err(Error::DimensionMismatch { expected: region.dim(), found: t.len() });
        }
    }
    let reg = region.regularity(tag.as_deref())?;
    let pieces = match &region {
        Region::Figure(f) => f.cubes().len(),
        Region::Line(l) => l.intervals().len(),
        Region::Box(_) => 1,
    };
    Outcome::ok(json!({
        "dim": region.dim(),
        "pieces": pieces,
        "volume": rational::format(&region.volume()),
        "perimeter": rational::format(&region.perimeter()?),
        "diameter_sq": rational::format(&reg.diameter_sq),
        "regularity": reg.value(),
        "volume_f64": rational::to_f64(&region.volume()),
        "perimeter_f64": rational::to_f64(&region.perimeter()?),
    }))
}

#[derive(Args, Serialize)]
pub struct PartitionArgs {
    /// JSON with `root` (a dyadic cube) and `balls` (`center`, `radius`).
    #[arg(long)]
    pub input: PathBuf,
    /// Override of the side-ratio constant.
    #[arg(long)]
    pub eta: Option<f64>,
}

#[derive(Deserialize)]
struct PartitionInput {
    root: DyadicCube,
    balls: Vec<Ball>,
}

fn partition(a: &PartitionArgs) -> Result<Outcome> {
    let inp: PartitionInput = input::read_json(&a.input)?;
    let mut consts = Constants::new(inp.root.dim())?;
    if let Some(eta) = a.eta {
        consts = consts.with_eta(eta)?;
    }
    let part = gaugekit::partition::subordinate_partition(&inp.root, &inp.balls)?;
    let check = part.verify(&consts)?;
    let refuted = !check.all_ok();
    Ok(Outcome { report: json!({ "partition": to_value(&part)?, "check": to_value(&check)? }), refuted })
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DivKind {
    Symbolic,
    Numeric,
}

#[derive(Args, Serialize)]
pub struct GaussGreenArgs {
    /// Catalog name (linear, quadratic, rotational, singular-sin) or a field file.
    #[arg(long)]
    pub field: String,
    #[arg(long)]
    pub figure: PathBuf,
    #[arg(long, value_enum, default_value = "symbolic")]
    pub div: DivKind,
    /// Step of the central differences.
    #[arg(long, default_value_t = 1e-5)]
    pub h: f64,
    #[arg(long, default_value_t = 7)]
    pub order: usize,
}

fn gauss_green(a: &GaussGreenArgs) -> Result<Outcome> {
    let fig = input::figure(&a.figure)?;
    let (u, _) = input::vector_field(&a.field, fig.dim())?;
    let src = match a.div {
        DivKind::Symbolic => DivSource::Symbolic,
        DivKind::Numeric => DivSource::Numeric { h: a.h },
    };
    Outcome::ok(gauss_green_verify(&u, &fig, src, a.order)?)
}

#[derive(Args, Serialize)]
pub struct HkIntegrateArgs {
    /// Catalog name (singular-derivative, half-inverse-sqrt), a constant, or a field file.
    #[arg(long, default_value = "singular-derivative")]
    pub f: String,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub a: f64,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub b: f64,
    /// Points where `f` is not evaluated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub singular: Vec<f64>,
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
    /// Evaluation budget.
    #[arg(long, default_value_t = 400_000_000)]
    pub budget: usize,
}

fn hk_integrate(a: &HkIntegrateArgs) -> Result<Outcome> {
    let (f, _) = input::scalar_field(&a.f)?;
    let est = hk_integrate_adaptive(&|x| f.eval(&[x]), a.a, a.b, &a.singular, a.tol, a.budget)?;
    Outcome::ok(est)
}

#[derive(Args, Serialize)]
pub struct HkCheckArgs {
    /// Claim file with notion `hk` or `hks` on a single interval.
    #[arg(long)]
    pub claim: PathBuf,
    /// Gauge file used for every tolerance; by default each tolerance gets
    /// its own singular gauge centred at `--center`.
    #[arg(long)]
    pub gauge: Option<PathBuf>,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub center: f64,
    /// Tolerances, overriding those of the claim.
    #[arg(long, value_delimiter = ',')]
    pub eps: Vec<f64>,
    #[arg(long, default_value_t = 8)]
    pub trials: usize,
    #[arg(long, default_value_t = 60)]
    pub depth_budget: u32,
    #[arg(long, default_value_t = 0.5)]
    pub keep: f64,
}

fn load_gauge(path: &std::path::Path) -> Result<Gauge> {
    Gauge::from_spec(input::read_json::<GaugeSpec>(path)?)
}

fn run_hk(
    claim: &IntegralClaim,
    gauge: Option<&Gauge>,
    center: f64,
    eps: &[f64],
    cfg: &HkCheckConfig,
) -> Result<Outcome> {
    let mut hk = HkClaim::from_claim(claim)?;
    if !eps.is_empty() {
        hk = hk.with_eps(eps);
    }
    let runs: Vec<(Vec<f64>, Gauge)> = match gauge {
        Some(g) => vec![(hk.eps.clone(), g.clone())],
        None => hk.eps.iter().map(|&e| Ok((vec![e], singular_gauge(e, center)?))).collect::<Result<_>>()?,
    };
    let mut reports = Vec::new();
    let mut refuted = false;
    for (e, g) in runs {
        let r = hk_check_with(&hk.clone().with_eps(&e), &g, cfg)?;
        refuted |= r.verdict.refuted();
        reports.push(r);
    }
    Ok(Outcome { report: json!({ "definite": hk.definite(), "refuted": refuted, "runs": to_value(&reports)? }), refuted })
}

fn hk_check_cmd(a: &HkCheckArgs, seed: u64) -> Result<Outcome> {
    let claim = input::read_json::<ClaimSpec>(&a.claim)?.build()?;
    let gauge = a.gauge.as_deref().map(load_gauge).transpose()?;
    let cfg = HkCheckConfig { depth_budget: a.depth_budget, keep: a.keep, ..HkCheckConfig::new(a.trials, seed) };
    run_hk(&claim, gauge.as_ref(), a.center, &a.eps, &cfg)
}

#[derive(Args, Serialize)]
pub struct VerifyArgs {
    #[arg(long)]
    pub claim: PathBuf,
    /// Gauge file; required except for `hk`, `hks` and `mc-alpha` claims.
    #[arg(long)]
    pub gauge: Option<PathBuf>,
    #[arg(long, default_value_t = 16)]
    pub trials: usize,
    /// Extra dyadic levels of the seminorm search.
    #[arg(long)]
    pub depth: Option<u32>,
    /// Runs the restricted and zero-extended forms on this figure.
    #[arg(long)]
    pub restrict: Option<PathBuf>,
    /// Control function for `mc-alpha` claims (identity, arctan, cubic).
    #[arg(long, default_value = "identity")]
    pub control: String,
    /// Sample points for `mc-alpha` claims.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_value = "0,0.25,0.5,0.75,1")]
    pub points: Vec<f64>,
}

fn verify(a: &VerifyArgs, seed: u64) -> Result<Outcome> {
    let claim = input::read_json::<ClaimSpec>(&a.claim)?.build()?;
    let gauge = a.gauge.as_deref().map(load_gauge).transpose()?;
    let need_gauge = || gauge.clone().ok_or_else(|| Error::Input(format!("{:?} claims need --gauge", claim.notion)));
    match claim.notion {
        Notion::PackingR | Notion::PackingRStar => {
            let mut cfg = PackingCheckConfig::new(a.trials, seed);
            if let Some(d) = a.depth {
                cfg.depth = d;
            }
            let g = need_gauge()?;
            match &a.restrict {
                Some(p) => {
                    let r = restriction_consistency(&claim, &input::figure(p)?, &g, &cfg)?;
                    let refuted = r.inside.verdict.refuted();
                    Ok(Outcome { report: to_value(r)?, refuted })
                }
                None => {
                    let r = check_packing_integral_with(&claim, &g, &cfg)?;
                    let refuted = r.verdict.refuted();
                    Ok(Outcome { report: to_value(r)?, refuted })
                }
            }
        }
        Notion::PfefferR | Notion::PfefferRIntrinsic | Notion::RStar => {
            let r = check_bv_partition_integral_with(&claim, &need_gauge()?, &BvCheckConfig::new(a.trials, seed))?;
            let refuted = r.verdict.refuted();
            Ok(Outcome { report: to_value(r)?, refuted })
        }
        Notion::HK | Notion::HKS => run_hk(&claim, gauge.as_ref(), 0.0, &[], &HkCheckConfig::new(a.trials, seed)),
        Notion::MCAlpha(_) => {
            let mc = McClaim::from_claim(&claim, ControlFunction::catalog(&a.control)?)?;
            let r = mc_alpha_check(&mc, &a.points, &McConfig::new())?;
            let refuted = r.verdict.refuted();
            Ok(Outcome { report: to_value(r)?, refuted })
        }
    }
}

#[derive(Args, Serialize)]
pub struct ChargeCheckArgs {
    /// Charge descriptor file.
    #[arg(long)]
    pub charge: PathBuf,
    /// A sequence refutes when its values stay at least this large.
    #[arg(long, default_value_t = 0.1)]
    pub eps: f64,
    #[arg(long, default_value_t = 256)]
    pub trials: usize,
    /// Ambient dimension when the charge does not fix one.
    #[arg(long)]
    pub dim: Option<usize>,
    /// Levels per sequence.
    #[arg(long, default_value_t = 6)]
    pub levels: u32,
}

fn charge_check(a: &ChargeCheckArgs, seed: u64) -> Result<Outcome> {
    let c = input::read_json::<ChargeSpec>(&a.charge)?.build()?;
    let cfg = FalsifierConfig { dim: a.dim, trials: a.trials, seed, levels: a.levels, ..FalsifierConfig::default() };
    let v = charge_axiom_falsifier_with(&c, a.eps, &cfg)?;
    let refuted = !v.passed();
    Ok(Outcome { report: to_value(v)?, refuted })
}

#[derive(Args, Serialize)]
pub struct ConstantsArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub eta: Option<f64>,
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_EPS)]
    pub eps: Vec<f64>,
}

fn constants(a: &ConstantsArgs) -> Result<Outcome> {
    let mut c = Constants::new(a.n)?;
    if let Some(eta) = a.eta {
        c = c.with_eta(eta)?;
    }
    if let Some(p) = a.p {
        c = c.with_p(p)?;
    }
    let table: serde_json::Map<String, Value> = c.table(&a.eps).into_iter().map(|(k, v)| (k, json!(v))).collect();
    Outcome::ok(table)
}

#[derive(Args, Serialize)]
pub struct DiagramArgs {
    #[arg(long, default_value_t = 4)]
    pub trials: usize,
    /// Random seminorm comparisons.
    #[arg(long, default_value_t = 12)]
    pub queries: usize,
}

fn diagram(a: &DiagramArgs, seed: u64) -> Result<Outcome> {
    let r = run_diagram_suite(&DiagramConfig { seed, trials: a.trials, seminorm_queries: a.queries })?;
    let refuted = !r.all_supported();
    Ok(Outcome { report: to_value(r)?, refuted })
}
