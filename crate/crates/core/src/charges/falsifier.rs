use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::charges::{Charge, Flat};
use crate::error::{Error, Result};
use crate::geometry::{DyadicCube, Figure};
use crate::rational;

/// Search parameters. Sequences run through levels `k0..=k0 + levels`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FalsifierConfig {
    pub dim: Option<usize>,
    pub trials: usize,
    pub seed: u64,
    pub k0: i32,
    pub levels: u32,
    pub max_cubes: usize,
}

impl Default for FalsifierConfig {
    fn default() -> Self {
        Self { dim: None, trials: 256, seed: 0, k0: 2, levels: 6, max_cubes: 256 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Construction {
    ShrinkingCube,
    RandomTube,
    GuidedTube,
    ScatteredCubes,
}

/// One sampled sequence `A_k` with its values.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampledSequence {
    pub trial: usize,
    pub construction: Construction,
    pub levels: Vec<i32>,
    pub sets: Vec<Figure>,
    pub values: Vec<f64>,
    pub volumes: Vec<f64>,
    pub perimeters: Vec<f64>,
}

impl SampledSequence {
    /// Values bounded away from zero while the sets shrink in measure with
    /// bounded perimeter.
    pub fn refutes(&self, eps: f64) -> bool {
        let (Some(first), Some(last)) = (self.values.first(), self.values.last()) else {
            return false;
        };
        let vmin = self.values.iter().fold(f64::INFINITY, |m, v| m.min(v.abs()));
        let pmax = self.perimeters.iter().cloned().fold(0.0, f64::max);
        let shrinking = self.volumes.windows(2).all(|w| w[1] <= 0.75 * w[0]);
        vmin >= eps && last.abs() >= 0.5 * first.abs() && shrinking && pmax <= 2.0 * self.perimeters[0] + 1e-12
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum FalsifierVerdict {
    Falsified { eps: f64, witness: SampledSequence },
    PassedSampled { tested: usize },
}

impl FalsifierVerdict {
    pub fn passed(&self) -> bool {
        matches!(self, FalsifierVerdict::PassedSampled { .. })
    }
}

pub fn charge_axiom_falsifier(c: &Charge, eps: f64, trials: usize, seed: u64) -> Result<FalsifierVerdict> {
    charge_axiom_falsifier_with(c, eps, &FalsifierConfig { trials, seed, ..FalsifierConfig::default() })
}

/// Looks for bounded sequences with `|A_k| -> 0`, bounded perimeter and
/// `|F(A_k)|` bounded away from 0. Trial `t` uses its own random stream, so the
/// reported witness (lowest failing trial) does not depend on scheduling.
/// Passing proves nothing.
pub fn charge_axiom_falsifier_with(c: &Charge, eps: f64, cfg: &FalsifierConfig) -> Result<FalsifierVerdict> {
    if cfg.trials == 0 {
        return Err(Error::Input("trials must be at least 1".into()));
    }
    if !(eps > 0.0) {
        return Err(Error::Input(format!("eps must be positive, got {eps}")));
    }
    let dim = cfg.dim.or(c.dim()).unwrap_or(2);
    let flats = c.flats();
    let outcomes: Vec<Result<Option<SampledSequence>>> = (0..cfg.trials)
        .into_par_iter()
        .map(|t| {
            let seq = sample_sequence(c, dim, &flats, cfg, t)?;
            Ok(seq.filter(|s| s.refutes(eps)))
        })
        .collect();
    let mut tested = 0;
    for o in outcomes {
        if let Some(witness) = o? {
            return Ok(FalsifierVerdict::Falsified { eps, witness });
        }
        tested += 1;
    }
    Ok(FalsifierVerdict::PassedSampled { tested })
}

/// Builds and evaluates the sequence of trial `t`; `None` when the
/// construction yields fewer than three sets within the cube cap.
pub fn sample_sequence(
    c: &Charge,
    dim: usize,
    flats: &[Flat],
    cfg: &FalsifierConfig,
    t: usize,
) -> Result<Option<SampledSequence>> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(t as u64);
    let (construction, builder): (Construction, Box<dyn Fn(i32) -> Vec<DyadicCube>>) = match t % 3 {
        0 => {
            let p: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect();
            (Construction::ShrinkingCube, Box::new(move |k| vec![cube_at(&p, k)]))
        }
        1 => {
            let axis = rng.random_range(0..dim);
            let scale = 1i64 << cfg.k0.max(0);
            let offset = rng.random_range(-scale..=scale);
            let ext: Vec<(i64, i64)> = (0..dim - 1)
                .map(|_| {
                    let a = rng.random_range(-scale..scale);
                    let len = rng.random_range(1..=scale);
                    (a, a + len)
                })
                .collect();
            let sides = rng.random_range(0..3u8);
            let k0 = cfg.k0;
            (Construction::RandomTube, Box::new(move |k| tube(axis, offset, k0, &ext, sides, k)))
        }
        _ if !flats.is_empty() => {
            let flat = flats[(t / 3) % flats.len()].clone();
            let sides = if rng.random_bool(0.5) { 1 } else { 0 };
            (Construction::GuidedTube, Box::new(move |k| flat_tube(&flat, sides, k)))
        }
        _ => {
            let m = rng.random_range(2..=5);
            let pts: Vec<Vec<f64>> = (0..m).map(|_| (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect()).collect();
            (Construction::ScatteredCubes, Box::new(move |k| pts.iter().map(|p| cube_at(p, k)).collect()))
        }
    };
    let mut seq = SampledSequence {
        trial: t,
        construction,
        levels: Vec::new(),
        sets: Vec::new(),
        values: Vec::new(),
        volumes: Vec::new(),
        perimeters: Vec::new(),
    };
    for k in cfg.k0..=cfg.k0 + cfg.levels as i32 {
        let cubes = builder(k);
        if cubes.is_empty() || cubes.len() > cfg.max_cubes {
            break;
        }
        let a = Figure::new(dim, cubes)?;
        seq.values.push(c.eval_figure(&a)?);
        seq.volumes.push(a.volume_f64());
        seq.perimeters.push(rational::to_f64(&a.perimeter()?));
        seq.levels.push(k);
        seq.sets.push(a);
    }
    Ok(if seq.sets.len() >= 3 { Some(seq) } else { None })
}

fn cube_at(p: &[f64], k: i32) -> DyadicCube {
    let s = (k as f64).exp2();
    DyadicCube { level: k, index: p.iter().map(|x| (x * s).floor() as i64).collect() }
}

/// Level-`k` cubes touching `{x_axis = offset / 2^k0}` over the level-`k0`
/// box `ext`; `sides` is 0 (below), 1 (above) or 2 (both).
fn tube(axis: usize, offset: i64, k0: i32, ext: &[(i64, i64)], sides: u8, k: i32) -> Vec<DyadicCube> {
    let shift = (k - k0).max(0) as u32;
    let ranges: Vec<(i64, i64)> = ext.iter().map(|&(a, b)| (a << shift, b << shift)).collect();
    let plane = offset << shift;
    let layers: Vec<i64> = match sides {
        0 => vec![plane - 1],
        1 => vec![plane],
        _ => vec![plane - 1, plane],
    };
    grid_layers(axis, &ranges, &layers, k)
}

fn grid_layers(axis: usize, ranges: &[(i64, i64)], layers: &[i64], k: i32) -> Vec<DyadicCube> {
    let count: u128 = ranges.iter().map(|(a, b)| (b - a) as u128).product::<u128>() * layers.len() as u128;
    if count > 1 << 20 {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut idx: Vec<i64> = ranges.iter().map(|r| r.0).collect();
    loop {
        for &l in layers {
            let mut full = idx.clone();
            full.insert(axis, l);
            out.push(DyadicCube { level: k, index: full });
        }
        let mut j = 0;
        loop {
            if j == idx.len() {
                return out;
            }
            idx[j] += 1;
            if idx[j] < ranges[j].1 {
                break;
            }
            idx[j] = ranges[j].0;
            j += 1;
        }
    }
}

/// Level-`k` cubes on one side of a flat, covering its bounds.
fn flat_tube(flat: &Flat, side: u8, k: i32) -> Vec<DyadicCube> {
    let scale = rational::pow2(k as i64);
    let ranges: Vec<(i64, i64)> = flat
        .bounds
        .iter()
        .map(|(a, b)| (rational::floor_i64(&(a * &scale)), rational::ceil_i64(&(b * &scale))))
        .collect();
    let plane = rational::floor_i64(&(&flat.offset * &scale));
    let on_grid = rational::int(plane) == &flat.offset * &scale;
    let layer = if side == 0 && on_grid { plane - 1 } else { plane };
    grid_layers(flat.axis, &ranges, &[layer], k)
}
