use std::collections::HashMap;

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{DyadicCube, Figure, Interval, DEFAULT_CUBE_BUDGET};
use crate::rational::{self, Rational};

/// Outcome of one isoperimetric comparison.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IsoperimetricRatio {
    /// `min{P(E ∩ T), P(E \ T)}`.
    #[serde(with = "rational::serde_rational")]
    pub smaller_part: Rational,
    /// `P(T, in E)`.
    #[serde(with = "rational::serde_rational")]
    pub relative: Rational,
    /// `smaller_part * eps / relative`, `+inf` when only the denominator vanishes.
    pub ratio: f64,
    pub passes: bool,
}

impl IsoperimetricRatio {
    fn from_parts(p_t: Rational, p_rest: Rational, relative: Rational, eps: &Rational) -> Self {
        let smaller_part = if p_t < p_rest { p_t } else { p_rest };
        let lhs = &smaller_part * eps;
        let passes = lhs <= relative;
        let ratio = if smaller_part.is_zero() {
            0.0
        } else if relative.is_zero() {
            f64::INFINITY
        } else {
            rational::to_f64(&(lhs / &relative))
        };
        Self { smaller_part, relative, ratio, passes }
    }
}

/// Tests one candidate `T` against `E`; `T` is intersected with `E` first.
pub fn isoperimetric_deficiency(e: &Figure, t: &Figure, eps: f64) -> Result<IsoperimetricRatio> {
    let eps = positive(eps)?;
    let t = t.intersection(e)?;
    let rest = e.difference(&t)?;
    Ok(IsoperimetricRatio::from_parts(t.perimeter()?, rest.perimeter()?, t.relative_perimeter(e)?, &eps))
}

fn positive(eps: f64) -> Result<Rational> {
    if !(eps > 0.0) {
        return Err(Error::Input(format!("eps must be positive, got {eps}")));
    }
    rational::from_f64(eps)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum IsoVerdict<W> {
    Falsified { witness: W, ratio: f64 },
    PassedSampled { tested: usize },
}

impl<W> IsoVerdict<W> {
    pub fn passed(&self) -> bool {
        matches!(self, IsoVerdict::PassedSampled { .. })
    }
}

/// Knobs for the sampled isoperimetry search.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IsoSearch {
    pub depth: u32,
    pub random_masks: usize,
    pub random_boxes: usize,
    pub seed: u64,
    pub budget: usize,
}

impl Default for IsoSearch {
    fn default() -> Self {
        Self { depth: 2, random_masks: 64, random_boxes: 64, seed: 0, budget: DEFAULT_CUBE_BUDGET }
    }
}

impl IsoSearch {
    pub fn with_depth(depth: u32) -> Self {
        Self { depth, ..Self::default() }
    }
}

/// Cells of a set on a grid, with the face incidences needed to evaluate
/// perimeters of arbitrary cell subsets.
#[derive(Clone, Debug)]
pub struct CellComplex {
    dim: usize,
    coords: Vec<i64>,
    internal: Vec<(u32, u32, u8)>,
    boundary: Vec<u32>,
    face_area: Vec<Rational>,
    face_area_f64: Vec<f64>,
}

const EXHAUSTIVE_CELLS: usize = 16;

impl CellComplex {
    /// Cells are the level-`level` cubes of `fig`.
    pub fn from_figure(fig: &Figure, level: i32, budget: usize) -> Result<Self> {
        let cubes = fig.refined(level, budget)?;
        let n = fig.dim();
        let area = rational::pow2(-(level as i64) * (n as i64 - 1));
        Ok(Self::from_coords(n, cubes.into_iter().map(|c| c.index).collect(), vec![area; n]))
    }

    /// Uniform `g^n` grid on a box.
    pub fn from_interval(q: &Interval, g: u64, budget: usize) -> Result<Self> {
        let n = q.dim();
        let total = (g as u128).saturating_pow(n as u32);
        if total > budget as u128 {
            return Err(Error::Budget { what: "interval grid".into(), needed: total, budget: budget as u128 });
        }
        let steps: Vec<Rational> = q.sides().iter().map(|s| s / rational::int(g as i64)).collect();
        let face_area = (0..n)
            .map(|a| (0..n).filter(|&j| j != a).fold(Rational::from_integer(1.into()), |p, j| p * &steps[j]))
            .collect();
        let mut coords = Vec::with_capacity(total as usize);
        let mut idx = vec![0i64; n];
        'outer: loop {
            coords.push(idx.clone());
            for v in idx.iter_mut() {
                *v += 1;
                if (*v as u64) < g {
                    continue 'outer;
                }
                *v = 0;
            }
            break;
        }
        Ok(Self::from_coords(n, coords, face_area))
    }

    fn from_coords(dim: usize, cells: Vec<Vec<i64>>, face_area: Vec<Rational>) -> Self {
        let lookup: HashMap<&[i64], u32> = cells.iter().enumerate().map(|(i, c)| (c.as_slice(), i as u32)).collect();
        let mut internal = Vec::new();
        let mut boundary = vec![0u32; cells.len() * dim];
        let mut probe = vec![0i64; dim];
        for (i, c) in cells.iter().enumerate() {
            for axis in 0..dim {
                for delta in [-1i64, 1] {
                    probe.copy_from_slice(c);
                    probe[axis] += delta;
                    match lookup.get(probe.as_slice()) {
                        Some(&j) if delta == 1 => internal.push((i as u32, j, axis as u8)),
                        Some(_) => {}
                        None => boundary[i * dim + axis] += 1,
                    }
                }
            }
        }
        let coords = cells.into_iter().flatten().collect();
        let face_area_f64 = face_area.iter().map(rational::to_f64).collect();
        Self { dim, coords, internal, boundary, face_area, face_area_f64 }
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn coord(&self, cell: usize) -> &[i64] {
        &self.coords[cell * self.dim..(cell + 1) * self.dim]
    }

    fn counts(&self, mask: &[bool]) -> [Vec<u64>; 3] {
        let n = self.dim;
        let mut t = vec![0u64; n];
        let mut rest = vec![0u64; n];
        let mut cut = vec![0u64; n];
        for &(i, j, a) in &self.internal {
            if mask[i as usize] != mask[j as usize] {
                cut[a as usize] += 1;
            }
        }
        for (cell, &inside) in mask.iter().enumerate() {
            let target = if inside { &mut t } else { &mut rest };
            for (slot, &b) in target.iter_mut().zip(&self.boundary[cell * n..(cell + 1) * n]) {
                *slot += b as u64;
            }
        }
        [t, rest, cut]
    }

    /// Pass flag and ratio, in floating point unless the test is too close
    /// to call.
    fn quick(&self, mask: &[bool], eps_f: f64, eps: &Rational) -> (bool, f64) {
        let [t, rest, cut] = self.counts(mask);
        let weigh = |c: &[u64]| c.iter().zip(&self.face_area_f64).map(|(&k, a)| k as f64 * a).sum::<f64>();
        let cut_w = weigh(&cut);
        let small = (weigh(&t) + cut_w).min(weigh(&rest) + cut_w);
        let (lhs, rhs) = (small * eps_f, cut_w);
        let tol = 1e-9 * (lhs.abs() + rhs.abs());
        if lhs < rhs - tol || lhs > rhs + tol {
            let ratio = if small == 0.0 { 0.0 } else if cut_w == 0.0 { f64::INFINITY } else { lhs / cut_w };
            return (lhs <= rhs, ratio);
        }
        let r = self.evaluate(mask, eps);
        (r.passes, r.ratio)
    }

    /// `P(T)`, `P(E \ T)` and `P(T, in E)` for the cell subset `mask`.
    pub fn evaluate(&self, mask: &[bool], eps: &Rational) -> IsoperimetricRatio {
        let [t, rest, cut] = self.counts(mask);
        let weigh = |counts: &[u64]| {
            counts
                .iter()
                .zip(&self.face_area)
                .map(|(&k, area)| rational::int(k as i64) * area)
                .fold(Rational::zero(), |s, x| s + x)
        };
        let cut = weigh(&cut);
        IsoperimetricRatio::from_parts(weigh(&t) + &cut, weigh(&rest) + &cut, cut, eps)
    }

    /// Runs the candidate families and returns the worst failing mask, if any,
    /// plus the number of masks tested.
    fn search(&self, eps: &Rational, cfg: &IsoSearch, stream: u64) -> (Option<(Vec<bool>, f64)>, usize) {
        let m = self.len();
        let mut tested = 0usize;
        let mut worst: Option<(Vec<bool>, f64)> = None;
        let eps_f = rational::to_f64(eps);
        let mut consider = |mask: Vec<bool>, tested: &mut usize| {
            *tested += 1;
            let (passes, ratio) = self.quick(&mask, eps_f, eps);
            if !passes && worst.as_ref().is_none_or(|(_, w)| ratio > *w) {
                worst = Some((mask, ratio));
            }
        };
        if m <= 1 {
            return (None, 0);
        }
        if m <= EXHAUSTIVE_CELLS {
            for bits in 1u32..((1u32 << m) - 1) {
                consider((0..m).map(|i| (bits >> i) & 1 == 1).collect(), &mut tested);
            }
            return (worst, tested);
        }
        for i in 0..m.min(4096) {
            let mut mask = vec![false; m];
            mask[i] = true;
            consider(mask, &mut tested);
        }
        let (lo, hi) = self.coord_range();
        for axis in 0..self.dim {
            for cutoff in (lo[axis] + 1)..=hi[axis] {
                consider((0..m).map(|c| self.coord(c)[axis] < cutoff).collect(), &mut tested);
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream(stream);
        for _ in 0..cfg.random_masks {
            consider((0..m).map(|_| rng.random_bool(0.5)).collect(), &mut tested);
        }
        for _ in 0..cfg.random_boxes {
            let bounds: Vec<(i64, i64)> = (0..self.dim)
                .map(|a| {
                    let x = rng.random_range(lo[a]..=hi[a]);
                    let y = rng.random_range(lo[a]..=hi[a]);
                    (x.min(y), x.max(y))
                })
                .collect();
            let mask: Vec<bool> = (0..m)
                .map(|c| self.coord(c).iter().zip(&bounds).all(|(v, (a, b))| v >= a && v <= b))
                .collect();
            if mask.iter().any(|&b| b) && mask.iter().any(|&b| !b) {
                consider(mask, &mut tested);
            }
        }
        (worst, tested)
    }

    fn coord_range(&self) -> (Vec<i64>, Vec<i64>) {
        let mut lo = vec![i64::MAX; self.dim];
        let mut hi = vec![i64::MIN; self.dim];
        for c in 0..self.len() {
            for (a, &v) in self.coord(c).iter().enumerate() {
                lo[a] = lo[a].min(v);
                hi[a] = hi[a].max(v);
            }
        }
        (lo, hi)
    }
}

/// Sampled check that `E` is `eps`-isoperimetric. Candidate sets `T` are built
/// from the cubes of `E` refined by `0..=depth` extra levels: every subset
/// when there are at most 16 cells, otherwise single cells, axis slabs, random
/// subsets and random sub-boxes. A pass is never a proof.
pub fn is_eps_isoperimetric_sampled(e: &Figure, eps: f64, cfg: &IsoSearch) -> Result<IsoVerdict<Figure>> {
    let eps_r = positive(eps)?;
    let Some(base) = e.max_level() else {
        return Ok(IsoVerdict::PassedSampled { tested: 0 });
    };
    let mut tested = 0;
    for d in 0..=cfg.depth {
        let level = base + d as i32;
        let cx = CellComplex::from_figure(e, level, cfg.budget)?;
        let (worst, k) = cx.search(&eps_r, cfg, d as u64);
        tested += k;
        if let Some((mask, ratio)) = worst {
            let cubes = (0..cx.len())
                .filter(|&c| mask[c])
                .map(|c| DyadicCube { level, index: cx.coord(c).to_vec() })
                .collect();
            let witness = Figure::new(e.dim(), cubes)?.coarsened();
            return Ok(IsoVerdict::Falsified { witness, ratio });
        }
    }
    Ok(IsoVerdict::PassedSampled { tested })
}

/// Same search on a box, with `2^d` cells per axis for `d = 0..=depth`. The
/// witness lists the grid cells forming `T`.
pub fn is_eps_isoperimetric_sampled_interval(
    q: &Interval,
    eps: f64,
    cfg: &IsoSearch,
) -> Result<IsoVerdict<Vec<Interval>>> {
    let eps_r = positive(eps)?;
    let mut tested = 0;
    for d in 0..=cfg.depth {
        let g = 1u64 << d;
        let cx = CellComplex::from_interval(q, g, cfg.budget)?;
        let (worst, k) = cx.search(&eps_r, cfg, d as u64);
        tested += k;
        if let Some((mask, ratio)) = worst {
            let steps: Vec<Rational> = q.sides().iter().map(|s| s / rational::int(g as i64)).collect();
            let witness = (0..cx.len())
                .filter(|&c| mask[c])
                .map(|c| {
                    let b = cx
                        .coord(c)
                        .iter()
                        .enumerate()
                        .map(|(a, &k)| {
                            let lo = &q.bounds()[a].0 + &steps[a] * rational::int(k);
                            let hi = &lo + &steps[a];
                            (lo, hi)
                        })
                        .collect();
                    Interval::from_bounds_unchecked(b)
                })
                .collect();
            return Ok(IsoVerdict::Falsified { witness, ratio });
        }
    }
    Ok(IsoVerdict::PassedSampled { tested })
}
