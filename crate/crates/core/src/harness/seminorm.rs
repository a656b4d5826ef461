use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::charges::Charge;
use crate::error::{Error, Result};
use crate::geometry::{is_eps_isoperimetric_sampled_interval, DyadicCube, Figure, Interval, IsoSearch, MIN_LEVEL};
use crate::rational::{self, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Seminorm {
    /// Regular test sets.
    P,
    /// Regular, tag in the closure, sampled isoperimetric.
    Q,
}

#[derive(Clone, Debug)]
pub struct SeminormQuery {
    pub charge: Charge,
    pub x: Vec<f64>,
    pub r: f64,
    pub eps: f64,
    pub variant: Seminorm,
    /// Extra dyadic levels below the base level.
    pub depth: u32,
    pub seed: u64,
    /// Boxes per level; levels with more boxes are sampled.
    pub per_level: usize,
    pub iso: IsoSearch,
}

impl SeminormQuery {
    pub fn new(charge: Charge, x: Vec<f64>, r: f64, eps: f64, variant: Seminorm) -> Self {
        Self {
            charge,
            x,
            r,
            eps,
            variant,
            depth: 4,
            seed: 0,
            per_level: 2048,
            iso: IsoSearch { depth: 1, random_masks: 16, random_boxes: 16, ..IsoSearch::default() },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelStats {
    pub level: i32,
    pub candidates: usize,
    pub admissible: usize,
    pub exhaustive: bool,
}

/// A lower bound for the seminorm and the test set attaining it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeminormBound {
    pub value: f64,
    pub signed_value: f64,
    pub witness: Option<Figure>,
    pub witness_box: Option<Interval>,
    /// Best admissible single cube.
    pub best_cube: Option<(f64, DyadicCube)>,
    pub levels: Vec<LevelStats>,
}

impl SeminormBound {
    fn empty() -> Self {
        Self { value: 0.0, signed_value: 0.0, witness: None, witness_box: None, best_cube: None, levels: Vec::new() }
    }
}

/// Base level: first `l` with `2^{-l} <= r / 2`.
pub(crate) fn base_level(r: f64) -> i32 {
    let mut l = (2.0 / r).log2().ceil() as i32 - 1;
    while 2f64.powi(-l) > r / 2.0 {
        l += 1;
    }
    l.max(MIN_LEVEL)
}

#[derive(Clone, Debug)]
struct Cand {
    level: i32,
    lo: Vec<i64>,
    hi: Vec<i64>,
}

impl Cand {
    fn bounds_f64(&self) -> Vec<(f64, f64)> {
        let s = 2f64.powi(-self.level);
        self.lo.iter().zip(&self.hi).map(|(&a, &b)| (a as f64 * s, (b + 1) as f64 * s)).collect()
    }

    fn interval(&self) -> Interval {
        Interval::new(
            self.lo
                .iter()
                .zip(&self.hi)
                .map(|(&a, &b)| (rational::dyadic(a, self.level), rational::dyadic(b + 1, self.level)))
                .collect(),
        )
        .expect("nondegenerate box")
    }

    fn is_cube(&self) -> bool {
        self.lo == self.hi
    }
}

/// Three-way float comparison with an exact fallback near ties.
fn lt_with_fallback(lhs: f64, rhs: f64, exact: impl FnOnce() -> bool) -> bool {
    let tol = 1e-9 * (lhs.abs() + rhs.abs());
    if lhs < rhs - tol {
        true
    } else if lhs > rhs + tol {
        false
    } else {
        exact()
    }
}

struct Filter<'a> {
    x: &'a [f64],
    xr: Vec<Rational>,
    r2: f64,
    r2_exact: Rational,
    eps2: f64,
    eps2_exact: Rational,
}

impl Filter<'_> {
    /// `E ⊂⊂ B(x, r)` and `r(E, x) > eps`.
    fn admissible(&self, c: &Cand) -> bool {
        let b = c.bounds_f64();
        let far2: f64 = b.iter().zip(self.x).map(|(&(lo, hi), &xi)| (xi - lo).abs().max((hi - xi).abs()).powi(2)).sum();
        if !lt_with_fallback(far2, self.r2, || c.interval().farthest_dist_sq(&self.xr) < self.r2_exact) {
            return false;
        }
        let n = b.len();
        let sides: Vec<f64> = b.iter().map(|(lo, hi)| hi - lo).collect();
        let vol: f64 = sides.iter().product();
        let per: f64 = 2.0 * (0..n).map(|i| sides.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, s)| s).product::<f64>()).sum::<f64>();
        let d2: f64 = b
            .iter()
            .zip(self.x)
            .map(|(&(lo, hi), &xi)| (hi.max(xi) - lo.min(xi)).powi(2))
            .sum();
        // eps^2 d^2 P^2 < |E|^2
        lt_with_fallback(self.eps2 * d2 * per * per, vol * vol, || {
            c.interval().regularity(Some(&self.xr)).exceeds_sq(&self.eps2_exact)
        })
    }
}

/// Lower bound for the `p`- or `q`-seminorm of a charge at `B(x, r)`: the
/// best `|F(E)|` over dyadic boxes at levels `l0..=l0 + depth`, where `l0`
/// is the first level with cube side at most `r / 2`. Level families depend
/// only on the seed and the level, so deeper searches extend shallower ones
/// and the `q` family is a subfamily of the `p` family.
pub fn seminorm_lower_bound(q: &SeminormQuery) -> Result<SeminormBound> {
    let n = q.x.len();
    if n == 0 {
        return Err(Error::Input("empty center".into()));
    }
    if !(q.r > 0.0 && q.r.is_finite()) || !(q.eps > 0.0 && q.eps.is_finite()) {
        return Err(Error::Input("radius and eps must be positive".into()));
    }
    if let Some(d) = q.charge.dim() {
        if d != n {
            return Err(Error::DimensionMismatch { expected: d, found: n });
        }
    }
    let filter = Filter {
        x: &q.x,
        xr: rational::point_from_f64(&q.x)?,
        r2: q.r * q.r,
        r2_exact: rational::sq(&rational::from_f64(q.r)?),
        eps2: q.eps * q.eps,
        eps2_exact: rational::sq(&rational::from_f64(q.eps)?),
    };
    let l0 = base_level(q.r);
    let mut out = SeminormBound::empty();
    let mut best: Option<(f64, f64, Cand)> = None;
    let mut pending: Vec<(f64, f64, Cand)> = Vec::new();
    for level in l0..=l0 + q.depth as i32 {
        let (cands, exhaustive) = candidates(q, level);
        let mut stats = LevelStats { level, candidates: cands.len(), admissible: 0, exhaustive };
        for c in cands {
            if !filter.admissible(&c) {
                continue;
            }
            if q.variant == Seminorm::Q {
                let b = c.bounds_f64();
                let inside = b.iter().zip(&q.x).all(|(&(lo, hi), &xi)| lo <= xi && xi <= hi);
                if !inside {
                    continue;
                }
            }
            stats.admissible += 1;
            let v = q.charge.eval_box(&c.interval())?;
            if c.is_cube() && out.best_cube.as_ref().is_none_or(|(bv, _)| v.abs() > *bv) {
                out.best_cube = Some((v.abs(), DyadicCube { level, index: c.lo.clone() }));
            }
            match q.variant {
                Seminorm::P => {
                    if best.as_ref().is_none_or(|(bv, _, _)| v.abs() > *bv) {
                        best = Some((v.abs(), v, c));
                    }
                }
                Seminorm::Q => pending.push((v.abs(), v, c)),
            }
        }
        out.levels.push(stats);
    }
    if q.variant == Seminorm::Q {
        // Stable sort keeps enumeration order among ties.
        pending.sort_by(|a, b| b.0.total_cmp(&a.0));
        out.best_cube = None;
        for (a, v, c) in pending {
            if a == 0.0 || (best.is_some() && out.best_cube.is_some()) {
                break;
            }
            if best.is_some() && !c.is_cube() {
                continue;
            }
            if is_eps_isoperimetric_sampled_interval(&c.interval(), q.eps, &q.iso)?.passed() {
                if c.is_cube() && out.best_cube.is_none() {
                    out.best_cube = Some((a, DyadicCube { level: c.level, index: c.lo.clone() }));
                }
                if best.is_none() {
                    best = Some((a, v, c));
                }
            }
        }
    }
    if let Some((a, v, c)) = best {
        let iv = c.interval();
        out.value = a;
        out.signed_value = v;
        out.witness = Some(iv.to_figure()?);
        out.witness_box = Some(iv);
    }
    Ok(out)
}

fn candidates(q: &SeminormQuery, level: i32) -> (Vec<Cand>, bool) {
    let s = 2f64.powi(level);
    let ranges: Vec<(i64, i64)> =
        q.x.iter().map(|&xi| (((xi - q.r) * s).floor() as i64, ((xi + q.r) * s).ceil() as i64 - 1)).collect();
    let per_axis: Vec<u128> = ranges.iter().map(|&(a, b)| {
        let g = (b - a + 1) as u128;
        g * (g + 1) / 2
    }).collect();
    let total = per_axis.iter().try_fold(1u128, |acc, &k| acc.checked_mul(k)).unwrap_or(u128::MAX);
    if total <= q.per_level as u128 {
        let mut out = Vec::with_capacity(total as usize);
        let n = ranges.len();
        let mut lo: Vec<i64> = ranges.iter().map(|r| r.0).collect();
        let mut hi = lo.clone();
        'outer: loop {
            out.push(Cand { level, lo: lo.clone(), hi: hi.clone() });
            for i in 0..n {
                if hi[i] < ranges[i].1 {
                    hi[i] += 1;
                    continue 'outer;
                }
                if lo[i] < ranges[i].1 {
                    lo[i] += 1;
                    hi[i] = lo[i];
                    continue 'outer;
                }
                lo[i] = ranges[i].0;
                hi[i] = lo[i];
            }
            break;
        }
        return (out, true);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(q.seed);
    rng.set_stream((level - MIN_LEVEL) as u64);
    let out = (0..q.per_level)
        .map(|_| {
            let (lo, hi) = ranges
                .iter()
                .map(|&(a, b)| {
                    let u = rng.random_range(a..=b);
                    let v = rng.random_range(a..=b);
                    (u.min(v), u.max(v))
                })
                .unzip();
            Cand { level, lo, hi }
        })
        .collect();
    (out, false)
}
