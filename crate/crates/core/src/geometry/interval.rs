use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{DyadicCube, Figure, Regularity};
use crate::rational::{self, Rational};

/// Axis-aligned closed box `prod_l [a_l, b_l]` with exact, not necessarily
/// dyadic, bounds.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Interval {
    #[serde(with = "rational::serde_rational_pairs")]
    bounds: Vec<(Rational, Rational)>,
}

impl Interval {
    pub fn new(bounds: Vec<(Rational, Rational)>) -> Result<Self> {
        if bounds.is_empty() {
            return Err(Error::Input("interval needs at least one axis".into()));
        }
        if let Some((a, b)) = bounds.iter().find(|(a, b)| a >= b) {
            return Err(Error::Input(format!("degenerate side [{a}, {b}]")));
        }
        Ok(Self { bounds })
    }

    pub(crate) fn from_bounds_unchecked(bounds: Vec<(Rational, Rational)>) -> Self {
        Self { bounds }
    }

    pub fn dim(&self) -> usize {
        self.bounds.len()
    }

    pub fn bounds(&self) -> &[(Rational, Rational)] {
        &self.bounds
    }

    pub fn sides(&self) -> Vec<Rational> {
        self.bounds.iter().map(|(a, b)| b - a).collect()
    }

    pub fn volume(&self) -> Rational {
        self.sides().iter().fold(Rational::one(), |p, s| p * s)
    }

    /// `2 * sum_l prod_{j != l} (b_j - a_j)`; for `n = 1` this is 2 (two endpoints).
    pub fn perimeter(&self) -> Rational {
        let sides = self.sides();
        let n = sides.len();
        let mut total = Rational::zero();
        for l in 0..n {
            let mut p = Rational::one();
            for (j, s) in sides.iter().enumerate() {
                if j != l {
                    p *= s;
                }
            }
            total += p;
        }
        total * rational::int(2)
    }

    pub fn diameter_sq(&self) -> Rational {
        self.sides().iter().map(rational::sq).fold(Rational::zero(), |a, b| a + b)
    }

    /// `d(Q ∪ {x})^2`.
    pub fn diameter_sq_with(&self, x: &[Rational]) -> Rational {
        let mut s = Rational::zero();
        for ((a, b), xi) in self.bounds.iter().zip(x) {
            let lo = if xi < a { xi } else { a };
            let hi = if xi > b { xi } else { b };
            s += rational::sq(&(hi - lo));
        }
        s
    }

    pub fn regularity(&self, tag: Option<&[Rational]>) -> Regularity {
        let diameter_sq = match tag {
            Some(x) => self.diameter_sq_with(x),
            None => self.diameter_sq(),
        };
        Regularity { volume: self.volume(), perimeter: self.perimeter(), diameter_sq }
    }

    pub fn contains_point(&self, x: &[Rational]) -> bool {
        self.bounds.iter().zip(x).all(|((a, b), xi)| xi >= a && xi <= b)
    }

    pub fn farthest_dist_sq(&self, x: &[Rational]) -> Rational {
        let mut s = Rational::zero();
        for ((a, b), xi) in self.bounds.iter().zip(x) {
            let da = (a - xi).abs();
            let db = (b - xi).abs();
            s += rational::sq(if da > db { &da } else { &db });
        }
        s
    }

    /// `Q ⊂ B(x, r)` for the open ball.
    pub fn inside_open_ball(&self, x: &[Rational], r: &Rational) -> bool {
        self.farthest_dist_sq(x) < rational::sq(r)
    }

    pub fn min_side(&self) -> Rational {
        self.sides().into_iter().min().expect("nonempty")
    }

    pub fn max_side(&self) -> Rational {
        self.sides().into_iter().max().expect("nonempty")
    }

    pub fn with_axis(&self, axis: usize, lo: Rational, hi: Rational) -> Self {
        let mut bounds = self.bounds.clone();
        bounds[axis] = (lo, hi);
        Self { bounds }
    }

    pub fn intersect(&self, other: &Interval) -> Option<Interval> {
        let bounds: Vec<_> = self
            .bounds
            .iter()
            .zip(&other.bounds)
            .map(|((a, b), (c, d))| (if a > c { a.clone() } else { c.clone() }, if b < d { b.clone() } else { d.clone() }))
            .collect();
        if bounds.iter().all(|(a, b)| a < b) {
            Some(Self { bounds })
        } else {
            None
        }
    }

    /// Decomposes a box with dyadic bounds into dyadic cubes, merged where
    /// possible.
    pub fn to_figure(&self) -> Result<Figure> {
        let mut level = i32::MIN;
        for (a, b) in &self.bounds {
            for v in [a, b] {
                let d = v.denom();
                let bits = d.bits() as i32 - 1;
                if !(d.clone() & (d - num_bigint::BigInt::one())).is_zero() {
                    return Err(Error::Input(format!("bound {v} is not dyadic")));
                }
                level = level.max(bits);
            }
        }
        let level = level.max(super::cube::MIN_LEVEL);
        let scale = rational::pow2(level as i64);
        let ranges: Vec<(i64, i64)> = self
            .bounds
            .iter()
            .map(|(a, b)| (rational::floor_i64(&(a * &scale)), rational::floor_i64(&(b * &scale))))
            .collect();
        let count: u128 = ranges.iter().map(|(a, b)| (b - a) as u128).product();
        if count > super::DEFAULT_CUBE_BUDGET as u128 {
            return Err(Error::Budget { what: "box decomposition".into(), needed: count, budget: super::DEFAULT_CUBE_BUDGET as u128 });
        }
        let n = self.dim();
        let mut cubes = Vec::with_capacity(count as usize);
        let mut idx: Vec<i64> = ranges.iter().map(|r| r.0).collect();
        'outer: loop {
            cubes.push(DyadicCube { level, index: idx.clone() });
            for axis in 0..n {
                idx[axis] += 1;
                if idx[axis] < ranges[axis].1 {
                    continue 'outer;
                }
                idx[axis] = ranges[axis].0;
            }
            break;
        }
        Ok(Figure::new(n, cubes)?.coarsened())
    }

    pub fn center_f64(&self) -> Vec<f64> {
        self.bounds.iter().map(|(a, b)| rational::to_f64(&((a + b) / rational::int(2)))).collect()
    }

    pub fn bounds_f64(&self) -> Vec<(f64, f64)> {
        self.bounds.iter().map(|(a, b)| (rational::to_f64(a), rational::to_f64(b))).collect()
    }
}
