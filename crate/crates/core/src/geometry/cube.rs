use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Interval;
use crate::rational::{self, Rational};

/// Coarsest grid level accepted anywhere (cube side `2^16`).
pub const MIN_LEVEL: i32 = -16;

/// The closed cube `prod_i [k_i / 2^m, (k_i + 1) / 2^m]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DyadicCube {
    pub level: i32,
    pub index: Vec<i64>,
}

impl DyadicCube {
    pub fn new(level: i32, index: Vec<i64>) -> Result<Self> {
        if level < MIN_LEVEL {
            return Err(Error::Input(format!("cube level {level} below {MIN_LEVEL}")));
        }
        if index.is_empty() {
            return Err(Error::Input("cube index must have at least one coordinate".into()));
        }
        Ok(Self { level, index })
    }

    pub fn unit(dim: usize) -> Self {
        Self { level: 0, index: vec![0; dim] }
    }

    pub fn dim(&self) -> usize {
        self.index.len()
    }

    pub fn side(&self) -> Rational {
        rational::pow2(-(self.level as i64))
    }

    pub fn side_f64(&self) -> f64 {
        (-(self.level as f64)).exp2()
    }

    pub fn lower(&self, axis: usize) -> Rational {
        rational::dyadic(self.index[axis], self.level)
    }

    pub fn upper(&self, axis: usize) -> Rational {
        rational::dyadic(self.index[axis] + 1, self.level)
    }

    pub fn lower_f64(&self, axis: usize) -> f64 {
        self.index[axis] as f64 * self.side_f64()
    }

    pub fn bounds(&self) -> Vec<(Rational, Rational)> {
        (0..self.dim()).map(|i| (self.lower(i), self.upper(i))).collect()
    }

    pub fn to_interval(&self) -> Interval {
        Interval::from_bounds_unchecked(self.bounds())
    }

    pub fn volume(&self) -> Rational {
        rational::pow2(-(self.level as i64) * self.dim() as i64)
    }

    /// Area of one facet.
    pub fn face_area(&self) -> Rational {
        rational::pow2(-(self.level as i64) * (self.dim() as i64 - 1))
    }

    /// The smallest dyadic cube properly containing this one.
    pub fn mother(&self) -> Self {
        self.ancestor(self.level - 1)
    }

    /// The dyadic cube at `level <= self.level` containing this one.
    pub fn ancestor(&self, level: i32) -> Self {
        debug_assert!(level <= self.level);
        let shift = (self.level - level) as u32;
        let index = self
            .index
            .iter()
            .map(|&k| if shift >= 63 { if k < 0 { -1 } else { 0 } } else { k >> shift })
            .collect();
        Self { level, index }
    }

    pub fn children(&self) -> Vec<Self> {
        let n = self.dim();
        (0..1usize << n)
            .map(|mask| Self {
                level: self.level + 1,
                index: (0..n).map(|i| 2 * self.index[i] + ((mask >> i) & 1) as i64).collect(),
            })
            .collect()
    }

    /// All descendants at `level`, in lexicographic order.
    pub fn descendants(&self, level: i32) -> Vec<Self> {
        debug_assert!(level >= self.level);
        let shift = (level - self.level) as u32;
        let per_axis = 1i64 << shift;
        let n = self.dim();
        let total = (per_axis as usize).pow(n as u32);
        let mut out = Vec::with_capacity(total);
        let mut offset = vec![0i64; n];
        loop {
            out.push(Self {
                level,
                index: (0..n).map(|i| (self.index[i] << shift) + offset[i]).collect(),
            });
            let mut axis = 0;
            loop {
                if axis == n {
                    return out;
                }
                offset[axis] += 1;
                if offset[axis] < per_axis {
                    break;
                }
                offset[axis] = 0;
                axis += 1;
            }
        }
    }

    /// Inclusion of closed cubes.
    pub fn contains(&self, other: &Self) -> bool {
        other.level >= self.level && other.ancestor(self.level) == *self
    }

    /// Two dyadic cubes overlap (share interior) iff one contains the other.
    pub fn overlaps(&self, other: &Self) -> bool {
        self.contains(other) || other.contains(self)
    }

    pub fn shifted(&self, axis: usize, delta: i64) -> Self {
        let mut index = self.index.clone();
        index[axis] += delta;
        Self { level: self.level, index }
    }

    pub fn center(&self) -> Vec<Rational> {
        let half = rational::ratio(1, 2);
        (0..self.dim()).map(|i| rational::dyadic(self.index[i], self.level) + self.side() * &half).collect()
    }

    /// Squared distance from `x` to the farthest point of the cube.
    pub fn farthest_dist_sq(&self, x: &[Rational]) -> Rational {
        let mut s = Rational::zero();
        for (i, xi) in x.iter().enumerate() {
            let a = (self.lower(i) - xi).abs();
            let b = (self.upper(i) - xi).abs();
            let m = if a > b { a } else { b };
            s += &m * &m;
        }
        s
    }

    /// Squared distance from `x` to the cube (zero inside).
    pub fn nearest_dist_sq(&self, x: &[Rational]) -> Rational {
        let mut s = Rational::zero();
        for (i, xi) in x.iter().enumerate() {
            let lo = self.lower(i);
            let hi = self.upper(i);
            let d = if *xi < lo {
                lo - xi
            } else if *xi > hi {
                xi - hi
            } else {
                continue;
            };
            s += &d * &d;
        }
        s
    }

    pub fn contains_point(&self, x: &[Rational]) -> bool {
        x.iter().enumerate().all(|(i, xi)| *xi >= self.lower(i) && *xi <= self.upper(i))
    }
}
