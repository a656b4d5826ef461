//! Oracles written independently of the library: integer-scaled figure
//! geometry, exact box regularity, and monomial integration.

#![allow(dead_code)]

use std::collections::HashSet;

use gaugekit::geometry::{DyadicCube, Figure};
use gaugekit::rational::{int, ratio, Rational};
use num_traits::{One, Signed, Zero};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// A figure refined to one level `l`: cells are integer points `k` standing
/// for `prod [k_i 2^-l, (k_i + 1) 2^-l]`.
pub struct Cells {
    pub dim: usize,
    pub level: i32,
    pub cells: HashSet<Vec<i64>>,
}

impl Cells {
    pub fn of(f: &Figure) -> Self {
        let level = f.cubes().iter().map(|c| c.level).max().unwrap_or(0);
        let mut cells = HashSet::new();
        for c in f.cubes() {
            let m = 1i64 << (level - c.level);
            let base: Vec<i64> = c.index.iter().map(|k| k * m).collect();
            let mut offs = vec![0i64; f.dim()];
            loop {
                cells.insert(base.iter().zip(&offs).map(|(b, o)| b + o).collect());
                let mut i = 0;
                while i < offs.len() {
                    offs[i] += 1;
                    if offs[i] < m {
                        break;
                    }
                    offs[i] = 0;
                    i += 1;
                }
                if i == offs.len() {
                    break;
                }
            }
        }
        Self { dim: f.dim(), level, cells }
    }

    /// Volume in units of `2^{-l n}`.
    pub fn volume(&self) -> i128 {
        self.cells.len() as i128
    }

    /// Perimeter in units of `2^{-l (n-1)}`: exposed cell faces.
    pub fn perimeter(&self) -> i128 {
        let mut p = 0;
        for c in &self.cells {
            for axis in 0..self.dim {
                for d in [-1, 1] {
                    let mut nb = c.clone();
                    nb[axis] += d;
                    if !self.cells.contains(&nb) {
                        p += 1;
                    }
                }
            }
        }
        p
    }

    /// Squared diameter in units of `4^{-l}`: farthest pair of corners of
    /// the original cubes.
    pub fn diameter_sq(&self, f: &Figure) -> i128 {
        let mut corners: HashSet<Vec<i64>> = HashSet::new();
        for c in f.cubes() {
            let m = 1i64 << (self.level - c.level);
            for mask in 0..1usize << self.dim {
                corners.insert(c.index.iter().enumerate().map(|(i, k)| (k + ((mask >> i) & 1) as i64) * m).collect());
            }
        }
        let corners: Vec<Vec<i64>> = corners.into_iter().collect();
        let mut best = 0i128;
        for (i, a) in corners.iter().enumerate() {
            for b in &corners[i + 1..] {
                let d: i128 = a.iter().zip(b).map(|(x, y)| ((x - y) as i128).pow(2)).sum();
                best = best.max(d);
            }
        }
        best
    }
}

/// Random figure of at most `max_cubes` cubes at levels `l` and `l + 1`,
/// inside `[-1, 1]^n`.
pub fn random_figure(rng: &mut ChaCha8Rng, dim: usize, max_level: i32, max_cubes: usize) -> Figure {
    let level = rng.random_range(0..=max_level);
    let count = rng.random_range(1..=max_cubes);
    let cubes = (0..count)
        .map(|_| {
            let l = if rng.random_bool(0.3) { level + 1 } else { level };
            let s = 1i64 << l;
            DyadicCube::new(l, (0..dim).map(|_| rng.random_range(-s..s)).collect()).unwrap()
        })
        .collect();
    Figure::new(dim, cubes).unwrap()
}

pub fn random_rational(rng: &mut ChaCha8Rng, lo: i64, hi: i64, den: i64) -> Rational {
    ratio(rng.random_range(lo * den..=hi * den), den)
}

pub fn sq(x: &Rational) -> Rational {
    x * x
}

/// A box as `[(a_l, b_l)]`.
pub type Boxed = Vec<(Rational, Rational)>;

pub fn box_volume(q: &Boxed) -> Rational {
    q.iter().fold(Rational::one(), |v, (a, b)| v * (b - a))
}

pub fn box_perimeter(q: &Boxed) -> Rational {
    let mut p = Rational::zero();
    for l in 0..q.len() {
        p += q.iter().enumerate().filter(|(k, _)| *k != l).fold(Rational::one(), |v, (_, (a, b))| v * (b - a));
    }
    p * int(2)
}

/// `diam(Q ∪ {x})^2`.
pub fn box_diameter_sq(q: &Boxed, x: Option<&[Rational]>) -> Rational {
    q.iter()
        .enumerate()
        .map(|(l, (a, b))| {
            let mut m = b - a;
            if let Some(x) = x {
                m = m.max((&x[l] - a).abs()).max((&x[l] - b).abs());
            }
            sq(&m)
        })
        .sum()
}

/// `r(Q, x) > eps` with `eps^2` given, squared on both sides.
pub fn box_regular(q: &Boxed, x: Option<&[Rational]>, eps_sq: &Rational) -> bool {
    sq(&box_volume(q)) > eps_sq * box_diameter_sq(q, x) * sq(&box_perimeter(q))
}

/// `rho(n)^2 = 1 / (n^{n+1} 2^{6n-4})`.
pub fn rho_sq(n: usize) -> Rational {
    let n = n as i64;
    ratio(1, n.pow(n as u32 + 1) * (1i64 << (6 * n - 4)))
}

/// `∫_a^b t^p dt`.
pub fn power_integral(a: &Rational, b: &Rational, p: u32) -> Rational {
    let up = |t: &Rational| num_traits::pow(t.clone(), p as usize + 1);
    (up(b) - up(a)) / int(p as i64 + 1)
}

/// A polynomial as `(coef, powers)` terms.
pub type Poly = Vec<(Rational, Vec<u32>)>;

pub fn derivative(p: &Poly, axis: usize) -> Poly {
    p.iter()
        .filter(|(_, e)| e[axis] > 0)
        .map(|(c, e)| {
            let mut e2 = e.clone();
            e2[axis] -= 1;
            (c * int(e[axis] as i64), e2)
        })
        .collect()
}

pub fn integrate_over_figure(p: &Poly, f: &Figure) -> Rational {
    let mut total = Rational::zero();
    for c in f.cubes() {
        let s = ratio(1, 1) / num_traits::pow(int(2), c.level as usize);
        for (coef, e) in p {
            let mut t = coef.clone();
            for (i, &k) in c.index.iter().enumerate() {
                let a = int(k) * &s;
                let b = &a + &s;
                t *= power_integral(&a, &b, e[i]);
            }
            total += t;
        }
    }
    total
}

pub fn to_f64(x: &Rational) -> f64 {
    gaugekit::rational::to_f64(x)
}
