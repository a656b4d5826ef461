use std::collections::{BTreeMap, HashSet};

use num_traits::{Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{DyadicCube, Interval, Regularity, DEFAULT_CUBE_BUDGET};
use crate::rational::{self, Rational};

/// A finite union of dyadic cubes, stored containment-free and sorted.
///
/// Two dyadic cubes are either nested or have disjoint interiors, so a
/// containment-free set is automatically non-overlapping.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Figure {
    dim: usize,
    cubes: Vec<DyadicCube>,
}

#[derive(Deserialize)]
struct RawFigure {
    dim: usize,
    cubes: Vec<DyadicCube>,
}

impl<'de> Deserialize<'de> for Figure {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = RawFigure::deserialize(d)?;
        Figure::new(raw.dim, raw.cubes).map_err(serde::de::Error::custom)
    }
}

/// One exposed piece of the boundary: the facet of `cube` orthogonal to
/// `axis`, on the positive or negative side.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Face {
    pub cube: DyadicCube,
    pub axis: usize,
    pub positive: bool,
}

impl Face {
    pub fn area(&self) -> Rational {
        self.cube.face_area()
    }

    /// Bounds of the facet's (n-1)-dimensional box, listed over all axes with
    /// the normal axis collapsed to its coordinate.
    pub fn plane_coordinate(&self) -> Rational {
        if self.positive {
            self.cube.upper(self.axis)
        } else {
            self.cube.lower(self.axis)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum CubeState {
    Full,
    Empty,
    Mixed,
}

/// Membership oracle for a figure: is a query cube inside, outside, or split?
pub(crate) struct FigureIndex {
    cubes: HashSet<DyadicCube>,
    ancestors: HashSet<DyadicCube>,
    min_level: i32,
    max_level: i32,
    floor: i32,
}

impl FigureIndex {
    /// `floor` is the coarsest level that will ever be queried.
    pub(crate) fn new(fig: &Figure, floor: i32) -> Self {
        let min_level = fig.min_level().unwrap_or(0);
        let max_level = fig.max_level().unwrap_or(0);
        let floor = floor.min(min_level);
        let mut ancestors = HashSet::new();
        for c in &fig.cubes {
            let mut a = c.clone();
            while a.level > floor {
                a = a.mother();
                if !ancestors.insert(a.clone()) {
                    break;
                }
            }
        }
        Self { cubes: fig.cubes.iter().cloned().collect(), ancestors, min_level, max_level, floor }
    }

    pub(crate) fn state(&self, c: &DyadicCube) -> CubeState {
        if self.cubes.is_empty() {
            return CubeState::Empty;
        }
        if c.level >= self.min_level {
            let top = c.level.min(self.max_level);
            for l in self.min_level..=top {
                if self.cubes.contains(&c.ancestor(l)) {
                    return CubeState::Full;
                }
            }
        }
        if c.level >= self.floor && self.ancestors.contains(c) {
            return CubeState::Mixed;
        }
        if c.level < self.floor {
            // Only reachable when the caller under-estimated the floor.
            if self.cubes.iter().any(|k| c.contains(k)) {
                return CubeState::Mixed;
            }
        }
        CubeState::Empty
    }
}

impl Figure {
    pub fn new(dim: usize, cubes: Vec<DyadicCube>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Input("figure dimension must be at least 1".into()));
        }
        for c in &cubes {
            if c.dim() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: c.dim() });
            }
            if c.level < super::cube::MIN_LEVEL {
                return Err(Error::Input(format!("cube level {} below {}", c.level, super::cube::MIN_LEVEL)));
            }
        }
        let mut sorted = cubes;
        sorted.sort_by(|a, b| a.level.cmp(&b.level).then_with(|| a.index.cmp(&b.index)));
        sorted.dedup();
        let mut kept: HashSet<DyadicCube> = HashSet::new();
        let mut levels: Vec<i32> = Vec::new();
        let mut out = Vec::with_capacity(sorted.len());
        for c in sorted {
            let covered = levels.iter().any(|&l| l < c.level && kept.contains(&c.ancestor(l)));
            if !covered {
                if levels.last() != Some(&c.level) {
                    levels.push(c.level);
                }
                kept.insert(c.clone());
                out.push(c);
            }
        }
        out.sort();
        Ok(Self { dim, cubes: out })
    }

    pub fn empty(dim: usize) -> Self {
        Self { dim, cubes: Vec::new() }
    }

    pub fn unit(dim: usize) -> Self {
        Self { dim, cubes: vec![DyadicCube::unit(dim)] }
    }

    pub fn from_cube(c: DyadicCube) -> Self {
        Self { dim: c.dim(), cubes: vec![c] }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn cubes(&self) -> &[DyadicCube] {
        &self.cubes
    }

    pub fn is_empty(&self) -> bool {
        self.cubes.is_empty()
    }

    pub fn len(&self) -> usize {
        self.cubes.len()
    }

    pub fn min_level(&self) -> Option<i32> {
        self.cubes.iter().map(|c| c.level).min()
    }

    pub fn max_level(&self) -> Option<i32> {
        self.cubes.iter().map(|c| c.level).max()
    }

    fn check_dim(&self, other: &Figure) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: other.dim });
        }
        Ok(())
    }

    /// Merges complete sibling groups into their mother, repeatedly.
    pub fn coarsened(&self) -> Figure {
        let full = 1usize << self.dim;
        let mut cubes: HashSet<DyadicCube> = self.cubes.iter().cloned().collect();
        loop {
            let mut by_mother: BTreeMap<DyadicCube, usize> = BTreeMap::new();
            for c in &cubes {
                *by_mother.entry(c.mother()).or_default() += 1;
            }
            let complete: Vec<DyadicCube> = by_mother.into_iter().filter(|(_, k)| *k == full).map(|(m, _)| m).collect();
            if complete.is_empty() {
                break;
            }
            for m in complete {
                for ch in m.children() {
                    cubes.remove(&ch);
                }
                cubes.insert(m);
            }
        }
        let mut v: Vec<_> = cubes.into_iter().collect();
        v.sort();
        Figure { dim: self.dim, cubes: v }
    }

    /// Refines every cube to `level` (which must be at least the finest level).
    pub fn refined(&self, level: i32, budget: usize) -> Result<Vec<DyadicCube>> {
        let mut needed: u128 = 0;
        for c in &self.cubes {
            if c.level > level {
                return Err(Error::Input(format!("cannot refine level {} cube to coarser level {level}", c.level)));
            }
            let k = ((level - c.level) as u32) * self.dim as u32;
            needed = needed.saturating_add(if k >= 127 { u128::MAX } else { 1u128 << k });
        }
        if needed > budget as u128 {
            return Err(Error::Budget { what: "figure refinement".into(), needed, budget: budget as u128 });
        }
        let mut out = Vec::with_capacity(needed as usize);
        for c in &self.cubes {
            out.extend(c.descendants(level));
        }
        Ok(out)
    }

    pub fn volume(&self) -> Rational {
        self.cubes.iter().map(|c| c.volume()).fold(Rational::zero(), |a, b| a + b)
    }

    pub fn volume_f64(&self) -> f64 {
        self.cubes.iter().map(|c| (-(c.level as f64) * self.dim as f64).exp2()).sum()
    }

    /// Exposed boundary faces. Faces shared by two cubes of the figure are
    /// never produced, whatever their levels.
    pub fn boundary_faces(&self) -> Vec<Face> {
        let mut out = Vec::new();
        let idx = FigureIndex::new(self, self.min_level().unwrap_or(0));
        walk_faces(self, &idx, None, &mut |c, axis, positive, _| {
            out.push(Face { cube: c.clone(), axis, positive })
        });
        out
    }

    /// `H^{n-1}` of the topological boundary (= reduced boundary for figures).
    pub fn perimeter(&self) -> Result<Rational> {
        let idx = FigureIndex::new(self, self.min_level().unwrap_or(0));
        let mut by_level: BTreeMap<i32, u64> = BTreeMap::new();
        walk_faces(self, &idx, None, &mut |c, _, _, _| *by_level.entry(c.level).or_default() += 1);
        Ok(sum_face_counts(self.dim, &by_level))
    }

    pub fn perimeter_f64(&self) -> f64 {
        rational::to_f64(&self.perimeter().expect("perimeter is infallible"))
    }

    /// `P(E, in A) = H^{n-1}(∂E ∩ int A)`.
    pub fn relative_perimeter(&self, a: &Figure) -> Result<Rational> {
        self.check_dim(a)?;
        if self.is_empty() || a.is_empty() {
            return Ok(Rational::zero());
        }
        let floor = self.min_level().unwrap().min(a.min_level().unwrap());
        let ie = FigureIndex::new(self, floor);
        let ia = FigureIndex::new(a, floor);
        let mut by_level: BTreeMap<i32, u64> = BTreeMap::new();
        walk_faces(self, &ie, Some(&ia), &mut |c, _, _, inside| {
            if inside {
                *by_level.entry(c.level).or_default() += 1;
            }
        });
        Ok(sum_face_counts(self.dim, &by_level))
    }

    pub fn union(&self, other: &Figure) -> Result<Figure> {
        self.check_dim(other)?;
        let mut cubes = self.cubes.clone();
        cubes.extend(other.cubes.iter().cloned());
        Figure::new(self.dim, cubes)
    }

    pub fn intersection(&self, other: &Figure) -> Result<Figure> {
        self.check_dim(other)?;
        if self.is_empty() || other.is_empty() {
            return Ok(Figure::empty(self.dim));
        }
        let floor = self.min_level().unwrap().min(other.min_level().unwrap());
        let io = FigureIndex::new(other, floor);
        let mut out = Vec::new();
        for c in &self.cubes {
            match io.state(c) {
                CubeState::Full => out.push(c.clone()),
                CubeState::Empty => {}
                CubeState::Mixed => out.extend(other.cubes.iter().filter(|k| c.contains(k)).cloned()),
            }
        }
        Figure::new(self.dim, out)
    }

    pub fn difference(&self, other: &Figure) -> Result<Figure> {
        self.check_dim(other)?;
        if self.is_empty() || other.is_empty() {
            return Ok(self.clone());
        }
        let floor = self.min_level().unwrap().min(other.min_level().unwrap());
        let io = FigureIndex::new(other, floor);
        let mut out = Vec::new();
        let mut stack: Vec<DyadicCube> = self.cubes.clone();
        while let Some(c) = stack.pop() {
            match io.state(&c) {
                CubeState::Full => {}
                CubeState::Empty => out.push(c),
                CubeState::Mixed => stack.extend(c.children()),
            }
        }
        Figure::new(self.dim, out)
    }

    /// `|A △ B|`, exact.
    pub fn symmetric_difference_measure(&self, other: &Figure) -> Result<Rational> {
        Ok(self.difference(other)?.volume() + other.difference(self)?.volume())
    }

    pub fn contains_point(&self, x: &[Rational]) -> bool {
        self.cubes.iter().any(|c| c.contains_point(x))
    }

    /// Squared diameter of `E ∪ {x}` (or of `E` alone), attained at corners.
    pub fn diameter_sq_with(&self, tag: Option<&[Rational]>) -> Result<Rational> {
        if self.is_empty() {
            return match tag {
                Some(_) => Ok(Rational::zero()),
                None => Err(Error::EmptySet("diameter")),
            };
        }
        let boxes: Vec<Vec<(Rational, Rational)>> = self.cubes.iter().map(|c| c.bounds()).collect();
        let mut best = Rational::zero();
        for (i, a) in boxes.iter().enumerate() {
            for b in &boxes[i..] {
                let mut s = Rational::zero();
                for ((alo, ahi), (blo, bhi)) in a.iter().zip(b) {
                    let d1 = (ahi - blo).abs();
                    let d2 = (bhi - alo).abs();
                    s += rational::sq(if d1 > d2 { &d1 } else { &d2 });
                }
                if s > best {
                    best = s;
                }
            }
            if let Some(x) = tag {
                let s = self.cubes[i].farthest_dist_sq(x);
                if s > best {
                    best = s;
                }
            }
        }
        Ok(best)
    }

    /// `r(E)` or `r(E, x)`; zero volume gives zero regularity.
    pub fn regularity(&self, tag: Option<&[Rational]>) -> Result<Regularity> {
        if self.is_empty() {
            return Ok(Regularity::zero());
        }
        Ok(Regularity { volume: self.volume(), perimeter: self.perimeter()?, diameter_sq: self.diameter_sq_with(tag)? })
    }

    pub fn bounding_box(&self) -> Option<Interval> {
        let first = self.cubes.first()?;
        let mut bounds = first.bounds();
        for c in &self.cubes[1..] {
            for (i, (lo, hi)) in bounds.iter_mut().enumerate() {
                let a = c.lower(i);
                let b = c.upper(i);
                if a < *lo {
                    *lo = a;
                }
                if b > *hi {
                    *hi = b;
                }
            }
        }
        Some(Interval::from_bounds_unchecked(bounds))
    }

    /// Closed figure inside the open ball `B(x, r)`.
    pub fn inside_open_ball(&self, x: &[Rational], r: &Rational) -> bool {
        let r2 = rational::sq(r);
        self.cubes.iter().all(|c| c.farthest_dist_sq(x) < r2)
    }

    /// Same set, every cube split down to `level`.
    pub fn with_cubes_at(&self, level: i32) -> Result<Figure> {
        Ok(Figure { dim: self.dim, cubes: self.refined(level, DEFAULT_CUBE_BUDGET)? })
    }
}

fn sum_face_counts(dim: usize, by_level: &BTreeMap<i32, u64>) -> Rational {
    by_level
        .iter()
        .map(|(&l, &k)| rational::int(k as i64) * rational::pow2(-(l as i64) * (dim as i64 - 1)))
        .fold(Rational::zero(), |a, b| a + b)
}

/// Visits every exposed facet piece of `fig`. When `other` is given, pieces
/// are split until both sides are uniform with respect to it too, and the
/// last callback argument says whether the piece lies in the interior of
/// `other`.
pub(crate) fn walk_faces(
    fig: &Figure,
    idx: &FigureIndex,
    other: Option<&FigureIndex>,
    emit: &mut dyn FnMut(&DyadicCube, usize, bool, bool),
) {
    for c in &fig.cubes {
        for axis in 0..fig.dim {
            for positive in [false, true] {
                let out = c.shifted(axis, if positive { 1 } else { -1 });
                recurse(c.clone(), out, axis, positive, idx, other, emit);
            }
        }
    }
}

fn recurse(
    inner: DyadicCube,
    outer: DyadicCube,
    axis: usize,
    positive: bool,
    idx: &FigureIndex,
    other: Option<&FigureIndex>,
    emit: &mut dyn FnMut(&DyadicCube, usize, bool, bool),
) {
    let so = idx.state(&outer);
    if so == CubeState::Full {
        return;
    }
    let (oi, oo) = match other {
        Some(o) => (o.state(&inner), o.state(&outer)),
        None => (CubeState::Empty, CubeState::Empty),
    };
    if so == CubeState::Empty && oi != CubeState::Mixed && oo != CubeState::Mixed {
        emit(&inner, axis, positive, oi == CubeState::Full && oo == CubeState::Full);
        return;
    }
    let n = inner.dim();
    let in_bit = positive as i64;
    for mask in 0..(1usize << (n - 1)) {
        let mut ci = Vec::with_capacity(n);
        let mut co = Vec::with_capacity(n);
        let mut bit = 0;
        for i in 0..n {
            if i == axis {
                ci.push(2 * inner.index[i] + in_bit);
                co.push(2 * outer.index[i] + (1 - in_bit));
            } else {
                let b = ((mask >> bit) & 1) as i64;
                bit += 1;
                ci.push(2 * inner.index[i] + b);
                co.push(2 * outer.index[i] + b);
            }
        }
        let level = inner.level + 1;
        recurse(
            DyadicCube { level, index: ci },
            DyadicCube { level, index: co },
            axis,
            positive,
            idx,
            other,
            emit,
        );
    }
}
