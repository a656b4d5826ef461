//! Exact geometry of dyadic figures, boxes and finite unions of intervals.

mod approx;
mod complex;
mod constants;
pub(crate) mod cube;
pub(crate) mod figure;
mod interval;
mod line;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::rational::{self, Rational};

pub use approx::dyadic_approximation;
pub use complex::{
    is_eps_isoperimetric_sampled, is_eps_isoperimetric_sampled_interval, isoperimetric_deficiency, CellComplex,
    IsoSearch, IsoVerdict, IsoperimetricRatio,
};
pub use constants::{unit_ball_volume, Constants};
pub use cube::{DyadicCube, MIN_LEVEL};
pub use figure::{Face, Figure};
pub use interval::Interval;
pub use line::BVSet1D;

/// Default cap on the number of cubes any single enumeration may create.
pub const DEFAULT_CUBE_BUDGET: usize = 1 << 24;

/// The three exact ingredients of `r(E, x) = |E| / (d(E ∪ {x}) ‖E‖)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Regularity {
    #[serde(with = "rational::serde_rational")]
    pub volume: Rational,
    #[serde(with = "rational::serde_rational")]
    pub perimeter: Rational,
    #[serde(with = "rational::serde_rational")]
    pub diameter_sq: Rational,
}

impl Regularity {
    pub fn zero() -> Self {
        Self { volume: Rational::zero(), perimeter: Rational::zero(), diameter_sq: Rational::zero() }
    }

    pub fn value(&self) -> f64 {
        if self.volume.is_zero() || self.perimeter.is_zero() || self.diameter_sq.is_zero() {
            return 0.0;
        }
        rational::to_f64(&self.volume)
            / (rational::to_f64(&self.diameter_sq).sqrt() * rational::to_f64(&self.perimeter))
    }

    /// Exact test of `r > eps`.
    pub fn exceeds(&self, eps: f64) -> Result<bool> {
        let e = rational::from_f64(eps)?;
        Ok(self.exceeds_sq(&rational::sq(&e)))
    }

    /// `r > sqrt(eps_sq)`, squared on both sides.
    pub fn exceeds_sq(&self, eps_sq: &Rational) -> bool {
        if self.volume.is_zero() {
            return false;
        }
        let lhs = rational::sq(&self.volume);
        let rhs = eps_sq * &self.diameter_sq * rational::sq(&self.perimeter);
        lhs > rhs
    }
}

/// Any set a charge can be evaluated on.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "type", content = "set")]
pub enum Region {
    Figure(Figure),
    Line(BVSet1D),
    Box(Interval),
}

impl Region {
    pub fn dim(&self) -> usize {
        match self {
            Region::Figure(f) => f.dim(),
            Region::Line(_) => 1,
            Region::Box(b) => b.dim(),
        }
    }

    pub fn volume(&self) -> Rational {
        match self {
            Region::Figure(f) => f.volume(),
            Region::Line(l) => l.volume(),
            Region::Box(b) => b.volume(),
        }
    }

    pub fn perimeter(&self) -> Result<Rational> {
        match self {
            Region::Figure(f) => f.perimeter(),
            Region::Line(l) => Ok(l.perimeter()),
            Region::Box(b) => Ok(b.perimeter()),
        }
    }

    pub fn regularity(&self, tag: Option<&[Rational]>) -> Result<Regularity> {
        match self {
            Region::Figure(f) => f.regularity(tag),
            Region::Line(l) => l.regularity(tag.map(|t| &t[0])),
            Region::Box(b) => Ok(b.regularity(tag)),
        }
    }
}

impl From<Figure> for Region {
    fn from(f: Figure) -> Self {
        Region::Figure(f)
    }
}

impl From<BVSet1D> for Region {
    fn from(l: BVSet1D) -> Self {
        Region::Line(l)
    }
}

impl From<Interval> for Region {
    fn from(b: Interval) -> Self {
        Region::Box(b)
    }
}
