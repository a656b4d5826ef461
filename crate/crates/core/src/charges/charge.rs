use std::fmt;
use std::sync::Arc;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::charges::field::{singular_profile, ScalarField, VectorField};
use crate::charges::polynomial::{PolyField, Polynomial};
use crate::charges::quadrature::GaussLegendre;
use crate::error::{Error, Result};
use crate::geometry::{BVSet1D, DyadicCube, Figure, Interval, Region};
use crate::rational::{self, Rational};

pub const DEFAULT_ORDER: usize = 7;

/// A continuous function on the line, inducing `E ↦ Σ F(b_i) - F(a_i)`.
#[derive(Clone)]
pub struct Function1D {
    pub name: String,
    f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
}

impl fmt::Debug for Function1D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Function1D").field("name", &self.name).finish_non_exhaustive()
    }
}

/// The Cantor function on `[0, 1]`, constant outside.
pub fn cantor(x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    let (mut x, mut r, mut s) = (x, 0.0, 0.5);
    for _ in 0..64 {
        x *= 3.0;
        if x >= 2.0 {
            r += s;
            x -= 2.0;
        } else if x >= 1.0 {
            return r + s;
        }
        s *= 0.5;
    }
    r
}

impl Function1D {
    pub fn new(name: &str, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self { name: name.into(), f: Arc::new(f) }
    }

    /// `identity`, `square`, `cantor`, `singular-sin`.
    pub fn catalog(name: &str) -> Result<Self> {
        Ok(match name {
            "identity" => Self::new(name, |x| x),
            "square" => Self::new(name, |x| x * x),
            "cantor" => Self::new(name, cantor),
            "singular-sin" => Self::new(name, singular_profile),
            other => return Err(Error::Input(format!("unknown 1D function `{other}`"))),
        })
    }

    pub fn eval(&self, x: f64) -> f64 {
        (self.f)(x)
    }
}

/// A bounded piece of the hyperplane `{x_axis = offset}`; `bounds` lists the
/// remaining axes in order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Flat {
    pub axis: usize,
    #[serde(with = "rational::serde_rational")]
    pub offset: Rational,
    #[serde(with = "rational::serde_rational_pairs")]
    pub bounds: Vec<(Rational, Rational)>,
}

impl Flat {
    pub fn dim(&self) -> usize {
        self.bounds.len() + 1
    }

    /// `H^{n-1}` of the flat piece itself.
    pub fn measure(&self) -> Rational {
        self.bounds.iter().fold(rational::int(1), |p, (a, b)| p * (b - a))
    }

    fn overlap_with(&self, other_bounds: &[(Rational, Rational)]) -> Rational {
        let mut v = rational::int(1);
        for ((a, b), (c, d)) in self.bounds.iter().zip(other_bounds) {
            let lo = if a > c { a } else { c };
            let hi = if b < d { b } else { d };
            if lo >= hi {
                return Rational::zero();
            }
            v *= hi - lo;
        }
        v
    }

    fn measure_in_figure(&self, e: &Figure) -> Result<Rational> {
        let hits: Vec<&DyadicCube> =
            e.cubes().iter().filter(|c| c.lower(self.axis) <= self.offset && self.offset <= c.upper(self.axis)).collect();
        if self.bounds.is_empty() {
            return Ok(if hits.is_empty() { Rational::zero() } else { rational::int(1) });
        }
        let projected = hits
            .iter()
            .map(|c| {
                let mut index = c.index.clone();
                index.remove(self.axis);
                DyadicCube { level: c.level, index }
            })
            .collect();
        let p = Figure::new(self.bounds.len(), projected)?;
        Ok(p.cubes().iter().map(|c| self.overlap_with(&c.bounds())).fold(Rational::zero(), |a, b| a + b))
    }

    fn measure_in_box(&self, q: &Interval) -> Rational {
        let (lo, hi) = &q.bounds()[self.axis];
        if self.offset < *lo || self.offset > *hi {
            return Rational::zero();
        }
        if self.bounds.is_empty() {
            return rational::int(1);
        }
        let mut rest = q.bounds().to_vec();
        rest.remove(self.axis);
        self.overlap_with(&rest)
    }
}

/// Additive set functions on figures, boxes and 1D sets. `Hausdorff` is the
/// deliberately non-charge `E ↦ H^{n-1}(E ∩ flat)`.
#[derive(Clone, Debug)]
pub enum Charge {
    Flux { field: VectorField, order: usize },
    Density { field: ScalarField, order: usize },
    Function1D(Function1D),
    Hausdorff(Flat),
    Restricted(Box<Charge>, Figure),
    Combination(Vec<(f64, Charge)>),
}

impl Charge {
    pub fn zero() -> Self {
        Charge::Combination(Vec::new())
    }

    /// Lebesgue measure.
    pub fn lebesgue() -> Self {
        Charge::density(ScalarField::Constant(1.0))
    }

    pub fn flux(field: VectorField) -> Self {
        Charge::Flux { field, order: DEFAULT_ORDER }
    }

    pub fn density(field: ScalarField) -> Self {
        Charge::Density { field, order: DEFAULT_ORDER }
    }

    pub fn function_1d(f: Function1D) -> Self {
        Charge::Function1D(f)
    }

    pub fn scaled(self, c: f64) -> Self {
        Charge::Combination(vec![(c, self)])
    }

    /// `a F + b G`.
    pub fn combine(a: f64, f: Charge, b: f64, g: Charge) -> Self {
        Charge::Combination(vec![(a, f), (b, g)])
    }

    /// The charge restricted to `a`: `E ↦ F(E ∩ a)`.
    pub fn restrict(&self, a: &Figure) -> Charge {
        Charge::Restricted(Box::new(self.clone()), a.clone())
    }

    /// Dimension fixed by the descriptor, if any.
    pub fn dim(&self) -> Option<usize> {
        match self {
            Charge::Flux { field, .. } => Some(field.dim()),
            Charge::Density { field, .. } => match field {
                ScalarField::Polynomial(p) => Some(p.dim()),
                ScalarField::SingularSinDivergence { dim } => Some(*dim),
                _ => None,
            },
            Charge::Function1D(_) => Some(1),
            Charge::Hausdorff(flat) => Some(flat.dim()),
            Charge::Restricted(_, a) => Some(a.dim()),
            Charge::Combination(parts) => parts.iter().find_map(|(_, c)| c.dim()),
        }
    }

    /// Flats of any `Hausdorff` parts, used to guide the falsifier.
    pub fn flats(&self) -> Vec<Flat> {
        match self {
            Charge::Hausdorff(f) => vec![f.clone()],
            Charge::Restricted(c, _) => c.flats(),
            Charge::Combination(parts) => parts.iter().flat_map(|(_, c)| c.flats()).collect(),
            _ => Vec::new(),
        }
    }

    fn check(&self, dim: usize) -> Result<()> {
        if let Some(d) = self.dim() {
            if d != dim {
                return Err(Error::DimensionMismatch { expected: d, found: dim });
            }
        }
        match self {
            Charge::Flux { order, .. } | Charge::Density { order, .. } if *order == 0 => {
                Err(Error::QuadratureOrder(0))
            }
            Charge::Restricted(c, _) => c.check(dim),
            Charge::Combination(parts) => parts.iter().try_for_each(|(_, c)| c.check(dim)),
            _ => Ok(()),
        }
    }

    pub fn eval(&self, region: &Region) -> Result<f64> {
        self.check(region.dim())?;
        match region {
            Region::Figure(f) => self.eval_figure(f),
            Region::Line(l) => self.eval_line(l),
            Region::Box(b) => self.eval_box(b),
        }
    }

    pub fn eval_figure(&self, e: &Figure) -> Result<f64> {
        self.check(e.dim())?;
        match self {
            Charge::Flux { field, order } => {
                let gl = GaussLegendre::new(*order)?;
                let mut total = 0.0;
                for face in e.boundary_faces() {
                    let bounds = cube_bounds_f64(&face.cube);
                    let plane = rational::to_f64(&face.plane_coordinate());
                    let v = facet_integral(&gl, field, face.axis, plane, &bounds);
                    total += if face.positive { v } else { -v };
                }
                Ok(total)
            }
            Charge::Density { field, order } => {
                let gl = GaussLegendre::new(*order)?;
                Ok(e.cubes().iter().map(|c| gl.integrate_box(&cube_bounds_f64(c), &mut |x| field.eval(x))).sum())
            }
            Charge::Function1D(_) => self.eval_line(&BVSet1D::from_figure(e)?),
            Charge::Hausdorff(flat) => Ok(rational::to_f64(&flat.measure_in_figure(e)?)),
            Charge::Restricted(c, a) => c.eval_figure(&e.intersection(a)?),
            Charge::Combination(parts) => parts.iter().map(|(k, c)| Ok(k * c.eval_figure(e)?)).sum(),
        }
    }

    pub fn eval_line(&self, e: &BVSet1D) -> Result<f64> {
        self.check(1)?;
        let ends = || e.intervals().iter().map(|(a, b)| (rational::to_f64(a), rational::to_f64(b)));
        match self {
            Charge::Flux { field, order } => {
                GaussLegendre::new(*order)?;
                Ok(ends().map(|(a, b)| field.component(0, &[b]) - field.component(0, &[a])).sum())
            }
            Charge::Density { field, order } => {
                let gl = GaussLegendre::new(*order)?;
                Ok(ends().map(|(a, b)| gl.integrate(a, b, |x| field.eval(&[x]))).sum())
            }
            Charge::Function1D(f) => Ok(ends().map(|(a, b)| f.eval(b) - f.eval(a)).sum()),
            Charge::Hausdorff(flat) => Ok(if e.contains_point(&flat.offset) { 1.0 } else { 0.0 }),
            Charge::Restricted(c, a) => c.eval_line(&e.intersection(&BVSet1D::from_figure(a)?)),
            Charge::Combination(parts) => parts.iter().map(|(k, c)| Ok(k * c.eval_line(e)?)).sum(),
        }
    }

    pub fn eval_box(&self, q: &Interval) -> Result<f64> {
        self.check(q.dim())?;
        let bounds = q.bounds_f64();
        match self {
            Charge::Flux { field, order } => {
                let gl = GaussLegendre::new(*order)?;
                let mut total = 0.0;
                for (axis, &(lo, hi)) in bounds.iter().enumerate() {
                    total += facet_integral(&gl, field, axis, hi, &bounds);
                    total -= facet_integral(&gl, field, axis, lo, &bounds);
                }
                Ok(total)
            }
            Charge::Density { field, order } => {
                let gl = GaussLegendre::new(*order)?;
                Ok(gl.integrate_box(&bounds, &mut |x| field.eval(x)))
            }
            Charge::Function1D(f) => Ok(f.eval(bounds[0].1) - f.eval(bounds[0].0)),
            Charge::Hausdorff(flat) => Ok(rational::to_f64(&flat.measure_in_box(q))),
            Charge::Restricted(c, a) => {
                if let Ok(fq) = q.to_figure() {
                    return c.eval_figure(&fq.intersection(a)?);
                }
                let mut total = 0.0;
                for cube in a.cubes() {
                    if let Some(piece) = cube.to_interval().intersect(q) {
                        total += c.eval_box(&piece)?;
                    }
                }
                Ok(total)
            }
            Charge::Combination(parts) => parts.iter().map(|(k, c)| Ok(k * c.eval_box(q)?)).sum(),
        }
    }
}

fn cube_bounds_f64(c: &DyadicCube) -> Vec<(f64, f64)> {
    let s = c.side_f64();
    (0..c.dim()).map(|i| (c.lower_f64(i), c.lower_f64(i) + s)).collect()
}

/// `∫ u_axis` over the facet `{x_axis = plane}` of a box.
fn facet_integral(gl: &GaussLegendre, field: &VectorField, axis: usize, plane: f64, bounds: &[(f64, f64)]) -> f64 {
    let others: Vec<(f64, f64)> = bounds.iter().enumerate().filter(|&(j, _)| j != axis).map(|(_, &b)| b).collect();
    let mut full = vec![0.0; bounds.len()];
    gl.integrate_box(&others, &mut |y| {
        let mut k = 0;
        for (j, slot) in full.iter_mut().enumerate() {
            if j == axis {
                *slot = plane;
            } else {
                *slot = y[k];
                k += 1;
            }
        }
        field.component(axis, &full)
    })
}

/// Exact flux of a polynomial field through the boundary of a figure.
pub fn exact_flux(u: &PolyField, e: &Figure) -> Rational {
    let mut total = Rational::zero();
    for face in e.boundary_faces() {
        let v = u.components()[face.axis].integrate_facet(face.axis, &face.plane_coordinate(), &face.cube.bounds());
        if face.positive {
            total += v;
        } else {
            total -= v;
        }
    }
    total
}

/// Exact integral of a polynomial over a figure.
pub fn exact_density(p: &Polynomial, e: &Figure) -> Rational {
    e.cubes().iter().map(|c| p.integrate_box(&c.bounds())).fold(Rational::zero(), |a, b| a + b)
}

impl BVSet1D {
    /// The 1D figure as a union of intervals.
    pub fn from_figure(f: &Figure) -> Result<BVSet1D> {
        if f.dim() != 1 {
            return Err(Error::DimensionMismatch { expected: 1, found: f.dim() });
        }
        BVSet1D::new(f.cubes().iter().map(|c| (c.lower(0), c.upper(0))).collect())
    }
}
