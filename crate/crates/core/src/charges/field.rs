use std::fmt;
use std::sync::Arc;

use crate::charges::polynomial::{PolyField, Polynomial};
use crate::error::{Error, Result};
use crate::rational;

pub type VectorFn = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;
pub type ScalarFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// `t^2 sin(1/t^2)`, extended by 0 at the origin.
pub fn singular_profile(t: f64) -> f64 {
    if t == 0.0 {
        0.0
    } else {
        t * t * (1.0 / (t * t)).sin()
    }
}

/// Derivative of [`singular_profile`]; unbounded near 0 but defined everywhere.
pub fn singular_profile_derivative(t: f64) -> f64 {
    if t == 0.0 {
        0.0
    } else {
        let s = 1.0 / (t * t);
        2.0 * t * s.sin() - 2.0 / t * s.cos()
    }
}

#[derive(Clone)]
pub enum VectorField {
    Polynomial(PolyField),
    /// `u_i(x) = g(x_i)` with `g` the singular profile.
    SingularSin { dim: usize },
    Custom { dim: usize, name: String, eval: VectorFn, divergence: Option<ScalarFn> },
}

impl fmt::Debug for VectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VectorField::Polynomial(p) => f.debug_tuple("Polynomial").field(p).finish(),
            VectorField::SingularSin { dim } => f.debug_struct("SingularSin").field("dim", dim).finish(),
            VectorField::Custom { dim, name, .. } => {
                f.debug_struct("Custom").field("dim", dim).field("name", name).finish_non_exhaustive()
            }
        }
    }
}

impl VectorField {
    /// Named fields: `linear`, `quadratic`, `rotational`, `singular-sin`.
    pub fn catalog(name: &str, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Input("field dimension must be at least 1".into()));
        }
        let one = rational::int(1);
        let comps = |power: u32| (0..dim).map(|i| Polynomial::monomial(dim, i, power, one.clone())).collect();
        Ok(match name {
            "linear" => VectorField::Polynomial(PolyField::new(comps(1))?),
            "quadratic" => VectorField::Polynomial(PolyField::new(comps(2))?),
            "rotational" => {
                if dim < 2 {
                    return Err(Error::Input("rotational field needs dimension >= 2".into()));
                }
                let mut c: Vec<Polynomial> = (0..dim).map(|_| Polynomial::zero(dim)).collect();
                c[0] = Polynomial::monomial(dim, 1, 1, rational::int(-1));
                c[1] = Polynomial::monomial(dim, 0, 1, one);
                VectorField::Polynomial(PolyField::new(c)?)
            }
            "singular-sin" => VectorField::SingularSin { dim },
            other => return Err(Error::Input(format!("unknown field `{other}`"))),
        })
    }

    pub fn constant(v: &[f64]) -> Result<Self> {
        let dim = v.len();
        let comps = v
            .iter()
            .map(|&c| Ok(Polynomial::constant(dim, rational::from_f64(c)?)))
            .collect::<Result<Vec<_>>>()?;
        Ok(VectorField::Polynomial(PolyField::new(comps)?))
    }

    pub fn dim(&self) -> usize {
        match self {
            VectorField::Polynomial(p) => p.dim(),
            VectorField::SingularSin { dim } | VectorField::Custom { dim, .. } => *dim,
        }
    }

    pub fn eval(&self, x: &[f64]) -> Vec<f64> {
        match self {
            VectorField::Polynomial(p) => p.eval(x),
            VectorField::SingularSin { .. } => x.iter().map(|&t| singular_profile(t)).collect(),
            VectorField::Custom { eval, .. } => eval(x),
        }
    }

    pub fn component(&self, axis: usize, x: &[f64]) -> f64 {
        match self {
            VectorField::Polynomial(p) => p.components()[axis].eval(x),
            VectorField::SingularSin { .. } => singular_profile(x[axis]),
            VectorField::Custom { eval, .. } => eval(x)[axis],
        }
    }

    /// Closed-form divergence when one is known.
    pub fn divergence(&self) -> Option<ScalarField> {
        match self {
            VectorField::Polynomial(p) => Some(ScalarField::Polynomial(p.divergence())),
            VectorField::SingularSin { dim } => Some(ScalarField::SingularSinDivergence { dim: *dim }),
            VectorField::Custom { divergence, name, .. } => {
                divergence.as_ref().map(|d| ScalarField::Custom { name: format!("div {name}"), eval: d.clone() })
            }
        }
    }

    /// Divergence by central differences with step `h`.
    pub fn numeric_divergence(&self, h: f64) -> ScalarField {
        let u = self.clone();
        ScalarField::Custom {
            name: "central-difference divergence".into(),
            eval: Arc::new(move |x: &[f64]| {
                let mut y = x.to_vec();
                let mut s = 0.0;
                for i in 0..x.len() {
                    y[i] = x[i] + h;
                    let up = u.component(i, &y);
                    y[i] = x[i] - h;
                    let dn = u.component(i, &y);
                    y[i] = x[i];
                    s += (up - dn) / (2.0 * h);
                }
                s
            }),
        }
    }

    pub fn as_polynomial(&self) -> Option<&PolyField> {
        match self {
            VectorField::Polynomial(p) => Some(p),
            _ => None,
        }
    }
}

#[derive(Clone)]
pub enum ScalarField {
    Constant(f64),
    Polynomial(Polynomial),
    /// Indicator of `{x_axis >= offset}`.
    HalfSpace { axis: usize, offset: f64 },
    SingularSinDivergence { dim: usize },
    Custom { name: String, eval: ScalarFn },
}

impl fmt::Debug for ScalarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScalarField::Constant(c) => f.debug_tuple("Constant").field(c).finish(),
            ScalarField::Polynomial(p) => f.debug_tuple("Polynomial").field(p).finish(),
            ScalarField::HalfSpace { axis, offset } => {
                f.debug_struct("HalfSpace").field("axis", axis).field("offset", offset).finish()
            }
            ScalarField::SingularSinDivergence { dim } => {
                f.debug_struct("SingularSinDivergence").field("dim", dim).finish()
            }
            ScalarField::Custom { name, .. } => f.debug_struct("Custom").field("name", name).finish_non_exhaustive(),
        }
    }
}

impl ScalarField {
    pub fn custom(name: &str, f: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> Self {
        ScalarField::Custom { name: name.into(), eval: Arc::new(f) }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            ScalarField::Constant(c) => *c,
            ScalarField::Polynomial(p) => p.eval(x),
            ScalarField::HalfSpace { axis, offset } => {
                if x[*axis] >= *offset {
                    1.0
                } else {
                    0.0
                }
            }
            ScalarField::SingularSinDivergence { .. } => x.iter().map(|&t| singular_profile_derivative(t)).sum(),
            ScalarField::Custom { eval, .. } => eval(x),
        }
    }

    /// A bound on `|f|` when one is evident from the descriptor.
    pub fn bound(&self) -> Option<f64> {
        match self {
            ScalarField::Constant(c) => Some(c.abs()),
            ScalarField::HalfSpace { .. } => Some(1.0),
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn profile_derivative_matches_difference_quotient() {
        for &t in &[0.3, 0.7, -0.45, 1.2] {
            let h = 1e-6;
            let fd = (singular_profile(t + h) - singular_profile(t - h)) / (2.0 * h);
            assert!((fd - singular_profile_derivative(t)).abs() < 1e-4 * (1.0 + fd.abs()), "t = {t}");
        }
        assert_eq!(singular_profile(0.0), 0.0);
        assert_eq!(singular_profile_derivative(0.0), 0.0);
    }

    #[test]
    fn catalog_divergences() {
        let u = VectorField::catalog("linear", 3).unwrap();
        assert_eq!(u.divergence().unwrap().eval(&[0.1, 0.2, 0.3]), 3.0);
        let r = VectorField::catalog("rotational", 2).unwrap();
        assert_eq!(r.divergence().unwrap().eval(&[0.4, 0.9]), 0.0);
        assert_eq!(r.eval(&[1.0, 2.0]), vec![-2.0, 1.0]);
        assert!(VectorField::catalog("rotational", 1).is_err());
        assert!(VectorField::catalog("nope", 2).is_err());
    }

    #[test]
    fn numeric_divergence_close_to_symbolic() {
        let u = VectorField::catalog("quadratic", 2).unwrap();
        let d = u.numeric_divergence(1e-4);
        assert!((d.eval(&[0.3, 0.5]) - 1.6).abs() < 1e-8);
    }
}
