use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{self, Rational};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Monomial {
    pub coef: Rational,
    pub powers: Vec<u32>,
}

/// Polynomial in `n` variables with exact coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Polynomial {
    dim: usize,
    terms: Vec<Monomial>,
}

fn pow_r(x: &Rational, p: u32) -> Rational {
    let mut r = Rational::one();
    for _ in 0..p {
        r *= x;
    }
    r
}

impl Polynomial {
    pub fn new(dim: usize, terms: Vec<Monomial>) -> Result<Self> {
        for t in &terms {
            if t.powers.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: t.powers.len() });
            }
        }
        let mut p = Self { dim, terms };
        p.simplify();
        Ok(p)
    }

    pub fn zero(dim: usize) -> Self {
        Self { dim, terms: Vec::new() }
    }

    pub fn constant(dim: usize, c: Rational) -> Self {
        let mut p = Self { dim, terms: vec![Monomial { coef: c, powers: vec![0; dim] }] };
        p.simplify();
        p
    }

    /// `c * x_axis^power`.
    pub fn monomial(dim: usize, axis: usize, power: u32, c: Rational) -> Self {
        let mut powers = vec![0; dim];
        powers[axis] = power;
        let mut p = Self { dim, terms: vec![Monomial { coef: c, powers }] };
        p.simplify();
        p
    }

    fn simplify(&mut self) {
        self.terms.sort_by(|a, b| a.powers.cmp(&b.powers));
        let mut out: Vec<Monomial> = Vec::with_capacity(self.terms.len());
        for t in self.terms.drain(..) {
            match out.last_mut() {
                Some(last) if last.powers == t.powers => last.coef += t.coef,
                _ => out.push(t),
            }
        }
        out.retain(|t| !t.coef.is_zero());
        self.terms = out;
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> &[Monomial] {
        &self.terms
    }

    pub fn degree(&self) -> u32 {
        self.terms.iter().map(|t| t.powers.iter().sum()).max().unwrap_or(0)
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        let mut p = Polynomial { dim: self.dim, terms };
        p.simplify();
        p
    }

    pub fn scale(&self, c: &Rational) -> Polynomial {
        let mut p = Polynomial {
            dim: self.dim,
            terms: self.terms.iter().map(|t| Monomial { coef: &t.coef * c, powers: t.powers.clone() }).collect(),
        };
        p.simplify();
        p
    }

    pub fn derivative(&self, axis: usize) -> Polynomial {
        let terms = self
            .terms
            .iter()
            .filter(|t| t.powers[axis] > 0)
            .map(|t| {
                let mut powers = t.powers.clone();
                powers[axis] -= 1;
                Monomial { coef: &t.coef * rational::int(t.powers[axis] as i64), powers }
            })
            .collect();
        let mut p = Polynomial { dim: self.dim, terms };
        p.simplify();
        p
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|t| {
                rational::to_f64(&t.coef) * t.powers.iter().zip(x).map(|(&p, &v)| v.powi(p as i32)).product::<f64>()
            })
            .sum()
    }

    pub fn eval_exact(&self, x: &[Rational]) -> Rational {
        self.terms
            .iter()
            .map(|t| t.powers.iter().zip(x).fold(t.coef.clone(), |acc, (&p, v)| acc * pow_r(v, p)))
            .fold(Rational::zero(), |a, b| a + b)
    }

    /// `∫_box p`, exact.
    pub fn integrate_box(&self, bounds: &[(Rational, Rational)]) -> Rational {
        self.terms
            .iter()
            .map(|t| {
                t.powers.iter().zip(bounds).fold(t.coef.clone(), |acc, (&p, (a, b))| {
                    acc * (pow_r(b, p + 1) - pow_r(a, p + 1)) / rational::int(p as i64 + 1)
                })
            })
            .fold(Rational::zero(), |a, b| a + b)
    }

    /// Integral over the facet `{x_axis = plane} × prod_{j != axis} bounds_j`,
    /// exact. `bounds[axis]` is ignored.
    pub fn integrate_facet(&self, axis: usize, plane: &Rational, bounds: &[(Rational, Rational)]) -> Rational {
        self.terms
            .iter()
            .map(|t| {
                t.powers.iter().zip(bounds).enumerate().fold(t.coef.clone(), |acc, (j, (&p, (a, b)))| {
                    if j == axis {
                        acc * pow_r(plane, p)
                    } else {
                        acc * (pow_r(b, p + 1) - pow_r(a, p + 1)) / rational::int(p as i64 + 1)
                    }
                })
            })
            .fold(Rational::zero(), |a, b| a + b)
    }
}

/// A vector field with polynomial components.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyField {
    components: Vec<Polynomial>,
}

/// One entry of the `{"terms": [...]}` coefficient table.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TermSpec {
    #[serde(with = "rational::serde_rational")]
    pub coef: Rational,
    pub powers: Vec<u32>,
    #[serde(default)]
    pub component: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PolySpec {
    pub terms: Vec<TermSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
}

impl PolyField {
    pub fn new(components: Vec<Polynomial>) -> Result<Self> {
        let n = components.len();
        if n == 0 {
            return Err(Error::Input("field needs at least one component".into()));
        }
        if let Some(c) = components.iter().find(|c| c.dim() != n) {
            return Err(Error::DimensionMismatch { expected: n, found: c.dim() });
        }
        Ok(Self { components })
    }

    pub fn from_spec(spec: &PolySpec) -> Result<Self> {
        let n = match spec.dim {
            Some(n) => n,
            None => spec.terms.first().map(|t| t.powers.len()).ok_or_else(|| Error::Input("empty term table needs `dim`".into()))?,
        };
        let mut comps = vec![Vec::new(); n];
        for t in &spec.terms {
            if t.component >= n {
                return Err(Error::Input(format!("component {} out of range for dimension {n}", t.component)));
            }
            comps[t.component].push(Monomial { coef: t.coef.clone(), powers: t.powers.clone() });
        }
        Self::new(comps.into_iter().map(|terms| Polynomial::new(n, terms)).collect::<Result<_>>()?)
    }

    pub fn to_spec(&self) -> PolySpec {
        let terms = self
            .components
            .iter()
            .enumerate()
            .flat_map(|(i, p)| {
                p.terms.iter().map(move |t| TermSpec { coef: t.coef.clone(), powers: t.powers.clone(), component: i })
            })
            .collect();
        PolySpec { terms, dim: Some(self.dim()) }
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[Polynomial] {
        &self.components
    }

    pub fn degree(&self) -> u32 {
        self.components.iter().map(Polynomial::degree).max().unwrap_or(0)
    }

    pub fn divergence(&self) -> Polynomial {
        self.components
            .iter()
            .enumerate()
            .fold(Polynomial::zero(self.dim()), |acc, (i, c)| acc.add(&c.derivative(i)))
    }

    pub fn eval(&self, x: &[f64]) -> Vec<f64> {
        self.components.iter().map(|c| c.eval(x)).collect()
    }
}
