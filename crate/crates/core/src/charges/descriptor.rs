use serde::{Deserialize, Serialize};

use crate::charges::charge::DEFAULT_ORDER;
use crate::charges::field::singular_profile_derivative;
use crate::charges::polynomial::{Monomial, PolyField, PolySpec, Polynomial};
use crate::charges::{Charge, Flat, Function1D, ScalarField, VectorField};
use crate::error::{Error, Result};
use crate::geometry::Figure;

fn default_order() -> usize {
    DEFAULT_ORDER
}

/// JSON form of a [`ScalarField`].
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ScalarSpec {
    Constant { value: f64 },
    /// Terms of a single polynomial; `component` entries are ignored.
    Polynomial(PolySpec),
    HalfSpace { axis: usize, offset: f64 },
    /// Closed-form divergence of a vector field.
    Divergence { field: FieldSpec },
    /// `singular-derivative`: derivative of `t^2 sin(1/t^2)` (0 at 0);
    /// `half-inverse-sqrt`: `1 / (2 sqrt t)` for `t > 0`, else 0.
    Catalog { name: String },
}

impl ScalarSpec {
    pub fn build(&self) -> Result<ScalarField> {
        Ok(match self {
            ScalarSpec::Constant { value } => ScalarField::Constant(*value),
            ScalarSpec::Polynomial(p) => {
                let n = match p.dim {
                    Some(n) => n,
                    None => p.terms.first().map(|t| t.powers.len()).ok_or_else(|| Error::Input("empty polynomial needs `dim`".into()))?,
                };
                let terms = p.terms.iter().map(|t| Monomial { coef: t.coef.clone(), powers: t.powers.clone() }).collect();
                ScalarField::Polynomial(Polynomial::new(n, terms)?)
            }
            ScalarSpec::HalfSpace { axis, offset } => ScalarField::HalfSpace { axis: *axis, offset: *offset },
            ScalarSpec::Divergence { field } => field
                .build()?
                .divergence()
                .ok_or_else(|| Error::Input("field has no closed-form divergence".into()))?,
            ScalarSpec::Catalog { name } => match name.as_str() {
                "singular-derivative" => ScalarField::custom(name, |x| singular_profile_derivative(x[0])),
                "half-inverse-sqrt" => ScalarField::custom(name, |x| if x[0] > 0.0 { 0.5 / x[0].sqrt() } else { 0.0 }),
                other => return Err(Error::Input(format!("unknown scalar field `{other}`"))),
            },
        })
    }
}

/// JSON form of a [`VectorField`].
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum FieldSpec {
    /// See [`VectorField::catalog`].
    Catalog { name: String, dim: usize },
    Polynomial(PolySpec),
    Constant { value: Vec<f64> },
}

impl FieldSpec {
    pub fn build(&self) -> Result<VectorField> {
        match self {
            FieldSpec::Catalog { name, dim } => VectorField::catalog(name, *dim),
            FieldSpec::Polynomial(p) => Ok(VectorField::Polynomial(PolyField::from_spec(p)?)),
            FieldSpec::Constant { value } => VectorField::constant(value),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ChargeTerm {
    pub coef: f64,
    pub charge: ChargeSpec,
}

/// JSON form of a [`Charge`].
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ChargeSpec {
    Zero,
    Lebesgue,
    Density {
        field: ScalarSpec,
        #[serde(default = "default_order")]
        order: usize,
    },
    Flux {
        field: FieldSpec,
        #[serde(default = "default_order")]
        order: usize,
    },
    /// See [`Function1D::catalog`].
    Function1d { name: String },
    Hausdorff { flat: Flat },
    Restricted { charge: Box<ChargeSpec>, figure: Figure },
    Combination { parts: Vec<ChargeTerm> },
}

impl ChargeSpec {
    pub fn build(&self) -> Result<Charge> {
        Ok(match self {
            ChargeSpec::Zero => Charge::zero(),
            ChargeSpec::Lebesgue => Charge::lebesgue(),
            ChargeSpec::Density { field, order } => Charge::Density { field: field.build()?, order: *order },
            ChargeSpec::Flux { field, order } => Charge::Flux { field: field.build()?, order: *order },
            ChargeSpec::Function1d { name } => Charge::function_1d(Function1D::catalog(name)?),
            ChargeSpec::Hausdorff { flat } => Charge::Hausdorff(flat.clone()),
            ChargeSpec::Restricted { charge, figure } => charge.build()?.restrict(figure),
            ChargeSpec::Combination { parts } => {
                Charge::Combination(parts.iter().map(|p| Ok((p.coef, p.charge.build()?))).collect::<Result<_>>()?)
            }
        })
    }
}
