//! Charges: additive set functions evaluated on figures, boxes and 1D sets.

mod charge;
mod derivative;
mod descriptor;
mod falsifier;
mod field;
mod polynomial;
mod quadrature;

pub use charge::{cantor, exact_density, exact_flux, Charge, Flat, Function1D, DEFAULT_ORDER};
pub use descriptor::{ChargeSpec, ChargeTerm, FieldSpec, ScalarSpec};
pub use derivative::{charge_derivative_estimate, DerivativeEstimate};
pub use falsifier::{
    charge_axiom_falsifier, charge_axiom_falsifier_with, sample_sequence, Construction, FalsifierConfig,
    FalsifierVerdict, SampledSequence,
};
pub use field::{singular_profile, singular_profile_derivative, ScalarField, ScalarFn, VectorField, VectorFn};
pub use polynomial::{Monomial, PolyField, PolySpec, Polynomial, TermSpec};
pub use quadrature::GaussLegendre;
