use serde::{Deserialize, Serialize};

use crate::charges::{exact_density, exact_flux, Charge, VectorField};
use crate::error::{Error, Result};
use crate::geometry::Figure;
use crate::rational;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "kebab-case")]
pub enum DivSource {
    Symbolic,
    /// Central differences with step `h`.
    Numeric { h: f64 },
}

/// Both sides in exact arithmetic, for polynomial fields.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExactSides {
    pub flux: String,
    pub volume: String,
    pub equal: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaussGreenReport {
    pub flux: f64,
    pub volume: f64,
    pub abs_error: f64,
    /// `abs_error / max(|flux|, |volume|)`, 0 when both vanish.
    pub rel_error: f64,
    pub order: usize,
    pub div_source: DivSource,
    pub exact: Option<ExactSides>,
}

/// Flux of `u` through `∂A` against the integral of `div u` over `A`, both
/// by tensor Gauss–Legendre of the given order.
pub fn gauss_green_verify(u: &VectorField, a: &Figure, src: DivSource, order: usize) -> Result<GaussGreenReport> {
    if order == 0 {
        return Err(Error::QuadratureOrder(0));
    }
    if u.dim() != a.dim() {
        return Err(Error::DimensionMismatch { expected: a.dim(), found: u.dim() });
    }
    let div = match src {
        DivSource::Symbolic => {
            u.divergence().ok_or_else(|| Error::Input("field has no symbolic divergence; use a numeric source".into()))?
        }
        DivSource::Numeric { h } if h > 0.0 && h.is_finite() => u.numeric_divergence(h),
        DivSource::Numeric { h } => return Err(Error::Input(format!("difference step must be positive, got {h}"))),
    };
    let flux = Charge::Flux { field: u.clone(), order }.eval_figure(a)?;
    let volume = Charge::Density { field: div, order }.eval_figure(a)?;
    let abs_error = (flux - volume).abs();
    let scale = flux.abs().max(volume.abs());
    let exact = u.as_polynomial().map(|p| {
        let (f, v) = (exact_flux(p, a), exact_density(&p.divergence(), a));
        ExactSides { equal: f == v, flux: rational::format(&f), volume: rational::format(&v) }
    });
    Ok(GaussGreenReport {
        flux,
        volume,
        abs_error,
        rel_error: if scale > 0.0 { abs_error / scale } else { 0.0 },
        order,
        div_source: src,
        exact,
    })
}
