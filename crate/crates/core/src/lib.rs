//! Exact dyadic geometry, charges, gauges and falsification harnesses for
//! gauge-type integrals on sets of finite perimeter.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod charges;
pub mod error;
pub mod gauges;
pub mod harness;
pub mod partition;
pub mod geometry;
pub mod rational;

pub use error::{Error, Result};
