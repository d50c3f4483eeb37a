//! Classical and quantum fingerprinting strategies with one-sided error.
//!
//! Classical code is generic over [`Scalar`] and defaults to exact
//! [`Rational`] arithmetic; quantum code works in `f64` with explicit
//! tolerances.

pub mod bounds;
pub mod budget;
pub mod codes;
pub mod data;
pub mod error;
pub mod family;
pub mod io;
pub mod lp;
pub mod quantum;
pub mod scalar;
pub mod strategy;

pub use budget::Budget;
pub use error::{Error, Result};
pub use scalar::Scalar;
pub use strategy::{ClassicalStrategy, ErrorReport, SupportPair};

/// Exact rational used for every classical probability.
pub type Rational = num_rational::BigRational;

/// Exact classical strategy.
pub type Strategy = ClassicalStrategy<Rational>;
