//! Excised orthogonal ensemble toolkit.
//!
//! Haar sampling of `SO(2N)` with a lower cutoff on `|Λ_A(1)|`, closed-form
//! and contour-integral one-level densities for the conditioned ensemble,
//! and the cutoff calibration used to model low-lying zeros of quadratic
//! twists of an elliptic curve.
//!
//! The polynomial layer of [`specfun`] is generic over [`Scalar`], so the
//! same code runs on `f64`, complex numbers and exact rationals. Everything
//! that needs transcendental functions works in `f64` / [`Complex`].

pub mod analytic;
pub mod curve_model;
pub mod ensemble;
mod error;
pub mod haar;
pub mod quad;
mod scalar;
pub mod specfun;

pub use error::{Error, Result};
pub use scalar::Scalar;

/// Default real scalar.
pub type Real = f64;
/// Default complex scalar.
pub type Complex = num_complex::Complex64;
/// Exact rational scalar, used for exact checks of the polynomial layer.
pub type Rational = num_rational::BigRational;

/// Version string embedded in written artifacts.
pub const ARTIFACT_VERSION: &str = concat!("excised/", env!("CARGO_PKG_VERSION"));
