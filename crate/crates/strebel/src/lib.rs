//! Exact and asymptotic invariants of planar trivalent metric ribbon graphs
//! with uniform face perimeters.
//!
//! The crate computes, from one dimensionless coupling `m = mu L^2`:
//!
//! - exact moduli volumes of graphs with prescribed perimeters and their
//!   generating functions, over arbitrary-precision rationals;
//! - the spectral curve encoding those generating functions, its Laplace
//!   transform, and its critical blow-up onto the cusp curve
//!   `(xi^2 - 2, xi^3 - 3 xi)`;
//! - large-size asymptotics: volume growth, saddle-point regimes of the
//!   one-point function, and critical-exponent fits.
//!
//! Everything exact lives on `TruncatedSeries` over `Rational`; everything
//! floating-point is deterministic and documented with its tolerance.

pub mod amplitudes;
pub mod asymptotics;
pub mod bessel;
pub mod checks;
pub mod error;
pub mod intersections;
pub(crate) mod quad;
pub mod series;
pub mod spectral;
pub(crate) mod taylor;
pub mod ucurve;

pub use error::{Error, Result};
pub use series::{Rational, TruncatedSeries};
