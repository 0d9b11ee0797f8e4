//! Holomorphic functional calculus for n-Ritt and n-sectorial operators on
//! finite-dimensional spaces.
//!
//! Operators are dense complex matrices acting on `C^d` with a p-norm
//! (`p ∈ {1, 2, ∞}`). Functions of operators are evaluated by Cauchy-type
//! contour integrals of the resolvent over the boundaries of n-Stolz domains
//! (`apply_ritt`) and n-sectors (`apply_sectorial`), with composite
//! Gauss-Legendre quadrature and dyadic panel refinement.
//!
//! Module map:
//!
//! * [`regions`]: sectors `S_{n,ω}`, Stolz domains `B_{n,γ}`, membership and
//!   boundary distance.
//! * [`contours`]: oriented boundary paths and path-integral quadrature.
//! * [`matrixkit`]: complex matrices, LU resolvents, operator norms.
//! * [`funclass`]: evaluable rational functions with decay certificates.
//! * [`calculus`]: classification, contour calculi, transference checks.
//! * [`stochastics`]: Rademacher norms, R-bounds, quadratic estimates.
//! * [`multipliers`]: diagonal Schauder multipliers and Carleson products.

pub mod calculus;
pub mod contours;
pub mod error;
pub mod funclass;
pub mod matrixkit;
pub mod multipliers;
pub mod poly;
pub mod quadrature;
pub mod regions;
pub mod stochastics;

pub use num_complex::Complex64;

pub use error::{Error, Result};

/// Crate version embedded in reports.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
