//! Generalized Bergman spaces on the unit ball of ℂⁿ.
//!
//! The crate covers the eigenspaces `A_m^{2,ν}` of the magnetic Schrödinger
//! operator on the Bergman ball, the coherent states built from their
//! orthonormal bases, the associated Berezin transforms, and the spectral
//! symbol of those transforms as a function of the Laplace–Beltrami operator
//! (Wilson-polynomial closed form, the m = 0 gamma-ratio form, and a
//! quadrature oracle that both are checked against).
//!
//! Polynomial and terminating-series code is generic over [`Scalar`], so the
//! same routines run in `f64` and in exact rational arithmetic.

pub mod berezin;
pub mod eigenspace;
pub mod error;
pub mod geometry;
pub mod linalg;
pub mod orthopoly;
pub mod params;
pub mod scalar;
pub mod special;
pub mod spectral;
pub mod sphere;

pub use error::{Error, Result};
pub use params::SpaceParams;
pub use scalar::Scalar;

/// Exact rational field used by the exact-arithmetic paths.
pub type Exact = num_rational::BigRational;
/// Floating field used by the numerical paths.
pub type Real = f64;
pub type Complex = num_complex::Complex64;
