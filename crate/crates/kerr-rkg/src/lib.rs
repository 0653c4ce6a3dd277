//! Numerical laboratory for the stability of the azimuthally separated
//! Klein-Gordon equation on a Kerr black-hole background.
//!
//! The crate is organized around five layers:
//!
//! * [`geometry`] — closed-form Boyer-Lindquist scalars, Killing-field
//!   norms, region predicates and the mass-bound formulas.
//! * [`pencil`] — finite-dimensional quadratic operator pencils
//!   `λ ↦ Ã − λB − λ²`, conserved quadratic forms and the two 2×2
//!   reference examples.
//! * [`discretization`] — weighted-symmetric finite-difference surrogates
//!   of the reduced wave operator on a truncated `(r, θ)` grid together
//!   with positivity / mass-bound eigenvalue checks.
//! * [`evolution`] — implicit-midpoint time integration with conserved
//!   quantity tracking, Gronwall certification and growth-rate fits.
//! * [`matio`] — the plain-text matrix format shared with the CLI.
//!
//! All floating point work is in binary64. Data-parallel sweeps use rayon
//! when the `parallel` feature (on by default) is enabled and fall back to
//! sequential loops otherwise.

pub mod banded;
pub mod discretization;
pub mod error;
pub mod evolution;
pub mod geometry;
pub mod lanczos;
pub mod legendre;
pub mod matio;
pub mod par;
pub mod pencil;

pub use error::Error;

/// Complex scalar used throughout.
pub type C64 = nalgebra::Complex<f64>;
