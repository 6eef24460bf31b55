//! Spectral phase-space toolkit for kinetic velocity averaging estimates.
//!
//! Densities `f(x, v)` live on a periodic box `[-L_x, L_x)^n × [-L_v, L_v)^n`
//! sampled at cell centres. The Fourier convention is
//! `f̂(ξ, η) = ∬ f e^{-i(ξ·x + η·v)} dx dv` with a `(2π)^{-2n}` weight on the
//! inverse, so identities can be checked with their continuum constants.
//!
//! Layout:
//! - [`spectral_core`]: grids, transforms, multipliers, transport, averages.
//! - [`symbols`]: multiplier families, cutoffs, symbol criteria, regularity formulas.
//! - [`norms`]: mixed Lebesgue, Sobolev, Lorentz norms and the Bessel kernel.
//! - [`transport_dispersion`]: free streaming, parametrix, decay and Strichartz ratios.
//! - [`harness`]: test families, identity checks, theorem ratios, sweeps.

pub mod error;
pub mod harness;
pub mod norms;
pub mod quadrature;
pub mod spectral_core;
pub mod symbols;
pub mod tolerances;
pub mod transport_dispersion;

pub use error::{Error, Result};
pub use num_complex::Complex64;
