//! Grids, transforms in the continuum convention, multipliers, the transport
//! operator and velocity averages.
//!
//! Frequencies on an axis of half-width `L` live on `(π/L)ℤ`. Symbols are
//! evaluated at every lattice point; at the unpaired Nyquist mode the value is
//! the mean over the two aliases `±ξ_N`, which gives `sign = 0` there.

mod fft;
mod field;
mod grid;
pub mod io;

pub use field::{
    apply_multiplier, apply_transport, average_spectrum_trace, forward_transform, inverse_transform, multiply,
    velocity_average, x_derivative, Field, SpatialField, SpectralField, Symbol,
};
pub(crate) use fft::for_each_mode;
pub use grid::{make_grid, Axis, PhaseGrid, Radix};
