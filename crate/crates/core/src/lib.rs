//! Phase-modulated and time-warped Fourier transforms, the distribution `S(E)`, and
//! separable solutions of the Schrödinger equation for `H + g(t)`, `H·g(t)` and
//! `H·g₁(t) + g₂(t)`, with the numerical oracles used to check them.
//!
//! Units: `ħ = 1`.

pub mod diff;
pub mod distributions;
pub mod error;
pub mod fourier;
pub mod grid;
pub mod interp;
pub mod quad;
pub mod schrodinger;
pub mod signal;
pub mod transforms;
pub mod warp;
pub mod cli;

pub use error::{Error, Result};
pub use grid::{SpaceGrid, SpectrumGrid, TimeGrid};
pub use signal::{SampledSignal, SpectrumSamples};
pub use warp::WarpSpec;
