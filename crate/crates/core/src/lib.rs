//! Tempered fractional calculus for drifted Brownian motion.
//!
//! - [`operators`]: tempered Marchaud, Weyl and Riesz derivatives by
//!   quadrature; Caputo, Riemann-Liouville and tempered Riemann-Liouville
//!   derivatives of order 1/2 on time grids.
//! - [`spectral`]: Laplace symbol, tempered Riesz Fourier multiplier, FFT
//!   application and the exact tempered Riesz diffusion.
//! - [`processes`]: densities of drifted and folded drifted Brownian motion,
//!   the sign weight `a(x, y)`, and `E_{1/2}`.
//! - [`montecarlo`]: subordinator and endpoint samplers with estimators.
//! - [`verify`]: residuals of the fractional equations solved by those
//!   densities.
//! - [`cli`]: the `tempered` command-line front end.

pub mod cli;
pub mod error;
pub mod grid;
pub mod montecarlo;
pub mod operators;
pub mod params;
pub mod processes;
pub mod quad;
pub mod spectral;
pub mod verify;

pub use error::{Error, Result};
pub use grid::{make_grid, sample_on_grid, Grid1D, SampledField};
pub use params::{DriftSpec, QuadConfig, TailModel, TemperParams};
