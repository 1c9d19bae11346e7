//! Numerical toolkit for the deep upper tail of the KPZ equation in the
//! weak-noise regime.
//!
//! The crate is organised bottom-up:
//!
//! * [`grid`]: grids, potentials, space-time fields, norms, the heat kernel.
//! * [`solver`]: Crank–Nicolson and kernel-series solvers for
//!   `dZ/dt = Z_xx / 2 + rho Z`, propagators, adjoints and gradients.
//! * [`spectral`]: the ground-state functional `F` and the sharp
//!   Gagliardo–Nirenberg bound.
//! * [`rearrange`]: symmetric decreasing rearrangement and the inequalities
//!   built on it.
//! * [`variational`]: the constrained rate-function optimizer.
//! * [`bridge`]: Brownian-bridge Monte Carlo, hitting times, Laplace
//!   asymptotics and the limit shape.
//! * [`cli`] and [`acceptance`]: experiment orchestration.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod acceptance;
pub mod bridge;
pub mod cli;
pub mod error;
pub mod grid;
pub mod io;
pub mod quad;
pub mod rearrange;
pub mod solver;
pub mod spectral;
mod tridiag;
pub mod variational;

pub use error::{Error, Result};
pub use grid::{heat_kernel, Field, Potential, SpaceGrid, SpaceTimeDeviation, TimeGrid};
