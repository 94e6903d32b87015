//! Spectral distributions of bilateral tridiagonal operators
//! `T e_n = e_{n-1} + d_n e_n + e_{n+1}` with almost-periodic diagonal,
//! estimated from the eigenvalues of their finite compressions.
//!
//! - [`potentials`]: diagonal sequences `d_n`, von Neumann means, periodicity tests.
//! - [`tridiag`]: unilateral/bilateral compressions, Sturm counts, bisection,
//!   filtration-degree windows.
//! - [`specmeasure`]: empirical spectral measures, CDF schedules, trace
//!   moments, spectrum/gap classification, cross-checks.
//! - [`cli`]: config parsing and the `jacobi-spectra` command pipelines.

pub mod cli;
pub mod error;
pub mod numeric;
pub mod potentials;
pub mod specmeasure;
pub mod tridiag;

pub use error::{Error, Result};
