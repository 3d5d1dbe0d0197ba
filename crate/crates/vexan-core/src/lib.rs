//! Numerical realization of variable-exponent Lebesgue space analysis on
//! finite grids.
//!
//! Everything here operates on cell-centered samples of functions over a box
//! `[-L, L]^n` (`n` is 1 or 2), extended by zero outside the box. The crate
//! provides:
//!
//! - [`exponent`]: closed-form variable exponents `p(·)` with bounds,
//!   conjugation, and log-Hölder diagnostics;
//! - [`discretize`]: grids, sampled functions, cube families, and midpoint
//!   quadrature;
//! - [`norms`]: modulars, Luxemburg norms (plain and weighted), Orlicz cube
//!   averages, and weak Lebesgue norms;
//! - [`maximal`]: Hardy-Littlewood, sharp, and multilinear maximal operators;
//! - [`operators`]: multilinear kernels with certified size/smoothness
//!   constants, quadrature application, and fractional integrals;
//! - [`commutators`]: commutators of kernels with symbol functions and
//!   Lipschitz-type oscillation norms;
//! - [`harness`]: seeded experiments that measure inequality constants and
//!   check them against asserted bounds or refinement-stability criteria.
//!
//! The crate is `no_std`-compatible (`alloc` required); enable the `libm`
//! feature when building without `std`.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

#[cfg(all(not(feature = "std"), not(feature = "libm")))]
compile_error!("vexan-core requires either the `std` or the `libm` feature");

pub mod commutators;
pub mod discretize;
mod error;
pub mod exponent;
pub mod harness;
pub mod maximal;
mod math;
pub mod norms;
pub mod operators;
mod rng;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = core::result::Result<T, Error>;
