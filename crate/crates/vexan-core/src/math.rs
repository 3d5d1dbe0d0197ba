//! Float helpers that work in both `std` and `no_std` builds.
//!
//! `num_traits::Float` dispatches to the inherent methods under `std` and to
//! `libm` otherwise, so routing every transcendental call through this module
//! keeps the rest of the crate oblivious to the build mode.

use num_traits::Float;

#[inline]
pub(crate) fn abs(x: f64) -> f64 {
    Float::abs(x)
}

#[inline]
pub(crate) fn sqrt(x: f64) -> f64 {
    Float::sqrt(x)
}

#[inline]
pub(crate) fn ln(x: f64) -> f64 {
    Float::ln(x)
}

#[inline]
pub(crate) fn exp(x: f64) -> f64 {
    Float::exp(x)
}

#[inline]
pub(crate) fn powf(x: f64, y: f64) -> f64 {
    Float::powf(x, y)
}

#[inline]
pub(crate) fn powi(x: f64, n: i32) -> f64 {
    Float::powi(x, n)
}

#[inline]
pub(crate) fn floor(x: f64) -> f64 {
    Float::floor(x)
}

#[inline]
pub(crate) fn ceil(x: f64) -> f64 {
    Float::ceil(x)
}

#[inline]
pub(crate) fn round(x: f64) -> f64 {
    Float::round(x)
}

#[inline]
pub(crate) fn hypot(x: f64, y: f64) -> f64 {
    Float::hypot(x, y)
}

pub(crate) const E: f64 = core::f64::consts::E;
