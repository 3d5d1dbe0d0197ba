//! Closed-form variable exponents `p(·)` and their admissibility classes.
//!
//! Exponents are kept as closed forms rather than samples because the
//! log-Hölder diagnostics need evaluation at arbitrary pair distances and
//! `p_inf` comes from the analytic limit. Derived exponents (conjugates,
//! harmonic combinations, fractional shifts) wrap their parents so that
//! algebraic identities like conjugate involution hold exactly.

use alloc::boxed::Box;
use alloc::format;
use alloc::vec::Vec;

use crate::discretize::{point_norm, Point, UniformGrid};
use crate::math;
use crate::{Error, Result};

/// Closed-form exponent field on `R^n` (`n` = 1 or 2).
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum ExponentField {
    /// `p(x) = c`.
    Constant { value: f64, dim: usize },
    /// `p(x) = base + coeff / ln(e + |x|)`.
    LogPerturbed { base: f64, coeff: f64, dim: usize },
    /// Smooth compactly supported perturbation of a constant:
    /// `p(x) = base + height * exp(1 - 1/(1 - t^2))` for `t = |x - center|/radius < 1`.
    Bump {
        base: f64,
        height: f64,
        center: Point,
        radius: f64,
        dim: usize,
    },
    /// Logistic radial step: `inner` near the origin, `outer` far away,
    /// transition of width `width` at `|x| = radius`.
    RadialStep {
        inner: f64,
        outer: f64,
        radius: f64,
        width: f64,
        dim: usize,
    },
    /// `p(x) = base + slope · x`. Unbounded on `R^n`; only meaningful on the
    /// finite box, so conjugation and class checks reject it.
    Affine { base: f64, slope: Point, dim: usize },
    /// Pointwise conjugate `p(x)/(p(x)-1)` of the inner field.
    Conjugate(Box<ExponentField>),
    /// `1/p(x) = sum_j 1/p_j(x)`.
    Harmonic(Vec<ExponentField>),
    /// `1/q(x) = 1/p(x) - delta(x)/n`.
    DeltaShift {
        base: Box<ExponentField>,
        delta: Box<ExponentField>,
    },
    /// `offset + scale / inner(x)`; covers shift fields like
    /// `delta(x) = n/beta - n/r(x)`.
    AffineRecip {
        offset: f64,
        scale: f64,
        inner: Box<ExponentField>,
    },
}

/// Essential bounds of an exponent over a grid, plus conjugate bounds.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ExponentBounds {
    pub p_minus: f64,
    pub p_plus: f64,
    /// Analytic limit at infinity, when the closed form has one.
    pub p_inf: Option<f64>,
    /// `ess inf` of the conjugate exponent; `p_plus/(p_plus - 1)` when
    /// `p_minus > 1`, infinite otherwise.
    pub conj_minus: f64,
    /// `ess sup` of the conjugate exponent; `p_minus/(p_minus - 1)`.
    pub conj_plus: f64,
}

impl ExponentField {
    pub fn constant(value: f64, dim: usize) -> ExponentField {
        ExponentField::Constant { value, dim }
    }

    pub fn dim(&self) -> usize {
        match self {
            ExponentField::Constant { dim, .. }
            | ExponentField::LogPerturbed { dim, .. }
            | ExponentField::Bump { dim, .. }
            | ExponentField::RadialStep { dim, .. }
            | ExponentField::Affine { dim, .. } => *dim,
            ExponentField::Conjugate(inner) => inner.dim(),
            ExponentField::Harmonic(fields) => fields[0].dim(),
            ExponentField::DeltaShift { base, .. } => base.dim(),
            ExponentField::AffineRecip { inner, .. } => inner.dim(),
        }
    }

    /// Evaluate the closed form at a point.
    pub fn eval(&self, x: Point) -> f64 {
        match self {
            ExponentField::Constant { value, .. } => *value,
            ExponentField::LogPerturbed { base, coeff, dim } => {
                base + coeff / math::ln(math::E + point_norm(x, *dim))
            }
            ExponentField::Bump {
                base,
                height,
                center,
                radius,
                dim,
            } => {
                let t = crate::discretize::point_dist(x, *center, *dim) / radius;
                let t2 = t * t;
                if t2 < 1.0 {
                    base + height * math::exp(1.0 - 1.0 / (1.0 - t2))
                } else {
                    *base
                }
            }
            ExponentField::RadialStep {
                inner,
                outer,
                radius,
                width,
                dim,
            } => {
                let u = (radius - point_norm(x, *dim)) / width;
                let s = 1.0 / (1.0 + math::exp(-u));
                outer + (inner - outer) * s
            }
            ExponentField::Affine { base, slope, dim } => {
                let mut v = *base;
                for k in 0..*dim {
                    v += slope[k] * x[k];
                }
                v
            }
            ExponentField::Conjugate(inner) => {
                let p = inner.eval(x);
                p / (p - 1.0)
            }
            ExponentField::Harmonic(fields) => {
                let s: f64 = fields.iter().map(|f| 1.0 / f.eval(x)).sum();
                1.0 / s
            }
            ExponentField::DeltaShift { base, delta } => {
                let n = base.dim() as f64;
                1.0 / (1.0 / base.eval(x) - delta.eval(x) / n)
            }
            ExponentField::AffineRecip { offset, scale, inner } => offset + scale / inner.eval(x),
        }
    }

    /// Tight range of the field over all of `R^n`, when the closed form has
    /// one. Interval arithmetic is used for derived fields, so the result may
    /// be a superset for those.
    pub fn analytic_range(&self) -> Option<(f64, f64)> {
        match self {
            ExponentField::Constant { value, .. } => Some((*value, *value)),
            ExponentField::LogPerturbed { base, coeff, .. } => {
                Some((base.min(base + coeff), base.max(base + coeff)))
            }
            ExponentField::Bump { base, height, .. } => {
                Some((base.min(base + height), base.max(base + height)))
            }
            ExponentField::RadialStep { inner, outer, .. } => {
                Some((inner.min(*outer), inner.max(*outer)))
            }
            ExponentField::Affine { base, slope, dim } => {
                if (0..*dim).all(|k| slope[k] == 0.0) {
                    Some((*base, *base))
                } else {
                    None
                }
            }
            ExponentField::Conjugate(inner) => {
                let (lo, hi) = inner.analytic_range()?;
                if lo <= 1.0 {
                    None
                } else {
                    Some((hi / (hi - 1.0), lo / (lo - 1.0)))
                }
            }
            ExponentField::Harmonic(fields) => {
                let mut inv_lo = 0.0;
                let mut inv_hi = 0.0;
                for f in fields {
                    let (lo, hi) = f.analytic_range()?;
                    if lo <= 0.0 {
                        return None;
                    }
                    inv_lo += 1.0 / hi;
                    inv_hi += 1.0 / lo;
                }
                Some((1.0 / inv_hi, 1.0 / inv_lo))
            }
            ExponentField::DeltaShift { base, delta } => {
                let n = base.dim() as f64;
                let (plo, phi) = base.analytic_range()?;
                let (dlo, dhi) = delta.analytic_range()?;
                if plo <= 0.0 {
                    return None;
                }
                let u_lo = 1.0 / phi - dhi / n;
                let u_hi = 1.0 / plo - dlo / n;
                if u_lo <= 0.0 {
                    None
                } else {
                    Some((1.0 / u_hi, 1.0 / u_lo))
                }
            }
            ExponentField::AffineRecip { offset, scale, inner } => {
                let (lo, hi) = inner.analytic_range()?;
                if lo <= 0.0 {
                    return None;
                }
                let a = offset + scale / lo;
                let b = offset + scale / hi;
                Some((a.min(b), a.max(b)))
            }
        }
    }

    /// Limit of the closed form at `|x| -> infinity`, when defined.
    pub fn limit_at_infinity(&self) -> Option<f64> {
        match self {
            ExponentField::Constant { value, .. } => Some(*value),
            ExponentField::LogPerturbed { base, .. } => Some(*base),
            ExponentField::Bump { base, .. } => Some(*base),
            ExponentField::RadialStep { outer, .. } => Some(*outer),
            ExponentField::Affine { base, slope, dim } => {
                if (0..*dim).all(|k| slope[k] == 0.0) {
                    Some(*base)
                } else {
                    None
                }
            }
            ExponentField::Conjugate(inner) => {
                let l = inner.limit_at_infinity()?;
                if l > 1.0 {
                    Some(l / (l - 1.0))
                } else {
                    None
                }
            }
            ExponentField::Harmonic(fields) => {
                let mut s = 0.0;
                for f in fields {
                    s += 1.0 / f.limit_at_infinity()?;
                }
                Some(1.0 / s)
            }
            ExponentField::DeltaShift { base, delta } => {
                let n = base.dim() as f64;
                let u = 1.0 / base.limit_at_infinity()? - delta.limit_at_infinity()? / n;
                if u > 0.0 {
                    Some(1.0 / u)
                } else {
                    None
                }
            }
            ExponentField::AffineRecip { offset, scale, inner } => {
                Some(offset + scale / inner.limit_at_infinity()?)
            }
        }
    }

    /// Whether the field lies in the class of exponents with `1 < p_- <= p_+ < infinity`.
    pub fn in_class_p(&self) -> bool {
        matches!(self.analytic_range(), Some((lo, hi)) if lo > 1.0 && hi.is_finite())
    }
}

/// Evaluate an exponent field at `x`.
pub fn eval_exponent(field: &ExponentField, x: Point) -> f64 {
    field.eval(x)
}

/// Pointwise conjugate `q'(x) = q(x)/(q(x) - 1)`.
///
/// Rejects fields whose infimum is not strictly above 1 (the conjugate would
/// be unbounded). Conjugating a conjugate returns the original field, so the
/// involution is exact.
pub fn conjugate(field: &ExponentField) -> Result<ExponentField> {
    if let ExponentField::Conjugate(inner) = field {
        return Ok((**inner).clone());
    }
    match field.analytic_range() {
        None => Err(Error::UnboundedExponent),
        Some((lo, _)) if lo <= 1.0 => Err(Error::InvalidExponent(format!(
            "conjugate needs p_- > 1, got p_- = {lo}"
        ))),
        Some(_) => Ok(ExponentField::Conjugate(Box::new(field.clone()))),
    }
}

/// Harmonic combination `1/p(x) = sum_j 1/p_j(x)`.
pub fn harmonic_combine(fields: &[ExponentField]) -> Result<ExponentField> {
    if fields.is_empty() {
        return Err(Error::param("harmonic_combine needs at least one field"));
    }
    let dim = fields[0].dim();
    if fields.iter().any(|f| f.dim() != dim) {
        return Err(Error::DimensionMismatch("exponent fields differ in dim".into()));
    }
    if fields.len() == 1 {
        return Ok(fields[0].clone());
    }
    for f in fields {
        match f.analytic_range() {
            Some((lo, _)) if lo > 0.0 => {}
            _ => return Err(Error::InvalidExponent("harmonic_combine needs positive bounded fields".into())),
        }
    }
    Ok(ExponentField::Harmonic(fields.to_vec()))
}

/// Fractional shift `1/q(x) = 1/p(x) - delta(x)/n`.
///
/// The shift is rejected when the interval bound on `1/p - delta/n` is not
/// strictly positive, which is the conservative version of "q would be
/// non-positive or infinite somewhere".
pub fn delta_shift(field: &ExponentField, delta: &ExponentField) -> Result<ExponentField> {
    if field.dim() != delta.dim() {
        return Err(Error::DimensionMismatch("delta field dim differs from exponent".into()));
    }
    if let Some((dlo, dhi)) = delta.analytic_range() {
        if dlo == 0.0 && dhi == 0.0 {
            return Ok(field.clone());
        }
    }
    let shifted = ExponentField::DeltaShift {
        base: Box::new(field.clone()),
        delta: Box::new(delta.clone()),
    };
    match shifted.analytic_range() {
        Some((lo, hi)) if lo > 0.0 && hi.is_finite() => Ok(shifted),
        _ => Err(Error::InvalidExponent(
            "delta shift would make the exponent non-positive or unbounded".into(),
        )),
    }
}

/// Constant-delta convenience wrapper for [`delta_shift`].
pub fn delta_shift_const(field: &ExponentField, delta: f64) -> Result<ExponentField> {
    delta_shift(field, &ExponentField::constant(delta, field.dim()))
}

/// Grid min/max of the field plus analytic limit and conjugate bounds.
pub fn exponent_bounds(field: &ExponentField, grid: &UniformGrid) -> ExponentBounds {
    let mut p_minus = f64::INFINITY;
    let mut p_plus = f64::NEG_INFINITY;
    for i in 0..grid.node_count() {
        let v = field.eval(grid.node(i));
        p_minus = p_minus.min(v);
        p_plus = p_plus.max(v);
    }
    let (conj_minus, conj_plus) = if p_minus > 1.0 {
        (p_plus / (p_plus - 1.0), p_minus / (p_minus - 1.0))
    } else {
        (f64::INFINITY, f64::INFINITY)
    };
    ExponentBounds {
        p_minus,
        p_plus,
        p_inf: field.limit_at_infinity(),
        conj_minus,
        conj_plus,
    }
}

/// Measured log-Hölder constants of the field on a grid.
///
/// `C_loc` is the max of `|p(x) - p(y)| ln(1/|x-y|)` over node pairs with
/// `0 < |x-y| <= 1/2`; `C_inf` is the max of `|p(x) - p_inf| ln(e + |x|)`
/// over nodes. Fields without a limit at infinity get `C_inf = infinity`.
pub fn log_holder_constants(field: &ExponentField, grid: &UniformGrid) -> (f64, f64) {
    let n = grid.node_count();
    let dim = grid.dim();
    let h = grid.spacing();
    let values: Vec<f64> = (0..n).map(|i| field.eval(grid.node(i))).collect();

    let mut c_loc: f64 = 0.0;
    // Only pairs within distance 1/2 contribute; restrict the scan window.
    let reach = (0.5 / h).ceil() as usize + 1;
    let npa = grid.points_per_axis();
    let mut visit_pair = |i: usize, j: usize| {
        let d = crate::discretize::point_dist(grid.node(i), grid.node(j), dim);
        if d > 0.0 && d <= 0.5 {
            let c = math::abs(values[i] - values[j]) * math::ln(1.0 / d);
            if c > c_loc {
                c_loc = c;
            }
        }
    };
    if dim == 1 {
        for i in 0..n {
            for j in (i + 1)..(i + 1 + reach).min(n) {
                visit_pair(i, j);
            }
        }
    } else {
        for i in 0..n {
            let [a, b] = grid.multi(i);
            for da in 0..=reach.min(npa - 1 - a) {
                let lo_b = if da == 0 { b } else { b.saturating_sub(reach) };
                for db in lo_b..=(b + reach).min(npa - 1) {
                    let j = grid.flat([a + da, db]);
                    if j > i {
                        visit_pair(i, j);
                    }
                }
            }
        }
    }

    let c_inf = match field.limit_at_infinity() {
        None => f64::INFINITY,
        Some(p_inf) => {
            let mut c: f64 = 0.0;
            for i in 0..n {
                let x = grid.node(i);
                let v = math::abs(values[i] - p_inf) * math::ln(math::E + point_norm(x, dim));
                if v > c {
                    c = v;
                }
            }
            c
        }
    };
    (c_loc, c_inf)
}
