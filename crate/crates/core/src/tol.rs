//! Scaled floating-point comparisons.
//!
//! Every comparison scales the tolerance by `1 + magnitude` of the operands.

/// Default relative tolerance.
pub const DEFAULT_TOL: f64 = 1e-9;

#[inline]
pub fn scale(a: f64, b: f64) -> f64 {
    1.0 + a.abs().max(b.abs())
}

/// `a ≤ b` up to `tol·(1 + max(|a|, |b|))`.
#[inline]
pub fn le(a: f64, b: f64, tol: f64) -> bool {
    a <= b + tol * scale(a, b)
}

/// `a ≥ b` up to tolerance.
#[inline]
pub fn ge(a: f64, b: f64, tol: f64) -> bool {
    le(b, a, tol)
}

#[inline]
pub fn eq(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * scale(a, b)
}

/// `a > b` by more than the tolerance band.
#[inline]
pub fn gt_strict(a: f64, b: f64, tol: f64) -> bool {
    a > b + tol * scale(a, b)
}
