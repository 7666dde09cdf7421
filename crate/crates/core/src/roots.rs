//! Bracketed root finding.

use crate::error::{Error, Result};

/// Iteration cap shared by every root solve in the crate.
pub const MAX_ITERATIONS: usize = 200;

/// Target bracket width.
pub const WIDTH_TOL: f64 = 1e-14;

/// Bisection on `[a, b]`; `f(a)` and `f(b)` must differ in sign (a zero at
/// either end is returned directly).
pub fn bisect<F>(mut f: F, a: f64, b: f64, width_tol: f64, max_iter: usize) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    let (mut lo, mut hi) = (a, b);
    let mut f_lo = f(lo);
    let f_hi = f(hi);
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if !(f_lo.is_finite() && f_hi.is_finite()) || f_lo.signum() == f_hi.signum() {
        return Err(Error::NotConverged(format!(
            "no sign change on [{a}, {b}]: f = ({f_lo}, {f_hi})"
        )));
    }
    for _ in 0..max_iter {
        let mid = 0.5 * (lo + hi);
        if (hi - lo).abs() <= width_tol * (1.0 + mid.abs()) || mid == lo || mid == hi {
            return Ok(mid);
        }
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return Ok(mid);
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Err(Error::NotConverged(format!(
        "bisection exhausted {max_iter} iterations, bracket [{lo}, {hi}]"
    )))
}

/// Walk `x = start, start + step, ...` until `f` changes sign, then bisect
/// the last step. Returns the first crossing found.
pub fn first_crossing<F>(mut f: F, start: f64, step: f64, max_steps: usize) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    let f0 = f(start);
    if f0 == 0.0 {
        return Ok(start);
    }
    let mut prev = start;
    for k in 1..=max_steps {
        let x = start + step * k as f64;
        let fx = f(x);
        if fx == 0.0 || fx.signum() != f0.signum() {
            return bisect(&mut f, prev, x, WIDTH_TOL, MAX_ITERATIONS);
        }
        prev = x;
    }
    Err(Error::NotConverged(format!(
        "no sign change within {max_steps} steps of size {step} from {start}"
    )))
}
