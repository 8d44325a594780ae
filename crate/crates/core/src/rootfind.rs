//! Scalar bracketing and root refinement shared by the fiber solvers.
//!
//! Policy: every root is isolated in a sign-change bracket first, bisected to
//! `tol` on `t`, then polished with a few Newton steps that never leave the
//! bracket. No open-ended Newton iterations anywhere.

use crate::error::{Error, Result};

/// Bisect `f` on `[lo, hi]`, which must carry a sign change. The interval is
/// narrowed to `tol` relative to the midpoint or to floating point
/// resolution. The stop test must stay relative: fiber roots can sit many
/// decades below 1 and an absolute floor would truncate them.
pub(crate) fn bisect<F: Fn(f64) -> f64>(f: &F, mut lo: f64, mut hi: f64, tol: f64) -> Result<f64> {
    let mut flo = f(lo);
    let fhi = f(hi);
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if !flo.is_finite() || !fhi.is_finite() {
        return Err(Error::Numerical(format!(
            "bisection endpoints not finite: f({lo}) = {flo}, f({hi}) = {fhi}"
        )));
    }
    if (flo > 0.0) == (fhi > 0.0) {
        return Err(Error::Numerical(format!(
            "no sign change on [{lo}, {hi}]: f = ({flo}, {fhi})"
        )));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break; // adjacent floats
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if (fm > 0.0) == (flo > 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
        if hi - lo <= tol * mid.abs() {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Up to `steps` Newton corrections of `x`, each rejected unless it stays in
/// `[lo, hi]` and shrinks `|f|`.
pub(crate) fn polish<F, D>(f: &F, df: &D, mut x: f64, lo: f64, hi: f64, steps: usize) -> f64
where
    F: Fn(f64) -> f64,
    D: Fn(f64) -> f64,
{
    let mut fx = f(x);
    for _ in 0..steps {
        let dfx = df(x);
        if dfx == 0.0 || !dfx.is_finite() {
            break;
        }
        let next = x - fx / dfx;
        if !(next > lo && next < hi) {
            break;
        }
        let fnext = f(next);
        if !fnext.is_finite() || fnext.abs() >= fx.abs() {
            break;
        }
        if (next - x).abs() <= f64::EPSILON * x.abs() {
            x = next;
            break;
        }
        x = next;
        fx = fnext;
    }
    x
}

/// Multiply `start` by `factor < 1` until `pred(x)` holds. Errors out instead
/// of underflowing past `min_x`.
pub(crate) fn shrink_until<P: Fn(f64) -> bool>(
    start: f64,
    factor: f64,
    min_x: f64,
    pred: P,
    what: &str,
) -> Result<f64> {
    debug_assert!(factor < 1.0 && factor > 0.0);
    let mut x = start;
    for _ in 0..4000 {
        if pred(x) {
            return Ok(x);
        }
        x *= factor;
        if x < min_x {
            return Err(Error::Numerical(format!(
                "bracket shrink for {what} passed {min_x:e} without a sign change"
            )));
        }
    }
    Err(Error::Numerical(format!("bracket shrink for {what} did not terminate")))
}

/// Multiply `start` by `factor > 1` until `pred(x)` holds, up to `max_steps`.
pub(crate) fn grow_until<P: Fn(f64) -> bool>(
    start: f64,
    factor: f64,
    max_steps: usize,
    pred: P,
    what: &str,
) -> Result<f64> {
    debug_assert!(factor > 1.0);
    let mut x = start;
    for _ in 0..=max_steps {
        if pred(x) {
            return Ok(x);
        }
        x *= factor;
        if !x.is_finite() {
            break;
        }
    }
    Err(Error::Numerical(format!(
        "bracket growth for {what} found no sign change within {max_steps} steps"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bisect_then_polish_hits_machine_precision() {
        let f = |x: f64| x * x * x - 0.3 * x + 0.04;
        let df = |x: f64| 3.0 * x * x - 0.3;
        let r = bisect(&f, 0.0, 0.3, 1e-12).unwrap();
        let r = polish(&f, &df, r, 0.0, 0.3, 3);
        assert!(f(r).abs() < 1e-15, "residual {}", f(r));
    }

    #[test]
    fn bisect_rejects_same_sign_interval() {
        let err = bisect(&|x: f64| x * x + 1.0, -1.0, 1.0, 1e-12).unwrap_err();
        assert!(err.to_string().contains("no sign change"));
    }

    #[test]
    fn bisect_handles_huge_scale_roots() {
        let target = 3.7e18;
        let f = |x: f64| x - target;
        let r = bisect(&f, 1.0, 1e20, 1e-12).unwrap();
        assert!((r - target).abs() <= 1e-12 * target.abs().max(1.0) * 2.0);
    }

    #[test]
    fn shrink_and_grow_report_failures() {
        assert!(shrink_until(1.0, 0.5, 1e-30, |_| false, "test").is_err());
        assert!(grow_until(1.0, 2.0, 8, |_| false, "test").is_err());
        let x = shrink_until(1.0, 0.5, 1e-30, |x| x < 1e-3, "test").unwrap();
        assert!(x < 1e-3 && x > 1e-4);
    }
}
