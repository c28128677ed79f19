//! Scalar numerics: a safeguarded Newton/bisection root finder for monotone
//! functions and adaptive Simpson quadrature.

use crate::error::{Error, Result};

/// Finds the root of a nondecreasing `f` on `[lo, hi]` with `f(lo) <= 0 <= f(hi)`.
///
/// `f` returns `(value, derivative)`. Newton steps that leave the current
/// bracket (or are not finite) are replaced by bisection, so the iteration
/// always converges. Terminates when the step or the bracket width falls
/// below `rel_tol * |x|` (or `abs_floor`).
pub fn newton_bisect<F>(
    f: F,
    mut lo: f64,
    mut hi: f64,
    start: f64,
    rel_tol: f64,
    abs_floor: f64,
    max_iter: usize,
) -> Result<f64>
where
    F: Fn(f64) -> (f64, f64),
{
    if !(lo <= hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::Numeric(format!("invalid bracket [{lo}, {hi}]")));
    }
    let mut x = if start > lo && start < hi {
        start
    } else {
        0.5 * (lo + hi)
    };
    for _ in 0..max_iter {
        let (fx, dfx) = f(x);
        if fx == 0.0 {
            return Ok(x);
        }
        if fx < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        let tol = (rel_tol * x.abs()).max(abs_floor);
        if hi - lo <= tol {
            return Ok(0.5 * (lo + hi));
        }
        let newton = x - fx / dfx;
        let next = if newton.is_finite() && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if (next - x).abs() <= tol {
            return Ok(next);
        }
        x = next;
    }
    Err(Error::Numeric(format!(
        "root finder did not converge in {max_iter} iterations (bracket [{lo}, {hi}])"
    )))
}

/// Plain bisection for a nondecreasing `f` with `f(lo) <= 0 <= f(hi)`.
pub fn bisect<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, iters: usize) -> f64 {
    for _ in 0..iters {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) <= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Adaptive Simpson quadrature of `f` over `[a, b]` to absolute tolerance `tol`.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(f, a, b, fa, fm, fb, whole, tol, 50)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}
