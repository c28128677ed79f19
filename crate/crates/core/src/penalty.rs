//! Penalty functions induced by the shrinkage mappings.
//!
//! Each shrinkage `S_λ` in [`crate::shrinkage`] is the proximal map of `λ G`
//! for a separable penalty `G(w) = Σ g(w_i)`:
//!
//! * soft thresholding: `g(w) = |w|`;
//! * firm thresholding: `g(w) = |w| − w²/(2μ)` for `|w| ≤ μ`, `μ/2` beyond;
//! * hard thresholding: the firm penalty with `μ = λ`;
//! * p-shrinkage: no closed form. With `x(w) > λ` the root of
//!   `x − λ^{2−p} x^{p−1} = w`,
//!   `g_p(w) = (λ/p)(x/λ)^p − (λ/2)(x/λ)^{2p−2} − λ(1/p − 1/2)` (and the
//!   `λ log` analogue at `p = 0`), with slope `g_p'(w) = (λ/x)^{1−p}`.
//!
//! The root is computed in the variable `u = log(x/λ)` and the value through
//! `expm1`, which keeps full relative accuracy as `w → 0` where the three
//! terms above would otherwise cancel.

use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, Error, Result};
use crate::numeric::{adaptive_simpson, bisect, newton_bisect};
use crate::shrinkage::PenaltySpec;

/// Value of `g` at a query point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PenaltyValue {
    pub value: f64,
    /// Slope `g'(|w|)`; `None` at `w = 0` where the subdifferential is `[−1, 1]`.
    pub derivative: Option<f64>,
    /// Conjugate point `x(|w|)` (p-shrinkage only).
    pub root_x: Option<f64>,
}

const ROOT_REL_TOL: f64 = 1e-15;
const ROOT_MAX_ITER: usize = 200;

fn check_pshrink_params(lambda: f64, p: f64) -> Result<()> {
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(Error::invalid_param(format!(
            "lambda must be positive, got {lambda}"
        )));
    }
    if !(p.is_finite() && p <= 1.0) {
        return Err(Error::invalid_param(format!(
            "p must be finite and <= 1, got {p}"
        )));
    }
    Ok(())
}

/// Solves `e^u − e^{(p−1)u} = ω` for `u > 0` (`ω = w/λ`).
fn solve_log_ratio(omega: f64, p: f64) -> Result<f64> {
    let top = omega.max(1.0);
    let lo = top.ln();
    let hi = if omega <= 1.0 {
        omega.ln_1p()
    } else {
        (omega + top.powf(p - 1.0)).ln()
    };
    let q = p - 1.0;
    let h = |u: f64| {
        let v = u.exp_m1() - (q * u).exp_m1() - omega;
        let d = u.exp() - q * (q * u).exp();
        (v, d)
    };
    // small-ω asymptote u ≈ ω/(2−p) lies inside the bracket
    let start = if omega < 1.0 {
        (omega / (2.0 - p)).clamp(lo, hi)
    } else {
        hi
    };
    let u = newton_bisect(
        h,
        lo,
        hi,
        start,
        ROOT_REL_TOL,
        f64::MIN_POSITIVE,
        ROOT_MAX_ITER,
    )?;
    let resid = h(u).0.abs();
    if resid > 1e-12 * omega.max(f64::MIN_POSITIVE) && resid > 4.0 * f64::EPSILON * u.exp() {
        return Err(Error::Numeric(format!(
            "p-shrinkage inverse residual {resid:e} too large for w/lambda = {omega}"
        )));
    }
    Ok(u)
}

/// The unique `x > max(λ, w)` with `x − λ^{2−p} x^{p−1} = w`, i.e. `s_p(x) = w`.
pub fn solve_x_of_w(w: f64, lambda: f64, p: f64) -> Result<f64> {
    check_pshrink_params(lambda, p)?;
    if !(w.is_finite() && w > 0.0) {
        return Err(Error::invalid_input(format!(
            "w must be positive and finite, got {w}"
        )));
    }
    if p == 1.0 {
        return Ok(w + lambda);
    }
    // x − w can underflow for very negative p; keep x on the right side of w
    Ok((lambda * solve_log_ratio(w / lambda, p)?.exp())
        .max(w)
        .max(lambda))
}

/// `g_p(w)/λ` in terms of `u = log(x/λ)`.
fn gp_from_log_ratio(u: f64, p: f64) -> f64 {
    let tail = -(2.0 * (p - 1.0) * u).exp_m1() / 2.0;
    if p == 0.0 {
        u + tail
    } else {
        (p * u).exp_m1() / p + tail
    }
}

/// Value and slope of the p-shrinkage penalty.
pub fn g_p_eval(w: f64, lambda: f64, p: f64) -> Result<PenaltyValue> {
    check_pshrink_params(lambda, p)?;
    if !w.is_finite() {
        return Err(Error::invalid_input(format!("w must be finite, got {w}")));
    }
    let a = w.abs();
    if a == 0.0 {
        return Ok(PenaltyValue {
            value: 0.0,
            derivative: None,
            root_x: Some(lambda),
        });
    }
    if p == 1.0 {
        return Ok(PenaltyValue {
            value: a,
            derivative: Some(1.0),
            root_x: Some(a + lambda),
        });
    }
    let u = solve_log_ratio(a / lambda, p)?;
    Ok(PenaltyValue {
        value: lambda * gp_from_log_ratio(u, p),
        derivative: Some((-(1.0 - p) * u).exp()),
        root_x: Some(lambda * u.exp()),
    })
}

/// Slope `g_p'(|w|) = (λ/x)^{1−p}`; rejected at `w = 0`.
pub fn g_p_deriv(w: f64, lambda: f64, p: f64) -> Result<f64> {
    if w == 0.0 {
        return Err(Error::invalid_input(
            "g_p is not differentiable at 0 (subdifferential [-1, 1])",
        ));
    }
    g_p_eval(w, lambda, p)?
        .derivative
        .ok_or_else(|| Error::Numeric("missing derivative".into()))
}

/// Closed-form firm penalty; independent of `λ` apart from requiring `μ ≥ λ`.
pub fn g_firm_eval(w: f64, lambda: f64, mu: f64) -> Result<PenaltyValue> {
    if !(lambda.is_finite() && lambda > 0.0 && mu.is_finite() && mu >= lambda) {
        return Err(Error::invalid_param(format!(
            "firm penalty requires mu >= lambda > 0 (mu={mu}, lambda={lambda})"
        )));
    }
    if !w.is_finite() {
        return Err(Error::invalid_input(format!("w must be finite, got {w}")));
    }
    let a = w.abs();
    Ok(PenaltyValue {
        value: firm_value(a, mu),
        derivative: (a > 0.0).then(|| firm_slope(a, mu)),
        root_x: None,
    })
}

#[inline]
fn firm_value(a: f64, mu: f64) -> f64 {
    if a <= mu {
        a - a * a / (2.0 * mu)
    } else {
        0.5 * mu
    }
}

#[inline]
fn firm_slope(a: f64, mu: f64) -> f64 {
    if a < mu {
        1.0 - a / mu
    } else {
        0.0
    }
}

/// Value/slope record for any family.
pub fn penalty_value(spec: &PenaltySpec, w: f64) -> Result<PenaltyValue> {
    spec.validate()?;
    match *spec {
        PenaltySpec::Soft { .. } => {
            if !w.is_finite() {
                return Err(Error::invalid_input(format!("w must be finite, got {w}")));
            }
            Ok(PenaltyValue {
                value: w.abs(),
                derivative: (w != 0.0).then_some(1.0),
                root_x: None,
            })
        }
        PenaltySpec::PShrink { lambda, p } => g_p_eval(w, lambda, p),
        PenaltySpec::Firm { lambda, mu } => g_firm_eval(w, lambda, mu),
        PenaltySpec::Hard { lambda } => g_firm_eval(w, lambda, lambda),
    }
}

/// `g(w)` for a validated spec and finite `w`.
pub fn penalty_scalar(spec: &PenaltySpec, w: f64) -> Result<f64> {
    let a = w.abs();
    match *spec {
        PenaltySpec::Soft { .. } => Ok(a),
        PenaltySpec::PShrink { p, .. } if p == 1.0 => Ok(a),
        PenaltySpec::PShrink { lambda, p } => {
            if a == 0.0 {
                Ok(0.0)
            } else {
                Ok(lambda * gp_from_log_ratio(solve_log_ratio(a / lambda, p)?, p))
            }
        }
        PenaltySpec::Firm { mu, .. } => Ok(firm_value(a, mu)),
        PenaltySpec::Hard { lambda } => Ok(firm_value(a, lambda)),
    }
}

/// Signed derivative `g'(w)` for `w ≠ 0`; returns 0 at `w = 0`.
pub fn penalty_slope(spec: &PenaltySpec, w: f64) -> Result<f64> {
    if w == 0.0 {
        return Ok(0.0);
    }
    let a = w.abs();
    let slope = match *spec {
        PenaltySpec::Soft { .. } => 1.0,
        PenaltySpec::PShrink { p, .. } if p == 1.0 => 1.0,
        PenaltySpec::PShrink { lambda, p } => (-(1.0 - p) * solve_log_ratio(a / lambda, p)?).exp(),
        PenaltySpec::Firm { mu, .. } => firm_slope(a, mu),
        PenaltySpec::Hard { lambda } => firm_slope(a, lambda),
    };
    Ok(slope.copysign(w))
}

/// `G(w) = Σ g(w_i)`.
pub fn penalty_total(spec: &PenaltySpec, w: &[f64]) -> Result<f64> {
    spec.validate()?;
    ensure_finite(w, "penalty_total")?;
    w.iter()
        .try_fold(0.0, |acc, &wi| Ok(acc + penalty_scalar(spec, wi)?))
}

/// Supremum of `g` on `[0, ∞)`; finite for firm, hard and `p < 0`.
pub fn penalty_sup(spec: &PenaltySpec) -> f64 {
    match *spec {
        PenaltySpec::Soft { .. } => f64::INFINITY,
        PenaltySpec::PShrink { lambda, p } if p < 0.0 => lambda * (0.5 - 1.0 / p),
        PenaltySpec::PShrink { .. } => f64::INFINITY,
        PenaltySpec::Firm { mu, .. } => 0.5 * mu,
        PenaltySpec::Hard { lambda } => 0.5 * lambda,
    }
}

/// The `t > 0` with `g(t) = level`; `None` when `level` is not below `sup g`.
pub fn penalty_level_point(spec: &PenaltySpec, level: f64) -> Result<Option<f64>> {
    spec.validate()?;
    if level <= 0.0 {
        return Ok(Some(0.0));
    }
    if level >= penalty_sup(spec) {
        return Ok(None);
    }
    // g(t) <= t, so t >= level; grow the upper end until g exceeds the level
    let mut hi = level.max(1e-300);
    while penalty_scalar(spec, hi)? < level {
        hi *= 2.0;
        if !hi.is_finite() {
            return Ok(None);
        }
    }
    let g = |t: f64| {
        penalty_scalar(spec, t)
            .map(|v| v - level)
            .unwrap_or(f64::NAN)
    };
    Ok(Some(bisect(g, level.min(hi), hi, 200)))
}

/// Brute-force minimizer of `step · g(w) + ½ (w − x)²`.
///
/// Coarse grid on `[−|x|−1, |x|+1]` (with `0` as an extra candidate) followed
/// by two local refinements; the final pitch is at most `1e−6`. Meant as a
/// test oracle: `apply_shrinkage(spec)` equals `prox_oracle(spec, x, spec.lambda())`.
pub fn prox_oracle(spec: &PenaltySpec, x: f64, step: f64) -> Result<f64> {
    spec.validate()?;
    if !x.is_finite() || !(step > 0.0) {
        return Err(Error::invalid_input(
            "prox_oracle requires finite x and positive step",
        ));
    }
    let objective = |w: f64| -> f64 {
        let d = w - x;
        step * penalty_scalar(spec, w).unwrap_or(f64::INFINITY) + 0.5 * d * d
    };
    let half = x.abs() + 1.0;
    let len = 2.0 * half;
    let n = (1001.0_f64).max((16.0e6 * len).cbrt().ceil() + 1.0) as usize;

    let scan = |lo: f64, hi: f64| -> (f64, f64) {
        let pitch = (hi - lo) / (n - 1) as f64;
        let mut best = (f64::INFINITY, lo);
        for i in 0..n {
            let w = lo + pitch * i as f64;
            let f = objective(w);
            if f < best.0 {
                best = (f, w);
            }
        }
        (best.1, pitch)
    };

    let (mut w, mut pitch) = scan(-half, half);
    if objective(0.0) <= objective(w) {
        w = 0.0;
    }
    for _ in 0..2 {
        let (lo, hi) = (w - 2.0 * pitch, w + 2.0 * pitch);
        let (nw, np) = scan(lo, hi);
        w = if objective(0.0) <= objective(nw) && lo <= 0.0 && 0.0 <= hi {
            0.0
        } else {
            nw
        };
        pitch = np;
    }
    Ok(w)
}

/// Penalty induced by an arbitrary shrinkage `s` through the Legendre–Fenchel
/// construction `g(w) = (f*(w) − w²/2)/λ` with `f' = s`, `f(0) = 0`.
///
/// `s` must be continuous, nondecreasing, `s(t) ≤ t`, vanish on `[0, λ]` and be
/// unbounded. The supremum in `f*` is attained where `s(x) = |w|`; `f(x)` is
/// computed by adaptive quadrature.
pub fn induced_penalty_numeric<S: Fn(f64) -> f64>(s: S, lambda: f64, w: f64) -> Result<f64> {
    if !(lambda > 0.0) || !w.is_finite() {
        return Err(Error::invalid_param(
            "induced_penalty_numeric requires lambda > 0 and finite w",
        ));
    }
    let a = w.abs();
    if a == 0.0 {
        return Ok(0.0);
    }
    let mut hi = (a + lambda).max(2.0 * lambda);
    while s(hi) < a {
        hi *= 2.0;
        if !hi.is_finite() {
            return Err(Error::Numeric(
                "shrinkage is bounded; conjugate point not found".into(),
            ));
        }
    }
    // smallest x with s(x) >= a
    let x = bisect(
        |t| if s(t) >= a { 1.0 } else { -1.0 },
        lambda.min(a),
        hi,
        200,
    );
    let f = if x > lambda {
        adaptive_simpson(&s, lambda, x, 1e-14 * x.max(1.0))
    } else {
        0.0
    };
    Ok((x * a - f - 0.5 * a * a) / lambda)
}
