use nalgebra::DVector;

use super::{
    objective_fp, stationarity_residual, SolverConfig, SolverResult, Termination, STATIONARITY_TOL,
};
use crate::error::{Error, Result};
use crate::sensing::{operator_norm, SensingProblem};
use crate::shrinkage::{shrink_in_place, PenaltySpec};
use crate::solvers::{lambda_min_for_negative_p, Init};

/// Iterative shrinkage `x ← S(x − Aᵀ(Ax − b))`.
///
/// Minimizes `F(x) = λ G(x) + ½‖Ax − b‖²` with `λ = spec.lambda()`, the
/// shrinkage being the proximal map of `λ G`. Requires `‖A‖ < 1` unless
/// `config.rescale` is set, in which case the iteration runs on the scaled
/// problem and `λ` applies there. For `p < 0` the start must be zero and
/// `λ² > p‖b‖²/(p − 2)`.
///
/// ```
/// use nalgebra::{DMatrix, DVector};
/// use shrinkage_cs::solvers::{ips_solve, SolverConfig};
/// use shrinkage_cs::{PenaltySpec, SensingProblem};
///
/// let a = DMatrix::from_row_slice(1, 2, &[0.5, 0.0]);
/// let problem = SensingProblem::new(a, DVector::from_element(1, 0.25)).unwrap();
/// let res = ips_solve(&problem, &PenaltySpec::soft(0.05).unwrap(), &SolverConfig::default()).unwrap();
/// assert!((res.x_final[0] - 0.3).abs() < 1e-10);
/// ```
pub fn ips_solve(
    problem: &SensingProblem,
    spec: &PenaltySpec,
    config: &SolverConfig,
) -> Result<SolverResult> {
    spec.validate()?;
    config.validate()?;
    if config.init == Init::L1WarmStart {
        return Err(Error::invalid_param(
            "IPS does not support the l1 warm start; use zero or a custom point",
        ));
    }

    let norm = operator_norm(&problem.a);
    let (scaled, scale);
    let problem = if norm >= 1.0 {
        if !config.rescale {
            return Err(Error::invalid_param(format!(
                "IPS requires ||A|| < 1, got {norm}; enable rescaling or scale A"
            )));
        }
        scale = 1.0 / (norm * (1.0 + 1e-3));
        scaled = SensingProblem {
            a: &problem.a * scale,
            b: &problem.b * scale,
            ..problem.clone()
        };
        &scaled
    } else {
        scale = 1.0;
        problem
    };

    let lambda = spec.lambda();
    if let PenaltySpec::PShrink { p, .. } = *spec {
        if p < 0.0 {
            if config.init != Init::Zero {
                return Err(Error::invalid_param("IPS with p < 0 must start from x = 0"));
            }
            let lmin = lambda_min_for_negative_p(p, problem.b.as_slice())?;
            if !(lambda > lmin) {
                return Err(Error::invalid_param(format!(
                    "p < 0 requires lambda > {lmin} (got {lambda}) for bounded iterates"
                )));
            }
        }
    }

    let n = problem.n();
    let at = problem.a.transpose();
    let mut x = config.initial_point(n)?;
    let mut objective_trace = Vec::new();
    if config.objective_trace {
        objective_trace.push(objective_fp(problem, spec, lambda, x.as_slice())?);
    }
    let mut step_diffs = Vec::new();
    let mut residual = f64::INFINITY;
    let mut termination = Termination::MaxIters;
    let mut iterations = 0;

    for it in 0..config.max_iters {
        let mut next: DVector<f64> = &x - &at * (&problem.a * &x - &problem.b);
        shrink_in_place(spec, next.as_mut_slice());
        let diff = (&next - &x).norm();
        step_diffs.push(diff);
        if config.objective_trace {
            objective_trace.push(objective_fp(problem, spec, lambda, next.as_slice())?);
        }
        if diff <= config.step_tol {
            // x is (numerically) a fixed point of the iteration map
            let fixed = if it == 0 { &x } else { &next };
            residual = stationarity_residual(problem, spec, lambda, fixed.as_slice())?;
            if residual <= STATIONARITY_TOL {
                if it == 0 {
                    // keep the initial point untouched
                    step_diffs.clear();
                    if config.objective_trace {
                        objective_trace.truncate(1);
                    }
                    termination = Termination::FixedPoint;
                    iterations = 0;
                    break;
                }
                x = next;
                termination = Termination::Converged;
                iterations = it + 1;
                break;
            }
        }
        x = next;
        iterations = it + 1;
    }
    if termination == Termination::MaxIters {
        residual = stationarity_residual(problem, spec, lambda, x.as_slice())?;
    }

    Ok(SolverResult {
        x_final: x.as_slice().to_vec(),
        objective_trace,
        step_diffs,
        stationarity_residual: residual,
        iterations,
        termination,
        scale,
    })
}
