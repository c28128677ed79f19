use nalgebra::DVector;

use super::{Init, SolverConfig, SolverResult, Termination};
use crate::error::{Error, Result};
use crate::penalty::penalty_total;
use crate::sensing::SensingProblem;
use crate::shrinkage::{shrink_in_place, PenaltySpec};

/// ADMM for `min G(w)` subject to `Aw = b`, with `AAᵀ = I`.
///
/// Splits `w = z` with scaled dual `u`:
///
/// * `w ← (z − u) − Aᵀ(A(z − u) − b)` (projection onto the affine set),
/// * `z ← S(w + u)` where `S` is the spec's shrinkage with threshold `λ/ρ`,
/// * `u ← u + w − z`.
///
/// Stops when the primal residual `‖w − z‖` and the dual residual
/// `ρ‖z⁺ − z‖` are both `≤ step_tol`; `stationarity_residual` reports the
/// larger of the two. Returns `z`, which has exact zeros.
///
/// The `z`-step is the proximal map of `(λ/ρ) g`, so for firm thresholding
/// the iteration is ADMM on `G_firm` with penalty `ρ/λ`, and for p-shrinkage
/// it targets the penalty with threshold `λ/ρ`. Nonconvex penalties converge
/// reliably only when `ρ/λ` is several times their weak-convexity modulus
/// (`1/μ` for firm); otherwise the iteration may cycle until `max_iters`.
pub fn admm_equality_solve(
    problem: &SensingProblem,
    spec: &PenaltySpec,
    config: &SolverConfig,
) -> Result<SolverResult> {
    spec.validate()?;
    config.validate()?;
    if !problem.rows_orthonormal {
        return Err(Error::invalid_input(
            "ADMM projection needs orthonormal rows (AA^T = I); call orthonormalize_rows first",
        ));
    }
    let rho = config.admm_rho;
    let inner = spec.with_lambda(spec.lambda() / rho);
    inner.validate().map_err(|_| {
        Error::invalid_param(format!(
            "threshold lambda/rho = {} must not exceed mu",
            spec.lambda() / rho
        ))
    })?;

    let n = problem.n();
    let (z0, warm_iters) = match config.init {
        Init::L1WarmStart if !matches!(spec, PenaltySpec::Soft { .. }) => {
            let l1 = PenaltySpec::Soft {
                lambda: spec.lambda(),
            };
            let cfg = SolverConfig {
                init: Init::Zero,
                objective_trace: false,
                ..config.clone()
            };
            let warm = admm_equality_solve(problem, &l1, &cfg)?;
            (DVector::from_vec(warm.x_final), warm.iterations)
        }
        _ => (config.initial_point(n)?, 0),
    };

    let at = problem.a.transpose();
    let project = |v: &DVector<f64>| -> DVector<f64> { v - &at * (&problem.a * v - &problem.b) };

    let mut z = z0;
    let mut u = DVector::zeros(n);
    let mut objective_trace = Vec::new();
    if config.objective_trace {
        objective_trace.push(penalty_total(spec, z.as_slice())?);
    }
    let mut step_diffs = Vec::new();
    let mut termination = Termination::MaxIters;
    let mut residual = f64::INFINITY;
    let mut iterations = 0;

    for it in 0..config.max_iters {
        let w = project(&(&z - &u));
        let mut z_next = &w + &u;
        shrink_in_place(&inner, z_next.as_mut_slice());
        u += &w - &z_next;
        let primal = (&w - &z_next).norm();
        let diff = (&z_next - &z).norm();
        let dual = rho * diff;
        step_diffs.push(diff);
        z = z_next;
        if config.objective_trace {
            objective_trace.push(penalty_total(spec, z.as_slice())?);
        }
        iterations = it + 1;
        residual = primal.max(dual);
        if primal <= config.step_tol && dual <= config.step_tol {
            termination = if it == 0 && warm_iters == 0 {
                Termination::FixedPoint
            } else {
                Termination::Converged
            };
            break;
        }
    }

    Ok(SolverResult {
        x_final: z.as_slice().to_vec(),
        objective_trace,
        step_diffs,
        stationarity_residual: residual,
        iterations: iterations + warm_iters,
        termination,
        scale: 1.0,
    })
}
