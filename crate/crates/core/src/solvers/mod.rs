//! Iterative solvers: forward-backward splitting ([`ips_solve`]) for
//! `F(x) = λ G(x) + ½‖Ax − b‖²` and ADMM ([`admm_equality_solve`]) for
//! `min G(w)` subject to `Aw = b`.

mod admm;
mod ips;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::penalty::{penalty_level_point, penalty_slope, penalty_total};
use crate::sensing::SensingProblem;
use crate::shrinkage::PenaltySpec;

pub use admm::admm_equality_solve;
pub use ips::ips_solve;

/// Stationarity level required for [`Termination::Converged`].
pub const STATIONARITY_TOL: f64 = 1e-8;

/// Starting point of an iteration.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Init {
    #[default]
    Zero,
    Custom(Vec<f64>),
    /// Run the soft-threshold (ℓ1) version of the same solver first and start
    /// from its result. Only meaningful for ADMM; IPS treats it as an error.
    L1WarmStart,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    pub max_iters: usize,
    /// Stop once `‖x_{n+1} − x_n‖₂ ≤ step_tol` (and the stationarity test passes).
    pub step_tol: f64,
    pub objective_trace: bool,
    pub admm_rho: f64,
    pub init: Init,
    /// Scale `(A, b)` by `1/(σ_max (1 + 1e−3))` before IPS when `‖A‖ ≥ 1`.
    pub rescale: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            max_iters: 100_000,
            step_tol: 1e-12,
            objective_trace: true,
            admm_rho: 1.0,
            init: Init::Zero,
            rescale: false,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_iters == 0 {
            return Err(Error::invalid_param("max_iters must be at least 1"));
        }
        if !(self.step_tol >= 0.0) {
            return Err(Error::invalid_param(format!(
                "step_tol must be >= 0, got {}",
                self.step_tol
            )));
        }
        if !(self.admm_rho > 0.0 && self.admm_rho.is_finite()) {
            return Err(Error::invalid_param(format!(
                "admm_rho must be positive, got {}",
                self.admm_rho
            )));
        }
        Ok(())
    }

    pub(crate) fn initial_point(&self, n: usize) -> Result<DVector<f64>> {
        match &self.init {
            Init::Zero | Init::L1WarmStart => Ok(DVector::zeros(n)),
            Init::Custom(v) if v.len() == n => {
                crate::error::ensure_finite(v, "initial point")?;
                Ok(DVector::from_column_slice(v))
            }
            Init::Custom(v) => Err(Error::DimensionMismatch(format!(
                "initial point has length {}, expected {n}",
                v.len()
            ))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    Converged,
    MaxIters,
    /// The initial point already satisfied the stopping test.
    FixedPoint,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverResult {
    pub x_final: Vec<f64>,
    /// Objective after each iteration, starting with the initial point.
    pub objective_trace: Vec<f64>,
    /// `‖x_{n+1} − x_n‖₂` per iteration.
    pub step_diffs: Vec<f64>,
    pub stationarity_residual: f64,
    pub iterations: usize,
    pub termination: Termination,
    /// Scale applied to `(A, b)` before solving (1 when not rescaled).
    pub scale: f64,
}

/// `λ_reg G(x) + ½‖Ax − b‖²`.
pub fn objective_fp(
    problem: &SensingProblem,
    spec: &PenaltySpec,
    lambda_reg: f64,
    x: &[f64],
) -> Result<f64> {
    check_len(problem, x)?;
    let xv = DVector::from_column_slice(x);
    let r = &problem.a * xv - &problem.b;
    Ok(lambda_reg * penalty_total(spec, x)? + 0.5 * r.norm_squared())
}

/// First-order optimality defect of `λ_reg G + ½‖Ax − b‖²` at `x`.
///
/// Nonzero components contribute `|λ g'(x_j) + ∇_j|`, zero components
/// `max(0, |∇_j| − λ)` since `∂g(0) = [−1, 1]`.
pub fn stationarity_residual(
    problem: &SensingProblem,
    spec: &PenaltySpec,
    lambda_reg: f64,
    x: &[f64],
) -> Result<f64> {
    check_len(problem, x)?;
    let xv = DVector::from_column_slice(x);
    let grad = problem.a.transpose() * (&problem.a * xv - &problem.b);
    let mut worst = 0.0f64;
    for (j, &xj) in x.iter().enumerate() {
        let d = if xj != 0.0 {
            (lambda_reg * penalty_slope(spec, xj)? + grad[j]).abs()
        } else {
            (grad[j].abs() - lambda_reg).max(0.0)
        };
        worst = worst.max(d);
    }
    Ok(worst)
}

/// `√(p‖b‖²/(p − 2))`; IPS with `p < 0` needs a strictly larger `λ`.
pub fn lambda_min_for_negative_p(p: f64, b: &[f64]) -> Result<f64> {
    if !(p < 0.0) || !p.is_finite() {
        return Err(Error::invalid_param(format!(
            "lambda_min_for_negative_p requires p < 0, got {p}"
        )));
    }
    let nb2: f64 = b.iter().map(|v| v * v).sum();
    Ok((p * nb2 / (p - 2.0)).sqrt())
}

/// Bound on `‖xⁿ‖_∞` for IPS started at zero: the `t` with `g(t) = ‖b‖²/(2λ)`.
///
/// `None` when the level is not attained (`g` bounded below it).
pub fn iterate_bound(spec: &PenaltySpec, b: &[f64]) -> Result<Option<f64>> {
    let nb2: f64 = b.iter().map(|v| v * v).sum();
    penalty_level_point(spec, nb2 / (2.0 * spec.lambda()))
}

fn check_len(problem: &SensingProblem, x: &[f64]) -> Result<()> {
    if x.len() != problem.n() {
        return Err(Error::DimensionMismatch(format!(
            "x has length {}, expected {}",
            x.len(),
            problem.n()
        )));
    }
    Ok(())
}
