use itertools::Itertools;
use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal, Uniform};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::recovery::strictly_less;
use crate::error::{Error, Result};
use crate::penalty::{penalty_slope, penalty_total};
use crate::sensing::{
    binomial, enumerate_basic_solutions, BasicSolution, SensingProblem, DEFAULT_BUDGET,
};
use crate::shrinkage::PenaltySpec;

/// Global minimizer of `G(w)` subject to `Aw = b`.
///
/// The minimizer has at most `m` nonzeros, so it is the basic solution with
/// the smallest penalty. Ties prefer fewer nonzeros, then the earlier support.
pub fn global_min_exhaustive(spec: &PenaltySpec, problem: &SensingProblem) -> Result<Vec<f64>> {
    spec.validate()?;
    if problem.epsilon > 0.0 {
        return Err(Error::invalid_input(
            "global_min_exhaustive handles the equality-constrained case (epsilon = 0)",
        ));
    }
    let sols = enumerate_basic_solutions(problem)?;
    let mut best: Option<(f64, &BasicSolution)> = None;
    for s in &sols {
        let g = penalty_total(spec, &s.values)?;
        let better = match best {
            None => true,
            Some((bg, bs)) => g < bg || (g == bg && s.sparsity() < bs.sparsity()),
        };
        if better {
            best = Some((g, s));
        }
    }
    let (_, s) = best.ok_or_else(|| Error::Degenerate("no basic solutions".into()))?;
    Ok(s.to_dense(problem.n()).as_slice().to_vec())
}

/// Restricted null-space check on the finitely many basic solutions:
/// every `h = x − w ≠ 0` must satisfy `G(h_T) < G(h_{T^c})`, `T = supp x`.
pub fn rnsp_check(spec: &PenaltySpec, problem: &SensingProblem, x_sparse: &[f64]) -> Result<bool> {
    Ok(rnsp_violation(spec, problem, x_sparse)?.is_none())
}

/// First basic solution violating the restricted null-space inequality.
pub fn rnsp_violation(
    spec: &PenaltySpec,
    problem: &SensingProblem,
    x_sparse: &[f64],
) -> Result<Option<BasicSolution>> {
    spec.validate()?;
    let n = problem.n();
    if x_sparse.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "x has length {}, expected {n}",
            x_sparse.len()
        )));
    }
    let x = DVector::from_column_slice(x_sparse);
    if (&problem.a * &x - &problem.b).norm() > 1e-8 * problem.b.norm().max(1.0) {
        return Err(Error::invalid_input("x is not feasible for Aw = b"));
    }
    let t: Vec<bool> = x_sparse.iter().map(|v| *v != 0.0).collect();
    let k = t.iter().filter(|&&b| b).count();
    if 2 * k > problem.m() {
        return Err(Error::invalid_param(format!(
            "need 2k <= m, got k={k}, m={}",
            problem.m()
        )));
    }
    let scale = x.amax().max(1.0);
    for w in enumerate_basic_solutions(problem)? {
        let h = &x - w.to_dense(n);
        if h.amax() <= 1e-9 * scale {
            continue;
        }
        let (mut on, mut off) = (Vec::new(), Vec::new());
        for (i, &v) in h.iter().enumerate() {
            if t[i] {
                on.push(v)
            } else {
                off.push(v)
            }
        }
        if !strictly_less(penalty_total(spec, &on)?, penalty_total(spec, &off)?) {
            return Ok(Some(w));
        }
    }
    Ok(None)
}

/// Options for [`noisy_global_oracle`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleOptions {
    /// Random starts per support in addition to `η = 0`.
    pub starts: usize,
    pub iters: usize,
    pub seed: u64,
    pub budget: u128,
}

impl Default for OracleOptions {
    fn default() -> Self {
        OracleOptions {
            starts: 8,
            iters: 400,
            seed: 0,
            budget: DEFAULT_BUDGET,
        }
    }
}

/// Best point found by [`noisy_global_oracle`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleResult {
    pub w: Vec<f64>,
    pub penalty: f64,
    pub support: Vec<usize>,
}

/// Heuristic minimizer of `G(w)` subject to `‖Aw − b‖ ≤ ε`.
///
/// For each support `S` of size `m` the feasible points are
/// `w_S = A_S⁻¹(b + η)`, `‖η‖ ≤ ε`. The penalty is minimized over `η` by
/// projected gradient descent with backtracking, from `η = 0` and from
/// `opts.starts` seeded random points of the ball. Not a proof of global
/// optimality; it serves as a witness for the stability bound.
pub fn noisy_global_oracle(
    spec: &PenaltySpec,
    problem: &SensingProblem,
    opts: &OracleOptions,
) -> Result<OracleResult> {
    spec.validate()?;
    let (m, n) = problem.a.shape();
    let count = binomial(n, m);
    if count > opts.budget {
        return Err(Error::BudgetExceeded {
            count,
            budget: opts.budget,
        });
    }
    let combos: Vec<Vec<usize>> = (0..n).combinations(m).collect();
    let results: Vec<Result<(f64, Vec<usize>, DVector<f64>)>> = combos
        .par_iter()
        .enumerate()
        .map(|(idx, s)| {
            let inv = problem
                .a
                .select_columns(s)
                .try_inverse()
                .ok_or_else(|| Error::RankDeficient(format!("columns {s:?} are singular")))?;
            let seed = opts.seed ^ (idx as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
            let (g, w) = minimize_on_support(spec, &inv, &problem.b, problem.epsilon, opts, seed)?;
            Ok((g, s.clone(), w))
        })
        .collect();
    let mut best: Option<(f64, Vec<usize>, DVector<f64>)> = None;
    for r in results {
        let r = r?;
        if best.as_ref().is_none_or(|b| r.0 < b.0) {
            best = Some(r);
        }
    }
    let (penalty, support, ws) = best.ok_or_else(|| Error::Degenerate("no supports".into()))?;
    let mut w = vec![0.0; n];
    for (&i, &v) in support.iter().zip(ws.iter()) {
        w[i] = v;
    }
    Ok(OracleResult {
        w,
        penalty,
        support,
    })
}

fn minimize_on_support(
    spec: &PenaltySpec,
    inv: &DMatrix<f64>,
    b: &DVector<f64>,
    eps: f64,
    opts: &OracleOptions,
    seed: u64,
) -> Result<(f64, DVector<f64>)> {
    let m = b.len();
    let value = |eta: &DVector<f64>| -> Result<(f64, DVector<f64>)> {
        let w = inv * (b + eta);
        Ok((penalty_total(spec, w.as_slice())?, w))
    };
    let project = |mut eta: DVector<f64>| {
        let norm = eta.norm();
        if norm > eps {
            eta *= eps / norm;
        }
        eta
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let unit = Uniform::new(0.0f64, 1.0).expect("valid range");
    let mut starts = vec![DVector::zeros(m)];
    if eps > 0.0 {
        for _ in 0..opts.starts {
            let dir = DVector::from_fn(m, |_, _| -> f64 { StandardNormal.sample(&mut rng) });
            let radius = eps * unit.sample(&mut rng).powf(1.0 / m as f64);
            starts.push(dir.normalize() * radius);
        }
    }

    let mut best = value(&starts[0])?;
    for start in starts {
        let mut eta = start;
        let (mut f, mut w) = value(&eta)?;
        let mut step = eps.max(1e-12);
        for _ in 0..opts.iters {
            if eps == 0.0 {
                break;
            }
            let slopes = w.map(|wi| penalty_slope(spec, wi).unwrap_or(0.0));
            let grad = inv.transpose() * slopes;
            let gnorm = grad.norm();
            if gnorm == 0.0 {
                break;
            }
            let mut improved = false;
            let mut t = step / gnorm;
            for _ in 0..40 {
                let cand = project(&eta - &grad * t);
                let (fc, wc) = value(&cand)?;
                if fc < f - 1e-4 * grad.dot(&(&eta - &cand)) {
                    let moved = (&cand - &eta).norm();
                    eta = cand;
                    f = fc;
                    w = wc;
                    improved = moved > 1e-15 * eps;
                    break;
                }
                t *= 0.5;
            }
            if !improved {
                break;
            }
            step = (t * gnorm * 2.0).min(eps);
        }
        if f < best.0 {
            best = (f, w);
        }
    }
    Ok(best)
}
