use itertools::Itertools;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::recovery::strictly_less;
use crate::error::{Error, Result};
use crate::penalty::penalty_scalar;
use crate::sensing::{binomial, SensingProblem, DEFAULT_BUDGET, RANK_TOL};
use crate::shrinkage::PenaltySpec;

/// Constant in `G(v) ≤ C √n ‖v‖₂`; valid because `g(t) ≤ |t|`.
pub const C_CONST: f64 = 1.0;

/// Per-support data for the noisy bounds.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SupportBound {
    pub support: Vec<usize>,
    /// `min_i |(A_S⁻¹ b)_i|`.
    pub alpha_s: f64,
    /// `max_i |(A_S⁻¹ b)_i|`.
    pub beta_s: f64,
    /// `‖A_S⁻¹‖₂ = 1/σ_min(A_S)`.
    pub inv_norm: f64,
}

/// Noisy magnitude bounds over all `m`-column supports.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoisyBounds {
    pub supports: Vec<SupportBound>,
    pub alpha_s_min: f64,
    pub beta_s_max: f64,
    /// `min_S α_S/‖A_S⁻¹‖`; the noise radius must stay strictly below it.
    pub eps_max: f64,
    pub epsilon: f64,
    /// `min_S (α_S − ‖A_S⁻¹‖ ε)`.
    pub alpha: f64,
    /// `max_S (β_S + ‖A_S⁻¹‖ ε)`.
    pub beta: f64,
}

/// All constants of the stability bound.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StabilityCertificate {
    pub spec: PenaltySpec,
    /// Per-support data, present when computed from a problem instance.
    pub alpha_s_min: Option<f64>,
    pub beta_s_max: Option<f64>,
    pub eps_max: Option<f64>,
    pub alpha_prime: f64,
    pub beta_prime: f64,
    pub n: usize,
    pub k: usize,
    pub epsilon: f64,
    /// `G(x_{T^c})`.
    pub tail: f64,
    pub tau: f64,
    pub c: f64,
    /// `D = C √n`.
    pub d: f64,
    pub c1: f64,
    pub c2: f64,
    /// `C₁ ε + C₂ G(x_{T^c})`.
    pub bound: f64,
}

/// Magnitude bounds for basic solutions of `‖Aw − b‖ ≤ ε` (`ε = problem.epsilon`).
pub fn noisy_alpha_beta(problem: &SensingProblem) -> Result<NoisyBounds> {
    noisy_alpha_beta_with_budget(problem, DEFAULT_BUDGET)
}

pub fn noisy_alpha_beta_with_budget(problem: &SensingProblem, budget: u128) -> Result<NoisyBounds> {
    let (m, n) = problem.a.shape();
    let count = binomial(n, m);
    if count > budget {
        return Err(Error::BudgetExceeded { count, budget });
    }
    let sigma_max = problem.a.singular_values().max();
    let combos: Vec<Vec<usize>> = (0..n).combinations(m).collect();
    let supports: Vec<SupportBound> = combos
        .par_iter()
        .map(|s| support_bound(problem, s, sigma_max))
        .collect::<Result<_>>()?;

    let eps = problem.epsilon;
    let mut out = NoisyBounds {
        supports,
        alpha_s_min: f64::INFINITY,
        beta_s_max: 0.0,
        eps_max: f64::INFINITY,
        epsilon: eps,
        alpha: f64::INFINITY,
        beta: 0.0,
    };
    for sb in &out.supports {
        if sb.alpha_s <= 0.0 {
            return Err(Error::Degenerate(format!(
                "basic solution on support {:?} has a zero entry; noisy bounds need alpha_S > 0",
                sb.support
            )));
        }
        out.alpha_s_min = out.alpha_s_min.min(sb.alpha_s);
        out.beta_s_max = out.beta_s_max.max(sb.beta_s);
        out.eps_max = out.eps_max.min(sb.alpha_s / sb.inv_norm);
        out.alpha = out.alpha.min(sb.alpha_s - sb.inv_norm * eps);
        out.beta = out.beta.max(sb.beta_s + sb.inv_norm * eps);
    }
    if !(eps < out.eps_max) {
        return Err(Error::NoiseTooLarge {
            epsilon: eps,
            eps_max: out.eps_max,
        });
    }
    Ok(out)
}

fn support_bound(
    problem: &SensingProblem,
    support: &[usize],
    sigma_max: f64,
) -> Result<SupportBound> {
    let a_s = problem.a.select_columns(support);
    let svd = a_s.clone().svd(false, false);
    let smin = svd.singular_values.min();
    if smin <= RANK_TOL * sigma_max {
        return Err(Error::RankDeficient(format!(
            "columns {support:?} are linearly dependent (URP fails)"
        )));
    }
    let w = a_s
        .lu()
        .solve(&problem.b)
        .ok_or_else(|| Error::RankDeficient(format!("columns {support:?} are singular")))?;
    let alpha_s = w.iter().map(|v| v.abs()).fold(f64::INFINITY, f64::min);
    let beta_s = w.amax();
    Ok(SupportBound {
        support: support.to_vec(),
        alpha_s,
        beta_s,
        inv_norm: 1.0 / smin,
    })
}

/// `‖x_{T^c}‖_∞` for index set `t`.
pub fn tail_inf_norm(x: &[f64], t: &[usize]) -> f64 {
    x.iter()
        .enumerate()
        .filter(|(i, _)| !t.contains(i))
        .map(|(_, v)| v.abs())
        .fold(0.0, f64::max)
}

/// `α′ = α − ‖x_{T^c}‖_∞ − 2ε`, `β′ = β + ε`.
///
/// `α`, `β` are those of `bounds`, so `ε` may not exceed the radius they were
/// computed for (smaller `ε` only makes them conservative). Requires
/// `ε < min_S (α_S − ‖x_{T^c}‖_∞)/(2 + ‖A_S⁻¹‖)`.
pub fn projected_error_bounds(
    bounds: &NoisyBounds,
    x: &[f64],
    t: &[usize],
    epsilon: f64,
) -> Result<(f64, f64)> {
    if !(epsilon >= 0.0) {
        return Err(Error::invalid_param(format!(
            "epsilon must be >= 0, got {epsilon}"
        )));
    }
    if epsilon > bounds.epsilon {
        return Err(Error::invalid_param(format!(
            "epsilon {epsilon} exceeds the radius {} the bounds were computed for",
            bounds.epsilon
        )));
    }
    let tail = tail_inf_norm(x, t);
    if !(bounds.alpha_s_min > tail) {
        return Err(Error::CertificateFails(format!(
            "tail ||x_Tc||_inf = {tail} is not below min alpha_S = {}",
            bounds.alpha_s_min
        )));
    }
    let admissible = bounds
        .supports
        .iter()
        .map(|s| (s.alpha_s - tail) / (2.0 + s.inv_norm))
        .fold(f64::INFINITY, f64::min);
    if !(epsilon < admissible) {
        return Err(Error::NoiseTooLarge {
            epsilon,
            eps_max: admissible,
        });
    }
    Ok((bounds.alpha - tail - 2.0 * epsilon, bounds.beta + epsilon))
}

/// Stability bound `G(x − x*) ≤ C₁ ε + C₂ G(x_{T^c})`.
///
/// `τ = k g(2β′)/((n − k) g(α′))`, `D = C√n`, `C₁ = 4D/(1 − τ)`,
/// `C₂ = 2(1 + τ)/(1 − τ)`, with `C = 1`.
///
/// ```
/// use shrinkage_cs::certificates::stability_bound;
/// use shrinkage_cs::PenaltySpec;
///
/// let spec = PenaltySpec::firm(0.5, 1.5).unwrap();
/// let cert = stability_bound(&spec, 1.0, 2.0, 20, 2, 0.01, 0.0).unwrap();
/// assert!((cert.tau - 0.125).abs() < 1e-15);
/// assert!((cert.bound - 0.2044).abs() < 1e-4);
/// ```
#[allow(clippy::too_many_arguments)]
pub fn stability_bound(
    spec: &PenaltySpec,
    alpha_prime: f64,
    beta_prime: f64,
    n: usize,
    k: usize,
    epsilon: f64,
    tail: f64,
) -> Result<StabilityCertificate> {
    spec.validate()?;
    if k == 0 || 2 * k >= n {
        return Err(Error::invalid_param(format!(
            "stability bound needs 0 < 2k < n, got k={k}, n={n}"
        )));
    }
    if !(alpha_prime > 0.0 && beta_prime >= alpha_prime) {
        return Err(Error::invalid_param(format!(
            "need 0 < alpha' <= beta', got alpha'={alpha_prime}, beta'={beta_prime}"
        )));
    }
    if !(epsilon >= 0.0 && tail >= 0.0) {
        return Err(Error::invalid_param("epsilon and tail must be nonnegative"));
    }
    let num = k as f64 * penalty_scalar(spec, 2.0 * beta_prime)?;
    let den = (n - k) as f64 * penalty_scalar(spec, alpha_prime)?;
    if !strictly_less(num, den) {
        return Err(Error::CertificateFails(format!(
            "tau = {} is not below 1",
            num / den
        )));
    }
    let tau = num / den;
    let d = C_CONST * (n as f64).sqrt();
    let c1 = 4.0 * d / (1.0 - tau);
    let c2 = 2.0 * (1.0 + tau) / (1.0 - tau);
    Ok(StabilityCertificate {
        spec: *spec,
        alpha_s_min: None,
        beta_s_max: None,
        eps_max: None,
        alpha_prime,
        beta_prime,
        n,
        k,
        epsilon,
        tail,
        tau,
        c: C_CONST,
        d,
        c1,
        c2,
        bound: c1 * epsilon + c2 * tail,
    })
}

/// Full chain for a signal `x` with `k` largest entries `T`: noisy bounds,
/// projected bounds and the stability constants.
pub fn certify_stability(
    spec: &PenaltySpec,
    problem: &SensingProblem,
    x: &[f64],
    k: usize,
) -> Result<StabilityCertificate> {
    if x.len() != problem.n() {
        return Err(Error::DimensionMismatch(format!(
            "x has length {}, expected {}",
            x.len(),
            problem.n()
        )));
    }
    let bounds = noisy_alpha_beta(problem)?;
    let t = largest_indices(x, k);
    let (ap, bp) = projected_error_bounds(&bounds, x, &t, problem.epsilon)?;
    let tail_vec: Vec<f64> = (0..x.len())
        .filter(|i| !t.contains(i))
        .map(|i| x[i])
        .collect();
    let tail = crate::penalty::penalty_total(spec, &tail_vec)?;
    let mut cert = stability_bound(spec, ap, bp, problem.n(), k, problem.epsilon, tail)?;
    cert.alpha_s_min = Some(bounds.alpha_s_min);
    cert.beta_s_max = Some(bounds.beta_s_max);
    cert.eps_max = Some(bounds.eps_max);
    Ok(cert)
}

/// Indices of the `k` largest-magnitude entries, sorted; ties broken by index.
pub fn largest_indices(x: &[f64], k: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..x.len()).collect();
    idx.sort_by(|&i, &j| x[j].abs().total_cmp(&x[i].abs()).then(i.cmp(&j)));
    idx.truncate(k);
    idx.sort_unstable();
    idx
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{DMatrix, DVector};

    fn single_row(eps: f64) -> SensingProblem {
        SensingProblem::with_noise(
            DMatrix::from_row_slice(1, 2, &[0.6, 0.8]),
            DVector::from_element(1, 1.0),
            eps,
        )
        .unwrap()
    }

    #[test]
    fn noisy_example() {
        let nb = noisy_alpha_beta(&single_row(0.1)).unwrap();
        assert!((nb.eps_max - 1.0).abs() < 1e-15);
        assert!((nb.alpha - 1.125).abs() < 1e-15);
        assert!((nb.beta - (5.0 / 3.0 + 1.0 / 6.0)).abs() < 1e-15);
        let mut inv: Vec<f64> = nb.supports.iter().map(|s| s.inv_norm).collect();
        inv.sort_by(f64::total_cmp);
        assert!((inv[0] - 1.25).abs() < 1e-15 && (inv[1] - 5.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn noisy_reduces_to_exact_at_zero() {
        let nb = noisy_alpha_beta(&single_row(0.0)).unwrap();
        assert_eq!((nb.alpha, nb.beta), (1.25, 5.0 / 3.0));
    }

    #[test]
    fn noise_too_large() {
        match noisy_alpha_beta(&single_row(1.5)) {
            Err(Error::NoiseTooLarge { eps_max, .. }) => assert!((eps_max - 1.0).abs() < 1e-15),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn projected_examples() {
        let nb = noisy_alpha_beta(&single_row(0.0)).unwrap();
        let (a, b) = projected_error_bounds(&nb, &[0.0, 1.25], &[1], 0.0).unwrap();
        assert_eq!((a, b), (nb.alpha, nb.beta));

        // bounds at ε = 0.1 give α = 1.125; tail 0.1 and ε = 0.05
        let nb = noisy_alpha_beta(&single_row(0.1)).unwrap();
        let (a, b) = projected_error_bounds(&nb, &[0.1, 1.25], &[1], 0.05).unwrap();
        assert!((a - 0.925).abs() < 1e-15);
        assert!((b - (nb.beta + 0.05)).abs() < 1e-15);
        assert!(projected_error_bounds(&nb, &[0.1, 1.25], &[1], 0.2).is_err());

        let nb = noisy_alpha_beta(&single_row(0.5)).unwrap();
        assert!(matches!(
            projected_error_bounds(&nb, &[0.0, 1.25], &[1], 0.5),
            Err(Error::NoiseTooLarge { .. })
        ));
    }

    #[test]
    fn stability_examples() {
        let firm = PenaltySpec::firm(0.5, 1.5).unwrap();
        let c = stability_bound(&firm, 1.0, 2.0, 20, 2, 0.0, 0.0).unwrap();
        assert_eq!(c.bound, 0.0);
        let c = stability_bound(&firm, 1.0, 2.0, 20, 2, 0.01, 0.0).unwrap();
        // independent recomputation: g(4) = 0.75, g(1) = 1 − 1/3
        let tau = 2.0 * 0.75 / (18.0 * (1.0 - 1.0 / 3.0));
        let expect = 2.0 / (1.0 - tau) * 2.0 * 20f64.sqrt() * 0.01;
        assert!((c.bound - expect).abs() < 1e-15);
        assert!((c.bound - 0.2045).abs() < 2e-4);
        assert!((c.c2 - 2.0 * 1.125 / 0.875).abs() < 1e-15);
    }

    #[test]
    fn stability_blows_up_as_tau_approaches_one() {
        let soft = PenaltySpec::soft(1.0).unwrap();
        let mut last = 0.0;
        // τ = 2k β′/((n − k) α′) with k = 1, n = 10, α′ = 1
        for beta in [1.0, 2.0, 3.0, 4.0, 4.4, 4.49] {
            let c = stability_bound(&soft, 1.0, beta, 10, 1, 0.01, 0.1).unwrap();
            assert!(c.bound > last);
            last = c.bound;
        }
        assert!(matches!(
            stability_bound(&soft, 1.0, 4.5, 10, 1, 0.01, 0.1),
            Err(Error::CertificateFails(_))
        ));
    }

    #[test]
    fn largest_indices_picks_top_k() {
        assert_eq!(largest_indices(&[0.1, -3.0, 2.0, 0.0], 2), vec![1, 2]);
        assert_eq!(largest_indices(&[1.0, 1.0, 1.0], 2), vec![0, 1]);
    }
}
