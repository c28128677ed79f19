use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::penalty::penalty_scalar;
use crate::sensing::{enumerate_basic_solutions, SensingProblem};
use crate::shrinkage::PenaltySpec;

/// Relative margin applied to strict certificate inequalities.
pub const MARGIN: f64 = 1e-12;

/// Outcome of the exact-recovery inequality `k g(2β) < (m + 1 − k) g(α)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RecoveryCertificate {
    pub spec: PenaltySpec,
    pub alpha: f64,
    pub beta: f64,
    pub m: usize,
    pub k: usize,
    /// `k g(2β)`.
    pub lhs: f64,
    /// `(m + 1 − k) g(α)`.
    pub rhs: f64,
    pub passes: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mu_max: Option<f64>,
    /// `(p, λ)` found by [`find_p_lambda`].
    #[serde(skip_serializing_if = "Option::is_none")]
    pub found_params: Option<(f64, f64)>,
}

pub(crate) fn strictly_less(lhs: f64, rhs: f64) -> bool {
    lhs < rhs - MARGIN * rhs.abs()
}

/// Smallest and largest nonzero magnitude over all basic solutions of `Aw = b`.
pub fn alpha_beta(problem: &SensingProblem) -> Result<(f64, f64)> {
    if problem.b.iter().all(|&v| v == 0.0) {
        return Err(Error::Degenerate(
            "b = 0 has no nonzero basic solution entries".into(),
        ));
    }
    let sols = enumerate_basic_solutions(problem)?;
    let mut alpha = f64::INFINITY;
    let mut beta = 0.0f64;
    for v in sols.iter().flat_map(|s| s.values.iter()) {
        alpha = alpha.min(v.abs());
        beta = beta.max(v.abs());
    }
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(Error::Degenerate(
            "no nonzero entries among basic solutions".into(),
        ));
    }
    Ok((alpha, beta))
}

/// Evaluates the exact-recovery inequality for a `k`-sparse signal and `m` measurements.
///
/// ```
/// use shrinkage_cs::certificates::exact_recovery_check;
/// use shrinkage_cs::PenaltySpec;
///
/// let cert = exact_recovery_check(&PenaltySpec::firm(0.5, 1.5).unwrap(), 1.0, 2.0, 10, 2).unwrap();
/// assert!(cert.passes);
/// assert!((cert.lhs - 1.5).abs() < 1e-14 && (cert.rhs - 6.0).abs() < 1e-14);
/// ```
pub fn exact_recovery_check(
    spec: &PenaltySpec,
    alpha: f64,
    beta: f64,
    m: usize,
    k: usize,
) -> Result<RecoveryCertificate> {
    spec.validate()?;
    if k == 0 {
        return Err(Error::invalid_param("sparsity k must be positive"));
    }
    if !(alpha > 0.0 && alpha <= beta && beta.is_finite()) {
        return Err(Error::invalid_param(format!(
            "need 0 < alpha <= beta, got alpha={alpha}, beta={beta}"
        )));
    }
    let lhs = k as f64 * penalty_scalar(spec, 2.0 * beta)?;
    // for 2k > m the certificate fails anyway; keep the factor nonnegative
    let rhs = (m + 1).saturating_sub(k) as f64 * penalty_scalar(spec, alpha)?;
    let passes = 2 * k <= m && strictly_less(lhs, rhs);
    Ok(RecoveryCertificate {
        spec: *spec,
        alpha,
        beta,
        m,
        k,
        lhs,
        rhs,
        passes,
        mu_max: None,
        found_params: None,
    })
}

/// Upper bound on `μ` below which firm thresholding certifies recovery:
/// `min(α r (1 + √(1 − 1/r)), 2β)` with `r = (m + 1 − k)/k`.
pub fn firm_mu_bound(alpha: f64, beta: f64, m: usize, k: usize) -> Result<f64> {
    if k == 0 || 2 * k > m {
        return Err(Error::invalid_param(format!(
            "firm bound needs 0 < 2k <= m, got k={k}, m={m}"
        )));
    }
    if !(alpha > 0.0 && alpha <= beta) {
        return Err(Error::invalid_param(format!(
            "need 0 < alpha <= beta, got alpha={alpha}, beta={beta}"
        )));
    }
    let r = (m + 1 - k) as f64 / k as f64;
    Ok((alpha * r * (1.0 + (1.0 - 1.0 / r).sqrt())).min(2.0 * beta))
}

/// Searches `(p, λ)` for which p-shrinkage certifies recovery.
///
/// Tries `p = λ = 2^{−j}` for `j = 1..=20`, then `p = −1` with `λ = 2^{−j}`,
/// `j = 1..=40`. As `λ → 0` both `g(2β)` and `g(α)` approach `λ(1/2 − 1/p)`
/// for `p < 0`, so the second stage succeeds whenever `2k ≤ m`.
pub fn find_p_lambda(alpha: f64, beta: f64, m: usize, k: usize) -> Result<RecoveryCertificate> {
    if k == 0 || 2 * k > m {
        return Err(Error::invalid_param(format!(
            "parameter search needs 0 < 2k <= m, got k={k}, m={m}"
        )));
    }
    let positive = (1..=20).map(|j| {
        let p = 0.5f64.powi(j);
        (p, p)
    });
    let negative = (1..=40).map(|j| (-1.0, 0.5f64.powi(j)));
    let mut best_ratio = f64::INFINITY;
    for (p, lambda) in positive.chain(negative) {
        let spec = PenaltySpec::pshrink(lambda, p)?;
        let mut cert = exact_recovery_check(&spec, alpha, beta, m, k)?;
        if cert.passes {
            cert.found_params = Some((p, lambda));
            return Ok(cert);
        }
        best_ratio = best_ratio.min(cert.lhs / cert.rhs);
    }
    Err(Error::SearchExhausted(format!(
        "no (p, lambda) on the grid certifies recovery; closest lhs/rhs = {best_ratio}"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{DMatrix, DVector};

    #[test]
    fn alpha_beta_single_row() {
        let a = DMatrix::from_row_slice(1, 2, &[0.6, 0.8]);
        let p = SensingProblem::new(a.clone(), DVector::from_element(1, 1.0)).unwrap();
        let (al, be) = alpha_beta(&p).unwrap();
        assert!((al - 1.25).abs() < 1e-15 && (be - 5.0 / 3.0).abs() < 1e-15);
        let p10 = SensingProblem::new(a.clone(), DVector::from_element(1, 10.0)).unwrap();
        let (al10, be10) = alpha_beta(&p10).unwrap();
        assert!((al10 - 12.5).abs() < 1e-13 && (be10 - 50.0 / 3.0).abs() < 1e-13);
        let p0 = SensingProblem::new(a, DVector::zeros(1)).unwrap();
        assert!(alpha_beta(&p0).is_err());
    }

    #[test]
    fn recovery_examples() {
        let firm = PenaltySpec::firm(0.5, 1.5).unwrap();
        let c = exact_recovery_check(&firm, 1.0, 2.0, 10, 2).unwrap();
        assert!(c.passes && (c.lhs - 1.5).abs() < 1e-14 && (c.rhs - 6.0).abs() < 1e-14);
        let c = exact_recovery_check(&firm, 1.0, 2.0, 5, 3).unwrap();
        assert!(!c.passes);
        let soft = PenaltySpec::soft(1.0).unwrap();
        let c = exact_recovery_check(&soft, 1.0, 2.0, 4, 2).unwrap();
        assert!(!c.passes && c.lhs == 8.0 && c.rhs == 3.0);
        assert!(exact_recovery_check(&soft, 2.0, 1.0, 4, 1).is_err());
        assert!(exact_recovery_check(&soft, 1.0, 1.0, 4, 0).is_err());
    }

    #[test]
    fn firm_bound_examples() {
        let b = firm_mu_bound(1.0, 10.0, 10, 2).unwrap();
        assert!((b - 4.5 * (1.0 + (7.0f64 / 9.0).sqrt())).abs() < 1e-14);
        assert!((b - 8.4686).abs() < 1e-4);
        assert_eq!(firm_mu_bound(1.0, 1.0, 10, 2).unwrap(), 2.0);
        assert!(firm_mu_bound(1.0, 100.0, 10, 5).unwrap() > 1.0);
        assert!(firm_mu_bound(1.0, 2.0, 4, 3).is_err());
    }

    #[test]
    fn firm_bound_is_consistent() {
        for &(alpha, beta, m, k) in &[
            (1.0, 10.0, 10, 2),
            (0.3, 0.4, 6, 3),
            (1.0, 1.0, 2, 1),
            (2.0, 50.0, 7, 1),
        ] {
            let bound = firm_mu_bound(alpha, beta, m, k).unwrap();
            for frac in [0.1, 0.5, 0.9, 0.99] {
                let mu = frac * bound;
                let spec = PenaltySpec::firm(0.5 * mu, mu).unwrap();
                assert!(
                    exact_recovery_check(&spec, alpha, beta, m, k)
                        .unwrap()
                        .passes,
                    "mu={mu}"
                );
            }
        }
    }

    #[test]
    fn parameter_search() {
        let c = find_p_lambda(1.0, 2.0, 4, 1).unwrap();
        assert!(c.passes);
        let (p, l) = c.found_params.unwrap();
        let again =
            exact_recovery_check(&PenaltySpec::pshrink(l, p).unwrap(), 1.0, 2.0, 4, 1).unwrap();
        assert!(again.passes);
        // equal magnitudes: the first grid point already works
        let c = find_p_lambda(1.0, 1.0, 4, 1).unwrap();
        assert_eq!(c.found_params, Some((0.5, 0.5)));
        assert!(find_p_lambda(1.0, 2.0, 4, 3).is_err());
        // hard case: k = m/2 with a wide magnitude range needs the p < 0 stage
        let c = find_p_lambda(1e-3, 1e3, 6, 3).unwrap();
        assert_eq!(c.found_params.unwrap().0, -1.0);
    }
}
