//! Elementwise shrinkage mappings.
//!
//! Every mapping here has the form `S(x)_i = s(|x_i|) sign(x_i)` where the
//! scalar shrinkage `s` vanishes on `[0, λ]`. The four families are soft
//! thresholding, p-shrinkage, firm thresholding and hard thresholding;
//! [`PenaltySpec`] selects one of them together with its parameters and is
//! shared with the penalty evaluation in [`crate::penalty`].

use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, Error, Result};

/// Shrinkage family together with its parameters.
///
/// Serialized as a tagged JSON object, e.g. `{"family":"firm","lambda":0.5,"mu":1.5}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum PenaltySpec {
    /// Soft thresholding, the proximal map of `λ‖·‖₁`.
    Soft { lambda: f64 },
    /// p-shrinkage `s(t) = max(t − λ^{2−p} t^{p−1}, 0)`, `p ≤ 1`.
    #[serde(rename = "pshrink")]
    PShrink { lambda: f64, p: f64 },
    /// Firm thresholding with ramp on `[λ, μ]`.
    Firm { lambda: f64, mu: f64 },
    /// Hard thresholding; ties `|t| = λ` map to zero.
    Hard { lambda: f64 },
}

/// Family tag without parameters.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Soft,
    #[serde(rename = "pshrink")]
    PShrink,
    Firm,
    Hard,
}

impl std::str::FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "soft" | "l1" => Ok(Family::Soft),
            "pshrink" | "p" | "p-shrink" => Ok(Family::PShrink),
            "firm" => Ok(Family::Firm),
            "hard" => Ok(Family::Hard),
            other => Err(Error::invalid_param(format!("unknown family '{other}'"))),
        }
    }
}

impl PenaltySpec {
    pub fn soft(lambda: f64) -> Result<Self> {
        let spec = PenaltySpec::Soft { lambda };
        spec.validate()?;
        Ok(spec)
    }

    pub fn pshrink(lambda: f64, p: f64) -> Result<Self> {
        let spec = PenaltySpec::PShrink { lambda, p };
        spec.validate()?;
        Ok(spec)
    }

    pub fn firm(lambda: f64, mu: f64) -> Result<Self> {
        let spec = PenaltySpec::Firm { lambda, mu };
        spec.validate()?;
        Ok(spec)
    }

    pub fn hard(lambda: f64) -> Result<Self> {
        let spec = PenaltySpec::Hard { lambda };
        spec.validate()?;
        Ok(spec)
    }

    /// Builds a spec from a family tag; `p` is read for p-shrinkage, `mu` for firm.
    pub fn from_parts(
        family: Family,
        lambda: f64,
        p: Option<f64>,
        mu: Option<f64>,
    ) -> Result<Self> {
        match family {
            Family::Soft => Self::soft(lambda),
            Family::PShrink => Self::pshrink(
                lambda,
                p.ok_or_else(|| Error::invalid_param("p-shrinkage requires p"))?,
            ),
            Family::Firm => Self::firm(
                lambda,
                mu.ok_or_else(|| Error::invalid_param("firm thresholding requires mu"))?,
            ),
            Family::Hard => Self::hard(lambda),
        }
    }

    pub fn family(&self) -> Family {
        match self {
            PenaltySpec::Soft { .. } => Family::Soft,
            PenaltySpec::PShrink { .. } => Family::PShrink,
            PenaltySpec::Firm { .. } => Family::Firm,
            PenaltySpec::Hard { .. } => Family::Hard,
        }
    }

    pub fn lambda(&self) -> f64 {
        match *self {
            PenaltySpec::Soft { lambda }
            | PenaltySpec::PShrink { lambda, .. }
            | PenaltySpec::Firm { lambda, .. }
            | PenaltySpec::Hard { lambda } => lambda,
        }
    }

    /// Same family and shape parameters with a different threshold.
    pub fn with_lambda(&self, lambda: f64) -> Self {
        match *self {
            PenaltySpec::Soft { .. } => PenaltySpec::Soft { lambda },
            PenaltySpec::PShrink { p, .. } => PenaltySpec::PShrink { lambda, p },
            PenaltySpec::Firm { mu, .. } => PenaltySpec::Firm { lambda, mu },
            PenaltySpec::Hard { .. } => PenaltySpec::Hard { lambda },
        }
    }

    /// Whether the induced penalty is convex (only the ℓ1 cases are).
    pub fn is_convex(&self) -> bool {
        match *self {
            PenaltySpec::Soft { .. } => true,
            PenaltySpec::PShrink { p, .. } => p == 1.0,
            _ => false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let lambda = self.lambda();
        if !(lambda.is_finite() && lambda > 0.0) {
            return Err(Error::invalid_param(format!(
                "lambda must be positive and finite, got {lambda}"
            )));
        }
        match *self {
            PenaltySpec::PShrink { p, .. } if !(p.is_finite() && p <= 1.0) => Err(
                Error::invalid_param(format!("p-shrinkage requires finite p <= 1, got {p}")),
            ),
            PenaltySpec::Firm { mu, .. } if !(mu.is_finite() && mu >= lambda) => {
                Err(Error::invalid_param(format!(
                    "firm thresholding requires mu >= lambda, got mu={mu}, lambda={lambda}"
                )))
            }
            _ => Ok(()),
        }
    }

    /// Scalar shrinkage `S(t)` for a single finite input.
    pub fn shrink_scalar(&self, t: f64) -> f64 {
        match *self {
            PenaltySpec::Soft { lambda } => soft_scalar(t, lambda),
            PenaltySpec::PShrink { lambda, p } => pshrink_scalar(t, lambda, p),
            PenaltySpec::Firm { lambda, mu } if mu > lambda => firm_scalar(t, lambda, mu),
            PenaltySpec::Firm { lambda, .. } | PenaltySpec::Hard { lambda } => {
                hard_scalar(t, lambda)
            }
        }
    }
}

impl std::fmt::Display for PenaltySpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PenaltySpec::Soft { lambda } => write!(f, "soft(lambda={lambda})"),
            PenaltySpec::PShrink { lambda, p } => write!(f, "pshrink(lambda={lambda}, p={p})"),
            PenaltySpec::Firm { lambda, mu } => write!(f, "firm(lambda={lambda}, mu={mu})"),
            PenaltySpec::Hard { lambda } => write!(f, "hard(lambda={lambda})"),
        }
    }
}

#[inline]
pub fn soft_scalar(t: f64, lambda: f64) -> f64 {
    let a = t.abs();
    if a <= lambda {
        0.0
    } else {
        (a - lambda).copysign(t)
    }
}

/// `λ^{2−p} t^{p−1}` is evaluated as `λ (t/λ)^{p−1}` so that very negative
/// `p` cannot overflow.
#[inline]
pub fn pshrink_scalar(t: f64, lambda: f64, p: f64) -> f64 {
    let a = t.abs();
    if a <= lambda {
        return 0.0;
    }
    let s = a - lambda * (a / lambda).powf(p - 1.0);
    if s <= 0.0 {
        0.0
    } else {
        s.copysign(t)
    }
}

#[inline]
pub fn hard_scalar(t: f64, lambda: f64) -> f64 {
    if t.abs() <= lambda {
        0.0
    } else {
        t
    }
}

#[inline]
pub fn firm_scalar(t: f64, lambda: f64, mu: f64) -> f64 {
    let a = t.abs();
    if a <= lambda {
        0.0
    } else if a >= mu {
        t
    } else {
        (mu / (mu - lambda) * (a - lambda)).copysign(t)
    }
}

fn check_lambda(lambda: f64) -> Result<()> {
    if lambda.is_finite() && lambda > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid_param(format!(
            "lambda must be positive and finite, got {lambda}"
        )))
    }
}

pub fn soft_threshold(x: &[f64], lambda: f64) -> Result<Vec<f64>> {
    check_lambda(lambda)?;
    ensure_finite(x, "soft_threshold")?;
    Ok(x.iter().map(|&t| soft_scalar(t, lambda)).collect())
}

/// p-shrinkage. Accepts `p < 2`; for `1 < p < 2` the map is still a valid
/// shrinkage but its induced penalty is no longer concave.
pub fn p_shrink(x: &[f64], lambda: f64, p: f64) -> Result<Vec<f64>> {
    check_lambda(lambda)?;
    if !(p.is_finite() && p < 2.0) {
        return Err(Error::invalid_param(format!(
            "p-shrinkage requires p < 2, got {p}"
        )));
    }
    ensure_finite(x, "p_shrink")?;
    Ok(x.iter().map(|&t| pshrink_scalar(t, lambda, p)).collect())
}

pub fn hard_threshold(x: &[f64], lambda: f64) -> Result<Vec<f64>> {
    check_lambda(lambda)?;
    ensure_finite(x, "hard_threshold")?;
    Ok(x.iter().map(|&t| hard_scalar(t, lambda)).collect())
}

/// Firm thresholding; `mu == lambda` is rejected, use [`hard_threshold`].
pub fn firm_threshold(x: &[f64], lambda: f64, mu: f64) -> Result<Vec<f64>> {
    check_lambda(lambda)?;
    if !(mu.is_finite() && mu > lambda) {
        return Err(Error::invalid_param(format!(
            "firm thresholding requires mu > lambda (mu={mu}, lambda={lambda}); use hard_threshold for mu = lambda"
        )));
    }
    ensure_finite(x, "firm_threshold")?;
    Ok(x.iter().map(|&t| firm_scalar(t, lambda, mu)).collect())
}

/// Applies the shrinkage selected by `spec`.
pub fn apply_shrinkage(spec: &PenaltySpec, x: &[f64]) -> Result<Vec<f64>> {
    spec.validate()?;
    match *spec {
        PenaltySpec::Soft { lambda } => soft_threshold(x, lambda),
        PenaltySpec::PShrink { lambda, p } => p_shrink(x, lambda, p),
        PenaltySpec::Firm { lambda, mu } if mu > lambda => firm_threshold(x, lambda, mu),
        PenaltySpec::Firm { lambda, .. } | PenaltySpec::Hard { lambda } => {
            hard_threshold(x, lambda)
        }
    }
}

/// In-place variant used by the solvers on already validated data.
pub(crate) fn shrink_in_place(spec: &PenaltySpec, x: &mut [f64]) {
    for v in x.iter_mut() {
        *v = spec.shrink_scalar(*v);
    }
}
