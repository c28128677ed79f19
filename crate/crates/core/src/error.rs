use thiserror::Error;

/// Errors raised by the shrinkage, penalty, solver and certificate routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("numerical failure: {0}")]
    Numeric(String),
    #[error("combinatorial budget exceeded: {count} supports > budget {budget}")]
    BudgetExceeded { count: u128, budget: u128 },
    #[error("matrix is rank deficient: {0}")]
    RankDeficient(String),
    #[error("degenerate data: {0}")]
    Degenerate(String),
    #[error("noise radius {epsilon} is not below the admissible bound {eps_max}")]
    NoiseTooLarge { epsilon: f64, eps_max: f64 },
    #[error("certificate fails: {0}")]
    CertificateFails(String),
    #[error("parameter search exhausted: {0}")]
    SearchExhausted(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit status: 2 for numerical, budget and certificate failures,
    /// 1 for bad input.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Numeric(_)
            | Error::BudgetExceeded { .. }
            | Error::RankDeficient(_)
            | Error::Degenerate(_)
            | Error::NoiseTooLarge { .. }
            | Error::CertificateFails(_)
            | Error::SearchExhausted(_) => 2,
            _ => 1,
        }
    }

    pub(crate) fn invalid_input(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn invalid_param(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}

pub(crate) fn ensure_finite(x: &[f64], what: &str) -> Result<()> {
    match x.iter().position(|v| !v.is_finite()) {
        Some(i) => Err(Error::invalid_input(format!(
            "{what}: component {i} is not finite ({})",
            x[i]
        ))),
        None => Ok(()),
    }
}
