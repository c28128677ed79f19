//! Exact-recovery and stability certificates, plus exhaustive oracles to
//! test them against on small instances.

mod oracle;
mod recovery;
mod stability;

pub use oracle::{
    global_min_exhaustive, noisy_global_oracle, rnsp_check, rnsp_violation, OracleOptions,
    OracleResult,
};
pub use recovery::{
    alpha_beta, exact_recovery_check, find_p_lambda, firm_mu_bound, RecoveryCertificate, MARGIN,
};
pub use stability::{
    certify_stability, largest_indices, noisy_alpha_beta, noisy_alpha_beta_with_budget,
    projected_error_bounds, stability_bound, tail_inf_norm, NoisyBounds, StabilityCertificate,
    SupportBound, C_CONST,
};
