//! Exact-recovery certificates on a planted instance, checked against the
//! exhaustive global minimizer.

use shrinkage_cs::certificates::{
    alpha_beta, exact_recovery_check, find_p_lambda, firm_mu_bound, global_min_exhaustive,
};
use shrinkage_cs::instances::planted_instance;
use shrinkage_cs::PenaltySpec;

fn main() -> shrinkage_cs::Result<()> {
    let (m, n, k) = (6, 12, 2);
    let inst = planted_instance(m, n, k, 21)?;
    let (alpha, beta) = alpha_beta(&inst.problem)?;
    println!("alpha = {alpha:.4}, beta = {beta:.4}");

    let mu = firm_mu_bound(alpha, beta, m, k)?;
    println!("firm certifies for mu < {mu:.4}");
    let searched = find_p_lambda(alpha, beta, m, k)?;
    println!("p-shrinkage parameters found: {:?}", searched.found_params);

    for spec in [
        PenaltySpec::soft(1.0)?,
        PenaltySpec::firm(0.45 * mu, 0.9 * mu)?,
        searched.spec,
    ] {
        let cert = exact_recovery_check(&spec, alpha, beta, m, k)?;
        let w = global_min_exhaustive(&spec, &inst.problem)?;
        let err = w
            .iter()
            .zip(inst.x.iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        println!(
            "{spec:<45} passes {:<5} lhs {:.4e} rhs {:.4e}  global min error {err:.1e}",
            cert.passes, cert.lhs, cert.rhs
        );
    }
    Ok(())
}
