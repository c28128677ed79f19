//! Stability bound for a noisy, nearly sparse signal next to the error of
//! the heuristic noisy oracle.

use shrinkage_cs::certificates::{certify_stability, noisy_global_oracle, OracleOptions};
use shrinkage_cs::instances::{noisy_instance, NoisyInstanceOptions};
use shrinkage_cs::{penalty_total, PenaltySpec};

fn main() -> shrinkage_cs::Result<()> {
    let opts = NoisyInstanceOptions {
        m: 2,
        n: 7,
        tail_scale: 0.02,
        eps_fraction: 0.9,
    };
    for seed in 0..6 {
        let Some(inst) = noisy_instance(&opts, seed)? else {
            println!("seed {seed}: no admissible noise radius");
            continue;
        };
        let spec = PenaltySpec::pshrink(0.05 * inst.alpha_prime, -1.0)?;
        let cert = certify_stability(&spec, &inst.problem, inst.x.as_slice(), opts.m)?;
        let r = noisy_global_oracle(
            &spec,
            &inst.problem,
            &OracleOptions {
                seed,
                ..Default::default()
            },
        )?;
        let h: Vec<f64> = inst.x.iter().zip(&r.w).map(|(a, b)| a - b).collect();
        println!(
            "seed {seed}: eps {:.2e} alpha' {:.3} beta' {:.3} tau {:.3}  G(x - w) {:.4e} <= bound {:.4e}",
            inst.problem.epsilon,
            cert.alpha_prime,
            cert.beta_prime,
            cert.tau,
            penalty_total(&spec, &h)?,
            cert.bound
        );
    }
    Ok(())
}
