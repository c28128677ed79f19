//! Equality-constrained recovery with ADMM from the l1 warm start.

use nalgebra::DVector;
use shrinkage_cs::instances::planted_instance;
use shrinkage_cs::solvers::{admm_equality_solve, Init, SolverConfig};
use shrinkage_cs::PenaltySpec;

fn main() -> shrinkage_cs::Result<()> {
    let inst = planted_instance(12, 40, 2, 3)?;
    let cfg = SolverConfig {
        init: Init::L1WarmStart,
        step_tol: 1e-10,
        objective_trace: false,
        ..Default::default()
    };
    for spec in [
        PenaltySpec::soft(0.5)?,
        PenaltySpec::pshrink(0.5, 0.5)?,
        PenaltySpec::pshrink(0.5, -0.5)?,
        PenaltySpec::firm(0.2, 2.0)?,
    ] {
        let r = admm_equality_solve(&inst.problem, &spec, &cfg)?;
        let err = (DVector::from_vec(r.x_final) - &inst.x).norm() / inst.x.norm();
        println!(
            "{spec:<40} iters {:>6}  {:?}  rel err {err:.2e}",
            r.iterations, r.termination
        );
    }
    Ok(())
}
