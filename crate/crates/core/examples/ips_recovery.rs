//! Iterative p-shrinkage on a noisy random instance, comparing penalties.

use nalgebra::DVector;
use shrinkage_cs::sensing::{gaussian_matrix, operator_norm};
use shrinkage_cs::solvers::{ips_solve, SolverConfig};
use shrinkage_cs::{PenaltySpec, SensingProblem};

fn main() -> shrinkage_cs::Result<()> {
    let (m, n) = (10, 30);
    let g = gaussian_matrix(m, n, 17);
    let a = &g / (operator_norm(&g) * 1.01);
    let mut x = DVector::zeros(n);
    x[4] = 1.5;
    x[11] = -2.0;
    x[25] = 1.2;
    let b = &a * &x;
    let problem = SensingProblem::new(a, b)?;
    for spec in [
        PenaltySpec::soft(0.05)?,
        PenaltySpec::pshrink(0.05, 0.5)?,
        PenaltySpec::pshrink(0.05, 0.0)?,
        PenaltySpec::firm(0.05, 0.5)?,
    ] {
        let r = ips_solve(&problem, &spec, &SolverConfig::default())?;
        let err = (DVector::from_vec(r.x_final.clone()) - &x).norm() / x.norm();
        println!(
            "{spec:<40} iters {:>6}  {:?}  residual {:.1e}  F {:.6}  rel err {err:.3e}",
            r.iterations,
            r.termination,
            r.stationarity_residual,
            r.objective_trace.last().unwrap()
        );
    }
    Ok(())
}
