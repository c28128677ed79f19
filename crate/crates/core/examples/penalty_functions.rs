//! Evaluates the penalties induced by p-shrinkage and firm thresholding and
//! checks them against the brute-force proximal oracle.

use shrinkage_cs::penalty::prox_oracle;
use shrinkage_cs::{apply_shrinkage, penalty_value, PenaltySpec};

fn main() -> shrinkage_cs::Result<()> {
    let specs = [
        PenaltySpec::pshrink(1.0, 0.5)?,
        PenaltySpec::pshrink(1.0, -1.0)?,
        PenaltySpec::firm(0.5, 1.5)?,
    ];
    for spec in &specs {
        println!("{spec}");
        for w in [0.1, 0.5, 1.0, 3.5, 10.0, 1e4] {
            let v = penalty_value(spec, w)?;
            println!(
                "  g({w:>8}) = {:.10}  slope {:?}  root {:?}",
                v.value, v.derivative, v.root_x
            );
        }
        let x = 2.7;
        let s = apply_shrinkage(spec, &[x])?[0];
        let o = prox_oracle(spec, x, spec.lambda())?;
        println!("  S({x}) = {s:.10}, oracle {o:.10}");
    }
    Ok(())
}
