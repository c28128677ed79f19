//! Tabulates the four shrinkage mappings on a grid of inputs.

use shrinkage_cs::{apply_shrinkage, PenaltySpec};

fn main() -> shrinkage_cs::Result<()> {
    let specs = [
        PenaltySpec::soft(1.0)?,
        PenaltySpec::pshrink(1.0, 0.5)?,
        PenaltySpec::pshrink(1.0, -1.0)?,
        PenaltySpec::firm(1.0, 2.5)?,
        PenaltySpec::hard(1.0)?,
    ];
    let xs: Vec<f64> = (0..=12).map(|i| -3.0 + 0.5 * i as f64).collect();
    print!("{:>6}", "x");
    for s in &specs {
        print!(" {:>22}", s.to_string());
    }
    println!();
    let cols: Vec<Vec<f64>> = specs
        .iter()
        .map(|s| apply_shrinkage(s, &xs))
        .collect::<Result<_, _>>()?;
    for (i, x) in xs.iter().enumerate() {
        print!("{x:>6.2}");
        for c in &cols {
            print!(" {:>22.6}", c[i]);
        }
        println!();
    }
    Ok(())
}
