//! Reconstructs the phantom from radial Fourier lines with each penalty and
//! writes PGM previews to the directory given as the first argument.

use std::path::PathBuf;

use shrinkage_cs::imaging::{
    radial_mask, sample_spectrum, shepp_logan, tv_admm_reconstruct, TvConfig,
};
use shrinkage_cs::io::write_pgm;
use shrinkage_cs::PenaltySpec;

fn main() -> shrinkage_cs::Result<()> {
    let dir = PathBuf::from(
        std::env::args()
            .nth(1)
            .unwrap_or_else(|| "phantom_out".into()),
    );
    std::fs::create_dir_all(&dir)?;
    let img = shepp_logan(64);
    write_pgm(&dir.join("phantom.pgm"), &img)?;
    let runs = [
        ("l1", PenaltySpec::soft(0.1)?, None),
        ("p-half", PenaltySpec::pshrink(0.1, -0.5)?, Some(3.0)),
        ("firm", PenaltySpec::firm(0.1, 2.5)?, None),
    ];
    for lines in [11, 13] {
        let mask = radial_mask(64, lines, 0.0)?;
        let data = sample_spectrum(&img, &mask)?;
        for (name, spec, rho) in &runs {
            let cfg = TvConfig {
                rho: *rho,
                tol: 1e-10,
                ..Default::default()
            };
            let r = tv_admm_reconstruct(&data, &mask, spec, &cfg)?;
            println!(
                "{lines:>3} lines {name:<7} rel err {:.2e} after {} iterations",
                r.image.rel_error(&img),
                r.iterations
            );
            write_pgm(&dir.join(format!("{name}_{lines}.pgm")), &r.image)?;
        }
    }
    println!("previews in {}", dir.display());
    Ok(())
}
