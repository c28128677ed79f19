//! Small recovery phase diagram printed as a table.

use shrinkage_cs::experiments::{
    format_phase_table, phase_diagram, ExperimentConfig, ExperimentKind, Grid, PenaltyRun,
};
use shrinkage_cs::imaging::TvConfig;
use shrinkage_cs::solvers::SolverConfig;
use shrinkage_cs::PenaltySpec;

fn main() -> shrinkage_cs::Result<()> {
    let config = ExperimentConfig {
        kind: ExperimentKind::PhaseDiagram,
        grid: Grid {
            n: 30,
            m: vec![12],
            k: vec![1, 3, 5, 7],
            penalties: vec![
                PenaltyRun {
                    label: "l1".into(),
                    spec: PenaltySpec::soft(0.5)?,
                    rho: None,
                },
                PenaltyRun {
                    label: "p=-1/2".into(),
                    spec: PenaltySpec::pshrink(0.5, -0.5)?,
                    rho: None,
                },
            ],
            ..Default::default()
        },
        trials: 20,
        seed: 1,
        success_tol: 1e-3,
        output_path: String::new(),
        solver: SolverConfig {
            max_iters: 20_000,
            step_tol: 1e-10,
            ..Default::default()
        },
        tv: TvConfig::default(),
    };
    print!("{}", format_phase_table(&phase_diagram(&config)?));
    Ok(())
}
