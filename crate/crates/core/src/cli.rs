//! The `shrinkcs` command line. [`run`] parses arguments, dispatches to the
//! library and maps errors to exit codes (1 usage or input, 2 numerical).

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use crate::certificates::{
    alpha_beta, certify_stability, exact_recovery_check, firm_mu_bound, C_CONST, MARGIN,
};
use crate::error::{Error, Result};
use crate::experiments::{write_experiment, ExperimentConfig, ExperimentKind};
use crate::imaging::{radial_mask, sample_spectrum, shepp_logan, tv_admm_reconstruct, TvConfig};
use crate::io::{
    read_json, read_problem_csv, read_vector_csv, write_image_csv, write_json, write_mask_csv,
    write_pgm, write_vector_csv,
};
use crate::penalty::penalty_value;
use crate::sensing::{orthonormalize_rows, DEFAULT_BUDGET, RANK_TOL, ZERO_TOL};
use crate::shrinkage::{apply_shrinkage, Family, PenaltySpec};
use crate::solvers::{admm_equality_solve, ips_solve, SolverConfig};

#[derive(Parser, Debug)]
#[command(
    name = "shrinkcs",
    version,
    about = "Sparse recovery with nonconvex shrinkage penalties"
)]
#[command(arg_required_else_help = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Seed for randomized steps; overrides the config's seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// JSON config: penalty spec (shrink, penalty-eval, certify), solver
    /// config (solve-*), experiment config (phase-diagram, phantom).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output file (directory for a single phantom reconstruction); stdout if omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
struct PenaltyArgs {
    /// soft, pshrink, firm or hard.
    #[arg(long)]
    family: Option<Family>,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    mu: Option<f64>,
    /// Penalty spec as JSON, e.g. {"family":"firm","lambda":0.5,"mu":1.5}.
    #[arg(long)]
    penalty: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Apply a shrinkage to a vector.
    Shrink {
        #[command(flatten)]
        penalty: PenaltyArgs,
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Tabulate g, g' and the conjugate root at the given points.
    PenaltyEval {
        #[command(flatten)]
        penalty: PenaltyArgs,
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Forward-backward iteration for λG(x) + ½‖Ax − b‖².
    SolveIps {
        #[command(flatten)]
        penalty: PenaltyArgs,
        /// CSV holding [A | b].
        #[arg(long)]
        problem: PathBuf,
    },
    /// ADMM for min G(w) subject to Aw = b; rows are orthonormalized if needed.
    SolveAdmm {
        #[command(flatten)]
        penalty: PenaltyArgs,
        #[arg(long)]
        problem: PathBuf,
    },
    /// Exact-recovery certificate, or the stability bound when --epsilon > 0.
    Certify {
        #[command(flatten)]
        penalty: PenaltyArgs,
        #[arg(long)]
        problem: PathBuf,
        /// Sparsity level; defaults to the number of nonzeros of --x.
        #[arg(long)]
        k: Option<usize>,
        /// Signal to certify (required for the stability bound).
        #[arg(long)]
        x: Option<PathBuf>,
        #[arg(long, default_value_t = 0.0)]
        epsilon: f64,
    },
    /// Recovery phase diagram (or certificate sweep) from an experiment config.
    PhaseDiagram,
    /// Phantom line-count sweep from --config, or one reconstruction.
    Phantom {
        #[command(flatten)]
        penalty: PenaltyArgs,
        #[arg(long, default_value_t = 64)]
        size: usize,
        #[arg(long)]
        lines: Option<usize>,
        #[arg(long)]
        rho: Option<f64>,
        #[arg(long, default_value_t = 5000)]
        max_iters: usize,
        #[arg(long)]
        isotropic: bool,
    },
}

/// Runs the CLI on `argv` (including the program name) and returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
        }
    };
    match dispatch(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn resolve_penalty(args: &PenaltyArgs, config: Option<&Path>) -> Result<PenaltySpec> {
    let spec = if let Some(path) = args.penalty.as_deref().or(config) {
        read_json::<PenaltySpec>(path)?
    } else {
        let family = args
            .family
            .ok_or_else(|| Error::invalid_input("give --family (and parameters) or --penalty"))?;
        let lambda = args
            .lambda
            .ok_or_else(|| Error::invalid_input("--lambda is required"))?;
        PenaltySpec::from_parts(family, lambda, args.p, args.mu)?
    };
    spec.validate()?;
    Ok(spec)
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn emit_json(out: Option<&Path>, value: &serde_json::Value) -> Result<()> {
    match out {
        Some(p) => write_json(p, value),
        None => emit(None, &format!("{}\n", serde_json::to_string_pretty(value)?)),
    }
}

fn solver_config(config: Option<&Path>) -> Result<SolverConfig> {
    config.map_or_else(|| Ok(SolverConfig::default()), read_json)
}

fn dispatch(cli: Cli) -> Result<()> {
    let out = cli.out.as_deref();
    let config = cli.config.as_deref();
    match &cli.command {
        Command::Shrink { penalty, input } => {
            let spec = resolve_penalty(penalty, config)?;
            let y = apply_shrinkage(&spec, &read_vector_csv(input)?)?;
            match out {
                Some(p) => write_vector_csv(p, &y),
                None => emit(
                    None,
                    &y.iter().map(|v| format!("{v:e}\n")).collect::<String>(),
                ),
            }
        }
        Command::PenaltyEval { penalty, input } => {
            let spec = resolve_penalty(penalty, config)?;
            let mut text = String::from("w,g,slope,root_x\n");
            for w in read_vector_csv(input)? {
                let v = penalty_value(&spec, w)?;
                let opt = |o: Option<f64>| o.map_or(String::new(), |x| format!("{x:e}"));
                text.push_str(&format!(
                    "{w:e},{:e},{},{}\n",
                    v.value,
                    opt(v.derivative),
                    opt(v.root_x)
                ));
            }
            emit(out, &text)
        }
        Command::SolveIps { penalty, problem } => {
            let spec = resolve_penalty(penalty, None)?;
            let cfg = solver_config(config)?;
            let prob = read_problem_csv(problem, 0.0)?;
            let r = ips_solve(&prob, &spec, &cfg)?;
            emit_json(out, &json!({ "spec": spec, "config": cfg, "result": r }))
        }
        Command::SolveAdmm { penalty, problem } => {
            let spec = resolve_penalty(penalty, None)?;
            let cfg = solver_config(config)?;
            let mut prob = read_problem_csv(problem, 0.0)?;
            let orthonormalized = !prob.rows_orthonormal;
            if orthonormalized {
                prob = orthonormalize_rows(&prob)?;
            }
            let r = admm_equality_solve(&prob, &spec, &cfg)?;
            emit_json(
                out,
                &json!({ "spec": spec, "config": cfg, "orthonormalized": orthonormalized, "result": r }),
            )
        }
        Command::Certify {
            penalty,
            problem,
            k,
            x,
            epsilon,
        } => {
            let spec = resolve_penalty(penalty, config)?;
            let x = x.as_deref().map(read_vector_csv).transpose()?;
            let provenance = json!({
                "seed": cli.seed,
                "budget": DEFAULT_BUDGET as f64,
                "margin": MARGIN,
                "rank_tol": RANK_TOL,
                "zero_tol": ZERO_TOL,
                "c": C_CONST,
            });
            if *epsilon > 0.0 {
                let x = x.ok_or_else(|| Error::invalid_input("the stability bound needs --x"))?;
                let prob = read_problem_csv(problem, *epsilon)?;
                if !prob.rows_orthonormal {
                    return Err(Error::invalid_input(
                        "the stability bound needs orthonormal rows; orthonormalizing would change the noise model",
                    ));
                }
                let k = k.unwrap_or(prob.m());
                let cert = certify_stability(&spec, &prob, &x, k)?;
                return emit_json(
                    out,
                    &json!({ "kind": "stability", "certificate": cert, "provenance": provenance }),
                );
            }
            let prob = read_problem_csv(problem, 0.0)?;
            let k = match (k, &x) {
                (Some(k), _) => *k,
                (None, Some(x)) => x.iter().filter(|v| v.abs() > ZERO_TOL).count(),
                (None, None) => return Err(Error::invalid_input("give --k or --x")),
            };
            let prob = if prob.rows_orthonormal {
                prob
            } else {
                orthonormalize_rows(&prob)?
            };
            let (alpha, beta) = alpha_beta(&prob)?;
            let mut cert = exact_recovery_check(&spec, alpha, beta, prob.m(), k)?;
            if matches!(spec, PenaltySpec::Firm { .. }) && 2 * k <= prob.m() {
                cert.mu_max = Some(firm_mu_bound(alpha, beta, prob.m(), k)?);
            }
            emit_json(
                out,
                &json!({ "kind": "exact_recovery", "certificate": cert, "provenance": provenance }),
            )
        }
        Command::PhaseDiagram => {
            let path =
                config.ok_or_else(|| Error::invalid_input("phase-diagram needs --config"))?;
            let mut cfg: ExperimentConfig = read_json(path)?;
            if cfg.kind == ExperimentKind::PhantomSweep {
                return Err(Error::invalid_input(
                    "this config is a phantom sweep; use the phantom subcommand",
                ));
            }
            if let Some(s) = cli.seed {
                cfg.seed = s;
            }
            let (written, output) = write_experiment(&cfg, out)?;
            eprintln!("wrote {} ({})", written.display(), output.summary);
            Ok(())
        }
        Command::Phantom {
            penalty,
            size,
            lines,
            rho,
            max_iters,
            isotropic,
        } => {
            if let Some(path) = config {
                let mut cfg: ExperimentConfig = read_json(path)?;
                if cfg.kind != ExperimentKind::PhantomSweep {
                    return Err(Error::invalid_input("phantom needs a phantom_sweep config"));
                }
                if let Some(s) = cli.seed {
                    cfg.seed = s;
                }
                let (written, output) = write_experiment(&cfg, out)?;
                eprintln!("wrote {} ({})", written.display(), output.summary);
                return Ok(());
            }
            let spec = resolve_penalty(penalty, None)?;
            let lines =
                lines.ok_or_else(|| Error::invalid_input("give --lines or a sweep --config"))?;
            let dir = out
                .ok_or_else(|| Error::invalid_input("a single reconstruction needs --out <dir>"))?;
            std::fs::create_dir_all(dir)?;
            let img = shepp_logan(*size);
            let mask = radial_mask(*size, lines, 0.0)?;
            let data = sample_spectrum(&img, &mask)?;
            let tv = TvConfig {
                max_iters: *max_iters,
                rho: *rho,
                isotropic: *isotropic,
                ..TvConfig::default()
            };
            let r = tv_admm_reconstruct(&data, &mask, &spec, &tv)?;
            write_pgm(&dir.join("phantom.pgm"), &img)?;
            write_pgm(&dir.join("reconstruction.pgm"), &r.image)?;
            write_image_csv(&dir.join("reconstruction.csv"), &r.image)?;
            write_mask_csv(&dir.join("mask.csv"), &mask)?;
            let summary = json!({
                "spec": spec,
                "size": size,
                "lines": lines,
                "samples": mask.count(),
                "rel_error": r.image.rel_error(&img),
                "iterations": r.iterations,
                "termination": r.termination,
            });
            write_json(&dir.join("summary.json"), &summary)?;
            eprintln!("{summary}");
            Ok(())
        }
    }
}
