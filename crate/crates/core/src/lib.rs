//! Sparse recovery with nonconvex shrinkage penalties.
//!
//! The crate is organized bottom-up:
//!
//! * [`shrinkage`]: soft, hard, firm and p-shrinkage mappings behind a single
//!   [`PenaltySpec`].
//! * [`penalty`]: the penalty `g` each shrinkage is the proximal map of,
//!   evaluated in closed form (firm) or through a scalar root solve (p-shrinkage).
//! * [`sensing`]: measurement matrices, row orthonormalization, URP checks and
//!   enumeration of basic solutions.
//! * [`solvers`]: iterative p-shrinkage (forward-backward) and an ADMM solver
//!   for the equality-constrained problem.
//! * [`certificates`]: exact-recovery and stability certificates together with
//!   exhaustive oracles to check them against.
//! * [`imaging`]: phantom, radial Fourier masks and TV-type ADMM reconstruction.
//! * [`experiments`]: phase diagrams, certificate sweeps and phantom sweeps.
//! * [`instances`], [`io`] and [`cli`]: seeded test problems, file formats and
//!   the `shrinkcs` command line.
//!
//! ```
//! use shrinkage_cs::{apply_shrinkage, penalty_total, PenaltySpec};
//!
//! let spec = PenaltySpec::pshrink(1.0, 0.5).unwrap();
//! assert_eq!(apply_shrinkage(&spec, &[4.0]).unwrap(), vec![3.5]);
//! assert!((penalty_total(&spec, &[3.5]).unwrap() - 2.375).abs() < 1e-12);
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod certificates;
pub mod cli;
pub mod error;
pub mod experiments;
pub mod imaging;
pub mod instances;
pub mod io;
pub mod numeric;
pub mod penalty;
pub mod sensing;
pub mod shrinkage;
pub mod solvers;

pub use error::{Error, Result};
pub use penalty::{
    g_firm_eval, g_p_deriv, g_p_eval, penalty_total, penalty_value, prox_oracle, solve_x_of_w,
    PenaltyValue,
};
pub use sensing::{BasicSolution, SensingProblem};
pub use shrinkage::{
    apply_shrinkage, firm_threshold, hard_threshold, p_shrink, soft_threshold, Family, PenaltySpec,
};
