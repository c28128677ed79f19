//! Measurement matrices: generation, row orthonormalization, URP checks,
//! operator norms and enumeration of basic (≤ m-sparse) feasible solutions.
//!
//! Random matrices come from `ChaCha8Rng` (crate `rand_chacha` 0.9) seeded
//! with `seed_from_u64`, and standard normals from `rand_distr::StandardNormal`
//! (0.5); the stream is platform independent.

use itertools::Itertools;
use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Singular values below `RANK_TOL · σ_max` count as zero.
pub const RANK_TOL: f64 = 1e-10;
/// Default cap on the number of supports enumerated.
pub const DEFAULT_BUDGET: u128 = 1_000_000;
/// Entries of basic solutions below this magnitude are treated as zero.
pub const ZERO_TOL: f64 = 1e-10;

/// `A w = b` (or `‖A w − b‖ ≤ ε`) with an `m × n`, `m < n` matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct SensingProblem {
    pub a: DMatrix<f64>,
    pub b: DVector<f64>,
    pub epsilon: f64,
    pub rows_orthonormal: bool,
}

impl SensingProblem {
    /// Checks shapes and detects orthonormal rows.
    pub fn new(a: DMatrix<f64>, b: DVector<f64>) -> Result<Self> {
        Self::with_noise(a, b, 0.0)
    }

    pub fn with_noise(a: DMatrix<f64>, b: DVector<f64>, epsilon: f64) -> Result<Self> {
        let (m, n) = a.shape();
        if m == 0 || m >= n {
            return Err(Error::DimensionMismatch(format!(
                "need 0 < m < n, got {m}x{n}"
            )));
        }
        if b.len() != m {
            return Err(Error::DimensionMismatch(format!(
                "b has length {}, expected {m}",
                b.len()
            )));
        }
        if !(epsilon >= 0.0 && epsilon.is_finite()) {
            return Err(Error::invalid_param(format!(
                "noise radius must be >= 0, got {epsilon}"
            )));
        }
        if a.iter().chain(b.iter()).any(|v| !v.is_finite()) {
            return Err(Error::invalid_input(
                "matrix or measurements contain non-finite values",
            ));
        }
        let rows_orthonormal = orthonormality_defect(&a) <= RANK_TOL;
        Ok(SensingProblem {
            a,
            b,
            epsilon,
            rows_orthonormal,
        })
    }

    pub fn m(&self) -> usize {
        self.a.nrows()
    }

    pub fn n(&self) -> usize {
        self.a.ncols()
    }
}

/// `‖A Aᵀ − I‖_max`.
pub fn orthonormality_defect(a: &DMatrix<f64>) -> f64 {
    let g = a * a.transpose();
    let mut worst = 0.0f64;
    for i in 0..g.nrows() {
        for j in 0..g.ncols() {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((g[(i, j)] - target).abs());
        }
    }
    worst
}

/// A feasible vector supported on at most `m` indices.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BasicSolution {
    /// Sorted support.
    pub support: Vec<usize>,
    /// Values on `support`, same order.
    pub values: Vec<f64>,
    pub residual: f64,
}

impl BasicSolution {
    pub fn to_dense(&self, n: usize) -> DVector<f64> {
        let mut v = DVector::zeros(n);
        for (&i, &x) in self.support.iter().zip(&self.values) {
            v[i] = x;
        }
        v
    }

    pub fn sparsity(&self) -> usize {
        self.support.len()
    }
}

/// Replaces `(A, b)` by `(E A, E b)` with `E A (E A)ᵀ = I`.
///
/// Uses the thin QR factorization `Aᵀ = Q R` with `diag(R) > 0`, so that
/// `E = R^{−T}` and `E A = Qᵀ`. Already orthonormal input is returned
/// unchanged up to rounding.
pub fn orthonormalize_rows(problem: &SensingProblem) -> Result<SensingProblem> {
    let (m, _) = problem.a.shape();
    let qr = problem.a.transpose().qr();
    let mut q = qr.q();
    let mut r = qr.r();
    let scale = (0..m).map(|i| r[(i, i)].abs()).fold(0.0, f64::max);
    for i in 0..m {
        let d = r[(i, i)];
        if d.abs() <= RANK_TOL * scale || scale == 0.0 {
            return Err(Error::RankDeficient(format!(
                "row {i} of A is linearly dependent on the others"
            )));
        }
        if d < 0.0 {
            q.column_mut(i).neg_mut();
            r.row_mut(i).neg_mut();
        }
    }
    let rt = r.transpose();
    let eb = rt
        .solve_lower_triangular(&problem.b)
        .ok_or_else(|| Error::RankDeficient("triangular factor is singular".into()))?;
    Ok(SensingProblem {
        a: q.transpose(),
        b: eb,
        epsilon: problem.epsilon,
        rows_orthonormal: true,
    })
}

/// Outcome of a URP check.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum UrpReport {
    /// Every `m`-column submatrix was examined.
    Exhaustive { holds: bool },
    /// Only `samples` random supports were examined; `holds` means none failed.
    Sampled { holds: bool, samples: usize },
}

impl UrpReport {
    pub fn holds(&self) -> bool {
        match *self {
            UrpReport::Exhaustive { holds } | UrpReport::Sampled { holds, .. } => holds,
        }
    }
}

/// Options for [`check_urp_with`].
#[derive(Clone, Copy, Debug)]
pub struct UrpOptions {
    pub budget: u128,
    /// Number of random supports to test when the budget is exceeded; `None` errors instead.
    pub randomized: Option<usize>,
    pub seed: u64,
    pub rank_tol: f64,
}

impl Default for UrpOptions {
    fn default() -> Self {
        UrpOptions {
            budget: DEFAULT_BUDGET,
            randomized: None,
            seed: 0,
            rank_tol: RANK_TOL,
        }
    }
}

/// `C(n, k)` saturating at `u128::MAX`.
pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = match acc.checked_mul((n - i) as u128) {
            Some(v) => v / (i as u128 + 1),
            None => return u128::MAX,
        };
    }
    acc
}

fn columns(a: &DMatrix<f64>, support: &[usize]) -> DMatrix<f64> {
    a.select_columns(support)
}

fn smallest_singular_value(m: &DMatrix<f64>) -> f64 {
    m.singular_values()
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min)
}

/// Exhaustive URP check: every `m` columns of `A` are linearly independent.
pub fn check_urp(a: &DMatrix<f64>) -> Result<bool> {
    check_urp_with(a, &UrpOptions::default()).map(|r| r.holds())
}

pub fn check_urp_with(a: &DMatrix<f64>, opts: &UrpOptions) -> Result<UrpReport> {
    let (m, n) = a.shape();
    let sigma_max = a.singular_values().max();
    if sigma_max == 0.0 {
        return Ok(UrpReport::Exhaustive { holds: false });
    }
    let threshold = opts.rank_tol * sigma_max;
    let independent = |s: &[usize]| smallest_singular_value(&columns(a, s)) > threshold;
    let count = binomial(n, m);
    if m <= 20 && count <= opts.budget {
        let combos: Vec<Vec<usize>> = (0..n).combinations(m).collect();
        let holds = combos.par_iter().all(|s| independent(s));
        return Ok(UrpReport::Exhaustive { holds });
    }
    let samples = opts.randomized.ok_or(Error::BudgetExceeded {
        count,
        budget: opts.budget,
    })?;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let holds = (0..samples).all(|_| {
        let mut s = rand::seq::index::sample(&mut rng, n, m).into_vec();
        s.sort_unstable();
        independent(&s)
    });
    Ok(UrpReport::Sampled { holds, samples })
}

/// `m × n` matrix of i.i.d. standard normals.
pub fn gaussian_matrix(m: usize, n: usize, seed: u64) -> DMatrix<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    gaussian_matrix_from(m, n, &mut rng)
}

pub fn gaussian_matrix_from<R: rand::Rng>(m: usize, n: usize, rng: &mut R) -> DMatrix<f64> {
    // row-major fill so the stream maps to A[i, j] in reading order
    DMatrix::from_row_iterator(m, n, (0..m * n).map(|_| StandardNormal.sample(rng)))
}

/// Largest singular value by power iteration on the smaller Gram matrix.
///
/// Stops once the eigen-residual `‖G v − θ v‖` drops below `1e−10 θ`, which
/// bounds the relative error of `σ = √θ` by about `5e−11`.
pub fn operator_norm(a: &DMatrix<f64>) -> f64 {
    let gram = if a.nrows() <= a.ncols() {
        a * a.transpose()
    } else {
        a.transpose() * a
    };
    let dim = gram.nrows();
    if dim == 0 || gram.iter().all(|&v| v == 0.0) {
        return 0.0;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut v = DVector::from_iterator(
        dim,
        (0..dim).map(|_| {
            let z: f64 = StandardNormal.sample(&mut rng);
            1.0 + 0.5 * z
        }),
    );
    v.normalize_mut();
    let mut theta = 0.0;
    for _ in 0..200_000 {
        let gv = &gram * &v;
        theta = v.dot(&gv);
        let resid = (&gv - &v * theta).norm();
        if resid <= 1e-10 * theta.abs() {
            break;
        }
        let norm = gv.norm();
        if norm == 0.0 {
            break;
        }
        v = gv / norm;
    }
    theta.max(0.0).sqrt()
}

/// Solves `A_S w_S = b` for every support of size `m`, drops entries below
/// [`ZERO_TOL`] and deduplicates. The result is sorted by support.
pub fn enumerate_basic_solutions(problem: &SensingProblem) -> Result<Vec<BasicSolution>> {
    enumerate_basic_solutions_with_budget(problem, DEFAULT_BUDGET)
}

pub fn enumerate_basic_solutions_with_budget(
    problem: &SensingProblem,
    budget: u128,
) -> Result<Vec<BasicSolution>> {
    let (m, n) = problem.a.shape();
    let count = binomial(n, m);
    if count > budget {
        return Err(Error::BudgetExceeded { count, budget });
    }
    let combos: Vec<Vec<usize>> = (0..n).combinations(m).collect();
    let solved: Vec<Result<BasicSolution>> = combos
        .par_iter()
        .map(|support| solve_on_support(problem, support))
        .collect();
    let mut out: Vec<BasicSolution> = Vec::new();
    for sol in solved {
        let sol = sol?;
        if !out.iter().any(|o| same_solution(o, &sol)) {
            out.push(sol);
        }
    }
    out.sort_by(|x, y| x.support.cmp(&y.support));
    Ok(out)
}

fn same_solution(a: &BasicSolution, b: &BasicSolution) -> bool {
    a.support == b.support
        && a.values
            .iter()
            .zip(&b.values)
            .all(|(x, y)| (x - y).abs() <= 1e-9 * x.abs().max(y.abs()).max(1.0))
}

fn solve_on_support(problem: &SensingProblem, support: &[usize]) -> Result<BasicSolution> {
    let a_s = columns(&problem.a, support);
    let lu = a_s.clone().lu();
    let w = lu.solve(&problem.b).ok_or_else(|| {
        Error::RankDeficient(format!(
            "columns {support:?} are linearly dependent (URP fails)"
        ))
    })?;
    let residual = (&a_s * &w - &problem.b).norm();
    let scale = w.amax().max(1.0);
    let mut sup = Vec::with_capacity(support.len());
    let mut vals = Vec::with_capacity(support.len());
    for (&i, &v) in support.iter().zip(w.iter()) {
        if v.abs() > ZERO_TOL * scale {
            sup.push(i);
            vals.push(v);
        }
    }
    Ok(BasicSolution {
        support: sup,
        values: vals,
        residual,
    })
}
