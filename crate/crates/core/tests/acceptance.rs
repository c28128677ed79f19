//! Acceptance run: one PASS/FAIL line per criterion.
//!
//! Runs without the libtest harness so the report is printed by plain
//! `cargo test`. The process exits nonzero if an asserted criterion fails.

use std::time::{Duration, Instant};

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use shrinkage_cs::certificates::{
    alpha_beta, certify_stability, exact_recovery_check, find_p_lambda, firm_mu_bound,
    global_min_exhaustive, noisy_alpha_beta, noisy_global_oracle, OracleOptions,
};
use shrinkage_cs::experiments::{phantom_sweep, ExperimentConfig};
use shrinkage_cs::imaging::{div, fft2, grad, ifft2, ImageGrid};
use shrinkage_cs::instances::{noisy_instance, planted_instance, NoisyInstanceOptions};
use shrinkage_cs::penalty::penalty_scalar;
use shrinkage_cs::sensing::{gaussian_matrix, operator_norm};
use shrinkage_cs::solvers::{ips_solve, lambda_min_for_negative_p, SolverConfig, Termination};
use shrinkage_cs::{
    apply_shrinkage, g_p_deriv, g_p_eval, penalty_total, PenaltySpec, SensingProblem,
};

struct Report {
    failures: Vec<String>,
}

impl Report {
    /// Prints the line; a failing `asserted` criterion fails the run.
    fn line(&mut self, name: &str, ok: bool, asserted: bool, detail: String) {
        let tag = if ok { "PASS" } else { "FAIL" };
        let note = if !ok && !asserted {
            " (reported, not asserted)"
        } else {
            ""
        };
        println!("[{tag}] {name}: {detail}{note}");
        if !ok && asserted {
            self.failures.push(name.to_string());
        }
    }
}

fn secs(d: Duration) -> String {
    format!("{:.2}s", d.as_secs_f64())
}

/// Brute-force minimizer of `λ g(w) + ½(w − x)²`: grid between 0 and `x`
/// followed by two local refinements.
fn grid_prox(spec: &PenaltySpec, x: f64) -> f64 {
    let lam = spec.lambda();
    let obj = |w: f64| lam * penalty_scalar(spec, w).unwrap() + 0.5 * (w - x) * (w - x);
    let (mut lo, mut hi) = (x.min(0.0), x.max(0.0));
    let mut best = if obj(0.0) <= obj(x) { 0.0 } else { x };
    for points in [4001usize, 401, 401, 401] {
        let h = (hi - lo) / (points - 1) as f64;
        let mut best_val = obj(best);
        for i in 0..points {
            let w = lo + i as f64 * h;
            let v = obj(w);
            if v < best_val {
                best_val = v;
                best = w;
            }
        }
        lo = (best - 2.0 * h).max(x.min(0.0));
        hi = (best + 2.0 * h).min(x.max(0.0));
    }
    best
}

fn prox_equivalence(r: &mut Report) {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let ps = [-5.0, -1.0, -0.5, 0.0, 0.5, 1.0];
    let mut worst = 0.0f64;
    let mut worst_case = String::new();
    for i in 0..500 {
        let lambda = 10f64.powf(rng.random_range(-2.0..1.0));
        let x = rng.random_range(-20.0..20.0);
        let spec = match i % 4 {
            0 => PenaltySpec::soft(lambda),
            1 | 2 => PenaltySpec::pshrink(lambda, ps[rng.random_range(0..ps.len())]),
            _ => PenaltySpec::firm(lambda, lambda * rng.random_range(1.0..10.0) + 1e-9 * lambda),
        }
        .unwrap();
        let s = apply_shrinkage(&spec, &[x]).unwrap()[0];
        let o = grid_prox(&spec, x);
        if (s - o).abs() > worst {
            worst = (s - o).abs();
            worst_case = format!("{spec} at x={x:.4}");
        }
    }
    r.line(
        "prox-oracle equivalence (500 tuples, tol 1e-5)",
        worst <= 1e-5,
        true,
        format!("max |S(x) - argmin| = {worst:.2e} ({worst_case})"),
    );
}

fn g_p_spot_values(r: &mut Report) {
    let l1 = [-3.0, -0.2, 0.0, 1e-6, 0.7, 12.5]
        .iter()
        .map(|&w| (g_p_eval(w, 0.8, 1.0).unwrap().value - f64::abs(w)).abs())
        .fold(0.0, f64::max);
    let v = g_p_eval(3.5, 1.0, 0.5).unwrap();
    // independent value: g(w) = ∫₀ʷ (x(t) − t)/λ dt with x(t) from bisection on s(x) = t
    let x_of = |t: f64| {
        let s = |x: f64| x - x.powf(-0.5);
        let (mut a, mut b) = (1.0, t + 1.0);
        for _ in 0..200 {
            let mid = 0.5 * (a + b);
            if s(mid) < t {
                a = mid;
            } else {
                b = mid;
            }
        }
        0.5 * (a + b)
    };
    let steps = 20_000;
    let h = 3.5 / steps as f64;
    let f = |t: f64| x_of(t) - t;
    let quad = (0..steps)
        .map(|i| {
            let (a, b) = (i as f64 * h, (i + 1) as f64 * h);
            h / 6.0 * (f(a) + 4.0 * f(0.5 * (a + b)) + f(b))
        })
        .sum::<f64>();
    let bound = g_p_eval(1e8, 1.0, -1.0).unwrap().value;
    let ok = l1 <= 1e-10
        && (v.value - 2.375).abs() <= 1e-10
        && (v.root_x.unwrap() - 4.0).abs() <= 1e-12
        && (quad - 2.375).abs() <= 1e-8
        && (bound - 1.5).abs() <= 1e-4;
    r.line(
        "g_p spot values",
        ok,
        true,
        format!(
            "|g_1 - |w|| = {l1:.1e}; g_0.5(3.5) = {:.12} (root {}), quadrature {quad:.10}; g_-1(1e8) = {bound:.8}",
            v.value,
            v.root_x.unwrap()
        ),
    );
}

fn ista(a: &DMatrix<f64>, b: &DVector<f64>, lambda: f64, iters: usize) -> DVector<f64> {
    let mut x = DVector::zeros(a.ncols());
    for _ in 0..iters {
        let v = &x - a.transpose() * (a * &x - b);
        x = v.map(|t| t.signum() * (t.abs() - lambda).max(0.0));
    }
    x
}

fn ips_behaviour(r: &mut Report) {
    let t0 = Instant::now();
    let (mut mono_bad, mut stat_bad, mut worst_res, mut max_iters) = (0, 0, 0.0f64, 0);
    for seed in 0..100u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = rng.random_range(2..=10);
        let n = rng.random_range(m + 1..=30);
        let g = gaussian_matrix(m, n, seed);
        let a = &g / (operator_norm(&g) * 1.01);
        let mut x = DVector::zeros(n);
        for _ in 0..(m / 2).max(1) {
            x[rng.random_range(0..n)] = rng.random_range(-2.0..2.0);
        }
        let b = &a * &x + DVector::from_fn(m, |_, _| 0.01 * rng.random_range(-1.0..1.0));
        let problem = SensingProblem::new(a, b.clone()).unwrap();
        let spec = match seed % 7 {
            0 => PenaltySpec::soft(0.1),
            1 => PenaltySpec::pshrink(0.1, 1.0),
            2 => PenaltySpec::pshrink(0.1, 0.5),
            3 => PenaltySpec::pshrink(0.1, 0.0),
            4 => PenaltySpec::pshrink(
                1.1 * lambda_min_for_negative_p(-1.0, b.as_slice()).unwrap(),
                -1.0,
            ),
            5 => PenaltySpec::firm(0.1, 0.5),
            _ => PenaltySpec::hard(0.1),
        }
        .unwrap();
        let res = ips_solve(&problem, &spec, &SolverConfig::default()).unwrap();
        if res.objective_trace.windows(2).any(|w| w[1] > w[0] + 1e-12) {
            mono_bad += 1;
        }
        if res.termination == Termination::MaxIters || res.stationarity_residual > 1e-8 {
            stat_bad += 1;
        }
        worst_res = worst_res.max(res.stationarity_residual);
        max_iters = max_iters.max(res.iterations);
    }
    // p = 1 reproduces plain ISTA
    let mut ista_gap = 0.0f64;
    for seed in 0..10u64 {
        let g = gaussian_matrix(6, 20, 100 + seed);
        let a = &g / (operator_norm(&g) * 1.01);
        let b = DVector::from_fn(6, |i, _| (i as f64 + seed as f64).sin());
        let problem = SensingProblem::new(a.clone(), b.clone()).unwrap();
        let cfg = SolverConfig {
            max_iters: 200,
            step_tol: 0.0,
            ..Default::default()
        };
        let res = ips_solve(&problem, &PenaltySpec::pshrink(0.05, 1.0).unwrap(), &cfg).unwrap();
        let reference = ista(&a, &b, 0.05, res.iterations);
        ista_gap = ista_gap.max((DVector::from_vec(res.x_final) - reference).amax());
    }
    let elapsed = t0.elapsed();
    let ok =
        mono_bad == 0 && stat_bad == 0 && ista_gap <= 1e-14 && elapsed < Duration::from_secs(30);
    r.line(
        "IPS behaviour (100 instances, all families)",
        ok,
        true,
        format!(
            "nonmonotone {mono_bad}, residual > 1e-8 {stat_bad} (worst {worst_res:.1e}, max {max_iters} iters), \
             p=1 vs ISTA {ista_gap:.1e}, {}",
            secs(elapsed)
        ),
    );
}

fn exact_recovery(r: &mut Report) {
    let t0 = Instant::now();
    let (mut checked, mut passing, mut counterexamples, mut eligible, mut found) = (0, 0, 0, 0, 0);
    let mut seed = 0u64;
    while checked < 200 {
        seed += 1;
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xacce);
        let m = rng.random_range(2..=6);
        let n = rng.random_range(m + 1..=12);
        let k = rng.random_range(1..=m / 2);
        let inst = planted_instance(m, n, k, seed).unwrap();
        let (alpha, beta) = alpha_beta(&inst.problem).unwrap();
        checked += 1;
        eligible += 1;
        let mut specs = vec![
            PenaltySpec::soft(1.0).unwrap(),
            PenaltySpec::pshrink(0.01, -1.0).unwrap(),
        ];
        if let Ok(c) = find_p_lambda(alpha, beta, m, k) {
            found += 1;
            let (p, l) = c.found_params.unwrap();
            specs.push(PenaltySpec::pshrink(l, p).unwrap());
        }
        let mu = 0.9 * firm_mu_bound(alpha, beta, m, k).unwrap();
        specs.push(PenaltySpec::firm(0.5 * mu, mu).unwrap());
        for spec in specs {
            if !exact_recovery_check(&spec, alpha, beta, m, k)
                .unwrap()
                .passes
            {
                continue;
            }
            passing += 1;
            let w = global_min_exhaustive(&spec, &inst.problem).unwrap();
            let same_support = w
                .iter()
                .zip(inst.x.iter())
                .all(|(a, b)| (*a == 0.0) == (*b == 0.0));
            let close = w
                .iter()
                .zip(inst.x.iter())
                .all(|(a, b)| (a - b).abs() <= 1e-8);
            if !(same_support && close) {
                counterexamples += 1;
            }
        }
    }
    let elapsed = t0.elapsed();
    r.line(
        "exact-recovery soundness (200 instances, n<=12, m<=6)",
        counterexamples == 0 && passing > 0 && elapsed < Duration::from_secs(60),
        true,
        format!(
            "{passing} passing certificates, {counterexamples} counterexamples, {}",
            secs(elapsed)
        ),
    );
    r.line(
        "parameter-search completeness",
        found == eligible,
        true,
        format!("find_p_lambda succeeded on {found}/{eligible} instances with 2k <= m"),
    );
}

fn firm_bound(r: &mut Report) {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut fails = 0;
    for _ in 0..100 {
        let m = rng.random_range(2..=20);
        let k = rng.random_range(1..=m / 2);
        let alpha = rng.random_range(0.1..2.0);
        let beta = alpha * rng.random_range(1.0..20.0);
        let mu = 0.99 * firm_mu_bound(alpha, beta, m, k).unwrap();
        if !exact_recovery_check(&PenaltySpec::firm(0.5 * mu, mu).unwrap(), alpha, beta, m, k)
            .unwrap()
            .passes
        {
            fails += 1;
        }
    }
    let ex = firm_mu_bound(1.0, 10.0, 10, 2).unwrap();
    r.line(
        "firm bound consistency",
        fails == 0 && (ex - 8.4686).abs() < 1e-4,
        true,
        format!("{fails}/100 tuples fail at 0.99x the bound; bound(1, 10, 10, 2) = {ex:.6}"),
    );
}

fn stability(r: &mut Report) {
    let t0 = Instant::now();
    let a = DMatrix::from_row_slice(1, 2, &[0.6, 0.8]);
    let nb = noisy_alpha_beta(
        &SensingProblem::with_noise(a, DVector::from_element(1, 1.0), 0.1).unwrap(),
    )
    .unwrap();
    let example_ok =
        (nb.alpha - 1.125).abs() < 1e-12 && (nb.beta - (5.0 / 3.0 + 1.0 / 6.0)).abs() < 1e-12;
    r.line(
        "noisy alpha/beta worked example",
        example_ok,
        true,
        format!("alpha = {}, beta = {}", nb.alpha, nb.beta),
    );

    // instance family fixed in advance: firm on even seeds, p = -1 on odd seeds
    let (mut certified, mut violations, mut seed) = (0, Vec::new(), 0u64);
    while certified < 50 {
        seed += 1;
        let m = 1 + (seed % 4) as usize;
        let n = (2 * m + 1 + (seed / 4 % 4) as usize).min(10);
        let opts = NoisyInstanceOptions {
            m,
            n,
            tail_scale: 0.02,
            eps_fraction: 0.9,
        };
        let Some(inst) = noisy_instance(&opts, seed).unwrap() else {
            continue;
        };
        let ap = inst.alpha_prime;
        let spec = if seed % 2 == 0 {
            PenaltySpec::firm(0.4 * ap, 0.8 * ap).unwrap()
        } else {
            PenaltySpec::pshrink(0.05 * ap, -1.0).unwrap()
        };
        let Ok(cert) = certify_stability(&spec, &inst.problem, inst.x.as_slice(), m) else {
            continue;
        };
        certified += 1;
        let w = noisy_global_oracle(
            &spec,
            &inst.problem,
            &OracleOptions {
                seed,
                ..Default::default()
            },
        )
        .unwrap();
        let h: Vec<f64> = inst.x.iter().zip(&w.w).map(|(a, b)| a - b).collect();
        let gh = penalty_total(&spec, &h).unwrap();
        if gh > cert.bound {
            violations.push(format!(
                "seed {seed}: G(x - w) = {gh:.4} > {:.4}",
                cert.bound
            ));
        }
    }
    r.line(
        "stability bound (50 noisy instances, n<=10, m<=4)",
        violations.is_empty(),
        false,
        format!(
            "{}/50 within the bound, {}{}",
            50 - violations.len(),
            secs(t0.elapsed()),
            if violations.is_empty() {
                String::new()
            } else {
                format!("; {}", violations.join("; "))
            }
        ),
    );
}

fn phantom(r: &mut Report) {
    let t0 = Instant::now();
    let cfg: ExperimentConfig =
        serde_json::from_str(include_str!("../configs/phantom_64.json")).unwrap();
    let sweep = phantom_sweep(&cfg).unwrap();
    let get = |label: &str| {
        sweep
            .min_lines
            .iter()
            .find(|(l, _)| l == label)
            .and_then(|(_, v)| *v)
    };
    let (l1, p, firm) = (get("l1"), get("p=-1/2"), get("firm"));
    let elapsed = t0.elapsed();
    let ok = match (l1, p, firm) {
        (Some(l1), Some(p), Some(f)) => {
            l1 >= p && p >= f && l1 > f && elapsed < Duration::from_secs(300)
        }
        _ => false,
    };
    r.line(
        "phantom sweep at size 64",
        ok,
        true,
        format!(
            "min lines l1 {l1:?}, p=-1/2 {p:?}, firm {firm:?}, {}",
            secs(elapsed)
        ),
    );
}

fn numerics(r: &mut Report) {
    let g = |w: f64, p: f64| g_p_eval(w, 1.0, p).unwrap().value;
    let mut third_bad = Vec::new();
    let mut grad_worst = 0.0f64;
    for p in [-1.0, 0.0, 0.5] {
        for i in 0..40 {
            let w = 0.05 * 1.2f64.powi(i);
            let h = (w / 20.0).max(1e-3);
            let d3 = (g(w + 2.0 * h, p) - 2.0 * g(w + h, p) + 2.0 * g(w - h, p)
                - g(w - 2.0 * h, p))
                / (2.0 * h * h * h);
            if !(d3 > 0.0) {
                third_bad.push(format!("p={p} w={w:.3}"));
            }
            let e = 1e-5 * w.max(1.0);
            let fd = (g(w + e, p) - g(w - e, p)) / (2.0 * e);
            let exact = g_p_deriv(w, 1.0, p).unwrap();
            grad_worst = grad_worst.max((fd - exact).abs() / exact.abs());
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut rand_img = |w: usize, h: usize| {
        ImageGrid::from_pixels(
            w,
            h,
            (0..w * h).map(|_| rng.random_range(-1.0..1.0)).collect(),
        )
        .unwrap()
    };
    let u = rand_img(64, 64);
    let (px, py) = (rand_img(64, 64), rand_img(64, 64));
    let dot = |a: &ImageGrid, b: &ImageGrid| {
        a.pixels
            .iter()
            .zip(&b.pixels)
            .map(|(x, y)| x * y)
            .sum::<f64>()
    };
    let (gx, gy) = grad(&u);
    let adjoint = (dot(&gx, &px) + dot(&gy, &py) + dot(&u, &div(&px, &py).unwrap())).abs();
    let (back, _) = ifft2(&fft2(&u));
    let round_trip = back
        .pixels
        .iter()
        .zip(&u.pixels)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    r.line(
        "numerical properties",
        third_bad.is_empty() && grad_worst <= 1e-5 && adjoint <= 1e-10 && round_trip <= 1e-10,
        true,
        format!(
            "g''' > 0 at {}/120 points, g' rel err {grad_worst:.1e}, adjoint gap {adjoint:.1e}, DFT round trip {round_trip:.1e}",
            120 - third_bad.len()
        ),
    );
}

fn main() {
    // `cargo test -- <filter>` passes extra arguments; run everything regardless
    let mut report = Report {
        failures: Vec::new(),
    };
    prox_equivalence(&mut report);
    g_p_spot_values(&mut report);
    ips_behaviour(&mut report);
    exact_recovery(&mut report);
    firm_bound(&mut report);
    stability(&mut report);
    phantom(&mut report);
    numerics(&mut report);
    if !report.failures.is_empty() {
        eprintln!("failed: {}", report.failures.join(", "));
        std::process::exit(1);
    }
}
