//! Seeded random test instances: planted sparse signals and noisy problems
//! that satisfy the preconditions of the stability bound.

use nalgebra::DVector;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::certificates::{noisy_alpha_beta, projected_error_bounds, tail_inf_norm, NoisyBounds};
use crate::error::{Error, Result};
use crate::sensing::{gaussian_matrix_from, orthonormalize_rows, SensingProblem};

/// A problem together with the signal that generated it.
#[derive(Clone, Debug)]
pub struct PlantedInstance {
    pub problem: SensingProblem,
    pub x: DVector<f64>,
    /// Sorted support of the planted signal.
    pub support: Vec<usize>,
}

/// `k` entries `±(1 + U[0, 1])` on a uniformly random support.
pub fn planted_signal<R: Rng>(n: usize, k: usize, rng: &mut R) -> (DVector<f64>, Vec<usize>) {
    let mut support = sample(rng, n, k).into_vec();
    support.sort_unstable();
    let mut x = DVector::zeros(n);
    for &i in &support {
        let mag = 1.0 + rng.random::<f64>();
        x[i] = if rng.random::<bool>() { mag } else { -mag };
    }
    (x, support)
}

/// Gaussian `A` with orthonormalized rows, planted `k`-sparse `x`, `b = Ax`.
pub fn planted_instance(m: usize, n: usize, k: usize, seed: u64) -> Result<PlantedInstance> {
    if k > n || m >= n || m == 0 {
        return Err(Error::invalid_param(format!(
            "need 0 < m < n and k <= n, got m={m}, n={n}, k={k}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a = gaussian_matrix_from(m, n, &mut rng);
    let (x, support) = planted_signal(n, k, &mut rng);
    let raw = SensingProblem::new(a.clone(), &a * &x)?;
    let problem = orthonormalize_rows(&raw)?;
    Ok(PlantedInstance {
        problem,
        x,
        support,
    })
}

/// A noisy instance satisfying the noisy and projected bound preconditions.
#[derive(Clone, Debug)]
pub struct NoisyInstance {
    pub problem: SensingProblem,
    pub x: DVector<f64>,
    /// The `k = m` largest entries of `x`.
    pub support: Vec<usize>,
    pub noise: DVector<f64>,
    pub bounds: NoisyBounds,
    pub alpha_prime: f64,
    pub beta_prime: f64,
}

/// Parameters for [`noisy_instance`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoisyInstanceOptions {
    pub m: usize,
    pub n: usize,
    /// Magnitude cap of the entries outside the `m` leading ones.
    pub tail_scale: f64,
    /// Fraction of the admissible noise radius to use, in `(0, 1)`.
    pub eps_fraction: f64,
}

/// Draws `A` (orthonormal rows), `x` with `m` leading entries `±(1 + U)` and
/// a small tail, and noise `e`, then shrinks `ε` until every precondition of
/// the noisy and projected bounds holds with `‖e‖ ≤ ε`.
///
/// With fewer than `m` leading entries some basic solution would contain an
/// entry of the size of the noise itself, so `α_S/‖A_S⁻¹‖ ≤ ε` for that
/// support and no admissible radius exists; hence `k = m`.
/// Returns `Ok(None)` when no radius down to `1e−6` works.
pub fn noisy_instance(opts: &NoisyInstanceOptions, seed: u64) -> Result<Option<NoisyInstance>> {
    let NoisyInstanceOptions {
        m,
        n,
        tail_scale,
        eps_fraction,
    } = *opts;
    if !(0 < m && m < n) || !(eps_fraction > 0.0 && eps_fraction < 1.0) {
        return Err(Error::invalid_param(
            "noisy_instance needs 0 < m < n and eps_fraction in (0, 1)",
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a = gaussian_matrix_from(m, n, &mut rng);
    let ortho = orthonormalize_rows(&SensingProblem::new(a, DVector::zeros(m))?)?;
    let a = ortho.a;
    let (mut x, support) = planted_signal(n, m, &mut rng);
    for i in (0..n).filter(|i| !support.contains(i)) {
        if rng.random::<bool>() {
            x[i] = tail_scale * (2.0 * rng.random::<f64>() - 1.0);
        }
    }
    let dir = DVector::from_fn(m, |_, _| -> f64 { StandardNormal.sample(&mut rng) }).normalize();
    let noise_frac: f64 = rng.random();
    let clean = &a * &x;
    let tail = tail_inf_norm(x.as_slice(), &support);

    let admissible = |eps: f64| -> bool {
        let b = &clean + &dir * (eps * noise_frac);
        let Ok(problem) = SensingProblem::with_noise(a.clone(), b, eps) else {
            return false;
        };
        let Ok(bounds) = noisy_alpha_beta(&problem) else {
            return false;
        };
        bounds.alpha_s_min > tail
            && projected_error_bounds(&bounds, x.as_slice(), &support, eps)
                .is_ok_and(|(ap, _)| ap > 0.0)
    };
    let mut eps = 1.0;
    while !admissible(eps) {
        eps *= 0.5;
        if eps < 1e-6 {
            return Ok(None);
        }
    }
    // step back from the boundary by the requested fraction
    let eps = eps * eps_fraction;
    let noise = &dir * (eps * noise_frac);
    let problem = SensingProblem::with_noise(a, &clean + &noise, eps)?;
    let Ok(bounds) = noisy_alpha_beta(&problem) else {
        return Ok(None);
    };
    let Ok((alpha_prime, beta_prime)) =
        projected_error_bounds(&bounds, x.as_slice(), &support, eps)
    else {
        return Ok(None);
    };
    Ok(Some(NoisyInstance {
        problem,
        x,
        support,
        noise,
        bounds,
        alpha_prime,
        beta_prime,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn planted_instance_is_consistent() {
        let inst = planted_instance(4, 9, 2, 3).unwrap();
        assert!(inst.problem.rows_orthonormal);
        assert!((&inst.problem.a * &inst.x - &inst.problem.b).norm() < 1e-12);
        assert_eq!(inst.support.len(), 2);
        for &i in &inst.support {
            assert!((1.0..=2.0).contains(&inst.x[i].abs()));
        }
        let again = planted_instance(4, 9, 2, 3).unwrap();
        assert_eq!(inst.x, again.x);
    }

    #[test]
    fn noisy_instance_satisfies_preconditions() {
        let opts = NoisyInstanceOptions {
            m: 2,
            n: 7,
            tail_scale: 0.01,
            eps_fraction: 0.5,
        };
        let mut found = 0;
        for seed in 0..20 {
            if let Some(inst) = noisy_instance(&opts, seed).unwrap() {
                found += 1;
                let eps = inst.problem.epsilon;
                assert!(inst.noise.norm() <= eps);
                assert!(eps < inst.bounds.eps_max);
                assert!(inst.alpha_prime > 0.0);
            }
        }
        assert!(found >= 15, "{found}");
    }
}
