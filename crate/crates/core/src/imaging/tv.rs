use std::f64::consts::PI;

use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::fourier::Fft2;
use super::{FourierMask, ImageGrid, Spectrum};
use crate::error::{Error, Result};
use crate::shrinkage::PenaltySpec;
use crate::solvers::Termination;

/// Forward differences with periodic wraparound: `(u[·, c+1] − u, u[r+1, ·] − u)`.
pub fn grad(img: &ImageGrid) -> (ImageGrid, ImageGrid) {
    let (w, h) = (img.width, img.height);
    let mut gx = ImageGrid::zeros(w, h);
    let mut gy = ImageGrid::zeros(w, h);
    for r in 0..h {
        for c in 0..w {
            let v = img.get(r, c);
            gx.set(r, c, img.get(r, (c + 1) % w) - v);
            gy.set(r, c, img.get((r + 1) % h, c) - v);
        }
    }
    (gx, gy)
}

/// Negative adjoint of [`grad`]: `⟨grad u, (px, py)⟩ = −⟨u, div(px, py)⟩`.
pub fn div(px: &ImageGrid, py: &ImageGrid) -> Result<ImageGrid> {
    if !px.same_shape(py) {
        return Err(Error::DimensionMismatch(
            "gradient components differ in shape".into(),
        ));
    }
    let (w, h) = (px.width, px.height);
    let mut out = ImageGrid::zeros(w, h);
    for r in 0..h {
        for c in 0..w {
            let v = px.get(r, c) - px.get(r, (c + w - 1) % w) + py.get(r, c)
                - py.get((r + h - 1) % h, c);
            out.set(r, c, v);
        }
    }
    Ok(out)
}

/// Settings for [`tv_admm_reconstruct`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TvConfig {
    pub max_iters: usize,
    /// Stop once `‖x⁺ − x‖ ≤ tol·‖x⁺‖` and `‖∇x − z‖ ≤ tol·‖z‖`.
    pub tol: f64,
    /// ADMM penalty; `None` means `10 λ`.
    pub rho: Option<f64>,
    /// Shrink gradient magnitudes `|(gx, gy)|` instead of each component.
    pub isotropic: bool,
}

impl Default for TvConfig {
    fn default() -> Self {
        Self {
            max_iters: 5000,
            tol: 1e-8,
            rho: None,
            isotropic: false,
        }
    }
}

/// Output of [`tv_admm_reconstruct`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TvResult {
    pub image: ImageGrid,
    pub iterations: usize,
    pub termination: Termination,
    /// `‖∇x − z‖` after each iteration.
    pub primal_residuals: Vec<f64>,
    /// Largest `|imaginary part|` discarded from the last inverse DFT.
    pub max_imag: f64,
}

/// ADMM for `min_x G(∇x)` subject to `(F x)_k = data_k` on the mask.
///
/// The `x`-step minimizes `‖∇x − (z − u)‖²` exactly under the data
/// constraint: `∇ᵀ∇` is diagonal under the DFT, so off the mask
/// `X = F(∇ᵀ(z − u)) / K` and on the mask `X = data`. The `z`-step applies
/// the spec's shrinkage with threshold `λ/ρ`.
pub fn tv_admm_reconstruct(
    data: &Spectrum,
    mask: &FourierMask,
    spec: &PenaltySpec,
    config: &TvConfig,
) -> Result<TvResult> {
    spec.validate()?;
    let n = mask.size;
    if data.width != n || data.height != n || mask.sampled.len() != n * n {
        return Err(Error::DimensionMismatch(format!(
            "data {}x{} vs mask of size {n}",
            data.width, data.height
        )));
    }
    if !mask.sampled[0] {
        return Err(Error::invalid_input("the DC frequency must be sampled"));
    }
    let rho = config.rho.unwrap_or(10.0 * spec.lambda());
    if !(rho > 0.0 && rho.is_finite()) || !(config.tol > 0.0) || config.max_iters == 0 {
        return Err(Error::invalid_param(
            "need rho > 0, tol > 0 and max_iters >= 1",
        ));
    }
    let inner = spec.with_lambda(spec.lambda() / rho);
    inner.validate()?;

    let four_sin2 = |k: usize| 4.0 * (PI * k as f64 / n as f64).sin().powi(2);
    let kdiag: Vec<f64> = (0..n * n)
        .map(|i| four_sin2(i % n) + four_sin2(i / n))
        .collect();

    let mut fft = Fft2::new(n, n);
    let mut buf = vec![Complex64::default(); n * n];
    let mut x = ImageGrid::zeros(n, n);
    let (mut zx, mut zy) = (ImageGrid::zeros(n, n), ImageGrid::zeros(n, n));
    let (mut ux, mut uy) = (ImageGrid::zeros(n, n), ImageGrid::zeros(n, n));
    let mut primal_residuals = Vec::new();
    let mut termination = Termination::MaxIters;
    let mut max_imag = 0.0;
    let mut iterations = 0;

    for it in 0..config.max_iters {
        // x-step
        let vx = diff(&zx, &ux);
        let vy = diff(&zy, &uy);
        let q = div(&vx, &vy)?;
        for (b, &v) in buf.iter_mut().zip(&q.pixels) {
            *b = Complex64::new(-v, 0.0);
        }
        fft.transform(&mut buf, false);
        for i in 0..n * n {
            buf[i] = if mask.sampled[i] {
                data.data[i]
            } else {
                buf[i] / kdiag[i]
            };
        }
        fft.transform(&mut buf, true);
        max_imag = buf.iter().map(|v| v.im.abs()).fold(0.0, f64::max);
        let mut change = 0.0;
        for (p, b) in x.pixels.iter_mut().zip(&buf) {
            change += (b.re - *p) * (b.re - *p);
            *p = b.re;
        }

        // z- and dual steps
        let (gx, gy) = grad(&x);
        let mut primal = 0.0;
        let mut znorm = 0.0;
        for i in 0..n * n {
            let (tx, ty) = (gx.pixels[i] + ux.pixels[i], gy.pixels[i] + uy.pixels[i]);
            let (sx, sy) = if config.isotropic {
                let mag = tx.hypot(ty);
                let scale = if mag > 0.0 {
                    inner.shrink_scalar(mag) / mag
                } else {
                    0.0
                };
                (tx * scale, ty * scale)
            } else {
                (inner.shrink_scalar(tx), inner.shrink_scalar(ty))
            };
            zx.pixels[i] = sx;
            zy.pixels[i] = sy;
            ux.pixels[i] = tx - sx;
            uy.pixels[i] = ty - sy;
            primal += (gx.pixels[i] - sx).powi(2) + (gy.pixels[i] - sy).powi(2);
            znorm += sx * sx + sy * sy;
        }
        let primal = primal.sqrt();
        primal_residuals.push(primal);
        iterations = it + 1;
        if change.sqrt() <= config.tol * x.norm() && primal <= config.tol * znorm.sqrt().max(1.0) {
            termination = Termination::Converged;
            break;
        }
    }

    Ok(TvResult {
        image: x,
        iterations,
        termination,
        primal_residuals,
        max_imag,
    })
}

fn diff(a: &ImageGrid, b: &ImageGrid) -> ImageGrid {
    let pixels = a.pixels.iter().zip(&b.pixels).map(|(p, q)| p - q).collect();
    ImageGrid {
        width: a.width,
        height: a.height,
        pixels,
    }
}
