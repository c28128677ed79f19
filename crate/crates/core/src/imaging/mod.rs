//! Phantom reconstruction from radial Fourier samples: `min_x G(∇x)` subject
//! to the sampled DFT values of `x`.

mod fourier;
mod mask;
mod phantom;
mod tv;

pub use fourier::{fft2, ifft2, sample_spectrum, Spectrum};
pub use mask::{radial_mask, FourierMask};
pub use phantom::{shepp_logan, SHEPP_LOGAN_ELLIPSES};
pub use tv::{div, grad, tv_admm_reconstruct, TvConfig, TvResult};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Real image, row-major (`pixels[row * width + col]`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ImageGrid {
    pub width: usize,
    pub height: usize,
    pub pixels: Vec<f64>,
}

impl ImageGrid {
    pub fn zeros(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            pixels: vec![0.0; width * height],
        }
    }

    pub fn from_pixels(width: usize, height: usize, pixels: Vec<f64>) -> Result<Self> {
        if pixels.len() != width * height {
            return Err(Error::DimensionMismatch(format!(
                "{} pixels for a {width}x{height} image",
                pixels.len()
            )));
        }
        crate::error::ensure_finite(&pixels, "pixels")?;
        Ok(Self {
            width,
            height,
            pixels,
        })
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.pixels[row * self.width + col]
    }

    pub fn set(&mut self, row: usize, col: usize, v: f64) {
        self.pixels[row * self.width + col] = v;
    }

    pub fn norm(&self) -> f64 {
        self.pixels.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// `‖self − other‖ / ‖other‖`.
    pub fn rel_error(&self, reference: &ImageGrid) -> f64 {
        let diff: f64 = self
            .pixels
            .iter()
            .zip(&reference.pixels)
            .map(|(a, b)| (a - b) * (a - b))
            .sum();
        diff.sqrt() / reference.norm()
    }

    pub fn same_shape(&self, other: &ImageGrid) -> bool {
        self.width == other.width && self.height == other.height
    }
}
