use std::sync::Arc;

use super::{FourierMask, ImageGrid};
use crate::error::{Error, Result};
use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

/// Complex 2-D array in the unshifted DFT layout (DC at index 0).
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum {
    pub width: usize,
    pub height: usize,
    pub data: Vec<Complex64>,
}

/// Unitary 2-D DFT with cached row and column plans.
pub(crate) struct Fft2 {
    width: usize,
    height: usize,
    row_fwd: Arc<dyn Fft<f64>>,
    row_inv: Arc<dyn Fft<f64>>,
    col_fwd: Arc<dyn Fft<f64>>,
    col_inv: Arc<dyn Fft<f64>>,
    column: Vec<Complex64>,
    scratch: Vec<Complex64>,
}

impl Fft2 {
    pub(crate) fn new(width: usize, height: usize) -> Self {
        let mut planner = FftPlanner::new();
        let row_fwd = planner.plan_fft_forward(width);
        let row_inv = planner.plan_fft_inverse(width);
        let col_fwd = planner.plan_fft_forward(height);
        let col_inv = planner.plan_fft_inverse(height);
        let scratch_len = [&row_fwd, &row_inv, &col_fwd, &col_inv]
            .iter()
            .map(|f| f.get_inplace_scratch_len())
            .max()
            .unwrap_or(0);
        Self {
            width,
            height,
            row_fwd,
            row_inv,
            col_fwd,
            col_inv,
            column: vec![Complex64::default(); height],
            scratch: vec![Complex64::default(); scratch_len],
        }
    }

    pub(crate) fn transform(&mut self, data: &mut [Complex64], inverse: bool) {
        let (w, h) = (self.width, self.height);
        let (row, col) = if inverse {
            (&self.row_inv, &self.col_inv)
        } else {
            (&self.row_fwd, &self.col_fwd)
        };
        for r in data.chunks_exact_mut(w) {
            row.process_with_scratch(r, &mut self.scratch);
        }
        for c in 0..w {
            for r in 0..h {
                self.column[r] = data[r * w + c];
            }
            col.process_with_scratch(&mut self.column, &mut self.scratch);
            for r in 0..h {
                data[r * w + c] = self.column[r];
            }
        }
        let scale = 1.0 / ((w * h) as f64).sqrt();
        data.iter_mut().for_each(|v| *v *= scale);
    }
}

/// Unitary forward DFT of a real image.
pub fn fft2(img: &ImageGrid) -> Spectrum {
    let mut data: Vec<Complex64> = img.pixels.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    Fft2::new(img.width, img.height).transform(&mut data, false);
    Spectrum {
        width: img.width,
        height: img.height,
        data,
    }
}

/// Unitary inverse DFT; returns the real part and the largest `|imaginary part|`.
pub fn ifft2(spec: &Spectrum) -> (ImageGrid, f64) {
    let mut data = spec.data.clone();
    Fft2::new(spec.width, spec.height).transform(&mut data, true);
    let max_imag = data.iter().map(|v| v.im.abs()).fold(0.0, f64::max);
    let pixels = data.iter().map(|v| v.re).collect();
    (
        ImageGrid {
            width: spec.width,
            height: spec.height,
            pixels,
        },
        max_imag,
    )
}

/// DFT of `img` with unsampled frequencies set to zero.
pub fn sample_spectrum(img: &ImageGrid, mask: &FourierMask) -> Result<Spectrum> {
    if img.width != mask.size || img.height != mask.size {
        return Err(Error::DimensionMismatch(format!(
            "image {}x{} vs mask of size {}",
            img.width, img.height, mask.size
        )));
    }
    let mut s = fft2(img);
    for (v, &keep) in s.data.iter_mut().zip(&mask.sampled) {
        if !keep {
            *v = Complex64::default();
        }
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn round_trip_and_parseval() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let pixels: Vec<f64> = (0..24 * 16).map(|_| rng.random::<f64>() - 0.5).collect();
        let img = ImageGrid::from_pixels(24, 16, pixels).unwrap();
        let s = fft2(&img);
        let energy: f64 = s.data.iter().map(|v| v.norm_sqr()).sum();
        assert!((energy.sqrt() - img.norm()).abs() < 1e-12);
        let (back, imag) = ifft2(&s);
        assert!(imag < 1e-12);
        let err = back
            .pixels
            .iter()
            .zip(&img.pixels)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(err < 1e-12);
    }

    #[test]
    fn dc_is_scaled_mean() {
        let img = ImageGrid::from_pixels(4, 4, vec![2.0; 16]).unwrap();
        let s = fft2(&img);
        assert!((s.data[0].re - 8.0).abs() < 1e-14);
        assert!(s.data[1..].iter().all(|v| v.norm() < 1e-14));
    }
}
