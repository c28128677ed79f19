use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Sampled frequencies in the unshifted DFT layout (`sampled[ky * size + kx]`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FourierMask {
    pub size: usize,
    pub lines: usize,
    pub sampled: Vec<bool>,
}

impl FourierMask {
    /// Every frequency sampled.
    pub fn full(size: usize) -> Self {
        Self {
            size,
            lines: size,
            sampled: vec![true; size * size],
        }
    }

    pub fn count(&self) -> usize {
        self.sampled.iter().filter(|&&s| s).count()
    }

    /// True when `k` sampled implies `−k` sampled.
    pub fn is_symmetric(&self) -> bool {
        let n = self.size;
        (0..n).all(|ky| {
            (0..n).all(|kx| {
                self.sampled[ky * n + kx] == self.sampled[((n - ky) % n) * n + (n - kx) % n]
            })
        })
    }

    fn mark(&mut self, kx: i64, ky: i64) {
        let n = self.size as i64;
        let (x, y) = (kx.rem_euclid(n) as usize, ky.rem_euclid(n) as usize);
        self.sampled[y * self.size + x] = true;
        self.sampled[((self.size - y) % self.size) * self.size + (self.size - x) % self.size] =
            true;
    }
}

/// Bresenham line from `(x0, y0)` to `(x1, y1)`, endpoints included.
fn bresenham(x0: i64, y0: i64, x1: i64, y1: i64, mut plot: impl FnMut(i64, i64)) {
    let (dx, dy) = ((x1 - x0).abs(), -(y1 - y0).abs());
    let (sx, sy) = (if x0 < x1 { 1 } else { -1 }, if y0 < y1 { 1 } else { -1 });
    let (mut x, mut y, mut err) = (x0, y0, dx + dy);
    loop {
        plot(x, y);
        if x == x1 && y == y1 {
            break;
        }
        let e2 = 2 * err;
        if e2 >= dy {
            err += dy;
            x += sx;
        }
        if e2 <= dx {
            err += dx;
            y += sy;
        }
    }
}

/// `n_lines` lines through DC at angles `offset + πj/n_lines`, each drawn
/// across the centred frequency square and mirrored through the origin.
pub fn radial_mask(size: usize, n_lines: usize, offset: f64) -> Result<FourierMask> {
    if size < 2 || n_lines == 0 || n_lines > size {
        return Err(Error::invalid_param(format!(
            "need 1 <= n_lines <= size, got {n_lines} lines at size {size}"
        )));
    }
    if !offset.is_finite() {
        return Err(Error::invalid_param("angle offset must be finite"));
    }
    let mut mask = FourierMask {
        size,
        lines: n_lines,
        sampled: vec![false; size * size],
    };
    let half = (size / 2) as f64;
    for j in 0..n_lines {
        let theta = offset + PI * j as f64 / n_lines as f64;
        let (s, c) = theta.sin_cos();
        // scale the direction to touch the square's edge
        let r = half / c.abs().max(s.abs());
        let (ex, ey) = ((r * c).round() as i64, (r * s).round() as i64);
        bresenham(-ex, -ey, ex, ey, |x, y| mask.mark(x, y));
    }
    Ok(mask)
}
