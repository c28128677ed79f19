use super::ImageGrid;

/// `(intensity, semi-axis a, semi-axis b, centre x, centre y, angle in degrees)`
/// of the ten-ellipse phantom, with the high-contrast intensities that keep
/// the image in `[0, 1]`.
pub const SHEPP_LOGAN_ELLIPSES: [[f64; 6]; 10] = [
    [1.0, 0.69, 0.92, 0.0, 0.0, 0.0],
    [-0.8, 0.6624, 0.874, 0.0, -0.0184, 0.0],
    [-0.2, 0.11, 0.31, 0.22, 0.0, -18.0],
    [-0.2, 0.16, 0.41, -0.22, 0.0, 18.0],
    [0.1, 0.21, 0.25, 0.0, 0.35, 0.0],
    [0.1, 0.046, 0.046, 0.0, 0.1, 0.0],
    [0.1, 0.046, 0.046, 0.0, -0.1, 0.0],
    [0.1, 0.046, 0.023, -0.08, -0.605, 0.0],
    [0.1, 0.023, 0.023, 0.0, -0.606, 0.0],
    [0.1, 0.023, 0.046, 0.06, -0.605, 0.0],
];

/// Shepp–Logan phantom on a `size × size` grid covering `[−1, 1]²`, each
/// pixel sampled at its centre. Row 0 is the top (`y = 1`).
pub fn shepp_logan(size: usize) -> ImageGrid {
    let mut img = ImageGrid::zeros(size, size);
    let h = 2.0 / size as f64;
    for row in 0..size {
        let y = 1.0 - (row as f64 + 0.5) * h;
        for col in 0..size {
            let x = -1.0 + (col as f64 + 0.5) * h;
            let mut v = 0.0;
            for &[rho, a, b, x0, y0, deg] in &SHEPP_LOGAN_ELLIPSES {
                let (s, c) = deg.to_radians().sin_cos();
                let (dx, dy) = (x - x0, y - y0);
                let u = (dx * c + dy * s) / a;
                let w = (-dx * s + dy * c) / b;
                if u * u + w * w <= 1.0 {
                    v += rho;
                }
            }
            img.set(row, col, v);
        }
    }
    img
}
