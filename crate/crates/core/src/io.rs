//! CSV, JSON and PGM readers and writers used by the command line and the
//! experiment harness.
//!
//! Matrices are stored one row per line after a `# rows,cols` comment. A
//! problem file holds the augmented matrix `[A | b]`.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::imaging::{FourierMask, ImageGrid};
use crate::sensing::SensingProblem;

fn reader(path: &Path) -> Result<csv::Reader<File>> {
    Ok(csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(true)
        .from_path(path)?)
}

fn read_rows(path: &Path) -> Result<Vec<Vec<f64>>> {
    let mut rows = Vec::new();
    for (line, rec) in reader(path)?.records().enumerate() {
        let rec = rec?;
        let row = rec
            .iter()
            .filter(|f| !f.is_empty())
            .map(|f| f.parse::<f64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| {
                Error::invalid_input(format!("{}: record {}: {e}", path.display(), line + 1))
            })?;
        if !row.is_empty() {
            rows.push(row);
        }
    }
    Ok(rows)
}

/// Reads a dense matrix; every row must have the same length.
pub fn read_matrix_csv(path: &Path) -> Result<DMatrix<f64>> {
    let rows = read_rows(path)?;
    let cols = rows.first().map_or(0, Vec::len);
    if rows.is_empty() || cols == 0 {
        return Err(Error::invalid_input(format!(
            "{}: empty matrix",
            path.display()
        )));
    }
    if let Some(i) = rows.iter().position(|r| r.len() != cols) {
        return Err(Error::DimensionMismatch(format!(
            "{}: row {} has {} entries, expected {cols}",
            path.display(),
            i + 1,
            rows[i].len()
        )));
    }
    let flat: Vec<f64> = rows.concat();
    crate::error::ensure_finite(&flat, "matrix")?;
    Ok(DMatrix::from_row_slice(rows.len(), cols, &flat))
}

pub fn write_matrix_csv(path: &Path, a: &DMatrix<f64>) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    writeln!(out, "# {},{}", a.nrows(), a.ncols())?;
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(out);
    for r in 0..a.nrows() {
        w.write_record(a.row(r).iter().map(|v| format!("{v:e}")))?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a vector stored either one value per line or as a single row.
pub fn read_vector_csv(path: &Path) -> Result<Vec<f64>> {
    let v: Vec<f64> = read_rows(path)?.concat();
    crate::error::ensure_finite(&v, "vector")?;
    Ok(v)
}

pub fn write_vector_csv(path: &Path, v: &[f64]) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    for x in v {
        writeln!(out, "{x:e}")?;
    }
    out.flush()?;
    Ok(())
}

/// Reads `[A | b]` into a problem with noise radius `epsilon`.
pub fn read_problem_csv(path: &Path, epsilon: f64) -> Result<SensingProblem> {
    let aug = read_matrix_csv(path)?;
    if aug.ncols() < 2 {
        return Err(Error::DimensionMismatch(
            "problem file needs at least one column of A plus b".into(),
        ));
    }
    let n = aug.ncols() - 1;
    let a = aug.columns(0, n).into_owned();
    let b = DVector::from_iterator(aug.nrows(), aug.column(n).iter().copied());
    SensingProblem::with_noise(a, b, epsilon)
}

pub fn write_problem_csv(path: &Path, problem: &SensingProblem) -> Result<()> {
    let (m, n) = (problem.m(), problem.n());
    let mut aug = DMatrix::zeros(m, n + 1);
    aug.columns_mut(0, n).copy_from(&problem.a);
    aug.set_column(n, &problem.b);
    write_matrix_csv(path, &aug)
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    Ok(serde_json::from_reader(std::io::BufReader::new(
        File::open(path)?,
    ))?)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    out.flush()?;
    Ok(())
}

/// Full-precision image, one row per line.
pub fn write_image_csv(path: &Path, img: &ImageGrid) -> Result<()> {
    write_matrix_csv(
        path,
        &DMatrix::from_row_slice(img.height, img.width, &img.pixels),
    )
}

pub fn read_image_csv(path: &Path) -> Result<ImageGrid> {
    let m = read_matrix_csv(path)?;
    let pixels = (0..m.nrows())
        .flat_map(|r| m.row(r).iter().copied().collect::<Vec<_>>())
        .collect();
    ImageGrid::from_pixels(m.ncols(), m.nrows(), pixels)
}

/// Mask as `0`/`1` rows in the unshifted DFT layout.
pub fn write_mask_csv(path: &Path, mask: &FourierMask) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    writeln!(out, "# {},{}", mask.size, mask.size)?;
    for row in mask.sampled.chunks(mask.size) {
        let line: Vec<&str> = row.iter().map(|&s| if s { "1" } else { "0" }).collect();
        writeln!(out, "{}", line.join(","))?;
    }
    out.flush()?;
    Ok(())
}

/// 8-bit binary PGM preview; values are clipped to `[0, 1]`.
pub fn write_pgm(path: &Path, img: &ImageGrid) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    write!(out, "P5\n{} {}\n255\n", img.width, img.height)?;
    let bytes: Vec<u8> = img
        .pixels
        .iter()
        .map(|v| (v.clamp(0.0, 1.0) * 255.0).round() as u8)
        .collect();
    out.write_all(&bytes)?;
    out.flush()?;
    Ok(())
}
