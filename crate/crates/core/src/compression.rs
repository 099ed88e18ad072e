//! Measurement matrices, regressor compression, and the online
//! measurement-matrix update.
//!
//! The update descends the instantaneous cost
//!
//! ```text
//! f(Φ) = |ω_reᴴ Φᴴ x̄|² - 2 Re{ (ω_reᴴ Φᴴ x̄)* y }
//! ```
//!
//! whose gradient with respect to `Φ*` is `x̄ x̄ᴴ Φ ω_re ω_reᴴ - y* x̄ ω_reᴴ`.
//! `ω_re` is the OMP reconstruction of the node's current compressed
//! estimate and stands in for the unknown `ω₀`.

use std::path::Path;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::cvec::{complex_gaussian, dot_h, zeros};
use crate::{check_len, Error, Result};

/// Entries larger than this in magnitude abort the run.
pub const DIVERGENCE_LIMIT: f64 = 1e6;

/// Dense `D × M` complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Complex64>,
}

impl MeasurementMatrix {
    pub fn from_row_major(rows: usize, cols: usize, entries: Vec<Complex64>) -> Result<Self> {
        if rows == 0 || rows > cols {
            return Err(Error::InvalidDimension { d: rows, m: cols });
        }
        check_len(rows * cols, entries.len())?;
        if entries.iter().any(|e| !e.re.is_finite() || !e.im.is_finite()) {
            return Err(Error::Divergence { magnitude: f64::INFINITY });
        }
        Ok(MeasurementMatrix { rows, cols, entries })
    }

    pub fn identity(n: usize) -> Self {
        let mut entries = zeros(n * n);
        for k in 0..n {
            entries[k * n + k] = Complex64::new(1.0, 0.0);
        }
        MeasurementMatrix { rows: n, cols: n, entries }
    }

    /// Reduced dimension `D`.
    pub fn rows(&self) -> usize {
        self.rows
    }

    /// Full dimension `M`.
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        self.entries[r * self.cols + c]
    }

    pub fn row(&self, r: usize) -> &[Complex64] {
        &self.entries[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<Complex64> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|e| e.norm()).fold(0.0, f64::max)
    }

    /// Writes `row,col,real,imag` rows.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let csv_err = |source| Error::Csv { path: path.to_owned(), source };
        let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
        for r in 0..self.rows {
            for c in 0..self.cols {
                let e = self.get(r, c);
                w.serialize(EntryRecord { row: r, col: c, real: e.re, imag: e.im })
                    .map_err(csv_err)?;
            }
        }
        w.flush().map_err(|source| Error::Io { path: path.to_owned(), source })
    }

    /// Reads the format written by [`MeasurementMatrix::write_csv`]. Rows may
    /// appear in any order; missing entries are zero.
    pub fn read_csv(path: &Path) -> Result<Self> {
        let csv_err = |source| Error::Csv { path: path.to_owned(), source };
        let mut rdr = csv::Reader::from_path(path).map_err(csv_err)?;
        let records = rdr
            .deserialize::<EntryRecord>()
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(csv_err)?;
        let rows = records.iter().map(|e| e.row + 1).max().unwrap_or(0);
        let cols = records.iter().map(|e| e.col + 1).max().unwrap_or(0);
        let mut entries = zeros(rows * cols);
        for e in records {
            entries[e.row * cols + e.col] = Complex64::new(e.real, e.imag);
        }
        MeasurementMatrix::from_row_major(rows, cols, entries)
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct EntryRecord {
    row: usize,
    col: usize,
    real: f64,
    imag: f64,
}

/// I.i.d. circular complex Gaussian entries with variance `1/D`.
pub fn init_gaussian<R: Rng + ?Sized>(d: usize, m: usize, real_only: bool, rng: &mut R) -> Result<MeasurementMatrix> {
    if d == 0 || d > m {
        return Err(Error::InvalidDimension { d, m });
    }
    let var = 1.0 / d as f64;
    let entries = (0..d * m).map(|_| complex_gaussian(rng, var, real_only)).collect();
    Ok(MeasurementMatrix { rows: d, cols: m, entries })
}

/// `Φ x`
pub fn compress(phi: &MeasurementMatrix, x: &[Complex64]) -> Result<Vec<Complex64>> {
    check_len(phi.cols, x.len())?;
    Ok((0..phi.rows)
        .map(|r| phi.row(r).iter().zip(x).map(|(a, b)| a * b).sum())
        .collect())
}

/// Gradient of the instantaneous cost with respect to `Φ*`:
/// `x̄ x̄ᴴ Φ ω_re ω_reᴴ - y* x̄ ω_reᴴ`.
pub fn surrogate_gradient(
    phi: &MeasurementMatrix,
    x_bar: &[Complex64],
    y: Complex64,
    omega_re: &[Complex64],
) -> Result<MeasurementMatrix> {
    check_len(phi.rows, x_bar.len())?;
    check_len(phi.cols, omega_re.len())?;
    let projected = compress(phi, omega_re)?;
    // x̄ᴴ Φ ω_re - y*
    let coef = dot_h(x_bar, &projected) - y.conj();
    let mut entries = zeros(phi.rows * phi.cols);
    for r in 0..phi.rows {
        let scale = coef * x_bar[r];
        for c in 0..phi.cols {
            entries[r * phi.cols + c] = scale * omega_re[c].conj();
        }
    }
    Ok(MeasurementMatrix { rows: phi.rows, cols: phi.cols, entries })
}

/// One steepest-descent step
/// `Φ ← Φ + η [ y* x̄ ω_reᴴ - x̄ x̄ᴴ Φ ω_re ω_reᴴ ]`.
///
/// Fails with [`Error::Divergence`] when the result is non-finite or an entry
/// exceeds [`DIVERGENCE_LIMIT`].
pub fn phi_update(
    phi: &MeasurementMatrix,
    x_bar: &[Complex64],
    y: Complex64,
    omega_re: &[Complex64],
    eta: f64,
) -> Result<MeasurementMatrix> {
    assert!(eta >= 0.0, "step size must be nonnegative");
    let grad = surrogate_gradient(phi, x_bar, y, omega_re)?;
    let entries: Vec<Complex64> = phi
        .entries
        .iter()
        .zip(&grad.entries)
        .map(|(p, g)| p - eta * g)
        .collect();
    let next = MeasurementMatrix { rows: phi.rows, cols: phi.cols, entries };
    let peak = next.max_abs();
    if !peak.is_finite() || peak > DIVERGENCE_LIMIT {
        return Err(Error::Divergence { magnitude: peak });
    }
    Ok(next)
}

/// A node's evolving measurement matrix and its step size `η`.
#[derive(Debug, Clone)]
pub struct PhiOptimizerState {
    pub eta: f64,
    pub phi: MeasurementMatrix,
}

impl PhiOptimizerState {
    pub fn new(phi: MeasurementMatrix, eta: f64) -> Self {
        assert!(eta >= 0.0, "step size must be nonnegative");
        PhiOptimizerState { eta, phi }
    }

    pub fn step(&mut self, x_bar: &[Complex64], y: Complex64, omega_re: &[Complex64]) -> Result<()> {
        self.phi = phi_update(&self.phi, x_bar, y, omega_re, self.eta)?;
        Ok(())
    }
}
