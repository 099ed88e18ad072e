//! Orthogonal matching pursuit.
//!
//! The least-squares refit on the selected columns is carried by an
//! incrementally grown thin QR factorization (modified Gram-Schmidt with one
//! reorthogonalization pass), so each greedy step costs `O(D·k)` on top of
//! the correlation scan.

use num_complex::Complex64;

use crate::compression::MeasurementMatrix;
use crate::cvec::{axpy, dot_h, norm, zeros};
use crate::{check_len, Error, Result};

/// A new column whose orthogonal remainder is below this fraction of its own
/// norm is treated as linearly dependent on the selected ones.
const RANK_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OmpConfig {
    /// Largest support the decoder may select, usually the known sparsity.
    pub max_support: usize,
    /// Early stop once `‖r‖` falls to this level.
    pub residual_tol: f64,
}

impl OmpConfig {
    pub fn new(max_support: usize) -> Self {
        OmpConfig { max_support, residual_tol: 1e-9 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OmpOutput {
    /// Length-`M` estimate, zero off the support.
    pub estimate: Vec<Complex64>,
    /// Selected columns in selection order.
    pub support: Vec<usize>,
    /// `‖r‖` before the first step and after every accepted step.
    pub residual_norms: Vec<f64>,
    /// The last candidate column was dependent on the selected set.
    pub stalled: bool,
}

/// Recovers a sparse `M`-vector `w` with `Φ w ≈ y`.
///
/// Columns are scored by `|φ_jᴴ r| / ‖φ_j‖`; ties go to the smallest index
/// and all-zero columns score zero.
pub fn omp_reconstruct(phi: &MeasurementMatrix, y: &[Complex64], config: &OmpConfig) -> Result<OmpOutput> {
    let (d, m) = (phi.rows(), phi.cols());
    check_len(d, y.len())?;
    if config.max_support > d {
        return Err(Error::InvalidConfig(format!(
            "OMP support limit {} exceeds the number of measurements {d}",
            config.max_support
        )));
    }

    let columns: Vec<Vec<Complex64>> = (0..m).map(|j| phi.column(j)).collect();
    let col_norms: Vec<f64> = columns.iter().map(|c| norm(c)).collect();

    let mut support: Vec<usize> = Vec::with_capacity(config.max_support);
    let mut selected = vec![false; m];
    // Orthonormal basis of the selected columns and the matching upper
    // triangular factor, stored by column.
    let mut q: Vec<Vec<Complex64>> = Vec::new();
    let mut r_cols: Vec<Vec<Complex64>> = Vec::new();
    let mut coeffs: Vec<Complex64> = Vec::new();

    let mut residual = y.to_vec();
    let mut residual_norms = vec![norm(&residual)];
    let mut stalled = false;

    while support.len() < config.max_support && *residual_norms.last().unwrap() > config.residual_tol {
        let mut best: Option<(usize, f64)> = None;
        for j in 0..m {
            if selected[j] {
                continue;
            }
            let score = if col_norms[j] > 0.0 {
                dot_h(&columns[j], &residual).norm() / col_norms[j]
            } else {
                0.0
            };
            if best.is_none_or(|(_, s)| score > s) {
                best = Some((j, score));
            }
        }
        let Some((j, score)) = best else { break };
        if score == 0.0 {
            break;
        }

        // Orthogonalize the candidate against the current basis, twice.
        let mut v = columns[j].clone();
        let mut r_col = zeros(q.len() + 1);
        for _ in 0..2 {
            for (i, qi) in q.iter().enumerate() {
                let h = dot_h(qi, &v);
                r_col[i] += h;
                axpy(-h, qi, &mut v);
            }
        }
        let v_norm = norm(&v);
        if v_norm <= RANK_TOL * col_norms[j] {
            stalled = true;
            break;
        }
        for vi in v.iter_mut() {
            *vi /= v_norm;
        }
        r_col[q.len()] = Complex64::new(v_norm, 0.0);
        q.push(v);
        r_cols.push(r_col);
        selected[j] = true;
        support.push(j);

        // Solve R c = Qᴴ y by back substitution.
        let k = q.len();
        let z: Vec<Complex64> = q.iter().map(|qi| dot_h(qi, y)).collect();
        coeffs = zeros(k);
        for i in (0..k).rev() {
            let mut acc = z[i];
            for (jj, cj) in coeffs.iter().enumerate().skip(i + 1) {
                acc -= r_cols[jj][i] * cj;
            }
            coeffs[i] = acc / r_cols[i][i];
        }

        residual = y.to_vec();
        for (&col, &cf) in support.iter().zip(&coeffs) {
            axpy(-cf, &columns[col], &mut residual);
        }
        residual_norms.push(norm(&residual));
    }

    let mut estimate = zeros(m);
    for (&col, &cf) in support.iter().zip(&coeffs) {
        estimate[col] = cf;
    }
    Ok(OmpOutput { estimate, support, residual_norms, stalled })
}
