//! Sparse ground truth, AR(1) regressors, noise, and scalar measurements.

use std::path::Path;

use num_complex::Complex64;
use rand::Rng;

use crate::compression::{compress, MeasurementMatrix};
use crate::cvec::{complex_gaussian, dot_h, zeros};
use crate::{check_len, Error, Result};

/// The unknown parameter `ω₀`: a length-`M` complex vector with `S` nonzeros.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseVector {
    coeffs: Vec<Complex64>,
    support: Vec<usize>,
}

impl SparseVector {
    /// Wraps a dense vector; the support is every index with a nonzero entry.
    pub fn from_dense(coeffs: Vec<Complex64>) -> Self {
        let support = coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| **c != Complex64::new(0.0, 0.0))
            .map(|(i, _)| i)
            .collect();
        SparseVector { coeffs, support }
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Sorted nonzero positions.
    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn sparsity(&self) -> usize {
        self.support.len()
    }

    /// Writes `index,real,imag` rows.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let csv_err = |source| Error::Csv { path: path.to_owned(), source };
        let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
        w.write_record(["index", "real", "imag"]).map_err(csv_err)?;
        for (i, c) in self.coeffs.iter().enumerate() {
            w.write_record([i.to_string(), c.re.to_string(), c.im.to_string()])
                .map_err(csv_err)?;
        }
        w.flush().map_err(|source| Error::Io { path: path.to_owned(), source })
    }
}

/// Draws `ω₀` with a uniformly random support of size `s` and circular
/// complex Gaussian nonzeros of unit average power.
pub fn generate_ground_truth<R: Rng + ?Sized>(m: usize, s: usize, real_only: bool, rng: &mut R) -> Result<SparseVector> {
    if s > m {
        return Err(Error::InvalidSparsity { s, m });
    }
    let mut support: Vec<usize> = rand::seq::index::sample(rng, m, s).into_vec();
    support.sort_unstable();
    let mut coeffs = zeros(m);
    for &j in &support {
        let mut c = complex_gaussian(rng, 1.0, real_only);
        // a draw of exactly zero would shrink the support
        while c == Complex64::new(0.0, 0.0) {
            c = complex_gaussian(rng, 1.0, real_only);
        }
        coeffs[j] = c;
    }
    Ok(SparseVector { coeffs, support })
}

/// Tap-delay line of a unit-variance AR(1) process
/// `x(i) = u(i) + α x(i-1)` with `Var u = 1 - α²`.
#[derive(Debug, Clone)]
pub struct RegressorState {
    pub node_id: usize,
    alpha: f64,
    real_only: bool,
    /// `[x(i), x(i-1), ..., x(i-M+1)]`
    buffer: Vec<Complex64>,
}

impl RegressorState {
    /// Starts the line in its stationary distribution.
    pub fn new<R: Rng + ?Sized>(node_id: usize, alpha: f64, m: usize, real_only: bool, rng: &mut R) -> Self {
        assert!(alpha.abs() < 1.0, "AR(1) coefficient must satisfy |alpha| < 1");
        assert!(m >= 1);
        let mut state = RegressorState {
            node_id,
            alpha,
            real_only,
            buffer: Vec::with_capacity(m),
        };
        let mut x = complex_gaussian(rng, 1.0, real_only);
        let mut history = vec![x];
        for _ in 1..m {
            x = state.innovation(rng) + alpha * x;
            history.push(x);
        }
        history.reverse();
        state.buffer = history;
        state
    }

    fn innovation<R: Rng + ?Sized>(&self, rng: &mut R) -> Complex64 {
        complex_gaussian(rng, 1.0 - self.alpha * self.alpha, self.real_only)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Current regressor vector.
    pub fn regressor(&self) -> &[Complex64] {
        &self.buffer
    }

    pub fn last_scalar(&self) -> Complex64 {
        self.buffer[0]
    }

    /// Advances the process one sample and shifts it into the line.
    pub fn step<R: Rng + ?Sized>(&mut self, rng: &mut R) {
        let next = self.innovation(rng) + self.alpha * self.buffer[0];
        self.buffer.pop();
        self.buffer.insert(0, next);
    }
}

/// Per-node additive measurement noise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseModel {
    pub variance: f64,
}

impl NoiseModel {
    pub fn new(variance: f64) -> Self {
        assert!(variance >= 0.0, "noise variance must be nonnegative");
        NoiseModel { variance }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R, real_only: bool) -> Complex64 {
        complex_gaussian(rng, self.variance, real_only)
    }
}

/// `d = ω₀ᴴ x + n`
pub fn measure_full(omega0: &SparseVector, x: &[Complex64], noise: Complex64) -> Result<Complex64> {
    check_len(omega0.len(), x.len())?;
    let signal: Complex64 = omega0.support.iter().map(|&j| omega0.coeffs[j].conj() * x[j]).sum();
    Ok(signal + noise)
}

/// `d = (Φ ω₀)ᴴ x̄ + n`
pub fn measure_compressed(
    omega0: &SparseVector,
    phi: &MeasurementMatrix,
    x_bar: &[Complex64],
    noise: Complex64,
) -> Result<Complex64> {
    check_len(phi.rows(), x_bar.len())?;
    let target = compress(phi, omega0.coeffs())?;
    Ok(dot_h(&target, x_bar) + noise)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compression::init_gaussian;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn ground_truth_sparsity() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let w = generate_ground_truth(50, 0, false, &mut rng).unwrap();
        assert!(w.coeffs().iter().all(|c| c.norm() == 0.0));
        let w = generate_ground_truth(50, 3, false, &mut rng).unwrap();
        assert_eq!(w.coeffs().iter().filter(|c| c.norm() > 0.0).count(), 3);
        assert_eq!(w.sparsity(), 3);
        let w = generate_ground_truth(4, 4, false, &mut rng).unwrap();
        assert_eq!(w.support(), &[0, 1, 2, 3]);
        assert!(matches!(
            generate_ground_truth(4, 5, false, &mut rng),
            Err(Error::InvalidSparsity { s: 5, m: 4 })
        ));
    }

    #[test]
    fn ground_truth_unit_average_power() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut power = 0.0;
        let trials = 20_000;
        for _ in 0..trials {
            let w = generate_ground_truth(8, 1, false, &mut rng).unwrap();
            power += w.coeffs()[w.support()[0]].norm_sqr();
        }
        assert!((power / trials as f64 - 1.0).abs() < 0.03);
    }

    fn sample_moments(alpha: f64, n: usize, seed: u64) -> (f64, f64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut st = RegressorState::new(0, alpha, 1, false, &mut rng);
        let mut prev = st.last_scalar();
        let (mut pow, mut lag) = (0.0, c(0.0, 0.0));
        for _ in 0..n {
            st.step(&mut rng);
            let x = st.last_scalar();
            pow += x.norm_sqr();
            lag += x * prev.conj();
            prev = x;
        }
        let var = pow / n as f64;
        (var, (lag / n as f64).re / var)
    }

    #[test]
    fn ar1_white_when_alpha_zero() {
        let (var, rho) = sample_moments(0.0, 100_000, 5);
        assert!((var - 1.0).abs() < 0.02);
        assert!(rho.abs() < 0.02);
    }

    #[test]
    fn ar1_unit_variance() {
        let (var, _) = sample_moments(0.5, 100_000, 6);
        assert!((var - 1.0).abs() < 0.02, "variance {var}");
    }

    #[test]
    fn ar1_lag_one_correlation() {
        let (_, rho) = sample_moments(0.95, 100_000, 7);
        assert!((rho - 0.95).abs() < 0.02, "lag-1 correlation {rho}");
    }

    #[test]
    fn regressor_shifts() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let mut st = RegressorState::new(0, 0.3, 5, false, &mut rng);
        let before = st.regressor().to_vec();
        st.step(&mut rng);
        assert_eq!(&st.regressor()[1..], &before[..4]);
    }

    #[test]
    fn measure_full_basics() {
        let e1 = SparseVector::from_dense(vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        let x = vec![c(0.3, -0.2), c(5.0, 1.0), c(-2.0, 0.5)];
        assert_eq!(measure_full(&e1, &x, c(0.0, 0.0)).unwrap(), x[0]);
        let n = c(0.1, 0.2);
        assert_eq!(measure_full(&e1, &zeros(3), n).unwrap(), n);
        assert!(measure_full(&e1, &x[..2], n).is_err());
    }

    #[test]
    fn measure_full_matches_naive_sum() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let w = generate_ground_truth(20, 20, false, &mut rng).unwrap();
        let x: Vec<_> = (0..20).map(|_| complex_gaussian(&mut rng, 1.0, false)).collect();
        let mut expected = c(0.0, 0.0);
        for i in 0..20 {
            let a = w.coeffs()[i];
            let b = x[i];
            expected += c(a.re * b.re + a.im * b.im, a.re * b.im - a.im * b.re);
        }
        let got = measure_full(&w, &x, c(0.0, 0.0)).unwrap();
        assert!((got - expected).norm() < 1e-12);
    }

    #[test]
    fn measure_full_is_antilinear_in_omega() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let w = generate_ground_truth(10, 4, false, &mut rng).unwrap();
        let x: Vec<_> = (0..10).map(|_| complex_gaussian(&mut rng, 1.0, false)).collect();
        let s = c(0.7, -1.3);
        let scaled = SparseVector::from_dense(w.coeffs().iter().map(|v| v * s).collect());
        let base = measure_full(&w, &x, c(0.0, 0.0)).unwrap();
        let got = measure_full(&scaled, &x, c(0.0, 0.0)).unwrap();
        assert!((got - s.conj() * base).norm() < 1e-12);
    }

    #[test]
    fn measure_compressed_cases() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        let phi = init_gaussian(4, 12, false, &mut rng).unwrap();
        let xb: Vec<_> = (0..4).map(|_| complex_gaussian(&mut rng, 1.0, false)).collect();
        let n = c(0.01, -0.02);
        let zero = SparseVector::from_dense(zeros(12));
        assert_eq!(measure_compressed(&zero, &phi, &xb, n).unwrap(), n);

        let w = generate_ground_truth(12, 3, false, &mut rng).unwrap();
        // two-step oracle: explicit Φω₀ by loops, then inner product
        let mut target = zeros(4);
        for r in 0..4 {
            for col in 0..12 {
                target[r] += phi.get(r, col) * w.coeffs()[col];
            }
        }
        let expected: Complex64 = target.iter().zip(&xb).map(|(t, x)| t.conj() * x).sum::<Complex64>() + n;
        let got = measure_compressed(&w, &phi, &xb, n).unwrap();
        assert!((got - expected).norm() < 1e-12);
        assert!(measure_compressed(&w, &phi, &xb[..3], n).is_err());
    }

    #[test]
    fn identity_compression_equals_full() {
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        let w = generate_ground_truth(6, 2, false, &mut rng).unwrap();
        let x: Vec<_> = (0..6).map(|_| complex_gaussian(&mut rng, 1.0, false)).collect();
        let phi = MeasurementMatrix::identity(6);
        let n = c(0.5, 0.5);
        let a = measure_compressed(&w, &phi, &x, n).unwrap();
        let b = measure_full(&w, &x, n).unwrap();
        assert!((a - b).norm() < 1e-15);
    }
}
