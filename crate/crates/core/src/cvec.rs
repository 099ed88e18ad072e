//! Small dense complex-vector helpers shared by the kernels.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

/// Hermitian inner product `aᴴ b = Σ conj(a_i) b_i`.
#[inline]
pub fn dot_h(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

#[inline]
pub fn norm_sqr(a: &[Complex64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum()
}

#[inline]
pub fn norm(a: &[Complex64]) -> f64 {
    norm_sqr(a).sqrt()
}

/// `y += alpha * x`
#[inline]
pub fn axpy(alpha: Complex64, x: &[Complex64], y: &mut [Complex64]) {
    debug_assert_eq!(x.len(), y.len());
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

pub fn zeros(n: usize) -> Vec<Complex64> {
    vec![Complex64::new(0.0, 0.0); n]
}

/// Draws a circularly-symmetric complex Gaussian sample with `E|z|² = variance`.
///
/// With `real_only` the imaginary part is zero and the real part carries the
/// full variance.
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R, variance: f64, real_only: bool) -> Complex64 {
    if real_only {
        let re: f64 = rng.sample(StandardNormal);
        Complex64::new(re * variance.sqrt(), 0.0)
    } else {
        let scale = (variance / 2.0).sqrt();
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(re * scale, im * scale)
    }
}
