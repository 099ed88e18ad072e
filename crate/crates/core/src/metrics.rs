//! Learning curves, deviation, coefficient quantization and bandwidth
//! accounting.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::estimators::AlgorithmKind;
use crate::signal::SparseVector;
use crate::{check_len, Error, Result};

/// Error record of one algorithm over one Monte-Carlo run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunTrace {
    pub algorithm: AlgorithmKind,
    pub run: usize,
    pub n_nodes: usize,
    /// `|e_k(i)|²`, row-major by iteration then node.
    pub error_power: Vec<f64>,
    /// `‖ω₀ - ω_k‖²` of every node's final estimate; empty if the run diverged.
    pub final_msd: Vec<f64>,
    pub diverged: bool,
}

impl RunTrace {
    pub fn iterations(&self) -> usize {
        self.error_power.len() / self.n_nodes.max(1)
    }

    /// Node-averaged `|e_k(i)|²` at iteration `i`.
    pub fn network_mse(&self, i: usize) -> f64 {
        let row = &self.error_power[i * self.n_nodes..(i + 1) * self.n_nodes];
        row.iter().sum::<f64>() / self.n_nodes as f64
    }

    pub fn network_mse_db(&self, i: usize) -> f64 {
        10.0 * self.network_mse(i).log10()
    }

    /// Node-averaged error power over the last `window` iterations.
    pub fn steady_state_mse(&self, window: usize) -> f64 {
        let iters = self.iterations();
        let start = iters.saturating_sub(window);
        (start..iters).map(|i| self.network_mse(i)).sum::<f64>() / (iters - start) as f64
    }
}

/// All runs of all algorithms of one experiment.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ExperimentTrace {
    pub iterations: usize,
    pub n_nodes: usize,
    /// Output order of the algorithms.
    pub algorithms: Vec<AlgorithmKind>,
    pub runs: Vec<RunTrace>,
}

impl ExperimentTrace {
    /// Completed (non-diverged) runs of `algorithm`.
    pub fn completed(&self, algorithm: AlgorithmKind) -> impl Iterator<Item = &RunTrace> {
        self.runs.iter().filter(move |r| r.algorithm == algorithm && !r.diverged)
    }

    pub fn diverged_count(&self, algorithm: AlgorithmKind) -> usize {
        self.runs.iter().filter(|r| r.algorithm == algorithm && r.diverged).count()
    }
}

/// Run- and node-averaged learning curve in dB.
#[derive(Debug, Clone, PartialEq)]
pub struct MseCurve {
    pub mse_db: Vec<f64>,
    pub runs_aggregated: usize,
}

impl MseCurve {
    /// Mean of the last `window` points, in dB of the linear mean.
    pub fn steady_state_db(&self, window: usize) -> f64 {
        let n = self.mse_db.len();
        let start = n.saturating_sub(window);
        let lin: f64 = self.mse_db[start..].iter().map(|v| 10f64.powf(v / 10.0)).sum::<f64>() / (n - start) as f64;
        10.0 * lin.log10()
    }
}

/// `MSE(i) = 10 log10( (1/(R N)) Σ_runs Σ_k |e_k(i)|² )` over the completed
/// runs of `algorithm`.
pub fn mse_curve(trace: &ExperimentTrace, algorithm: AlgorithmKind) -> Result<MseCurve> {
    let runs: Vec<&RunTrace> = trace.completed(algorithm).collect();
    if runs.is_empty() || trace.iterations == 0 {
        return Err(Error::EmptyTrace);
    }
    let mse_db = (0..trace.iterations)
        .map(|i| {
            let total: f64 = runs.iter().map(|r| r.network_mse(i)).sum();
            10.0 * (total / runs.len() as f64).log10()
        })
        .collect();
    Ok(MseCurve { mse_db, runs_aggregated: runs.len() })
}

/// `‖ω₀ - estimate‖²`
pub fn msd(estimate: &[Complex64], omega0: &SparseVector) -> Result<f64> {
    check_len(omega0.len(), estimate.len())?;
    Ok(estimate.iter().zip(omega0.coeffs()).map(|(a, b)| (b - a).norm_sqr()).sum())
}

/// Uniform mid-rise quantizer for complex coefficients. The real part gets
/// `⌊b/2⌋` bits and the imaginary part `⌈b/2⌉`, each over `[-clip, clip]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuantizerSpec {
    pub bits_per_coefficient: u32,
    pub clip: f64,
}

impl QuantizerSpec {
    pub fn new(bits_per_coefficient: u32, clip: f64) -> Result<Self> {
        let spec = QuantizerSpec { bits_per_coefficient, clip };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.bits_per_coefficient == 0 {
            return Err(Error::InvalidQuantizer("bits per coefficient must be at least 1".into()));
        }
        if self.bits_per_coefficient > 64 {
            return Err(Error::InvalidQuantizer("at most 64 bits per coefficient".into()));
        }
        if !(self.clip > 0.0 && self.clip.is_finite()) {
            return Err(Error::InvalidQuantizer(format!("clip must be positive, got {}", self.clip)));
        }
        Ok(())
    }

    pub fn real_bits(&self) -> u32 {
        self.bits_per_coefficient / 2
    }

    pub fn imag_bits(&self) -> u32 {
        self.bits_per_coefficient.div_ceil(2)
    }
}

/// Mid-rise reconstruction level for one real part. Zero bits map every
/// input to zero.
pub fn quantize_part(v: f64, bits: u32, clip: f64) -> f64 {
    if bits == 0 {
        return 0.0;
    }
    let levels = 2f64.powi(bits as i32);
    let step = 2.0 * clip / levels;
    let cell = ((v + clip) / step).floor().clamp(0.0, levels - 1.0);
    -clip + (cell + 0.5) * step
}

pub fn quantize(v: &[Complex64], spec: &QuantizerSpec) -> Vec<Complex64> {
    let (rb, ib) = (spec.real_bits(), spec.imag_bits());
    v.iter()
        .map(|z| Complex64::new(quantize_part(z.re, rb, spec.clip), quantize_part(z.im, ib, spec.clip)))
        .collect()
}

/// Bits a node broadcasts per round: payload length times bits per
/// coefficient.
pub fn bits_per_round(kind: AlgorithmKind, m: usize, d: usize, spec: &QuantizerSpec) -> Result<u64> {
    spec.validate()?;
    Ok(kind.payload_len(m, d) as u64 * spec.bits_per_coefficient as u64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn trace_from(powers: &[Vec<Vec<f64>>]) -> ExperimentTrace {
        // powers[run][iteration][node]
        let n_nodes = powers[0][0].len();
        let iterations = powers[0].len();
        ExperimentTrace {
            iterations,
            n_nodes,
            algorithms: vec![AlgorithmKind::Dce],
            runs: powers
                .iter()
                .enumerate()
                .map(|(run, p)| RunTrace {
                    algorithm: AlgorithmKind::Dce,
                    run,
                    n_nodes,
                    error_power: p.iter().flatten().copied().collect(),
                    final_msd: vec![],
                    diverged: false,
                })
                .collect(),
        }
    }

    #[test]
    fn unit_and_tenth_errors() {
        let t = trace_from(&vec![vec![vec![1.0; 3]; 4]; 2]);
        let curve = mse_curve(&t, AlgorithmKind::Dce).unwrap();
        assert!(curve.mse_db.iter().all(|v| v.abs() < 1e-12));
        assert_eq!(curve.runs_aggregated, 2);
        let t = trace_from(&[vec![vec![0.01; 3]; 4]]);
        let curve = mse_curve(&t, AlgorithmKind::Dce).unwrap();
        assert!(curve.mse_db.iter().all(|v| (v + 20.0).abs() < 1e-12));
    }

    #[test]
    fn curve_matches_reaggregation() {
        let powers: Vec<Vec<Vec<f64>>> = (0..3)
            .map(|r| (0..5).map(|i| (0..4).map(|k| 0.01 + ((r * 31 + i * 7 + k * 3) % 11) as f64 * 0.13).collect()).collect())
            .collect();
        let t = trace_from(&powers);
        let curve = mse_curve(&t, AlgorithmKind::Dce).unwrap();
        for i in 0..5 {
            let mut total = 0.0;
            let mut count = 0.0;
            for run in &powers {
                for v in &run[i] {
                    total += v;
                    count += 1.0;
                }
            }
            assert!((curve.mse_db[i] - 10.0 * (total / count).log10()).abs() < 1e-10);
        }
    }

    #[test]
    fn curve_skips_diverged_and_rejects_empty() {
        let mut t = trace_from(&[vec![vec![1.0; 2]; 3], vec![vec![100.0; 2]; 3]]);
        t.runs[1].diverged = true;
        let curve = mse_curve(&t, AlgorithmKind::Dce).unwrap();
        assert_eq!(curve.runs_aggregated, 1);
        assert_eq!(t.diverged_count(AlgorithmKind::Dce), 1);
        assert!(matches!(mse_curve(&t, AlgorithmKind::DiffusionNlms), Err(Error::EmptyTrace)));
    }

    #[test]
    fn msd_cases() {
        let w = SparseVector::from_dense(vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, -2.0)]);
        assert_eq!(msd(w.coeffs(), &w).unwrap(), 0.0);
        assert!((msd(&[c(0.0, 0.0); 3], &w).unwrap() - 5.0).abs() < 1e-15);
        let est = [c(0.5, 0.5), c(-1.0, 0.25), c(0.3, -1.0)];
        let mut naive = 0.0;
        for i in 0..3 {
            let dr = w.coeffs()[i].re - est[i].re;
            let di = w.coeffs()[i].im - est[i].im;
            naive += dr * dr + di * di;
        }
        assert!((msd(&est, &w).unwrap() - naive).abs() < 1e-12);
        assert!(msd(&est[..2], &w).is_err());
    }

    #[test]
    fn quantizer_levels() {
        let spec = QuantizerSpec::new(4, 1.0).unwrap();
        assert_eq!((spec.real_bits(), spec.imag_bits()), (2, 2));
        let q = quantize(&[c(0.3, -0.3)], &spec);
        assert_eq!(q[0], c(0.25, -0.25));
        // saturation lands on the outermost cell centers
        let q = quantize(&[c(5.0, -7.0)], &spec);
        assert_eq!(q[0], c(0.75, -0.75));
        let odd = QuantizerSpec::new(3, 1.0).unwrap();
        assert_eq!((odd.real_bits(), odd.imag_bits()), (1, 2));
        let one = QuantizerSpec::new(1, 1.0).unwrap();
        assert_eq!(quantize(&[c(0.7, 0.7)], &one)[0], c(0.0, 0.5));
    }

    #[test]
    fn fine_quantization_is_nearly_transparent() {
        let spec = QuantizerSpec::new(32, 1.0).unwrap();
        let bound = 2.0 * 2f64.powi(-15);
        for v in [c(0.123456, -0.987), c(-1.0, 1.0), c(0.0, 0.0)] {
            let q = quantize(&[v], &spec)[0];
            assert!((q.re - v.re).abs() <= bound);
            assert!((q.im - v.im).abs() <= bound);
        }
    }

    #[test]
    fn bandwidth() {
        let spec = QuantizerSpec::new(8, 1.0).unwrap();
        assert_eq!(bits_per_round(AlgorithmKind::Dce, 50, 10, &spec).unwrap(), 80);
        assert_eq!(bits_per_round(AlgorithmKind::DiffusionNlms, 50, 10, &spec).unwrap(), 400);
        let bad = QuantizerSpec { bits_per_coefficient: 0, clip: 1.0 };
        assert!(bits_per_round(AlgorithmKind::Dce, 50, 10, &bad).is_err());
        assert!(QuantizerSpec::new(0, 1.0).is_err());
    }

    proptest! {
        #[test]
        fn quantization_error_within_half_step(v in -1.0f64..1.0, bits in 1u32..24, clip in 0.1f64..4.0) {
            let x = v * clip;
            let q = quantize_part(x, bits, clip);
            let half_step = clip * 2f64.powi(-(bits as i32));
            prop_assert!((q - x).abs() <= half_step * (1.0 + 1e-12));
            prop_assert!((q - x).abs() <= clip * 2f64.powi(-(bits as i32 - 1)));
        }

        #[test]
        fn curve_is_permutation_invariant(seed in 0u64..1000) {
            let powers: Vec<Vec<Vec<f64>>> = (0..3)
                .map(|r| (0..4).map(|i| (0..3).map(|k| 1e-3 + (((seed as usize + 1) * (r * 17 + i * 5 + k * 29)) % 97) as f64 / 50.0).collect()).collect())
                .collect();
            let base = mse_curve(&trace_from(&powers), AlgorithmKind::Dce).unwrap();
            let mut shuffled = powers.clone();
            shuffled.reverse();
            for run in shuffled.iter_mut() {
                for row in run.iter_mut() {
                    row.rotate_left(1);
                }
            }
            let other = mse_curve(&trace_from(&shuffled), AlgorithmKind::Dce).unwrap();
            for (a, b) in base.mse_db.iter().zip(&other.mse_db) {
                prop_assert!((a - b).abs() < 1e-12);
            }
        }
    }
}
