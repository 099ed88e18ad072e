//! Adapt-then-combine diffusion kernels and the per-round network driver.
//!
//! A round is synchronous: every node adapts on its own iteration-`i` data,
//! the intermediate estimates `ψ_l(i)` are exchanged, and only then does each
//! node form its convex combination. No node ever sees a neighbor's
//! post-combination value within the same round.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::compression::{phi_update, MeasurementMatrix};
use crate::cvec::{axpy, dot_h, norm_sqr, zeros};
use crate::metrics::{quantize, QuantizerSpec};
use crate::recovery::{omp_reconstruct, OmpConfig};
use crate::topology::CombinationMatrix;
use crate::{check_len, Error, Result};

/// The estimators compared by the harness.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AlgorithmKind {
    /// Diffusion NLMS on the full `M`-dimensional regressor.
    #[serde(rename = "dnlms")]
    DiffusionNlms,
    /// Diffusion NLMS with zero-attracting shrinkage.
    #[serde(rename = "sparse_dnlms")]
    SparseDiffusionNlms,
    /// Compressed-domain diffusion with a fixed measurement matrix.
    #[serde(rename = "dce")]
    Dce,
    /// Compressed-domain diffusion with online measurement-matrix updates.
    #[serde(rename = "dce_opt")]
    DceOptimizedPhi,
}

impl AlgorithmKind {
    pub const ALL: [AlgorithmKind; 4] = [
        AlgorithmKind::DiffusionNlms,
        AlgorithmKind::SparseDiffusionNlms,
        AlgorithmKind::Dce,
        AlgorithmKind::DceOptimizedPhi,
    ];

    pub fn name(self) -> &'static str {
        match self {
            AlgorithmKind::DiffusionNlms => "dnlms",
            AlgorithmKind::SparseDiffusionNlms => "sparse_dnlms",
            AlgorithmKind::Dce => "dce",
            AlgorithmKind::DceOptimizedPhi => "dce_opt",
        }
    }

    /// Runs in the reduced dimension `D`.
    pub fn is_compressed(self) -> bool {
        matches!(self, AlgorithmKind::Dce | AlgorithmKind::DceOptimizedPhi)
    }

    /// Number of complex coefficients a node broadcasts per round.
    pub fn payload_len(self, m: usize, d: usize) -> usize {
        if self.is_compressed() {
            d
        } else {
            m
        }
    }
}

impl fmt::Display for AlgorithmKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AlgorithmKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        AlgorithmKind::ALL
            .into_iter()
            .find(|k| k.name() == s.trim())
            .ok_or_else(|| {
                Error::InvalidConfig(format!(
                    "unknown algorithm {s:?} (expected one of dnlms, sparse_dnlms, dce, dce_opt)"
                ))
            })
    }
}

/// Per-node estimator state.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeState {
    pub node_id: usize,
    /// `ω_k(i)`, or `ω̄_k(i)` in the compressed domain.
    pub omega: Vec<Complex64>,
    /// `ψ_k(i)`, the intermediate estimate after adaptation.
    pub psi: Vec<Complex64>,
    pub mu0: f64,
    pub eps: f64,
}

impl NodeState {
    pub fn new(node_id: usize, dim: usize, mu0: f64, eps: f64) -> Self {
        assert!(mu0 > 0.0 && mu0 < 2.0, "NLMS step size must lie in (0, 2)");
        assert!(eps >= 0.0);
        NodeState {
            node_id,
            omega: zeros(dim),
            psi: zeros(dim),
            mu0,
            eps,
        }
    }

    pub fn dim(&self) -> usize {
        self.omega.len()
    }
}

/// Normalized LMS adaptation, `ψ = ω + μ₀/(xᴴx + ε) · e* x` with
/// `e = d - ωᴴx`. Returns the a-priori error `e`.
pub fn nlms_adapt(state: &mut NodeState, x: &[Complex64], d: Complex64) -> Result<Complex64> {
    check_len(state.dim(), x.len())?;
    let e = d - dot_h(&state.omega, x);
    let mu = state.mu0 / (norm_sqr(x) + state.eps);
    state.psi.copy_from_slice(&state.omega);
    if mu.is_finite() {
        axpy(mu * e.conj(), x, &mut state.psi);
    }
    Ok(e)
}

/// Zero-attracting NLMS: the NLMS step followed by `-ρ·csign(ω)`, where
/// `csign` takes the sign of real and imaginary parts separately.
pub fn za_nlms_adapt(state: &mut NodeState, x: &[Complex64], d: Complex64, rho: f64) -> Result<Complex64> {
    assert!(rho >= 0.0, "shrinkage must be nonnegative");
    let e = nlms_adapt(state, x, d)?;
    if rho > 0.0 {
        for (p, w) in state.psi.iter_mut().zip(&state.omega) {
            *p -= rho * csign(*w);
        }
    }
    Ok(e)
}

/// Compressed-domain adaptation; the NLMS kernel applied to `x̄ = Φx`.
pub fn dce_adapt(state: &mut NodeState, x_bar: &[Complex64], d: Complex64) -> Result<Complex64> {
    nlms_adapt(state, x_bar, d)
}

fn sign0(v: f64) -> f64 {
    if v > 0.0 {
        1.0
    } else if v < 0.0 {
        -1.0
    } else {
        0.0
    }
}

fn csign(z: Complex64) -> Complex64 {
    Complex64::new(sign0(z.re), sign0(z.im))
}

/// `Σ_l c_kl ψ_l`, with `psis` and `weights` aligned.
pub fn combine(psis: &[&[Complex64]], weights: &[f64]) -> Result<Vec<Complex64>> {
    check_len(psis.len(), weights.len())?;
    let dim = psis.first().map_or(0, |p| p.len());
    let mut out = zeros(dim);
    for (psi, &w) in psis.iter().zip(weights) {
        check_len(dim, psi.len())?;
        axpy(Complex64::new(w, 0.0), psi, &mut out);
    }
    Ok(out)
}

/// Decompresses every node's compressed estimate with its own matrix.
pub fn finalize_dce(
    estimates: &[Vec<Complex64>],
    phis: &[MeasurementMatrix],
    omp: &OmpConfig,
) -> Result<Vec<Vec<Complex64>>> {
    check_len(estimates.len(), phis.len())?;
    estimates
        .iter()
        .zip(phis)
        .map(|(w, phi)| Ok(omp_reconstruct(phi, w, omp)?.estimate))
        .collect()
}

/// Step sizes and side parameters shared by all nodes of a network.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdaptationParams {
    pub mu0: f64,
    pub eps: f64,
    /// Zero-attractor strength, used only by the sparse baseline.
    pub rho: f64,
    /// Measurement-matrix step size, used only with online matrix updates.
    pub eta: f64,
    /// Decoder used for decompression.
    pub omp: OmpConfig,
    /// Applied to every broadcast `ψ` when set.
    pub quantizer: Option<QuantizerSpec>,
}

/// One node's data for a round, already in the algorithm's working
/// dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeInput {
    pub regressor: Vec<Complex64>,
    pub desired: Complex64,
}

/// All node states of one algorithm plus the shared combination weights.
#[derive(Debug, Clone)]
pub struct Network {
    kind: AlgorithmKind,
    params: AdaptationParams,
    nodes: Vec<NodeState>,
    neighbors: Vec<Vec<usize>>,
    weights: CombinationMatrix,
    phis: Vec<MeasurementMatrix>,
}

impl Network {
    /// Full-dimension network with zero initial estimates.
    pub fn full(kind: AlgorithmKind, weights: CombinationMatrix, m: usize, params: AdaptationParams) -> Self {
        assert!(!kind.is_compressed(), "{kind} needs measurement matrices");
        Network::build(kind, weights, m, Vec::new(), params)
    }

    /// Compressed-domain network, one measurement matrix per node.
    pub fn compressed(
        kind: AlgorithmKind,
        weights: CombinationMatrix,
        phis: Vec<MeasurementMatrix>,
        params: AdaptationParams,
    ) -> Result<Self> {
        assert!(kind.is_compressed(), "{kind} runs in the full dimension");
        check_len(weights.n_nodes(), phis.len())?;
        let d = phis[0].rows();
        for phi in &phis {
            check_len(d, phi.rows())?;
            check_len(phis[0].cols(), phi.cols())?;
        }
        Ok(Network::build(kind, weights, d, phis, params))
    }

    fn build(
        kind: AlgorithmKind,
        weights: CombinationMatrix,
        dim: usize,
        phis: Vec<MeasurementMatrix>,
        params: AdaptationParams,
    ) -> Self {
        let n = weights.n_nodes();
        let nodes = (0..n).map(|k| NodeState::new(k, dim, params.mu0, params.eps)).collect();
        let neighbors = (0..n)
            .map(|k| (0..n).filter(|&l| weights.weight(k, l) != 0.0).collect())
            .collect();
        Network { kind, params, nodes, neighbors, weights, phis }
    }

    pub fn kind(&self) -> AlgorithmKind {
        self.kind
    }

    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[NodeState] {
        &self.nodes
    }

    /// Coefficients each node broadcasts per round.
    pub fn payload_len(&self) -> usize {
        self.nodes[0].dim()
    }

    /// Node `k`'s measurement matrix (compressed algorithms only).
    pub fn phi(&self, k: usize) -> &MeasurementMatrix {
        &self.phis[k]
    }

    pub fn phis(&self) -> &[MeasurementMatrix] {
        &self.phis
    }

    /// Adapt, exchange, combine; then, for the optimized variant, refresh
    /// every node's matrix from the OMP reconstruction of its new estimate.
    /// Returns the a-priori error of every node.
    pub fn run_round(&mut self, inputs: &[NodeInput]) -> Result<Vec<Complex64>> {
        check_len(self.nodes.len(), inputs.len())?;
        let mut errors = Vec::with_capacity(inputs.len());
        for (node, input) in self.nodes.iter_mut().zip(inputs) {
            let e = match self.kind {
                AlgorithmKind::DiffusionNlms => nlms_adapt(node, &input.regressor, input.desired)?,
                AlgorithmKind::SparseDiffusionNlms => {
                    za_nlms_adapt(node, &input.regressor, input.desired, self.params.rho)?
                }
                AlgorithmKind::Dce | AlgorithmKind::DceOptimizedPhi => {
                    dce_adapt(node, &input.regressor, input.desired)?
                }
            };
            errors.push(e);
        }

        let broadcast: Vec<Vec<Complex64>> = match &self.params.quantizer {
            Some(spec) => self.nodes.iter().map(|n| quantize(&n.psi, spec)).collect(),
            None => self.nodes.iter().map(|n| n.psi.clone()).collect(),
        };
        let combined = (0..self.nodes.len())
            .map(|k| {
                let psis: Vec<&[Complex64]> = self.neighbors[k]
                    .iter()
                    .map(|&l| if l == k { &self.nodes[k].psi[..] } else { &broadcast[l][..] })
                    .collect();
                let w: Vec<f64> = self.neighbors[k].iter().map(|&l| self.weights.weight(k, l)).collect();
                combine(&psis, &w)
            })
            .collect::<Result<Vec<_>>>()?;
        for (node, omega) in self.nodes.iter_mut().zip(combined) {
            node.omega = omega;
        }

        if self.kind == AlgorithmKind::DceOptimizedPhi {
            for (k, input) in inputs.iter().enumerate() {
                let recon = omp_reconstruct(&self.phis[k], &self.nodes[k].omega, &self.params.omp)?;
                // y_k(i) = ω̄_k(i)ᴴ x̄_k(i) = d_k(i) - e_k(i)
                let y = input.desired - errors[k];
                self.phis[k] = phi_update(&self.phis[k], &input.regressor, y, &recon.estimate, self.params.eta)?;
            }
        }
        Ok(errors)
    }

    /// Final `M`-dimensional estimate of every node: the running estimate for
    /// full-dimension algorithms, the OMP decompression otherwise.
    pub fn final_estimates(&self) -> Result<Vec<Vec<Complex64>>> {
        let omegas: Vec<Vec<Complex64>> = self.nodes.iter().map(|n| n.omega.clone()).collect();
        if self.kind.is_compressed() {
            finalize_dce(&omegas, &self.phis, &self.params.omp)
        } else {
            Ok(omegas)
        }
    }
}
