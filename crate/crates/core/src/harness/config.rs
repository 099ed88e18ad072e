//! TOML experiment configuration.
//!
//! Every key is optional; an empty file yields the reference scenario
//! (20 nodes, `M = 50`, `D = 10`, `S = 3`, `μ₀ = 0.45`, noise variance
//! `0.001`). Unknown keys are rejected so that typos surface as errors.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::estimators::AlgorithmKind;
use crate::metrics::QuantizerSpec;
use crate::topology::Topology;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Master seed from which every random stream is derived.
    pub seed: u64,
    pub network: NetworkSection,
    pub signal: SignalSection,
    pub compression: CompressionSection,
    pub adaptation: AdaptationSection,
    pub experiment: RunSection,
    /// Quantizes every exchanged estimate when present.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub quantizer: Option<QuantizerSpec>,
    pub sweep: SweepSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NetworkSection {
    pub n_nodes: usize,
    pub link_probability: f64,
    /// Fixed graph as an adjacency list (`k: l1 l2 ...` per line). When set
    /// it replaces the random graph in every run.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub topology: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DataMode {
    /// `d = (Φ_k ω₀)ᴴ x̄ + n` for the compressed algorithms.
    CompressedConsistent,
    /// `d = ω₀ᴴ x + n` for every algorithm.
    Physical,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhiMode {
    /// One realization shared by all nodes.
    Shared,
    /// An independent realization per node.
    PerNode,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SignalSection {
    pub m: usize,
    pub s: usize,
    pub noise_variance: f64,
    /// Per-node AR(1) coefficients are drawn uniformly from this interval.
    pub alpha_range: [f64; 2],
    pub data_mode: DataMode,
    /// Zero the imaginary part of every random source.
    pub real_valued: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CompressionSection {
    pub d: usize,
    pub phi_mode: PhiMode,
    /// Step size of the online measurement-matrix update.
    pub eta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AdaptationSection {
    pub mu0: f64,
    pub eps: f64,
    /// Zero-attractor strength of the sparse baseline.
    pub rho: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunSection {
    pub iterations: usize,
    pub runs: usize,
    pub algorithms: Vec<AlgorithmKind>,
    /// Spread Monte-Carlo runs over threads. Output is identical either way.
    pub parallel: bool,
    /// Trailing window used for steady-state figures.
    pub steady_state_window: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepPoint {
    pub d: usize,
    pub s: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSection {
    pub points: Vec<SweepPoint>,
    pub bits: Vec<u32>,
    pub clip: f64,
    pub algorithms: Vec<AlgorithmKind>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            seed: 2024,
            network: NetworkSection::default(),
            signal: SignalSection::default(),
            compression: CompressionSection::default(),
            adaptation: AdaptationSection::default(),
            experiment: RunSection::default(),
            quantizer: None,
            sweep: SweepSection::default(),
        }
    }
}

impl Default for NetworkSection {
    fn default() -> Self {
        NetworkSection { n_nodes: 20, link_probability: 0.2, topology: None }
    }
}

impl Default for SignalSection {
    fn default() -> Self {
        SignalSection {
            m: 50,
            s: 3,
            noise_variance: 0.001,
            alpha_range: [0.0, 0.5],
            data_mode: DataMode::CompressedConsistent,
            real_valued: false,
        }
    }
}

impl Default for CompressionSection {
    fn default() -> Self {
        CompressionSection { d: 10, phi_mode: PhiMode::Shared, eta: 0.08 }
    }
}

impl Default for AdaptationSection {
    fn default() -> Self {
        AdaptationSection { mu0: 0.45, eps: 1e-8, rho: 0.001 }
    }
}

impl Default for RunSection {
    fn default() -> Self {
        RunSection {
            iterations: 500,
            runs: 50,
            algorithms: AlgorithmKind::ALL.to_vec(),
            parallel: true,
            steady_state_window: 50,
        }
    }
}

impl Default for SweepSection {
    fn default() -> Self {
        SweepSection {
            points: vec![
                SweepPoint { d: 10, s: 3 },
                SweepPoint { d: 16, s: 5 },
                SweepPoint { d: 22, s: 7 },
                SweepPoint { d: 28, s: 9 },
            ],
            bits: vec![4, 8, 16],
            clip: 1.0,
            algorithms: vec![AlgorithmKind::Dce, AlgorithmKind::DiffusionNlms],
        }
    }
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidConfig(msg.into())
}

impl ExperimentConfig {
    /// Parses TOML text and validates it. `origin` labels error messages.
    pub fn from_toml_str(text: &str, origin: &Path) -> Result<Self> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| Error::Parse {
            path: origin.to_owned(),
            message: e.to_string(),
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("configuration is always representable as TOML")
    }

    /// The fixed topology, if one is configured.
    pub fn fixed_topology(&self) -> Result<Option<Topology>> {
        self.network.topology.as_deref().map(Topology::from_adjacency_list).transpose()
    }

    /// Checks every cross-field constraint, naming the violated one.
    pub fn validate(&self) -> Result<()> {
        let net = &self.network;
        let sig = &self.signal;
        let comp = &self.compression;
        let ad = &self.adaptation;
        let run = &self.experiment;
        if net.n_nodes == 0 {
            return Err(invalid("network.n_nodes must be at least 1"));
        }
        if !(net.link_probability > 0.0 && net.link_probability <= 1.0) {
            return Err(invalid(format!(
                "network.link_probability must lie in (0, 1], got {}",
                net.link_probability
            )));
        }
        if let Some(topo) = self.fixed_topology()? {
            if topo.n_nodes() != net.n_nodes {
                return Err(invalid(format!(
                    "network.topology has {} nodes but network.n_nodes = {}",
                    topo.n_nodes(),
                    net.n_nodes
                )));
            }
        }
        check_dims(comp.d, sig.s, sig.m, "")?;
        if !(sig.noise_variance >= 0.0 && sig.noise_variance.is_finite()) {
            return Err(invalid("signal.noise_variance must be >= 0"));
        }
        let [lo, hi] = sig.alpha_range;
        if !(0.0..1.0).contains(&lo) || !(0.0..1.0).contains(&hi) || lo > hi {
            return Err(invalid(format!(
                "signal.alpha_range must satisfy 0 <= lo <= hi < 1, got [{lo}, {hi}]"
            )));
        }
        if !(comp.eta >= 0.0 && comp.eta.is_finite()) {
            return Err(invalid("compression.eta must be >= 0"));
        }
        if !(ad.mu0 > 0.0 && ad.mu0 < 2.0) {
            return Err(invalid(format!("adaptation.mu0 must lie in (0, 2), got {}", ad.mu0)));
        }
        if ad.eps.is_nan() || ad.rho.is_nan() || ad.eps < 0.0 || ad.rho < 0.0 {
            return Err(invalid("adaptation.eps and adaptation.rho must be >= 0"));
        }
        if run.iterations == 0 {
            return Err(invalid("experiment.iterations must be at least 1"));
        }
        if run.runs == 0 {
            return Err(invalid("experiment.runs must be at least 1"));
        }
        if run.runs > u32::MAX as usize || net.n_nodes >= 1 << 24 {
            return Err(invalid("too many runs or nodes for the random stream layout"));
        }
        if run.steady_state_window == 0 {
            return Err(invalid("experiment.steady_state_window must be at least 1"));
        }
        check_algorithms(&run.algorithms, "experiment.algorithms")?;
        if let Some(q) = &self.quantizer {
            q.validate().map_err(|e| invalid(format!("quantizer: {e}")))?;
        }
        let sw = &self.sweep;
        for p in &sw.points {
            check_dims(p.d, p.s, sig.m, "sweep point ")?;
        }
        if sw.bits.iter().any(|&b| b == 0 || b > 64) {
            return Err(invalid("sweep.bits entries must lie in 1..=64"));
        }
        if !(sw.clip > 0.0 && sw.clip.is_finite()) {
            return Err(invalid("sweep.clip must be positive"));
        }
        check_algorithms(&sw.algorithms, "sweep.algorithms")?;
        Ok(())
    }
}

fn check_dims(d: usize, s: usize, m: usize, prefix: &str) -> Result<()> {
    if s > d {
        return Err(invalid(format!("{prefix}s <= d violated: s = {s}, d = {d}")));
    }
    if d > m {
        return Err(invalid(format!("{prefix}d <= m violated: d = {d}, m = {m}")));
    }
    if d == 0 {
        return Err(invalid(format!("{prefix}d must be at least 1")));
    }
    Ok(())
}

fn check_algorithms(list: &[AlgorithmKind], key: &str) -> Result<()> {
    if list.is_empty() {
        return Err(invalid(format!("{key} must name at least one algorithm")));
    }
    for (i, a) in list.iter().enumerate() {
        if list[..i].contains(a) {
            return Err(invalid(format!("{key} lists {a} twice")));
        }
    }
    Ok(())
}

/// Reads and validates a configuration file.
pub fn load_config(path: &Path) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io { path: path.to_owned(), source })?;
    ExperimentConfig::from_toml_str(&text, path)
}

pub fn save_config(config: &ExperimentConfig, path: &Path) -> Result<()> {
    std::fs::write(path, config.to_toml_string()).map_err(|source| Error::Io { path: path.to_owned(), source })
}
