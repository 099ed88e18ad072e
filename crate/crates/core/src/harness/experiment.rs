//! Monte-Carlo orchestration.
//!
//! Within a run all algorithms advance in lockstep on the same regressor and
//! noise samples, so their curves are paired comparisons. Runs are
//! independent and may execute on a thread pool; results are reassembled in
//! run order.

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;

use super::config::{DataMode, ExperimentConfig, PhiMode};
use super::rng::{Purpose, RngPlan};
use crate::compression::{compress, init_gaussian, MeasurementMatrix};
use crate::estimators::{AdaptationParams, AlgorithmKind, Network, NodeInput};
use crate::metrics::{mse_curve, msd, ExperimentTrace, QuantizerSpec, RunTrace};
use crate::recovery::OmpConfig;
use crate::signal::{generate_ground_truth, measure_compressed, measure_full, NoiseModel, RegressorState, SparseVector};
use crate::topology::{generate_topology, metropolis_weights, Topology};
use crate::{Error, Result};

/// Random draws that define one run and are shared by every algorithm.
#[derive(Debug, Clone)]
pub struct RunSetup {
    pub topology: Topology,
    pub omega0: SparseVector,
    /// Initial matrix of every node.
    pub phis: Vec<MeasurementMatrix>,
    pub alphas: Vec<f64>,
}

/// Draws the topology, ground truth, initial matrices and AR(1)
/// coefficients of run `run`.
pub fn run_setup(config: &ExperimentConfig, plan: &RngPlan, run: usize) -> Result<RunSetup> {
    let n = config.network.n_nodes;
    let sig = &config.signal;
    let real = sig.real_valued;
    let topology = match config.fixed_topology()? {
        Some(t) => t,
        None => generate_topology(n, config.network.link_probability, &mut plan.stream(run, Purpose::Topology, 0)),
    };
    let omega0 = generate_ground_truth(sig.m, sig.s, real, &mut plan.stream(run, Purpose::GroundTruth, 0))?;
    let d = config.compression.d;
    let phis = match config.compression.phi_mode {
        PhiMode::Shared => {
            let phi = init_gaussian(d, sig.m, real, &mut plan.stream(run, Purpose::MeasurementMatrix, 0))?;
            vec![phi; n]
        }
        PhiMode::PerNode => (0..n)
            .map(|k| init_gaussian(d, sig.m, real, &mut plan.stream(run, Purpose::MeasurementMatrix, k)))
            .collect::<Result<_>>()?,
    };
    let [lo, hi] = sig.alpha_range;
    let alphas = (0..n)
        .map(|k| plan.stream(run, Purpose::Correlation, k).random_range(lo..=hi))
        .collect();
    Ok(RunSetup { topology, omega0, phis, alphas })
}

fn params(config: &ExperimentConfig) -> AdaptationParams {
    AdaptationParams {
        mu0: config.adaptation.mu0,
        eps: config.adaptation.eps,
        rho: config.adaptation.rho,
        eta: config.compression.eta,
        omp: OmpConfig::new(config.signal.s),
        quantizer: config.quantizer,
    }
}

struct Lane {
    net: Network,
    trace: RunTrace,
    /// `Φ_k ω₀` per node, refreshed only when the matrices move.
    targets: Vec<Vec<Complex64>>,
}

/// Simulates every configured algorithm over one run.
pub fn simulate_run(config: &ExperimentConfig, plan: &RngPlan, run: usize) -> Result<Vec<RunTrace>> {
    let setup = run_setup(config, plan, run)?;
    let n = config.network.n_nodes;
    let iterations = config.experiment.iterations;
    let real = config.signal.real_valued;
    let weights = metropolis_weights(&setup.topology);
    let p = params(config);

    let mut lanes: Vec<Lane> = config
        .experiment
        .algorithms
        .iter()
        .map(|&kind| {
            let net = if kind.is_compressed() {
                Network::compressed(kind, weights.clone(), setup.phis.clone(), p)?
            } else {
                Network::full(kind, weights.clone(), config.signal.m, p)
            };
            let targets = if kind.is_compressed() {
                setup
                    .phis
                    .iter()
                    .map(|phi| compress(phi, setup.omega0.coeffs()))
                    .collect::<Result<_>>()?
            } else {
                Vec::new()
            };
            Ok(Lane {
                net,
                trace: RunTrace {
                    algorithm: kind,
                    run,
                    n_nodes: n,
                    error_power: Vec::with_capacity(iterations * n),
                    final_msd: Vec::new(),
                    diverged: false,
                },
                targets,
            })
        })
        .collect::<Result<_>>()?;

    let mut reg_rngs: Vec<_> = (0..n).map(|k| plan.stream(run, Purpose::Regressor, k)).collect();
    let mut noise_rngs: Vec<_> = (0..n).map(|k| plan.stream(run, Purpose::Noise, k)).collect();
    let mut regressors: Vec<RegressorState> = (0..n)
        .map(|k| RegressorState::new(k, setup.alphas[k], config.signal.m, real, &mut reg_rngs[k]))
        .collect();
    let noise_model = NoiseModel::new(config.signal.noise_variance);
    let mut noise = vec![Complex64::new(0.0, 0.0); n];

    for i in 0..iterations {
        if i > 0 {
            for (reg, rng) in regressors.iter_mut().zip(reg_rngs.iter_mut()) {
                reg.step(rng);
            }
        }
        for (v, rng) in noise.iter_mut().zip(noise_rngs.iter_mut()) {
            *v = noise_model.sample(rng, real);
        }

        for lane in lanes.iter_mut().filter(|l| !l.trace.diverged) {
            let kind = lane.net.kind();
            let inputs = (0..n)
                .map(|k| {
                    let x = regressors[k].regressor();
                    if kind.is_compressed() {
                        let phi = lane.net.phi(k);
                        let x_bar = compress(phi, x)?;
                        let desired = match config.signal.data_mode {
                            DataMode::CompressedConsistent => {
                                if kind == AlgorithmKind::DceOptimizedPhi {
                                    measure_compressed(&setup.omega0, phi, &x_bar, noise[k])?
                                } else {
                                    crate::cvec::dot_h(&lane.targets[k], &x_bar) + noise[k]
                                }
                            }
                            DataMode::Physical => measure_full(&setup.omega0, x, noise[k])?,
                        };
                        Ok(NodeInput { regressor: x_bar, desired })
                    } else {
                        Ok(NodeInput { regressor: x.to_vec(), desired: measure_full(&setup.omega0, x, noise[k])? })
                    }
                })
                .collect::<Result<Vec<_>>>()?;
            match lane.net.run_round(&inputs) {
                Ok(errors) => lane.trace.error_power.extend(errors.iter().map(|e| e.norm_sqr())),
                Err(Error::Divergence { .. }) => lane.trace.diverged = true,
                Err(e) => return Err(e),
            }
        }
    }

    let mut out = Vec::with_capacity(lanes.len());
    for mut lane in lanes {
        if !lane.trace.diverged {
            lane.trace.final_msd = lane
                .net
                .final_estimates()?
                .iter()
                .map(|est| msd(est, &setup.omega0))
                .collect::<Result<_>>()?;
        }
        out.push(lane.trace);
    }
    Ok(out)
}

/// Runs all Monte-Carlo repetitions of `config`.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentTrace> {
    config.validate()?;
    let plan = RngPlan::new(config.seed);
    let runs = config.experiment.runs;
    let per_run: Vec<Vec<RunTrace>> = if config.experiment.parallel {
        (0..runs)
            .into_par_iter()
            .map(|r| simulate_run(config, &plan, r))
            .collect::<Result<_>>()?
    } else {
        (0..runs).map(|r| simulate_run(config, &plan, r)).collect::<Result<_>>()?
    };
    let algorithms = config.experiment.algorithms.clone();
    let mut traces: Vec<RunTrace> = per_run.into_iter().flatten().collect();
    traces.sort_by_key(|t| (algorithms.iter().position(|a| *a == t.algorithm), t.run));
    Ok(ExperimentTrace {
        iterations: config.experiment.iterations,
        n_nodes: config.network.n_nodes,
        algorithms,
        runs: traces,
    })
}

/// One cell of the dimension/sparsity/resolution sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub algorithm: AlgorithmKind,
    pub d: usize,
    pub s: usize,
    pub bits: u32,
    /// Steady-state MSE over the trailing window, in dB.
    pub final_mse_db: f64,
    /// Per-run steady-state MSE (linear), for error bars.
    pub per_run_mse: Vec<f64>,
}

/// Runs the configured `(d, s) × bits` grid with the sweep algorithms.
/// Every cell reuses the same seed so that cells differ only in the swept
/// parameters.
pub fn run_sweep(config: &ExperimentConfig) -> Result<Vec<SweepRow>> {
    config.validate()?;
    let window = config.experiment.steady_state_window;
    let mut rows = Vec::new();
    for point in &config.sweep.points {
        for &bits in &config.sweep.bits {
            let mut cell = config.clone();
            cell.compression.d = point.d;
            cell.signal.s = point.s;
            cell.quantizer = Some(QuantizerSpec::new(bits, config.sweep.clip)?);
            cell.experiment.algorithms = config.sweep.algorithms.clone();
            let trace = run_experiment(&cell)?;
            for &algorithm in &cell.experiment.algorithms {
                let curve = mse_curve(&trace, algorithm)?;
                let per_run_mse = trace.completed(algorithm).map(|r| r.steady_state_mse(window)).collect();
                rows.push(SweepRow {
                    algorithm,
                    d: point.d,
                    s: point.s,
                    bits,
                    final_mse_db: curve.steady_state_db(window),
                    per_run_mse,
                });
            }
        }
    }
    rows.sort_by_key(|r| {
        let alg = config.sweep.algorithms.iter().position(|a| *a == r.algorithm);
        let pt = config.sweep.points.iter().position(|p| p.d == r.d && p.s == r.s);
        let b = config.sweep.bits.iter().position(|b| *b == r.bits);
        (alg, b, pt)
    });
    Ok(rows)
}
