//! Experiment configuration, seeded Monte-Carlo orchestration and CSV output.

pub mod config;
pub mod experiment;
pub mod output;
pub mod rng;

pub use config::{load_config, save_config, DataMode, ExperimentConfig, PhiMode, SweepPoint};
pub use experiment::{run_experiment, run_setup, run_sweep, simulate_run, RunSetup, SweepRow};
pub use output::{read_mse_csv, read_msd_csv, read_sweep_csv, write_csv, write_msd_csv, write_sweep_csv};
pub use rng::{Purpose, RngPlan};
