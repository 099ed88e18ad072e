use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use dce::compression::MeasurementMatrix;
use dce::estimators::AlgorithmKind;
use dce::harness::{
    load_config, run_experiment, run_setup, run_sweep, write_csv, write_msd_csv, write_sweep_csv, ExperimentConfig,
    RngPlan,
};
use dce::metrics::mse_curve;
use dce::recovery::{omp_reconstruct, OmpConfig};
use dce::{Complex64, Error};

const EXIT_FAILURE: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_DIVERGED: u8 = 3;

#[derive(Parser)]
#[command(name = "dce", version, about = "Distributed compressed estimation simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the Monte-Carlo experiment described by a config file.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        runs: Option<usize>,
        /// Comma-separated algorithm names (dnlms, sparse_dnlms, dce, dce_opt).
        #[arg(long, value_delimiter = ',')]
        algos: Option<Vec<String>>,
        /// Also run the (d, s) x bits sweep and write sweep.csv.
        #[arg(long)]
        sweep: bool,
        /// Execute runs on a single thread.
        #[arg(long)]
        sequential: bool,
        /// Write run 0's ground truth and initial measurement matrix.
        #[arg(long)]
        dump: bool,
    },
    /// Recover a sparse vector from compressed measurements with OMP.
    Recover {
        /// Measurement matrix as row,col,real,imag rows.
        #[arg(long)]
        phi: PathBuf,
        /// Measurements as index,real,imag rows.
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        sparsity: usize,
    },
    /// Parse and validate a config file.
    ValidateConfig { path: PathBuf },
}

enum Failure {
    Config(Error),
    Diverged,
    Other(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidConfig(_) | Error::Parse { .. } | Error::InvalidQuantizer(_) | Error::InvalidTopology(_) => {
                Failure::Config(e)
            }
            e => Failure::Other(e),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Simulate { config, out, seed, runs, algos, sweep, sequential, dump } => {
            simulate(&config, &out, seed, runs, algos, sweep, sequential, dump)
        }
        Command::Recover { phi, input, sparsity } => recover(&phi, &input, sparsity),
        Command::ValidateConfig { path } => load_config(&path).map(|_| println!("ok")).map_err(Failure::Config),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(e)) => {
            eprintln!("config error: {e}");
            ExitCode::from(EXIT_CONFIG)
        }
        Err(Failure::Diverged) => {
            eprintln!("error: every run of every algorithm diverged");
            ExitCode::from(EXIT_DIVERGED)
        }
        Err(Failure::Other(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_FAILURE)
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn simulate(
    config_path: &Path,
    out: &Path,
    seed: Option<u64>,
    runs: Option<usize>,
    algos: Option<Vec<String>>,
    sweep: bool,
    sequential: bool,
    dump: bool,
) -> Result<(), Failure> {
    let mut cfg: ExperimentConfig = load_config(config_path).map_err(Failure::Config)?;
    if let Some(seed) = seed {
        cfg.seed = seed;
    }
    if let Some(runs) = runs {
        cfg.experiment.runs = runs;
    }
    if let Some(names) = algos {
        cfg.experiment.algorithms = names.iter().map(|n| n.parse()).collect::<Result<_, Error>>()?;
    }
    if sequential {
        cfg.experiment.parallel = false;
    }
    cfg.validate()?;
    std::fs::create_dir_all(out).map_err(|source| Error::Io { path: out.to_owned(), source })?;

    let trace = run_experiment(&cfg)?;
    write_csv(&trace, &out.join("mse_curve.csv"))?;
    write_msd_csv(&trace, &out.join("msd.csv"))?;

    let window = cfg.experiment.steady_state_window;
    for &a in &cfg.experiment.algorithms {
        let diverged = trace.diverged_count(a);
        match mse_curve(&trace, a) {
            Ok(curve) => println!(
                "{a:>12}: steady-state MSE {:7.2} dB over {} runs ({diverged} diverged)",
                curve.steady_state_db(window),
                curve.runs_aggregated
            ),
            Err(_) => println!("{a:>12}: all {diverged} runs diverged"),
        }
    }

    if dump {
        let setup = run_setup(&cfg, &RngPlan::new(cfg.seed), 0)?;
        setup.omega0.write_csv(&out.join("ground_truth.csv"))?;
        setup.phis[0].write_csv(&out.join("phi.csv"))?;
    }

    if sweep {
        let rows = run_sweep(&cfg)?;
        write_sweep_csv(&rows, &out.join("sweep.csv"))?;
        for r in &rows {
            println!("{:>12} d={:<3} s={:<3} bits={:<3} {:7.2} dB", r.algorithm, r.d, r.s, r.bits, r.final_mse_db);
        }
    }

    let all_diverged = cfg
        .experiment
        .algorithms
        .iter()
        .all(|&a: &AlgorithmKind| trace.diverged_count(a) == cfg.experiment.runs);
    if all_diverged {
        return Err(Failure::Diverged);
    }
    Ok(())
}

fn read_vector(path: &Path) -> Result<Vec<Complex64>, Error> {
    let csv_err = |source| Error::Csv { path: path.to_owned(), source };
    let mut rdr = csv::Reader::from_path(path).map_err(csv_err)?;
    let mut entries: Vec<(usize, Complex64)> = Vec::new();
    for rec in rdr.deserialize::<(usize, f64, f64)>() {
        let (i, re, im) = rec.map_err(csv_err)?;
        entries.push((i, Complex64::new(re, im)));
    }
    let len = entries.iter().map(|(i, _)| i + 1).max().unwrap_or(0);
    let mut v = vec![Complex64::new(0.0, 0.0); len];
    for (i, c) in entries {
        v[i] = c;
    }
    Ok(v)
}

fn recover(phi_path: &Path, input: &Path, sparsity: usize) -> Result<(), Failure> {
    let phi = MeasurementMatrix::read_csv(phi_path)?;
    let y = read_vector(input)?;
    let out = omp_reconstruct(&phi, &y, &OmpConfig::new(sparsity)).map_err(|e| match e {
        Error::InvalidConfig(_) => Failure::Config(e),
        e => Failure::Other(e),
    })?;
    println!("index,real,imag");
    for (i, c) in out.estimate.iter().enumerate() {
        println!("{i},{},{}", c.re, c.im);
    }
    if out.stalled {
        eprintln!("warning: OMP stopped early on a dependent column");
    }
    Ok(())
}
