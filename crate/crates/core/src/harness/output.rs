//! CSV writers and readers for experiment results.
//!
//! Floats are written in Rust's shortest round-trip form, so reading a file
//! back reproduces the values bit for bit.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::experiment::SweepRow;
use crate::estimators::AlgorithmKind;
use crate::metrics::{mse_curve, ExperimentTrace};
use crate::{Error, Result};

/// A row of `mse_curve.csv`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MseRow {
    pub algorithm: AlgorithmKind,
    /// 1-based time index.
    pub iteration: usize,
    pub mse_db: f64,
    pub runs_aggregated: usize,
}

/// A row of `msd.csv`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MsdRow {
    pub algorithm: AlgorithmKind,
    pub run: usize,
    pub node: usize,
    pub msd: f64,
}

/// A row of `sweep.csv`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepCsvRow {
    pub algorithm: AlgorithmKind,
    pub d: usize,
    pub s: usize,
    pub bits: u32,
    pub final_mse_db: f64,
}

fn write_rows<T: Serialize>(path: &Path, header: &[&str], rows: impl IntoIterator<Item = T>) -> Result<()> {
    let csv_err = |source| Error::Csv { path: path.to_owned(), source };
    let mut w = csv::WriterBuilder::new().has_headers(false).from_path(path).map_err(csv_err)?;
    w.write_record(header).map_err(csv_err)?;
    for row in rows {
        w.serialize(row).map_err(csv_err)?;
    }
    w.flush().map_err(|source| Error::Io { path: path.to_owned(), source })
}

fn read_rows<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<T>> {
    let csv_err = |source| Error::Csv { path: path.to_owned(), source };
    let mut rdr = csv::Reader::from_path(path).map_err(csv_err)?;
    rdr.deserialize().collect::<std::result::Result<_, _>>().map_err(csv_err)
}

/// Aggregated learning curves ordered by algorithm, then iteration.
/// Algorithms without a completed run are omitted.
pub fn mse_rows(trace: &ExperimentTrace) -> Vec<MseRow> {
    let mut rows = Vec::new();
    for &algorithm in &trace.algorithms {
        let Ok(curve) = mse_curve(trace, algorithm) else { continue };
        rows.extend(curve.mse_db.iter().enumerate().map(|(i, &mse_db)| MseRow {
            algorithm,
            iteration: i + 1,
            mse_db,
            runs_aggregated: curve.runs_aggregated,
        }));
    }
    rows
}

/// Writes `mse_curve.csv`.
pub fn write_csv(trace: &ExperimentTrace, path: &Path) -> Result<()> {
    write_rows(path, &["algorithm", "iteration", "mse_db", "runs_aggregated"], mse_rows(trace))
}

pub fn read_mse_csv(path: &Path) -> Result<Vec<MseRow>> {
    read_rows(path)
}

/// Writes `msd.csv`, one row per completed run and node.
pub fn write_msd_csv(trace: &ExperimentTrace, path: &Path) -> Result<()> {
    let rows = trace.algorithms.iter().flat_map(|&a| {
        trace.completed(a).flat_map(move |r| {
            r.final_msd
                .iter()
                .enumerate()
                .map(move |(node, &msd)| MsdRow { algorithm: a, run: r.run, node, msd })
        })
    });
    write_rows(path, &["algorithm", "run", "node", "msd"], rows)
}

pub fn read_msd_csv(path: &Path) -> Result<Vec<MsdRow>> {
    read_rows(path)
}

/// Writes `sweep.csv`.
pub fn write_sweep_csv(rows: &[SweepRow], path: &Path) -> Result<()> {
    write_rows(
        path,
        &["algorithm", "d", "s", "bits", "final_mse_db"],
        rows.iter().map(|r| SweepCsvRow {
            algorithm: r.algorithm,
            d: r.d,
            s: r.s,
            bits: r.bits,
            final_mse_db: r.final_mse_db,
        }),
    )
}

pub fn read_sweep_csv(path: &Path) -> Result<Vec<SweepCsvRow>> {
    read_rows(path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::config::ExperimentConfig;
    use crate::harness::experiment::run_experiment;

    #[test]
    fn empty_trace_writes_header_only() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("mse_curve.csv");
        write_csv(&ExperimentTrace::default(), &path).unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), "algorithm,iteration,mse_db,runs_aggregated\n");
        assert!(read_mse_csv(&path).unwrap().is_empty());
    }

    #[test]
    fn rows_and_parse_back() {
        let mut cfg = ExperimentConfig::default();
        cfg.network.n_nodes = 4;
        cfg.experiment.iterations = 3;
        cfg.experiment.runs = 2;
        cfg.experiment.algorithms = vec![AlgorithmKind::Dce, AlgorithmKind::DiffusionNlms];
        let trace = run_experiment(&cfg).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("mse_curve.csv");
        write_csv(&trace, &path).unwrap();
        let back = read_mse_csv(&path).unwrap();
        assert_eq!(back.len(), 6);
        assert_eq!(back[0].algorithm, AlgorithmKind::Dce);
        assert_eq!(back[3].algorithm, AlgorithmKind::DiffusionNlms);
        assert_eq!(back.iter().map(|r| r.iteration).collect::<Vec<_>>(), vec![1, 2, 3, 1, 2, 3]);
        // independent re-aggregation from the raw trace
        for row in &back {
            let runs: Vec<_> = trace.completed(row.algorithm).collect();
            let mut total = 0.0;
            for r in &runs {
                for k in 0..4 {
                    total += r.error_power[(row.iteration - 1) * 4 + k];
                }
            }
            let expected = 10.0 * (total / (runs.len() * 4) as f64).log10();
            assert!((row.mse_db - expected).abs() < 1e-12);
            assert_eq!(row.runs_aggregated, 2);
        }

        let msd_path = dir.path().join("msd.csv");
        write_msd_csv(&trace, &msd_path).unwrap();
        assert_eq!(read_msd_csv(&msd_path).unwrap().len(), 2 * 2 * 4);
    }
}
