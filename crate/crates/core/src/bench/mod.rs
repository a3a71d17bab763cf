//! Experiment runner: metrics, grid selections, multi-repetition sweeps, and
//! machine-readable reports.

mod config;
mod run;

pub use config::{ExperimentConfig, Preset, ScenarioKind};
pub use run::{run_experiment, CellReport, ResultTable, RowReport, RunOutcome};

use crate::data::{Dataset, GroundTruth, TaskKind};
use crate::error::{Error, Result};
use crate::nn::{forward, NetworkParams};
use crate::util::argmax;

/// Mean squared discrepancy between the generating network and a fitted one
/// over the test inputs. The comparison is noise-free: test outputs are never
/// consulted.
pub fn generalization_error(
    gt: &GroundTruth,
    fitted: &NetworkParams,
    test: &Dataset,
) -> Result<f64> {
    if test.task() != TaskKind::Regression || test.output_dim() != 1 {
        return Err(Error::domain("generalization error applies to regression data"));
    }
    if test.is_empty() {
        return Err(Error::domain("empty test set"));
    }
    let mut sum = 0.0;
    for i in 0..test.len() {
        let truth = gt.clean_output(test.input(i))?[0];
        let predicted = forward(fitted, test.input(i))?[0];
        let diff = truth - predicted;
        sum += diff * diff;
    }
    Ok(sum / test.len() as f64)
}

/// Fraction of test rows whose predicted class (argmax output, ties to the
/// lowest index) matches the labeled class.
pub fn accuracy(fitted: &NetworkParams, test: &Dataset) -> Result<f64> {
    if test.task() != TaskKind::Classification {
        return Err(Error::domain("accuracy applies to classification data"));
    }
    if test.is_empty() {
        return Err(Error::domain("empty test set"));
    }
    let mut hits = 0usize;
    for i in 0..test.len() {
        let prediction = forward(fitted, test.input(i))?;
        if argmax(&prediction) == test.class_of(i).unwrap() {
            hits += 1;
        }
    }
    Ok(hits as f64 / test.len() as f64)
}

/// Smallest error across a grid of fitted models; ties go to the smallest
/// grid key. Returns `(best error, best key)`.
pub fn best_in_grid(results: &[(usize, f64)]) -> Result<(f64, usize)> {
    if results.is_empty() {
        return Err(Error::config("empty grid"));
    }
    let mut best = results[0];
    for &(key, value) in &results[1..] {
        if value < best.1 || (value == best.1 && key < best.0) {
            best = (key, value);
        }
    }
    Ok((best.1, best.0))
}

/// Oracle selection over the block-count grid: the smallest test error and
/// the block count attaining it.
pub fn mom_min(results_by_blocks: &[(usize, f64)]) -> Result<(f64, usize)> {
    best_in_grid(results_by_blocks)
}

/// Oracle selection over the Huber quantile grid.
pub fn huber_min(results_by_quantile: &[(usize, f64)]) -> Result<(f64, usize)> {
    best_in_grid(results_by_quantile)
}

/// Nearest-rank q-th percentile of `|y|` over the training outputs: the
/// `ceil(q/100 * n)`-th smallest absolute value.
pub fn huber_k_for_quantile(train: &Dataset, q: usize) -> Result<f64> {
    if q == 0 || q > 100 {
        return Err(Error::config(format!("quantile must be in 1..=100, got {q}")));
    }
    if train.is_empty() || train.output_dim() != 1 {
        return Err(Error::domain("huber quantile needs nonempty scalar outputs"));
    }
    let mut magnitudes: Vec<f64> = (0..train.len()).map(|i| train.output(i)[0].abs()).collect();
    magnitudes.sort_by(f64::total_cmp);
    let rank = ((q as f64 / 100.0) * magnitudes.len() as f64).ceil() as usize;
    Ok(magnitudes[rank.max(1) - 1])
}
