//! Two-player stochastic gradient training on the median-of-means objective,
//! plain mini-batch SGD baselines, and k-fold cross-validation of the block
//! count.
//!
//! Per iteration: sample a batch, equipartition it, step player 1 down the
//! objective, then step player 2 (against the already-updated player 1).
//! Training stops when either player's step norm drops to the tolerance, or
//! at the iteration cap.

use serde::{Deserialize, Serialize};

use crate::data::{Dataset, TaskKind};
use crate::error::{Error, Result};
use crate::loss::LossKind;
use crate::mom::{
    batch_eval, equipartition_with_rng, increment_means, mean_gradient_from_eval, median_block,
    per_sample_losses,
};
use crate::nn::{
    forward, init_params, param_distance, Architecture, InitScheme, NetworkParams,
};
use crate::rng::{self, derive_seed, stream};
use crate::util::argmax;

/// Which way the second player moves.
///
/// The objective is maximized over the second player, which it approaches by
/// fitting the data well (descending its own loss); that is `SupConsistent`,
/// the default. `PaperLiteral` applies `p2 - r * grad` with the objective
/// gradient's literal sign instead, which ascends the second player's loss.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Player2Direction {
    SupConsistent,
    PaperLiteral,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    /// Number of blocks b.
    pub blocks: usize,
    /// Learning rate r.
    pub learning_rate: f64,
    /// Batch size as a fraction of the training set (batch = floor(frac * n)).
    pub batch_fraction: f64,
    /// Iteration cap.
    pub max_iters: usize,
    /// Stopping tolerance d on the parameter step norm.
    pub stop_tol: f64,
    pub seed: u64,
    pub player2_direction: Player2Direction,
    pub init: InitScheme,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            blocks: 1,
            learning_rate: 1e-2,
            batch_fraction: 0.15,
            max_iters: 20_000,
            stop_tol: 1e-2,
            seed: 0,
            player2_direction: Player2Direction::SupConsistent,
            init: InitScheme::ScaledUniform,
        }
    }
}

/// One iteration of a training trace.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TraceRecord {
    /// 1-based iteration counter.
    pub iteration: usize,
    /// Batch objective at the start of the iteration: the median block
    /// increment mean for the two-player trainer, the batch mean loss for
    /// plain SGD.
    pub objective: f64,
    pub p1_step_norm: f64,
    /// Zero when the iteration stopped before the second player moved.
    pub p2_step_norm: f64,
    /// Zero-based index of the selected median block.
    pub median_block: usize,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct TrainTrace {
    pub records: Vec<TraceRecord>,
}

impl TrainTrace {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn last(&self) -> Option<&TraceRecord> {
        self.records.last()
    }
}

fn validate(data: &Dataset, arch: &Architecture, loss: LossKind, cfg: &TrainConfig) -> Result<usize> {
    if data.is_empty() {
        return Err(Error::domain("training data is empty"));
    }
    if arch.input_dim() != data.input_dim() || arch.output_dim() != data.output_dim() {
        return Err(Error::shape(format!(
            "architecture is {}->{} but data is {}->{}",
            arch.input_dim(),
            arch.output_dim(),
            data.input_dim(),
            data.output_dim()
        )));
    }
    match (loss.is_classification(), data.task()) {
        (true, TaskKind::Classification) | (false, TaskKind::Regression) => {}
        _ => return Err(Error::domain("loss kind does not match the task")),
    }
    if !(cfg.batch_fraction > 0.0 && cfg.batch_fraction <= 1.0) {
        return Err(Error::config(format!(
            "batch fraction must be in (0, 1], got {}",
            cfg.batch_fraction
        )));
    }
    if !cfg.learning_rate.is_finite() || cfg.learning_rate < 0.0 {
        return Err(Error::config("learning rate must be a finite nonnegative number"));
    }
    if !cfg.stop_tol.is_finite() || cfg.stop_tol <= 0.0 {
        return Err(Error::config("stopping tolerance must be positive"));
    }
    if cfg.max_iters == 0 {
        return Err(Error::config("max_iters must be >= 1"));
    }
    let batch = (cfg.batch_fraction * data.len() as f64).floor() as usize;
    if batch == 0 {
        return Err(Error::config(format!(
            "batch fraction {} of {} samples gives an empty batch",
            cfg.batch_fraction,
            data.len()
        )));
    }
    if cfg.blocks == 0 || cfg.blocks > batch {
        return Err(Error::config(format!(
            "block count {} must satisfy 1 <= b <= batch size {}",
            cfg.blocks, batch
        )));
    }
    Ok(batch)
}

/// Uniform sample of `amount` distinct indices from `0..n`, ascending.
fn sample_batch<R: rand::Rng>(generator: &mut R, n: usize, amount: usize) -> Vec<usize> {
    let mut picked = rand::seq::index::sample(generator, n, amount).into_vec();
    picked.sort_unstable();
    picked
}

/// Two-player stochastic gradient training of the median-of-means objective.
/// Returns the first player's parameters and the iteration trace.
pub fn train_mom(
    data: &Dataset,
    arch: &Architecture,
    loss: LossKind,
    cfg: &TrainConfig,
) -> Result<(NetworkParams, TrainTrace)> {
    let batch_size = validate(data, arch, loss, cfg)?;
    let r = cfg.learning_rate;

    let mut p1 = init_params(arch, cfg.init, derive_seed(cfg.seed, stream::PLAYER1_INIT))?;
    let mut p2 = init_params(arch, cfg.init, derive_seed(cfg.seed, stream::PLAYER2_INIT))?;
    let mut batch_rng = rng::seeded(derive_seed(cfg.seed, stream::BATCH));
    let mut partition_rng = rng::seeded(derive_seed(cfg.seed, stream::PARTITION));

    let mut trace = TrainTrace::default();
    for iteration in 1..=cfg.max_iters {
        let batch_rows = sample_batch(&mut batch_rng, data.len(), batch_size);
        let batch = data.subset(&batch_rows);
        let partition = equipartition_with_rng(batch_size, cfg.blocks, &mut partition_rng)?;

        let eval1 = batch_eval(&batch, &p1, loss)?;
        let eval2 = batch_eval(&batch, &p2, loss)?;
        let report = median_block(&increment_means(&partition, &eval1.losses, &eval2.losses))?;
        let median_index = report.median_index;

        let g1 = mean_gradient_from_eval(
            &partition.blocks()[median_index],
            &batch,
            &p1,
            &eval1,
            loss,
        )?;
        let p1_new = p1.stepped(-r, &g1)?;
        let p1_step = param_distance(&p1_new, &p1)?;
        p1 = p1_new;
        if p1_step <= cfg.stop_tol || !p1_step.is_finite() {
            trace.records.push(TraceRecord {
                iteration,
                objective: report.median_value,
                p1_step_norm: p1_step,
                p2_step_norm: 0.0,
                median_block: median_index,
            });
            break;
        }

        // Second player reacts to the already-updated first player; its own
        // per-sample evaluation is still valid.
        let eval1_updated = batch_eval(&batch, &p1, loss)?;
        let report2 = median_block(&increment_means(
            &partition,
            &eval1_updated.losses,
            &eval2.losses,
        ))?;
        let mut g2 = mean_gradient_from_eval(
            &partition.blocks()[report2.median_index],
            &batch,
            &p2,
            &eval2,
            loss,
        )?;
        g2.negate();
        let p2_new = match cfg.player2_direction {
            Player2Direction::SupConsistent => p2.stepped(r, &g2)?,
            Player2Direction::PaperLiteral => p2.stepped(-r, &g2)?,
        };
        let p2_step = param_distance(&p2_new, &p2)?;
        p2 = p2_new;
        trace.records.push(TraceRecord {
            iteration,
            objective: report.median_value,
            p1_step_norm: p1_step,
            p2_step_norm: p2_step,
            median_block: median_index,
        });
        if p2_step <= cfg.stop_tol || !p2_step.is_finite() {
            break;
        }
    }
    Ok((p1, trace))
}

/// Plain mini-batch SGD on the mean loss, with the same batch schedule,
/// initialization stream, stopping rule, and iteration cap as the two-player
/// trainer.
pub fn train_standard(
    data: &Dataset,
    arch: &Architecture,
    loss: LossKind,
    cfg: &TrainConfig,
) -> Result<(NetworkParams, TrainTrace)> {
    let batch_size = validate(data, arch, loss, cfg)?;
    let r = cfg.learning_rate;

    let mut params = init_params(arch, cfg.init, derive_seed(cfg.seed, stream::PLAYER1_INIT))?;
    let mut batch_rng = rng::seeded(derive_seed(cfg.seed, stream::BATCH));
    let every_row: Vec<usize> = (0..batch_size).collect();

    let mut trace = TrainTrace::default();
    for iteration in 1..=cfg.max_iters {
        let batch_rows = sample_batch(&mut batch_rng, data.len(), batch_size);
        let batch = data.subset(&batch_rows);

        let eval = batch_eval(&batch, &params, loss)?;
        let objective = eval.losses.iter().sum::<f64>() / batch_size as f64;
        let g = mean_gradient_from_eval(&every_row, &batch, &params, &eval, loss)?;
        let new_params = params.stepped(-r, &g)?;
        let step = param_distance(&new_params, &params)?;
        params = new_params;
        trace.records.push(TraceRecord {
            iteration,
            objective,
            p1_step_norm: step,
            p2_step_norm: 0.0,
            median_block: 0,
        });
        if step <= cfg.stop_tol || !step.is_finite() {
            break;
        }
    }
    Ok((params, trace))
}

/// Mean loss of a parameter set over a dataset.
pub fn dataset_mean_loss(data: &Dataset, params: &NetworkParams, loss: LossKind) -> Result<f64> {
    if data.is_empty() {
        return Err(Error::domain("empty dataset"));
    }
    let values = per_sample_losses(data, params, loss)?;
    Ok(values.iter().sum::<f64>() / values.len() as f64)
}

/// Cross-validation score of one block count.
#[derive(Debug, Clone, Serialize)]
pub struct BlockScore {
    pub blocks: usize,
    /// Mean held-out score over the folds (mean squared-error loss for
    /// regression, error rate for classification). Lower is better.
    pub mean_score: f64,
    pub fold_scores: Vec<f64>,
}

fn holdout_score(holdout: &Dataset, params: &NetworkParams, loss: LossKind) -> Result<f64> {
    match holdout.task() {
        TaskKind::Regression => dataset_mean_loss(holdout, params, LossKind::SquaredError),
        TaskKind::Classification => {
            let _ = loss;
            let mut wrong = 0usize;
            for i in 0..holdout.len() {
                let prediction = forward(params, holdout.input(i))?;
                if argmax(&prediction) != holdout.class_of(i).unwrap() {
                    wrong += 1;
                }
            }
            Ok(wrong as f64 / holdout.len() as f64)
        }
    }
}

/// Selects the block count by k-fold cross-validation: the training data is
/// shuffled once (seeded), split into contiguous folds, and every candidate
/// `b` is trained on each fold complement and scored on the fold. Returns
/// the best `b` (ties to the smallest) and all scores.
pub fn cross_validate_blocks(
    data: &Dataset,
    arch: &Architecture,
    loss: LossKind,
    b_grid: &[usize],
    folds: usize,
    cfg: &TrainConfig,
) -> Result<(usize, Vec<BlockScore>)> {
    if folds < 2 {
        return Err(Error::config("cross-validation needs at least 2 folds"));
    }
    if folds > data.len() {
        return Err(Error::config(format!(
            "{folds} folds cannot be formed from {} samples",
            data.len()
        )));
    }
    if b_grid.is_empty() {
        return Err(Error::config("empty block grid"));
    }

    let n = data.len();
    let mut order: Vec<usize> = (0..n).collect();
    let mut shuffle_rng = rng::seeded(derive_seed(cfg.seed, stream::CV_SHUFFLE));
    rand::seq::SliceRandom::shuffle(order.as_mut_slice(), &mut shuffle_rng);

    // Contiguous folds over the shuffled order; the first n % folds folds
    // take one extra sample.
    let base = n / folds;
    let extra = n % folds;
    let mut bounds = Vec::with_capacity(folds + 1);
    let mut cursor = 0usize;
    bounds.push(0);
    for f in 0..folds {
        cursor += base + usize::from(f < extra);
        bounds.push(cursor);
    }

    let smallest_train = n - bounds.windows(2).map(|w| w[1] - w[0]).max().unwrap();
    let smallest_batch = (cfg.batch_fraction * smallest_train as f64).floor() as usize;
    if let Some(&bad) = b_grid.iter().find(|&&b| b == 0 || b > smallest_batch) {
        return Err(Error::config(format!(
            "block count {bad} exceeds the fold-training batch size {smallest_batch}"
        )));
    }

    let mut scores = Vec::with_capacity(b_grid.len());
    for &b in b_grid {
        let mut fold_scores = Vec::with_capacity(folds);
        for f in 0..folds {
            let holdout_rows = &order[bounds[f]..bounds[f + 1]];
            let train_rows: Vec<usize> = order[..bounds[f]]
                .iter()
                .chain(&order[bounds[f + 1]..])
                .copied()
                .collect();
            let train_ds = data.subset(&train_rows);
            let holdout_ds = data.subset(holdout_rows);
            let fold_cfg = TrainConfig {
                blocks: b,
                seed: derive_seed(derive_seed(cfg.seed, stream::CV_FOLD), f as u64),
                ..*cfg
            };
            let (params, _) = train_mom(&train_ds, arch, loss, &fold_cfg)?;
            fold_scores.push(holdout_score(&holdout_ds, &params, loss)?);
        }
        let mean_score = fold_scores.iter().sum::<f64>() / folds as f64;
        scores.push(BlockScore {
            blocks: b,
            mean_score,
            fold_scores,
        });
    }

    let mut best = &scores[0];
    for s in &scores[1..] {
        if s.mean_score < best.mean_score
            || (s.mean_score == best.mean_score && s.blocks < best.blocks)
        {
            best = s;
        }
    }
    Ok((best.blocks, scores))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::gen_regression;

    fn quick_cfg(seed: u64) -> TrainConfig {
        TrainConfig {
            blocks: 1,
            learning_rate: 0.05,
            batch_fraction: 0.25,
            max_iters: 300,
            stop_tol: 1e-9,
            seed,
            ..TrainConfig::default()
        }
    }

    #[test]
    fn zero_learning_rate_stops_immediately() {
        let (data, _) = gen_regression(40, 3, 1, 4, 10.0, 1).unwrap();
        let arch = Architecture::uniform(3, 1, 1, 4).unwrap();
        let cfg = TrainConfig {
            learning_rate: 0.0,
            stop_tol: 1e-2,
            ..quick_cfg(7)
        };
        let init = init_params(&arch, cfg.init, derive_seed(7, stream::PLAYER1_INIT)).unwrap();

        let (params, trace) = train_mom(&data, &arch, LossKind::SquaredError, &cfg).unwrap();
        assert_eq!(trace.len(), 1);
        assert_eq!(trace.records[0].p1_step_norm, 0.0);
        assert_eq!(params, init);

        let (params, trace) =
            train_standard(&data, &arch, LossKind::SquaredError, &cfg).unwrap();
        assert_eq!(trace.len(), 1);
        assert_eq!(params, init);
    }

    #[test]
    fn oversized_block_count_is_a_config_error() {
        let (data, _) = gen_regression(40, 3, 1, 4, 10.0, 2).unwrap();
        let arch = Architecture::uniform(3, 1, 1, 4).unwrap();
        let cfg = TrainConfig {
            blocks: 11, // batch = floor(0.25 * 40) = 10
            ..quick_cfg(1)
        };
        assert!(matches!(
            train_mom(&data, &arch, LossKind::SquaredError, &cfg),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn mismatched_loss_and_task_rejected() {
        let (data, _) = gen_regression(20, 3, 0, 1, 10.0, 3).unwrap();
        let arch = Architecture::uniform(3, 1, 0, 1).unwrap();
        assert!(matches!(
            train_mom(&data, &arch, LossKind::SoftmaxCrossEntropy, &quick_cfg(1)),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn single_sample_affine_regression_interpolates() {
        let data = Dataset::new(
            crate::data::TaskKind::Regression,
            1,
            1,
            1,
            vec![1.0],
            vec![2.0],
        )
        .unwrap();
        let arch = Architecture::uniform(1, 1, 0, 1).unwrap();
        let cfg = TrainConfig {
            learning_rate: 0.1,
            batch_fraction: 1.0,
            max_iters: 2000,
            stop_tol: 1e-12,
            ..quick_cfg(5)
        };
        let (params, _) = train_standard(&data, &arch, LossKind::SquaredError, &cfg).unwrap();
        let fit = dataset_mean_loss(&data, &params, LossKind::SquaredError).unwrap();
        assert!(fit < 1e-4, "final training loss {fit}");
        // Interpolating affine map: w * 1 + b = 2.
        let predicted = forward(&params, &[1.0]).unwrap()[0];
        assert!((predicted - 2.0).abs() < 1e-2);
    }

    #[test]
    fn identical_seeds_give_identical_traces() {
        let (data, _) = gen_regression(60, 3, 1, 4, 10.0, 4).unwrap();
        let arch = Architecture::uniform(3, 1, 1, 4).unwrap();
        let cfg = TrainConfig { blocks: 3, ..quick_cfg(11) };
        let (pa, ta) = train_mom(&data, &arch, LossKind::SquaredError, &cfg).unwrap();
        let (pb, tb) = train_mom(&data, &arch, LossKind::SquaredError, &cfg).unwrap();
        assert_eq!(pa, pb);
        assert_eq!(ta.records, tb.records);
    }

    #[test]
    fn single_block_matches_standard_sgd_iterates() {
        let (data, _) = gen_regression(60, 3, 1, 4, 10.0, 5).unwrap();
        let arch = Architecture::uniform(3, 1, 1, 4).unwrap();
        let cfg = TrainConfig {
            blocks: 1,
            max_iters: 120,
            stop_tol: 1e-300,
            ..quick_cfg(13)
        };
        let (p_mom, t_mom) = train_mom(&data, &arch, LossKind::SquaredError, &cfg).unwrap();
        let (p_std, t_std) =
            train_standard(&data, &arch, LossKind::SquaredError, &cfg).unwrap();
        assert_eq!(p_mom, p_std);
        assert_eq!(t_mom.len(), t_std.len());
        for (a, b) in t_mom.records.iter().zip(&t_std.records) {
            assert_eq!(a.p1_step_norm.to_bits(), b.p1_step_norm.to_bits());
        }
    }

    #[test]
    fn traces_stop_soundly_and_count_monotonically() {
        let (data, _) = gen_regression(40, 3, 1, 4, 10.0, 6).unwrap();
        let arch = Architecture::uniform(3, 1, 1, 4).unwrap();
        let cfg = TrainConfig {
            blocks: 2,
            stop_tol: 5e-3,
            max_iters: 5000,
            learning_rate: 0.05,
            ..quick_cfg(17)
        };
        let (_, trace) = train_mom(&data, &arch, LossKind::SquaredError, &cfg).unwrap();
        for (i, rec) in trace.records.iter().enumerate() {
            assert_eq!(rec.iteration, i + 1);
            assert!(rec.median_block < cfg.blocks);
            assert!(rec.p1_step_norm >= 0.0 && rec.p2_step_norm >= 0.0);
        }
        if trace.len() < cfg.max_iters {
            let last = trace.last().unwrap();
            let stopped =
                last.p1_step_norm <= cfg.stop_tol || last.p2_step_norm <= cfg.stop_tol;
            assert!(stopped, "early stop without a small step: {last:?}");
        }
    }

    #[test]
    fn cv_single_candidate_returns_it() {
        let (data, _) = gen_regression(60, 3, 1, 4, 10.0, 7).unwrap();
        let arch = Architecture::uniform(3, 1, 1, 4).unwrap();
        let cfg = TrainConfig {
            max_iters: 50,
            batch_fraction: 0.3,
            ..quick_cfg(19)
        };
        let (chosen, scores) =
            cross_validate_blocks(&data, &arch, LossKind::SquaredError, &[1], 3, &cfg).unwrap();
        assert_eq!(chosen, 1);
        assert_eq!(scores.len(), 1);
        assert!(scores[0].mean_score.is_finite());
    }

    #[test]
    fn cv_rejects_bad_configs() {
        let (data, _) = gen_regression(60, 3, 1, 4, 10.0, 8).unwrap();
        let arch = Architecture::uniform(3, 1, 1, 4).unwrap();
        let cfg = quick_cfg(1);
        assert!(matches!(
            cross_validate_blocks(&data, &arch, LossKind::SquaredError, &[1], 1, &cfg),
            Err(Error::Config(_))
        ));
        assert!(matches!(
            cross_validate_blocks(&data, &arch, LossKind::SquaredError, &[], 3, &cfg),
            Err(Error::Config(_))
        ));
        assert!(matches!(
            cross_validate_blocks(&data, &arch, LossKind::SquaredError, &[500], 3, &cfg),
            Err(Error::Config(_))
        ));
    }
}
