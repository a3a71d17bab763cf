//! Median-of-means machinery over loss increments: block equipartitioning,
//! per-block increment means, median-block selection, the resulting
//! objective, and the two players' gradients.
//!
//! Two candidate parameter sets are compared through the per-block means of
//! `loss(p1) - loss(p2)`. The objective is the block mean selected by the
//! median rule; each player's gradient flows only through the samples of its
//! selected block.

use rand::Rng;

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::loss::{loss_grad, loss_value, LossKind};
use crate::nn::{backward_from_trace, forward, forward_trace, GradientSet, NetworkParams};
use crate::rng;

/// Disjoint blocks covering sample indices `0..num_samples`.
///
/// The first `b - 1` blocks have size `floor(m / b)`; the last block absorbs
/// the remainder. Members are kept in ascending order so reductions over a
/// block have a fixed order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockPartition {
    blocks: Vec<Vec<usize>>,
    num_samples: usize,
}

impl BlockPartition {
    /// Validates disjointness and full cover of `0..num_samples`.
    pub fn new(blocks: Vec<Vec<usize>>, num_samples: usize) -> Result<Self> {
        let mut seen = vec![false; num_samples];
        let mut total = 0usize;
        for block in &blocks {
            if block.is_empty() {
                return Err(Error::domain("empty block"));
            }
            for &i in block {
                if i >= num_samples {
                    return Err(Error::domain(format!("index {i} out of range")));
                }
                if seen[i] {
                    return Err(Error::domain(format!("index {i} appears twice")));
                }
                seen[i] = true;
                total += 1;
            }
        }
        if total != num_samples {
            return Err(Error::domain("blocks do not cover the index set"));
        }
        Ok(Self {
            blocks,
            num_samples,
        })
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn num_samples(&self) -> usize {
        self.num_samples
    }
}

/// Randomly equipartitions `0..m` into `b` blocks using the given generator.
pub fn equipartition_with_rng<R: Rng + ?Sized>(
    m: usize,
    b: usize,
    generator: &mut R,
) -> Result<BlockPartition> {
    if b == 0 || b > m {
        return Err(Error::domain(format!(
            "block count must satisfy 1 <= b <= {m}, got {b}"
        )));
    }
    let mut order: Vec<usize> = (0..m).collect();
    rand::seq::SliceRandom::shuffle(order.as_mut_slice(), generator);
    let base = m / b;
    let mut blocks = Vec::with_capacity(b);
    let mut start = 0usize;
    for k in 0..b {
        let size = if k + 1 < b { base } else { m - start };
        let mut members = order[start..start + size].to_vec();
        members.sort_unstable();
        blocks.push(members);
        start += size;
    }
    Ok(BlockPartition {
        blocks,
        num_samples: m,
    })
}

/// Seeded convenience form of [`equipartition_with_rng`].
pub fn equipartition(m: usize, b: usize, seed: u64) -> Result<BlockPartition> {
    equipartition_with_rng(m, b, &mut rng::seeded(seed))
}

/// The block means, the value selected by the median rule, and which block
/// attained it (zero-based; ties go to the lowest index).
#[derive(Debug, Clone, PartialEq)]
pub struct MedianBlockReport {
    pub block_means: Vec<f64>,
    pub median_value: f64,
    pub median_index: usize,
}

/// Selects the median block mean: the largest entry not exceeding the
/// `ceil(b/2)`-th smallest (lower median), which is always an actual entry.
pub fn median_block(means: &[f64]) -> Result<MedianBlockReport> {
    let b = means.len();
    if b == 0 {
        return Err(Error::domain("median of an empty set of block means"));
    }
    if means.iter().any(|v| !v.is_finite()) {
        return Err(Error::domain("non-finite block mean"));
    }
    let mut scratch = means.to_vec();
    let rank = b.div_ceil(2) - 1;
    let (_, &mut quantile, _) = scratch.select_nth_unstable_by(rank, f64::total_cmp);
    let median_index = means
        .iter()
        .position(|&v| v == quantile)
        .expect("quantile is an element of the means");
    Ok(MedianBlockReport {
        block_means: means.to_vec(),
        median_value: means[median_index],
        median_index,
    })
}

/// Per-sample losses of one parameter set over the whole dataset.
pub(crate) fn per_sample_losses(
    data: &Dataset,
    params: &NetworkParams,
    loss: LossKind,
) -> Result<Vec<f64>> {
    let mut values = Vec::with_capacity(data.len());
    for i in 0..data.len() {
        let prediction = forward(params, data.input(i))?;
        values.push(loss_value(loss, data.output(i), &prediction)?);
    }
    Ok(values)
}

/// Losses plus the forward traces they came from, so a later gradient pass
/// over a block can skip the forward recomputation.
pub(crate) struct BatchEval {
    pub losses: Vec<f64>,
    traces: Vec<crate::nn::ForwardTrace>,
}

pub(crate) fn batch_eval(
    data: &Dataset,
    params: &NetworkParams,
    loss: LossKind,
) -> Result<BatchEval> {
    let mut losses = Vec::with_capacity(data.len());
    let mut traces = Vec::with_capacity(data.len());
    for i in 0..data.len() {
        let trace = forward_trace(params, data.input(i))?;
        losses.push(loss_value(loss, data.output(i), trace.output())?);
        traces.push(trace);
    }
    Ok(BatchEval { losses, traces })
}

/// Mean loss gradient over `samples`, backpropagating through the traces
/// recorded by [`batch_eval`] for the same parameters. Identical to
/// [`mean_loss_gradient`] value for value.
pub(crate) fn mean_gradient_from_eval(
    samples: &[usize],
    data: &Dataset,
    params: &NetworkParams,
    eval: &BatchEval,
    loss: LossKind,
) -> Result<GradientSet> {
    if samples.is_empty() {
        return Err(Error::domain("empty sample set"));
    }
    let mut acc = GradientSet::zeros_like(params);
    for &i in samples {
        let trace = &eval.traces[i];
        let dl = loss_grad(loss, data.output(i), trace.output())?;
        let g = backward_from_trace(params, trace, &dl)?;
        acc.accumulate(&g);
    }
    acc.scale(1.0 / samples.len() as f64);
    Ok(acc)
}

/// Block means of `l1[i] - l2[i]`, in block order.
pub(crate) fn increment_means(
    partition: &BlockPartition,
    l1: &[f64],
    l2: &[f64],
) -> Vec<f64> {
    partition
        .blocks()
        .iter()
        .map(|block| {
            let sum: f64 = block.iter().map(|&i| l1[i] - l2[i]).sum();
            sum / block.len() as f64
        })
        .collect()
}

/// Mean over a block of the per-sample loss difference `loss(p1) - loss(p2)`.
pub fn block_increment_mean(
    block: &[usize],
    data: &Dataset,
    p1: &NetworkParams,
    p2: &NetworkParams,
    loss: LossKind,
) -> Result<f64> {
    if block.is_empty() {
        return Err(Error::domain("empty block"));
    }
    let mut sum = 0.0;
    for &i in block {
        if i >= data.len() {
            return Err(Error::domain(format!("index {i} out of range")));
        }
        let first = loss_value(loss, data.output(i), &forward(p1, data.input(i))?)?;
        let second = loss_value(loss, data.output(i), &forward(p2, data.input(i))?)?;
        sum += first - second;
    }
    Ok(sum / block.len() as f64)
}

/// Full median-of-means evaluation: all block increment means plus the
/// median selection.
pub fn mom_report(
    partition: &BlockPartition,
    data: &Dataset,
    p1: &NetworkParams,
    p2: &NetworkParams,
    loss: LossKind,
) -> Result<MedianBlockReport> {
    if partition.num_samples() != data.len() {
        return Err(Error::shape(format!(
            "partition covers {} samples, dataset has {}",
            partition.num_samples(),
            data.len()
        )));
    }
    let l1 = per_sample_losses(data, p1, loss)?;
    let l2 = per_sample_losses(data, p2, loss)?;
    median_block(&increment_means(partition, &l1, &l2))
}

/// The median block increment mean: the value the two players minimize and
/// maximize.
pub fn mom_objective(
    partition: &BlockPartition,
    data: &Dataset,
    p1: &NetworkParams,
    p2: &NetworkParams,
    loss: LossKind,
) -> Result<f64> {
    Ok(mom_report(partition, data, p1, p2, loss)?.median_value)
}

/// Mean gradient of the loss of `params` over the given samples, accumulated
/// in index order.
pub(crate) fn mean_loss_gradient(
    samples: &[usize],
    data: &Dataset,
    params: &NetworkParams,
    loss: LossKind,
) -> Result<GradientSet> {
    if samples.is_empty() {
        return Err(Error::domain("empty sample set"));
    }
    let mut acc = GradientSet::zeros_like(params);
    for &i in samples {
        let trace = forward_trace(params, data.input(i))?;
        let dl = loss_grad(loss, data.output(i), trace.output())?;
        let g = backward_from_trace(params, &trace, &dl)?;
        acc.accumulate(&g);
    }
    acc.scale(1.0 / samples.len() as f64);
    Ok(acc)
}

/// Gradient of the objective in the first player's parameters: the mean loss
/// gradient of `p1` over the median block at `(p1, p2)`. The second player's
/// terms drop out of the derivative.
pub fn mom_gradient_player1(
    partition: &BlockPartition,
    data: &Dataset,
    p1: &NetworkParams,
    p2: &NetworkParams,
    loss: LossKind,
) -> Result<GradientSet> {
    let report = mom_report(partition, data, p1, p2, loss)?;
    mean_loss_gradient(&partition.blocks()[report.median_index], data, p1, loss)
}

/// Gradient of the objective in the second player's parameters: MINUS the
/// mean loss gradient of `p2` over the median block at `(p1, p2)`.
pub fn mom_gradient_player2(
    partition: &BlockPartition,
    data: &Dataset,
    p1: &NetworkParams,
    p2: &NetworkParams,
    loss: LossKind,
) -> Result<GradientSet> {
    let report = mom_report(partition, data, p1, p2, loss)?;
    let mut g = mean_loss_gradient(&partition.blocks()[report.median_index], data, p2, loss)?;
    g.negate();
    Ok(g)
}
