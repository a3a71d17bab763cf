//! Corruption protocols: heavy bounded output outliers, heavy-tailed output
//! noise, Gaussian input perturbation, and label flips.
//!
//! Subset-based corruptions come in two forms: a seeded convenience wrapper
//! that draws the outlier set itself, and an `_at` variant taking an explicit
//! index list (noise is drawn in list order, so permuting data and mapping
//! the indices commutes with corrupting first).

use rand::Rng;
use rand_distr::{Distribution, StandardNormal, StudentT, Uniform};

use crate::error::{Error, Result};
use crate::rng::{self, derive_seed, stream};

use super::{Dataset, GroundTruth, TaskKind};

fn check_frac(frac: f64) -> Result<()> {
    if !(frac > 0.0 && frac <= 1.0) {
        return Err(Error::domain(format!(
            "informative fraction must be in (0, 1], got {frac}"
        )));
    }
    Ok(())
}

/// Draws the outlier index set: `round((1 - informative_frac) * n)` distinct
/// rows, uniformly without replacement, in ascending order.
pub fn choose_outliers(n: usize, informative_frac: f64, seed: u64) -> Result<Vec<usize>> {
    check_frac(informative_frac)?;
    let count = ((1.0 - informative_frac) * n as f64).round() as usize;
    let mut r = rng::seeded(derive_seed(seed, stream::OUTLIER_SELECT));
    let mut chosen = rand::seq::index::sample(&mut r, n, count.min(n)).into_vec();
    chosen.sort_unstable();
    Ok(chosen)
}

/// Replaces the noise of the given rows by draws from
/// `U[3 max|g(x)|, 5 max|g(x)|]`, where the max runs over every row of `ds`.
/// Outputs are rebuilt as clean signal plus the new noise.
pub fn corrupt_outputs_uniform_at(
    ds: &Dataset,
    gt: &GroundTruth,
    outliers: &[usize],
    seed: u64,
) -> Result<Dataset> {
    if ds.task() != TaskKind::Regression {
        return Err(Error::domain("output corruption applies to regression data"));
    }
    let bound = gt.max_abs_output(ds)?;
    let dist = Uniform::new_inclusive(3.0 * bound, 5.0 * bound)
        .map_err(|e| Error::domain(format!("outlier interval: {e}")))?;
    let mut noise_rng = rng::seeded(derive_seed(seed, stream::OUTLIER_NOISE));
    let mut out = ds.clone();
    for &i in outliers {
        if i >= ds.len() {
            return Err(Error::domain(format!("outlier index {i} out of range")));
        }
        let clean = gt.clean_output(ds.input(i))?[0];
        let u = dist.sample(&mut noise_rng);
        out.set_output(i, &[clean + u]);
        out.set_informative(i, false);
    }
    Ok(out)
}

/// Seeded wrapper: corrupts a random subset of size `round((1 - frac) * n)`.
pub fn corrupt_outputs_uniform(
    ds: &Dataset,
    gt: &GroundTruth,
    informative_frac: f64,
    seed: u64,
) -> Result<Dataset> {
    let outliers = choose_outliers(ds.len(), informative_frac, seed)?;
    corrupt_outputs_uniform_at(ds, gt, &outliers, seed)
}

/// Replaces the noise of EVERY row by i.i.d. Student's t draws with `df`
/// degrees of freedom. No row is singled out, so the informative mask stays
/// all-true.
pub fn corrupt_outputs_student_t(
    ds: &Dataset,
    gt: &GroundTruth,
    df: f64,
    seed: u64,
) -> Result<Dataset> {
    if ds.task() != TaskKind::Regression {
        return Err(Error::domain("output corruption applies to regression data"));
    }
    if !df.is_finite() || df <= 0.0 {
        return Err(Error::domain(format!("degrees of freedom must be positive, got {df}")));
    }
    let dist =
        StudentT::new(df).map_err(|e| Error::domain(format!("student t: {e}")))?;
    let mut noise_rng = rng::seeded(derive_seed(seed, stream::OUTLIER_NOISE));
    let mut out = ds.clone();
    for i in 0..ds.len() {
        let clean = gt.clean_output(ds.input(i))?[0];
        let u: f64 = dist.sample(&mut noise_rng);
        out.set_output(i, &[clean + u]);
    }
    Ok(out)
}

/// Adds standard Gaussian noise to every element of the given input rows.
/// Outputs are untouched (corruption happens after they were computed).
pub fn corrupt_inputs_at(ds: &Dataset, outliers: &[usize], seed: u64) -> Result<Dataset> {
    let mut noise_rng = rng::seeded(derive_seed(seed, stream::OUTLIER_NOISE));
    let mut out = ds.clone();
    for &i in outliers {
        if i >= ds.len() {
            return Err(Error::domain(format!("outlier index {i} out of range")));
        }
        for v in out.input_mut(i) {
            let u: f64 = noise_rng.sample(StandardNormal);
            *v += u;
        }
        out.set_informative(i, false);
    }
    Ok(out)
}

/// Seeded wrapper for [`corrupt_inputs_at`].
pub fn corrupt_inputs(ds: &Dataset, informative_frac: f64, seed: u64) -> Result<Dataset> {
    let outliers = choose_outliers(ds.len(), informative_frac, seed)?;
    corrupt_inputs_at(ds, &outliers, seed)
}

/// Reassigns the given rows to a uniformly random DIFFERENT class.
pub fn corrupt_labels_at(ds: &Dataset, outliers: &[usize], seed: u64) -> Result<Dataset> {
    if ds.task() != TaskKind::Classification {
        return Err(Error::domain("label corruption applies to classification data"));
    }
    let c = ds.output_dim();
    let mut label_rng = rng::seeded(derive_seed(seed, stream::OUTLIER_NOISE));
    let mut out = ds.clone();
    for &i in outliers {
        if i >= ds.len() {
            return Err(Error::domain(format!("outlier index {i} out of range")));
        }
        let old = ds.class_of(i).unwrap();
        let mut new = label_rng.random_range(0..c - 1);
        if new >= old {
            new += 1;
        }
        let mut one_hot = vec![0.0; c];
        one_hot[new] = 1.0;
        out.set_output(i, &one_hot);
        out.set_informative(i, false);
    }
    Ok(out)
}

/// Seeded wrapper for [`corrupt_labels_at`].
pub fn corrupt_labels(ds: &Dataset, informative_frac: f64, seed: u64) -> Result<Dataset> {
    if ds.task() != TaskKind::Classification {
        return Err(Error::domain("label corruption applies to classification data"));
    }
    let outliers = choose_outliers(ds.len(), informative_frac, seed)?;
    corrupt_labels_at(ds, &outliers, seed)
}
