//! Training-level integration checks: robustness of the two-player trainer
//! under gross output corruption, and block-count selection by
//! cross-validation on corrupted data.

use momnet::bench::generalization_error;
use momnet::data::{corrupt_outputs_uniform, gen_regression};
use momnet::loss::LossKind;
use momnet::nn::Architecture;
use momnet::rng::{derive_seed, stream};
use momnet::train::{cross_validate_blocks, train_mom, train_standard, TrainConfig};

fn median(mut values: Vec<f64>) -> f64 {
    values.sort_by(f64::total_cmp);
    values[values.len() / 2]
}

/// With 25% gross outliers in a small regression task, the median-of-means
/// trainer should beat plain squared-error by a wide margin on clean test
/// error.
#[test]
fn mom_beats_squared_error_under_gross_outliers() {
    let mut mom_errors = Vec::new();
    let mut se_errors = Vec::new();
    for seed in 1u64..=5 {
        // n = 80 noiseless samples; the training half is the tiny n = 40 task.
        let (full, gt) = gen_regression(80, 4, 1, 8, f64::INFINITY, seed).unwrap();
        let (train_clean, test) = full.split_half();
        let train =
            corrupt_outputs_uniform(&train_clean, &gt, 0.75, derive_seed(seed, stream::CORRUPTION))
                .unwrap();
        let arch = Architecture::uniform(4, 1, 1, 8).unwrap();
        let cfg = TrainConfig {
            blocks: 5,
            learning_rate: 0.05,
            batch_fraction: 0.25,
            max_iters: 12000,
            stop_tol: 1e-8,
            seed: derive_seed(seed, stream::TRAIN),
            ..TrainConfig::default()
        };
        let (mom_params, _) = train_mom(&train, &arch, LossKind::SquaredError, &cfg).unwrap();
        let (se_params, _) =
            train_standard(&train, &arch, LossKind::SquaredError, &cfg).unwrap();
        mom_errors.push(generalization_error(&gt, &mom_params, &test).unwrap());
        se_errors.push(generalization_error(&gt, &se_params, &test).unwrap());
    }
    let mom_median = median(mom_errors.clone());
    let se_median = median(se_errors.clone());
    assert!(
        mom_median < 0.5 * se_median,
        "median clean-test errors: mom {mom_median:.3e} vs se {se_median:.3e} \
         (mom per-seed {mom_errors:?}, se per-seed {se_errors:?})"
    );
}

/// Cross-validation should prefer b > 1 on corrupted data in most seeded
/// repetitions.
#[test]
fn cross_validation_prefers_blocks_under_corruption() {
    let mut chose_blocks = 0usize;
    for seed in 1u64..=5 {
        let (full, gt) = gen_regression(200, 10, 2, 16, 10.0, 1000 + seed).unwrap();
        let train = corrupt_outputs_uniform(&full, &gt, 0.75, derive_seed(seed, stream::CORRUPTION))
            .unwrap();
        let arch = Architecture::uniform(10, 1, 2, 16).unwrap();
        let cfg = TrainConfig {
            learning_rate: 0.05,
            batch_fraction: 0.3,
            max_iters: 4000,
            stop_tol: 1e-6,
            seed: derive_seed(seed, stream::TRAIN),
            ..TrainConfig::default()
        };
        let (chosen, scores) =
            cross_validate_blocks(&train, &arch, LossKind::SquaredError, &[1, 5, 10], 5, &cfg)
                .unwrap();
        assert_eq!(scores.len(), 3);
        // The winner carries the best mean score.
        let winner = scores.iter().find(|s| s.blocks == chosen).unwrap();
        for s in &scores {
            assert!(winner.mean_score <= s.mean_score);
        }
        if chosen > 1 {
            chose_blocks += 1;
        }
    }
    assert!(
        chose_blocks >= 4,
        "cross-validation picked b > 1 in only {chose_blocks} of 5 repetitions"
    );
}
