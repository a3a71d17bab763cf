//! Per-sample loss functions and their gradients with respect to the
//! prediction: squared error, absolute deviation, Huber, and soft-max cross
//! entropy.
//!
//! The regression losses (SE, AD, Huber) require scalar outputs; soft-max
//! cross entropy requires a one-hot target of length >= 2. Subgradients at
//! kinks (AD at zero residual, ReLU upstream) are fixed to zero.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum LossKind {
    SquaredError,
    AbsoluteDeviation,
    /// Quadratic within `k` of the target, linear with slope `k` beyond.
    Huber { k: f64 },
    SoftmaxCrossEntropy,
}

impl LossKind {
    pub fn huber(k: f64) -> Result<Self> {
        if !k.is_finite() || k <= 0.0 {
            return Err(Error::domain(format!("huber parameter must be positive, got {k}")));
        }
        Ok(LossKind::Huber { k })
    }

    pub fn is_classification(&self) -> bool {
        matches!(self, LossKind::SoftmaxCrossEntropy)
    }

    pub fn name(&self) -> &'static str {
        match self {
            LossKind::SquaredError => "se",
            LossKind::AbsoluteDeviation => "ad",
            LossKind::Huber { .. } => "huber",
            LossKind::SoftmaxCrossEntropy => "sce",
        }
    }
}

fn check_dims(kind: LossKind, y: &[f64], yhat: &[f64]) -> Result<()> {
    if y.len() != yhat.len() {
        return Err(Error::shape(format!(
            "target length {} != prediction length {}",
            y.len(),
            yhat.len()
        )));
    }
    match kind {
        LossKind::SoftmaxCrossEntropy => {
            if y.len() < 2 {
                return Err(Error::domain("cross entropy needs an output dimension >= 2"));
            }
            let ones = y.iter().filter(|&&v| v == 1.0).count();
            if ones != 1 || y.iter().any(|&v| v != 0.0 && v != 1.0) {
                return Err(Error::domain("cross-entropy target must be one-hot"));
            }
        }
        LossKind::Huber { k } => {
            if !k.is_finite() || k <= 0.0 {
                return Err(Error::domain("huber parameter must be positive"));
            }
            if y.len() != 1 {
                return Err(Error::domain("regression losses need a scalar output"));
            }
        }
        _ => {
            if y.len() != 1 {
                return Err(Error::domain("regression losses need a scalar output"));
            }
        }
    }
    Ok(())
}

/// Log-sum-exp with the max subtracted, for a stable soft-max.
fn log_sum_exp(logits: &[f64]) -> (f64, f64) {
    let max = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let sum: f64 = logits.iter().map(|&v| (v - max).exp()).sum();
    (max, sum.ln())
}

/// Loss of prediction `yhat` against target `y`. Nonnegative for every kind.
pub fn loss_value(kind: LossKind, y: &[f64], yhat: &[f64]) -> Result<f64> {
    check_dims(kind, y, yhat)?;
    Ok(match kind {
        LossKind::SquaredError => {
            let r = y[0] - yhat[0];
            r * r
        }
        LossKind::AbsoluteDeviation => (y[0] - yhat[0]).abs(),
        LossKind::Huber { k } => {
            let r = (y[0] - yhat[0]).abs();
            if r <= k {
                0.5 * r * r
            } else {
                k * (r - 0.5 * k)
            }
        }
        LossKind::SoftmaxCrossEntropy => {
            let (max, lse) = log_sum_exp(yhat);
            let true_idx = y.iter().position(|&v| v == 1.0).unwrap();
            // -log softmax(yhat)[true] = (max + lse) - yhat[true]
            max + lse - yhat[true_idx]
        }
    })
}

/// Gradient of `loss_value` with respect to `yhat`.
pub fn loss_grad(kind: LossKind, y: &[f64], yhat: &[f64]) -> Result<Vec<f64>> {
    check_dims(kind, y, yhat)?;
    Ok(match kind {
        LossKind::SquaredError => vec![2.0 * (yhat[0] - y[0])],
        LossKind::AbsoluteDeviation => {
            let r = yhat[0] - y[0];
            vec![if r > 0.0 {
                1.0
            } else if r < 0.0 {
                -1.0
            } else {
                0.0
            }]
        }
        LossKind::Huber { k } => vec![(yhat[0] - y[0]).clamp(-k, k)],
        LossKind::SoftmaxCrossEntropy => {
            let (max, lse) = log_sum_exp(yhat);
            yhat.iter()
                .zip(y)
                .map(|(&logit, &target)| (logit - max - lse).exp() - target)
                .collect()
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn fd_grad(kind: LossKind, y: &[f64], yhat: &[f64], h: f64) -> Vec<f64> {
        let mut g = Vec::with_capacity(yhat.len());
        let mut probe = yhat.to_vec();
        for i in 0..yhat.len() {
            probe[i] = yhat[i] + h;
            let plus = loss_value(kind, y, &probe).unwrap();
            probe[i] = yhat[i] - h;
            let minus = loss_value(kind, y, &probe).unwrap();
            probe[i] = yhat[i];
            g.push((plus - minus) / (2.0 * h));
        }
        g
    }

    #[test]
    fn squared_error_value_and_grad() {
        assert_eq!(loss_value(LossKind::SquaredError, &[2.0], &[5.0]).unwrap(), 9.0);
        assert_eq!(loss_grad(LossKind::SquaredError, &[2.0], &[5.0]).unwrap(), vec![6.0]);
    }

    #[test]
    fn huber_branches() {
        let huber = LossKind::huber(1.0).unwrap();
        assert_eq!(loss_value(huber, &[0.0], &[1.0]).unwrap(), 0.5);
        assert_eq!(loss_value(huber, &[0.0], &[2.0]).unwrap(), 1.5);
    }

    #[test]
    fn huber_continuous_at_branch_point() {
        let k = 1.7;
        let huber = LossKind::huber(k).unwrap();
        let quadratic = 0.5 * k * k;
        let linear = k * (k - 0.5 * k);
        assert!((quadratic - linear).abs() < 1e-15);
        assert!((loss_value(huber, &[0.0], &[k]).unwrap() - quadratic).abs() < 1e-15);
    }

    #[test]
    fn huber_matches_half_squared_error_inside() {
        let huber = LossKind::huber(2.0).unwrap();
        for r in [-1.9, -0.5, 0.0, 0.3, 1.99] {
            let h = loss_value(huber, &[0.0], &[r]).unwrap();
            let se = loss_value(LossKind::SquaredError, &[0.0], &[r]).unwrap();
            assert!((h - 0.5 * se).abs() < 1e-14);
        }
    }

    #[test]
    fn huber_gradient_bounded_by_k() {
        let k = 0.8;
        let huber = LossKind::huber(k).unwrap();
        let mut r = crate::rng::seeded(4);
        for _ in 0..500 {
            let yhat = r.random_range(-50.0..50.0);
            let g = loss_grad(huber, &[0.0], &[yhat]).unwrap()[0];
            assert!(g.abs() <= k + 1e-15);
        }
    }

    #[test]
    fn sce_uniform_logits() {
        let y = [0.0, 0.0, 1.0, 0.0, 0.0];
        let yhat = [0.7; 5];
        let v = loss_value(LossKind::SoftmaxCrossEntropy, &y, &yhat).unwrap();
        assert!((v - (5.0f64).ln()).abs() < 1e-12);
        let g = loss_grad(LossKind::SoftmaxCrossEntropy, &y, &yhat).unwrap();
        for (i, gi) in g.iter().enumerate() {
            let want = if i == 2 { 0.2 - 1.0 } else { 0.2 };
            assert!((gi - want).abs() < 1e-12);
        }
    }

    #[test]
    fn sce_rejects_non_one_hot() {
        let yhat = [0.0, 0.0, 0.0];
        for bad in [[0.5, 0.5, 0.0], [0.0, 0.0, 0.0], [1.0, 1.0, 0.0]] {
            assert!(matches!(
                loss_value(LossKind::SoftmaxCrossEntropy, &bad, &yhat),
                Err(Error::Domain(_))
            ));
        }
    }

    #[test]
    fn regression_losses_reject_vector_outputs() {
        for kind in [
            LossKind::SquaredError,
            LossKind::AbsoluteDeviation,
            LossKind::huber(1.0).unwrap(),
        ] {
            assert!(matches!(
                loss_value(kind, &[1.0, 2.0], &[0.0, 0.0]),
                Err(Error::Domain(_))
            ));
        }
    }

    #[test]
    fn sce_shift_invariance() {
        let y = [0.0, 1.0, 0.0];
        let yhat = [300.0, 305.0, 299.0];
        let shifted: Vec<f64> = yhat.iter().map(|v| v + 123.456).collect();
        let a = loss_value(LossKind::SoftmaxCrossEntropy, &y, &yhat).unwrap();
        let b = loss_value(LossKind::SoftmaxCrossEntropy, &y, &shifted).unwrap();
        assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn losses_nonnegative_and_zero_at_fit() {
        let mut r = crate::rng::seeded(9);
        for _ in 0..200 {
            let y = r.random_range(-5.0..5.0);
            let yhat = r.random_range(-5.0..5.0);
            for kind in [
                LossKind::SquaredError,
                LossKind::AbsoluteDeviation,
                LossKind::huber(1.3).unwrap(),
            ] {
                assert!(loss_value(kind, &[y], &[yhat]).unwrap() >= 0.0);
                assert_eq!(loss_value(kind, &[y], &[y]).unwrap(), 0.0);
            }
        }
        // SCE with a >= 25 logit margin on the true class is below 1e-9.
        let y = [1.0, 0.0, 0.0];
        let yhat = [25.0, 0.0, 0.0];
        let v = loss_value(LossKind::SoftmaxCrossEntropy, &y, &yhat).unwrap();
        assert!((0.0..1e-9).contains(&v), "sce at margin 25: {v}");
    }

    #[test]
    fn gradients_match_finite_differences_away_from_kinks() {
        let mut r = crate::rng::seeded(13);
        let h = 1e-6;
        for _ in 0..200 {
            let y: f64 = r.random_range(-3.0..3.0);
            let mut yhat: f64 = r.random_range(-3.0..3.0);
            let k = 1.1;
            // keep clear of the AD kink at 0 and the Huber kink at |r| = k
            if (yhat - y).abs() < 1e-3 {
                yhat += 0.1;
            }
            if ((yhat - y).abs() - k).abs() < 1e-3 {
                yhat += 0.1;
            }
            for kind in [
                LossKind::SquaredError,
                LossKind::AbsoluteDeviation,
                LossKind::huber(k).unwrap(),
            ] {
                let g = loss_grad(kind, &[y], &[yhat]).unwrap();
                let fd = fd_grad(kind, &[y], &[yhat], h);
                assert!((g[0] - fd[0]).abs() < 1e-6, "{kind:?}: {} vs {}", g[0], fd[0]);
            }
        }
        for _ in 0..100 {
            let c = 5;
            let true_idx = r.random_range(0..c);
            let mut y = vec![0.0; c];
            y[true_idx] = 1.0;
            let yhat: Vec<f64> = (0..c).map(|_| r.random_range(-4.0..4.0)).collect();
            let g = loss_grad(LossKind::SoftmaxCrossEntropy, &y, &yhat).unwrap();
            let fd = fd_grad(LossKind::SoftmaxCrossEntropy, &y, &yhat, h);
            for (a, b) in g.iter().zip(&fd) {
                assert!((a - b).abs() < 1e-6, "sce: {a} vs {b}");
            }
        }
    }
}
