//! Robust training of dense feed-forward ReLU networks with a median-of-means
//! min-max objective, alongside squared-error, absolute-deviation, Huber, and
//! soft-max cross-entropy baselines.
//!
//! The crate follows one pipeline: generate or load data ([`data`]), train
//! ([`train`]) on a per-sample loss ([`loss`]) through the median-of-means
//! machinery ([`mom`]) over a dense network ([`nn`]), then benchmark and
//! report ([`bench`]).
//!
//! Everything is deterministic under a seed: every random stream is derived
//! from a master seed and a fixed tag ([`rng`]), so runs reproduce bit for
//! bit, including under a parallel runner.

pub mod bench;
pub mod data;
pub mod error;
pub mod loss;
pub mod mom;
pub mod nn;
pub mod rng;
pub mod train;

pub use error::{Error, Result};

pub(crate) mod util {
    /// Index of the largest entry; ties go to the lowest index.
    pub fn argmax(values: &[f64]) -> usize {
        let mut best = 0;
        for (i, &v) in values.iter().enumerate().skip(1) {
            if v > values[best] {
                best = i;
            }
        }
        best
    }
}
