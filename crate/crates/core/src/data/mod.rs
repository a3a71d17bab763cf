//! Datasets, synthetic generators, corruption protocols, and CSV ingestion.

mod corrupt;
mod csv;
mod synth;

pub use corrupt::{
    choose_outliers, corrupt_inputs, corrupt_inputs_at, corrupt_labels, corrupt_labels_at,
    corrupt_outputs_student_t, corrupt_outputs_uniform, corrupt_outputs_uniform_at,
};
pub use csv::{load_csv, save_csv};
pub use synth::{
    gen_regression, gen_spiral, gen_spiral_opts, SpiralNormalization, SpiralStats,
    SPIRAL_CLASSES, SPIRAL_POINTS_PER_CLASS,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nn::{forward, NetworkParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TaskKind {
    Regression,
    Classification,
}

/// Paired inputs and outputs, with a per-row flag marking informative
/// (uncorrupted) samples.
///
/// Inputs are stored row-major `n x p`; outputs row-major `n x c` with `c = 1`
/// for regression and exact one-hot rows for classification.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    n: usize,
    p: usize,
    c: usize,
    x: Vec<f64>,
    y: Vec<f64>,
    informative: Vec<bool>,
    task: TaskKind,
}

impl Dataset {
    pub fn new(
        task: TaskKind,
        n: usize,
        p: usize,
        c: usize,
        x: Vec<f64>,
        y: Vec<f64>,
    ) -> Result<Self> {
        if p == 0 || c == 0 {
            return Err(Error::domain("dimensions must be >= 1"));
        }
        if x.len() != n * p {
            return Err(Error::shape(format!(
                "inputs have {} entries, expected {}",
                x.len(),
                n * p
            )));
        }
        if y.len() != n * c {
            return Err(Error::shape(format!(
                "outputs have {} entries, expected {}",
                y.len(),
                n * c
            )));
        }
        let ds = Self {
            n,
            p,
            c,
            x,
            y,
            informative: vec![true; n],
            task,
        };
        if task == TaskKind::Classification {
            if c < 2 {
                return Err(Error::domain("classification needs >= 2 classes"));
            }
            for i in 0..n {
                ds.validate_one_hot(i)?;
            }
        }
        Ok(ds)
    }

    fn validate_one_hot(&self, i: usize) -> Result<()> {
        let row = self.output(i);
        let ones = row.iter().filter(|&&v| v == 1.0).count();
        if ones != 1 || row.iter().any(|&v| v != 0.0 && v != 1.0) {
            return Err(Error::domain(format!("row {i}: output is not one-hot")));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn input_dim(&self) -> usize {
        self.p
    }

    pub fn output_dim(&self) -> usize {
        self.c
    }

    pub fn task(&self) -> TaskKind {
        self.task
    }

    pub fn input(&self, i: usize) -> &[f64] {
        &self.x[i * self.p..(i + 1) * self.p]
    }

    pub fn output(&self, i: usize) -> &[f64] {
        &self.y[i * self.c..(i + 1) * self.c]
    }

    pub fn informative(&self) -> &[bool] {
        &self.informative
    }

    pub fn informative_count(&self) -> usize {
        self.informative.iter().filter(|&&b| b).count()
    }

    /// Class index of row `i` (classification only).
    pub fn class_of(&self, i: usize) -> Option<usize> {
        if self.task != TaskKind::Classification {
            return None;
        }
        self.output(i).iter().position(|&v| v == 1.0)
    }

    /// A new dataset holding the given rows, in the given order.
    pub fn subset(&self, rows: &[usize]) -> Dataset {
        let mut x = Vec::with_capacity(rows.len() * self.p);
        let mut y = Vec::with_capacity(rows.len() * self.c);
        let mut informative = Vec::with_capacity(rows.len());
        for &i in rows {
            x.extend_from_slice(self.input(i));
            y.extend_from_slice(self.output(i));
            informative.push(self.informative[i]);
        }
        Dataset {
            n: rows.len(),
            p: self.p,
            c: self.c,
            x,
            y,
            informative,
            task: self.task,
        }
    }

    /// Splits into (first half, second half). The first half is the
    /// training portion throughout the experiment protocols.
    pub fn split_half(&self) -> (Dataset, Dataset) {
        let mid = self.n / 2;
        let front: Vec<usize> = (0..mid).collect();
        let back: Vec<usize> = (mid..self.n).collect();
        (self.subset(&front), self.subset(&back))
    }

    pub(crate) fn set_output(&mut self, i: usize, value: &[f64]) {
        self.y[i * self.c..(i + 1) * self.c].copy_from_slice(value);
    }

    pub(crate) fn input_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.x[i * self.p..(i + 1) * self.p]
    }

    pub(crate) fn set_informative(&mut self, i: usize, value: bool) {
        self.informative[i] = value;
    }

    pub(crate) fn push_row(&mut self, input: &[f64], output: &[f64]) {
        debug_assert_eq!(input.len(), self.p);
        debug_assert_eq!(output.len(), self.c);
        self.x.extend_from_slice(input);
        self.y.extend_from_slice(output);
        self.informative.push(true);
        self.n += 1;
    }

    pub(crate) fn empty(task: TaskKind, p: usize, c: usize) -> Dataset {
        Dataset {
            n: 0,
            p,
            c,
            x: Vec::new(),
            y: Vec::new(),
            informative: Vec::new(),
            task,
        }
    }
}

/// The data-generating network and the noise level it was paired with.
#[derive(Debug, Clone)]
pub struct GroundTruth {
    params: NetworkParams,
    noise_sd: f64,
}

impl GroundTruth {
    pub fn new(params: NetworkParams, noise_sd: f64) -> Self {
        Self { params, noise_sd }
    }

    pub fn params(&self) -> &NetworkParams {
        &self.params
    }

    pub fn noise_sd(&self) -> f64 {
        self.noise_sd
    }

    /// Noise-free output of the generating network at `x`.
    pub fn clean_output(&self, x: &[f64]) -> Result<Vec<f64>> {
        forward(&self.params, x)
    }

    /// `max_i |g(x_i)|` over every row of `ds` (scalar outputs).
    pub fn max_abs_output(&self, ds: &Dataset) -> Result<f64> {
        let mut best = 0.0f64;
        for i in 0..ds.len() {
            let out = self.clean_output(ds.input(i))?;
            best = best.max(out[0].abs());
        }
        Ok(best)
    }
}
