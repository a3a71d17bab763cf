//! Experiment configuration: scenario kinds, desk/paper presets, and the
//! key-value config file format.
//!
//! Config files are plain text, one `key = value` per line, `#` comments.
//! Lists are comma separated. Any key left out takes the desk-preset default
//! for the scenario. Keys:
//!
//! ```text
//! scenario        regression-uniform-outliers | regression-t-noise |
//!                 regression-input-corruption | spiral-labels |
//!                 spiral-inputs | csv-classification
//! n, p, layers, width, snr
//! fractions       informative fractions, e.g. 1.0, 0.95, 0.85, 0.75
//! dfs             t-distribution degrees of freedom, e.g. 10, 1
//! b_grid          block counts, e.g. 1, 3, 5, 10, 15
//! huber_q_grid    Huber quantiles (percent), e.g. 75, 85, 95, 100
//! repetitions, seed, threads
//! learning_rate, batch_fraction, max_iters, stop_tol
//! player2         sup-consistent | paper-literal
//! spiral_noise_sd angle noise standard deviation (default 0.5)
//! csv_path, label_column, normalize_csv, cv_folds
//! out             report base path (writes <out>.json and <out>.csv)
//! ```

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nn::InitScheme;
use crate::train::{Player2Direction, TrainConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ScenarioKind {
    RegressionUniformOutliers,
    RegressionTNoise,
    RegressionInputCorruption,
    SpiralLabels,
    SpiralInputs,
    CsvClassification,
}

impl ScenarioKind {
    pub fn parse(text: &str) -> Result<Self> {
        Ok(match text {
            "regression-uniform-outliers" => ScenarioKind::RegressionUniformOutliers,
            "regression-t-noise" => ScenarioKind::RegressionTNoise,
            "regression-input-corruption" => ScenarioKind::RegressionInputCorruption,
            "spiral-labels" => ScenarioKind::SpiralLabels,
            "spiral-inputs" => ScenarioKind::SpiralInputs,
            "csv-classification" => ScenarioKind::CsvClassification,
            other => {
                return Err(Error::config(format!("unknown scenario '{other}'")));
            }
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            ScenarioKind::RegressionUniformOutliers => "regression-uniform-outliers",
            ScenarioKind::RegressionTNoise => "regression-t-noise",
            ScenarioKind::RegressionInputCorruption => "regression-input-corruption",
            ScenarioKind::SpiralLabels => "spiral-labels",
            ScenarioKind::SpiralInputs => "spiral-inputs",
            ScenarioKind::CsvClassification => "csv-classification",
        }
    }

    pub fn is_regression(&self) -> bool {
        matches!(
            self,
            ScenarioKind::RegressionUniformOutliers
                | ScenarioKind::RegressionTNoise
                | ScenarioKind::RegressionInputCorruption
        )
    }

    pub fn is_spiral(&self) -> bool {
        matches!(self, ScenarioKind::SpiralLabels | ScenarioKind::SpiralInputs)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    /// Small dimensions and few repetitions; minutes on a laptop.
    Desk,
    /// The full-size protocol; hours, not meant for CI.
    Paper,
}

impl Preset {
    pub fn parse(text: &str) -> Result<Self> {
        match text {
            "desk" => Ok(Preset::Desk),
            "paper" => Ok(Preset::Paper),
            other => Err(Error::config(format!("unknown preset '{other}'"))),
        }
    }
}

/// Everything a sweep needs: scenario, dimensions, corruption and estimator
/// grids, repetitions, seeds, optimizer settings, and the output path.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub scenario: ScenarioKind,
    pub n: usize,
    pub p: usize,
    pub layers: usize,
    pub width: usize,
    pub snr: f64,
    pub fractions: Vec<f64>,
    pub dfs: Vec<f64>,
    pub b_grid: Vec<usize>,
    pub huber_q_grid: Vec<usize>,
    pub repetitions: usize,
    pub seed: u64,
    pub learning_rate: f64,
    pub batch_fraction: f64,
    pub max_iters: usize,
    pub stop_tol: f64,
    pub player2_direction: Player2Direction,
    pub spiral_noise_sd: f64,
    pub csv_path: Option<String>,
    pub label_column: Option<String>,
    pub normalize_csv: bool,
    pub cv_folds: usize,
    /// Worker threads for the sweep (0 = all cores). Not part of the
    /// experiment identity, so it is left out of the report echo.
    #[serde(skip)]
    pub threads: usize,
    /// Report base path; `<out>.json` and `<out>.csv` are written. Also not
    /// part of the experiment identity.
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn preset(preset: Preset, scenario: ScenarioKind) -> Self {
        match preset {
            Preset::Desk => Self::desk(scenario),
            Preset::Paper => Self::paper(scenario),
        }
    }

    /// Desk-scale defaults: small nets, few repetitions, minutes of compute.
    pub fn desk(scenario: ScenarioKind) -> Self {
        let mut cfg = Self {
            scenario,
            n: 200,
            p: 10,
            layers: 2,
            width: 16,
            snr: 10.0,
            fractions: vec![1.0, 0.95, 0.85, 0.75],
            dfs: vec![10.0, 1.0],
            b_grid: vec![1, 3, 5, 10, 15],
            huber_q_grid: vec![75, 85, 95, 100],
            repetitions: 5,
            seed: 42,
            learning_rate: 0.05,
            batch_fraction: 0.15,
            max_iters: 4000,
            stop_tol: 1e-5,
            player2_direction: Player2Direction::SupConsistent,
            spiral_noise_sd: 0.25,
            csv_path: None,
            label_column: None,
            normalize_csv: false,
            cv_folds: 10,
            threads: 0,
            out: None,
        };
        match scenario {
            ScenarioKind::SpiralLabels | ScenarioKind::SpiralInputs => {
                cfg.n = 1000;
                cfg.p = 2;
                cfg.layers = 2;
                cfg.width = 64;
                cfg.b_grid = vec![1, 3, 5, 7, 9, 11];
                cfg.repetitions = 3;
                cfg.learning_rate = 0.5;
                // Batch = 0.15 of the full spiral = 0.3 of the training half.
                cfg.batch_fraction = 0.3;
                cfg.max_iters = 20_000;
                cfg.stop_tol = 1e-6;
                cfg.spiral_noise_sd = 0.25;
            }
            ScenarioKind::CsvClassification => {
                cfg.b_grid = vec![1, 3, 5, 7, 9, 11];
                cfg.repetitions = 1;
                cfg.learning_rate = 0.5;
                cfg.max_iters = 3000;
                cfg.stop_tol = 1e-5;
            }
            _ => {}
        }
        cfg
    }

    /// The full-size protocol of the published tables.
    pub fn paper(scenario: ScenarioKind) -> Self {
        let mut cfg = Self::desk(scenario);
        match scenario {
            ScenarioKind::RegressionUniformOutliers
            | ScenarioKind::RegressionTNoise
            | ScenarioKind::RegressionInputCorruption => {
                cfg.n = 1000;
                cfg.p = 50;
                cfg.layers = 5;
                cfg.width = 50;
                cfg.b_grid = vec![1, 21, 41, 61, 81, 101, 121];
                cfg.huber_q_grid = vec![75, 80, 85, 90, 95, 100];
                cfg.repetitions = 20;
                cfg.learning_rate = 0.01;
                // Batch = 0.15 of the generated sample = 0.3 of the training
                // half, which keeps the largest grid block counts feasible.
                cfg.batch_fraction = 0.3;
                cfg.max_iters = 20_000;
                cfg.stop_tol = 1e-2;
            }
            ScenarioKind::SpiralLabels | ScenarioKind::SpiralInputs => {
                cfg.width = 150;
                cfg.repetitions = 1;
                cfg.max_iters = 20_000;
                cfg.stop_tol = 1e-6;
                cfg.learning_rate = 0.5;
            }
            ScenarioKind::CsvClassification => {
                cfg.max_iters = 20_000;
                cfg.stop_tol = 1e-2;
            }
        }
        cfg
    }

    /// Trainer settings shared by every estimator in a repetition.
    pub fn train_config(&self, seed: u64, blocks: usize) -> TrainConfig {
        TrainConfig {
            blocks,
            learning_rate: self.learning_rate,
            batch_fraction: self.batch_fraction,
            max_iters: self.max_iters,
            stop_tol: self.stop_tol,
            seed,
            player2_direction: self.player2_direction,
            init: InitScheme::ScaledUniform,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.repetitions == 0 {
            return Err(Error::config("repetitions must be >= 1"));
        }
        if self.scenario.is_regression() {
            if self.n < 2 || !self.n.is_multiple_of(2) {
                return Err(Error::config("n must be even and >= 2"));
            }
            if self.b_grid.is_empty() || self.huber_q_grid.is_empty() {
                return Err(Error::config("b_grid and huber_q_grid must be nonempty"));
            }
            if self.huber_q_grid.iter().any(|&q| q == 0 || q > 100) {
                return Err(Error::config("huber quantiles must be in 1..=100"));
            }
        }
        if self.b_grid.is_empty() {
            return Err(Error::config("b_grid must be nonempty"));
        }
        match self.scenario {
            ScenarioKind::RegressionUniformOutliers
            | ScenarioKind::RegressionInputCorruption
            | ScenarioKind::SpiralLabels
            | ScenarioKind::SpiralInputs => {
                if self.fractions.is_empty() {
                    return Err(Error::config("fractions must be nonempty"));
                }
                if self.fractions.iter().any(|&f| !(f > 0.0 && f <= 1.0)) {
                    return Err(Error::config("fractions must lie in (0, 1]"));
                }
            }
            ScenarioKind::RegressionTNoise => {
                if self.dfs.is_empty() {
                    return Err(Error::config("dfs must be nonempty"));
                }
                if !self.dfs.iter().all(|&df| df > 0.0) {
                    return Err(Error::config("degrees of freedom must be positive"));
                }
            }
            ScenarioKind::CsvClassification => {
                if self.csv_path.is_none() || self.label_column.is_none() {
                    return Err(Error::config(
                        "csv-classification needs csv_path and label_column",
                    ));
                }
                if self.cv_folds < 2 {
                    return Err(Error::config("cv_folds must be >= 2"));
                }
            }
        }
        // Block counts must fit the training batch; checked against the
        // training half used by the sweeps.
        if self.scenario != ScenarioKind::CsvClassification {
            let train_n = self.n / 2;
            let batch = (self.batch_fraction * train_n as f64).floor() as usize;
            if let Some(&bad) = self.b_grid.iter().find(|&&b| b == 0 || b > batch.max(1)) {
                return Err(Error::config(format!(
                    "block count {bad} exceeds the training batch size {batch}"
                )));
            }
        }
        Ok(())
    }

    /// Parses the key-value config format. The `scenario` key picks the desk
    /// preset the remaining keys override.
    pub fn from_config_text(text: &str) -> Result<Self> {
        let mut scenario = None;
        for (idx, raw) in text.lines().enumerate() {
            let line = strip_comment(raw).trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = split_key_value(line, idx + 1)?;
            if key == "scenario" {
                scenario = Some(ScenarioKind::parse(value)?);
            }
        }
        let scenario = scenario
            .ok_or_else(|| Error::config("config file does not set 'scenario'"))?;
        let mut cfg = ExperimentConfig::desk(scenario);

        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = strip_comment(raw).trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = split_key_value(line, line_no)?;
            cfg.apply_key(key, value, line_no)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn apply_key(&mut self, key: &str, value: &str, line: usize) -> Result<()> {
        let bad = |what: &str| Error::config(format!("line {line}: invalid {what} '{value}'"));
        match key {
            "scenario" => self.scenario = ScenarioKind::parse(value)?,
            "n" => self.n = value.parse().map_err(|_| bad("integer"))?,
            "p" => self.p = value.parse().map_err(|_| bad("integer"))?,
            "layers" => self.layers = value.parse().map_err(|_| bad("integer"))?,
            "width" => self.width = value.parse().map_err(|_| bad("integer"))?,
            "snr" => self.snr = value.parse().map_err(|_| bad("number"))?,
            "fractions" => self.fractions = parse_list(value).map_err(|_| bad("list"))?,
            "dfs" => self.dfs = parse_list(value).map_err(|_| bad("list"))?,
            "b_grid" => self.b_grid = parse_list(value).map_err(|_| bad("list"))?,
            "huber_q_grid" => {
                self.huber_q_grid = parse_list(value).map_err(|_| bad("list"))?;
            }
            "repetitions" => self.repetitions = value.parse().map_err(|_| bad("integer"))?,
            "seed" => self.seed = value.parse().map_err(|_| bad("integer"))?,
            "learning_rate" => self.learning_rate = value.parse().map_err(|_| bad("number"))?,
            "batch_fraction" => {
                self.batch_fraction = value.parse().map_err(|_| bad("number"))?;
            }
            "max_iters" => self.max_iters = value.parse().map_err(|_| bad("integer"))?,
            "stop_tol" => self.stop_tol = value.parse().map_err(|_| bad("number"))?,
            "player2" => {
                self.player2_direction = match value {
                    "sup-consistent" => Player2Direction::SupConsistent,
                    "paper-literal" => Player2Direction::PaperLiteral,
                    _ => return Err(bad("player2 direction")),
                }
            }
            "spiral_noise_sd" => {
                self.spiral_noise_sd = value.parse().map_err(|_| bad("number"))?;
            }
            "csv_path" => self.csv_path = Some(value.to_string()),
            "label_column" => self.label_column = Some(value.to_string()),
            "normalize_csv" => {
                self.normalize_csv = value.parse().map_err(|_| bad("boolean"))?;
            }
            "cv_folds" => self.cv_folds = value.parse().map_err(|_| bad("integer"))?,
            "threads" => self.threads = value.parse().map_err(|_| bad("integer"))?,
            "out" => self.out = Some(PathBuf::from(value)),
            other => {
                return Err(Error::config(format!("line {line}: unknown key '{other}'")));
            }
        }
        Ok(())
    }
}

fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(pos) => &line[..pos],
        None => line,
    }
}

fn split_key_value(line: &str, line_no: usize) -> Result<(&str, &str)> {
    let (key, value) = line
        .split_once('=')
        .ok_or_else(|| Error::config(format!("line {line_no}: expected 'key = value'")))?;
    Ok((key.trim(), value.trim()))
}

fn parse_list<T: std::str::FromStr>(value: &str) -> std::result::Result<Vec<T>, ()> {
    let mut out = Vec::new();
    for part in value.split(',') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        out.push(part.parse().map_err(|_| ())?);
    }
    if out.is_empty() {
        return Err(());
    }
    Ok(out)
}
