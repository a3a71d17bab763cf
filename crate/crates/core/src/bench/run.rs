//! The sweep runner: builds the task grid for a scenario, trains every
//! estimator for every repetition and corruption level, aggregates, scales,
//! and writes the JSON and CSV reports.
//!
//! Tasks are pure functions of the configuration and seeds, so they can run
//! on any number of threads without changing a byte of the output.

use std::path::PathBuf;

use rayon::prelude::*;
use serde::Serialize;

use crate::bench::{
    accuracy, generalization_error, huber_k_for_quantile, ExperimentConfig, ScenarioKind,
};
use crate::data::{
    corrupt_inputs, corrupt_labels, corrupt_outputs_student_t, corrupt_outputs_uniform,
    gen_regression, gen_spiral_opts, load_csv, Dataset, SpiralNormalization, TaskKind,
};
use crate::error::{Error, Result};
use crate::loss::LossKind;
use crate::nn::Architecture;
use crate::rng::{self, derive_seed, stream};
use crate::train::{cross_validate_blocks, train_mom, train_standard};

/// One corruption level: a table row.
#[derive(Debug, Clone, Copy, PartialEq)]
enum Level {
    /// Informative fraction for subset corruptions.
    Fraction(f64),
    /// Degrees of freedom for heavy-tailed output noise.
    Df(f64),
    /// No corruption; the scaling baseline row for the t-noise table.
    Clean,
    /// The single row of a CSV run.
    Whole,
}

impl Level {
    fn label(&self) -> String {
        match self {
            Level::Fraction(f) => format!("{f:.2}"),
            Level::Df(df) => format!("df={df}"),
            Level::Clean => "clean".to_string(),
            Level::Whole => "full".to_string(),
        }
    }
}

/// One trained model within a row.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum ModelUnit {
    Mom(usize),
    Ad,
    Huber(usize),
    Se,
    Sce,
    MomCv,
}

#[derive(Debug, Clone, Copy)]
struct TaskOutput {
    /// Test metric; `None` records a diverged (non-finite) run.
    value: Option<f64>,
    /// Cross-validated block count, when the unit selects one.
    chosen: Option<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CellReport {
    pub estimator: String,
    /// Mean metric over the repetitions with a finite result.
    pub mean: Option<f64>,
    /// Mean divided by the table baseline (regression tables only).
    pub scaled_mean: Option<f64>,
    pub per_rep: Vec<Option<f64>>,
    /// Per-repetition chosen block count or quantile, for grid estimators.
    pub chosen: Option<Vec<Option<usize>>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RowReport {
    pub level: String,
    pub cells: Vec<CellReport>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ResultTable {
    pub version: String,
    pub seed: u64,
    pub scenario: String,
    pub config: ExperimentConfig,
    /// Raw mean error of the baseline cell the scaled columns divide by.
    pub baseline: Option<f64>,
    pub rows: Vec<RowReport>,
}

#[derive(Debug)]
pub struct RunOutcome {
    pub table: ResultTable,
    /// True when at least one cell recorded a diverged repetition.
    pub partial: bool,
    pub json_path: Option<PathBuf>,
    pub csv_path: Option<PathBuf>,
}

fn build_levels(cfg: &ExperimentConfig) -> Vec<Level> {
    match cfg.scenario {
        ScenarioKind::RegressionUniformOutliers
        | ScenarioKind::RegressionInputCorruption
        | ScenarioKind::SpiralLabels
        | ScenarioKind::SpiralInputs => {
            let mut levels: Vec<Level> = Vec::new();
            let needs_baseline = cfg.scenario.is_regression()
                && !cfg.fractions.contains(&1.0);
            if needs_baseline {
                levels.push(Level::Fraction(1.0));
            }
            levels.extend(cfg.fractions.iter().map(|&f| Level::Fraction(f)));
            levels
        }
        ScenarioKind::RegressionTNoise => {
            let mut levels = vec![Level::Clean];
            levels.extend(cfg.dfs.iter().map(|&df| Level::Df(df)));
            levels
        }
        ScenarioKind::CsvClassification => vec![Level::Whole],
    }
}

fn build_units(cfg: &ExperimentConfig) -> Vec<ModelUnit> {
    match cfg.scenario {
        ScenarioKind::RegressionUniformOutliers
        | ScenarioKind::RegressionTNoise
        | ScenarioKind::RegressionInputCorruption => {
            let mut units: Vec<ModelUnit> =
                cfg.b_grid.iter().map(|&b| ModelUnit::Mom(b)).collect();
            units.push(ModelUnit::Ad);
            units.extend(cfg.huber_q_grid.iter().map(|&q| ModelUnit::Huber(q)));
            units.push(ModelUnit::Se);
            units
        }
        ScenarioKind::SpiralLabels | ScenarioKind::SpiralInputs => {
            let mut units: Vec<ModelUnit> =
                cfg.b_grid.iter().map(|&b| ModelUnit::Mom(b)).collect();
            units.push(ModelUnit::Sce);
            units
        }
        ScenarioKind::CsvClassification => vec![ModelUnit::MomCv, ModelUnit::Sce],
    }
}

/// Trains one estimator for one repetition and level, and scores it.
fn run_task(
    cfg: &ExperimentConfig,
    csv_data: Option<&Dataset>,
    rep: usize,
    level_idx: usize,
    level: Level,
    unit: ModelUnit,
) -> Result<TaskOutput> {
    let rep_seed = derive_seed(derive_seed(cfg.seed, stream::REPETITION), rep as u64);
    let corrupt_seed = derive_seed(derive_seed(rep_seed, stream::CORRUPTION), level_idx as u64);
    let train_seed = derive_seed(rep_seed, stream::TRAIN);

    let (train_ds, test_ds, arch, gt) = match cfg.scenario {
        ScenarioKind::RegressionUniformOutliers
        | ScenarioKind::RegressionTNoise
        | ScenarioKind::RegressionInputCorruption => {
            let (full, gt) =
                gen_regression(cfg.n, cfg.p, cfg.layers, cfg.width, cfg.snr, rep_seed)?;
            let (train_clean, test) = full.split_half();
            let train = match (cfg.scenario, level) {
                (ScenarioKind::RegressionUniformOutliers, Level::Fraction(f)) => {
                    corrupt_outputs_uniform(&train_clean, &gt, f, corrupt_seed)?
                }
                (ScenarioKind::RegressionTNoise, Level::Df(df)) => {
                    corrupt_outputs_student_t(&train_clean, &gt, df, corrupt_seed)?
                }
                (ScenarioKind::RegressionTNoise, Level::Clean) => train_clean,
                (ScenarioKind::RegressionInputCorruption, Level::Fraction(f)) => {
                    corrupt_inputs(&train_clean, f, corrupt_seed)?
                }
                _ => return Err(Error::config("level does not fit the scenario")),
            };
            let arch = Architecture::uniform(cfg.p, 1, cfg.layers, cfg.width)?;
            (train, test, arch, Some(gt))
        }
        ScenarioKind::SpiralLabels | ScenarioKind::SpiralInputs => {
            let full =
                gen_spiral_opts(rep_seed, cfg.spiral_noise_sd, SpiralNormalization::Global).0;
            let (train_clean, test) = full.split_half();
            let train = match (cfg.scenario, level) {
                (ScenarioKind::SpiralLabels, Level::Fraction(f)) => {
                    corrupt_labels(&train_clean, f, corrupt_seed)?
                }
                (ScenarioKind::SpiralInputs, Level::Fraction(f)) => {
                    corrupt_inputs(&train_clean, f, corrupt_seed)?
                }
                _ => return Err(Error::config("level does not fit the scenario")),
            };
            let arch = Architecture::uniform(
                train.input_dim(),
                train.output_dim(),
                cfg.layers,
                cfg.width,
            )?;
            (train, test, arch, None)
        }
        ScenarioKind::CsvClassification => {
            let full = csv_data.ok_or_else(|| Error::config("csv data missing"))?;
            let mut order: Vec<usize> = (0..full.len()).collect();
            let mut split_rng = rng::seeded(derive_seed(rep_seed, stream::SPLIT));
            rand::seq::SliceRandom::shuffle(order.as_mut_slice(), &mut split_rng);
            let mid = full.len() / 2;
            let train = full.subset(&order[..mid]);
            let test = full.subset(&order[mid..]);
            let arch = Architecture::uniform(
                train.input_dim(),
                train.output_dim(),
                cfg.layers,
                cfg.width,
            )?;
            (train, test, arch, None)
        }
    };

    let loss = match train_ds.task() {
        TaskKind::Regression => LossKind::SquaredError,
        TaskKind::Classification => LossKind::SoftmaxCrossEntropy,
    };

    let mut chosen = None;
    let params = match unit {
        ModelUnit::Mom(b) => {
            train_mom(&train_ds, &arch, loss, &cfg.train_config(train_seed, b))?.0
        }
        ModelUnit::Se => {
            train_standard(&train_ds, &arch, loss, &cfg.train_config(train_seed, 1))?.0
        }
        ModelUnit::Sce => {
            train_standard(&train_ds, &arch, loss, &cfg.train_config(train_seed, 1))?.0
        }
        ModelUnit::Ad => train_standard(
            &train_ds,
            &arch,
            LossKind::AbsoluteDeviation,
            &cfg.train_config(train_seed, 1),
        )?
        .0,
        ModelUnit::Huber(q) => {
            let k = huber_k_for_quantile(&train_ds, q)?;
            train_standard(
                &train_ds,
                &arch,
                LossKind::huber(k.max(f64::MIN_POSITIVE))?,
                &cfg.train_config(train_seed, 1),
            )?
            .0
        }
        ModelUnit::MomCv => {
            let (best_b, _) = cross_validate_blocks(
                &train_ds,
                &arch,
                loss,
                &cfg.b_grid,
                cfg.cv_folds,
                &cfg.train_config(train_seed, cfg.b_grid[0]),
            )?;
            chosen = Some(best_b);
            train_mom(&train_ds, &arch, loss, &cfg.train_config(train_seed, best_b))?.0
        }
    };

    let metric = match cfg.scenario {
        ScenarioKind::RegressionUniformOutliers
        | ScenarioKind::RegressionTNoise
        | ScenarioKind::RegressionInputCorruption => {
            generalization_error(gt.as_ref().unwrap(), &params, &test_ds)?
        }
        _ => accuracy(&params, &test_ds)?,
    };
    Ok(TaskOutput {
        value: metric.is_finite().then_some(metric),
        chosen,
    })
}

/// Per-repetition oracle selection over a grid of task outputs. Regression
/// picks the smallest error, classification the largest accuracy; ties go to
/// the smallest grid key.
fn select_per_rep(
    grid: &[(usize, Option<f64>)],
    larger_is_better: bool,
) -> (Option<f64>, Option<usize>) {
    let mut best: Option<(usize, f64)> = None;
    for &(key, value) in grid {
        let Some(v) = value else { continue };
        let better = match best {
            None => true,
            Some((bk, bv)) => {
                if larger_is_better {
                    v > bv || (v == bv && key < bk)
                } else {
                    v < bv || (v == bv && key < bk)
                }
            }
        };
        if better {
            best = Some((key, v));
        }
    }
    match best {
        Some((key, value)) => (Some(value), Some(key)),
        None => (None, None),
    }
}

fn mean_of(values: &[Option<f64>]) -> Option<f64> {
    let finite: Vec<f64> = values.iter().filter_map(|v| *v).collect();
    if finite.is_empty() {
        None
    } else {
        Some(finite.iter().sum::<f64>() / finite.len() as f64)
    }
}

struct Aggregation {
    rows: Vec<RowReport>,
    baseline: Option<f64>,
    partial: bool,
}

fn aggregate(
    cfg: &ExperimentConfig,
    levels: &[Level],
    units: &[ModelUnit],
    outputs: &[TaskOutput],
) -> Aggregation {
    let reps = cfg.repetitions;
    let n_units = units.len();
    let n_levels = levels.len();
    let at = |rep: usize, level: usize, unit: usize| -> &TaskOutput {
        &outputs[(rep * n_levels + level) * n_units + unit]
    };
    let unit_positions = |pred: &dyn Fn(ModelUnit) -> bool| -> Vec<(usize, usize)> {
        units
            .iter()
            .enumerate()
            .filter(|(_, u)| pred(**u))
            .map(|(idx, u)| {
                let key = match u {
                    ModelUnit::Mom(b) => *b,
                    ModelUnit::Huber(q) => *q,
                    _ => 0,
                };
                (key, idx)
            })
            .collect()
    };

    let classification = !cfg.scenario.is_regression();
    let mut rows = Vec::with_capacity(n_levels);
    let mut partial = false;
    for (level_idx, level) in levels.iter().enumerate() {
        let mut cells = Vec::new();

        // Grid estimators: per-repetition oracle selection.
        let grids: Vec<(&str, Vec<(usize, usize)>)> = match cfg.scenario {
            s if s.is_regression() => vec![
                ("mom_min", unit_positions(&|u| matches!(u, ModelUnit::Mom(_)))),
                ("huber_min", unit_positions(&|u| matches!(u, ModelUnit::Huber(_)))),
            ],
            ScenarioKind::CsvClassification => vec![],
            _ => vec![("mom_min", unit_positions(&|u| matches!(u, ModelUnit::Mom(_))))],
        };
        for (name, grid) in &grids {
            let mut per_rep = Vec::with_capacity(reps);
            let mut chosen = Vec::with_capacity(reps);
            for rep in 0..reps {
                let table: Vec<(usize, Option<f64>)> = grid
                    .iter()
                    .map(|&(key, idx)| (key, at(rep, level_idx, idx).value))
                    .collect();
                let (value, key) = select_per_rep(&table, classification);
                per_rep.push(value);
                chosen.push(key);
            }
            partial |= per_rep.iter().any(Option::is_none);
            cells.push(CellReport {
                estimator: (*name).to_string(),
                mean: mean_of(&per_rep),
                scaled_mean: None,
                per_rep,
                chosen: Some(chosen),
            });
        }

        // Single estimators.
        for (idx, unit) in units.iter().enumerate() {
            let name = match unit {
                ModelUnit::Ad => "ad",
                ModelUnit::Se => "se",
                ModelUnit::Sce => "sce",
                ModelUnit::MomCv => "mom_cv",
                _ => continue,
            };
            let per_rep: Vec<Option<f64>> =
                (0..reps).map(|rep| at(rep, level_idx, idx).value).collect();
            let chosen = if matches!(unit, ModelUnit::MomCv) {
                Some(
                    (0..reps)
                        .map(|rep| at(rep, level_idx, idx).chosen)
                        .collect(),
                )
            } else {
                None
            };
            partial |= per_rep.iter().any(Option::is_none);
            cells.push(CellReport {
                estimator: name.to_string(),
                mean: mean_of(&per_rep),
                scaled_mean: None,
                per_rep,
                chosen,
            });
        }

        // Put mom_cv/sce order stable: mom first, then baselines (already so).
        rows.push(RowReport {
            level: level.label(),
            cells,
        });
    }

    // Scaling for regression tables: divide by the mom_min mean of the
    // uncorrupted row.
    let mut baseline = None;
    if cfg.scenario.is_regression() {
        let baseline_row = levels.iter().position(|l| match l {
            Level::Clean => true,
            Level::Fraction(f) => *f == 1.0,
            _ => false,
        });
        if let Some(row_idx) = baseline_row {
            let base = rows[row_idx]
                .cells
                .iter()
                .find(|c| c.estimator == "mom_min")
                .and_then(|c| c.mean);
            if let Some(base) = base {
                if base > 0.0 {
                    baseline = Some(base);
                    for row in &mut rows {
                        for cell in &mut row.cells {
                            cell.scaled_mean = cell.mean.map(|m| m / base);
                        }
                    }
                }
            }
        }
    }

    Aggregation {
        rows,
        baseline,
        partial,
    }
}

fn render_csv(table: &ResultTable, classification: bool) -> String {
    let mut out = String::new();
    if let Some(first) = table.rows.first() {
        out.push_str("level");
        for cell in &first.cells {
            out.push(',');
            out.push_str(&cell.estimator);
        }
        out.push('\n');
    }
    for row in &table.rows {
        out.push_str(&row.level);
        for cell in &row.cells {
            let value = if classification { cell.mean } else { cell.scaled_mean };
            match value {
                Some(v) => out.push_str(&format!(",{v:.6}")),
                None => out.push_str(",NaN"),
            }
        }
        out.push('\n');
    }
    out
}

/// Runs the full sweep described by `cfg` and, when `cfg.out` is set, writes
/// `<out>.json` and `<out>.csv`. Fully deterministic for a given config,
/// whatever the thread count.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RunOutcome> {
    cfg.validate()?;

    let csv_data = match cfg.scenario {
        ScenarioKind::CsvClassification => {
            let path = cfg.csv_path.as_ref().unwrap();
            let label = cfg.label_column.as_ref().unwrap();
            let ds = load_csv(path, label, TaskKind::Classification, cfg.normalize_csv)?;
            if ds.len() < 4 {
                return Err(Error::domain("csv dataset is too small to split"));
            }
            Some(ds)
        }
        _ => None,
    };

    let levels = build_levels(cfg);
    let units = build_units(cfg);
    let mut tasks = Vec::with_capacity(cfg.repetitions * levels.len() * units.len());
    for rep in 0..cfg.repetitions {
        for (level_idx, &level) in levels.iter().enumerate() {
            for &unit in &units {
                tasks.push((rep, level_idx, level, unit));
            }
        }
    }

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads)
        .build()
        .map_err(|e| Error::config(format!("thread pool: {e}")))?;
    let outputs: Result<Vec<TaskOutput>> = pool.install(|| {
        tasks
            .par_iter()
            .map(|&(rep, level_idx, level, unit)| {
                run_task(cfg, csv_data.as_ref(), rep, level_idx, level, unit)
            })
            .collect()
    });
    let outputs = outputs?;

    let aggregation = aggregate(cfg, &levels, &units, &outputs);
    let table = ResultTable {
        version: env!("CARGO_PKG_VERSION").to_string(),
        seed: cfg.seed,
        scenario: cfg.scenario.name().to_string(),
        config: cfg.clone(),
        baseline: aggregation.baseline,
        rows: aggregation.rows,
    };

    let mut json_path = None;
    let mut csv_path = None;
    if let Some(base) = &cfg.out {
        if let Some(parent) = base.parent() {
            if !parent.as_os_str().is_empty() {
                std::fs::create_dir_all(parent)?;
            }
        }
        let jp = base.with_extension("json");
        let cp = base.with_extension("csv");
        let json = serde_json::to_string_pretty(&table)
            .map_err(|e| Error::config(format!("serialize report: {e}")))?;
        std::fs::write(&jp, json + "\n")?;
        std::fs::write(&cp, render_csv(&table, !cfg.scenario.is_regression()))?;
        json_path = Some(jp);
        csv_path = Some(cp);
    }

    Ok(RunOutcome {
        table,
        partial: aggregation.partial,
        json_path,
        csv_path,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny_regression_cfg() -> ExperimentConfig {
        let mut cfg = ExperimentConfig::desk(ScenarioKind::RegressionUniformOutliers);
        cfg.n = 40;
        cfg.p = 3;
        cfg.layers = 1;
        cfg.width = 4;
        cfg.fractions = vec![1.0];
        cfg.b_grid = vec![1];
        cfg.huber_q_grid = vec![100];
        cfg.repetitions = 1;
        cfg.batch_fraction = 0.5;
        cfg.max_iters = 60;
        cfg.stop_tol = 1e-9;
        cfg.learning_rate = 0.05;
        cfg
    }

    #[test]
    fn single_block_cell_equals_squared_error_cell() {
        let cfg = tiny_regression_cfg();
        let outcome = run_experiment(&cfg).unwrap();
        let row = &outcome.table.rows[0];
        let mom = row.cells.iter().find(|c| c.estimator == "mom_min").unwrap();
        let se = row.cells.iter().find(|c| c.estimator == "se").unwrap();
        let (a, b) = (mom.mean.unwrap(), se.mean.unwrap());
        assert!((a - b).abs() < 1e-9, "mom {a} vs se {b}");
    }

    #[test]
    fn regression_rows_carry_the_full_estimator_roster() {
        let cfg = tiny_regression_cfg();
        let outcome = run_experiment(&cfg).unwrap();
        for row in &outcome.table.rows {
            let estimators: Vec<&str> =
                row.cells.iter().map(|c| c.estimator.as_str()).collect();
            assert_eq!(estimators, vec!["mom_min", "huber_min", "ad", "se"]);
        }
    }

    #[test]
    fn spiral_rows_carry_mom_and_sce() {
        let mut cfg = ExperimentConfig::desk(ScenarioKind::SpiralLabels);
        cfg.fractions = vec![1.0];
        cfg.repetitions = 1;
        cfg.b_grid = vec![1];
        cfg.width = 8;
        cfg.max_iters = 30;
        let outcome = run_experiment(&cfg).unwrap();
        let estimators: Vec<&str> = outcome.table.rows[0]
            .cells
            .iter()
            .map(|c| c.estimator.as_str())
            .collect();
        assert_eq!(estimators, vec!["mom_min", "sce"]);
        assert!(outcome.table.baseline.is_none());
    }

    #[test]
    fn baseline_cell_scales_to_exactly_one() {
        let cfg = tiny_regression_cfg();
        let outcome = run_experiment(&cfg).unwrap();
        let row = &outcome.table.rows[0];
        let mom = row.cells.iter().find(|c| c.estimator == "mom_min").unwrap();
        assert_eq!(mom.scaled_mean, Some(1.0));
        assert!(outcome.table.baseline.is_some());
        assert!(!outcome.partial);
    }

    #[test]
    fn reports_are_deterministic_across_thread_counts() {
        let dir = std::env::temp_dir().join("momnet-bench-test");
        std::fs::create_dir_all(&dir).unwrap();
        let mut cfg = tiny_regression_cfg();
        cfg.fractions = vec![1.0, 0.8];
        cfg.repetitions = 2;
        cfg.b_grid = vec![1, 2];

        cfg.threads = 1;
        cfg.out = Some(dir.join("serial"));
        run_experiment(&cfg).unwrap();
        cfg.threads = 4;
        cfg.out = Some(dir.join("parallel"));
        run_experiment(&cfg).unwrap();

        let a = std::fs::read(dir.join("serial.json")).unwrap();
        let b = std::fs::read(dir.join("parallel.json")).unwrap();
        assert_eq!(a, b);
        let a = std::fs::read(dir.join("serial.csv")).unwrap();
        let b = std::fs::read(dir.join("parallel.csv")).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn t_noise_table_gets_a_clean_baseline_row() {
        let mut cfg = ExperimentConfig::desk(ScenarioKind::RegressionTNoise);
        cfg.n = 40;
        cfg.p = 3;
        cfg.layers = 1;
        cfg.width = 4;
        cfg.dfs = vec![10.0];
        cfg.b_grid = vec![1, 2];
        cfg.huber_q_grid = vec![100];
        cfg.repetitions = 1;
        cfg.batch_fraction = 0.5;
        cfg.max_iters = 40;
        cfg.learning_rate = 0.05;
        let outcome = run_experiment(&cfg).unwrap();
        assert_eq!(outcome.table.rows[0].level, "clean");
        assert_eq!(outcome.table.rows[1].level, "df=10");
    }

    #[test]
    fn csv_scenario_runs_cv_and_reports_chosen_b() {
        let dir = std::env::temp_dir().join("momnet-bench-csv-test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("toy.csv");
        let spiral = crate::data::gen_spiral(3).subset(&(0..120).collect::<Vec<_>>());
        crate::data::save_csv(&spiral, &path).unwrap();

        let mut cfg = ExperimentConfig::desk(ScenarioKind::CsvClassification);
        cfg.csv_path = Some(path.to_string_lossy().into_owned());
        cfg.label_column = Some("label".to_string());
        cfg.b_grid = vec![1, 2];
        cfg.cv_folds = 2;
        cfg.layers = 1;
        cfg.width = 8;
        cfg.max_iters = 40;
        cfg.batch_fraction = 0.5;
        let outcome = run_experiment(&cfg).unwrap();
        let row = &outcome.table.rows[0];
        let cv = row.cells.iter().find(|c| c.estimator == "mom_cv").unwrap();
        assert!(cv.mean.is_some());
        let chosen = cv.chosen.as_ref().unwrap();
        assert!(chosen[0].is_some());
        assert!(row.cells.iter().any(|c| c.estimator == "sce"));
    }
}
