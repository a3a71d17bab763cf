//! Command-line front end: dataset generation, single fits, benchmark
//! sweeps, and block-count cross-validation.
//!
//! Exit codes: 0 success, 2 config error, 3 data error, 4 partial results
//! written (some cells diverged).

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use momnet::bench::{self, ExperimentConfig, Preset, ScenarioKind};
use momnet::data::{self, Dataset, TaskKind};
use momnet::loss::LossKind;
use momnet::nn::Architecture;
use momnet::rng::{derive_seed, stream};
use momnet::train::{
    cross_validate_blocks, dataset_mean_loss, train_mom, train_standard, Player2Direction,
    TrainConfig,
};
use momnet::Error;

#[derive(Parser)]
#[command(
    name = "momnet",
    version,
    about = "Robust feed-forward network training with a median-of-means objective"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Emit a synthetic dataset (optionally corrupted) to CSV.
    Generate(GenerateArgs),
    /// Fit one estimator on a CSV dataset and print final metrics.
    Train(TrainArgs),
    /// Run a benchmark sweep from a config file or a preset.
    Bench(BenchArgs),
    /// Choose the block count by k-fold cross-validation on CSV data.
    Cv(CvArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TaskArg {
    Regression,
    Classification,
}

impl From<TaskArg> for TaskKind {
    fn from(value: TaskArg) -> Self {
        match value {
            TaskArg::Regression => TaskKind::Regression,
            TaskArg::Classification => TaskKind::Classification,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum GenerateTask {
    Regression,
    Spiral,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CorruptionArg {
    None,
    UniformOutliers,
    TNoise,
    Inputs,
    Labels,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum LossArg {
    Se,
    Ad,
    Huber,
    Sce,
    Mom,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Player2Arg {
    SupConsistent,
    PaperLiteral,
}

impl From<Player2Arg> for Player2Direction {
    fn from(value: Player2Arg) -> Self {
        match value {
            Player2Arg::SupConsistent => Player2Direction::SupConsistent,
            Player2Arg::PaperLiteral => Player2Direction::PaperLiteral,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PresetArg {
    Desk,
    Paper,
}

impl From<PresetArg> for Preset {
    fn from(value: PresetArg) -> Self {
        match value {
            PresetArg::Desk => Preset::Desk,
            PresetArg::Paper => Preset::Paper,
        }
    }
}

#[derive(Args)]
struct GenerateArgs {
    /// Dataset family.
    #[arg(long, value_enum)]
    task: GenerateTask,
    /// Output CSV path.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Sample count (regression; must be even).
    #[arg(long, default_value_t = 200)]
    n: usize,
    /// Input dimension (regression).
    #[arg(long, default_value_t = 10)]
    p: usize,
    /// Hidden layers of the generating network (regression).
    #[arg(long, default_value_t = 2)]
    layers: usize,
    /// Hidden width of the generating network (regression).
    #[arg(long, default_value_t = 16)]
    width: usize,
    /// Signal-to-noise ratio (regression).
    #[arg(long, default_value_t = 10.0)]
    snr: f64,
    /// Spiral angle-noise standard deviation.
    #[arg(long, default_value_t = 0.25)]
    spiral_noise_sd: f64,
    /// Corruption protocol applied before writing.
    #[arg(long, value_enum, default_value_t = CorruptionArg::None)]
    corrupt: CorruptionArg,
    /// Informative fraction for subset corruptions.
    #[arg(long, default_value_t = 0.75)]
    frac: f64,
    /// Degrees of freedom for t-distributed output noise.
    #[arg(long, default_value_t = 1.0)]
    df: f64,
}

#[derive(Args)]
struct CommonTrainArgs {
    /// Hidden widths of the fitted network, e.g. 16,16.
    #[arg(long, value_delimiter = ',', default_value = "16,16")]
    hidden: Vec<usize>,
    #[arg(long, default_value_t = 0.05)]
    lr: f64,
    #[arg(long, default_value_t = 0.15)]
    batch_fraction: f64,
    #[arg(long, default_value_t = 4000)]
    max_iters: usize,
    #[arg(long, default_value_t = 1e-5)]
    stop_tol: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Player2Arg::SupConsistent)]
    player2: Player2Arg,
}

impl CommonTrainArgs {
    fn config(&self, blocks: usize) -> TrainConfig {
        TrainConfig {
            blocks,
            learning_rate: self.lr,
            batch_fraction: self.batch_fraction,
            max_iters: self.max_iters,
            stop_tol: self.stop_tol,
            seed: self.seed,
            player2_direction: self.player2.into(),
            ..TrainConfig::default()
        }
    }
}

#[derive(Args)]
struct TrainArgs {
    /// Input CSV path.
    #[arg(long)]
    data: PathBuf,
    /// Name of the label column.
    #[arg(long)]
    label_column: String,
    #[arg(long, value_enum)]
    task: TaskArg,
    /// Scale every feature column to unit sum of squares.
    #[arg(long)]
    normalize: bool,
    #[arg(long, value_enum)]
    loss: LossArg,
    /// Block count for the median-of-means trainer.
    #[arg(long, default_value_t = 5)]
    blocks: usize,
    /// Explicit Huber threshold.
    #[arg(long)]
    huber_k: Option<f64>,
    /// Huber threshold as a percentile of |y| (ignored with --huber-k).
    #[arg(long, default_value_t = 95)]
    huber_q: usize,
    /// Fraction of rows held out (seeded shuffle) for evaluation.
    #[arg(long, default_value_t = 0.0)]
    holdout: f64,
    #[command(flatten)]
    train: CommonTrainArgs,
}

#[derive(Args)]
struct BenchArgs {
    /// Config file (key = value lines); see the library docs for the schema.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Built-in starting point when no config file is given.
    #[arg(long, value_enum)]
    preset: Option<PresetArg>,
    #[arg(long)]
    scenario: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// Report base path; writes <out>.json and <out>.csv.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (0 = all cores).
    #[arg(long)]
    threads: Option<usize>,
    /// CSV dataset for the csv-classification scenario.
    #[arg(long)]
    csv_path: Option<String>,
    #[arg(long)]
    label_column: Option<String>,
}

#[derive(Args)]
struct CvArgs {
    #[arg(long)]
    data: PathBuf,
    #[arg(long)]
    label_column: String,
    #[arg(long, value_enum)]
    task: TaskArg,
    #[arg(long)]
    normalize: bool,
    /// Candidate block counts, e.g. 1,3,5,7.
    #[arg(long, value_delimiter = ',', default_value = "1,3,5,7,9,11")]
    b_grid: Vec<usize>,
    #[arg(long, default_value_t = 10)]
    folds: usize,
    #[command(flatten)]
    train: CommonTrainArgs,
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::Config(_) => 2,
        Error::Parse { .. } | Error::Io(_) | Error::Domain(_) => 3,
        Error::Shape(_) => 1,
    }
}

fn run_generate(args: &GenerateArgs) -> momnet::Result<()> {
    let ds = match args.task {
        GenerateTask::Regression => {
            let (ds, gt) = data::gen_regression(
                args.n, args.p, args.layers, args.width, args.snr, args.seed,
            )?;
            let corrupt_seed = derive_seed(args.seed, stream::CORRUPTION);
            match args.corrupt {
                CorruptionArg::None => ds,
                CorruptionArg::UniformOutliers => {
                    data::corrupt_outputs_uniform(&ds, &gt, args.frac, corrupt_seed)?
                }
                CorruptionArg::TNoise => {
                    data::corrupt_outputs_student_t(&ds, &gt, args.df, corrupt_seed)?
                }
                CorruptionArg::Inputs => data::corrupt_inputs(&ds, args.frac, corrupt_seed)?,
                CorruptionArg::Labels => {
                    return Err(Error::config("label corruption needs --task spiral"));
                }
            }
        }
        GenerateTask::Spiral => {
            let ds = data::gen_spiral_opts(
                args.seed,
                args.spiral_noise_sd,
                data::SpiralNormalization::Global,
            )
            .0;
            let corrupt_seed = derive_seed(args.seed, stream::CORRUPTION);
            match args.corrupt {
                CorruptionArg::None => ds,
                CorruptionArg::Labels => data::corrupt_labels(&ds, args.frac, corrupt_seed)?,
                CorruptionArg::Inputs => data::corrupt_inputs(&ds, args.frac, corrupt_seed)?,
                _ => {
                    return Err(Error::config(
                        "spiral data supports --corrupt labels or inputs",
                    ));
                }
            }
        }
    };
    data::save_csv(&ds, &args.out)?;
    println!(
        "wrote {} rows x {} features to {}",
        ds.len(),
        ds.input_dim(),
        args.out.display()
    );
    Ok(())
}

/// Seeded shuffle-and-split for holdout evaluation.
fn holdout_split(
    ds: &Dataset,
    holdout: f64,
    seed: u64,
) -> momnet::Result<(Dataset, Option<Dataset>)> {
    if !(0.0..1.0).contains(&holdout) {
        return Err(Error::config("holdout fraction must be in [0, 1)"));
    }
    if holdout == 0.0 {
        return Ok((ds.clone(), None));
    }
    let order = momnet::rng::shuffled_indices(ds.len(), derive_seed(seed, stream::SPLIT));
    let cut = ((1.0 - holdout) * ds.len() as f64).round() as usize;
    if cut == 0 || cut == ds.len() {
        return Err(Error::config("holdout split leaves an empty part"));
    }
    Ok((ds.subset(&order[..cut]), Some(ds.subset(&order[cut..]))))
}

fn run_train(args: &TrainArgs) -> momnet::Result<()> {
    let task: TaskKind = args.task.into();
    let full = data::load_csv(&args.data, &args.label_column, task, args.normalize)?;
    let (train_ds, eval_ds) = holdout_split(&full, args.holdout, args.train.seed)?;
    let arch = Architecture::new(
        train_ds.input_dim(),
        train_ds.output_dim(),
        args.train.hidden.clone(),
    )?;

    let standard_loss = match task {
        TaskKind::Regression => LossKind::SquaredError,
        TaskKind::Classification => LossKind::SoftmaxCrossEntropy,
    };
    let loss = match args.loss {
        LossArg::Se => LossKind::SquaredError,
        LossArg::Ad => LossKind::AbsoluteDeviation,
        LossArg::Sce => LossKind::SoftmaxCrossEntropy,
        LossArg::Huber => {
            let k = match args.huber_k {
                Some(k) => k,
                None => bench::huber_k_for_quantile(&train_ds, args.huber_q)?,
            };
            LossKind::huber(k)?
        }
        LossArg::Mom => standard_loss,
    };

    let cfg = args.train.config(args.blocks);
    let (params, trace) = if args.loss == LossArg::Mom {
        train_mom(&train_ds, &arch, loss, &cfg)?
    } else {
        train_standard(&train_ds, &arch, loss, &cfg)?
    };

    let last = trace.last().expect("nonempty trace");
    println!("iterations:       {}", trace.len());
    println!("final objective:  {:.6e}", last.objective);
    println!("final step norm:  {:.6e}", last.p1_step_norm);
    let train_fit = dataset_mean_loss(&train_ds, &params, loss)?;
    println!("train mean loss:  {train_fit:.6e}");
    if let Some(eval) = eval_ds {
        match task {
            TaskKind::Regression => {
                let mse = dataset_mean_loss(&eval, &params, LossKind::SquaredError)?;
                println!("holdout mse:      {mse:.6e}");
            }
            TaskKind::Classification => {
                let acc = bench::accuracy(&params, &eval)?;
                println!("holdout accuracy: {acc:.4}");
            }
        }
    }
    Ok(())
}

fn run_bench(args: &BenchArgs) -> momnet::Result<bool> {
    let mut cfg = match (&args.config, args.preset, &args.scenario) {
        (Some(path), _, _) => {
            let text = std::fs::read_to_string(path)?;
            ExperimentConfig::from_config_text(&text)?
        }
        (None, Some(preset), Some(scenario)) => {
            ExperimentConfig::preset(preset.into(), ScenarioKind::parse(scenario)?)
        }
        _ => {
            return Err(Error::config(
                "pass --config FILE, or both --preset and --scenario",
            ));
        }
    };
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(out) = &args.out {
        cfg.out = Some(out.clone());
    }
    if let Some(threads) = args.threads {
        cfg.threads = threads;
    }
    if let Some(path) = &args.csv_path {
        cfg.csv_path = Some(path.clone());
    }
    if let Some(label) = &args.label_column {
        cfg.label_column = Some(label.clone());
    }
    if cfg.out.is_none() {
        return Err(Error::config(
            "no output path: set --out or the config 'out' key",
        ));
    }

    let outcome = bench::run_experiment(&cfg)?;
    println!(
        "scenario {} | {} rows x {} estimators | seed {}",
        outcome.table.scenario,
        outcome.table.rows.len(),
        outcome.table.rows.first().map_or(0, |r| r.cells.len()),
        outcome.table.seed
    );
    if let Some(baseline) = outcome.table.baseline {
        println!("baseline error: {baseline:.6e}");
    }
    for row in &outcome.table.rows {
        let cells: Vec<String> = row
            .cells
            .iter()
            .map(|c| {
                let value = c.scaled_mean.or(c.mean);
                match value {
                    Some(v) => format!("{}={:.3}", c.estimator, v),
                    None => format!("{}=NaN", c.estimator),
                }
            })
            .collect();
        println!("  {:>8}: {}", row.level, cells.join("  "));
    }
    if let (Some(json), Some(csv)) = (&outcome.json_path, &outcome.csv_path) {
        println!("reports: {} {}", json.display(), csv.display());
    }
    if outcome.partial {
        eprintln!("warning: some cells diverged; table contains NaN entries");
    }
    Ok(outcome.partial)
}

fn run_cv(args: &CvArgs) -> momnet::Result<()> {
    let task: TaskKind = args.task.into();
    let ds = data::load_csv(&args.data, &args.label_column, task, args.normalize)?;
    let arch = Architecture::new(ds.input_dim(), ds.output_dim(), args.train.hidden.clone())?;
    let loss = match task {
        TaskKind::Regression => LossKind::SquaredError,
        TaskKind::Classification => LossKind::SoftmaxCrossEntropy,
    };
    if args.b_grid.is_empty() {
        return Err(Error::config("empty block grid"));
    }
    let cfg = args.train.config(args.b_grid[0]);
    let (chosen, scores) =
        cross_validate_blocks(&ds, &arch, loss, &args.b_grid, args.folds, &cfg)?;
    println!("chosen b: {chosen}");
    for score in &scores {
        println!(
            "  b={:<4} mean score {:.6e}  folds {:?}",
            score.blocks,
            score.mean_score,
            score
                .fold_scores
                .iter()
                .map(|v| (v * 1e4).round() / 1e4)
                .collect::<Vec<_>>()
        );
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome: momnet::Result<bool> = match &cli.command {
        Command::Generate(args) => run_generate(args).map(|()| false),
        Command::Train(args) => run_train(args).map(|()| false),
        Command::Bench(args) => run_bench(args),
        Command::Cv(args) => run_cv(args).map(|()| false),
    };
    match outcome {
        Ok(false) => ExitCode::SUCCESS,
        Ok(true) => ExitCode::from(4),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}
