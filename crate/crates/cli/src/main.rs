//! `nnstne` command-line tool: train shapelets, evaluate clusterings and
//! export learned artifacts.

mod manifest;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use nnstne::clustering::{
    evaluate_pipeline, extract_features, EvalReport, FeatureKind, DEFAULT_RESTARTS,
};
use nnstne::dataset::{load_ucr, merge, Delimiter, Preprocessing, TimeSeriesDataset};
use nnstne::objective::{SigmaRule, DEFAULT_SIGMA_NEIGHBORS};
use nnstne::training::{train_with, TrainConfig, TrainedModel};
use nnstne::Error;
use serde_json::json;

use crate::manifest::Manifest;

#[derive(Parser, Debug)]
#[command(
    name = "nnstne",
    version,
    about = "Unsupervised shapelet learning for time-series clustering"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Learn a shapelet bank and write it as model JSON.
    Train(TrainArgs),
    /// Cluster a labelled dataset and report the Rand Index.
    Evaluate(EvaluateArgs),
    /// Write shapelets, features or the loss trace as CSV.
    Export(ExportArgs),
}

#[derive(Args, Debug)]
struct DataArgs {
    /// UCR-format file (label first on every line).
    #[arg(long, env = "NNSTNE_DATA")]
    data: PathBuf,
    /// Optional second split, merged after `--data`.
    #[arg(long, env = "NNSTNE_TEST")]
    test: Option<PathBuf>,
    /// Field separator: comma, tab, space or a single character. Detected when omitted.
    #[arg(long, env = "NNSTNE_DELIMITER")]
    delimiter: Option<String>,
}

#[derive(Args, Debug)]
struct TrainArgs {
    #[command(flatten)]
    data: DataArgs,
    /// Nominal shapelet length M.
    #[arg(long, env = "NNSTNE_LENGTH")]
    length: usize,
    /// Number of shapelets, or `auto` to derive it from the data.
    #[arg(long, env = "NNSTNE_COUNT", default_value = "auto")]
    count: String,
    /// Degrees of freedom of the Student-t kernel.
    #[arg(long, env = "NNSTNE_ALPHA", default_value_t = 1.0)]
    alpha: f64,
    /// Weight of the shapelet diversity penalty.
    #[arg(long, env = "NNSTNE_LAMBDA", default_value_t = 1.0)]
    lambda: f64,
    /// Weight of the L1 penalty.
    #[arg(long, env = "NNSTNE_BETA", default_value_t = 0.01)]
    beta: f64,
    /// Affinity kernel variance: `auto` (nearest-neighbour scale), `median` or a number.
    #[arg(long, env = "NNSTNE_SIGMA", default_value = "auto")]
    sigma: String,
    #[arg(long, env = "NNSTNE_LR", default_value_t = 0.1)]
    lr: f64,
    #[arg(long, env = "NNSTNE_ITERS", default_value_t = 500)]
    iters: usize,
    /// Relative loss change below which training stops.
    #[arg(long, env = "NNSTNE_TOL", default_value_t = 1e-6)]
    tol: f64,
    #[arg(long, env = "NNSTNE_SEED", default_value_t = 0)]
    seed: u64,
    #[arg(long, env = "NNSTNE_PREPROCESS", value_enum, default_value_t = PreprocessArg::None)]
    preprocess: PreprocessArg,
    /// Relative magnitude below which shapelet edges are trimmed.
    #[arg(long, env = "NNSTNE_TRIM_EPS", default_value_t = 0.01)]
    trim_eps: f64,
    /// Fail with exit code 4 on a non-finite loss instead of halving the step.
    #[arg(long, env = "NNSTNE_NO_BACKOFF")]
    no_backoff: bool,
    /// Derive the shapelet count from the combined set instead of `--data` alone.
    #[arg(long, env = "NNSTNE_COUNT_FROM_ALL")]
    count_from_all: bool,
    #[arg(long, env = "NNSTNE_THREADS", default_value_t = 1)]
    threads: usize,
    #[arg(long, env = "NNSTNE_OUT", default_value = "model.json")]
    out: PathBuf,
    /// Manifest path; defaults to `<out>.manifest.json`.
    #[arg(long, env = "NNSTNE_MANIFEST")]
    manifest: Option<PathBuf>,
    #[arg(long, env = "NNSTNE_QUIET")]
    quiet: bool,
}

#[derive(Args, Debug)]
struct EvaluateArgs {
    #[command(flatten)]
    data: DataArgs,
    /// Model JSON; not needed for `--features raw`.
    #[arg(long, env = "NNSTNE_MODEL")]
    model: Option<PathBuf>,
    #[arg(long, env = "NNSTNE_FEATURES", value_enum, default_value_t = FeaturesArg::F)]
    features: FeaturesArg,
    #[arg(long, env = "NNSTNE_SEED", default_value_t = 0)]
    seed: u64,
    #[arg(long, env = "NNSTNE_RESTARTS", default_value_t = DEFAULT_RESTARTS)]
    restarts: usize,
    #[arg(long, env = "NNSTNE_THREADS", default_value_t = 1)]
    threads: usize,
    #[arg(long, env = "NNSTNE_OUT", default_value = "report.json")]
    out: PathBuf,
    #[arg(long, env = "NNSTNE_MANIFEST")]
    manifest: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ExportArgs {
    #[arg(long, env = "NNSTNE_MODEL")]
    model: PathBuf,
    #[arg(long, env = "NNSTNE_WHAT", value_enum)]
    what: WhatArg,
    /// Dataset to transform; required for `--what features`.
    #[arg(long, env = "NNSTNE_DATA")]
    data: Option<PathBuf>,
    #[arg(long, env = "NNSTNE_TEST")]
    test: Option<PathBuf>,
    #[arg(long, env = "NNSTNE_DELIMITER")]
    delimiter: Option<String>,
    #[arg(long, env = "NNSTNE_THREADS", default_value_t = 1)]
    threads: usize,
    #[arg(long, env = "NNSTNE_OUT")]
    out: PathBuf,
    #[arg(long, env = "NNSTNE_MANIFEST")]
    manifest: Option<PathBuf>,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum PreprocessArg {
    None,
    Zscore,
    Minmax,
}

impl From<PreprocessArg> for Preprocessing {
    fn from(p: PreprocessArg) -> Self {
        match p {
            PreprocessArg::None => Preprocessing::None,
            PreprocessArg::Zscore => Preprocessing::ZScore,
            PreprocessArg::Minmax => Preprocessing::MinMax,
        }
    }
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum FeaturesArg {
    Raw,
    #[value(name = "F")]
    F,
    #[value(name = "q")]
    Q,
}

impl From<FeaturesArg> for FeatureKind {
    fn from(f: FeaturesArg) -> Self {
        match f {
            FeaturesArg::Raw => FeatureKind::Raw,
            FeaturesArg::F => FeatureKind::Distances,
            FeaturesArg::Q => FeatureKind::Memberships,
        }
    }
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum WhatArg {
    Shapelets,
    Features,
    Loss,
}

/// Failure classes mapped onto process exit codes.
#[derive(Debug)]
enum Failure {
    Usage(String),
    Data(String),
    Numerical(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Data(_) => 3,
            Failure::Numerical(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Data(m) | Failure::Numerical(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Diverged { .. } => Failure::Numerical(e.to_string()),
            Error::InvalidParameter(_) => Failure::Usage(e.to_string()),
            _ => Failure::Data(e.to_string()),
        }
    }
}

type CmdResult<T = ()> = Result<T, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Train(args) => nnstne::with_threads(args.threads, || cmd_train(args)),
        Command::Evaluate(args) => nnstne::with_threads(args.threads, || cmd_evaluate(args)),
        Command::Export(args) => nnstne::with_threads(args.threads, || cmd_export(args)),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}

fn parse_delimiter(arg: Option<&str>, path: &Path) -> CmdResult<Delimiter> {
    match arg {
        Some(d) => d.parse().map_err(|e: Error| Failure::Usage(e.to_string())),
        None => {
            let text = fs::read_to_string(path)
                .map_err(|e| Failure::Data(format!("{}: {e}", path.display())))?;
            Ok(Delimiter::detect(&text))
        }
    }
}

/// Loads `--data` and optional `--test` with one delimiter (detected from
/// `--data` unless given); returns the merged set, the size of the first
/// split and the delimiter used.
fn load_splits(
    data: &Path,
    test: Option<&Path>,
    delimiter: Option<&str>,
) -> CmdResult<(TimeSeriesDataset, usize, Delimiter)> {
    let delim = parse_delimiter(delimiter, data)?;
    let first = load_ucr(data, delim)?;
    let n_first = first.n_samples();
    let merged = match test {
        Some(t) => merge(&first, &load_ucr(t, delim)?)?,
        None => first,
    };
    Ok((merged, n_first, delim))
}

fn write(path: &Path, contents: &str) -> CmdResult {
    fs::write(path, contents)
        .map_err(|e| Failure::Data(format!("cannot write {}: {e}", path.display())))
}

fn manifest_path(explicit: &Option<PathBuf>, out: &Path) -> PathBuf {
    explicit.clone().unwrap_or_else(|| {
        let mut name = out.as_os_str().to_owned();
        name.push(".manifest.json");
        PathBuf::from(name)
    })
}

fn cmd_train(args: TrainArgs) -> CmdResult {
    let started = Instant::now();
    let (dataset, n_first, delim) = load_splits(
        &args.data.data,
        args.data.test.as_deref(),
        args.data.delimiter.as_deref(),
    )?;
    let shapelet_count = match args.count.as_str() {
        "auto" => 0,
        n => n.parse().ok().filter(|&k: &usize| k > 0).ok_or_else(|| {
            Failure::Usage(format!(
                "--count must be a positive integer or auto, got {n:?}"
            ))
        })?,
    };
    let (sigma_sq, sigma_rule) = match args.sigma.as_str() {
        "auto" => (0.0, SigmaRule::Neighbors(DEFAULT_SIGMA_NEIGHBORS)),
        "median" => (0.0, SigmaRule::Median),
        s => {
            let v: f64 = s.parse().ok().filter(|v: &f64| *v > 0.0).ok_or_else(|| {
                Failure::Usage(format!(
                    "--sigma must be auto, median or a positive number, got {s:?}"
                ))
            })?;
            (v, SigmaRule::default())
        }
    };
    let config = TrainConfig {
        shapelet_length: args.length,
        shapelet_count,
        alpha: args.alpha,
        lambda: args.lambda,
        beta: args.beta,
        sigma_sq,
        sigma_rule,
        learning_rate: args.lr,
        max_iters: args.iters,
        tolerance: args.tol,
        seed: args.seed,
        preprocessing: args.preprocess.into(),
        trim_epsilon: args.trim_eps,
        backoff: !args.no_backoff,
        ..TrainConfig::default()
    };
    config.validate()?;
    let count_samples = (!args.count_from_all).then_some(n_first);
    let quiet = args.quiet;
    let mut report = |it: usize, r: &nnstne::objective::LossRecord, step: f64| {
        if !quiet && it.is_multiple_of(10) {
            eprintln!(
                "iter {it:>4}  loss {:.6}  spectral {:.6}  step {step:.3e}",
                r.total, r.spectral
            );
        }
    };
    let model = train_with(&dataset, &config, count_samples, Some(&mut report))?;
    write(&args.out, &model.to_json())?;

    let mut inputs = vec![args.data.data.clone()];
    inputs.extend(args.data.test.clone());
    let manifest_out = manifest_path(&args.manifest, &args.out);
    let resolved = json!({
        "data": args.data.data,
        "test": args.data.test,
        "delimiter": delim.to_string(),
        "length": model.config.shapelet_length,
        "count": model.config.shapelet_count,
        "count_from_all": args.count_from_all,
        "alpha": model.config.alpha,
        "lambda": model.config.lambda,
        "beta": model.config.beta,
        "sigma": model.config.sigma_sq,
        "sigma_rule": model.config.sigma_rule,
        "sigma_shapelet": model.config.sigma_shapelet_sq,
        "lr": model.config.learning_rate,
        "iters": model.config.max_iters,
        "tol": model.config.tolerance,
        "seed": model.config.seed,
        "preprocess": model.config.preprocessing,
        "trim_eps": model.config.trim_epsilon,
        "backoff": model.config.backoff,
        "threads": args.threads,
        "out": args.out,
        "iterations_run": model.loss_history.len(),
    });
    Manifest::new(
        "train",
        resolved,
        &inputs,
        vec![args.out.clone(), manifest_out.clone()],
        started,
    )
    .map_err(Failure::Data)?
    .write(&manifest_out)
    .map_err(Failure::Data)?;
    println!(
        "trained {} shapelets of length {} in {} iterations -> {}",
        model.bank.count(),
        model.config.shapelet_length,
        model.loss_history.len(),
        args.out.display()
    );
    Ok(())
}

fn load_model(path: &Path) -> CmdResult<TrainedModel> {
    let text =
        fs::read_to_string(path).map_err(|e| Failure::Data(format!("{}: {e}", path.display())))?;
    TrainedModel::from_json(&text).map_err(|e| Failure::Data(format!("{}: {e}", path.display())))
}

fn cmd_evaluate(args: EvaluateArgs) -> CmdResult {
    let started = Instant::now();
    let kind: FeatureKind = args.features.into();
    if args.restarts == 0 {
        return Err(Failure::Usage("--restarts must be at least 1".into()));
    }
    let model = match (&args.model, kind) {
        (Some(p), _) => Some(load_model(p)?),
        (None, FeatureKind::Raw) => None,
        (None, _) => {
            return Err(Failure::Usage(format!(
                "--features {kind} requires --model"
            )))
        }
    };
    let (dataset, _, delim) = load_splits(
        &args.data.data,
        args.data.test.as_deref(),
        args.data.delimiter.as_deref(),
    )?;
    let report = evaluate_pipeline(&dataset, model.as_ref(), kind, args.seed, args.restarts)?;
    write(&args.out, &report_json(&report))?;

    let mut inputs = vec![args.data.data.clone()];
    inputs.extend(args.data.test.clone());
    inputs.extend(args.model.clone());
    let manifest_out = manifest_path(&args.manifest, &args.out);
    let resolved = json!({
        "data": args.data.data,
        "test": args.data.test,
        "delimiter": delim.to_string(),
        "model": args.model,
        "features": kind,
        "seed": args.seed,
        "restarts": args.restarts,
        "threads": args.threads,
        "out": args.out,
    });
    Manifest::new(
        "evaluate",
        resolved,
        &inputs,
        vec![args.out.clone(), manifest_out.clone()],
        started,
    )
    .map_err(Failure::Data)?
    .write(&manifest_out)
    .map_err(Failure::Data)?;
    println!("RI={:.4}", report.rand_index);
    Ok(())
}

fn report_json(report: &EvalReport) -> String {
    serde_json::to_string_pretty(report).expect("report serializes")
}

fn csv_row(values: impl IntoIterator<Item = String>) -> String {
    let mut line = values.into_iter().collect::<Vec<_>>().join(",");
    line.push('\n');
    line
}

fn cmd_export(args: ExportArgs) -> CmdResult {
    let started = Instant::now();
    let model = load_model(&args.model)?;
    let mut inputs = vec![args.model.clone()];
    let mut delimiter = None;
    let csv: String = match args.what {
        WhatArg::Shapelets => model
            .bank
            .shapelets()
            .iter()
            .map(|s| csv_row(s.iter().map(|v| format!("{v:?}"))))
            .collect(),
        WhatArg::Loss => {
            let mut out = String::from("iteration,spectral,diversity,l1,total\n");
            for (i, r) in model.loss_history.iter().enumerate() {
                out.push_str(&csv_row([
                    i.to_string(),
                    format!("{:?}", r.spectral),
                    format!("{:?}", r.diversity),
                    format!("{:?}", r.l1),
                    format!("{:?}", r.total),
                ]));
            }
            out
        }
        WhatArg::Features => {
            let data = args
                .data
                .as_deref()
                .ok_or_else(|| Failure::Usage("--what features requires --data".into()))?;
            inputs.push(data.to_path_buf());
            inputs.extend(args.test.clone());
            let (dataset, _, delim) =
                load_splits(data, args.test.as_deref(), args.delimiter.as_deref())?;
            delimiter = Some(delim.to_string());
            extract_features(&dataset, Some(&model), FeatureKind::Distances)?
                .iter()
                .map(|row| csv_row(row.iter().map(|v| format!("{v:?}"))))
                .collect()
        }
    };
    write(&args.out, &csv)?;
    let manifest_out = manifest_path(&args.manifest, &args.out);
    let what = format!("{:?}", args.what).to_lowercase();
    let resolved = json!({
        "model": args.model,
        "what": what,
        "data": args.data,
        "test": args.test,
        "delimiter": delimiter,
        "threads": args.threads,
        "out": args.out,
    });
    Manifest::new(
        "export",
        resolved,
        &inputs,
        vec![args.out.clone(), manifest_out.clone()],
        started,
    )
    .map_err(Failure::Data)?
    .write(&manifest_out)
    .map_err(Failure::Data)?;
    Ok(())
}
