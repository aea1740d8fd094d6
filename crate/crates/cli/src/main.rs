use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use gbperf::buchberger::Strategy;
use gbperf::idealgen::DistSpec;
use gbperf::pipeline::*;
use gbperf::valuenet::{save_checkpoint, LrSchedule, TrainConfig};

#[derive(Parser)]
#[command(
    name = "gbperf",
    version,
    about = "Random ideals, instrumented Buchberger runs, and models of their cost"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample ideals, run Buchberger on each, and write a JSONL dataset.
    Generate {
        #[command(flatten)]
        sample: SampleArgs,
        #[arg(long, default_value = "degree")]
        strategy: Strategy,
        /// Process every pair, without Gebauer–Möller elimination.
        #[arg(long)]
        no_pair_elimination: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Mean[std] additions of all four strategies on the same samples.
    StrategyTable {
        #[command(flatten)]
        sample: SampleArgs,
        /// Further distributions, one table row each.
        #[arg(long = "also")]
        also: Vec<DistSpec>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Convert a dataset into a feature CSV.
    Featurize {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fit a linear (or uninformed) model on a 90/10 split and report holdout metrics.
    FitLinear {
        #[arg(long)]
        data: PathBuf,
        #[arg(long, default_value = "mmmsd+purepowers")]
        features: String,
        #[arg(long, value_enum, default_value = "linear")]
        model: LinearKind,
        #[command(flatten)]
        split: SplitArgs,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
    },
    /// Train the GRU regressor on a 90/10 split and report holdout metrics.
    TrainRnn {
        #[arg(long)]
        data: PathBuf,
        #[command(flatten)]
        split: SplitArgs,
        #[command(flatten)]
        net: NetArgs,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
    },
    /// Train-by-test R² grid over several datasets.
    CrossMatrix {
        #[arg(long, required = true)]
        data: Vec<PathBuf>,
        #[arg(long, value_enum, default_value = "linear")]
        model: MatrixKind,
        #[arg(long, default_value = "mmmsd")]
        features: String,
        #[command(flatten)]
        split: SplitArgs,
        #[command(flatten)]
        net: NetArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Regenerate one of the reference tables.
    Repro {
        #[arg(value_enum)]
        table: Table,
        /// Samples per distribution (defaults: 10000, or 100000 for table9).
        #[arg(long)]
        count: Option<u64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = default_workers())]
        workers: usize,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
        /// Largest variable count for table3.
        #[arg(long, default_value_t = 8)]
        max_n: usize,
        #[command(flatten)]
        net: NetArgs,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args)]
struct SampleArgs {
    /// JSON spec, `n-d-s-mode`, or `T(D,L,U,n)`.
    #[arg(long)]
    dist: DistSpec,
    #[arg(long)]
    count: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = default_workers())]
    workers: usize,
    /// Pair budget of the toric saturation run.
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    budget: u64,
}

#[derive(Args)]
struct SplitArgs {
    /// Seed of the train/test split (and the network).
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 0.9)]
    train_fraction: f64,
}

#[derive(Args)]
struct NetArgs {
    #[arg(long, default_value_t = 128)]
    hidden: usize,
    #[arg(long, default_value_t = 20)]
    epochs: usize,
    #[arg(long, default_value_t = 2e-2)]
    lr: f64,
    #[arg(long, default_value_t = 64)]
    batch: usize,
    #[arg(long, default_value_t = 1.0)]
    clip: f64,
    #[arg(long, default_value_t = 0.1)]
    validation_fraction: f64,
    #[arg(long, value_enum, default_value = "cosine")]
    schedule: Schedule,
}

#[derive(Clone, Copy, ValueEnum)]
enum Schedule {
    Constant,
    Cosine,
}

#[derive(Clone, Copy, ValueEnum)]
enum LinearKind {
    Linear,
    Uninformed,
}

#[derive(Clone, Copy, ValueEnum)]
enum MatrixKind {
    Linear,
    Uninformed,
    Rnn,
}

#[derive(Clone, Copy, ValueEnum)]
enum Table {
    Table1,
    Table3,
    Table9,
}

fn default_workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

fn experiment(
    model: ModelKind,
    features: &str,
    split: &SplitArgs,
    net: Option<&NetArgs>,
) -> ExperimentConfig {
    let mut cfg = ExperimentConfig {
        model,
        feature_set: features.to_string(),
        train_fraction: split.train_fraction,
        seed: split.seed,
        ..Default::default()
    };
    if let Some(n) = net {
        cfg.hidden = n.hidden;
        cfg.train = TrainConfig {
            learning_rate: n.lr,
            batch_size: n.batch,
            epochs: n.epochs,
            grad_clip_norm: n.clip,
            validation_fraction: n.validation_fraction,
            seed: split.seed,
            schedule: match n.schedule {
                Schedule::Constant => LrSchedule::Constant,
                Schedule::Cosine => LrSchedule::Cosine,
            },
        };
    }
    cfg
}

fn say(text: &str) {
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
}

fn write(path: &Path, text: &str) -> Result<(), PipelineError> {
    std::fs::write(path, text).map_err(|source| PipelineError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), PipelineError> {
    match out {
        Some(p) => write(p, text),
        None => {
            say(text);
            Ok(())
        }
    }
}

fn out_dir(dir: &Path) -> Result<(), PipelineError> {
    std::fs::create_dir_all(dir).map_err(|source| PipelineError::Io {
        path: dir.to_path_buf(),
        source,
    })
}

fn load(path: &Path) -> Result<Dataset, PipelineError> {
    let (header, records) = read_jsonl(path)?;
    Ok(Dataset {
        dist: header.config.dist,
        records,
    })
}

fn write_report(dir: &Path, report: &ExperimentReport) -> Result<(), PipelineError> {
    out_dir(dir)?;
    write(&dir.join("metrics.csv"), &report.metrics_csv())?;
    write(&dir.join("pairs.csv"), &report.pairs_csv())?;
    write(
        &dir.join("report.json"),
        &serde_json::to_string_pretty(report).expect("report serializes"),
    )?;
    if let Some(m) = &report.linear {
        write(&dir.join("coefficients.csv"), &coefficients_csv(m))?;
    }
    if let Some((m, _)) = &report.pruned {
        write(&dir.join("coefficients_pruned.csv"), &coefficients_csv(m))?;
    }
    if !report.curve.is_empty() {
        let mut csv = String::from("epoch,train_loss,val_loss\n");
        for e in &report.curve {
            csv.push_str(&format!("{},{},{}\n", e.epoch, e.train_loss, e.val_loss));
        }
        write(&dir.join("curve.csv"), &csv)?;
    }
    say(&report.metrics_csv());
    Ok(())
}

fn generate_to(
    cfg: GenerateConfig,
    out: &Path,
) -> Result<(Summary, Vec<SampleRecord>), PipelineError> {
    let records = generate(&cfg)?;
    let summary = summarize(&cfg.dist, &records);
    let header = DatasetHeader {
        schema_version: SCHEMA_VERSION,
        prng: PRNG.into(),
        config: cfg,
    };
    write_jsonl(out, &header, &records)?;
    Ok((summary, records))
}

fn run(cli: Cli) -> Result<(), PipelineError> {
    match cli.command {
        Command::Generate {
            sample,
            strategy,
            no_pair_elimination,
            out,
        } => {
            let cfg = GenerateConfig {
                strategy,
                pair_elimination: !no_pair_elimination,
                budget: sample.budget,
                workers: sample.workers,
                ..GenerateConfig::new(sample.dist, sample.count, sample.seed)
            };
            let (summary, _) = generate_to(cfg, &out)?;
            say(&format!(
                "{}\n",
                serde_json::to_string_pretty(&summary).expect("summary serializes")
            ));
        }
        Command::StrategyTable { sample, also, out } => {
            let mut rows = Vec::new();
            for dist in std::iter::once(sample.dist).chain(also) {
                rows.push(strategy_table(
                    &dist,
                    sample.count,
                    sample.seed,
                    sample.workers,
                    sample.budget,
                )?);
            }
            emit(out.as_deref(), &strategy_csv(&rows))?;
        }
        Command::Featurize { data, out } => {
            let (_, records) = read_jsonl(&data)?;
            emit(out.as_deref(), &features_csv(&records))?;
        }
        Command::FitLinear {
            data,
            features,
            model,
            split,
            out,
        } => {
            let d = load(&data)?;
            let kind = match model {
                LinearKind::Linear => ModelKind::Linear,
                LinearKind::Uninformed => ModelKind::Uninformed,
            };
            let report = run_experiment(
                &d.dist,
                &d.records,
                &experiment(kind, &features, &split, None),
            )?;
            write_report(&out, &report)?;
        }
        Command::TrainRnn {
            data,
            split,
            net,
            out,
        } => {
            let d = load(&data)?;
            let cfg = experiment(ModelKind::Rnn, "", &split, Some(&net));
            let (report, trained) = run_experiment_with_net(&d.dist, &d.records, &cfg)?;
            write_report(&out, &report)?;
            let trained = trained.expect("rnn experiments return the network");
            save_checkpoint(&out.join("model.ckpt"), &trained.header, &trained.params)?;
        }
        Command::CrossMatrix {
            data,
            model,
            features,
            split,
            net,
            out,
        } => {
            let sets = data
                .iter()
                .map(|p| load(p))
                .collect::<Result<Vec<_>, _>>()?;
            let kind = match model {
                MatrixKind::Linear => ModelKind::Linear,
                MatrixKind::Uninformed => ModelKind::Uninformed,
                MatrixKind::Rnn => ModelKind::Rnn,
            };
            let grid = cross_matrix(&sets, &experiment(kind, &features, &split, Some(&net)))?;
            emit(out.as_deref(), &grid.to_csv())?;
        }
        Command::Repro {
            table,
            count,
            seed,
            workers,
            budget,
            max_n,
            net,
            out,
        } => {
            out_dir(&out)?;
            match table {
                Table::Table1 => {
                    let mut summaries = Vec::new();
                    for spec in [
                        "3-20-4-weighted",
                        "3-20-4-uniform",
                        "3-20-10-weighted",
                        "3-20-10-uniform",
                    ] {
                        let dist: DistSpec =
                            spec.parse().map_err(|e: gbperf::idealgen::IdealError| {
                                PipelineError::Config(e.to_string())
                            })?;
                        let cfg = GenerateConfig {
                            workers,
                            budget,
                            ..GenerateConfig::new(dist, count.unwrap_or(10_000), seed)
                        };
                        let (summary, _) = generate_to(cfg, &out.join(format!("{spec}.jsonl")))?;
                        summaries.push(summary);
                    }
                    let csv = dimension_table(&summaries);
                    write(&out.join("table1.csv"), &csv)?;
                    say(&csv);
                }
                Table::Table3 => {
                    let mut rows = Vec::new();
                    for n in 2..=max_n {
                        let dist: DistSpec = format!("{n}-5-10-weighted").parse().map_err(
                            |e: gbperf::idealgen::IdealError| PipelineError::Config(e.to_string()),
                        )?;
                        rows.push(strategy_table(
                            &dist,
                            count.unwrap_or(10_000),
                            seed,
                            workers,
                            budget,
                        )?);
                    }
                    let csv = strategy_csv(&rows);
                    write(&out.join("table3.csv"), &csv)?;
                    say(&csv);
                }
                Table::Table9 => {
                    let dist: DistSpec =
                        "3-20-10-weighted"
                            .parse()
                            .map_err(|e: gbperf::idealgen::IdealError| {
                                PipelineError::Config(e.to_string())
                            })?;
                    let cfg = GenerateConfig {
                        workers,
                        budget,
                        ..GenerateConfig::new(dist, count.unwrap_or(100_000), seed)
                    };
                    let (_, records) = generate_to(cfg, &out.join("3-20-10-weighted.jsonl"))?;
                    let split = SplitArgs {
                        seed,
                        train_fraction: 0.9,
                    };
                    let mut csv = String::from("model,mse,mae,r2\n");
                    for (name, kind) in [
                        ("uninformed", ModelKind::Uninformed),
                        ("linear", ModelKind::Linear),
                        ("rnn", ModelKind::Rnn),
                    ] {
                        let report = run_experiment(
                            &dist,
                            &records,
                            &experiment(kind, "mmmsd+purepowers", &split, Some(&net)),
                        )?;
                        csv.push_str(&format!(
                            "{name},{:.2},{:.2},{:.4}\n",
                            report.metrics.mse, report.metrics.mae, report.metrics.r2
                        ));
                        let dir = out.join(name);
                        out_dir(&dir)?;
                        write(&dir.join("pairs.csv"), &report.pairs_csv())?;
                    }
                    write(&out.join("table9.csv"), &csv)?;
                    say(&csv);
                }
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
