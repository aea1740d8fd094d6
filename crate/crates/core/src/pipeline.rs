//! Dataset generation, storage and the experiments built on top of it.
//!
//! A dataset is a JSONL file: one header line describing how it was made,
//! then one [`SampleRecord`] per line in id order. Sample `id` draws from a
//! generator seeded with `mix(seed, id)`, so records do not depend on how
//! the work was split across threads.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::buchberger::{run_with, GbError, RunConfig, RunStats, Strategy};
use crate::idealgen::{
    minimal_generators, sample_toric_matrix, toric_ideal, toric_membership_ok, BinomialSampler,
    DistSpec, IdealError,
};
use crate::invariants::{featurize, FeatureVector};
use crate::poly::{MonomialOrder, Polynomial};
use crate::regress::{
    cross_eval, feature_set, fit_pruned, metrics, ols_fit, split_indices, DesignMatrix,
    EvalMetrics, LabeledData, LinearModel, RegressError, TrainingMeta,
};
use crate::rng::{mix, seeded};
use crate::valuenet::{
    encode_generators, evaluate_net, train, CheckpointHeader, GruConfig, GruParams, LrSchedule,
    NetError, SeqSample, TrainConfig,
};

pub const SCHEMA_VERSION: u32 = 1;
/// Pairs the toric saturation run may process before the sample is
/// recorded as a timeout.
pub const DEFAULT_BUDGET: u64 = 20_000;
pub const PRNG: &str = "xoshiro256++, per-sample seed splitmix64(seed ^ splitmix64(id))";

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("data error: {0}")]
    Data(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl PipelineError {
    /// Process exit code: 1 for configuration errors, 2 for data errors.
    pub fn exit_code(&self) -> i32 {
        match self {
            PipelineError::Config(_) => 1,
            PipelineError::Data(_) | PipelineError::Io { .. } => 2,
        }
    }
}

impl From<RegressError> for PipelineError {
    fn from(e: RegressError) -> Self {
        match e {
            RegressError::UnknownFeatureSet(_) | RegressError::FeatureMismatch { .. } => {
                PipelineError::Config(e.to_string())
            }
            _ => PipelineError::Data(e.to_string()),
        }
    }
}

impl From<NetError> for PipelineError {
    fn from(e: NetError) -> Self {
        match e {
            NetError::InvalidConfig(_) | NetError::FeatureMismatch { .. } => {
                PipelineError::Config(e.to_string())
            }
            _ => PipelineError::Data(e.to_string()),
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> PipelineError + '_ {
    move |source| PipelineError::Io {
        path: path.to_path_buf(),
        source,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermRecord {
    pub coeff: u32,
    pub exps: Vec<u32>,
}

pub fn poly_to_record(p: &Polynomial) -> Vec<TermRecord> {
    p.terms()
        .iter()
        .map(|t| TermRecord {
            coeff: t.coeff.value(),
            exps: t.mono.exps().iter().map(|&e| u32::from(e)).collect(),
        })
        .collect()
}

pub fn record_to_poly(terms: &[TermRecord], nvars: usize) -> Result<Polynomial, PipelineError> {
    Polynomial::from_terms(
        nvars,
        MonomialOrder::Grevlex,
        terms.iter().map(|t| (t.coeff as i64, t.exps.clone())),
    )
    .map_err(|e| PipelineError::Data(e.to_string()))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleRecord {
    pub id: u64,
    pub seed: u64,
    pub dist: DistSpec,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub matrix: Option<Vec<Vec<i64>>>,
    pub generators: Vec<Vec<TermRecord>>,
    pub strategy: Strategy,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub stats: Option<RunStats>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub features: Option<FeatureVector>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub error: Option<String>,
}

impl SampleRecord {
    pub fn polynomials(&self) -> Result<Vec<Polynomial>, PipelineError> {
        self.generators
            .iter()
            .map(|g| record_to_poly(g, self.dist.nvars()))
            .collect()
    }

    pub fn additions(&self) -> Option<u64> {
        self.stats.as_ref().map(|s| s.polynomial_additions)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenerateConfig {
    pub dist: DistSpec,
    pub count: u64,
    pub seed: u64,
    pub strategy: Strategy,
    pub pair_elimination: bool,
    /// Pair budget of the toric saturation run.
    pub budget: u64,
    #[serde(skip)]
    pub workers: usize,
}

impl GenerateConfig {
    pub fn new(dist: DistSpec, count: u64, seed: u64) -> Self {
        GenerateConfig {
            dist,
            count,
            seed,
            strategy: Strategy::Degree,
            pair_elimination: true,
            budget: DEFAULT_BUDGET,
            workers: 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DatasetHeader {
    pub schema_version: u32,
    pub prng: String,
    pub config: GenerateConfig,
}

/// The ideal drawn for one id: its generators, plus the matrix for toric
/// samples. Errors are reported as strings to be stored in-band.
fn draw(
    dist: &DistSpec,
    sampler: Option<&BinomialSampler>,
    seed: u64,
    budget: u64,
) -> (Option<Vec<Vec<i64>>>, Result<Vec<Polynomial>, String>) {
    let mut rng = seeded(seed);
    match dist {
        DistSpec::Binomial(_) => (
            None,
            Ok(sampler.expect("binomial sampler").sample(&mut rng)),
        ),
        DistSpec::Toric(t) => {
            let a = match sample_toric_matrix(t, &mut rng) {
                Ok(a) => a,
                Err(e) => return (None, Err(e.to_string())),
            };
            let gens = match toric_ideal(&a, Some(budget)) {
                Ok(gb) => minimal_generators(&gb, &a.column_weights()),
                Err(IdealError::Gb(GbError::BudgetExceeded { .. })) => {
                    return (Some(a.entries), Err("timeout".into()))
                }
                Err(IdealError::Overflow) => return (Some(a.entries), Err("overflow".into())),
                Err(e) => return (Some(a.entries), Err(e.to_string())),
            };
            if !toric_membership_ok(&a, &gens) {
                return (Some(a.entries), Err("membership check failed".into()));
            }
            (Some(a.entries), Ok(gens))
        }
    }
}

fn sampler_for(dist: &DistSpec) -> Result<Option<BinomialSampler>, PipelineError> {
    dist.validate()
        .map_err(|e| PipelineError::Config(e.to_string()))?;
    match dist {
        DistSpec::Binomial(b) => Ok(Some(
            BinomialSampler::new(*b).map_err(|e| PipelineError::Config(e.to_string()))?,
        )),
        DistSpec::Toric(_) => Ok(None),
    }
}

fn with_pool<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> Result<T, PipelineError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| PipelineError::Config(e.to_string()))?;
    Ok(pool.install(f))
}

fn sample_record(cfg: &GenerateConfig, sampler: Option<&BinomialSampler>, id: u64) -> SampleRecord {
    let seed = mix(cfg.seed, id);
    let (matrix, drawn) = draw(&cfg.dist, sampler, seed, cfg.budget);
    let mut rec = SampleRecord {
        id,
        seed,
        dist: cfg.dist,
        matrix,
        generators: Vec::new(),
        strategy: cfg.strategy,
        stats: None,
        features: None,
        error: None,
    };
    let gens = match drawn {
        Ok(g) => g,
        Err(e) => {
            rec.error = Some(e);
            return rec;
        }
    };
    rec.generators = gens.iter().map(poly_to_record).collect();
    let run_cfg = RunConfig {
        pair_elimination: cfg.pair_elimination,
        ..RunConfig::new(cfg.strategy, MonomialOrder::Grevlex)
    };
    match run_with(&gens, &run_cfg) {
        Ok((gb, stats)) => {
            rec.features = featurize(&gens, Some(&gb), MonomialOrder::Grevlex).ok();
            rec.stats = Some(stats);
        }
        Err(e) => rec.error = Some(e.to_string()),
    }
    rec
}

/// Draws and measures `cfg.count` samples, in id order.
pub fn generate(cfg: &GenerateConfig) -> Result<Vec<SampleRecord>, PipelineError> {
    let sampler = sampler_for(&cfg.dist)?;
    with_pool(cfg.workers, || {
        (0..cfg.count)
            .into_par_iter()
            .map(|id| sample_record(cfg, sampler.as_ref(), id))
            .collect()
    })
}

pub fn write_jsonl(
    path: &Path,
    header: &DatasetHeader,
    records: &[SampleRecord],
) -> Result<(), PipelineError> {
    let file = File::create(path).map_err(io_err(path))?;
    let mut out = BufWriter::new(file);
    let mut line = |v: String| writeln!(out, "{v}").map_err(io_err(path));
    line(serde_json::to_string(header).expect("header serializes"))?;
    for r in records {
        line(serde_json::to_string(r).expect("record serializes"))?;
    }
    out.flush().map_err(io_err(path))
}

pub fn read_jsonl(path: &Path) -> Result<(DatasetHeader, Vec<SampleRecord>), PipelineError> {
    let file = File::open(path).map_err(io_err(path))?;
    let mut lines = BufReader::new(file).lines();
    let bad = |n: usize, e: &dyn std::fmt::Display| {
        PipelineError::Data(format!("{}:{n}: {e}", path.display()))
    };
    let first = lines
        .next()
        .ok_or_else(|| bad(1, &"missing header"))?
        .map_err(io_err(path))?;
    let header: DatasetHeader = serde_json::from_str(&first).map_err(|e| bad(1, &e))?;
    if header.schema_version != SCHEMA_VERSION {
        return Err(bad(
            1,
            &format!("unsupported schema version {}", header.schema_version),
        ));
    }
    let mut records = Vec::new();
    for (k, line) in lines.enumerate() {
        let line = line.map_err(io_err(path))?;
        if line.trim().is_empty() {
            continue;
        }
        records.push(serde_json::from_str(&line).map_err(|e| bad(k + 2, &e))?);
    }
    Ok((header, records))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub dist: String,
    pub rows: usize,
    pub measured: usize,
    pub excluded: usize,
    pub errors: BTreeMap<String, usize>,
    pub additions_mean: f64,
    pub additions_std: f64,
    /// Krull dimension to sample count; -1 is the unit ideal.
    pub dimensions: BTreeMap<i32, usize>,
}

fn mean_std(v: &[f64]) -> (f64, f64) {
    if v.is_empty() {
        return (0.0, 0.0);
    }
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    (
        mean,
        (v.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n).sqrt(),
    )
}

pub fn summarize(dist: &DistSpec, records: &[SampleRecord]) -> Summary {
    let mut errors = BTreeMap::new();
    let mut dimensions = BTreeMap::new();
    let mut adds = Vec::new();
    for r in records {
        if let Some(e) = &r.error {
            *errors.entry(e.clone()).or_insert(0) += 1;
            continue;
        }
        if let Some(a) = r.additions() {
            adds.push(a as f64);
        }
        if let Some(f) = &r.features {
            *dimensions.entry(f.dimension).or_insert(0) += 1;
        }
    }
    let (additions_mean, additions_std) = mean_std(&adds);
    let excluded = errors.values().sum();
    Summary {
        dist: dist.to_string(),
        rows: records.len(),
        measured: adds.len(),
        excluded,
        errors,
        additions_mean,
        additions_std,
        dimensions,
    }
}

/// Mean and population standard deviation of additions per strategy, all
/// strategies run on the same sampled ideals.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StrategyRow {
    pub dist: String,
    pub samples: usize,
    pub excluded: usize,
    pub mean: [f64; 4],
    pub std: [f64; 4],
}

pub fn strategy_table(
    dist: &DistSpec,
    count: u64,
    seed: u64,
    workers: usize,
    budget: u64,
) -> Result<StrategyRow, PipelineError> {
    let sampler = sampler_for(dist)?;
    let per_id: Vec<Option<[f64; 4]>> = with_pool(workers, || {
        (0..count)
            .into_par_iter()
            .map(|id| {
                let gens = draw(dist, sampler.as_ref(), mix(seed, id), budget).1.ok()?;
                let mut out = [0.0; 4];
                for (slot, s) in out.iter_mut().zip(Strategy::ALL) {
                    let (_, stats) =
                        run_with(&gens, &RunConfig::new(s, MonomialOrder::Grevlex)).ok()?;
                    *slot = stats.polynomial_additions as f64;
                }
                Some(out)
            })
            .collect()
    })?;
    let ok: Vec<[f64; 4]> = per_id.iter().flatten().copied().collect();
    let mut row = StrategyRow {
        dist: dist.to_string(),
        samples: ok.len(),
        excluded: per_id.len() - ok.len(),
        mean: [0.0; 4],
        std: [0.0; 4],
    };
    for k in 0..4 {
        let col: Vec<f64> = ok.iter().map(|r| r[k]).collect();
        (row.mean[k], row.std[k]) = mean_std(&col);
    }
    Ok(row)
}

pub fn strategy_csv(rows: &[StrategyRow]) -> String {
    let mut out = String::from("dist,samples,excluded");
    for s in Strategy::ALL {
        out.push_str(&format!(",{}", s.name()));
    }
    out.push('\n');
    for r in rows {
        out.push_str(&format!("{},{},{}", r.dist, r.samples, r.excluded));
        for k in 0..4 {
            out.push_str(&format!(",{:.2}[{:.2}]", r.mean[k], r.std[k]));
        }
        out.push('\n');
    }
    out
}

/// One row per measured record: id, additions, then every feature.
pub fn features_csv(records: &[SampleRecord]) -> String {
    let mut out = String::from("id,additions");
    for n in FeatureVector::NAMES {
        out.push(',');
        out.push_str(n);
    }
    out.push('\n');
    for r in records {
        let (Some(a), Some(f)) = (r.additions(), &r.features) else {
            continue;
        };
        out.push_str(&format!("{},{a}", r.id));
        for n in FeatureVector::NAMES {
            out.push_str(&format!(",{}", f.get(n).expect("known feature")));
        }
        out.push('\n');
    }
    out
}

fn measured(records: &[SampleRecord]) -> Vec<&SampleRecord> {
    records
        .iter()
        .filter(|r| r.error.is_none() && r.stats.is_some() && r.features.is_some())
        .collect()
}

/// Predictors of `set` and additions for every measured record. Toric data
/// has no pure-power predictor.
pub fn labeled_data(
    name: &str,
    dist: &DistSpec,
    records: &[SampleRecord],
    set: &str,
) -> Result<LabeledData<f64>, PipelineError> {
    labeled_rows(name, dist, &measured(records), set)
}

fn labeled_rows(
    name: &str,
    dist: &DistSpec,
    rows: &[&SampleRecord],
    set: &str,
) -> Result<LabeledData<f64>, PipelineError> {
    let cols = feature_set(set)?;
    if dist.is_toric() && cols.iter().any(|c| c == "pure_powers") {
        let available = FeatureVector::NAMES
            .iter()
            .filter(|&&n| n != "pure_powers")
            .map(|n| n.to_string())
            .collect();
        return Err(RegressError::FeatureMismatch {
            expected: cols,
            found: available,
        }
        .into());
    }
    let mut data = Vec::with_capacity(rows.len() * cols.len());
    let mut y = Vec::with_capacity(rows.len());
    for r in rows.iter() {
        let f = r.features.as_ref().unwrap();
        for c in &cols {
            data.push(f.get(c).expect("registry names are features"));
        }
        y.push(r.additions().unwrap() as f64);
    }
    let x = if cols.is_empty() {
        DesignMatrix::intercept_only(y.len())
    } else {
        DesignMatrix::new(cols, data)?
    };
    Ok(LabeledData {
        name: name.to_string(),
        x,
        y,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Uninformed,
    Linear,
    Rnn,
}

impl std::str::FromStr for ModelKind {
    type Err = PipelineError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "uninformed" => Ok(ModelKind::Uninformed),
            "linear" => Ok(ModelKind::Linear),
            "rnn" => Ok(ModelKind::Rnn),
            _ => Err(PipelineError::Config(format!("unknown model kind {s:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub model: ModelKind,
    pub feature_set: String,
    pub train_fraction: f64,
    pub seed: u64,
    pub hidden: usize,
    pub train: TrainConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            model: ModelKind::Linear,
            feature_set: "mmmsd+purepowers".into(),
            train_fraction: 0.9,
            seed: 0,
            hidden: 128,
            train: TrainConfig {
                learning_rate: 2e-2,
                schedule: LrSchedule::Cosine,
                ..TrainConfig::default()
            },
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(), PipelineError> {
        if !(self.train_fraction > 0.5 && self.train_fraction < 1.0) {
            return Err(PipelineError::Config(format!(
                "split fraction {} outside (0.5, 1)",
                self.train_fraction
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub dist: String,
    pub model: ModelKind,
    pub feature_set: Option<String>,
    pub n_train: usize,
    pub n_test: usize,
    pub train_mean: f64,
    pub metrics: EvalMetrics<f64>,
    /// Linear only: the fitted model and, when predictors were dropped for
    /// p > 0.01, the refit and its holdout metrics.
    pub linear: Option<LinearModel<f64>>,
    pub pruned: Option<(LinearModel<f64>, EvalMetrics<f64>)>,
    /// Epoch losses of the network, when one was trained.
    pub curve: Vec<crate::valuenet::EpochLog>,
    /// `(predicted, actual)` on the holdout set.
    pub pairs: Vec<(f64, f64)>,
}

impl ExperimentReport {
    pub fn metrics_csv(&self) -> String {
        format!(
            "dist,model,features,n_train,n_test,train_mean,mse,mae,r2\n{},{},{},{},{},{:.4},{:.4},{:.4},{:.6}\n",
            self.dist,
            serde_json::to_value(self.model).unwrap().as_str().unwrap(),
            self.feature_set.as_deref().unwrap_or("-"),
            self.n_train,
            self.n_test,
            self.train_mean,
            self.metrics.mse,
            self.metrics.mae,
            self.metrics.r2
        )
    }

    pub fn pairs_csv(&self) -> String {
        let mut out = String::from("predicted,actual\n");
        for (p, a) in &self.pairs {
            out.push_str(&format!("{p},{a}\n"));
        }
        out
    }
}

/// Scale applied to exponents before they enter the network: `1/d` for
/// binomial data, one over the largest generator degree otherwise.
pub fn input_scale(dist: &DistSpec, records: &[&SampleRecord]) -> Result<f64, PipelineError> {
    let d = match dist {
        DistSpec::Binomial(b) => b.d,
        DistSpec::Toric(_) => records
            .iter()
            .filter_map(|r| r.features.map(|f| f.max_deg))
            .max()
            .unwrap_or(1),
    };
    Ok(1.0 / d.max(1) as f64)
}

pub fn sequences(
    records: &[&SampleRecord],
    scale: f64,
) -> Result<Vec<SeqSample<f64>>, PipelineError> {
    records
        .iter()
        .map(|r| {
            Ok(SeqSample {
                x: encode_generators(&r.polynomials()?, scale),
                target: r.additions().unwrap() as f64,
            })
        })
        .collect()
}

pub fn input_dim(dist: &DistSpec) -> usize {
    2 * dist.nvars()
}

/// A trained network together with the metadata needed to apply it.
pub struct TrainedNet {
    pub params: GruParams<f64>,
    pub header: CheckpointHeader,
    pub curve: Vec<crate::valuenet::EpochLog>,
}

pub fn train_net(
    dist: &DistSpec,
    train_rows: &[&SampleRecord],
    cfg: &ExperimentConfig,
) -> Result<TrainedNet, PipelineError> {
    let scale = input_scale(dist, train_rows)?;
    let data = sequences(train_rows, scale)?;
    let seq_len = match dist {
        DistSpec::Binomial(b) => b.s,
        DistSpec::Toric(_) => train_rows
            .iter()
            .map(|r| r.generators.len())
            .max()
            .unwrap_or(1)
            .max(1),
    };
    let gru = GruConfig {
        input_dim: input_dim(dist),
        hidden: cfg.hidden,
        sequence_len: seq_len,
        seed: cfg.seed,
    };
    let trained = train(&data, &gru, &cfg.train)?;
    let mut header = CheckpointHeader::new(gru, scale);
    header.train = Some(cfg.train.clone());
    header.dist = Some(dist.to_string());
    Ok(TrainedNet {
        params: trained.params,
        header,
        curve: trained.curve,
    })
}

fn split_rows<'a>(
    records: &'a [SampleRecord],
    cfg: &ExperimentConfig,
) -> (Vec<&'a SampleRecord>, Vec<&'a SampleRecord>) {
    let rows = measured(records);
    let (tr, te) = split_indices(rows.len(), cfg.train_fraction, cfg.seed);
    (
        tr.iter().map(|&k| rows[k]).collect(),
        te.iter().map(|&k| rows[k]).collect(),
    )
}

/// Trains on `train_fraction` of the measured records and reports holdout
/// metrics.
pub fn run_experiment(
    dist: &DistSpec,
    records: &[SampleRecord],
    cfg: &ExperimentConfig,
) -> Result<ExperimentReport, PipelineError> {
    run_experiment_with_net(dist, records, cfg).map(|(report, _)| report)
}

/// As [`run_experiment`], also returning the trained network for `Rnn`.
pub fn run_experiment_with_net(
    dist: &DistSpec,
    records: &[SampleRecord],
    cfg: &ExperimentConfig,
) -> Result<(ExperimentReport, Option<TrainedNet>), PipelineError> {
    cfg.validate()?;
    let mut network = None;
    let (train_rows, test_rows) = split_rows(records, cfg);
    if train_rows.len() < 2 || test_rows.is_empty() {
        return Err(PipelineError::Data(format!(
            "{} measured records are too few to split",
            train_rows.len() + test_rows.len()
        )));
    }
    let train_y: Vec<f64> = train_rows
        .iter()
        .map(|r| r.additions().unwrap() as f64)
        .collect();
    let test_y: Vec<f64> = test_rows
        .iter()
        .map(|r| r.additions().unwrap() as f64)
        .collect();
    let train_mean = train_y.iter().sum::<f64>() / train_y.len() as f64;
    let mut report = ExperimentReport {
        dist: dist.to_string(),
        model: cfg.model,
        feature_set: None,
        n_train: train_rows.len(),
        n_test: test_rows.len(),
        train_mean,
        metrics: EvalMetrics {
            mse: 0.0,
            mae: 0.0,
            r2: 0.0,
        },
        linear: None,
        pruned: None,
        curve: Vec::new(),
        pairs: Vec::new(),
    };
    let predicted = match cfg.model {
        ModelKind::Uninformed => vec![train_mean; test_y.len()],
        ModelKind::Linear => {
            let tr = labeled_rows("train", dist, &train_rows, &cfg.feature_set)?;
            let te = labeled_rows("test", dist, &test_rows, &cfg.feature_set)?;
            let (mut full, pruned) = fit_pruned(&tr.x, &tr.y, 0.01)?;
            let meta = TrainingMeta {
                dist: dist.to_string(),
                n: tr.y.len(),
                feature_set: cfg.feature_set.clone(),
            };
            full.training_meta = meta.clone();
            let predicted = full.predict(&te.x)?;
            if let Some(mut reduced) = pruned {
                reduced.training_meta = meta;
                let x = te.x.select_columns(&reduced.feature_names)?;
                let m = metrics(&reduced.predict(&x)?, &te.y)?;
                report.pruned = Some((reduced, m));
            }
            report.feature_set = Some(cfg.feature_set.clone());
            report.linear = Some(full);
            predicted
        }
        ModelKind::Rnn => {
            let net = train_net(dist, &train_rows, cfg)?;
            let test = sequences(&test_rows, net.header.input_scale)?;
            let (_, predicted) = evaluate_net(&net.params, &test, input_dim(dist))?;
            report.curve = net.curve.clone();
            network = Some(net);
            predicted
        }
    };
    report.metrics = metrics(&predicted, &test_y)?;
    report.pairs = predicted.into_iter().zip(test_y).collect();
    Ok((report, network))
}

/// Fits an ordinary least squares model on all measured records.
pub fn fit_linear(
    dist: &DistSpec,
    records: &[SampleRecord],
    set: &str,
) -> Result<LinearModel<f64>, PipelineError> {
    let data = labeled_data(&dist.to_string(), dist, records, set)?;
    let mut model = ols_fit(&data.x, &data.y)?;
    model.training_meta = TrainingMeta {
        dist: dist.to_string(),
        n: data.y.len(),
        feature_set: set.to_string(),
    };
    Ok(model)
}

pub fn coefficients_csv(model: &LinearModel<f64>) -> String {
    let mut out = String::from("term,coefficient,std_error,p_value\n");
    let names = model
        .feature_names
        .iter()
        .map(String::as_str)
        .chain(["intercept"]);
    for (k, n) in names.enumerate() {
        out.push_str(&format!(
            "{n},{},{},{}\n",
            model.coefficients[k], model.std_errors[k], model.p_values[k]
        ));
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Cell {
    R2(f64),
    Incompatible(String),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrossMatrix {
    pub model: ModelKind,
    pub names: Vec<String>,
    pub cells: Vec<Vec<Cell>>,
}

impl CrossMatrix {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("train\\test");
        for n in &self.names {
            out.push_str(&format!(",{n}"));
        }
        out.push('\n');
        for (n, row) in self.names.iter().zip(&self.cells) {
            out.push_str(n);
            for c in row {
                match c {
                    Cell::R2(v) => out.push_str(&format!(",{v:.6}")),
                    Cell::Incompatible(s) => out.push_str(&format!(",{s}")),
                }
            }
            out.push('\n');
        }
        out
    }
}

/// A named dataset for cross-distribution evaluation.
pub struct Dataset {
    pub dist: DistSpec,
    pub records: Vec<SampleRecord>,
}

/// Train-by-test R² grid. Diagonal cells use the holdout split, the
/// others the full test dataset. Networks only apply to datasets with the
/// same input width; other cells are marked incompatible.
pub fn cross_matrix(
    datasets: &[Dataset],
    cfg: &ExperimentConfig,
) -> Result<CrossMatrix, PipelineError> {
    cfg.validate()?;
    let names: Vec<String> = datasets.iter().map(|d| d.dist.to_string()).collect();
    let cells = match cfg.model {
        ModelKind::Linear | ModelKind::Uninformed => {
            let set = if cfg.model == ModelKind::Linear {
                cfg.feature_set.clone()
            } else {
                String::new()
            };
            let data = datasets
                .iter()
                .map(|d| {
                    if set.is_empty() {
                        let y: Vec<f64> = measured(&d.records)
                            .iter()
                            .map(|r| r.additions().unwrap() as f64)
                            .collect();
                        Ok(LabeledData {
                            name: d.dist.to_string(),
                            x: DesignMatrix::intercept_only(y.len()),
                            y,
                        })
                    } else {
                        labeled_data(&d.dist.to_string(), &d.dist, &d.records, &set)
                    }
                })
                .collect::<Result<Vec<_>, PipelineError>>()?;
            let grid = cross_eval(&data, &data, cfg.train_fraction, cfg.seed)?;
            grid.values
                .into_iter()
                .map(|row| row.into_iter().map(Cell::R2).collect())
                .collect()
        }
        ModelKind::Rnn => {
            let mut cells = Vec::new();
            for d in datasets {
                let (train_rows, holdout) = split_rows(&d.records, cfg);
                let net = train_net(&d.dist, &train_rows, cfg)?;
                let mut row = Vec::new();
                for t in datasets {
                    if input_dim(&t.dist) != net.header.config.input_dim {
                        row.push(Cell::Incompatible("incompatible".into()));
                        continue;
                    }
                    let rows = if t.dist == d.dist {
                        holdout.clone()
                    } else {
                        measured(&t.records)
                    };
                    let test = sequences(&rows, net.header.input_scale)?;
                    let (m, _) = evaluate_net(&net.params, &test, input_dim(&t.dist))?;
                    row.push(Cell::R2(m.r2));
                }
                cells.push(row);
            }
            cells
        }
    };
    Ok(CrossMatrix {
        model: cfg.model,
        names,
        cells,
    })
}

/// Zero-dimensional and other dimension counts for several distributions,
/// as a CSV with one row per dimension.
pub fn dimension_table(summaries: &[Summary]) -> String {
    let dims: std::collections::BTreeSet<i32> = summaries
        .iter()
        .flat_map(|s| s.dimensions.keys().copied())
        .collect();
    let mut out = String::from("dim");
    for s in summaries {
        out.push_str(&format!(",{}", s.dist));
    }
    out.push('\n');
    for d in dims {
        out.push_str(&d.to_string());
        for s in summaries {
            out.push_str(&format!(",{}", s.dimensions.get(&d).copied().unwrap_or(0)));
        }
        out.push('\n');
    }
    out
}
