//! GRU sequence regressor over generator exponent matrices.
//!
//! The cell is the reset-after variant with separate input and recurrent
//! biases:
//!
//! ```text
//! z = σ(W_z x + b_z^x + U_z h + b_z^h)
//! r = σ(W_r x + b_r^x + U_r h + b_r^h)
//! n = tanh(W_n x + b_n^x + r ⊙ (U_n h + b_n^h))
//! h' = (1 - z) ⊙ n + z ⊙ h
//! ```
//!
//! followed by a dense layer `w_out · h_T + b_out`. Parameters live in one
//! flat vector in the order `W_z, W_r, W_n, U_z, U_r, U_n, b_z^x, b_r^x,
//! b_n^x, b_z^h, b_r^h, b_n^h, w_out, b_out`, each matrix row-major.

use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::poly::Polynomial;
use crate::regress::{metrics, EvalMetrics, RegressError};
use crate::rng::{mix, seeded};
use crate::scalar::Scalar;

pub const CHECKPOINT_FORMAT: &str = "gbperf-gru";
pub const CHECKPOINT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum NetError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("input length {found} is not a whole number of {input_dim}-wide rows")]
    Shape { input_dim: usize, found: usize },
    #[error("model expects {expected}-wide inputs, data has {found}")]
    FeatureMismatch { expected: usize, found: usize },
    #[error("non-finite loss at epoch {epoch}, batch {batch}")]
    Divergence { epoch: usize, batch: usize },
    #[error("empty dataset")]
    EmptyData,
    #[error(transparent)]
    Metrics(#[from] RegressError),
    #[error("checkpoint: {0}")]
    Checkpoint(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GruConfig {
    pub input_dim: usize,
    pub hidden: usize,
    pub sequence_len: usize,
    pub seed: u64,
}

impl GruConfig {
    pub fn new(input_dim: usize, sequence_len: usize, seed: u64) -> Self {
        GruConfig {
            input_dim,
            hidden: 128,
            sequence_len,
            seed,
        }
    }

    pub fn validate(&self) -> Result<(), NetError> {
        if self.input_dim == 0 || self.hidden == 0 || self.sequence_len == 0 {
            return Err(NetError::InvalidConfig(
                "input_dim, hidden and sequence_len must be positive".into(),
            ));
        }
        Ok(())
    }
}

pub fn param_count(config: &GruConfig) -> usize {
    let (i, h) = (config.input_dim, config.hidden);
    3 * (i * h + h * h + 2 * h) + h + 1
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub batch_size: usize,
    pub epochs: usize,
    pub grad_clip_norm: f64,
    pub validation_fraction: f64,
    /// Drives the validation split and the shuffle order.
    pub seed: u64,
    #[serde(default)]
    pub schedule: LrSchedule,
}

/// Learning rate as a function of training progress.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LrSchedule {
    #[default]
    Constant,
    /// Half-cosine decay from `learning_rate` to zero over all batches.
    Cosine,
}

impl LrSchedule {
    /// Multiplier of the base rate after `done` of `total` steps.
    pub fn factor(self, done: usize, total: usize) -> f64 {
        match self {
            LrSchedule::Constant => 1.0,
            LrSchedule::Cosine => {
                0.5 * (1.0 + (std::f64::consts::PI * done as f64 / total.max(1) as f64).cos())
            }
        }
    }
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            learning_rate: 1e-3,
            batch_size: 64,
            epochs: 20,
            grad_clip_norm: 1.0,
            validation_fraction: 0.1,
            seed: 0,
            schedule: LrSchedule::Constant,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<(), NetError> {
        let ok = self.learning_rate > 0.0
            && self.batch_size > 0
            && self.epochs > 0
            && self.grad_clip_norm > 0.0
            && self.validation_fraction > 0.0
            && self.validation_fraction <= 0.5;
        if ok {
            Ok(())
        } else {
            Err(NetError::InvalidConfig(format!("{self:?}")))
        }
    }
}

/// One input sequence, `x` holding `steps * input_dim` values row by row.
#[derive(Clone, Debug, PartialEq)]
pub struct SeqSample<F> {
    pub x: Vec<F>,
    pub target: F,
}

/// Rows of `[lead exponents, trailing exponents] * scale`, one per
/// generator. A single-term generator repeats its only term.
pub fn encode_generators<F: Scalar>(generators: &[Polynomial], scale: f64) -> Vec<F> {
    let mut out = Vec::new();
    for g in generators {
        let terms = g.terms();
        let (Some(lead), Some(trail)) = (terms.first(), terms.last()) else {
            out.extend(std::iter::repeat_n(F::zero(), 2 * g.nvars()));
            continue;
        };
        for t in [lead, trail] {
            out.extend(t.mono.exps().iter().map(|&e| F::lit(e as f64 * scale)));
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GruParams<F> {
    pub input_dim: usize,
    pub hidden: usize,
    pub data: Vec<F>,
}

struct Offsets {
    u: usize,
    bx: usize,
    bh: usize,
    w_out: usize,
    b_out: usize,
}

fn sigmoid<F: Scalar>(v: F) -> F {
    F::one() / (F::one() + (-v).exp())
}

impl<F: Scalar> GruParams<F> {
    pub fn zeros(config: &GruConfig) -> Self {
        GruParams {
            input_dim: config.input_dim,
            hidden: config.hidden,
            data: vec![F::zero(); param_count(config)],
        }
    }

    /// Uniform in `±1/sqrt(hidden)`, the output bias set to `b_out`.
    pub fn init(config: &GruConfig, b_out: F) -> Self {
        let mut p = Self::zeros(config);
        let a = 1.0 / (config.hidden as f64).sqrt();
        let mut rng = seeded(config.seed);
        for v in &mut p.data {
            *v = F::lit(rng.random_range(-a..a));
        }
        *p.data.last_mut().unwrap() = b_out;
        p
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    /// Maps the output `y` to `scale * y + shift`.
    fn rescale_output(&mut self, scale: F, shift: F) {
        let o = self.offsets();
        for w in &mut self.data[o.w_out..o.b_out] {
            *w = *w * scale;
        }
        self.data[o.b_out] = self.data[o.b_out] * scale + shift;
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    fn offsets(&self) -> Offsets {
        let (i, h) = (self.input_dim, self.hidden);
        let u = 3 * h * i;
        let bx = u + 3 * h * h;
        let bh = bx + 3 * h;
        let w_out = bh + 3 * h;
        Offsets {
            u,
            bx,
            bh,
            w_out,
            b_out: w_out + h,
        }
    }

    pub fn b_out(&self) -> F {
        self.data[self.offsets().b_out]
    }

    fn steps_of(&self, x: &[F]) -> Result<usize, NetError> {
        if x.len() % self.input_dim != 0 {
            return Err(NetError::Shape {
                input_dim: self.input_dim,
                found: x.len(),
            });
        }
        Ok(x.len() / self.input_dim)
    }

    pub fn forward(&self, x: &[F]) -> Result<F, NetError> {
        let steps = self.steps_of(x)?;
        Ok(self.run(&[x], steps).output[0])
    }

    /// Predictions for many sequences, batched by length.
    pub fn predict(&self, xs: &[&[F]]) -> Result<Vec<F>, NetError> {
        let mut out = vec![F::zero(); xs.len()];
        for (steps, idx) in length_groups(self, xs.iter().copied().enumerate())? {
            for chunk in idx.chunks(256) {
                let seqs: Vec<&[F]> = chunk.iter().map(|&k| xs[k]).collect();
                let tape = self.run(&seqs, steps);
                for (&k, y) in chunk.iter().zip(tape.output) {
                    out[k] = y;
                }
            }
        }
        Ok(out)
    }

    fn run(&self, xs: &[&[F]], steps: usize) -> Tape<F> {
        let (b, i, h) = (xs.len(), self.input_dim, self.hidden);
        let h3 = 3 * h;
        let o = self.offsets();
        let w = &self.data[..o.u];
        let u = &self.data[o.u..o.bx];
        let bx = &self.data[o.bx..o.bh];
        let bh = &self.data[o.bh..o.w_out];

        let mut tape = Tape {
            x: vec![F::zero(); steps * b * i],
            h: vec![F::zero(); (steps + 1) * b * h],
            z: vec![F::zero(); steps * b * h],
            r: vec![F::zero(); steps * b * h],
            n: vec![F::zero(); steps * b * h],
            ghn: vec![F::zero(); steps * b * h],
            output: Vec::new(),
        };
        for (s, x) in xs.iter().enumerate() {
            for t in 0..steps {
                tape.x[(t * b + s) * i..(t * b + s + 1) * i]
                    .copy_from_slice(&x[t * i..(t + 1) * i]);
            }
        }
        let mut gx = vec![F::zero(); b * h3];
        let mut gh = vec![F::zero(); b * h3];
        for t in 0..steps {
            for s in 0..b {
                gx[s * h3..(s + 1) * h3].copy_from_slice(bx);
                gh[s * h3..(s + 1) * h3].copy_from_slice(bh);
            }
            let xt = &tape.x[t * b * i..(t + 1) * b * i];
            F::gemm(
                b,
                i,
                h3,
                F::one(),
                xt,
                (i as isize, 1),
                w,
                (1, i as isize),
                F::one(),
                &mut gx,
                (h3 as isize, 1),
            );
            let (prev, next) = tape.h.split_at_mut((t + 1) * b * h);
            let hp = &prev[t * b * h..];
            F::gemm(
                b,
                h,
                h3,
                F::one(),
                hp,
                (h as isize, 1),
                u,
                (1, h as isize),
                F::one(),
                &mut gh,
                (h3 as isize, 1),
            );
            let hn = &mut next[..b * h];
            let base = t * b * h;
            for s in 0..b {
                let (gxs, ghs) = (&gx[s * h3..(s + 1) * h3], &gh[s * h3..(s + 1) * h3]);
                for k in 0..h {
                    let z = sigmoid(gxs[k] + ghs[k]);
                    let r = sigmoid(gxs[h + k] + ghs[h + k]);
                    let n = (gxs[2 * h + k] + r * ghs[2 * h + k]).tanh();
                    let at = s * h + k;
                    hn[at] = (F::one() - z) * n + z * hp[at];
                    tape.z[base + at] = z;
                    tape.r[base + at] = r;
                    tape.n[base + at] = n;
                    tape.ghn[base + at] = ghs[2 * h + k];
                }
            }
        }
        let w_out = &self.data[o.w_out..o.b_out];
        let b_out = self.data[o.b_out];
        let last = &tape.h[steps * b * h..];
        tape.output = (0..b)
            .map(|s| {
                last[s * h..(s + 1) * h]
                    .iter()
                    .zip(w_out)
                    .fold(b_out, |acc, (&a, &c)| acc + a * c)
            })
            .collect();
        tape
    }

    /// Adds `scale * d/dθ Σ (y - target)²` over `batch` (all of length
    /// `steps`) into `grad`, returning the summed squared error.
    fn accumulate(&self, batch: &[&SeqSample<F>], steps: usize, scale: F, grad: &mut [F]) -> F {
        let xs: Vec<&[F]> = batch.iter().map(|s| s.x.as_slice()).collect();
        let tape = self.run(&xs, steps);
        let (b, i, h) = (batch.len(), self.input_dim, self.hidden);
        let h3 = 3 * h;
        let o = self.offsets();
        let u = &self.data[o.u..o.bx];
        let w_out = &self.data[o.w_out..o.b_out];

        let two = F::lit(2.0);
        let mut sse = F::zero();
        let dy: Vec<F> = tape
            .output
            .iter()
            .zip(batch)
            .map(|(&y, s)| {
                let e = y - s.target;
                sse = sse + e * e;
                two * e * scale
            })
            .collect();

        let last = &tape.h[steps * b * h..];
        let mut dh = vec![F::zero(); b * h];
        for s in 0..b {
            grad[o.b_out] = grad[o.b_out] + dy[s];
            for k in 0..h {
                grad[o.w_out + k] = grad[o.w_out + k] + dy[s] * last[s * h + k];
                dh[s * h + k] = dy[s] * w_out[k];
            }
        }

        let (gw, rest) = grad.split_at_mut(o.u);
        let (gu, rest) = rest.split_at_mut(o.bx - o.u);
        let (gbx, rest) = rest.split_at_mut(3 * h);
        let gbh = &mut rest[..3 * h];
        let mut dgx = vec![F::zero(); b * h3];
        let mut dgh = vec![F::zero(); b * h3];
        let mut dprev = vec![F::zero(); b * h];
        for t in (0..steps).rev() {
            let base = t * b * h;
            let hp = &tape.h[t * b * h..(t + 1) * b * h];
            for s in 0..b {
                for k in 0..h {
                    let at = s * h + k;
                    let (z, r, n, ghn) = (
                        tape.z[base + at],
                        tape.r[base + at],
                        tape.n[base + at],
                        tape.ghn[base + at],
                    );
                    let d = dh[at];
                    let dn = d * (F::one() - z);
                    let dz = d * (hp[at] - n);
                    dprev[at] = d * z;
                    let dan = dn * (F::one() - n * n);
                    let dr = dan * ghn;
                    let daz = dz * z * (F::one() - z);
                    let dar = dr * r * (F::one() - r);
                    let row = s * h3;
                    dgx[row + k] = daz;
                    dgx[row + h + k] = dar;
                    dgx[row + 2 * h + k] = dan;
                    dgh[row + k] = daz;
                    dgh[row + h + k] = dar;
                    dgh[row + 2 * h + k] = dan * r;
                }
            }
            for s in 0..b {
                for c in 0..h3 {
                    gbx[c] = gbx[c] + dgx[s * h3 + c];
                    gbh[c] = gbh[c] + dgh[s * h3 + c];
                }
            }
            let xt = &tape.x[t * b * i..(t + 1) * b * i];
            F::gemm(
                h3,
                b,
                i,
                F::one(),
                &dgx,
                (1, h3 as isize),
                xt,
                (i as isize, 1),
                F::one(),
                gw,
                (i as isize, 1),
            );
            F::gemm(
                h3,
                b,
                h,
                F::one(),
                &dgh,
                (1, h3 as isize),
                hp,
                (h as isize, 1),
                F::one(),
                gu,
                (h as isize, 1),
            );
            F::gemm(
                b,
                h3,
                h,
                F::one(),
                &dgh,
                (h3 as isize, 1),
                u,
                (h as isize, 1),
                F::one(),
                &mut dprev,
                (h as isize, 1),
            );
            std::mem::swap(&mut dh, &mut dprev);
        }
        sse
    }

    /// Gradient of the mean squared error over `batch`, and that error.
    pub fn grad(&self, batch: &[SeqSample<F>]) -> Result<(Vec<F>, F), NetError> {
        if batch.is_empty() {
            return Err(NetError::EmptyData);
        }
        let refs: Vec<&SeqSample<F>> = batch.iter().collect();
        self.grad_refs(&refs)
    }

    fn grad_refs(&self, batch: &[&SeqSample<F>]) -> Result<(Vec<F>, F), NetError> {
        let scale = F::one() / F::from_usize(batch.len()).unwrap();
        let mut grad = vec![F::zero(); self.len()];
        let mut sse = F::zero();
        for (steps, idx) in length_groups(self, batch.iter().map(|s| s.x.as_slice()).enumerate())? {
            let group: Vec<&SeqSample<F>> = idx.iter().map(|&k| batch[k]).collect();
            sse = sse + self.accumulate(&group, steps, scale, &mut grad);
        }
        Ok((grad, sse * scale))
    }

    fn mse(&self, data: &[&SeqSample<F>]) -> Result<F, NetError> {
        let xs: Vec<&[F]> = data.iter().map(|s| s.x.as_slice()).collect();
        let pred = self.predict(&xs)?;
        let n = F::from_usize(data.len()).unwrap();
        Ok(pred
            .iter()
            .zip(data)
            .map(|(&p, s)| (p - s.target) * (p - s.target))
            .sum::<F>()
            / n)
    }
}

struct Tape<F> {
    x: Vec<F>,
    h: Vec<F>,
    z: Vec<F>,
    r: Vec<F>,
    n: Vec<F>,
    ghn: Vec<F>,
    output: Vec<F>,
}

/// Indices grouped by sequence length, groups in increasing length.
fn length_groups<'a, F: Scalar>(
    params: &GruParams<F>,
    xs: impl Iterator<Item = (usize, &'a [F])>,
) -> Result<Vec<(usize, Vec<usize>)>, NetError> {
    let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for (k, x) in xs {
        groups.entry(params.steps_of(x)?).or_default().push(k);
    }
    Ok(groups.into_iter().collect())
}

/// Scales `grad` down to global norm `max_norm` if it is longer; returns
/// the norm before clipping.
pub fn clip_grad_norm<F: Scalar>(grad: &mut [F], max_norm: F) -> F {
    let norm = grad.iter().map(|&g| g * g).sum::<F>().sqrt();
    if norm > max_norm {
        let s = max_norm / norm;
        grad.iter_mut().for_each(|g| *g = *g * s);
    }
    norm
}

/// Adaptive moment estimation with the usual bias correction.
#[derive(Clone, Debug)]
pub struct Adam<F> {
    pub lr: F,
    pub beta1: F,
    pub beta2: F,
    pub eps: F,
    m: Vec<F>,
    v: Vec<F>,
    t: i32,
}

impl<F: Scalar> Adam<F> {
    pub fn new(len: usize, lr: F) -> Self {
        Adam {
            lr,
            beta1: F::lit(0.9),
            beta2: F::lit(0.999),
            eps: F::lit(1e-8),
            m: vec![F::zero(); len],
            v: vec![F::zero(); len],
            t: 0,
        }
    }

    pub fn step(&mut self, params: &mut [F], grad: &[F]) {
        self.t += 1;
        let c1 = F::one() - self.beta1.powi(self.t);
        let c2 = F::one() - self.beta2.powi(self.t);
        for (((p, &g), m), v) in params
            .iter_mut()
            .zip(grad)
            .zip(&mut self.m)
            .zip(&mut self.v)
        {
            *m = self.beta1 * *m + (F::one() - self.beta1) * g;
            *v = self.beta2 * *v + (F::one() - self.beta2) * g * g;
            *p = *p - self.lr * (*m / c1) / ((*v / c2).sqrt() + self.eps);
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpochLog {
    pub epoch: usize,
    pub train_loss: f64,
    pub val_loss: f64,
}

#[derive(Clone, Debug)]
pub struct Trained<F> {
    pub params: GruParams<F>,
    pub curve: Vec<EpochLog>,
    pub best_epoch: usize,
}

/// Mini-batch training on mean squared error. A `validation_fraction` of
/// the data is held out, and the parameters with the lowest validation
/// loss are returned.
///
/// Optimization runs on targets standardized by the training mean and
/// standard deviation; the returned dense head predicts raw targets, and
/// logged losses are in raw units.
pub fn train<F: Scalar>(
    data: &[SeqSample<F>],
    gru: &GruConfig,
    cfg: &TrainConfig,
) -> Result<Trained<F>, NetError> {
    gru.validate()?;
    cfg.validate()?;
    if data.len() < 2 {
        return Err(NetError::EmptyData);
    }
    let mut order: Vec<usize> = (0..data.len()).collect();
    order.shuffle(&mut seeded(mix(cfg.seed, 0)));
    let n_val =
        ((data.len() as f64 * cfg.validation_fraction).round() as usize).clamp(1, data.len() - 1);
    let val: Vec<&SeqSample<F>> = order[..n_val].iter().map(|&k| &data[k]).collect();
    let train_set: Vec<&SeqSample<F>> = order[n_val..].iter().map(|&k| &data[k]).collect();

    let n_train = F::from_usize(train_set.len()).unwrap();
    let mean = train_set.iter().map(|s| s.target).sum::<F>() / n_train;
    let var = train_set
        .iter()
        .map(|s| (s.target - mean) * (s.target - mean))
        .sum::<F>()
        / n_train;
    let scale = if var > F::zero() {
        var.sqrt()
    } else {
        F::one()
    };
    let standardize = |s: &&SeqSample<F>| SeqSample {
        x: s.x.clone(),
        target: (s.target - mean) / scale,
    };
    let val_owned: Vec<SeqSample<F>> = val.iter().map(standardize).collect();
    let train_owned: Vec<SeqSample<F>> = train_set.iter().map(standardize).collect();
    let val: Vec<&SeqSample<F>> = val_owned.iter().collect();
    let mut train_set: Vec<&SeqSample<F>> = train_owned.iter().collect();
    let loss_unit = scale.as_f64() * scale.as_f64();

    let mut params = GruParams::init(gru, F::zero());
    for s in train_set.iter().chain(&val) {
        params.steps_of(&s.x)?;
    }
    let mut adam = Adam::new(params.len(), F::lit(cfg.learning_rate));
    let clip = F::lit(cfg.grad_clip_norm);

    let mut best = (params.mse(&val)?, params.clone(), 0);
    let mut curve = Vec::with_capacity(cfg.epochs);
    let mut shuffler = seeded(mix(cfg.seed, 1));
    let total_steps = cfg.epochs * train_set.len().div_ceil(cfg.batch_size);
    let mut done = 0;
    for epoch in 1..=cfg.epochs {
        train_set.shuffle(&mut shuffler);
        let mut total = 0.0;
        for (bi, batch) in train_set.chunks(cfg.batch_size).enumerate() {
            let (mut grad, loss) = params.grad_refs(batch)?;
            if !loss.is_finite() || grad.iter().any(|g| !g.is_finite()) {
                return Err(NetError::Divergence { epoch, batch: bi });
            }
            clip_grad_norm(&mut grad, clip);
            adam.lr = F::lit(cfg.learning_rate * cfg.schedule.factor(done, total_steps));
            adam.step(&mut params.data, &grad);
            done += 1;
            total += loss.as_f64() * loss_unit * batch.len() as f64;
        }
        let val_loss = params.mse(&val)?;
        if !val_loss.is_finite() {
            return Err(NetError::Divergence {
                epoch,
                batch: usize::MAX,
            });
        }
        curve.push(EpochLog {
            epoch,
            train_loss: total / train_set.len() as f64,
            val_loss: val_loss.as_f64() * loss_unit,
        });
        if val_loss < best.0 {
            best = (val_loss, params.clone(), epoch);
        }
    }
    let mut params = best.1;
    params.rescale_output(scale, mean);
    Ok(Trained {
        params,
        curve,
        best_epoch: best.2,
    })
}

/// MSE, MAE and R² on `data`, with R² about the mean of its targets.
pub fn evaluate_net<F: Scalar>(
    params: &GruParams<F>,
    data: &[SeqSample<F>],
    input_dim: usize,
) -> Result<(EvalMetrics<F>, Vec<F>), NetError> {
    if input_dim != params.input_dim {
        return Err(NetError::FeatureMismatch {
            expected: params.input_dim,
            found: input_dim,
        });
    }
    let xs: Vec<&[F]> = data.iter().map(|s| s.x.as_slice()).collect();
    let pred = params.predict(&xs)?;
    let actual: Vec<F> = data.iter().map(|s| s.target).collect();
    Ok((metrics(&pred, &actual)?, pred))
}

/// Everything besides the weights needed to reuse a trained network.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckpointHeader {
    pub format: String,
    pub version: u32,
    pub config: GruConfig,
    pub param_count: usize,
    pub input_scale: f64,
    pub input_layout: String,
    pub train: Option<TrainConfig>,
    pub dist: Option<String>,
}

impl CheckpointHeader {
    pub fn new(config: GruConfig, input_scale: f64) -> Self {
        CheckpointHeader {
            format: CHECKPOINT_FORMAT.into(),
            version: CHECKPOINT_VERSION,
            config,
            param_count: param_count(&config),
            input_scale,
            input_layout: "lead exponents then trailing exponents per generator, times input_scale"
                .into(),
            train: None,
            dist: None,
        }
    }
}

/// One JSON header line, then the parameters as little-endian `f64`.
pub fn save_checkpoint<F: Scalar>(
    path: &Path,
    header: &CheckpointHeader,
    params: &GruParams<F>,
) -> Result<(), NetError> {
    if header.param_count != params.len() {
        return Err(NetError::Checkpoint(format!(
            "header says {} parameters, model has {}",
            header.param_count,
            params.len()
        )));
    }
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    serde_json::to_writer(&mut out, header).map_err(|e| NetError::Checkpoint(e.to_string()))?;
    out.write_all(b"\n")?;
    for v in &params.data {
        out.write_all(&v.as_f64().to_le_bytes())?;
    }
    out.flush()?;
    Ok(())
}

pub fn load_checkpoint<F: Scalar>(
    path: &Path,
) -> Result<(CheckpointHeader, GruParams<F>), NetError> {
    let mut input = BufReader::new(std::fs::File::open(path)?);
    let mut line = String::new();
    input.read_line(&mut line)?;
    let header: CheckpointHeader =
        serde_json::from_str(line.trim_end()).map_err(|e| NetError::Checkpoint(e.to_string()))?;
    if header.format != CHECKPOINT_FORMAT || header.version != CHECKPOINT_VERSION {
        return Err(NetError::Checkpoint(format!(
            "unsupported format {} v{}",
            header.format, header.version
        )));
    }
    if header.param_count != param_count(&header.config) {
        return Err(NetError::Checkpoint(
            "parameter count does not match the configuration".into(),
        ));
    }
    let mut bytes = Vec::new();
    input.read_to_end(&mut bytes)?;
    if bytes.len() != header.param_count * 8 {
        return Err(NetError::Checkpoint(format!(
            "expected {} bytes of weights, found {}",
            header.param_count * 8,
            bytes.len()
        )));
    }
    let data = bytes
        .chunks_exact(8)
        .map(|c| F::lit(f64::from_le_bytes(c.try_into().unwrap())))
        .collect();
    let params = GruParams {
        input_dim: header.config.input_dim,
        hidden: header.config.hidden,
        data,
    };
    Ok((header, params))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(i: usize, h: usize) -> GruConfig {
        GruConfig {
            input_dim: i,
            hidden: h,
            sequence_len: 3,
            seed: 7,
        }
    }

    #[test]
    fn parameter_counts() {
        assert_eq!(param_count(&cfg(6, 128)), 52_353);
        assert_eq!(param_count(&cfg(1, 1)), 14);
        assert_eq!(param_count(&cfg(6, 1)), 29);
    }

    #[test]
    fn zero_parameters_predict_zero() {
        let p = GruParams::<f64>::zeros(&cfg(2, 3));
        assert_eq!(p.forward(&[1.0, 2.0, 3.0, 4.0]).unwrap(), 0.0);
        assert_eq!(p.forward(&[]).unwrap(), 0.0);
    }

    #[test]
    fn empty_sequence_gives_output_bias() {
        let p = GruParams::<f64>::init(&cfg(2, 3), 4.5);
        assert_eq!(p.forward(&[]).unwrap(), 4.5);
    }

    #[test]
    fn unit_cell_hand_value() {
        // all weights 1, all biases 0
        let mut p = GruParams::<f64>::zeros(&cfg(1, 1));
        let o = p.offsets();
        p.data[..o.bx].iter_mut().for_each(|v| *v = 1.0);
        p.data[o.w_out] = 1.0;
        let z = 1.0 / (1.0 + (-1.0f64).exp());
        let expect = (1.0 - z) * 1.0f64.tanh();
        assert!((p.forward(&[1.0]).unwrap() - expect).abs() < 1e-12);
        assert!((expect - 0.204824).abs() < 1e-6);
    }

    #[test]
    fn ragged_input_is_rejected() {
        let p = GruParams::<f64>::zeros(&cfg(2, 3));
        assert!(matches!(
            p.forward(&[1.0, 2.0, 3.0]),
            Err(NetError::Shape { .. })
        ));
    }

    #[test]
    fn output_bias_gradient_closed_form() {
        let p = GruParams::<f64>::init(&cfg(2, 4), 0.3);
        let batch: Vec<SeqSample<f64>> = (0..5)
            .map(|k| SeqSample {
                x: vec![0.1 * k as f64; 6],
                target: k as f64,
            })
            .collect();
        let (g, _) = p.grad(&batch).unwrap();
        let preds: Vec<f64> = batch.iter().map(|s| p.forward(&s.x).unwrap()).collect();
        let expect = 2.0
            * preds
                .iter()
                .zip(&batch)
                .map(|(y, s)| y - s.target)
                .sum::<f64>()
            / 5.0;
        assert!((g.last().unwrap() - expect).abs() < 1e-12);
    }

    #[test]
    fn perfect_prediction_has_zero_gradient() {
        let p = GruParams::<f64>::init(&cfg(2, 4), 0.3);
        let x = vec![0.5, -0.2, 0.1, 0.9];
        let target = p.forward(&x).unwrap();
        let (g, loss) = p.grad(&[SeqSample { x, target }]).unwrap();
        assert_eq!(loss, 0.0);
        assert!(g.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn clipping_bounds_the_norm() {
        let mut g = vec![3.0f64, 4.0];
        assert_eq!(clip_grad_norm(&mut g, 1.0), 5.0);
        assert!((g[0] - 0.6).abs() < 1e-15 && (g[1] - 0.8).abs() < 1e-15);
    }

    #[test]
    fn input_dim_mismatch_is_a_feature_error() {
        let p = GruParams::<f64>::zeros(&cfg(6, 2));
        let data = vec![
            SeqSample {
                x: vec![0.0; 16],
                target: 1.0,
            },
            SeqSample {
                x: vec![0.0; 16],
                target: 2.0,
            },
        ];
        assert!(matches!(
            evaluate_net(&p, &data, 16),
            Err(NetError::FeatureMismatch {
                expected: 6,
                found: 16
            })
        ));
    }

    #[test]
    fn checkpoint_round_trip() {
        let c = cfg(3, 5);
        let p = GruParams::<f64>::init(&c, 1.25);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("net.ckpt");
        save_checkpoint(&path, &CheckpointHeader::new(c, 0.05), &p).unwrap();
        let (h, q) = load_checkpoint::<f64>(&path).unwrap();
        assert_eq!(h.config, c);
        assert_eq!(h.input_scale, 0.05);
        assert_eq!(p, q);
    }
}
