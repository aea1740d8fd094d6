//! Ordinary least squares with significance statistics, evaluation
//! metrics and cross-distribution R² grids.
//!
//! An intercept column of ones is always appended as the last design
//! column. Coefficients come from a Householder QR factorization; p-values
//! use the normal approximation to the t distribution, which is accurate for
//! the sample sizes used here (N in the tens of thousands).

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::invariants::FeatureVector;
use crate::rng::seeded;
use crate::scalar::Scalar;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RegressError {
    #[error("design matrix is rank deficient at feature {0:?}")]
    RankDeficient(String),
    #[error("need more rows than columns: {rows} rows, {cols} columns")]
    TooFewRows { rows: usize, cols: usize },
    #[error("design matrix contains a non-finite value")]
    NonFinite,
    #[error("feature mismatch: model uses {expected:?}, data has {found:?}")]
    FeatureMismatch {
        expected: Vec<String>,
        found: Vec<String>,
    },
    #[error("R² is undefined for a constant response")]
    UndefinedR2,
    #[error("unknown feature set {0:?}")]
    UnknownFeatureSet(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
}

/// Named predictor sets. Any single feature name is also accepted as a
/// one-predictor set.
pub const FEATURE_SETS: [(&str, &[&str]); 4] = [
    ("mmmsd", &["min_deg", "max_deg", "mean_deg", "std_deg"]),
    (
        "mmmsd+purepowers",
        &["min_deg", "max_deg", "mean_deg", "std_deg", "pure_powers"],
    ),
    (
        "binomial-full",
        &[
            "min_deg",
            "max_deg",
            "mean_deg",
            "std_deg",
            "pure_powers",
            "dimension",
        ],
    ),
    (
        "toric-full",
        &[
            "min_deg",
            "max_deg",
            "mean_deg",
            "std_deg",
            "num_gens",
            "dimension",
        ],
    ),
];

pub fn feature_set(name: &str) -> Result<Vec<String>, RegressError> {
    if let Some((_, cols)) = FEATURE_SETS.iter().find(|(n, _)| *n == name) {
        return Ok(cols.iter().map(|c| c.to_string()).collect());
    }
    if FeatureVector::NAMES.contains(&name) {
        return Ok(vec![name.to_string()]);
    }
    Err(RegressError::UnknownFeatureSet(name.to_string()))
}

/// `rows x names.len()` predictor values, row-major. The intercept is not stored.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DesignMatrix<F> {
    names: Vec<String>,
    rows: usize,
    data: Vec<F>,
}

impl<F: Scalar> DesignMatrix<F> {
    pub fn new(names: Vec<String>, data: Vec<F>) -> Result<Self, RegressError> {
        let k = names.len();
        if (k == 0 && !data.is_empty()) || (k > 0 && data.len() % k != 0) {
            return Err(RegressError::Shape(format!(
                "{} values do not fill rows of {k}",
                data.len()
            )));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(RegressError::NonFinite);
        }
        let rows = if k == 0 { 0 } else { data.len() / k };
        Ok(DesignMatrix { names, rows, data })
    }

    /// A matrix with no predictors, for intercept-only models.
    pub fn intercept_only(rows: usize) -> Self {
        DesignMatrix {
            names: Vec::new(),
            rows,
            data: Vec::new(),
        }
    }

    pub fn from_rows(names: Vec<String>, rows: &[Vec<F>]) -> Result<Self, RegressError> {
        if names.is_empty() {
            return Ok(Self::intercept_only(rows.len()));
        }
        if let Some(bad) = rows.iter().find(|r| r.len() != names.len()) {
            return Err(RegressError::Shape(format!(
                "row of length {} for {} features",
                bad.len(),
                names.len()
            )));
        }
        Self::new(names, rows.concat())
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.names.len()
    }

    pub fn row(&self, i: usize) -> &[F] {
        let k = self.cols();
        &self.data[i * k..(i + 1) * k]
    }

    pub fn select_rows(&self, idx: &[usize]) -> Self {
        let data = idx
            .iter()
            .flat_map(|&i| self.row(i).iter().copied())
            .collect();
        DesignMatrix {
            names: self.names.clone(),
            rows: idx.len(),
            data,
        }
    }

    /// Keeps only the named columns, in the given order.
    pub fn select_columns(&self, keep: &[String]) -> Result<Self, RegressError> {
        let pos: Vec<usize> = keep
            .iter()
            .map(|n| self.names.iter().position(|m| m == n))
            .collect::<Option<_>>()
            .ok_or_else(|| RegressError::FeatureMismatch {
                expected: keep.to_vec(),
                found: self.names.clone(),
            })?;
        let data = (0..self.rows)
            .flat_map(|i| pos.iter().map(move |&c| self.data[i * self.cols() + c]))
            .collect();
        Ok(DesignMatrix {
            names: keep.to_vec(),
            rows: self.rows,
            data,
        })
    }
}

/// Provenance recorded with a fitted model.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct TrainingMeta {
    pub dist: String,
    pub n: usize,
    pub feature_set: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearModel<F> {
    pub feature_names: Vec<String>,
    /// One per feature, then the intercept.
    pub coefficients: Vec<F>,
    pub std_errors: Vec<F>,
    pub p_values: Vec<F>,
    pub training_meta: TrainingMeta,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalMetrics<F> {
    pub mse: F,
    pub mae: F,
    pub r2: F,
}

fn normal_two_sided_p<F: Scalar>(t: F) -> F {
    let z = t.abs().as_f64();
    F::lit(statrs::function::erf::erfc(z / std::f64::consts::SQRT_2).clamp(0.0, 1.0))
}

/// Least-squares fit of `y` on the columns of `x` plus an intercept.
pub fn ols_fit<F: Scalar>(x: &DesignMatrix<F>, y: &[F]) -> Result<LinearModel<F>, RegressError> {
    let n = x.rows();
    let k = x.cols();
    let p = k + 1;
    if y.len() != n {
        return Err(RegressError::Shape(format!(
            "{} responses for {n} rows",
            y.len()
        )));
    }
    if y.iter().any(|v| !v.is_finite()) {
        return Err(RegressError::NonFinite);
    }
    if n <= p {
        return Err(RegressError::TooFewRows { rows: n, cols: p });
    }
    // factored with the intercept first so a constant feature is the one reported
    let name = |c: usize| {
        if c == 0 {
            "intercept".to_string()
        } else {
            x.names()[c - 1].clone()
        }
    };

    let mut a = vec![F::zero(); n * p];
    for i in 0..n {
        a[i] = F::one();
        for (c, &v) in x.row(i).iter().enumerate() {
            a[(c + 1) * n + i] = v;
        }
    }
    let mut qty = y.to_vec();
    let mut diag = vec![F::zero(); p];

    for c in 0..p {
        let (done, rest) = a.split_at_mut((c + 1) * n);
        let col = &mut done[c * n..];
        let norm = col[c..].iter().map(|&v| v * v).sum::<F>().sqrt();
        if norm == F::zero() {
            diag[c] = F::zero();
            continue;
        }
        let alpha = if col[c] > F::zero() { -norm } else { norm };
        // v = x - alpha e1, stored in place of the column tail
        col[c] = col[c] - alpha;
        let vnorm2 = col[c..].iter().map(|&v| v * v).sum::<F>();
        diag[c] = alpha;
        if vnorm2 == F::zero() {
            continue;
        }
        let reflect = |target: &mut [F]| {
            let dot = col[c..]
                .iter()
                .zip(&target[c..])
                .map(|(&v, &t)| v * t)
                .sum::<F>();
            let s = (dot + dot) / vnorm2;
            for (t, &v) in target[c..].iter_mut().zip(&col[c..]) {
                *t = *t - s * v;
            }
        };
        for other in rest.chunks_mut(n) {
            reflect(other);
        }
        reflect(&mut qty);
    }

    let max_pivot = diag.iter().fold(F::zero(), |m, d| m.max(d.abs()));
    for (c, d) in diag.iter().enumerate() {
        if d.abs() < F::lit(1e-10) * max_pivot || *d == F::zero() {
            return Err(RegressError::RankDeficient(name(c)));
        }
    }

    // R is upper triangular: R[r][c] = a[c * n + r] for r < c, diag on the diagonal
    let r_at = |r: usize, c: usize| if r == c { diag[c] } else { a[c * n + r] };
    let mut beta = vec![F::zero(); p];
    for r in (0..p).rev() {
        let mut s = qty[r];
        for c in r + 1..p {
            s = s - r_at(r, c) * beta[c];
        }
        beta[r] = s / diag[r];
    }

    let rss = qty[p..].iter().map(|&v| v * v).sum::<F>();
    let sigma2 = rss / F::from_usize(n - p).unwrap();

    // R^{-1} by back substitution, column by column
    let mut rinv = vec![F::zero(); p * p];
    for c in 0..p {
        for r in (0..=c).rev() {
            let mut s = if r == c { F::one() } else { F::zero() };
            for j in r + 1..=c {
                s = s - r_at(r, j) * rinv[j * p + c];
            }
            rinv[r * p + c] = s / diag[r];
        }
    }
    let std_errors: Vec<F> = (0..p)
        .map(|r| (sigma2 * rinv[r * p..(r + 1) * p].iter().map(|&v| v * v).sum::<F>()).sqrt())
        .collect();
    let p_values: Vec<F> = beta
        .iter()
        .zip(&std_errors)
        .map(|(&b, &se)| {
            if se == F::zero() {
                if b == F::zero() {
                    F::one()
                } else {
                    F::zero()
                }
            } else {
                normal_two_sided_p(b / se)
            }
        })
        .collect();
    let intercept_last = |v: Vec<F>| v[1..].iter().chain(&v[..1]).copied().collect();

    Ok(LinearModel {
        feature_names: x.names().to_vec(),
        coefficients: intercept_last(beta),
        std_errors: intercept_last(std_errors),
        p_values: intercept_last(p_values),
        training_meta: TrainingMeta {
            n,
            ..Default::default()
        },
    })
}

impl<F: Scalar> LinearModel<F> {
    pub fn intercept(&self) -> F {
        *self.coefficients.last().expect("intercept present")
    }

    pub fn predict_row(&self, row: &[F]) -> F {
        row.iter()
            .zip(&self.coefficients)
            .fold(self.intercept(), |acc, (&x, &b)| acc + x * b)
    }

    pub fn predict(&self, x: &DesignMatrix<F>) -> Result<Vec<F>, RegressError> {
        if x.names() != self.feature_names.as_slice() {
            return Err(RegressError::FeatureMismatch {
                expected: self.feature_names.clone(),
                found: x.names().to_vec(),
            });
        }
        Ok((0..x.rows()).map(|i| self.predict_row(x.row(i))).collect())
    }

    /// Coefficient, standard error and p-value of the named feature.
    pub fn term(&self, name: &str) -> Option<(F, F, F)> {
        let idx = if name == "intercept" {
            self.coefficients.len() - 1
        } else {
            self.feature_names.iter().position(|n| n == name)?
        };
        Some((
            self.coefficients[idx],
            self.std_errors[idx],
            self.p_values[idx],
        ))
    }
}

/// MSE, MAE and R² of predictions, with R² taken about the mean of `actual`.
pub fn metrics<F: Scalar>(predicted: &[F], actual: &[F]) -> Result<EvalMetrics<F>, RegressError> {
    if predicted.len() != actual.len() || actual.is_empty() {
        return Err(RegressError::Shape(format!(
            "{} predictions for {} targets",
            predicted.len(),
            actual.len()
        )));
    }
    let n = F::from_usize(actual.len()).unwrap();
    let mean = actual.iter().copied().sum::<F>() / n;
    let ss_res = predicted
        .iter()
        .zip(actual)
        .map(|(&p, &a)| (p - a) * (p - a))
        .sum::<F>();
    let ss_tot = actual.iter().map(|&a| (a - mean) * (a - mean)).sum::<F>();
    if ss_tot == F::zero() {
        return Err(RegressError::UndefinedR2);
    }
    let mae = predicted
        .iter()
        .zip(actual)
        .map(|(&p, &a)| (p - a).abs())
        .sum::<F>()
        / n;
    Ok(EvalMetrics {
        mse: ss_res / n,
        mae,
        r2: F::one() - ss_res / ss_tot,
    })
}

pub fn evaluate<F: Scalar>(
    model: &LinearModel<F>,
    x: &DesignMatrix<F>,
    y: &[F],
) -> Result<EvalMetrics<F>, RegressError> {
    metrics(&model.predict(x)?, y)
}

/// Fits, then drops every predictor with p-value above `alpha` and refits
/// once. Returns the full model and, if anything was dropped, the refit.
pub fn fit_pruned<F: Scalar>(
    x: &DesignMatrix<F>,
    y: &[F],
    alpha: F,
) -> Result<(LinearModel<F>, Option<LinearModel<F>>), RegressError> {
    let full = ols_fit(x, y)?;
    let keep: Vec<String> = full
        .feature_names
        .iter()
        .zip(&full.p_values)
        .filter(|(_, &p)| p <= alpha)
        .map(|(n, _)| n.clone())
        .collect();
    if keep.len() == full.feature_names.len() {
        return Ok((full, None));
    }
    let reduced = ols_fit(&x.select_columns(&keep)?, y)?;
    Ok((full, Some(reduced)))
}

/// A named set of predictor rows and responses.
#[derive(Clone, Debug, PartialEq)]
pub struct LabeledData<F> {
    pub name: String,
    pub x: DesignMatrix<F>,
    pub y: Vec<F>,
}

/// Row indices `(train, test)` from a seeded shuffle; `train_fraction` of
/// the rows (rounded down) go to training.
pub fn split_indices(rows: usize, train_fraction: f64, seed: u64) -> (Vec<usize>, Vec<usize>) {
    let mut idx: Vec<usize> = (0..rows).collect();
    idx.shuffle(&mut seeded(seed));
    let cut = ((rows as f64) * train_fraction).floor() as usize;
    let test = idx.split_off(cut);
    (idx, test)
}

impl<F: Scalar> LabeledData<F> {
    pub fn subset(&self, idx: &[usize]) -> Self {
        LabeledData {
            name: self.name.clone(),
            x: self.x.select_rows(idx),
            y: idx.iter().map(|&i| self.y[i]).collect(),
        }
    }

    pub fn split(&self, train_fraction: f64, seed: u64) -> (Self, Self) {
        let (tr, te) = split_indices(self.x.rows(), train_fraction, seed);
        (self.subset(&tr), self.subset(&te))
    }
}

/// R² grid: rows are training sets, columns test sets.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct R2Matrix<F> {
    pub train: Vec<String>,
    pub test: Vec<String>,
    pub values: Vec<Vec<F>>,
}

impl<F: Scalar> R2Matrix<F> {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("train\\test");
        for t in &self.test {
            out.push(',');
            out.push_str(t);
        }
        out.push('\n');
        for (name, row) in self.train.iter().zip(&self.values) {
            out.push_str(name);
            for v in row {
                out.push_str(&format!(",{:.6}", v.as_f64()));
            }
            out.push('\n');
        }
        out
    }
}

/// Fits on `train_fraction` of each training set and evaluates on every
/// test set: on the held-out rows when the names match, on all rows otherwise.
pub fn cross_eval<F: Scalar>(
    train: &[LabeledData<F>],
    test: &[LabeledData<F>],
    train_fraction: f64,
    seed: u64,
) -> Result<R2Matrix<F>, RegressError> {
    let models: Vec<LinearModel<F>> = train
        .par_iter()
        .map(|d| {
            let (tr, _) = d.split(train_fraction, seed);
            ols_fit(&tr.x, &tr.y)
        })
        .collect::<Result<_, _>>()?;
    let values = train
        .iter()
        .zip(&models)
        .map(|(d, model)| {
            test.par_iter()
                .map(|t| {
                    let target = if t.name == d.name {
                        t.split(train_fraction, seed).1
                    } else {
                        t.clone()
                    };
                    evaluate(model, &target.x, &target.y).map(|m| m.r2)
                })
                .collect::<Result<Vec<F>, _>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(R2Matrix {
        train: train.iter().map(|d| d.name.clone()).collect(),
        test: test.iter().map(|d| d.name.clone()).collect(),
        values,
    })
}
