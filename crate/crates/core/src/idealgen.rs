//! Random ideal models.
//!
//! * Binomial ideals `n-d-s-(uniform|weighted)`: `s` binomials in `n`
//!   variables whose monomials have degree `1..=d`.
//! * Toric ideals `T(D, L, U, n)`: the kernel of the monomial map given by
//!   a random `D x n` non-negative integer matrix whose columns have
//!   component sum in `1..=U` (only `L = 0` is supported).
//!
//! Toric generators are computed from an integer kernel basis of the matrix
//! (Hermite column reduction followed by LLL size reduction) and a single
//! saturation by the product of all variables.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::buchberger::{Engine, GbError, RunConfig, Strategy};
use crate::poly::{normal_form, Exponent, Fp, MonomialOrder, Polynomial, Term, MAX_VARS, PRIME};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum IdealError {
    #[error("invalid distribution: {0}")]
    InvalidSpec(String),
    #[error("unsupported parameter: {0}")]
    Unsupported(String),
    #[error("integer overflow in lattice computation")]
    Overflow,
    #[error(transparent)]
    Gb(#[from] GbError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SamplingMode {
    Uniform,
    Weighted,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BinomialDistSpec {
    pub n: usize,
    pub d: u32,
    pub s: usize,
    pub mode: SamplingMode,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ToricDistSpec {
    #[serde(rename = "D")]
    pub rows: usize,
    #[serde(rename = "L")]
    pub lower: u32,
    #[serde(rename = "U")]
    pub upper: u32,
    pub n: usize,
}

/// A distribution over ideals, serialized as
/// `{"kind":"binomial","n":3,"d":20,"s":10,"mode":"weighted"}` or
/// `{"kind":"toric","D":6,"L":0,"U":5,"n":8}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum DistSpec {
    Binomial(BinomialDistSpec),
    Toric(ToricDistSpec),
}

impl BinomialDistSpec {
    pub fn new(n: usize, d: u32, s: usize, mode: SamplingMode) -> Self {
        BinomialDistSpec { n, d, s, mode }
    }

    pub fn validate(&self) -> Result<(), IdealError> {
        if self.n == 0 || self.d == 0 || self.s == 0 {
            return Err(IdealError::InvalidSpec(format!(
                "{self}: n, d and s must be positive"
            )));
        }
        if self.n > MAX_VARS {
            return Err(IdealError::InvalidSpec(format!(
                "{self}: at most {MAX_VARS} variables"
            )));
        }
        if self.d > u16::MAX as u32 {
            return Err(IdealError::InvalidSpec(format!("{self}: degree too large")));
        }
        Ok(())
    }
}

impl ToricDistSpec {
    pub fn new(rows: usize, lower: u32, upper: u32, n: usize) -> Self {
        ToricDistSpec {
            rows,
            lower,
            upper,
            n,
        }
    }

    pub fn validate(&self) -> Result<(), IdealError> {
        if self.rows == 0 || self.upper == 0 || self.n == 0 {
            return Err(IdealError::InvalidSpec(format!(
                "{self}: D, U and n must be positive"
            )));
        }
        if self.lower > 0 {
            return Err(IdealError::Unsupported(format!(
                "{self}: only L = 0 is implemented"
            )));
        }
        if self.n + 1 > MAX_VARS {
            return Err(IdealError::InvalidSpec(format!(
                "{self}: at most {} columns",
                MAX_VARS - 1
            )));
        }
        Ok(())
    }
}

impl DistSpec {
    pub fn validate(&self) -> Result<(), IdealError> {
        match self {
            DistSpec::Binomial(b) => b.validate(),
            DistSpec::Toric(t) => t.validate(),
        }
    }

    /// Number of ring variables of the sampled ideals.
    pub fn nvars(&self) -> usize {
        match self {
            DistSpec::Binomial(b) => b.n,
            DistSpec::Toric(t) => t.n,
        }
    }

    pub fn is_toric(&self) -> bool {
        matches!(self, DistSpec::Toric(_))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("spec serializes")
    }
}

impl fmt::Display for SamplingMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SamplingMode::Uniform => "uniform",
            SamplingMode::Weighted => "weighted",
        })
    }
}

impl fmt::Display for BinomialDistSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}-{}-{}", self.n, self.d, self.s, self.mode)
    }
}

impl fmt::Display for ToricDistSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "T({},{},{},{})",
            self.rows, self.lower, self.upper, self.n
        )
    }
}

impl fmt::Display for DistSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DistSpec::Binomial(b) => b.fmt(f),
            DistSpec::Toric(t) => t.fmt(f),
        }
    }
}

impl FromStr for DistSpec {
    type Err = IdealError;

    /// Accepts the JSON form, `n-d-s-mode`, `T(D,L,U,n)` and `D-L-U-n`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let bad = || IdealError::InvalidSpec(format!("cannot parse distribution {s:?}"));
        let spec = if s.starts_with('{') {
            serde_json::from_str(s).map_err(|e| IdealError::InvalidSpec(format!("{s}: {e}")))?
        } else if let Some(inner) = s.strip_prefix("T(").and_then(|r| r.strip_suffix(')')) {
            let v: Vec<usize> = inner
                .split(',')
                .map(|x| x.trim().parse())
                .collect::<Result<_, _>>()
                .map_err(|_| bad())?;
            let [rows, lower, upper, n] = v[..] else {
                return Err(bad());
            };
            DistSpec::Toric(ToricDistSpec::new(rows, lower as u32, upper as u32, n))
        } else {
            let parts: Vec<&str> = s.split('-').collect();
            if parts.len() != 4 {
                return Err(bad());
            }
            let num = |p: &str| p.parse::<usize>().map_err(|_| bad());
            match parts[3] {
                "uniform" | "weighted" => {
                    let mode = if parts[3] == "uniform" {
                        SamplingMode::Uniform
                    } else {
                        SamplingMode::Weighted
                    };
                    DistSpec::Binomial(BinomialDistSpec::new(
                        num(parts[0])?,
                        num(parts[1])? as u32,
                        num(parts[2])?,
                        mode,
                    ))
                }
                _ => DistSpec::Toric(ToricDistSpec::new(
                    num(parts[0])?,
                    num(parts[1])? as u32,
                    num(parts[2])? as u32,
                    num(parts[3])?,
                )),
            }
        };
        spec.validate()?;
        Ok(spec)
    }
}

/// All exponent vectors of length `n` with component sum `degree`, in
/// descending lexicographic order.
pub fn monomials_of_degree(n: usize, degree: u32) -> Vec<Vec<u32>> {
    fn rec(n: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if cur.len() + 1 == n {
            cur.push(left);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for e in (0..=left).rev() {
            cur.push(e);
            rec(n, left - e, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if n == 0 {
        return out;
    }
    rec(n, degree, &mut Vec::with_capacity(n), &mut out);
    out
}

/// Samples systems from a binomial distribution. Building the sampler
/// enumerates the monomial pool once.
#[derive(Clone, Debug)]
pub struct BinomialSampler {
    spec: BinomialDistSpec,
    /// `pools[k]` holds the monomials of degree `k + 1`.
    pools: Vec<Vec<Exponent>>,
    total: usize,
}

impl BinomialSampler {
    pub fn new(spec: BinomialDistSpec) -> Result<Self, IdealError> {
        spec.validate()?;
        let pools: Vec<Vec<Exponent>> = (1..=spec.d)
            .map(|deg| {
                monomials_of_degree(spec.n, deg)
                    .iter()
                    .map(|e| Exponent::new(e).expect("valid exponent"))
                    .collect()
            })
            .collect();
        let total = pools.iter().map(Vec::len).sum();
        Ok(BinomialSampler { spec, pools, total })
    }

    pub fn spec(&self) -> &BinomialDistSpec {
        &self.spec
    }

    /// Number of monomials of degree `1..=d`.
    pub fn pool_size(&self) -> usize {
        self.total
    }

    fn monomial<R: Rng + ?Sized>(&self, rng: &mut R) -> Exponent {
        match self.spec.mode {
            SamplingMode::Uniform => {
                let mut idx = rng.random_range(0..self.total);
                for pool in &self.pools {
                    if idx < pool.len() {
                        return pool[idx];
                    }
                    idx -= pool.len();
                }
                unreachable!("index within pool total")
            }
            SamplingMode::Weighted => {
                let pool = &self.pools[rng.random_range(0..self.pools.len())];
                pool[rng.random_range(0..pool.len())]
            }
        }
    }

    /// One binomial `c1*m1 - c2*m2` with distinct monomials and nonzero
    /// coefficients; the second monomial is redrawn until it differs.
    pub fn binomial<R: Rng + ?Sized>(&self, rng: &mut R) -> Polynomial {
        let m1 = self.monomial(rng);
        let mut m2 = self.monomial(rng);
        while m2 == m1 {
            m2 = self.monomial(rng);
        }
        let c1 = Fp::new(rng.random_range(1..PRIME) as i64);
        let c2 = Fp::new(rng.random_range(1..PRIME) as i64);
        let terms = vec![
            Term {
                coeff: c1,
                mono: m1,
            },
            Term {
                coeff: -c2,
                mono: m2,
            },
        ];
        Polynomial::from_unsorted(self.spec.n, MonomialOrder::Grevlex, terms)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<Polynomial> {
        (0..self.spec.s).map(|_| self.binomial(rng)).collect()
    }
}

/// Samples `spec.s` binomials; see [`BinomialSampler`].
pub fn sample_binomial_system<R: Rng + ?Sized>(
    spec: &BinomialDistSpec,
    rng: &mut R,
) -> Result<Vec<Polynomial>, IdealError> {
    Ok(BinomialSampler::new(*spec)?.sample(rng))
}

/// A `D x n` integer matrix (row-major) with an integer basis of its kernel.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ToricMatrix {
    pub entries: Vec<Vec<i64>>,
    pub kernel_basis: Vec<Vec<i64>>,
}

impl ToricMatrix {
    pub fn new(entries: Vec<Vec<i64>>) -> Result<Self, IdealError> {
        let kernel_basis = lattice_kernel(&entries)?;
        Ok(ToricMatrix {
            entries,
            kernel_basis,
        })
    }

    pub fn rows(&self) -> usize {
        self.entries.len()
    }

    pub fn cols(&self) -> usize {
        self.entries.first().map_or(0, Vec::len)
    }

    pub fn apply(&self, v: &[i64]) -> Vec<i64> {
        mat_vec(&self.entries, v)
    }

    /// Column sums, a positive grading under which the toric ideal is homogeneous.
    pub fn column_weights(&self) -> Vec<i64> {
        (0..self.cols())
            .map(|c| self.entries.iter().map(|r| r[c]).sum())
            .collect()
    }
}

fn mat_vec(a: &[Vec<i64>], v: &[i64]) -> Vec<i64> {
    a.iter()
        .map(|row| row.iter().zip(v).map(|(x, y)| x * y).sum())
        .collect()
}

/// Non-negative vectors of length `rows` with component sum in `1..=upper`.
pub fn admissible_columns(rows: usize, upper: u32) -> Vec<Vec<i64>> {
    (1..=upper)
        .flat_map(|s| monomials_of_degree(rows, s))
        .map(|c| c.into_iter().map(i64::from).collect())
        .collect()
}

/// Draws each column independently and uniformly from the admissible columns.
pub fn sample_toric_entries<R: Rng + ?Sized>(
    spec: &ToricDistSpec,
    rng: &mut R,
) -> Result<Vec<Vec<i64>>, IdealError> {
    spec.validate()?;
    let cols = admissible_columns(spec.rows, spec.upper);
    let mut a = vec![vec![0i64; spec.n]; spec.rows];
    for c in 0..spec.n {
        let col = &cols[rng.random_range(0..cols.len())];
        for (r, &v) in col.iter().enumerate() {
            a[r][c] = v;
        }
    }
    Ok(a)
}

/// Samples a matrix and computes its kernel basis.
pub fn sample_toric_matrix<R: Rng + ?Sized>(
    spec: &ToricDistSpec,
    rng: &mut R,
) -> Result<ToricMatrix, IdealError> {
    ToricMatrix::new(sample_toric_entries(spec, rng)?)
}

/// `x / y` rounded to the nearest integer.
fn div_round(x: i64, y: i64) -> i64 {
    let (q, r) = (x / y, x % y);
    if 2 * r.unsigned_abs() > y.unsigned_abs() {
        q + x.signum() * y.signum()
    } else {
        q
    }
}

/// Column-style Hermite reduction of `a` with the unimodular transform
/// tracked. Returns `(rank, transform)`: the last `cols - rank` columns of
/// the transform span the integer kernel.
///
/// Each row is cleared by Euclidean column steps: the smallest nonzero entry
/// becomes the pivot and the others are reduced by rounded quotients.
fn hermite_columns(a: &[Vec<i64>]) -> Result<(usize, Vec<Vec<i64>>), IdealError> {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut m: Vec<Vec<i64>> = a.to_vec();
    let mut u: Vec<Vec<i64>> = (0..cols)
        .map(|i| (0..cols).map(|j| i64::from(i == j)).collect())
        .collect();
    let mut rank = 0;
    for r in 0..rows {
        if rank == cols {
            break;
        }
        loop {
            let Some(p) = (rank..cols)
                .filter(|&c| m[r][c] != 0)
                .min_by_key(|&c| m[r][c].unsigned_abs())
            else {
                break;
            };
            let pivot = m[r][p];
            let mut done = true;
            for c in rank..cols {
                if c != p && m[r][c] != 0 {
                    let q = div_round(m[r][c], pivot);
                    for row in m.iter_mut().chain(u.iter_mut()) {
                        row[c] = q
                            .checked_mul(row[p])
                            .and_then(|t| row[c].checked_sub(t))
                            .ok_or(IdealError::Overflow)?;
                    }
                    done &= m[r][c] == 0;
                }
            }
            if done {
                for row in m.iter_mut().chain(u.iter_mut()) {
                    row.swap(rank, p);
                }
                rank += 1;
                break;
            }
        }
    }
    Ok((rank, u))
}

/// Rank of an integer matrix.
pub fn integer_rank(a: &[Vec<i64>]) -> Result<usize, IdealError> {
    Ok(hermite_columns(a)?.0)
}

/// A basis of `{v in Z^n : A v = 0}`, LLL-reduced so the vectors are short.
pub fn lattice_kernel(a: &[Vec<i64>]) -> Result<Vec<Vec<i64>>, IdealError> {
    let cols = a.first().map_or(0, Vec::len);
    let (rank, u) = hermite_columns(a)?;
    let mut basis: Vec<Vec<i64>> = (rank..cols)
        .map(|c| (0..cols).map(|r| u[r][c]).collect())
        .collect();
    lll_reduce(&mut basis)?;
    for v in &mut basis {
        // sign convention: first nonzero entry positive
        if v.iter().find(|&&x| x != 0).is_some_and(|&x| x < 0) {
            v.iter_mut().for_each(|x| *x = -*x);
        }
    }
    Ok(basis)
}

/// In-place LLL reduction (delta = 3/4) of linearly independent integer vectors.
pub fn lll_reduce(basis: &mut [Vec<i64>]) -> Result<(), IdealError> {
    let k = basis.len();
    if k < 2 {
        return Ok(());
    }
    let gram_schmidt = |b: &[Vec<i64>]| {
        let mut star: Vec<Vec<f64>> = Vec::with_capacity(b.len());
        let mut mu = vec![vec![0.0; b.len()]; b.len()];
        let mut norms = vec![0.0; b.len()];
        for i in 0..b.len() {
            let mut v: Vec<f64> = b[i].iter().map(|&x| x as f64).collect();
            let bi: Vec<f64> = v.clone();
            for j in 0..i {
                mu[i][j] = bi.iter().zip(&star[j]).map(|(x, y)| x * y).sum::<f64>() / norms[j];
                for (vv, s) in v.iter_mut().zip(&star[j]) {
                    *vv -= mu[i][j] * s;
                }
            }
            norms[i] = v.iter().map(|x| x * x).sum();
            star.push(v);
        }
        (mu, norms)
    };
    let mut i = 1;
    let mut guard = 0;
    while i < k && guard < 100_000 {
        guard += 1;
        for j in (0..i).rev() {
            let (mu, _) = gram_schmidt(basis);
            let q = mu[i][j].round() as i64;
            if q != 0 {
                let bj = basis[j].clone();
                for (x, y) in basis[i].iter_mut().zip(&bj) {
                    *x = y
                        .checked_mul(q)
                        .and_then(|p| x.checked_sub(p))
                        .ok_or(IdealError::Overflow)?;
                }
            }
        }
        let (mu, norms) = gram_schmidt(basis);
        if norms[i] >= (0.75 - mu[i][i - 1] * mu[i][i - 1]) * norms[i - 1] {
            i += 1;
        } else {
            basis.swap(i, i - 1);
            i = (i - 1).max(1);
        }
    }
    Ok(())
}

/// `x^{v+} - x^{v-}` for an integer vector `v`.
pub fn lattice_binomial(v: &[i64], order: MonomialOrder) -> Polynomial {
    let plus: Vec<u32> = v.iter().map(|&x| x.max(0) as u32).collect();
    let minus: Vec<u32> = v.iter().map(|&x| (-x).max(0) as u32).collect();
    Polynomial::from_terms(v.len(), order, [(1, plus), (-1, minus)]).expect("valid binomial")
}

/// The reduced grevlex Gröbner basis of the toric ideal of `a`.
///
/// Forms the lattice ideal of the kernel basis, adds `t*x1*...*xn - 1` and
/// eliminates `t`. `pair_budget` bounds the pairs processed by the
/// elimination run.
pub fn toric_ideal(
    a: &ToricMatrix,
    pair_budget: Option<u64>,
) -> Result<Vec<Polynomial>, IdealError> {
    let n = a.cols();
    if a.kernel_basis.is_empty() {
        return Ok(Vec::new());
    }
    if n + 1 > MAX_VARS {
        return Err(IdealError::InvalidSpec(format!(
            "{n} columns exceed the variable limit"
        )));
    }
    let elim = MonomialOrder::Elimination(1);
    let config = RunConfig {
        strategy: Strategy::Sugar,
        order: elim,
        pair_elimination: true,
        pair_budget,
    };
    let mut engine = Engine::new(n + 1, config);
    for v in &a.kernel_basis {
        engine.add_generator(&lattice_binomial(v, MonomialOrder::Grevlex).embed(n + 1, 1, elim));
    }
    let mut all = vec![1u32; n + 1];
    let one = vec![0u32; n + 1];
    all[0] = 1;
    let t_poly = Polynomial::from_terms(n + 1, elim, [(1, all), (-1, one)]).expect("valid");
    engine.add_generator(&t_poly);
    engine.complete()?;
    let mut gens: Vec<Polynomial> = engine
        .reduced_basis()
        .iter()
        .filter_map(|g| g.restrict(n, 1, MonomialOrder::Grevlex))
        .collect();
    gens.sort_by(|x, y| {
        MonomialOrder::Grevlex.cmp(x.lead_monomial().unwrap(), y.lead_monomial().unwrap())
    });
    Ok(gens)
}

/// Weighted degree of the leading monomial.
fn weighted_degree(g: &Polynomial, weights: &[i64]) -> i64 {
    g.lead_monomial().map_or(0, |m| monomial_weight(m, weights))
}

fn monomial_weight(m: &Exponent, weights: &[i64]) -> i64 {
    m.exps()
        .iter()
        .zip(weights)
        .map(|(&e, &w)| e as i64 * w)
        .sum()
}

/// A minimal generating set of a homogeneous ideal (under the positive
/// grading `weights`), extracted from any generating set `gens`.
///
/// Generators are visited by increasing weighted degree and kept when they
/// are not already in the ideal generated by the kept ones. Membership only
/// needs a Gröbner basis of the kept generators truncated at the degree of
/// the candidate, so `gens` must be homogeneous for `weights`.
pub fn minimal_generators(gens: &[Polynomial], weights: &[i64]) -> Vec<Polynomial> {
    let Some(first) = gens.iter().find(|g| !g.is_zero()) else {
        return Vec::new();
    };
    let order = first.order();
    let mut sorted: Vec<&Polynomial> = gens.iter().filter(|g| !g.is_zero()).collect();
    sorted.sort_by(|a, b| {
        weighted_degree(a, weights)
            .cmp(&weighted_degree(b, weights))
            .then_with(|| order.cmp(a.lead_monomial().unwrap(), b.lead_monomial().unwrap()))
    });
    let mut engine = Engine::new(first.nvars(), RunConfig::new(Strategy::Degree, order));
    let mut kept = Vec::new();
    for g in sorted {
        let bound = weighted_degree(g, weights);
        engine
            .complete_within(|lcm| monomial_weight(lcm, weights) <= bound)
            .expect("no budget configured");
        if normal_form(g, engine.basis()).remainder.is_zero() {
            continue;
        }
        kept.push(g.clone());
        engine.add_generator(g);
    }
    kept
}

/// True when every generator is a binomial `x^u - x^v` with `A u = A v`.
pub fn toric_membership_ok(a: &ToricMatrix, gens: &[Polynomial]) -> bool {
    gens.iter().all(|g| {
        let [t1, t2] = g.terms() else { return false };
        let u: Vec<i64> = t1.mono.exps().iter().map(|&e| e as i64).collect();
        let v: Vec<i64> = t2.mono.exps().iter().map(|&e| e as i64).collect();
        a.apply(&u) == a.apply(&v)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;

    fn p(text: &str, n: usize) -> Polynomial {
        Polynomial::parse(text, n, MonomialOrder::Grevlex).unwrap()
    }

    fn monic_sorted(mut v: Vec<Polynomial>) -> Vec<Polynomial> {
        v = v.iter().map(Polynomial::monic).collect();
        v.sort_by(|x, y| {
            MonomialOrder::Grevlex.cmp(x.lead_monomial().unwrap(), y.lead_monomial().unwrap())
        });
        v
    }

    #[test]
    fn spec_parsing() {
        let b: DistSpec = "3-20-10-weighted".parse().unwrap();
        assert_eq!(
            b,
            DistSpec::Binomial(BinomialDistSpec::new(3, 20, 10, SamplingMode::Weighted))
        );
        assert_eq!(
            b.to_json(),
            r#"{"kind":"binomial","n":3,"d":20,"s":10,"mode":"weighted"}"#
        );
        let t: DistSpec = r#"{"kind":"toric","D":6,"L":0,"U":5,"n":8}"#.parse().unwrap();
        assert_eq!(t, DistSpec::Toric(ToricDistSpec::new(6, 0, 5, 8)));
        assert_eq!(t.to_string(), "T(6,0,5,8)");
        assert_eq!("T(6,0,5,8)".parse::<DistSpec>().unwrap(), t);
        assert_eq!("6-0-5-8".parse::<DistSpec>().unwrap(), t);
        assert_eq!(b.to_string().parse::<DistSpec>().unwrap(), b);
        assert!("3-0-10-weighted".parse::<DistSpec>().is_err());
        assert!(matches!(
            "T(2,1,5,8)".parse::<DistSpec>(),
            Err(IdealError::Unsupported(_))
        ));
    }

    #[test]
    fn pool_size_matches_binomial_count() {
        // C(23, 3) - 1 monomials of degree 1..=20 in three variables
        let s =
            BinomialSampler::new(BinomialDistSpec::new(3, 20, 10, SamplingMode::Uniform)).unwrap();
        assert_eq!(s.pool_size(), 1770);
        let brute = (0..=20u32)
            .flat_map(|a| (0..=20u32).flat_map(move |b| (0..=20u32).map(move |c| a + b + c)))
            .filter(|&d| (1..=20).contains(&d))
            .count();
        assert_eq!(brute, 1770);
    }

    #[test]
    fn weighted_samples_respect_bounds() {
        let spec = BinomialDistSpec::new(3, 20, 10, SamplingMode::Weighted);
        let gens = sample_binomial_system(&spec, &mut seeded(3)).unwrap();
        assert_eq!(gens.len(), 10);
        for g in &gens {
            assert_eq!(g.len(), 2);
            assert!(g
                .terms()
                .iter()
                .all(|t| (1..=20).contains(&t.mono.degree())));
        }
    }

    #[test]
    fn degree_one_uses_only_variables() {
        let spec = BinomialDistSpec::new(3, 1, 4, SamplingMode::Uniform);
        for g in sample_binomial_system(&spec, &mut seeded(11)).unwrap() {
            assert!(g.terms().iter().all(|t| t.mono.degree() == 1));
        }
    }

    #[test]
    fn toric_entries_respect_bounds() {
        let spec = ToricDistSpec::new(2, 0, 5, 8);
        let a = sample_toric_entries(&spec, &mut seeded(5)).unwrap();
        assert_eq!((a.len(), a[0].len()), (2, 8));
        for c in 0..8 {
            let s: i64 = a.iter().map(|r| r[c]).sum();
            assert!((1..=5).contains(&s));
            assert!(a.iter().all(|r| r[c] >= 0));
        }
        let a = sample_toric_entries(&ToricDistSpec::new(1, 0, 1, 3), &mut seeded(1)).unwrap();
        assert_eq!(a, vec![vec![1, 1, 1]]);
        assert_eq!(admissible_columns(2, 5).len(), 20);
    }

    #[test]
    fn kernel_examples() {
        assert_eq!(lattice_kernel(&[vec![1, 1]]).unwrap(), vec![vec![1, -1]]);
        assert_eq!(
            lattice_kernel(&[vec![1, 1, 1], vec![0, 1, 2]]).unwrap(),
            vec![vec![1, -2, 1]]
        );
        let id = vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]];
        assert!(lattice_kernel(&id).unwrap().is_empty());
        assert_eq!(integer_rank(&id).unwrap(), 3);
    }

    #[test]
    fn kernel_overflow_is_reported() {
        let big = i64::MAX / 2;
        let a = vec![vec![big, big - 1, 3], vec![big - 7, 5, big]];
        match lattice_kernel(&a) {
            Err(IdealError::Overflow) => {}
            Ok(basis) => {
                for v in basis {
                    let checked: Option<i64> = a[0]
                        .iter()
                        .zip(&v)
                        .try_fold(0i64, |acc, (x, y)| acc.checked_add(x.checked_mul(*y)?));
                    assert_eq!(checked, Some(0));
                }
            }
            Err(e) => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn conic_toric_ideal() {
        let a = ToricMatrix::new(vec![vec![1, 1, 1], vec![0, 1, 2]]).unwrap();
        let gens = toric_ideal(&a, None).unwrap();
        assert_eq!(gens, monic_sorted(vec![p("x1*x3+-1*x2^2", 3)]));
        assert!(toric_membership_ok(&a, &gens));
    }

    #[test]
    fn injective_map_has_zero_toric_ideal() {
        let a = ToricMatrix::new(vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]).unwrap();
        assert!(toric_ideal(&a, None).unwrap().is_empty());
    }

    #[test]
    fn twisted_cubic_toric_ideal() {
        let a = ToricMatrix::new(vec![vec![3, 2, 1, 0], vec![0, 1, 2, 3]]).unwrap();
        let gens = toric_ideal(&a, None).unwrap();
        let expect = monic_sorted(vec![
            p("x1*x3+-1*x2^2", 4),
            p("x2*x4+-1*x3^2", 4),
            p("x1*x4+-1*x2*x3", 4),
        ]);
        assert_eq!(monic_sorted(gens.clone()), expect);
        assert_eq!(minimal_generators(&gens, &a.column_weights()).len(), 3);
    }

    #[test]
    fn minimal_generators_drop_redundant_members() {
        let a = ToricMatrix::new(vec![vec![3, 2, 1, 0], vec![0, 1, 2, 3]]).unwrap();
        let mut gens = toric_ideal(&a, None).unwrap();
        // add a redundant multiple
        gens.push(&gens[0] * &p("x1", 4));
        assert_eq!(minimal_generators(&gens, &a.column_weights()).len(), 3);
    }

    #[test]
    fn membership_check_rejects_non_members() {
        let a = ToricMatrix::new(vec![vec![1, 1, 1], vec![0, 1, 2]]).unwrap();
        assert!(!toric_membership_ok(&a, &[p("x1*x2+-1*x3^2", 3)]));
        assert!(!toric_membership_ok(&a, &[p("x1", 3)]));
    }
}
