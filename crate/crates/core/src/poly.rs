//! Sparse multivariate polynomials over GF(32003).
//!
//! Monomials are dense exponent vectors with at most [`MAX_VARS`] variables.
//! A [`Polynomial`] keeps its terms strictly decreasing under its
//! [`MonomialOrder`], with no zero coefficients.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Characteristic of the coefficient field.
pub const PRIME: u32 = 32003;

/// Largest variable count an [`Exponent`] can hold.
pub const MAX_VARS: usize = 16;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PolyError {
    #[error("dimension mismatch: expected {expected} variables, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("at most {MAX_VARS} variables are supported, got {0}")]
    TooManyVariables(usize),
    #[error("exponent {0} does not fit in 16 bits")]
    ExponentOverflow(u64),
    #[error("invalid argument: {0}")]
    InvalidArgument(&'static str),
    #[error("cannot parse polynomial: {0}")]
    Parse(String),
}

/// An element of GF(32003), stored as its canonical representative in `[0, p)`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Fp(u32);

impl Fp {
    pub const ZERO: Fp = Fp(0);
    pub const ONE: Fp = Fp(1);

    pub fn new(value: i64) -> Self {
        Fp(value.rem_euclid(PRIME as i64) as u32)
    }

    pub fn value(self) -> u32 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    /// Multiplicative inverse by the extended Euclidean algorithm.
    pub fn inv(self) -> Option<Fp> {
        if self.0 == 0 {
            return None;
        }
        let (mut r0, mut r1) = (PRIME as i64, self.0 as i64);
        let (mut t0, mut t1) = (0i64, 1i64);
        while r1 != 0 {
            let q = r0 / r1;
            (r0, r1) = (r1, r0 - q * r1);
            (t0, t1) = (t1, t0 - q * t1);
        }
        debug_assert_eq!(r0, 1);
        Some(Fp::new(t0))
    }
}

impl Add for Fp {
    type Output = Fp;
    fn add(self, rhs: Fp) -> Fp {
        let s = self.0 + rhs.0;
        Fp(if s >= PRIME { s - PRIME } else { s })
    }
}

impl Sub for Fp {
    type Output = Fp;
    fn sub(self, rhs: Fp) -> Fp {
        Fp(if self.0 >= rhs.0 {
            self.0 - rhs.0
        } else {
            self.0 + PRIME - rhs.0
        })
    }
}

impl Neg for Fp {
    type Output = Fp;
    fn neg(self) -> Fp {
        Fp(if self.0 == 0 { 0 } else { PRIME - self.0 })
    }
}

impl Mul for Fp {
    type Output = Fp;
    fn mul(self, rhs: Fp) -> Fp {
        Fp(((self.0 as u64 * rhs.0 as u64) % PRIME as u64) as u32)
    }
}

impl fmt::Display for Fp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Exponent vector of a monomial. Unused slots beyond `nvars` are always zero.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Exponent {
    nvars: u8,
    degree: u32,
    exps: [u16; MAX_VARS],
}

impl Exponent {
    pub fn new(exps: &[u32]) -> Result<Self, PolyError> {
        if exps.len() > MAX_VARS {
            return Err(PolyError::TooManyVariables(exps.len()));
        }
        let mut out = Exponent::one(exps.len());
        for (slot, &e) in out.exps.iter_mut().zip(exps) {
            *slot = u16::try_from(e).map_err(|_| PolyError::ExponentOverflow(e as u64))?;
            out.degree += e;
        }
        Ok(out)
    }

    /// The constant monomial 1 in `nvars` variables.
    pub fn one(nvars: usize) -> Self {
        assert!(nvars <= MAX_VARS, "too many variables");
        Exponent {
            nvars: nvars as u8,
            degree: 0,
            exps: [0; MAX_VARS],
        }
    }

    /// The monomial `x_var^power`.
    pub fn var(nvars: usize, var: usize, power: u16) -> Self {
        let mut e = Exponent::one(nvars);
        assert!(var < nvars);
        e.exps[var] = power;
        e.degree = power as u32;
        e
    }

    pub fn nvars(&self) -> usize {
        self.nvars as usize
    }

    pub fn exps(&self) -> &[u16] {
        &self.exps[..self.nvars as usize]
    }

    pub fn get(&self, var: usize) -> u16 {
        self.exps[var]
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn is_one(&self) -> bool {
        self.degree == 0
    }

    /// Bit `i` is set when variable `i` occurs.
    pub fn support(&self) -> u32 {
        self.exps()
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .fold(0, |acc, (i, _)| acc | (1 << i))
    }

    pub fn is_pure_power(&self) -> bool {
        self.support().count_ones() == 1
    }

    pub fn divides(&self, other: &Exponent) -> bool {
        self.degree <= other.degree && self.exps.iter().zip(&other.exps).all(|(a, b)| a <= b)
    }

    pub fn is_coprime(&self, other: &Exponent) -> bool {
        self.exps
            .iter()
            .zip(&other.exps)
            .all(|(&a, &b)| a == 0 || b == 0)
    }

    pub fn lcm(&self, other: &Exponent) -> Exponent {
        let mut out = *self;
        out.degree = 0;
        for (a, &b) in out.exps.iter_mut().zip(&other.exps) {
            *a = (*a).max(b);
            out.degree += *a as u32;
        }
        out
    }

    /// `self / other`, or `None` when `other` does not divide `self`.
    pub fn checked_div(&self, other: &Exponent) -> Option<Exponent> {
        if !other.divides(self) {
            return None;
        }
        let mut out = *self;
        for (a, &b) in out.exps.iter_mut().zip(&other.exps) {
            *a -= b;
        }
        out.degree -= other.degree;
        Some(out)
    }

    /// Re-embeds into a ring of `nvars` variables, placing this monomial's
    /// variables starting at `offset`.
    pub fn embed(&self, nvars: usize, offset: usize) -> Exponent {
        assert!(offset + self.nvars() <= nvars && nvars <= MAX_VARS);
        let mut out = Exponent::one(nvars);
        out.exps[offset..offset + self.nvars()].copy_from_slice(self.exps());
        out.degree = self.degree;
        out
    }
}

impl Mul for Exponent {
    type Output = Exponent;
    fn mul(self, rhs: Exponent) -> Exponent {
        debug_assert_eq!(self.nvars, rhs.nvars);
        let mut out = self;
        for (a, &b) in out.exps.iter_mut().zip(&rhs.exps) {
            *a += b;
        }
        out.degree += rhs.degree;
        out
    }
}

impl fmt::Debug for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.exps())
    }
}

/// Monomial orders supported by the arithmetic.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MonomialOrder {
    /// Graded reverse lexicographic.
    #[default]
    Grevlex,
    /// Block order: grevlex on the first `k` variables, ties broken by
    /// grevlex on the rest. Eliminates the first block.
    Elimination(usize),
}

fn grevlex_block(a: &[u16], b: &[u16]) -> Ordering {
    let da: u32 = a.iter().map(|&e| e as u32).sum();
    let db: u32 = b.iter().map(|&e| e as u32).sum();
    da.cmp(&db).then_with(|| {
        for (x, y) in a.iter().zip(b).rev() {
            if x != y {
                // smaller exponent in the last differing variable is larger
                return y.cmp(x);
            }
        }
        Ordering::Equal
    })
}

impl MonomialOrder {
    /// Compares two monomials of the same ring.
    pub fn cmp(&self, a: &Exponent, b: &Exponent) -> Ordering {
        debug_assert_eq!(a.nvars, b.nvars);
        match *self {
            MonomialOrder::Grevlex => a.degree.cmp(&b.degree).then_with(|| {
                for (x, y) in a.exps().iter().zip(b.exps()).rev() {
                    if x != y {
                        return y.cmp(x);
                    }
                }
                Ordering::Equal
            }),
            MonomialOrder::Elimination(k) => {
                let k = k.min(a.nvars());
                grevlex_block(&a.exps()[..k], &b.exps()[..k])
                    .then_with(|| grevlex_block(&a.exps()[k..], &b.exps()[k..]))
            }
        }
    }

    /// Like [`MonomialOrder::cmp`] but rejects monomials from different rings.
    pub fn try_cmp(&self, a: &Exponent, b: &Exponent) -> Result<Ordering, PolyError> {
        if a.nvars != b.nvars {
            return Err(PolyError::DimensionMismatch {
                expected: a.nvars(),
                found: b.nvars(),
            });
        }
        Ok(self.cmp(a, b))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Term {
    pub coeff: Fp,
    pub mono: Exponent,
}

/// A polynomial with terms sorted strictly decreasing under `order`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Polynomial {
    nvars: usize,
    order: MonomialOrder,
    terms: Vec<Term>,
}

impl Polynomial {
    pub fn zero(nvars: usize, order: MonomialOrder) -> Self {
        Polynomial {
            nvars,
            order,
            terms: Vec::new(),
        }
    }

    /// Builds a polynomial from arbitrary `(coefficient, exponents)` pairs,
    /// combining like terms and dropping zeros.
    pub fn from_terms<I, E>(nvars: usize, order: MonomialOrder, terms: I) -> Result<Self, PolyError>
    where
        I: IntoIterator<Item = (i64, E)>,
        E: AsRef<[u32]>,
    {
        let mut raw = Vec::new();
        for (c, e) in terms {
            let e = e.as_ref();
            if e.len() != nvars {
                return Err(PolyError::DimensionMismatch {
                    expected: nvars,
                    found: e.len(),
                });
            }
            raw.push(Term {
                coeff: Fp::new(c),
                mono: Exponent::new(e)?,
            });
        }
        Ok(Self::from_unsorted(nvars, order, raw))
    }

    pub(crate) fn from_unsorted(nvars: usize, order: MonomialOrder, mut raw: Vec<Term>) -> Self {
        raw.sort_by(|a, b| order.cmp(&b.mono, &a.mono));
        let mut terms: Vec<Term> = Vec::with_capacity(raw.len());
        for t in raw {
            match terms.last_mut() {
                Some(last) if last.mono == t.mono => last.coeff = last.coeff + t.coeff,
                _ => terms.push(t),
            }
        }
        terms.retain(|t| !t.coeff.is_zero());
        Polynomial {
            nvars,
            order,
            terms,
        }
    }

    pub fn monomial(coeff: Fp, mono: Exponent, order: MonomialOrder) -> Self {
        let terms = if coeff.is_zero() {
            Vec::new()
        } else {
            vec![Term { coeff, mono }]
        };
        Polynomial {
            nvars: mono.nvars(),
            order,
            terms,
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn order(&self) -> MonomialOrder {
        self.order
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn lead_term(&self) -> Option<&Term> {
        self.terms.first()
    }

    pub fn lead_monomial(&self) -> Option<&Exponent> {
        self.terms.first().map(|t| &t.mono)
    }

    /// Total degree, i.e. the largest degree among the terms. Zero for the zero polynomial.
    pub fn degree(&self) -> u32 {
        self.terms
            .iter()
            .map(|t| t.mono.degree())
            .max()
            .unwrap_or(0)
    }

    pub fn scale(&self, c: Fp) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero(self.nvars, self.order);
        }
        let terms = self
            .terms
            .iter()
            .map(|t| Term {
                coeff: t.coeff * c,
                mono: t.mono,
            })
            .collect();
        Polynomial {
            nvars: self.nvars,
            order: self.order,
            terms,
        }
    }

    /// Scales so the leading coefficient is one.
    pub fn monic(&self) -> Polynomial {
        match self.lead_term() {
            Some(t) if t.coeff != Fp::ONE => self.scale(t.coeff.inv().expect("nonzero lead")),
            _ => self.clone(),
        }
    }

    /// `c * m * self`. Multiplication by a monomial preserves term order.
    pub fn mul_term(&self, c: Fp, m: &Exponent) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero(self.nvars, self.order);
        }
        let terms = self
            .terms
            .iter()
            .map(|t| Term {
                coeff: t.coeff * c,
                mono: t.mono * *m,
            })
            .collect();
        Polynomial {
            nvars: self.nvars,
            order: self.order,
            terms,
        }
    }

    /// Same polynomial, re-sorted under another order.
    pub fn with_order(&self, order: MonomialOrder) -> Polynomial {
        Self::from_unsorted(self.nvars, order, self.terms.clone())
    }

    /// Re-embeds into `nvars` variables, shifting variable indices by `offset`.
    pub fn embed(&self, nvars: usize, offset: usize, order: MonomialOrder) -> Polynomial {
        let terms = self
            .terms
            .iter()
            .map(|t| Term {
                coeff: t.coeff,
                mono: t.mono.embed(nvars, offset),
            })
            .collect();
        Self::from_unsorted(nvars, order, terms)
    }

    /// Projects onto the variables `offset..offset + nvars`, or `None` if
    /// some term uses a variable outside that window.
    pub fn restrict(
        &self,
        nvars: usize,
        offset: usize,
        order: MonomialOrder,
    ) -> Option<Polynomial> {
        let mut terms = Vec::with_capacity(self.terms.len());
        for t in &self.terms {
            let e = t.mono.exps();
            let outside = e[..offset]
                .iter()
                .chain(&e[offset + nvars..])
                .any(|&x| x > 0);
            if outside {
                return None;
            }
            let inner: Vec<u32> = e[offset..offset + nvars]
                .iter()
                .map(|&x| x as u32)
                .collect();
            terms.push(Term {
                coeff: t.coeff,
                mono: Exponent::new(&inner).ok()?,
            });
        }
        Some(Self::from_unsorted(nvars, order, terms))
    }

    fn check_compatible(&self, other: &Polynomial) {
        debug_assert_eq!(self.nvars, other.nvars, "polynomials from different rings");
        debug_assert_eq!(
            self.order, other.order,
            "polynomials under different orders"
        );
    }

    /// `self - c * m * g`, skipping the first `skip_self`/`skip_g` terms of
    /// each operand. Used by reduction, where the leading terms are known to
    /// cancel.
    fn sub_scaled_from(
        &self,
        skip_self: usize,
        c: Fp,
        m: &Exponent,
        g: &Polynomial,
        skip_g: usize,
    ) -> Vec<Term> {
        let a = &self.terms[skip_self..];
        let b = &g.terms[skip_g..];
        let neg_c = -c;
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            let bm = b[j].mono * *m;
            match self.order.cmp(&a[i].mono, &bm) {
                Ordering::Greater => {
                    out.push(a[i]);
                    i += 1;
                }
                Ordering::Less => {
                    out.push(Term {
                        coeff: b[j].coeff * neg_c,
                        mono: bm,
                    });
                    j += 1;
                }
                Ordering::Equal => {
                    let coeff = a[i].coeff + b[j].coeff * neg_c;
                    if !coeff.is_zero() {
                        out.push(Term { coeff, mono: bm });
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend(b[j..].iter().map(|t| Term {
            coeff: t.coeff * neg_c,
            mono: t.mono * *m,
        }));
        out
    }

    fn merge(&self, other: &Polynomial, negate_other: bool) -> Polynomial {
        self.check_compatible(other);
        let one = Exponent::one(self.nvars);
        let c = if negate_other { Fp::ONE } else { -Fp::ONE };
        let terms = self.sub_scaled_from(0, c, &one, other, 0);
        Polynomial {
            nvars: self.nvars,
            order: self.order,
            terms,
        }
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        self.merge(rhs, false)
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        self.merge(rhs, true)
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        self.scale(-Fp::ONE)
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        self.check_compatible(rhs);
        let mut acc = Polynomial::zero(self.nvars, self.order);
        for t in &rhs.terms {
            acc = &acc + &self.mul_term(t.coeff, &t.mono);
        }
        acc
    }
}

/// Sum of two polynomials over the same ring and order.
pub fn poly_add(p: &Polynomial, q: &Polynomial) -> Polynomial {
    p + q
}

/// The S-polynomial `(L/LT(f)) f - (L/LT(g)) g` with `L = lcm(LM(f), LM(g))`.
pub fn s_polynomial(f: &Polynomial, g: &Polynomial) -> Result<Polynomial, PolyError> {
    let (Some(tf), Some(tg)) = (f.lead_term(), g.lead_term()) else {
        return Err(PolyError::InvalidArgument(
            "S-polynomial of a zero polynomial",
        ));
    };
    if f.nvars != g.nvars {
        return Err(PolyError::DimensionMismatch {
            expected: f.nvars,
            found: g.nvars,
        });
    }
    let lcm = tf.mono.lcm(&tg.mono);
    let mf = lcm.checked_div(&tf.mono).expect("lcm is a multiple");
    let mg = lcm.checked_div(&tg.mono).expect("lcm is a multiple");
    let cf = tf.coeff.inv().expect("nonzero lead");
    let cg = tg.coeff.inv().expect("nonzero lead");
    let left = f.mul_term(cf, &mf);
    // leading terms cancel exactly, so skip them in the merge
    let terms = left.sub_scaled_from(1, cg, &mg, g, 1);
    Ok(Polynomial {
        nvars: f.nvars,
        order: f.order,
        terms,
    })
}

/// One recorded reduction step: `quotient_term * divisors[divisor]` was subtracted.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ReductionStep {
    pub divisor: usize,
    pub quotient: Term,
}

/// Result of dividing a polynomial by a list of divisors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Reduction {
    pub remainder: Polynomial,
    /// Number of elementary reduction steps performed.
    pub additions: u64,
}

/// Fully reduces `f` by `divisors`, always dividing by the first divisor
/// (by index) whose leading monomial divides the current term.
///
/// Every term of the remainder is irreducible, not only the leading one.
/// Zero divisors are ignored.
pub fn normal_form(f: &Polynomial, divisors: &[Polynomial]) -> Reduction {
    reduce_impl(f, divisors, None)
}

/// [`normal_form`] that also records each subtracted quotient term.
pub fn normal_form_traced(
    f: &Polynomial,
    divisors: &[Polynomial],
) -> (Reduction, Vec<ReductionStep>) {
    let mut trail = Vec::new();
    let red = reduce_impl(f, divisors, Some(&mut trail));
    (red, trail)
}

pub(crate) fn reduce_impl(
    f: &Polynomial,
    divisors: &[Polynomial],
    mut trail: Option<&mut Vec<ReductionStep>>,
) -> Reduction {
    let leads: Vec<Option<(Exponent, Fp)>> = divisors
        .iter()
        .map(|g| {
            g.lead_term()
                .map(|t| (t.mono, t.coeff.inv().expect("nonzero lead")))
        })
        .collect();
    let mut work = f.clone();
    let mut pos = 0;
    let mut remainder = Vec::new();
    let mut additions = 0;
    while pos < work.terms.len() {
        let lt = work.terms[pos];
        let hit = leads.iter().enumerate().find_map(|(i, lead)| {
            let (lm, lc_inv) = lead.as_ref()?;
            lt.mono.checked_div(lm).map(|q| (i, q, lt.coeff * *lc_inv))
        });
        match hit {
            Some((i, q, c)) => {
                let terms = work.sub_scaled_from(pos + 1, c, &q, &divisors[i], 1);
                work.terms = terms;
                pos = 0;
                additions += 1;
                if let Some(trail) = trail.as_deref_mut() {
                    trail.push(ReductionStep {
                        divisor: i,
                        quotient: Term { coeff: c, mono: q },
                    });
                }
            }
            None => {
                remainder.push(lt);
                pos += 1;
            }
        }
    }
    Reduction {
        remainder: Polynomial {
            nvars: f.nvars,
            order: f.order,
            terms: remainder,
        },
        additions,
    }
}

impl fmt::Display for Polynomial {
    /// Renders as `c*x1^a1*...*xn^an` terms joined by `+`; the zero
    /// polynomial is `0`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, t) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, "+")?;
            }
            write!(f, "{}", t.coeff)?;
            for (i, e) in t.mono.exps().iter().enumerate() {
                write!(f, "*x{}^{}", i + 1, e)?;
            }
        }
        Ok(())
    }
}

impl Polynomial {
    /// Parses the text rendering produced by `Display`. Variables absent
    /// from a term have exponent zero, and a bare coefficient is a constant.
    pub fn parse(text: &str, nvars: usize, order: MonomialOrder) -> Result<Polynomial, PolyError> {
        let text: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        if text == "0" {
            return Ok(Polynomial::zero(nvars, order));
        }
        let bad = |msg: String| PolyError::Parse(msg);
        let mut terms = Vec::new();
        let mut signed = String::with_capacity(text.len() + 8);
        for (i, c) in text.char_indices() {
            if c == '-' && i > 0 && !text[..i].ends_with('+') {
                signed.push('+');
            }
            signed.push(c);
        }
        for chunk in signed.split('+') {
            let mut exps = vec![0u32; nvars];
            let (mut coeff, chunk) = match chunk.strip_prefix('-') {
                Some(rest) => (-1i64, rest),
                None => (1i64, chunk),
            };
            for factor in chunk.split('*') {
                if let Some(var) = factor.strip_prefix('x') {
                    let (idx, pow) = match var.split_once('^') {
                        Some((i, p)) => (
                            i,
                            p.parse::<u32>()
                                .map_err(|e| bad(format!("{factor}: {e}")))?,
                        ),
                        None => (var, 1),
                    };
                    let idx: usize = idx.parse().map_err(|e| bad(format!("{factor}: {e}")))?;
                    if idx == 0 || idx > nvars {
                        return Err(bad(format!("variable index {idx} out of range")));
                    }
                    exps[idx - 1] += pow;
                } else {
                    let c: i64 = factor.parse().map_err(|e| bad(format!("{factor}: {e}")))?;
                    coeff *= c;
                }
            }
            terms.push((coeff, exps));
        }
        Polynomial::from_terms(nvars, order, terms)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(v: &[u32]) -> Exponent {
        Exponent::new(v).unwrap()
    }

    fn p3(text: &str) -> Polynomial {
        Polynomial::parse(text, 3, MonomialOrder::Grevlex).unwrap()
    }

    #[test]
    fn grevlex_examples() {
        let g = MonomialOrder::Grevlex;
        assert_eq!(g.cmp(&e(&[2, 0, 0]), &e(&[1, 1, 0])), Ordering::Greater);
        assert_eq!(g.cmp(&e(&[0, 2, 0]), &e(&[1, 0, 1])), Ordering::Greater);
        assert_eq!(g.cmp(&e(&[1, 1, 1]), &e(&[1, 1, 1])), Ordering::Equal);
    }

    #[test]
    fn try_cmp_rejects_length_mismatch() {
        let err = MonomialOrder::Grevlex
            .try_cmp(&e(&[1, 0]), &e(&[1, 0, 0]))
            .unwrap_err();
        assert_eq!(
            err,
            PolyError::DimensionMismatch {
                expected: 2,
                found: 3
            }
        );
    }

    #[test]
    fn elimination_order_prefers_first_block() {
        let o = MonomialOrder::Elimination(1);
        // t beats any power of x
        assert_eq!(o.cmp(&e(&[1, 0, 0]), &e(&[0, 9, 9])), Ordering::Greater);
        // same t-part falls back to grevlex on the rest
        assert_eq!(o.cmp(&e(&[1, 0, 2]), &e(&[1, 1, 1])), Ordering::Less);
    }

    #[test]
    fn field_inverse() {
        for v in [1i64, 2, 3, 16001, 32002] {
            let a = Fp::new(v);
            assert_eq!(a * a.inv().unwrap(), Fp::ONE);
        }
        assert_eq!(Fp::ZERO.inv(), None);
        assert_eq!(Fp::new(-1).value(), PRIME - 1);
    }

    #[test]
    fn add_examples() {
        assert_eq!(&p3("x1^2+-1*x2") + &p3("x2+-1*x3"), p3("x1^2+-1*x3"));
        let p = p3("3*x1*x2+5");
        assert_eq!(&p + &Polynomial::zero(3, MonomialOrder::Grevlex), p);
        assert_eq!(&p3("x1+x2") + &p3("x1+x2"), p3("2*x1+2*x2"));
    }

    #[test]
    fn s_polynomial_examples() {
        let s = s_polynomial(&p3("x1^2+-1*x2"), &p3("x1*x2+-1*x3")).unwrap();
        assert_eq!(s, p3("x1*x3+-1*x2^2"));
        let f = p3("x1^2+-1*x2");
        assert!(s_polynomial(&f, &f).unwrap().is_zero());
        assert!(s_polynomial(&p3("x1^2"), &p3("x2^2")).unwrap().is_zero());
        let zero = Polynomial::zero(3, MonomialOrder::Grevlex);
        assert!(matches!(
            s_polynomial(&zero, &f),
            Err(PolyError::InvalidArgument(_))
        ));
    }

    #[test]
    fn normal_form_examples() {
        let g = vec![p3("x1^2+-1*x2"), p3("x1*x2+-1*x3")];
        let f = p3("x1*x3+-1*x2^2");
        let red = normal_form(&f, &g);
        assert_eq!(red.remainder, f);
        assert_eq!(red.additions, 0);

        let red = normal_form(&g[1], &g);
        assert!(red.remainder.is_zero());
        assert_eq!(red.additions, 1);
    }

    #[test]
    fn normal_form_twisted_cubic_member() {
        // x^3 z - y^3 = xz(x^2 - y) - y(y^2 - xz); under grevlex y^3 > xyz, so
        // the second step cancels everything.
        let g = vec![p3("x1^2+-1*x2"), p3("x1*x2+-1*x3"), p3("x2^2+-1*x1*x3")];
        let (red, trail) = normal_form_traced(&p3("x1^3*x3+-1*x2^3"), &g);
        assert!(red.remainder.is_zero());
        assert_eq!(red.additions, 2);
        assert_eq!(
            trail.iter().map(|s| s.divisor).collect::<Vec<_>>(),
            vec![0, 2]
        );
    }

    #[test]
    fn display_and_parse_round_trip() {
        let p = p3("x1^2*x3+32002*x2+7");
        assert_eq!(
            p.to_string(),
            "1*x1^2*x2^0*x3^1+32002*x1^0*x2^1*x3^0+7*x1^0*x2^0*x3^0"
        );
        assert_eq!(p3(&p.to_string()), p);
        assert_eq!(Polynomial::zero(3, MonomialOrder::Grevlex).to_string(), "0");
        assert!(Polynomial::parse("x4", 3, MonomialOrder::Grevlex).is_err());
        assert_eq!(p3("-x1*x3+x2^2"), p3("x2^2+-1*x1*x3"));
        assert_eq!(p3("x1-2*x2-x3"), p3("x1+32001*x2+32002*x3"));
        assert!(Polynomial::parse("x1-", 3, MonomialOrder::Grevlex).is_err());
    }
}
