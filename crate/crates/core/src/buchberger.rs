//! Buchberger's algorithm with pluggable S-pair selection and
//! Gebauer–Möller pair elimination, instrumented to count polynomial
//! additions.
//!
//! One S-polynomial construction counts as one addition, and so does each
//! elementary reduction step of the subsequent normal form. The final
//! interreduction that produces the reduced basis is not counted.
//!
//! Reduction divides by the basis elements in increasing order of their
//! leading monomials, so each step uses the smallest applicable lead.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::poly::{normal_form, s_polynomial, Exponent, MonomialOrder, PolyError, Polynomial};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GbError {
    #[error("pair queue is empty")]
    EmptyQueue,
    #[error("pair budget of {budget} exceeded")]
    BudgetExceeded { budget: u64 },
    #[error("no generators given")]
    NoGenerators,
    #[error("unknown selection strategy {0:?}")]
    UnknownStrategy(String),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// S-pair selection strategy.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    /// Oldest pair first.
    First,
    /// Smallest lcm total degree.
    #[default]
    Degree,
    /// Smallest lcm in the monomial order.
    Normal,
    /// Smallest sugar degree, ties broken as in `Normal`.
    Sugar,
}

impl Strategy {
    pub const ALL: [Strategy; 4] = [
        Strategy::First,
        Strategy::Degree,
        Strategy::Normal,
        Strategy::Sugar,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Strategy::First => "first",
            Strategy::Degree => "degree",
            Strategy::Normal => "normal",
            Strategy::Sugar => "sugar",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Strategy {
    type Err = GbError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Strategy::ALL
            .into_iter()
            .find(|st| st.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| GbError::UnknownStrategy(s.to_string()))
    }
}

/// A pending pair of basis indices `i < j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SPair {
    pub i: usize,
    pub j: usize,
    pub lcm: Exponent,
    pub degree: u32,
    pub sugar: u32,
    pub seq: u64,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunStats {
    pub polynomial_additions: u64,
    pub pairs_processed: u64,
    pub zero_reductions: u64,
    pub nonzero_reductions: u64,
    pub gb_size: u64,
    pub gb_max_degree: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RunConfig {
    pub strategy: Strategy,
    pub order: MonomialOrder,
    /// Gebauer–Möller and coprime-lead pair elimination.
    pub pair_elimination: bool,
    /// Maximum number of pairs to process before giving up.
    pub pair_budget: Option<u64>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            strategy: Strategy::Degree,
            order: MonomialOrder::Grevlex,
            pair_elimination: true,
            pair_budget: None,
        }
    }
}

impl RunConfig {
    pub fn new(strategy: Strategy, order: MonomialOrder) -> Self {
        RunConfig {
            strategy,
            order,
            ..Default::default()
        }
    }
}

/// Removes and returns the pair chosen by `strategy`.
pub fn select_pair(
    queue: &mut Vec<SPair>,
    strategy: Strategy,
    order: MonomialOrder,
) -> Result<SPair, GbError> {
    let key = |a: &SPair, b: &SPair| -> Ordering {
        match strategy {
            Strategy::First => a.seq.cmp(&b.seq),
            Strategy::Degree => a.degree.cmp(&b.degree).then(a.seq.cmp(&b.seq)),
            Strategy::Normal => order.cmp(&a.lcm, &b.lcm).then(a.seq.cmp(&b.seq)),
            Strategy::Sugar => a
                .sugar
                .cmp(&b.sugar)
                .then_with(|| order.cmp(&a.lcm, &b.lcm))
                .then(a.seq.cmp(&b.seq)),
        }
    };
    let idx = queue
        .iter()
        .enumerate()
        .min_by(|(_, a), (_, b)| key(a, b))
        .map(|(i, _)| i)
        .ok_or(GbError::EmptyQueue)?;
    Ok(queue.swap_remove(idx))
}

/// Incremental Buchberger state: a growing basis and its pending pairs.
#[derive(Clone, Debug)]
pub struct Engine {
    config: RunConfig,
    nvars: usize,
    basis: Vec<Polynomial>,
    /// The basis sorted by increasing leading monomial.
    reducers: Vec<Polynomial>,
    leads: Vec<Exponent>,
    sugars: Vec<u32>,
    queue: Vec<SPair>,
    next_seq: u64,
    stats: RunStats,
}

impl Engine {
    pub fn new(nvars: usize, config: RunConfig) -> Self {
        Engine {
            config,
            nvars,
            basis: Vec::new(),
            reducers: Vec::new(),
            leads: Vec::new(),
            sugars: Vec::new(),
            queue: Vec::new(),
            next_seq: 0,
            stats: RunStats::default(),
        }
    }

    pub fn basis(&self) -> &[Polynomial] {
        &self.basis
    }

    pub fn queue(&self) -> &[SPair] {
        &self.queue
    }

    pub fn stats(&self) -> &RunStats {
        &self.stats
    }

    /// Adds an input generator; its sugar is its total degree. Zero
    /// polynomials are ignored.
    pub fn add_generator(&mut self, f: &Polynomial) {
        if f.is_zero() {
            return;
        }
        let f = if f.order() == self.config.order {
            f.monic()
        } else {
            f.with_order(self.config.order).monic()
        };
        let sugar = f.degree();
        self.update_pairs(f, sugar);
    }

    /// Appends `f` to the basis and queues the pairs it forms with earlier
    /// elements that survive the elimination criteria.
    pub fn update_pairs(&mut self, f: Polynomial, sugar: u32) {
        let lm = *f
            .lead_monomial()
            .expect("update_pairs needs a nonzero polynomial");
        let k = self.basis.len();
        let order = self.config.order;
        let mut fresh: Vec<usize> = Vec::new();

        if self.config.pair_elimination {
            let leads = &self.leads;
            // B: drop old pairs whose lcm is a multiple of lm, unless lm
            // shares that lcm with one of the pair's leads.
            self.queue.retain(|p| {
                !(lm.divides(&p.lcm)
                    && p.lcm != leads[p.i].lcm(&lm)
                    && p.lcm != leads[p.j].lcm(&lm))
            });

            let mut cands: Vec<(Exponent, usize)> =
                (0..k).map(|i| (leads[i].lcm(&lm), i)).collect();
            cands.sort_by(|a, b| order.cmp(&a.0, &b.0).then(a.1.cmp(&b.1)));
            let mut minimal: Vec<Exponent> = Vec::new();
            let mut start = 0;
            while start < cands.len() {
                let gam = cands[start].0;
                let end = start + cands[start..].iter().take_while(|c| c.0 == gam).count();
                // M: a strictly smaller lcm dividing gam makes the whole group redundant
                if !minimal.iter().any(|m| m.divides(&gam)) {
                    minimal.push(gam);
                    // F keeps one representative; coprime leads kill the group
                    let coprime = cands[start..end]
                        .iter()
                        .any(|&(_, i)| leads[i].is_coprime(&lm));
                    if !coprime {
                        fresh.push(cands[start].1);
                    }
                }
                start = end;
            }
            fresh.sort_unstable();
        } else {
            fresh.extend(0..k);
        }

        let fdeg = lm.degree();
        for i in fresh {
            let lcm = self.leads[i].lcm(&lm);
            let d = lcm.degree();
            let si = self.sugars[i] + d - self.leads[i].degree();
            let sj = sugar + d - fdeg;
            self.queue.push(SPair {
                i,
                j: k,
                lcm,
                degree: d,
                sugar: si.max(sj),
                seq: self.next_seq,
            });
            self.next_seq += 1;
        }
        let at = self
            .reducers
            .partition_point(|g| order.cmp(g.lead_monomial().unwrap(), &lm) != Ordering::Greater);
        self.reducers.insert(at, f.clone());
        self.basis.push(f);
        self.leads.push(lm);
        self.sugars.push(sugar);
    }

    /// Processes one pair. Returns `false` once the queue is empty.
    pub fn step(&mut self) -> Result<bool, GbError> {
        if self.queue.is_empty() {
            return Ok(false);
        }
        if let Some(budget) = self.config.pair_budget {
            if self.stats.pairs_processed >= budget {
                return Err(GbError::BudgetExceeded { budget });
            }
        }
        let p = select_pair(&mut self.queue, self.config.strategy, self.config.order)?;
        let s = s_polynomial(&self.basis[p.i], &self.basis[p.j])?;
        let red = normal_form(&s, &self.reducers);
        self.stats.pairs_processed += 1;
        self.stats.polynomial_additions += 1 + red.additions;
        if red.remainder.is_zero() {
            self.stats.zero_reductions += 1;
        } else {
            self.stats.nonzero_reductions += 1;
            self.update_pairs(red.remainder.monic(), p.sugar);
        }
        Ok(true)
    }

    /// Runs until every pair has been processed.
    pub fn complete(&mut self) -> Result<(), GbError> {
        while self.step()? {}
        Ok(())
    }

    /// Processes the pairs whose lcm satisfies `within`, including those
    /// created along the way, and leaves the others queued. For a homogeneous
    /// ideal and a degree bound this yields a Gröbner basis truncated at
    /// that degree.
    pub fn complete_within(&mut self, within: impl Fn(&Exponent) -> bool) -> Result<(), GbError> {
        let mut deferred = Vec::new();
        loop {
            let (now, later): (Vec<SPair>, Vec<SPair>) =
                self.queue.drain(..).partition(|p| within(&p.lcm));
            self.queue = now;
            deferred.extend(later);
            if !self.step()? {
                break;
            }
        }
        self.queue = deferred;
        Ok(())
    }

    /// The unique reduced Gröbner basis of the current basis (valid after
    /// [`Engine::complete`]).
    pub fn reduced_basis(&self) -> Vec<Polynomial> {
        reduce_basis(&self.basis)
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }
}

/// Turns a Gröbner basis into the reduced one: monic, minimal, interreduced,
/// sorted by increasing leading monomial.
pub fn reduce_basis(basis: &[Polynomial]) -> Vec<Polynomial> {
    let polys: Vec<Polynomial> = basis
        .iter()
        .filter(|g| !g.is_zero())
        .map(Polynomial::monic)
        .collect();
    let Some(first) = polys.first() else {
        return Vec::new();
    };
    let order = first.order();
    let mut keep: Vec<Polynomial> = Vec::new();
    for (i, g) in polys.iter().enumerate() {
        let lm = g.lead_monomial().unwrap();
        let redundant = polys.iter().enumerate().any(|(j, h)| {
            let hm = h.lead_monomial().unwrap();
            j != i && hm.divides(lm) && (hm != lm || j < i)
        });
        if !redundant {
            keep.push(g.clone());
        }
    }
    let mut reduced = Vec::with_capacity(keep.len());
    for i in 0..keep.len() {
        let others: Vec<Polynomial> = keep
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, h)| h.clone())
            .collect();
        reduced.push(normal_form(&keep[i], &others).remainder.monic());
    }
    reduced.sort_by(|a, b| order.cmp(a.lead_monomial().unwrap(), b.lead_monomial().unwrap()));
    reduced
}

/// Runs Buchberger's algorithm and returns the reduced Gröbner basis
/// together with the instrumentation counters.
pub fn run(
    generators: &[Polynomial],
    strategy: Strategy,
    order: MonomialOrder,
) -> Result<(Vec<Polynomial>, RunStats), GbError> {
    run_with(generators, &RunConfig::new(strategy, order))
}

pub fn run_with(
    generators: &[Polynomial],
    config: &RunConfig,
) -> Result<(Vec<Polynomial>, RunStats), GbError> {
    let first = generators.first().ok_or(GbError::NoGenerators)?;
    let mut engine = Engine::new(first.nvars(), *config);
    for g in generators {
        if g.nvars() != first.nvars() {
            return Err(PolyError::DimensionMismatch {
                expected: first.nvars(),
                found: g.nvars(),
            }
            .into());
        }
        engine.add_generator(g);
    }
    engine.complete()?;
    let gb = engine.reduced_basis();
    let mut stats = engine.stats.clone();
    stats.gb_size = gb.len() as u64;
    stats.gb_max_degree = gb.iter().map(Polynomial::degree).max().unwrap_or(0);
    Ok((gb, stats))
}

/// True when every S-pair of `basis` reduces to zero modulo `basis`.
pub fn is_groebner_basis(basis: &[Polynomial]) -> bool {
    for (i, f) in basis.iter().enumerate() {
        for g in &basis[i + 1..] {
            match s_polynomial(f, g) {
                Ok(s) if !normal_form(&s, basis).remainder.is_zero() => return false,
                Err(_) => return false,
                _ => {}
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p3(text: &str) -> Polynomial {
        Polynomial::parse(text, 3, MonomialOrder::Grevlex).unwrap()
    }

    fn pair(seq: u64, degree: u32) -> SPair {
        let lcm = Exponent::var(3, 0, degree as u16);
        SPair {
            i: 0,
            j: 1,
            lcm,
            degree,
            sugar: degree,
            seq,
        }
    }

    #[test]
    fn select_by_degree() {
        let mut q = vec![pair(0, 5), pair(1, 3), pair(2, 4)];
        let p = select_pair(&mut q, Strategy::Degree, MonomialOrder::Grevlex).unwrap();
        assert_eq!(p.degree, 3);
        assert_eq!(q.len(), 2);
    }

    #[test]
    fn ties_go_to_the_oldest_pair() {
        for st in [Strategy::First, Strategy::Degree] {
            let mut q = vec![pair(7, 4), pair(3, 4)];
            assert_eq!(
                select_pair(&mut q, st, MonomialOrder::Grevlex).unwrap().seq,
                3
            );
        }
    }

    #[test]
    fn singleton_queue() {
        for st in Strategy::ALL {
            let mut q = vec![pair(0, 2)];
            assert_eq!(
                select_pair(&mut q, st, MonomialOrder::Grevlex).unwrap().seq,
                0
            );
            assert!(q.is_empty());
            assert_eq!(
                select_pair(&mut q, st, MonomialOrder::Grevlex),
                Err(GbError::EmptyQueue)
            );
        }
    }

    #[test]
    fn strategy_names_parse() {
        for st in Strategy::ALL {
            assert_eq!(st.to_string().parse::<Strategy>().unwrap(), st);
        }
        assert!("random".parse::<Strategy>().is_err());
    }

    fn engine_with(gens: &[&str]) -> Engine {
        let mut e = Engine::new(3, RunConfig::default());
        for g in gens {
            e.add_generator(&p3(g));
        }
        e
    }

    #[test]
    fn coprime_leads_are_culled() {
        let e = engine_with(&["x1^2", "x2^2"]);
        assert!(e.queue().is_empty());
    }

    #[test]
    fn shared_variable_pair_survives() {
        let e = engine_with(&["x1^2+-1*x2", "x1*x2+-1*x3"]);
        assert_eq!(e.queue().len(), 1);
    }

    #[test]
    fn chain_criterion_culls_dominated_pair() {
        let e = engine_with(&["x1^2*x2", "x1*x2^2", "x2^3"]);
        let pairs: Vec<(usize, usize)> = e.queue().iter().map(|p| (p.i, p.j)).collect();
        assert_eq!(pairs, vec![(0, 1), (1, 2)]);
    }

    #[test]
    fn twisted_cubic_basis() {
        let (gb, stats) = run(
            &[p3("x1^2+-1*x2"), p3("x1*x2+-1*x3")],
            Strategy::Degree,
            MonomialOrder::Grevlex,
        )
        .unwrap();
        let mut expect = vec![p3("x1^2+-1*x2"), p3("x1*x2+-1*x3"), p3("x2^2+-1*x1*x3")];
        expect.sort_by(|a, b| {
            MonomialOrder::Grevlex.cmp(a.lead_monomial().unwrap(), b.lead_monomial().unwrap())
        });
        assert_eq!(gb, expect);
        assert_eq!(stats.gb_size, 3);
        assert!(stats.polynomial_additions >= stats.pairs_processed);
        assert_eq!(
            stats.pairs_processed,
            stats.zero_reductions + stats.nonzero_reductions
        );
    }

    #[test]
    fn degree_bounded_completion_defers_higher_pairs() {
        let gens = ["x1^2+-1*x2*x3", "x1*x2+-1*x3^2"];
        let mut e = engine_with(&gens);
        e.complete_within(|lcm| lcm.degree() <= 2).unwrap();
        assert_eq!(e.stats().pairs_processed, 0);
        assert_eq!(e.queue().len(), 1);
        e.complete_within(|lcm| lcm.degree() <= 3).unwrap();
        assert!(e.stats().pairs_processed > 0);
        assert!(e.queue().iter().all(|p| p.degree > 3));
        e.complete_within(|_| true).unwrap();
        assert!(e.queue().is_empty());
        let (gb, _) = run(&gens.map(p3), Strategy::Degree, MonomialOrder::Grevlex).unwrap();
        assert_eq!(e.reduced_basis(), gb);
    }

    #[test]
    fn single_generator_needs_no_work() {
        let (gb, stats) = run(&[p3("x1^2")], Strategy::Degree, MonomialOrder::Grevlex).unwrap();
        assert_eq!(gb, vec![p3("x1^2")]);
        assert_eq!(stats.polynomial_additions, 0);
        assert_eq!(stats.pairs_processed, 0);
    }

    #[test]
    fn linear_chain() {
        let (gb, stats) = run(
            &[p3("x1+-1*x2"), p3("x2+-1*x3")],
            Strategy::Degree,
            MonomialOrder::Grevlex,
        )
        .unwrap();
        assert_eq!(gb, vec![p3("x2+-1*x3"), p3("x1+-1*x3")]);
        assert!(stats.pairs_processed <= 1);
    }

    #[test]
    fn unit_ideal_collapses() {
        let (gb, _) = run(
            &[p3("x1+-1"), p3("x1+-2")],
            Strategy::Degree,
            MonomialOrder::Grevlex,
        )
        .unwrap();
        assert_eq!(gb, vec![p3("1")]);
    }

    #[test]
    fn budget_is_enforced() {
        let gens = [p3("x1^2+-1*x2"), p3("x1*x2+-1*x3")];
        let cfg = RunConfig {
            pair_budget: Some(0),
            ..Default::default()
        };
        assert_eq!(
            run_with(&gens, &cfg).unwrap_err(),
            GbError::BudgetExceeded { budget: 0 }
        );
    }

    #[test]
    fn no_generators_is_an_error() {
        assert_eq!(
            run(&[], Strategy::First, MonomialOrder::Grevlex).unwrap_err(),
            GbError::NoGenerators
        );
    }
}
