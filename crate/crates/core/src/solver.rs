//! Inner/outer pavers: the inner propagation algorithm built on inner
//! contracting operators, plus the subpaving (SIVIA) and evaluation-based
//! (JLA) baselines.
//!
//! All three run on one explicit worklist. A LIFO discipline with widest-first
//! splitting gives the depth-first schedule; a FIFO discipline with
//! round-robin splitting gives the semi-depth-first one.

use std::cell::Cell;
use std::fmt;
use std::str::FromStr;
use std::collections::VecDeque;
use std::time::Duration;

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;
use web_time::Instant;

use crate::boxes::{box_diff, split, split_dimension, BoxSet, IntervalBox, SplitPolicy};
use crate::contract::{glob_sat_dims, ContractorKind, OuterContractor, SatVerdict};
use crate::expr::{Constraint, Problem};
use crate::interval::Interval;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    /// Contract the negation only.
    Simple,
    /// Simple, preceded by refutation on sampled values of the quantified variable.
    PreParse,
    /// Contract the constraint, then its negation.
    Normal,
    /// Normal, then evaluate the inner boxes against the remaining constraints.
    Global,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Schedule {
    #[serde(rename = "dfs")]
    DepthFirst,
    #[serde(rename = "semi")]
    SemiDepthFirst,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Method {
    /// Inner propagation; ICO1 or ICO2 depending on the quantifier.
    #[serde(rename = "ipabc")]
    Ipa,
    #[serde(rename = "sivia")]
    Subpaving,
    #[serde(rename = "jla")]
    Jla,
}

macro_rules! named {
    ($t:ty, $what:literal, $($v:path => $s:literal),+) => {
        impl $t {
            pub fn name(self) -> &'static str {
                match self {
                    $($v => $s),+
                }
            }
        }

        impl FromStr for $t {
            type Err = String;

            fn from_str(s: &str) -> Result<Self, String> {
                match s {
                    $($s => Ok($v),)+
                    _ => Err(format!(concat!("unknown ", $what, " `{}`"), s)),
                }
            }
        }

        impl fmt::Display for $t {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.name())
            }
        }
    };
}

named!(Strategy, "strategy",
    Strategy::Simple => "simple", Strategy::PreParse => "preparse",
    Strategy::Normal => "normal", Strategy::Global => "global");
named!(Schedule, "schedule", Schedule::DepthFirst => "dfs", Schedule::SemiDepthFirst => "semi");
named!(Method, "algorithm", Method::Ipa => "ipabc", Method::Subpaving => "sivia", Method::Jla => "jla");

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    /// Boxes whose free variables are all at most this wide are not split.
    pub epsilon: f64,
    /// JLA slice width for the quantified variable.
    pub omega: f64,
    pub contractor: ContractorKind,
    pub strategy: Strategy,
    pub schedule: Schedule,
    /// Number of sampled values for [`Strategy::PreParse`].
    pub preparse_samples: usize,
    pub split_arity: usize,
    /// BC3 quasi-zero width; 0 means canonical.
    pub bc3_delta: f64,
    pub seed: u64,
    pub timeout: Option<Duration>,
    /// Stop after this many search steps; like a timeout, the remaining
    /// work is reported undecided.
    pub max_iterations: Option<u64>,
    /// Stop as soon as the first inner box is found.
    pub first_only: bool,
    /// When false outer boxes are only counted.
    pub store_outer: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            epsilon: 1e-2,
            omega: 0.1,
            contractor: ContractorKind::Bc3,
            strategy: Strategy::Normal,
            schedule: Schedule::DepthFirst,
            preparse_samples: 8,
            split_arity: 2,
            bc3_delta: 0.0,
            seed: 0,
            timeout: None,
            max_iterations: None,
            first_only: false,
            store_outer: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolverError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("{0} requires a quantified problem")]
    NeedsQuantifier(&'static str),
    #[error("{0} does not handle quantified problems")]
    Quantified(&'static str),
    #[error("problem is malformed: {0}")]
    Malformed(String),
}

impl SolverConfig {
    pub fn validate(&self) -> Result<(), SolverError> {
        let bad = |m: &str| Err(SolverError::InvalidConfig(m.to_string()));
        if !(self.epsilon > 0.0) || !self.epsilon.is_finite() {
            return bad("epsilon must be positive and finite");
        }
        if !(self.omega > 0.0) || !self.omega.is_finite() {
            return bad("omega must be positive and finite");
        }
        if self.preparse_samples == 0 {
            return bad("the pre-parse sample count must be at least 1");
        }
        if self.split_arity < 2 {
            return bad("split arity must be at least 2");
        }
        if !(self.bc3_delta >= 0.0) {
            return bad("bc3 delta must be non-negative");
        }
        Ok(())
    }
}

/// Inner, outer and undecided boxes.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Paving {
    pub inner: BoxSet,
    pub outer: BoxSet,
    pub undecided: BoxSet,
}

impl Paving {
    pub fn len(&self) -> usize {
        self.inner.len() + self.outer.len() + self.undecided.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Sum of volumes over the given dimensions.
pub fn total_volume(set: &[IntervalBox], dims: &[usize]) -> f64 {
    set.iter().map(|b| b.volume_over(dims.iter().copied())).sum()
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Stats {
    pub iterations: u64,
    pub contractions: u64,
    pub splits: u64,
    /// Boxes sent to outer because contracting the constraint narrowed the
    /// quantified variable.
    pub guard_hits: u64,
    pub preparse_rejects: u64,
    /// Satisfiability tests made by the search itself (not by contractors).
    pub glob_sat_calls: u64,
    pub outer_count: u64,
    pub outer_volume: f64,
    pub elapsed: Duration,
    pub first_solution: Option<Duration>,
    pub timed_out: bool,
    /// The iteration budget ran out.
    pub exhausted: bool,
    /// Work left when the run stopped early; it is reported as undecided.
    pub abandoned: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub paving: Paving,
    pub stats: Stats,
    /// Dimensions the paving partitions: the free variables.
    pub free: Vec<usize>,
}

impl Solution {
    pub fn inner_volume(&self) -> f64 {
        total_volume(&self.paving.inner, &self.free)
    }

    pub fn undecided_volume(&self) -> f64 {
        total_volume(&self.paving.undecided, &self.free)
    }
}

#[derive(Debug, Clone)]
struct Item {
    b: IntervalBox,
    /// Next constraint (IPA) or next slice (JLA).
    step: usize,
    rr: usize,
}

struct Prepared {
    c: Constraint,
    pos: OuterContractor,
    neg: OuterContractor,
}

struct Engine<'a> {
    cfg: &'a SolverConfig,
    cons: Vec<Prepared>,
    quant: Option<(usize, Interval)>,
    samples: Vec<Interval>,
    slices: Vec<Interval>,
    work: VecDeque<Item>,
    paving: Paving,
    stats: Stats,
    start: Instant,
    done: bool,
    sat_calls: Cell<u64>,
}

impl<'a> Engine<'a> {
    fn new(problem: &Problem, cfg: &'a SolverConfig) -> Self {
        let cons = problem
            .constraints
            .iter()
            .map(|c| Prepared {
                c: c.clone(),
                pos: OuterContractor::new(cfg.contractor, c.clone()).with_delta(cfg.bc3_delta),
                neg: OuterContractor::new(cfg.contractor, c.negate()).with_delta(cfg.bc3_delta),
            })
            .collect();
        let quant = problem.quantifier.as_ref().map(|q| (q.var, q.domain));
        let samples = match quant {
            Some((_, j)) => preparse_samples(j, cfg.preparse_samples, cfg.seed),
            None => Vec::new(),
        };
        let slices = match quant {
            Some((_, j)) => jla_slices(j, cfg.omega),
            None => Vec::new(),
        };
        Engine {
            cfg,
            cons,
            quant,
            samples,
            slices,
            work: VecDeque::new(),
            paving: Paving::default(),
            stats: Stats::default(),
            start: Instant::now(),
            done: false,
            sat_calls: Cell::new(0),
        }
    }

    fn sat(&self, c: &Constraint, dims: &[Interval]) -> SatVerdict {
        self.sat_calls.set(self.sat_calls.get() + 1);
        glob_sat_dims(c, dims)
    }

    fn exclude(&self) -> Option<usize> {
        self.quant.map(|(v, _)| v)
    }

    fn policy(&self, rr: usize) -> SplitPolicy {
        match self.cfg.schedule {
            Schedule::DepthFirst => SplitPolicy::LargestFirst,
            Schedule::SemiDepthFirst => SplitPolicy::RoundRobin { start: rr },
        }
    }

    fn pop(&mut self) -> Option<Item> {
        match self.cfg.schedule {
            Schedule::DepthFirst => self.work.pop_back(),
            Schedule::SemiDepthFirst => self.work.pop_front(),
        }
    }

    /// Sets the quantified slot back to its full domain.
    fn widen_v(&self, b: IntervalBox) -> IntervalBox {
        match self.quant {
            Some((v, j)) => b.replace(v, j).unwrap_or(b),
            None => b,
        }
    }

    fn outer(&mut self, b: IntervalBox) {
        let free: Vec<usize> = (0..b.dim()).filter(|&k| Some(k) != self.exclude()).collect();
        let b = self.widen_v(b);
        self.stats.outer_count += 1;
        self.stats.outer_volume += b.volume_over(free);
        if self.cfg.store_outer {
            self.paving.outer.push(b);
        }
    }

    fn solution(&mut self, b: IntervalBox) {
        let b = self.widen_v(b);
        if self.stats.first_solution.is_none() {
            self.stats.first_solution = Some(self.start.elapsed());
        }
        self.paving.inner.push(b);
        if self.cfg.first_only {
            self.done = true;
        }
    }

    fn undecided(&mut self, b: IntervalBox) {
        self.paving.undecided.push(b);
    }

    fn stop(&self, b: &IntervalBox) -> bool {
        b.max_width(self.exclude()) <= self.cfg.epsilon
            || split_dimension(b, self.exclude(), self.policy(0)).is_none()
    }

    /// Splits `b` and queues the parts with the same step, or reports `b` as
    /// undecided once it is small enough.
    fn split_or_keep(&mut self, b: IntervalBox, step: usize, rr: usize) {
        if self.stop(&b) {
            self.undecided(b);
            return;
        }
        let policy = self.policy(rr);
        let Some(k) = split_dimension(&b, self.exclude(), policy) else {
            self.undecided(b);
            return;
        };
        let parts = match split(&b, self.cfg.split_arity, self.exclude(), policy) {
            Ok(parts) => parts,
            Err(_) => {
                self.undecided(b);
                return;
            }
        };
        self.stats.splits += 1;
        let next_rr = (k + 1) % b.dim();
        self.push_all(parts, step, next_rr);
    }

    fn push_all(&mut self, parts: BoxSet, step: usize, rr: usize) {
        let items = parts.into_iter().map(|b| Item { b, step, rr });
        match self.cfg.schedule {
            // the last (upper) part is popped first
            Schedule::DepthFirst => self.work.extend(items),
            Schedule::SemiDepthFirst => self.work.extend(items),
        }
    }

    fn out_of_time(&self) -> bool {
        self.cfg.timeout.is_some_and(|t| self.start.elapsed() >= t)
    }

    fn run(mut self, root: IntervalBox, step: impl Fn(&mut Self, Item)) -> Solution {
        let free: Vec<usize> = (0..root.dim()).filter(|&k| Some(k) != self.exclude()).collect();
        self.work.push_back(Item { b: root, step: 0, rr: 0 });
        while let Some(item) = self.pop() {
            let exhausted = self.cfg.max_iterations.is_some_and(|m| self.stats.iterations >= m);
            if self.done || exhausted || self.out_of_time() {
                if !self.done {
                    self.stats.exhausted |= exhausted;
                    self.stats.timed_out |= !exhausted;
                }
                self.stats.abandoned += 1;
                self.undecided(item.b);
                continue;
            }
            self.stats.iterations += 1;
            step(&mut self, item);
        }
        self.stats.elapsed = self.start.elapsed();
        self.stats.glob_sat_calls = self.sat_calls.get();
        Solution {
            paving: self.paving,
            stats: self.stats,
            free,
        }
    }

    /// One inner contracting step of constraint `item.step` on `item.b`.
    fn ico(&mut self, item: Item) {
        let Item { b, step: ci, rr } = item;
        if ci >= self.cons.len() {
            self.solution(b);
            return;
        }
        let strategy = self.cfg.strategy;
        let b1 = match strategy {
            Strategy::Simple | Strategy::PreParse => {
                let c = &self.cons[ci].c;
                if self.sat(c, b.dims()) == SatVerdict::False {
                    self.outer(b);
                    return;
                }
                if strategy == Strategy::PreParse && self.refuted_by_sample(ci, &b) {
                    self.stats.preparse_rejects += 1;
                    self.outer(b);
                    return;
                }
                b.clone()
            }
            Strategy::Normal | Strategy::Global => {
                self.stats.contractions += 1;
                self.cons[ci].pos.contract(&b)
            }
        };
        if b1.is_empty() {
            self.outer(b);
            return;
        }
        if let Some((v, _)) = self.quant {
            if b1.get(v) != b.get(v) {
                self.stats.guard_hits += 1;
                self.outer(b);
                return;
            }
        }
        if b1 != b {
            for piece in box_diff(&b, &b1).unwrap_or_default() {
                self.outer(piece);
            }
        }
        self.stats.contractions += 1;
        let b2 = self.cons[ci].neg.contract(&b1);
        let (w1, w2) = (self.widen_v(b1.clone()), self.widen_v(b2.clone()));
        let inner = if b2.is_empty() {
            vec![w1]
        } else {
            box_diff(&w1, &w2).unwrap_or_default()
        };
        let mut passed = Vec::new();
        for ib in inner {
            self.passed(ib, ci, &mut passed);
        }
        if !b2.is_empty() {
            self.split_or_keep(b2, ci, rr);
        }
        // inner boxes move on before the split parts of this constraint
        let items: Vec<Item> = passed.into_iter().map(|(b, step)| Item { b, step, rr }).collect();
        match self.cfg.schedule {
            Schedule::DepthFirst => self.work.extend(items.into_iter().rev()),
            Schedule::SemiDepthFirst => self.work.extend(items),
        }
    }

    /// Routes a box that satisfies constraint `ci`, queueing it with the
    /// next constraint still to be enforced.
    fn passed(&mut self, b: IntervalBox, ci: usize, queue: &mut Vec<(IntervalBox, usize)>) {
        if ci + 1 >= self.cons.len() {
            self.solution(b);
            return;
        }
        if self.cfg.strategy != Strategy::Global {
            queue.push((b, ci + 1));
            return;
        }
        let mut next = None;
        for (j, p) in self.cons.iter().enumerate().skip(ci + 1) {
            match self.sat(&p.c, b.dims()) {
                SatVerdict::False => {
                    self.outer(b);
                    return;
                }
                SatVerdict::Unknown if next.is_none() => next = Some(j),
                _ => {}
            }
        }
        match next {
            None => self.solution(b),
            // constraints before `j` hold on all of `b`
            Some(j) => queue.push((b, j)),
        }
    }

    fn refuted_by_sample(&self, ci: usize, b: &IntervalBox) -> bool {
        let Some((v, _)) = self.quant else {
            return false;
        };
        let c = &self.cons[ci].c;
        let mut dims = b.dims().to_vec();
        self.samples.iter().any(|s| {
            dims[v] = *s;
            self.sat(c, &dims) == SatVerdict::False
        })
    }

    fn conj(&self, dims: &[Interval]) -> SatVerdict {
        let mut all_true = true;
        for p in &self.cons {
            match self.sat(&p.c, dims) {
                SatVerdict::False => return SatVerdict::False,
                SatVerdict::Unknown => all_true = false,
                SatVerdict::True => {}
            }
        }
        if all_true {
            SatVerdict::True
        } else {
            SatVerdict::Unknown
        }
    }

    fn sivia(&mut self, item: Item) {
        match self.conj(item.b.dims()) {
            SatVerdict::True => self.solution(item.b),
            SatVerdict::False => self.outer(item.b),
            SatVerdict::Unknown => self.split_or_keep(item.b, 0, item.rr),
        }
    }

    /// Checks slices from `item.step` on; a box enters inner once every
    /// slice is certified.
    fn jla(&mut self, item: Item) {
        let Some((v, _)) = self.quant else {
            return;
        };
        let mut dims = item.b.dims().to_vec();
        for l in item.step..self.slices.len() {
            dims[v] = self.slices[l];
            match self.conj(&dims) {
                SatVerdict::True => continue,
                SatVerdict::False => {
                    self.outer(item.b);
                    return;
                }
                SatVerdict::Unknown => {
                    // a box too small to split is still refuted by any later slice
                    if self.stop(&item.b) && self.slices[l + 1..].iter().any(|s| {
                        dims[v] = *s;
                        self.conj(&dims) == SatVerdict::False
                    }) {
                        self.outer(item.b);
                    } else {
                        self.split_or_keep(item.b, l, item.rr);
                    }
                    return;
                }
            }
        }
        self.solution(item.b);
    }
}

/// `k` canonical intervals spread over `j`, one per equal-width cell at a
/// seeded random offset.
pub fn preparse_samples(j: Interval, k: usize, seed: u64) -> Vec<Interval> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..k)
        .map(|i| {
            let u = (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64;
            let f = (i as f64 + u) / k as f64;
            let s = (j.lo() + f * (j.hi() - j.lo())).clamp(j.lo(), j.hi());
            Interval::new(s, s.next_up().min(j.hi()).max(s))
        })
        .collect()
}

/// `ceil(width(j) / omega)` consecutive slices covering `j`.
pub fn jla_slices(j: Interval, omega: f64) -> Vec<Interval> {
    let n = ((j.width() / omega).ceil() as usize).max(1);
    let cut = |i: usize| {
        if i == 0 {
            j.lo()
        } else if i == n {
            j.hi()
        } else {
            j.split_point(i, n)
        }
    };
    (0..n).map(|i| Interval::new(cut(i), cut(i + 1))).collect()
}

fn check_problem(problem: &Problem) -> Result<(), SolverError> {
    let n = problem.vars.len();
    if problem.domain.dim() != n {
        return Err(SolverError::Malformed("domain dimension differs from the variable count".into()));
    }
    if problem.domain.is_empty() {
        return Err(SolverError::Malformed("empty initial domain".into()));
    }
    if problem.domain.dims().iter().any(|d| !d.is_bounded()) {
        return Err(SolverError::Malformed("unbounded initial domain".into()));
    }
    for c in &problem.constraints {
        if c.expr.max_var().is_some_and(|k| k >= n) {
            return Err(SolverError::Malformed("constraint refers to an unknown variable".into()));
        }
    }
    if let Some(q) = &problem.quantifier {
        if q.var >= n {
            return Err(SolverError::Malformed("quantified variable out of range".into()));
        }
        if !q.domain.is_bounded() || q.domain.is_empty() {
            return Err(SolverError::Malformed("quantifier domain must be bounded".into()));
        }
    }
    Ok(())
}

/// Runs `method` on `problem`.
pub fn solve(problem: &Problem, method: Method, cfg: &SolverConfig) -> Result<Solution, SolverError> {
    cfg.validate()?;
    check_problem(problem)?;
    let mut root = problem.domain.clone();
    if let Some(q) = &problem.quantifier {
        root = root
            .replace(q.var, q.domain)
            .map_err(|e| SolverError::Malformed(e.to_string()))?;
    }
    let engine = Engine::new(problem, cfg);
    Ok(match method {
        Method::Ipa => engine.run(root, Engine::ico),
        Method::Subpaving => {
            if problem.quantifier.is_some() {
                return Err(SolverError::Quantified("subpaving"));
            }
            engine.run(root, Engine::sivia)
        }
        Method::Jla => {
            if problem.quantifier.is_none() {
                return Err(SolverError::NeedsQuantifier("jla"));
            }
            engine.run(root, Engine::jla)
        }
    })
}

/// Inner propagation over all constraints of `problem`.
pub fn ipa(problem: &Problem, cfg: &SolverConfig) -> Result<Solution, SolverError> {
    solve(problem, Method::Ipa, cfg)
}

pub fn subpaving(problem: &Problem, cfg: &SolverConfig) -> Result<Solution, SolverError> {
    solve(problem, Method::Subpaving, cfg)
}

pub fn jla(problem: &Problem, cfg: &SolverConfig) -> Result<Solution, SolverError> {
    solve(problem, Method::Jla, cfg)
}

fn single(c: &Constraint, b: &IntervalBox, quant: Option<(usize, Interval)>) -> Problem {
    Problem {
        vars: (0..b.dim()).map(|k| format!("x{k}")).collect(),
        domain: b.clone(),
        constraints: vec![c.clone()],
        quantifier: quant.map(|(var, domain)| crate::expr::Quantifier { var, domain }),
    }
}

/// Inner contracting operator for one constraint.
pub fn ico1(
    c: &Constraint,
    b: &IntervalBox,
    contractor: ContractorKind,
    cfg: &SolverConfig,
) -> Result<Solution, SolverError> {
    let cfg = SolverConfig {
        contractor,
        ..cfg.clone()
    };
    ipa(&single(c, b, None), &cfg)
}

/// Inner contracting operator for `forall v in j: c`.
pub fn ico2(
    c: &Constraint,
    b: &IntervalBox,
    v: usize,
    j: Interval,
    contractor: ContractorKind,
    cfg: &SolverConfig,
) -> Result<Solution, SolverError> {
    let cfg = SolverConfig {
        contractor,
        ..cfg.clone()
    };
    ipa(&single(c, b, Some((v, j))), &cfg)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PartitionError {
    #[error("a box lies outside the initial domain")]
    OutOfDomain,
    #[error("boxes overlap or leave a gap")]
    NotAPartition,
    #[error("outer boxes were not stored")]
    OuterNotStored,
}

/// Checks exactly that the paving's boxes, projected onto `dims`, tile the
/// projection of `initial`: interior-disjoint and covering. Only guillotine
/// tilings are recognized, which covers every paving the solvers produce.
pub fn check_partition(initial: &IntervalBox, paving: &Paving, dims: &[usize]) -> Result<(), PartitionError> {
    let proj = |b: &IntervalBox| -> Vec<Interval> { dims.iter().map(|&k| b.get(k)).collect() };
    let region = proj(initial);
    let mut tiles = Vec::with_capacity(paving.len());
    for b in paving.inner.iter().chain(&paving.outer).chain(&paving.undecided) {
        let p = proj(b);
        if p.iter().any(Interval::is_empty) {
            continue;
        }
        if !p.iter().zip(&region).all(|(x, r)| x.subset_of(r)) {
            return Err(PartitionError::OutOfDomain);
        }
        if p.iter().all(|x| x.lo() < x.hi()) {
            tiles.push(p);
        }
    }
    if tiles_region(region, tiles) {
        Ok(())
    } else {
        Err(PartitionError::NotAPartition)
    }
}

/// Guillotine decomposition check; every tile lies inside `region` and has
/// positive volume.
fn tiles_region(region: Vec<Interval>, tiles: Vec<Vec<Interval>>) -> bool {
    let mut stack = vec![(region, tiles)];
    while let Some((region, tiles)) = stack.pop() {
        if region.iter().any(|r| r.lo() >= r.hi()) {
            if tiles.is_empty() {
                continue;
            }
            return false;
        }
        match tiles.len() {
            0 => return false,
            1 => {
                if tiles[0] != region {
                    return false;
                }
                continue;
            }
            _ => {}
        }
        let Some((k, x)) = find_cut(&region, &tiles) else {
            return false;
        };
        let (left, right): (Vec<_>, Vec<_>) = tiles.into_iter().partition(|t| t[k].hi() <= x);
        let mut rl = region.clone();
        let mut rr = region;
        rl[k] = Interval::new(rl[k].lo(), x);
        rr[k] = Interval::new(x, rr[k].hi());
        stack.push((rl, left));
        stack.push((rr, right));
    }
    true
}

/// A hyperplane `x_k = x` strictly inside the region that crosses no tile,
/// preferring the most balanced one.
fn find_cut(region: &[Interval], tiles: &[Vec<Interval>]) -> Option<(usize, f64)> {
    let mut best: Option<(usize, f64, usize)> = None;
    let n = tiles.len();
    for k in 0..region.len() {
        let mut order: Vec<(f64, f64)> = tiles.iter().map(|t| (t[k].lo(), t[k].hi())).collect();
        order.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut reach = f64::NEG_INFINITY;
        for (i, &(lo, hi)) in order.iter().enumerate() {
            if i > 0 && reach <= lo && lo > region[k].lo() && lo < region[k].hi() {
                let balance = i.min(n - i);
                if best.is_none_or(|(_, _, b)| balance > b) {
                    best = Some((k, lo, balance));
                }
            }
            reach = reach.max(hi);
        }
    }
    best.map(|(k, x, _)| (k, x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{Expr, Quantifier, Rel};
    use crate::parse::parse;

    fn bx(v: &[(f64, f64)]) -> IntervalBox {
        IntervalBox::new(v.iter().map(|&(a, b)| Interval::new(a, b)).collect())
    }

    fn leq(e: Expr) -> Constraint {
        Constraint { expr: e, rel: Rel::Leq, strict: false }
    }

    fn cfg(eps: f64) -> SolverConfig {
        SolverConfig {
            epsilon: eps,
            ..SolverConfig::default()
        }
    }

    fn problem(text: &str) -> Problem {
        parse(text).unwrap()
    }

    fn assert_partition(p: &Problem, s: &Solution) {
        check_partition(&p.domain, &s.paving, &s.free).unwrap();
    }

    #[test]
    fn config_validation() {
        assert!(SolverConfig::default().validate().is_ok());
        for bad in [
            SolverConfig { epsilon: 0.0, ..Default::default() },
            SolverConfig { omega: -1.0, ..Default::default() },
            SolverConfig { preparse_samples: 0, ..Default::default() },
            SolverConfig { split_arity: 1, ..Default::default() },
            SolverConfig { epsilon: f64::NAN, ..Default::default() },
        ] {
            assert!(matches!(bad.validate(), Err(SolverError::InvalidConfig(_))));
        }
    }

    #[test]
    fn subpaving_roots() {
        let p = problem("var x in [-1, -0.5]\nx <= 0");
        let s = subpaving(&p, &cfg(0.1)).unwrap();
        assert_eq!(s.paving, Paving { inner: vec![p.domain.clone()], ..Default::default() });
        let p = problem("var x in [1, 2]\nx <= 0");
        let s = subpaving(&p, &cfg(0.1)).unwrap();
        assert_eq!(s.paving, Paving { outer: vec![p.domain.clone()], ..Default::default() });
    }

    #[test]
    fn subpaving_garloff_corners() {
        let p = problem("var v in [2, 10]\nvar w in [40, 50]\n-5*v^2 - 13*v + v*w - w > 0");
        let s = subpaving(&p, &cfg(1e-2)).unwrap();
        assert!(!s.paving.inner.is_empty());
        for b in &s.paving.inner {
            for v in [b.get(0).lo(), b.get(0).hi()] {
                for w in [b.get(1).lo(), b.get(1).hi()] {
                    assert!(w * (v - 1.0) >= 5.0 * v * v + 13.0 * v, "{b}");
                }
            }
        }
        assert_partition(&p, &s);
    }

    #[test]
    fn ico1_corner() {
        let c = leq(Expr::var(0) + Expr::var(1) - Expr::num(2.0));
        let b = bx(&[(0.0, 1.0), (0.0, 1.0)]);
        let s = ico1(&c, &b, ContractorKind::Hc, &cfg(0.1)).unwrap();
        let corner = bx(&[(1.0, 1.0), (1.0, 1.0)]);
        assert_eq!(s.paving.undecided, vec![corner.clone()]);
        assert_eq!(s.paving.inner, box_diff(&b, &corner).unwrap());
        assert!(s.paving.outer.is_empty());
        // canonical quasi-zeros stop one ulp short of the corner
        let s = ico1(&c, &b, ContractorKind::Bc3, &cfg(0.1)).unwrap();
        assert_eq!(s.paving.undecided.len(), 1);
        let u = &s.paving.undecided[0];
        assert!((0..2).all(|k| u.get(k).hi() == 1.0 && u.get(k).lo() >= 1.0 - 1e-15));
    }

    #[test]
    fn ico1_feasible_box() {
        let c = leq(Expr::var(0));
        let b = bx(&[(-2.0, -1.0)]);
        for kind in [ContractorKind::Hc, ContractorKind::Bc3] {
            let s = ico1(&c, &b, kind, &cfg(0.1)).unwrap();
            assert_eq!(s.paving.inner, vec![b.clone()]);
            assert!(s.paving.outer.is_empty() && s.paving.undecided.is_empty());
        }
    }

    #[test]
    fn ico1_disc_corners() {
        let c = leq(Expr::var(0).sqr() + Expr::var(1).sqr() - Expr::num(1.0));
        let b = bx(&[(0.0, 1.0), (0.0, 1.0)]);
        for kind in [ContractorKind::Hc, ContractorKind::Bc3] {
            let s = ico1(&c, &b, kind, &cfg(1e-2)).unwrap();
            assert!(!s.paving.inner.is_empty());
            for ib in &s.paving.inner {
                let (x, y) = (ib.get(0).hi(), ib.get(1).hi());
                assert!(x * x + y * y <= 1.0, "{ib}");
            }
            check_partition(&b, &s.paving, &s.free).unwrap();
            let area = s.inner_volume();
            assert!(area > 0.74 && area <= std::f64::consts::FRAC_PI_4, "{area}");
        }
    }

    #[test]
    fn ico2_threshold() {
        // a - t >= 0 for all t in [0,1]: exactly a >= 1
        let c = Constraint::new(Expr::var(0), Rel::Geq, Expr::var(1));
        let b = bx(&[(-2.0, 2.0), (0.0, 1.0)]);
        for kind in [ContractorKind::Hc, ContractorKind::Bc3] {
            let s = ico2(&c, &b, 1, Interval::new(0.0, 1.0), kind, &cfg(1e-3)).unwrap();
            let lo = s.paving.inner.iter().map(|ib| ib.get(0).lo()).fold(f64::INFINITY, f64::min);
            let hi = s.paving.inner.iter().map(|ib| ib.get(0).hi()).fold(f64::NEG_INFINITY, f64::max);
            assert!(lo >= 1.0 && lo <= 1.01, "{lo}");
            assert_eq!(hi, 2.0);
            assert!(s.paving.inner.iter().all(|ib| ib.get(1) == Interval::new(0.0, 1.0)));
            check_partition(&b, &s.paving, &s.free).unwrap();
        }
    }

    #[test]
    fn ico2_guard() {
        // t <= a with a in [0, 0.5] fails for t near 1 whatever a is
        let c = Constraint::new(Expr::var(1), Rel::Leq, Expr::var(0));
        let b = bx(&[(0.0, 0.5), (0.0, 1.0)]);
        let s = ico2(&c, &b, 1, Interval::new(0.0, 1.0), ContractorKind::Hc, &cfg(1e-3)).unwrap();
        assert_eq!(s.paving, Paving { outer: vec![b], ..Default::default() });
        assert_eq!(s.stats.guard_hits, 1);
    }

    const PARABOLA: &str = "var a in [0, 1]\nvar b in [0, 1]\nvar c in [0, 1]\n\
                            forall t in [0, 2]:\na*t^2 + b*t + c >= 2*t - 1\n";

    #[test]
    fn parabola_solution_never_outer() {
        let p = problem(PARABOLA);
        for strategy in [Strategy::Simple, Strategy::PreParse, Strategy::Normal, Strategy::Global] {
            let s = ipa(&p, &SolverConfig { epsilon: 0.05, strategy, ..cfg(0.05) }).unwrap();
            for x in [[1.0, 1.0, 1.0], [0.55, 0.45, 0.9]] {
                assert!(!s.paving.outer.iter().any(|b| (0..3).all(|k| b.get(k).contains(x[k]))));
            }
            for ib in &s.paving.inner {
                // min over t in [0,2] of a t^2 + (b - 2) t + c + 1 at each corner
                for &a in &[ib.get(0).lo(), ib.get(0).hi()] {
                    for &bb in &[ib.get(1).lo(), ib.get(1).hi()] {
                        let c = ib.get(2).lo();
                        let f = |t: f64| a * t * t + (bb - 2.0) * t + c + 1.0;
                        let mut m = f(0.0).min(f(2.0));
                        if a > 0.0 {
                            let tv = -(bb - 2.0) / (2.0 * a);
                            if (0.0..=2.0).contains(&tv) {
                                m = m.min(f(tv));
                            }
                        }
                        assert!(m >= -1e-12, "{ib}");
                    }
                }
            }
            assert_partition(&p, &s);
        }
    }

    #[test]
    fn ipa_two_half_lines() {
        let p = problem("var x in [-3, 3]\nx <= 0\n-x - 1 <= 0");
        let s = ipa(&p, &cfg(1e-3)).unwrap();
        let lo = s.paving.inner.iter().map(|b| b.get(0).lo()).fold(f64::INFINITY, f64::min);
        let hi = s.paving.inner.iter().map(|b| b.get(0).hi()).fold(f64::NEG_INFINITY, f64::max);
        assert!((lo + 1.0).abs() <= 1e-3 && hi.abs() <= 1e-3, "{lo} {hi}");
        assert!((s.inner_volume() - 1.0).abs() <= 2e-3);
        assert_partition(&p, &s);
    }

    #[test]
    fn jla_examples() {
        let thin = |a: f64, b: f64, c: f64| {
            let mut p = problem(PARABOLA);
            p.domain = bx(&[(a, a), (b, b), (c, c), (0.0, 2.0)]);
            p
        };
        let c5 = SolverConfig { omega: 0.5, ..cfg(1e-2) };
        let s = jla(&thin(1.0, 1.0, 1.0), &c5).unwrap();
        assert_eq!(s.paving.inner.len(), 1);
        let s = jla(&thin(0.0, 0.0, 0.0), &c5).unwrap();
        assert_eq!(s.paving.outer.len(), 1);
        let p = problem("var x in [2, 3]\nforall t in [0, 1]:\nx - t >= 0");
        let s = jla(&p, &SolverConfig { omega: 5.0, ..cfg(1e-2) }).unwrap();
        assert_eq!(s.paving.inner, vec![bx(&[(2.0, 3.0), (0.0, 1.0)])]);
    }

    #[test]
    fn jla_slicing() {
        let sl = jla_slices(Interval::new(0.0, 2.0), 0.3);
        assert_eq!(sl.len(), 7);
        assert_eq!(sl[0].lo(), 0.0);
        assert_eq!(sl[6].hi(), 2.0);
        for w in sl.windows(2) {
            assert_eq!(w[0].hi(), w[1].lo());
        }
        assert_eq!(jla_slices(Interval::new(0.0, 1.0), 5.0).len(), 1);
    }

    #[test]
    fn jla_parabola_partition() {
        let p = problem(PARABOLA);
        let s = jla(&p, &SolverConfig { omega: 0.5, ..cfg(0.05) }).unwrap();
        assert!(!s.paving.inner.is_empty());
        assert_partition(&p, &s);
    }

    #[test]
    fn preparse_samples_are_canonical_and_seeded() {
        let j = Interval::new(-1.0, 1.0);
        let a = preparse_samples(j, 8, 7);
        assert_eq!(a, preparse_samples(j, 8, 7));
        assert_ne!(a, preparse_samples(j, 8, 8));
        for (i, s) in a.iter().enumerate() {
            assert!(s.is_canonical() && s.subset_of(&j));
            assert!(s.lo() >= -1.0 + i as f64 * 0.25 && s.lo() <= -1.0 + (i + 1) as f64 * 0.25);
        }
    }

    #[test]
    fn schedules_and_first_only() {
        let p = problem("var x in [0, 4]\nvar y in [0, 4]\nx^2 + y^2 <= 9\nx*y >= 1");
        let mut vols = Vec::new();
        for schedule in [Schedule::DepthFirst, Schedule::SemiDepthFirst] {
            for strategy in [Strategy::Simple, Strategy::Normal, Strategy::Global] {
                let s = ipa(&p, &SolverConfig { schedule, strategy, ..cfg(0.05) }).unwrap();
                assert_partition(&p, &s);
                for b in &s.paving.inner {
                    let (x0, x1, y0, y1) = (b.get(0).lo(), b.get(0).hi(), b.get(1).lo(), b.get(1).hi());
                    assert!(x1 * x1 + y1 * y1 <= 9.0 && x0 * y0 >= 1.0, "{b}");
                }
                vols.push(s.inner_volume());
            }
            let s = ipa(&p, &SolverConfig { schedule, first_only: true, ..cfg(0.05) }).unwrap();
            assert_eq!(s.paving.inner.len(), 1);
            assert!(s.stats.first_solution.is_some());
            assert_partition(&p, &s);
        }
        assert!(vols.iter().all(|v| *v > 3.0), "{vols:?}");
    }

    #[test]
    fn timeout_keeps_partition() {
        let p = problem(PARABOLA);
        let c = SolverConfig { timeout: Some(Duration::ZERO), ..cfg(1e-3) };
        let s = ipa(&p, &c).unwrap();
        assert!(s.stats.timed_out);
        assert_eq!(s.paving.undecided.len(), 1);
        assert_partition(&p, &s);
    }

    #[test]
    fn iteration_budget_is_deterministic() {
        let p = problem(PARABOLA);
        let c = SolverConfig { max_iterations: Some(50), ..cfg(1e-2) };
        let a = ipa(&p, &c).unwrap();
        let b = ipa(&p, &c).unwrap();
        assert!(a.stats.exhausted && !a.stats.timed_out);
        assert_eq!(a.stats.iterations, 50);
        assert_eq!(a.paving, b.paving);
        assert_partition(&p, &a);
    }

    #[test]
    fn method_preconditions() {
        let p = problem(PARABOLA);
        assert_eq!(subpaving(&p, &cfg(0.1)), Err(SolverError::Quantified("subpaving")));
        let p = problem("var x in [0, 1]\nx <= 1");
        assert_eq!(jla(&p, &cfg(0.1)), Err(SolverError::NeedsQuantifier("jla")));
        let mut p = problem("var x in [0, 1]\nx <= 1");
        p.quantifier = Some(Quantifier { var: 3, domain: Interval::ONE });
        assert!(matches!(ipa(&p, &cfg(0.1)), Err(SolverError::Malformed(_))));
    }

    #[test]
    fn partition_checker_rejects() {
        let d = bx(&[(0.0, 2.0), (0.0, 2.0)]);
        let good = Paving {
            inner: vec![bx(&[(0.0, 1.0), (0.0, 2.0)])],
            outer: vec![bx(&[(1.0, 2.0), (0.0, 1.0)])],
            undecided: vec![bx(&[(1.0, 2.0), (1.0, 2.0)]), bx(&[(1.5, 1.5), (1.0, 2.0)])],
        };
        assert_eq!(check_partition(&d, &good, &[0, 1]), Ok(()));
        let mut gap = good.clone();
        gap.undecided.remove(0);
        assert_eq!(check_partition(&d, &gap, &[0, 1]), Err(PartitionError::NotAPartition));
        let mut overlap = good.clone();
        overlap.inner.push(bx(&[(0.5, 1.5), (0.5, 1.5)]));
        assert_eq!(check_partition(&d, &overlap, &[0, 1]), Err(PartitionError::NotAPartition));
        let mut outside = good;
        outside.outer.push(bx(&[(2.0, 3.0), (0.0, 1.0)]));
        assert_eq!(check_partition(&d, &outside, &[0, 1]), Err(PartitionError::OutOfDomain));
        // a pinwheel tiles the square but has no guillotine cut
        let pin = Paving {
            inner: vec![
                bx(&[(0.0, 2.0), (0.0, 1.0)]),
                bx(&[(2.0, 3.0), (0.0, 2.0)]),
                bx(&[(1.0, 3.0), (2.0, 3.0)]),
                bx(&[(0.0, 1.0), (1.0, 3.0)]),
                bx(&[(1.0, 2.0), (1.0, 2.0)]),
            ],
            ..Default::default()
        };
        let sq = bx(&[(0.0, 3.0), (0.0, 3.0)]);
        assert_eq!(check_partition(&sq, &pin, &[0, 1]), Err(PartitionError::NotAPartition));
    }
}
