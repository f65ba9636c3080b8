//! Stochastic local search for strong DNA codes.
//!
//! The search keeps a library that is always a valid code. Each step draws a
//! random admissible word, computes the members it conflicts with, and with
//! probability `f(cost)` inserts the word and evicts those members, where
//! `cost` is the number of evictions:
//!
//! ```text
//! f(x) = 1                  x ∈ {0, 1}
//!        α · exp(−x / β)    x ∈ {2, 3}
//!        0                  x ≥ 4
//! ```
//!
//! The run stops when the library reaches the target size or when the best
//! size has not improved for more than `max_stagnation` consecutive steps.
//! There is no cooling schedule; this is a fixed-temperature Metropolis walk.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::code::{CodeParams, CodeSet};
use crate::error::{Error, Result};
use crate::seq::{sample_admissible, Sequence, DEFAULT_SAMPLE_ATTEMPTS};

pub const DEFAULT_ALPHA: f64 = 6.5e-5;
pub const DEFAULT_BETA: f64 = 1.45;
pub const DEFAULT_MAX_STAGNATION: u64 = 1_000_000;

/// Generator behind every search. Fixed per build so a seed reproduces a run.
pub type SearchRng = ChaCha8Rng;

#[derive(Debug, Clone, PartialEq)]
pub struct SlsParams {
    pub code: CodeParams,
    /// Stop as soon as the library reaches this size. `None` runs until
    /// stagnation.
    pub target: Option<usize>,
    pub max_stagnation: u64,
    pub alpha: f64,
    pub beta: f64,
    pub seed: u64,
    pub sample_attempts: u64,
}

impl SlsParams {
    pub fn new(code: CodeParams) -> Self {
        SlsParams {
            code,
            target: None,
            max_stagnation: DEFAULT_MAX_STAGNATION,
            alpha: DEFAULT_ALPHA,
            beta: DEFAULT_BETA,
            seed: 0,
            sample_attempts: DEFAULT_SAMPLE_ATTEMPTS,
        }
    }

    pub fn with_target(mut self, target: Option<usize>) -> Self {
        self.target = target;
        self
    }

    pub fn with_max_stagnation(mut self, m: u64) -> Self {
        self.max_stagnation = m;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_acceptance(mut self, alpha: f64, beta: f64) -> Self {
        self.alpha = alpha;
        self.beta = beta;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_stagnation < 1 {
            return Err(Error::InvalidParams("max_stagnation must be at least 1".into()));
        }
        check_acceptance(self.alpha, self.beta)?;
        if self.target == Some(0) {
            return Err(Error::InvalidParams("target must be at least 1".into()));
        }
        if self.sample_attempts < 1 {
            return Err(Error::InvalidParams("sample_attempts must be at least 1".into()));
        }
        Ok(())
    }
}

fn check_acceptance(alpha: f64, beta: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::InvalidParams(format!("alpha must be positive, got {alpha}")));
    }
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(Error::InvalidParams(format!("beta must be positive, got {beta}")));
    }
    Ok(())
}

/// Probability of accepting a move that evicts `cost` members.
pub fn acceptance_probability(cost: usize, alpha: f64, beta: f64) -> Result<f64> {
    check_acceptance(alpha, beta)?;
    Ok(match cost {
        0 | 1 => 1.0,
        2 | 3 => (alpha * (-(cost as f64) / beta).exp()).min(1.0),
        _ => 0.0,
    })
}

/// One proposed move.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MoveRecord {
    pub sigma: Sequence,
    pub cost: usize,
    pub accepted: bool,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct MoveTally {
    pub accepted: u64,
    pub rejected: u64,
}

impl MoveTally {
    pub fn total(&self) -> u64 {
        self.accepted + self.rejected
    }
}

#[derive(Debug, Clone)]
pub struct SlsState {
    current: CodeSet,
    best: CodeSet,
    /// Steps since the last improvement of the best size.
    iterations: u64,
    rng: SearchRng,
    tally: MoveTally,
    // f(0..=3); f(x) = 0 beyond.
    accept: [f64; 4],
}

impl SlsState {
    pub fn new(params: &SlsParams) -> Result<Self> {
        params.validate()?;
        let mut accept = [0.0; 4];
        for (x, slot) in accept.iter_mut().enumerate() {
            *slot = acceptance_probability(x, params.alpha, params.beta)?;
        }
        Ok(SlsState {
            current: CodeSet::new(params.code),
            best: CodeSet::new(params.code),
            iterations: 0,
            rng: SearchRng::seed_from_u64(params.seed),
            tally: MoveTally::default(),
            accept,
        })
    }

    pub fn current(&self) -> &CodeSet {
        &self.current
    }

    pub fn best(&self) -> &CodeSet {
        &self.best
    }

    pub fn best_size(&self) -> usize {
        self.best.len()
    }

    pub fn iterations(&self) -> u64 {
        self.iterations
    }

    pub fn tally(&self) -> MoveTally {
        self.tally
    }

    /// Loop guard: continue while the library is not at the target and the
    /// stagnation counter has not passed the limit.
    pub fn should_continue(&self, params: &SlsParams) -> bool {
        let at_target = params.target.is_some_and(|a| self.current.len() == a);
        !at_target && self.iterations <= params.max_stagnation
    }

    pub fn step(&mut self, params: &SlsParams) -> Result<MoveRecord> {
        let p = params.code;
        let sigma = sample_admissible(p.n, p.d, p.w, &mut self.rng, params.sample_attempts)?;
        let evicted = self.current.conflicts(&sigma)?;
        let cost = evicted.len();
        let f = self.accept.get(cost).copied().unwrap_or(0.0);
        let u: f64 = self.rng.gen();
        let accepted = u < f;
        if accepted {
            for t in &evicted {
                self.current.remove(t);
            }
            self.current.insert(sigma)?;
            if self.current.len() > self.best.len() {
                self.best = self.current.clone();
                self.iterations = 0;
            }
            self.tally.accepted += 1;
        } else {
            self.tally.rejected += 1;
        }
        self.iterations += 1;
        Ok(MoveRecord { sigma, cost, accepted })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SlsOutcome {
    pub code: CodeSet,
    pub reached_target: bool,
    pub total_moves: u64,
    pub accepted_moves: u64,
    pub stagnation_at_stop: u64,
    pub seed: u64,
}

impl SlsOutcome {
    pub fn record(&self, params: &SlsParams) -> RunRecord {
        let p = params.code;
        RunRecord {
            n: p.n,
            d: p.d,
            w: p.w,
            target: params.target,
            max_stagnation: params.max_stagnation,
            alpha: params.alpha,
            beta: params.beta,
            seed: self.seed,
            size: self.code.len(),
            reached_target: self.reached_target,
            total_moves: self.total_moves,
            code: self.code.iter().map(|s| s.to_string()).collect(),
        }
    }
}

/// JSON run record. `code` is in canonical order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunRecord {
    pub n: usize,
    pub d: usize,
    pub w: usize,
    pub target: Option<usize>,
    pub max_stagnation: u64,
    pub alpha: f64,
    pub beta: f64,
    pub seed: u64,
    pub size: usize,
    pub reached_target: bool,
    pub total_moves: u64,
    pub code: Vec<String>,
}

/// Runs one search, calling `observe` after every step.
pub fn run_observed<F>(params: &SlsParams, mut observe: F) -> Result<SlsOutcome>
where
    F: FnMut(&MoveRecord, &SlsState),
{
    let mut state = SlsState::new(params)?;
    while state.should_continue(params) {
        let record = state.step(params)?;
        observe(&record, &state);
    }
    let reached_target = params.target.is_some_and(|a| state.best.len() == a);
    Ok(SlsOutcome {
        reached_target,
        total_moves: state.tally.total(),
        accepted_moves: state.tally.accepted,
        stagnation_at_stop: state.iterations,
        seed: params.seed,
        code: state.best,
    })
}

pub fn run(params: &SlsParams) -> Result<SlsOutcome> {
    run_observed(params, |_, _| {})
}

/// Independent runs with seeds `seed, seed + 1, …`, executed in parallel.
/// Returns every outcome in seed order.
pub fn run_all(params: &SlsParams, runs: usize) -> Result<Vec<SlsOutcome>> {
    if runs < 1 {
        return Err(Error::InvalidParams("runs must be at least 1".into()));
    }
    params.validate()?;
    let results: Vec<Result<SlsOutcome>> = (0..runs as u64)
        .into_par_iter()
        .map(|i| run(&params.clone().with_seed(params.seed.wrapping_add(i))))
        .collect();
    results.into_iter().collect()
}

/// Best outcome over `runs` independent runs: largest code, ties to the
/// lowest seed.
pub fn run_multi(params: &SlsParams, runs: usize) -> Result<SlsOutcome> {
    let outcomes = run_all(params, runs)?;
    let mut best: Option<SlsOutcome> = None;
    for o in outcomes {
        if best.as_ref().is_none_or(|b| o.code.len() > b.code.len()) {
            best = Some(o);
        }
    }
    Ok(best.expect("runs >= 1"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(n: usize, d: usize, w: usize) -> SlsParams {
        SlsParams::new(CodeParams::new(n, d, w).unwrap())
    }

    #[test]
    fn acceptance_values() {
        let (a, b) = (DEFAULT_ALPHA, DEFAULT_BETA);
        assert_eq!(acceptance_probability(0, a, b).unwrap(), 1.0);
        assert_eq!(acceptance_probability(1, a, b).unwrap(), 1.0);
        assert_eq!(acceptance_probability(4, a, b).unwrap(), 0.0);
        assert_eq!(acceptance_probability(100, a, b).unwrap(), 0.0);
        // 6.5e-5 * e^(-2/1.45); e^(-1.3793103448) = 0.2517353..., via a
        // 30-term Taylor series evaluated independently below.
        let taylor_exp = |x: f64| (0..30).fold((1.0f64, 1.0f64), |(sum, term), k| {
            let next = term * x / (k as f64 + 1.0);
            (sum + next, next)
        }).0;
        let expected = 6.5e-5 * taylor_exp(-2.0 / 1.45);
        let got = acceptance_probability(2, 6.5e-5, 1.45).unwrap();
        assert!((got - expected).abs() < 1e-15);
        assert!((got - 1.637e-5).abs() < 1e-8);
        let f3 = acceptance_probability(3, a, b).unwrap();
        assert!(f3 > 0.0 && f3 < got);
        assert!(acceptance_probability(0, 0.0, b).is_err());
        assert!(acceptance_probability(0, a, -1.0).is_err());
        // clamp
        assert_eq!(acceptance_probability(2, 1e6, 1.0).unwrap(), 1.0);
    }

    #[test]
    fn params_validation() {
        assert!(params(4, 3, 2).with_max_stagnation(0).validate().is_err());
        assert!(params(4, 3, 2).with_target(Some(0)).validate().is_err());
        assert!(params(4, 3, 2).with_acceptance(0.0, 1.45).validate().is_err());
        assert!(params(4, 3, 2).validate().is_ok());
    }

    #[test]
    fn first_step_on_empty_library_is_accepted() {
        let p = params(5, 3, 2).with_seed(9);
        let mut st = SlsState::new(&p).unwrap();
        let rec = st.step(&p).unwrap();
        assert_eq!(rec.cost, 0);
        assert!(rec.accepted);
        assert_eq!(st.current().len(), 1);
        assert_eq!(st.best_size(), 1);
        // reset to 0 on improvement, then incremented
        assert_eq!(st.iterations(), 1);
    }

    #[test]
    fn duplicate_draw_is_a_cost_one_noop() {
        // (5,5,2) has few admissible words; keep stepping until some draw
        // equals a current member.
        let p = params(5, 5, 2).with_seed(1);
        let mut st = SlsState::new(&p).unwrap();
        let mut seen = false;
        for _ in 0..10_000 {
            let before = st.current().clone();
            let iters = st.iterations();
            let rec = st.step(&p).unwrap();
            if before.contains(&rec.sigma) {
                assert_eq!(rec.cost, 1);
                assert!(rec.accepted);
                assert_eq!(st.current(), &before);
                assert_eq!(st.iterations(), iters + 1);
                seen = true;
                break;
            }
        }
        assert!(seen);
    }

    #[test]
    fn invariants_hold_along_a_run() {
        let p = params(6, 3, 3).with_seed(4).with_max_stagnation(2_000);
        let mut prev_size = 0usize;
        let mut prev_best = 0usize;
        let mut since_improvement = 0u64;
        let out = run_observed(&p, |rec, st| {
            assert!(st.current().verify_strong().valid);
            if rec.cost <= 1 {
                assert!(rec.accepted);
            }
            if rec.cost >= 4 {
                assert!(!rec.accepted);
            }
            let size = st.current().len();
            if rec.accepted {
                assert_eq!(size as i64, prev_size as i64 + 1 - rec.cost as i64);
            } else {
                assert_eq!(size, prev_size);
            }
            assert!(st.best_size() >= prev_best);
            assert!(st.best_size() >= size);
            if st.best_size() > prev_best {
                since_improvement = 0;
            } else {
                since_improvement += 1;
            }
            assert!(since_improvement <= p.max_stagnation + 1);
            prev_size = size;
            prev_best = st.best_size();
        })
        .unwrap();
        assert_eq!(out.code.len(), prev_best);
        assert!(out.code.verify_strong().valid);
        assert!(!out.reached_target);
        assert_eq!(out.stagnation_at_stop, p.max_stagnation + 1);
    }

    #[test]
    fn same_seed_same_stream() {
        let p = params(6, 4, 3).with_seed(77).with_max_stagnation(500);
        let mut a = Vec::new();
        let mut b = Vec::new();
        let oa = run_observed(&p, |r, _| a.push(r.clone())).unwrap();
        let ob = run_observed(&p, |r, _| b.push(r.clone())).unwrap();
        assert_eq!(a, b);
        assert_eq!(oa, ob);
    }

    #[test]
    fn small_targets() {
        let out = run(&params(4, 3, 2).with_target(Some(6)).with_max_stagnation(100_000).with_seed(3)).unwrap();
        assert!(out.reached_target);
        assert_eq!(out.code.len(), 6);
        assert!(out.code.verify_strong().valid);

        let out = run(&params(5, 4, 2).with_target(Some(3)).with_max_stagnation(100_000)).unwrap();
        assert_eq!(out.code.len(), 3);

        let out = run(&params(6, 4, 3).with_max_stagnation(1_000)).unwrap();
        assert!(out.code.len() <= 16);
    }

    #[test]
    fn multi_run_harness() {
        let p = params(5, 3, 2).with_max_stagnation(300).with_seed(10);
        assert_eq!(run_multi(&p, 1).unwrap(), run(&p).unwrap());
        let all = run_all(&p, 6).unwrap();
        let best = run_multi(&p, 6).unwrap();
        let max = all.iter().map(|o| o.code.len()).max().unwrap();
        let first = all.iter().find(|o| o.code.len() == max).unwrap();
        assert_eq!(&best, first);
        assert_eq!(run_multi(&p, 6).unwrap(), best);
        assert!(run_multi(&p, 0).is_err());
    }

    #[test]
    fn run_record_json_shape() {
        let p = params(4, 3, 2).with_target(Some(6)).with_seed(1).with_max_stagnation(100_000);
        let out = run(&p).unwrap();
        let v = serde_json::to_value(out.record(&p)).unwrap();
        for key in [
            "n", "d", "w", "target", "max_stagnation", "alpha", "beta", "seed", "size",
            "reached_target", "total_moves", "code",
        ] {
            assert!(v.get(key).is_some(), "missing {key}");
        }
        let code: Vec<String> = serde_json::from_value(v["code"].clone()).unwrap();
        let mut sorted = code.clone();
        sorted.sort();
        assert_eq!(code, sorted);
        let none = p.clone().with_target(None);
        let rec = serde_json::to_value(out.record(&none)).unwrap();
        assert!(rec["target"].is_null());
    }
}
