//! Seeded random walks that produce dense timed words.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{CmpOp, LocationId, TimedAutomaton, TimedWord};
use crate::error::{Error, Result};
use crate::rational::Rational;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GeneratorConfig {
    /// Largest denominator of a sampled time. Must be a power of two.
    pub max_denominator: u32,
    /// Number of fresh walks tried before giving up.
    pub retries: u32,
    /// Width of the window sampled when a delay has no upper bound.
    /// `None` uses `max_constant + 2`.
    pub max_delay: Option<u32>,
    /// Probability of landing exactly on a closed endpoint of the
    /// feasible delay set.
    pub endpoint_bias: f64,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        GeneratorConfig { max_denominator: 64, retries: 200, max_delay: None, endpoint_bias: 0.3 }
    }
}

/// Delays `d >= 0` allowed by a conjunction of constraints.
#[derive(Clone, Copy, Debug)]
struct DelaySet {
    lo: Rational,
    lo_closed: bool,
    hi: Option<Rational>,
    hi_closed: bool,
}

impl DelaySet {
    fn all() -> Self {
        DelaySet { lo: Rational::ZERO, lo_closed: true, hi: None, hi_closed: false }
    }

    /// Adds `start + d  op  bound`.
    fn restrict(&mut self, start: Rational, op: CmpOp, bound: u32) {
        let edge = Rational::from(bound) - start;
        match op {
            CmpOp::Lt | CmpOp::Le => {
                let closed = op == CmpOp::Le;
                let tighter = match self.hi {
                    None => true,
                    Some(hi) => edge < hi || (edge == hi && !closed),
                };
                if tighter {
                    self.hi = Some(edge);
                    self.hi_closed = closed;
                }
            }
            CmpOp::Ge | CmpOp::Gt => {
                let closed = op == CmpOp::Ge;
                if edge > self.lo || (edge == self.lo && !closed) {
                    self.lo = edge;
                    self.lo_closed = closed;
                }
            }
        }
    }

    fn is_empty(&self) -> bool {
        match self.hi {
            None => false,
            Some(hi) => hi < self.lo || (hi == self.lo && !(self.lo_closed && self.hi_closed)),
        }
    }

    fn sample(&self, rng: &mut impl Rng, cfg: &GeneratorConfig, window: u32) -> Option<Rational> {
        if let Some(hi) = self.hi {
            if hi == self.lo {
                return Some(hi);
            }
        }
        let mut endpoints = Vec::new();
        if self.lo_closed {
            endpoints.push(self.lo);
        }
        if let (Some(hi), true) = (self.hi, self.hi_closed) {
            endpoints.push(hi);
        }
        if !endpoints.is_empty() && rng.gen_bool(cfg.endpoint_bias) {
            return endpoints.choose(rng).copied();
        }
        let hi = self.hi.unwrap_or(self.lo + Rational::from(window.max(1)));
        let max_exp = cfg.max_denominator.max(1).trailing_zeros();
        let first = rng.gen_range(0..=max_exp);
        // prefer a coarse grid, refine until something fits strictly inside
        for exp in first..=max_exp {
            let q = 1i128 << exp;
            let qr = Rational::from_int(q);
            let n_min = (self.lo * qr).floor() + 1;
            let n_max = (hi * qr).ceil() - 1;
            if n_min <= n_max {
                let n = rng.gen_range(n_min..=n_max);
                return Some(Rational::new(n, q).expect("nonzero denominator"));
            }
        }
        endpoints.choose(rng).copied()
    }
}

/// Outcome of one random walk.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RandomRun {
    pub word: TimedWord,
    /// Locations visited, starting with the initial one.
    pub locations: Vec<LocationId>,
}

impl RandomRun {
    pub fn final_location(&self) -> LocationId {
        *self.locations.last().expect("walk starts at the initial location")
    }
}

/// One random walk of at most `length` steps. Stops early at a dead end.
/// Returns `None` when the initial invariant fails at time 0.
///
/// When `prefer_accepting` is set, the last step favours edges into
/// accepting locations.
pub fn random_run(
    a: &TimedAutomaton,
    length: usize,
    rng: &mut impl Rng,
    cfg: &GeneratorConfig,
    prefer_accepting: bool,
) -> Option<RandomRun> {
    let mut resets = vec![Rational::ZERO; a.clocks().len()];
    let mut loc = a.initial();
    let mut now = Rational::ZERO;
    if !a.invariant_holds(loc, &resets, now) {
        return None;
    }
    let window = cfg.max_delay.unwrap_or(a.max_constant() + 2);
    let mut events = Vec::with_capacity(length);
    let mut locations = vec![loc];

    for step in 0..length {
        let mut options = Vec::new();
        for &ei in a.outgoing(loc) {
            let e = &a.edges()[ei];
            let mut delays = DelaySet::all();
            for cc in a.invariant(loc).iter().chain(&e.guard) {
                delays.restrict(now - resets[cc.clock], cc.op, cc.bound);
            }
            let mut feasible = true;
            for cc in a.invariant(e.target) {
                if e.resets.contains(&cc.clock) {
                    feasible &= cc.op.holds(0, cc.bound);
                } else {
                    delays.restrict(now - resets[cc.clock], cc.op, cc.bound);
                }
            }
            if feasible && !delays.is_empty() {
                options.push((ei, delays));
            }
        }
        if prefer_accepting && step + 1 == length {
            let accepting: Vec<_> =
                options.iter().copied().filter(|(ei, _)| a.is_accepting(a.edges()[*ei].target)).collect();
            if !accepting.is_empty() {
                options = accepting;
            }
        }
        options.shuffle(rng);
        let chosen = options.iter().find_map(|(ei, delays)| delays.sample(rng, cfg, window).map(|d| (*ei, d)));
        let Some((ei, delay)) = chosen else { break };
        let e = &a.edges()[ei];
        now = now + delay;
        for &c in &e.resets {
            resets[c] = now;
        }
        loc = e.target;
        events.push((e.action.clone(), now));
        locations.push(loc);
    }
    Some(RandomRun { word: TimedWord::new(events).expect("delays are nonnegative"), locations })
}

/// Searches for a word of exactly `length` events accepted by `a`.
/// `Ok(None)` means the retry budget ran out.
pub fn generate_accepted_trace_with(
    a: &TimedAutomaton,
    length: usize,
    rng: &mut impl Rng,
    cfg: &GeneratorConfig,
) -> Result<Option<TimedWord>> {
    if length == 0 {
        return Err(Error::domain("trace length must be at least 1"));
    }
    for _ in 0..cfg.retries {
        let Some(run) = random_run(a, length, rng, cfg, true) else {
            return Ok(None);
        };
        if run.word.len() == length && a.is_accepting(run.final_location()) {
            return Ok(Some(run.word));
        }
    }
    Ok(None)
}

/// Deterministic in `(a, length, seed)`.
pub fn generate_accepted_trace(a: &TimedAutomaton, length: usize, seed: u64) -> Result<Option<TimedWord>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    generate_accepted_trace_with(a, length, &mut rng, &GeneratorConfig::default())
}
