//! Closure analyses.
//!
//! Two kinds of procedures live here. Decision procedures
//! ([`check_ta_cud`]) may answer [`Outcome::Holds`]. Sampling procedures
//! (every `test_*` function, [`check_reach_equivalence`], the bounded
//! [`verify`]) can only refute; when they find nothing they answer
//! [`Outcome::NoCounterexampleFound`] with the number of trials run.

mod automaton;
mod formula;
pub mod gen;
mod verify;

use std::collections::BTreeSet;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::rational::Rational;
use crate::tick::TickWord;
use crate::trace::TimedStateSequence;

pub use automaton::{check_reach_equivalence, check_ta_cud, test_ta_cud_fuzz, test_ta_cuid_fuzz};
pub use formula::{test_formula_cud, test_formula_cuid};
pub use verify::{verify, VerifyOptions};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    Holds,
    NoCounterexampleFound {
        trials: u64,
    },
    /// `trials` is the 1-based index of the trial that found it, when the
    /// procedure is trial based.
    Counterexample {
        trials: Option<u64>,
    },
    Inconclusive {
        reason: String,
    },
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Evidence {
    pub trace: Option<TimedStateSequence>,
    pub digitized: Option<TimedStateSequence>,
    pub eps: Option<Rational>,
    pub tick_word: Option<TickWord>,
}

/// Location sets compared by [`check_reach_equivalence`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReachSets {
    pub dense: BTreeSet<String>,
    pub tick: BTreeSet<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    outcome: Outcome,
    evidence: Evidence,
    notes: Vec<String>,
    reach: Option<ReachSets>,
}

impl Verdict {
    /// Only decision procedures may call this.
    fn holds(note: impl Into<String>) -> Self {
        Verdict { outcome: Outcome::Holds, evidence: Evidence::default(), notes: vec![note.into()], reach: None }
    }

    pub(crate) fn no_counterexample(trials: u64) -> Self {
        Verdict {
            outcome: Outcome::NoCounterexampleFound { trials },
            evidence: Evidence::default(),
            notes: Vec::new(),
            reach: None,
        }
    }

    pub(crate) fn counterexample(trials: Option<u64>, evidence: Evidence) -> Self {
        Verdict { outcome: Outcome::Counterexample { trials }, evidence, notes: Vec::new(), reach: None }
    }

    pub(crate) fn inconclusive(reason: impl Into<String>) -> Self {
        Verdict {
            outcome: Outcome::Inconclusive { reason: reason.into() },
            evidence: Evidence::default(),
            notes: Vec::new(),
            reach: None,
        }
    }

    pub(crate) fn with_note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }

    pub(crate) fn with_notes(mut self, notes: impl IntoIterator<Item = String>) -> Self {
        self.notes.extend(notes);
        self
    }

    pub(crate) fn with_evidence(mut self, evidence: Evidence) -> Self {
        self.evidence = evidence;
        self
    }

    pub fn outcome(&self) -> &Outcome {
        &self.outcome
    }

    pub fn evidence(&self) -> &Evidence {
        &self.evidence
    }

    pub fn notes(&self) -> &[String] {
        &self.notes
    }

    pub fn reach(&self) -> Option<&ReachSets> {
        self.reach.as_ref()
    }

    pub fn is_counterexample(&self) -> bool {
        matches!(self.outcome, Outcome::Counterexample { .. })
    }

    pub fn kind(&self) -> &'static str {
        match self.outcome {
            Outcome::Holds => "holds",
            Outcome::NoCounterexampleFound { .. } => "no_counterexample_found",
            Outcome::Counterexample { .. } => "counterexample",
            Outcome::Inconclusive { .. } => "inconclusive",
        }
    }

    pub fn trials(&self) -> Option<u64> {
        match self.outcome {
            Outcome::NoCounterexampleFound { trials } => Some(trials),
            Outcome::Counterexample { trials } => trials,
            _ => None,
        }
    }

    /// Structured report. Object keys come out sorted and rationals are
    /// rendered canonically, so equal verdicts give identical bytes.
    pub fn to_report(&self) -> Value {
        let trace = |t: &Option<TimedStateSequence>| match t {
            Some(t) => serde_json::to_value(t).expect("trace serializes"),
            None => Value::Null,
        };
        let mut report = json!({
            "kind": self.kind(),
            "trials": self.trials(),
            "evidence": {
                "trace": trace(&self.evidence.trace),
                "digitized": trace(&self.evidence.digitized),
                "eps": self.evidence.eps.map(|e| e.to_string()),
                "tick_word": self.evidence.tick_word.as_ref().map(|w| w.to_string()),
            },
            "notes": self.notes,
        });
        if let Outcome::Inconclusive { reason } = &self.outcome {
            report["reason"] = json!(reason);
        }
        if let Some(r) = &self.reach {
            report["locations"] = json!({ "dense": r.dense, "tick": r.tick });
        }
        report
    }

    /// Human-readable multi-line summary.
    pub fn render_text(&self) -> String {
        let mut out = match &self.outcome {
            Outcome::Holds => "verdict: holds".to_string(),
            Outcome::NoCounterexampleFound { trials } => {
                format!("verdict: no counterexample found ({trials} trials)")
            }
            Outcome::Counterexample { trials: Some(t) } => format!("verdict: counterexample (trial {t})"),
            Outcome::Counterexample { trials: None } => "verdict: counterexample".to_string(),
            Outcome::Inconclusive { reason } => format!("verdict: inconclusive: {reason}"),
        };
        let e = &self.evidence;
        if let Some(t) = &e.trace {
            out.push_str(&format!("\n  trace:     {t}"));
        }
        if let Some(eps) = e.eps {
            out.push_str(&format!("\n  eps:       {eps}"));
        }
        if let Some(d) = &e.digitized {
            out.push_str(&format!("\n  digitized: {d}"));
        }
        if let Some(w) = &e.tick_word {
            out.push_str(&format!("\n  tick word: {w}"));
        }
        if let Some(r) = &self.reach {
            let join = |s: &BTreeSet<String>| s.iter().cloned().collect::<Vec<_>>().join(", ");
            out.push_str(&format!("\n  dense-reachable: {{{}}}", join(&r.dense)));
            out.push_str(&format!("\n  tick-reachable:  {{{}}}", join(&r.tick)));
        }
        for n in &self.notes {
            out.push_str(&format!("\n  note: {n}"));
        }
        out
    }
}

/// Knobs shared by the sampling procedures. Identical configurations
/// replay identically, whatever `jobs` is.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FuzzConfig {
    pub seed: u64,
    pub trials: u64,
    /// Longest sampled trace or word.
    pub max_len: usize,
    /// Largest sampled timestamp for free-form traces.
    pub max_time: u32,
    /// Largest timestamp denominator; a power of two.
    pub max_denominator: u32,
    /// Worker threads; 1 runs on the calling thread.
    pub jobs: usize,
}

impl Default for FuzzConfig {
    fn default() -> Self {
        FuzzConfig { seed: 0, trials: 1000, max_len: 6, max_time: 4, max_denominator: 8, jobs: 1 }
    }
}

pub(crate) enum Trial<T> {
    /// The sample did not meet the premise of the property.
    Vacuous,
    Passed,
    Failed(T),
}

pub(crate) struct TrialSummary<T> {
    /// First failure in trial order, with its 0-based index.
    pub failure: Option<(u64, T)>,
    /// Non-vacuous trials. Only meaningful when there is no failure.
    pub exercised: u64,
}

/// Each trial gets its own ChaCha stream derived from the seed, so trials
/// are independent and the first failure by index does not depend on the
/// number of workers.
pub(crate) fn run_trials<T: Send>(
    cfg: &FuzzConfig,
    trial: impl Fn(&mut ChaCha8Rng) -> Trial<T> + Sync,
) -> TrialSummary<T> {
    use std::sync::atomic::{AtomicU64, Ordering};
    let exercised = AtomicU64::new(0);
    let one = |i: u64| {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream(i);
        match trial(&mut rng) {
            Trial::Vacuous => None,
            Trial::Passed => {
                exercised.fetch_add(1, Ordering::Relaxed);
                None
            }
            Trial::Failed(t) => Some((i, t)),
        }
    };
    let failure = if cfg.jobs <= 1 {
        (0..cfg.trials).find_map(one)
    } else {
        match rayon::ThreadPoolBuilder::new().num_threads(cfg.jobs).build() {
            Ok(pool) => pool.install(|| (0..cfg.trials).into_par_iter().find_map_first(one)),
            Err(_) => (0..cfg.trials).find_map(one),
        }
    };
    TrialSummary { failure, exercised: exercised.into_inner() }
}

pub(crate) fn vacuity_note(exercised: u64, trials: u64, premise: &str) -> String {
    if exercised == 0 {
        format!("vacuous: no sampled input satisfied the premise ({premise})")
    } else {
        format!("{exercised} of {trials} trials satisfied the premise ({premise})")
    }
}
