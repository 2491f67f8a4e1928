//! Timed state sequences and the ε-digitization operator.
//!
//! A trace is a finite, weakly monotone list of observations `(state, time)`.
//! Digitizing with parameter `eps` in `(0, 1]` rounds each timestamp `x` down
//! when `frac(x) <= eps` and up otherwise; the same `eps` is used for every
//! observation of the trace.
//!
//! As `eps` sweeps `(0, 1]` a trace has only finitely many distinct
//! digitizations. They change only when `eps` crosses one of the fractional
//! parts of the timestamps, which is what [`critical_epsilons`] returns.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::Rational;

/// The atomic propositions true in one observation.
pub type StateLabel = BTreeSet<String>;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Observation {
    #[serde(rename = "atoms")]
    pub state: StateLabel,
    pub time: Rational,
}

impl Observation {
    pub fn new<I, S>(atoms: I, time: Rational) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Observation { state: atoms.into_iter().map(Into::into).collect(), time }
    }
}

/// Finite prefix of a precisely timed state sequence.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "TraceDocument", into = "TraceDocument")]
pub struct TimedStateSequence {
    observations: Vec<Observation>,
}

#[derive(Serialize, Deserialize)]
struct TraceDocument {
    observations: Vec<Observation>,
}

impl TryFrom<TraceDocument> for TimedStateSequence {
    type Error = Error;
    fn try_from(doc: TraceDocument) -> Result<Self> {
        TimedStateSequence::new(doc.observations)
    }
}

impl From<TimedStateSequence> for TraceDocument {
    fn from(seq: TimedStateSequence) -> Self {
        TraceDocument { observations: seq.observations }
    }
}

pub(crate) fn check_times(times: impl IntoIterator<Item = Rational>) -> Result<()> {
    let mut prev = Rational::ZERO;
    for (i, t) in times.into_iter().enumerate() {
        if t.is_negative() {
            return Err(Error::domain(format!("timestamp {i} is negative ({t})")));
        }
        if t < prev {
            return Err(Error::domain(format!(
                "timestamps must be weakly monotone: position {i} has {t} after {prev}"
            )));
        }
        prev = t;
    }
    Ok(())
}

impl TimedStateSequence {
    pub fn new(observations: Vec<Observation>) -> Result<Self> {
        check_times(observations.iter().map(|o| o.time))?;
        Ok(TimedStateSequence { observations })
    }

    pub fn empty() -> Self {
        Self::default()
    }

    /// Convenience constructor from `(atoms, time)` pairs.
    pub fn from_pairs<I, A, S>(pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (A, Rational)>,
        A: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Self::new(pairs.into_iter().map(|(atoms, t)| Observation::new(atoms, t)).collect())
    }

    pub fn observations(&self) -> &[Observation] {
        &self.observations
    }

    pub fn len(&self) -> usize {
        self.observations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.observations.is_empty()
    }

    pub fn times(&self) -> Vec<Rational> {
        self.observations.iter().map(|o| o.time).collect()
    }

    pub fn is_integer_timed(&self) -> bool {
        self.observations.iter().all(|o| o.time.is_integer())
    }

    /// Same states, new timestamps. The new times must be weakly monotone.
    pub fn retimed(&self, times: &[Rational]) -> Result<Self> {
        if times.len() != self.len() {
            return Err(Error::domain("retiming must supply one time per observation"));
        }
        Self::new(
            self.observations
                .iter()
                .zip(times)
                .map(|(o, &time)| Observation { state: o.state.clone(), time })
                .collect(),
        )
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("trace serialization cannot fail")
    }
}

impl fmt::Display for TimedStateSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return write!(f, "<empty>");
        }
        for (i, o) in self.observations.iter().enumerate() {
            if i > 0 {
                write!(f, " -> ")?;
            }
            let atoms: Vec<&str> = o.state.iter().map(String::as_str).collect();
            write!(f, "({{{}}}, {})", atoms.join(","), o.time)?;
        }
        Ok(())
    }
}

/// A timed state sequence whose timestamps are all integers.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "TimedStateSequence", into = "TimedStateSequence")]
pub struct DigitallyTimedSequence(TimedStateSequence);

impl TryFrom<TimedStateSequence> for DigitallyTimedSequence {
    type Error = Error;
    fn try_from(seq: TimedStateSequence) -> Result<Self> {
        if !seq.is_integer_timed() {
            return Err(Error::domain("digitally timed sequence has a non-integer timestamp"));
        }
        Ok(DigitallyTimedSequence(seq))
    }
}

impl From<DigitallyTimedSequence> for TimedStateSequence {
    fn from(seq: DigitallyTimedSequence) -> Self {
        seq.0
    }
}

impl DigitallyTimedSequence {
    pub fn as_dense(&self) -> &TimedStateSequence {
        &self.0
    }

    pub fn into_dense(self) -> TimedStateSequence {
        self.0
    }

    pub fn integer_times(&self) -> Vec<u64> {
        self.0.observations.iter().map(|o| o.time.to_u64().expect("integral by construction")).collect()
    }
}

impl fmt::Display for DigitallyTimedSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

fn check_eps(eps: Rational) -> Result<()> {
    if eps <= Rational::ZERO || eps > Rational::ONE {
        return Err(Error::domain("eps must lie in (0,1]"));
    }
    Ok(())
}

/// Rounds `x` down when `x <= floor(x) + eps`, up otherwise.
pub fn digitize_scalar(x: Rational, eps: Rational) -> Result<u64> {
    check_eps(eps)?;
    if x.is_negative() {
        return Err(Error::domain(format!("cannot digitize negative time {x}")));
    }
    let rounded = if x.fract() <= eps { x.floor() } else { x.ceil() };
    u64::try_from(rounded).map_err(|_| Error::domain(format!("time {x} is too large")))
}

/// Digitizes a list of timestamps with one shared `eps`.
pub fn digitize_times(times: &[Rational], eps: Rational) -> Result<Vec<u64>> {
    times.iter().map(|&t| digitize_scalar(t, eps)).collect()
}

pub fn digitize_trace(eta: &TimedStateSequence, eps: Rational) -> Result<DigitallyTimedSequence> {
    let times = digitize_times(&eta.times(), eps)?;
    let observations = eta
        .observations
        .iter()
        .zip(times)
        .map(|(o, t)| Observation { state: o.state.clone(), time: Rational::from(t) })
        .collect();
    // rounding is monotone, so weak monotonicity carries over
    Ok(DigitallyTimedSequence(TimedStateSequence { observations }))
}

/// Sorted distinct nonzero fractional parts of `times`, followed by 1.
pub fn critical_epsilons_of(times: &[Rational]) -> Vec<Rational> {
    let mut parts: BTreeSet<Rational> = times.iter().map(Rational::fract).filter(|f| !f.is_zero()).collect();
    parts.insert(Rational::ONE);
    parts.into_iter().collect()
}

pub fn critical_epsilons(eta: &TimedStateSequence) -> Vec<Rational> {
    critical_epsilons_of(&eta.times())
}

/// A contiguous range of `eps` values inside `(0, 1]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct EpsRange {
    pub lower: Rational,
    pub lower_closed: bool,
    pub upper: Rational,
    pub upper_closed: bool,
}

impl EpsRange {
    pub fn contains(&self, eps: Rational) -> bool {
        let above = if self.lower_closed { eps >= self.lower } else { eps > self.lower };
        let below = if self.upper_closed { eps <= self.upper } else { eps < self.upper };
        above && below
    }
}

impl fmt::Display for EpsRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.lower == self.upper {
            return write!(f, "{{{}}}", self.lower);
        }
        let open = if self.lower_closed { '[' } else { '(' };
        let close = if self.upper_closed { ']' } else { ')' };
        write!(f, "{open}{}, {}{close}", self.lower, self.upper)
    }
}

/// One distinct digitization together with every `eps` that produces it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TimeClass {
    pub range: EpsRange,
    /// An `eps` inside `range`, the one that was evaluated.
    pub representative: Rational,
    pub times: Vec<u64>,
}

/// Partitions `(0, 1]` into maximal ranges on which digitizing `times`
/// gives the same result, ordered by increasing `eps`.
///
/// Each threshold is evaluated as a point, as is the midpoint of every gap
/// between consecutive thresholds (and between 0 and the first one).
pub fn time_classes(times: &[Rational]) -> Vec<TimeClass> {
    let thresholds = critical_epsilons_of(times);
    let mut samples = Vec::with_capacity(2 * thresholds.len());
    let mut prev = Rational::ZERO;
    for &t in &thresholds {
        samples.push((
            EpsRange { lower: prev, lower_closed: false, upper: t, upper_closed: false },
            Rational::midpoint(prev, t),
        ));
        samples.push((EpsRange { lower: t, lower_closed: true, upper: t, upper_closed: true }, t));
        prev = t;
    }

    let mut classes: Vec<TimeClass> = Vec::new();
    for (range, eps) in samples {
        let digitized = digitize_times(times, eps).expect("samples lie in (0,1]");
        match classes.last_mut() {
            Some(last) if last.times == digitized => {
                last.range.upper = range.upper;
                last.range.upper_closed = range.upper_closed;
            }
            _ => classes.push(TimeClass { range, representative: eps, times: digitized }),
        }
    }
    classes
}

/// Every distinct digitization of `eta` paired with the `eps` range that
/// produces it.
pub fn digitization_classes(eta: &TimedStateSequence) -> Vec<(EpsRange, DigitallyTimedSequence)> {
    time_classes(&eta.times())
        .into_iter()
        .map(|class| {
            let d = digitize_trace(eta, class.representative).expect("valid eps");
            (class.range, d)
        })
        .collect()
}

/// `{ digitize_trace(eta, eps) : eps in (0, 1] }`.
pub fn digitization_set(eta: &TimedStateSequence) -> BTreeSet<DigitallyTimedSequence> {
    digitization_classes(eta).into_iter().map(|(_, d)| d).collect()
}
