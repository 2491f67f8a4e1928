//! Timed automata: data model, syntactic Closed/Open classification and the
//! closure/interior rewrites.
//!
//! Clock constraints are the four atomic forms `x < c`, `x <= c`, `x >= c`,
//! `x > c` with `c` a nonnegative integer. Guards and location invariants are
//! conjunctions of atoms; disjunction is written as parallel edges.

mod format;
mod generate;
mod sim;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::trace::{check_times, TimedStateSequence};

pub use format::{ConstraintDoc, EdgeDoc, OpDoc, TaDocument};
pub use generate::{generate_accepted_trace, generate_accepted_trace_with, random_run, GeneratorConfig, RandomRun};
pub use sim::{simulate_membership, Membership};

pub type LocationId = usize;
pub type ClockId = usize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CmpOp {
    Lt,
    Le,
    Ge,
    Gt,
}

impl CmpOp {
    pub fn is_strict(self) -> bool {
        matches!(self, CmpOp::Lt | CmpOp::Gt)
    }

    pub fn is_upper(self) -> bool {
        matches!(self, CmpOp::Lt | CmpOp::Le)
    }

    /// `<` becomes `<=`, `>` becomes `>=`.
    pub fn closed(self) -> CmpOp {
        match self {
            CmpOp::Lt => CmpOp::Le,
            CmpOp::Gt => CmpOp::Ge,
            op => op,
        }
    }

    /// `<=` becomes `<`, `>=` becomes `>`.
    pub fn open(self) -> CmpOp {
        match self {
            CmpOp::Le => CmpOp::Lt,
            CmpOp::Ge => CmpOp::Gt,
            op => op,
        }
    }

    pub fn holds<T: PartialOrd>(self, value: T, bound: T) -> bool {
        match self {
            CmpOp::Lt => value < bound,
            CmpOp::Le => value <= bound,
            CmpOp::Ge => value >= bound,
            CmpOp::Gt => value > bound,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Ge => ">=",
            CmpOp::Gt => ">",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ClockConstraint {
    pub clock: ClockId,
    pub op: CmpOp,
    pub bound: u32,
}

impl ClockConstraint {
    pub fn holds_at(&self, value: Rational) -> bool {
        self.op.holds(value, Rational::from(self.bound))
    }
}

/// Conjunction of atomic clock constraints.
pub type Guard = Vec<ClockConstraint>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub source: LocationId,
    pub target: LocationId,
    pub action: String,
    pub guard: Guard,
    pub resets: Vec<ClockId>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Classification {
    Closed,
    Open,
    Mixed,
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Classification::Closed => "Closed",
            Classification::Open => "Open",
            Classification::Mixed => "Mixed",
        };
        f.write_str(s)
    }
}

/// Where a constraint occurs inside an automaton.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConstraintSite {
    Guard { edge: usize },
    Invariant { location: LocationId },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TimedAutomaton {
    clocks: Vec<String>,
    locations: Vec<String>,
    initial: LocationId,
    accepting: Vec<bool>,
    invariants: Vec<Guard>,
    edges: Vec<Edge>,
    outgoing: Vec<Vec<usize>>,
}

impl TimedAutomaton {
    pub(crate) fn from_parts(
        clocks: Vec<String>,
        locations: Vec<String>,
        initial: LocationId,
        accepting: Vec<bool>,
        invariants: Vec<Guard>,
        edges: Vec<Edge>,
    ) -> Result<Self> {
        if locations.is_empty() {
            return Err(Error::model("at least one location is required"));
        }
        let n = locations.len();
        let check_loc = |l: LocationId| {
            if l < n {
                Ok(())
            } else {
                Err(Error::model(format!("location index {l} out of range")))
            }
        };
        check_loc(initial)?;
        if accepting.len() != n || invariants.len() != n {
            return Err(Error::model("per-location tables have the wrong length"));
        }
        let check_clock = |c: ClockId| {
            if c < clocks.len() {
                Ok(())
            } else {
                Err(Error::model(format!("clock index {c} out of range")))
            }
        };
        for inv in &invariants {
            inv.iter().try_for_each(|cc| check_clock(cc.clock))?;
        }
        let mut outgoing = vec![Vec::new(); n];
        for (i, e) in edges.iter().enumerate() {
            check_loc(e.source)?;
            check_loc(e.target)?;
            if e.action.is_empty() {
                return Err(Error::model(format!("edge {i} has an empty action")));
            }
            e.guard.iter().try_for_each(|cc| check_clock(cc.clock))?;
            e.resets.iter().try_for_each(|&c| check_clock(c))?;
            outgoing[e.source].push(i);
        }
        Ok(TimedAutomaton { clocks, locations, initial, accepting, invariants, edges, outgoing })
    }

    pub fn clocks(&self) -> &[String] {
        &self.clocks
    }

    pub fn locations(&self) -> &[String] {
        &self.locations
    }

    pub fn location_name(&self, l: LocationId) -> &str {
        &self.locations[l]
    }

    pub fn location_id(&self, name: &str) -> Option<LocationId> {
        self.locations.iter().position(|l| l == name)
    }

    pub fn initial(&self) -> LocationId {
        self.initial
    }

    pub fn is_accepting(&self, l: LocationId) -> bool {
        self.accepting[l]
    }

    pub fn invariant(&self, l: LocationId) -> &[ClockConstraint] {
        &self.invariants[l]
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Indices of the edges leaving `l`, in declaration order.
    pub fn outgoing(&self, l: LocationId) -> &[usize] {
        &self.outgoing[l]
    }

    pub fn alphabet(&self) -> BTreeSet<String> {
        self.edges.iter().map(|e| e.action.clone()).collect()
    }

    /// Largest constant in any guard or invariant, 0 when there is none.
    pub fn max_constant(&self) -> u32 {
        self.constraints().map(|(_, cc)| cc.bound).max().unwrap_or(0)
    }

    /// Every constraint in the automaton with the place it occurs:
    /// invariants in location order, then guards in edge order.
    pub fn constraints(&self) -> impl Iterator<Item = (ConstraintSite, &ClockConstraint)> {
        let invariants = self
            .invariants
            .iter()
            .enumerate()
            .flat_map(|(l, inv)| inv.iter().map(move |cc| (ConstraintSite::Invariant { location: l }, cc)));
        let guards = self
            .edges
            .iter()
            .enumerate()
            .flat_map(|(i, e)| e.guard.iter().map(move |cc| (ConstraintSite::Guard { edge: i }, cc)));
        invariants.chain(guards)
    }

    /// Closed if every constraint is non-strict, Open if every constraint is
    /// strict, Mixed otherwise. A constraint-free automaton counts as Closed.
    pub fn classify(&self) -> Classification {
        let (mut strict, mut weak) = (false, false);
        for (_, cc) in self.constraints() {
            if cc.op.is_strict() {
                strict = true;
            } else {
                weak = true;
            }
        }
        match (strict, weak) {
            (false, _) => Classification::Closed,
            (true, false) => Classification::Open,
            (true, true) => Classification::Mixed,
        }
    }

    fn map_ops(&self, f: impl Fn(CmpOp) -> CmpOp) -> TimedAutomaton {
        let rewrite = |g: &Guard| -> Guard { g.iter().map(|cc| ClockConstraint { op: f(cc.op), ..*cc }).collect() };
        let mut out = self.clone();
        out.invariants = self.invariants.iter().map(rewrite).collect();
        for (e, orig) in out.edges.iter_mut().zip(&self.edges) {
            e.guard = rewrite(&orig.guard);
        }
        out
    }

    /// Weakens every strict constraint to its non-strict counterpart. The
    /// result is Closed and its dense language contains the original's.
    pub fn closure_transform(&self) -> TimedAutomaton {
        self.map_ops(CmpOp::closed)
    }

    /// Tightens every non-strict constraint to its strict counterpart. The
    /// result is Open.
    pub fn interior_transform(&self) -> TimedAutomaton {
        self.map_ops(CmpOp::open)
    }

    pub fn describe_constraint(&self, cc: &ClockConstraint) -> String {
        format!("{} {} {}", self.clocks[cc.clock], cc.op.symbol(), cc.bound)
    }

    pub fn describe_site(&self, site: ConstraintSite) -> String {
        match site {
            ConstraintSite::Guard { edge } => {
                let e = &self.edges[edge];
                format!(
                    "guard of edge {edge} ({} -{}-> {})",
                    self.locations[e.source], e.action, self.locations[e.target]
                )
            }
            ConstraintSite::Invariant { location } => {
                format!("invariant of {}", self.locations[location])
            }
        }
    }

    /// Value of every clock at time `now`, given the time each was last reset.
    pub(crate) fn invariant_holds(&self, l: LocationId, resets: &[Rational], now: Rational) -> bool {
        self.invariants[l].iter().all(|cc| cc.holds_at(now - resets[cc.clock]))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: TaDocument = serde_json::from_str(text)?;
        doc.into_automaton()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&TaDocument::from_automaton(self)).expect("automaton serialization cannot fail")
    }
}

/// A finite timed word: actions with weakly monotone, nonnegative times.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<(String, Rational)>", into = "Vec<(String, Rational)>")]
pub struct TimedWord {
    events: Vec<(String, Rational)>,
}

impl TryFrom<Vec<(String, Rational)>> for TimedWord {
    type Error = Error;
    fn try_from(events: Vec<(String, Rational)>) -> Result<Self> {
        TimedWord::new(events)
    }
}

impl From<TimedWord> for Vec<(String, Rational)> {
    fn from(w: TimedWord) -> Self {
        w.events
    }
}

impl TimedWord {
    pub fn new(events: Vec<(String, Rational)>) -> Result<Self> {
        check_times(events.iter().map(|(_, t)| *t))?;
        Ok(TimedWord { events })
    }

    pub fn from_pairs<S: Into<String>>(pairs: impl IntoIterator<Item = (S, Rational)>) -> Result<Self> {
        Self::new(pairs.into_iter().map(|(a, t)| (a.into(), t)).collect())
    }

    pub fn events(&self) -> &[(String, Rational)] {
        &self.events
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn times(&self) -> Vec<Rational> {
        self.events.iter().map(|(_, t)| *t).collect()
    }

    /// Same actions at new times.
    pub fn retimed(&self, times: impl IntoIterator<Item = Rational>) -> Result<Self> {
        Self::new(self.events.iter().zip(times).map(|((a, _), t)| (a.clone(), t)).collect())
    }

    /// Views the word as a state sequence whose state at each event is the
    /// singleton set holding the action name.
    pub fn to_state_sequence(&self) -> TimedStateSequence {
        self.to_state_sequence_with(&BTreeMap::new())
    }

    /// Like [`TimedWord::to_state_sequence`], but actions listed in
    /// `atom_map` produce the mapped atom set instead of the singleton.
    pub fn to_state_sequence_with(&self, atom_map: &BTreeMap<String, BTreeSet<String>>) -> TimedStateSequence {
        TimedStateSequence::from_pairs(self.events.iter().map(|(a, t)| {
            let atoms = atom_map.get(a).cloned().unwrap_or_else(|| BTreeSet::from([a.clone()]));
            (atoms, *t)
        }))
        .expect("timed words are monotone")
    }
}

impl fmt::Display for TimedWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return write!(f, "<empty>");
        }
        let parts: Vec<String> = self.events.iter().map(|(a, t)| format!("({a}, {t})")).collect();
        f.write_str(&parts.join(" "))
    }
}
