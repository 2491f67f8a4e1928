//! Exact membership test of one timed word against a timed automaton.

use std::collections::HashSet;

use super::{LocationId, TimedAutomaton, TimedWord};
use crate::rational::Rational;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Membership {
    /// The edge indices of one accepting run.
    Accepted(Vec<usize>),
    Rejected,
}

impl Membership {
    pub fn is_accepted(&self) -> bool {
        matches!(self, Membership::Accepted(_))
    }
}

// A configuration stores, per clock, the global time of its last reset.
type Config = (LocationId, Vec<Rational>);

struct Search<'a> {
    automaton: &'a TimedAutomaton,
    word: &'a TimedWord,
    dead: HashSet<(usize, Config)>,
    run: Vec<usize>,
}

impl Search<'_> {
    fn dfs(&mut self, step: usize, loc: LocationId, resets: Vec<Rational>) -> bool {
        let a = self.automaton;
        let Some((action, now)) = self.word.events().get(step) else {
            return a.is_accepting(loc);
        };
        let now = *now;
        let key = (step, (loc, resets));
        if self.dead.contains(&key) {
            return false;
        }
        let (_, (loc, resets)) = &key;
        // invariants are convex, so holding at both ends of a delay is enough
        if a.invariant_holds(*loc, resets, now) {
            for &ei in a.outgoing(*loc) {
                let e = &a.edges()[ei];
                if &e.action != action || !e.guard.iter().all(|cc| cc.holds_at(now - resets[cc.clock])) {
                    continue;
                }
                let mut next = resets.clone();
                for &c in &e.resets {
                    next[c] = now;
                }
                if !a.invariant_holds(e.target, &next, now) {
                    continue;
                }
                self.run.push(ei);
                if self.dfs(step + 1, e.target, next) {
                    return true;
                }
                self.run.pop();
            }
        }
        self.dead.insert(key);
        false
    }
}

/// Decides whether `a` accepts `w` under dense-time semantics.
///
/// All clocks start at 0 at time 0 in the initial location. The event at
/// position `i` fires at time `t_i`; the run must respect location
/// invariants throughout and end in an accepting location.
pub fn simulate_membership(a: &TimedAutomaton, w: &TimedWord) -> Membership {
    let zeros = vec![Rational::ZERO; a.clocks().len()];
    if !a.invariant_holds(a.initial(), &zeros, Rational::ZERO) {
        return Membership::Rejected;
    }
    let mut search = Search { automaton: a, word: w, dead: HashSet::new(), run: Vec::new() };
    if search.dfs(0, a.initial(), zeros) {
        Membership::Accepted(search.run)
    } else {
        Membership::Rejected
    }
}
