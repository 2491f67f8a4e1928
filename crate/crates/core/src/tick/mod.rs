//! Integer-time semantics of a timed automaton as a finite automaton.
//!
//! A digitally timed word `(a1, n1) (a2, n2) ...` is written in unary as
//! `TICK^n1 a1 TICK^(n2-n1) a2 ...`. The tick automaton of `A` reads such
//! words. Its states pair a location with an integer value per clock, where
//! every value above the largest constant `cmax` is collapsed into
//! `cmax + 1`, so the state space is finite.

mod nfa;

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt::Write as _;

pub use nfa::{language_inclusion, Emptiness, Inclusion, Nfa, Symbol, TickWord};

use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::ta::{ClockConstraint, LocationId, TimedAutomaton, TimedWord};

pub const DEFAULT_STATE_CAP: usize = 1_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TickState {
    pub location: LocationId,
    pub valuation: Vec<u32>,
}

#[derive(Clone, Debug)]
pub struct TickAutomaton {
    nfa: Nfa,
    states: Vec<TickState>,
    location_names: Vec<String>,
}

fn holds(constraints: &[ClockConstraint], valuation: &[u32]) -> bool {
    // a capped value compares correctly against every bound <= cmax
    constraints.iter().all(|cc| cc.op.holds(valuation[cc.clock], cc.bound))
}

pub fn build_tick_automaton(a: &TimedAutomaton) -> Result<TickAutomaton> {
    build_tick_automaton_with_cap(a, DEFAULT_STATE_CAP)
}

/// Materializes the states reachable from `(initial, 0, ..., 0)`. If the
/// initial invariant fails at 0 the automaton has a single dead state.
pub fn build_tick_automaton_with_cap(a: &TimedAutomaton, state_cap: usize) -> Result<TickAutomaton> {
    let cap_value = a.max_constant() + 1;
    let start = TickState { location: a.initial(), valuation: vec![0; a.clocks().len()] };
    let alive = holds(a.invariant(a.initial()), &start.valuation);

    let mut ids: HashMap<TickState, usize> = HashMap::from([(start.clone(), 0)]);
    let mut states = vec![start];
    let mut transitions = Vec::new();
    let mut queue = VecDeque::new();
    if alive {
        queue.push_back(0);
    }

    let mut intern = |s: TickState, states: &mut Vec<TickState>, queue: &mut VecDeque<usize>| {
        if let Some(&id) = ids.get(&s) {
            return Ok(id);
        }
        if states.len() >= state_cap {
            return Err(Error::Resource { what: "tick automaton", cap: state_cap });
        }
        let id = states.len();
        ids.insert(s.clone(), id);
        states.push(s);
        queue.push_back(id);
        Ok(id)
    };

    while let Some(id) = queue.pop_front() {
        let TickState { location, valuation } = states[id].clone();

        let ticked: Vec<u32> = valuation.iter().map(|&v| (v + 1).min(cap_value)).collect();
        if holds(a.invariant(location), &ticked) {
            let t = intern(TickState { location, valuation: ticked }, &mut states, &mut queue)?;
            transitions.push((id, Symbol::Tick, t));
        }

        for &ei in a.outgoing(location) {
            let e = &a.edges()[ei];
            if !holds(&e.guard, &valuation) {
                continue;
            }
            let mut next = valuation.clone();
            for &c in &e.resets {
                next[c] = 0;
            }
            if !holds(a.invariant(e.target), &next) {
                continue;
            }
            let t = intern(TickState { location: e.target, valuation: next }, &mut states, &mut queue)?;
            transitions.push((id, Symbol::Event(e.action.clone()), t));
        }
    }

    let accepting: Vec<usize> = states
        .iter()
        .enumerate()
        .filter(|(i, s)| a.is_accepting(s.location) && (alive || *i > 0))
        .map(|(i, _)| i)
        .collect();
    let alphabet = a.alphabet().into_iter().map(Symbol::Event).chain(std::iter::once(Symbol::Tick));
    let nfa = Nfa::new(alphabet, states.len(), 0, accepting, transitions)?;
    Ok(TickAutomaton { nfa, states, location_names: a.locations().to_vec() })
}

impl TickAutomaton {
    pub fn nfa(&self) -> &Nfa {
        &self.nfa
    }

    pub fn states(&self) -> &[TickState] {
        &self.states
    }

    pub fn accepts(&self, word: &TickWord) -> Result<bool> {
        self.nfa.accepts(word)
    }

    /// Locations occurring in some reachable state.
    pub fn reachable_locations(&self) -> BTreeSet<LocationId> {
        let live = self.nfa.reachable();
        self.states.iter().zip(live).filter(|(_, r)| *r).map(|(s, _)| s.location).collect()
    }

    fn node_label(&self, s: &TickState) -> String {
        let vals: Vec<String> = s.valuation.iter().map(u32::to_string).collect();
        format!("{}|{}", self.location_names[s.location], vals.join(","))
    }

    /// Graphviz rendering. Nodes appear in construction (breadth-first)
    /// order, so the output is stable for a given automaton.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph tick {\n  rankdir=LR;\n  start [shape=point];\n");
        for (i, s) in self.states.iter().enumerate() {
            let shape = if self.nfa.is_accepting(i) { "doublecircle" } else { "circle" };
            let _ = writeln!(out, "  n{i} [label=\"{}\", shape={shape}];", self.node_label(s));
        }
        out.push_str("  start -> n0;\n");
        for i in 0..self.states.len() {
            for (sym, t) in self.nfa.transitions(i) {
                let label = match sym {
                    Symbol::Tick => "✓".to_string(),
                    Symbol::Event(a) => a.clone(),
                };
                let _ = writeln!(out, "  n{i} -> n{t} [label=\"{label}\"];");
            }
        }
        out.push_str("}\n");
        out
    }
}

pub fn nfa_accepts(n: &TickAutomaton, u: &TickWord) -> Result<bool> {
    n.accepts(u)
}

pub fn reachable_locations_tick(a: &TimedAutomaton, state_cap: usize) -> Result<BTreeSet<LocationId>> {
    Ok(build_tick_automaton_with_cap(a, state_cap)?.reachable_locations())
}

/// Unary encoding of an integer-timed action word.
pub fn encode_integer_word(events: &[(String, Rational)]) -> Result<TickWord> {
    let mut out = Vec::new();
    let mut clock: u64 = 0;
    for (i, (action, t)) in events.iter().enumerate() {
        let n = t.to_u64().ok_or_else(|| Error::domain(format!("timestamp {i} ({t}) is not a nonnegative integer")))?;
        if n < clock {
            return Err(Error::domain(format!(
                "timestamps must be weakly monotone: position {i} has {n} after {clock}"
            )));
        }
        out.extend(std::iter::repeat_n(Symbol::Tick, (n - clock) as usize));
        out.push(Symbol::Event(action.clone()));
        clock = n;
    }
    Ok(TickWord(out))
}

/// Inverse of [`encode_integer_word`]. Trailing ticks after the last
/// event carry no observation and are dropped.
pub fn decode_tick_word(word: &TickWord) -> TimedWord {
    let mut clock: u64 = 0;
    let mut events = Vec::new();
    for sym in word.symbols() {
        match sym {
            Symbol::Tick => clock += 1,
            Symbol::Event(a) => events.push((a.clone(), Rational::from(clock))),
        }
    }
    TimedWord::new(events).expect("tick words decode to monotone words")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ta::simulate_membership;

    fn ta(text: &str) -> TimedAutomaton {
        TimedAutomaton::from_json(text).unwrap()
    }

    fn ge2() -> TimedAutomaton {
        ta(r#"{"clocks": ["x"], "locations": ["l0", "l1"], "initial": "l0", "accepting": ["l1"],
               "edges": [{"from": "l0", "to": "l1", "action": "a",
                          "guard": [{"clock": "x", "op": ">=", "const": 2}]}]}"#)
    }

    fn word(s: &str) -> TickWord {
        s.parse().unwrap()
    }

    fn all_words(alphabet: &[Symbol], max_len: usize) -> Vec<TickWord> {
        let mut out = vec![TickWord::default()];
        let mut frontier = vec![Vec::new()];
        for _ in 0..max_len {
            let mut next = Vec::new();
            for w in &frontier {
                for s in alphabet {
                    let mut w2: Vec<Symbol> = w.clone();
                    w2.push(s.clone());
                    out.push(TickWord(w2.clone()));
                    next.push(w2);
                }
            }
            frontier = next;
        }
        out
    }

    #[test]
    fn shortest_word_for_ge2_by_brute_force() {
        let n = build_tick_automaton(&ge2()).unwrap();
        let alphabet = [Symbol::Tick, Symbol::Event("a".into())];
        let accepted: Vec<TickWord> = all_words(&alphabet, 3).into_iter().filter(|w| n.accepts(w).unwrap()).collect();
        assert_eq!(accepted, vec![word("TICK TICK a")]);
        assert_eq!(n.nfa().emptiness(), Emptiness::Witness(word("TICK TICK a")));
        assert!(nfa_accepts(&n, &word("TICK TICK a")).unwrap());
        assert!(!nfa_accepts(&n, &word("TICK a")).unwrap());
    }

    #[test]
    fn unconstrained_accepting_initial() {
        let a = ta(r#"{"clocks": ["x"], "locations": ["l0"], "initial": "l0", "accepting": ["l0"]}"#);
        let n = build_tick_automaton(&a).unwrap();
        assert!(n.accepts(&TickWord::default()).unwrap());
    }

    #[test]
    fn guard_at_zero() {
        let a = ta(r#"{"clocks": ["x"], "locations": ["l0", "l1"], "initial": "l0", "accepting": ["l1"],
               "edges": [{"from": "l0", "to": "l1", "action": "a",
                          "guard": [{"clock": "x", "op": "<=", "const": 0}]}]}"#);
        let n = build_tick_automaton(&a).unwrap();
        assert!(!n.accepts(&word("TICK a")).unwrap());
        assert!(n.accepts(&word("a")).unwrap());
        assert_eq!(reachable_locations_tick(&a, 100).unwrap(), BTreeSet::from([0, 1]));
    }

    #[test]
    fn reachability_examples() {
        assert_eq!(reachable_locations_tick(&ge2(), 100).unwrap(), BTreeSet::from([0, 1]));
        let blocked = ta(r#"{"clocks": ["x"], "locations": ["l0", "l1"], "initial": "l0",
               "accepting": ["l1"], "invariants": {"l0": [{"clock": "x", "op": "<=", "const": 1}]},
               "edges": [{"from": "l0", "to": "l1", "action": "a",
                          "guard": [{"clock": "x", "op": ">", "const": 5}]}]}"#);
        assert_eq!(reachable_locations_tick(&blocked, 100).unwrap(), BTreeSet::from([0]));
    }

    #[test]
    fn state_cap_is_reported() {
        let err = build_tick_automaton_with_cap(&ge2(), 2).unwrap_err();
        assert!(err.is_resource());
        assert!(err.to_string().contains("state cap of 2"));
    }

    #[test]
    fn state_count_bound() {
        let n = build_tick_automaton(&ge2()).unwrap();
        // |locations| * (cmax + 2)^|clocks|
        assert!(n.states().len() <= 2 * 4);
    }

    #[test]
    fn encoding_examples() {
        let r = |n: u32| Rational::from(n);
        let e = |a: &str, t| (a.to_string(), r(t));
        assert_eq!(encode_integer_word(&[e("a", 0), e("b", 2)]).unwrap(), word("a TICK TICK b"));
        assert_eq!(encode_integer_word(&[]).unwrap(), TickWord::default());
        assert_eq!(encode_integer_word(&[e("a", 1), e("b", 1)]).unwrap(), word("TICK a b"));
        assert!(encode_integer_word(&[e("a", 2), e("b", 1)]).is_err());
        assert!(encode_integer_word(&[("a".into(), "1/2".parse().unwrap())]).is_err());
    }

    #[test]
    fn decode_inverts_encode() {
        let w = TimedWord::from_pairs([("a", Rational::ZERO), ("b", Rational::from(3u32))]).unwrap();
        assert_eq!(decode_tick_word(&encode_integer_word(w.events()).unwrap()), w);
    }

    #[test]
    fn agrees_with_dense_simulation_on_integer_words() {
        let a = ge2();
        let n = build_tick_automaton(&a).unwrap();
        for t in 0..6u32 {
            let w = TimedWord::from_pairs([("a", Rational::from(t))]).unwrap();
            let u = encode_integer_word(w.events()).unwrap();
            assert_eq!(n.accepts(&u).unwrap(), simulate_membership(&a, &w).is_accepted());
        }
    }

    #[test]
    fn dot_export_is_stable() {
        let n = build_tick_automaton(&ge2()).unwrap();
        let expected = "digraph tick {
  rankdir=LR;
  start [shape=point];
  n0 [label=\"l0|0\", shape=circle];
  n1 [label=\"l0|1\", shape=circle];
  n2 [label=\"l0|2\", shape=circle];
  n3 [label=\"l0|3\", shape=circle];
  n4 [label=\"l1|2\", shape=doublecircle];
  n5 [label=\"l1|3\", shape=doublecircle];
  start -> n0;
  n0 -> n1 [label=\"✓\"];
  n1 -> n2 [label=\"✓\"];
  n2 -> n3 [label=\"✓\"];
  n2 -> n4 [label=\"a\"];
  n3 -> n3 [label=\"✓\"];
  n3 -> n5 [label=\"a\"];
  n4 -> n5 [label=\"✓\"];
  n5 -> n5 [label=\"✓\"];
}
";
        assert_eq!(n.to_dot(), expected);
    }
}
