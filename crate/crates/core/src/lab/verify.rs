//! Bounded integer-time verification of an automaton against a formula.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::Result;
use crate::mtl::{classify_pattern, is_weakly_constrained, propositional_nnf, satisfies, Formula, Pattern, WeakCheck};
use crate::ta::{Classification, TimedAutomaton};
use crate::tick::{build_tick_automaton_with_cap, decode_tick_word, encode_integer_word, DEFAULT_STATE_CAP};

use super::{Evidence, Verdict};

#[derive(Clone, Debug)]
pub struct VerifyOptions {
    /// Atoms observed for each action; unmapped actions observe their own
    /// name.
    pub atom_map: BTreeMap<String, BTreeSet<String>>,
    pub state_cap: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { atom_map: BTreeMap::new(), state_cap: DEFAULT_STATE_CAP }
    }
}

fn gate_system(a: &TimedAutomaton) -> std::result::Result<String, String> {
    match a.classify() {
        Classification::Closed => {
            Ok("system gate passed: the automaton is Closed, hence closed under digitization".into())
        }
        c => Err(format!(
            "system gate failed: the automaton is {c}, so the hypothesis that the system is closed under \
             digitization is not discharged; the closure transform yields a closed automaton at the price of \
             possible false negatives"
        )),
    }
}

fn gate_property(phi: &Formula) -> std::result::Result<String, String> {
    match classify_pattern(phi) {
        Pattern::Other => {}
        p => return Ok(format!("property gate passed: {p}, hence closed under inverse digitization")),
    }
    match is_weakly_constrained(&propositional_nnf(phi)) {
        WeakCheck::Yes => {
            Ok("property gate passed: weakly constrained, hence closed under inverse digitization".into())
        }
        WeakCheck::No(v) => {
            let reasons: Vec<String> = v.iter().map(|v| format!("{} in {}", v.condition, v.subformula)).collect();
            Err(format!(
                "property gate failed: the formula is neither qualitative, a bounded pattern nor weakly \
                 constrained, so the hypothesis that the property is closed under inverse digitization is not \
                 discharged ({})",
                reasons.join("; ")
            ))
        }
    }
}

/// Checks `phi` on every integer-timed word of `a` whose tick encoding has
/// at most `bound` symbols.
///
/// Runs only when both gates pass, in which case a clean result transfers
/// to dense time for the explored words. Words without events are
/// skipped. A counterexample is the shortest violating trace.
pub fn verify(a: &TimedAutomaton, phi: &Formula, bound: usize, opts: &VerifyOptions) -> Result<Verdict> {
    let mut notes = Vec::new();
    // the system must be closed under digitization and the property
    // closed under inverse digitization
    for gate in [gate_system(a), gate_property(phi)] {
        match gate {
            Ok(msg) => notes.push(msg),
            Err(msg) => return Ok(Verdict::inconclusive(msg).with_notes(notes)),
        }
    }
    let tick = build_tick_automaton_with_cap(a, opts.state_cap)?;
    let words = tick.nfa().accepted_words(bound, opts.state_cap)?;
    let mut seen = BTreeSet::new();
    let mut skipped = 0usize;
    for u in words {
        let w = decode_tick_word(&u);
        if w.is_empty() {
            skipped += 1;
            continue;
        }
        if !seen.insert(w.clone()) {
            continue;
        }
        let eta = w.to_state_sequence_with(&opts.atom_map);
        if !satisfies(phi, &eta)? {
            let tick_word = encode_integer_word(w.events())?;
            return Ok(Verdict::counterexample(
                None,
                Evidence { trace: Some(eta), tick_word: Some(tick_word), ..Evidence::default() },
            )
            .with_notes(notes));
        }
    }
    if skipped > 0 {
        notes.push(format!("{skipped} accepted tick words without events were skipped"));
    }
    notes.push(format!("the automaton satisfies {phi} in integer time up to bound {bound}"));
    Ok(Verdict::no_counterexample(seen.len() as u64).with_notes(notes))
}
