//! Closure analyses for timed automata.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::rational::Rational;
use crate::ta::{generate_accepted_trace_with, random_run, simulate_membership, GeneratorConfig};
use crate::ta::{Classification, TimedAutomaton, TimedWord};
use crate::tick::{
    build_tick_automaton_with_cap, decode_tick_word, encode_integer_word, language_inclusion, Inclusion, TickAutomaton,
    TickWord,
};
use crate::trace::{digitize_times, time_classes};

use super::gen::random_word;
use super::{run_trials, vacuity_note, Evidence, FuzzConfig, ReachSets, Trial, Verdict};

const FALSE_NEGATIVE_CAVEAT: &str = "the automaton is not closed; analysing its closure over-approximates \
     the dense language, so emptiness checks on the closure may report runs the automaton lacks";

fn generator(cfg: &FuzzConfig) -> GeneratorConfig {
    GeneratorConfig { max_denominator: cfg.max_denominator.max(1).next_power_of_two(), ..GeneratorConfig::default() }
}

fn integer_word(w: &TimedWord, times: &[u64]) -> TimedWord {
    w.retimed(times.iter().map(|&n| Rational::from(n))).expect("digitization is monotone")
}

fn tick_accepts(tick: &TickAutomaton, w: &TimedWord) -> (TickWord, bool) {
    let u = encode_integer_word(w.events()).expect("integer word");
    let ok = tick.accepts(&u).expect("word over the automaton's alphabet");
    (u, ok)
}

/// Samples accepted dense words and checks that each digitization is
/// accepted by the tick automaton.
pub fn test_ta_cud_fuzz(a: &TimedAutomaton, cfg: &FuzzConfig, state_cap: usize) -> Result<Verdict> {
    let tick = build_tick_automaton_with_cap(a, state_cap)?;
    let gcfg = generator(cfg);
    let summary = run_trials(cfg, |rng| {
        let len = rng.gen_range(1..=cfg.max_len.max(1));
        let Some(w) = generate_accepted_trace_with(a, len, rng, &gcfg).expect("length is positive") else {
            return Trial::Vacuous;
        };
        for class in time_classes(&w.times()) {
            let d = integer_word(&w, &class.times);
            let (u, ok) = tick_accepts(&tick, &d);
            if !ok {
                return Trial::Failed((w, d, class.representative, u));
            }
        }
        Trial::Passed
    });
    let mut verdict = match summary.failure {
        Some((i, (w, d, eps, u))) => Verdict::counterexample(
            Some(i + 1),
            Evidence {
                trace: Some(w.to_state_sequence()),
                digitized: Some(d.to_state_sequence()),
                eps: Some(eps),
                tick_word: Some(u),
            },
        )
        .with_note("the dense word is accepted but this digitization is rejected by the tick automaton"),
        None => Verdict::no_counterexample(cfg.trials).with_note(vacuity_note(
            summary.exercised,
            cfg.trials,
            "an accepted word was generated",
        )),
    };
    if a.classify() != Classification::Closed {
        verdict = verdict.with_note(format!("automaton is {}", a.classify()));
    }
    Ok(verdict)
}

/// Samples dense words rejected by `a` and checks that some digitization
/// is rejected by the tick automaton too. Half of the samples are words
/// accepted by the closure of `a`, which sit close to its boundary.
pub fn test_ta_cuid_fuzz(a: &TimedAutomaton, cfg: &FuzzConfig, state_cap: usize) -> Result<Verdict> {
    let tick = build_tick_automaton_with_cap(a, state_cap)?;
    let closure = a.closure_transform();
    let alphabet: Vec<String> = a.alphabet().into_iter().collect();
    let gcfg = generator(cfg);
    let summary = run_trials(cfg, |rng| {
        let w = if rng.gen_bool(0.5) {
            let len = rng.gen_range(1..=cfg.max_len.max(1));
            generate_accepted_trace_with(&closure, len, rng, &gcfg).expect("length is positive")
        } else {
            random_word(rng, &alphabet, cfg.max_len, cfg.max_time, cfg.max_denominator)
        };
        let Some(w) = w else { return Trial::Vacuous };
        if simulate_membership(a, &w).is_accepted() {
            return Trial::Vacuous;
        }
        let classes = time_classes(&w.times());
        if classes.iter().all(|c| tick_accepts(&tick, &integer_word(&w, &c.times)).1) {
            Trial::Failed((w, classes.len()))
        } else {
            Trial::Passed
        }
    });
    let mut verdict = match summary.failure {
        Some((i, (w, n))) => {
            Verdict::counterexample(Some(i + 1), Evidence { trace: Some(w.to_state_sequence()), ..Evidence::default() })
                .with_note(format!("the dense word is rejected but all {n} of its digitizations are accepted"))
        }
        None => Verdict::no_counterexample(cfg.trials).with_note(vacuity_note(
            summary.exercised,
            cfg.trials,
            "a rejected word was generated",
        )),
    };
    if a.classify() != Classification::Open {
        verdict = verdict.with_note(format!("automaton is {}", a.classify()));
    }
    Ok(verdict)
}

/// Decides whether the dense language of `a` is closed under digitization
/// by checking `L(tick(closure(a))) ⊆ L(tick(a))`.
///
/// Inclusion is sufficient: every digitization of a word accepted by `a`
/// is accepted by the tick automaton of its closure. When inclusion fails,
/// a dense witness for the offending tick word is searched for; if none is
/// found the answer is inconclusive.
pub fn check_ta_cud(a: &TimedAutomaton, state_cap: usize, seed: u64) -> Result<Verdict> {
    let tick = build_tick_automaton_with_cap(a, state_cap)?;
    let closure = a.closure_transform();
    let tick_closure = build_tick_automaton_with_cap(&closure, state_cap)?;
    let u = match language_inclusion(tick_closure.nfa(), tick.nfa(), state_cap)? {
        Inclusion::Included => return Ok(Verdict::holds("decision via closure-inclusion criterion")),
        Inclusion::Counterexample(u) => u,
    };
    let w = decode_tick_word(&u);
    let note = format!("tick word accepted by the closure but not by the automaton: {u}");
    if w.is_empty() {
        return Ok(Verdict::inconclusive("the separating tick word contains no event")
            .with_evidence(Evidence { tick_word: Some(u), ..Evidence::default() })
            .with_note(note));
    }
    match dense_witness(a, &w, seed) {
        Some((dense, eps)) => Ok(Verdict::counterexample(
            None,
            Evidence {
                trace: Some(dense.to_state_sequence()),
                digitized: Some(w.to_state_sequence()),
                eps: Some(eps),
                tick_word: Some(u),
            },
        )
        .with_note(note)
        .with_note("the dense word is accepted but its digitization is rejected by the tick automaton")),
        None => Ok(Verdict::inconclusive(
            "inclusion fails but no accepted dense word digitizing to the separating word was found",
        )
        .with_evidence(Evidence { digitized: Some(w.to_state_sequence()), tick_word: Some(u), ..Evidence::default() })
        .with_note(note)),
    }
}

const WITNESS_SAMPLES_PER_EPS: usize = 64;

/// Looks for a dense word accepted by `a` whose `eps`-digitization is the
/// integer word `w`. For `eps < 1` the preimage of `n` is `(n-1+eps, n+eps]`
/// intersected with `[0, inf)`.
fn dense_witness(a: &TimedAutomaton, w: &TimedWord, seed: u64) -> Option<(TimedWord, Rational)> {
    let ns: Vec<Rational> = w.times();
    let mut epsilons = vec![Rational::new(1, 2).expect("nonzero")];
    for q in [4i128, 8, 16] {
        epsilons.extend((1..q).filter(|k| k % 2 == 1).map(|k| Rational::new(k, q).expect("nonzero")));
    }
    let tiny = Rational::new(1, 64).expect("nonzero");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let accepts = |times: Vec<Rational>, eps: Rational| {
        let target: Vec<u64> = ns.iter().map(|n| n.to_u64().expect("integer")).collect();
        if digitize_times(&times, eps).ok()? != target {
            return None;
        }
        let dense = w.retimed(times).ok()?;
        simulate_membership(a, &dense).is_accepted().then_some((dense, eps))
    };
    for &eps in &epsilons {
        let late: Vec<Rational> = ns.iter().map(|&n| n + eps).collect();
        if let Some(found) = accepts(late, eps) {
            return Some(found);
        }
        let early: Vec<Rational> = ns
            .iter()
            .map(|&n| if n.is_zero() { n } else { n - Rational::ONE + eps + tiny.min(Rational::ONE - eps) })
            .collect();
        if let Some(found) = accepts(early, eps) {
            return Some(found);
        }
        for _ in 0..WITNESS_SAMPLES_PER_EPS {
            let q: i128 = *[2, 4, 8, 16, 64].choose(&mut rng).expect("nonempty");
            let qr = Rational::from_int(q);
            let mut times: Vec<Rational> = ns
                .iter()
                .map(|&n| {
                    let lo = n - Rational::ONE + eps;
                    let hi = n + eps;
                    let k_min = if n.is_zero() { 0 } else { (lo * qr).floor() + 1 };
                    let k_max = (hi * qr).floor();
                    let k = rng.gen_range(k_min..=k_max.max(k_min));
                    Rational::new(k, q).expect("nonzero")
                })
                .collect();
            times.sort();
            if let Some(found) = accepts(times, eps) {
                return Some(found);
            }
        }
    }
    None
}

/// Compares the locations reachable in the tick automaton with those found
/// by `cfg.trials` random dense walks of up to `cfg.max_len` steps.
///
/// A dense-reachable location missing from the tick set is a
/// counterexample. Fewer dense locations than tick locations is
/// inconclusive, since the walks are only a sample.
pub fn check_reach_equivalence(a: &TimedAutomaton, cfg: &FuzzConfig, state_cap: usize) -> Result<Verdict> {
    let tick = build_tick_automaton_with_cap(a, state_cap)?;
    let tick_set = tick.reachable_locations();
    let gcfg = generator(cfg);
    // location -> first walk (by trial index) that reached it
    let mut dense: BTreeMap<usize, (u64, TimedWord)> = BTreeMap::new();
    for i in 0..cfg.trials {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream(i);
        let Some(run) = random_run(a, cfg.max_len, &mut rng, &gcfg, false) else {
            break;
        };
        for (step, &loc) in run.locations.iter().enumerate() {
            dense.entry(loc).or_insert_with(|| {
                let prefix = run.word.events()[..step].to_vec();
                (i, TimedWord::new(prefix).expect("prefix of a valid word"))
            });
        }
    }
    let names = |locs: &mut dyn Iterator<Item = usize>| -> BTreeSet<String> {
        locs.map(|l| a.location_name(l).to_string()).collect()
    };
    let sets = ReachSets { dense: names(&mut dense.keys().copied()), tick: names(&mut tick_set.iter().copied()) };
    let mut verdict =
        match dense.iter().find(|(l, _)| !tick_set.contains(l)) {
            Some((&l, (i, w))) => Verdict::counterexample(
                Some(i + 1),
                Evidence { trace: Some(w.to_state_sequence()), ..Evidence::default() },
            )
            .with_note(format!("location {} is reachable densely but not in the tick automaton", a.location_name(l))),
            None if dense.len() == tick_set.len() => {
                Verdict::no_counterexample(cfg.trials).with_note("dense and tick location sets are equal")
            }
            None => Verdict::inconclusive("dense exploration reached fewer locations than the tick automaton")
                .with_note(format!("{} of {} locations found densely", dense.len(), tick_set.len())),
        };
    if a.classify() != Classification::Closed {
        verdict = verdict.with_note(FALSE_NEGATIVE_CAVEAT);
    }
    verdict.reach = Some(sets);
    Ok(verdict)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lab::Outcome;
    use crate::tick::DEFAULT_STATE_CAP;

    fn ta(doc: &str) -> TimedAutomaton {
        TimedAutomaton::from_json(doc).unwrap()
    }

    fn ge2() -> TimedAutomaton {
        ta(r#"{"clocks":["x"],"locations":["l0","l1"],"initial":"l0","accepting":["l1"],
               "edges":[{"from":"l0","to":"l1","action":"a","guard":[{"clock":"x","op":">=","const":2}]}]}"#)
    }

    fn gt0() -> TimedAutomaton {
        ta(r#"{"clocks":["x"],"locations":["l0","l1"],"initial":"l0","accepting":["l1"],
               "edges":[{"from":"l0","to":"l1","action":"a","guard":[{"clock":"x","op":">","const":0}]}]}"#)
    }

    fn cfg(trials: u64) -> FuzzConfig {
        FuzzConfig { trials, ..FuzzConfig::default() }
    }

    #[test]
    fn closed_automaton_holds() {
        let v = check_ta_cud(&ge2(), DEFAULT_STATE_CAP, 0).unwrap();
        assert_eq!(v.outcome(), &Outcome::Holds);
    }

    #[test]
    fn strict_guard_has_a_dense_witness() {
        let v = check_ta_cud(&gt0(), DEFAULT_STATE_CAP, 0).unwrap();
        assert!(v.is_counterexample(), "{}", v.render_text());
        let e = v.evidence();
        assert_eq!(e.tick_word.as_ref().unwrap().to_string(), "a");
        assert_eq!(e.eps, Some("1/2".parse().unwrap()));
        assert_eq!(e.trace.as_ref().unwrap().times(), vec!["1/2".parse().unwrap()]);
    }

    #[test]
    fn fuzzers_agree_with_the_classification() {
        assert_eq!(
            test_ta_cud_fuzz(&ge2(), &cfg(300), DEFAULT_STATE_CAP).unwrap().outcome(),
            &Outcome::NoCounterexampleFound { trials: 300 }
        );
        let v = test_ta_cud_fuzz(&gt0(), &cfg(300), DEFAULT_STATE_CAP).unwrap();
        assert!(v.is_counterexample(), "{}", v.render_text());
        assert!(!test_ta_cuid_fuzz(&gt0(), &cfg(300), DEFAULT_STATE_CAP).unwrap().is_counterexample());
        assert!(!test_ta_cuid_fuzz(&ge2(), &cfg(300), DEFAULT_STATE_CAP).unwrap().is_counterexample());
        // x <= 1 or x >= 2: 3/2 is rejected, both of its digitizations accepted
        let gap = ta(r#"{"clocks":["x"],"locations":["l0","l1"],"initial":"l0","accepting":["l1"],
            "edges":[{"from":"l0","to":"l1","action":"a","guard":[{"clock":"x","op":"<=","const":1}]},
                     {"from":"l0","to":"l1","action":"a","guard":[{"clock":"x","op":">=","const":2}]}]}"#);
        let v = test_ta_cuid_fuzz(&gap, &cfg(300), DEFAULT_STATE_CAP).unwrap();
        assert!(v.is_counterexample(), "{}", v.render_text());
    }

    #[test]
    fn reachability_sets_match_for_closed_automata() {
        let v = check_reach_equivalence(&ge2(), &cfg(100), DEFAULT_STATE_CAP).unwrap();
        assert_eq!(v.outcome(), &Outcome::NoCounterexampleFound { trials: 100 });
        let r = v.reach().unwrap();
        assert_eq!(r.dense, r.tick);
    }

    #[test]
    fn open_window_is_invisible_to_ticks() {
        let a = ta(r#"{"clocks":["x"],"locations":["l0","l1"],"initial":"l0","accepting":["l1"],
            "edges":[{"from":"l0","to":"l1","action":"a",
                      "guard":[{"clock":"x","op":">","const":0},{"clock":"x","op":"<","const":1}]}]}"#);
        let v = check_reach_equivalence(&a, &cfg(100), DEFAULT_STATE_CAP).unwrap();
        assert!(v.is_counterexample(), "{}", v.render_text());
        assert!(v.notes().iter().any(|n| n.contains("not closed")));
    }
}
