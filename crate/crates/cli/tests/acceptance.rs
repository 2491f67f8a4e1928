//! Acceptance criteria. Each test prints one `[PASS]` or `[FAIL]` line;
//! run with `--nocapture` to see them all.

use std::collections::BTreeSet;
use std::path::PathBuf;
use std::process::Command;
use std::time::{Duration, Instant};

use digitime_core::lab::gen::{random_formula, random_trace};
use digitime_core::lab::{self, FuzzConfig, Outcome};
use digitime_core::mtl::{evaluate_all, parse_formula, satisfies, Atom, Formula, Interval};
use digitime_core::ta::{simulate_membership, Classification, TimedAutomaton, TimedWord};
use digitime_core::tick::{build_tick_automaton, encode_integer_word, DEFAULT_STATE_CAP};
use digitime_core::trace::{digitization_set, digitize_scalar, digitize_trace, TimedStateSequence};
use digitime_core::Rational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn criterion(name: &str, limit: Duration, body: impl FnOnce() -> Result<String, String>) {
    let start = Instant::now();
    let result = body();
    let elapsed = start.elapsed();
    let result = match result {
        Ok(detail) if elapsed <= limit => Ok(detail),
        Ok(detail) => Err(format!("{detail}; took {elapsed:.2?}, limit {limit:?}")),
        Err(e) => Err(e),
    };
    match &result {
        Ok(detail) => println!("[PASS] {name} ({elapsed:.2?}): {detail}"),
        Err(e) => println!("[FAIL] {name} ({elapsed:.2?}): {e}"),
    }
    if let Err(e) = result {
        panic!("{name}: {e}");
    }
}

fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

fn corpus() -> Vec<(String, TimedAutomaton)> {
    let mut out: Vec<_> = std::fs::read_dir(corpus_dir().join("ta"))
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .map(|p| {
            let a = TimedAutomaton::from_json(&std::fs::read_to_string(&p).unwrap()).unwrap();
            (p.file_stem().unwrap().to_string_lossy().into_owned(), a)
        })
        .collect();
    out.sort_by(|a, b| a.0.cmp(&b.0));
    out
}

fn closed_corpus() -> Vec<(String, TimedAutomaton)> {
    corpus().into_iter().filter(|(_, a)| a.classify() == Classification::Closed).collect()
}

fn load(name: &str) -> TimedAutomaton {
    corpus().into_iter().find(|(n, _)| n == name).unwrap().1
}

fn rat(n: i128, d: i128) -> Rational {
    Rational::new(n, d).unwrap()
}

fn fuzz(seed: u64, trials: u64) -> FuzzConfig {
    FuzzConfig { seed, trials, ..FuzzConfig::default() }
}

fn expect_clean(what: &str, v: &lab::Verdict) -> Result<(), String> {
    match v.outcome() {
        Outcome::Counterexample { .. } => Err(format!("{what}:\n{}", v.render_text())),
        _ => Ok(()),
    }
}

fn digitime(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_digitime")).args(args).current_dir(corpus_dir()).output().unwrap();
    (out.status.code().unwrap_or(-1), String::from_utf8(out.stdout).unwrap())
}

#[test]
fn digitization_definition_conformance() {
    criterion("digitization definition conformance", Duration::from_secs(5), || {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..10_000 {
            let (xd, ed) = (rng.gen_range(1..=1000i128), rng.gen_range(1..=1000i128));
            let (xn, en) = (rng.gen_range(0..=20 * xd), rng.gen_range(1..=ed));
            // x <= floor(x) + eps, cross-multiplied
            let fl = xn / xd;
            let expected = if xn * ed <= (fl * ed + en) * xd { fl } else { fl + 1 };
            let got = digitize_scalar(rat(xn, xd), rat(en, ed)).map_err(|e| e.to_string())?;
            if got as i128 != expected {
                return Err(format!("x = {xn}/{xd}, eps = {en}/{ed}: got {got}, expected {expected}"));
            }
        }
        Ok("10000 samples, 0 mismatches".into())
    });
}

#[test]
fn digitization_set_completeness() {
    criterion("digitization-set completeness", Duration::from_secs(30), || {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let divisors: Vec<i128> = (1..=1000).filter(|d| 1000 % d == 0).collect();
        let empty = BTreeSet::<String>::new();
        for _ in 0..1000 {
            let len = rng.gen_range(1..=8);
            let mut times: Vec<Rational> = (0..len)
                .map(|_| {
                    let d = divisors[rng.gen_range(0..divisors.len())];
                    rat(rng.gen_range(0..=5 * d), d)
                })
                .collect();
            times.sort();
            let eta = TimedStateSequence::from_pairs(times.into_iter().map(|t| (empty.clone(), t))).unwrap();
            // fractional parts are multiples of 1/1000; k/2000 visits every
            // maximal eps range including (0, 1/1000)
            let brute: BTreeSet<_> = (1..=2000).map(|k| digitize_trace(&eta, rat(k, 2000)).unwrap()).collect();
            if digitization_set(&eta) != brute {
                return Err(format!("mismatch on {eta}"));
            }
        }
        Ok("1000 traces, 0 mismatches".into())
    });
}

fn integer_words(actions: &[String], max_len: usize, max_time: u64) -> Vec<Vec<(String, Rational)>> {
    let mut out = Vec::new();
    let mut frontier: Vec<Vec<(String, Rational)>> = vec![Vec::new()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &frontier {
            let start = w.last().map(|(_, t)| t.to_u64().unwrap()).unwrap_or(0);
            for t in start..=max_time {
                for a in actions {
                    let mut v = w.clone();
                    v.push((a.clone(), Rational::from(t)));
                    next.push(v);
                }
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

#[test]
fn tick_automata_agree_with_simulation() {
    criterion("integer-time regularity on the corpus", Duration::from_secs(60), || {
        let corpus = corpus();
        if corpus.len() < 10 {
            return Err(format!("corpus has only {} automata", corpus.len()));
        }
        let mut checked = 0usize;
        for (name, a) in &corpus {
            if a.clocks().len() > 2 || a.max_constant() > 4 {
                return Err(format!("{name} exceeds 2 clocks or constant 4"));
            }
            let tick = build_tick_automaton(a).map_err(|e| e.to_string())?;
            let actions: Vec<String> = a.alphabet().into_iter().collect();
            for events in integer_words(&actions, 4, u64::from(a.max_constant()) + 3) {
                let w = TimedWord::new(events.clone()).unwrap();
                let by_tick = tick.accepts(&encode_integer_word(&events).unwrap()).unwrap();
                if by_tick != simulate_membership(a, &w).is_accepted() {
                    return Err(format!("{name}: disagreement on {w}"));
                }
                checked += 1;
            }
        }
        Ok(format!("{} automata, {checked} words, 0 disagreements", corpus.len()))
    });
}

#[test]
fn closed_automata_are_closed_under_digitization() {
    criterion("closed automata under digitization", Duration::from_secs(60), || {
        let closed = closed_corpus();
        for (name, a) in &closed {
            let v = lab::test_ta_cud_fuzz(a, &fuzz(0, 1000), DEFAULT_STATE_CAP).map_err(|e| e.to_string())?;
            expect_clean(name, &v)?;
        }
        let v = lab::test_ta_cud_fuzz(&load("gt0"), &fuzz(0, 200), DEFAULT_STATE_CAP).map_err(|e| e.to_string())?;
        let Outcome::Counterexample { trials: Some(t) } = v.outcome() else {
            return Err(format!("x > 0 automaton not refuted within 200 trials:\n{}", v.render_text()));
        };
        Ok(format!("{} closed automata clean at 1000 trials; x > 0 refuted at trial {t}", closed.len()))
    });
}

#[test]
fn open_automata_are_closed_under_inverse_digitization() {
    criterion("open automata under inverse digitization", Duration::from_secs(60), || {
        let corpus = corpus();
        for (name, a) in &corpus {
            let v = lab::test_ta_cuid_fuzz(&a.interior_transform(), &fuzz(0, 1000), DEFAULT_STATE_CAP)
                .map_err(|e| e.to_string())?;
            expect_clean(&format!("interior of {name}"), &v)?;
        }
        Ok(format!("{} interiors clean at 1000 trials", corpus.len()))
    });
}

#[test]
fn qualitative_formulas_are_digitizable() {
    criterion("qualitative formulas under both closures", Duration::from_secs(120), || {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let props = vec!["p".to_string(), "q".to_string()];
        for _ in 0..20 {
            let phi = random_formula(&mut rng, &props, 4, true);
            let cfg = fuzz(0, 1000);
            expect_clean(&format!("{phi} (digitization)"), &lab::test_formula_cud(&phi, &cfg).unwrap())?;
            expect_clean(&format!("{phi} (inverse)"), &lab::test_formula_cuid(&phi, &cfg).unwrap())?;
        }
        Ok("20 formulas clean under both testers at 1000 trials".into())
    });
}

#[test]
fn bounded_invariance_and_response_are_digitizable() {
    criterion("bounded invariance and bounded response", Duration::from_secs(30), || {
        let mut failures = Vec::new();
        for text in ["G(p -> F[0,2] q)", "G(p -> G[0,2] q)"] {
            let phi = parse_formula(text).unwrap();
            let cfg = fuzz(0, 1000);
            for (kind, v) in [
                ("digitization", lab::test_formula_cud(&phi, &cfg).unwrap()),
                ("inverse digitization", lab::test_formula_cuid(&phi, &cfg).unwrap()),
            ] {
                if let Err(e) = expect_clean(&format!("{text} under {kind}"), &v) {
                    failures.push(e);
                }
            }
        }
        if failures.is_empty() {
            Ok("both formulas clean under both testers at 1000 trials".into())
        } else {
            Err(failures.join("\n"))
        }
    });
}

#[test]
fn open_interval_loss_is_demonstrated() {
    criterion("open-interval loss via the CLI", Duration::from_secs(10), || {
        let args = ["--seed", "7", "--format", "structured", "fuzz", "formula-cud", "F(0,1) q"];
        let (code, out) = digitime(&args);
        if code != 1 {
            return Err(format!("exit code {code}, expected 1:\n{out}"));
        }
        let report: serde_json::Value = serde_json::from_str(&out).map_err(|e| e.to_string())?;
        let eta: TimedStateSequence =
            serde_json::from_value(report["evidence"]["trace"].clone()).map_err(|e| e.to_string())?;
        let phi = parse_formula("F(0,1) q").unwrap();
        if !satisfies(&phi, &eta).unwrap() {
            return Err(format!("dense trace {eta} does not satisfy the formula"));
        }
        let set = digitization_set(&eta);
        if let Some(d) = set.iter().find(|d| satisfies(&phi, d.as_dense()).unwrap()) {
            return Err(format!("digitization {} satisfies the formula", d.as_dense()));
        }
        let (code2, out2) = digitime(&args);
        if (code2, &out2) != (code, &out) {
            return Err("replay differs".into());
        }
        Ok(format!("seed 7: {eta} satisfies, all {} digitizations falsify; replay identical", set.len()))
    });
}

#[test]
fn closure_under_digitization_checker() {
    criterion("closure-under-digitization checker", Duration::from_secs(10), || {
        let closed = closed_corpus();
        for (name, a) in &closed {
            let v = lab::check_ta_cud(a, DEFAULT_STATE_CAP, 0).map_err(|e| e.to_string())?;
            if v.outcome() != &Outcome::Holds {
                return Err(format!("{name}:\n{}", v.render_text()));
            }
        }
        let a = load("gt0");
        let v = lab::check_ta_cud(&a, DEFAULT_STATE_CAP, 0).map_err(|e| e.to_string())?;
        if !v.is_counterexample() {
            return Err(format!("x > 0:\n{}", v.render_text()));
        }
        // confirm the witness independently
        let e = v.evidence();
        let (trace, eps, u) = (e.trace.as_ref().unwrap(), e.eps.unwrap(), e.tick_word.as_ref().unwrap());
        let w = TimedWord::new(
            trace.observations().iter().map(|o| (o.state.iter().next().unwrap().clone(), o.time)).collect(),
        )
        .unwrap();
        if !simulate_membership(&a, &w).is_accepted() {
            return Err(format!("witness {w} is not accepted densely"));
        }
        let d = digitize_trace(trace, eps).unwrap();
        let digitized = w.retimed(d.as_dense().times()).unwrap();
        let tick = build_tick_automaton(&a).unwrap();
        if tick.accepts(&encode_integer_word(digitized.events()).unwrap()).unwrap() {
            return Err(format!("digitization {digitized} is accepted integrally"));
        }
        Ok(format!("{} closed automata hold; x > 0 refuted by {w} at eps {eps} (tick word {u})", closed.len()))
    });
}

#[test]
fn verification_pipeline() {
    criterion("dense-to-integer verification pipeline", Duration::from_secs(10), || {
        let (code, out) = digitime(&["--bound", "6", "verify", "ta/ge2.json", "F a"]);
        if code != 0 || !out.contains("up to bound 6") {
            return Err(format!("x >= 2 with F a: exit {code}\n{out}"));
        }
        let (code, out) = digitime(&["verify", "ta/mixed.json", "F a"]);
        if code != 3 || !out.contains("closed under digitization") {
            return Err(format!("mixed automaton: exit {code}\n{out}"));
        }
        Ok("x >= 2 verified up to bound 6; mixed automaton stopped at the system gate".into())
    });
}

#[test]
fn reachability_equivalence() {
    criterion("dense and tick reachability agree", Duration::from_secs(30), || {
        let closed = closed_corpus();
        for (name, a) in &closed {
            let v = lab::check_reach_equivalence(a, &FuzzConfig::default(), DEFAULT_STATE_CAP)
                .map_err(|e| e.to_string())?;
            let r = v.reach().unwrap();
            if r.dense != r.tick {
                return Err(format!("{name}:\n{}", v.render_text()));
            }
        }
        Ok(format!("{} closed automata, equal location sets", closed.len()))
    });
}

fn oracle_holds(f: &Formula, eta: &TimedStateSequence, i: usize) -> bool {
    let obs = eta.observations();
    let d = |j: usize| obs[j].time - obs[i].time;
    let lower = |iv: &Interval, x: Rational| if iv.lower_closed() { x >= iv.lower() } else { x > iv.lower() };
    let upper = |iv: &Interval, x: Rational| match iv.upper() {
        None => true,
        Some(u) => {
            if iv.upper_closed() {
                x <= u
            } else {
                x < u
            }
        }
    };
    match f {
        Formula::Atom(Atom::True) => true,
        Formula::Atom(Atom::False) => false,
        Formula::Atom(Atom::Prop(p)) => obs[i].state.contains(p),
        Formula::Not(a) => !oracle_holds(a, eta, i),
        Formula::And(a, b) => oracle_holds(a, eta, i) && oracle_holds(b, eta, i),
        Formula::Or(a, b) => oracle_holds(a, eta, i) || oracle_holds(b, eta, i),
        Formula::Until(iv, a, b) => (i..obs.len()).any(|j| {
            lower(iv, d(j)) && upper(iv, d(j)) && oracle_holds(b, eta, j) && (i..j).all(|k| oracle_holds(a, eta, k))
        }),
        Formula::Unless(iv, a, b) => {
            oracle_holds(&Formula::Until(*iv, a.clone(), b.clone()), eta, i)
                || (i..obs.len()).filter(|&j| upper(iv, d(j))).all(|j| oracle_holds(a, eta, j))
        }
    }
}

#[test]
fn mtl_evaluator_cross_validation() {
    criterion("MTL evaluator cross-validation", Duration::from_secs(60), || {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let props = vec!["p".to_string(), "q".to_string(), "r".to_string()];
        let set: BTreeSet<String> = props.iter().cloned().collect();
        for _ in 0..10_000 {
            let f = random_formula(&mut rng, &props, 4, false);
            let eta = random_trace(&mut rng, &set, 8, 5, 4);
            let table = evaluate_all(&f, &eta);
            if let Some(i) = (0..eta.len()).find(|&i| table[i] != oracle_holds(&f, &eta, i)) {
                return Err(format!("{f} at position {i} of {eta}"));
            }
        }
        Ok("10000 pairs, 0 mismatches".into())
    });
}
