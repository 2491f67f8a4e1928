//! Sampling tests for closure of MTL formulas under digitization.

use crate::error::Result;
use crate::mtl::{satisfies, Formula};
use crate::trace::{digitization_classes, digitize_trace, time_classes};

use super::gen::random_trace;
use super::{run_trials, vacuity_note, Evidence, FuzzConfig, Trial, Verdict};

/// Searches for a trace that satisfies `phi` while some digitization of it
/// does not.
pub fn test_formula_cud(phi: &Formula, cfg: &FuzzConfig) -> Result<Verdict> {
    let props = phi.props();
    let summary = run_trials(cfg, |rng| {
        let eta = random_trace(rng, &props, cfg.max_len, cfg.max_time, cfg.max_denominator);
        if !satisfies(phi, &eta).expect("trace is nonempty") {
            return Trial::Vacuous;
        }
        for class in time_classes(&eta.times()) {
            let d = digitize_trace(&eta, class.representative).expect("valid eps");
            if !satisfies(phi, d.as_dense()).expect("trace is nonempty") {
                return Trial::Failed((eta, d, class.representative, class.range));
            }
        }
        Trial::Passed
    });
    Ok(match summary.failure {
        Some((i, (eta, d, eps, range))) => Verdict::counterexample(
            Some(i + 1),
            Evidence { trace: Some(eta), digitized: Some(d.into_dense()), eps: Some(eps), tick_word: None },
        )
        .with_note(format!("the trace satisfies {phi} but its digitization for eps in {range} does not")),
        None => Verdict::no_counterexample(cfg.trials).with_note(vacuity_note(
            summary.exercised,
            cfg.trials,
            "the dense trace satisfies the formula",
        )),
    })
}

/// Searches for a trace that violates `phi` while every digitization of it
/// satisfies it.
pub fn test_formula_cuid(phi: &Formula, cfg: &FuzzConfig) -> Result<Verdict> {
    let props = phi.props();
    let summary = run_trials(cfg, |rng| {
        let eta = random_trace(rng, &props, cfg.max_len, cfg.max_time, cfg.max_denominator);
        if satisfies(phi, &eta).expect("trace is nonempty") {
            return Trial::Vacuous;
        }
        let classes = digitization_classes(&eta);
        if classes.iter().all(|(_, d)| satisfies(phi, d.as_dense()).expect("trace is nonempty")) {
            Trial::Failed((eta, classes.len()))
        } else {
            Trial::Passed
        }
    });
    Ok(match summary.failure {
        Some((i, (eta, n))) => {
            Verdict::counterexample(Some(i + 1), Evidence { trace: Some(eta), ..Evidence::default() })
                .with_note(format!("the trace violates {phi} but all {n} of its digitizations satisfy it"))
        }
        None => Verdict::no_counterexample(cfg.trials).with_note(vacuity_note(
            summary.exercised,
            cfg.trials,
            "the dense trace violates the formula",
        )),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lab::Outcome;
    use crate::mtl::parse_formula;

    fn cfg(trials: u64) -> FuzzConfig {
        FuzzConfig { trials, ..FuzzConfig::default() }
    }

    #[test]
    fn open_window_eventually_is_refuted() {
        let phi = parse_formula("F(0,1) q").unwrap();
        let v = test_formula_cud(&phi, &cfg(200)).unwrap();
        assert!(v.is_counterexample(), "{}", v.render_text());
        let e = v.evidence();
        let eta = e.trace.as_ref().unwrap();
        assert!(satisfies(&phi, eta).unwrap());
        let d = digitize_trace(eta, e.eps.unwrap()).unwrap();
        assert_eq!(Some(d.as_dense()), e.digitized.as_ref());
        assert!(!satisfies(&phi, d.as_dense()).unwrap());
    }

    #[test]
    fn bounded_response_survives() {
        let phi = parse_formula("G(p -> F[0,2] q)").unwrap();
        let v = test_formula_cud(&phi, &cfg(300)).unwrap();
        assert_eq!(v.outcome(), &Outcome::NoCounterexampleFound { trials: 300 });
        let v = test_formula_cuid(&phi, &cfg(300)).unwrap();
        assert_eq!(v.outcome(), &Outcome::NoCounterexampleFound { trials: 300 });
    }

    #[test]
    fn cuid_refutes_closed_window_always_negation() {
        // q at 1/2 after an observation at 0 lies inside (0,1), but every
        // digitization moves it to distance 0 or 1
        let phi = parse_formula("!F(0,1) q").unwrap();
        let v = test_formula_cuid(&phi, &cfg(500)).unwrap();
        assert!(v.is_counterexample(), "{}", v.render_text());
        let eta = v.evidence().trace.as_ref().unwrap();
        assert!(!satisfies(&phi, eta).unwrap());
    }

    #[test]
    fn deterministic_under_seed_and_jobs() {
        let phi = parse_formula("F(0,1) q").unwrap();
        let a = test_formula_cud(&phi, &cfg(200)).unwrap();
        let b = test_formula_cud(&phi, &FuzzConfig { jobs: 3, ..cfg(200) }).unwrap();
        assert_eq!(a.to_report(), b.to_report());
    }
}
