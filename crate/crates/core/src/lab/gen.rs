//! Seeded samplers for traces, words and formulas.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::mtl::{Formula, Interval};
use crate::rational::Rational;
use crate::ta::TimedWord;
use crate::trace::{Observation, TimedStateSequence};

/// Sorted timestamps in `[0, max_time]`. Each is drawn on a grid chosen
/// from `{1, 1/2, 1/2, 1/max_denominator}`, so half-integers and exact
/// ties show up often.
pub fn random_times(rng: &mut impl Rng, len: usize, max_time: u32, max_denominator: u32) -> Vec<Rational> {
    let fine = max_denominator.max(1);
    let mut times: Vec<Rational> = (0..len)
        .map(|_| {
            let q = *[1, 2, 2, fine].choose(rng).expect("nonempty");
            let n = rng.gen_range(0..=max_time * q);
            Rational::new(n as i128, q as i128).expect("nonzero denominator")
        })
        .collect();
    times.sort();
    times
}

/// A trace of `1..=max_len` observations; each proposition of `props` is
/// true at each observation with probability 1/2.
pub fn random_trace(
    rng: &mut impl Rng,
    props: &BTreeSet<String>,
    max_len: usize,
    max_time: u32,
    max_denominator: u32,
) -> TimedStateSequence {
    let len = rng.gen_range(1..=max_len.max(1));
    let observations = random_times(rng, len, max_time, max_denominator)
        .into_iter()
        .map(|t| Observation::new(props.iter().filter(|_| rng.gen_bool(0.5)).cloned(), t))
        .collect();
    TimedStateSequence::new(observations).expect("sorted nonnegative times")
}

/// A word of `1..=max_len` actions drawn from `alphabet`, or `None` when
/// the alphabet is empty.
pub fn random_word(
    rng: &mut impl Rng,
    alphabet: &[String],
    max_len: usize,
    max_time: u32,
    max_denominator: u32,
) -> Option<TimedWord> {
    if alphabet.is_empty() {
        return None;
    }
    let len = rng.gen_range(1..=max_len.max(1));
    let events = random_times(rng, len, max_time, max_denominator)
        .into_iter()
        .map(|t| (alphabet.choose(rng).expect("nonempty").clone(), t))
        .collect();
    Some(TimedWord::new(events).expect("sorted nonnegative times"))
}

/// Interval with integer endpoints in `[0, max_bound]`, or `[0, inf)`.
pub fn random_interval(rng: &mut impl Rng, max_bound: u32) -> Interval {
    if rng.gen_bool(0.25) {
        return Interval::unbounded();
    }
    loop {
        let a = rng.gen_range(0..=max_bound);
        let lower_closed = rng.gen_bool(0.5);
        let upper_closed = rng.gen_bool(0.5);
        let upper =
            if rng.gen_bool(0.2) { None } else { Some(Rational::from(rng.gen_range(a..=max_bound.max(a + 1)))) };
        let upper_closed = upper_closed && upper.is_some();
        if let Ok(i) = Interval::new(Rational::from(a), lower_closed, upper, upper_closed) {
            return i;
        }
    }
}

/// Random formula of nesting depth at most `depth` over `props`. With
/// `qualitative` set every interval is `[0, inf)`.
pub fn random_formula(rng: &mut impl Rng, props: &[String], depth: usize, qualitative: bool) -> Formula {
    if depth == 0 || rng.gen_bool(0.2) {
        return match rng.gen_range(0..10) {
            0 => Formula::truth(),
            1 => Formula::falsity(),
            _ => Formula::prop(props.choose(rng).expect("at least one proposition").clone()),
        };
    }
    let sub = |rng: &mut _| random_formula(rng, props, depth - 1, qualitative);
    let interval = |rng: &mut _| {
        if qualitative {
            Interval::unbounded()
        } else {
            random_interval(rng, 3)
        }
    };
    match rng.gen_range(0..7) {
        0 => sub(rng).not(),
        1 => sub(rng).and(sub(rng)),
        2 => sub(rng).or(sub(rng)),
        3 => sub(rng).implies(sub(rng)),
        4 => {
            let i = interval(rng);
            sub(rng).until(i, sub(rng))
        }
        5 => {
            let i = interval(rng);
            sub(rng).unless(i, sub(rng))
        }
        _ => {
            let i = interval(rng);
            if rng.gen_bool(0.5) {
                Formula::eventually(i, sub(rng))
            } else {
                Formula::always(i, sub(rng))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn traces_are_valid_and_hit_half_integers() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let props: BTreeSet<String> = ["p".to_string(), "q".to_string()].into();
        let mut halves = 0;
        for _ in 0..200 {
            let t = random_trace(&mut rng, &props, 5, 3, 8);
            assert!(!t.is_empty() && t.len() <= 5);
            halves += t.times().iter().filter(|x| x.denom() == 2).count();
        }
        assert!(halves > 50);
    }

    #[test]
    fn qualitative_formulas_have_only_trivial_intervals() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let props = vec!["p".to_string(), "q".to_string()];
        for _ in 0..100 {
            let f = random_formula(&mut rng, &props, 3, true);
            assert!(f.intervals().iter().all(Interval::is_unbounded_from_zero));
        }
    }
}
