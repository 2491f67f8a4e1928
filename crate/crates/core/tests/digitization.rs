use std::collections::BTreeSet;

use digitime_core::trace::{
    critical_epsilons, digitization_classes, digitization_set, digitize_scalar, digitize_trace, time_classes,
    TimedStateSequence,
};
use digitime_core::Rational;
use proptest::prelude::*;

fn rat(n: i128, d: i128) -> Rational {
    Rational::new(n, d).unwrap()
}

// round down iff x <= floor(x) + eps, computed on numerators
fn oracle(num: i128, den: i128, eps_num: i128, eps_den: i128) -> u64 {
    let fl = num.div_euclid(den);
    // num/den <= fl + eps_num/eps_den  <=>  num*eps_den <= (fl*eps_den + eps_num)*den
    if num * eps_den <= (fl * eps_den + eps_num) * den {
        fl as u64
    } else {
        (fl + 1) as u64
    }
}

fn arb_time() -> impl Strategy<Value = Rational> {
    (0i128..5000, 1i128..=1000).prop_map(|(n, d)| rat(n, d))
}

fn arb_eps() -> impl Strategy<Value = Rational> {
    (1i128..=1000).prop_flat_map(|d| (1i128..=d).prop_map(move |n| rat(n, d)))
}

fn arb_trace() -> impl Strategy<Value = TimedStateSequence> {
    prop::collection::vec((0i128..4000, prop::bool::ANY), 1..=8).prop_map(|mut v| {
        v.sort();
        TimedStateSequence::from_pairs(v.into_iter().map(|(n, p)| {
            let atoms: BTreeSet<String> = if p { ["p".to_string()].into() } else { BTreeSet::new() };
            (atoms, rat(n, 1000))
        }))
        .unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn scalar_matches_oracle(x in arb_time(), eps in arb_eps()) {
        prop_assert_eq!(
            digitize_scalar(x, eps).unwrap(),
            oracle(x.numer(), x.denom(), eps.numer(), eps.denom())
        );
    }

    #[test]
    fn scalar_is_monotone(x in arb_time(), y in arb_time(), eps in arb_eps()) {
        let (lo, hi) = if x <= y { (x, y) } else { (y, x) };
        prop_assert!(digitize_scalar(lo, eps).unwrap() <= digitize_scalar(hi, eps).unwrap());
    }

    #[test]
    fn scalar_moves_less_than_one(x in arb_time(), eps in arb_eps()) {
        let d = Rational::from(digitize_scalar(x, eps).unwrap());
        prop_assert!(d == x.floor().into_rational() || d == x.ceil().into_rational());
    }

    #[test]
    fn digitization_is_idempotent(eta in arb_trace(), eps in arb_eps()) {
        let once = digitize_trace(&eta, eps).unwrap();
        let twice = digitize_trace(once.as_dense(), eps).unwrap();
        prop_assert_eq!(once, twice);
    }
}

trait IntoRational {
    fn into_rational(self) -> Rational;
}

impl IntoRational for i128 {
    fn into_rational(self) -> Rational {
        Rational::from_int(self)
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn set_matches_brute_force(eta in arb_trace()) {
        // fractional parts are multiples of 1/1000, so the digitization is
        // constant between consecutive multiples; k/2000 samples each gap
        let brute: BTreeSet<_> = (1..=2000)
            .map(|k| digitize_trace(&eta, rat(k, 2000)).unwrap())
            .collect();
        prop_assert_eq!(digitization_set(&eta), brute);
    }

    #[test]
    fn classes_cover_their_ranges(eta in arb_trace()) {
        let classes = digitization_classes(&eta);
        for k in 1..=200 {
            let eps = rat(k, 200);
            let owners: Vec<_> = classes.iter().filter(|(r, _)| r.contains(eps)).collect();
            prop_assert_eq!(owners.len(), 1);
            prop_assert_eq!(&digitize_trace(&eta, eps).unwrap(), &owners[0].1);
        }
        for c in time_classes(&eta.times()) {
            prop_assert!(c.range.contains(c.representative));
        }
        // every class starts at 0 or at a critical eps
        let crit = critical_epsilons(&eta);
        for (r, _) in &classes {
            prop_assert!(r.lower.is_zero() || crit.contains(&r.lower));
        }
    }
}

#[test]
fn three_point_example() {
    let eta = TimedStateSequence::from_pairs([
        (BTreeSet::<String>::new(), rat(0, 1)),
        (BTreeSet::new(), rat(7, 10)),
        (BTreeSet::new(), rat(6, 5)),
    ])
    .unwrap();
    assert_eq!(critical_epsilons(&eta), vec![rat(1, 5), rat(7, 10), Rational::ONE]);
    let times: Vec<Vec<u64>> = digitization_classes(&eta).iter().map(|(_, d)| d.integer_times()).collect();
    assert_eq!(times, vec![vec![0, 1, 2], vec![0, 1, 1], vec![0, 0, 1]]);
}
