//! Pointwise evaluation over finite traces.

use super::{Atom, Formula};
use crate::error::{Error, Result};
use crate::trace::TimedStateSequence;

/// Truth value of `f` at every position of `eta`.
///
/// Rules, with `d(i, j) = T_j - T_i`:
///
/// - `a U[I] b` holds at `i` iff some `j >= i` has `d(i, j)` in `I`, `b` at
///   `j`, and `a` at every `k` with `i <= k < j`. The witness must lie inside
///   the trace, and `j = i` counts when `0` is in `I`.
/// - `a W[I] b` holds at `i` iff `a U[I] b` does, or `a` holds at every
///   `j >= i` that does not lie past the upper end of `I`. Positions beyond
///   the end of the trace impose nothing.
pub fn evaluate_all(f: &Formula, eta: &TimedStateSequence) -> Vec<bool> {
    let obs = eta.observations();
    let n = obs.len();
    match f {
        Formula::Atom(Atom::True) => vec![true; n],
        Formula::Atom(Atom::False) => vec![false; n],
        Formula::Atom(Atom::Prop(p)) => obs.iter().map(|o| o.state.contains(p)).collect(),
        Formula::Not(a) => evaluate_all(a, eta).into_iter().map(|v| !v).collect(),
        Formula::And(a, b) => {
            let (va, vb) = (evaluate_all(a, eta), evaluate_all(b, eta));
            va.iter().zip(&vb).map(|(x, y)| *x && *y).collect()
        }
        Formula::Or(a, b) => {
            let (va, vb) = (evaluate_all(a, eta), evaluate_all(b, eta));
            va.iter().zip(&vb).map(|(x, y)| *x || *y).collect()
        }
        Formula::Until(interval, a, b) | Formula::Unless(interval, a, b) => {
            let weak = matches!(f, Formula::Unless(..));
            let (va, vb) = (evaluate_all(a, eta), evaluate_all(b, eta));
            (0..n)
                .map(|i| {
                    let mut weak_holds = weak;
                    for j in i..n {
                        let d = obs[j].time - obs[i].time;
                        if !interval.below_upper(d) {
                            // times are monotone, later positions are further out
                            break;
                        }
                        if vb[j] && interval.contains(d) {
                            return true;
                        }
                        if !va[j] {
                            weak_holds = false;
                            break;
                        }
                    }
                    weak_holds
                })
                .collect()
        }
    }
}

pub fn evaluate(f: &Formula, eta: &TimedStateSequence, i: usize) -> Result<bool> {
    if i >= eta.len() {
        return Err(Error::domain(format!("position {i} is out of range for a trace of length {}", eta.len())));
    }
    Ok(evaluate_all(f, eta)[i])
}

/// Satisfaction at position 0. The empty trace is rejected.
pub fn satisfies(f: &Formula, eta: &TimedStateSequence) -> Result<bool> {
    if eta.is_empty() {
        return Err(Error::domain("cannot evaluate a formula on an empty trace"));
    }
    evaluate(f, eta, 0)
}
