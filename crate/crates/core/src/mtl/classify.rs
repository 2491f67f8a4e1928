//! Syntactic classifiers.

use std::fmt;

use super::{Atom, Formula, Interval};
use crate::rational::Rational;

/// Removes double negations and pushes negation through `&`/`|` by
/// De Morgan. Negations stop at temporal nodes; there is no temporal
/// dualization.
pub fn propositional_nnf(f: &Formula) -> Formula {
    nnf(f, false)
}

fn nnf(f: &Formula, negate: bool) -> Formula {
    match f {
        Formula::Atom(_) => {
            if negate {
                f.clone().not()
            } else {
                f.clone()
            }
        }
        Formula::Not(a) => nnf(a, !negate),
        Formula::And(a, b) if negate => nnf(a, true).or(nnf(b, true)),
        Formula::And(a, b) => nnf(a, false).and(nnf(b, false)),
        Formula::Or(a, b) if negate => nnf(a, true).and(nnf(b, true)),
        Formula::Or(a, b) => nnf(a, false).or(nnf(b, false)),
        Formula::Until(i, a, b) | Formula::Unless(i, a, b) => {
            let (a, b) = (Box::new(nnf(a, false)), Box::new(nnf(b, false)));
            let node = match f {
                Formula::Until(..) => Formula::Until(*i, a, b),
                _ => Formula::Unless(*i, a, b),
            };
            if negate {
                node.not()
            } else {
                node
            }
        }
    }
}

/// The three syntactic requirements of a weakly constrained formula.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Condition {
    /// (i) every negation sits directly on an atomic proposition.
    NegationOnAtom,
    /// (ii) every until carries an interval open at its finite ends.
    OpenUntil,
    /// (iii) every unless carries an interval closed at its finite ends.
    ClosedUnless,
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Condition::NegationOnAtom => "(i) negation not in front of an atomic proposition",
            Condition::OpenUntil => "(ii) until not constrained by an open interval",
            Condition::ClosedUnless => "(iii) unless not constrained by a closed interval",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub condition: Condition,
    pub subformula: Formula,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WeakCheck {
    Yes,
    No(Vec<Violation>),
}

impl WeakCheck {
    pub fn holds(&self) -> bool {
        matches!(self, WeakCheck::Yes)
    }
}

/// Checks the formula as written; run [`propositional_nnf`] first to
/// normalize Boolean negations. An infinite upper end counts as open for
/// condition (ii).
pub fn is_weakly_constrained(f: &Formula) -> WeakCheck {
    let mut violations = Vec::new();
    f.visit(&mut |node| {
        let condition = match node {
            Formula::Not(inner) if !matches!(**inner, Formula::Atom(_)) => Some(Condition::NegationOnAtom),
            Formula::Until(i, _, _) if !i.is_open() => Some(Condition::OpenUntil),
            Formula::Unless(i, _, _) if !i.is_closed() => Some(Condition::ClosedUnless),
            _ => None,
        };
        if let Some(condition) = condition {
            violations.push(Violation { condition, subformula: node.clone() });
        }
    });
    if violations.is_empty() {
        WeakCheck::Yes
    } else {
        WeakCheck::No(violations)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Pattern {
    /// `G(p -> G[0,c] q)`
    BoundedInvariance(Rational),
    /// `G(p -> F[0,c] q)`
    BoundedResponse(Rational),
    /// Every interval is `[0,inf)`; satisfaction ignores timestamps.
    QualitativeSyntactic,
    Other,
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Pattern::BoundedInvariance(c) => write!(f, "BoundedInvariance({c})"),
            Pattern::BoundedResponse(c) => write!(f, "BoundedResponse({c})"),
            Pattern::QualitativeSyntactic => f.write_str("QualitativeSyntactic"),
            Pattern::Other => f.write_str("Other"),
        }
    }
}

fn is_literal(f: &Formula) -> bool {
    match f {
        Formula::Atom(Atom::Prop(_)) => true,
        Formula::Not(a) => matches!(**a, Formula::Atom(Atom::Prop(_))),
        _ => false,
    }
}

/// `¬p` for a literal `p`. A bare literal also qualifies, being the
/// negation of its complement.
fn is_negated_literal(f: &Formula) -> bool {
    is_literal(f) || matches!(f, Formula::Not(a) if is_literal(a))
}

/// `[0, c]` with finite `c`.
fn bounded_from_zero(i: &Interval) -> Option<Rational> {
    match i.upper() {
        Some(c) if i.lower().is_zero() && i.lower_closed() && i.upper_closed() => Some(c),
        _ => None,
    }
}

fn consequent(f: &Formula) -> Option<Pattern> {
    match f {
        Formula::Until(i, a, q) if **a == Formula::truth() && is_literal(q) => {
            bounded_from_zero(i).map(Pattern::BoundedResponse)
        }
        Formula::Unless(i, q, b) if **b == Formula::falsity() && is_literal(q) => {
            bounded_from_zero(i).map(Pattern::BoundedInvariance)
        }
        _ => None,
    }
}

fn bounded_pattern(f: &Formula) -> Option<Pattern> {
    let Formula::Unless(outer, body, stop) = f else { return None };
    if !outer.is_unbounded_from_zero() || **stop != Formula::falsity() {
        return None;
    }
    let Formula::Or(x, y) = &**body else { return None };
    for (trigger, response) in [(x, y), (y, x)] {
        if is_negated_literal(trigger) {
            if let Some(p) = consequent(response) {
                return Some(p);
            }
        }
    }
    None
}

/// Bounded patterns are tried first; otherwise a formula whose every
/// interval is `[0,inf)` is qualitative. The qualitative test is a
/// sufficient syntactic condition, not a semantic decision.
pub fn classify_pattern(f: &Formula) -> Pattern {
    if let Some(p) = bounded_pattern(f) {
        return p;
    }
    if f.intervals().iter().all(Interval::is_unbounded_from_zero) {
        Pattern::QualitativeSyntactic
    } else {
        Pattern::Other
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mtl::parse_formula;

    fn f(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    #[test]
    fn nnf_examples() {
        assert_eq!(propositional_nnf(&f("!!p")), f("p"));
        assert_eq!(propositional_nnf(&f("!(p & q)")), f("!p | !q"));
        assert_eq!(propositional_nnf(&f("!(p U[0,1] q)")), f("!(p U[0,1] q)"));
        assert_eq!(propositional_nnf(&f("!(p | !(q & r))")), f("!p & (q & r)"));
    }

    #[test]
    fn weakly_constrained_examples() {
        assert_eq!(is_weakly_constrained(&f("p U(0,1) q")), WeakCheck::Yes);
        match is_weakly_constrained(&f("p U[0,1] q")) {
            WeakCheck::No(v) => {
                assert_eq!(v.len(), 1);
                assert_eq!(v[0].condition, Condition::OpenUntil);
            }
            WeakCheck::Yes => panic!("closed until accepted"),
        }
        match is_weakly_constrained(&f("!(p & q)")) {
            WeakCheck::No(v) => assert_eq!(v[0].condition, Condition::NegationOnAtom),
            WeakCheck::Yes => panic!("negated conjunction accepted"),
        }
    }

    #[test]
    fn weakly_constrained_interval_ends() {
        // infinite upper end counts as open, lower end must still be open
        assert!(is_weakly_constrained(&f("p U(1,inf) q")).holds());
        assert!(!is_weakly_constrained(&f("F q")).holds());
        assert!(is_weakly_constrained(&f("G p")).holds());
        assert!(is_weakly_constrained(&f("p W[1,2] q")).holds());
        assert!(!is_weakly_constrained(&f("p W[1,2) q")).holds());
        let nnf = propositional_nnf(&f("!(p & q) | r U(0,2) s"));
        assert!(is_weakly_constrained(&nnf).holds());
    }

    #[test]
    fn pattern_examples() {
        assert_eq!(classify_pattern(&f("G(p -> F[0,2] q)")), Pattern::BoundedResponse(Rational::from(2u32)));
        assert_eq!(classify_pattern(&f("G(p -> G[0,3] q)")), Pattern::BoundedInvariance(Rational::from(3u32)));
        assert_eq!(classify_pattern(&f("G(p -> F q)")), Pattern::QualitativeSyntactic);
        assert_eq!(classify_pattern(&f("G(F[0,2] q | !p)")), Pattern::BoundedResponse(Rational::from(2u32)));
        assert_eq!(classify_pattern(&f("G(!p -> F[0,1] !q)")), Pattern::BoundedResponse(Rational::ONE));
        assert_eq!(classify_pattern(&f("F(0,1) q")), Pattern::Other);
        assert_eq!(classify_pattern(&f("G(p -> F(0,2] q)")), Pattern::Other);
        assert_eq!(classify_pattern(&f("p & q")), Pattern::QualitativeSyntactic);
    }
}
