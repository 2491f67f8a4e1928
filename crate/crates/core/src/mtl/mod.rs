//! Metric temporal logic over finite timed state sequences.
//!
//! The AST has six node kinds: atoms (including `true`/`false`), negation,
//! conjunction, disjunction, interval-constrained `Until` and `Unless`.
//! `F`, `G` and `->` exist only in the concrete syntax:
//!
//! - `F[I] φ`  is `true U[I] φ`
//! - `G[I] φ`  is `φ W[I] false`
//! - `φ -> ψ`  is `!φ | ψ`
//!
//! Satisfaction is pointwise: formulas are evaluated at observation
//! positions, never between them. See [`evaluate`] for the exact rules.

mod classify;
mod eval;
mod parse;

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::rational::Rational;

pub use classify::{
    classify_pattern, is_weakly_constrained, propositional_nnf, Condition, Pattern, Violation, WeakCheck,
};
pub use eval::{evaluate, evaluate_all, satisfies};
pub use parse::parse_formula;

/// A nonempty interval of nonnegative time distances.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Interval {
    lower: Rational,
    lower_closed: bool,
    upper: Option<Rational>,
    upper_closed: bool,
}

impl Interval {
    /// `upper = None` means +∞, which is always an open end.
    pub fn new(lower: Rational, lower_closed: bool, upper: Option<Rational>, upper_closed: bool) -> Result<Self> {
        if lower.is_negative() {
            return Err(Error::domain(format!("interval lower bound {lower} is negative")));
        }
        if let Some(u) = upper {
            if u < lower || (u == lower && !(lower_closed && upper_closed)) {
                let i = Interval { lower, lower_closed, upper, upper_closed };
                return Err(Error::domain(format!("empty interval {i}")));
            }
        } else if upper_closed {
            return Err(Error::domain("an infinite upper bound must be open"));
        }
        Ok(Interval { lower, lower_closed, upper, upper_closed })
    }

    /// `[0, ∞)`.
    pub fn unbounded() -> Self {
        Interval { lower: Rational::ZERO, lower_closed: true, upper: None, upper_closed: false }
    }

    /// `[a, b]`
    pub fn closed(a: Rational, b: Rational) -> Result<Self> {
        Self::new(a, true, Some(b), true)
    }

    /// `(a, b)`
    pub fn open(a: Rational, b: Rational) -> Result<Self> {
        Self::new(a, false, Some(b), false)
    }

    pub fn lower(&self) -> Rational {
        self.lower
    }

    pub fn lower_closed(&self) -> bool {
        self.lower_closed
    }

    pub fn upper(&self) -> Option<Rational> {
        self.upper
    }

    pub fn upper_closed(&self) -> bool {
        self.upper_closed
    }

    pub fn is_unbounded_from_zero(&self) -> bool {
        *self == Interval::unbounded()
    }

    /// Open at every finite endpoint.
    pub fn is_open(&self) -> bool {
        !self.lower_closed && (self.upper.is_none() || !self.upper_closed)
    }

    /// Closed at every finite endpoint.
    pub fn is_closed(&self) -> bool {
        self.lower_closed && (self.upper.is_none() || self.upper_closed)
    }

    pub fn contains(&self, d: Rational) -> bool {
        let above = if self.lower_closed { d >= self.lower } else { d > self.lower };
        above && self.below_upper(d)
    }

    /// `d` does not lie past the upper end of the interval.
    pub fn below_upper(&self, d: Rational) -> bool {
        match self.upper {
            None => true,
            Some(u) if self.upper_closed => d <= u,
            Some(u) => d < u,
        }
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let open = if self.lower_closed { '[' } else { '(' };
        match self.upper {
            None => write!(f, "{open}{},inf)", self.lower),
            Some(u) => {
                let close = if self.upper_closed { ']' } else { ')' };
                write!(f, "{open}{},{u}{close}", self.lower)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Atom {
    True,
    False,
    Prop(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Formula {
    Atom(Atom),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Until(Interval, Box<Formula>, Box<Formula>),
    Unless(Interval, Box<Formula>, Box<Formula>),
}

impl Formula {
    pub fn prop(name: impl Into<String>) -> Self {
        Formula::Atom(Atom::Prop(name.into()))
    }

    pub fn truth() -> Self {
        Formula::Atom(Atom::True)
    }

    pub fn falsity() -> Self {
        Formula::Atom(Atom::False)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(self) -> Self {
        Formula::Not(Box::new(self))
    }

    pub fn and(self, rhs: Formula) -> Self {
        Formula::And(Box::new(self), Box::new(rhs))
    }

    pub fn or(self, rhs: Formula) -> Self {
        Formula::Or(Box::new(self), Box::new(rhs))
    }

    pub fn implies(self, rhs: Formula) -> Self {
        self.not().or(rhs)
    }

    pub fn until(self, interval: Interval, rhs: Formula) -> Self {
        Formula::Until(interval, Box::new(self), Box::new(rhs))
    }

    pub fn unless(self, interval: Interval, rhs: Formula) -> Self {
        Formula::Unless(interval, Box::new(self), Box::new(rhs))
    }

    pub fn eventually(interval: Interval, body: Formula) -> Self {
        Formula::truth().until(interval, body)
    }

    pub fn always(interval: Interval, body: Formula) -> Self {
        body.unless(interval, Formula::falsity())
    }

    /// Atomic propositions mentioned by the formula.
    pub fn props(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit(&mut |f| {
            if let Formula::Atom(Atom::Prop(p)) = f {
                out.insert(p.clone());
            }
        });
        out
    }

    /// Pre-order traversal.
    pub fn visit<'a>(&'a self, f: &mut impl FnMut(&'a Formula)) {
        f(self);
        match self {
            Formula::Atom(_) => {}
            Formula::Not(a) => a.visit(f),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Until(_, a, b) | Formula::Unless(_, a, b) => {
                a.visit(f);
                b.visit(f);
            }
        }
    }

    pub fn intervals(&self) -> Vec<Interval> {
        let mut out = Vec::new();
        self.visit(&mut |f| {
            if let Formula::Until(i, _, _) | Formula::Unless(i, _, _) = f {
                out.push(*i);
            }
        });
        out
    }

    pub fn depth(&self) -> usize {
        match self {
            Formula::Atom(_) => 0,
            Formula::Not(a) => 1 + a.depth(),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Until(_, a, b) | Formula::Unless(_, a, b) => {
                1 + a.depth().max(b.depth())
            }
        }
    }

    /// Applies `rename` to every proposition.
    pub fn rename_props(&self, rename: &impl Fn(&str) -> String) -> Formula {
        let bx = |f: &Formula| Box::new(f.rename_props(rename));
        match self {
            Formula::Atom(Atom::Prop(p)) => Formula::prop(rename(p)),
            Formula::Atom(a) => Formula::Atom(a.clone()),
            Formula::Not(a) => Formula::Not(bx(a)),
            Formula::And(a, b) => Formula::And(bx(a), bx(b)),
            Formula::Or(a, b) => Formula::Or(bx(a), bx(b)),
            Formula::Until(i, a, b) => Formula::Until(*i, bx(a), bx(b)),
            Formula::Unless(i, a, b) => Formula::Unless(*i, bx(a), bx(b)),
        }
    }
}

fn interval_suffix(i: &Interval) -> String {
    if i.is_unbounded_from_zero() {
        String::new()
    } else {
        i.to_string()
    }
}

/// Prints in the concrete syntax accepted by [`parse_formula`], folding the
/// `F`, `G` and `->` sugar back in.
impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Atom(Atom::True) => f.write_str("true"),
            Formula::Atom(Atom::False) => f.write_str("false"),
            Formula::Atom(Atom::Prop(p)) => f.write_str(p),
            Formula::Not(a) => write!(f, "!{a}"),
            Formula::And(a, b) => write!(f, "({a} & {b})"),
            Formula::Or(a, b) => match &**a {
                Formula::Not(p) => write!(f, "({p} -> {b})"),
                _ => write!(f, "({a} | {b})"),
            },
            Formula::Until(i, a, b) if **a == Formula::truth() => {
                write!(f, "F{} {b}", interval_suffix(i))
            }
            Formula::Until(i, a, b) => write!(f, "({a} U{} {b})", interval_suffix(i)),
            Formula::Unless(i, a, b) if **b == Formula::falsity() => {
                write!(f, "G{} {a}", interval_suffix(i))
            }
            Formula::Unless(i, a, b) => write!(f, "({a} W{} {b})", interval_suffix(i)),
        }
    }
}
