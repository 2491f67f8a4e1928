//! Recursive-descent parser for the formula syntax.
//!
//! Precedence from loosest to tightest: `->` (right assoc), `U`/`W`
//! (right assoc), `|`, `&`, then the prefix operators `!`, `F[I]`, `G[I]`.
//! An omitted interval means `[0,inf)`.

use super::{Formula, Interval};
use crate::error::{Error, Result};
use crate::rational::Rational;

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Number(String),
    Not,
    And,
    Or,
    Implies,
    LParen,
    RParen,
    LBrack,
    RBrack,
    Comma,
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let tok = match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'!' | b'~' => Tok::Not,
            b'&' => Tok::And,
            b'|' => Tok::Or,
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b'[' => Tok::LBrack,
            b']' => Tok::RBrack,
            b',' => Tok::Comma,
            b'-' if bytes.get(i + 1) == Some(&b'>') => {
                i += 1;
                Tok::Implies
            }
            b'0'..=b'9' | b'.' => {
                while i + 1 < bytes.len() && matches!(bytes[i + 1], b'0'..=b'9' | b'.' | b'/') {
                    i += 1;
                }
                Tok::Number(text[start..=i].to_string())
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while i + 1 < bytes.len() && (bytes[i + 1].is_ascii_alphanumeric() || bytes[i + 1] == b'_') {
                    i += 1;
                }
                Tok::Ident(text[start..=i].to_string())
            }
            _ => {
                let ch = text[i..].chars().next().unwrap_or('?');
                return Err(Error::Syntax { pos: i, msg: format!("unexpected character '{ch}'") });
            }
        };
        out.push((start, tok));
        // doubled && and || are accepted
        if matches!(out.last(), Some((_, Tok::And | Tok::Or))) && bytes.get(i + 1) == Some(&c) {
            i += 1;
        }
        i += 1;
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn peek_at(&self, k: usize) -> Option<&Tok> {
        self.toks.get(self.pos + k).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |(p, _)| *p)
    }

    fn error<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Syntax { pos: self.offset(), msg: msg.into() })
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(_, t)| t.clone());
        self.pos += 1;
        t
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<()> {
        if self.peek() == Some(&want) {
            self.pos += 1;
            Ok(())
        } else {
            self.error(format!("expected {what}"))
        }
    }

    fn keyword(&self) -> Option<&str> {
        match self.peek() {
            Some(Tok::Ident(s)) => Some(s.as_str()),
            _ => None,
        }
    }

    fn formula(&mut self) -> Result<Formula> {
        let lhs = self.temporal()?;
        if self.peek() == Some(&Tok::Implies) {
            self.pos += 1;
            let rhs = self.formula()?;
            return Ok(lhs.implies(rhs));
        }
        Ok(lhs)
    }

    fn temporal(&mut self) -> Result<Formula> {
        let lhs = self.disjunction()?;
        match self.keyword() {
            Some("U") => {
                self.pos += 1;
                let i = self.interval()?;
                Ok(lhs.until(i, self.temporal()?))
            }
            Some("W") => {
                self.pos += 1;
                let i = self.interval()?;
                Ok(lhs.unless(i, self.temporal()?))
            }
            _ => Ok(lhs),
        }
    }

    fn disjunction(&mut self) -> Result<Formula> {
        let mut lhs = self.conjunction()?;
        while self.peek() == Some(&Tok::Or) {
            self.pos += 1;
            lhs = lhs.or(self.conjunction()?);
        }
        Ok(lhs)
    }

    fn conjunction(&mut self) -> Result<Formula> {
        let mut lhs = self.unary()?;
        while self.peek() == Some(&Tok::And) {
            self.pos += 1;
            lhs = lhs.and(self.unary()?);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula> {
        if self.peek() == Some(&Tok::Not) {
            self.pos += 1;
            return Ok(self.unary()?.not());
        }
        match self.keyword() {
            Some("F") => {
                self.pos += 1;
                let i = self.interval()?;
                Ok(Formula::eventually(i, self.unary()?))
            }
            Some("G") => {
                self.pos += 1;
                let i = self.interval()?;
                Ok(Formula::always(i, self.unary()?))
            }
            _ => self.primary(),
        }
    }

    fn primary(&mut self) -> Result<Formula> {
        let at = self.offset();
        match self.bump() {
            Some(Tok::LParen) => {
                let f = self.formula()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(f)
            }
            Some(Tok::Ident(name)) => match name.as_str() {
                "true" => Ok(Formula::truth()),
                "false" => Ok(Formula::falsity()),
                "U" | "W" | "F" | "G" | "inf" => {
                    Err(Error::Syntax { pos: at, msg: format!("keyword '{name}' cannot be used as a proposition") })
                }
                _ => Ok(Formula::prop(name)),
            },
            Some(tok) => Err(Error::Syntax { pos: at, msg: format!("unexpected token {tok:?}") }),
            None => Err(Error::Syntax { pos: at, msg: "unexpected end of input".into() }),
        }
    }

    /// An interval directly after an operator. A `(` only starts an
    /// interval when followed by a number and a comma, so `G (p)` still
    /// reads as grouping.
    fn interval(&mut self) -> Result<Interval> {
        let lower_closed = match (self.peek(), self.peek_at(1), self.peek_at(2)) {
            (Some(Tok::LBrack), _, _) => true,
            (Some(Tok::LParen), Some(Tok::Number(_)), Some(Tok::Comma)) => false,
            _ => return Ok(Interval::unbounded()),
        };
        let start = self.offset();
        self.pos += 1;
        let lower = self.number()?;
        self.expect(Tok::Comma, "','")?;
        let upper = if self.keyword() == Some("inf") {
            self.pos += 1;
            None
        } else {
            Some(self.number()?)
        };
        let upper_closed = match self.bump() {
            Some(Tok::RBrack) => true,
            Some(Tok::RParen) => false,
            _ => {
                self.pos -= 1;
                return self.error("expected ']' or ')' to close the interval");
            }
        };
        Interval::new(lower, lower_closed, upper, upper_closed)
            .map_err(|e| Error::Syntax { pos: start, msg: e.to_string() })
    }

    fn number(&mut self) -> Result<Rational> {
        let at = self.offset();
        match self.bump() {
            Some(Tok::Number(s)) => s.parse().map_err(|e: Error| Error::Syntax { pos: at, msg: e.to_string() }),
            _ => Err(Error::Syntax { pos: at, msg: "expected a number".into() }),
        }
    }
}

pub fn parse_formula(text: &str) -> Result<Formula> {
    let mut p = Parser { toks: lex(text)?, pos: 0, end: text.len() };
    let f = p.formula()?;
    if p.pos < p.toks.len() {
        return p.error("unexpected trailing input");
    }
    Ok(f)
}
