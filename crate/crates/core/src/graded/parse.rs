//! Recursive-descent parser for the expression language.
//!
//! ```text
//! expr     := ['+'|'-'] term (('+'|'-') term)*
//! term     := factor (('*'|'/') factor)*
//! factor   := base ('^' NAT)?
//! base     := RATIONAL | NAME | '(' expr ')'
//! RATIONAL := INT ('/' NAT)?
//! ```
//!
//! Division is only defined by a nonzero constant, so `x2^2/2` reads as
//! one half of `x2^2`.

use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::Zero;

use super::number::{Rational, Supernumber};
use super::space::GradedSpace;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(BigInt),
    Name(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    End,
}

fn tokenize(text: &str) -> Result<Vec<(usize, Tok)>> {
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
            b'+' => Tok::Plus,
            b'-' => Tok::Minus,
            b'*' => Tok::Star,
            b'/' => Tok::Slash,
            b'^' => Tok::Caret,
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b'0'..=b'9' => {
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                out.push((start, Tok::Int(text[start..i].parse().unwrap())));
                continue;
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((start, Tok::Name(text[start..i].to_string())));
                continue;
            }
            _ => {
                let ch = text[start..].chars().next().unwrap();
                return Err(Error::Syntax { pos: start, msg: format!("unexpected character `{ch}`") });
            }
        };
        out.push((start, tok));
        i += 1;
    }
    out.push((text.len(), Tok::End));
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    space: &'a Arc<GradedSpace>,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].1
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].0
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].1.clone();
        if t != Tok::End {
            self.pos += 1;
        }
        t
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Syntax { pos: self.offset(), msg: msg.into() })
    }

    fn expr(&mut self) -> Result<Supernumber> {
        let mut negate = false;
        match self.peek() {
            Tok::Minus => {
                self.bump();
                negate = true;
            }
            Tok::Plus => {
                self.bump();
            }
            _ => {}
        }
        let first = self.term()?;
        let mut acc = if negate { -first } else { first };
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    acc = &acc + &self.term()?;
                }
                Tok::Minus => {
                    self.bump();
                    acc = &acc - &self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Supernumber> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Tok::Star => {
                    self.bump();
                    acc = &acc * &self.factor()?;
                }
                Tok::Slash => {
                    self.bump();
                    let at = self.offset();
                    let d = self.factor()?;
                    match d.as_constant() {
                        Some(c) if !c.is_zero() => acc = acc.scale(&(Rational::from_integer(1.into()) / c)),
                        Some(_) => return Err(Error::Syntax { pos: at, msg: "division by zero".into() }),
                        None => {
                            return Err(Error::Syntax { pos: at, msg: "divisor must be a nonzero constant".into() })
                        }
                    }
                }
                _ => return Ok(acc),
            }
        }
    }

    fn factor(&mut self) -> Result<Supernumber> {
        let base = self.base()?;
        if *self.peek() == Tok::Caret {
            self.bump();
            match self.bump() {
                Tok::Int(n) => {
                    let e: u32 = n.try_into().map_err(|_| Error::Syntax {
                        pos: self.toks[self.pos - 1].0,
                        msg: "exponent too large".into(),
                    })?;
                    return Ok(base.pow(e));
                }
                _ => {
                    self.pos -= 1;
                    return self.err("expected a natural-number exponent");
                }
            }
        }
        Ok(base)
    }

    fn base(&mut self) -> Result<Supernumber> {
        let at = self.offset();
        match self.bump() {
            Tok::Int(n) => Ok(Supernumber::constant(self.space, Rational::from_integer(n))),
            Tok::Name(name) => Supernumber::coordinate(self.space, &name),
            Tok::LParen => {
                let inner = self.expr()?;
                if self.bump() != Tok::RParen {
                    self.pos -= 1;
                    return self.err("expected `)`");
                }
                Ok(inner)
            }
            Tok::End => Err(Error::Syntax { pos: at, msg: "unexpected end of input".into() }),
            t => Err(Error::Syntax { pos: at, msg: format!("unexpected token {t:?}") }),
        }
    }
}

/// Parses an expression into its canonical form over `space`.
pub fn parse(text: &str, space: &Arc<GradedSpace>) -> Result<Supernumber> {
    let mut p = Parser { toks: tokenize(text)?, pos: 0, space };
    let v = p.expr()?;
    if *p.peek() != Tok::End {
        return p.err("trailing input");
    }
    Ok(v)
}

/// Parses a rational literal such as `-3/4`.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let t = text.trim();
    let (neg, body) = match t.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, t),
    };
    let bad = || Error::Syntax { pos: 0, msg: format!("`{text}` is not a rational literal") };
    let (n, d) = match body.split_once('/') {
        Some((n, d)) => (n, d),
        None => (body, "1"),
    };
    if n.is_empty() || d.is_empty() || !n.bytes().all(|b| b.is_ascii_digit()) || !d.bytes().all(|b| b.is_ascii_digit()) {
        return Err(bad());
    }
    let n: BigInt = n.parse().map_err(|_| bad())?;
    let d: BigInt = d.parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(bad());
    }
    let r = Rational::new(n, d);
    Ok(if neg { -r } else { r })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graded::number::{int, Monomial};

    fn space() -> Arc<GradedSpace> {
        Arc::new("x1:b,x2:b,th1:f,th2:f".parse().unwrap())
    }

    #[test]
    fn reads_grammar_example() {
        let s = space();
        let v = parse("x1^2 + 3*th1*th2", &s).unwrap();
        let expected = Supernumber::from_terms(
            &s,
            [
                (Monomial::new(&[], vec![2, 0]).unwrap(), int(1)),
                (Monomial::new(&[0, 1], vec![0, 0]).unwrap(), int(3)),
            ],
        );
        assert_eq!(v, expected);
    }

    #[test]
    fn fermion_square_and_reordering() {
        let s = space();
        assert!(parse("th1*th1", &s).unwrap().is_zero());
        assert_eq!(parse("th2*th1", &s).unwrap(), -parse("th1*th2", &s).unwrap());
    }

    #[test]
    fn unary_minus_rationals_and_division() {
        let s = space();
        assert_eq!(parse("-1/2*th1*th2", &s).unwrap().to_string(), "-1/2*th1*th2");
        assert_eq!(parse("x2^2/2", &s).unwrap(), parse("1/2*x2^2", &s).unwrap());
        assert_eq!(parse("-(x1 - x2)", &s).unwrap(), parse("x2 - x1", &s).unwrap());
        assert_eq!(parse("  x1 +\tx1 ", &s).unwrap(), parse("2*x1", &s).unwrap());
    }

    #[test]
    fn errors_carry_positions() {
        let s = space();
        assert_eq!(parse("x1 + y", &s), Err(Error::UnknownCoordinate("y".into())));
        match parse("x1 + * x2", &s) {
            Err(Error::Syntax { pos, .. }) => assert_eq!(pos, 5),
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse("x1 x2", &s), Err(Error::Syntax { pos: 3, .. })));
        assert!(matches!(parse("(x1", &s), Err(Error::Syntax { .. })));
        assert!(matches!(parse("x1/x2", &s), Err(Error::Syntax { .. })));
        assert!(matches!(parse("x1/0", &s), Err(Error::Syntax { .. })));
        assert!(matches!(parse("x1^th1", &s), Err(Error::Syntax { .. })));
        assert!(matches!(parse("", &s), Err(Error::Syntax { pos: 0, .. })));
        assert!(matches!(parse("x1 $", &s), Err(Error::Syntax { pos: 3, .. })));
    }

    #[test]
    fn rational_literals() {
        assert_eq!(parse_rational("-3/4").unwrap(), crate::graded::number::rat(-3, 4));
        assert_eq!(parse_rational("5").unwrap(), int(5));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("1.5").is_err());
        assert!(parse_rational("").is_err());
    }
}
