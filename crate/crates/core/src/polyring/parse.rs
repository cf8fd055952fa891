//! Recursive-descent parser for the polynomial grammar
//!
//! ```text
//! expr   := sign? term (('+'|'-') term)*
//! term   := factor ('*' factor)*
//! factor := atom ('^' uint)?
//! atom   := rational | var | '(' expr ')'
//! ```
//!
//! A leading sign is accepted.

use alloc::format;
use alloc::string::{String, ToString};

use num_bigint::BigInt;
use num_traits::Zero;

use super::{MultiPoly, Rational, Var, RESERVED};
use crate::error::{Error, Result};

/// Parses `text`, accepting `d`, `l`, `m` and the listed parameter names.
pub fn parse_poly(text: &str, declared: &[&str]) -> Result<MultiPoly> {
    Parser { src: text.as_bytes(), pos: 0, declared: Some(declared) }.run()
}

/// Parses `text`, treating every non-reserved identifier as a parameter.
pub fn parse_poly_open(text: &str) -> Result<MultiPoly> {
    Parser { src: text.as_bytes(), pos: 0, declared: None }.run()
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    declared: Option<&'a [&'a str]>,
}

impl Parser<'_> {
    fn run(mut self) -> Result<MultiPoly> {
        let p = self.expr()?;
        self.skip_ws();
        if self.pos < self.src.len() {
            return Err(self.err("unexpected trailing input"));
        }
        Ok(p)
    }

    fn err(&self, message: &str) -> Error {
        Error::Parse { offset: self.pos, message: message.to_string() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<MultiPoly> {
        let mut negate = false;
        match self.peek() {
            Some(b'-') => {
                negate = true;
                self.pos += 1;
            }
            Some(b'+') => self.pos += 1,
            _ => {}
        }
        let mut acc = self.term()?;
        if negate {
            acc = -acc;
        }
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    acc += self.term()?;
                }
                Some(b'-') => {
                    self.pos += 1;
                    acc -= self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<MultiPoly> {
        let mut acc = self.factor()?;
        while self.peek() == Some(b'*') {
            self.pos += 1;
            acc = acc * self.factor()?;
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<MultiPoly> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            self.skip_ws();
            let e = self.uint()?;
            let e: u32 = e.try_into().map_err(|_| self.err("exponent too large"))?;
            return Ok(base.pow(e));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<MultiPoly> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.err("expected `)`"));
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() => {
                let num = self.uint()?;
                if self.peek() == Some(b'/') {
                    self.pos += 1;
                    self.skip_ws();
                    let at = self.pos;
                    let den = self.uint()?;
                    if den.is_zero() {
                        return Err(Error::Parse { offset: at, message: "zero denominator".into() });
                    }
                    return Ok(MultiPoly::constant(Rational::new(num, den)));
                }
                Ok(MultiPoly::constant(Rational::from_integer(num)))
            }
            Some(c) if c.is_ascii_lowercase() => {
                let start = self.pos;
                while self.pos < self.src.len()
                    && (self.src[self.pos].is_ascii_lowercase()
                        || self.src[self.pos].is_ascii_digit()
                        || self.src[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                let name = core::str::from_utf8(&self.src[start..self.pos]).unwrap_or_default();
                if let Some(declared) = self.declared {
                    if !RESERVED.contains(&name) && !declared.contains(&name) {
                        return Err(Error::UndeclaredVariable(String::from(name)));
                    }
                }
                Ok(MultiPoly::var(Var::from_name(name)))
            }
            Some(_) => Err(self.err("expected a number, variable or `(`")),
            None => Err(self.err("unexpected end of input")),
        }
    }

    fn uint(&mut self) -> Result<BigInt> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected digits"));
        }
        let digits = core::str::from_utf8(&self.src[start..self.pos]).unwrap_or("0");
        BigInt::parse_bytes(digits.as_bytes(), 10).ok_or_else(|| Error::Parse { offset: start, message: format!("bad integer `{digits}`") })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyring::{frac, rat};

    #[test]
    fn grammar_examples() {
        let p = parse_poly("d + 2*l", &[]).unwrap();
        assert_eq!(p, MultiPoly::d() + MultiPoly::l().scale(&rat(2)));
        let q = parse_poly("3/2*l", &[]).unwrap();
        assert_eq!(q, MultiPoly::l().scale(&frac(3, 2)));
    }

    #[test]
    fn condition1_row() {
        let p = parse_poly("(d+2*l)*(d*l+l^2)^3", &[]).unwrap();
        let u = MultiPoly::d() * MultiPoly::l() + MultiPoly::l().pow(2);
        let expected = (MultiPoly::d() + MultiPoly::l().scale(&rat(2))) * u.pow(3);
        assert_eq!(p, expected);
    }

    #[test]
    fn errors_carry_offsets() {
        assert_eq!(
            parse_poly("d + * l", &[]),
            Err(Error::Parse { offset: 4, message: "expected a number, variable or `(`".into() })
        );
        assert_eq!(parse_poly("d + q", &[]), Err(Error::UndeclaredVariable("q".into())));
        assert!(parse_poly("d + q", &["q"]).is_ok());
        assert!(matches!(parse_poly("(d", &[]), Err(Error::Parse { offset: 2, .. })));
        assert!(matches!(parse_poly("1/0", &[]), Err(Error::Parse { .. })));
    }
}
