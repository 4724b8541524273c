//! Text syntax for field elements, polynomials and rational functions.
//!
//! Expressions use `z` for the transcendental, `t` for the extension-field
//! generator, integer constants, and `+ - * / ^` with parentheses, e.g.
//! `(1 + z^2 + t*z^3)/(z^2 + t)`.

use crate::error::{Error, Result};
use crate::gf::{FieldElem, FieldSpec};
use crate::ratfun::poly::Poly;
use crate::ratfun::rational::RatFunc;
use std::sync::Arc;

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(u64),
    Z,
    T,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    End,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Lexer<'a> {
        Lexer {
            src: src.as_bytes(),
            pos: 0,
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    /// Returns the next token, its start position, and the position just
    /// past it (which `pos` moves to on consumption).
    fn scan(&mut self) -> Result<(Tok, usize, usize)> {
        self.skip_ws();
        let start = self.pos;
        if self.pos >= self.src.len() {
            return Ok((Tok::End, start, start));
        }
        let c = self.src[self.pos];
        let (tok, end) = match c {
            b'+' => (Tok::Plus, start + 1),
            b'-' => (Tok::Minus, start + 1),
            b'*' => (Tok::Star, start + 1),
            b'/' => (Tok::Slash, start + 1),
            b'^' => (Tok::Caret, start + 1),
            b'(' => (Tok::LParen, start + 1),
            b')' => (Tok::RParen, start + 1),
            b'z' => (Tok::Z, start + 1),
            b't' => (Tok::T, start + 1),
            b'0'..=b'9' => {
                let mut end = self.pos;
                while end < self.src.len() && self.src[end].is_ascii_digit() {
                    end += 1;
                }
                let text = std::str::from_utf8(&self.src[self.pos..end]).unwrap();
                let v = text.parse().map_err(|_| Error::Parse {
                    pos: start,
                    msg: "integer too large".into(),
                })?;
                (Tok::Int(v), end)
            }
            other => {
                return Err(Error::Parse {
                    pos: start,
                    msg: format!("unexpected character `{}`", other as char),
                })
            }
        };
        Ok((tok, start, end))
    }

    fn peek(&mut self) -> Result<(Tok, usize)> {
        let (tok, start, _) = self.scan()?;
        Ok((tok, start))
    }

    fn next(&mut self) -> Result<Tok> {
        let (tok, _, end) = self.scan()?;
        self.pos = end;
        Ok(tok)
    }
}

struct Parser<'a> {
    lex: Lexer<'a>,
    spec: Arc<FieldSpec>,
}

impl<'a> Parser<'a> {
    // expr := term (('+'|'-') term)*
    fn expr(&mut self) -> Result<RatFunc> {
        let mut acc = self.term()?;
        loop {
            let (tok, _) = self.lex.peek()?;
            match tok {
                Tok::Plus => {
                    self.lex.next()?;
                    acc = acc.add(&self.term()?);
                }
                Tok::Minus => {
                    self.lex.next()?;
                    acc = acc.sub(&self.term()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    // term := factor (('*'|'/') factor)*
    fn term(&mut self) -> Result<RatFunc> {
        let mut acc = self.factor()?;
        loop {
            let (tok, pos) = self.lex.peek()?;
            match tok {
                Tok::Star => {
                    self.lex.next()?;
                    acc = acc.mul(&self.factor()?);
                }
                Tok::Slash => {
                    self.lex.next()?;
                    let rhs = self.factor()?;
                    acc = acc.div(&rhs).map_err(|_| Error::Parse {
                        pos,
                        msg: "division by zero".into(),
                    })?;
                }
                // juxtaposition like `2t` or `t z` is not supported; be strict
                _ => return Ok(acc),
            }
        }
    }

    // factor := atom ['^' nat] | '-' factor
    fn factor(&mut self) -> Result<RatFunc> {
        let (tok, _) = self.lex.peek()?;
        if tok == Tok::Minus {
            self.lex.next()?;
            return Ok(self.factor()?.neg());
        }
        let base = self.atom()?;
        let (tok, pos) = self.lex.peek()?;
        if tok == Tok::Caret {
            self.lex.next()?;
            match self.lex.next()? {
                Tok::Int(e) => Ok(base.pow(e)),
                _ => Err(Error::Parse {
                    pos,
                    msg: "expected integer exponent".into(),
                }),
            }
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<RatFunc> {
        let (tok, pos) = self.lex.peek()?;
        match tok {
            Tok::Int(v) => {
                self.lex.next()?;
                Ok(RatFunc::constant(FieldElem::from_u64(&self.spec, v)))
            }
            Tok::Z => {
                self.lex.next()?;
                Ok(RatFunc::z(&self.spec))
            }
            Tok::T => {
                self.lex.next()?;
                if self.spec.is_prime_field() {
                    return Err(Error::Parse {
                        pos,
                        msg: "`t` requires an extension field".into(),
                    });
                }
                Ok(RatFunc::from_poly(Poly::constant(FieldElem::from_coeffs(
                    &self.spec,
                    vec![0, 1],
                ))))
            }
            Tok::LParen => {
                self.lex.next()?;
                let inner = self.expr()?;
                let (tok, pos) = self.lex.peek()?;
                if tok != Tok::RParen {
                    return Err(Error::Parse {
                        pos,
                        msg: "expected `)`".into(),
                    });
                }
                self.lex.next()?;
                Ok(inner)
            }
            other => Err(Error::Parse {
                pos,
                msg: format!("unexpected token {other:?}"),
            }),
        }
    }
}

/// Parses a rational-function expression over the given field.
pub fn parse_ratfunc(text: &str, spec: &Arc<FieldSpec>) -> Result<RatFunc> {
    let mut p = Parser {
        lex: Lexer::new(text),
        spec: Arc::clone(spec),
    };
    let out = p.expr()?;
    let (tok, pos) = p.lex.peek()?;
    if tok != Tok::End {
        return Err(Error::Parse {
            pos,
            msg: "trailing input".into(),
        });
    }
    Ok(out)
}

/// Parses a polynomial; rejects expressions with a nontrivial denominator.
pub fn parse_poly(text: &str, spec: &Arc<FieldSpec>) -> Result<Poly> {
    let r = parse_ratfunc(text, spec)?;
    if !r.is_polynomial() {
        return Err(Error::Parse {
            pos: 0,
            msg: "expected a polynomial".into(),
        });
    }
    Ok(r.num().clone())
}

/// Parses a polynomial over the prime field `F_p[z]`.
pub fn parse_fp_poly(text: &str, p: u64) -> Result<Poly> {
    let prime = FieldSpec::prime_field(p)?;
    parse_poly(text, &prime)
}

/// Parses a `;`-separated list of rational functions (family syntax).
pub fn parse_family(text: &str, spec: &Arc<FieldSpec>) -> Result<Vec<RatFunc>> {
    text.split(';')
        .map(|part| parse_ratfunc(part.trim(), spec))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_print_roundtrip() {
        let s = FieldSpec::default_for(2, 2).unwrap();
        for src in [
            "0",
            "1",
            "z",
            "t",
            "1 + z^2 + t*z^3",
            "(1 + z)/(z^2 + z)",
            "(t+1)*z/(z + t)",
        ] {
            let v = parse_ratfunc(src, &s).unwrap();
            let back = parse_ratfunc(&v.to_string(), &s).unwrap();
            assert_eq!(v, back, "{src}");
        }
    }

    #[test]
    fn arithmetic_in_expressions() {
        let s = FieldSpec::prime_field(3).unwrap();
        let v = parse_ratfunc("(z + 1)*(z + 2) - z^2", &s).unwrap();
        // (z+1)(z+2) = z^2 + 3z + 2 = z^2 + 2 over F_3
        assert_eq!(v, parse_ratfunc("2", &s).unwrap());
        let w = parse_ratfunc("1/z + 1/z + 1/z", &s).unwrap();
        assert!(w.is_zero());
    }

    #[test]
    fn rejects_garbage() {
        let s = FieldSpec::prime_field(2).unwrap();
        assert!(parse_ratfunc("z +", &s).is_err());
        assert!(parse_ratfunc("q", &s).is_err());
        assert!(parse_ratfunc("1/0", &s).is_err());
        assert!(parse_ratfunc("z z", &s).is_err());
    }
}
