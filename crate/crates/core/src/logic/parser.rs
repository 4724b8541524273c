//! Parser for the formula language.
//!
//! Sorts are annotated at binders or first use (`x:R`, `a:F`); names of the
//! form `x<n>` / `a<n>` carry their sort and index implicitly, so printed
//! formulas parse back to themselves. Inside `P{ ... }` every variable is
//! implicitly F-sorted. Terms use `+`, `-`, `frob(t)` or `t^p`, `z*t`,
//! `poly{...}*t`, and integer constants.

use crate::additive::{Sort, Var};
use crate::error::{Error, Result};
use crate::gf::FieldSpec;
use crate::logic::ast::{Formula, SigmaPredicate, Term};
use crate::textio::parse_fp_poly;
use std::collections::BTreeMap;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Int(u64),
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
    LBrace,
    RBrace,
    Comma,
    Colon,
    Eq,
    Neq,
    Arrow,
    End,
}

struct Lexer {
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

fn tokenize(src: &str) -> Result<Vec<(Tok, usize)>> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0usize;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let tok = match c {
            b'+' => {
                i += 1;
                Tok::Plus
            }
            b'*' => {
                i += 1;
                Tok::Star
            }
            b'^' => {
                i += 1;
                Tok::Caret
            }
            b'(' => {
                i += 1;
                Tok::LParen
            }
            b')' => {
                i += 1;
                Tok::RParen
            }
            b'{' => {
                i += 1;
                Tok::LBrace
            }
            b'}' => {
                i += 1;
                Tok::RBrace
            }
            b',' => {
                i += 1;
                Tok::Comma
            }
            b':' => {
                i += 1;
                Tok::Colon
            }
            b'=' => {
                i += 1;
                Tok::Eq
            }
            b'!' => {
                if bytes.get(i + 1) == Some(&b'=') {
                    i += 2;
                    Tok::Neq
                } else {
                    return Err(Error::Parse {
                        pos: i,
                        msg: "expected `!=`".into(),
                    });
                }
            }
            b'-' => {
                if bytes.get(i + 1) == Some(&b'>') {
                    i += 2;
                    Tok::Arrow
                } else {
                    i += 1;
                    Tok::Minus
                }
            }
            b'0'..=b'9' => {
                let mut j = i;
                while j < bytes.len() && bytes[j].is_ascii_digit() {
                    j += 1;
                }
                let v: u64 = src[i..j].parse().map_err(|_| Error::Parse {
                    pos: i,
                    msg: "integer too large".into(),
                })?;
                i = j;
                Tok::Int(v)
            }
            b'a'..=b'z' | b'A'..=b'Z' | b'_' => {
                let mut j = i;
                while j < bytes.len()
                    && (bytes[j].is_ascii_alphanumeric() || bytes[j] == b'_')
                {
                    j += 1;
                }
                let name = src[i..j].to_string();
                i = j;
                Tok::Ident(name)
            }
            other => {
                return Err(Error::Parse {
                    pos: i,
                    msg: format!("unexpected character `{}`", other as char),
                })
            }
        };
        out.push((tok, start));
    }
    out.push((Tok::End, bytes.len()));
    Ok(out)
}

struct SymTable {
    map: BTreeMap<String, Var>,
    next_ring: u32,
    next_field: u32,
}

impl SymTable {
    fn new() -> SymTable {
        SymTable {
            map: BTreeMap::new(),
            next_ring: 0,
            next_field: 0,
        }
    }

    fn canonical(name: &str) -> Option<Var> {
        let (sort, rest) = match name.as_bytes().first()? {
            b'x' => (Sort::Ring, &name[1..]),
            b'a' => (Sort::Field, &name[1..]),
            _ => return None,
        };
        if rest.is_empty() || !rest.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        let n: u32 = rest.parse().ok()?;
        if n == 0 {
            None
        } else {
            Some(Var {
                sort,
                index: n - 1,
            })
        }
    }

    fn resolve(&mut self, name: &str, sort: Option<Sort>, pos: usize) -> Result<Var> {
        if let Some(v) = self.map.get(name) {
            if let Some(s) = sort {
                if s != v.sort {
                    return Err(Error::Parse {
                        pos,
                        msg: format!("variable `{name}` re-annotated with a different sort"),
                    });
                }
            }
            return Ok(*v);
        }
        if let Some(v) = SymTable::canonical(name) {
            if let Some(s) = sort {
                if s != v.sort {
                    return Err(Error::Parse {
                        pos,
                        msg: format!("variable `{name}` annotation conflicts with its name"),
                    });
                }
            }
            self.bump_past(v);
            self.map.insert(name.to_string(), v);
            return Ok(v);
        }
        let Some(sort) = sort else {
            return Err(Error::Parse {
                pos,
                msg: format!("variable `{name}` needs a sort annotation (`:R` or `:F`)"),
            });
        };
        let v = match sort {
            Sort::Ring => {
                let v = Var::ring(self.next_ring);
                self.next_ring += 1;
                v
            }
            Sort::Field => {
                let v = Var::field(self.next_field);
                self.next_field += 1;
                v
            }
        };
        self.map.insert(name.to_string(), v);
        Ok(v)
    }

    fn bump_past(&mut self, v: Var) {
        match v.sort {
            Sort::Ring => self.next_ring = self.next_ring.max(v.index + 1),
            Sort::Field => self.next_field = self.next_field.max(v.index + 1),
        }
    }
}

pub struct FormulaParser {
    lex: Lexer,
    syms: SymTable,
    p: u64,
    /// Inside `P{...}` unannotated variables default to the field sort.
    in_sigma: bool,
    /// Raw source, for re-reading `poly{...}` payloads.
    src: String,
}

impl FormulaParser {
    fn peek(&self) -> &Tok {
        &self.lex.toks[self.lex.pos].0
    }

    fn peek_pos(&self) -> usize {
        self.lex.toks[self.lex.pos].1
    }

    fn next(&mut self) -> Tok {
        let t = self.lex.toks[self.lex.pos].0.clone();
        if self.lex.pos + 1 < self.lex.toks.len() {
            self.lex.pos += 1;
        }
        t
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<()> {
        let pos = self.peek_pos();
        if self.next() == tok {
            Ok(())
        } else {
            Err(Error::Parse {
                pos,
                msg: format!("expected {what}"),
            })
        }
    }

    fn formula(&mut self) -> Result<Formula> {
        let lhs = self.or_formula()?;
        if *self.peek() == Tok::Arrow {
            self.next();
            let rhs = self.formula()?;
            Ok(Formula::implies(lhs, rhs))
        } else {
            Ok(lhs)
        }
    }

    fn or_formula(&mut self) -> Result<Formula> {
        let mut acc = self.and_formula()?;
        while *self.peek() == Tok::Ident("or".into()) {
            self.next();
            acc = Formula::or(acc, self.and_formula()?);
        }
        Ok(acc)
    }

    fn and_formula(&mut self) -> Result<Formula> {
        let mut acc = self.unary_formula()?;
        while *self.peek() == Tok::Ident("and".into()) {
            self.next();
            acc = Formula::and(acc, self.unary_formula()?);
        }
        Ok(acc)
    }

    fn unary_formula(&mut self) -> Result<Formula> {
        match self.peek().clone() {
            Tok::Ident(name) if name == "not" => {
                self.next();
                Ok(Formula::not(self.unary_formula()?))
            }
            Tok::Ident(name) if name == "exists" || name == "forall" => {
                self.next();
                let is_exists = name == "exists";
                let v = self.binder()?;
                let body = self.unary_formula()?;
                Ok(if is_exists {
                    Formula::exists(v, body)
                } else {
                    Formula::forall(v, body)
                })
            }
            _ => self.atom_formula(),
        }
    }

    fn binder(&mut self) -> Result<Var> {
        let pos = self.peek_pos();
        let Tok::Ident(name) = self.next() else {
            return Err(Error::Parse {
                pos,
                msg: "expected a variable binder".into(),
            });
        };
        let sort = self.optional_sort()?;
        let sort = sort.or(if self.in_sigma {
            Some(Sort::Field)
        } else {
            None
        });
        self.syms.resolve(&name, sort, pos)
    }

    fn optional_sort(&mut self) -> Result<Option<Sort>> {
        if *self.peek() != Tok::Colon {
            return Ok(None);
        }
        self.next();
        let pos = self.peek_pos();
        match self.next() {
            Tok::Ident(s) if s == "R" => Ok(Some(Sort::Ring)),
            Tok::Ident(s) if s == "F" => Ok(Some(Sort::Field)),
            _ => Err(Error::Parse {
                pos,
                msg: "expected sort `R` or `F`".into(),
            }),
        }
    }

    fn atom_formula(&mut self) -> Result<Formula> {
        match self.peek().clone() {
            Tok::Ident(name) if name == "true" => {
                self.next();
                Ok(Formula::True)
            }
            Tok::Ident(name) if name == "false" => {
                self.next();
                Ok(Formula::False)
            }
            Tok::Ident(name) if name == "inF" => {
                self.next();
                self.expect(Tok::LParen, "`(`")?;
                let t = self.term()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(Formula::InF(t))
            }
            Tok::Ident(name) if name == "P" => {
                self.next();
                self.expect(Tok::LBrace, "`{`")?;
                let was_sigma = self.in_sigma;
                self.in_sigma = true;
                let body = self.formula()?;
                self.in_sigma = was_sigma;
                self.expect(Tok::RBrace, "`}`")?;
                let params: Vec<Var> = body
                    .free_vars()
                    .into_iter()
                    .collect();
                let sigma = SigmaPredicate::new(params.clone(), body)?;
                self.expect(Tok::LParen, "`(`")?;
                let mut args = Vec::new();
                if *self.peek() != Tok::RParen {
                    loop {
                        args.push(self.term()?);
                        if *self.peek() == Tok::Comma {
                            self.next();
                        } else {
                            break;
                        }
                    }
                }
                self.expect(Tok::RParen, "`)`")?;
                if args.len() != params.len() {
                    return Err(Error::ArityMismatch {
                        expected: params.len(),
                        got: args.len(),
                    });
                }
                let out = Formula::Pred(sigma, args);
                out.sort_check()?;
                Ok(out)
            }
            Tok::LParen => {
                // could be a parenthesized formula or a parenthesized term;
                // try the formula reading first and fall back
                let save_pos = self.lex.pos;
                let save_syms = self.syms.map.clone();
                let save_counters = (self.syms.next_ring, self.syms.next_field);
                self.next();
                if let Ok(inner) = self.formula() {
                    if *self.peek() == Tok::RParen {
                        // a following comparator means the parens wrapped a term
                        let after = self.lex.toks.get(self.lex.pos + 1).map(|t| t.0.clone());
                        if !matches!(
                            after,
                            Some(Tok::Eq)
                                | Some(Tok::Neq)
                                | Some(Tok::Plus)
                                | Some(Tok::Minus)
                                | Some(Tok::Caret)
                        ) {
                            self.next();
                            return Ok(inner);
                        }
                    }
                }
                self.lex.pos = save_pos;
                self.syms.map = save_syms;
                self.syms.next_ring = save_counters.0;
                self.syms.next_field = save_counters.1;
                self.comparison()
            }
            _ => self.comparison(),
        }
    }

    fn comparison(&mut self) -> Result<Formula> {
        let lhs = self.term()?;
        let pos = self.peek_pos();
        match self.next() {
            Tok::Eq => Ok(Formula::Eq(lhs, self.term()?)),
            Tok::Neq => Ok(Formula::not(Formula::Eq(lhs, self.term()?))),
            _ => Err(Error::Parse {
                pos,
                msg: "expected `=` or `!=`".into(),
            }),
        }
    }

    fn term(&mut self) -> Result<Term> {
        let mut acc = self.term_factor()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.next();
                    acc = Term::add(acc, self.term_factor()?);
                }
                Tok::Minus => {
                    self.next();
                    let rhs = self.term_factor()?;
                    acc = Term::add(acc, Term::negate(rhs, self.p));
                }
                _ => return Ok(acc),
            }
        }
    }

    /// factor := prefix* base ('^' 'p')*
    fn term_factor(&mut self) -> Result<Term> {
        // coefficient prefixes: z[^k]*, poly{..}*, n*
        match self.peek().clone() {
            Tok::Ident(name) if name == "z" => {
                let save = self.lex.pos;
                self.next();
                let mut shift = 1usize;
                if *self.peek() == Tok::Caret {
                    let save2 = self.lex.pos;
                    self.next();
                    if let Tok::Int(k) = self.peek().clone() {
                        self.next();
                        shift = k as usize;
                    } else {
                        self.lex.pos = save2;
                    }
                }
                if *self.peek() == Tok::Star {
                    self.next();
                    let inner = self.term_factor()?;
                    let mut out = inner;
                    for _ in 0..shift {
                        out = Term::mulz(out);
                    }
                    return Ok(out);
                }
                // bare z^k stands for z^k * 1
                self.lex.pos = save;
                self.next();
                let mut shift = 1usize;
                if *self.peek() == Tok::Caret {
                    self.next();
                    let pos = self.peek_pos();
                    match self.next() {
                        Tok::Int(k) => shift = k as usize,
                        _ => {
                            return Err(Error::Parse {
                                pos,
                                msg: "expected integer exponent after z^".into(),
                            })
                        }
                    }
                }
                let mut out = Term::One;
                for _ in 0..shift {
                    out = Term::mulz(out);
                }
                return self.pow_suffix(out);
            }
            Tok::Ident(name) if name == "poly" => {
                self.next();
                self.expect(Tok::LBrace, "`{`")?;
                // re-lex the brace content from the source positions
                let mut depth = 1usize;
                let start = self.peek_pos();
                let mut end = start;
                while depth > 0 {
                    match self.next() {
                        Tok::LBrace => depth += 1,
                        Tok::RBrace => {
                            depth -= 1;
                            if depth == 0 {
                                break;
                            }
                        }
                        Tok::End => {
                            return Err(Error::Parse {
                                pos: end,
                                msg: "unterminated poly{...}".into(),
                            })
                        }
                        _ => {}
                    }
                    end = self.peek_pos();
                }
                let text = &self.src[start..end];
                let c = parse_fp_poly(text, self.p)?;
                self.expect(Tok::Star, "`*` after poly{...}")?;
                let inner = self.term_factor()?;
                return Ok(Term::mul_poly(&c, inner));
            }
            Tok::Int(n) => {
                self.next();
                if *self.peek() == Tok::Star {
                    self.next();
                    let inner = self.term_factor()?;
                    return Ok(Term::nat_mul(n, inner, self.p));
                }
                return self.pow_suffix(Term::nat_mul(n, Term::One, self.p));
            }
            _ => {}
        }
        let base = self.term_base()?;
        self.pow_suffix(base)
    }

    fn pow_suffix(&mut self, mut t: Term) -> Result<Term> {
        while *self.peek() == Tok::Caret {
            let save = self.lex.pos;
            self.next();
            match self.peek().clone() {
                Tok::Ident(name) if name == "p" => {
                    self.next();
                    t = Term::frob(t);
                }
                _ => {
                    self.lex.pos = save;
                    break;
                }
            }
        }
        Ok(t)
    }

    fn term_base(&mut self) -> Result<Term> {
        let pos = self.peek_pos();
        match self.next() {
            Tok::Int(0) => Ok(Term::Zero),
            Tok::Int(1) => Ok(Term::One),
            Tok::Int(n) => Ok(Term::nat_mul(n, Term::One, self.p)),
            Tok::Ident(name) if name == "frob" => {
                self.expect(Tok::LParen, "`(`")?;
                let t = self.term()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(Term::frob(t))
            }
            Tok::Ident(name) => {
                let sort = self.optional_sort()?;
                let sort = sort.or(if self.in_sigma {
                    Some(Sort::Field)
                } else {
                    None
                });
                let v = self.syms.resolve(&name, sort, pos)?;
                Ok(Term::var(v))
            }
            Tok::LParen => {
                let t = self.term()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(t)
            }
            other => Err(Error::Parse {
                pos,
                msg: format!("unexpected token {other:?} in term"),
            }),
        }
    }
}

impl FormulaParser {
    fn new(src: &str, p: u64) -> Result<FormulaParser> {
        let toks = tokenize(src)?;
        Ok(FormulaParser {
            lex: Lexer { toks, pos: 0 },
            syms: SymTable::new(),
            p,
            in_sigma: false,
            src: src.to_string(),
        })
    }
}

/// Parses a formula of the full language; `p` fixes the characteristic for
/// `-` and integer-multiple shorthands.
pub fn parse_formula(text: &str, p: u64) -> Result<Formula> {
    // sanity: p must be a real characteristic
    let _ = FieldSpec::prime_field(p)?;
    let mut parser = FormulaParser::new(text, p)?;
    let out = parser.formula()?;
    if *parser.peek() != Tok::End {
        return Err(Error::Parse {
            pos: parser.peek_pos(),
            msg: "trailing input".into(),
        });
    }
    out.sort_check()?;
    Ok(out)
}

/// Parses an `L_p` formula: every unannotated variable defaults to the
/// field sort, as inside `P{ ... }`.
pub fn parse_lp_formula(text: &str, p: u64) -> Result<Formula> {
    let _ = FieldSpec::prime_field(p)?;
    let mut parser = FormulaParser::new(text, p)?;
    parser.in_sigma = true;
    let out = parser.formula()?;
    if *parser.peek() != Tok::End {
        return Err(Error::Parse {
            pos: parser.peek_pos(),
            msg: "trailing input".into(),
        });
    }
    if !out.is_lp() {
        return Err(Error::Sort("formula is not in the L_p fragment".into()));
    }
    Ok(out)
}

/// Parses a term in isolation.
pub fn parse_term(text: &str, p: u64) -> Result<Term> {
    let _ = FieldSpec::prime_field(p)?;
    let mut parser = FormulaParser::new(text, p)?;
    let out = parser.term()?;
    if *parser.peek() != Tok::End {
        return Err(Error::Parse {
            pos: parser.peek_pos(),
            msg: "trailing input".into(),
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_simple_sentences() {
        let phi = parse_formula("exists x:R (x + x = 0)", 2).unwrap();
        match phi {
            Formula::Exists(v, _) => assert_eq!(v.sort, Sort::Ring),
            other => panic!("expected exists, got {other}"),
        }
        parse_formula("forall a:F (a^p = a)", 3).unwrap();
        parse_formula("exists x:R (x != 0 and inF(x))", 2).unwrap();
        parse_formula("exists x1:R (z*x1 + poly{1+z}*x1 = z^2)", 2).unwrap();
    }

    #[test]
    fn ill_sorted_pred_rejected() {
        let r = parse_formula("P{a1 = 0}(x1)", 2);
        assert!(r.is_err());
    }

    #[test]
    fn pred_with_field_args_ok() {
        let phi = parse_formula("exists a:F (P{b = 0}(a))", 2).unwrap();
        phi.sort_check().unwrap();
    }

    #[test]
    fn display_roundtrip() {
        for (src, p) in [
            ("exists x1:R (x1 + x1 = 0)", 2u64),
            ("forall a1:F (frob(a1) = a1)", 3),
            ("exists x1:R (x1 != 0 and not (x1 = 1))", 2),
            ("exists x1:R exists a1:F (z*x1 + a1 = 1 -> x1 = 0)", 2),
            ("exists a1:F (P{b1 = 0 and b2 + b2 = 0}(a1, a1))", 2),
            ("forall x1:R (poly{1+z^2}*x1 = 0 or x1 = frob(x1))", 2),
        ] {
            let phi = parse_formula(src, p).unwrap();
            let printed = phi.to_string();
            let back = parse_formula(&printed, p).unwrap();
            assert_eq!(phi, back, "roundtrip failed for `{src}` via `{printed}`");
        }
    }

    #[test]
    fn sigma_vars_default_to_field() {
        let phi = parse_formula("P{exists c (c + c = 0)}()", 2).unwrap();
        phi.sort_check().unwrap();
    }

    #[test]
    fn minus_is_char_p_negation() {
        let a = parse_term("x1:R - x1", 3).unwrap();
        let b = parse_term("x1:R + 2*x1", 3).unwrap();
        assert_eq!(a, b);
    }
}
