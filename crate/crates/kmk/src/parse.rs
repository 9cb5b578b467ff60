//! Expression parser for forms and polynomials over a declared tower.
//!
//! Grammar:
//!   expr       := term ('+' term)*
//!   term       := scalar ('*' wedgechain)? | wedgechain
//!   wedgechain := dlogfactor ('^' dlogfactor)*
//!   dlogfactor := 'dlog' '(' ratfun ')'
//!   ratfun     := rprod ('+' rprod)*
//!   rprod      := rpow (('*' | '/') rpow)*
//!   rpow       := atom ('^' uint)?
//!   atom       := uint | variable | '(' ratfun ')'
//!
//! A term's scalar sits at product level, so '+' always separates form
//! terms; parentheses admit sum coefficients.  Integer literals reduce mod
//! 2.  'dlog' is reserved.  All terms of an expression must have the same
//! wedge degree.

use crate::basis::MultiIndex;
use crate::error::{Error, Result};
use crate::forms::DiffForm;
use crate::poly::Poly;
use crate::ratfun::RatFun;
use crate::tower::Tower;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Plus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Int(u64),
    Name(String),
    Dlog,
}

fn err(offset: usize, msg: impl Into<String>) -> Error {
    Error::Parse { offset, msg: msg.into() }
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>> {
    let mut toks = Vec::new();
    let mut it = text.char_indices().peekable();
    while let Some(&(off, c)) = it.peek() {
        match c {
            c if c.is_whitespace() => {
                it.next();
            }
            '+' => {
                it.next();
                toks.push((off, Tok::Plus));
            }
            '*' => {
                it.next();
                toks.push((off, Tok::Star));
            }
            '/' => {
                it.next();
                toks.push((off, Tok::Slash));
            }
            '^' => {
                it.next();
                toks.push((off, Tok::Caret));
            }
            '(' => {
                it.next();
                toks.push((off, Tok::LParen));
            }
            ')' => {
                it.next();
                toks.push((off, Tok::RParen));
            }
            c if c.is_ascii_digit() => {
                let mut v: u64 = 0;
                while let Some(&(_, d)) = it.peek() {
                    if let Some(dv) = d.to_digit(10) {
                        v = v
                            .checked_mul(10)
                            .and_then(|v| v.checked_add(dv as u64))
                            .ok_or_else(|| err(off, "integer literal too large"))?;
                        it.next();
                    } else {
                        break;
                    }
                }
                toks.push((off, Tok::Int(v)));
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut name = String::new();
                while let Some(&(_, d)) = it.peek() {
                    if d.is_ascii_alphanumeric() || d == '_' {
                        name.push(d);
                        it.next();
                    } else {
                        break;
                    }
                }
                if name == "dlog" {
                    toks.push((off, Tok::Dlog));
                } else {
                    toks.push((off, Tok::Name(name)));
                }
            }
            c => return Err(err(off, format!("unexpected character {c:?}"))),
        }
    }
    Ok(toks)
}

struct P<'a> {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
    tower: &'a Tower,
}

impl<'a> P<'a> {
    fn new(text: &str, tower: &'a Tower) -> Result<P<'a>> {
        Ok(P { toks: lex(text)?, pos: 0, end: text.len(), tower })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn peek2(&self) -> Option<&Tok> {
        self.toks.get(self.pos + 1).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map(|(o, _)| *o).unwrap_or(self.end)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(_, t)| t.clone());
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == Some(t) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, t: Tok, what: &str) -> Result<()> {
        if self.eat(&t) {
            Ok(())
        } else {
            Err(err(self.offset(), format!("expected {what}")))
        }
    }

    fn atom(&mut self) -> Result<RatFun> {
        let off = self.offset();
        match self.bump() {
            Some(Tok::Int(v)) => Ok(if v % 2 == 1 { RatFun::one() } else { RatFun::zero() }),
            Some(Tok::Name(name)) => match self.tower.id_of(&name) {
                Some(v) => Ok(RatFun::var(v)),
                None => Err(err(off, format!("unknown variable '{name}'"))),
            },
            Some(Tok::LParen) => {
                let f = self.ratfun()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(f)
            }
            Some(Tok::Dlog) => Err(err(off, "dlog is not allowed inside a coefficient")),
            _ => Err(err(off, "expected an integer, a variable, or '('")),
        }
    }

    fn rpow(&mut self) -> Result<RatFun> {
        let f = self.atom()?;
        if self.eat(&Tok::Caret) {
            let off = self.offset();
            match self.bump() {
                Some(Tok::Int(e)) if e <= 4096 => {
                    f.pow(e as i64).map_err(|e| err(off, e.to_string()))
                }
                Some(Tok::Int(_)) => Err(err(off, "exponent larger than 4096")),
                _ => Err(err(off, "expected an integer exponent")),
            }
        } else {
            Ok(f)
        }
    }

    fn rprod(&mut self) -> Result<RatFun> {
        let mut f = self.rpow()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    // a '*' in front of dlog belongs to the enclosing term
                    if self.peek2() == Some(&Tok::Dlog) {
                        return Ok(f);
                    }
                    self.pos += 1;
                    f = f.mul(&self.rpow()?);
                }
                Some(Tok::Slash) => {
                    self.pos += 1;
                    let off = self.offset();
                    let g = self.rpow()?;
                    f = f.div(&g).map_err(|_| err(off, "division by zero"))?;
                }
                _ => return Ok(f),
            }
        }
    }

    fn ratfun(&mut self) -> Result<RatFun> {
        let mut f = self.rprod()?;
        while self.eat(&Tok::Plus) {
            f = f.add(&self.rprod()?);
        }
        Ok(f)
    }

    fn dlogfactor(&mut self) -> Result<DiffForm> {
        let off = self.offset();
        self.expect(Tok::Dlog, "'dlog'")?;
        self.expect(Tok::LParen, "'(' after dlog")?;
        let arg = self.ratfun()?;
        self.expect(Tok::RParen, "')'")?;
        if arg.is_zero() {
            return Err(err(off, "dlog of zero"));
        }
        DiffForm::dlog(&arg, self.tower).map_err(|e| err(off, e.to_string()))
    }

    fn wedgechain(&mut self) -> Result<DiffForm> {
        let mut f = self.dlogfactor()?;
        while self.eat(&Tok::Caret) {
            f = f.wedge(&self.dlogfactor()?);
        }
        Ok(f)
    }

    fn term(&mut self) -> Result<DiffForm> {
        if self.peek() == Some(&Tok::Dlog) {
            return self.wedgechain();
        }
        let scalar = self.rprod()?;
        if self.eat(&Tok::Star) {
            let chain = self.wedgechain()?;
            Ok(chain.scalar_mul(&scalar))
        } else {
            DiffForm::term(0, MultiIndex::EMPTY, scalar)
        }
    }
}

/// Parse a differential form.  All terms must share one wedge degree.
pub fn parse_form(text: &str, tower: &Tower) -> Result<DiffForm> {
    let mut p = P::new(text, tower)?;
    let mut acc = p.term()?;
    while p.eat(&Tok::Plus) {
        let off = p.offset();
        let t = p.term()?;
        if t.degree() != acc.degree() {
            return Err(err(
                off,
                format!("term of degree {} in an expression of degree {}", t.degree(), acc.degree()),
            ));
        }
        acc = acc.add(&t).map_err(|e| err(off, e.to_string()))?;
    }
    if p.pos != p.toks.len() {
        return Err(err(p.offset(), "unexpected trailing input"));
    }
    Ok(acc)
}

/// Parse a rational function (no dlog allowed).
pub fn parse_ratfun(text: &str, tower: &Tower) -> Result<RatFun> {
    let mut p = P::new(text, tower)?;
    let f = p.ratfun()?;
    if p.pos != p.toks.len() {
        return Err(err(p.offset(), "unexpected trailing input"));
    }
    Ok(f)
}

/// Parse a polynomial: a rational expression that reduces to denominator 1.
pub fn parse_poly(text: &str, tower: &Tower) -> Result<Poly> {
    let f = parse_ratfun(text, tower)?;
    if !f.is_poly() {
        return Err(err(0, "expected a polynomial, found a proper fraction"));
    }
    Ok(f.num().clone())
}
