//! Text input for functions and operator words.
//!
//! Grammar (whitespace ignored):
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := '-' unary | power
//! power  := atom ('^' exponent)?
//! atom   := integer | 'q' | 't' | 'u' | 's' | 'd(' integer ')' | 'D(' integer ')' | '(' expr ')'
//! ```
//!
//! `s` is `σ`, `d(i)` is `δ^(i)`, `D(n)` is `d_n = δ^(nN)` and `u = 1/((q − 1)t)`.
//! Division and negative powers are allowed for functions only.

use std::sync::Arc;

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::hscript::{ScriptH, ScriptHElem, SmashElem};
use crate::prime::PrimeField;
use crate::ratfunc::RatFunc;
use crate::scalar::{FieldSpec, Scalar};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(char),
    Op(char),
}

fn tokenize(src: &str) -> Result<Vec<(usize, Tok)>> {
    let chars: Vec<(usize, char)> = src.char_indices().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let (pos, c) = chars[i];
        match c {
            c if c.is_whitespace() => i += 1,
            '0'..='9' => {
                let start = i;
                while i < chars.len() && chars[i].1.is_ascii_digit() {
                    i += 1;
                }
                let digits: String = chars[start..i].iter().map(|&(_, c)| c).collect();
                out.push((pos, Tok::Int(digits.parse().expect("digits"))));
            }
            'q' | 't' | 'u' | 's' | 'd' | 'D' => {
                out.push((pos, Tok::Ident(c)));
                i += 1;
            }
            '+' | '-' | '*' | '/' | '^' | '(' | ')' => {
                out.push((pos, Tok::Op(c)));
                i += 1;
            }
            _ => return Err(Error::Parse { pos, msg: format!("unexpected character '{c}'") }),
        }
    }
    Ok(out)
}

struct Parser<'a, C: PrimeField> {
    ctx: &'a Arc<ScriptH<C>>,
    toks: Vec<(usize, Tok)>,
    at: usize,
    end: usize,
}

impl<C: PrimeField> Parser<'_, C> {
    fn pos(&self) -> usize {
        self.toks.get(self.at).map_or(self.end, |t| t.0)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Parse { pos: self.pos(), msg: msg.into() })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|t| &t.1)
    }

    fn eat(&mut self, op: char) -> bool {
        if self.peek() == Some(&Tok::Op(op)) {
            self.at += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, op: char) -> Result<()> {
        if self.eat(op) {
            Ok(())
        } else {
            self.err(format!("expected '{op}'"))
        }
    }

    fn field(&self) -> &Arc<FieldSpec<C>> {
        self.ctx.field()
    }

    fn expr(&mut self) -> Result<SmashElem<C>> {
        let mut acc = self.term()?;
        loop {
            if self.eat('+') {
                acc = &acc + &self.term()?;
            } else if self.eat('-') {
                acc = &acc - &self.term()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<SmashElem<C>> {
        let mut acc = self.unary()?;
        loop {
            if self.eat('*') {
                acc = &acc * &self.unary()?;
            } else if self.peek() == Some(&Tok::Op('/')) {
                let pos = self.pos();
                self.at += 1;
                let rhs = self.unary()?;
                let f = rhs
                    .as_func()
                    .ok_or_else(|| Error::Parse { pos, msg: "can only divide by a function".into() })?;
                let inv = f.inv().map_err(|_| Error::Parse { pos, msg: "division by zero".into() })?;
                acc = &acc * &SmashElem::func(self.ctx, inv);
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<SmashElem<C>> {
        if self.eat('-') {
            return Ok(-&self.unary()?);
        }
        self.power()
    }

    fn exponent(&mut self) -> Result<i64> {
        let paren = self.eat('(');
        let neg = self.eat('-');
        let v = match self.peek().cloned() {
            Some(Tok::Int(v)) => {
                self.at += 1;
                i64::try_from(v).or_else(|_| self.err("exponent too large"))?
            }
            _ => return self.err("expected an integer exponent"),
        };
        if paren {
            self.expect(')')?;
        }
        Ok(if neg { -v } else { v })
    }

    fn power(&mut self) -> Result<SmashElem<C>> {
        let base = self.atom()?;
        if !self.eat('^') {
            return Ok(base);
        }
        let pos = self.pos();
        let e = self.exponent()?;
        if let Some(f) = base.as_func() {
            let p = f.pow(e).map_err(|_| Error::Parse { pos, msg: "zero to a negative power".into() })?;
            return Ok(SmashElem::func(self.ctx, p));
        }
        let n = self.ctx.order() as i64;
        // Group-likes invert; other operators take nonnegative powers.
        let (base, e) = if e < 0 && base == SmashElem::sigma(self.ctx, 1) {
            (SmashElem::sigma(self.ctx, -1), -e)
        } else if e < 0 {
            return Err(Error::Parse { pos, msg: "negative power of an operator".into() });
        } else {
            (base, e)
        };
        let e = if base.terms().all(|((_, i), _)| i == 0) && base.terms().count() == 1 { e % n } else { e };
        let mut acc = SmashElem::one(self.ctx);
        for _ in 0..e {
            acc = &acc * &base;
        }
        Ok(acc)
    }

    fn index(&mut self) -> Result<usize> {
        self.expect('(')?;
        let v = match self.peek().cloned() {
            Some(Tok::Int(v)) => {
                self.at += 1;
                usize::try_from(v).or_else(|_| self.err("index too large"))?
            }
            _ => return self.err("expected a nonnegative integer"),
        };
        self.expect(')')?;
        Ok(v)
    }

    fn atom(&mut self) -> Result<SmashElem<C>> {
        let field = self.field().clone();
        let ctx = self.ctx;
        let tok = match self.peek().cloned() {
            Some(t) => t,
            None => return self.err("unexpected end of input"),
        };
        self.at += 1;
        Ok(match tok {
            Tok::Int(v) => SmashElem::func(ctx, RatFunc::constant(field.from_prime(C::from_bigint(&v)))),
            Tok::Ident('q') => SmashElem::func(ctx, RatFunc::constant(field.q())),
            Tok::Ident('t') => SmashElem::func(ctx, RatFunc::t(&field)),
            Tok::Ident('u') => SmashElem::func(ctx, RatFunc::u(&field)),
            Tok::Ident('s') => SmashElem::sigma(ctx, 1),
            Tok::Ident('d') => SmashElem::delta(ctx, self.index()?),
            Tok::Ident('D') => SmashElem::delta(ctx, self.index()? * ctx.order()),
            Tok::Op('(') => {
                let v = self.expr()?;
                self.expect(')')?;
                v
            }
            _ => {
                self.at -= 1;
                return self.err("expected a value");
            }
        })
    }
}

/// Parses an element of `K#H`.
pub fn parse_smash<C: PrimeField>(ctx: &Arc<ScriptH<C>>, src: &str) -> Result<SmashElem<C>> {
    let toks = tokenize(src)?;
    let mut p = Parser { ctx, toks, at: 0, end: src.len() };
    let v = p.expr()?;
    if p.at < p.toks.len() {
        return p.err("trailing input");
    }
    Ok(v)
}

/// Parses an operator word and reduces it to normal form in ℋ.
pub fn parse_script<C: PrimeField>(ctx: &Arc<ScriptH<C>>, src: &str) -> Result<ScriptHElem<C>> {
    Ok(parse_smash(ctx, src)?.quotient())
}

pub fn parse_ratfunc_in<C: PrimeField>(ctx: &Arc<ScriptH<C>>, src: &str) -> Result<RatFunc<C>> {
    parse_smash(ctx, src)?
        .as_func()
        .ok_or(Error::Parse { pos: 0, msg: "expected a function of t, found an operator".into() })
}

pub fn parse_ratfunc<C: PrimeField>(field: &Arc<FieldSpec<C>>, src: &str) -> Result<RatFunc<C>> {
    parse_ratfunc_in(&ScriptH::new(field), src)
}

pub fn parse_scalar<C: PrimeField>(field: &Arc<FieldSpec<C>>, src: &str) -> Result<Scalar<C>> {
    parse_ratfunc(field, src)?
        .as_constant()
        .ok_or(Error::Parse { pos: 0, msg: "expected a constant".into() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;

    fn ctx(n: u32) -> Arc<ScriptH<Rational>> {
        ScriptH::new(&FieldSpec::new(n).unwrap())
    }

    #[test]
    fn round_trips_ratfunc_display() {
        let h = ctx(3);
        let f = h.field().clone();
        for src in ["(t^2 + q*t - 1)/(t^3 + 2)", "1/t", "-q^2 + 3/2", "((q + 1)*t^2 - 1/7)/(t - q)"] {
            let x = parse_ratfunc(&f, src).unwrap();
            assert_eq!(parse_ratfunc(&f, &x.to_string()).unwrap(), x, "{src} -> {x}");
        }
    }

    #[test]
    fn operator_words() {
        let h = ctx(2);
        let xi = parse_script(&h, "d(1) - (1/((q-1)*t))*(s - 1)").unwrap();
        assert!(xi.is_zero());
        let t5 = parse_ratfunc_in(&h, "t^5").unwrap();
        assert!(parse_smash(&h, "d(1) - u*(s - 1)").unwrap().act(&t5).is_zero());
        assert_eq!(parse_script(&h, "s^2").unwrap(), ScriptHElem::one(&h));
        assert_eq!(parse_script(&h, "s^-1").unwrap(), ScriptHElem::sigma(&h, 1));
    }

    #[test]
    fn script_display_parses_back() {
        let h = ctx(3);
        let x = parse_script(&h, "D(1)*t + (1/t)*s^2 - 3").unwrap();
        assert_eq!(parse_script(&h, &x.to_string()).unwrap(), x);
    }

    #[test]
    fn errors_carry_positions() {
        let h = ctx(3);
        match parse_smash(&h, "t + * 2") {
            Err(Error::Parse { pos, .. }) => assert_eq!(pos, 4),
            other => panic!("{other:?}"),
        }
        match parse_smash(&h, "t # 2") {
            Err(Error::Parse { pos, .. }) => assert_eq!(pos, 2),
            other => panic!("{other:?}"),
        }
        assert!(parse_smash(&h, "t/s").is_err());
        assert!(parse_smash(&h, "(t").is_err());
        assert!(parse_ratfunc_in(&h, "s").is_err());
    }
}
