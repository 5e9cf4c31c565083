//! Recursive-descent parser for the expression grammar
//!
//! ```text
//! expr   := term (('+'|'-') term)*
//! term   := factor (('*'|'/') factor)*
//! factor := ('-'|'+') factor | base ('^' exponent)?
//! base   := number | ident | ident '(' args ')' | '(' expr ')'
//! exponent := ['-'] number | '(' ['-'] number ['/' number] ')'
//! ```

use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::Zero;
use thiserror::Error;

use super::symbol::MultiIndex;
use super::{Expr, FuncTag, Rational, Symbol};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown function '{name}' at {pos}")]
    UnknownFunction { pos: usize, name: String },
    #[error("malformed jet suffix '{name}' at {pos}")]
    MalformedJet { pos: usize, name: String },
    #[error("{0}")]
    Normalize(#[from] super::ExprError),
}

/// Names the parser classifies as independent, dependent or unknown-function symbols.
/// Every other identifier is a parameter.
#[derive(Debug, Clone)]
pub struct ParseContext {
    pub independents: Vec<String>,
    pub dependents: Vec<String>,
    pub unknowns: Vec<(String, Vec<String>)>,
}

impl Default for ParseContext {
    fn default() -> Self {
        let args = vec!["x".to_string(), "t".to_string(), "u".to_string()];
        ParseContext {
            independents: vec!["x".into(), "t".into()],
            dependents: vec!["u".into()],
            unknowns: vec![
                ("xi1".into(), args.clone()),
                ("xi2".into(), args.clone()),
                ("eta".into(), args),
            ],
        }
    }
}

impl ParseContext {
    /// Context for reduced equations in one independent `y` and dependent `v`,
    /// keeping `x`, `t`, `u` available for ansätze.
    pub fn reduced() -> Self {
        let mut c = ParseContext::default();
        c.independents.push("y".into());
        c.dependents.push("v".into());
        c
    }

    pub fn symbol(&self, name: &str) -> Result<Symbol, ParseError> {
        Parser::new(name, self).classify(name, 0)
    }
}

/// Parses with the default `(x, t; u)` context and normalizes.
pub fn parse(text: &str) -> Result<Expr, ParseError> {
    parse_with(text, &ParseContext::default())
}

pub fn parse_with(text: &str, ctx: &ParseContext) -> Result<Expr, ParseError> {
    let mut p = Parser::new(text, ctx);
    let e = p.expr()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(e.try_normalize()?)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    ctx: &'a ParseContext,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str, ctx: &'a ParseContext) -> Self {
        Parser {
            src: text.as_bytes(),
            pos: 0,
            ctx,
        }
    }

    fn err(&self, msg: &str) -> ParseError {
        ParseError::Syntax {
            pos: self.pos,
            msg: msg.to_string(),
        }
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

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<(), ParseError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.err(&format!("expected '{}'", c as char)))
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut terms = vec![self.term()?];
        loop {
            if self.eat(b'+') {
                terms.push(self.term()?);
            } else if self.eat(b'-') {
                terms.push(-self.term()?);
            } else {
                break;
            }
        }
        Ok(if terms.len() == 1 {
            terms.pop().unwrap()
        } else {
            Expr::Sum(terms)
        })
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut acc = self.factor()?;
        loop {
            if self.eat(b'*') {
                acc = acc * self.factor()?;
            } else if self.eat(b'/') {
                acc = acc / self.factor()?;
            } else {
                break;
            }
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        if self.eat(b'-') {
            return Ok(-self.factor()?);
        }
        if self.eat(b'+') {
            return self.factor();
        }
        let base = self.base()?;
        if self.eat(b'^') {
            let r = self.exponent()?;
            return Ok(base.pow(r));
        }
        Ok(base)
    }

    fn exponent(&mut self) -> Result<Rational, ParseError> {
        if self.eat(b'(') {
            let neg = self.eat(b'-');
            let mut r = self.number()?;
            if self.eat(b'/') {
                let d = self.number()?;
                if d.is_zero() {
                    return Err(self.err("zero denominator in exponent"));
                }
                r /= d;
            }
            self.expect(b')')?;
            return Ok(if neg { -r } else { r });
        }
        let neg = self.eat(b'-');
        let r = self.number()?;
        Ok(if neg { -r } else { r })
    }

    fn number(&mut self) -> Result<Rational, ParseError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        let int_end = self.pos;
        let mut frac = "";
        if self.pos < self.src.len() && self.src[self.pos] == b'.' {
            self.pos += 1;
            let fs = self.pos;
            while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            frac = std::str::from_utf8(&self.src[fs..self.pos]).unwrap();
        }
        if int_end == start && frac.is_empty() {
            self.pos = start;
            return Err(self.err("expected number"));
        }
        let int_part = std::str::from_utf8(&self.src[start..int_end]).unwrap();
        let digits = format!("{int_part}{frac}");
        let n: BigInt = if digits.is_empty() {
            BigInt::zero()
        } else {
            digits.parse().map_err(|_| self.err("bad number"))?
        };
        let d = num_traits::pow(BigInt::from(10), frac.len());
        Ok(Rational::new(n, d))
    }

    fn ident(&mut self) -> Option<String> {
        self.skip_ws();
        let start = self.pos;
        if self.pos < self.src.len() && (self.src[self.pos].is_ascii_alphabetic() || self.src[self.pos] == b'_') {
            self.pos += 1;
            while self.pos < self.src.len()
                && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
            {
                self.pos += 1;
            }
            Some(std::str::from_utf8(&self.src[start..self.pos]).unwrap().to_string())
        } else {
            None
        }
    }

    fn base(&mut self) -> Result<Expr, ParseError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(b')')?;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => Ok(Expr::Rational(self.number()?)),
            Some(_) => {
                let start = self.pos;
                let name = self.ident().ok_or_else(|| self.err("expected expression"))?;
                if self.peek() == Some(b'(') {
                    return self.call(&name, start);
                }
                Ok(Expr::Symbol(self.classify(&name, start)?))
            }
            None => Err(self.err("unexpected end of input")),
        }
    }

    fn call(&mut self, name: &str, start: usize) -> Result<Expr, ParseError> {
        if let Some(tag) = FuncTag::from_name(name) {
            self.expect(b'(')?;
            let arg = self.expr()?;
            self.expect(b')')?;
            return Ok(Expr::func(tag, arg));
        }
        let sugar = match name {
            "sec" => Some((FuncTag::Cos, true)),
            "sech" => Some((FuncTag::Cosh, true)),
            _ => None,
        };
        if let Some((tag, recip)) = sugar {
            self.expect(b'(')?;
            let arg = self.expr()?;
            self.expect(b')')?;
            let f = Expr::func(tag, arg);
            return Ok(if recip { f.powi(-1) } else { f });
        }
        if name == "tanh" {
            self.expect(b'(')?;
            let arg = self.expr()?;
            self.expect(b')')?;
            return Ok(Expr::func(FuncTag::Sinh, arg.clone()) / Expr::func(FuncTag::Cosh, arg));
        }
        // unknown function applied to plain identifiers, e.g. f(x,t)
        self.expect(b'(')?;
        let mut args = Vec::new();
        loop {
            match self.ident() {
                Some(a) if self.peek() == Some(b',') || self.peek() == Some(b')') => args.push(a),
                _ => {
                    return Err(ParseError::UnknownFunction {
                        pos: start,
                        name: name.to_string(),
                    })
                }
            }
            if self.eat(b')') {
                break;
            }
            self.expect(b',')?;
        }
        if let Some((base, decl)) = self.ctx.unknowns.iter().find(|(b, _)| b == name) {
            if decl != &args {
                return Err(ParseError::UnknownFunction {
                    pos: start,
                    name: name.to_string(),
                });
            }
            return Ok(Expr::Symbol(Symbol::unknown_function(base, decl)));
        }
        Ok(Expr::Symbol(Symbol::unknown_function(name, &args)))
    }

    fn classify(&self, name: &str, pos: usize) -> Result<Symbol, ParseError> {
        let ctx = self.ctx;
        if ctx.independents.iter().any(|s| s == name) {
            return Ok(Symbol::independent(name));
        }
        if ctx.dependents.iter().any(|s| s == name) {
            return Ok(Symbol::dependent(name));
        }
        if let Some((base, args)) = ctx.unknowns.iter().find(|(b, _)| b == name) {
            return Ok(Symbol::unknown_function(base, args));
        }
        if let Some((head, suffix)) = name.split_once('_') {
            if ctx.dependents.iter().any(|s| s == head) {
                let vars = self.split_suffix(suffix, &ctx.independents, name, pos)?;
                return Ok(Symbol::jet(head, vars));
            }
            if let Some((base, args)) = ctx.unknowns.iter().find(|(b, _)| b == head) {
                let vars = self.split_suffix(suffix, args, name, pos)?;
                let args: Vec<Arc<str>> = args.iter().map(|a| Arc::from(a.as_str())).collect();
                return Ok(Symbol::unknown_derivative(base, args, MultiIndex::new(vars)));
            }
        }
        Ok(Symbol::parameter(name))
    }

    fn split_suffix(
        &self,
        suffix: &str,
        allowed: &[String],
        name: &str,
        pos: usize,
    ) -> Result<Vec<String>, ParseError> {
        let bad = || ParseError::MalformedJet {
            pos,
            name: name.to_string(),
        };
        if suffix.is_empty() {
            return Err(bad());
        }
        suffix
            .chars()
            .map(|c| {
                let s = c.to_string();
                if allowed.contains(&s) {
                    Ok(s)
                } else {
                    Err(bad())
                }
            })
            .collect()
    }
}
