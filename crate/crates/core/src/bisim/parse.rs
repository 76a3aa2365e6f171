//! Expression syntax.
//!
//! ```text
//! sum     := cat ('+' cat)*
//! cat     := postfix (['·' | '.'] postfix)*
//! postfix := primary '*'*
//! primary := '0' | '1' | 'ε' | letter | atom | '(' sum ')' | 'nu(' sum ')'
//! letter  := [a-z]
//! atom    := [A-Z][0-9]* ('_' [a-z]+)?
//! ```
//!
//! Juxtaposition is concatenation, so `KL + M` is `K·L + M`.

use super::{Atom, LangExpr};
use crate::error::BisimError;

struct Parser {
    chars: Vec<char>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(char::is_whitespace) {
            self.pos += 1;
        }
    }

    fn err(&self, msg: impl Into<String>) -> BisimError {
        BisimError::Parse { pos: self.pos, msg: msg.into() }
    }

    fn at_nu(&self) -> bool {
        self.chars[self.pos..].starts_with(&['n', 'u', '('])
    }

    fn sum(&mut self) -> Result<LangExpr, BisimError> {
        let mut items = vec![self.cat()?];
        loop {
            self.skip_ws();
            if self.peek() != Some('+') {
                break;
            }
            self.pos += 1;
            items.push(self.cat()?);
        }
        Ok(LangExpr::sum_all(items))
    }

    fn starts_primary(&self) -> bool {
        matches!(self.peek(), Some(c) if c == '(' || c == '0' || c == '1' || c == 'ε' || c.is_ascii_alphabetic())
    }

    fn cat(&mut self) -> Result<LangExpr, BisimError> {
        let mut items = vec![self.postfix()?];
        loop {
            self.skip_ws();
            match self.peek() {
                Some('·' | '.') => {
                    self.pos += 1;
                    items.push(self.postfix()?);
                }
                _ if self.starts_primary() => items.push(self.postfix()?),
                _ => break,
            }
        }
        Ok(LangExpr::cat_all(items))
    }

    fn postfix(&mut self) -> Result<LangExpr, BisimError> {
        let mut e = self.primary()?;
        loop {
            self.skip_ws();
            if self.peek() != Some('*') {
                return Ok(e);
            }
            self.pos += 1;
            e = LangExpr::star(e);
        }
    }

    fn close(&mut self) -> Result<(), BisimError> {
        self.skip_ws();
        if self.peek() != Some(')') {
            return Err(self.err("expected `)`"));
        }
        self.pos += 1;
        Ok(())
    }

    fn primary(&mut self) -> Result<LangExpr, BisimError> {
        self.skip_ws();
        if self.at_nu() {
            self.pos += 3;
            let e = self.sum()?;
            self.close()?;
            return Ok(LangExpr::nu(e));
        }
        let c = self.peek().ok_or_else(|| self.err("unexpected end of expression"))?;
        self.pos += 1;
        match c {
            '0' => Ok(LangExpr::Empty),
            '1' | 'ε' => Ok(LangExpr::Eps),
            '(' => {
                let e = self.sum()?;
                self.close()?;
                Ok(e)
            }
            c if c.is_ascii_lowercase() => Ok(LangExpr::Letter(c)),
            c if c.is_ascii_uppercase() => {
                let mut name = c.to_string();
                while let Some(d) = self.peek().filter(char::is_ascii_digit) {
                    name.push(d);
                    self.pos += 1;
                }
                let mut path = String::new();
                if self.peek() == Some('_') {
                    self.pos += 1;
                    while let Some(l) = self.peek().filter(char::is_ascii_lowercase) {
                        path.push(l);
                        self.pos += 1;
                    }
                    if path.is_empty() {
                        return Err(self.err("expected letters after `_`"));
                    }
                }
                Ok(LangExpr::Atom(Atom { name, path }))
            }
            other => {
                self.pos -= 1;
                Err(self.err(format!("unexpected `{other}`")))
            }
        }
    }
}

/// Parse an expression; error positions are character offsets.
pub fn parse_expr(s: &str) -> Result<LangExpr, BisimError> {
    let mut p = Parser { chars: s.chars().collect(), pos: 0 };
    let e = p.sum()?;
    p.skip_ws();
    if p.pos < p.chars.len() {
        return Err(p.err(format!("unexpected `{}`", p.chars[p.pos])));
    }
    Ok(e)
}
