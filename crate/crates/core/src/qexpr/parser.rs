use std::fmt;

use thiserror::Error;

use super::ast::Expr;
use crate::qbinom::{Monomial, PochLength};

/// Syntax error at a 1-based byte position.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("syntax error at position {position}: expected {}, found {found}", expected.join(" or "))]
pub struct ParseError {
    pub position: usize,
    pub expected: Vec<String>,
    pub found: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Int(u64),
    Ident(String),
    Sym(char),
    End,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Int(n) => write!(f, "'{n}'"),
            Tok::Ident(s) => write!(f, "'{s}'"),
            Tok::Sym(c) => write!(f, "'{c}'"),
            Tok::End => write!(f, "end of input"),
        }
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    tok: Tok,
    tok_start: usize,
    /// Keeps `(q)^2` a power node while `q^2` collapses to `QPower(2)`.
    atom_was_parenthesized: bool,
}

pub fn parse(text: &str) -> Result<Expr, ParseError> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
        tok: Tok::End,
        tok_start: 0,
        atom_was_parenthesized: false,
    };
    p.advance()?;
    let e = p.expr()?;
    if p.tok != Tok::End {
        return Err(p.error(&["operator", "end of input"]));
    }
    Ok(e)
}

impl Parser<'_> {
    fn error(&self, expected: &[&str]) -> ParseError {
        ParseError {
            position: self.tok_start + 1,
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found: self.tok.to_string(),
        }
    }

    fn advance(&mut self) -> Result<(), ParseError> {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        self.tok_start = self.pos;
        let Some(&c) = self.src.get(self.pos) else {
            self.tok = Tok::End;
            return Ok(());
        };
        if c.is_ascii_digit() {
            let start = self.pos;
            while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            let digits = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
            let n = digits.parse::<u64>().map_err(|_| ParseError {
                position: start + 1,
                expected: vec!["integer that fits in 64 bits".into()],
                found: format!("'{digits}'"),
            })?;
            self.tok = Tok::Int(n);
        } else if c.is_ascii_alphabetic() {
            let start = self.pos;
            while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphanumeric() {
                self.pos += 1;
            }
            self.tok = Tok::Ident(String::from_utf8_lossy(&self.src[start..self.pos]).into_owned());
        } else if b"+-*/^(),;".contains(&c) {
            self.pos += 1;
            self.tok = Tok::Sym(c as char);
        } else {
            // step over one full UTF-8 character for the message
            let s = std::str::from_utf8(&self.src[self.pos..]).ok().and_then(|s| s.chars().next());
            return Err(ParseError {
                position: self.pos + 1,
                expected: vec!["expression".into()],
                found: format!("'{}'", s.unwrap_or('?')),
            });
        }
        Ok(())
    }

    fn is_sym(&self, c: char) -> bool {
        self.tok == Tok::Sym(c)
    }

    fn expect_sym(&mut self, c: char) -> Result<(), ParseError> {
        if self.is_sym(c) {
            self.advance()
        } else {
            Err(self.error(&[&format!("'{c}'")]))
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            if self.is_sym('+') {
                self.advance()?;
                lhs = Expr::add(lhs, self.term()?);
            } else if self.is_sym('-') {
                self.advance()?;
                lhs = Expr::sub(lhs, self.term()?);
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.factor()?;
        loop {
            if self.is_sym('*') {
                self.advance()?;
                lhs = Expr::mul(lhs, self.factor()?);
            } else if self.is_sym('/') {
                self.advance()?;
                lhs = Expr::div(lhs, self.factor()?);
            } else {
                return Ok(lhs);
            }
        }
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        if self.is_sym('-') {
            self.advance()?;
            return Ok(Expr::neg(self.factor()?));
        }
        let atom = self.atom()?;
        if self.is_sym('^') {
            self.advance()?;
            let n = self.signed_int()?;
            // a bare `q^n` is a single power of q
            if atom == Expr::QPower(1) && !self.atom_was_parenthesized {
                return Ok(Expr::QPower(n));
            }
            return Ok(Expr::pow(atom, n));
        }
        Ok(atom)
    }

    fn signed_int(&mut self) -> Result<i64, ParseError> {
        let neg = self.is_sym('-');
        if neg {
            self.advance()?;
        }
        match self.tok {
            Tok::Int(n) => {
                let v = i64::try_from(n).map_err(|_| self.error(&["integer that fits in 64 bits"]))?;
                self.advance()?;
                Ok(if neg { -v } else { v })
            }
            _ => Err(self.error(&["integer"])),
        }
    }

    fn nat(&mut self) -> Result<i64, ParseError> {
        match self.tok {
            Tok::Int(n) => {
                let v = i64::try_from(n).map_err(|_| self.error(&["integer that fits in 64 bits"]))?;
                self.advance()?;
                Ok(v)
            }
            _ => Err(self.error(&["natural number", "'inf'"])),
        }
    }
}

impl Parser<'_> {
    fn atom(&mut self) -> Result<Expr, ParseError> {
        self.atom_was_parenthesized = false;
        match self.tok.clone() {
            Tok::Int(n) => {
                self.advance()?;
                Ok(Expr::Int(n))
            }
            Tok::Sym('(') => {
                self.advance()?;
                let e = self.expr()?;
                self.expect_sym(')')?;
                self.atom_was_parenthesized = true;
                Ok(e)
            }
            Tok::Ident(s) if s == "q" => {
                self.advance()?;
                Ok(Expr::QPower(1))
            }
            Tok::Ident(s) if s == "P" => {
                self.advance()?;
                self.expect_sym('(')?;
                let mut args = vec![self.mono()?];
                while self.is_sym(',') {
                    self.advance()?;
                    args.push(self.mono()?);
                }
                self.expect_sym(';')?;
                let base = self.mono()?;
                let mut length = PochLength::Infinite;
                if self.is_sym(';') {
                    self.advance()?;
                    if self.tok == Tok::Ident("inf".into()) {
                        self.advance()?;
                    } else {
                        length = PochLength::Finite(self.nat()?);
                    }
                }
                if !self.is_sym(')') {
                    return Err(self.error(&["','", "';'", "')'"]));
                }
                self.advance()?;
                Ok(Expr::Poch { args, base, length })
            }
            Tok::Ident(s) if s == "qbin" => {
                self.advance()?;
                self.expect_sym('(')?;
                let top = self.signed_int()?;
                self.expect_sym(',')?;
                let bottom = self.signed_int()?;
                let mut base = Monomial::q(1);
                if self.is_sym(';') {
                    self.advance()?;
                    base = self.mono()?;
                }
                self.expect_sym(')')?;
                Ok(Expr::QBin { top, bottom, base })
            }
            _ => Err(self.error(&["integer", "'q'", "'('", "'P('", "'qbin('"])),
        }
    }

    fn mono(&mut self) -> Result<Monomial, ParseError> {
        let sign = if self.is_sym('-') {
            self.advance()?;
            -1
        } else {
            1
        };
        match self.tok.clone() {
            Tok::Ident(s) if s == "q" => {
                self.advance()?;
                let mut e = 1;
                if self.is_sym('^') {
                    self.advance()?;
                    e = self.signed_int()?;
                }
                Ok(Monomial::new(sign, e))
            }
            Tok::Int(n) => {
                let v = i64::try_from(n).map_err(|_| self.error(&["integer that fits in 64 bits"]))?;
                self.advance()?;
                Ok(Monomial::new(sign * v, 0))
            }
            _ => Err(self.error(&["'q'", "integer"])),
        }
    }
}
