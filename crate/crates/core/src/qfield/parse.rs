//! Recursive-descent parser for the rational-function exchange grammar.
//!
//! ```text
//! expr  := term (('+' | '-') term)*
//! term  := unary (('*' | '/')? unary)*     juxtaposition multiplies: 2n, 2(n+1)
//! unary := ('-' | '+') unary | power
//! power := atom ('^' uint)?
//! atom  := integer | 'n' | '(' expr ')'
//! ```

use num_bigint::BigInt;

use super::poly::Poly;
use super::ratfn::RationalFn;
use super::QfieldError;

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Int(BigInt),
    N,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

fn lex(s: &str) -> Result<Vec<(usize, Tok)>, QfieldError> {
    let bytes = s.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        let tok = match c {
            ' ' | '\t' | '\n' | '\r' => {
                i += 1;
                continue;
            }
            '0'..='9' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                out.push((start, Tok::Int(s[start..i].parse().unwrap())));
                continue;
            }
            'n' => Tok::N,
            '+' => Tok::Plus,
            '-' => Tok::Minus,
            '*' => Tok::Star,
            '/' => Tok::Slash,
            '^' => Tok::Caret,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            _ => return Err(err(s, i, &format!("unexpected character '{c}'"))),
        };
        out.push((i, tok));
        i += 1;
    }
    Ok(out)
}

fn err(input: &str, pos: usize, msg: &str) -> QfieldError {
    QfieldError::Parse {
        input: input.to_string(),
        pos,
        msg: msg.to_string(),
    }
}

struct Parser<'a> {
    src: &'a str,
    toks: Vec<(usize, Tok)>,
    pos: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map_or(self.src.len(), |(p, _)| *p)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(_, t)| t.clone());
        self.pos += 1;
        t
    }

    fn expr(&mut self) -> Result<RationalFn, QfieldError> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.bump();
                    acc = &acc + &self.term()?;
                }
                Some(Tok::Minus) => {
                    self.bump();
                    acc = &acc - &self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<RationalFn, QfieldError> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.bump();
                    acc = &acc * &self.unary()?;
                }
                Some(Tok::Slash) => {
                    self.bump();
                    let at = self.offset();
                    let d = self.unary()?;
                    acc = acc
                        .checked_div(&d)
                        .map_err(|_| err(self.src, at, "division by zero"))?;
                }
                Some(Tok::Int(_) | Tok::N | Tok::LParen) => {
                    acc = &acc * &self.power()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<RationalFn, QfieldError> {
        match self.peek() {
            Some(Tok::Minus) => {
                self.bump();
                Ok(-self.unary()?)
            }
            Some(Tok::Plus) => {
                self.bump();
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<RationalFn, QfieldError> {
        let base = self.atom()?;
        if self.peek() == Some(&Tok::Caret) {
            self.bump();
            let at = self.offset();
            match self.bump() {
                Some(Tok::Int(e)) => {
                    let e: u32 = e
                        .try_into()
                        .ok()
                        .filter(|e| *e <= 64)
                        .ok_or_else(|| err(self.src, at, "exponent too large"))?;
                    Ok(base.pow(e))
                }
                _ => Err(err(self.src, at, "expected integer exponent")),
            }
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<RationalFn, QfieldError> {
        let at = self.offset();
        match self.bump() {
            Some(Tok::Int(v)) => Ok(RationalFn::from_poly(Poly::constant(v.into()))),
            Some(Tok::N) => Ok(RationalFn::n()),
            Some(Tok::LParen) => {
                let inner = self.expr()?;
                let close = self.offset();
                match self.bump() {
                    Some(Tok::RParen) => Ok(inner),
                    _ => Err(err(self.src, close, "expected ')'")),
                }
            }
            Some(_) => Err(err(self.src, at, "expected a number, 'n' or '('")),
            None => Err(err(self.src, at, "unexpected end of input")),
        }
    }
}

/// Parses a rational function in `n`.
pub fn parse(s: &str) -> Result<RationalFn, QfieldError> {
    let toks = lex(s)?;
    if toks.is_empty() {
        return Err(err(s, 0, "empty expression"));
    }
    let mut p = Parser {
        src: s,
        toks,
        pos: 0,
    };
    let v = p.expr()?;
    if p.pos < p.toks.len() {
        return Err(err(s, p.offset(), "trailing input"));
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn implicit_multiplication() {
        assert_eq!(parse("2n+1").unwrap(), parse("2*n+1").unwrap());
        assert_eq!(
            parse("2(n+1)(n+2)").unwrap(),
            parse("2*(n^2+3*n+2)").unwrap()
        );
    }

    #[test]
    fn precedence() {
        assert_eq!(parse("-n^2").unwrap(), -parse("n*n").unwrap());
        assert_eq!(parse("1/2*n").unwrap(), parse("n/2").unwrap());
        assert_eq!(parse("3-2-1").unwrap(), RationalFn::zero());
    }

    #[test]
    fn errors_carry_position() {
        match parse("n+x") {
            Err(QfieldError::Parse { pos, .. }) => assert_eq!(pos, 2),
            other => panic!("{other:?}"),
        }
        assert!(parse("(n+1").is_err());
        assert!(parse("1/(n-n)").is_err());
        assert!(parse("").is_err());
        assert!(parse("n^").is_err());
    }
}
