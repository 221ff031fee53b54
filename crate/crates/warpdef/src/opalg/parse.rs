//! Text syntax for operator expressions.
//!
//! ```text
//! expr     := term (("+" | "-") term)*
//! term     := unary (("*" | "/") unary)*
//! unary    := "-" unary | power
//! power    := atom ("^" exponent)?
//! exponent := "-"? INT | "(" "-"? INT ("/" INT)? ")"
//! atom     := INT | "i" | IDENT | "(" expr ")"
//! ```
//!
//! Identifiers are `X1..X3`, `P1..P3`, `r`, `rho`, and constant names.
//! Rational exponents are accepted on `r` and `rho`; other bases take
//! integer exponents (negative only for invertible scalars). Division is
//! allowed by single-term scalars, so `3/2` and `e/m` are valid.

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};

use super::coord::CoordFunction;
use super::expr::OperatorExpr;
use super::scalar::{Rational, Scalar, KNOWN_CONSTANTS};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("syntax error at position {pos}: {message}")]
    Syntax { pos: usize, message: String },
    #[error("unknown symbol `{name}` at position {pos}")]
    UnknownSymbol { pos: usize, name: String },
}

/// Maps Unicode spellings to canonical constant names.
pub fn canonical_constant(name: &str) -> &str {
    match name {
        "φ_M" | "Φ_M" => "phi_M",
        "Ω" => "Omega",
        "ω" => "omega",
        "ħ" => "hbar",
        "π" => "pi",
        other => other,
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    End,
}

fn tokenize(text: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut out = Vec::new();
    let mut k = 0;
    while k < chars.len() {
        let (pos, c) = chars[k];
        if c.is_whitespace() {
            k += 1;
            continue;
        }
        let simple = match c {
            '+' => Some(Tok::Plus),
            '-' | '−' => Some(Tok::Minus),
            '*' | '·' => Some(Tok::Star),
            '/' => Some(Tok::Slash),
            '^' => Some(Tok::Caret),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            _ => None,
        };
        if let Some(t) = simple {
            out.push((pos, t));
            k += 1;
        } else if c.is_ascii_digit() {
            let start = k;
            while k < chars.len() && chars[k].1.is_ascii_digit() {
                k += 1;
            }
            let digits: String = chars[start..k].iter().map(|(_, c)| *c).collect();
            out.push((pos, Tok::Int(digits.parse().unwrap())));
        } else if c.is_alphabetic() || c == '_' {
            let start = k;
            while k < chars.len() && (chars[k].1.is_alphanumeric() || chars[k].1 == '_') {
                k += 1;
            }
            let name: String = chars[start..k].iter().map(|(_, c)| *c).collect();
            out.push((pos, Tok::Ident(name)));
        } else {
            return Err(ParseError::Syntax { pos, message: format!("unexpected character `{}`", c) });
        }
    }
    out.push((text.len(), Tok::End));
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    at: usize,
    extra: &'a [&'a str],
}

enum Atom {
    Radial(bool),
    Expr(OperatorExpr),
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].1
    }

    fn pos(&self) -> usize {
        self.toks[self.at].0
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.at].1.clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn syntax<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError::Syntax { pos: self.pos(), message: message.into() })
    }

    fn expect(&mut self, t: Tok, what: &str) -> Result<(), ParseError> {
        if *self.peek() == t {
            self.bump();
            Ok(())
        } else {
            self.syntax(format!("expected {}", what))
        }
    }

    fn expr(&mut self) -> Result<OperatorExpr, ParseError> {
        let mut acc = self.term()?;
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

    fn term(&mut self) -> Result<OperatorExpr, ParseError> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Tok::Star => {
                    self.bump();
                    acc = &acc * &self.unary()?;
                }
                Tok::Slash => {
                    self.bump();
                    let pos = self.pos();
                    let d = self.unary()?;
                    let inv = d
                        .coordinate_part()
                        .as_constant()
                        .filter(|_| d.momentum_degree() == 0)
                        .and_then(|s| s.inverse().ok())
                        .ok_or_else(|| ParseError::Syntax {
                            pos,
                            message: "division is only defined by a nonzero single-term constant".into(),
                        })?;
                    acc = acc.scale(&inv);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<OperatorExpr, ParseError> {
        if *self.peek() == Tok::Minus {
            self.bump();
            return Ok(-&self.unary()?);
        }
        self.power()
    }

    fn exponent(&mut self) -> Result<Rational, ParseError> {
        let paren = *self.peek() == Tok::LParen;
        if paren {
            self.bump();
        }
        let negative = *self.peek() == Tok::Minus;
        if negative {
            self.bump();
        }
        let Tok::Int(n) = self.bump() else {
            self.at -= 1;
            return self.syntax("expected an exponent");
        };
        let mut value = Rational::from_integer(n);
        if paren && *self.peek() == Tok::Slash {
            self.bump();
            let Tok::Int(d) = self.bump() else {
                self.at -= 1;
                return self.syntax("expected an exponent denominator");
            };
            if d.is_zero() {
                return self.syntax("zero denominator in exponent");
            }
            value /= Rational::from_integer(d);
        }
        if paren {
            self.expect(Tok::RParen, "`)`")?;
        }
        Ok(if negative { -value } else { value })
    }

    fn power(&mut self) -> Result<OperatorExpr, ParseError> {
        let atom = self.atom()?;
        if *self.peek() != Tok::Caret {
            return Ok(match atom {
                Atom::Radial(false) => CoordFunction::r_pow(Rational::one()).into(),
                Atom::Radial(true) => CoordFunction::rho_pow(Rational::one()).into(),
                Atom::Expr(e) => e,
            });
        }
        self.bump();
        let pos = self.pos();
        let exp = self.exponent()?;
        match atom {
            Atom::Radial(false) => Ok(CoordFunction::r_pow(exp).into()),
            Atom::Radial(true) => Ok(CoordFunction::rho_pow(exp).into()),
            Atom::Expr(e) => {
                if !exp.is_integer() {
                    return Err(ParseError::Syntax {
                        pos,
                        message: "fractional exponents are only allowed on r and rho".into(),
                    });
                }
                let n = exp.to_integer().to_i32().ok_or_else(|| ParseError::Syntax {
                    pos,
                    message: "exponent too large".into(),
                })?;
                if n >= 0 {
                    return Ok(e.pow(n as u32));
                }
                e.coordinate_part()
                    .as_constant()
                    .filter(|_| e.momentum_degree() == 0)
                    .and_then(|s| s.pow(n).ok())
                    .map(OperatorExpr::scalar)
                    .ok_or(ParseError::Syntax {
                        pos,
                        message: "negative exponents need a nonzero single-term constant base".into(),
                    })
            }
        }
    }

    fn atom(&mut self) -> Result<Atom, ParseError> {
        let pos = self.pos();
        match self.bump() {
            Tok::Int(n) => Ok(Atom::Expr(OperatorExpr::scalar(Scalar::from_rational(Rational::from_integer(n))))),
            Tok::LParen => {
                let e = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(Atom::Expr(e))
            }
            Tok::Ident(name) => self.identifier(pos, &name),
            Tok::End => {
                self.at = self.toks.len() - 1;
                self.syntax("unexpected end of input")
            }
            _ => {
                self.at -= 1;
                self.syntax("expected an operand")
            }
        }
    }

    fn identifier(&self, pos: usize, name: &str) -> Result<Atom, ParseError> {
        let axis = |s: &str| match s {
            "1" => Some(0),
            "2" => Some(1),
            "3" => Some(2),
            _ => None,
        };
        if let Some(j) = name.strip_prefix('X').and_then(axis) {
            return Ok(Atom::Expr(OperatorExpr::coordinate(j)));
        }
        if let Some(j) = name.strip_prefix('P').and_then(axis) {
            return Ok(Atom::Expr(OperatorExpr::momentum(j)));
        }
        match name {
            "r" => return Ok(Atom::Radial(false)),
            "rho" | "ρ" => return Ok(Atom::Radial(true)),
            "i" => return Ok(Atom::Expr(OperatorExpr::scalar(Scalar::i()))),
            _ => {}
        }
        let canon = canonical_constant(name);
        if KNOWN_CONSTANTS.contains(&canon) || self.extra.contains(&canon) {
            return Ok(Atom::Expr(OperatorExpr::scalar(Scalar::constant(canon))));
        }
        Err(ParseError::UnknownSymbol { pos, name: name.to_string() })
    }
}

/// Parses with additional user-declared constant names.
pub fn parse_with(text: &str, extra_constants: &[&str]) -> Result<OperatorExpr, ParseError> {
    let toks = tokenize(text)?;
    let mut p = Parser { toks, at: 0, extra: extra_constants };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return p.syntax("unexpected trailing input");
    }
    Ok(e)
}

/// Parses an expression into its normal-ordered form.
pub fn parse(text: &str) -> Result<OperatorExpr, ParseError> {
    parse_with(text, &[])
}

/// Parses an expression that must not depend on coordinates or momenta.
pub fn parse_scalar(text: &str, extra_constants: &[&str]) -> Result<Scalar, ParseError> {
    let e = parse_with(text, extra_constants)?;
    e.coordinate_part()
        .as_constant()
        .filter(|_| e.momentum_degree() == 0)
        .ok_or(ParseError::Syntax { pos: 0, message: "expected a constant expression".into() })
}

/// Parses an expression that must not contain momenta.
pub fn parse_coord(text: &str, extra_constants: &[&str]) -> Result<CoordFunction, ParseError> {
    let e = parse_with(text, extra_constants)?;
    if e.momentum_degree() > 0 {
        return Err(ParseError::Syntax { pos: 0, message: "expected a function of the coordinates".into() });
    }
    Ok(e.coordinate_part())
}
