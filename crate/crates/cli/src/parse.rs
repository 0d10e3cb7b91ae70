//! Polynomial expressions over declared variables, with exact rational coefficients.
//!
//! ```text
//! expr   = term (("+" | "-") term)*
//! term   = unary (("*" | "/") unary)*
//! unary  = ("+" | "-") unary | power
//! power  = atom ("^" integer)?
//! atom   = number | identifier | "(" expr ")"
//! number = digits ("." digits)? (("e" | "E") ("+" | "-")? digits)?
//! ```
//!
//! Division is only by nonzero constants, so `1/2*x` and `x/3` are accepted.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Pow, Zero};
use realrad_core::polycore::RationalPoly;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.column, self.message)
    }
}

impl std::error::Error for ParseError {}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(BigRational),
    Ident(String),
    Op(char),
    End,
}

struct Token {
    tok: Tok,
    col: usize,
}

/// Largest exponent accepted after `^` or in a number literal.
const MAX_EXPONENT: i64 = 1000;

fn tokenize(src: &str, line: usize, col0: usize) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let err = |i: usize, message: String| ParseError { line, column: col0 + i, message };
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || (c == '.' && chars.get(i + 1).is_some_and(char::is_ascii_digit)) {
            let start = i;
            let mut digits = String::new();
            let mut frac = 0i64;
            while i < chars.len() && chars[i].is_ascii_digit() {
                digits.push(chars[i]);
                i += 1;
            }
            if i < chars.len() && chars[i] == '.' {
                i += 1;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    digits.push(chars[i]);
                    frac += 1;
                    i += 1;
                }
            }
            let mut exp = 0i64;
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                let neg = match chars.get(j) {
                    Some('-') => {
                        j += 1;
                        true
                    }
                    Some('+') => {
                        j += 1;
                        false
                    }
                    _ => false,
                };
                let ds = j;
                while j < chars.len() && chars[j].is_ascii_digit() {
                    j += 1;
                }
                if ds == j {
                    return Err(err(i, String::from("malformed exponent in number")));
                }
                let e: String = chars[ds..j].iter().collect();
                exp = e.parse::<i64>().ok().filter(|e| *e <= MAX_EXPONENT).ok_or_else(|| err(ds, String::from("exponent too large")))?;
                if neg {
                    exp = -exp;
                }
                i = j;
            }
            let mantissa: BigInt = digits.parse().map_err(|_| err(start, String::from("malformed number")))?;
            let shift = exp - frac;
            let ten = BigInt::from(10);
            let value = if shift >= 0 {
                BigRational::from_integer(mantissa * Pow::pow(&ten, shift as u64))
            } else {
                BigRational::new(mantissa, Pow::pow(&ten, (-shift) as u64))
            };
            out.push(Token { tok: Tok::Num(value), col: col0 + start });
        } else if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(Token { tok: Tok::Ident(chars[start..i].iter().collect()), col: col0 + start });
        } else if "+-*/^()".contains(c) {
            out.push(Token { tok: Tok::Op(c), col: col0 + i });
            i += 1;
        } else {
            return Err(err(i, format!("unexpected character '{}'", c)));
        }
    }
    out.push(Token { tok: Tok::End, col: col0 + chars.len() });
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<Token>,
    pos: usize,
    vars: &'a [String],
    line: usize,
}

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn error(&self, message: impl Into<String>) -> ParseError {
        ParseError { line: self.line, column: self.toks[self.pos].col, message: message.into() }
    }

    fn eat(&mut self, op: char) -> bool {
        if *self.peek() == Tok::Op(op) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<RationalPoly, ParseError> {
        let mut acc = self.term()?;
        loop {
            if self.eat('+') {
                acc = acc.add(&self.term()?);
            } else if self.eat('-') {
                acc = acc.sub(&self.term()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<RationalPoly, ParseError> {
        let mut acc = self.unary()?;
        loop {
            if self.eat('*') {
                acc = acc.mul(&self.unary()?);
            } else if *self.peek() == Tok::Op('/') {
                self.pos += 1;
                let at = self.pos;
                let d = self.unary()?;
                let c = constant_value(&d).filter(|c| !c.is_zero()).ok_or_else(|| {
                    ParseError { line: self.line, column: self.toks[at].col, message: String::from("division by a nonconstant or zero") }
                })?;
                acc = acc.scale(&(BigRational::one() / c));
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<RationalPoly, ParseError> {
        if self.eat('-') {
            Ok(self.unary()?.negate())
        } else if self.eat('+') {
            self.unary()
        } else {
            self.power()
        }
    }

    fn power(&mut self) -> Result<RationalPoly, ParseError> {
        let base = self.atom()?;
        if !self.eat('^') {
            return Ok(base);
        }
        match self.peek().clone() {
            Tok::Num(e) if e.is_integer() && e.numer() <= &BigInt::from(MAX_EXPONENT) => {
                self.pos += 1;
                let e: u32 = e.numer().try_into().expect("bounded exponent");
                Ok(base.pow(e))
            }
            _ => Err(self.error("expected a nonnegative integer exponent")),
        }
    }

    fn atom(&mut self) -> Result<RationalPoly, ParseError> {
        let n = self.vars.len();
        match self.peek().clone() {
            Tok::Num(c) => {
                self.pos += 1;
                Ok(RationalPoly::constant(n, c))
            }
            Tok::Ident(name) => match self.vars.iter().position(|v| *v == name) {
                Some(i) => {
                    self.pos += 1;
                    Ok(RationalPoly::var(n, i))
                }
                None => Err(self.error(format!("undeclared variable '{}'", name))),
            },
            Tok::Op('(') => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(')') {
                    return Err(self.error("expected ')'"));
                }
                Ok(e)
            }
            Tok::End => Err(self.error("unexpected end of expression")),
            Tok::Op(c) => Err(self.error(format!("unexpected '{}'", c))),
        }
    }
}

fn constant_value(p: &RationalPoly) -> Option<BigRational> {
    match p.len() {
        0 => Some(BigRational::zero()),
        1 => p.terms().next().filter(|(m, _)| m.is_one()).map(|(_, c)| c.clone()),
        _ => None,
    }
}

/// Parses a single expression; positions are reported as line 1.
pub fn parse_polynomial(src: &str, vars: &[String]) -> Result<RationalPoly, ParseError> {
    parse_polynomial_at(src, vars, 1, 1)
}

/// Parses `src`, reporting errors relative to `line` and the 1-based column `col0` of its first character.
pub fn parse_polynomial_at(src: &str, vars: &[String], line: usize, col0: usize) -> Result<RationalPoly, ParseError> {
    let toks = tokenize(src, line, col0)?;
    let mut p = Parser { toks, pos: 0, vars, line };
    let e = p.expr()?;
    match p.peek() {
        Tok::End => Ok(e),
        Tok::Ident(_) | Tok::Num(_) | Tok::Op('(') => Err(p.error("expected an operator; products need '*'")),
        _ => Err(p.error("unexpected token")),
    }
}

/// Identifiers appearing in `src`, in order of first appearance.
pub fn identifiers(src: &str) -> Result<Vec<String>, ParseError> {
    let mut out: Vec<String> = Vec::new();
    for t in tokenize(src, 1, 1)? {
        if let Tok::Ident(s) = t.tok {
            if !out.contains(&s) {
                out.push(s);
            }
        }
    }
    Ok(out)
}

pub fn is_identifier(s: &str) -> bool {
    let mut c = s.chars();
    c.next().is_some_and(|h| h.is_alphabetic() || h == '_') && c.all(|ch| ch.is_alphanumeric() || ch == '_')
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn vars(names: &[&str]) -> Vec<String> {
        names.iter().map(|s| s.to_string()).collect()
    }

    fn q(a: i64, b: i64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    #[test]
    fn literals() {
        let v = vars(&["x"]);
        let c = |s: &str| constant_value(&parse_polynomial(s, &v).unwrap()).unwrap();
        assert_eq!(c("0.25"), q(1, 4));
        assert_eq!(c("1e-3"), q(1, 1000));
        assert_eq!(c("2.5E2"), q(250, 1));
        assert_eq!(c("3/4"), q(3, 4));
        assert_eq!(c(".5"), q(1, 2));
        assert_eq!(c("-(2)^3"), q(-8, 1));
    }

    #[test]
    fn precedence() {
        let v = vars(&["x", "y"]);
        let p = parse_polynomial("-x^2 + 2*x*y/4 - (y - 1)^2", &v).unwrap();
        assert_eq!(p.to_display_string(&["x", "y"]), "-y^2 + 1/2*x*y - x^2 + 2*y - 1");
    }

    #[test]
    fn errors_carry_positions() {
        let v = vars(&["x", "y"]);
        let e = parse_polynomial("x + 2y", &v).unwrap_err();
        assert_eq!((e.line, e.column), (1, 6));
        let e = parse_polynomial("x + w", &v).unwrap_err();
        assert_eq!(e.column, 5);
        assert!(e.message.contains("undeclared"));
        let e = parse_polynomial_at("(x + y", &v, 7, 10).unwrap_err();
        assert_eq!((e.line, e.column), (7, 16));
        assert!(parse_polynomial("x/y", &v).is_err());
        assert!(parse_polynomial("x^y", &v).is_err());
        assert!(parse_polynomial("x $ y", &v).is_err());
        assert!(parse_polynomial("1/0", &v).is_err());
    }

    #[test]
    fn identifier_scan() {
        assert_eq!(identifiers("y^2 + x*y - z1").unwrap(), vec!["y", "x", "z1"]);
        assert!(is_identifier("x_2"));
        assert!(!is_identifier("2x"));
    }

    proptest! {
        #[test]
        fn printed_form_parses_back(terms in proptest::collection::vec(((0u32..4, 0u32..4, 0u32..3), -50i64..50, 1i64..9), 0..8)) {
            let names = vars(&["x", "y", "z"]);
            let mut p = RationalPoly::zero(3);
            for ((a, b, c), num, den) in terms {
                p.add_term(realrad_core::polycore::Monomial::new(vec![a, b, c]), q(num, den));
            }
            let text = p.to_display_string(&["x", "y", "z"]);
            prop_assert_eq!(parse_polynomial(&text, &names).unwrap(), p);
        }
    }
}
