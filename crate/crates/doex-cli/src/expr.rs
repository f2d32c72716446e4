//! Expression parser for the scalar and element grammar used by the CLI and
//! the registry file.
//!
//! Grammar (precedence: `^` > unary `-` > `*` > `+`/`-`):
//!
//! ```text
//! expr     := term (('+' | '-') term)*
//! term     := factor ('*' factor)*
//! factor   := '-' factor | atom ('^' natural)?
//! atom     := rational | parameter | generator | '(' expr ')'
//! rational := integer ('/' integer)?
//! ```
//!
//! Multiplication is always explicit and exponents are nonnegative integer
//! literals. Generators are `x1, x2, y1, y2`; parameters come from the fixed
//! registry (`q12, q11, p12, p11, f, g, p, q`).

use std::fmt;

use doex_core::params::{ArithError, ConstraintSet, ParamName, Scalar};
use doex_core::{Element, Letter};
use num_bigint::BigInt;
use num_rational::BigRational;

/// Abstract syntax of an expression.
#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Rational(BigRational),
    Param(ParamName),
    Gen(Letter),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, u32),
}

/// A parse failure with its byte position and the tokens that were expected.
#[derive(Clone, Debug, PartialEq)]
pub struct ParseError {
    pub position: usize,
    pub message: String,
    pub expected: Vec<&'static str>,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "parse error at position {}: {}", self.position, self.message)?;
        if !self.expected.is_empty() {
            write!(f, " (expected {})", self.expected.join(", "))?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Token {
    Int(BigInt),
    Name(String),
    Plus,
    Minus,
    Star,
    Caret,
    Slash,
    LParen,
    RParen,
}

fn tokenize(input: &str) -> Result<Vec<(usize, Token)>, ParseError> {
    let mut out = Vec::new();
    let bytes = input.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        match c {
            ' ' | '\t' => i += 1,
            '+' => {
                out.push((i, Token::Plus));
                i += 1;
            }
            '-' => {
                out.push((i, Token::Minus));
                i += 1;
            }
            '*' => {
                out.push((i, Token::Star));
                i += 1;
            }
            '^' => {
                out.push((i, Token::Caret));
                i += 1;
            }
            '/' => {
                out.push((i, Token::Slash));
                i += 1;
            }
            '(' => {
                out.push((i, Token::LParen));
                i += 1;
            }
            ')' => {
                out.push((i, Token::RParen));
                i += 1;
            }
            '0'..='9' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let n: BigInt = input[start..i].parse().expect("digits");
                out.push((start, Token::Int(n)));
            }
            'a'..='z' => {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric()) {
                    i += 1;
                }
                out.push((start, Token::Name(input[start..i].to_string())));
            }
            _ => {
                return Err(ParseError {
                    position: i,
                    message: format!("unexpected character '{c}'"),
                    expected: vec!["number", "name", "operator", "parenthesis"],
                })
            }
        }
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<(usize, Token)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&(usize, Token)> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self) -> Option<(usize, Token)> {
        let t = self.tokens.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn here(&self) -> usize {
        self.peek().map(|(p, _)| *p).unwrap_or(self.end)
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Some((_, Token::Plus)) => {
                    self.pos += 1;
                    let rhs = self.term()?;
                    lhs = Expr::Add(Box::new(lhs), Box::new(rhs));
                }
                Some((_, Token::Minus)) => {
                    self.pos += 1;
                    let rhs = self.term()?;
                    lhs = Expr::Sub(Box::new(lhs), Box::new(rhs));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.factor()?;
        while let Some((_, Token::Star)) = self.peek() {
            self.pos += 1;
            let rhs = self.factor()?;
            lhs = Expr::Mul(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        if let Some((_, Token::Minus)) = self.peek() {
            self.pos += 1;
            let inner = self.factor()?;
            return Ok(Expr::Neg(Box::new(inner)));
        }
        let base = self.atom()?;
        if let Some((_, Token::Caret)) = self.peek() {
            self.pos += 1;
            let pos = self.here();
            match self.next() {
                Some((_, Token::Int(n))) => {
                    let exp: u32 = n.try_into().map_err(|_| ParseError {
                        position: pos,
                        message: "exponent too large".to_string(),
                        expected: vec!["nonnegative integer"],
                    })?;
                    return Ok(Expr::Pow(Box::new(base), exp));
                }
                _ => {
                    return Err(ParseError {
                        position: pos,
                        message: "exponents must be nonnegative integer literals".to_string(),
                        expected: vec!["nonnegative integer"],
                    })
                }
            }
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let pos = self.here();
        match self.next() {
            Some((_, Token::Int(n))) => {
                // optional '/ integer' forms a rational literal
                if let Some((_, Token::Slash)) = self.peek() {
                    self.pos += 1;
                    let dpos = self.here();
                    match self.next() {
                        Some((_, Token::Int(d))) => {
                            if d == BigInt::from(0) {
                                return Err(ParseError {
                                    position: dpos,
                                    message: "zero denominator in rational literal".to_string(),
                                    expected: vec!["nonzero integer"],
                                });
                            }
                            Ok(Expr::Rational(BigRational::new(n, d)))
                        }
                        _ => Err(ParseError {
                            position: dpos,
                            message: "'/' is only allowed inside a rational literal".to_string(),
                            expected: vec!["integer"],
                        }),
                    }
                } else {
                    Ok(Expr::Rational(BigRational::from_integer(n)))
                }
            }
            Some((p, Token::Name(name))) => {
                if let Some(l) = Letter::parse(&name) {
                    Ok(Expr::Gen(l))
                } else if let Some(param) = ParamName::parse(&name) {
                    Ok(Expr::Param(param))
                } else {
                    Err(ParseError {
                        position: p,
                        message: format!("unknown name '{name}'"),
                        expected: vec!["generator x1,x2,y1,y2", "parameter q12,q11,p12,p11,f,g,p,q"],
                    })
                }
            }
            Some((_, Token::LParen)) => {
                let inner = self.expr()?;
                let cpos = self.here();
                match self.next() {
                    Some((_, Token::RParen)) => Ok(inner),
                    _ => Err(ParseError {
                        position: cpos,
                        message: "unclosed parenthesis".to_string(),
                        expected: vec![")"],
                    }),
                }
            }
            _ => Err(ParseError {
                position: pos,
                message: "expected an operand".to_string(),
                expected: vec!["number", "parameter", "generator", "("],
            }),
        }
    }
}

/// Parse a full expression; trailing input is an error.
pub fn parse_expression(input: &str) -> Result<Expr, ParseError> {
    let tokens = tokenize(input)?;
    let end = input.len();
    let mut p = Parser { tokens, pos: 0, end };
    let e = p.expr()?;
    if let Some((pos, t)) = p.peek() {
        return Err(ParseError {
            position: *pos,
            message: format!("unexpected trailing token {t:?}"),
            expected: vec!["end of input", "+", "-", "*", "^"],
        });
    }
    Ok(e)
}

impl Expr {
    /// Lower to a free-algebra element, preserving operand order.
    pub fn to_element(&self, cs: &ConstraintSet) -> Element {
        match self {
            Expr::Rational(r) => Element::scalar(Scalar::from_rational(r.clone())),
            Expr::Param(p) => Element::scalar(Scalar::param(*p)),
            Expr::Gen(l) => Element::letter(*l),
            Expr::Neg(e) => e.to_element(cs).neg(),
            Expr::Add(a, b) => a.to_element(cs).add(&b.to_element(cs), cs),
            Expr::Sub(a, b) => a.to_element(cs).sub(&b.to_element(cs), cs),
            Expr::Mul(a, b) => a.to_element(cs).mul(&b.to_element(cs), cs),
            Expr::Pow(e, n) => e.to_element(cs).pow(*n, cs),
        }
    }

    /// Lower to a scalar; errors when a generator occurs.
    pub fn to_scalar(&self, cs: &ConstraintSet) -> Result<Scalar, String> {
        match self {
            Expr::Rational(r) => Ok(Scalar::from_rational(r.clone())),
            Expr::Param(p) => Ok(Scalar::param(*p)),
            Expr::Gen(l) => Err(format!("generator {l} is not allowed in a scalar expression")),
            Expr::Neg(e) => Ok(e.to_scalar(cs)?.neg()),
            Expr::Add(a, b) => Ok(a.to_scalar(cs)?.add(&b.to_scalar(cs)?, cs)),
            Expr::Sub(a, b) => Ok(a.to_scalar(cs)?.sub(&b.to_scalar(cs)?, cs)),
            Expr::Mul(a, b) => Ok(a.to_scalar(cs)?.mul(&b.to_scalar(cs)?, cs)),
            Expr::Pow(e, n) => Ok(e.to_scalar(cs)?.pow(*n, cs)),
        }
    }
}

/// Parse a rational literal such as `-3/2` or `5`.
pub fn parse_rational(input: &str) -> Result<BigRational, String> {
    let e = parse_expression(input).map_err(|e| e.to_string())?;
    let s = e
        .to_scalar(&ConstraintSet::empty())
        .map_err(|e| e.to_string())?;
    s.as_rational()
        .ok_or_else(|| format!("'{input}' is not a rational literal"))
}

/// Parse a scalar expression under no constraints (registry coefficients).
pub fn parse_scalar(input: &str) -> Result<Scalar, String> {
    let e = parse_expression(input).map_err(|e| e.to_string())?;
    e.to_scalar(&ConstraintSet::empty())
}

/// Parse an element expression.
pub fn parse_element(input: &str, cs: &ConstraintSet) -> Result<Element, ParseError> {
    Ok(parse_expression(input)?.to_element(cs))
}

#[allow(dead_code)]
fn arith_to_string(e: ArithError) -> String {
    e.to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grammar_examples() {
        // two product terms
        let e = parse_expression("y2*y1 - p*y1*y2").unwrap();
        match e {
            Expr::Sub(_, _) => {}
            other => panic!("expected Sub, got {other:?}"),
        }
        // the normal element of the power-centrality example
        assert!(parse_expression("x1^2 - f*x2^2").is_ok());
        // negative exponents are rejected
        let err = parse_expression("x1^(-1)").unwrap_err();
        assert!(err.message.contains("exponent"));
    }

    #[test]
    fn implicit_multiplication_rejected() {
        assert!(parse_expression("2 x1").is_err());
        assert!(parse_expression("p q").is_err());
        assert!(parse_expression("(x1)(x2)").is_err());
    }

    #[test]
    fn rational_literals() {
        assert_eq!(
            parse_rational("3/2").unwrap(),
            BigRational::new(BigInt::from(3), BigInt::from(2))
        );
        assert_eq!(
            parse_rational("-1").unwrap(),
            BigRational::from_integer(BigInt::from(-1))
        );
        assert!(parse_rational("1/0").is_err());
        // '/' between non-literals is rejected
        assert!(parse_expression("x1/2").is_err());
        assert!(parse_expression("f/g").is_err());
    }

    #[test]
    fn lowering_preserves_order() {
        let cs = ConstraintSet::empty();
        let e = parse_element("y1*x2", &cs).unwrap();
        let w: Vec<_> = e.terms().collect();
        assert_eq!(w.len(), 1);
        assert_eq!(w[0].0.render(), "y1*x2");
    }

    #[test]
    fn roundtrip_canonical_rendering() {
        // rendering an element and re-parsing yields an equal element
        let cs = ConstraintSet::empty();
        for src in [
            "x1^2 - f*x2^2",
            "(1/2)*x1*y1 + p*y2^2",
            "-2*p*x1*y1*y2",
            "q12*x1*x2 + q11*x1^2",
            "1 - f + f^2",
        ] {
            let e = parse_element(src, &cs).unwrap();
            let rendered = e.render();
            let back = parse_element(&rendered, &cs)
                .unwrap_or_else(|err| panic!("re-parse of '{rendered}': {err}"));
            assert!(back.eq_element(&e, &cs), "roundtrip of {src} via {rendered}");
        }
    }

    #[test]
    fn scalar_rejects_generators() {
        assert!(parse_scalar("x1 + 1").is_err());
        assert!(parse_scalar("p^2 - 1").is_ok());
    }
}
