//! Parser for the polynomial expression grammar.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary ('*' unary)*
//! unary  := ('+' | '-') unary | power
//! power  := atom ('^' integer)?
//! atom   := integer ('/' integer)? | name | '(' expr ')'
//! name   := [a-zA-Z][a-zA-Z0-9_]*
//! ```
//!
//! Whitespace is insignificant.

use num_bigint::BigInt;
use num_traits::Zero;

use crate::poly::Poly;
use crate::{Error, Result, Q};

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Num(Q),
    Var(String),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, u32),
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Int(BigInt),
    Name(String),
    Sym(char),
}

fn tokenize(src: &str) -> Result<Vec<Tok>> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            out.push(Tok::Int(s.parse().expect("digits")));
        } else if c.is_ascii_alphabetic() {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(Tok::Name(chars[start..i].iter().collect()));
        } else if "+-*^/()".contains(c) {
            out.push(Tok::Sym(c));
            i += 1;
        } else {
            return Err(Error::Parse(format!("unexpected character `{c}` in `{src}`")));
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<Tok>,
    pos: usize,
    src: &'a str,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn err(&self, what: &str) -> Error {
        Error::Parse(format!("{what} at token {} in `{}`", self.pos, self.src))
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Sym(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            if self.eat('+') {
                lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat('-') {
                lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        while self.eat('*') {
            lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.eat('-') {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        if self.eat('+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if self.eat('^') {
            match self.peek().cloned() {
                Some(Tok::Int(k)) => {
                    self.pos += 1;
                    let k: u32 = k
                        .try_into()
                        .map_err(|_| self.err("exponent too large"))?;
                    Ok(Expr::Pow(Box::new(base), k))
                }
                _ => Err(self.err("expected a nonnegative integer exponent")),
            }
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.peek().cloned() {
            Some(Tok::Int(n)) => {
                self.pos += 1;
                if self.eat('/') {
                    match self.peek().cloned() {
                        Some(Tok::Int(d)) if !d.is_zero() => {
                            self.pos += 1;
                            Ok(Expr::Num(Q::new(n, d)))
                        }
                        _ => Err(self.err("expected a nonzero denominator")),
                    }
                } else {
                    Ok(Expr::Num(Q::from_integer(n)))
                }
            }
            Some(Tok::Name(s)) => {
                self.pos += 1;
                Ok(Expr::Var(s))
            }
            Some(Tok::Sym('(')) => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(')') {
                    return Err(self.err("expected `)`"));
                }
                Ok(e)
            }
            _ => Err(self.err("expected a number, a name or `(`")),
        }
    }
}

pub fn parse_expr(src: &str) -> Result<Expr> {
    let toks = tokenize(src)?;
    if toks.is_empty() {
        return Err(Error::Parse("empty expression".into()));
    }
    let mut p = Parser { toks, pos: 0, src };
    let e = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(p.err("trailing input"));
    }
    Ok(e)
}

impl Expr {
    /// Evaluates over the polynomial ring with the given ordered variables.
    pub fn to_poly(&self, vars: &[String]) -> Result<Poly> {
        let n = vars.len();
        Ok(match self {
            Expr::Num(c) => Poly::constant(n, c.clone()),
            Expr::Var(v) => {
                let i = vars
                    .iter()
                    .position(|w| w == v)
                    .ok_or_else(|| Error::Parse(format!("unknown variable `{v}`")))?;
                Poly::var(n, i)
            }
            Expr::Neg(a) => a.to_poly(vars)?.neg(),
            Expr::Add(a, b) => a.to_poly(vars)?.add(&b.to_poly(vars)?),
            Expr::Sub(a, b) => a.to_poly(vars)?.sub(&b.to_poly(vars)?),
            Expr::Mul(a, b) => a.to_poly(vars)?.mul(&b.to_poly(vars)?),
            Expr::Pow(a, k) => a.to_poly(vars)?.pow(*k),
        })
    }
}

pub fn parse_poly(src: &str, vars: &[String]) -> Result<Poly> {
    parse_expr(src)?.to_poly(vars)
}

/// Parses a rational literal, allowing a leading sign (`-2/5`).
pub fn parse_rational(src: &str) -> Result<Q> {
    let p = parse_poly(src, &[])?;
    Ok(p.coeff(&crate::poly::Monomial(vec![])))
}

/// True when `s` matches the variable-name rule.
pub fn is_valid_name(s: &str) -> bool {
    let mut cs = s.chars();
    matches!(cs.next(), Some(c) if c.is_ascii_alphabetic())
        && cs.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::Monomial;
    use crate::q;

    fn vars(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn literals_and_precedence() {
        let v = vars(&["t"]);
        let p = parse_poly("-2/5 + 3*t^2 - (t - 1)", &v).unwrap();
        assert_eq!(p.coeff(&Monomial(vec![0])), Q::new(3.into(), 5.into()));
        assert_eq!(p.coeff(&Monomial(vec![1])), q(-1));
        assert_eq!(p.coeff(&Monomial(vec![2])), q(3));
        // unary minus binds looser than ^
        let p = parse_poly("-t^2", &v).unwrap();
        assert_eq!(p.coeff(&Monomial(vec![2])), q(-1));
    }

    #[test]
    fn rejects_bad_input() {
        let v = vars(&["x"]);
        for bad in ["", "x^", "x^-1", "(x", "x y", "1/0", "y", "x $ 2", "x^1.5"] {
            assert!(parse_poly(bad, &v).is_err(), "{bad}");
        }
    }

    #[test]
    fn names() {
        assert!(is_valid_name("x_1"));
        assert!(!is_valid_name("1x"));
        assert!(!is_valid_name(""));
        assert_eq!(parse_rational("-2/5").unwrap(), Q::new((-2).into(), 5.into()));
    }
}
