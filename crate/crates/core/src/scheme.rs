//! Parameter schemes: integer expressions in the family index `n` that pick
//! the parameter elements at each index, plus index-ladder syntax.
//!
//! Arithmetic is exact on big integers. `x^α` with a fractional exponent,
//! `ln`, and `/` produce doubles; a scheme value must come back to an
//! integer through `floor(…)`.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{FromPrimitive, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::structures::{is_prime, Element};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SchemeError {
    #[error("cannot parse scheme `{text}` at byte {position}: {message}")]
    Parse {
        text: String,
        position: usize,
        message: String,
    },
    #[error("`{0}` evaluates to a non-integer; wrap it in floor(...)")]
    NotInteger(String),
    #[error("`{expr}` at n = {n} is {value}, outside the universe of size {universe}")]
    OutOfUniverse {
        expr: String,
        n: usize,
        value: String,
        universe: usize,
    },
    #[error("arithmetic error in `{expr}` at n = {n}: {message}")]
    Arithmetic {
        expr: String,
        n: usize,
        message: String,
    },
    #[error("invalid index ladder `{0}`")]
    Ladder(String),
}

#[derive(Debug, Clone, PartialEq)]
enum Expr {
    N,
    Int(BigInt),
    Real(f64),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Mod(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
    Floor(Box<Expr>),
    Ln(Box<Expr>),
}

#[derive(Debug, Clone, PartialEq)]
enum Value {
    Int(BigInt),
    Real(f64),
}

impl Value {
    fn real(&self) -> f64 {
        match self {
            Value::Int(i) => i.to_f64().unwrap_or(f64::INFINITY),
            Value::Real(r) => *r,
        }
    }
}

/// One integer-valued expression in `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct SchemeExpr {
    text: String,
    expr: Expr,
}

impl SchemeExpr {
    pub fn parse(text: &str) -> Result<Self, SchemeError> {
        let mut p = ExprParser {
            text,
            bytes: text.as_bytes(),
            at: 0,
        };
        let expr = p.expr()?;
        p.skip_ws();
        if p.at != p.bytes.len() {
            return p.fail("unexpected trailing input");
        }
        Ok(Self {
            text: text.trim().to_string(),
            expr,
        })
    }

    /// Exact value at index `n`.
    pub fn eval(&self, n: usize) -> Result<BigInt, SchemeError> {
        match self.eval_expr(&self.expr, n)? {
            Value::Int(i) => Ok(i),
            Value::Real(_) => Err(SchemeError::NotInteger(self.text.clone())),
        }
    }

    fn arith<T>(&self, n: usize, message: &str) -> Result<T, SchemeError> {
        Err(SchemeError::Arithmetic {
            expr: self.text.clone(),
            n,
            message: message.to_string(),
        })
    }

    fn eval_expr(&self, e: &Expr, n: usize) -> Result<Value, SchemeError> {
        use Value::{Int, Real};
        let bin = |a: &Expr, b: &Expr| -> Result<(Value, Value), SchemeError> {
            Ok((self.eval_expr(a, n)?, self.eval_expr(b, n)?))
        };
        Ok(match e {
            Expr::N => Int(BigInt::from(n)),
            Expr::Int(i) => Int(i.clone()),
            Expr::Real(r) => Real(*r),
            Expr::Neg(a) => match self.eval_expr(a, n)? {
                Int(i) => Int(-i),
                Real(r) => Real(-r),
            },
            Expr::Add(a, b) => match bin(a, b)? {
                (Int(x), Int(y)) => Int(x + y),
                (x, y) => Real(x.real() + y.real()),
            },
            Expr::Sub(a, b) => match bin(a, b)? {
                (Int(x), Int(y)) => Int(x - y),
                (x, y) => Real(x.real() - y.real()),
            },
            Expr::Mul(a, b) => match bin(a, b)? {
                (Int(x), Int(y)) => Int(x * y),
                (x, y) => Real(x.real() * y.real()),
            },
            Expr::Div(a, b) => {
                let (x, y) = bin(a, b)?;
                if y.real() == 0.0 {
                    return self.arith(n, "division by zero");
                }
                Real(x.real() / y.real())
            }
            Expr::Mod(a, b) => match bin(a, b)? {
                (Int(x), Int(y)) => {
                    if y.is_zero() {
                        return self.arith(n, "modulus is zero");
                    }
                    let m = y.abs();
                    Int(((x % &m) + &m) % &m)
                }
                _ => return self.arith(n, "mod needs integer operands"),
            },
            Expr::Pow(a, b) => match bin(a, b)? {
                (Int(x), Int(y)) => {
                    if y.is_negative() {
                        Real(Int(x).real().powf(Int(y).real()))
                    } else {
                        match y.to_u32().filter(|&k| k <= 4096) {
                            Some(k) => Int(num_traits::pow(x, k as usize)),
                            None => return self.arith(n, "exponent too large"),
                        }
                    }
                }
                (x, y) => Real(x.real().powf(y.real())),
            },
            Expr::Floor(a) => match self.eval_expr(a, n)? {
                Int(i) => Int(i),
                Real(r) => match BigInt::from_f64(r.floor()) {
                    Some(i) if r.is_finite() => Int(i),
                    _ => return self.arith(n, "floor of a non-finite value"),
                },
            },
            Expr::Ln(a) => {
                let x = self.eval_expr(a, n)?.real();
                if x <= 0.0 {
                    return self.arith(n, "logarithm of a non-positive value");
                }
                Real(x.ln())
            }
        })
    }
}

impl fmt::Display for SchemeExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text)
    }
}

struct ExprParser<'a> {
    text: &'a str,
    bytes: &'a [u8],
    at: usize,
}

impl ExprParser<'_> {
    fn fail<T>(&self, message: &str) -> Result<T, SchemeError> {
        Err(SchemeError::Parse {
            text: self.text.to_string(),
            position: self.at,
            message: message.to_string(),
        })
    }

    fn skip_ws(&mut self) {
        while self.at < self.bytes.len() && self.bytes[self.at].is_ascii_whitespace() {
            self.at += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.bytes.get(self.at).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.at += 1;
            true
        } else {
            false
        }
    }

    fn keyword(&mut self, word: &str) -> bool {
        self.skip_ws();
        let end = self.at + word.len();
        let matches = self.text.get(self.at..end) == Some(word)
            && !self
                .bytes
                .get(end)
                .is_some_and(|b| b.is_ascii_alphanumeric() || *b == b'_');
        if matches {
            self.at = end;
        }
        matches
    }

    fn expr(&mut self) -> Result<Expr, SchemeError> {
        let mut acc = self.term()?;
        loop {
            if self.eat(b'+') {
                acc = Expr::Add(Box::new(acc), Box::new(self.term()?));
            } else if self.eat(b'-') {
                acc = Expr::Sub(Box::new(acc), Box::new(self.term()?));
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Expr, SchemeError> {
        let mut acc = self.power()?;
        loop {
            if self.eat(b'*') {
                acc = Expr::Mul(Box::new(acc), Box::new(self.power()?));
            } else if self.eat(b'/') {
                acc = Expr::Div(Box::new(acc), Box::new(self.power()?));
            } else if self.keyword("mod") {
                acc = Expr::Mod(Box::new(acc), Box::new(self.power()?));
            } else {
                return Ok(acc);
            }
        }
    }

    fn lookahead_keyword(&mut self, word: &str) -> bool {
        let save = self.at;
        let hit = self.keyword(word);
        self.at = save;
        hit
    }

    fn power(&mut self) -> Result<Expr, SchemeError> {
        let mut base = self.unary()?;
        // juxtaposition such as `3n` or `2(n+1)` binds tighter than `*`
        while matches!(base, Expr::Int(_) | Expr::Real(_))
            && matches!(self.peek(), Some(b'n' | b'(' | b'f' | b'l'))
            && !self.lookahead_keyword("mod")
        {
            base = Expr::Mul(Box::new(base), Box::new(self.unary()?));
        }
        if self.eat(b'^') {
            let exp = self.power()?;
            return Ok(Expr::Pow(Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn unary(&mut self) -> Result<Expr, SchemeError> {
        if self.eat(b'-') {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.primary()
    }

    fn call(&mut self) -> Result<Expr, SchemeError> {
        if !self.eat(b'(') {
            return self.fail("expected `(`");
        }
        let inner = self.expr()?;
        if !self.eat(b')') {
            return self.fail("expected `)`");
        }
        Ok(inner)
    }

    fn primary(&mut self) -> Result<Expr, SchemeError> {
        match self.peek() {
            Some(b'(') => self.call(),
            Some(c) if c.is_ascii_digit() || c == b'.' => {
                let start = self.at;
                while self.at < self.bytes.len()
                    && (self.bytes[self.at].is_ascii_digit() || self.bytes[self.at] == b'.')
                {
                    self.at += 1;
                }
                let lit = &self.text[start..self.at];
                if lit.contains('.') {
                    match lit.parse::<f64>() {
                        Ok(r) => Ok(Expr::Real(r)),
                        Err(_) => self.fail("malformed number"),
                    }
                } else {
                    Ok(Expr::Int(lit.parse::<BigInt>().expect("digits")))
                }
            }
            _ => {
                if self.keyword("floor") {
                    Ok(Expr::Floor(Box::new(self.call()?)))
                } else if self.keyword("ln") || self.keyword("log") {
                    Ok(Expr::Ln(Box::new(self.call()?)))
                } else if self.keyword("n") {
                    Ok(Expr::N)
                } else {
                    self.fail("expected a number, `n`, `floor(...)` or `ln(...)`")
                }
            }
        }
    }
}

/// A parameter scheme: one expression per parameter variable.
#[derive(Debug, Clone, PartialEq)]
pub struct Scheme {
    exprs: Vec<SchemeExpr>,
}

impl Scheme {
    pub fn new(exprs: Vec<SchemeExpr>) -> Self {
        Self { exprs }
    }

    /// The scheme with no parameters.
    pub fn empty() -> Self {
        Self { exprs: Vec::new() }
    }

    /// Parses a comma-separated list of expressions; `""` and `none` give the
    /// empty scheme.
    pub fn parse(text: &str) -> Result<Self, SchemeError> {
        let trimmed = text.trim();
        if trimmed.is_empty() || trimmed == "none" {
            return Ok(Self::empty());
        }
        let mut exprs = Vec::new();
        let mut depth = 0i32;
        let mut start = 0;
        for (i, c) in trimmed.char_indices() {
            match c {
                '(' => depth += 1,
                ')' => depth -= 1,
                ',' if depth == 0 => {
                    exprs.push(SchemeExpr::parse(&trimmed[start..i])?);
                    start = i + 1;
                }
                _ => {}
            }
        }
        exprs.push(SchemeExpr::parse(&trimmed[start..])?);
        Ok(Self { exprs })
    }

    pub fn len(&self) -> usize {
        self.exprs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exprs.is_empty()
    }

    pub fn exprs(&self) -> &[SchemeExpr] {
        &self.exprs
    }

    /// Evaluates every expression at `n` and checks it names an element of
    /// a universe of the given size.
    pub fn elements(&self, n: usize, universe: usize) -> Result<Vec<Element>, SchemeError> {
        self.exprs
            .iter()
            .map(|e| {
                let v = e.eval(n)?;
                v.to_usize()
                    .filter(|&k| k < universe)
                    .ok_or_else(|| SchemeError::OutOfUniverse {
                        expr: e.text.clone(),
                        n,
                        value: v.to_string(),
                        universe,
                    })
            })
            .collect()
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<&str> = self.exprs.iter().map(|e| e.text.as_str()).collect();
        f.write_str(&parts.join(", "))
    }
}

/// Parses an index ladder: `a:b` (every integer), `geo:a..b` (doubling),
/// `primes:a..b`, or a comma-separated list. The result is strictly
/// increasing and non-empty.
pub fn parse_ladder(text: &str) -> Result<Vec<usize>, SchemeError> {
    let bad = || SchemeError::Ladder(text.to_string());
    let num = |s: &str| s.trim().parse::<usize>().map_err(|_| bad());
    let range = |s: &str| -> Result<(usize, usize), SchemeError> {
        let (a, b) = s.split_once("..").ok_or_else(bad)?;
        Ok((num(a)?, num(b)?))
    };
    let t = text.trim();
    let ladder: Vec<usize> = if let Some(rest) = t.strip_prefix("geo:") {
        let (a, b) = range(rest)?;
        if a == 0 {
            return Err(bad());
        }
        std::iter::successors(Some(a), |&x| x.checked_mul(2))
            .take_while(|&x| x <= b)
            .collect()
    } else if let Some(rest) = t.strip_prefix("primes:") {
        let (a, b) = range(rest)?;
        (a..=b).filter(|&p| is_prime(p)).collect()
    } else if let Some((a, b)) = t.split_once(':') {
        (num(a)?..=num(b)?).collect()
    } else {
        t.split(',').map(num).collect::<Result<_, _>>()?
    };
    if ladder.is_empty() || ladder.windows(2).any(|w| w[0] >= w[1]) {
        return Err(bad());
    }
    Ok(ladder)
}
