//! Arithmetic expressions inside document strings and their evaluation
//! in the various rings a task needs.

use std::fmt;
use std::sync::Arc;

use super::lexer::Pos;
use crate::descent::LPoly;
use crate::error::InputError;
use crate::field::{PrimeModulus, RatFunc};
use crate::tower::upoly::{self, UPolyK};
use crate::tower::{Tower, TowerElement};
use crate::trunc::TruncElement;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    Int(u64, Pos),
    Name(String, Pos),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>, Pos),
    Neg(Box<Expr>),
    Pow(Box<Expr>, u32),
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Int(n, _) => write!(f, "{}", n),
            Expr::Name(s, _) => f.write_str(s),
            Expr::Add(a, b) => write!(f, "({} + {})", a, b),
            Expr::Sub(a, b) => write!(f, "({} - {})", a, b),
            Expr::Mul(a, b) => write!(f, "({} * {})", a, b),
            Expr::Div(a, b, _) => write!(f, "({} / {})", a, b),
            Expr::Neg(a) => write!(f, "(-{})", a),
            Expr::Pow(a, e) => write!(f, "({})^{}", a, e),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum ETok {
    Int(u64),
    Name(String),
    Op(char),
    End,
}

fn lex(text: &str, base: Pos) -> Result<Vec<(ETok, Pos)>, InputError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let pos = base.advance(i);
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            out.push((ETok::Int(s.parse().map_err(|_| pos.invalid("number too large"))?), pos));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push((ETok::Name(chars[start..i].iter().collect()), pos));
        } else if "+-*/^()".contains(c) {
            out.push((ETok::Op(c), pos));
            i += 1;
        } else {
            return Err(pos.syntax(format!("an expression, found '{}'", c)));
        }
    }
    out.push((ETok::End, base.advance(chars.len())));
    Ok(out)
}

struct ExprParser {
    toks: Vec<(ETok, Pos)>,
    at: usize,
}

impl ExprParser {
    fn peek(&self) -> &ETok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> Pos {
        self.toks[self.at].1
    }

    fn eat(&mut self, op: char) -> bool {
        if *self.peek() == ETok::Op(op) {
            self.at += 1;
            true
        } else {
            false
        }
    }

    fn sum(&mut self) -> Result<Expr, InputError> {
        let mut lhs = self.product()?;
        loop {
            if self.eat('+') {
                lhs = Expr::Add(Box::new(lhs), Box::new(self.product()?));
            } else if self.eat('-') {
                lhs = Expr::Sub(Box::new(lhs), Box::new(self.product()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn product(&mut self) -> Result<Expr, InputError> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat('*') {
                lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
            } else if *self.peek() == ETok::Op('/') {
                let pos = self.pos();
                self.at += 1;
                lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?), pos);
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, InputError> {
        if self.eat('-') {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        let base = self.atom()?;
        if self.eat('^') {
            let pos = self.pos();
            return match self.peek().clone() {
                ETok::Int(e) => {
                    self.at += 1;
                    let e = u32::try_from(e).map_err(|_| pos.invalid("exponent too large"))?;
                    Ok(Expr::Pow(Box::new(base), e))
                }
                _ => Err(pos.syntax("an unsigned integer exponent")),
            };
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, InputError> {
        let pos = self.pos();
        match self.peek().clone() {
            ETok::Int(n) => {
                self.at += 1;
                Ok(Expr::Int(n, pos))
            }
            ETok::Name(s) => {
                self.at += 1;
                Ok(Expr::Name(s, pos))
            }
            ETok::Op('(') => {
                self.at += 1;
                let e = self.sum()?;
                if !self.eat(')') {
                    return Err(self.pos().syntax("')'"));
                }
                Ok(e)
            }
            _ => Err(pos.syntax("a number, a name or '('")),
        }
    }
}

/// Parses the text of a string literal that starts at `base`.
pub fn parse_expr(text: &str, base: Pos) -> Result<Expr, InputError> {
    let mut p = ExprParser {
        toks: lex(text, base)?,
        at: 0,
    };
    let e = p.sum()?;
    if *p.peek() != ETok::End {
        return Err(p.pos().syntax("an operator or end of expression"));
    }
    Ok(e)
}

/// A ring in which expressions can be evaluated.
pub trait EvalContext {
    type Value: Clone;
    fn int(&self, n: u64) -> Self::Value;
    fn name(&self, name: &str, pos: Pos) -> Result<Self::Value, InputError>;
    fn add(&self, a: &Self::Value, b: &Self::Value) -> Self::Value;
    fn sub(&self, a: &Self::Value, b: &Self::Value) -> Self::Value;
    fn mul(&self, a: &Self::Value, b: &Self::Value) -> Self::Value;
    fn neg(&self, a: &Self::Value) -> Self::Value;
    fn div(&self, a: &Self::Value, b: &Self::Value, pos: Pos) -> Result<Self::Value, InputError>;

    fn pow(&self, a: &Self::Value, e: u32) -> Self::Value {
        let mut acc = self.int(1);
        let mut base = a.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    fn eval(&self, e: &Expr) -> Result<Self::Value, InputError> {
        Ok(match e {
            Expr::Int(n, _) => self.int(*n),
            Expr::Name(s, pos) => self.name(s, *pos)?,
            Expr::Add(a, b) => self.add(&self.eval(a)?, &self.eval(b)?),
            Expr::Sub(a, b) => self.sub(&self.eval(a)?, &self.eval(b)?),
            Expr::Mul(a, b) => self.mul(&self.eval(a)?, &self.eval(b)?),
            Expr::Div(a, b, pos) => self.div(&self.eval(a)?, &self.eval(b)?, *pos)?,
            Expr::Neg(a) => self.neg(&self.eval(a)?),
            Expr::Pow(a, k) => self.pow(&self.eval(a)?, *k),
        })
    }
}

fn reduce_int(md: PrimeModulus, n: u64) -> i64 {
    (n % md.get() as u64) as i64
}

/// The base field K.
pub struct KContext<'a> {
    pub modulus: PrimeModulus,
    pub base: &'a [String],
}

impl KContext<'_> {
    fn var(&self, name: &str) -> Option<RatFunc> {
        let i = self.base.iter().position(|b| b == name)?;
        Some(RatFunc::var(self.modulus, self.base.len(), i))
    }
}

impl EvalContext for KContext<'_> {
    type Value = RatFunc;

    fn int(&self, n: u64) -> RatFunc {
        RatFunc::constant(self.modulus, self.base.len(), reduce_int(self.modulus, n))
    }

    fn name(&self, name: &str, pos: Pos) -> Result<RatFunc, InputError> {
        self.var(name).ok_or_else(|| pos.unknown(name))
    }

    fn add(&self, a: &RatFunc, b: &RatFunc) -> RatFunc {
        a.add(b)
    }

    fn sub(&self, a: &RatFunc, b: &RatFunc) -> RatFunc {
        a.sub(b)
    }

    fn mul(&self, a: &RatFunc, b: &RatFunc) -> RatFunc {
        a.mul(b)
    }

    fn neg(&self, a: &RatFunc) -> RatFunc {
        a.neg()
    }

    fn div(&self, a: &RatFunc, b: &RatFunc, pos: Pos) -> Result<RatFunc, InputError> {
        a.div(b).map_err(|_| pos.invalid("division by zero"))
    }
}

/// Polynomials over K in the separable generator, used for the minimal
/// polynomial and the automorphism images.
pub struct SepPolyContext<'a> {
    pub k: KContext<'a>,
    pub var: &'a str,
}

impl SepPolyContext<'_> {
    fn mul_poly(a: &[RatFunc], b: &[RatFunc], zero: &RatFunc) -> UPolyK {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![zero.clone(); a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                out[i + j] = out[i + j].add(&x.mul(y));
            }
        }
        upoly::trim(out)
    }

    fn combine(a: &[RatFunc], b: &[RatFunc], zero: &RatFunc, f: impl Fn(&RatFunc, &RatFunc) -> RatFunc) -> UPolyK {
        let n = a.len().max(b.len());
        let out = (0..n)
            .map(|i| f(a.get(i).unwrap_or(zero), b.get(i).unwrap_or(zero)))
            .collect();
        upoly::trim(out)
    }

    fn zero(&self) -> RatFunc {
        RatFunc::zero(self.k.modulus, self.k.base.len())
    }
}

impl EvalContext for SepPolyContext<'_> {
    type Value = UPolyK;

    fn int(&self, n: u64) -> UPolyK {
        upoly::trim(vec![self.k.int(n)])
    }

    fn name(&self, name: &str, pos: Pos) -> Result<UPolyK, InputError> {
        if name == self.var {
            Ok(vec![self.zero(), self.k.int(1)])
        } else {
            Ok(upoly::trim(vec![self.k.name(name, pos)?]))
        }
    }

    fn add(&self, a: &UPolyK, b: &UPolyK) -> UPolyK {
        Self::combine(a, b, &self.zero(), |x, y| x.add(y))
    }

    fn sub(&self, a: &UPolyK, b: &UPolyK) -> UPolyK {
        Self::combine(a, b, &self.zero(), |x, y| x.sub(y))
    }

    fn mul(&self, a: &UPolyK, b: &UPolyK) -> UPolyK {
        Self::mul_poly(a, b, &self.zero())
    }

    fn neg(&self, a: &UPolyK) -> UPolyK {
        a.iter().map(|x| x.neg()).collect()
    }

    fn div(&self, a: &UPolyK, b: &UPolyK, pos: Pos) -> Result<UPolyK, InputError> {
        match b.as_slice() {
            [c] => {
                let inv = c.inv().map_err(|_| pos.invalid("division by zero"))?;
                Ok(a.iter().map(|x| x.mul(&inv)).collect())
            }
            [] => Err(pos.invalid("division by zero")),
            _ => Err(pos.invalid(format!("can only divide by elements of K, not by polynomials in {}", self.var))),
        }
    }
}

/// The tower L.
pub struct LContext<'a> {
    pub tower: &'a Arc<Tower>,
}

impl LContext<'_> {
    pub fn lookup(tower: &Arc<Tower>, name: &str) -> Option<TowerElement> {
        if let Some(i) = tower.base_vars().iter().position(|b| b == name) {
            return Some(TowerElement::from_k(tower, RatFunc::var(tower.modulus(), tower.nvars(), i)));
        }
        if tower.sep_name() == Some(name) {
            return Some(TowerElement::sep_generator(tower));
        }
        let i = tower.insep().iter().position(|g| g.name == name)?;
        Some(TowerElement::insep_generator(tower, i + 1))
    }
}

impl EvalContext for LContext<'_> {
    type Value = TowerElement;

    fn int(&self, n: u64) -> TowerElement {
        let md = self.tower.modulus();
        TowerElement::from_k(self.tower, RatFunc::constant(md, self.tower.nvars(), reduce_int(md, n)))
    }

    fn name(&self, name: &str, pos: Pos) -> Result<TowerElement, InputError> {
        if name == "X" {
            return Err(pos.invalid("X is not allowed in an element of L"));
        }
        Self::lookup(self.tower, name).ok_or_else(|| pos.unknown(name))
    }

    fn add(&self, a: &TowerElement, b: &TowerElement) -> TowerElement {
        a.add(b)
    }

    fn sub(&self, a: &TowerElement, b: &TowerElement) -> TowerElement {
        a.sub(b)
    }

    fn mul(&self, a: &TowerElement, b: &TowerElement) -> TowerElement {
        a.mul(b)
    }

    fn neg(&self, a: &TowerElement) -> TowerElement {
        a.neg()
    }

    fn div(&self, a: &TowerElement, b: &TowerElement, pos: Pos) -> Result<TowerElement, InputError> {
        a.div(b).map_err(|_| pos.invalid("division by zero"))
    }
}

/// The truncated ring L[X̄], where `X` names X̄.
pub struct TruncContext<'a> {
    pub tower: &'a Arc<Tower>,
}

impl EvalContext for TruncContext<'_> {
    type Value = TruncElement;

    fn int(&self, n: u64) -> TruncElement {
        TruncElement::constant(LContext { tower: self.tower }.int(n))
    }

    fn name(&self, name: &str, pos: Pos) -> Result<TruncElement, InputError> {
        if name == "X" {
            return Ok(TruncElement::xbar_pow(self.tower, 1));
        }
        Ok(TruncElement::constant(LContext { tower: self.tower }.name(name, pos)?))
    }

    fn add(&self, a: &TruncElement, b: &TruncElement) -> TruncElement {
        a.add(b)
    }

    fn sub(&self, a: &TruncElement, b: &TruncElement) -> TruncElement {
        a.sub(b)
    }

    fn mul(&self, a: &TruncElement, b: &TruncElement) -> TruncElement {
        a.mul(b)
    }

    fn neg(&self, a: &TruncElement) -> TruncElement {
        a.neg()
    }

    fn div(&self, a: &TruncElement, b: &TruncElement, pos: Pos) -> Result<TruncElement, InputError> {
        let inv = b
            .invert()
            .map_err(|_| pos.invalid("divisor is not a unit of the truncated ring"))?;
        Ok(a.mul(&inv))
    }
}

/// Polynomials over L in the variables of an algebra presentation.
pub struct PolyContext<'a> {
    pub tower: &'a Arc<Tower>,
    pub vars: &'a Arc<[String]>,
}

impl EvalContext for PolyContext<'_> {
    type Value = LPoly;

    fn int(&self, n: u64) -> LPoly {
        LPoly::constant(self.vars, LContext { tower: self.tower }.int(n))
    }

    fn name(&self, name: &str, pos: Pos) -> Result<LPoly, InputError> {
        if let Some(i) = self.vars.iter().position(|v| v == name) {
            return Ok(LPoly::var(self.tower, self.vars, i));
        }
        Ok(LPoly::constant(self.vars, LContext { tower: self.tower }.name(name, pos)?))
    }

    fn add(&self, a: &LPoly, b: &LPoly) -> LPoly {
        a.add(b)
    }

    fn sub(&self, a: &LPoly, b: &LPoly) -> LPoly {
        a.sub(b)
    }

    fn mul(&self, a: &LPoly, b: &LPoly) -> LPoly {
        a.mul(b)
    }

    fn neg(&self, a: &LPoly) -> LPoly {
        a.scale(&TowerElement::one(self.tower).neg())
    }

    fn div(&self, a: &LPoly, b: &LPoly, pos: Pos) -> Result<LPoly, InputError> {
        if b.total_degree() != Some(0) {
            return Err(pos.invalid("can only divide a polynomial by a nonzero constant"));
        }
        let c = b.leading().expect("nonzero").1.inverse().map_err(|_| pos.invalid("division by zero"))?;
        Ok(a.scale(&c))
    }

    fn pow(&self, a: &LPoly, e: u32) -> LPoly {
        a.pow(e)
    }
}
