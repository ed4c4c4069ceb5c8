//! Scalar expressions over chart coordinates.
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := ('+' | '-') unary | primary
//! primary := number | 't' | 'x' digits | func '(' expr ')' | '(' expr ')'
//! func    := exp | sinh | cosh | sin | cos
//! ```
//!
//! `t` is coordinate 0 and `xk` is coordinate `k`, matching the
//! `(t, x¹, …, x^{2n})` charts of hyperbolic extensions.

use std::fmt;

use crate::error::{GeometryError, Result};
use crate::jet::Jet;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Exp,
    Sinh,
    Cosh,
    Sin,
    Cos,
}

impl Func {
    fn from_name(s: &str) -> Option<Func> {
        Some(match s {
            "exp" => Func::Exp,
            "sinh" => Func::Sinh,
            "cosh" => Func::Cosh,
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            _ => return None,
        })
    }

    fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Sinh => "sinh",
            Func::Cosh => "cosh",
            Func::Sin => "sin",
            Func::Cos => "cos",
        }
    }

    fn apply(self, x: f64) -> f64 {
        match self {
            Func::Exp => x.exp(),
            Func::Sinh => x.sinh(),
            Func::Cosh => x.cosh(),
            Func::Sin => x.sin(),
            Func::Cos => x.cos(),
        }
    }

    fn apply_jet(self, x: &Jet) -> Jet {
        match self {
            Func::Exp => x.exp(),
            Func::Sinh => x.sinh(),
            Func::Cosh => x.cosh(),
            Func::Sin => x.sin(),
            Func::Cos => x.cos(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    Var(usize),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

impl Expr {
    pub fn parse(src: &str) -> Result<Expr> {
        let mut p = Parser { src: src.as_bytes(), pos: 0 };
        let e = p.expr()?;
        p.skip_ws();
        if p.pos < p.src.len() {
            return Err(p.error("unexpected trailing input"));
        }
        Ok(e)
    }

    /// Largest coordinate index used, if any.
    pub fn max_var(&self) -> Option<usize> {
        match self {
            Expr::Num(_) => None,
            Expr::Var(i) => Some(*i),
            Expr::Neg(a) | Expr::Call(_, a) => a.max_var(),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.max_var().max(b.max_var())
            }
        }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            Expr::Num(v) => *v,
            Expr::Var(i) => x[*i],
            Expr::Neg(a) => -a.eval(x),
            Expr::Add(a, b) => a.eval(x) + b.eval(x),
            Expr::Sub(a, b) => a.eval(x) - b.eval(x),
            Expr::Mul(a, b) => a.eval(x) * b.eval(x),
            Expr::Div(a, b) => a.eval(x) / b.eval(x),
            Expr::Call(f, a) => f.apply(a.eval(x)),
        }
    }

    pub fn eval_jet(&self, x: &[Jet]) -> Jet {
        match self {
            Expr::Num(v) => x[0].cst(*v),
            Expr::Var(i) => x[*i].clone(),
            Expr::Neg(a) => -a.eval_jet(x),
            Expr::Add(a, b) => a.eval_jet(x) + b.eval_jet(x),
            Expr::Sub(a, b) => a.eval_jet(x) - b.eval_jet(x),
            Expr::Mul(a, b) => a.eval_jet(x) * b.eval_jet(x),
            Expr::Div(a, b) => a.eval_jet(x) / b.eval_jet(x),
            Expr::Call(f, a) => f.apply_jet(&a.eval_jet(x)),
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(v) => write!(f, "{v}"),
            Expr::Var(0) => write!(f, "t"),
            Expr::Var(i) => write!(f, "x{i}"),
            Expr::Neg(a) => write!(f, "(-{a})"),
            Expr::Add(a, b) => write!(f, "({a} + {b})"),
            Expr::Sub(a, b) => write!(f, "({a} - {b})"),
            Expr::Mul(a, b) => write!(f, "({a} * {b})"),
            Expr::Div(a, b) => write!(f, "({a} / {b})"),
            Expr::Call(g, a) => write!(f, "{}({a})", g.name()),
        }
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, msg: &str) -> GeometryError {
        GeometryError::Parse { pos: self.pos, msg: msg.to_string() }
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

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        while let Some(op @ (b'+' | b'-')) = self.peek() {
            self.pos += 1;
            let rhs = self.term()?;
            lhs = if op == b'+' { Expr::Add(lhs.into(), rhs.into()) } else { Expr::Sub(lhs.into(), rhs.into()) };
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        while let Some(op @ (b'*' | b'/')) = self.peek() {
            self.pos += 1;
            let rhs = self.unary()?;
            lhs = if op == b'*' { Expr::Mul(lhs.into(), rhs.into()) } else { Expr::Div(lhs.into(), rhs.into()) };
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr> {
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                Ok(Expr::Neg(self.unary()?.into()))
            }
            Some(b'+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.primary(),
        }
    }

    fn primary(&mut self) -> Result<Expr> {
        match self.peek() {
            None => Err(self.error("unexpected end of input")),
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(b')')?;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() => self.word(),
            Some(_) => Err(self.error("unexpected character")),
        }
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(&format!("expected '{}'", c as char)))
        }
    }

    fn number(&mut self) -> Result<Expr> {
        let start = self.pos;
        let s = self.src;
        let digits = |p: &mut usize| {
            while *p < s.len() && s[*p].is_ascii_digit() {
                *p += 1;
            }
        };
        let mut p = self.pos;
        digits(&mut p);
        if p < s.len() && s[p] == b'.' {
            p += 1;
            digits(&mut p);
        }
        if p < s.len() && (s[p] == b'e' || s[p] == b'E') {
            let mut q = p + 1;
            if q < s.len() && (s[q] == b'+' || s[q] == b'-') {
                q += 1;
            }
            if q < s.len() && s[q].is_ascii_digit() {
                digits(&mut q);
                p = q;
            }
        }
        let text = std::str::from_utf8(&s[start..p]).expect("ascii");
        self.pos = p;
        text.parse::<f64>().map(Expr::Num).map_err(|_| GeometryError::Parse {
            pos: start,
            msg: format!("bad number '{text}'"),
        })
    }

    fn word(&mut self) -> Result<Expr> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphanumeric() {
            self.pos += 1;
        }
        let w = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
        if w == "t" {
            return Ok(Expr::Var(0));
        }
        if let Some(k) = w.strip_prefix('x') {
            return match k.parse::<usize>() {
                Ok(i) if i >= 1 => Ok(Expr::Var(i)),
                _ => Err(GeometryError::Parse { pos: start, msg: format!("unknown variable '{w}'") }),
            };
        }
        match Func::from_name(w) {
            Some(f) => {
                self.expect(b'(')?;
                let arg = self.expr()?;
                self.expect(b')')?;
                Ok(Expr::Call(f, arg.into()))
            }
            None => Err(GeometryError::Parse { pos: start, msg: format!("unknown identifier '{w}'") }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precedence_and_functions() {
        let e = Expr::parse("1 + 2*x1 - t/4").unwrap();
        assert_eq!(e.eval(&[2.0, 3.0]), 1.0 + 6.0 - 0.5);
        let e = Expr::parse("-exp(0.5*t) * cosh(x2) + sin(x1)*cos(x1)").unwrap();
        let x = [0.3, 0.7, -0.2];
        let want = -(0.15f64).exp() * (-0.2f64).cosh() + 0.7f64.sin() * 0.7f64.cos();
        assert!((e.eval(&x) - want).abs() < 1e-15);
        assert_eq!(Expr::parse("2 - 3 - 4").unwrap().eval(&[]), -5.0);
        assert_eq!(Expr::parse("1.5e-1").unwrap().eval(&[]), 0.15);
    }

    #[test]
    fn jet_derivatives_match_closed_form() {
        let e = Expr::parse("sinh(t*x1) / (1 + x1*x1)").unwrap();
        let p = [0.4, -0.6];
        let j = e.eval_jet(&Jet::seed(&p));
        let (t, x) = (p[0], p[1]);
        let den = 1.0 + x * x;
        assert!((j.value - (t * x).sinh() / den).abs() < 1e-15);
        assert!((j.d(0) - x * (t * x).cosh() / den).abs() < 1e-14);
        let dx = t * (t * x).cosh() / den - (t * x).sinh() * 2.0 * x / (den * den);
        assert!((j.d(1) - dx).abs() < 1e-14);
    }

    #[test]
    fn errors_carry_positions() {
        for (src, pos) in [("1 +", 3), ("y1", 0), ("x0", 0), ("exp 2", 4), ("(1", 2), ("2 $", 2), ("tan(1)", 0)] {
            match Expr::parse(src) {
                Err(GeometryError::Parse { pos: p, .. }) => assert_eq!(p, pos, "{src}"),
                other => panic!("{src}: {other:?}"),
            }
        }
    }

    #[test]
    fn display_round_trips() {
        let e = Expr::parse("exp(-t) * (x1 - 2) / x3").unwrap();
        assert_eq!(Expr::parse(&e.to_string()).unwrap(), e);
        assert_eq!(e.max_var(), Some(3));
    }
}
