//! A small arithmetic expression language used for custom Kähler potentials
//! and user test functions.
//!
//! Grammar (usual precedence, `^` is right associative and binds tighter than
//! unary minus, so `-t^2 = -(t^2)`):
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := '-' unary | power
//! power  := atom ('^' unary)?
//! atom   := number | constant | variable | func '(' expr ')' | '(' expr ')'
//! func   := exp | log | sqrt | sin | cos
//! constant := pi | e
//! ```
//!
//! Variables are resolved against a caller-supplied name list. Expressions can
//! be differentiated symbolically; the result is lightly simplified (constant
//! folding and the 0/1 identities) so repeated derivatives stay small.

use std::fmt;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Exp,
    Log,
    Sqrt,
    Sin,
    Cos,
}

impl Func {
    fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
            Func::Sin => "sin",
            Func::Cos => "cos",
        }
    }

    fn apply(self, v: f64) -> f64 {
        match self {
            Func::Exp => v.exp(),
            Func::Log => v.ln(),
            Func::Sqrt => v.sqrt(),
            Func::Sin => v.sin(),
            Func::Cos => v.cos(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(f64),
    Var(usize),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

impl Expr {
    /// Parses `src` with variables named by `vars` (index = position).
    pub fn parse(src: &str, vars: &[&str]) -> Result<Expr> {
        let tokens = tokenize(src)?;
        let mut p = Parser { tokens, pos: 0, vars, src_len: src.len() };
        let e = p.expr()?;
        if p.pos < p.tokens.len() {
            return Err(Error::Parse {
                position: p.tokens[p.pos].offset,
                message: format!("unexpected token {:?}", p.tokens[p.pos].kind),
            });
        }
        Ok(e)
    }

    pub fn eval(&self, vars: &[f64]) -> f64 {
        match self {
            Expr::Const(c) => *c,
            Expr::Var(i) => vars[*i],
            Expr::Neg(a) => -a.eval(vars),
            Expr::Add(a, b) => a.eval(vars) + b.eval(vars),
            Expr::Sub(a, b) => a.eval(vars) - b.eval(vars),
            Expr::Mul(a, b) => a.eval(vars) * b.eval(vars),
            Expr::Div(a, b) => a.eval(vars) / b.eval(vars),
            Expr::Pow(a, b) => {
                let base = a.eval(vars);
                match b.as_ref() {
                    Expr::Const(c) if c.fract() == 0.0 && c.abs() < 1024.0 => base.powi(*c as i32),
                    _ => base.powf(b.eval(vars)),
                }
            }
            Expr::Call(f, a) => f.apply(a.eval(vars)),
        }
    }

    /// Highest variable index referenced plus one.
    pub fn arity(&self) -> usize {
        match self {
            Expr::Const(_) => 0,
            Expr::Var(i) => i + 1,
            Expr::Neg(a) | Expr::Call(_, a) => a.arity(),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) | Expr::Pow(a, b) => {
                a.arity().max(b.arity())
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Expr::Const(c) if *c == 0.0)
    }

    /// Symbolic partial derivative with respect to variable `var`.
    pub fn diff(&self, var: usize) -> Expr {
        match self {
            Expr::Const(_) => Expr::Const(0.0),
            Expr::Var(i) => Expr::Const(if *i == var { 1.0 } else { 0.0 }),
            Expr::Neg(a) => neg(a.diff(var)),
            Expr::Add(a, b) => add(a.diff(var), b.diff(var)),
            Expr::Sub(a, b) => sub(a.diff(var), b.diff(var)),
            Expr::Mul(a, b) => add(mul(a.diff(var), (**b).clone()), mul((**a).clone(), b.diff(var))),
            Expr::Div(a, b) => div(
                sub(mul(a.diff(var), (**b).clone()), mul((**a).clone(), b.diff(var))),
                pow((**b).clone(), Expr::Const(2.0)),
            ),
            Expr::Pow(a, b) => {
                let da = a.diff(var);
                let db = b.diff(var);
                if db.is_zero() {
                    // d(a^b) = b a^(b-1) a'
                    mul(mul((**b).clone(), pow((**a).clone(), sub((**b).clone(), Expr::Const(1.0)))), da)
                } else {
                    // d(a^b) = a^b (b' ln a + b a'/a)
                    mul(
                        self.clone(),
                        add(mul(db, call(Func::Log, (**a).clone())), div(mul((**b).clone(), da), (**a).clone())),
                    )
                }
            }
            Expr::Call(f, a) => {
                let da = a.diff(var);
                if da.is_zero() {
                    return Expr::Const(0.0);
                }
                let inner = (**a).clone();
                let outer = match f {
                    Func::Exp => call(Func::Exp, inner),
                    Func::Log => div(Expr::Const(1.0), inner),
                    Func::Sqrt => div(Expr::Const(0.5), call(Func::Sqrt, inner)),
                    Func::Sin => call(Func::Cos, inner),
                    Func::Cos => neg(call(Func::Sin, inner)),
                };
                mul(outer, da)
            }
        }
    }

    /// Mixed partial derivative: `counts[j]` derivatives in variable `j`.
    pub fn partial(&self, counts: &[usize]) -> Expr {
        let mut e = self.clone();
        for (var, &k) in counts.iter().enumerate() {
            for _ in 0..k {
                e = e.diff(var);
            }
        }
        e
    }
}

fn neg(a: Expr) -> Expr {
    match a {
        Expr::Const(c) => Expr::Const(-c),
        Expr::Neg(inner) => *inner,
        other => Expr::Neg(Box::new(other)),
    }
}

fn add(a: Expr, b: Expr) -> Expr {
    match (a, b) {
        (Expr::Const(x), Expr::Const(y)) => Expr::Const(x + y),
        (Expr::Const(z), e) | (e, Expr::Const(z)) if z == 0.0 => e,
        (a, Expr::Neg(b)) => sub(a, *b),
        (a, b) => Expr::Add(Box::new(a), Box::new(b)),
    }
}

fn sub(a: Expr, b: Expr) -> Expr {
    match (a, b) {
        (Expr::Const(x), Expr::Const(y)) => Expr::Const(x - y),
        (e, Expr::Const(z)) if z == 0.0 => e,
        (Expr::Const(z), e) if z == 0.0 => neg(e),
        (a, b) => Expr::Sub(Box::new(a), Box::new(b)),
    }
}

fn mul(a: Expr, b: Expr) -> Expr {
    match (a, b) {
        (Expr::Const(x), Expr::Const(y)) => Expr::Const(x * y),
        (Expr::Const(z), _) | (_, Expr::Const(z)) if z == 0.0 => Expr::Const(0.0),
        (Expr::Const(o), e) | (e, Expr::Const(o)) if o == 1.0 => e,
        (Expr::Const(m), e) | (e, Expr::Const(m)) if m == -1.0 => neg(e),
        (Expr::Const(x), Expr::Mul(c, e)) if matches!(*c, Expr::Const(_)) => {
            let Expr::Const(y) = *c else { unreachable!() };
            mul(Expr::Const(x * y), *e)
        }
        (e, c @ Expr::Const(_)) => Expr::Mul(Box::new(c), Box::new(e)),
        (a, b) => Expr::Mul(Box::new(a), Box::new(b)),
    }
}

fn div(a: Expr, b: Expr) -> Expr {
    match (a, b) {
        (Expr::Const(z), _) if z == 0.0 => Expr::Const(0.0),
        (e, Expr::Const(o)) if o == 1.0 => e,
        (Expr::Const(x), Expr::Const(y)) => Expr::Const(x / y),
        (a, b) => Expr::Div(Box::new(a), Box::new(b)),
    }
}

fn pow(a: Expr, b: Expr) -> Expr {
    match (a, b) {
        (_, Expr::Const(z)) if z == 0.0 => Expr::Const(1.0),
        (e, Expr::Const(o)) if o == 1.0 => e,
        (Expr::Const(x), Expr::Const(y)) => Expr::Const(x.powf(y)),
        (a, b) => Expr::Pow(Box::new(a), Box::new(b)),
    }
}

fn call(f: Func, a: Expr) -> Expr {
    match a {
        Expr::Const(c) => Expr::Const(f.apply(c)),
        other => Expr::Call(f, Box::new(other)),
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(c) => write!(f, "{c}"),
            Expr::Var(i) => write!(f, "v{}", i + 1),
            Expr::Neg(a) => write!(f, "(-{a})"),
            Expr::Add(a, b) => write!(f, "({a} + {b})"),
            Expr::Sub(a, b) => write!(f, "({a} - {b})"),
            Expr::Mul(a, b) => write!(f, "({a} * {b})"),
            Expr::Div(a, b) => write!(f, "({a} / {b})"),
            Expr::Pow(a, b) => write!(f, "({a}^{b})"),
            Expr::Call(func, a) => write!(f, "{}({a})", func.name()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum TokenKind {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

#[derive(Debug, Clone)]
struct Token {
    kind: TokenKind,
    offset: usize,
}

fn tokenize(src: &str) -> Result<Vec<Token>> {
    let mut out = Vec::new();
    let mut chars = src.char_indices().peekable();
    while let Some(&(i, c)) = chars.peek() {
        let kind = match c {
            c if c.is_whitespace() => {
                chars.next();
                continue;
            }
            '+' => TokenKind::Plus,
            '-' | '−' => TokenKind::Minus,
            '*' | '·' => TokenKind::Star,
            '/' => TokenKind::Slash,
            '^' => TokenKind::Caret,
            '(' => TokenKind::LParen,
            ')' => TokenKind::RParen,
            c if c.is_ascii_digit() || c == '.' => {
                let mut end = i;
                let mut prev = ' ';
                while let Some(&(j, d)) = chars.peek() {
                    let exp_sign = (d == '+' || d == '-') && (prev == 'e' || prev == 'E');
                    if d.is_ascii_digit() || d == '.' || d == 'e' || d == 'E' || exp_sign {
                        end = j + d.len_utf8();
                        prev = d;
                        chars.next();
                    } else {
                        break;
                    }
                }
                let text = &src[i..end];
                let v: f64 = text
                    .parse()
                    .map_err(|_| Error::Parse { position: i, message: format!("bad number literal '{text}'") })?;
                out.push(Token { kind: TokenKind::Num(v), offset: i });
                continue;
            }
            c if c.is_alphabetic() || c == '_' => {
                let mut end = i;
                while let Some(&(j, d)) = chars.peek() {
                    if d.is_alphanumeric() || d == '_' {
                        end = j + d.len_utf8();
                        chars.next();
                    } else {
                        break;
                    }
                }
                out.push(Token { kind: TokenKind::Ident(src[i..end].to_string()), offset: i });
                continue;
            }
            other => return Err(Error::Parse { position: i, message: format!("unexpected character '{other}'") }),
        };
        chars.next();
        out.push(Token { kind, offset: i });
    }
    Ok(out)
}

struct Parser<'a> {
    tokens: Vec<Token>,
    pos: usize,
    vars: &'a [&'a str],
    src_len: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&TokenKind> {
        self.tokens.get(self.pos).map(|t| &t.kind)
    }

    fn offset(&self) -> usize {
        self.tokens.get(self.pos).map_or(self.src_len, |t| t.offset)
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T> {
        Err(Error::Parse { position: self.offset(), message: message.into() })
    }

    fn expect(&mut self, kind: TokenKind) -> Result<()> {
        if self.peek() == Some(&kind) {
            self.pos += 1;
            Ok(())
        } else {
            self.err(format!("expected {kind:?}"))
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Some(TokenKind::Plus) => {
                    self.pos += 1;
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Some(TokenKind::Minus) => {
                    self.pos += 1;
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek() {
                Some(TokenKind::Star) => {
                    self.pos += 1;
                    lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
                }
                Some(TokenKind::Slash) => {
                    self.pos += 1;
                    lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.peek() == Some(&TokenKind::Minus) {
            self.pos += 1;
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if self.peek() == Some(&TokenKind::Caret) {
            self.pos += 1;
            let exponent = self.unary()?;
            return Ok(Expr::Pow(Box::new(base), Box::new(exponent)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.peek().cloned() {
            Some(TokenKind::Num(v)) => {
                self.pos += 1;
                Ok(Expr::Const(v))
            }
            Some(TokenKind::LParen) => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(TokenKind::RParen)?;
                Ok(e)
            }
            Some(TokenKind::Ident(name)) => {
                let func = match name.as_str() {
                    "exp" => Some(Func::Exp),
                    "log" | "ln" => Some(Func::Log),
                    "sqrt" => Some(Func::Sqrt),
                    "sin" => Some(Func::Sin),
                    "cos" => Some(Func::Cos),
                    _ => None,
                };
                if let Some(func) = func {
                    self.pos += 1;
                    self.expect(TokenKind::LParen)?;
                    let arg = self.expr()?;
                    self.expect(TokenKind::RParen)?;
                    return Ok(Expr::Call(func, Box::new(arg)));
                }
                if let Some(idx) = self.vars.iter().position(|v| *v == name) {
                    self.pos += 1;
                    return Ok(Expr::Var(idx));
                }
                match name.as_str() {
                    "pi" => {
                        self.pos += 1;
                        Ok(Expr::Const(std::f64::consts::PI))
                    }
                    "e" => {
                        self.pos += 1;
                        Ok(Expr::Const(std::f64::consts::E))
                    }
                    _ => self.err(format!("unknown identifier '{name}' (variables: {:?})", self.vars)),
                }
            }
            Some(other) => self.err(format!("unexpected token {other:?}")),
            None => self.err("unexpected end of expression"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(src: &str) -> Expr {
        Expr::parse(src, &["t"]).unwrap()
    }

    #[test]
    fn precedence_and_associativity() {
        assert_eq!(p("1 + 2 * 3").eval(&[0.0]), 7.0);
        assert_eq!(p("2^3^2").eval(&[0.0]), 512.0);
        assert_eq!(p("-t^2").eval(&[3.0]), -9.0);
        assert_eq!(p("(1 - t) / 2").eval(&[3.0]), -1.0);
        assert!((p("exp(log(t))").eval(&[2.5]) - 2.5).abs() < 1e-15);
        assert!((p("1.5e-1 * 2").eval(&[0.0]) - 0.3).abs() < 1e-15);
        assert!((p("cos(pi)").eval(&[0.0]) + 1.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_garbage() {
        assert!(Expr::parse("t +", &["t"]).is_err());
        assert!(Expr::parse("q * 2", &["t"]).is_err());
        assert!(Expr::parse("(t", &["t"]).is_err());
        assert!(Expr::parse("t $ 2", &["t"]).is_err());
        assert!(Expr::parse("t t", &["t"]).is_err());
    }

    #[test]
    fn derivatives_of_closed_forms() {
        // d/dt log(1 + e^t) = e^t / (1 + e^t)
        let phi = p("log(1 + exp(t))");
        let d = phi.diff(0);
        let t = 0.3_f64;
        assert!((d.eval(&[t]) - t.exp() / (1.0 + t.exp())).abs() < 1e-15);
        let d2 = d.diff(0);
        assert!((d2.eval(&[t]) - t.exp() / (1.0 + t.exp()).powi(2)).abs() < 1e-15);
    }

    #[test]
    fn polynomial_third_derivative_folds_to_zero() {
        let f = p("t^2");
        assert!(f.partial(&[3]).is_zero());
        assert_eq!(f.partial(&[2]), Expr::Const(2.0));
    }

    #[test]
    fn multivariate_partials() {
        let f = Expr::parse("s^2 * t^3", &["s", "t"]).unwrap();
        let fst = f.partial(&[1, 1]);
        assert!((fst.eval(&[2.0, 3.0]) - 2.0 * 2.0 * 3.0 * 9.0).abs() < 1e-12);
        assert_eq!(f.arity(), 2);
    }

    #[test]
    fn general_power_rule() {
        let f = p("t^t");
        let t = 1.7_f64;
        let expected = t.powf(t) * (t.ln() + 1.0);
        assert!((f.diff(0).eval(&[t]) - expected).abs() < 1e-13);
    }
}
