//! Scalar expressions in config values (`pi/3`, `-2.5e-1`, `20*pi`) and
//! control signals (`cos(20*pi*t)`, `0.5*sin(2*pi*t + pi/4)`).

use std::f64::consts::PI;

use crate::control::{Signal, Wave};

/// A parse failure at a character offset within the parsed text.
#[derive(Debug, Clone, PartialEq)]
pub struct ExprError {
    pub offset: usize,
    pub message: String,
}

impl ExprError {
    fn new(offset: usize, message: impl Into<String>) -> Self {
        Self {
            offset,
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Func {
    Sin,
    Cos,
    Sqrt,
}

#[derive(Debug, Clone, PartialEq)]
enum Expr {
    Num(f64),
    T,
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

impl Expr {
    fn eval(&self, t: f64) -> f64 {
        match self {
            Expr::Num(x) => *x,
            Expr::T => t,
            Expr::Neg(a) => -a.eval(t),
            Expr::Add(a, b) => a.eval(t) + b.eval(t),
            Expr::Sub(a, b) => a.eval(t) - b.eval(t),
            Expr::Mul(a, b) => a.eval(t) * b.eval(t),
            Expr::Div(a, b) => a.eval(t) / b.eval(t),
            Expr::Call(f, a) => {
                let x = a.eval(t);
                match f {
                    Func::Sin => x.sin(),
                    Func::Cos => x.cos(),
                    Func::Sqrt => x.sqrt(),
                }
            }
        }
    }

    fn has_t(&self) -> bool {
        match self {
            Expr::Num(_) => false,
            Expr::T => true,
            Expr::Neg(a) | Expr::Call(_, a) => a.has_t(),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => a.has_t() || b.has_t(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
}

fn tokenize(src: &str) -> Result<Vec<(usize, Tok)>, ExprError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    i = j;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let text: String = chars[start..i].iter().collect();
            let value = text
                .parse::<f64>()
                .map_err(|_| ExprError::new(start, format!("invalid number '{text}'")))?;
            out.push((start, Tok::Num(value)));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push((start, Tok::Ident(chars[start..i].iter().collect())));
        } else if "+-*/()".contains(c) {
            out.push((i, Tok::Op(c)));
            i += 1;
        } else {
            return Err(ExprError::new(i, format!("unexpected character '{c}'")));
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
    allow_t: bool,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map(|(o, _)| *o).unwrap_or(self.end)
    }

    fn eat(&mut self, op: char) -> bool {
        if self.peek() == Some(&Tok::Op(op)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Expr, ExprError> {
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

    fn term(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat('*') {
                lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
            } else if self.eat('/') {
                lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, ExprError> {
        if self.eat('-') {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        if self.eat('+') {
            return self.unary();
        }
        self.primary()
    }

    fn primary(&mut self) -> Result<Expr, ExprError> {
        let at = self.offset();
        match self.peek().cloned() {
            Some(Tok::Num(x)) => {
                self.pos += 1;
                Ok(Expr::Num(x))
            }
            Some(Tok::Op('(')) => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(')') {
                    return Err(ExprError::new(self.offset(), "expected ')'"));
                }
                Ok(e)
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                match name.as_str() {
                    "pi" => Ok(Expr::Num(PI)),
                    "t" if self.allow_t => Ok(Expr::T),
                    "t" => Err(ExprError::new(at, "'t' is only allowed in control signals")),
                    "sin" | "cos" | "sqrt" => {
                        let f = match name.as_str() {
                            "sin" => Func::Sin,
                            "cos" => Func::Cos,
                            _ => Func::Sqrt,
                        };
                        if !self.eat('(') {
                            return Err(ExprError::new(self.offset(), format!("expected '(' after {name}")));
                        }
                        let arg = self.expr()?;
                        if !self.eat(')') {
                            return Err(ExprError::new(self.offset(), "expected ')'"));
                        }
                        Ok(Expr::Call(f, Box::new(arg)))
                    }
                    other => Err(ExprError::new(at, format!("unknown identifier '{other}'"))),
                }
            }
            Some(Tok::Op(c)) => Err(ExprError::new(at, format!("unexpected '{c}'"))),
            None => Err(ExprError::new(at, "unexpected end of expression")),
        }
    }
}

fn parse(src: &str, allow_t: bool) -> Result<Expr, ExprError> {
    let toks = tokenize(src)?;
    let mut p = Parser {
        toks,
        pos: 0,
        end: src.chars().count(),
        allow_t,
    };
    let e = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(ExprError::new(p.offset(), "unexpected trailing input"));
    }
    Ok(e)
}

/// Evaluates a constant scalar expression.
pub fn parse_scalar(src: &str) -> Result<f64, ExprError> {
    let value = parse(src, false)?.eval(0.0);
    if !value.is_finite() {
        return Err(ExprError::new(0, format!("expression '{}' is not finite", src.trim())));
    }
    Ok(value)
}

/// Reads `arg` as `omega * t + phase`, rejecting anything not affine in `t`.
fn affine_in_t(arg: &Expr, offset: usize) -> Result<(f64, f64), ExprError> {
    let phase = arg.eval(0.0);
    let omega = arg.eval(1.0) - phase;
    for t in [0.5, 2.0, -3.0] {
        let expected = omega * t + phase;
        if (arg.eval(t) - expected).abs() > 1e-9 * (1.0 + expected.abs()) {
            return Err(ExprError::new(offset, "sinusoid argument must be affine in t"));
        }
    }
    Ok((omega, phase))
}

fn sinusoid(e: &Expr, amplitude: f64, offset: usize) -> Option<Result<Signal, ExprError>> {
    match e {
        Expr::Call(f @ (Func::Sin | Func::Cos), arg) => {
            Some(affine_in_t(arg, offset).map(|(omega, phase)| Signal::Sinusoid {
                wave: if *f == Func::Sin { Wave::Sin } else { Wave::Cos },
                amplitude,
                omega,
                phase,
            }))
        }
        Expr::Neg(inner) => sinusoid(inner, -amplitude, offset),
        Expr::Mul(a, b) if !a.has_t() => sinusoid(b, amplitude * a.eval(0.0), offset),
        Expr::Mul(a, b) if !b.has_t() => sinusoid(a, amplitude * b.eval(0.0), offset),
        _ => None,
    }
}

/// Parses `zero`, `constant(A)`, a constant expression, or a scaled
/// sinusoid `A*sin(w*t + phase)` / `A*cos(...)` with `w` in rad/s.
pub fn parse_signal(src: &str) -> Result<Signal, ExprError> {
    let trimmed = src.trim();
    let lead = src.len() - src.trim_start().len();
    let lead = src[..lead].chars().count();
    if trimmed == "zero" {
        return Ok(Signal::Zero);
    }
    if let Some(inner) = trimmed.strip_prefix("constant(").and_then(|s| s.strip_suffix(')')) {
        let at = lead + "constant(".len();
        return parse_scalar(inner)
            .map(Signal::Constant)
            .map_err(|e| ExprError::new(at + e.offset, e.message));
    }
    let e = parse(src, true)?;
    if !e.has_t() {
        let v = e.eval(0.0);
        return if v.is_finite() {
            Ok(Signal::Constant(v))
        } else {
            Err(ExprError::new(lead, "signal value is not finite"))
        };
    }
    sinusoid(&e, 1.0, lead).unwrap_or_else(|| {
        Err(ExprError::new(
            lead,
            "unsupported signal (expected zero, constant(A) or A*sin(w*t + phase) / A*cos(w*t + phase))",
        ))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scalars() {
        assert_eq!(parse_scalar("2.5").unwrap(), 2.5);
        assert_eq!(parse_scalar("-1e-2").unwrap(), -0.01);
        assert_eq!(parse_scalar("pi/2").unwrap(), PI / 2.0);
        assert_eq!(parse_scalar(" -pi / 3 ").unwrap(), -PI / 3.0);
        assert_eq!(parse_scalar("2*(1+3)").unwrap(), 8.0);
        assert_eq!(parse_scalar("1 - 2 - 3").unwrap(), -4.0);
        assert_eq!(parse_scalar("8/2/2").unwrap(), 2.0);
        assert!((parse_scalar("sqrt(2)").unwrap() - 2f64.sqrt()).abs() < 1e-16);
    }

    #[test]
    fn scalar_errors_carry_offsets() {
        assert_eq!(parse_scalar("1 + ").unwrap_err().offset, 4);
        assert_eq!(parse_scalar("2 * foo").unwrap_err().offset, 4);
        assert_eq!(parse_scalar("t").unwrap_err().offset, 0);
        assert_eq!(parse_scalar("(1").unwrap_err().offset, 2);
        assert_eq!(parse_scalar("1 2").unwrap_err().offset, 2);
        assert!(parse_scalar("1/0").is_err());
        assert_eq!(parse_scalar("3 $").unwrap_err().offset, 2);
    }

    #[test]
    fn figure_three_signals() {
        match parse_signal("cos(20*pi*t)").unwrap() {
            Signal::Sinusoid {
                wave: Wave::Cos,
                amplitude,
                omega,
                phase,
            } => {
                assert_eq!(amplitude, 1.0);
                assert!((omega - 20.0 * PI).abs() < 1e-12);
                assert_eq!(phase, 0.0);
            }
            other => panic!("{other:?}"),
        }
        match parse_signal("-0.5*sin(2*pi*t + pi/4)").unwrap() {
            Signal::Sinusoid {
                wave: Wave::Sin,
                amplitude,
                phase,
                ..
            } => {
                assert_eq!(amplitude, -0.5);
                assert!((phase - PI / 4.0).abs() < 1e-15);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn other_signals() {
        assert_eq!(parse_signal(" zero ").unwrap(), Signal::Zero);
        assert_eq!(parse_signal("constant(2)").unwrap(), Signal::Constant(2.0));
        assert_eq!(parse_signal("pi").unwrap(), Signal::Constant(PI));
        assert!(parse_signal("sin(t*t)").is_err());
        assert!(parse_signal("t").is_err());
        assert_eq!(parse_signal("constant(1 +)").unwrap_err().offset, 12);
    }
}
