//! Expression language for scalar fields and its second-order forward-mode
//! evaluation.
//!
//! Grammar (whitespace ignored):
//!
//! ```text
//! expr  := term (("+" | "-") term)*
//! term  := unary (("*" | "/") unary)*
//! unary := "-" unary | power
//! power := atom ("^" unary)?
//! atom  := number | "x" index | name "(" args ")" | "(" expr ")"
//! ```
//!
//! Functions: `abs`, `sqrt`, `exp`, `norm`, `normsq`, `max`, `smax`, `pos`.
//! `norm(x)` and `normsq(x)` act on the whole coordinate vector; with
//! expression arguments they act on those. `pos` is the quintic smoothing of
//! `max(u, 0)` with width [`SMOOTHING_WIDTH`] and `smax(a, b)` is
//! `(a + b + pos(a − b) + pos(b − a)) / 2`.

use nalgebra::{DMatrix, DVector};

use crate::{Error, Result};

/// Width of the quintic smoothing used by `pos` and `smax`.
pub const SMOOTHING_WIDTH: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    Var(usize),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, f64),
    Abs(Box<Expr>),
    Sqrt(Box<Expr>),
    Exp(Box<Expr>),
    NormSq(Vec<Expr>),
    Max(Vec<Expr>),
    Smax(Box<Expr>, Box<Expr>),
    Pos(Box<Expr>),
}

/// `q(u) = w·(2t³ − 2t⁴ + 0.6t⁵)` with `t = u/w` on `[0, w]`, `u − 0.4w`
/// beyond. C², convex, and equal to `max(u, 0)` up to a shift of `0.4w`.
pub fn smooth_pos(u: f64) -> (f64, f64, f64) {
    let w = SMOOTHING_WIDTH;
    if u <= 0.0 {
        (0.0, 0.0, 0.0)
    } else if u >= w {
        (u - 0.4 * w, 1.0, 0.0)
    } else {
        let t = u / w;
        let v = w * t.powi(3) * (2.0 - 2.0 * t + 0.6 * t * t);
        let d1 = t * t * (6.0 - 8.0 * t + 3.0 * t * t);
        let d2 = 12.0 * t * (1.0 - t).powi(2) / w;
        (v, d1, d2)
    }
}

fn parse_err(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

impl Expr {
    /// Parses `src` as a function of `x1 … x_dim`.
    pub fn parse(src: &str, dim: usize) -> Result<Expr> {
        let mut p = Parser { s: src.as_bytes(), i: 0, dim };
        let e = p.expr()?;
        p.skip_ws();
        if p.i != p.s.len() {
            return Err(parse_err(format!("unexpected `{}` at offset {}", p.s[p.i] as char, p.i)));
        }
        Ok(e)
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            Expr::Num(c) => *c,
            Expr::Var(i) => x[*i],
            Expr::Neg(a) => -a.eval(x),
            Expr::Add(a, b) => a.eval(x) + b.eval(x),
            Expr::Sub(a, b) => a.eval(x) - b.eval(x),
            Expr::Mul(a, b) => a.eval(x) * b.eval(x),
            Expr::Div(a, b) => a.eval(x) / b.eval(x),
            Expr::Pow(a, k) => pow(a.eval(x), *k),
            Expr::Abs(a) => a.eval(x).abs(),
            Expr::Sqrt(a) => a.eval(x).sqrt(),
            Expr::Exp(a) => a.eval(x).exp(),
            Expr::NormSq(args) => args.iter().map(|a| a.eval(x).powi(2)).sum(),
            Expr::Max(args) => args.iter().map(|a| a.eval(x)).fold(f64::NEG_INFINITY, f64::max),
            Expr::Smax(a, b) => {
                let (a, b) = (a.eval(x), b.eval(x));
                0.5 * (a + b + smooth_pos(a - b).0 + smooth_pos(b - a).0)
            }
            Expr::Pos(a) => smooth_pos(a.eval(x)).0,
        }
    }

    /// Value, gradient and Hessian at `x`.
    pub fn jet(&self, x: &[f64]) -> Jet {
        let mut margin = f64::INFINITY;
        self.jet_tracked(x, &mut margin)
    }

    /// Like [`Expr::jet`], also lowering `margin` to the distance (to first
    /// order) from `x` to the nearest point where some branch switches or the
    /// smoothing band begins or ends.
    pub fn jet_tracked(&self, x: &[f64], margin: &mut f64) -> Jet {
        let n = x.len();
        match self {
            Expr::Num(c) => Jet::constant(*c, n),
            Expr::Var(i) => Jet::variable(x[*i], *i, n),
            Expr::Neg(a) => a.jet_tracked(x, margin).scale(-1.0),
            Expr::Add(a, b) => a.jet_tracked(x, margin).add(&b.jet_tracked(x, margin), 1.0),
            Expr::Sub(a, b) => a.jet_tracked(x, margin).add(&b.jet_tracked(x, margin), -1.0),
            Expr::Mul(a, b) => a.jet_tracked(x, margin).mul(&b.jet_tracked(x, margin)),
            Expr::Div(a, b) => {
                let d = b.jet_tracked(x, margin);
                let v = d.v;
                a.jet_tracked(x, margin).mul(&d.chain(1.0 / v, -1.0 / (v * v), 2.0 / (v * v * v)))
            }
            Expr::Pow(a, k) => {
                let j = a.jet_tracked(x, margin);
                let u = j.v;
                let d1 = if *k == 0.0 { 0.0 } else { k * pow(u, k - 1.0) };
                let d2 = if *k == 0.0 || *k == 1.0 { 0.0 } else { k * (k - 1.0) * pow(u, k - 2.0) };
                j.chain(pow(u, *k), d1, d2)
            }
            Expr::Abs(a) => {
                let j = a.jet_tracked(x, margin);
                track(margin, j.v.abs(), &j);
                let s = if j.v < 0.0 { -1.0 } else { 1.0 };
                j.scale(s)
            }
            Expr::Sqrt(a) => {
                let j = a.jet_tracked(x, margin);
                let r = j.v.sqrt();
                j.chain(r, 0.5 / r, -0.25 / (r * j.v))
            }
            Expr::Exp(a) => {
                let j = a.jet_tracked(x, margin);
                let e = j.v.exp();
                j.chain(e, e, e)
            }
            Expr::NormSq(args) => args.iter().fold(Jet::constant(0.0, n), |acc, a| {
                let j = a.jet_tracked(x, margin);
                acc.add(&j.mul(&j), 1.0)
            }),
            Expr::Max(args) => {
                let jets: Vec<Jet> = args.iter().map(|a| a.jet_tracked(x, margin)).collect();
                let best = jets.iter().enumerate().max_by(|a, b| a.1.v.total_cmp(&b.1.v)).map(|(i, _)| i).unwrap_or(0);
                for (i, j) in jets.iter().enumerate() {
                    if i != best {
                        let gap = jets[best].add(j, -1.0);
                        track(margin, gap.v, &gap);
                    }
                }
                jets.into_iter().nth(best).unwrap_or_else(|| Jet::constant(f64::NAN, n))
            }
            Expr::Smax(a, b) => {
                let (ja, jb) = (a.jet_tracked(x, margin), b.jet_tracked(x, margin));
                let d = ja.add(&jb, -1.0);
                let p = pos_jet(&d, margin).add(&pos_jet(&d.scale(-1.0), margin), 1.0);
                ja.add(&jb, 1.0).add(&p, 1.0).scale(0.5)
            }
            Expr::Pos(a) => {
                let j = a.jet_tracked(x, margin);
                pos_jet(&j, margin)
            }
        }
    }
}

fn pow(u: f64, k: f64) -> f64 {
    if k.fract() == 0.0 && k.abs() < 64.0 {
        u.powi(k as i32)
    } else {
        u.powf(k)
    }
}

fn pos_jet(j: &Jet, margin: &mut f64) -> Jet {
    let w = SMOOTHING_WIDTH;
    let gap = if j.v < 0.0 { -j.v } else if j.v > w { j.v - w } else { 0.0 };
    track(margin, gap, j);
    if j.v <= 0.0 {
        return Jet::constant(0.0, j.g.len());
    }
    let (f, d1, d2) = smooth_pos(j.v);
    j.chain(f, d1, d2)
}

fn track(margin: &mut f64, gap: f64, j: &Jet) {
    let g = j.g.norm();
    let m = if g > 0.0 { gap / g } else if gap > 0.0 { f64::INFINITY } else { 0.0 };
    *margin = margin.min(m);
}

/// Second-order jet of a scalar function of `n` variables.
#[derive(Debug, Clone, PartialEq)]
pub struct Jet {
    pub v: f64,
    pub g: DVector<f64>,
    pub h: DMatrix<f64>,
}

impl Jet {
    pub fn constant(v: f64, n: usize) -> Jet {
        Jet { v, g: DVector::zeros(n), h: DMatrix::zeros(n, n) }
    }

    pub fn variable(v: f64, i: usize, n: usize) -> Jet {
        let mut g = DVector::zeros(n);
        g[i] = 1.0;
        Jet { v, g, h: DMatrix::zeros(n, n) }
    }

    fn scale(&self, s: f64) -> Jet {
        Jet { v: s * self.v, g: &self.g * s, h: &self.h * s }
    }

    fn add(&self, o: &Jet, s: f64) -> Jet {
        Jet { v: self.v + s * o.v, g: &self.g + &o.g * s, h: &self.h + &o.h * s }
    }

    fn mul(&self, o: &Jet) -> Jet {
        let cross = &self.g * o.g.transpose();
        Jet {
            v: self.v * o.v,
            g: &o.g * self.v + &self.g * o.v,
            h: &o.h * self.v + &self.h * o.v + &cross + cross.transpose(),
        }
    }

    /// `φ ∘ self` given `φ`, `φ'`, `φ''` at `self.v`.
    fn chain(&self, f: f64, d1: f64, d2: f64) -> Jet {
        Jet { v: f, g: &self.g * d1, h: &self.h * d1 + (&self.g * self.g.transpose()) * d2 }
    }
}

struct Parser<'a> {
    s: &'a [u8],
    i: usize,
    dim: usize,
}

impl Parser<'_> {
    fn skip_ws(&mut self) {
        while self.i < self.s.len() && self.s[self.i].is_ascii_whitespace() {
            self.i += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.s.get(self.i).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.i += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(parse_err(format!("expected `{}` at offset {}", c as char, self.i)))
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut e = self.term()?;
        loop {
            if self.eat(b'+') {
                e = Expr::Add(Box::new(e), Box::new(self.term()?));
            } else if self.eat(b'-') {
                e = Expr::Sub(Box::new(e), Box::new(self.term()?));
            } else {
                return Ok(e);
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut e = self.unary()?;
        loop {
            if self.eat(b'*') {
                e = Expr::Mul(Box::new(e), Box::new(self.unary()?));
            } else if self.eat(b'/') {
                e = Expr::Div(Box::new(e), Box::new(self.unary()?));
            } else {
                return Ok(e);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.eat(b'-') {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        if self.eat(b'+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if !self.eat(b'^') {
            return Ok(base);
        }
        let at = self.i;
        let k = match self.unary()? {
            Expr::Num(k) => k,
            Expr::Neg(e) => match *e {
                Expr::Num(k) => -k,
                _ => return Err(parse_err(format!("exponent at offset {at} must be a number"))),
            },
            _ => return Err(parse_err(format!("exponent at offset {at} must be a number"))),
        };
        Ok(match base {
            // |v|^(2m) = (|v|²)^m keeps the jet finite at v = 0
            Expr::Sqrt(inner) if matches!(*inner, Expr::NormSq(_)) && k > 0.0 && k % 2.0 == 0.0 => {
                if k == 2.0 {
                    *inner
                } else {
                    Expr::Pow(inner, k / 2.0)
                }
            }
            b => Expr::Pow(Box::new(b), k),
        })
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.peek() {
            Some(b'(') => {
                self.i += 1;
                let e = self.expr()?;
                self.expect(b')')?;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.i;
                while self.i < self.s.len() && self.s[self.i].is_ascii_alphanumeric() {
                    self.i += 1;
                }
                let name = std::str::from_utf8(&self.s[start..self.i]).unwrap_or_default();
                if let Some(idx) = name.strip_prefix('x').and_then(|d| d.parse::<usize>().ok()) {
                    if idx == 0 || idx > self.dim {
                        return Err(parse_err(format!("variable {name} outside x1..x{}", self.dim)));
                    }
                    return Ok(Expr::Var(idx - 1));
                }
                self.call(name.to_string())
            }
            Some(c) => Err(parse_err(format!("unexpected `{}` at offset {}", c as char, self.i))),
            None => Err(parse_err("unexpected end of expression")),
        }
    }

    fn number(&mut self) -> Result<Expr> {
        let start = self.i;
        while self.i < self.s.len() && (self.s[self.i].is_ascii_digit() || self.s[self.i] == b'.') {
            self.i += 1;
        }
        if self.i < self.s.len() && matches!(self.s[self.i], b'e' | b'E') {
            let mark = self.i;
            self.i += 1;
            if self.i < self.s.len() && matches!(self.s[self.i], b'+' | b'-') {
                self.i += 1;
            }
            let digits = self.i;
            while self.i < self.s.len() && self.s[self.i].is_ascii_digit() {
                self.i += 1;
            }
            if self.i == digits {
                self.i = mark;
            }
        }
        let text = std::str::from_utf8(&self.s[start..self.i]).unwrap_or_default();
        text.parse::<f64>().map(Expr::Num).map_err(|_| parse_err(format!("bad number `{text}`")))
    }

    fn call(&mut self, name: String) -> Result<Expr> {
        self.expect(b'(')?;
        let whole = |dim: usize| (0..dim).map(Expr::Var).collect::<Vec<_>>();
        let mut args = Vec::new();
        let save = self.i;
        // `norm(x)` / `normsq(x)` mean the full coordinate vector
        if matches!(name.as_str(), "norm" | "normsq") && self.peek() == Some(b'x') {
            self.i += 1;
            if self.eat(b')') {
                let sq = Expr::NormSq(whole(self.dim));
                return Ok(if name == "norm" { Expr::Sqrt(Box::new(sq)) } else { sq });
            }
            self.i = save;
        }
        if !self.eat(b')') {
            loop {
                args.push(self.expr()?);
                if self.eat(b')') {
                    break;
                }
                self.expect(b',')?;
            }
        }
        let one = |mut args: Vec<Expr>| -> Result<Box<Expr>> {
            if args.len() == 1 {
                Ok(Box::new(args.remove(0)))
            } else {
                Err(parse_err(format!("{name} takes one argument, got {}", args.len())))
            }
        };
        match name.as_str() {
            "abs" => Ok(Expr::Abs(one(args)?)),
            "sqrt" => Ok(Expr::Sqrt(one(args)?)),
            "exp" => Ok(Expr::Exp(one(args)?)),
            "pos" => Ok(Expr::Pos(one(args)?)),
            "norm" | "normsq" => {
                if args.is_empty() {
                    return Err(parse_err(format!("{name} needs arguments")));
                }
                let sq = Expr::NormSq(args);
                Ok(if name == "norm" { Expr::Sqrt(Box::new(sq)) } else { sq })
            }
            "max" if !args.is_empty() => Ok(Expr::Max(args)),
            "smax" if args.len() == 2 => {
                let b = args.pop().map(Box::new);
                let a = args.pop().map(Box::new);
                match (a, b) {
                    (Some(a), Some(b)) => Ok(Expr::Smax(a, b)),
                    _ => Err(parse_err("smax takes two arguments")),
                }
            }
            "max" | "smax" => Err(parse_err(format!("wrong number of arguments to {name}"))),
            _ => Err(parse_err(format!("unknown function `{name}`"))),
        }
    }
}
