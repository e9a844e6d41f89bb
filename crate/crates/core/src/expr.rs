//! A small expression language for boundary functions.
//!
//! The grammar covers complex literals, the variable `z`, unary minus,
//! `conj`, `re`, `im`, the four arithmetic operators and integer powers.
//! Precedence from strongest to weakest: `^`, unary `-`, `*` `/`, `+` `-`;
//! binary operators associate to the left. Integer powers keep pole
//! analysis decidable, so there are no transcendental functions.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::{BoundaryGrid, BoundarySamples, Circle, CircleDomain};

/// Abstract syntax tree of a boundary function of `z`.
///
/// Division and power nodes carry the byte offset of their operator in the
/// source text (when parsed) so pole hits can be reported precisely.
#[derive(Clone, Debug)]
pub enum Expr {
    Const(Complex64),
    Var,
    Neg(Box<Expr>),
    Conj(Box<Expr>),
    Re(Box<Expr>),
    Im(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>, Option<usize>),
    Pow(Box<Expr>, i32, Option<usize>),
}

/// Structural equality, ignoring source offsets.
impl PartialEq for Expr {
    fn eq(&self, other: &Self) -> bool {
        use Expr::*;
        match (self, other) {
            (Const(a), Const(b)) => a == b,
            (Var, Var) => true,
            (Neg(a), Neg(b)) | (Conj(a), Conj(b)) | (Re(a), Re(b)) | (Im(a), Im(b)) => a == b,
            (Add(a, b), Add(c, d))
            | (Sub(a, b), Sub(c, d))
            | (Mul(a, b), Mul(c, d))
            | (Div(a, b, _), Div(c, d, _)) => a == c && b == d,
            (Pow(a, n, _), Pow(b, k, _)) => a == b && n == k,
            _ => false,
        }
    }
}

impl Expr {
    pub fn constant(v: Complex64) -> Self {
        Expr::Const(v)
    }

    pub fn var() -> Self {
        Expr::Var
    }

    /// Evaluates at a single point.
    pub fn eval_at(&self, z: Complex64) -> Result<Complex64> {
        match self {
            Expr::Const(c) => Ok(*c),
            Expr::Var => Ok(z),
            Expr::Neg(e) => Ok(-e.eval_at(z)?),
            Expr::Conj(e) => Ok(e.eval_at(z)?.conj()),
            Expr::Re(e) => Ok(Complex64::new(e.eval_at(z)?.re, 0.0)),
            Expr::Im(e) => Ok(Complex64::new(e.eval_at(z)?.im, 0.0)),
            Expr::Add(a, b) => Ok(a.eval_at(z)? + b.eval_at(z)?),
            Expr::Sub(a, b) => Ok(a.eval_at(z)? - b.eval_at(z)?),
            Expr::Mul(a, b) => Ok(a.eval_at(z)? * b.eval_at(z)?),
            Expr::Div(a, b, _) => {
                let den = b.eval_at(z)?;
                if den.norm() < 1e-14 {
                    return Err(Error::PoleAtEvaluationPoint {
                        point: z,
                        subexpr: self.to_string(),
                    });
                }
                Ok(a.eval_at(z)? / den)
            }
            Expr::Pow(e, k, _) => {
                let base = e.eval_at(z)?;
                if *k < 0 && base.norm() < 1e-14 {
                    return Err(Error::PoleAtEvaluationPoint {
                        point: z,
                        subexpr: self.to_string(),
                    });
                }
                Ok(base.powi(*k))
            }
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Add(..) | Expr::Sub(..) => 1,
            Expr::Mul(..) | Expr::Div(..) => 2,
            Expr::Neg(..) => 3,
            Expr::Pow(..) => 4,
            _ => 5,
        }
    }
}

/// Pointwise evaluation over a list of points.
pub fn eval_expr(e: &Expr, points: &[Complex64]) -> Result<Vec<Complex64>> {
    points.iter().map(|&z| e.eval_at(z)).collect()
}

/// Samples an expression on all grid nodes.
pub fn sample_boundary(e: &Expr, grid: &BoundaryGrid) -> Result<BoundarySamples> {
    let values = eval_expr(e, grid.nodes())?;
    BoundarySamples::from_values(grid, values)
}

impl std::fmt::Display for Expr {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        fn child(f: &mut std::fmt::Formatter<'_>, e: &Expr, min: u8) -> std::fmt::Result {
            if e.precedence() < min {
                write!(f, "(")?;
                write!(f, "{e}")?;
                write!(f, ")")
            } else {
                write!(f, "{e}")
            }
        }
        match self {
            Expr::Const(c) => {
                if c.im == 0.0 && c.re >= 0.0 {
                    write!(f, "{}", c.re)
                } else if c.re == 0.0 && c.im >= 0.0 {
                    if c.im == 1.0 {
                        write!(f, "i")
                    } else {
                        write!(f, "{}i", c.im)
                    }
                } else {
                    // General literals print as a parenthesized sum; this
                    // reparses to the same value, not the same tree.
                    if c.im >= 0.0 {
                        write!(f, "({}+{}i)", c.re, c.im)
                    } else {
                        write!(f, "({}-{}i)", c.re, -c.im)
                    }
                }
            }
            Expr::Var => write!(f, "z"),
            Expr::Neg(e) => {
                write!(f, "-")?;
                child(f, e, 3)
            }
            Expr::Conj(e) => write!(f, "conj({e})"),
            Expr::Re(e) => write!(f, "re({e})"),
            Expr::Im(e) => write!(f, "im({e})"),
            Expr::Add(a, b) => {
                child(f, a, 1)?;
                write!(f, "+")?;
                child(f, b, 2)
            }
            Expr::Sub(a, b) => {
                child(f, a, 1)?;
                write!(f, "-")?;
                child(f, b, 2)
            }
            Expr::Mul(a, b) => {
                child(f, a, 2)?;
                write!(f, "*")?;
                child(f, b, 3)
            }
            Expr::Div(a, b, _) => {
                child(f, a, 2)?;
                write!(f, "/")?;
                child(f, b, 3)
            }
            Expr::Pow(e, k, _) => {
                child(f, e, 5)?;
                write!(f, "^{k}")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(f64, bool), // value, imaginary-unit suffix
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

struct Lexer<'a> {
    text: &'a str,
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn new(text: &'a str) -> Self {
        Self {
            text,
            bytes: text.as_bytes(),
            pos: 0,
        }
    }

    fn tokens(mut self) -> Result<Vec<(Tok, usize)>> {
        let mut out = Vec::new();
        while self.pos < self.bytes.len() {
            let b = self.bytes[self.pos];
            let start = self.pos;
            match b {
                b' ' | b'\t' | b'\n' | b'\r' => {
                    self.pos += 1;
                }
                b'+' => {
                    out.push((Tok::Plus, start));
                    self.pos += 1;
                }
                b'-' => {
                    out.push((Tok::Minus, start));
                    self.pos += 1;
                }
                b'*' => {
                    out.push((Tok::Star, start));
                    self.pos += 1;
                }
                b'/' => {
                    out.push((Tok::Slash, start));
                    self.pos += 1;
                }
                b'^' => {
                    out.push((Tok::Caret, start));
                    self.pos += 1;
                }
                b'(' => {
                    out.push((Tok::LParen, start));
                    self.pos += 1;
                }
                b')' => {
                    out.push((Tok::RParen, start));
                    self.pos += 1;
                }
                b'0'..=b'9' | b'.' => {
                    out.push((self.number(start)?, start));
                }
                _ if b.is_ascii_alphabetic() || b == b'_' => {
                    let mut end = self.pos;
                    while end < self.bytes.len()
                        && (self.bytes[end].is_ascii_alphanumeric() || self.bytes[end] == b'_')
                    {
                        end += 1;
                    }
                    out.push((Tok::Ident(self.text[start..end].to_string()), start));
                    self.pos = end;
                }
                _ => {
                    return Err(Error::SyntaxError {
                        offset: start,
                        message: format!("unexpected character `{}`", &self.text[start..start + 1]),
                    });
                }
            }
        }
        Ok(out)
    }

    fn number(&mut self, start: usize) -> Result<Tok> {
        let mut end = self.pos;
        while end < self.bytes.len() && self.bytes[end].is_ascii_digit() {
            end += 1;
        }
        if end < self.bytes.len() && self.bytes[end] == b'.' {
            end += 1;
            while end < self.bytes.len() && self.bytes[end].is_ascii_digit() {
                end += 1;
            }
        }
        // Exponent, only when followed by a digit (optionally signed).
        if end < self.bytes.len() && (self.bytes[end] == b'e' || self.bytes[end] == b'E') {
            let mut probe = end + 1;
            if probe < self.bytes.len() && (self.bytes[probe] == b'+' || self.bytes[probe] == b'-')
            {
                probe += 1;
            }
            if probe < self.bytes.len() && self.bytes[probe].is_ascii_digit() {
                probe += 1;
                while probe < self.bytes.len() && self.bytes[probe].is_ascii_digit() {
                    probe += 1;
                }
                end = probe;
            }
        }
        let value: f64 = self.text[start..end].parse().map_err(|_| Error::SyntaxError {
            offset: start,
            message: format!("bad number literal `{}`", &self.text[start..end]),
        })?;
        // Imaginary suffix: `2i`, but not the `im` of `2im(...)`.
        let mut imag = false;
        if end < self.bytes.len()
            && self.bytes[end] == b'i'
            && !(end + 1 < self.bytes.len()
                && (self.bytes[end + 1].is_ascii_alphanumeric() || self.bytes[end + 1] == b'_'))
        {
            imag = true;
            end += 1;
        }
        self.pos = end;
        Ok(Tok::Num(value, imag))
    }
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    len: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map(|(_, o)| *o).unwrap_or(self.len)
    }

    fn bump(&mut self) -> Option<(Tok, usize)> {
        let t = self.toks.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn err(&self, message: impl Into<String>) -> Error {
        Error::SyntaxError {
            offset: self.offset(),
            message: message.into(),
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.bump();
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Some(Tok::Minus) => {
                    self.bump();
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.factor()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.bump();
                    lhs = Expr::Mul(Box::new(lhs), Box::new(self.factor()?));
                }
                Some(Tok::Slash) => {
                    let (_, off) = self.bump().expect("peeked");
                    lhs = Expr::Div(Box::new(lhs), Box::new(self.factor()?), Some(off));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn factor(&mut self) -> Result<Expr> {
        if matches!(self.peek(), Some(Tok::Minus)) {
            self.bump();
            return Ok(Expr::Neg(Box::new(self.factor()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if matches!(self.peek(), Some(Tok::Caret)) {
            let (_, off) = self.bump().expect("peeked");
            let negative = if matches!(self.peek(), Some(Tok::Minus)) {
                self.bump();
                true
            } else {
                false
            };
            match self.bump() {
                Some((Tok::Num(v, false), num_off)) => {
                    if v.fract() != 0.0 || v.abs() > i32::MAX as f64 {
                        return Err(Error::SyntaxError {
                            offset: num_off,
                            message: format!("exponent must be an integer, got `{v}`"),
                        });
                    }
                    let k = v as i32;
                    Ok(Expr::Pow(
                        Box::new(base),
                        if negative { -k } else { k },
                        Some(off),
                    ))
                }
                Some((_, o)) => Err(Error::SyntaxError {
                    offset: o,
                    message: "expected an integer exponent after `^`".into(),
                }),
                None => Err(Error::SyntaxError {
                    offset: self.len,
                    message: "expected an integer exponent after `^`".into(),
                }),
            }
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.bump() {
            Some((Tok::Num(v, imag), _)) => Ok(Expr::Const(if imag {
                Complex64::new(0.0, v)
            } else {
                Complex64::new(v, 0.0)
            })),
            Some((Tok::Ident(name), off)) => match name.as_str() {
                "z" => Ok(Expr::Var),
                "i" => Ok(Expr::Const(Complex64::new(0.0, 1.0))),
                "conj" | "re" | "im" => {
                    match self.bump() {
                        Some((Tok::LParen, _)) => {}
                        _ => {
                            return Err(Error::SyntaxError {
                                offset: self.toks.get(self.pos - 1).map(|(_, o)| *o).unwrap_or(self.len),
                                message: format!("expected `(` after `{name}`"),
                            });
                        }
                    }
                    let inner = self.expr()?;
                    match self.bump() {
                        Some((Tok::RParen, _)) => {}
                        _ => {
                            return Err(Error::SyntaxError {
                                offset: self.toks.get(self.pos - 1).map(|(_, o)| *o).unwrap_or(self.len),
                                message: "expected `)`".into(),
                            });
                        }
                    }
                    Ok(match name.as_str() {
                        "conj" => Expr::Conj(Box::new(inner)),
                        "re" => Expr::Re(Box::new(inner)),
                        _ => Expr::Im(Box::new(inner)),
                    })
                }
                _ => Err(Error::UnknownIdentifier { name, offset: off }),
            },
            Some((Tok::LParen, _)) => {
                let inner = self.expr()?;
                match self.bump() {
                    Some((Tok::RParen, _)) => Ok(inner),
                    _ => Err(Error::SyntaxError {
                        offset: self.toks.get(self.pos - 1).map(|(_, o)| *o).unwrap_or(self.len),
                        message: "expected `)`".into(),
                    }),
                }
            }
            Some((t, o)) => Err(Error::SyntaxError {
                offset: o,
                message: format!("unexpected token `{t:?}`"),
            }),
            None => Err(Error::SyntaxError {
                offset: self.len,
                message: "unexpected end of input".into(),
            }),
        }
    }
}

/// Parses an expression; errors carry byte offsets into `text`.
pub fn parse_expr(text: &str) -> Result<Expr> {
    let toks = Lexer::new(text).tokens()?;
    let mut p = Parser {
        toks,
        pos: 0,
        len: text.len(),
    };
    let e = p.expr()?;
    if p.pos < p.toks.len() {
        return Err(p.err("trailing input"));
    }
    Ok(e)
}

/// Named builders for the functions used throughout: `conj_z`,
/// `zpow n`, and `runge k n` = (r_k/(z−c_k))^n for hole k.
pub mod builtins {
    use super::*;

    pub fn conj_z() -> Expr {
        Expr::Conj(Box::new(Expr::Var))
    }

    pub fn zpow(n: i32) -> Expr {
        match n {
            1 => Expr::Var,
            _ => Expr::Pow(Box::new(Expr::Var), n, None),
        }
    }

    /// ((z − c)/r)^n, simplified to z^n when c = 0 and r = 1.
    pub fn monomial(circle: &Circle, n: i32) -> Expr {
        if circle.center == Complex64::new(0.0, 0.0) && circle.radius == 1.0 {
            return zpow(n);
        }
        let shifted = Expr::Sub(Box::new(Expr::Var), Box::new(Expr::Const(circle.center)));
        let scaled = Expr::Div(
            Box::new(shifted),
            Box::new(Expr::Const(Complex64::new(circle.radius, 0.0))),
            None,
        );
        match n {
            1 => scaled,
            _ => Expr::Pow(Box::new(scaled), n, None),
        }
    }

    /// (r/(z − c))^n with a pole at the circle center.
    pub fn runge(circle: &Circle, n: i32) -> Expr {
        assert!(n >= 1, "runge powers start at 1");
        monomial(circle, -n)
    }

    /// Looks up `conj_z`, `zpow n`, or `runge k n` (k is a 0-based hole
    /// index). Returns None when `text` is not a registry call.
    pub fn lookup(text: &str, domain: &CircleDomain) -> Option<Expr> {
        let parts: Vec<&str> = text.split_whitespace().collect();
        match parts.as_slice() {
            ["conj_z"] => Some(conj_z()),
            ["zpow", n] => n.parse::<i32>().ok().map(zpow),
            ["runge", k, n] => {
                let k: usize = k.parse().ok()?;
                let n: i32 = n.parse().ok()?;
                if k >= domain.hole_count() || n < 1 {
                    return None;
                }
                Some(runge(&domain.holes()[k], n))
            }
            _ => None,
        }
    }
}

/// Seeded generator of boundary functions that extend holomorphically
/// through the domain: rational functions whose poles sit at hole centers
/// and at 2–4 outer radii from the outer center. Coefficients are drawn
/// from [−1,1]².
pub fn random_extendible<R: rand::Rng>(domain: &CircleDomain, rng: &mut R) -> Expr {
    fn coeff<R: rand::Rng>(rng: &mut R) -> Complex64 {
        Complex64::new(rng.random_range(-1.0..=1.0), rng.random_range(-1.0..=1.0))
    }
    let outer = domain.outer();
    let mut terms: Vec<Expr> = Vec::new();
    for n in 0..=3 {
        let c = coeff(rng);
        terms.push(Expr::Mul(
            Box::new(Expr::Const(c)),
            Box::new(builtins::monomial(outer, n)),
        ));
    }
    for hole in domain.holes() {
        for n in 1..=3 {
            let c = coeff(rng);
            terms.push(Expr::Mul(
                Box::new(Expr::Const(c)),
                Box::new(builtins::runge(hole, n)),
            ));
        }
    }
    for _ in 0..2 {
        let rho: f64 = rng.random_range(2.0..=4.0);
        let phi: f64 = rng.random_range(0.0..std::f64::consts::TAU);
        let pole = outer.center + rho * outer.radius * Complex64::new(phi.cos(), phi.sin());
        // Scale so the term is O(1) on the closed domain.
        let scale = (rho - 1.0) * outer.radius;
        for n in 1..=2 {
            let c = coeff(rng);
            terms.push(Expr::Mul(
                Box::new(Expr::Const(c)),
                Box::new(builtins::runge(&Circle::new(pole, scale), n)),
            ));
        }
    }
    let mut it = terms.into_iter();
    let first = it.next().expect("at least one term");
    it.fold(first, |acc, t| Expr::Add(Box::new(acc), Box::new(t)))
}
