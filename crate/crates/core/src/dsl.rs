//! A small expression language over the series engine.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := '-' unary | factor
//! factor := atom ('^' posint)?
//! atom   := rational | 'r5' | 'q' ('^' rational)? | call | '(' expr ')'
//! call   := name '(' (param ';')? arg ')'
//! arg    := '-'? 'q' ('^' posint)?
//! ```
//!
//! `phi psi f fprod chi` take a bare argument. `theta1..theta4` take an
//! angle `m` or `m*pi/10`; `S` and `T` take an odd index `k`.

use std::fmt::{self, Write as _};

use num_bigint::BigInt;
use num_rational::Rational64;
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;
use thiserror::Error;

use crate::special::{self, AngleTenths, ArgSpec, DenominatorVariant, Sign};
use crate::{Error, Kernel, PSeries, Rational, K5};

/// Byte range into the source text.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    fn new(start: usize, end: usize) -> Self {
        Span { start, end }
    }

    fn join(self, other: Span) -> Span {
        Span::new(self.start.min(other.start), self.end.max(other.end))
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", self.start, self.end)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DslError {
    #[error("unexpected character {found:?} at {span}")]
    Lex { span: Span, found: char },

    #[error("parse error at {span}: expected {}, found {found}", .expected.join(" or "))]
    Parse { span: Span, expected: Vec<&'static str>, found: String },

    #[error("{message} at {span}")]
    Invalid { span: Span, message: String },

    #[error("{source} (at {span})")]
    Eval { span: Span, source: Error },
}

impl DslError {
    pub fn span(&self) -> Span {
        match self {
            DslError::Lex { span, .. }
            | DslError::Parse { span, .. }
            | DslError::Invalid { span, .. }
            | DslError::Eval { span, .. } => *span,
        }
    }

    /// The error message followed by the input with the span underlined.
    pub fn render(&self, input: &str) -> String {
        let span = self.span();
        let start = input[..span.start.min(input.len())].chars().count();
        let width = input
            .get(span.start..span.end)
            .map_or(1, |s| s.chars().count().max(1));
        format!("{self}\n  {input}\n  {}{}", " ".repeat(start), "^".repeat(width))
    }
}

pub type DslResult<T> = std::result::Result<T, DslError>;

// ---- lexer ----------------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Int(BigInt),
    Ident(String),
    Q,
    R5,
    Pi,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Comma,
    Semi,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Int(n) => format!("integer {n}"),
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Q => "`q`".into(),
            Tok::R5 => "`r5`".into(),
            Tok::Pi => "`pi`".into(),
            Tok::Plus => "`+`".into(),
            Tok::Minus => "`-`".into(),
            Tok::Star => "`*`".into(),
            Tok::Slash => "`/`".into(),
            Tok::Caret => "`^`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Semi => "`;`".into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Token {
    pub tok: Tok,
    pub span: Span,
}

pub fn tokenize(text: &str) -> DslResult<Vec<Token>> {
    let mut out = Vec::new();
    let mut chars = text.char_indices().peekable();
    while let Some((i, c)) = chars.next() {
        let single = match c {
            '+' => Some(Tok::Plus),
            '-' | '\u{2212}' => Some(Tok::Minus),
            '*' => Some(Tok::Star),
            '/' => Some(Tok::Slash),
            '^' => Some(Tok::Caret),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            ',' => Some(Tok::Comma),
            ';' => Some(Tok::Semi),
            _ => None,
        };
        if let Some(tok) = single {
            out.push(Token { tok, span: Span::new(i, i + c.len_utf8()) });
            continue;
        }
        if c.is_ascii_whitespace() {
            continue;
        }
        let mut end = i + c.len_utf8();
        if c.is_ascii_digit() {
            while let Some(&(j, d)) = chars.peek() {
                if !d.is_ascii_digit() {
                    break;
                }
                end = j + 1;
                chars.next();
            }
            let n = text[i..end].parse::<BigInt>().expect("ascii digits");
            out.push(Token { tok: Tok::Int(n), span: Span::new(i, end) });
        } else if c.is_ascii_alphabetic() || c == '_' {
            while let Some(&(j, d)) = chars.peek() {
                if !(d.is_ascii_alphanumeric() || d == '_') {
                    break;
                }
                end = j + 1;
                chars.next();
            }
            let tok = match &text[i..end] {
                "q" => Tok::Q,
                "r5" => Tok::R5,
                "pi" => Tok::Pi,
                s => Tok::Ident(s.to_string()),
            };
            out.push(Token { tok, span: Span::new(i, end) });
        } else {
            return Err(DslError::Lex { span: Span::new(i, end), found: c });
        }
    }
    Ok(out)
}

// ---- AST ------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Func {
    Phi,
    Psi,
    F,
    FProd,
    Chi,
    Theta(u8),
    /// Denominator sum as printed.
    S,
    /// Denominator sum with the extra `(-1)^n`.
    T,
}

impl Func {
    pub const ALL: [Func; 11] = [
        Func::Phi,
        Func::Psi,
        Func::F,
        Func::FProd,
        Func::Chi,
        Func::Theta(1),
        Func::Theta(2),
        Func::Theta(3),
        Func::Theta(4),
        Func::S,
        Func::T,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Func::Phi => "phi",
            Func::Psi => "psi",
            Func::F => "f",
            Func::FProd => "fprod",
            Func::Chi => "chi",
            Func::Theta(1) => "theta1",
            Func::Theta(2) => "theta2",
            Func::Theta(3) => "theta3",
            Func::Theta(_) => "theta4",
            Func::S => "S",
            Func::T => "T",
        }
    }

    fn from_name(s: &str) -> Option<Func> {
        Func::ALL.into_iter().find(|f| f.name() == s)
    }

    pub fn takes_param(self) -> bool {
        matches!(self, Func::Theta(_) | Func::S | Func::T)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Call {
    pub func: Func,
    /// Angle index `m` (z = m*pi/10) for thetas, odd `k` for S and T.
    pub param: Option<i64>,
    pub arg: ArgSpec,
}

#[derive(Clone, Debug)]
pub enum ExprKind {
    /// Non-negative rational literal.
    Literal(Rational),
    SqrtFive,
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, u32),
    Neg(Box<Expr>),
    QPow(Rational64),
    Call(Call),
}

#[derive(Clone, Debug)]
pub struct Expr {
    pub kind: ExprKind,
    pub span: Span,
}

impl Expr {
    pub fn new(kind: ExprKind) -> Self {
        Expr { kind, span: Span::default() }
    }
}

/// Structural equality; spans are ignored.
impl PartialEq for Expr {
    fn eq(&self, other: &Self) -> bool {
        use ExprKind::*;
        match (&self.kind, &other.kind) {
            (Literal(a), Literal(b)) => a == b,
            (SqrtFive, SqrtFive) => true,
            (Add(a, b), Add(c, d))
            | (Sub(a, b), Sub(c, d))
            | (Mul(a, b), Mul(c, d))
            | (Div(a, b), Div(c, d)) => a == c && b == d,
            (Pow(a, k), Pow(b, j)) => k == j && a == b,
            (Neg(a), Neg(b)) => a == b,
            (QPow(a), QPow(b)) => a == b,
            (Call(a), Call(b)) => a == b,
            _ => false,
        }
    }
}

// ---- parser ---------------------------------------------------------------

struct Parser<'a> {
    tokens: &'a [Token],
    pos: usize,
    len: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&'a Tok> {
        self.tokens.get(self.pos).map(|t| &t.tok)
    }

    fn peek_at(&self, k: usize) -> Option<&'a Tok> {
        self.tokens.get(self.pos + k).map(|t| &t.tok)
    }

    fn here(&self) -> Span {
        self.tokens
            .get(self.pos)
            .map_or(Span::new(self.len, self.len), |t| t.span)
    }

    fn prev_span(&self) -> Span {
        self.tokens[self.pos - 1].span
    }

    fn bump(&mut self) -> &'a Token {
        let t = &self.tokens[self.pos];
        self.pos += 1;
        t
    }

    fn error(&self, expected: &[&'static str]) -> DslError {
        DslError::Parse {
            span: self.here(),
            expected: expected.to_vec(),
            found: self.peek().map_or("end of input".into(), Tok::describe),
        }
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == Some(tok) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: &Tok, what: &'static str) -> DslResult<Span> {
        if self.eat(tok) {
            Ok(self.prev_span())
        } else {
            Err(self.error(&[what]))
        }
    }

    fn expr(&mut self) -> DslResult<Expr> {
        let mut lhs = self.term()?;
        loop {
            let ctor: fn(Box<Expr>, Box<Expr>) -> ExprKind = match self.peek() {
                Some(Tok::Plus) => ExprKind::Add,
                Some(Tok::Minus) => ExprKind::Sub,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            let rhs = self.term()?;
            let span = lhs.span.join(rhs.span);
            lhs = Expr { kind: ctor(Box::new(lhs), Box::new(rhs)), span };
        }
    }

    fn term(&mut self) -> DslResult<Expr> {
        let mut lhs = self.unary()?;
        loop {
            let ctor: fn(Box<Expr>, Box<Expr>) -> ExprKind = match self.peek() {
                Some(Tok::Star) => ExprKind::Mul,
                Some(Tok::Slash) => ExprKind::Div,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            let rhs = self.unary()?;
            let span = lhs.span.join(rhs.span);
            lhs = Expr { kind: ctor(Box::new(lhs), Box::new(rhs)), span };
        }
    }

    fn unary(&mut self) -> DslResult<Expr> {
        if self.eat(&Tok::Minus) {
            let start = self.prev_span();
            let inner = self.unary()?;
            let span = start.join(inner.span);
            return Ok(Expr { kind: ExprKind::Neg(Box::new(inner)), span });
        }
        self.factor()
    }

    fn factor(&mut self) -> DslResult<Expr> {
        let base = self.atom()?;
        if !self.eat(&Tok::Caret) {
            return Ok(base);
        }
        let (k, span) = self.posint()?;
        let span = base.span.join(span);
        Ok(Expr { kind: ExprKind::Pow(Box::new(base), k), span })
    }

    fn posint(&mut self) -> DslResult<(u32, Span)> {
        match self.peek() {
            Some(Tok::Int(n)) => {
                let span = self.bump().span;
                match n.to_u32() {
                    Some(k) if k >= 1 => Ok((k, span)),
                    _ => Err(DslError::Invalid {
                        span,
                        message: format!("exponent must be an integer in 1..={}, got {n}", u32::MAX),
                    }),
                }
            }
            _ => Err(self.error(&["positive integer"])),
        }
    }

    /// `int` or `int '/' int`; the slash belongs to the literal only when an
    /// integer follows it.
    fn rational(&mut self) -> DslResult<(Rational, Span)> {
        let Some(Tok::Int(n)) = self.peek() else {
            return Err(self.error(&["integer"]));
        };
        let mut span = self.bump().span;
        let mut value = Rational::from_integer(n.clone());
        if let (Some(Tok::Slash), Some(Tok::Int(d))) = (self.peek(), self.peek_at(1)) {
            self.pos += 2;
            span = span.join(self.prev_span());
            if d.is_zero() {
                return Err(DslError::Invalid { span, message: "zero denominator".into() });
            }
            value = Rational::new(n.clone(), d.clone());
        }
        Ok((value, span))
    }

    fn atom(&mut self) -> DslResult<Expr> {
        match self.peek() {
            Some(Tok::Int(_)) => {
                let (value, span) = self.rational()?;
                Ok(Expr { kind: ExprKind::Literal(value), span })
            }
            Some(Tok::R5) => Ok(Expr { kind: ExprKind::SqrtFive, span: self.bump().span }),
            Some(Tok::Q) => {
                let mut span = self.bump().span;
                let mut exp = Rational64::one();
                if self.eat(&Tok::Caret) {
                    let (r, s) = self.rational()?;
                    span = span.join(s);
                    exp = to_rational64(&r).ok_or_else(|| DslError::Invalid {
                        span: s,
                        message: format!("exponent {r} is too large"),
                    })?;
                }
                Ok(Expr { kind: ExprKind::QPow(exp), span })
            }
            Some(Tok::LParen) => {
                let open = self.bump().span;
                let mut inner = self.expr()?;
                let close = self.expect(&Tok::RParen, "`)`")?;
                inner.span = open.join(close);
                Ok(inner)
            }
            Some(Tok::Ident(name)) => {
                let name_span = self.here();
                let func = Func::from_name(name).ok_or_else(|| DslError::Invalid {
                    span: name_span,
                    message: format!("unknown function `{name}`"),
                })?;
                self.pos += 1;
                self.call(func, name_span)
            }
            _ => Err(self.error(&["number", "`r5`", "`q`", "function", "`(`"])),
        }
    }

    fn call(&mut self, func: Func, name_span: Span) -> DslResult<Expr> {
        self.expect(&Tok::LParen, "`(`")?;
        let param = if func.takes_param() {
            let p = if matches!(func, Func::Theta(_)) { self.angle()? } else { self.odd_index()? };
            self.expect(&Tok::Semi, "`;`")?;
            Some(p)
        } else {
            None
        };
        let arg = self.argform()?;
        let close = self.expect(&Tok::RParen, "`)`")?;
        Ok(Expr { kind: ExprKind::Call(Call { func, param, arg }), span: name_span.join(close) })
    }

    fn signed_int(&mut self) -> DslResult<(i64, Span)> {
        let negative = self.eat(&Tok::Minus);
        let start = if negative { Some(self.prev_span()) } else { None };
        let Some(Tok::Int(n)) = self.peek() else {
            return Err(self.error(&["argument"]));
        };
        let span = self.bump().span;
        let span = start.map_or(span, |s| s.join(span));
        let n = if negative { -n.clone() } else { n.clone() };
        let v = n.to_i64().ok_or_else(|| DslError::Invalid {
            span,
            message: format!("parameter {n} is out of range"),
        })?;
        Ok((v, span))
    }

    /// `m`, `m*pi/10` or `pi/10`.
    fn angle(&mut self) -> DslResult<i64> {
        let bare_pi = self.peek() == Some(&Tok::Pi);
        let m = if bare_pi { 1 } else { self.signed_int()?.0 };
        if bare_pi || self.eat(&Tok::Star) {
            self.expect(&Tok::Pi, "`pi`")?;
            self.expect(&Tok::Slash, "`/`")?;
            match self.peek() {
                Some(Tok::Int(d)) if *d == BigInt::from(10) => {
                    self.pos += 1;
                }
                _ => return Err(self.error(&["`10`"])),
            }
        }
        Ok(m)
    }

    fn odd_index(&mut self) -> DslResult<i64> {
        let (k, span) = self.signed_int()?;
        if k % 2 == 0 {
            return Err(DslError::Invalid { span, message: format!("index must be odd, got {k}") });
        }
        Ok(k)
    }

    fn argform(&mut self) -> DslResult<ArgSpec> {
        let sign = if self.eat(&Tok::Minus) { Sign::Minus } else { Sign::Plus };
        if !self.eat(&Tok::Q) {
            return Err(self.error(&["argument"]));
        }
        let power = if self.eat(&Tok::Caret) { self.posint()?.0 } else { 1 };
        Ok(ArgSpec { sign, power })
    }
}

fn to_rational64(r: &Rational) -> Option<Rational64> {
    Some(Rational64::new(r.numer().to_i64()?, r.denom().to_i64()?))
}

pub fn parse_tokens(tokens: &[Token], len: usize) -> DslResult<Expr> {
    let mut p = Parser { tokens, pos: 0, len };
    let expr = p.expr()?;
    if p.pos < tokens.len() {
        return Err(p.error(&["operator", "end of input"]));
    }
    Ok(expr)
}

pub fn parse(text: &str) -> DslResult<Expr> {
    parse_tokens(&tokenize(text)?, text.len())
}

// ---- evaluation -------------------------------------------------------------

pub fn eval(expr: &Expr, order: i64) -> DslResult<PSeries> {
    eval_with(expr, order, Kernel::default())
}

pub fn eval_with(expr: &Expr, order: i64, kernel: Kernel) -> DslResult<PSeries> {
    if order < 1 {
        return Err(DslError::Invalid {
            span: expr.span,
            message: format!("order must be at least 1, got {order}"),
        });
    }
    Evaluator { order: Rational64::from_integer(order), kernel }.eval(expr)
}

/// Parse and evaluate in one step.
pub fn expand(text: &str, order: i64) -> DslResult<PSeries> {
    eval(&parse(text)?, order)
}

struct Evaluator {
    order: Rational64,
    kernel: Kernel,
}

impl Evaluator {
    fn eval(&self, e: &Expr) -> DslResult<PSeries> {
        let at = |source: Error| DslError::Eval { span: e.span, source };
        use ExprKind::*;
        match &e.kind {
            Literal(r) => special::constant(K5::from_base(r.clone()), self.order).map_err(at),
            SqrtFive => special::constant(K5::sqrt5(), self.order).map_err(at),
            Add(a, b) => Ok(self.eval(a)?.add(&self.eval(b)?)),
            Sub(a, b) => Ok(self.eval(a)?.sub(&self.eval(b)?)),
            Mul(a, b) => Ok(self.eval(a)?.mul(&self.eval(b)?, self.kernel)),
            Div(a, b) => {
                let num = self.eval(a)?;
                let inv = self
                    .eval(b)?
                    .inv()
                    .map_err(|source| DslError::Eval { span: b.span, source })?;
                Ok(num.mul(&inv, self.kernel))
            }
            Pow(a, k) => self.eval(a)?.pow(*k, self.kernel).map_err(at),
            Neg(a) => Ok(self.eval(a)?.neg()),
            QPow(r) => special::q_power(*r, self.order).map_err(at),
            Call(c) => self.call(c).map_err(at),
        }
    }

    fn call(&self, c: &Call) -> crate::Result<PSeries> {
        let n = self.order;
        let param = c.param.unwrap_or(0);
        match c.func {
            Func::Phi => special::phi(c.arg, n),
            Func::Psi => special::psi(c.arg, n),
            Func::F => special::f_sum(c.arg, n),
            Func::FProd => special::f_product(c.arg, n),
            Func::Chi => special::chi(c.arg, n),
            Func::Theta(j) => special::theta_sum(j, AngleTenths(param), c.arg, n),
            Func::S => special::denominator_sum(param, DenominatorVariant::Literal, c.arg, n),
            Func::T => special::denominator_sum(param, DenominatorVariant::Signed, c.arg, n),
        }
    }
}

// ---- printing ---------------------------------------------------------------

fn fraction_text(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn arg_text(arg: ArgSpec) -> String {
    let sign = if arg.sign == Sign::Minus { "-" } else { "" };
    if arg.power == 1 {
        format!("{sign}q")
    } else {
        format!("{sign}q^{}", arg.power)
    }
}

/// Canonical fully parenthesized form; `parse(print_ast(e)) == e`.
pub fn print_ast(e: &Expr) -> String {
    let mut out = String::new();
    write_expr(&mut out, e);
    out
}

fn write_expr(out: &mut String, e: &Expr) {
    use ExprKind::*;
    let binary = |out: &mut String, a: &Expr, op: &str, b: &Expr| {
        out.push('(');
        write_expr(out, a);
        write!(out, " {op} ").unwrap();
        // a bare literal after `/` would fuse with a literal on the left
        if op == "/" && matches!(b.kind, Literal(_)) {
            out.push('(');
            write_expr(out, b);
            out.push(')');
        } else {
            write_expr(out, b);
        }
        out.push(')');
    };
    match &e.kind {
        Literal(r) => out.push_str(&fraction_text(r)),
        SqrtFive => out.push_str("r5"),
        Add(a, b) => binary(out, a, "+", b),
        Sub(a, b) => binary(out, a, "-", b),
        Mul(a, b) => binary(out, a, "*", b),
        Div(a, b) => binary(out, a, "/", b),
        Pow(a, k) => {
            out.push('(');
            write_expr(out, a);
            write!(out, ")^{k}").unwrap();
        }
        Neg(a) => {
            out.push_str("(-");
            write_expr(out, a);
            out.push(')');
        }
        QPow(r) if r.is_one() => out.push('q'),
        QPow(r) if r.is_integer() => write!(out, "q^{}", r.numer()).unwrap(),
        QPow(r) => write!(out, "q^{}/{}", r.numer(), r.denom()).unwrap(),
        Call(c) => {
            out.push_str(c.func.name());
            out.push('(');
            if let Some(p) = c.param {
                write!(out, "{p}; ").unwrap();
            }
            out.push_str(&arg_text(c.arg));
            out.push(')');
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_ast(self))
    }
}

/// Random expression of depth at most `depth`, for round-trip testing.
pub fn random_expr<R: Rng + ?Sized>(rng: &mut R, depth: u32) -> Expr {
    use ExprKind::*;
    let leaf = depth == 0 || rng.gen_bool(0.25);
    let kind = if leaf {
        match rng.gen_range(0..4) {
            0 => Literal(Rational::new(rng.gen_range(0..50).into(), rng.gen_range(1..9).into())),
            1 => SqrtFive,
            2 => QPow(Rational64::new(rng.gen_range(0..20), rng.gen_range(1..5))),
            _ => {
                let func = Func::ALL[rng.gen_range(0..Func::ALL.len())];
                let param = match func {
                    Func::Theta(_) => Some(rng.gen_range(-12..12)),
                    Func::S | Func::T => Some(2 * rng.gen_range(-5..5) + 1),
                    _ => None,
                };
                let sign = if rng.gen_bool(0.5) { Sign::Plus } else { Sign::Minus };
                Call(crate::dsl::Call { func, param, arg: ArgSpec { sign, power: rng.gen_range(1..7) } })
            }
        }
    } else {
        let choice = rng.gen_range(0..6);
        let a = Box::new(random_expr(rng, depth - 1));
        match choice {
            4 => Neg(a),
            5 => Pow(a, rng.gen_range(1..5)),
            _ => {
                let b = Box::new(random_expr(rng, depth - 1));
                [Add, Sub, Mul, Div][choice](a, b)
            }
        }
    };
    Expr::new(kind)
}

// ---- K5 text form ------------------------------------------------------------

/// Parse the text form of an element of Q(sqrt 5), e.g. `-3/2 + 1/2*r5`.
pub fn parse_k5(text: &str) -> DslResult<K5> {
    let expr = parse(text)?;
    constant_value(&expr).ok_or_else(|| DslError::Invalid {
        span: expr.span,
        message: "not a constant of the form a + b*r5".into(),
    })
}

fn constant_value(e: &Expr) -> Option<K5> {
    use ExprKind::*;
    Some(match &e.kind {
        Literal(r) => K5::from_base(r.clone()),
        SqrtFive => K5::sqrt5(),
        Add(a, b) => constant_value(a)? + constant_value(b)?,
        Sub(a, b) => constant_value(a)? - constant_value(b)?,
        Mul(a, b) => constant_value(a)? * constant_value(b)?,
        Div(a, b) => constant_value(a)? * constant_value(b)?.inv().ok()?,
        Neg(a) => -constant_value(a)?,
        Pow(a, k) => {
            let base = constant_value(a)?;
            (0..*k).fold(K5::one(), |acc, _| acc * base.clone())
        }
        QPow(_) | Call(_) => return None,
    })
}

/// Each exactly verified identity as a difference that vanishes below the
/// truncation order, keyed by registry id.
pub const IDENTITY_EXPRESSIONS: &[(&str, &str)] = &[
    ("I1", "f(-q) - fprod(-q)"),
    ("I2", "theta1(pi/10; q)*theta1(3*pi/10; q)*fprod(-q^10)*fprod(-q^4) - q^1/2*fprod(-q^2)^3*fprod(-q^20)"),
    ("I3", "theta3(pi/10; q)*theta3(3*pi/10; q)*fprod(-q^10)*fprod(-q) - fprod(-q^2)^3*fprod(-q^5)"),
    ("I4", "(phi(q)^2 - 5*phi(q^5)^2)*chi(q) + 4*f(-q^2)^2*chi(q^5)"),
    ("I5", "(phi(q) + r5*phi(q^5))*theta4(2; q)*theta1(1; q) - (1 + r5)*(r5 - 1)/2*q^1/4*f(-q^2)^3"),
    ("I6", "(phi(q) - r5*phi(q^5))*theta4(4; q)*theta1(3; q) - (1 - r5)*(1 + r5)/2*q^1/4*f(-q^2)^3"),
    ("I7", "(phi(q) + r5*phi(q^5))*(phi(q) - r5*phi(q^5))*theta4(2; q)*theta1(1; q)*theta4(4; q)*theta1(3; q) + 4*q^1/2*f(-q^2)^6"),
    ("I8", "chi(q^5)*theta1(1; q)*theta3(1; q)*theta1(3; q)*theta3(3; q) - q^1/2*chi(q)*fprod(-q^2)^4"),
    ("I10", "f(-q^2)^3 - psi(q^2)*phi(-q^2)^2"),
    ("I11", "phi(-q^2)^2 - phi(q)*phi(-q)"),
    ("I12", "f(q) - chi(q)*f(-q^2)"),
    ("I13a", "chi(q^5)*4*S(3; q)*S(1; q) - phi(q)*f(q)"),
    ("I13b", "chi(q^5)*4*T(3; q)*T(1; q) - phi(q)*f(q)"),
];

/// Lowest exponent below `up_to` with a nonzero coefficient.
pub fn first_nonzero(s: &PSeries, up_to: Rational64) -> Option<(Rational64, K5)> {
    s.terms()
        .take_while(|(e, _)| *e < up_to)
        .find(|(_, c)| !c.is_zero())
        .map(|(e, c)| (e, c.clone()))
}
