//! Concrete syntax for exponential polynomials.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary ('*' unary)*
//! unary  := '-' unary | factor
//! factor := base ('^' nat)?
//! base   := '(' expr ')' | 'exp' '(' expr ')' | log | var | literal
//! log    := 'log' ('[' '-'? nat ']')? '(' (root | expr) ')'
//! root   := 'root' '(' nat (',' expr)+ ')'
//! var    := ident | ident '/' nat
//! literal:= int | int '/' nat | 'i'
//! ```
//!
//! `/` only appears in literals and in the `x/2` prefix sugar. `log` and
//! `root` spell the logarithm constants that height reduction introduces.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use thiserror::Error;

pub const MAX_DEPTH: usize = 256;
pub const MAX_EXPONENT: u32 = 256;
/// Deepest `exp(exp(...))` nesting accepted; bounds the height of inputs.
pub const MAX_EXP_NESTING: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    fn join(a: Span, b: Span) -> Span {
        Span { start: a.start.min(b.start), end: a.end.max(b.end) }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum ExprKind {
    Int(BigInt),
    /// `num/den`, `den > 0`.
    Rat(BigInt, BigInt),
    I,
    Var(String),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    /// General quotient. Never produced by [`parse`]; exists so that
    /// programmatically built trees can be rejected by normalization.
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, u32),
    Exp(Box<Expr>),
    Log { arg: Box<Expr>, branch: i64 },
    /// Only valid directly inside `log`.
    Root { index: usize, coeffs: Vec<Expr> },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Expr {
    pub kind: ExprKind,
    pub span: Span,
}

impl Expr {
    pub fn new(kind: ExprKind, span: Span) -> Self {
        Expr { kind, span }
    }

    /// Variable names in order of first appearance.
    pub fn variables(&self) -> Vec<String> {
        fn walk(e: &Expr, out: &mut Vec<String>) {
            match &e.kind {
                ExprKind::Var(v) => {
                    if !out.contains(v) {
                        out.push(v.clone());
                    }
                }
                ExprKind::Int(_) | ExprKind::Rat(..) | ExprKind::I => {}
                ExprKind::Neg(a) | ExprKind::Pow(a, _) | ExprKind::Exp(a) => walk(a, out),
                ExprKind::Log { arg, .. } => walk(arg, out),
                ExprKind::Add(a, b) | ExprKind::Sub(a, b) | ExprKind::Mul(a, b) | ExprKind::Div(a, b) => {
                    walk(a, out);
                    walk(b, out);
                }
                ExprKind::Root { coeffs, .. } => coeffs.iter().for_each(|c| walk(c, out)),
            }
        }
        let mut out = Vec::new();
        walk(self, &mut out);
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("parse error at line {line}, column {column}: {message}")]
pub struct ParseError {
    pub message: String,
    pub line: usize,
    pub column: usize,
    pub span: Span,
}

/// Which identifiers are accepted as variables.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub enum VarPolicy {
    /// Names of the form `x` or `x<digits>`.
    #[default]
    Auto,
    /// Exactly the listed names.
    Declared(Vec<String>),
}

impl VarPolicy {
    fn accepts(&self, name: &str) -> bool {
        match self {
            VarPolicy::Auto => {
                name.strip_prefix('x').map(|r| r.chars().all(|c| c.is_ascii_digit())).unwrap_or(false)
            }
            VarPolicy::Declared(names) => names.iter().any(|n| n == name),
        }
    }
}

const RESERVED: [&str; 4] = ["exp", "log", "root", "i"];

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Int(n) => write!(f, "integer {}", n),
            Tok::Ident(s) => write!(f, "identifier '{}'", s),
            Tok::Plus => write!(f, "'+'"),
            Tok::Minus => write!(f, "'-'"),
            Tok::Star => write!(f, "'*'"),
            Tok::Slash => write!(f, "'/'"),
            Tok::Caret => write!(f, "'^'"),
            Tok::LParen => write!(f, "'('"),
            Tok::RParen => write!(f, "')'"),
            Tok::LBracket => write!(f, "'['"),
            Tok::RBracket => write!(f, "']'"),
            Tok::Comma => write!(f, "','"),
            Tok::Eof => write!(f, "end of input"),
        }
    }
}

fn error_at(input: &str, span: Span, message: impl Into<String>) -> ParseError {
    let start = span.start.min(input.len());
    let before = &input[..start];
    let line = before.matches('\n').count() + 1;
    let line_start = before.rfind('\n').map(|p| p + 1).unwrap_or(0);
    let column = input[line_start..start].chars().count() + 1;
    ParseError { message: message.into(), line, column, span: Span { start, end: span.end.min(input.len()).max(start) } }
}

fn lex(input: &str) -> Result<Vec<(Tok, Span)>, ParseError> {
    let mut out = Vec::new();
    let mut it = input.char_indices().peekable();
    while let Some(&(pos, ch)) = it.peek() {
        if ch.is_whitespace() {
            it.next();
            continue;
        }
        if ch.is_ascii_digit() {
            let mut end = pos;
            while let Some(&(p, c)) = it.peek() {
                if !c.is_ascii_digit() {
                    break;
                }
                end = p + c.len_utf8();
                it.next();
            }
            let n: BigInt = input[pos..end].parse().expect("digits");
            out.push((Tok::Int(n), Span { start: pos, end }));
            continue;
        }
        if ch.is_ascii_alphabetic() || ch == '_' {
            let mut end = pos;
            while let Some(&(p, c)) = it.peek() {
                if !(c.is_ascii_alphanumeric() || c == '_') {
                    break;
                }
                end = p + c.len_utf8();
                it.next();
            }
            out.push((Tok::Ident(input[pos..end].to_string()), Span { start: pos, end }));
            continue;
        }
        let tok = match ch {
            '+' => Tok::Plus,
            '-' => Tok::Minus,
            '*' => Tok::Star,
            '/' => Tok::Slash,
            '^' => Tok::Caret,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            '[' => Tok::LBracket,
            ']' => Tok::RBracket,
            ',' => Tok::Comma,
            _ => {
                return Err(error_at(
                    input,
                    Span { start: pos, end: pos + ch.len_utf8() },
                    format!("unexpected character '{}'", ch),
                ))
            }
        };
        it.next();
        out.push((tok, Span { start: pos, end: pos + ch.len_utf8() }));
    }
    out.push((Tok::Eof, Span { start: input.len(), end: input.len() }));
    Ok(out)
}

struct Parser<'a> {
    input: &'a str,
    toks: Vec<(Tok, Span)>,
    pos: usize,
    depth: usize,
    exp_depth: usize,
    policy: &'a VarPolicy,
}

type PResult<T> = Result<T, ParseError>;

impl<'a> Parser<'a> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn span(&self) -> Span {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> (Tok, Span) {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err<T>(&self, span: Span, msg: impl Into<String>) -> PResult<T> {
        Err(error_at(self.input, span, msg))
    }

    fn expect(&mut self, tok: Tok) -> PResult<Span> {
        if *self.peek() == tok {
            Ok(self.bump().1)
        } else {
            let msg = if tok == Tok::RParen { "unbalanced parenthesis: expected ')'".to_string() } else { format!("expected {}", tok) };
            self.err(self.span(), format!("{}, found {}", msg, self.peek()))
        }
    }

    fn enter(&mut self) -> PResult<()> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            return self.err(self.span(), format!("nesting deeper than {}", MAX_DEPTH));
        }
        Ok(())
    }

    fn nat(&mut self, what: &str) -> PResult<(BigInt, Span)> {
        match self.bump() {
            (Tok::Int(n), sp) => Ok((n, sp)),
            (t, sp) => self.err(sp, format!("expected {}, found {}", what, t)),
        }
    }

    fn expr(&mut self) -> PResult<Expr> {
        self.enter()?;
        let mut items = vec![(false, self.term()?)];
        loop {
            let negated = match self.peek() {
                Tok::Plus => false,
                Tok::Minus => true,
                _ => break,
            };
            self.bump();
            items.push((negated, self.term()?));
        }
        self.depth -= 1;
        Ok(balanced_sum(items))
    }

    fn term(&mut self) -> PResult<Expr> {
        let mut items = vec![self.unary()?];
        loop {
            match self.peek() {
                Tok::Star => {
                    self.bump();
                    items.push(self.unary()?);
                }
                Tok::Slash => {
                    return self.err(self.span(), "division is only allowed in literals such as 1/2 or x1/2");
                }
                _ => return Ok(balanced_product(items)),
            }
        }
    }

    fn unary(&mut self) -> PResult<Expr> {
        if *self.peek() == Tok::Minus {
            self.enter()?;
            let (_, sp) = self.bump();
            let inner = self.unary()?;
            self.depth -= 1;
            let span = Span::join(sp, inner.span);
            return Ok(Expr::new(ExprKind::Neg(Box::new(inner)), span));
        }
        self.factor()
    }

    fn factor(&mut self) -> PResult<Expr> {
        let base = self.base()?;
        if *self.peek() != Tok::Caret {
            return Ok(base);
        }
        self.bump();
        let (n, sp) = self.nat("a natural exponent")?;
        let e = match n.to_u32() {
            Some(e) if e <= MAX_EXPONENT => e,
            _ => return self.err(sp, format!("exponent exceeds {}", MAX_EXPONENT)),
        };
        let span = Span::join(base.span, sp);
        Ok(Expr::new(ExprKind::Pow(Box::new(base), e), span))
    }

    /// Optional `/ nat` suffix; returns the denominator.
    fn slash_den(&mut self) -> PResult<Option<(BigInt, Span)>> {
        if *self.peek() != Tok::Slash {
            return Ok(None);
        }
        self.bump();
        let (d, sp) = self.nat("a denominator")?;
        if d.is_zero() {
            return self.err(sp, "zero denominator");
        }
        Ok(Some((d, sp)))
    }

    fn base(&mut self) -> PResult<Expr> {
        let (tok, sp) = self.bump();
        match tok {
            Tok::Int(n) => match self.slash_den()? {
                Some((d, dsp)) => Ok(Expr::new(ExprKind::Rat(n, d), Span::join(sp, dsp))),
                None => Ok(Expr::new(ExprKind::Int(n), sp)),
            },
            Tok::LParen => {
                let inner = self.expr()?;
                let close = self.expect(Tok::RParen)?;
                Ok(Expr { kind: inner.kind, span: Span::join(sp, close) })
            }
            Tok::Ident(name) => self.ident(name, sp),
            t => self.err(sp, format!("expected an operand, found {}", t)),
        }
    }

    fn ident(&mut self, name: String, sp: Span) -> PResult<Expr> {
        match name.as_str() {
            "i" => Ok(Expr::new(ExprKind::I, sp)),
            "exp" => {
                if self.exp_depth >= MAX_EXP_NESTING {
                    return self.err(sp, format!("exponentials nested deeper than {}", MAX_EXP_NESTING));
                }
                self.expect(Tok::LParen)?;
                self.exp_depth += 1;
                let arg = self.expr();
                self.exp_depth -= 1;
                let arg = arg?;
                let close = self.expect(Tok::RParen)?;
                Ok(Expr::new(ExprKind::Exp(Box::new(arg)), Span::join(sp, close)))
            }
            "log" => {
                let mut branch = 0i64;
                if *self.peek() == Tok::LBracket {
                    self.bump();
                    let neg = if *self.peek() == Tok::Minus {
                        self.bump();
                        true
                    } else {
                        false
                    };
                    let (k, ksp) = self.nat("a branch index")?;
                    let Some(k) = k.to_i64() else {
                        return self.err(ksp, "branch index out of range");
                    };
                    branch = if neg { -k } else { k };
                    self.expect(Tok::RBracket)?;
                }
                self.expect(Tok::LParen)?;
                let arg = if matches!(self.peek(), Tok::Ident(s) if s == "root") {
                    let (_, rsp) = self.bump();
                    self.root(rsp)?
                } else {
                    self.expr()?
                };
                let close = self.expect(Tok::RParen)?;
                Ok(Expr::new(ExprKind::Log { arg: Box::new(arg), branch }, Span::join(sp, close)))
            }
            "root" => self.err(sp, "root(...) may only appear directly inside log(...)"),
            _ => {
                if !self.policy.accepts(&name) {
                    return self.err(sp, format!("unknown identifier '{}' (declare variables with --vars)", name));
                }
                let var = Expr::new(ExprKind::Var(name), sp);
                match self.slash_den()? {
                    Some((d, dsp)) => {
                        let q = Expr::new(ExprKind::Rat(BigInt::from(1), d), dsp);
                        Ok(Expr::new(ExprKind::Mul(Box::new(q), Box::new(var)), Span::join(sp, dsp)))
                    }
                    None => Ok(var),
                }
            }
        }
    }

    fn root(&mut self, sp: Span) -> PResult<Expr> {
        self.expect(Tok::LParen)?;
        let (k, ksp) = self.nat("a root index")?;
        let Some(index) = k.to_usize() else {
            return self.err(ksp, "root index out of range");
        };
        let mut coeffs = Vec::new();
        while *self.peek() == Tok::Comma {
            self.bump();
            coeffs.push(self.expr()?);
        }
        let close = self.expect(Tok::RParen)?;
        if coeffs.len() < 2 {
            return self.err(Span::join(sp, close), "root(...) needs an index and at least two coefficients");
        }
        Ok(Expr::new(ExprKind::Root { index, coeffs }, Span::join(sp, close)))
    }
}

pub fn parse(input: &str, policy: &VarPolicy) -> Result<Expr, ParseError> {
    if let VarPolicy::Declared(names) = policy {
        for n in names {
            let valid = n.chars().next().map(|c| c.is_ascii_alphabetic() || c == '_').unwrap_or(false)
                && n.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
            if !valid || RESERVED.contains(&n.as_str()) {
                return Err(ParseError {
                    message: format!("'{}' cannot be declared as a variable", n),
                    line: 1,
                    column: 1,
                    span: Span { start: 0, end: 0 },
                });
            }
        }
    }
    let toks = lex(input)?;
    let mut p = Parser { input, toks, pos: 0, depth: 0, exp_depth: 0, policy };
    if *p.peek() == Tok::Eof {
        return p.err(p.span(), "empty input");
    }
    let e = p.expr()?;
    match p.peek() {
        Tok::Eof => Ok(e),
        Tok::RParen => p.err(p.span(), "unbalanced parenthesis: unexpected ')'"),
        t => p.err(p.span(), format!("unexpected {}", t)),
    }
}

/// Sorts names so that embedded digit runs compare numerically
/// (`x2 < x10`).
pub fn natural_sort(names: &mut [String]) {
    fn key(s: &str) -> Vec<(String, BigInt)> {
        let mut out = Vec::new();
        let mut text = String::new();
        let mut digits = String::new();
        for c in s.chars() {
            if c.is_ascii_digit() {
                digits.push(c);
            } else {
                if !digits.is_empty() {
                    out.push((std::mem::take(&mut text), digits.parse().unwrap()));
                    digits.clear();
                }
                text.push(c);
            }
        }
        let n = if digits.is_empty() { BigInt::from(-1) } else { digits.parse().unwrap() };
        out.push((text, n));
        out
    }
    names.sort_by(|a, b| key(a).cmp(&key(b)).then(a.cmp(b)));
}

/// Folds `t0 ± t1 ± ...` so that tree depth is logarithmic in the chain
/// length. Each flag is the sign of its term relative to the chain; the
/// first one is ignored. Chains of up to three terms stay left-associative.
fn balanced_sum(mut items: Vec<(bool, Expr)>) -> Expr {
    if items.len() == 1 {
        return items.pop().unwrap().1;
    }
    let mut right = items.split_off(items.len().div_ceil(2));
    let negated = right[0].0;
    if negated {
        for item in right.iter_mut() {
            item.0 = !item.0;
        }
    }
    let (a, b) = (balanced_sum(items), balanced_sum(right));
    let span = Span::join(a.span, b.span);
    let kind = if negated { ExprKind::Sub(Box::new(a), Box::new(b)) } else { ExprKind::Add(Box::new(a), Box::new(b)) };
    Expr::new(kind, span)
}

fn balanced_product(mut items: Vec<Expr>) -> Expr {
    if items.len() == 1 {
        return items.pop().unwrap();
    }
    let right = items.split_off(items.len().div_ceil(2));
    let (a, b) = (balanced_product(items), balanced_product(right));
    let span = Span::join(a.span, b.span);
    Expr::new(ExprKind::Mul(Box::new(a), Box::new(b)), span)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ok(s: &str) -> Expr {
        parse(s, &VarPolicy::Auto).unwrap_or_else(|e| panic!("{}: {}", s, e))
    }

    fn err(s: &str) -> ParseError {
        parse(s, &VarPolicy::Auto).expect_err(s)
    }

    #[test]
    fn precedence() {
        // -x^2 is -(x^2)
        let e = ok("-x^2");
        assert!(matches!(e.kind, ExprKind::Neg(ref a) if matches!(a.kind, ExprKind::Pow(_, 2))));
        // a + b*c
        let e = ok("x1 + x2*x3");
        assert!(matches!(e.kind, ExprKind::Add(_, ref b) if matches!(b.kind, ExprKind::Mul(..))));
        // left associativity of -
        let e = ok("x1 - x2 - x3");
        assert!(matches!(e.kind, ExprKind::Sub(ref a, _) if matches!(a.kind, ExprKind::Sub(..))));
    }

    #[test]
    fn scalar_prefix_sugar() {
        let e = ok("x1/2");
        match e.kind {
            ExprKind::Mul(q, v) => {
                assert_eq!(q.kind, ExprKind::Rat(1.into(), 2.into()));
                assert_eq!(v.kind, ExprKind::Var("x1".into()));
            }
            k => panic!("{:?}", k),
        }
        assert_eq!(ok("3/4").kind, ExprKind::Rat(3.into(), 4.into()));
    }

    #[test]
    fn worked_example_shape() {
        let e = ok("exp(exp(x1/2 + x2^2)) + x1^3");
        assert_eq!(e.variables(), vec!["x1".to_string(), "x2".to_string()]);
        assert_eq!(e.span, Span { start: 0, end: "exp(exp(x1/2 + x2^2)) + x1^3".len() });
    }

    #[test]
    fn unbalanced_parenthesis_column() {
        let e = err("(x1");
        assert_eq!((e.line, e.column), (1, 4));
        assert!(e.message.contains("unbalanced"));
        let e = err("x1)");
        assert_eq!(e.column, 3);
    }

    #[test]
    fn general_division_rejected() {
        assert!(err("x1^2/2").message.contains("division"));
        assert!(err("(x1+x2)/3").message.contains("division"));
        assert!(err("1/0").message.contains("zero"));
    }

    #[test]
    fn identifier_policy() {
        assert!(err("y + 1").message.contains("unknown identifier"));
        let e = parse("y + z", &VarPolicy::Declared(vec!["y".into(), "z".into()])).unwrap();
        assert_eq!(e.variables(), vec!["y".to_string(), "z".to_string()]);
        assert!(parse("x1", &VarPolicy::Declared(vec!["y".into()])).is_err());
        assert!(parse("y", &VarPolicy::Declared(vec!["exp".into()])).is_err());
    }

    #[test]
    fn logs_and_roots() {
        let e = ok("x - log[-1](log(2))");
        assert!(matches!(e.kind, ExprKind::Sub(_, ref b) if matches!(b.kind, ExprKind::Log { branch: -1, .. })));
        let e = ok("log(root(1, 1, 1, 1))");
        assert!(matches!(e.kind, ExprKind::Log { ref arg, .. } if matches!(arg.kind, ExprKind::Root { index: 1, .. })));
        assert!(err("root(0, 1, 1)").message.contains("inside log"));
    }

    #[test]
    fn limits() {
        let deep = format!("{}x{}", "(".repeat(300), ")".repeat(300));
        assert!(err(&deep).message.contains("nesting"));
        assert!(err("x^257").message.contains("exponent"));
        assert!(ok("x^256").span.end == 5);
    }

    #[test]
    fn multiline_positions() {
        let e = err("x1 +\n  $");
        assert_eq!((e.line, e.column), (2, 3));
    }

    #[test]
    fn natural_order() {
        let mut v: Vec<String> = ["x10", "x2", "x", "x1"].iter().map(|s| s.to_string()).collect();
        natural_sort(&mut v);
        assert_eq!(v, vec!["x", "x1", "x2", "x10"]);
    }
}
