//! Exponential polynomials in tower normal form.
//!
//! A monomial is `x^a * exp(g)` where `g` is itself a constant-free
//! exponential polynomial, stored as a map from its (coefficient-free)
//! monomials to their coefficients. Products of exponentials merge by adding
//! exponents, so `exp(s) * exp(t)` and `exp(s + t)` are the same monomial and
//! `exp(t) * exp(-t) = 1`. Each key `m` with coefficient `c` is one atom
//! `exp(c*m)`; the height of a monomial is one more than the largest height
//! among its atom bodies.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::parser::{self, Expr, ExprKind, VarPolicy};
use crate::scalar::{BranchEnv, Scalar};

/// Largest `|Re|` accepted as the argument of a numeric exponential.
pub const EXP_OVERFLOW: f64 = 700.0;

/// Ordered variable names shared by all polynomials of one context.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Vars(Arc<Vec<String>>);

impl Vars {
    pub fn new(names: Vec<String>) -> Result<Self> {
        for (i, n) in names.iter().enumerate() {
            if names[..i].contains(n) {
                return Err(Error::Contract(format!("variable '{}' declared twice", n)));
            }
        }
        Ok(Vars(Arc::new(names)))
    }

    /// `x1, ..., xn`.
    pub fn numbered(n: usize) -> Self {
        Vars(Arc::new((1..=n).map(|i| format!("x{}", i)).collect()))
    }

    /// Variables of `e` in natural order (`x2` before `x10`).
    pub fn from_expr(e: &Expr) -> Self {
        let mut names = e.variables();
        parser::natural_sort(&mut names);
        Vars(Arc::new(names))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.0
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.0.iter().position(|n| n == name)
    }

    pub fn joined(&self) -> String {
        self.0.join(",")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial {
    vars: Vec<u32>,
    exps: BTreeMap<Monomial, Scalar>,
    height: u32,
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.height
            .cmp(&other.height)
            .then_with(|| self.degree().cmp(&other.degree()))
            .then_with(|| self.vars.cmp(&other.vars))
            .then_with(|| self.exps.cmp(&other.exps))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Monomial {
    pub fn one(n: usize) -> Self {
        Monomial { vars: vec![0; n], exps: BTreeMap::new(), height: 0 }
    }

    pub fn var(n: usize, i: usize) -> Self {
        let mut m = Self::one(n);
        m.vars[i] = 1;
        m
    }

    /// Builds `x^vars * exp(sum c*m)`, dropping zero coefficients.
    pub fn from_parts(vars: Vec<u32>, exps: BTreeMap<Monomial, Scalar>) -> Self {
        let exps: BTreeMap<Monomial, Scalar> = exps.into_iter().filter(|(k, c)| !c.is_zero() && !k.is_one()).collect();
        let height = exps.keys().map(|k| k.height + 1).max().unwrap_or(0);
        Monomial { vars, exps, height }
    }

    pub fn var_exps(&self) -> &[u32] {
        &self.vars
    }

    /// Atom bodies: `exp(c*m)` for each `(m, c)`.
    pub fn exp_part(&self) -> &BTreeMap<Monomial, Scalar> {
        &self.exps
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn degree(&self) -> u32 {
        self.vars.iter().sum()
    }

    pub fn is_one(&self) -> bool {
        self.exps.is_empty() && self.vars.iter().all(|&a| a == 0)
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let vars = self.vars.iter().zip(&other.vars).map(|(a, b)| a + b).collect();
        let mut exps = self.exps.clone();
        for (k, c) in &other.exps {
            add_into(&mut exps, k.clone(), c.clone());
        }
        Monomial::from_parts(vars, exps)
    }

    /// The exponent `g` of the exponential part, as a polynomial.
    pub fn exponent(&self, vars: &Vars) -> ExpPoly {
        ExpPoly { vars: vars.clone(), terms: self.exps.clone() }
    }

    fn rescale(&self, f: &[BigRational]) -> (BigRational, Monomial) {
        let mut factor = BigRational::one();
        for (a, q) in self.vars.iter().zip(f) {
            for _ in 0..*a {
                factor *= q;
            }
        }
        let mut exps = BTreeMap::new();
        for (k, c) in &self.exps {
            let (fk, k2) = k.rescale(f);
            exps.insert(k2, c.scale_rational(&fk));
        }
        (factor, Monomial::from_parts(self.vars.clone(), exps))
    }

    fn remap(&self, map: &[usize], n: usize) -> Monomial {
        let mut vars = vec![0; n];
        for (i, a) in self.vars.iter().enumerate() {
            vars[map[i]] = *a;
        }
        let exps = self.exps.iter().map(|(k, c)| (k.remap(map, n), c.clone())).collect();
        Monomial::from_parts(vars, exps)
    }

    fn uses_var(&self, i: usize) -> bool {
        self.vars[i] > 0 || self.exps.keys().any(|k| k.uses_var(i))
    }

    pub fn eval(&self, x: &[Complex64], env: &BranchEnv) -> Result<Complex64> {
        let mut v = Complex64::new(1.0, 0.0);
        for (xi, a) in x.iter().zip(&self.vars) {
            if *a > 0 {
                v *= xi.powu(*a);
            }
        }
        if self.exps.is_empty() {
            return Ok(v);
        }
        let mut s = Complex64::new(0.0, 0.0);
        for (k, c) in &self.exps {
            s += c.eval(env) * k.eval(x, env)?;
        }
        if !(s.re.abs() <= EXP_OVERFLOW) || !s.im.is_finite() {
            return Err(Error::NumericRange(format!("exp argument {} out of range", s)));
        }
        Ok(v * s.exp())
    }

    /// Partial derivative with respect to variable `i`.
    fn diff(&self, vars: &Vars, i: usize) -> ExpPoly {
        let mut out = ExpPoly::zero(vars);
        if self.vars[i] > 0 {
            let mut lower = self.clone();
            lower.vars[i] -= 1;
            out.add_term(lower, Scalar::from_int(self.vars[i] as i64));
        }
        if !self.exps.is_empty() {
            let g = self.exponent(vars);
            let dg = g.diff(i);
            if !dg.is_zero() {
                let me = ExpPoly::from_monomial(vars, self.clone(), Scalar::one());
                out = &out + &(&me * &dg);
            }
        }
        out
    }
}

fn add_into(map: &mut BTreeMap<Monomial, Scalar>, m: Monomial, c: Scalar) {
    if c.is_zero() {
        return;
    }
    match map.get_mut(&m) {
        Some(v) => {
            *v = &*v + &c;
            if v.is_zero() {
                map.remove(&m);
            }
        }
        None => {
            map.insert(m, c);
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RingOp {
    Add,
    Sub,
    Mul,
    Neg,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ExpPoly {
    vars: Vars,
    terms: BTreeMap<Monomial, Scalar>,
}

impl ExpPoly {
    pub fn zero(vars: &Vars) -> Self {
        ExpPoly { vars: vars.clone(), terms: BTreeMap::new() }
    }

    pub fn constant(vars: &Vars, c: Scalar) -> Self {
        Self::from_monomial(vars, Monomial::one(vars.len()), c)
    }

    pub fn one(vars: &Vars) -> Self {
        Self::constant(vars, Scalar::one())
    }

    pub fn var(vars: &Vars, i: usize) -> Self {
        Self::from_monomial(vars, Monomial::var(vars.len(), i), Scalar::one())
    }

    pub fn from_monomial(vars: &Vars, m: Monomial, c: Scalar) -> Self {
        let mut p = Self::zero(vars);
        p.add_term(m, c);
        p
    }

    pub fn from_terms(vars: &Vars, it: impl IntoIterator<Item = (Monomial, Scalar)>) -> Self {
        let mut p = Self::zero(vars);
        for (m, c) in it {
            p.add_term(m, c);
        }
        p
    }

    fn add_term(&mut self, m: Monomial, c: Scalar) {
        debug_assert_eq!(m.nvars(), self.vars.len());
        add_into(&mut self.terms, m, c);
    }

    /// Parses with automatic variable declaration (`x`, `x1`, ... in natural
    /// order).
    pub fn parse(text: &str) -> Result<Self> {
        let e = parser::parse(text, &VarPolicy::Auto)?;
        normalize(&e, &Vars::from_expr(&e))
    }

    /// Parses in a fixed variable context; only the given names are accepted.
    pub fn parse_in(text: &str, vars: &Vars) -> Result<Self> {
        let e = parser::parse(text, &VarPolicy::Declared(vars.names().to_vec()))?;
        normalize(&e, vars)
    }

    pub fn vars(&self) -> &Vars {
        &self.vars
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Scalar)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| m.is_one())
    }

    pub fn constant_value(&self) -> Option<Scalar> {
        if self.is_constant() {
            Some(self.constant_term())
        } else {
            None
        }
    }

    pub fn constant_term(&self) -> Scalar {
        self.terms.get(&Monomial::one(self.nvars())).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn height(&self) -> u32 {
        self.terms.keys().map(|m| m.height).max().unwrap_or(0)
    }

    /// Whether variable `i` occurs anywhere, including inside exponentials.
    pub fn uses_var(&self, i: usize) -> bool {
        self.terms.keys().any(|m| m.uses_var(i))
    }

    /// `exp(self)`. Fails if `self` has a nonzero constant summand.
    pub fn exp(&self) -> Result<Self> {
        let c = self.constant_term();
        if !c.is_zero() {
            return Err(Error::MalformedTerm(format!(
                "exp({}) has the constant summand {}; exponentials of constants are not atoms, \
                 multiply by a constant coefficient (for example a log-constant) instead",
                self, c
            )));
        }
        let m = Monomial::from_parts(vec![0; self.nvars()], self.terms.clone());
        Ok(Self::from_monomial(&self.vars, m, Scalar::one()))
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        Self::from_terms(&self.vars, self.terms.iter().map(|(m, d)| (m.clone(), c * d)))
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one(&self.vars);
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Checked ring operation; `q` is ignored for [`RingOp::Neg`].
    pub fn ring_op(kind: RingOp, p: &ExpPoly, q: &ExpPoly) -> Result<ExpPoly> {
        if kind != RingOp::Neg && p.vars != q.vars {
            return Err(Error::ContextMismatch { left: p.vars.joined(), right: q.vars.joined() });
        }
        Ok(match kind {
            RingOp::Add => p + q,
            RingOp::Sub => p - q,
            RingOp::Mul => p * q,
            RingOp::Neg => -p,
        })
    }

    /// `Some((k, g))` iff `self = k * exp(g)` with `k` a nonzero constant.
    pub fn as_pure_exponential(&self) -> Result<Option<(Scalar, ExpPoly)>> {
        if self.is_zero() {
            return Err(Error::UndefinedInput("the zero polynomial has no exponential form".into()));
        }
        if self.terms.len() != 1 {
            return Ok(None);
        }
        let (m, c) = self.terms.iter().next().unwrap();
        if m.vars.iter().any(|&a| a > 0) {
            return Ok(None);
        }
        Ok(Some((c.clone(), m.exponent(&self.vars))))
    }

    pub fn diff(&self, i: usize) -> Self {
        let mut out = Self::zero(&self.vars);
        for (m, c) in &self.terms {
            out = &out + &m.diff(&self.vars, i).scale(c);
        }
        out
    }

    /// Substitutes `x_i -> f_i * x_i`.
    pub fn rescale(&self, f: &[BigRational]) -> Self {
        assert_eq!(f.len(), self.nvars(), "one factor per variable");
        assert!(f.iter().all(|q| !q.is_zero()), "rescaling factors must be nonzero");
        Self::from_terms(
            &self.vars,
            self.terms.iter().map(|(m, c)| {
                let (fm, m2) = m.rescale(f);
                (m2, c.scale_rational(&fm))
            }),
        )
    }

    /// Re-expresses `self` in a context containing all of its variables.
    pub fn embed(&self, target: &Vars) -> Result<Self> {
        let mut map = Vec::with_capacity(self.nvars());
        for name in self.vars.names() {
            match target.index_of(name) {
                Some(j) => map.push(j),
                None => {
                    return Err(Error::ContextMismatch { left: self.vars.joined(), right: target.joined() })
                }
            }
        }
        Ok(Self::from_terms(target, self.terms.iter().map(|(m, c)| (m.remap(&map, target.len()), c.clone()))))
    }

    pub fn eval(&self, x: &[Complex64], env: &BranchEnv) -> Result<Complex64> {
        if x.len() != self.nvars() {
            return Err(Error::Contract(format!("expected {} coordinates, got {}", self.nvars(), x.len())));
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for (m, c) in &self.terms {
            acc += c.eval(env) * m.eval(x, env)?;
        }
        Ok(acc)
    }

    /// All log-constants occurring in coefficients, at any depth.
    pub fn log_constants(&self) -> std::collections::BTreeSet<crate::scalar::LogConst> {
        fn walk(terms: &BTreeMap<Monomial, Scalar>, out: &mut std::collections::BTreeSet<crate::scalar::LogConst>) {
            for (m, c) in terms {
                out.extend(c.log_constants());
                walk(&m.exps, out);
            }
        }
        let mut out = Default::default();
        walk(&self.terms, &mut out);
        out
    }
}

/// Parses a variable-free expression as a scalar (inverse of `Scalar`'s
/// `Display`).
pub fn parse_scalar(text: &str) -> Result<Scalar> {
    let p = ExpPoly::parse_in(text, &Vars::new(Vec::new())?)?;
    p.constant_value().ok_or_else(|| Error::MalformedTerm(format!("{} is not a constant", text)))
}

/// Converts a parse tree into normal form over `vars`.
pub fn normalize(e: &Expr, vars: &Vars) -> Result<ExpPoly> {
    let constant = |s: Scalar| Ok(ExpPoly::constant(vars, s));
    match &e.kind {
        ExprKind::Int(n) => constant(Scalar::from_bigint(n.clone())),
        ExprKind::Rat(n, d) => constant(Scalar::from_rational(BigRational::new(n.clone(), d.clone()))),
        ExprKind::I => constant(Scalar::i()),
        ExprKind::Var(name) => match vars.index_of(name) {
            Some(i) => Ok(ExpPoly::var(vars, i)),
            None => Err(Error::ContextMismatch { left: name.clone(), right: vars.joined() }),
        },
        ExprKind::Neg(a) => Ok(-&normalize(a, vars)?),
        ExprKind::Add(a, b) => Ok(&normalize(a, vars)? + &normalize(b, vars)?),
        ExprKind::Sub(a, b) => Ok(&normalize(a, vars)? - &normalize(b, vars)?),
        ExprKind::Mul(a, b) => Ok(&normalize(a, vars)? * &normalize(b, vars)?),
        ExprKind::Div(..) => Err(Error::MalformedTerm("division is not a ring operation".into())),
        ExprKind::Pow(a, k) => Ok(normalize(a, vars)?.pow(*k)),
        ExprKind::Exp(a) => normalize(a, vars)?.exp(),
        ExprKind::Log { arg, branch } => {
            if let ExprKind::Root { index, coeffs } = &arg.kind {
                let cs = coeffs.iter().map(|c| constant_of(c, vars)).collect::<Result<Vec<_>>>()?;
                return constant(Scalar::log_root(cs, *index, *branch)?);
            }
            constant(Scalar::log(&constant_of(arg, vars)?, *branch)?)
        }
        ExprKind::Root { .. } => Err(Error::MalformedTerm("root(...) outside log(...)".into())),
    }
}

fn constant_of(e: &Expr, vars: &Vars) -> Result<Scalar> {
    normalize(e, vars)?
        .constant_value()
        .ok_or_else(|| Error::MalformedTerm("logarithms are only formed of constants".into()))
}

fn render_mono(vars: &Vars, m: &Monomial) -> String {
    let mut parts = Vec::new();
    for (name, a) in vars.names().iter().zip(&m.vars) {
        match a {
            0 => {}
            1 => parts.push(name.clone()),
            _ => parts.push(format!("{}^{}", name, a)),
        }
    }
    let mut atoms: Vec<(u32, String)> =
        m.exps.iter().map(|(k, c)| (k.height, render_term(vars, k, c))).collect();
    atoms.sort();
    parts.extend(atoms.into_iter().map(|(_, body)| format!("exp({})", body)));
    parts.join("*")
}

fn render_term(vars: &Vars, m: &Monomial, c: &Scalar) -> String {
    if m.is_one() {
        return c.to_string();
    }
    let mono = render_mono(vars, m);
    if c.is_one() {
        mono
    } else if (-c).is_one() {
        format!("-{}", mono)
    } else if c.is_single_product() {
        format!("{}*{}", c, mono)
    } else {
        format!("({})*{}", c, mono)
    }
}

/// Deterministic text form; parses back to the same normal form.
pub fn render(p: &ExpPoly) -> String {
    p.to_string()
}

impl fmt::Display for ExpPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.terms.iter().rev().enumerate() {
            let t = render_term(&self.vars, m, c);
            if i == 0 {
                write!(f, "{}", t)?;
            } else if let Some(rest) = t.strip_prefix('-') {
                write!(f, " - {}", rest)?;
            } else {
                write!(f, " + {}", t)?;
            }
        }
        Ok(())
    }
}

impl<'a> std::ops::Add<&'a ExpPoly> for &'a ExpPoly {
    type Output = ExpPoly;
    fn add(self, rhs: &ExpPoly) -> ExpPoly {
        assert_eq!(self.vars, rhs.vars, "variable contexts differ");
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl<'a> std::ops::Sub<&'a ExpPoly> for &'a ExpPoly {
    type Output = ExpPoly;
    fn sub(self, rhs: &ExpPoly) -> ExpPoly {
        self + &(-rhs)
    }
}

impl<'a> std::ops::Mul<&'a ExpPoly> for &'a ExpPoly {
    type Output = ExpPoly;
    fn mul(self, rhs: &ExpPoly) -> ExpPoly {
        assert_eq!(self.vars, rhs.vars, "variable contexts differ");
        let mut out = ExpPoly::zero(&self.vars);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &rhs.terms {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        out
    }
}

impl std::ops::Neg for &ExpPoly {
    type Output = ExpPoly;
    fn neg(self) -> ExpPoly {
        ExpPoly { vars: self.vars.clone(), terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect() }
    }
}
