//! Exact coefficients.
//!
//! The coefficient field is modelled as `Q(i)` extended by named logarithm
//! constants `log(c)`. Logarithm constants are treated as algebraically
//! independent indeterminates, so a [`Scalar`] is a polynomial in them with
//! Gaussian rational coefficients. Every operation is exact; numeric values
//! are only produced by [`Scalar::eval`].

use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::PI;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::roots;

/// `a + b i` with `a, b` rational.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GaussRat {
    re: BigRational,
    im: BigRational,
}

impl GaussRat {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        Self { re, im }
    }

    pub fn from_rational(re: BigRational) -> Self {
        Self { re, im: BigRational::zero() }
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_rational(BigRational::from_integer(n.into()))
    }

    pub fn from_frac(num: i64, den: i64) -> Self {
        Self::from_rational(BigRational::new(num.into(), den.into()))
    }

    pub fn zero() -> Self {
        Self::from_int(0)
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    pub fn i() -> Self {
        Self { re: BigRational::zero(), im: BigRational::one() }
    }

    pub fn re(&self) -> &BigRational {
        &self.re
    }

    pub fn im(&self) -> &BigRational {
        &self.im
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.re.is_one() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn is_imaginary(&self) -> bool {
        self.re.is_zero() && !self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        Self { re: self.re.clone(), im: -self.im.clone() }
    }

    pub fn norm_sqr(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let n = self.norm_sqr();
        Some(Self { re: &self.re / &n, im: -&self.im / &n })
    }

    pub fn div(&self, other: &Self) -> Option<Self> {
        other.inv().map(|inv| self * &inv)
    }

    /// Least common multiple of the denominators of both parts.
    pub fn denom_lcm(&self) -> BigInt {
        self.re.denom().lcm(self.im.denom())
    }

    /// Both parts are integers.
    pub fn is_gauss_int(&self) -> bool {
        self.re.is_integer() && self.im.is_integer()
    }

    pub fn to_complex(&self) -> Complex64 {
        Complex64::new(
            self.re.to_f64().unwrap_or(f64::NAN),
            self.im.to_f64().unwrap_or(f64::NAN),
        )
    }

    /// Nearest Gaussian integer to a complex number.
    pub fn round_complex(z: Complex64) -> Option<Self> {
        if !z.re.is_finite() || !z.im.is_finite() {
            return None;
        }
        let re = BigRational::from_float(z.re.round())?;
        let im = BigRational::from_float(z.im.round())?;
        Some(Self { re, im })
    }

    /// True when the leading nonzero part is negative, used to pick a sign
    /// when rendering.
    pub fn looks_negative(&self) -> bool {
        if self.re.is_zero() {
            self.im.is_negative()
        } else {
            self.re.is_negative()
        }
    }
}

impl fmt::Display for GaussRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            return write!(f, "{}", self.re);
        }
        let imag = |f: &mut fmt::Formatter<'_>, v: &BigRational| -> fmt::Result {
            if v.is_one() {
                write!(f, "i")
            } else if *v == -BigRational::one() {
                write!(f, "-i")
            } else {
                write!(f, "{}*i", v)
            }
        };
        if self.re.is_zero() {
            return imag(f, &self.im);
        }
        write!(f, "{}", self.re)?;
        if self.im.is_negative() {
            write!(f, " - ")?;
            imag(f, &-self.im.clone())
        } else {
            write!(f, " + ")?;
            imag(f, &self.im)
        }
    }
}

impl<'a> Add<&'a GaussRat> for &'a GaussRat {
    type Output = GaussRat;
    fn add(self, o: &GaussRat) -> GaussRat {
        GaussRat { re: &self.re + &o.re, im: &self.im + &o.im }
    }
}

impl<'a> Sub<&'a GaussRat> for &'a GaussRat {
    type Output = GaussRat;
    fn sub(self, o: &GaussRat) -> GaussRat {
        GaussRat { re: &self.re - &o.re, im: &self.im - &o.im }
    }
}

impl<'a> Mul<&'a GaussRat> for &'a GaussRat {
    type Output = GaussRat;
    fn mul(self, o: &GaussRat) -> GaussRat {
        GaussRat {
            re: &self.re * &o.re - &self.im * &o.im,
            im: &self.re * &o.im + &self.im * &o.re,
        }
    }
}

impl Neg for &GaussRat {
    type Output = GaussRat;
    fn neg(self) -> GaussRat {
        GaussRat { re: -self.re.clone(), im: -self.im.clone() }
    }
}

impl Neg for GaussRat {
    type Output = GaussRat;
    fn neg(self) -> GaussRat {
        -&self
    }
}

/// Argument of a logarithm constant.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LogArg {
    /// An exact nonzero scalar.
    Value(Scalar),
    /// The `index`-th root (in the order produced by [`sorted_roots`]) of
    /// `coeffs[0] + coeffs[1] Y + ... + coeffs[d] Y^d`. Arises when a coset
    /// constant is algebraic over the coefficient field.
    Root { coeffs: Vec<Scalar>, index: usize },
}

/// A named constant `log(arg) + 2 pi i * branch`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LogConst {
    arg: LogArg,
    branch: i64,
}

impl LogConst {
    pub fn arg(&self) -> &LogArg {
        &self.arg
    }

    pub fn branch(&self) -> i64 {
        self.branch
    }

    fn eval(&self, env: &BranchEnv) -> Complex64 {
        let base = match &self.arg {
            LogArg::Value(s) => s.eval(env),
            LogArg::Root { coeffs, index } => {
                let cs: Vec<Complex64> = coeffs.iter().map(|c| c.eval(env)).collect();
                let rs = sorted_roots(&cs);
                rs.get(*index).copied().unwrap_or(Complex64::new(f64::NAN, f64::NAN))
            }
        };
        let k = (self.branch + env.shift(self)) as f64;
        base.ln() + Complex64::new(0.0, 2.0 * PI * k)
    }
}

impl fmt::Display for LogConst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "log")?;
        if self.branch != 0 {
            write!(f, "[{}]", self.branch)?;
        }
        match &self.arg {
            LogArg::Value(s) => write!(f, "({})", s),
            LogArg::Root { coeffs, index } => {
                write!(f, "(root({}", index)?;
                for c in coeffs {
                    write!(f, ", {}", c)?;
                }
                write!(f, "))")
            }
        }
    }
}

/// Roots of `coeffs[0] + ... + coeffs[d] Y^d` sorted by real part, then
/// imaginary part. Defines the meaning of [`LogArg::Root`] indices.
pub fn sorted_roots(coeffs: &[Complex64]) -> Vec<Complex64> {
    let mut rs = roots::poly_roots(coeffs);
    rs.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    rs
}

/// Per-constant branch overrides used during numeric evaluation. A shift of
/// `k` adds `2 pi i k` to the constant on top of its own branch index.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BranchEnv {
    shifts: BTreeMap<LogConst, i64>,
}

impl BranchEnv {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_shift(mut self, c: LogConst, k: i64) -> Self {
        self.shifts.insert(c, k);
        self
    }

    pub fn shift(&self, c: &LogConst) -> i64 {
        self.shifts.get(c).copied().unwrap_or(0)
    }
}

/// Product of logarithm constants with positive exponents.
pub type LogMono = BTreeMap<LogConst, u32>;

/// Polynomial in logarithm constants over `Q(i)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Scalar {
    terms: BTreeMap<LogMono, GaussRat>,
}

impl Scalar {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::from_gauss(GaussRat::one())
    }

    pub fn i() -> Self {
        Self::from_gauss(GaussRat::i())
    }

    pub fn from_gauss(g: GaussRat) -> Self {
        let mut terms = BTreeMap::new();
        if !g.is_zero() {
            terms.insert(LogMono::new(), g);
        }
        Self { terms }
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_gauss(GaussRat::from_int(n))
    }

    pub fn from_rational(q: BigRational) -> Self {
        Self::from_gauss(GaussRat::from_rational(q))
    }

    pub fn from_bigint(n: BigInt) -> Self {
        Self::from_rational(BigRational::from_integer(n))
    }

    pub fn from_terms(it: impl IntoIterator<Item = (LogMono, GaussRat)>) -> Self {
        let mut s = Self::zero();
        for (m, c) in it {
            s.add_term(m, c);
        }
        s
    }

    /// `log(c)` on the given branch. `log(1)` on the principal branch is 0.
    pub fn log(c: &Scalar, branch: i64) -> Result<Scalar> {
        if c.is_zero() {
            return Err(Error::UndefinedInput("log(0)".into()));
        }
        if c.is_one() && branch == 0 {
            return Ok(Scalar::zero());
        }
        Ok(Self::log_const(LogConst { arg: LogArg::Value(c.clone()), branch }))
    }

    /// `log` of the `index`-th root of a univariate polynomial.
    pub fn log_root(coeffs: Vec<Scalar>, index: usize, branch: i64) -> Result<Scalar> {
        let deg = coeffs.iter().rposition(|c| !c.is_zero()).unwrap_or(0);
        if deg == 0 {
            return Err(Error::UndefinedInput("root of a constant polynomial".into()));
        }
        if index >= deg {
            return Err(Error::UndefinedInput(format!(
                "root index {} out of range for degree {}",
                index, deg
            )));
        }
        if coeffs[0].is_zero() {
            return Err(Error::UndefinedInput("root polynomial vanishes at 0".into()));
        }
        let coeffs = coeffs[..=deg].to_vec();
        Ok(Self::log_const(LogConst { arg: LogArg::Root { coeffs, index }, branch }))
    }

    pub fn log_const(c: LogConst) -> Scalar {
        let mut m = LogMono::new();
        m.insert(c, 1);
        Self::from_terms([(m, GaussRat::one())])
    }

    fn add_term(&mut self, m: LogMono, c: GaussRat) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(v) => {
                *v = &*v + &c;
                if v.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&LogMono, &GaussRat)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.as_gauss().map(|g| g.is_one()).unwrap_or(false)
    }

    /// The value as a Gaussian rational when no logarithm constants occur.
    pub fn as_gauss(&self) -> Option<GaussRat> {
        match self.terms.len() {
            0 => Some(GaussRat::zero()),
            1 => self.terms.get(&LogMono::new()).cloned(),
            _ => None,
        }
    }

    pub fn as_rational(&self) -> Option<BigRational> {
        self.as_gauss().filter(|g| g.is_real()).map(|g| g.re().clone())
    }

    pub fn is_number(&self) -> bool {
        self.as_gauss().is_some()
    }

    pub fn scale(&self, g: &GaussRat) -> Scalar {
        Self::from_terms(self.terms.iter().map(|(m, c)| (m.clone(), c * g)))
    }

    pub fn scale_rational(&self, q: &BigRational) -> Scalar {
        self.scale(&GaussRat::from_rational(q.clone()))
    }

    /// Inverse; defined only for nonzero Gaussian rationals since logarithm
    /// constants are transcendental indeterminates.
    pub fn inv(&self) -> Option<Scalar> {
        self.as_gauss().and_then(|g| g.inv()).map(Self::from_gauss)
    }

    pub fn pow(&self, e: u32) -> Scalar {
        let mut acc = Scalar::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// All logarithm constants occurring at the top level.
    pub fn log_constants(&self) -> BTreeSet<LogConst> {
        self.terms.keys().flat_map(|m| m.keys().cloned()).collect()
    }

    /// Single-term scalar whose coefficient is negative by
    /// [`GaussRat::looks_negative`]. Used for sign-aware rendering.
    pub fn looks_negative(&self) -> bool {
        self.terms.len() == 1
            && self.terms.values().next().map(|c| c.looks_negative()).unwrap_or(false)
    }

    /// Renders without surrounding parentheses iff the result is a single
    /// product, which is the case for one term with a real or imaginary
    /// coefficient.
    pub fn is_single_product(&self) -> bool {
        self.terms.len() == 1
            && self.terms.values().next().map(|c| c.is_real() || c.is_imaginary()).unwrap_or(false)
    }

    /// Q-coordinates: `(log monomial, imaginary part?, value)` per nonzero
    /// rational component.
    pub fn rational_coordinates(&self) -> Vec<(LogMono, bool, BigRational)> {
        let mut out = Vec::new();
        for (m, c) in &self.terms {
            if !c.re().is_zero() {
                out.push((m.clone(), false, c.re().clone()));
            }
            if !c.im().is_zero() {
                out.push((m.clone(), true, c.im().clone()));
            }
        }
        out
    }

    pub fn eval(&self, env: &BranchEnv) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (m, c) in &self.terms {
            let mut t = c.to_complex();
            for (l, e) in m {
                t *= l.eval(env).powu(*e);
            }
            acc += t;
        }
        acc
    }

    /// Least common multiple of all denominators.
    pub fn denom_lcm(&self) -> BigInt {
        self.terms.values().fold(BigInt::one(), |acc, c| acc.lcm(&c.denom_lcm()))
    }
}

impl From<GaussRat> for Scalar {
    fn from(g: GaussRat) -> Self {
        Scalar::from_gauss(g)
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::from_int(n)
    }
}

fn render_log_mono(m: &LogMono) -> String {
    m.iter()
        .map(|(l, e)| if *e == 1 { l.to_string() } else { format!("{}^{}", l, e) })
        .collect::<Vec<_>>()
        .join("*")
}

fn render_term(m: &LogMono, c: &GaussRat) -> String {
    if m.is_empty() {
        return c.to_string();
    }
    let mono = render_log_mono(m);
    if c.is_one() {
        mono
    } else if (-c).is_one() {
        format!("-{}", mono)
    } else if c.is_real() || c.is_imaginary() {
        format!("{}*{}", c, mono)
    } else {
        format!("({})*{}", c, mono)
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in &self.terms {
            let t = render_term(m, c);
            if first {
                write!(f, "{}", t)?;
                first = false;
            } else if let Some(rest) = t.strip_prefix('-') {
                write!(f, " - {}", rest)?;
            } else if c.is_real() || c.is_imaginary() || !m.is_empty() {
                write!(f, " + {}", t)?;
            } else {
                // a + b*i summand inside a longer sum
                write!(f, " + ({})", t)?;
            }
        }
        Ok(())
    }
}

impl<'a> Add<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn add(self, o: &Scalar) -> Scalar {
        let mut out = self.clone();
        for (m, c) in &o.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl<'a> Sub<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn sub(self, o: &Scalar) -> Scalar {
        let mut out = self.clone();
        for (m, c) in &o.terms {
            out.add_term(m.clone(), -c);
        }
        out
    }
}

impl<'a> Mul<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn mul(self, o: &Scalar) -> Scalar {
        let mut out = Scalar::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &o.terms {
                let mut m = m1.clone();
                for (l, e) in m2 {
                    *m.entry(l.clone()).or_insert(0) += e;
                }
                out.add_term(m, c1 * c2);
            }
        }
        out
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar::from_terms(self.terms.iter().map(|(m, c)| (m.clone(), -c)))
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

macro_rules! forward_owned {
    ($t:ty, $tr:ident, $f:ident) => {
        impl $tr<$t> for $t {
            type Output = $t;
            fn $f(self, o: $t) -> $t {
                (&self).$f(&o)
            }
        }
        impl<'a> $tr<&'a $t> for $t {
            type Output = $t;
            fn $f(self, o: &'a $t) -> $t {
                (&self).$f(o)
            }
        }
    };
}

forward_owned!(Scalar, Add, add);
forward_owned!(Scalar, Sub, sub);
forward_owned!(Scalar, Mul, mul);
forward_owned!(GaussRat, Add, add);
forward_owned!(GaussRat, Sub, sub);
forward_owned!(GaussRat, Mul, mul);
