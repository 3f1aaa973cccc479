//! Sparse multivariate polynomials over `Q(i)` in lexicographic order, with
//! exact division and recursive gcd. This is the arithmetic engine behind
//! factorization; logarithm constants are mapped to extra variables before
//! they reach this module.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::scalar::GaussRat;

pub type Exps = Vec<u32>;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MPoly {
    nvars: usize,
    terms: BTreeMap<Exps, GaussRat>,
}

fn add_exps(a: &[u32], b: &[u32]) -> Exps {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

fn divides(a: &[u32], b: &[u32]) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y)
}

impl MPoly {
    pub fn zero(nvars: usize) -> Self {
        Self { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: GaussRat) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(vec![0; nvars], c);
        p
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, GaussRat::one())
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Self::monomial(e, GaussRat::one())
    }

    pub fn monomial(exps: Exps, c: GaussRat) -> Self {
        let mut p = Self::zero(exps.len());
        p.add_term(exps, c);
        p
    }

    pub fn from_terms(nvars: usize, it: impl IntoIterator<Item = (Exps, GaussRat)>) -> Self {
        let mut p = Self::zero(nvars);
        for (e, c) in it {
            p.add_term(e, c);
        }
        p
    }

    pub fn add_term(&mut self, exps: Exps, c: GaussRat) {
        debug_assert_eq!(exps.len(), self.nvars);
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&exps) {
            Some(v) => {
                *v = &*v + &c;
                if v.is_zero() {
                    self.terms.remove(&exps);
                }
            }
            None => {
                self.terms.insert(exps, c);
            }
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exps, &GaussRat)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|e| e.iter().all(|&x| x == 0))
    }

    pub fn constant_value(&self) -> Option<GaussRat> {
        if !self.is_constant() {
            return None;
        }
        Some(self.terms.values().next().cloned().unwrap_or_else(GaussRat::zero))
    }

    /// Lexicographically largest term.
    pub fn leading(&self) -> Option<(&Exps, &GaussRat)> {
        self.terms.iter().next_back()
    }

    pub fn scale(&self, c: &GaussRat) -> Self {
        Self::from_terms(self.nvars, self.terms.iter().map(|(e, v)| (e.clone(), v * c)))
    }

    pub fn mul_term(&self, exps: &[u32], c: &GaussRat) -> Self {
        Self::from_terms(self.nvars, self.terms.iter().map(|(e, v)| (add_exps(e, exps), v * c)))
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one(self.nvars);
        let mut base = self.clone();
        let mut e = e;
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

    pub fn degree_in(&self, v: usize) -> u32 {
        self.terms.keys().map(|e| e[v]).max().unwrap_or(0)
    }

    pub fn min_degree_in(&self, v: usize) -> u32 {
        self.terms.keys().map(|e| e[v]).min().unwrap_or(0)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    pub fn vars_present(&self) -> Vec<usize> {
        (0..self.nvars).filter(|&v| self.degree_in(v) > 0).collect()
    }

    /// Coefficients as a polynomial in `v`; entry `k` multiplies `v^k`.
    pub fn coeffs_in(&self, v: usize) -> Vec<MPoly> {
        let d = self.degree_in(v) as usize;
        let mut out = vec![MPoly::zero(self.nvars); d + 1];
        for (e, c) in &self.terms {
            let mut e2 = e.clone();
            e2[v] = 0;
            out[e[v] as usize].add_term(e2, c.clone());
        }
        out
    }

    pub fn from_coeffs_in(nvars: usize, v: usize, coeffs: &[MPoly]) -> Self {
        let mut out = MPoly::zero(nvars);
        for (k, c) in coeffs.iter().enumerate() {
            for (e, val) in &c.terms {
                let mut e2 = e.clone();
                e2[v] += k as u32;
                out.add_term(e2, val.clone());
            }
        }
        out
    }

    pub fn lc_in(&self, v: usize) -> MPoly {
        self.coeffs_in(v).pop().unwrap_or_else(|| MPoly::zero(self.nvars))
    }

    pub fn derivative(&self, v: usize) -> Self {
        Self::from_terms(
            self.nvars,
            self.terms.iter().filter(|(e, _)| e[v] > 0).map(|(e, c)| {
                let mut e2 = e.clone();
                e2[v] -= 1;
                (e2, c * &GaussRat::from_int(e[v] as i64))
            }),
        )
    }

    /// Substitutes the constant `c` for variable `v`.
    pub fn eval_var(&self, v: usize, c: &GaussRat) -> Self {
        let coeffs = self.coeffs_in(v);
        let mut acc = MPoly::zero(self.nvars);
        for k in coeffs.iter().rev() {
            acc = &acc.scale(c) + k;
        }
        acc
    }

    /// Substitutes the polynomial `q` for variable `v`.
    pub fn compose_var(&self, v: usize, q: &MPoly) -> Self {
        let coeffs = self.coeffs_in(v);
        let mut acc = MPoly::zero(self.nvars);
        for k in coeffs.iter().rev() {
            acc = &(&acc * q) + k;
        }
        acc
    }

    pub fn eval_complex(&self, pt: &[Complex64]) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (e, c) in &self.terms {
            let mut t = c.to_complex();
            for (i, &k) in e.iter().enumerate() {
                if k > 0 {
                    t *= pt[i].powu(k);
                }
            }
            acc += t;
        }
        acc
    }

    /// Exact quotient `self / d`, or `None` if `d` does not divide `self`.
    pub fn div_exact(&self, d: &MPoly) -> Option<MPoly> {
        assert!(!d.is_zero(), "division by the zero polynomial");
        let (de, dc) = d.leading().map(|(e, c)| (e.clone(), c.clone()))?;
        let dinv = dc.inv()?;
        let mut q = MPoly::zero(self.nvars);
        let mut r = self.clone();
        while let Some((re, rc)) = r.leading().map(|(e, c)| (e.clone(), c.clone())) {
            if !divides(&de, &re) {
                return None;
            }
            let me: Exps = re.iter().zip(&de).map(|(a, b)| a - b).collect();
            let mc = &rc * &dinv;
            for (e, c) in &d.terms {
                r.add_term(add_exps(e, &me), -(c * &mc));
            }
            q.add_term(me, mc);
        }
        Some(q)
    }

    /// Divides by the leading coefficient.
    pub fn monic(&self) -> Self {
        match self.leading() {
            Some((_, c)) => self.scale(&c.inv().expect("nonzero leading coefficient")),
            None => self.clone(),
        }
    }

    /// Pseudo-remainder of `self` by `g` as polynomials in `v`: the
    /// remainder of `lc(g)^(deg self - deg g + 1) * self`.
    pub fn prem(&self, g: &MPoly, v: usize) -> MPoly {
        let dg = g.degree_in(v);
        let lcg = g.lc_in(v);
        let mut r = self.clone();
        let mut left = (self.degree_in(v) + 1).saturating_sub(dg);
        while !r.is_zero() && r.degree_in(v) >= dg {
            let dr = r.degree_in(v);
            let lcr = r.lc_in(v);
            let mut shift = vec![0; self.nvars];
            shift[v] = dr - dg;
            let t = &lcr * &g.mul_term(&shift, &GaussRat::one());
            r = &(&lcg * &r) - &t;
            left -= 1;
        }
        &r * &lcg.pow(left)
    }

    /// Gcd of the coefficients in `v`; normalized monic.
    pub fn content_in(&self, v: usize) -> MPoly {
        let mut g = MPoly::zero(self.nvars);
        for c in self.coeffs_in(v) {
            if c.is_zero() {
                continue;
            }
            g = MPoly::gcd(&g, &c);
            if g.is_constant() {
                return MPoly::one(self.nvars);
            }
        }
        g
    }

    pub fn primitive_in(&self, v: usize) -> MPoly {
        if self.is_zero() {
            return self.clone();
        }
        let c = self.content_in(v);
        self.div_exact(&c).expect("content divides")
    }

    /// Greatest common divisor, normalized monic (lex leading coefficient 1).
    pub fn gcd(a: &MPoly, b: &MPoly) -> MPoly {
        let n = a.nvars;
        if a.is_zero() {
            return b.monic();
        }
        if b.is_zero() {
            return a.monic();
        }
        if a.is_constant() || b.is_constant() {
            return MPoly::one(n);
        }
        let mut present = a.vars_present();
        present.extend(b.vars_present());
        let v = *present.iter().max().expect("nonconstant");
        let (da, db) = (a.degree_in(v), b.degree_in(v));
        if da == 0 {
            return MPoly::gcd(a, &b.content_in(v));
        }
        if db == 0 {
            return MPoly::gcd(&a.content_in(v), b);
        }
        let ca = a.content_in(v);
        let cb = b.content_in(v);
        let c = MPoly::gcd(&ca, &cb);
        let mut f = a.div_exact(&ca).expect("content divides");
        let mut g = b.div_exact(&cb).expect("content divides");
        if f.degree_in(v) < g.degree_in(v) {
            std::mem::swap(&mut f, &mut g);
        }
        // subresultant remainder sequence: exact divisions keep coefficient
        // degrees linear without a content computation per step
        let (mut gg, mut h) = (MPoly::one(n), MPoly::one(n));
        loop {
            let delta = f.degree_in(v) - g.degree_in(v);
            let r = f.prem(&g, v);
            if r.is_zero() {
                break;
            }
            if r.degree_in(v) == 0 {
                return c.monic();
            }
            let d = &gg * &h.pow(delta);
            f = g;
            g = r.div_exact(&d).expect("subresultant division is exact");
            gg = f.lc_in(v);
            h = if delta == 0 {
                h
            } else {
                gg.pow(delta).div_exact(&h.pow(delta - 1)).expect("subresultant division is exact")
            };
        }
        let pf = g.primitive_in(v);
        (&c * &pf).monic()
    }

    /// Clears denominators and the rational content and picks the unit in
    /// `{1, -1, i, -i}` that makes the lex-leading coefficient have positive
    /// real part (or positive imaginary part when real part is zero). Returns
    /// `(c, p)` with `self == c * p`.
    pub fn normalize_associate(&self) -> (GaussRat, MPoly) {
        if self.is_zero() {
            return (GaussRat::one(), self.clone());
        }
        let den = self.terms.values().fold(BigInt::one(), |acc, c| acc.lcm(&c.denom_lcm()));
        let mut g = BigInt::zero();
        for c in self.terms.values() {
            for part in [c.re(), c.im()] {
                let v = (part * BigRational::from_integer(den.clone())).to_integer();
                g = g.gcd(&v);
            }
        }
        let mut factor = GaussRat::from_rational(BigRational::new(den, g));
        let lead = self.leading().map(|(_, c)| c * &factor).expect("nonzero");
        let unit = if lead.re().is_positive() {
            GaussRat::one()
        } else if lead.re().is_negative() {
            GaussRat::from_int(-1)
        } else if lead.im().is_positive() {
            // i * (b i) = -b with b > 0: multiply by -i to get +b
            -GaussRat::i()
        } else {
            GaussRat::i()
        };
        factor = &factor * &unit;
        let p = self.scale(&factor);
        (factor.inv().expect("nonzero"), p)
    }
}

impl fmt::Display for MPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in self.terms.iter().rev() {
            let mono: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &k)| k > 0)
                .map(|(i, &k)| if k == 1 { format!("v{}", i) } else { format!("v{}^{}", i, k) })
                .collect();
            let coef = if c.is_real() || c.is_imaginary() {
                c.to_string()
            } else {
                format!("({})", c)
            };
            let t = if mono.is_empty() {
                coef
            } else if c.is_one() {
                mono.join("*")
            } else if (-c).is_one() {
                format!("-{}", mono.join("*"))
            } else {
                format!("{}*{}", coef, mono.join("*"))
            };
            if first {
                write!(f, "{}", t)?;
                first = false;
            } else if let Some(rest) = t.strip_prefix('-') {
                write!(f, " - {}", rest)?;
            } else {
                write!(f, " + {}", t)?;
            }
        }
        Ok(())
    }
}

impl<'a> Add<&'a MPoly> for &'a MPoly {
    type Output = MPoly;
    fn add(self, o: &MPoly) -> MPoly {
        let mut out = self.clone();
        for (e, c) in &o.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }
}

impl<'a> Sub<&'a MPoly> for &'a MPoly {
    type Output = MPoly;
    fn sub(self, o: &MPoly) -> MPoly {
        let mut out = self.clone();
        for (e, c) in &o.terms {
            out.add_term(e.clone(), -c);
        }
        out
    }
}

impl<'a> Mul<&'a MPoly> for &'a MPoly {
    type Output = MPoly;
    fn mul(self, o: &MPoly) -> MPoly {
        let mut out = MPoly::zero(self.nvars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &o.terms {
                out.add_term(add_exps(e1, e2), c1 * c2);
            }
        }
        out
    }
}

impl Neg for &MPoly {
    type Output = MPoly;
    fn neg(self) -> MPoly {
        self.scale(&GaussRat::from_int(-1))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(n: usize, i: usize) -> MPoly {
        MPoly::var(n, i)
    }

    fn c(n: usize, k: i64) -> MPoly {
        MPoly::constant(n, GaussRat::from_int(k))
    }

    #[test]
    fn exact_division_and_failure() {
        let x = v(2, 0);
        let y = v(2, 1);
        let a = &(&x + &y) * &(&x - &y);
        let q = a.div_exact(&(&x + &y)).unwrap();
        assert_eq!(q, &x - &y);
        assert!(a.div_exact(&(&x + &c(2, 1))).is_none());
    }

    #[test]
    fn gcd_of_products() {
        let x = v(3, 0);
        let y = v(3, 1);
        let z = v(3, 2);
        let common = &(&(&x * &y) + &z) + &c(3, 2);
        let a = &common * &(&x - &z);
        let b = &common * &(&(&y * &y) + &c(3, 1));
        let g = MPoly::gcd(&a, &b);
        assert_eq!(g, common.monic());
        assert!(MPoly::gcd(&(&x + &c(3, 1)), &(&x - &c(3, 1))).is_constant());
    }

    #[test]
    fn gcd_with_content() {
        let x = v(2, 0);
        let y = v(2, 1);
        // (y+1)x and (y+1): gcd is y+1
        let a = &(&y + &c(2, 1)) * &x;
        let b = &y + &c(2, 1);
        assert_eq!(MPoly::gcd(&a, &b), b);
        assert_eq!(a.content_in(0), b);
    }

    #[test]
    fn compose_is_taylor_shift() {
        let x = v(1, 0);
        let p = &(&x * &x) - &c(1, 4);
        let shifted = p.compose_var(0, &(&x + &c(1, 2)));
        // (x+2)^2 - 4 = x^2 + 4x
        assert_eq!(shifted, &(&x * &x) + &x.scale(&GaussRat::from_int(4)));
    }

    #[test]
    fn associate_normalization() {
        let x = v(1, 0);
        let p = (&x.scale(&GaussRat::from_frac(-1, 2))) + &c(1, 1);
        let (u, q) = p.normalize_associate();
        assert_eq!(q, &x - &c(1, 2));
        assert_eq!(q.scale(&u), p);
    }
}
