//! Sparse Laurent polynomials over [`Scalar`].
//!
//! Used for the graph polynomials and the hypersurface polynomial of a
//! witness variety. Exponents are signed; callers keep the `x` block
//! nonnegative.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;

use crate::scalar::{BranchEnv, Scalar};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LPoly {
    nvars: usize,
    terms: BTreeMap<Vec<i32>, Scalar>,
}

impl LPoly {
    pub fn zero(nvars: usize) -> Self {
        LPoly { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: Scalar) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(vec![0; nvars], c);
        p
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        let mut p = Self::zero(nvars);
        p.add_term(e, Scalar::one());
        p
    }

    pub fn from_terms(nvars: usize, it: impl IntoIterator<Item = (Vec<i32>, Scalar)>) -> Self {
        let mut p = Self::zero(nvars);
        for (e, c) in it {
            p.add_term(e, c);
        }
        p
    }

    pub fn add_term(&mut self, exps: Vec<i32>, c: Scalar) {
        assert_eq!(exps.len(), self.nvars, "exponent vector length");
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

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Vec<i32>, &Scalar)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn constant_value(&self) -> Option<Scalar> {
        match self.terms.len() {
            0 => Some(Scalar::zero()),
            1 => {
                let (e, c) = self.terms.iter().next().unwrap();
                e.iter().all(|&a| a == 0).then(|| c.clone())
            }
            _ => None,
        }
    }

    /// Variables with a nonzero exponent in some term.
    pub fn vars_present(&self) -> Vec<usize> {
        (0..self.nvars).filter(|&v| self.terms.keys().any(|e| e[v] != 0)).collect()
    }

    pub fn degree_range(&self, v: usize) -> Option<(i32, i32)> {
        let lo = self.terms.keys().map(|e| e[v]).min()?;
        let hi = self.terms.keys().map(|e| e[v]).max()?;
        Some((lo, hi))
    }

    /// A single term whose exponents vanish outside `block`.
    pub fn is_monomial_in(&self, block: std::ops::Range<usize>) -> bool {
        self.terms.len() == 1
            && self.terms.keys().all(|e| e.iter().enumerate().all(|(i, &a)| a == 0 || block.contains(&i)))
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        Self::from_terms(self.nvars, self.terms.iter().map(|(e, d)| (e.clone(), c * d)))
    }

    /// Multiplies by the monomial with exponent vector `shift`.
    pub fn shift(&self, shift: &[i32]) -> Self {
        Self::from_terms(
            self.nvars,
            self.terms.iter().map(|(e, c)| (e.iter().zip(shift).map(|(a, b)| a + b).collect(), c.clone())),
        )
    }

    pub fn derivative(&self, v: usize) -> Self {
        Self::from_terms(
            self.nvars,
            self.terms.iter().filter(|(e, _)| e[v] != 0).map(|(e, c)| {
                let mut e2 = e.clone();
                e2[v] -= 1;
                (e2, c * &Scalar::from_int(e[v] as i64))
            }),
        )
    }

    pub fn eval(&self, pt: &[Complex64], env: &BranchEnv) -> Complex64 {
        assert_eq!(pt.len(), self.nvars, "point dimension");
        let mut acc = Complex64::new(0.0, 0.0);
        for (e, c) in &self.terms {
            let mut t = c.eval(env);
            for (z, &a) in pt.iter().zip(e) {
                if a > 0 {
                    t *= z.powu(a as u32);
                } else if a < 0 {
                    t /= z.powu((-a) as u32);
                }
            }
            acc += t;
        }
        acc
    }

    /// Coefficients of the univariate polynomial in `v` obtained by fixing
    /// every other coordinate at `pt`, together with the lowest exponent:
    /// `self = v^low * sum coeffs[k] v^k`.
    pub fn univariate_at(&self, v: usize, pt: &[Complex64], env: &BranchEnv) -> (i32, Vec<Complex64>) {
        let Some((lo, hi)) = self.degree_range(v) else {
            return (0, Vec::new());
        };
        let mut coeffs = vec![Complex64::new(0.0, 0.0); (hi - lo + 1) as usize];
        for (e, c) in &self.terms {
            let mut t = c.eval(env);
            for (i, (z, &a)) in pt.iter().zip(e).enumerate() {
                if i == v || a == 0 {
                    continue;
                }
                if a > 0 {
                    t *= z.powu(a as u32);
                } else {
                    t /= z.powu((-a) as u32);
                }
            }
            coeffs[(e[v] - lo) as usize] += t;
        }
        (lo, coeffs)
    }

    pub fn render(&self, names: &[String]) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut out = String::new();
        // later coordinates lead, so y-terms print before x-terms
        let mut order: Vec<(&Vec<i32>, &Scalar)> = self.terms.iter().collect();
        order.sort_by(|a, b| b.0.iter().rev().cmp(a.0.iter().rev()));
        for (i, (e, c)) in order.into_iter().enumerate() {
            let mono: Vec<String> = names
                .iter()
                .zip(e)
                .filter(|(_, &a)| a != 0)
                .map(|(n, &a)| if a == 1 { n.clone() } else if a < 0 { format!("{}^({})", n, a) } else { format!("{}^{}", n, a) })
                .collect();
            let t = if mono.is_empty() {
                c.to_string()
            } else if c.is_one() {
                mono.join("*")
            } else if (-c).is_one() {
                format!("-{}", mono.join("*"))
            } else if c.is_single_product() {
                format!("{}*{}", c, mono.join("*"))
            } else {
                format!("({})*{}", c, mono.join("*"))
            };
            if i == 0 {
                out.push_str(&t);
            } else if let Some(rest) = t.strip_prefix('-') {
                out.push_str(" - ");
                out.push_str(rest);
            } else {
                out.push_str(" + ");
                out.push_str(&t);
            }
        }
        out
    }
}

impl fmt::Display for LPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = (0..self.nvars).map(|i| format!("v{}", i)).collect();
        write!(f, "{}", self.render(&names))
    }
}

impl<'a> std::ops::Add<&'a LPoly> for &'a LPoly {
    type Output = LPoly;
    fn add(self, rhs: &LPoly) -> LPoly {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }
}

impl<'a> std::ops::Sub<&'a LPoly> for &'a LPoly {
    type Output = LPoly;
    fn sub(self, rhs: &LPoly) -> LPoly {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), -c);
        }
        out
    }
}

impl<'a> std::ops::Mul<&'a LPoly> for &'a LPoly {
    type Output = LPoly;
    fn mul(self, rhs: &LPoly) -> LPoly {
        let mut out = LPoly::zero(self.nvars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &rhs.terms {
                out.add_term(e1.iter().zip(e2).map(|(a, b)| a + b).collect(), c1 * c2);
            }
        }
        out
    }
}
