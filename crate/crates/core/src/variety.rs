//! Witness varieties.
//!
//! For a refined decomposition `t_1..t_alpha` with `L = 1` (the first `n`
//! bricks are the variables), the variety lives in coordinates
//! `(x_1..x_n, w_{n+1}..w_alpha, y_1..y_alpha)` and is cut out by
//! `w_i = p_i(x, y)` and `p*(x, y) = 0`, where substituting `y_j = exp(t_j)`
//! turns `p_i` into `t_i` and `p*` into `p`. Zeros of `p` correspond to
//! points of the variety on the exponential graph.
//!
//! The polynomials are Laurent in `y`: an exponent `-t_j` contributes
//! `y_j^-1`, which is harmless on the torus `y != 0`.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::decomposition::Decomposition;
use crate::error::{Error, Result};
use crate::exppoly::{ExpPoly, EXP_OVERFLOW};
use crate::lpoly::LPoly;
use crate::scalar::{BranchEnv, Scalar};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GPoint {
    pub x: Vec<Complex64>,
    pub w: Vec<Complex64>,
    pub y: Vec<Complex64>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VarietySystem {
    target: ExpPoly,
    bricks: Vec<ExpPoly>,
    n: usize,
    graph: Vec<LPoly>,
    pstar: LPoly,
    no_zeros: bool,
}

/// Rewrites `q` as a Laurent polynomial in `(x, y_1..y_upto)` using
/// `exp(sum k_j t_j) = prod y_j^k_j`.
fn to_lpoly(q: &ExpPoly, bricks: &Decomposition, upto: usize, alpha: usize) -> Result<LPoly> {
    let n = bricks.n();
    let mut out = LPoly::zero(n + alpha);
    for (m, c) in q.terms() {
        let g = m.exponent(q.vars());
        let k = bricks.express(&g, upto).ok_or_else(|| {
            Error::ConstructionBug(format!("exponent {} is not an integer combination of the bricks", g))
        })?;
        let mut e = vec![0i32; n + alpha];
        for (i, a) in m.var_exps().iter().enumerate() {
            e[i] = *a as i32;
        }
        for (j, kj) in k.iter().enumerate() {
            e[n + j] = kj.to_i32().ok_or_else(|| Error::NumericRange("brick exponent too large".into()))?;
        }
        out.add_term(e, c.clone());
    }
    Ok(out)
}

impl VarietySystem {
    /// Assembles a system from explicit parts and verifies that it
    /// reconstructs `target`.
    pub fn from_parts(target: ExpPoly, bricks: Vec<ExpPoly>, graph: Vec<LPoly>, pstar: LPoly) -> Result<Self> {
        let n = target.nvars();
        let alpha = bricks.len();
        if alpha < n || graph.len() != alpha - n {
            return Err(Error::Contract("graph polynomial count must be alpha - n".into()));
        }
        if graph.iter().chain(std::iter::once(&pstar)).any(|q| q.nvars() != n + alpha) {
            return Err(Error::Contract("polynomials must live in n + alpha variables".into()));
        }
        for (i, b) in bricks.iter().enumerate().take(n) {
            if *b != ExpPoly::var(target.vars(), i) {
                return Err(Error::Contract(format!("brick {} must be the variable {}", i + 1, target.vars().names()[i])));
            }
        }
        let no_zeros = pstar.is_monomial_in(n..n + alpha);
        let v = VarietySystem { target, bricks, n, graph, pstar, no_zeros };
        v.check()?;
        Ok(v)
    }

    pub fn target(&self) -> &ExpPoly {
        &self.target
    }

    pub fn bricks(&self) -> &[ExpPoly] {
        &self.bricks
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn alpha(&self) -> usize {
        self.bricks.len()
    }

    /// `p_{n+1}..p_alpha`.
    pub fn graph_polys(&self) -> &[LPoly] {
        &self.graph
    }

    pub fn hypersurface(&self) -> &LPoly {
        &self.pstar
    }

    /// `p*` is a constant times a monomial in `y`, so `p` is a pure
    /// exponential and the variety is empty.
    pub fn no_zeros(&self) -> bool {
        self.no_zeros
    }

    /// Names `x.., y1..y_alpha` for rendering.
    pub fn coordinate_names(&self) -> Vec<String> {
        let mut names: Vec<String> = self.target.vars().names().to_vec();
        names.extend((1..=self.alpha()).map(|j| format!("y{}", j)));
        names
    }

    /// Substitutes `y_j = exp(t_j)`.
    pub fn substitute(&self, q: &LPoly) -> Result<ExpPoly> {
        let vars = self.target.vars();
        let mut out = ExpPoly::zero(vars);
        for (e, c) in q.terms() {
            let mut g = ExpPoly::zero(vars);
            for (j, t) in self.bricks.iter().enumerate() {
                let k = e[self.n + j];
                if k != 0 {
                    g = &g + &t.scale(&Scalar::from_int(k as i64));
                }
            }
            let mut term = g.exp()?.scale(c);
            for i in 0..self.n {
                if e[i] < 0 {
                    return Err(Error::Contract("negative power of an additive coordinate".into()));
                }
                term = &term * &ExpPoly::var(vars, i).pow(e[i] as u32);
            }
            out = &out + &term;
        }
        Ok(out)
    }

    pub fn reconstruct(&self) -> Result<ExpPoly> {
        self.substitute(&self.pstar)
    }

    fn check(&self) -> Result<()> {
        for (i, q) in self.graph.iter().enumerate() {
            if self.substitute(q)? != self.bricks[self.n + i] {
                return Err(Error::ConstructionBug(format!("graph polynomial {} does not give its brick", self.n + i + 1)));
            }
            if q.terms().any(|(e, _)| e[self.n + self.n + i..].iter().any(|&a| a != 0)) {
                return Err(Error::ConstructionBug(format!("graph polynomial {} uses later coordinates", self.n + i + 1)));
            }
        }
        let back = self.reconstruct()?;
        if back != self.target {
            return Err(Error::ConstructionBug(format!("p* reconstructs {} instead of {}", back, self.target)));
        }
        Ok(())
    }

    /// `b_i = t_i(a)` for the non-variable bricks and `y_i = exp(t_i(a))`.
    pub fn witness(&self, a: &[Complex64], env: &BranchEnv) -> Result<GPoint> {
        if a.len() != self.n {
            return Err(Error::Contract(format!("expected {} coordinates", self.n)));
        }
        let mut vals = Vec::with_capacity(self.alpha());
        for t in &self.bricks {
            vals.push(t.eval(a, env)?);
        }
        let mut y = Vec::with_capacity(vals.len());
        for v in &vals {
            if v.re.abs() > EXP_OVERFLOW {
                return Err(Error::NumericRange(format!("exp({}) overflows", v)));
            }
            y.push(v.exp());
        }
        Ok(GPoint { x: a.to_vec(), w: vals[self.n..].to_vec(), y })
    }

    fn check_point(&self, pt: &GPoint) -> Result<()> {
        if pt.x.len() != self.n || pt.w.len() != self.alpha() - self.n || pt.y.len() != self.alpha() {
            return Err(Error::Contract("point dimensions do not match the system".into()));
        }
        if pt.y.iter().any(|z| z.norm() == 0.0) {
            return Err(Error::Domain("a y-coordinate is zero".into()));
        }
        Ok(())
    }

    fn xy(pt_x: &[Complex64], pt_y: &[Complex64]) -> Vec<Complex64> {
        pt_x.iter().chain(pt_y).copied().collect()
    }

    /// Largest scaled residual over the defining equations:
    /// `|w_i - p_i| / (1 + |w_i|)` and `|p*|`.
    pub fn residual(&self, pt: &GPoint, env: &BranchEnv) -> Result<f64> {
        self.check_point(pt)?;
        let xy = Self::xy(&pt.x, &pt.y);
        let mut r: f64 = 0.0;
        for (q, w) in self.graph.iter().zip(&pt.w) {
            let v = q.eval(&xy, env);
            r = r.max((w - v).norm() / (1.0 + w.norm()));
        }
        let s = self.pstar.eval(&xy, env).norm();
        if s.is_nan() {
            return Ok(f64::INFINITY);
        }
        Ok(r.max(s))
    }

    pub fn membership(&self, pt: &GPoint, tol: f64, env: &BranchEnv) -> Result<(bool, f64)> {
        let r = self.residual(pt, env)?;
        Ok((r <= tol, r))
    }

    pub fn project_phi(pt: &GPoint) -> (Vec<Complex64>, Vec<Complex64>) {
        (pt.x.clone(), pt.y.clone())
    }

    pub fn lift_phi(&self, x: &[Complex64], y: &[Complex64], env: &BranchEnv) -> Result<GPoint> {
        if y.iter().any(|z| z.norm() == 0.0) {
            return Err(Error::Domain("a y-coordinate is zero".into()));
        }
        if x.len() != self.n || y.len() != self.alpha() {
            return Err(Error::Contract("point dimensions do not match the system".into()));
        }
        let xy = Self::xy(x, y);
        let w = self.graph.iter().map(|q| q.eval(&xy, env)).collect();
        Ok(GPoint { x: x.to_vec(), w, y: y.to_vec() })
    }
}

/// Builds the system for a refined decomposition with `L = 1`.
pub fn build_variety(t: &Decomposition) -> Result<VarietySystem> {
    if !t.refined() || !t.is_refined() {
        return Err(Error::Contract("decomposition is not refined".into()));
    }
    if !t.l().is_one() {
        return Err(Error::Contract(format!("decomposition has L = {}, normalize it first", t.l())));
    }
    t.check_bullets()?;
    let n = t.n();
    let alpha = t.alpha();
    let mut graph = Vec::with_capacity(alpha - n);
    for i in n..alpha {
        graph.push(to_lpoly(t.bricks()[i].body(), t, i, alpha)?);
    }
    let pstar = to_lpoly(t.target(), t, alpha, alpha)?;
    let bricks = t.bodies().into_iter().cloned().collect();
    VarietySystem::from_parts(t.target().clone(), bricks, graph, pstar)
}

/// Convenience: extract, refine, normalize `L` and build.
pub fn variety_of(p: &ExpPoly) -> Result<(VarietySystem, BigInt)> {
    let d = crate::decomposition::refine(&crate::decomposition::extract_decomposition(p)?);
    let (d, s) = crate::decomposition::normalize_l(&d);
    Ok((build_variety(&d)?, s.factor))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sys(s: &str) -> VarietySystem {
        variety_of(&ExpPoly::parse(s).unwrap()).unwrap().0
    }

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn worked_example_system() {
        let v = sys("exp(exp(x1/2 + x2^2)) + x1^3");
        let names = v.coordinate_names();
        assert_eq!((v.n(), v.alpha()), (2, 4));
        let g: Vec<String> = v.graph_polys().iter().map(|q| q.render(&names)).collect();
        assert_eq!(g, vec!["4*x2^2", "y1*y3"]);
        assert_eq!(v.hypersurface().render(&names), "y4 + 8*x1^3");
        assert!(!v.no_zeros());
        assert_eq!(v.reconstruct().unwrap().to_string(), "exp(exp(4*x2^2)*exp(x1)) + 8*x1^3");
    }

    #[test]
    fn one_brick_system() {
        let v = sys("exp(x) - 2");
        assert_eq!((v.n(), v.alpha()), (1, 1));
        assert!(v.graph_polys().is_empty());
        assert_eq!(v.hypersurface().render(&v.coordinate_names()), "y1 - 2");
        let env = BranchEnv::new();
        let pt = v.witness(&[c(2f64.ln())], &env).unwrap();
        assert!((pt.y[0] - c(2.0)).norm() < 1e-15);
        let (ok, r) = v.membership(&pt, 1e-12, &env).unwrap();
        assert!(ok && r < 1e-12);
        let pt0 = v.witness(&[c(0.0)], &env).unwrap();
        assert_eq!(pt0.y, vec![c(1.0)]);
        let (ok, r) = v.membership(&pt0, 1e-8, &env).unwrap();
        assert!(!ok);
        assert_eq!(r, 1.0);
    }

    #[test]
    fn pure_exponential_flagged() {
        let v = sys("exp(x1^3)");
        assert!(v.no_zeros());
        assert_eq!(v.hypersurface().render(&v.coordinate_names()), "y2");
        assert_eq!(v.reconstruct().unwrap().to_string(), "exp(x1^3)");
    }

    #[test]
    fn laurent_hypersurface() {
        let v = sys("exp(x) + exp(-x) - 3");
        assert_eq!(v.hypersurface().render(&v.coordinate_names()), "y1 - 3 + y1^(-1)");
    }

    #[test]
    fn lift_and_project() {
        let v = sys("exp(exp(x1/2 + x2^2)) + x1^3");
        let env = BranchEnv::new();
        let pt = v.witness(&[Complex64::new(0.3, -0.2), Complex64::new(-0.1, 0.4)], &env).unwrap();
        let (x, y) = VarietySystem::project_phi(&pt);
        assert_eq!(x, pt.x);
        let back = v.lift_phi(&x, &y, &env).unwrap();
        assert!((back.w[0] - Complex64::new(4.0, 0.0) * pt.x[1] * pt.x[1]).norm() < 1e-14);
        assert!((back.w[1] - y[0] * y[2]).norm() < 1e-14);
        let mut bad = y.clone();
        bad[1] = c(0.0);
        assert!(matches!(v.lift_phi(&x, &bad, &env), Err(Error::Domain(_))));
    }

    #[test]
    fn contracts() {
        let p = ExpPoly::parse("exp(x1/2) - 1").unwrap();
        let d = crate::decomposition::extract_decomposition(&p).unwrap();
        assert!(matches!(build_variety(&d), Err(Error::Contract(_))));
    }
}
