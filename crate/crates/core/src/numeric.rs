//! Complex evaluation and root finding.
//!
//! Roots are found by damped Newton iteration on a one-variable
//! restriction: all other variables are frozen (at zero first, then at
//! random points of the unit square) and each seed in a fixed grid is
//! tried. The smallest residual wins, ties going to the earlier seed.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::exppoly::ExpPoly;
use crate::scalar::{BranchEnv, Scalar};

pub fn eval_complex(p: &ExpPoly, x: &[Complex64], env: &BranchEnv) -> Result<Complex64> {
    p.eval(x, env)
}

/// Analytic gradient.
pub fn gradient(p: &ExpPoly, x: &[Complex64], env: &BranchEnv) -> Result<Vec<Complex64>> {
    (0..p.nvars()).map(|i| p.diff(i).eval(x, env)).collect()
}

pub fn verify_root(p: &ExpPoly, x: &[Complex64], env: &BranchEnv, tol: f64) -> Result<(bool, f64)> {
    let r = p.eval(x, env)?.norm();
    Ok((r <= tol, r))
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolverConfig {
    pub seeds: Vec<Complex64>,
    pub max_iter: usize,
    pub tol: f64,
    /// Number of random freezes tried after the all-zero one.
    pub restarts: usize,
    pub rng_seed: u64,
    pub env: BranchEnv,
}

/// `0, -1/2, 1/2, -1, 1, -2, 2`, then the same moduli along `+-i` and the
/// diagonals.
pub fn default_seeds() -> Vec<Complex64> {
    let mut out: Vec<Complex64> = vec![Complex64::new(0.0, 0.0)];
    for r in [0.5, 1.0, 2.0] {
        out.push(Complex64::new(-r, 0.0));
        out.push(Complex64::new(r, 0.0));
    }
    for r in [0.5, 1.0, 2.0, 4.0] {
        out.push(Complex64::new(0.0, r));
        out.push(Complex64::new(0.0, -r));
        for (a, b) in [(1.0, 1.0), (-1.0, 1.0), (1.0, -1.0), (-1.0, -1.0)] {
            out.push(Complex64::new(a * r, b * r));
        }
    }
    out
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig { seeds: default_seeds(), max_iter: 100, tol: 1e-10, restarts: 8, rng_seed: 0, env: BranchEnv::new() }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum RootResult {
    Root {
        assignment: Vec<Complex64>,
        residual: f64,
        iterations: usize,
    },
    /// `p = k * exp(g)`.
    NoZeros {
        k: Scalar,
        g: ExpPoly,
    },
    NotFound {
        best_residual: f64,
        seeds_tried: usize,
    },
}

struct Newton {
    z: Complex64,
    residual: f64,
    iterations: usize,
}

/// Damped Newton on `z -> p(x with x_i = z)`; a step is halved up to 20
/// times while it fails to lower the residual.
fn newton(p: &ExpPoly, dp: &ExpPoly, x: &mut [Complex64], i: usize, seed: Complex64, cfg: &SolverConfig) -> Option<Newton> {
    let env = &cfg.env;
    let f = |z: Complex64, x: &mut [Complex64]| {
        x[i] = z;
        p.eval(x, env).ok().filter(|v| v.is_finite())
    };
    let mut z = seed;
    let mut fz = f(z, x)?;
    let mut below = 0;
    for it in 0..cfg.max_iter {
        if fz.norm() <= cfg.tol {
            below += 1;
            // a few polishing steps past the tolerance
            if below > 3 || fz.norm() == 0.0 {
                return Some(Newton { z, residual: fz.norm(), iterations: it });
            }
        }
        x[i] = z;
        let d = dp.eval(x, env).ok().filter(|v| v.is_finite() && v.norm() > 0.0)?;
        let mut step = fz / d;
        let mut accepted = None;
        for _ in 0..=20 {
            let cand = z - step;
            if let Some(fc) = f(cand, x) {
                if fc.norm() < fz.norm() {
                    accepted = Some((cand, fc));
                    break;
                }
            }
            step *= 0.5;
        }
        match accepted {
            Some((c, fc)) => {
                z = c;
                fz = fc;
            }
            None => break,
        }
    }
    x[i] = z;
    Some(Newton { z, residual: fz.norm(), iterations: cfg.max_iter })
}

pub fn find_root(p: &ExpPoly, cfg: &SolverConfig) -> Result<RootResult> {
    if p.is_constant() {
        return Err(Error::DegenerateInput(format!("{} is constant", p)));
    }
    if let Some((k, g)) = p.as_pure_exponential()? {
        return Ok(RootResult::NoZeros { k, g });
    }
    let n = p.nvars();
    let used: Vec<usize> = (0..n).filter(|&i| p.uses_var(i)).collect();
    let derivs: Vec<ExpPoly> = (0..n).map(|i| p.diff(i)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
    let mut best = f64::INFINITY;
    let mut tried = 0;
    for restart in 0..=cfg.restarts {
        let frozen: Vec<Complex64> = (0..n)
            .map(|_| if restart == 0 { Complex64::new(0.0, 0.0) } else { Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) })
            .collect();
        for &i in &used {
            let mut winner: Option<(Vec<Complex64>, Newton)> = None;
            for &seed in &cfg.seeds {
                tried += 1;
                let mut x = frozen.clone();
                let Some(run) = newton(p, &derivs[i], &mut x, i, seed, cfg) else { continue };
                best = best.min(run.residual);
                if run.residual <= cfg.tol && winner.as_ref().is_none_or(|(_, w)| run.residual < w.residual) {
                    x[i] = run.z;
                    winner = Some((x, run));
                }
            }
            if let Some((assignment, run)) = winner {
                return Ok(RootResult::Root { assignment, residual: run.residual, iterations: run.iterations });
            }
        }
    }
    Ok(RootResult::NotFound { best_residual: best, seeds_tried: tried })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> ExpPoly {
        if s.contains('z') {
            let vars = crate::exppoly::Vars::new(vec!["z".into()]).unwrap();
            return ExpPoly::parse_in(s, &vars).unwrap();
        }
        ExpPoly::parse(s).unwrap()
    }

    fn root_of(s: &str) -> Vec<Complex64> {
        match find_root(&p(s), &SolverConfig::default()).unwrap() {
            RootResult::Root { assignment, .. } => assignment,
            r => panic!("{}: {:?}", s, r),
        }
    }

    #[test]
    fn evaluation_examples() {
        let env = BranchEnv::new();
        let z = Complex64::new(0.0, 0.0);
        assert_eq!(eval_complex(&p("exp(x)"), &[z], &env).unwrap(), Complex64::new(1.0, 0.0));
        let e = eval_complex(&p("exp(exp(x1/2 + x2^2)) + x1^3"), &[z, z], &env).unwrap();
        assert!((e - Complex64::new(std::f64::consts::E, 0.0)).norm() < 1e-15);
        let l = eval_complex(&p("x - log(2)"), &[Complex64::new(2f64.ln(), 0.0)], &env).unwrap();
        assert!(l.norm() <= 1e-15);
    }

    #[test]
    fn overflow_is_an_error() {
        let r = eval_complex(&p("exp(x)"), &[Complex64::new(800.0, 0.0)], &BranchEnv::new());
        assert!(matches!(r, Err(Error::NumericRange(_))));
    }

    #[test]
    fn omega_constant() {
        // z = -exp(z): the omega constant, negated
        let z = root_of("exp(z) + z")[0];
        let mut w: f64 = 0.5;
        for _ in 0..100 {
            w = (-w).exp();
        }
        assert!((z - Complex64::new(-w, 0.0)).norm() < 1e-12, "{}", z);
        let (ok, r) = verify_root(&p("exp(z) + z"), &[Complex64::new(-0.5671433, 0.0)], &BranchEnv::new(), 1e-6).unwrap();
        assert!(ok, "{}", r);
    }

    #[test]
    fn log_two() {
        let z = root_of("exp(z) - 2")[0];
        assert!((z - Complex64::new(2f64.ln(), 0.0)).norm() < 1e-12);
        let env = BranchEnv::new();
        assert!(verify_root(&p("exp(z) - 2"), &[Complex64::new(2f64.ln(), 0.0)], &env, 1e-10).unwrap().0);
        let (ok, r) = verify_root(&p("exp(z) - 2"), &[Complex64::new(0.0, 0.0)], &env, 1e-10).unwrap();
        assert!(!ok);
        assert_eq!(r, 1.0);
    }

    #[test]
    fn pure_exponential_has_no_zeros() {
        match find_root(&p("exp(z^3)"), &SolverConfig::default()).unwrap() {
            RootResult::NoZeros { g, .. } => assert_eq!(g.to_string(), "z^3"),
            r => panic!("{:?}", r),
        }
    }

    #[test]
    fn multivariate_restriction() {
        let q = p("exp(exp(x1/2 + x2^2)) + x1^3");
        let x = root_of("exp(exp(x1/2 + x2^2)) + x1^3");
        assert!(verify_root(&q, &x, &BranchEnv::new(), 1e-10).unwrap().0);
    }

    #[test]
    fn gradient_matches_differences() {
        let q = p("x1^2*exp(x1*x2) + exp(exp(x2))");
        let env = BranchEnv::new();
        let x = [Complex64::new(0.3, -0.2), Complex64::new(-0.1, 0.4)];
        let g = gradient(&q, &x, &env).unwrap();
        let h = 1e-6;
        for i in 0..2 {
            let (mut a, mut b) = (x, x);
            a[i] += h;
            b[i] -= h;
            let fd = (q.eval(&a, &env).unwrap() - q.eval(&b, &env).unwrap()) / (2.0 * h);
            assert!((fd - g[i]).norm() <= 1e-5 * g[i].norm().max(1.0));
        }
    }
}
