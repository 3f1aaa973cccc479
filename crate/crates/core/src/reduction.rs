//! The free-or-polynomial loop.
//!
//! Each round builds the witness variety of the current `p`, factors `p*`,
//! and either
//!
//! * replaces `p` by the exponential polynomial of a non-monomial factor
//!   (its zeros are zeros of `p`), or
//! * finds `p*` irreducible and checks freeness. A coset witness
//!   `prod y^m = b` yields `p' = sum m_j t_j - log(b)` of smaller height;
//!   otherwise the system is free and the loop stops.
//!
//! Height-zero inputs stop as polynomials, pure exponentials as certified
//! zero-free.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::One;

use crate::decomposition::{extract_decomposition, normalize_l, refine};
use crate::error::{Error, Result};
use crate::exppoly::ExpPoly;
use crate::factor::{self, Factorization};
use crate::lpoly::LPoly;
use crate::mpoly::MPoly;
use crate::scalar::{GaussRat, LogConst, LogMono, Scalar};
use crate::variety::{build_variety, VarietySystem};

/// Guard on loop rounds; each round lowers height or the degree of `p*`.
const MAX_ROUNDS: usize = 256;

/// Irreducible factorization of `p*`:
/// `p* = unit * y^monomial * prod factors_k^e_k`.
#[derive(Clone, Debug, PartialEq)]
pub struct PStarFactors {
    pub unit: Scalar,
    /// Laurent exponent vector over `(x, y)`; nonzero only in the `y` block.
    pub monomial: Vec<i32>,
    pub factors: Vec<(LPoly, u32)>,
}

impl PStarFactors {
    pub fn expand(&self) -> LPoly {
        let nv = self.monomial.len();
        let mut acc = LPoly::constant(nv, self.unit.clone()).shift(&self.monomial);
        for (f, e) in &self.factors {
            for _ in 0..*e {
                acc = &acc * f;
            }
        }
        acc
    }
}

/// Polynomial image of a Laurent polynomial: `q = y^-shift * poly`, with
/// each log-constant turned into an extra variable after the first
/// `base` ones.
struct Polynomialized {
    poly: MPoly,
    shift: Vec<i32>,
    logs: Vec<LogConst>,
    base: usize,
}

fn polynomialize(q: &LPoly) -> Polynomialized {
    let base = q.nvars();
    let shift: Vec<i32> = (0..base).map(|v| q.degree_range(v).map(|(lo, _)| (-lo).max(0)).unwrap_or(0)).collect();
    let logs: Vec<LogConst> =
        q.terms().flat_map(|(_, c)| c.log_constants()).collect::<BTreeSet<_>>().into_iter().collect();
    let mut poly = MPoly::zero(base + logs.len());
    for (e, c) in q.terms() {
        for (lm, g) in c.terms() {
            let mut ex: Vec<u32> = e.iter().zip(&shift).map(|(a, s)| (a + s) as u32).collect();
            ex.extend(logs.iter().map(|l| lm.get(l).copied().unwrap_or(0)));
            poly.add_term(ex, g.clone());
        }
    }
    Polynomialized { poly, shift, logs, base }
}

impl Polynomialized {
    /// Splits an `MPoly` back into a Laurent polynomial, or into a scalar
    /// when it involves log variables only.
    fn back(&self, f: &MPoly) -> std::result::Result<LPoly, Scalar> {
        let mut grouped: BTreeMap<Vec<i32>, Vec<(LogMono, GaussRat)>> = BTreeMap::new();
        for (e, c) in f.terms() {
            let key: Vec<i32> = e[..self.base].iter().map(|&a| a as i32).collect();
            let lm: LogMono =
                self.logs.iter().zip(&e[self.base..]).filter(|(_, &a)| a > 0).map(|(l, &a)| (l.clone(), a)).collect();
            grouped.entry(key).or_default().push((lm, c.clone()));
        }
        if grouped.keys().all(|k| k.iter().all(|&a| a == 0)) {
            let terms = grouped.into_values().flatten();
            return Err(Scalar::from_terms(terms));
        }
        Ok(LPoly::from_terms(self.base, grouped.into_iter().map(|(k, ts)| (k, Scalar::from_terms(ts)))))
    }
}

fn factor_laurent(q: &LPoly) -> Result<PStarFactors> {
    if q.is_zero() {
        return Err(Error::UndefinedInput("p* is zero".into()));
    }
    let pz = polynomialize(q);
    let fz: Factorization = match factor::factor(&pz.poly) {
        Ok(f) => f,
        Err(Error::Budget { reason, .. }) => {
            let partial = factor::square_free(&pz.poly)
                .into_iter()
                .map(|(f, e)| {
                    let shown = match pz.back(&f) {
                        Ok(l) => l.to_string(),
                        Err(s) => s.to_string(),
                    };
                    (shown, e)
                })
                .collect();
            return Err(Error::Budget { reason, partial });
        }
        Err(e) => return Err(e),
    };
    let mut unit = Scalar::from_gauss(fz.unit.clone());
    let mut factors = Vec::new();
    for (f, e) in &fz.factors {
        match pz.back(f) {
            Ok(l) => factors.push((l, *e)),
            Err(s) => unit = &unit * &s.pow(*e),
        }
    }
    let monomial = pz.shift.iter().map(|s| -s).collect();
    let out = PStarFactors { unit, monomial, factors };
    if out.expand() != *q {
        return Err(Error::ConstructionBug(format!("factors of {} do not multiply back", q)));
    }
    Ok(out)
}

/// Irreducible factorization of the hypersurface polynomial.
pub fn factor_pstar(v: &VarietySystem) -> Result<PStarFactors> {
    factor_laurent(v.hypersurface())
}

#[derive(Clone, Debug, PartialEq)]
pub struct Selected {
    pub index: usize,
    pub factor: LPoly,
    /// The factor with `y_j = exp(t_j)` substituted.
    pub poly: ExpPoly,
}

/// First factor that is not a constant times a monomial in `y`.
pub fn select_factor(v: &VarietySystem, fz: &PStarFactors) -> Result<Option<Selected>> {
    let (n, alpha) = (v.n(), v.alpha());
    for (index, (f, _)) in fz.factors.iter().enumerate() {
        if f.is_monomial_in(n..n + alpha) {
            continue;
        }
        return Ok(Some(Selected { index, factor: f.clone(), poly: v.substitute(f)? }));
    }
    Ok(None)
}

/// The constant `b` of a coset `prod y^m = b`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CosetValue {
    /// `num / den`; `den` is 1 whenever it is invertible in `Q(i)`.
    Ratio { num: Scalar, den: Scalar },
    /// A root of `coeffs[0] + coeffs[1] Y + ...`, numbered as in
    /// [`crate::scalar::sorted_roots`].
    Root { coeffs: Vec<Scalar>, index: usize },
}

impl CosetValue {
    fn ratio(num: Scalar, den: Scalar) -> Self {
        match den.inv() {
            Some(inv) => CosetValue::Ratio { num: &num * &inv, den: Scalar::one() },
            None => CosetValue::Ratio { num, den },
        }
    }

    /// A logarithm on the given branch.
    pub fn log(&self, branch: i64) -> Result<Scalar> {
        match self {
            CosetValue::Ratio { num, den } => {
                if num.is_zero() {
                    return Err(Error::Contract("coset constant is zero".into()));
                }
                let l = Scalar::log(num, branch)?;
                if den.is_one() {
                    Ok(l)
                } else {
                    Ok(&l - &Scalar::log(den, 0)?)
                }
            }
            CosetValue::Root { coeffs, index } => Scalar::log_root(coeffs.clone(), *index, branch),
        }
    }

    pub fn eval(&self) -> Complex64 {
        let env = crate::scalar::BranchEnv::new();
        match self {
            CosetValue::Ratio { num, den } => num.eval(&env) / den.eval(&env),
            CosetValue::Root { coeffs, index } => {
                let cs: Vec<Complex64> = coeffs.iter().map(|c| c.eval(&env)).collect();
                crate::scalar::sorted_roots(&cs).get(*index).copied().unwrap_or(Complex64::new(f64::NAN, f64::NAN))
            }
        }
    }
}

impl fmt::Display for CosetValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CosetValue::Ratio { num, den } if den.is_one() => write!(f, "{}", num),
            CosetValue::Ratio { num, den } => write!(f, "({})/({})", num, den),
            CosetValue::Root { coeffs, index } => {
                write!(f, "root({}", index)?;
                for c in coeffs {
                    write!(f, ", {}", c)?;
                }
                write!(f, ")")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FreenessResult {
    Free,
    /// The variety lies in `prod y_i^m_i = b`.
    NotFreeMultiplicative { m: Vec<i64>, b: CosetValue },
    /// The variety lies in `sum m_i u_i = b`. Signals dependent bricks.
    NotFreeAdditive { m: Vec<i64>, b: Scalar },
}

fn first_nonzero_negative(v: &[i64]) -> bool {
    v.iter().find(|&&a| a != 0).map(|&a| a < 0).unwrap_or(false)
}

/// Freeness test for an irreducible `p*` (root index 0 for algebraic
/// coset constants).
pub fn freeness_check(v: &VarietySystem) -> Result<FreenessResult> {
    freeness_check_with(v, 0)
}

pub fn freeness_check_with(v: &VarietySystem, root_index: usize) -> Result<FreenessResult> {
    let (n, alpha) = (v.n(), v.alpha());
    let bodies: Vec<&ExpPoly> = v.bricks().iter().collect();
    if let Some(m) = crate::decomposition::integer_relation(&bodies) {
        return Ok(FreenessResult::NotFreeAdditive { m, b: Scalar::zero() });
    }
    let q = v.hypersurface();
    let terms: Vec<(Vec<i64>, Scalar)> = q.terms().map(|(e, c)| (e.iter().map(|&a| a as i64).collect(), c.clone())).collect();
    if terms.len() < 2 || terms.iter().any(|(e, _)| e[..n].iter().any(|&a| a != 0)) {
        return Ok(FreenessResult::Free);
    }
    let ys = |e: &Vec<i64>| e[n..n + alpha].to_vec();
    if terms.len() == 2 {
        let (mut a, mut b) = (&terms[0], &terms[1]);
        let mut m: Vec<i64> = ys(&a.0).iter().zip(ys(&b.0)).map(|(x, y)| x - y).collect();
        if first_nonzero_negative(&m) {
            std::mem::swap(&mut a, &mut b);
            m.iter_mut().for_each(|x| *x = -*x);
        }
        // a y^ea + b y^eb = 0  <=>  y^m = -b/a
        return Ok(FreenessResult::NotFreeMultiplicative { m, b: CosetValue::ratio(-&b.1, a.1.clone()) });
    }
    // three or more terms: collinear exponents y^(base + k d)
    let e0 = ys(&terms[0].0);
    let diffs: Vec<Vec<i64>> = terms.iter().map(|(e, _)| ys(e).iter().zip(&e0).map(|(x, y)| x - y).collect()).collect();
    let Some(first) = diffs.iter().find(|d| d.iter().any(|&x| x != 0)) else {
        return Ok(FreenessResult::Free);
    };
    let g = first.iter().fold(0i64, |acc, &x| acc.gcd(&x));
    let mut d: Vec<i64> = first.iter().map(|x| x / g).collect();
    if first_nonzero_negative(&d) {
        d.iter_mut().for_each(|x| *x = -*x);
    }
    let pivot = d.iter().position(|&x| x != 0).unwrap();
    let mut lambdas = Vec::with_capacity(diffs.len());
    for diff in &diffs {
        let lam = diff[pivot] / d[pivot];
        if diff.iter().zip(&d).any(|(x, y)| *x != lam * y) {
            return Ok(FreenessResult::Free);
        }
        lambdas.push(lam);
    }
    let lo = *lambdas.iter().min().unwrap();
    let deg = (*lambdas.iter().max().unwrap() - lo) as usize;
    let mut coeffs = vec![Scalar::zero(); deg + 1];
    for ((_, c), lam) in terms.iter().zip(&lambdas) {
        coeffs[(lam - lo) as usize] = c.clone();
    }
    if root_index >= deg {
        return Err(Error::Contract(format!("root index {} out of range for degree {}", root_index, deg)));
    }
    Ok(FreenessResult::NotFreeMultiplicative { m: d, b: CosetValue::Root { coeffs, index: root_index } })
}

/// `p' = sum m_j t_j - log(b)`, whose zeros are zeros of the system's `p`.
pub fn reduce_height(v: &VarietySystem, witness: &FreenessResult, branch: i64) -> Result<ExpPoly> {
    let FreenessResult::NotFreeMultiplicative { m, b } = witness else {
        return Err(Error::Contract("height reduction needs a multiplicative coset witness".into()));
    };
    if m.len() != v.alpha() || m.iter().all(|&x| x == 0) {
        return Err(Error::Contract("coset exponent vector has the wrong shape".into()));
    }
    let vars = v.target().vars();
    let mut g = ExpPoly::zero(vars);
    for (mj, t) in m.iter().zip(v.bricks()) {
        if *mj != 0 {
            g = &g + &t.scale(&Scalar::from_int(*mj));
        }
    }
    let out = &g - &ExpPoly::constant(vars, b.log(branch)?);
    if out.height() >= v.target().height() {
        return Err(Error::ConstructionBug(format!("height did not drop: {} from {}", out, v.target())));
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct ReductionConfig {
    /// Branch of every logarithm introduced by height reduction.
    pub branch: i64,
    /// Which root to use when a coset constant is algebraic.
    pub root_index: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Step {
    /// `x_old = factor * x_new`.
    Rescale { factor: BigInt },
    /// `p` replaced by the exponential polynomial of one factor of `p*`.
    Factor { before: ExpPoly, factors: Vec<(String, u32)>, chosen: usize, after: ExpPoly },
    HeightReduction { before: ExpPoly, m: Vec<i64>, b: CosetValue, branch: i64, after: ExpPoly },
}

#[derive(Clone, Debug, PartialEq)]
pub enum Outcome {
    FreeSystem(VarietySystem),
    Polynomial(ExpPoly),
    /// `p = k * exp(g)`.
    NoZeros { k: Scalar, g: ExpPoly },
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReductionOutcome {
    pub outcome: Outcome,
    pub trace: Vec<Step>,
    /// Original coordinates are `scale` times final coordinates.
    pub scale: BigInt,
}

impl ReductionOutcome {
    pub fn height_reductions(&self) -> usize {
        self.trace.iter().filter(|s| matches!(s, Step::HeightReduction { .. })).count()
    }

    pub fn map_back(&self, x: &[Complex64]) -> Vec<Complex64> {
        let f: f64 = self.scale.to_string().parse().unwrap_or(f64::NAN);
        x.iter().map(|z| z * f).collect()
    }
}

pub fn free_or_poly_loop(p: &ExpPoly) -> Result<ReductionOutcome> {
    free_or_poly_loop_with(p, ReductionConfig::default())
}

pub fn free_or_poly_loop_with(p: &ExpPoly, cfg: ReductionConfig) -> Result<ReductionOutcome> {
    if p.is_constant() {
        return Err(Error::DegenerateInput(format!("{} is constant", p)));
    }
    let mut p = p.clone();
    let mut trace = Vec::new();
    let mut scale = BigInt::one();
    let done = |outcome, trace, scale| Ok(ReductionOutcome { outcome, trace, scale });
    for _ in 0..MAX_ROUNDS {
        if p.height() == 0 {
            return done(Outcome::Polynomial(p), trace, scale);
        }
        if let Some((k, g)) = p.as_pure_exponential()? {
            return done(Outcome::NoZeros { k, g }, trace, scale);
        }
        let (d, s) = normalize_l(&refine(&extract_decomposition(&p)?));
        if !s.factor.is_one() {
            scale = &scale * &s.factor;
            trace.push(Step::Rescale { factor: s.factor.clone() });
        }
        p = d.target().clone();
        let v = build_variety(&d)?;
        let fz = factor_pstar(&v)?;
        let Some(sel) = select_factor(&v, &fz)? else {
            return Err(Error::ConstructionBug(format!("p* of {} is a monomial but p is not a pure exponential", p)));
        };
        if sel.factor != *v.hypersurface() {
            let names = v.coordinate_names();
            let factors = fz.factors.iter().map(|(f, e)| (f.render(&names), *e)).collect();
            trace.push(Step::Factor { before: p.clone(), factors, chosen: sel.index, after: sel.poly.clone() });
            p = sel.poly;
            continue;
        }
        match freeness_check_with(&v, cfg.root_index)? {
            FreenessResult::Free => return done(Outcome::FreeSystem(v), trace, scale),
            FreenessResult::NotFreeAdditive { .. } => {
                return Err(Error::ConstructionBug("additive coset relation on a refined decomposition".into()))
            }
            w @ FreenessResult::NotFreeMultiplicative { .. } => {
                let after = reduce_height(&v, &w, cfg.branch)?;
                let FreenessResult::NotFreeMultiplicative { m, b } = w else { unreachable!() };
                trace.push(Step::HeightReduction { before: p.clone(), m, b, branch: cfg.branch, after: after.clone() });
                p = after;
            }
        }
    }
    Err(Error::ConstructionBug(format!("reduction did not finish in {} rounds", MAX_ROUNDS)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::BranchEnv;
    use crate::variety::variety_of;

    fn sys(s: &str) -> VarietySystem {
        variety_of(&ExpPoly::parse(s).unwrap()).unwrap().0
    }

    fn shown_factors(v: &VarietySystem, fz: &PStarFactors) -> Vec<String> {
        let names = v.coordinate_names();
        fz.factors.iter().map(|(f, e)| format!("{}^{}", f.render(&names), e)).collect()
    }

    #[test]
    fn factor_examples() {
        let v = sys("exp(2*x) - 4");
        let fz = factor_pstar(&v).unwrap();
        let mut got = shown_factors(&v, &fz);
        got.sort();
        assert_eq!(got, vec!["y1 + 2^1", "y1 - 2^1"]);

        let v = sys("exp(exp(x1/2 + x2^2)) + x1^3");
        let fz = factor_pstar(&v).unwrap();
        assert_eq!(shown_factors(&v, &fz), vec!["y4 + 8*x1^3^1"]);

        let v = sys("exp(x1)*exp(x2) - exp(x1)");
        let fz = factor_pstar(&v).unwrap();
        let mut got = shown_factors(&v, &fz);
        got.sort();
        assert_eq!(got, vec!["y1^1", "y2 - 1^1"]);
        let sel = select_factor(&v, &fz).unwrap().unwrap();
        assert_eq!(sel.poly.to_string(), "exp(x2) - 1");
    }

    #[test]
    fn laurent_factors_carry_a_monomial_unit() {
        // y + 1/y - 2 = y^-1 (y - 1)^2
        let v = sys("exp(x) + exp(-x) - 2");
        let fz = factor_pstar(&v).unwrap();
        assert_eq!(fz.monomial, vec![0, -1]);
        assert_eq!(shown_factors(&v, &fz), vec!["y1 - 1^2"]);
    }

    #[test]
    fn log_constants_factor_as_indeterminates() {
        let v = sys("exp(2*x) - log(2)^2");
        let fz = factor_pstar(&v).unwrap();
        let mut got = shown_factors(&v, &fz);
        got.sort();
        assert_eq!(got, vec!["y1 + log(2)^1", "y1 - log(2)^1"]);
        let v = sys("log(2)*exp(x) - 3");
        let fz = factor_pstar(&v).unwrap();
        assert_eq!(fz.factors.len(), 1);
    }

    #[test]
    fn pure_monomial_power_selects_nothing() {
        let v = sys("exp(2*x1)");
        let fz = factor_pstar(&v).unwrap();
        assert!(select_factor(&v, &fz).unwrap().is_none());
    }

    #[test]
    fn freeness_examples() {
        let w = freeness_check(&sys("exp(x) - 2")).unwrap();
        assert_eq!(
            w,
            FreenessResult::NotFreeMultiplicative {
                m: vec![1],
                b: CosetValue::Ratio { num: Scalar::from_int(2), den: Scalar::one() }
            }
        );
        assert_eq!(freeness_check(&sys("exp(exp(x1/2 + x2^2)) + x1^3")).unwrap(), FreenessResult::Free);
        let w = freeness_check(&sys("exp(x1 + x2) - 5")).unwrap();
        assert_eq!(
            w,
            FreenessResult::NotFreeMultiplicative {
                m: vec![1, 1],
                b: CosetValue::Ratio { num: Scalar::from_int(5), den: Scalar::one() }
            }
        );
    }

    #[test]
    fn algebraic_coset_constant() {
        // y^2 + y + 1 is irreducible over Q(i) but still a union of cosets
        let v = sys("exp(2*x) + exp(x) + 1");
        let w = freeness_check_with(&v, 1).unwrap();
        let FreenessResult::NotFreeMultiplicative { m, b } = &w else { panic!("{:?}", w) };
        assert_eq!(m, &vec![1]);
        let r = b.eval();
        assert!((r * r + r + Complex64::new(1.0, 0.0)).norm() < 1e-12);
        let p1 = reduce_height(&v, &w, 0).unwrap();
        assert_eq!(p1.height(), 0);
        let root = p1.constant_term();
        let x = -root.eval(&BranchEnv::new());
        let val = v.target().eval(&[x], &BranchEnv::new()).unwrap();
        assert!(val.norm() < 1e-12, "{}", val);
    }

    #[test]
    fn reduce_height_examples() {
        let v = sys("exp(x) - 2");
        let w = freeness_check(&v).unwrap();
        assert_eq!(reduce_height(&v, &w, 0).unwrap().to_string(), "x - log(2)");
        let p1 = reduce_height(&v, &w, 1).unwrap();
        assert_eq!(p1.to_string(), "x - log[1](2)");
        let x = -p1.constant_term().eval(&BranchEnv::new());
        assert!((x - Complex64::new(2f64.ln(), 2.0 * std::f64::consts::PI)).norm() < 1e-15);
        assert!(v.target().eval(&[x], &BranchEnv::new()).unwrap().norm() < 1e-14);

        let v = sys("exp(exp(x)) - 2");
        let w = freeness_check(&v).unwrap();
        let p1 = reduce_height(&v, &w, 0).unwrap();
        assert_eq!(p1.to_string(), "exp(x) - log(2)");
        assert_eq!(p1.height(), 1);
    }

    #[test]
    fn loop_examples() {
        let out = free_or_poly_loop(&ExpPoly::parse("exp(exp(x)) - 2").unwrap()).unwrap();
        assert_eq!(out.height_reductions(), 2);
        match &out.outcome {
            Outcome::Polynomial(q) => assert_eq!(q.to_string(), "x - log(log(2))"),
            o => panic!("{:?}", o),
        }
        let out = free_or_poly_loop(&ExpPoly::parse("exp(x1^3)").unwrap()).unwrap();
        assert!(matches!(&out.outcome, Outcome::NoZeros { g, .. } if g.to_string() == "x1^3"));
        let out = free_or_poly_loop(&ExpPoly::parse("exp(exp(x1/2 + x2^2)) + x1^3").unwrap()).unwrap();
        assert_eq!(out.scale, BigInt::from(2));
        let Outcome::FreeSystem(v) = &out.outcome else { panic!("{:?}", out.outcome) };
        assert_eq!(v.hypersurface().render(&v.coordinate_names()), "y4 + 8*x1^3");
    }

    #[test]
    fn factor_step_then_reduction() {
        // (exp(x) - 2)(exp(x) + 3): first factor chosen, then reduced
        let out = free_or_poly_loop(&ExpPoly::parse("exp(2*x) + exp(x) - 6").unwrap()).unwrap();
        assert!(matches!(out.trace[0], Step::Factor { .. }));
        let Outcome::Polynomial(q) = &out.outcome else { panic!() };
        let x = -q.constant_term().eval(&BranchEnv::new());
        let p = ExpPoly::parse("exp(2*x) + exp(x) - 6").unwrap();
        assert!(p.eval(&out.map_back(&[x]), &BranchEnv::new()).unwrap().norm() < 1e-12);
    }
}
