//! Decompositions: ordered brick lists whose exponentials generate `p`.
//!
//! Bricks are harvested from the atom structure of `p`: every atom
//! `exp(c*m)` contributes the brick `c*m`, visited in post-order so that a
//! brick always comes after the bricks its own exponentials need. Variable
//! bricks `x_i/L` lead the list.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::exppoly::{ExpPoly, Monomial, Vars};
use crate::linalg;
use crate::scalar::{LogMono, Scalar};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Brick {
    body: ExpPoly,
    height: u32,
}

impl Brick {
    pub fn new(body: ExpPoly) -> Result<Self> {
        if body.is_constant() {
            return Err(Error::DegenerateInput(format!("constant brick {}", body)));
        }
        let height = body.height();
        Ok(Brick { body, height })
    }

    pub fn body(&self) -> &ExpPoly {
        &self.body
    }

    pub fn height(&self) -> u32 {
        self.height
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decomposition {
    target: ExpPoly,
    bricks: Vec<Brick>,
    n: usize,
    l: BigInt,
    refined: bool,
}

type Coord = (Monomial, LogMono, bool);

/// Column vectors of rational coordinates, one per body.
fn coordinates(bodies: &[&ExpPoly], extra: Option<&ExpPoly>) -> (Vec<Vec<BigRational>>, Option<Vec<BigRational>>) {
    let mut index: BTreeMap<Coord, usize> = BTreeMap::new();
    let all = bodies.iter().copied().chain(extra);
    for b in all {
        for (m, c) in b.terms() {
            for (lm, im, _) in c.rational_coordinates() {
                let len = index.len();
                index.entry((m.clone(), lm, im)).or_insert(len);
            }
        }
    }
    let column = |b: &ExpPoly| {
        let mut col = vec![BigRational::zero(); index.len()];
        for (m, c) in b.terms() {
            for (lm, im, q) in c.rational_coordinates() {
                col[index[&(m.clone(), lm, im)]] = q;
            }
        }
        col
    };
    (bodies.iter().map(|b| column(b)).collect(), extra.map(column))
}

fn var_brick(vars: &Vars, i: usize, l: &BigInt) -> Brick {
    let q = Scalar::from_rational(BigRational::new(BigInt::one(), l.clone()));
    Brick::new(ExpPoly::from_monomial(vars, Monomial::var(vars.len(), i), q)).expect("variable brick")
}

/// `Some(q)` when `b = q * x_i` with `q` rational.
fn rational_var_multiple(b: &ExpPoly) -> Option<(usize, BigRational)> {
    if b.num_terms() != 1 {
        return None;
    }
    let (m, c) = b.terms().next().unwrap();
    if !m.exp_part().is_empty() || m.degree() != 1 {
        return None;
    }
    let i = m.var_exps().iter().position(|&a| a == 1)?;
    Some((i, c.as_rational()?))
}

fn lcm_of_denominators(v: &[BigRational]) -> BigInt {
    v.iter().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()))
}

impl Decomposition {
    /// Assembles a decomposition from explicit parts; the bricks after the
    /// first `n` are kept in the given order.
    pub fn from_parts(target: ExpPoly, extra: Vec<ExpPoly>, l: BigInt) -> Result<Self> {
        if !l.is_positive() {
            return Err(Error::Contract("L must be positive".into()));
        }
        let vars = target.vars().clone();
        let n = vars.len();
        let mut bricks: Vec<Brick> = (0..n).map(|i| var_brick(&vars, i, &l)).collect();
        for b in extra {
            if b.vars() != &vars {
                return Err(Error::ContextMismatch { left: b.vars().joined(), right: vars.joined() });
            }
            bricks.push(Brick::new(b)?);
        }
        let mut d = Decomposition { target, bricks, n, l, refined: false };
        d.refined = d.is_refined();
        Ok(d)
    }

    pub fn target(&self) -> &ExpPoly {
        &self.target
    }

    pub fn bricks(&self) -> &[Brick] {
        &self.bricks
    }

    pub fn bodies(&self) -> Vec<&ExpPoly> {
        self.bricks.iter().map(|b| &b.body).collect()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn alpha(&self) -> usize {
        self.bricks.len()
    }

    pub fn l(&self) -> &BigInt {
        &self.l
    }

    pub fn refined(&self) -> bool {
        self.refined
    }

    /// No body is a Q-linear combination of the others (constants cannot
    /// occur in bodies, so this is independence modulo constants).
    pub fn is_refined(&self) -> bool {
        let bodies = self.bodies();
        let (cols, _) = coordinates(&bodies, None);
        linalg::rank(&transpose(&cols)) == bodies.len()
    }

    /// Integer coordinates of `g` over the first `upto` bricks, if `g` is
    /// an integer combination of them.
    pub fn express(&self, g: &ExpPoly, upto: usize) -> Option<Vec<BigInt>> {
        if g.is_zero() {
            return Some(vec![BigInt::zero(); upto]);
        }
        let bodies: Vec<&ExpPoly> = self.bricks[..upto].iter().map(|b| &b.body).collect();
        let (cols, target) = coordinates(&bodies, Some(g));
        linalg::solve_integer(&cols, &target.unwrap())
    }

    /// Checks the three defining conditions: leading variable bricks,
    /// each brick generated by earlier ones, `p` generated by all.
    pub fn check_bullets(&self) -> Result<()> {
        let vars = self.target.vars();
        for i in 0..self.n {
            if self.bricks[i] != var_brick(vars, i, &self.l) {
                return Err(Error::ConstructionBug(format!("brick {} is not x{}/L", i, i + 1)));
            }
        }
        for w in self.bricks.windows(2) {
            if w[0].height > w[1].height {
                return Err(Error::ConstructionBug("brick heights decrease".into()));
            }
        }
        for (i, b) in self.bricks.iter().enumerate().skip(self.n) {
            for (m, _) in b.body.terms() {
                if self.express(&m.exponent(vars), i).is_none() {
                    return Err(Error::ConstructionBug(format!("brick {} not generated by earlier bricks", b.body)));
                }
            }
        }
        for (m, _) in self.target.terms() {
            if self.express(&m.exponent(vars), self.bricks.len()).is_none() {
                return Err(Error::ConstructionBug("target not generated by the bricks".into()));
            }
        }
        Ok(())
    }

    fn sort_by_height(&mut self) {
        let tail = self.bricks.split_off(self.n);
        let mut tail = tail;
        tail.sort_by_key(|b| b.height);
        self.bricks.extend(tail);
    }
}

fn transpose(cols: &[Vec<BigRational>]) -> Vec<Vec<BigRational>> {
    let rows = cols.first().map(|c| c.len()).unwrap_or(0);
    (0..rows).map(|r| cols.iter().map(|c| c[r].clone()).collect()).collect()
}

fn harvest(vars: &Vars, m: &Monomial, out: &mut Vec<ExpPoly>) {
    for (k, c) in m.exp_part() {
        harvest(vars, k, out);
        let b = ExpPoly::from_monomial(vars, k.clone(), c.clone());
        if !out.contains(&b) {
            out.push(b);
        }
    }
}

/// Harvests bricks from the atoms of `p`, adds variable bricks and removes
/// bricks that are integer combinations of the others.
pub fn extract_decomposition(p: &ExpPoly) -> Result<Decomposition> {
    if p.is_constant() {
        return Err(Error::DegenerateInput(format!("{} is constant", p)));
    }
    let vars = p.vars();
    let mut harvested = Vec::new();
    for (m, _) in p.terms().rev() {
        harvest(vars, m, &mut harvested);
    }
    let l = harvested
        .iter()
        .filter_map(rational_var_multiple)
        .fold(BigInt::one(), |acc, (_, q)| acc.lcm(q.denom()));
    let mut d = Decomposition::from_parts(p.clone(), Vec::new(), l)?;
    for b in harvested {
        if rational_var_multiple(&b).is_some() {
            continue;
        }
        d.bricks.push(Brick::new(b)?);
    }
    // minimality: drop bricks that are integer combinations of the others
    let mut i = d.n;
    while i < d.bricks.len() {
        let others: Vec<&ExpPoly> =
            d.bricks.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, b)| &b.body).collect();
        let (cols, target) = coordinates(&others, Some(&d.bricks[i].body));
        match linalg::solve_integer(&cols, &target.unwrap()) {
            Some(_) => {
                d.bricks.remove(i);
            }
            None => i += 1,
        }
    }
    d.sort_by_height();
    d.refined = d.is_refined();
    Ok(d)
}

/// Removes Q-linear dependencies among bodies, dividing the bricks of each
/// rational relation by the lcm of its denominators.
pub fn refine(t: &Decomposition) -> Decomposition {
    let mut d = t.clone();
    let vars = d.target.vars().clone();
    let initial = d.bricks.len();
    let mut iterations = 0;
    'outer: loop {
        for i in (d.n..d.bricks.len()).rev() {
            let others: Vec<usize> = (0..d.bricks.len()).filter(|&j| j != i).collect();
            let bodies: Vec<&ExpPoly> = others.iter().map(|&j| &d.bricks[j].body).collect();
            let (cols, target) = coordinates(&bodies, Some(&d.bricks[i].body));
            let Some(sol) = linalg::solve(&cols, &target.unwrap()) else {
                continue;
            };
            iterations += 1;
            assert!(iterations <= initial, "refinement failed to terminate");
            let lp = lcm_of_denominators(&sol);
            if !lp.is_one() {
                let inv = Scalar::from_rational(BigRational::new(BigInt::one(), lp.clone()));
                let mut var_involved = false;
                for (k, &j) in others.iter().enumerate() {
                    if sol[k].is_zero() {
                        continue;
                    }
                    if j < d.n {
                        var_involved = true;
                    } else {
                        d.bricks[j] = Brick::new(d.bricks[j].body.scale(&inv)).expect("nonconstant");
                    }
                }
                if var_involved {
                    d.l = &d.l * &lp;
                    for j in 0..d.n {
                        d.bricks[j] = var_brick(&vars, j, &d.l);
                    }
                }
            }
            d.bricks.remove(i);
            continue 'outer;
        }
        break;
    }
    d.sort_by_height();
    d.refined = true;
    debug_assert!(d.is_refined());
    d
}

/// A primitive integer relation `sum m_i b_i = 0` among the bodies, if any.
pub fn integer_relation(bodies: &[&ExpPoly]) -> Option<Vec<i64>> {
    for i in (0..bodies.len()).rev() {
        let others: Vec<&ExpPoly> = bodies.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, b)| *b).collect();
        let (cols, target) = coordinates(&others, Some(bodies[i]));
        let Some(sol) = linalg::solve(&cols, &target.unwrap()) else {
            continue;
        };
        let lcm = lcm_of_denominators(&sol);
        let mut rel: Vec<BigInt> = sol.iter().map(|q| (q * BigRational::from_integer(lcm.clone())).to_integer()).collect();
        rel.insert(i, -lcm);
        let g = rel.iter().fold(BigInt::zero(), |acc, a| acc.gcd(a));
        return rel.iter().map(|a| i64::try_from(a / &g).ok()).collect();
    }
    None
}

/// Change of variables `x = L x'` making `L = 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rescaling {
    /// Original coordinates are `factor` times the new ones.
    pub factor: BigInt,
}

impl Rescaling {
    pub fn map_back(&self, x: &[num_complex::Complex64]) -> Vec<num_complex::Complex64> {
        let f = self.factor.to_string().parse::<f64>().unwrap_or(f64::NAN);
        x.iter().map(|z| z * f).collect()
    }
}

pub fn normalize_l(t: &Decomposition) -> (Decomposition, Rescaling) {
    let l = t.l.clone();
    if l.is_one() {
        return (t.clone(), Rescaling { factor: l });
    }
    let f = vec![BigRational::from_integer(l.clone()); t.n];
    let bricks = t
        .bricks
        .iter()
        .map(|b| Brick::new(b.body.rescale(&f)).expect("rescaling keeps bricks nonconstant"))
        .collect();
    let d = Decomposition { target: t.target.rescale(&f), bricks, n: t.n, l: BigInt::one(), refined: t.refined };
    (d, Rescaling { factor: l })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> ExpPoly {
        ExpPoly::parse(s).unwrap()
    }

    fn shown(d: &Decomposition) -> Vec<String> {
        d.bricks().iter().map(|b| b.body().to_string()).collect()
    }

    #[test]
    fn worked_example() {
        let d = extract_decomposition(&p("exp(exp(x1/2 + x2^2)) + x1^3")).unwrap();
        assert_eq!(shown(&d), vec!["1/2*x1", "1/2*x2", "x2^2", "exp(1/2*x1)*exp(x2^2)"]);
        assert_eq!(d.l(), &BigInt::from(2));
        assert!(d.is_refined() && d.refined());
        d.check_bullets().unwrap();
        let (d1, s) = normalize_l(&d);
        assert_eq!(s.factor, BigInt::from(2));
        assert_eq!(shown(&d1), vec!["x1", "x2", "4*x2^2", "exp(4*x2^2)*exp(x1)"]);
        assert_eq!(d1.target().to_string(), "exp(exp(4*x2^2)*exp(x1)) + 8*x1^3");
        d1.check_bullets().unwrap();
    }

    #[test]
    fn trivial_cases() {
        let d = extract_decomposition(&p("x1^3 + x2")).unwrap();
        assert_eq!(shown(&d), vec!["x1", "x2"]);
        assert_eq!(d.l(), &BigInt::one());
        let d = extract_decomposition(&p("exp(x1) - 2")).unwrap();
        assert_eq!(shown(&d), vec!["x1"]);
        assert!(matches!(extract_decomposition(&p("3")), Err(Error::DegenerateInput(_))));
    }

    #[test]
    fn refine_removes_sum_brick() {
        let target = p("exp(exp(x1/2 + x2^2))");
        let vars = target.vars().clone();
        let q = |s: &str| ExpPoly::parse_in(s, &vars).unwrap();
        let t = Decomposition::from_parts(target.clone(), vec![q("x2^2"), q("x1/2 + x2^2")], BigInt::from(2)).unwrap();
        assert!(!t.is_refined());
        let r = refine(&t);
        assert_eq!(shown(&r), vec!["1/2*x1", "1/2*x2", "x2^2"]);
        assert!(r.is_refined());
    }

    #[test]
    fn refine_is_a_fixpoint_on_refined_input() {
        let d = extract_decomposition(&p("exp(exp(x1/2 + x2^2)) + x1^3")).unwrap();
        assert_eq!(refine(&d), d);
    }

    #[test]
    fn integer_combination_deleted() {
        let target = p("x1 + x2 + x3");
        let vars = target.vars().clone();
        let q = |s: &str| ExpPoly::parse_in(s, &vars).unwrap();
        let t = Decomposition::from_parts(target, vec![q("x1 + x2"), q("x3^2")], BigInt::one()).unwrap();
        assert!(!t.is_refined());
        let r = refine(&t);
        assert_eq!(shown(&r), vec!["x1", "x2", "x3", "x3^2"]);
    }

    #[test]
    fn rational_dependency_divides_bricks() {
        // extraction keeps (1/2 + i/2) x and drops i x = 2 (1/2 + i/2) x - x
        let target = p("exp(i*x) + exp((1/2 + 1/2*i)*x)");
        let d = extract_decomposition(&target).unwrap();
        assert_eq!(shown(&d), vec!["x", "(1/2 + 1/2*i)*x"]);
        assert!(d.is_refined());
        d.check_bullets().unwrap();
        // starting from both bricks, refinement halves x and i x instead
        let vars = target.vars().clone();
        let q = |s: &str| ExpPoly::parse_in(s, &vars).unwrap();
        let t = Decomposition::from_parts(target, vec![q("i*x"), q("(1/2 + 1/2*i)*x")], BigInt::one()).unwrap();
        assert!(!t.is_refined());
        let r = refine(&t);
        assert_eq!(r.l(), &BigInt::from(2));
        assert_eq!(shown(&r), vec!["1/2*x", "1/2*i*x"]);
        r.check_bullets().unwrap();
    }

    #[test]
    fn lcm_of_two_and_three() {
        let d = refine(&extract_decomposition(&p("exp(x1/2) + exp(x1/3)")).unwrap());
        assert_eq!(d.l(), &BigInt::from(6));
        let (d1, s) = normalize_l(&d);
        assert_eq!(s.factor, BigInt::from(6));
        assert_eq!(shown(&d1), vec!["x1"]);
        assert_eq!(d1.target().to_string(), "exp(3*x1) + exp(2*x1)");
    }

    #[test]
    fn empty_is_refined() {
        let target = ExpPoly::parse_in("1", &Vars::new(vec![]).unwrap()).unwrap();
        let d = Decomposition::from_parts(target, vec![], BigInt::one()).unwrap();
        assert!(d.is_refined());
    }
}
