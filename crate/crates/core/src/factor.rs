//! Exact factorization of multivariate polynomials over `Q(i)`.
//!
//! Pipeline: monomial content, recursive content per variable, square-free
//! decomposition (Yun) in a main variable, then per square-free piece:
//!
//! * univariate pieces are split by numerically guided root-subset search,
//!   every candidate being confirmed by exact division;
//! * a piece of degree one in some variable is irreducible (it is primitive);
//! * otherwise the piece is made monic in the main variable, specialized at
//!   a small integer point, the specialization is factored, the univariate
//!   factors are Hensel-lifted in the remaining variables and recombined by
//!   exact trial division.
//!
//! The last branch is budgeted; see [`MAX_TOTAL_DEGREE`] and [`MAX_VARS`].

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::mpoly::MPoly;
use crate::roots::poly_roots;
use crate::scalar::GaussRat;

/// Total-degree ceiling for the lifting branch.
pub const MAX_TOTAL_DEGREE: u32 = 8;
/// Variable-count ceiling for the lifting branch.
pub const MAX_VARS: usize = 5;
/// Degree ceiling for the univariate root-subset search.
pub const MAX_UNIVARIATE_DEGREE: u32 = 24;

const SPECIALIZATION_ATTEMPTS: usize = 64;

#[derive(Clone, Debug, PartialEq)]
pub struct Factorization {
    pub unit: GaussRat,
    /// Irreducible factors, pairwise non-associate, normalized with
    /// [`MPoly::normalize_associate`] and sorted.
    pub factors: Vec<(MPoly, u32)>,
}

impl Factorization {
    /// `unit * prod f^e`.
    pub fn expand(&self, nvars: usize) -> MPoly {
        let mut acc = MPoly::constant(nvars, self.unit.clone());
        for (f, e) in &self.factors {
            acc = &acc * &f.pow(*e);
        }
        acc
    }
}

pub fn factor(f: &MPoly) -> Result<Factorization> {
    if f.is_zero() {
        return Err(Error::UndefinedInput("factorization of the zero polynomial".into()));
    }
    let n = f.nvars();
    let mut raw: Vec<(MPoly, u32)> = Vec::new();
    let mut g = f.clone();
    for v in 0..n {
        let k = g.min_degree_in(v);
        if k > 0 {
            let mut e = vec![0; n];
            e[v] = k;
            g = g.div_exact(&MPoly::monomial(e, GaussRat::one())).expect("monomial content");
            raw.push((MPoly::var(n, v), k));
        }
    }
    let mut pieces = Vec::new();
    square_free_pieces(&g, 1, &mut pieces);
    for (p, m) in &pieces {
        match irreducible_factors(p) {
            Ok(fs) => raw.extend(fs.into_iter().map(|q| (q, *m))),
            Err(Error::Budget { reason, .. }) => {
                let partial = raw
                    .iter()
                    .chain(pieces.iter())
                    .map(|(q, e)| (q.to_string(), *e))
                    .collect();
                return Err(Error::Budget { reason, partial });
            }
            Err(e) => return Err(e),
        }
    }

    let mut merged: Vec<(MPoly, u32)> = Vec::new();
    for (q, e) in raw {
        let (_, q) = q.normalize_associate();
        if q.is_constant() {
            continue;
        }
        match merged.iter_mut().find(|(r, _)| *r == q) {
            Some((_, k)) => *k += e,
            None => merged.push((q, e)),
        }
    }
    merged.sort();
    let mut prod = MPoly::one(n);
    for (q, e) in &merged {
        prod = &prod * &q.pow(*e);
    }
    let unit = f
        .div_exact(&prod)
        .and_then(|u| u.constant_value())
        .ok_or_else(|| Error::ConstructionBug(format!("factors do not multiply back to {}", f)))?;
    Ok(Factorization { unit, factors: merged })
}

/// Square-free pieces of `f` (monomial content first), without splitting
/// them further. Their product equals `f` up to a constant.
pub fn square_free(f: &MPoly) -> Vec<(MPoly, u32)> {
    let n = f.nvars();
    let mut out = Vec::new();
    let mut g = f.clone();
    for v in 0..n {
        let k = g.min_degree_in(v);
        if k > 0 {
            let mut e = vec![0; n];
            e[v] = k;
            g = g.div_exact(&MPoly::monomial(e, GaussRat::one())).expect("monomial content");
            out.push((MPoly::var(n, v), k));
        }
    }
    square_free_pieces(&g, 1, &mut out);
    out
}

/// Splits off content in every variable, then runs Yun in a main variable.
/// Every emitted piece is square-free and primitive in all its variables.
fn square_free_pieces(g: &MPoly, mult: u32, out: &mut Vec<(MPoly, u32)>) {
    if g.is_constant() {
        return;
    }
    for v in g.vars_present() {
        let c = g.content_in(v);
        if !c.is_constant() {
            square_free_pieces(&c, mult, out);
            square_free_pieces(&g.div_exact(&c).expect("content divides"), mult, out);
            return;
        }
    }
    let v = main_variable(g);
    for (h, k) in yun(g, v) {
        out.push((h, mult * k));
    }
}

/// Variable of least positive degree, lowest index on ties.
fn main_variable(g: &MPoly) -> usize {
    g.vars_present()
        .into_iter()
        .min_by_key(|&v| (g.degree_in(v), v))
        .expect("nonconstant polynomial")
}

/// Yun's square-free decomposition with respect to `v` of a polynomial
/// primitive in `v`.
fn yun(f: &MPoly, v: usize) -> Vec<(MPoly, u32)> {
    let mut out = Vec::new();
    let df = f.derivative(v);
    let a0 = MPoly::gcd(f, &df);
    let mut b = f.div_exact(&a0).expect("gcd divides");
    let c = df.div_exact(&a0).expect("gcd divides");
    let mut d = &c - &b.derivative(v);
    let mut i = 1;
    while !b.is_constant() {
        let a = MPoly::gcd(&b, &d);
        if !a.is_constant() {
            out.push((a.clone(), i));
        }
        b = b.div_exact(&a).expect("gcd divides");
        let c = d.div_exact(&a).expect("gcd divides");
        d = &c - &b.derivative(v);
        i += 1;
    }
    out
}

/// Irreducible factors of a square-free polynomial that is primitive in each
/// of its variables.
fn irreducible_factors(h: &MPoly) -> Result<Vec<MPoly>> {
    let vars = h.vars_present();
    if vars.is_empty() {
        return Ok(Vec::new());
    }
    if vars.len() == 1 {
        return univariate_factors(h, vars[0]);
    }
    if vars.iter().any(|&u| h.degree_in(u) == 1) {
        return Ok(vec![h.clone()]);
    }
    if h.total_degree() > MAX_TOTAL_DEGREE || vars.len() > MAX_VARS {
        return Err(Error::Budget {
            reason: format!(
                "piece of total degree {} in {} variables exceeds degree {} / {} variables",
                h.total_degree(),
                vars.len(),
                MAX_TOTAL_DEGREE,
                MAX_VARS
            ),
            partial: Vec::new(),
        });
    }
    lifted_factors(h, main_variable(h))
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Factors of a square-free polynomial in the single variable `v`.
pub(crate) fn univariate_factors(h: &MPoly, v: usize) -> Result<Vec<MPoly>> {
    let n = h.nvars();
    let deg = h.degree_in(v);
    if deg <= 1 {
        return Ok(vec![h.clone()]);
    }
    if deg > MAX_UNIVARIATE_DEGREE {
        return Err(Error::Budget {
            reason: format!("univariate degree {} exceeds {}", deg, MAX_UNIVARIATE_DEGREE),
            partial: Vec::new(),
        });
    }
    let mut out = Vec::new();
    let (_, mut cur) = h.normalize_associate();
    let coeffs: Vec<Complex64> = cur.coeffs_in(v).iter().map(|c| c.constant_value().unwrap().to_complex()).collect();
    let mut roots = poly_roots(&coeffs);

    let mut size = 1;
    'outer: while 2 * size <= roots.len() {
        let lc = cur.lc_in(v).constant_value().expect("univariate").to_complex();
        for subset in subsets(roots.len(), size) {
            // lc * prod (v - r)
            let mut cand = vec![lc];
            for &j in &subset {
                let r = roots[j];
                let mut next = vec![Complex64::new(0.0, 0.0); cand.len() + 1];
                for (k, a) in cand.iter().enumerate() {
                    next[k + 1] += a;
                    next[k] -= a * r;
                }
                cand = next;
            }
            let mut poly = MPoly::zero(n);
            let mut ok = true;
            for (k, a) in cand.iter().enumerate() {
                let Some(g) = GaussRat::round_complex(*a) else {
                    ok = false;
                    break;
                };
                let err = (a - g.to_complex()).norm();
                if err > 0.25 {
                    ok = false;
                    break;
                }
                let mut e = vec![0; n];
                e[v] = k as u32;
                poly.add_term(e, g);
            }
            if !ok || poly.degree_in(v) as usize != size {
                continue;
            }
            if let Some(q) = cur.div_exact(&poly) {
                out.push(poly.normalize_associate().1);
                cur = q.normalize_associate().1;
                let mut keep = Vec::new();
                for (j, r) in roots.iter().enumerate() {
                    if !subset.contains(&j) {
                        keep.push(*r);
                    }
                }
                roots = keep;
                continue 'outer;
            }
        }
        size += 1;
    }
    if !cur.is_constant() {
        out.push(cur);
    }
    Ok(out)
}

/// Dense univariate helpers over `Q(i)`, coefficients low to high.
mod upoly {
    use crate::scalar::GaussRat;

    pub type U = Vec<GaussRat>;

    pub fn trim(mut a: U) -> U {
        while a.last().map(|c| c.is_zero()).unwrap_or(false) {
            a.pop();
        }
        a
    }

    pub fn sub(a: &U, b: &U) -> U {
        let n = a.len().max(b.len());
        let z = GaussRat::zero();
        trim((0..n).map(|i| a.get(i).unwrap_or(&z) - b.get(i).unwrap_or(&z)).collect())
    }

    pub fn mul(a: &U, b: &U) -> U {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![GaussRat::zero(); a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                out[i + j] = &out[i + j] + &(x * y);
            }
        }
        trim(out)
    }

    pub fn divrem(a: &U, b: &U) -> (U, U) {
        let b = trim(b.clone());
        let lead_inv = b.last().expect("nonzero divisor").inv().expect("nonzero");
        let mut r = trim(a.clone());
        if r.len() < b.len() {
            return (Vec::new(), r);
        }
        let mut q = vec![GaussRat::zero(); r.len() - b.len() + 1];
        while r.len() >= b.len() && !r.is_empty() {
            let k = r.len() - b.len();
            let c = r.last().unwrap() * &lead_inv;
            for (j, bj) in b.iter().enumerate() {
                r[k + j] = &r[k + j] - &(&c * bj);
            }
            q[k] = c;
            r.pop();
            r = trim(r);
        }
        (trim(q), r)
    }

    /// `(g, s, t)` with `s a + t b = g`, `g` monic.
    pub fn ext_gcd(a: &U, b: &U) -> (U, U, U) {
        let (mut r0, mut r1) = (trim(a.clone()), trim(b.clone()));
        let (mut s0, mut s1) = (vec![GaussRat::one()], Vec::new());
        let (mut t0, mut t1) = (Vec::new(), vec![GaussRat::one()]);
        while !r1.is_empty() {
            let (q, r) = divrem(&r0, &r1);
            let s2 = sub(&s0, &mul(&q, &s1));
            let t2 = sub(&t0, &mul(&q, &t1));
            r0 = r1;
            r1 = r;
            s0 = s1;
            s1 = s2;
            t0 = t1;
            t1 = t2;
        }
        let inv = r0.last().expect("nonzero gcd").inv().expect("nonzero");
        let scale = |u: &U| trim(u.iter().map(|c| c * &inv).collect());
        (scale(&r0), scale(&s0), scale(&t0))
    }
}

fn to_upoly(p: &MPoly, v: usize) -> upoly::U {
    upoly::trim(
        p.coeffs_in(v)
            .iter()
            .map(|c| c.constant_value().expect("univariate coefficient"))
            .collect(),
    )
}

fn from_upoly(u: &upoly::U, nvars: usize, v: usize) -> MPoly {
    let mut p = MPoly::zero(nvars);
    for (k, c) in u.iter().enumerate() {
        let mut e = vec![0; nvars];
        e[v] = k as u32;
        p.add_term(e, c.clone());
    }
    p
}

fn t_degree(e: &[u32], tvars: &[usize]) -> u32 {
    tvars.iter().map(|&t| e[t]).sum()
}

fn truncate(p: &MPoly, tvars: &[usize], bound: u32) -> MPoly {
    MPoly::from_terms(
        p.nvars(),
        p.terms().filter(|(e, _)| t_degree(e, tvars) <= bound).map(|(e, c)| (e.clone(), c.clone())),
    )
}

fn mul_trunc(a: &MPoly, b: &MPoly, tvars: &[usize], bound: u32) -> MPoly {
    let mut out = MPoly::zero(a.nvars());
    for (e1, c1) in a.terms() {
        let d1 = t_degree(e1, tvars);
        for (e2, c2) in b.terms() {
            if d1 + t_degree(e2, tvars) > bound {
                continue;
            }
            out.add_term(e1.iter().zip(e2).map(|(x, y)| x + y).collect(), c1 * c2);
        }
    }
    out
}

/// Lifts `target ≡ g0 * h0 (mod t)` to `target ≡ g * h (mod t^(bound+1))`
/// with `g, h` monic in `v`.
fn lift_pair(target: &MPoly, g0: &upoly::U, h0: &upoly::U, v: usize, tvars: &[usize], bound: u32) -> (MPoly, MPoly) {
    let n = target.nvars();
    let (_, _, sigma) = upoly::ext_gcd(g0, h0); // s g0 + sigma h0 = 1
    let mut g = from_upoly(g0, n, v);
    let mut h = from_upoly(h0, n, v);
    for k in 1..=bound {
        let err = &truncate(target, tvars, k) - &mul_trunc(&g, &h, tvars, k);
        // group the degree-k part by t-monomial
        let mut groups: std::collections::BTreeMap<Vec<u32>, upoly::U> = std::collections::BTreeMap::new();
        for (e, c) in err.terms() {
            if t_degree(e, tvars) != k {
                continue;
            }
            let mut key = e.clone();
            key[v] = 0;
            let slot = groups.entry(key).or_default();
            let pos = e[v] as usize;
            if slot.len() <= pos {
                slot.resize(pos + 1, GaussRat::zero());
            }
            slot[pos] = c.clone();
        }
        for (key, e_alpha) in groups {
            let e_alpha = upoly::trim(e_alpha);
            // A h0 + B g0 = e_alpha, deg A < deg g0
            let (_, a) = upoly::divrem(&upoly::mul(&e_alpha, &sigma), g0);
            let (b, rem) = upoly::divrem(&upoly::sub(&e_alpha, &upoly::mul(&a, h0)), g0);
            debug_assert!(rem.is_empty());
            let mono = MPoly::monomial(key, GaussRat::one());
            g = &g + &(&mono * &from_upoly(&a, n, v));
            h = &h + &(&mono * &from_upoly(&b, n, v));
        }
    }
    (g, h)
}

fn lifted_factors(h: &MPoly, v: usize) -> Result<Vec<MPoly>> {
    let n = h.nvars();
    let others: Vec<usize> = h.vars_present().into_iter().filter(|&u| u != v).collect();
    let d = h.degree_in(v);
    let coeffs = h.coeffs_in(v);
    let ell = coeffs[d as usize].clone();

    // monic transform: sum_j c_j ell^(d-1-j) v^j
    let mut monic_coeffs = Vec::with_capacity(d as usize + 1);
    for (j, c) in coeffs.iter().enumerate() {
        if j == d as usize {
            monic_coeffs.push(MPoly::one(n));
        } else {
            monic_coeffs.push(c * &ell.pow(d - 1 - j as u32));
        }
    }
    let ht = MPoly::from_coeffs_in(n, v, &monic_coeffs);

    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_fac7);
    for attempt in 0..SPECIALIZATION_ATTEMPTS {
        let span = 2 + (attempt as i64) / 8;
        let point: Vec<(usize, GaussRat)> =
            others.iter().map(|&u| (u, GaussRat::from_int(rng.gen_range(-span..=span)))).collect();
        let eval_at = |p: &MPoly| point.iter().fold(p.clone(), |acc, (u, c)| acc.eval_var(*u, c));
        if eval_at(&ell).is_zero() {
            continue;
        }
        let h0 = eval_at(&ht);
        if !MPoly::gcd(&h0, &h0.derivative(v)).is_constant() {
            continue;
        }
        let uni = univariate_factors(&h0, v)?;
        if uni.len() <= 1 {
            return Ok(vec![h.clone()]);
        }
        let uni: Vec<upoly::U> = uni.iter().map(|f| to_upoly(&f.monic(), v)).collect();

        // shift the specialization point to the origin
        let shift_to = |p: &MPoly, sign: i64| {
            point.iter().fold(p.clone(), |acc, (u, c)| {
                let sub = &MPoly::var(n, *u) + &MPoly::constant(n, c * &GaussRat::from_int(sign));
                acc.compose_var(*u, &sub)
            })
        };
        let big_f = shift_to(&ht, 1);
        let bound = big_f.total_degree();

        let mut lifted = Vec::with_capacity(uni.len());
        let mut rest = big_f.clone();
        for i in 0..uni.len() - 1 {
            let h0_rest = uni[i + 1..].iter().fold(vec![GaussRat::one()], |acc, f| upoly::mul(&acc, f));
            let (g, hh) = lift_pair(&rest, &uni[i], &h0_rest, v, &others, bound);
            lifted.push(g);
            rest = hh;
        }
        lifted.push(rest);

        // necessary condition for a candidate: it divides `ht` along a line
        let probe: Vec<(usize, GaussRat)> =
            others.iter().map(|&u| (u, GaussRat::from_int(rng.gen_range(-50..=50)))).collect();
        let probe_at = |p: &MPoly| probe.iter().fold(p.clone(), |acc, (u, c)| acc.eval_var(*u, c));
        let ht_probe = probe_at(&ht);

        let r = lifted.len();
        for size in 1..=r / 2 {
            for subset in subsets(r, size) {
                let mut cand = MPoly::one(n);
                for &j in &subset {
                    cand = mul_trunc(&cand, &lifted[j], &others, bound);
                }
                let cand = shift_to(&cand, -1);
                let cand_probe = probe_at(&cand);
                if cand_probe.is_zero() || ht_probe.div_exact(&cand_probe).is_none() {
                    continue;
                }
                if ht.div_exact(&cand).is_none() {
                    continue;
                }
                // undo the monic transform: pp_v(cand(u, ell v))
                let scaled = cand.compose_var(v, &(&ell * &MPoly::var(n, v)));
                let g = scaled.primitive_in(v);
                let Some(q) = h.div_exact(&g) else {
                    return Err(Error::ConstructionBug("lifted factor does not divide".into()));
                };
                let mut out = vec![g];
                out.extend(irreducible_factors(&q)?);
                return Ok(out);
            }
        }
        return Ok(vec![h.clone()]);
    }
    Err(Error::Budget {
        reason: format!("no square-free specialization found in {} attempts", SPECIALIZATION_ATTEMPTS),
        partial: Vec::new(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn var(n: usize, i: usize) -> MPoly {
        MPoly::var(n, i)
    }

    fn k(n: usize, c: i64) -> MPoly {
        MPoly::constant(n, GaussRat::from_int(c))
    }

    fn check(f: &MPoly, expected_factors: usize) -> Factorization {
        let fz = factor(f).unwrap();
        assert_eq!(&fz.expand(f.nvars()), f, "product mismatch for {}", f);
        assert_eq!(
            fz.factors.iter().map(|(_, e)| *e as usize).sum::<usize>(),
            expected_factors,
            "{} -> {:?}",
            f,
            fz.factors.iter().map(|(q, e)| format!("({})^{}", q, e)).collect::<Vec<_>>()
        );
        fz
    }

    #[test]
    fn difference_of_squares() {
        let y = var(1, 0);
        let f = &(&y * &y) - &k(1, 4);
        let fz = check(&f, 2);
        let shown: Vec<String> = fz.factors.iter().map(|(q, _)| q.to_string()).collect();
        assert!(shown.contains(&"v0 - 2".to_string()));
        assert!(shown.contains(&"v0 + 2".to_string()));
    }

    #[test]
    fn gaussian_split() {
        let y = var(1, 0);
        check(&(&(&y * &y) + &k(1, 1)), 2);
        // y^2 - 2 stays irreducible over Q(i)
        check(&(&(&y * &y) - &k(1, 2)), 1);
    }

    #[test]
    fn common_monomial_factor() {
        let y1 = var(2, 0);
        let y2 = var(2, 1);
        let f = &(&y1 * &y2) - &y1;
        check(&f, 2);
    }

    #[test]
    fn linear_in_one_variable_is_irreducible() {
        // y4 + 8 x1^3 in variables (x1, y4)
        let x = var(2, 0);
        let y = var(2, 1);
        check(&(&y + &x.pow(3).scale(&GaussRat::from_int(8))), 1);
    }

    #[test]
    fn repeated_factors() {
        let x = var(2, 0);
        let y = var(2, 1);
        let a = &(&x * &y) + &k(2, 1);
        let b = &x - &y;
        let f = &(&a.pow(2) * &b.pow(3)) * &k(2, 6);
        let fz = check(&f, 5);
        assert_eq!(fz.unit, GaussRat::from_int(6));
    }

    #[test]
    fn bivariate_lifting() {
        let x = var(2, 0);
        let y = var(2, 1);
        // (x^2 + y + 1)(y^2 + x + 2): both factors have degree >= 1 in each var,
        // but the product has degree 2 in both, forcing the lifting branch.
        let a = &(&(&x * &x) + &y) + &k(2, 1);
        let b = &(&(&y * &y) + &x) + &k(2, 2);
        check(&(&a * &b), 2);
        // x^2 - y^2
        check(&(&(&x * &x) - &(&y * &y)), 2);
        // x^2 y^2 + 1 is irreducible over Q(i)? it is (xy)^2 + 1 = (xy - i)(xy + i)
        check(&(&(&(&x * &x) * &(&y * &y)) + &k(2, 1)), 2);
        // x^2 + y^2 + 1 irreducible
        check(&(&(&(&x * &x) + &(&y * &y)) + &k(2, 1)), 1);
    }

    #[test]
    fn trivariate_lifting_with_leading_coefficient() {
        let x = var(3, 0);
        let y = var(3, 1);
        let z = var(3, 2);
        let a = &(&(&x * &x) * &y) + &(&z * &z);
        let b = &(&(&y * &y) * &z) - &(&x * &x);
        check(&(&a * &b), 2);
    }

    #[test]
    fn budget_exceeded_returns_partial() {
        let n = 6;
        let vs: Vec<MPoly> = (0..n).map(|i| var(n, i)).collect();
        let mut f = k(n, 1);
        for v in &vs {
            f = &f + &(v * v);
        }
        let f = &f * &f.clone();
        match factor(&f) {
            Err(Error::Budget { partial, .. }) => assert!(!partial.is_empty()),
            other => panic!("expected budget error, got {:?}", other.map(|f| f.factors.len())),
        }
    }

    #[test]
    fn trivariate_product_with_gaussian_coefficients() {
        let n = 3;
        let (x, y, z) = (var(n, 0), var(n, 1), var(n, 2));
        let gi = |re: i64, im: i64| {
            MPoly::constant(n, &GaussRat::from_int(re) + &(&GaussRat::i() * &GaussRat::from_int(im)))
        };
        let f = &(&x + &(&gi(1, 2) * &(&y.pow(2) * &z))) + &(&gi(0, 1) * &z.pow(2));
        let g = &(&(&k(n, 2) * &(&x.pow(2) * &y)) + &(&gi(0, 1) * &(&x.pow(2) * &z.pow(2)))) + &(&gi(2, -1) * &z.pow(2));
        check(&(&(&f * &g) * &y), 3);
    }
}
