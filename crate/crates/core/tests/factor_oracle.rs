//! Irreducibility oracle for the factorizer, independent of its lifting.
//!
//! A polynomial over Q(i) restricted to a line `a + t*b` with integer `a, b`
//! keeps its total degree for generic `b`, and a nontrivial factorization
//! restricts to one. So an irreducible restriction of full degree certifies
//! irreducibility. Univariate irreducibility over Q(i) is decided by brute
//! force over root subsets: after clearing denominators, a factor `G` of `F`
//! makes `lc(F) * prod_{r in G} (t - r)` a Gaussian-integer polynomial.

use expzero::corpus::random_exppoly;
use expzero::factor::factor;
use expzero::mpoly::MPoly;
use expzero::reduction::factor_pstar;
use expzero::scalar::GaussRat;
use expzero::variety::variety_of;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::One;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const LINES: usize = 12;
const MAX_SUBSET_DEGREE: usize = 14;

fn mul(a: &[GaussRat], b: &[GaussRat]) -> Vec<GaussRat> {
    let mut out = vec![GaussRat::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] = &out[i + j] + &(x * y);
        }
    }
    out
}

/// Coefficients of `f(a + t b)`, lowest first.
fn restrict(f: &MPoly, a: &[i64], b: &[i64]) -> Vec<GaussRat> {
    let deg = f.total_degree() as usize;
    let mut out = vec![GaussRat::zero(); deg + 1];
    for (e, c) in f.terms() {
        let mut acc = vec![c.clone()];
        for (v, &k) in e.iter().enumerate() {
            let line = [GaussRat::from_int(a[v]), GaussRat::from_int(b[v])];
            for _ in 0..k {
                acc = mul(&acc, &line);
            }
        }
        for (i, x) in acc.iter().enumerate() {
            out[i] = &out[i] + x;
        }
    }
    out
}

/// Weierstrass iteration on the monic polynomial, then Newton polishing.
fn all_roots(c: &[Complex64]) -> Vec<Complex64> {
    let d = c.len() - 1;
    let monic: Vec<Complex64> = c.iter().map(|a| a / c[d]).collect();
    let eval = |z: Complex64, c: &[Complex64]| c.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, a| acc * z + a);
    let bound = 1.0 + monic[..d].iter().map(|a| a.norm()).fold(0.0, f64::max);
    let seed = Complex64::new(0.4, 0.9);
    let mut roots: Vec<Complex64> = (0..d).map(|k| seed.powu(k as u32) * bound).collect();
    for _ in 0..2000 {
        let mut moved: f64 = 0.0;
        for k in 0..d {
            let denom: Complex64 = (0..d).filter(|&j| j != k).map(|j| roots[k] - roots[j]).product();
            let step = eval(roots[k], &monic) / denom;
            roots[k] -= step;
            moved = moved.max(step.norm());
        }
        if moved < 1e-15 * bound {
            break;
        }
    }
    let dc: Vec<Complex64> = (1..=d).map(|k| monic[k] * k as f64).collect();
    for r in roots.iter_mut() {
        for _ in 0..3 {
            let g = eval(*r, &dc);
            if g.norm() > 0.0 {
                *r -= eval(*r, &monic) / g;
            }
        }
    }
    roots
}

fn near_gauss_int(z: Complex64) -> bool {
    let tol = 1e-6 * z.norm().max(1.0);
    (z.re - z.re.round()).abs() <= tol && (z.im - z.im.round()).abs() <= tol
}

/// `Some(true)` if irreducible over Q(i), `Some(false)` if a root subset
/// gives a Gaussian-integer factor, `None` when the degree is too large.
fn univariate_irreducible(coeffs: &[GaussRat]) -> Option<bool> {
    let d = coeffs.len() - 1;
    if d <= 1 {
        return Some(true);
    }
    if d > MAX_SUBSET_DEGREE {
        return None;
    }
    let den = coeffs.iter().fold(BigInt::one(), |acc, c| acc.lcm(&c.denom_lcm()));
    let scale = GaussRat::from_rational(BigRational::from_integer(den));
    let c: Vec<Complex64> = coeffs.iter().map(|x| (x * &scale).to_complex()).collect();
    let lc = c[d];
    let roots = all_roots(&c);
    // subsets containing root 0; the complement of any factor is a factor
    for mask in 0u32..(1 << (d - 1)) {
        let size = 1 + mask.count_ones() as usize;
        if size == d {
            continue;
        }
        let mut prod = vec![lc];
        for (k, r) in roots.iter().enumerate() {
            if k == 0 || mask & (1 << (k - 1)) != 0 {
                let mut next = vec![Complex64::new(0.0, 0.0); prod.len() + 1];
                for (i, p) in prod.iter().enumerate() {
                    next[i + 1] += p;
                    next[i] -= p * r;
                }
                prod = next;
            }
        }
        if prod.iter().all(|z| near_gauss_int(*z)) {
            return Some(false);
        }
    }
    Some(true)
}

/// `Some(true)` once some full-degree line restriction is irreducible.
fn certify_irreducible(f: &MPoly, rng: &mut ChaCha8Rng) -> Option<bool> {
    let n = f.nvars();
    let deg = f.total_degree() as usize;
    let mut saw_reducible = false;
    for _ in 0..LINES {
        let a: Vec<i64> = (0..n).map(|_| rng.gen_range(-3..=3)).collect();
        let b: Vec<i64> = (0..n).map(|_| rng.gen_range(1..=4) * if rng.gen_bool(0.5) { 1 } else { -1 }).collect();
        let r = restrict(f, &a, &b);
        if r.len() != deg + 1 || r[deg].is_zero() {
            continue;
        }
        match univariate_irreducible(&r)? {
            true => return Some(true),
            false => saw_reducible = true,
        }
    }
    saw_reducible.then_some(false)
}

fn poly(n: usize, terms: &[(&[u32], i64, i64)]) -> MPoly {
    MPoly::from_terms(n, terms.iter().map(|(e, re, im)| {
        (e.to_vec(), &GaussRat::from_int(*re) + &(&GaussRat::i() * &GaussRat::from_int(*im)))
    }))
}

#[test]
fn oracle_recognizes_known_products() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    // x^2 + 1 splits over Q(i), x^2 - 2 does not
    assert_eq!(certify_irreducible(&poly(1, &[(&[2], 1, 0), (&[0], 1, 0)]), &mut rng), Some(false));
    assert_eq!(certify_irreducible(&poly(1, &[(&[2], 1, 0), (&[0], -2, 0)]), &mut rng), Some(true));
    let f = poly(2, &[(&[1, 0], 1, 0), (&[0, 1], 1, 0), (&[0, 0], 1, 0)]);
    let g = poly(2, &[(&[1, 0], 1, 0), (&[0, 2], -1, 0), (&[0, 0], 2, 1)]);
    assert_eq!(certify_irreducible(&f, &mut rng), Some(true));
    assert_eq!(certify_irreducible(&g, &mut rng), Some(true));
    assert_eq!(certify_irreducible(&(&f * &g), &mut rng), Some(false));
    // x^2 + y^2 = (x + iy)(x - iy)
    assert_eq!(certify_irreducible(&poly(2, &[(&[2, 0], 1, 0), (&[0, 2], 1, 0)]), &mut rng), Some(false));
}

/// Degrees beyond the subset search are accepted without a certificate.
fn certify(f: &MPoly, rng: &mut ChaCha8Rng) -> Option<bool> {
    if f.total_degree() as usize > MAX_SUBSET_DEGREE {
        return Some(true);
    }
    certify_irreducible(f, rng)
}

fn check_factorization(f: &MPoly, rng: &mut ChaCha8Rng) -> Result<(), TestCaseError> {
    let fz = factor(f).map_err(|e| TestCaseError::reject(e.to_string()))?;
    prop_assert_eq!(&fz.expand(f.nvars()), f);
    for (q, _) in &fz.factors {
        prop_assert_eq!(certify(q, rng), Some(true), "factor {} of {}", q, f);
    }
    Ok(())
}

fn small_poly(n: usize, rng: &mut ChaCha8Rng) -> MPoly {
    let terms = rng.gen_range(2..=3);
    let mut f = MPoly::zero(n);
    for _ in 0..terms {
        let e: Vec<u32> = (0..n).map(|_| rng.gen_range(0..=2)).collect();
        let c = &GaussRat::from_int(rng.gen_range(-3..=3)) + &(&GaussRat::i() * &GaussRat::from_int(rng.gen_range(-1..=1)));
        f.add_term(e, c);
    }
    f
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn factors_of_random_products_are_irreducible(seed in any::<u64>(), n in 1usize..=3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (a, b) = (small_poly(n, &mut rng), small_poly(n, &mut rng));
        prop_assume!(!a.is_constant() && !b.is_constant());
        let f = &a * &b;
        check_factorization(&f, &mut rng)?;
        let fz = factor(&f).unwrap();
        let count: u32 = fz.factors.iter().filter(|(q, _)| q.total_degree() > 0).map(|(_, e)| e).sum();
        prop_assert!(count >= 2, "{} has fewer than two factors", f);
    }

    #[test]
    fn hypersurface_factors_are_irreducible(seed in any::<u64>(), n in 1usize..=3, h in 1u32..=3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = random_exppoly(n, h, &mut rng);
        let (v, _) = variety_of(&p).unwrap();
        let fz = factor_pstar(&v).unwrap();
        prop_assert_eq!(&fz.expand(), v.hypersurface());
        for (q, _) in &fz.factors {
            // log constants are free indeterminates for the factorizer; skip them here
            let Some(terms) = q.terms().map(|(e, c)| Some((e.iter().map(|&a| u32::try_from(a).ok()).collect::<Option<Vec<_>>>()?, c.as_gauss()?))).collect::<Option<Vec<_>>>() else { continue };
            let m = MPoly::from_terms(q.nvars(), terms);
            prop_assert_eq!(certify(&m, &mut rng), Some(true), "factor {}", q);
        }
    }
}

