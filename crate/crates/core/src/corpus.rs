//! Seeded random exponential polynomials for tests and benchmarks.
//!
//! Inputs are generated as text, parsed, and kept only when they normalize
//! to the requested height.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::exppoly::ExpPoly;

const COEFFS: &[&str] = &["1", "2", "3", "-1", "-2", "1/2", "-3/2", "i", "(1 + i)", "-5"];
const BODY_COEFFS: &[&str] = &["1", "-1", "2", "1/2", "-1/3", "i"];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CorpusSpec {
    pub size: usize,
    pub max_height: u32,
    pub max_vars: usize,
    pub seed: u64,
}

impl Default for CorpusSpec {
    fn default() -> Self {
        CorpusSpec { size: 60, max_height: 3, max_vars: 3, seed: 0x00c0_ffee }
    }
}

fn monomial(vars: &[String], rng: &mut ChaCha8Rng, min_degree: u32) -> String {
    let mut parts = Vec::new();
    let mut degree = 0;
    for v in vars {
        let e = rng.gen_range(0..=2u32);
        degree += e;
        match e {
            0 => {}
            1 => parts.push(v.clone()),
            _ => parts.push(format!("{}^{}", v, e)),
        }
    }
    if degree < min_degree {
        parts.push(vars.choose(rng).unwrap().clone());
    }
    parts.join("*")
}

/// A nonconstant body of exactly height `h` with no constant summand.
fn body(vars: &[String], h: u32, rng: &mut ChaCha8Rng) -> String {
    let terms = rng.gen_range(1..=2);
    let mut out = Vec::new();
    for k in 0..terms {
        let c = BODY_COEFFS.choose(rng).unwrap();
        let inner = if h > 0 && (k == 0 || rng.gen_bool(0.3)) {
            let m = monomial(vars, rng, 0);
            let e = format!("exp({})", body(vars, h - 1, rng));
            if m.is_empty() { e } else { format!("{}*{}", m, e) }
        } else {
            monomial(vars, rng, 1)
        };
        out.push(format!("{}*{}", c, inner));
    }
    out.join(" + ")
}

fn term(vars: &[String], h: u32, rng: &mut ChaCha8Rng, force: bool) -> String {
    let c = COEFFS.choose(rng).unwrap();
    let m = monomial(vars, rng, 0);
    let mut factors = vec![c.to_string()];
    if !m.is_empty() {
        factors.push(m);
    }
    if h > 0 && (force || rng.gen_bool(0.4)) {
        factors.push(format!("exp({})", body(vars, h - 1, rng)));
    }
    factors.join("*")
}

/// One random polynomial of exactly height `h` in `nvars` variables.
pub fn random_exppoly(nvars: usize, h: u32, rng: &mut ChaCha8Rng) -> ExpPoly {
    let vars: Vec<String> = if nvars == 1 { vec!["x".into()] } else { (1..=nvars).map(|i| format!("x{}", i)).collect() };
    loop {
        let terms = rng.gen_range(1..=3);
        let text: Vec<String> = (0..terms).map(|k| term(&vars, h, rng, k == 0)).collect();
        let text = text.join(" + ");
        if let Ok(p) = ExpPoly::parse(&text) {
            if p.height() == h && p.nvars() == nvars && !p.is_constant() {
                return p;
            }
        }
    }
}

/// Heights cycle through `1..=max_height`, variable counts through
/// `1..=max_vars`.
pub fn generate(spec: &CorpusSpec) -> Vec<ExpPoly> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    (0..spec.size)
        .map(|k| {
            let h = 1 + (k as u32 % spec.max_height);
            let n = 1 + (k / spec.max_height as usize) % spec.max_vars;
            random_exppoly(n, h, &mut rng)
        })
        .collect()
}
