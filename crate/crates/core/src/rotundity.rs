//! Numeric rotundity probes.
//!
//! For an integer matrix `C` (`r x alpha`, rank `r`) the map
//! `[C](z, y) = (C z, y^C)` sends the variety into `C^r x (C*)^r`. The
//! variety is rotund when every such image has dimension at least `r`.
//! The probe samples smooth points of the hypersurface `p* = 0`, builds
//! the differential of the composite map in a local chart, and takes its
//! numeric rank. Rank at a point lower-bounds the image dimension, so a
//! pass is evidence, not proof, and only finitely many matrices are tried.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;
use crate::lpoly::LPoly;
use crate::reduction::{freeness_check, FreenessResult};
use crate::roots::poly_roots;
use crate::scalar::BranchEnv;
use crate::variety::{GPoint, VarietySystem};

/// Attempts per sample before giving up.
const SAMPLE_ATTEMPTS: usize = 64;
/// Points must satisfy the system to this scaled residual.
pub const SAMPLE_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntMatrix {
    rows: Vec<Vec<i64>>,
    cols: usize,
}

impl IntMatrix {
    pub fn new(rows: Vec<Vec<i64>>, cols: usize) -> Result<Self> {
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::Contract(format!("every row needs {} entries", cols)));
        }
        Ok(IntMatrix { rows, cols })
    }

    pub fn identity(n: usize) -> Self {
        let rows = (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect();
        IntMatrix { rows, cols: n }
    }

    pub fn rows(&self) -> &[Vec<i64>] {
        &self.rows
    }

    pub fn r(&self) -> usize {
        self.rows.len()
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Exact rank over Q.
    pub fn rank(&self) -> usize {
        linalg::rank_i64(&self.rows)
    }
}

/// `u_i = sum_j c_ij z_j`, `v_i = prod_j y_j^c_ij`.
pub fn apply_c(c: &IntMatrix, z: &[Complex64], y: &[Complex64]) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
    if z.len() != c.cols || y.len() != c.cols {
        return Err(Error::Contract(format!("matrix has {} columns, point has {}", c.cols, z.len())));
    }
    if y.iter().any(|v| v.norm() == 0.0) {
        return Err(Error::Domain("a y-coordinate is zero".into()));
    }
    let mut u = Vec::with_capacity(c.r());
    let mut v = Vec::with_capacity(c.r());
    for row in &c.rows {
        let mut a = Complex64::new(0.0, 0.0);
        let mut b = Complex64::new(1.0, 0.0);
        for ((&k, zj), yj) in row.iter().zip(z).zip(y) {
            a += zj * k as f64;
            if k > 0 {
                b *= yj.powu(k as u32);
            } else if k < 0 {
                b /= yj.powu(k.unsigned_abs() as u32);
            }
        }
        u.push(a);
        v.push(b);
    }
    Ok((u, v))
}

/// Sampling controls. `pinned_x[i] = Some(a)` freezes `x_i = a`, removing
/// it from the chart; used to probe subvarieties.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SampleSpec {
    pub pinned_x: Vec<Option<Complex64>>,
}

impl SampleSpec {
    fn pinned(&self, i: usize) -> Option<Complex64> {
        self.pinned_x.get(i).copied().flatten()
    }
}

fn random_disk(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

fn random_torus(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::from_polar(rng.gen_range(-0.5f64..0.5).exp(), rng.gen_range(0.0..std::f64::consts::TAU))
}

fn polish(q: &LPoly, v: usize, pt: &mut [Complex64], env: &BranchEnv) {
    let dq = q.derivative(v);
    for _ in 0..8 {
        let f = q.eval(pt, env);
        let d = dq.eval(pt, env);
        if d.norm() == 0.0 || !f.is_finite() {
            return;
        }
        let step = f / d;
        pt[v] -= step;
        if step.norm() <= 1e-16 * (1.0 + pt[v].norm()) {
            return;
        }
    }
}

/// A random point of the variety: random free coordinates, one coordinate
/// of `p*` solved for, `w` lifted through the graph polynomials.
pub fn sample_variety_point(v: &VarietySystem, rng: &mut ChaCha8Rng) -> Result<GPoint> {
    sample_with(v, &SampleSpec::default(), rng)
}

pub fn sample_with(v: &VarietySystem, spec: &SampleSpec, rng: &mut ChaCha8Rng) -> Result<GPoint> {
    let (n, alpha) = (v.n(), v.alpha());
    let q = v.hypersurface();
    let present = q.vars_present();
    if present.is_empty() {
        return Err(Error::Contract("p* is constant".into()));
    }
    let env = BranchEnv::new();
    let ys: Vec<usize> = present.iter().copied().filter(|&i| i >= n).collect();
    let xs: Vec<usize> = present.iter().copied().filter(|&i| i < n && spec.pinned(i).is_none()).collect();
    let pool = if ys.is_empty() { xs } else { ys };
    if pool.is_empty() {
        return Err(Error::SamplingFailure { attempts: 0, reason: "no coordinate of p* is free".into() });
    }
    let mut last = String::new();
    for _ in 0..SAMPLE_ATTEMPTS {
        let mut pt: Vec<Complex64> = (0..n).map(|i| spec.pinned(i).unwrap_or_else(|| random_disk(rng))).collect();
        pt.extend((0..alpha).map(|_| random_torus(rng)));
        let s = pool[rng.gen_range(0..pool.len())];
        let (low, coeffs) = q.univariate_at(s, &pt, &env);
        let roots: Vec<Complex64> = poly_roots(&coeffs)
            .into_iter()
            .filter(|z| z.is_finite() && (s < n || z.norm() > 1e-12))
            .collect();
        if roots.is_empty() {
            last = format!("restriction to coordinate {} has no usable root (lowest exponent {})", s, low);
            continue;
        }
        pt[s] = roots[rng.gen_range(0..roots.len())];
        polish(q, s, &mut pt, &env);
        let point = match v.lift_phi(&pt[..n], &pt[n..], &env) {
            Ok(p) => p,
            Err(e) => {
                last = e.to_string();
                continue;
            }
        };
        let (ok, r) = v.membership(&point, SAMPLE_TOL, &env)?;
        if ok {
            return Ok(point);
        }
        last = format!("residual {:.3e} above tolerance", r);
    }
    Err(Error::SamplingFailure { attempts: SAMPLE_ATTEMPTS, reason: last })
}

/// Differential of `[C]` composed with a chart of the hypersurface at
/// `pt`. Rows are `d u_i` and `d log v_i` (a nonzero row scaling of `d v_i`).
fn chart_jacobian(v: &VarietySystem, c: &IntMatrix, pt: &GPoint, spec: &SampleSpec) -> Option<DMatrix<Complex64>> {
    let (n, alpha) = (v.n(), v.alpha());
    let dim = n + alpha;
    let env = BranchEnv::new();
    let xy: Vec<Complex64> = pt.x.iter().chain(&pt.y).copied().collect();
    let q = v.hypersurface();
    let grad: Vec<Complex64> = (0..dim).map(|k| q.derivative(k).eval(&xy, &env)).collect();
    let movable: Vec<usize> = (0..dim).filter(|&k| k >= n || spec.pinned(k).is_none()).collect();
    let scale = grad.iter().map(|g| g.norm()).fold(0.0, f64::max);
    // pivot: the movable coordinate p* depends on most strongly
    let &pivot = movable.iter().max_by(|&&a, &&b| grad[a].norm().total_cmp(&grad[b].norm()))?;
    if scale == 0.0 || grad[pivot].norm() <= 1e-10 * scale {
        return None;
    }
    let params: Vec<usize> = movable.iter().copied().filter(|&k| k != pivot).collect();
    // d(x, y) / d(params)
    let mut dxy = DMatrix::<Complex64>::zeros(dim, params.len());
    for (col, &k) in params.iter().enumerate() {
        dxy[(k, col)] = Complex64::new(1.0, 0.0);
        dxy[(pivot, col)] = -grad[k] / grad[pivot];
    }
    // d(z, log y) / d(x, y)
    let mut dz = DMatrix::<Complex64>::zeros(2 * alpha, dim);
    for i in 0..n {
        dz[(i, i)] = Complex64::new(1.0, 0.0);
    }
    for (i, g) in v.graph_polys().iter().enumerate() {
        for k in 0..dim {
            dz[(n + i, k)] = g.derivative(k).eval(&xy, &env);
        }
    }
    for j in 0..alpha {
        dz[(alpha + j, n + j)] = pt.y[j].inv();
    }
    let r = c.r();
    let mut cm = DMatrix::<Complex64>::zeros(2 * r, 2 * alpha);
    for (i, row) in c.rows().iter().enumerate() {
        for (j, &k) in row.iter().enumerate() {
            cm[(i, j)] = Complex64::new(k as f64, 0.0);
            cm[(r + i, alpha + j)] = Complex64::new(k as f64, 0.0);
        }
    }
    let jac = cm * dz * dxy;
    jac.iter().all(|z| z.is_finite()).then_some(jac)
}

/// Relative singular-value threshold for numeric rank.
pub const RANK_THRESHOLD: f64 = 1e-8;

pub fn numeric_rank(m: &DMatrix<Complex64>) -> usize {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0;
    }
    let sv = m.clone().svd(false, false).singular_values;
    let top = sv.iter().copied().fold(0.0, f64::max);
    if top == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > RANK_THRESHOLD * top).count()
}

/// Per-sample ranks of the differential; `None` marks a degenerate sample.
fn sample_ranks(
    v: &VarietySystem,
    c: &IntMatrix,
    samples: usize,
    spec: &SampleSpec,
    rng: &mut ChaCha8Rng,
) -> Vec<Option<usize>> {
    (0..samples)
        .map(|_| {
            let pt = sample_with(v, spec, rng).ok()?;
            chart_jacobian(v, c, &pt, spec).map(|j| numeric_rank(&j))
        })
        .collect()
}

/// Largest differential rank over `samples` sampled points.
pub fn image_rank_probe(v: &VarietySystem, c: &IntMatrix, samples: usize, rng: &mut ChaCha8Rng) -> Result<usize> {
    image_rank_probe_with(v, c, samples, &SampleSpec::default(), rng)
}

pub fn image_rank_probe_with(
    v: &VarietySystem,
    c: &IntMatrix,
    samples: usize,
    spec: &SampleSpec,
    rng: &mut ChaCha8Rng,
) -> Result<usize> {
    if c.cols() != v.alpha() {
        return Err(Error::Contract(format!("matrix needs {} columns", v.alpha())));
    }
    if c.r() == 0 || c.rank() != c.r() {
        return Err(Error::Contract("matrix does not have full row rank".into()));
    }
    sample_ranks(v, c, samples, spec, rng)
        .into_iter()
        .flatten()
        .max()
        .ok_or_else(|| Error::ProbeInconclusive(format!("all {} samples were degenerate", samples)))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixRecord {
    pub trial: usize,
    pub matrix: Vec<Vec<i64>>,
    pub r: usize,
    /// Samples that produced a smooth point.
    pub samples: usize,
    pub rank: Option<usize>,
    pub pass: bool,
    pub warning: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RotundityReport {
    pub seed: u64,
    pub trials: usize,
    pub max_entry: i64,
    pub samples_per_matrix: usize,
    /// Expected generic dimension `alpha + n - 1`.
    pub expected_dimension: usize,
    /// Differential rank for the identity matrix.
    pub identity_rank: Option<usize>,
    pub records: Vec<MatrixRecord>,
    pub pass: bool,
    pub note: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ProbeConfig {
    pub trials: usize,
    pub max_entry: i64,
    pub samples: usize,
    pub seed: u64,
}

impl Default for ProbeConfig {
    fn default() -> Self {
        ProbeConfig { trials: 100, max_entry: 3, samples: 5, seed: 0 }
    }
}

fn trial_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Uniform entries, `r` uniform in `1..=alpha`, rejected until full rank.
pub fn random_matrix(alpha: usize, max_entry: i64, rng: &mut ChaCha8Rng) -> IntMatrix {
    let r = rng.gen_range(1..=alpha);
    loop {
        let rows: Vec<Vec<i64>> =
            (0..r).map(|_| (0..alpha).map(|_| rng.gen_range(-max_entry..=max_entry)).collect()).collect();
        let m = IntMatrix { rows, cols: alpha };
        if m.rank() == r {
            return m;
        }
    }
}

fn run_trial(v: &VarietySystem, c: IntMatrix, trial: usize, samples: usize, rng: &mut ChaCha8Rng) -> MatrixRecord {
    let ranks = sample_ranks(v, &c, samples, &SampleSpec::default(), rng);
    let good: Vec<usize> = ranks.iter().flatten().copied().collect();
    let rank = good.iter().copied().max();
    let r = c.r();
    MatrixRecord {
        trial,
        matrix: c.rows,
        r,
        samples: good.len(),
        rank,
        // inconclusive trials are warnings, not failures
        pass: rank.is_none_or(|k| k >= r),
        warning: rank.is_none().then(|| format!("all {} samples were degenerate", samples)),
    }
}

/// Probes `trials` random matrices. Requires a free system.
pub fn rotundity_probe(v: &VarietySystem, cfg: &ProbeConfig) -> Result<RotundityReport> {
    match freeness_check(v)? {
        FreenessResult::Free => {}
        w => return Err(Error::NotFree(format!("{:?}", w))),
    }
    if cfg.max_entry < 1 {
        return Err(Error::Contract("max entry must be positive".into()));
    }
    let alpha = v.alpha();
    let mut id_rng = trial_rng(cfg.seed, u64::MAX);
    let identity_rank = sample_ranks(v, &IntMatrix::identity(alpha), cfg.samples, &SampleSpec::default(), &mut id_rng)
        .into_iter()
        .flatten()
        .max();
    let records: Vec<MatrixRecord> = (0..cfg.trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(cfg.seed, t as u64);
            let c = random_matrix(alpha, cfg.max_entry, &mut rng);
            run_trial(v, c, t, cfg.samples, &mut rng)
        })
        .collect();
    let pass = records.iter().all(|r| r.pass);
    Ok(RotundityReport {
        seed: cfg.seed,
        trials: cfg.trials,
        max_entry: cfg.max_entry,
        samples_per_matrix: cfg.samples,
        expected_dimension: alpha + v.n() - 1,
        identity_rank,
        records,
        pass,
        note: "sampled matrices and points only; a pass is numeric evidence, not a proof of rotundity".into(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exppoly::ExpPoly;
    use crate::variety::variety_of;

    fn sys(s: &str) -> VarietySystem {
        variety_of(&ExpPoly::parse(s).unwrap()).unwrap().0
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn apply_c_shapes() {
        let z = [c(1.0, 0.0), c(2.0, 0.0)];
        let y = [c(3.0, 0.0), c(0.0, 1.0)];
        assert_eq!(apply_c(&IntMatrix::identity(2), &z, &y).unwrap(), (z.to_vec(), y.to_vec()));
        let proj = IntMatrix::new(vec![vec![1, 0]], 2).unwrap();
        assert_eq!(apply_c(&proj, &z, &y).unwrap(), (vec![z[0]], vec![y[0]]));
        let sum = IntMatrix::new(vec![vec![1, 1]], 2).unwrap();
        assert_eq!(apply_c(&sum, &z, &y).unwrap(), (vec![c(3.0, 0.0)], vec![c(0.0, 3.0)]));
        let neg = IntMatrix::new(vec![vec![-1, 0]], 2).unwrap();
        assert!((apply_c(&neg, &z, &y).unwrap().1[0] - c(1.0 / 3.0, 0.0)).norm() < 1e-15);
        assert!(matches!(apply_c(&sum, &z, &[c(0.0, 0.0), c(1.0, 0.0)]), Err(Error::Domain(_))));
    }

    #[test]
    fn samples_satisfy_the_system() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let v = sys("exp(x) - 2");
        for _ in 0..5 {
            let pt = sample_variety_point(&v, &mut rng).unwrap();
            assert!((pt.y[0] - c(2.0, 0.0)).norm() < 1e-12);
        }
        let v = sys("exp(exp(x1/2 + x2^2)) + x1^3");
        for _ in 0..5 {
            let pt = sample_variety_point(&v, &mut rng).unwrap();
            assert!((pt.y[3] + 8.0 * pt.x[0].powu(3)).norm() < 1e-9);
            assert!((pt.w[0] - 4.0 * pt.x[1].powu(2)).norm() < 1e-12);
            assert!((pt.w[1] - pt.y[0] * pt.y[2]).norm() < 1e-12);
        }
        let v = sys("exp(2*x) - 4");
        let mut seen = [false; 2];
        for _ in 0..40 {
            let y = sample_variety_point(&v, &mut rng).unwrap().y[0];
            seen[usize::from(y.re < 0.0)] = true;
            assert!((y.norm() - 2.0).abs() < 1e-12);
        }
        assert_eq!(seen, [true, true]);
    }

    #[test]
    fn worked_example_ranks() {
        let v = sys("exp(exp(x1/2 + x2^2)) + x1^3");
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let k = image_rank_probe(&v, &IntMatrix::identity(4), 5, &mut rng).unwrap();
        assert_eq!(k, 5);
        let row = IntMatrix::new(vec![vec![1, 0, 0, 0]], 4).unwrap();
        assert!(image_rank_probe(&v, &row, 5, &mut rng).unwrap() >= 1);
        let twice = IntMatrix::new(vec![vec![1, 2, 0, 0], vec![1, 2, 0, 0]], 4).unwrap();
        assert!(matches!(image_rank_probe(&v, &twice, 5, &mut rng), Err(Error::Contract(_))));
    }

    #[test]
    fn pinned_point_has_rank_zero() {
        let v = sys("exp(x1) - 1");
        let spec = SampleSpec { pinned_x: vec![Some(c(0.0, 0.0))] };
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let k = image_rank_probe_with(&v, &IntMatrix::identity(1), 3, &spec, &mut rng).unwrap();
        assert_eq!(k, 0);
    }

    #[test]
    fn probe_passes_and_is_deterministic() {
        let v = sys("exp(exp(x1/2 + x2^2)) + x1^3");
        let cfg = ProbeConfig { trials: 20, ..ProbeConfig::default() };
        let a = rotundity_probe(&v, &cfg).unwrap();
        assert!(a.pass, "{:?}", a.records.iter().find(|r| !r.pass));
        assert_eq!(a.identity_rank, Some(5));
        let b = rotundity_probe(&v, &cfg).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn refuses_non_free_systems() {
        let v = sys("exp(x) - 2");
        assert!(matches!(rotundity_probe(&v, &ProbeConfig::default()), Err(Error::NotFree(_))));
    }
}
