//! Simultaneous complex root finding for univariate polynomials
//! (Aberth-Ehrlich iteration followed by Newton polishing).

use num_complex::Complex64;

const MAX_ITER: usize = 500;

fn horner(coeffs: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for c in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

/// All complex roots of `coeffs[0] + coeffs[1] z + ... + coeffs[d] z^d`,
/// with multiplicity. Leading zero coefficients are ignored; roots at the
/// origin are returned exactly as zero.
pub fn poly_roots(coeffs: &[Complex64]) -> Vec<Complex64> {
    let deg = match coeffs.iter().rposition(|c| *c != Complex64::new(0.0, 0.0)) {
        Some(d) => d,
        None => return Vec::new(),
    };
    let low = coeffs.iter().position(|c| *c != Complex64::new(0.0, 0.0)).unwrap_or(0);
    let mut out = vec![Complex64::new(0.0, 0.0); low];
    let cs: Vec<Complex64> = coeffs[low..=deg].to_vec();
    let d = cs.len() - 1;
    if d == 0 {
        return out;
    }
    if d == 1 {
        out.push(-cs[0] / cs[1]);
        return out;
    }
    let lead = cs[d];
    let monic: Vec<Complex64> = cs.iter().map(|c| c / lead).collect();

    // Initial guesses on a circle with radius from the Fujiwara-type bound.
    let radius = (0..d)
        .map(|k| monic[k].norm().powf(1.0 / (d - k) as f64))
        .fold(0.0f64, f64::max)
        .max(1e-3);
    let mut z: Vec<Complex64> = (0..d)
        .map(|k| {
            let theta = 2.0 * std::f64::consts::PI * (k as f64) / (d as f64) + 0.4;
            Complex64::from_polar(radius, theta)
        })
        .collect();

    for _ in 0..MAX_ITER {
        let mut max_step = 0.0f64;
        for k in 0..d {
            let (p, dp) = horner(&monic, z[k]);
            if p.norm() == 0.0 {
                continue;
            }
            let ratio = p / dp;
            let mut s = Complex64::new(0.0, 0.0);
            for j in 0..d {
                if j != k {
                    let diff = z[k] - z[j];
                    if diff.norm() > 0.0 {
                        s += 1.0 / diff;
                    }
                }
            }
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * s);
            if step.re.is_finite() && step.im.is_finite() {
                z[k] -= step;
                max_step = max_step.max(step.norm() / (1.0 + z[k].norm()));
            }
        }
        if max_step < 1e-16 {
            break;
        }
    }
    for r in z.iter_mut() {
        for _ in 0..3 {
            let (p, dp) = horner(&monic, *r);
            if dp.norm() == 0.0 {
                break;
            }
            let step = p / dp;
            if !(step.re.is_finite() && step.im.is_finite()) {
                break;
            }
            let cand = *r - step;
            if horner(&monic, cand).0.norm() <= p.norm() {
                *r = cand;
            } else {
                break;
            }
        }
    }
    out.extend(z);
    out
}
