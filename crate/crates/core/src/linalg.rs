//! Exact linear algebra over Q.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Row-reduces `m` in place and returns the pivot columns.
fn row_reduce(m: &mut [Vec<BigRational>], ncols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..ncols {
        if row >= m.len() {
            break;
        }
        let Some(p) = (row..m.len()).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(row, p);
        let inv = BigRational::from_integer(1.into()) / &m[row][col];
        for v in m[row].iter_mut() {
            *v = &*v * &inv;
        }
        for r in 0..m.len() {
            if r != row && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                for c in 0..m[r].len() {
                    let d = &f * &m[row][c];
                    m[r][c] -= d;
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    pivots
}

pub fn rank(rows: &[Vec<BigRational>]) -> usize {
    let ncols = rows.iter().map(|r| r.len()).max().unwrap_or(0);
    let mut m: Vec<Vec<BigRational>> = rows
        .iter()
        .map(|r| {
            let mut r = r.clone();
            r.resize(ncols, BigRational::zero());
            r
        })
        .collect();
    row_reduce(&mut m, ncols).len()
}

pub fn rank_i64(rows: &[Vec<i64>]) -> usize {
    let rows: Vec<Vec<BigRational>> = rows
        .iter()
        .map(|r| r.iter().map(|&v| BigRational::from_integer(v.into())).collect())
        .collect();
    rank(&rows)
}

/// Finds `c` with `sum_j c_j * columns[j] == target`, or `None` if the
/// target is outside the span. Free coordinates are set to zero.
pub fn solve(columns: &[Vec<BigRational>], target: &[BigRational]) -> Option<Vec<BigRational>> {
    let nrows = columns
        .iter()
        .map(|c| c.len())
        .chain(std::iter::once(target.len()))
        .max()
        .unwrap_or(0);
    let ncols = columns.len();
    let at = |v: &[BigRational], i: usize| v.get(i).cloned().unwrap_or_else(BigRational::zero);
    let mut m: Vec<Vec<BigRational>> = (0..nrows)
        .map(|i| {
            let mut row: Vec<BigRational> = columns.iter().map(|c| at(c, i)).collect();
            row.push(at(target, i));
            row
        })
        .collect();
    let pivots = row_reduce(&mut m, ncols + 1);
    if pivots.last() == Some(&ncols) {
        return None;
    }
    let mut sol = vec![BigRational::zero(); ncols];
    for (r, &col) in pivots.iter().enumerate() {
        sol[col] = m[r][ncols].clone();
    }
    Some(sol)
}

/// Integer `c` with `sum_j c_j * columns[j] == target`, or `None` if the
/// target is outside the lattice spanned by the columns. Unlike [`solve`]
/// this is exact for dependent columns.
pub fn solve_integer(columns: &[Vec<BigRational>], target: &[BigRational]) -> Option<Vec<BigInt>> {
    let nrows = columns.iter().map(|c| c.len()).chain(std::iter::once(target.len())).max().unwrap_or(0);
    let ncols = columns.len();
    let den = columns.iter().flatten().chain(target).fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
    let scale = |q: Option<&BigRational>| q.map(|q| (q * &den).to_integer()).unwrap_or_else(BigInt::zero);
    // h[j] is column j; column operations on h are mirrored on u
    let mut h: Vec<Vec<BigInt>> = columns.iter().map(|c| (0..nrows).map(|i| scale(c.get(i))).collect()).collect();
    let b: Vec<BigInt> = (0..nrows).map(|i| scale(target.get(i))).collect();
    let mut u: Vec<Vec<BigInt>> =
        (0..ncols).map(|j| (0..ncols).map(|k| if j == k { BigInt::one() } else { BigInt::zero() }).collect()).collect();
    let mut pivots = Vec::new();
    for i in 0..nrows {
        let k = pivots.len();
        while let Some(m) = (k..ncols).filter(|&j| !h[j][i].is_zero()).min_by_key(|&j| h[j][i].abs()) {
            h.swap(k, m);
            u.swap(k, m);
            let mut done = true;
            for j in k + 1..ncols {
                if h[j][i].is_zero() {
                    continue;
                }
                let q = h[j][i].div_floor(&h[k][i]);
                let (hk, uk) = (h[k].clone(), u[k].clone());
                h[j].iter_mut().zip(&hk).for_each(|(a, p)| *a -= &q * p);
                u[j].iter_mut().zip(&uk).for_each(|(a, p)| *a -= &q * p);
                done &= h[j][i].is_zero();
            }
            if done {
                pivots.push(i);
                break;
            }
        }
    }
    // forward substitution on the echelon form
    let mut y: Vec<BigInt> = Vec::with_capacity(pivots.len());
    let mut next = 0;
    for i in 0..nrows {
        let known: BigInt = y.iter().enumerate().map(|(j, yj)| &h[j][i] * yj).sum();
        let rest = &b[i] - known;
        if next < pivots.len() && pivots[next] == i {
            let (q, r) = rest.div_mod_floor(&h[next][i]);
            if !r.is_zero() {
                return None;
            }
            y.push(q);
            next += 1;
        } else if !rest.is_zero() {
            return None;
        }
    }
    Some((0..ncols).map(|c| y.iter().enumerate().map(|(j, yj)| &u[j][c] * yj).sum()).collect())
}
