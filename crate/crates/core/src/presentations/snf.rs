//! Smith normal form over the integers, exact arithmetic.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

/// Returns the non-zero invariant factors `d₁ | d₂ | … | d_r` (all positive)
/// of an integer matrix given as rows. `r` is the rank.
pub fn invariant_factors(rows: &[Vec<BigInt>]) -> Vec<BigInt> {
    let mut m: Vec<Vec<BigInt>> = rows.to_vec();
    let nrows = m.len();
    let ncols = m.first().map_or(0, Vec::len);
    let mut diag = Vec::new();
    let mut k = 0;
    while k < nrows.min(ncols) {
        // smallest non-zero entry of the trailing block as pivot
        let Some((pi, pj)) = min_nonzero(&m, k) else {
            break;
        };
        m.swap(k, pi);
        for row in m.iter_mut() {
            row.swap(k, pj);
        }
        loop {
            let mut dirty = false;
            for i in k + 1..nrows {
                if !m[i][k].is_zero() {
                    let q = m[i][k].div_floor(&m[k][k]);
                    row_axpy(&mut m, i, k, &q);
                    if !m[i][k].is_zero() {
                        dirty = true;
                    }
                }
            }
            for j in k + 1..ncols {
                if !m[k][j].is_zero() {
                    let q = m[k][j].div_floor(&m[k][k]);
                    for row in m.iter_mut() {
                        let t = &row[k] * &q;
                        row[j] -= t;
                    }
                    if !m[k][j].is_zero() {
                        dirty = true;
                    }
                }
            }
            if dirty {
                let (pi, pj) = min_nonzero_cross(&m, k);
                m.swap(k, pi);
                for row in m.iter_mut() {
                    row.swap(k, pj);
                }
                continue;
            }
            // row and column cleared; enforce divisibility on the rest
            let pivot = m[k][k].clone();
            let bad = (k + 1..nrows).find(|&i| (k + 1..ncols).any(|j| !(&m[i][j] % &pivot).is_zero()));
            match bad {
                Some(i) => {
                    let one = BigInt::from(-1);
                    row_axpy(&mut m, k, i, &one);
                }
                None => break,
            }
        }
        diag.push(m[k][k].abs());
        k += 1;
    }
    diag
}

/// `m[target] -= q · m[source]`
fn row_axpy(m: &mut [Vec<BigInt>], target: usize, source: usize, q: &BigInt) {
    let src = m[source].clone();
    for (t, s) in m[target].iter_mut().zip(src.iter()) {
        *t -= s * q;
    }
}

fn min_nonzero(m: &[Vec<BigInt>], k: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for (i, row) in m.iter().enumerate().skip(k) {
        for (j, x) in row.iter().enumerate().skip(k) {
            if !x.is_zero() && best.is_none_or(|(bi, bj)| x.abs() < m[bi][bj].abs()) {
                best = Some((i, j));
            }
        }
    }
    best
}

/// Smallest non-zero entry among row k and column k (at least the pivot
/// position itself is non-zero or some remainder is).
fn min_nonzero_cross(m: &[Vec<BigInt>], k: usize) -> (usize, usize) {
    let mut best = None::<(usize, usize)>;
    let mut consider = |i: usize, j: usize| {
        let x = &m[i][j];
        if !x.is_zero() && best.is_none_or(|(bi, bj)| x.abs() < m[bi][bj].abs()) {
            best = Some((i, j));
        }
    };
    for i in k..m.len() {
        consider(i, k);
    }
    for j in k..m[k].len() {
        consider(k, j);
    }
    best.expect("pivot row or column has a non-zero entry")
}
