//! Exact linear algebra over the rationals.
//!
//! The lower-bound constructions need rank and membership-in-span decisions
//! that are mathematically exact, not floating-point heuristics, so the core
//! routines here run Gaussian elimination over `BigRational`. A numeric rank
//! based on SVD is provided separately for sanity checks only.

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

pub fn from_int_rows(rows: &[Vec<i64>]) -> Vec<Vec<BigRational>> {
    rows.iter()
        .map(|r| r.iter().map(|&v| BigRational::from_integer(BigInt::from(v))).collect())
        .collect()
}

/// Rank over Q by fraction-exact Gaussian elimination.
pub fn rank(mat: &[Vec<BigRational>]) -> usize {
    if mat.is_empty() || mat[0].is_empty() {
        return 0;
    }
    let mut m = mat.to_vec();
    let rows = m.len();
    let cols = m[0].len();
    let mut r = 0;
    for c in 0..cols {
        let Some(piv) = (r..rows).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(r, piv);
        for i in r + 1..rows {
            if m[i][c].is_zero() {
                continue;
            }
            let factor = &m[i][c] / &m[r][c];
            for j in c..cols {
                let sub = &factor * &m[r][j];
                m[i][j] = &m[i][j] - sub;
            }
        }
        r += 1;
        if r == rows {
            break;
        }
    }
    r
}

/// Any exact solution of A x = b, or None if the system is inconsistent.
/// Free variables are set to zero.
pub fn solve(a: &[Vec<BigRational>], b: &[BigRational]) -> Option<Vec<BigRational>> {
    let rows = a.len();
    assert_eq!(rows, b.len(), "matrix and rhs row counts differ");
    let cols = if rows == 0 { 0 } else { a[0].len() };
    let mut aug: Vec<Vec<BigRational>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            assert_eq!(row.len(), cols, "ragged matrix");
            let mut v = row.clone();
            v.push(rhs.clone());
            v
        })
        .collect();
    let mut pivots: Vec<(usize, usize)> = Vec::new(); // (row, col)
    let mut r = 0;
    for c in 0..cols {
        let Some(piv) = (r..rows).find(|&i| !aug[i][c].is_zero()) else { continue };
        aug.swap(r, piv);
        for i in r + 1..rows {
            if aug[i][c].is_zero() {
                continue;
            }
            let factor = &aug[i][c] / &aug[r][c];
            for j in c..=cols {
                let sub = &factor * &aug[r][j];
                aug[i][j] = &aug[i][j] - sub;
            }
        }
        pivots.push((r, c));
        r += 1;
        if r == rows {
            break;
        }
    }
    // rows past the last pivot must have zero rhs
    for row in aug.iter().skip(r) {
        if !row[cols].is_zero() {
            return None;
        }
    }
    let mut x = vec![BigRational::zero(); cols];
    for &(pr, pc) in pivots.iter().rev() {
        let mut acc = aug[pr][cols].clone();
        for j in pc + 1..cols {
            if !aug[pr][j].is_zero() && !x[j].is_zero() {
                let sub = &aug[pr][j] * &x[j];
                acc = acc - sub;
            }
        }
        x[pc] = acc / &aug[pr][pc];
    }
    Some(x)
}

pub fn mat_vec(a: &[Vec<BigRational>], x: &[BigRational]) -> Vec<BigRational> {
    a.iter()
        .map(|row| {
            row.iter().zip(x).fold(BigRational::zero(), |acc, (c, v)| acc + c * v)
        })
        .collect()
}

pub fn dot(a: &[BigRational], b: &[BigRational]) -> BigRational {
    a.iter().zip(b).fold(BigRational::zero(), |acc, (x, y)| acc + x * y)
}

/// SVD-based rank with absolute singular-value tolerance. Heuristic; used to
/// cross-check the exact routines and to inspect float matrices.
pub fn numeric_rank(rows: &[Vec<f64>], tol: f64) -> usize {
    if rows.is_empty() || rows[0].is_empty() {
        return 0;
    }
    let m = DMatrix::from_row_iterator(rows.len(), rows[0].len(), rows.iter().flatten().copied());
    m.svd(false, false).singular_values.iter().filter(|&&s| s > tol).count()
}
