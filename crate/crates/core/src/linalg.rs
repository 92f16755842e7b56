//! Dense exact Gaussian elimination.

use crate::scalar::{Field, Scalar};

pub type Matrix = Vec<Vec<Scalar>>;

pub fn zeros(field: Field, rows: usize, cols: usize) -> Matrix {
    vec![vec![field.zero(); cols]; rows]
}

pub fn identity(field: Field, n: usize) -> Matrix {
    let mut m = zeros(field, n, n);
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = field.one();
    }
    m
}

/// Reduced row echelon form in place; pivots are chosen leftmost-first, top-down.
/// Returns the pivot columns; rows beyond the rank are zero.
pub fn rref(m: &mut Matrix, ncols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == m.len() {
            break;
        }
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].inv();
        for x in m[r].iter_mut() {
            *x = x.mul(&inv);
        }
        let pivot_row = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i != r && !row[c].is_zero() {
                let f = row[c].clone();
                for (x, y) in row.iter_mut().zip(&pivot_row) {
                    if !y.is_zero() {
                        *x = x.sub(&f.mul(y));
                    }
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank(m: &Matrix, ncols: usize) -> usize {
    let mut m = m.clone();
    rref(&mut m, ncols).len()
}

/// Basis of {x : m·x = 0}, one vector per free column in increasing order.
pub fn nullspace(field: Field, m: &Matrix, ncols: usize) -> Vec<Vec<Scalar>> {
    let mut r = m.clone();
    let piv = rref(&mut r, ncols);
    let mut out = Vec::new();
    for f in (0..ncols).filter(|c| !piv.contains(c)) {
        let mut v = vec![field.zero(); ncols];
        v[f] = field.one();
        for (row, &p) in r.iter().zip(&piv) {
            v[p] = row[f].neg();
        }
        out.push(v);
    }
    out
}

/// Some x with m·x = b, if one exists.
pub fn solve(field: Field, m: &Matrix, ncols: usize, b: &[Scalar]) -> Option<Vec<Scalar>> {
    let mut aug: Matrix = m
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    let piv = rref(&mut aug, ncols + 1);
    if piv.last() == Some(&ncols) {
        return None;
    }
    let mut x = vec![field.zero(); ncols];
    for (row, &p) in aug.iter().zip(&piv) {
        x[p] = row[ncols].clone();
    }
    Some(x)
}

pub fn inverse(field: Field, m: &Matrix) -> Option<Matrix> {
    let n = m.len();
    let mut aug: Matrix = m
        .iter()
        .zip(identity(field, n))
        .map(|(row, id)| row.iter().cloned().chain(id).collect())
        .collect();
    let piv = rref(&mut aug, 2 * n);
    if piv.len() < n || piv[n - 1] != n - 1 {
        return if n == 0 { Some(Vec::new()) } else { None };
    }
    Some(aug.into_iter().map(|row| row[n..].to_vec()).collect())
}

pub fn mat_vec(field: Field, m: &Matrix, v: &[Scalar]) -> Vec<Scalar> {
    m.iter()
        .map(|row| row.iter().zip(v).fold(field.zero(), |acc, (a, b)| acc.add(&a.mul(b))))
        .collect()
}

pub fn mat_mul(field: Field, a: &Matrix, b: &Matrix, inner: usize, cols: usize) -> Matrix {
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| (0..inner).fold(field.zero(), |acc, k| acc.add(&row[k].mul(&b[k][j]))))
                .collect()
        })
        .collect()
}
