//! Symmetric tridiagonal and small dense helpers.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Number of eigenvalues strictly below `x` of the symmetric tridiagonal
/// matrix with diagonal `diag` and off-diagonal `off` (`off.len() + 1 ==
/// diag.len()`), by Sturm sequence.
pub fn sturm_count(diag: &[f64], off: &[f64], x: f64) -> usize {
    let mut count = 0;
    let mut d = 1.0f64;
    for i in 0..diag.len() {
        let b2 = if i == 0 { 0.0 } else { off[i - 1] * off[i - 1] };
        d = diag[i] - x - if i == 0 { 0.0 } else { b2 / d };
        if d == 0.0 {
            d = -f64::EPSILON * (diag[i].abs() + x.abs() + 1.0);
        }
        if d < 0.0 {
            count += 1;
        }
    }
    count
}

/// Gershgorin enclosure of the spectrum.
pub fn gershgorin(diag: &[f64], off: &[f64]) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..diag.len() {
        let r = if i > 0 { off[i - 1].abs() } else { 0.0 } + if i < off.len() { off[i].abs() } else { 0.0 };
        lo = lo.min(diag[i] - r);
        hi = hi.max(diag[i] + r);
    }
    (lo, hi)
}

/// The `index`-th smallest eigenvalue (0-based) by bisection on the Sturm
/// count.
pub fn tridiagonal_eigenvalue(diag: &[f64], off: &[f64], index: usize) -> f64 {
    let (mut lo, mut hi) = gershgorin(diag, off);
    lo -= 1e-12 * (1.0 + lo.abs());
    hi += 1e-12 * (1.0 + hi.abs());
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if sturm_count(diag, off, mid) > index {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// All eigenvalues in ascending order.
pub fn tridiagonal_eigenvalues(diag: &[f64], off: &[f64]) -> Vec<f64> {
    use rayon::prelude::*;
    (0..diag.len()).into_par_iter().map(|i| tridiagonal_eigenvalue(diag, off, i)).collect()
}

/// Solves `(T − shift) x = rhs` for symmetric tridiagonal `T` by Gaussian
/// elimination with partial pivoting.
pub fn tridiagonal_solve(diag: &[f64], off: &[f64], shift: f64, rhs: &[f64]) -> Result<Vec<f64>> {
    let n = diag.len();
    if rhs.len() != n || off.len() + 1 != n.max(1) {
        return Err(Error::InvalidParameter("dimension mismatch".into()));
    }
    // Rows stored as (a, b, c, d): a on the diagonal, b, c the two entries to
    // its right (c fills in after a pivot swap), d the right-hand side.
    let mut rows: Vec<[f64; 4]> =
        (0..n).map(|i| [diag[i] - shift, if i + 1 < n { off[i] } else { 0.0 }, 0.0, rhs[i]]).collect();
    let mut sub: Vec<f64> = off.to_vec();
    let tiny = f64::EPSILON * (diag.iter().fold(0.0f64, |m, v| m.max(v.abs())) + shift.abs() + 1.0);
    for i in 0..n.saturating_sub(1) {
        let l = sub[i];
        if l.abs() > rows[i][0].abs() {
            // Swap row i and row i+1 (row i+1 is [l, a', b'] in columns i..i+2).
            let next = rows[i + 1];
            let cur = rows[i];
            rows[i] = [l, next[0], next[1], next[3]];
            // The old row i becomes row i+1 in columns i..i+2: [a, b, 0].
            sub[i] = cur[0];
            rows[i + 1] = [cur[1], cur[2], 0.0, cur[3]];
        }
        let piv = if rows[i][0].abs() < tiny { tiny } else { rows[i][0] };
        rows[i][0] = piv;
        let f = sub[i] / piv;
        rows[i + 1][0] -= f * rows[i][1];
        rows[i + 1][1] -= f * rows[i][2];
        rows[i + 1][3] -= f * rows[i][3];
    }
    if n > 0 && rows[n - 1][0].abs() < tiny {
        rows[n - 1][0] = tiny;
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let mut s = rows[i][3];
        if i + 1 < n {
            s -= rows[i][1] * x[i + 1];
        }
        if i + 2 < n {
            s -= rows[i][2] * x[i + 2];
        }
        x[i] = s / rows[i][0];
    }
    Ok(x)
}

/// Normalized eigenvector for an eigenvalue estimate `e`, by inverse
/// iteration from a deterministic start. Returns the vector and the residual
/// `‖(T − e) v‖`.
pub fn inverse_iteration(diag: &[f64], off: &[f64], e: f64, max_iter: usize) -> Result<(Vec<f64>, f64)> {
    let n = diag.len();
    let mut v: Vec<f64> = (0..n).map(|i| 1.0 + 0.5 * ((i as f64) * crate::GOLDEN).fract()).collect();
    normalize(&mut v);
    let mut residual = f64::INFINITY;
    for _ in 0..max_iter.max(1) {
        let mut w = tridiagonal_solve(diag, off, e, &v)?;
        normalize(&mut w);
        v = w;
        residual = tridiagonal_residual(diag, off, e, &v);
        if residual <= 1e-10 * (1.0 + e.abs()) {
            return Ok((v, residual));
        }
    }
    if residual <= 1e-6 * (1.0 + e.abs()) {
        Ok((v, residual))
    } else {
        Err(Error::InverseIterationStall { residual })
    }
}

pub fn tridiagonal_residual(diag: &[f64], off: &[f64], e: f64, v: &[f64]) -> f64 {
    let n = diag.len();
    let mut s = 0.0;
    for i in 0..n {
        let mut r = (diag[i] - e) * v[i];
        if i > 0 {
            r += off[i - 1] * v[i - 1];
        }
        if i + 1 < n {
            r += off[i] * v[i + 1];
        }
        s += r * r;
    }
    s.sqrt()
}

fn normalize(v: &mut [f64]) {
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if n > 0.0 {
        for x in v.iter_mut() {
            *x /= n;
        }
    }
}

/// Ascending eigenvalues of a dense symmetric matrix.
pub fn symmetric_eigenvalues(m: DMatrix<f64>) -> Vec<f64> {
    let mut ev: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(|a, b| a.total_cmp(b));
    ev
}

/// Dense solve through LU with partial pivoting.
pub fn dense_solve(m: &DMatrix<f64>, rhs: &[f64]) -> Result<Vec<f64>> {
    let b = DVector::from_column_slice(rhs);
    m.clone()
        .lu()
        .solve(&b)
        .map(|x| x.iter().copied().collect())
        .ok_or_else(|| Error::InvalidParameter("singular matrix".into()))
}

pub fn tridiagonal_dense(diag: &[f64], off: &[f64]) -> DMatrix<f64> {
    let n = diag.len();
    DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            diag[i]
        } else if i + 1 == j {
            off[i]
        } else if j + 1 == i {
            off[j]
        } else {
            0.0
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(n: usize) -> (Vec<f64>, Vec<f64>) {
        let diag = (0..n).map(|i| 2.0 * (0.7 + i as f64 * 1.3).sin()).collect();
        let off = (0..n.saturating_sub(1)).map(|i| 1.0 + 0.1 * (i as f64).cos()).collect();
        (diag, off)
    }

    #[test]
    fn bisection_matches_dense_eigen() {
        let (d, o) = sample(40);
        let fast = tridiagonal_eigenvalues(&d, &o);
        let dense = symmetric_eigenvalues(tridiagonal_dense(&d, &o));
        for (a, b) in fast.iter().zip(&dense) {
            assert!((a - b).abs() < 1e-12, "{a} {b}");
        }
    }

    #[test]
    fn solve_matches_dense() {
        let (d, o) = sample(25);
        let rhs: Vec<f64> = (0..25).map(|i| (i as f64 * 0.37).cos()).collect();
        let x = tridiagonal_solve(&d, &o, 0.3, &rhs).unwrap();
        let mut m = tridiagonal_dense(&d, &o);
        for i in 0..25 {
            m[(i, i)] -= 0.3;
        }
        let y = dense_solve(&m, &rhs).unwrap();
        for (a, b) in x.iter().zip(&y) {
            assert!((a - b).abs() < 1e-10 * b.abs().max(1.0));
        }
    }

    #[test]
    fn inverse_iteration_finds_the_eigenvector() {
        let (d, o) = sample(60);
        let e = tridiagonal_eigenvalue(&d, &o, 17);
        let (v, r) = inverse_iteration(&d, &o, e, 5).unwrap();
        assert!(r < 1e-10);
        assert!((v.iter().map(|x| x * x).sum::<f64>() - 1.0).abs() < 1e-12);
    }
}
