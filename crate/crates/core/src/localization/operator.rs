use serde::{Deserialize, Serialize};

use crate::cocycle::{orbit_point, OperatorParams};
use crate::error::{Error, Result};
use crate::linalg::{inverse_iteration, sturm_count, tridiagonal_eigenvalues};

/// `H` restricted to `[x1, x2]` with zero boundary conditions outside.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruncatedOperator {
    pub lambda: f64,
    pub alpha: f64,
    pub theta: f64,
    pub x1: i64,
    pub x2: i64,
    pub diagonal: Vec<f64>,
    pub off_diagonal: Vec<f64>,
}

impl TruncatedOperator {
    pub fn new(params: &OperatorParams, x1: i64, x2: i64) -> Result<Self> {
        params.validate()?;
        if x2 < x1 {
            return Err(Error::InvalidParameter(format!("empty window [{x1}, {x2}]")));
        }
        let diagonal = (x1..=x2).map(|n| params.potential(orbit_point(params.theta, params.alpha, n))).collect();
        let off_diagonal = vec![1.0; (x2 - x1) as usize];
        Ok(Self { lambda: params.lambda, alpha: params.alpha, theta: params.theta, x1, x2, diagonal, off_diagonal })
    }

    pub fn dim(&self) -> usize {
        self.diagonal.len()
    }

    /// Number of eigenvalues strictly below `e`.
    pub fn count_below(&self, e: f64) -> usize {
        sturm_count(&self.diagonal, &self.off_diagonal, e)
    }

    /// Whether some eigenvalue lies within `tol` of `e`.
    pub fn has_eigenvalue_near(&self, e: f64, tol: f64) -> bool {
        self.count_below(e + tol) != self.count_below(e - tol)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Eigenpair {
    pub index: usize,
    pub value: f64,
    pub vector: Vec<f64>,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenResult {
    pub eigenvalues: Vec<f64>,
    pub pairs: Vec<Eigenpair>,
}

/// All eigenvalues by Sturm bisection; eigenvectors for the `selected`
/// indices (0-based, ascending order) by inverse iteration.
pub fn eigen_tridiagonal(op: &TruncatedOperator, selected: &[usize]) -> Result<EigenResult> {
    use rayon::prelude::*;
    let eigenvalues = tridiagonal_eigenvalues(&op.diagonal, &op.off_diagonal);
    let pairs = selected
        .par_iter()
        .map(|&i| {
            let value =
                *eigenvalues.get(i).ok_or_else(|| Error::InvalidParameter(format!("state {i} out of range")))?;
            let (vector, residual) = inverse_iteration(&op.diagonal, &op.off_diagonal, value, 50)?;
            Ok(Eigenpair { index: i, value, vector, residual })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(EigenResult { eigenvalues, pairs })
}

/// `(sign, ln|v_n|)`-free log profile of an eigenvector: `ln|v_n|` over the
/// window, computed from the centre outwards with the stable ratio
/// recursions `v_{n-1}/v_n` (run up from the left edge) and `v_{n+1}/v_n`
/// (run down from the right edge). Unlike the vector itself this does not
/// underflow in the tails. Normalized so that `ln|v_center| = 0`.
pub fn log_profile(op: &TruncatedOperator, energy: f64, center: usize) -> Vec<f64> {
    let n = op.dim();
    let d: Vec<f64> = op.diagonal.iter().map(|v| v - energy).collect();
    // left[i] = v_{i-1}/v_i with v_{-1} = 0
    let mut left = vec![0.0; n];
    for i in 1..n {
        left[i] = -1.0 / (d[i - 1] + left[i - 1]);
    }
    // right[i] = v_{i+1}/v_i with v_n = 0
    let mut right = vec![0.0; n];
    for i in (0..n.saturating_sub(1)).rev() {
        right[i] = -1.0 / (d[i + 1] + right[i + 1]);
    }
    let mut out = vec![0.0; n];
    for i in (0..center).rev() {
        out[i] = out[i + 1] + left[i + 1].abs().ln();
    }
    for i in center + 1..n {
        out[i] = out[i - 1] + right[i - 1].abs().ln();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn free_window_spectrum() {
        let p = OperatorParams::new(0.0, crate::GOLDEN, 0.0, 0.0).unwrap();
        let op = TruncatedOperator::new(&p, 3, 22).unwrap();
        let n = op.dim();
        let ev = eigen_tridiagonal(&op, &[]).unwrap().eigenvalues;
        let mut want: Vec<f64> =
            (1..=n).map(|j| 2.0 * (std::f64::consts::PI * j as f64 / (n + 1) as f64).cos()).collect();
        want.sort_by(|a, b| a.total_cmp(b));
        for (a, b) in ev.iter().zip(&want) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn single_site_and_interlacing() {
        let p = OperatorParams::new(1.4, crate::GOLDEN, 0.2, 0.0).unwrap();
        let op = TruncatedOperator::new(&p, 5, 5).unwrap();
        let ev = eigen_tridiagonal(&op, &[0]).unwrap();
        assert!((ev.eigenvalues[0] - p.potential(orbit_point(0.2, crate::GOLDEN, 5))).abs() < 1e-12);
        let big = eigen_tridiagonal(&TruncatedOperator::new(&p, 0, 30).unwrap(), &[]).unwrap().eigenvalues;
        let small = eigen_tridiagonal(&TruncatedOperator::new(&p, 0, 29).unwrap(), &[]).unwrap().eigenvalues;
        for i in 0..small.len() {
            assert!(big[i] <= small[i] + 1e-12 && small[i] <= big[i + 1] + 1e-12);
        }
    }

    #[test]
    fn log_profile_matches_the_vector_where_it_is_resolved() {
        let p = OperatorParams::new(3.0, crate::GOLDEN, 0.1, 0.0).unwrap();
        let op = TruncatedOperator::new(&p, 0, 199).unwrap();
        let r = eigen_tridiagonal(&op, &[100]).unwrap();
        let v = &r.pairs[0].vector;
        let c = (0..v.len()).max_by(|&a, &b| v[a].abs().total_cmp(&v[b].abs())).unwrap();
        let prof = log_profile(&op, r.pairs[0].value, c);
        for i in 0..v.len() {
            let rel = (v[i] / v[c]).abs();
            if rel > 1e-8 {
                assert!(((rel.ln()) - prof[i]).abs() < 1e-5, "{i} {} {}", rel.ln(), prof[i]);
            }
        }
        assert!(prof.iter().cloned().fold(f64::INFINITY, f64::min) < -100.0);
    }
}
