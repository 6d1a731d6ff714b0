use serde::{Deserialize, Serialize};

use super::operator::TruncatedOperator;
use crate::error::{Error, Result};
use crate::linalg::tridiagonal_eigenvalue;

const SINGULAR_GUARD: f64 = 1e-10;

/// `(sign, ln|D|)` for the determinant of `(H − E)` on a sub-block of the
/// window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogDet {
    pub sign: f64,
    pub log_abs: f64,
}

impl LogDet {
    pub const ONE: Self = Self { sign: 1.0, log_abs: 0.0 };
}

/// Running `(D_i, D_{i-1})` kept at unit scale.
fn push(state: &mut (f64, f64, f64), d: f64) -> LogDet {
    let (cur, prev, scale) = *state;
    let next = d * cur - prev;
    let m = next.abs().max(cur.abs());
    let (mut a, mut b, mut s) = (next, cur, scale);
    if m > 0.0 && !(1e-100..=1e100).contains(&m) {
        let e = m.log2().round() as i32;
        let f = 2f64.powi(-e);
        a *= f;
        b *= f;
        s += e as f64 * std::f64::consts::LN_2;
    }
    *state = (a, b, s);
    LogDet { sign: a.signum() * (a != 0.0) as u8 as f64, log_abs: a.abs().ln() + s }
}

/// Leading minors `D(x1, x1+i-1)` for `i = 0..=n` (index 0 is the empty
/// determinant).
pub fn prefix_dets(op: &TruncatedOperator, energy: f64) -> Vec<LogDet> {
    let mut out = Vec::with_capacity(op.dim() + 1);
    out.push(LogDet::ONE);
    let mut st = (1.0, 0.0, 0.0);
    for v in &op.diagonal {
        out.push(push(&mut st, v - energy));
    }
    out
}

/// Trailing minors `D(x1+i, x2)` for `i = 0..=n` (index n is empty).
pub fn suffix_dets(op: &TruncatedOperator, energy: f64) -> Vec<LogDet> {
    let n = op.dim();
    let mut out = vec![LogDet::ONE; n + 1];
    let mut st = (1.0, 0.0, 0.0);
    for i in (0..n).rev() {
        out[i] = push(&mut st, op.diagonal[i] - energy);
    }
    out
}

/// `ln|det(H − E)|` on the whole window.
pub fn window_log_det(op: &TruncatedOperator, energy: f64) -> LogDet {
    let mut st = (1.0, 0.0, 0.0);
    let mut last = LogDet::ONE;
    for v in &op.diagonal {
        last = push(&mut st, v - energy);
    }
    last
}

/// Errors with `NearSingularWindow` when an eigenvalue of the window lies
/// within 1e-10 of `energy`.
pub fn check_nonsingular(op: &TruncatedOperator, energy: f64) -> Result<()> {
    if !op.has_eigenvalue_near(energy, SINGULAR_GUARD) {
        return Ok(());
    }
    let i = op.count_below(energy);
    let mut distance = f64::INFINITY;
    for j in [i.wrapping_sub(1), i] {
        if j < op.dim() {
            distance = distance.min((tridiagonal_eigenvalue(&op.diagonal, &op.off_diagonal, j) - energy).abs());
        }
    }
    Err(Error::NearSingularWindow { distance })
}

/// `ln|G(x, y)|` and its sign via the determinant quotient
/// `G(i, j) = (−1)^{i+j} D(x1, i−1) D(j+1, x2) / D(x1, x2)`, `i ≤ j`.
/// No singularity guard.
pub fn green_log(op: &TruncatedOperator, energy: f64, x: i64, y: i64) -> LogDet {
    let (i, j) = if x <= y { (x, y) } else { (y, x) };
    let a = (i - op.x1) as usize;
    let b = (j - op.x1) as usize;
    let left = prefix_dets(op, energy)[a];
    let suffix = suffix_dets(op, energy);
    let right = suffix[b + 1];
    let full = suffix[0];
    let parity = if (b - a).is_multiple_of(2) { 1.0 } else { -1.0 };
    LogDet { sign: parity * left.sign * right.sign * full.sign, log_abs: left.log_abs + right.log_abs - full.log_abs }
}

/// `(H|_window − E)^{-1}(x, y)`.
pub fn green_function(op: &TruncatedOperator, energy: f64, x: i64, y: i64) -> Result<f64> {
    for s in [x, y] {
        if s < op.x1 || s > op.x2 {
            return Err(Error::InvalidParameter(format!("site {s} outside [{}, {}]", op.x1, op.x2)));
        }
    }
    check_nonsingular(op, energy)?;
    let g = green_log(op, energy, x, y);
    Ok(g.sign * g.log_abs.exp())
}

/// Boundary Green values `|G(y, x1)|` and `|G(y, x2)|` in log form.
pub fn boundary_green_logs(op: &TruncatedOperator, energy: f64, y: i64) -> (f64, f64) {
    let a = (y - op.x1) as usize;
    let pre = prefix_dets(op, energy);
    let suf = suffix_dets(op, energy);
    let full = suf[0].log_abs;
    (suf[a + 1].log_abs - full, pre[a].log_abs - full)
}

/// A formal solution of `HΨ = EΨ` on `[x1 − 1, x2 + 1]`, built by the
/// recurrence from the two given values at `x1 − 1` and `x1`.
pub fn formal_solution(op: &TruncatedOperator, energy: f64, psi_before: f64, psi_first: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(op.dim() + 2);
    out.push(psi_before);
    out.push(psi_first);
    for v in &op.diagonal {
        let k = out.len();
        out.push((energy - v) * out[k - 1] - out[k - 2]);
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoissonReport {
    pub residual: f64,
    pub scale: f64,
}

/// Checks `Ψ(x) = −G(x, x1)Ψ(x1−1) − G(x, x2)Ψ(x2+1)` over the window.
/// `psi` covers `[x1 − 1, x2 + 1]`. The residual is relative to `max |Ψ|`.
pub fn poisson_residual(op: &TruncatedOperator, energy: f64, psi: &[f64]) -> Result<PoissonReport> {
    let n = op.dim();
    if psi.len() != n + 2 {
        return Err(Error::InvalidParameter(format!("expected {} values, got {}", n + 2, psi.len())));
    }
    check_nonsingular(op, energy)?;
    let pre = prefix_dets(op, energy);
    let suf = suffix_dets(op, energy);
    let full = suf[0];
    let (left, right) = (psi[0], psi[n + 1]);
    let scale = psi.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mut worst = 0.0f64;
    for a in 0..n {
        // G(x1, x) and G(x, x2)
        let g1 = {
            let r = suf[a + 1];
            let s = if a % 2 == 0 { 1.0 } else { -1.0 };
            s * r.sign * full.sign * (r.log_abs - full.log_abs).exp()
        };
        let g2 = {
            let l = pre[a];
            let s = if (n - 1 - a).is_multiple_of(2) { 1.0 } else { -1.0 };
            s * l.sign * full.sign * (l.log_abs - full.log_abs).exp()
        };
        let rhs = -g1 * left - g2 * right;
        worst = worst.max((psi[a + 1] - rhs).abs());
    }
    Ok(PoissonReport { residual: worst / scale.max(f64::MIN_POSITIVE), scale })
}

#[cfg(test)]
mod tests {
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::cocycle::{determinant_p_log, orbit_point, OperatorParams};
    use crate::linalg::{dense_solve, tridiagonal_dense};

    #[test]
    fn single_site_is_a_scalar_inverse() {
        let p = OperatorParams::new(1.3, crate::GOLDEN, 0.27, 0.0).unwrap();
        let op = TruncatedOperator::new(&p, 4, 4).unwrap();
        let v = p.potential(orbit_point(0.27, crate::GOLDEN, 4));
        let g = green_function(&op, 0.4, 4, 4).unwrap();
        assert!((g - 1.0 / (v - 0.4)).abs() < 1e-14);
    }

    #[test]
    fn cramer_agrees_with_dense_solve() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let p = OperatorParams::new(rng.gen_range(0.1..3.0), rng.gen(), rng.gen(), 0.0).unwrap();
            let x1 = rng.gen_range(-20..20);
            let len = rng.gen_range(1..=30);
            let op = TruncatedOperator::new(&p, x1, x1 + len - 1).unwrap();
            let e = rng.gen_range(-4.0..4.0);
            let m = tridiagonal_dense(&op.diagonal, &op.off_diagonal)
                - nalgebra::DMatrix::identity(len as usize, len as usize) * e;
            let y = rng.gen_range(0..len as usize);
            let mut rhs = vec![0.0; len as usize];
            rhs[y] = 1.0;
            let col = dense_solve(&m, &rhs).unwrap();
            for (i, want) in col.iter().enumerate() {
                let got = green_function(&op, e, x1 + i as i64, x1 + y as i64).unwrap();
                assert!((got - want).abs() <= 1e-8 * want.abs().max(1e-300), "{got} {want}");
            }
        }
    }

    #[test]
    fn eigenvalue_energies_are_rejected() {
        let p = OperatorParams::new(0.0, crate::GOLDEN, 0.0, 0.0).unwrap();
        let op = TruncatedOperator::new(&p, 0, 2).unwrap();
        // eigenvalues 0, ±√2
        assert!(matches!(green_function(&op, 0.0, 0, 1), Err(Error::NearSingularWindow { .. })));
    }

    #[test]
    fn poisson_identity_on_formal_solutions() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let p = OperatorParams::new(rng.gen_range(0.2..3.0), crate::GOLDEN, rng.gen(), 0.0).unwrap();
            let x1 = rng.gen_range(-50..50);
            let op = TruncatedOperator::new(&p, x1, x1 + rng.gen_range(1..40)).unwrap();
            let e = rng.gen_range(-3.0..3.0);
            let psi = formal_solution(&op, e, rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            let r = poisson_residual(&op, e, &psi).unwrap();
            assert!(r.residual < 1e-8, "{}", r.residual);
        }
    }

    #[test]
    fn window_determinant_is_the_cocycle_determinant() {
        let p = OperatorParams::new(2.0, crate::GOLDEN, 0.31, 0.7).unwrap();
        let (x1, k) = (17i64, 300u64);
        let op = TruncatedOperator::new(&p, x1, x1 + k as i64 - 1).unwrap();
        let d = window_log_det(&op, p.energy);
        let shifted = p.with_theta(orbit_point(p.theta, p.alpha, x1));
        let (sign, log) = determinant_p_log(&shifted, k);
        assert!((d.log_abs - log).abs() < 1e-8 * log.abs().max(1.0));
        // det(H − E) = (−1)^k det(E − H)
        assert_eq!(d.sign, sign * if k % 2 == 0 { 1.0 } else { -1.0 });
    }
}
