use serde::{Deserialize, Serialize};

use super::params::{orbit_point, OperatorParams};
use crate::error::{Error, Result};

/// `P_k(θ) = det(E − H)` on the sites `0..k`, by the three-term recurrence
/// `P_k = (E − v_{k−1}) P_{k−1} − P_{k−2}`, `P_0 = 1`, `P_{−1} = 0`.
///
/// With this sign `A_k(θ) = [[P_k(θ), −P_{k−1}(θ+α)], [P_{k−1}(θ), −P_{k−2}(θ+α)]]`;
/// it differs from `det(H − E)` by `(−1)^k`.
pub fn determinant_p(params: &OperatorParams, k: u64) -> f64 {
    let (mut prev, mut cur) = (0.0f64, 1.0f64);
    for n in 0..k {
        let d = params.energy - params.potential(orbit_point(params.theta, params.alpha, n as i64));
        let next = d * cur - prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// `(sign, ln|P_k|)` without overflow. `sign` is 0 and the log −∞ when
/// `P_k` vanishes.
pub fn determinant_p_log(params: &OperatorParams, k: u64) -> (f64, f64) {
    let (mut prev, mut cur, mut log_scale) = (0.0f64, 1.0f64, 0.0f64);
    for n in 0..k {
        let d = params.energy - params.potential(orbit_point(params.theta, params.alpha, n as i64));
        let next = d * cur - prev;
        prev = cur;
        cur = next;
        let m = cur.abs().max(prev.abs());
        if m > 1e100 || (m < 1e-100 && m > 0.0) {
            let e = m.log2().round() as i32;
            let f = 2f64.powi(-e);
            cur *= f;
            prev *= f;
            log_scale += e as f64 * std::f64::consts::LN_2;
        }
    }
    if cur == 0.0 {
        (0.0, f64::NEG_INFINITY)
    } else {
        (cur.signum(), cur.abs().ln() + log_scale)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HermanReport {
    pub k: u64,
    pub n_quad: usize,
    /// Midpoint-rule value on `2·n_quad` nodes.
    pub integral_estimate: f64,
    /// The same on `n_quad` nodes; the difference indicates quadrature error.
    pub coarse_estimate: f64,
    /// `k ln|λ|`.
    pub bound: f64,
    pub tolerance: f64,
    pub pass: bool,
    /// Nodes where `P_k` vanished and the node was moved.
    pub jittered_nodes: usize,
}

fn log_abs_p_at(params: &OperatorParams, k: u64, theta: f64, jittered: &mut usize) -> Result<f64> {
    let mut t = theta;
    for attempt in 0..8 {
        let (_, l) = determinant_p_log(&params.with_theta(t), k);
        if l.is_finite() {
            if attempt > 0 {
                *jittered += 1;
            }
            return Ok(l);
        }
        t = theta + (attempt + 1) as f64 * 1e-9 * crate::GOLDEN;
    }
    Err(Error::QuadratureUnstable { node: theta })
}

/// Midpoint-rule estimate of `∫₀¹ ln|P_k(θ)| dθ` against `k ln|λ|`.
///
/// The integrand is smooth and periodic except for logarithmic singularities
/// at the zeros of `P_k`; the midpoint nodes avoid the symmetric zero sets
/// and a node landing on a zero is shifted by a fixed tiny amount.
pub fn herman_bound_check(params: &OperatorParams, k: u64, n_quad: usize, tolerance: f64) -> Result<HermanReport> {
    params.validate()?;
    if k == 0 || n_quad == 0 {
        return Err(Error::InvalidParameter("k and n_quad must be positive".into()));
    }
    let mut jittered = 0usize;
    let fine_n = 2 * n_quad;
    let mut values = Vec::with_capacity(fine_n);
    for i in 0..fine_n {
        values.push(log_abs_p_at(params, k, (i as f64 + 0.5) / fine_n as f64, &mut jittered)?);
    }
    let integral_estimate = values.iter().sum::<f64>() / fine_n as f64;
    let mut coarse = 0.0;
    for i in 0..n_quad {
        coarse += log_abs_p_at(params, k, (i as f64 + 0.5) / n_quad as f64, &mut jittered)?;
    }
    let coarse_estimate = coarse / n_quad as f64;
    let bound = if params.lambda == 0.0 { f64::NEG_INFINITY } else { k as f64 * params.lambda.abs().ln() };
    let pass = params.lambda == 0.0 || integral_estimate >= bound - tolerance;
    Ok(HermanReport { k, n_quad, integral_estimate, coarse_estimate, bound, tolerance, pass, jittered_nodes: jittered })
}
