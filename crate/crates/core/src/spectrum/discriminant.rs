use nalgebra::DMatrix;
use num_integer::Integer;

use crate::cocycle::ScaledMat2;
use crate::error::{Error, Result};

/// Phases at which θ-independence of the discriminant is probed.
const PROBES: [f64; 4] = [0.0, 0.137_2, 0.413_9, 0.768_1];

pub(crate) fn check_fraction(p: u64, q: u64) -> Result<()> {
    if q == 0 {
        return Err(Error::InvalidParameter("q must be positive".into()));
    }
    if p.gcd(&q) != 1 {
        return Err(Error::InvalidParameter(format!("{p}/{q} is not reduced")));
    }
    Ok(())
}

/// `v_j = 2λ cos 2π(θ + jp/q)` with `jp` reduced mod `q` exactly.
pub fn periodic_potential(lambda: f64, p: u64, q: u64, theta: f64) -> Vec<f64> {
    (0..q)
        .map(|j| {
            let r = ((j as u128 * p as u128) % q as u128) as f64 / q as f64;
            2.0 * lambda * (std::f64::consts::TAU * (theta + r)).cos()
        })
        .collect()
}

/// `tr A_q(θ) + 2λ^q cos 2πqθ` at one phase.
pub fn discriminant_at(lambda: f64, p: u64, q: u64, energy: f64, theta: f64) -> f64 {
    // The exact periodic potential avoids the rounding in θ + k·(p/q).
    let v = periodic_potential(lambda, p, q, theta);
    let mut a = ScaledMat2::identity();
    for vj in &v {
        a = a.left_mul(&[[energy - vj, -1.0], [1.0, 0.0]]);
    }
    let lq = lambda_pow(lambda, q);
    a.trace() + 2.0 * lq * (std::f64::consts::TAU * ((q as f64 * theta).fract())).cos()
}

/// `λ^q` with the sign of `λ` kept for odd `q`.
pub fn lambda_pow(lambda: f64, q: u64) -> f64 {
    let m = (q as f64 * lambda.abs().ln()).exp();
    if lambda < 0.0 && q % 2 == 1 {
        -m
    } else {
        m
    }
}

/// The θ-independent discriminant `Φ(E)`. Evaluated at several phases; a
/// disagreement beyond `10⁻⁹·max(1, |Φ|)` is reported as an error since it
/// can only come from a bug or total loss of precision.
pub fn discriminant(lambda: f64, p: u64, q: u64, energy: f64) -> Result<f64> {
    check_fraction(p, q)?;
    if !lambda.is_finite() || !energy.is_finite() {
        return Err(Error::InvalidParameter("non-finite input".into()));
    }
    let (value, spread) = discriminant_spread(lambda, p, q, energy, &PROBES);
    if spread > 1e-9 * value.abs().max(1.0) {
        return Err(Error::ThetaDependenceDetected { spread });
    }
    Ok(value)
}

/// Value at the first phase and max − min over all phases.
pub fn discriminant_spread(lambda: f64, p: u64, q: u64, energy: f64, thetas: &[f64]) -> (f64, f64) {
    let vals: Vec<f64> = thetas.iter().map(|&t| discriminant_at(lambda, p, q, energy, t)).collect();
    let max = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = vals.iter().cloned().fold(f64::INFINITY, f64::min);
    (vals[0], max - min)
}

/// The q×q operator at phase θ with `u_{n+q} = twist·u_n`; `twist = ±1`.
pub fn bloch_matrix(lambda: f64, p: u64, q: u64, theta: f64, twist: f64) -> DMatrix<f64> {
    let n = q as usize;
    let v = periodic_potential(lambda, p, q, theta);
    let mut m = DMatrix::zeros(n, n);
    for i in 0..n {
        m[(i, i)] = v[i];
        if i + 1 < n {
            m[(i, i + 1)] = 1.0;
            m[(i + 1, i)] = 1.0;
        }
    }
    // Wrap-around hopping: both neighbours coincide for n ≤ 2.
    if n == 1 {
        m[(0, 0)] += 2.0 * twist;
    } else {
        m[(0, n - 1)] += twist;
        m[(n - 1, 0)] += twist;
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn low_period_closed_forms() {
        for &(l, e) in &[(0.5, 0.3), (2.0, -1.7), (1.0, 3.3)] {
            assert!((discriminant(l, 0, 1, e).unwrap() - e).abs() < 1e-13);
            assert!((discriminant(l, 1, 2, e).unwrap() - (e * e - 2.0 * l * l - 2.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn free_discriminant_is_a_chebyshev_trace() {
        for q in 1..12u64 {
            for &e in &[-1.9, -0.4, 0.0, 1.3] {
                let p = if q == 1 { 0 } else { 1 };
                let want = 2.0 * (q as f64 * (e / 2.0f64).acos()).cos();
                assert!((discriminant(0.0, p, q, e).unwrap() - want).abs() < 1e-11, "{q} {e}");
            }
        }
    }

    #[test]
    fn rejects_unreduced_fractions() {
        assert!(discriminant(1.0, 2, 4, 0.0).is_err());
        assert!(discriminant(1.0, 0, 0, 0.0).is_err());
    }
}
