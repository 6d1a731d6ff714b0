use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::conjugation::{conjugation_c, inverse, rotation_angle_phi};
use super::iterate::UpperHalfPlanePoint;
use crate::cocycle::{mat_mul, orbit_point, rotation, Mat2};
use crate::error::{Error, Result};
use crate::fourier::FourierSeries;

const TAU: f64 = std::f64::consts::TAU;

/// Divisors below this are treated as zero.
pub const SMALL_DIVISOR: f64 = 1e-14;

/// `e^{2πikα} − 1`, with `kα` reduced mod 1 before the exponential.
pub fn divisor(k: i64, alpha: f64) -> Complex64 {
    let r = orbit_point(0.0, alpha, k);
    let (s, c) = (TAU * r).sin_cos();
    Complex64::new(c - 1.0, s)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CohomologicalSolution {
    pub psi_hat: FourierSeries,
    /// `sup |ψ(x+α) − ψ(x) − (φ(x) − φ̂(0))|` on a grid.
    pub residual: f64,
    /// Modes whose divisor fell below [`SMALL_DIVISOR`]; their coefficients
    /// are set to zero.
    pub dropped_modes: Vec<i64>,
}

/// `ψ̂(k) = φ̂(k)/(e^{2πikα} − 1)` for `0 < |k| ≤ K_solve`, `ψ̂(0) = 0`,
/// dropping modes with vanishing divisors.
pub fn cohomological_solve_lenient(
    phi_hat: &FourierSeries,
    alpha: f64,
    k_solve: usize,
) -> Result<CohomologicalSolution> {
    if k_solve > phi_hat.k_max {
        return Err(Error::InvalidParameter(format!("K_solve = {k_solve} exceeds K = {}", phi_hat.k_max)));
    }
    let mut psi = FourierSeries::zeros(k_solve);
    let mut dropped = Vec::new();
    for k in -(k_solve as i64)..=(k_solve as i64) {
        if k == 0 {
            continue;
        }
        let d = divisor(k, alpha);
        if d.norm() < SMALL_DIVISOR {
            if phi_hat.coeff(k).norm() > 0.0 {
                dropped.push(k);
            }
            continue;
        }
        psi.set(k, phi_hat.coeff(k) / d);
    }
    let residual = cohomological_residual(phi_hat, &psi, alpha);
    Ok(CohomologicalSolution { psi_hat: psi, residual, dropped_modes: dropped })
}

/// As [`cohomological_solve_lenient`], but any dropped mode is an error.
pub fn cohomological_solve(phi_hat: &FourierSeries, alpha: f64, k_solve: usize) -> Result<CohomologicalSolution> {
    let s = cohomological_solve_lenient(phi_hat, alpha, k_solve)?;
    if s.dropped_modes.is_empty() {
        Ok(s)
    } else {
        Err(Error::SmallDivisorOverflow { modes: s.dropped_modes, residual: s.residual })
    }
}

/// Sup over a grid of `ψ(x+α) − ψ(x) − (φ(x) − φ̂(0))`, evaluated by
/// synthesis in x-space.
pub fn cohomological_residual(phi_hat: &FourierSeries, psi_hat: &FourierSeries, alpha: f64) -> f64 {
    let n = (8 * phi_hat.k_max.max(psi_hat.k_max) + 1).max(64);
    let mean = phi_hat.coeff(0);
    (0..n)
        .map(|j| {
            let x = j as f64 / n as f64;
            let lhs = psi_hat.eval(x + alpha) - psi_hat.eval(x);
            let rhs = phi_hat.eval(x) - mean;
            (lhs - rhs).norm()
        })
        .fold(0.0, f64::max)
}

/// `max_{k_min ≤ |k| ≤ K} (1/|k|) ln|φ̂(k)/(e^{2πikα} − 1)|` and the `k`
/// attaining it. Modes with `φ̂(k) = 0` contribute −∞.
pub fn decay_exponent_a(phi_hat: &FourierSeries, alpha: f64, k_min: usize) -> Result<(f64, i64)> {
    if k_min == 0 {
        return Err(Error::InvalidParameter("k_min must be at least 1".into()));
    }
    if k_min > phi_hat.k_max {
        return Err(Error::EmptyRange(format!("k_min = {k_min} exceeds K = {}", phi_hat.k_max)));
    }
    let mut best = (f64::NEG_INFINITY, k_min as i64);
    for ka in k_min..=phi_hat.k_max {
        for k in [ka as i64, -(ka as i64)] {
            let c = phi_hat.coeff(k).norm();
            if c == 0.0 {
                continue;
            }
            let v = (c.ln() - divisor(k, alpha).norm().ln()) / ka as f64;
            if v > best.0 {
                best = (v, k);
            }
        }
    }
    Ok(best)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeReport {
    #[serde(rename = "E")]
    pub energy: f64,
    #[serde(rename = "theta_E")]
    pub theta_e: f64,
    pub residual: f64,
    pub dropped_modes: Vec<i64>,
    pub a_truncated: f64,
    #[serde(rename = "K")]
    pub k: usize,
}

/// Builds `B(x) = R_{−ψ(x)} C(x)` on a grid and measures
/// `sup |B(x+α) S(x) B(x)^{-1} − R_{θ(E)}|`, `θ(E) = φ̂(0)`.
///
/// With `allow_dropped = false`, vanishing divisors are an error; otherwise
/// the dropped modes are listed in the report.
pub fn reducibility_probe(
    lambda: f64,
    alpha: f64,
    energy: f64,
    k: usize,
    grid_size: usize,
    n_converge: usize,
    allow_dropped: bool,
) -> Result<ProbeReport> {
    let (phi_hat_full, grid) = rotation_angle_phi(lambda, alpha, energy, grid_size, n_converge)?;
    let k = k.min(phi_hat_full.k_max);
    let phi_hat = FourierSeries::from_coeffs(k, (-(k as i64)..=k as i64).map(|j| phi_hat_full.coeff(j)).collect())?;
    let sol = if allow_dropped {
        cohomological_solve_lenient(&phi_hat, alpha, k)?
    } else {
        cohomological_solve(&phi_hat, alpha, k)?
    };
    let theta = phi_hat.coeff(0).re;
    let target = rotation(theta);
    let b = |psi: f64, m: Complex64| -> Result<Mat2> {
        Ok(mat_mul(&rotation(-psi), &conjugation_c(UpperHalfPlanePoint { value: m })?))
    };
    let mut residual = 0.0f64;
    for (j, &x) in grid.xs.iter().enumerate() {
        let b0 = b(sol.psi_hat.eval(x).re, grid.m[j])?;
        let b1 = b(sol.psi_hat.eval(x + alpha).re, grid.m_shift[j])?;
        let s = [[energy - 2.0 * lambda * (TAU * x).cos(), -1.0], [1.0, 0.0]];
        let m = mat_mul(&mat_mul(&b1, &s), &inverse(&b0));
        for r in 0..2 {
            for c in 0..2 {
                residual = residual.max((m[r][c] - target[r][c]).abs());
            }
        }
    }
    let a_truncated = decay_exponent_a(&phi_hat, alpha, 8.min(k.max(1))).map(|a| a.0).unwrap_or(f64::NAN);
    Ok(ProbeReport { energy, theta_e: theta, residual, dropped_modes: sol.dropped_modes, a_truncated, k })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_frequency_closed_form() {
        let mut phi = FourierSeries::zeros(4);
        phi.set(1, Complex64::new(0.5, 0.0));
        phi.set(-1, Complex64::new(0.5, 0.0));
        let s = cohomological_solve(&phi, crate::GOLDEN, 4).unwrap();
        let want = Complex64::new(0.5, 0.0) / (Complex64::new(0.0, TAU * crate::GOLDEN).exp() - 1.0);
        assert!((s.psi_hat.coeff(1) - want).norm() < 1e-15);
        assert!(s.residual < 1e-12);
        assert_eq!(s.psi_hat.coeff(0), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn constant_phi_gives_zero() {
        let mut phi = FourierSeries::zeros(3);
        phi.set(0, Complex64::new(0.37, 0.0));
        let s = cohomological_solve(&phi, crate::GOLDEN, 3).unwrap();
        assert!(s.psi_hat.coeffs.iter().all(|c| c.norm() == 0.0));
        assert!(s.residual < 1e-14);
    }

    #[test]
    fn rational_frequency_overflows_at_q() {
        let mut phi = FourierSeries::zeros(8);
        phi.set(5, Complex64::new(0.1, 0.0));
        phi.set(-5, Complex64::new(0.1, 0.0));
        phi.set(1, Complex64::new(0.2, 0.0));
        phi.set(-1, Complex64::new(0.2, 0.0));
        match cohomological_solve(&phi, 3.0 / 5.0, 8) {
            Err(Error::SmallDivisorOverflow { modes, residual }) => {
                assert_eq!(modes, vec![-5, 5]);
                assert!(residual > 0.1);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn decay_exponent_examples() {
        let k = 64;
        let geometric = FourierSeries::from_coeffs(
            k,
            (-(k as i64)..=k as i64).map(|j| Complex64::new((-(j.abs() as f64)).exp(), 0.0)).collect(),
        )
        .unwrap();
        assert!(decay_exponent_a(&geometric, crate::GOLDEN, 8).unwrap().0 < 0.0);
        let flat = FourierSeries::from_coeffs(k, vec![Complex64::new(1.0, 0.0); 2 * k + 1]).unwrap();
        assert!(decay_exponent_a(&flat, crate::GOLDEN, 8).unwrap().0 >= 0.0);
        assert!(matches!(decay_exponent_a(&flat, crate::GOLDEN, 65), Err(Error::EmptyRange(_))));
    }

    #[test]
    fn free_cocycle_is_reducible() {
        let r = reducibility_probe(0.0, crate::GOLDEN, 0.5, 8, 16, 100, false).unwrap();
        assert!(r.residual < 1e-8, "{r:?}");
        let w = (0.25f64).acos() / TAU;
        assert!((r.theta_e - w).abs() < 1e-8);
    }
}
