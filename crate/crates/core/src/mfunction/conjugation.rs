use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::iterate::{m_real_limit, UpperHalfPlanePoint};
use crate::cocycle::{mat_mul, Mat2};
use crate::error::{Error, Result};
use crate::fourier::FourierSeries;

const TAU: f64 = std::f64::consts::TAU;

/// `C = [[Re m/(|m|√Im m), −|m|/√Im m], [√Im m/|m|, 0]]`, the element of
/// SL(2,R) taking `m` to `i`.
pub fn conjugation_c(m: UpperHalfPlanePoint) -> Result<Mat2> {
    let z = m.value;
    if z.im < 1e-14 {
        return Err(Error::DegenerateM { im: z.im });
    }
    let r = z.norm();
    let s = z.im.sqrt();
    Ok([[z.re / (r * s), -r / s], [s / r, 0.0]])
}

pub fn inverse(m: &Mat2) -> Mat2 {
    let d = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    [[m[1][1] / d, -m[0][1] / d], [-m[1][0] / d, m[0][0] / d]]
}

pub fn real_mobius(m: &Mat2, z: Complex64) -> Complex64 {
    (m[0][0] * z + m[0][1]) / (m[1][0] * z + m[1][1])
}

/// Rotation angle (turns, in (−1/2, 1/2]) of the rotation closest to `m`,
/// and the largest entrywise deviation of `m` from it.
pub fn rotation_part(m: &Mat2) -> (f64, f64) {
    let phi = m[1][0].atan2(m[0][0]) / TAU;
    let r = crate::cocycle::rotation(phi);
    let mut dev = 0.0f64;
    for i in 0..2 {
        for j in 0..2 {
            dev = dev.max((m[i][j] - r[i][j]).abs());
        }
    }
    (phi, dev)
}

/// The conjugated matrix `C(x+α) S(x) C(x)^{-1}` from independently computed
/// `m(x)` and `m(x+α)`.
pub fn conjugated_step(lambda: f64, energy: f64, x: f64, m_x: Complex64, m_shift: Complex64) -> Result<Mat2> {
    let c = conjugation_c(UpperHalfPlanePoint { value: m_x })?;
    let c_shift = conjugation_c(UpperHalfPlanePoint { value: m_shift })?;
    let s = [[energy - 2.0 * lambda * (TAU * x).cos(), -1.0], [1.0, 0.0]];
    Ok(mat_mul(&mat_mul(&c_shift, &s), &inverse(&c)))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhiGrid {
    pub xs: Vec<f64>,
    /// `m(x_j)` and `m(x_j + α)`.
    pub m: Vec<Complex64>,
    pub m_shift: Vec<Complex64>,
    /// Unwrapped angles `φ(x_j)`.
    pub phi: Vec<f64>,
    /// `sup_j |C(x_j+α) S(x_j) C(x_j)^{-1} − R_{φ(x_j)}|`.
    pub conjugation_residual: f64,
    /// Worst δ-extrapolation disagreement over the grid.
    pub stabilization: f64,
}

fn unwrap(raw: &[f64]) -> std::result::Result<Vec<f64>, (usize, f64)> {
    let mut out = Vec::with_capacity(raw.len());
    let mut prev = raw[0];
    out.push(prev);
    for (j, &a) in raw.iter().enumerate().skip(1) {
        let mut d = a - prev;
        d -= d.round();
        if d <= -0.5 {
            d += 1.0;
        }
        if d.abs() > 0.25 {
            return Err((j, d));
        }
        prev += d;
        out.push(prev);
    }
    // Closing the loop must not wind.
    let last = *out.last().unwrap();
    let mut d = raw[0] - last;
    d -= d.round();
    let winding = (last + d - out[0]).round();
    if winding != 0.0 || d.abs() > 0.25 {
        return Err((raw.len(), last + d - out[0]));
    }
    Ok(out)
}

fn phi_on_grid(lambda: f64, alpha: f64, energy: f64, n: usize, n_converge: usize) -> Result<PhiGrid> {
    let xs: Vec<f64> = (0..n).map(|j| j as f64 / n as f64).collect();
    let pts: Vec<(super::iterate::RealLimit, super::iterate::RealLimit)> = xs
        .par_iter()
        .map(|&x| {
            Ok((
                m_real_limit(lambda, alpha, energy, x, n_converge)?,
                m_real_limit(lambda, alpha, energy, x + alpha, n_converge)?,
            ))
        })
        .collect::<Result<_>>()?;
    let mut raw = Vec::with_capacity(n);
    let mut conjugation_residual = 0.0f64;
    let mut stabilization = 0.0f64;
    for (j, (a, b)) in pts.iter().enumerate() {
        let m = conjugated_step(lambda, energy, xs[j], a.value, b.value)?;
        let (phi, dev) = rotation_part(&m);
        raw.push(phi);
        conjugation_residual = conjugation_residual.max(dev);
        stabilization = stabilization.max(a.stabilization).max(b.stabilization);
    }
    match unwrap(&raw) {
        Ok(phi) => Ok(PhiGrid {
            xs,
            m: pts.iter().map(|p| p.0.value).collect(),
            m_shift: pts.iter().map(|p| p.1.value).collect(),
            phi,
            conjugation_residual,
            stabilization,
        }),
        Err((index, jump)) => Err(Error::BranchUnwrapFailure { index, jump }),
    }
}

/// `φ(E, x)` on a grid of `grid_size` points (a power of two), unwrapped to
/// a continuous periodic branch. An unwrap failure triggers one refinement
/// of the grid before it is reported.
pub fn phi_grid(lambda: f64, alpha: f64, energy: f64, grid_size: usize, n_converge: usize) -> Result<PhiGrid> {
    if grid_size < 4 || !grid_size.is_power_of_two() {
        return Err(Error::InvalidParameter("grid size must be a power of two ≥ 4".into()));
    }
    match phi_on_grid(lambda, alpha, energy, grid_size, n_converge) {
        Err(Error::BranchUnwrapFailure { .. }) => phi_on_grid(lambda, alpha, energy, 2 * grid_size, n_converge),
        other => other,
    }
}

/// Fourier series of `φ(E, ·)` with `K = min(256, N/2 − 1)` modes; its mean
/// is the candidate `θ(E)`.
pub fn rotation_angle_phi(
    lambda: f64,
    alpha: f64,
    energy: f64,
    grid_size: usize,
    n_converge: usize,
) -> Result<(FourierSeries, PhiGrid)> {
    let g = phi_grid(lambda, alpha, energy, grid_size, n_converge)?;
    let k = (g.phi.len() / 2 - 1).min(256);
    let s = FourierSeries::from_real_samples(&g.phi, k)?;
    Ok((s, g))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check_c(z: Complex64) {
        let c = conjugation_c(UpperHalfPlanePoint::new(z).unwrap()).unwrap();
        assert!((c[0][0] * c[1][1] - c[0][1] * c[1][0] - 1.0).abs() < 1e-12);
        assert!((real_mobius(&c, z) - Complex64::i()).norm() < 1e-12);
    }

    #[test]
    fn conjugation_examples() {
        check_c(Complex64::i());
        check_c(Complex64::new(0.0, 2.0));
        check_c(Complex64::new(1.0, 1.0));
        check_c(Complex64::new(-3.5, 0.01));
        assert!(conjugation_c(UpperHalfPlanePoint { value: Complex64::new(1.0, 1e-15) }).is_err());
    }

    #[test]
    fn free_angle_is_constant() {
        let w = 0.3;
        let e = 2.0 * (TAU * w).cos();
        let (s, g) = rotation_angle_phi(0.0, crate::GOLDEN, e, 16, 100).unwrap();
        assert!((s.coeff(0).re - w).abs() < 1e-8, "{}", s.coeff(0));
        assert!(s.modes().filter(|&k| k != 0).all(|k| s.coeff(k).norm() < 1e-8));
        assert!(g.conjugation_residual < 1e-8);
    }

    #[test]
    fn unwrap_rejects_winding() {
        let raw: Vec<f64> = (0..16)
            .map(|j| {
                let t = j as f64 / 16.0;
                t - t.round()
            })
            .collect();
        assert!(unwrap(&raw).is_err());
        let raw = vec![0.49, -0.49, 0.48, -0.495];
        assert_eq!(unwrap(&raw).unwrap().len(), 4);
    }
}
