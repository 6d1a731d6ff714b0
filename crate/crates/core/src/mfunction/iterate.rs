use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const TAU: f64 = std::f64::consts::TAU;

/// A point of the upper half plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UpperHalfPlanePoint {
    pub value: Complex64,
}

impl UpperHalfPlanePoint {
    pub fn new(value: Complex64) -> Result<Self> {
        if value.im > 0.0 && value.re.is_finite() && value.im.is_finite() {
            Ok(Self { value })
        } else {
            Err(Error::InvalidParameter(format!("{value} is not in the upper half plane")))
        }
    }
}

/// `(E, x) ∈ Ω_λ`: `Im E > 0` and `2λ sinh|2π Im x| < Im E`.
pub fn in_domain_omega(lambda: f64, energy: Complex64, x: Complex64) -> bool {
    energy.im > 0.0 && 2.0 * lambda * (TAU * x.im).abs().sinh() < energy.im
}

/// `2λ cos 2πx` for complex `x`.
#[inline]
pub fn complex_potential(lambda: f64, x: Complex64) -> Complex64 {
    2.0 * lambda * (TAU * x).cos()
}

/// Möbius action of `S_{λ,E}(x)`: `z ↦ E − v(x) − 1/z`.
#[inline]
pub fn schrodinger_mobius(lambda: f64, energy: Complex64, x: Complex64, z: Complex64) -> Complex64 {
    energy - complex_potential(lambda, x) - z.inv()
}

/// Möbius action of a 2×2 complex matrix.
pub fn mobius(m: &[[Complex64; 2]; 2], z: Complex64) -> Complex64 {
    (m[0][0] * z + m[0][1]) / (m[1][0] * z + m[1][1])
}

/// `m^n(E, x) = S(x−α) ⋯ S(x−nα) · i`, innermost factor first. Fails as
/// soon as an iterate leaves the upper half plane.
pub fn m_value(lambda: f64, alpha: f64, energy: Complex64, x: Complex64, n: usize) -> Result<Complex64> {
    let mut z = Complex64::i();
    for k in (1..=n).rev() {
        z = schrodinger_mobius(lambda, energy, x - k as f64 * alpha, z);
        if !(z.im > 0.0) {
            return Err(Error::LeftHalfConvergence { step: n - k + 1 });
        }
    }
    Ok(z)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MIterate {
    pub m: UpperHalfPlanePoint,
    pub n: usize,
    /// `(j, |m^j − m^{j−1}|)` at `j = 1, 2, 4, …` and `j = n`.
    pub distances: Vec<(usize, f64)>,
    /// `|S(x)·m^n(x) − m^n(x+α)|`.
    pub invariance_residual: f64,
}

/// `m^n(E, x)` with convergence diagnostics.
pub fn m_iterate(lambda: f64, alpha: f64, energy: Complex64, x: Complex64, n: usize) -> Result<MIterate> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be positive".into()));
    }
    if !(energy.im > 0.0) {
        return Err(Error::InvalidParameter("Im E must be positive".into()));
    }
    let m = m_value(lambda, alpha, energy, x, n)?;
    let mut checkpoints: Vec<usize> =
        std::iter::successors(Some(1usize), |j| j.checked_mul(2)).take_while(|&j| j < n).collect();
    checkpoints.push(n);
    let mut distances = Vec::with_capacity(checkpoints.len());
    for &j in &checkpoints {
        let a = m_value(lambda, alpha, energy, x, j)?;
        let b = if j == 1 { Complex64::i() } else { m_value(lambda, alpha, energy, x, j - 1)? };
        distances.push((j, (a - b).norm()));
    }
    let shifted = m_value(lambda, alpha, energy, x + alpha, n)?;
    let invariance_residual = (schrodinger_mobius(lambda, energy, x, m) - shifted).norm();
    Ok(MIterate { m: UpperHalfPlanePoint { value: m }, n, distances, invariance_residual })
}

/// Levels used to approach the real axis.
pub const DELTA_LEVELS: [f64; 3] = [1e-2, 1e-3, 1e-4];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RealLimit {
    pub value: Complex64,
    /// `m(E + iδ, x)` at each level.
    pub levels: [Complex64; 3],
    /// Disagreement of the two first-order extrapolations.
    pub stabilization: f64,
}

/// `lim_{δ↓0} m(E + iδ, x)` by Richardson extrapolation over
/// [`DELTA_LEVELS`]. Each level iterates `max(n_converge, 40/δ)` times, since
/// contraction per step is only `1 − O(δ)` near the spectrum.
pub fn m_real_limit(lambda: f64, alpha: f64, energy: f64, x: f64, n_converge: usize) -> Result<RealLimit> {
    let mut levels = [Complex64::new(0.0, 0.0); 3];
    for (i, &d) in DELTA_LEVELS.iter().enumerate() {
        let n = n_converge.max((40.0 / d) as usize);
        levels[i] = m_value(lambda, alpha, Complex64::new(energy, d), Complex64::new(x, 0.0), n)?;
    }
    let r12 = (10.0 * levels[1] - levels[0]) / 9.0;
    let r23 = (10.0 * levels[2] - levels[1]) / 9.0;
    let value = (100.0 * r23 - r12) / 99.0;
    if !(value.im > 0.0) {
        return Err(Error::DegenerateM { im: value.im });
    }
    Ok(RealLimit { value, levels, stabilization: (r23 - r12).norm() })
}

/// Real-energy m on the points `xs`, in input order.
pub fn m_real_grid(lambda: f64, alpha: f64, energy: f64, xs: &[f64], n_converge: usize) -> Result<Vec<RealLimit>> {
    xs.par_iter().map(|&x| m_real_limit(lambda, alpha, energy, x, n_converge)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn domain_examples() {
        let c = |re: f64, im: f64| Complex64::new(re, im);
        assert!(in_domain_omega(1.0, c(0.0, 3.0), c(0.4, 0.0)));
        assert!(!in_domain_omega(1.0, c(0.0, 1.0), c(0.0, 1.0)));
        let im_x = (0.5f64).asinh() / TAU;
        // 2 sinh(2π Im x) = 1 = Im E exactly on the boundary (up to rounding).
        let boundary = 2.0 * (TAU * im_x).sinh();
        assert!(!in_domain_omega(1.0, c(0.0, boundary), c(0.0, im_x)));
    }

    #[test]
    fn free_fixed_point() {
        let r = m_iterate(0.0, crate::GOLDEN, Complex64::new(0.0, 2.0), Complex64::new(0.0, 0.0), 200).unwrap();
        assert!((r.m.value - Complex64::new(0.0, 1.0 + 2f64.sqrt())).norm() < 1e-10);
        assert!(r.invariance_residual < 1e-10);
        let last = r.distances.last().unwrap().1;
        assert!(last < r.distances[0].1);
        assert_eq!(mobius(&[[0.0.into(), (-1.0).into()], [1.0.into(), 0.0.into()]], Complex64::i()), Complex64::i());
    }

    #[test]
    fn real_limit_of_the_free_m() {
        let e = 0.7;
        let r = m_real_limit(0.0, crate::GOLDEN, e, 0.0, 100).unwrap();
        let exact = Complex64::new(e / 2.0, (4.0 - e * e).sqrt() / 2.0);
        assert!((r.value - exact).norm() < 1e-8, "{} {}", r.value, exact);
    }
}
