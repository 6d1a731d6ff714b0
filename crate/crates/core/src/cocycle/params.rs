use serde::{Deserialize, Serialize};

use super::matrix::{Mat2, ScaledMat2};
use crate::error::{Error, Result};

/// Parameters of the almost Mathieu operator
/// `(Hu)_n = u_{n+1} + u_{n-1} + 2λ cos 2π(θ + nα) u_n` at energy `E`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorParams {
    pub lambda: f64,
    pub alpha: f64,
    pub theta: f64,
    pub energy: f64,
}

impl OperatorParams {
    /// λ = 0 is accepted: the free operator is the reference case for most
    /// closed forms.
    pub fn new(lambda: f64, alpha: f64, theta: f64, energy: f64) -> Result<Self> {
        let p = Self { lambda, alpha, theta, energy };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in
            [("lambda", self.lambda), ("alpha", self.alpha), ("theta", self.theta), ("energy", self.energy)]
        {
            if !v.is_finite() {
                return Err(Error::InvalidParameter(format!("{name} must be finite, got {v}")));
            }
        }
        Ok(())
    }

    pub fn with_energy(&self, energy: f64) -> Self {
        Self { energy, ..*self }
    }

    pub fn with_theta(&self, theta: f64) -> Self {
        Self { theta, ..*self }
    }

    /// `2λ cos 2πx`.
    #[inline]
    pub fn potential(&self, x: f64) -> f64 {
        2.0 * self.lambda * (std::f64::consts::TAU * x).cos()
    }

    /// Raw `S_{λ,E}(x)`.
    #[inline]
    pub fn step(&self, x: f64) -> Mat2 {
        [[self.energy - self.potential(x), -1.0], [1.0, 0.0]]
    }

    /// Upper bound of the spectrum, `2 + 2|λ|`.
    pub fn spectral_radius_bound(&self) -> f64 {
        2.0 + 2.0 * self.lambda.abs()
    }
}

/// `x0 + kα mod 1`, with the product `kα` compensated so long orbits do not
/// drift.
#[inline]
pub fn orbit_point(x0: f64, alpha: f64, k: i64) -> f64 {
    let kf = k as f64;
    let p = kf * alpha;
    let e = kf.mul_add(alpha, -p);
    let r = (p - p.floor()) + (x0 - x0.floor()) + e;
    let r = r - r.floor();
    if r >= 1.0 {
        0.0
    } else {
        r
    }
}

pub fn transfer_matrix(params: &OperatorParams, x: f64) -> ScaledMat2 {
    ScaledMat2::from_matrix(params.step(x))
}

/// `A_n(x0) = S(x0 + (n−1)α) ⋯ S(x0)`; `n = 0` gives the identity.
pub fn transfer_product(params: &OperatorParams, x0: f64, n: u64) -> ScaledMat2 {
    let mut acc = ScaledMat2::identity();
    for k in 0..n {
        acc = acc.left_mul(&params.step(orbit_point(x0, params.alpha, k as i64)));
    }
    acc
}
