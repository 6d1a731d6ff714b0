//! Truncated Fourier series on ℝ/ℤ.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `f(x) = Σ_{|k| ≤ K} c_k e^{2πikx}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FourierSeries {
    pub k_max: usize,
    /// `coeffs[k + K] = c_k`.
    pub coeffs: Vec<Complex64>,
}

#[inline]
fn cis(t: f64) -> Complex64 {
    let (s, c) = (std::f64::consts::TAU * t).sin_cos();
    Complex64::new(c, s)
}

impl FourierSeries {
    pub fn zeros(k_max: usize) -> Self {
        Self { k_max, coeffs: vec![Complex64::new(0.0, 0.0); 2 * k_max + 1] }
    }

    pub fn from_coeffs(k_max: usize, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != 2 * k_max + 1 {
            return Err(Error::InvalidParameter(format!("expected {} coefficients", 2 * k_max + 1)));
        }
        Ok(Self { k_max, coeffs })
    }

    pub fn coeff(&self, k: i64) -> Complex64 {
        if k.unsigned_abs() as usize > self.k_max {
            Complex64::new(0.0, 0.0)
        } else {
            self.coeffs[(k + self.k_max as i64) as usize]
        }
    }

    pub fn set(&mut self, k: i64, v: Complex64) {
        let i = (k + self.k_max as i64) as usize;
        self.coeffs[i] = v;
    }

    pub fn modes(&self) -> impl Iterator<Item = i64> {
        let k = self.k_max as i64;
        -k..=k
    }

    pub fn eval(&self, x: f64) -> Complex64 {
        self.modes().map(|k| self.coeff(k) * cis(k as f64 * x)).sum()
    }

    /// Coefficients of samples `f(j/n)`, `j < n`, by direct DFT. Needs
    /// `n ≥ 2K + 1`; aliasing from modes above `K` is not removed.
    pub fn from_samples(samples: &[Complex64], k_max: usize) -> Result<Self> {
        let n = samples.len();
        if n < 2 * k_max + 1 {
            return Err(Error::InvalidParameter(format!("{n} samples cannot resolve {k_max} modes")));
        }
        let mut s = Self::zeros(k_max);
        for k in -(k_max as i64)..=(k_max as i64) {
            let mut acc = Complex64::new(0.0, 0.0);
            for (j, v) in samples.iter().enumerate() {
                // e^{−2πikj/n}; reduce kj mod n first to keep the angle small.
                let r = (k * j as i64).rem_euclid(n as i64) as f64 / n as f64;
                acc += v * cis(-r);
            }
            s.set(k, acc / n as f64);
        }
        Ok(s)
    }

    pub fn from_real_samples(samples: &[f64], k_max: usize) -> Result<Self> {
        let c: Vec<Complex64> = samples.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        Self::from_samples(&c, k_max)
    }

    /// Values on the grid `j/n`.
    pub fn synthesize(&self, n: usize) -> Vec<Complex64> {
        (0..n).map(|j| self.eval(j as f64 / n as f64)).collect()
    }

    /// `max_k |c_k|·e^{2π|k|h}` style decay check: the largest `|c_k|` among
    /// `|k| ≥ k0`.
    pub fn tail_max(&self, k0: usize) -> f64 {
        self.modes().filter(|k| k.unsigned_abs() as usize >= k0).map(|k| self.coeff(k).norm()).fold(0.0, f64::max)
    }
}
