use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::params::{transfer_product, OperatorParams};
use crate::error::{Error, Result};

/// Kronecker generators for the starting phases. Neither is a likely
/// frequency, so the phase set does not collapse onto one orbit.
const PHASE_STEP: f64 = 0.754_877_666_246_692_7;
const SEED_STEP: f64 = std::f64::consts::SQRT_2 - 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LyapunovEstimate {
    pub value: f64,
    pub n_steps: u64,
    pub n_phases: usize,
    /// (max − min of ln‖A_n‖ over phases) / n.
    pub spread: f64,
}

/// Deterministic starting phases for a given seed.
pub fn kronecker_phases(n_phases: usize, seed: u64) -> Vec<f64> {
    let offset = (seed as f64 * SEED_STEP).fract();
    (0..n_phases)
        .map(|j| {
            let x = offset + j as f64 * PHASE_STEP;
            x - x.floor()
        })
        .collect()
}

/// Phase average of `(1/n) ln‖A_n(x)‖`.
pub fn lyapunov_exponent(
    params: &OperatorParams,
    n_steps: u64,
    n_phases: usize,
    seed: u64,
) -> Result<LyapunovEstimate> {
    params.validate()?;
    if n_steps == 0 || n_phases == 0 {
        return Err(Error::InvalidParameter("n_steps and n_phases must be positive".into()));
    }
    let logs: Vec<f64> =
        kronecker_phases(n_phases, seed).par_iter().map(|&x| transfer_product(params, x, n_steps).log_norm()).collect();
    let n = n_steps as f64;
    let value = logs.iter().sum::<f64>() / (n * n_phases as f64);
    let max = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = logs.iter().cloned().fold(f64::INFINITY, f64::min);
    Ok(LyapunovEstimate { value, n_steps, n_phases, spread: (max - min) / n })
}
