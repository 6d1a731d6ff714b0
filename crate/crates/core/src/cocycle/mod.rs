//! Transfer matrices of the almost Mathieu operator and the quantities built
//! from their products: Lyapunov exponent, rotation number and integrated
//! density of states, the determinants `P_k`, Herman's bound and the Thouless
//! residual.

mod determinant;
mod lyapunov;
mod matrix;
mod params;
mod rotation;
mod thouless;

pub use determinant::{determinant_p, determinant_p_log, herman_bound_check, HermanReport};
pub use lyapunov::{kronecker_phases, lyapunov_exponent, LyapunovEstimate};
pub use matrix::{det, mat_mul, op_norm, rotation, Mat2, ScaledMat2, IDENTITY};
pub use params::{orbit_point, transfer_matrix, transfer_product, OperatorParams};
pub use rotation::{
    averaged_rotation_number, fibered_rotation_number, fold_rotation, rotation_along_orbit, rotation_number, Cocycle,
    ConstantRotation, RotationReport,
};
pub use thouless::{thouless_residual, thouless_with_lyapunov, Atom, AtomicMeasure, ThoulessReport};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Result;

/// One row of an energy sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub energy: f64,
    pub lyapunov: f64,
    pub rho: f64,
    pub ids: f64,
    pub spread: f64,
}

/// Lyapunov exponent and phase-averaged IDS on an energy grid, in input
/// order.
pub fn sweep(params: &OperatorParams, energies: &[f64], n_steps: u64, n_phases: usize) -> Result<Vec<SweepRow>> {
    energies
        .par_iter()
        .map(|&e| {
            let p = params.with_energy(e);
            let l = lyapunov_exponent(&p, n_steps, n_phases, 0)?;
            let r = averaged_rotation_number(&p, n_steps, n_phases)?;
            Ok(SweepRow { energy: e, lyapunov: l.value, rho: r.rho, ids: r.ids, spread: l.spread })
        })
        .collect()
}
