//! Continued fractions, the Liouville exponent β(α), resonance bookkeeping
//! and the phase census.

mod expansion;
mod real;
mod resonance;
mod theta;

pub use expansion::{
    torus_norm, torus_norm_multiple, ContinuedFractionExpansion, ErrorBound, ExpansionJson, Termination,
};
pub use real::{RealInput, PI_100};
pub use resonance::{classify_resonance, classify_resonance_at, scale_b, Resonance, ResonanceReport};
pub use theta::{theta_membership_scan, ThetaScan, ThetaWitness, SECOND_BRANCH_TOL};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hp::ln_bigint;

/// Finite-scale view of `β(α) = limsup ln q_{n+1} / q_n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BetaEstimate {
    /// `ratios[n] = ln q_{n+1} / q_n`.
    pub ratios: Vec<f64>,
    /// `running_tail_sup[n] = max_{m ≥ n} ratios[m]` over the computed range.
    pub running_tail_sup: Vec<f64>,
    /// False when the expansion terminated (rational input): β is undefined.
    pub defined: bool,
}

impl BetaEstimate {
    pub fn last_tail_sup(&self) -> Option<f64> {
        self.running_tail_sup.last().copied()
    }
}

pub fn beta_estimate(cf: &ContinuedFractionExpansion) -> Result<BetaEstimate> {
    if cf.len() < 2 {
        return Err(Error::InvalidParameter("need at least two convergents".into()));
    }
    let ratios: Vec<f64> = (0..cf.len() - 1)
        .map(|n| {
            // ln q_{n+1} / q_n evaluated as exp(ln ln q_{n+1} − ln q_n) so huge
            // denominators do not overflow.
            let num = ln_bigint(cf.q(n + 1));
            if num == 0.0 {
                0.0
            } else {
                (num.ln() - ln_bigint(cf.q(n))).exp()
            }
        })
        .collect();
    let mut running_tail_sup = ratios.clone();
    for i in (0..running_tail_sup.len().saturating_sub(1)).rev() {
        running_tail_sup[i] = running_tail_sup[i].max(running_tail_sup[i + 1]);
    }
    Ok(BetaEstimate { ratios, running_tail_sup, defined: !cf.is_rational_complete() })
}
