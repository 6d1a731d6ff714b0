use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::decay::state_decay;
use super::operator::{eigen_tridiagonal, TruncatedOperator};
use crate::arithmetic::RealInput;
use crate::cocycle::OperatorParams;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
pub enum AlphaSpec {
    Rational { p: i64, q: i64 },
    Terms { cf_terms: Vec<u64> },
}

impl AlphaSpec {
    /// `p/q`, or the irrational `[0; a1, a2, ...]` truncated to double.
    pub fn value(&self) -> Result<f64> {
        match self {
            Self::Rational { q: 0, .. } => Err(Error::InvalidParameter("zero denominator".into())),
            Self::Rational { p, q } => Ok(*p as f64 / *q as f64),
            Self::Terms { cf_terms } if cf_terms.is_empty() || cf_terms.contains(&0) => {
                Err(Error::InvalidParameter("partial quotients must be positive".into()))
            }
            Self::Terms { cf_terms } => Ok(RealInput::from_terms(0, cf_terms).approx_f64()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentManifest {
    pub lambda: f64,
    pub alpha: AlphaSpec,
    pub theta: f64,
    #[serde(rename = "box")]
    pub box_size: usize,
    pub n_states: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayRow {
    pub state_index: usize,
    #[serde(rename = "E")]
    pub energy: f64,
    /// NaN when no decay was detected.
    pub slope: f64,
    pub r2: f64,
    pub center: usize,
}

impl ExperimentManifest {
    pub fn operator(&self) -> Result<TruncatedOperator> {
        if self.box_size == 0 {
            return Err(Error::InvalidParameter("box must be positive".into()));
        }
        let p = OperatorParams::new(self.lambda, self.alpha.value()?, self.theta, 0.0)?;
        TruncatedOperator::new(&p, 0, self.box_size as i64 - 1)
    }

    /// `n_states` distinct indices drawn from the middle half of the spectrum,
    /// ascending.
    pub fn select_states(&self) -> Result<Vec<usize>> {
        let lo = self.box_size / 4;
        let span = self.box_size / 2;
        if self.n_states > span.max(1) {
            return Err(Error::InvalidParameter(format!(
                "{} states requested from a middle band of {span}",
                self.n_states
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let mut idx: Vec<usize> =
            rand::seq::index::sample(&mut rng, span.max(1), self.n_states).into_iter().map(|i| lo + i).collect();
        idx.sort_unstable();
        Ok(idx)
    }

    pub fn run(&self) -> Result<Vec<DecayRow>> {
        let op = self.operator()?;
        let states = self.select_states()?;
        let eig = eigen_tridiagonal(&op, &states)?;
        Ok(eig
            .pairs
            .par_iter()
            .map(|pair| {
                let c = (0..pair.vector.len())
                    .max_by(|&a, &b| pair.vector[a].abs().total_cmp(&pair.vector[b].abs()))
                    .unwrap_or(0);
                match state_decay(&op, pair.value, &pair.vector) {
                    Ok(f) => {
                        DecayRow { state_index: pair.index, energy: pair.value, slope: f.slope, r2: f.r2, center: c }
                    }
                    Err(Error::NoDecayDetected { r2 }) => {
                        DecayRow { state_index: pair.index, energy: pair.value, slope: f64::NAN, r2, center: c }
                    }
                    Err(_) => {
                        DecayRow { state_index: pair.index, energy: pair.value, slope: f64::NAN, r2: 0.0, center: c }
                    }
                }
            })
            .collect())
    }
}
