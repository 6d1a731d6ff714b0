use serde::{Deserialize, Serialize};

use super::lyapunov::lyapunov_exponent;
use super::params::OperatorParams;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub position: f64,
    pub weight: f64,
}

/// A finite positive measure, normalized to total mass 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AtomicMeasure {
    pub atoms: Vec<Atom>,
}

impl AtomicMeasure {
    pub fn new(atoms: Vec<Atom>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::InvalidParameter("empty measure".into()));
        }
        if atoms.iter().any(|a| !(a.weight >= 0.0) || !a.position.is_finite()) {
            return Err(Error::InvalidParameter("atoms need finite positions and nonnegative weights".into()));
        }
        let m = Self { atoms };
        if (m.total_mass() - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidParameter(format!("total mass {} is not 1", m.total_mass())));
        }
        Ok(m)
    }

    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.weight).sum()
    }

    /// `Σ w_i ln|E − E_i|`, skipping atoms that coincide with `E`.
    pub fn log_potential(&self, energy: f64) -> (f64, Vec<usize>) {
        let mut excluded = Vec::new();
        let mut acc = 0.0;
        for (i, a) in self.atoms.iter().enumerate() {
            let d = (energy - a.position).abs();
            if d <= 1e-12 * energy.abs().max(1.0) {
                excluded.push(i);
            } else {
                acc += a.weight * d.ln();
            }
        }
        (acc, excluded)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThoulessReport {
    pub energy: f64,
    pub lyapunov: f64,
    pub log_potential: f64,
    pub residual: f64,
    /// Indices of atoms sitting on the energy; left out of the potential.
    pub excluded_atoms: Vec<usize>,
}

/// `|L(E) − Σ w_i ln|E − E_i||` with `L` estimated from transfer products.
pub fn thouless_residual(
    params: &OperatorParams,
    measure: &AtomicMeasure,
    n_steps: u64,
    n_phases: usize,
) -> Result<ThoulessReport> {
    let l = lyapunov_exponent(params, n_steps, n_phases, 0)?.value;
    Ok(thouless_with_lyapunov(params.energy, l, measure))
}

/// The residual for an externally supplied exponent.
pub fn thouless_with_lyapunov(energy: f64, lyapunov: f64, measure: &AtomicMeasure) -> ThoulessReport {
    let (log_potential, excluded_atoms) = measure.log_potential(energy);
    ThoulessReport { energy, lyapunov, log_potential, residual: (lyapunov - log_potential).abs(), excluded_atoms }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_atom_measure() {
        let m = AtomicMeasure::new(vec![Atom { position: 0.0, weight: 1.0 }]).unwrap();
        let p = OperatorParams::new(0.0, crate::GOLDEN, 0.0, 3.0).unwrap();
        let r = thouless_residual(&p, &m, 10_000, 2).unwrap();
        assert_eq!(r.residual, (r.lyapunov - 3f64.ln()).abs());
        let r = thouless_with_lyapunov(0.0, 0.0, &m);
        assert_eq!(r.excluded_atoms, vec![0]);
        assert!(AtomicMeasure::new(vec![Atom { position: 0.0, weight: 0.5 }]).is_err());
    }
}
