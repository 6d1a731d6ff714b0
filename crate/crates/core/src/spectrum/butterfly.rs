use num_integer::Integer;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::bands::{band_edges, BandList};
use crate::cocycle::{Atom, AtomicMeasure};
use crate::error::Result;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tile {
    pub p: u64,
    pub q: u64,
    pub bands: Option<BandList>,
    pub error: Option<String>,
}

/// Bands for every reduced `p/q ∈ [0, 1)` with `q ≤ q_max`, ordered by `q`
/// then `p`.
pub fn butterfly(lambda: f64, q_max: u64) -> Vec<Tile> {
    let fractions: Vec<(u64, u64)> =
        (1..=q_max).flat_map(|q| (0..q).filter(move |p| p.gcd(&q) == 1).map(move |p| (p, q))).collect();
    fractions
        .par_iter()
        .map(|&(p, q)| match band_edges(lambda, p, q) {
            Ok(b) => Tile { p, q, bands: Some(b), error: None },
            Err(e) => Tile { p, q, bands: None, error: Some(e.to_string()) },
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DosAtoms {
    pub measure: AtomicMeasure,
    /// Longest band.
    pub max_band_length: f64,
}

/// One atom of mass `1/q` at each band midpoint.
pub fn dos_atoms(bands: &BandList) -> Result<DosAtoms> {
    let w = 1.0 / bands.q as f64;
    let atoms = bands.bands.iter().map(|b| Atom { position: b.midpoint(), weight: w }).collect();
    Ok(DosAtoms { measure: AtomicMeasure::new(atoms)?, max_band_length: bands.max_band_length() })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tile_counts() {
        let t = butterfly(1.0, 1);
        assert_eq!(t.len(), 1);
        let t = butterfly(1.0, 5);
        let bands: usize = t.iter().map(|t| t.bands.as_ref().unwrap().bands.len()).sum();
        assert_eq!(bands, 37);
        let order: Vec<(u64, u64)> = t.iter().map(|t| (t.q, t.p)).collect();
        let mut sorted = order.clone();
        sorted.sort();
        assert_eq!(order, sorted);
    }

    #[test]
    fn single_band_atom() {
        let d = dos_atoms(&band_edges(0.4, 0, 1).unwrap()).unwrap();
        assert_eq!(d.measure.atoms.len(), 1);
        assert!(d.measure.atoms[0].position.abs() < 1e-15);
        assert_eq!(d.measure.total_mass(), 1.0);
    }
}
