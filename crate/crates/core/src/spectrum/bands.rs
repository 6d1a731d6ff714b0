use serde::{Deserialize, Serialize};

use super::discriminant::{bloch_matrix, check_fraction, lambda_pow};
use crate::error::{Error, Result};
use crate::linalg::symmetric_eigenvalues;

pub const DEFAULT_EDGE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Band {
    pub lo: f64,
    pub hi: f64,
}

impl Band {
    pub fn len(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn contains(&self, e: f64, tol: f64) -> bool {
        e >= self.lo - tol && e <= self.hi + tol
    }
}

/// The spectrum of the operator with frequency `p/q`, as `q` ordered bands.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandList {
    pub lambda: f64,
    pub p: u64,
    pub q: u64,
    pub bands: Vec<Band>,
    pub edge_tolerance: f64,
}

impl BandList {
    /// Separations `lo_{j+1} − hi_j` at or below this are touchings.
    pub fn touching_tolerance(&self) -> f64 {
        10.0 * self.edge_tolerance
    }

    /// Indices `j` (0-based) such that bands `j` and `j+1` touch.
    pub fn touchings(&self) -> Vec<usize> {
        (0..self.bands.len().saturating_sub(1))
            .filter(|&j| self.bands[j + 1].lo - self.bands[j].hi <= self.touching_tolerance())
            .collect()
    }

    pub fn contains(&self, e: f64, tol: f64) -> bool {
        self.bands.iter().any(|b| b.contains(e, tol))
    }

    pub fn max_band_length(&self) -> f64 {
        self.bands.iter().map(Band::len).fold(0.0, f64::max)
    }

    pub fn total_measure(&self) -> f64 {
        self.bands.iter().map(Band::len).sum()
    }

    /// The spectrum as disjoint closed intervals, touching bands merged.
    pub fn components(&self) -> Vec<Band> {
        let mut out: Vec<Band> = Vec::new();
        for b in &self.bands {
            match out.last_mut() {
                Some(last) if b.lo - last.hi <= self.touching_tolerance() => last.hi = last.hi.max(b.hi),
                _ => out.push(*b),
            }
        }
        out
    }

    /// Checks the structural invariants: `q` ordered bands with disjoint
    /// interiors, the even/odd touching rule, and containment in
    /// `[−2−2|λ|, 2+2|λ|]`.
    pub fn validate(&self) -> Result<()> {
        let q = self.q as usize;
        if self.bands.len() != q {
            return Err(Error::RootCountMismatch { expected: 2 * q, found: 2 * self.bands.len() });
        }
        let tol = self.touching_tolerance();
        for (j, b) in self.bands.iter().enumerate() {
            if !(b.lo <= b.hi) {
                return Err(Error::PreconditionViolated(format!("band {j} is reversed")));
            }
            if j + 1 < q && b.hi > self.bands[j + 1].lo + tol {
                return Err(Error::PreconditionViolated(format!("bands {j} and {} overlap", j + 1)));
            }
        }
        let bound = 2.0 + 2.0 * self.lambda.abs() + tol;
        if self.bands[0].lo < -bound || self.bands[q - 1].hi > bound {
            return Err(Error::PreconditionViolated("band outside [−2−2|λ|, 2+2|λ|]".into()));
        }
        let t = self.touchings();
        if self.lambda != 0.0 {
            if q.is_multiple_of(2) {
                if t.len() != 1 || self.bands[t[0]].hi.abs() > tol || self.bands[t[0] + 1].lo.abs() > tol {
                    return Err(Error::PreconditionViolated(format!("even q needs one touching at 0, got {t:?}")));
                }
            } else if !t.is_empty() {
                return Err(Error::PreconditionViolated(format!("odd q has touching bands {t:?}")));
            }
        }
        Ok(())
    }
}

/// Band edges of `Σ_{λ, p/q}`.
///
/// The edges are the `2q` roots of `Φ(E) = ±(2 + 2|λ|^q)`. Choosing the
/// phase at which `2λ^q cos 2πqθ = ±2|λ|^q`, these equations become
/// `tr A_q(θ) = ±2`, whose roots are the eigenvalues of the periodic
/// (antiperiodic) q×q operator at that phase. Sorting all `2q` of them and
/// pairing neighbours gives the bands; a double root, as at the central
/// touching for even `q`, simply shows up twice.
pub fn band_edges(lambda: f64, p: u64, q: u64) -> Result<BandList> {
    band_edges_with_tolerance(lambda, p, q, DEFAULT_EDGE_TOLERANCE)
}

pub fn band_edges_with_tolerance(lambda: f64, p: u64, q: u64, edge_tolerance: f64) -> Result<BandList> {
    check_fraction(p, q)?;
    if !lambda.is_finite() {
        return Err(Error::InvalidParameter("λ must be finite".into()));
    }
    let half_step = 1.0 / (2.0 * q as f64);
    let (theta_plus, theta_minus) = if lambda_pow(lambda, q) >= 0.0 { (0.0, half_step) } else { (half_step, 0.0) };
    let mut edges = symmetric_eigenvalues(bloch_matrix(lambda, p, q, theta_plus, 1.0));
    edges.extend(symmetric_eigenvalues(bloch_matrix(lambda, p, q, theta_minus, -1.0)));
    if edges.len() != 2 * q as usize || edges.iter().any(|e| !e.is_finite()) {
        return Err(Error::RootCountMismatch { expected: 2 * q as usize, found: edges.len() });
    }
    edges.sort_by(|a, b| a.total_cmp(b));
    let bands = edges.chunks(2).map(|c| Band { lo: c[0], hi: c[1] }).collect();
    Ok(BandList { lambda, p, q, bands, edge_tolerance })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_and_two_band_cases() {
        let b = band_edges(0.7, 0, 1).unwrap();
        assert!((b.bands[0].lo + 3.4).abs() < 1e-14 && (b.bands[0].hi - 3.4).abs() < 1e-14);
        let b = band_edges(1.0, 1, 2).unwrap();
        let r = 2.0 * 2f64.sqrt();
        assert!((b.bands[0].lo + r).abs() < 1e-14 && b.bands[0].hi.abs() < 1e-14);
        assert!(b.bands[1].lo.abs() < 1e-14 && (b.bands[1].hi - r).abs() < 1e-14);
        assert_eq!(b.touchings(), vec![0]);
        b.validate().unwrap();
        assert_eq!(b.components().len(), 1);
    }

    #[test]
    fn third_period_is_three_disjoint_bands() {
        let b = band_edges(0.5, 1, 3).unwrap();
        b.validate().unwrap();
        assert!(b.touchings().is_empty());
    }

    #[test]
    fn negative_coupling_gives_the_same_bands() {
        for &(p, q) in &[(1u64, 3u64), (2, 5), (3, 8)] {
            let a = band_edges(0.8, p, q).unwrap();
            let b = band_edges(-0.8, p, q).unwrap();
            for (x, y) in a.bands.iter().zip(&b.bands) {
                assert!((x.lo - y.lo).abs() < 1e-12 && (x.hi - y.hi).abs() < 1e-12);
            }
        }
    }
}
