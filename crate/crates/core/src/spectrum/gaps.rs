use serde::{Deserialize, Serialize};

use super::bands::{band_edges, BandList};
use crate::arithmetic::{torus_norm, ContinuedFractionExpansion};
use crate::error::{Error, Result};

/// A bounded gap `(a, b)` between band `j` and band `j+1`, on which the
/// integrated density of states equals `j/q`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Gap {
    pub index: usize,
    pub a: f64,
    pub b: f64,
    pub size: f64,
    pub ids_num: u64,
    pub ids_den: u64,
    /// `k` with `j/q ≈ kα mod 1`, when a target frequency was given.
    pub label_k: Option<i64>,
    pub label_dist: Option<f64>,
}

/// `argmin_{|k| ≤ q/2} ‖x − kα‖`, ties to the smaller `|k|`.
pub fn nearest_label(x: f64, alpha: f64, q: u64) -> (i64, f64) {
    let kmax = (q / 2) as i64;
    let mut best = (0i64, torus_norm(x));
    for k in 1..=kmax {
        for kk in [k, -k] {
            let d = torus_norm(x - crate::cocycle::orbit_point(0.0, alpha, kk));
            if d < best.1 {
                best = (kk, d);
            }
        }
    }
    best
}

/// All bounded gaps of the band list; touchings are not gaps.
pub fn gap_catalog(bands: &BandList, alpha_target: Option<f64>) -> Vec<Gap> {
    let tol = bands.touching_tolerance();
    let q = bands.q;
    (0..bands.bands.len().saturating_sub(1))
        .filter_map(|j| {
            let a = bands.bands[j].hi;
            let b = bands.bands[j + 1].lo;
            let size = b - a;
            if size <= tol {
                return None;
            }
            let ids_num = j as u64 + 1;
            let (label_k, label_dist) = match alpha_target {
                Some(alpha) => {
                    let (k, d) = nearest_label(ids_num as f64 / q as f64, alpha, q);
                    (Some(k), Some(d))
                }
                None => (None, None),
            };
            Some(Gap { index: j, a, b, size, ids_num, ids_den: q, label_k, label_dist })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapBoundRow {
    pub n: usize,
    pub p: u64,
    pub q: u64,
    /// `None` when there is no bounded gap (q = 1).
    pub min_gap: Option<f64>,
    /// `e^{−εq} λ^{q/2}`.
    pub bound: f64,
    /// `ln(min_gap) − ln(bound)`; positive means the bound holds.
    pub log_margin: Option<f64>,
    pub pass: bool,
}

/// Smallest bounded gap of `Σ_{λ, p_n/q_n}` against `e^{−εq_n} λ^{q_n/2}` for
/// each `n` in the range.
pub fn gap_bound_check(
    lambda: f64,
    cf: &ContinuedFractionExpansion,
    n_range: std::ops::Range<usize>,
    epsilon: f64,
) -> Result<Vec<GapBoundRow>> {
    if !(lambda > 0.0 && lambda <= 1.0) {
        return Err(Error::InvalidParameter("the gap bound needs 0 < λ ≤ 1".into()));
    }
    let conv = cf.convergents_i64();
    let mut rows = Vec::new();
    for n in n_range {
        let &(p, q) = conv.get(n).ok_or_else(|| Error::InvalidParameter(format!("convergent {n} not available")))?;
        let p = p.rem_euclid(q as i64) as u64;
        let bands = band_edges(lambda, p, q)?;
        let min_gap = gap_catalog(&bands, None).iter().map(|g| g.size).reduce(f64::min);
        let log_bound = -epsilon * q as f64 + 0.5 * q as f64 * lambda.ln();
        let log_margin = min_gap.map(|g| g.ln() - log_bound);
        rows.push(GapBoundRow {
            n,
            p,
            q,
            min_gap,
            bound: log_bound.exp(),
            log_margin,
            pass: log_margin.is_none_or(|m| m >= 0.0),
        });
    }
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CeyReport {
    /// `m` with `q = 2m+1` or `q = 2m+2`.
    pub m: u64,
    pub points: Vec<f64>,
    /// `ln ∏_{j≠i} |a_j − a_i|` for each `i`.
    pub log_products: Vec<f64>,
    /// `m ln λ`.
    pub log_bound: f64,
    /// `min_i log_products[i] − log_bound`.
    pub min_log_ratio: f64,
    pub midpoints_pass: bool,
    pub used_fallback: bool,
    pub pass: bool,
}

fn log_products(points: &[f64]) -> Vec<f64> {
    (0..points.len())
        .map(|i| (0..points.len()).filter(|&j| j != i).map(|j| (points[j] - points[i]).abs().ln()).sum())
        .collect()
}

fn min_ratio(points: &[f64], log_bound: f64) -> f64 {
    log_products(points).into_iter().fold(f64::INFINITY, f64::min) - log_bound
}

/// Product condition `∏_{j≠i} |a_j − a_i| ≥ λ^m` with one point per band.
/// Midpoints are tried first; if they fail, coordinate search over eight
/// Chebyshev points per band looks for an admissible choice.
pub fn cey_product_check(bands: &BandList) -> Result<CeyReport> {
    let lambda = bands.lambda.abs();
    if !(lambda > 0.0 && lambda <= 1.0) {
        return Err(Error::InvalidParameter("the product check needs 0 < |λ| ≤ 1".into()));
    }
    let q = bands.q;
    let m = (q - 1) / 2;
    let log_bound = m as f64 * lambda.ln();
    let mut points: Vec<f64> = bands.bands.iter().map(|b| b.midpoint()).collect();
    let mid_ratio = min_ratio(&points, log_bound);
    let midpoints_pass = mid_ratio >= 0.0;
    let mut best = mid_ratio;
    let mut used_fallback = false;
    if !midpoints_pass {
        used_fallback = true;
        const N: usize = 8;
        for _sweep in 0..4 {
            let mut improved = false;
            for i in 0..points.len() {
                let b = bands.bands[i];
                for l in 0..N {
                    let c = (std::f64::consts::PI * (2 * l + 1) as f64 / (2 * N) as f64).cos();
                    let old = points[i];
                    points[i] = b.midpoint() + 0.5 * b.len() * c;
                    let r = min_ratio(&points, log_bound);
                    if r > best {
                        best = r;
                        improved = true;
                    } else {
                        points[i] = old;
                    }
                }
            }
            if !improved || best >= 0.0 {
                break;
            }
        }
    }
    Ok(CeyReport {
        m,
        log_products: log_products(&points),
        points,
        log_bound,
        min_log_ratio: best,
        midpoints_pass,
        used_fallback,
        pass: best >= 0.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn touching_is_not_a_gap() {
        let b = band_edges(1.0, 1, 2).unwrap();
        assert!(gap_catalog(&b, None).is_empty());
        let b = band_edges(0.5, 1, 3).unwrap();
        let g = gap_catalog(&b, Some(crate::GOLDEN));
        assert_eq!(g.len(), 2);
        assert!(g.iter().all(|g| g.size > 0.0 && g.a < g.b));
    }

    #[test]
    fn cey_small_cases() {
        let r = cey_product_check(&band_edges(1.0, 1, 2).unwrap()).unwrap();
        assert_eq!(r.m, 0);
        assert!((r.log_products[0] - (2.0 * 2f64.sqrt()).ln()).abs() < 1e-12);
        assert!(r.pass);
        let r = cey_product_check(&band_edges(0.5, 0, 1).unwrap()).unwrap();
        assert_eq!(r.log_products, vec![0.0]);
        assert!(r.pass);
        let r = cey_product_check(&band_edges(0.5, 1, 3).unwrap()).unwrap();
        assert!(r.pass);
    }

    #[test]
    fn labels_of_the_five_eighths_approximant() {
        let b = band_edges(0.5, 5, 8).unwrap();
        for g in gap_catalog(&b, Some(crate::GOLDEN)) {
            let (k, d) = (g.label_k.unwrap(), g.label_dist.unwrap());
            // j/8 = 5k/8 mod 1 exactly for the approximant itself.
            assert_eq!((5 * k).rem_euclid(8) as u64, g.ids_num, "{g:?}");
            assert!(d < 1.0 / 16.0);
        }
    }
}
