//! Aubry duality: the Fourier transform of a localized eigenvector of
//! `H_{λ,α,θ}` gives a Bloch-type solution of the dual cocycle
//! `S_{1/λ, E/λ} · W(x) = e^{2πiθ} W(x + α)`, and the spectra satisfy
//! `Σ_λ = λ Σ_{1/λ}`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arithmetic::torus_norm;
use crate::cocycle::OperatorParams;
use crate::error::{Error, Result};
use crate::fourier::FourierSeries;
use crate::localization::{decay_rate, CenterPolicy};
use crate::spectrum::band_edges;

/// Retained mass outside the kept support may not exceed this.
pub const TAIL_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DualPair {
    /// Normalized eigenvector on sites `first_site ..`.
    pub u: Vec<f64>,
    pub first_site: i64,
    /// `U(x) = Σ u_n e^{2πinx}` over the retained sites.
    pub u_series: FourierSeries,
    pub theta: f64,
    pub energy: f64,
    pub lambda: f64,
    pub alpha: f64,
    /// Squared mass of `u` outside the retained sites.
    pub tail_mass: f64,
    pub retained: (i64, i64),
    /// Fitted decay slope of `|u_n|`, when a fit was possible.
    pub slope: Option<f64>,
}

impl DualPair {
    pub fn u_at(&self, x: f64) -> Complex64 {
        self.u_series.eval(x)
    }

    /// `W(x) = (U(x) e^{2πiθ}, U(x − α))`.
    pub fn w(&self, x: f64) -> [Complex64; 2] {
        let phase = Complex64::from_polar(1.0, std::f64::consts::TAU * self.theta);
        [self.u_at(x) * phase, self.u_at(x - self.alpha)]
    }
}

/// Builds `U` from the eigenvector `u` of `H_{λ,α,θ}` at energy `E`, given
/// on sites `first_site, first_site + 1, ...` in absolute numbering, keeping
/// the sites within `k` of the peak.
pub fn build_dual(
    u: &[f64],
    first_site: i64,
    theta: f64,
    lambda: f64,
    alpha: f64,
    energy: f64,
    k: usize,
) -> Result<DualPair> {
    OperatorParams::new(lambda, alpha, theta, energy)?;
    if lambda <= 1.0 {
        return Err(Error::PreconditionViolated(format!("λ = {lambda} must exceed 1")));
    }
    let norm = u.iter().map(|v| v * v).sum::<f64>().sqrt();
    if u.is_empty() || norm == 0.0 || !norm.is_finite() {
        return Err(Error::InvalidParameter("eigenvector must be non-zero and finite".into()));
    }
    let u: Vec<f64> = u.iter().map(|v| v / norm).collect();
    let peak = (0..u.len()).max_by(|&a, &b| u[a].abs().total_cmp(&u[b].abs())).unwrap_or(0);
    let lo = peak.saturating_sub(k);
    let hi = (peak + k).min(u.len() - 1);
    let tail_mass: f64 = u[..lo].iter().chain(&u[hi + 1..]).map(|v| v * v).sum();
    let slope = match decay_rate(&u, CenterPolicy::Fixed(peak)) {
        Ok(f) => Some(f.slope),
        Err(Error::NoDecayDetected { .. }) => None,
        Err(_) if u.len() < 3 => None,
        Err(e) => return Err(e),
    };
    if tail_mass > TAIL_TOLERANCE || slope.is_some_and(|s| s > -0.5 * lambda.ln()) {
        return Err(Error::InsufficientDecay { slope: slope.unwrap_or(0.0) });
    }
    let retained = (first_site + lo as i64, first_site + hi as i64);
    let k_max = retained.0.unsigned_abs().max(retained.1.unsigned_abs()) as usize;
    let mut u_series = FourierSeries::zeros(k_max);
    for (i, &v) in u.iter().enumerate().take(hi + 1).skip(lo) {
        u_series.set(first_site + i as i64, Complex64::new(v, 0.0));
    }
    Ok(DualPair { u, first_site, u_series, theta, energy, lambda, alpha, tail_mass, retained, slope })
}

fn grid(n: usize) -> Vec<f64> {
    (0..n.max(1)).map(|i| i as f64 / n.max(1) as f64).collect()
}

/// `sup_x |S_{1/λ,E/λ}(x) W(x) − e^{2πiθ} W(x + α)| / sup_x |W(x)|` over
/// a uniform grid.
pub fn duality_residual(pair: &DualPair, grid_size: usize) -> f64 {
    let dual =
        OperatorParams { lambda: 1.0 / pair.lambda, alpha: pair.alpha, theta: 0.0, energy: pair.energy / pair.lambda };
    let phase = Complex64::from_polar(1.0, std::f64::consts::TAU * pair.theta);
    let (defect, size) = grid(grid_size)
        .par_iter()
        .map(|&x| {
            let w = pair.w(x);
            let s = dual.step(x);
            let lhs = [w[0] * s[0][0] + w[1] * s[0][1], w[0] * s[1][0] + w[1] * s[1][1]];
            let wn = pair.w(x + pair.alpha);
            let d = ((lhs[0] - phase * wn[0]).norm_sqr() + (lhs[1] - phase * wn[1]).norm_sqr()).sqrt();
            (d, (w[0].norm_sqr() + w[1].norm_sqr()).sqrt())
        })
        .reduce(|| (0.0, 0.0), |a, b| (a.0.max(b.0), a.1.max(b.1)));
    defect / size.max(f64::MIN_POSITIVE)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetReport {
    /// Median of `Im det M(x)`.
    pub c: f64,
    /// Largest `|Im det M(x) − c|`.
    pub variation: f64,
    /// Largest `|Re det M(x)|`.
    pub real_part_max: f64,
    pub det_max: f64,
    /// `+1` for `c > 0` (rotation by θ), `−1` for `c < 0`, `0` when degenerate.
    pub sign: i8,
    /// `|c| ≤ 1e-8 sup|W|²`.
    pub degenerate: bool,
    /// For degenerate `c`: the best `2θ ≈ kα + l` with `|k| ≤ 50`.
    pub resonance_fit: Option<(i64, i64, f64)>,
}

/// `det M(x)` for `M = [W, conj W]`, which is `2i Im(W₀ conj W₁)` and
/// constant in `x`.
pub fn det_m_constancy(pair: &DualPair, grid_size: usize) -> DetReport {
    let (dets, w2): (Vec<Complex64>, Vec<f64>) = grid(grid_size)
        .par_iter()
        .map(|&x| {
            let w = pair.w(x);
            (w[0] * w[1].conj() - w[0].conj() * w[1], w[0].norm_sqr() + w[1].norm_sqr())
        })
        .unzip();
    let w_max2 = w2.iter().copied().fold(0.0, f64::max);
    let mut ims: Vec<f64> = dets.iter().map(|d| d.im).collect();
    ims.sort_by(|a, b| a.total_cmp(b));
    let c = ims[ims.len() / 2];
    let variation = ims.iter().map(|v| (v - c).abs()).fold(0.0, f64::max);
    let real_part_max = dets.iter().map(|d| d.re.abs()).fold(0.0, f64::max);
    let det_max = dets.iter().map(|d| d.norm()).fold(0.0, f64::max);
    // |det M| ≤ |W|², so |W|² is the scale against which c counts as zero
    let degenerate = c.abs() <= 1e-8 * w_max2;
    let resonance_fit = degenerate.then(|| resonance_fit(pair.theta, pair.alpha, 50));
    DetReport {
        c,
        variation,
        real_part_max,
        det_max,
        sign: if degenerate {
            0
        } else if c > 0.0 {
            1
        } else {
            -1
        },
        degenerate,
        resonance_fit,
    }
}

/// `(k, l, |2θ − kα − l|)` minimizing the distance over `|k| ≤ k_max`.
pub fn resonance_fit(theta: f64, alpha: f64, k_max: i64) -> (i64, i64, f64) {
    (-k_max..=k_max)
        .map(|k| {
            let y = 2.0 * theta - k as f64 * alpha;
            (k, y.round() as i64, torus_norm(y))
        })
        .min_by(|a, b| a.2.total_cmp(&b.2).then(a.0.abs().cmp(&b.0.abs())))
        .expect("non-empty range")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DualityReport {
    pub lambda: f64,
    #[serde(rename = "E")]
    pub energy: f64,
    pub theta: f64,
    pub residual: f64,
    pub c: f64,
    pub variation: f64,
    pub sign: i8,
    pub degenerate_flag: bool,
}

pub fn duality_report(pair: &DualPair, grid_size: usize) -> DualityReport {
    let d = det_m_constancy(pair, grid_size);
    DualityReport {
        lambda: pair.lambda,
        energy: pair.energy,
        theta: pair.theta,
        residual: duality_residual(pair, grid_size),
        c: d.c,
        variation: d.variation,
        sign: d.sign,
        degenerate_flag: d.degenerate,
    }
}

/// Hausdorff distance between two finite unions of closed intervals.
pub fn hausdorff_intervals(a: &[(f64, f64)], b: &[(f64, f64)]) -> f64 {
    fn dist(x: f64, set: &[(f64, f64)]) -> f64 {
        set.iter()
            .map(|&(lo, hi)| {
                if x < lo {
                    lo - x
                } else if x > hi {
                    x - hi
                } else {
                    0.0
                }
            })
            .fold(f64::INFINITY, f64::min)
    }
    // sup over `from` of the distance to `to`: attained at an endpoint of
    // `from` or at the midpoint of a gap of `to` lying inside `from`
    fn one_sided(from: &[(f64, f64)], to: &[(f64, f64)]) -> f64 {
        let mut sorted = to.to_vec();
        sorted.sort_by(|x, y| x.0.total_cmp(&y.0));
        let mids: Vec<f64> = sorted.windows(2).map(|w| 0.5 * (w[0].1 + w[1].0)).collect();
        let mut worst = 0.0f64;
        for &(lo, hi) in from {
            worst = worst.max(dist(lo, to)).max(dist(hi, to));
            for &m in &mids {
                if lo <= m && m <= hi {
                    worst = worst.max(dist(m, to));
                }
            }
        }
        worst
    }
    if a.is_empty() || b.is_empty() {
        return if a.is_empty() && b.is_empty() { 0.0 } else { f64::INFINITY };
    }
    one_sided(a, b).max(one_sided(b, a))
}

/// Hausdorff distance between `Σ_{λ,p/q}` and `λ Σ_{1/λ,p/q}`.
pub fn spectra_duality_check(lambda: f64, p: u64, q: u64) -> Result<f64> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::InvalidParameter(format!("λ = {lambda} must be positive")));
    }
    let a = band_edges(lambda, p, q)?;
    let b = band_edges(1.0 / lambda, p, q)?;
    let ia: Vec<(f64, f64)> = a.bands.iter().map(|b| (b.lo, b.hi)).collect();
    let ib: Vec<(f64, f64)> = b.bands.iter().map(|b| (lambda * b.lo, lambda * b.hi)).collect();
    Ok(hausdorff_intervals(&ia, &ib))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::localization::{eigen_tridiagonal, TruncatedOperator};

    #[test]
    fn delta_eigenvector() {
        let theta = 0.13;
        let pair = build_dual(&[1.0], 0, theta, 3.0, crate::GOLDEN, 0.0, 10).unwrap();
        for x in [0.0, 0.3, 0.77] {
            let w = pair.w(x);
            assert!((w[0] - Complex64::from_polar(1.0, std::f64::consts::TAU * theta)).norm() < 1e-15);
            assert!((w[1] - 1.0).norm() < 1e-15);
        }
        let d = det_m_constancy(&pair, 64);
        assert!((d.c - 2.0 * (std::f64::consts::TAU * theta).sin()).abs() < 1e-15);
        assert!(d.variation < 1e-15 && d.sign == 1);
    }

    #[test]
    fn two_point_series() {
        let u = [0.3, 1.0, 0.3];
        let pair = build_dual(&u, -1, 0.2, 2.0, crate::GOLDEN, 0.0, 5).unwrap();
        let n = (0.09f64 + 1.0 + 0.09).sqrt();
        for x in [0.0, 0.1, 0.45] {
            let want = (1.0 + 0.6 * (std::f64::consts::TAU * x).cos()) / n;
            assert!((pair.u_at(x) - want).norm() < 1e-14);
            // real coefficients: U(−x) = conj U(x)
            assert!((pair.u_at(-x) - pair.u_at(x).conj()).norm() < 1e-15);
        }
    }

    #[test]
    fn degenerate_phase_is_flagged() {
        let pair = build_dual(&[1.0], 0, 0.5, 3.0, crate::GOLDEN, 0.0, 10).unwrap();
        let d = det_m_constancy(&pair, 64);
        assert!(d.degenerate);
        assert_eq!(d.resonance_fit.map(|f| (f.0, f.1)), Some((0, 1)));
    }

    fn box_state(box_half: i64, index_from_middle: i64) -> (Vec<f64>, f64, i64) {
        let p = OperatorParams::new(3.0, crate::GOLDEN, 0.1, 0.0).unwrap();
        let op = TruncatedOperator::new(&p, -box_half, box_half - 1).unwrap();
        let n = op.dim() as i64;
        // the state whose peak is nearest the middle among a few mid-spectrum ones
        let cands: Vec<usize> = (0..20).map(|j| (n / 2 + index_from_middle + j) as usize).collect();
        let r = eigen_tridiagonal(&op, &cands).unwrap();
        let best = r
            .pairs
            .iter()
            .min_by_key(|pr| {
                let c =
                    (0..pr.vector.len()).max_by(|&a, &b| pr.vector[a].abs().total_cmp(&pr.vector[b].abs())).unwrap();
                (c as i64 - box_half).abs()
            })
            .unwrap();
        (best.vector.clone(), best.value, -box_half)
    }

    #[test]
    fn localized_state_satisfies_the_dual_relation() {
        let (u, e, first) = box_state(750, 0);
        let pair = build_dual(&u, first, 0.1, 3.0, crate::GOLDEN, e, 400).unwrap();
        assert!(pair.tail_mass < 1e-8);
        let r = duality_residual(&pair, 256);
        assert!(r < 1e-4, "{r}");
        let d = det_m_constancy(&pair, 256);
        assert!(d.variation <= 1e-3 * d.c.abs(), "{d:?}");
        assert!(d.real_part_max <= 1e-8 * d.det_max);

        // a vector that is not an eigenvector
        let mut bad = vec![0.0; 21];
        for (i, v) in bad.iter_mut().enumerate() {
            *v = ((i * 7919) % 13) as f64 / 13.0 - 0.4;
        }
        let pair = build_dual(&bad, -10, 0.1, 3.0, crate::GOLDEN, e, 50).unwrap();
        assert!(duality_residual(&pair, 256) > 0.1);
    }

    #[test]
    fn slow_decay_is_rejected() {
        let u: Vec<f64> = (-500i64..500).map(|n| (-0.01 * n.abs() as f64).exp()).collect();
        assert!(matches!(
            build_dual(&u, -500, 0.1, 3.0, crate::GOLDEN, 0.0, 400),
            Err(Error::InsufficientDecay { .. })
        ));
        assert!(build_dual(&[1.0], 0, 0.1, 0.5, crate::GOLDEN, 0.0, 10).is_err());
    }

    #[test]
    fn hausdorff_of_intervals() {
        assert_eq!(hausdorff_intervals(&[(0.0, 1.0)], &[(0.0, 1.0)]), 0.0);
        assert!((hausdorff_intervals(&[(0.0, 1.0)], &[(0.0, 0.4), (0.6, 1.0)]) - 0.1).abs() < 1e-15);
        assert!((hausdorff_intervals(&[(0.0, 1.0)], &[(0.0, 1.5)]) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn spectra_are_dual() {
        assert!(spectra_duality_check(2.0, 1, 2).unwrap() <= 1e-8);
        assert_eq!(spectra_duality_check(1.0, 2, 5).unwrap(), 0.0);
        for (p, q) in [(1u64, 1u64), (1, 2), (2, 3), (3, 5), (5, 8), (8, 13)] {
            assert!(spectra_duality_check(3.0, p, q).unwrap() <= 1e-8);
        }
    }
}
