use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cocycle::{determinant_p_log, OperatorParams};
use crate::error::{Error, Result};
use crate::localization::a_kr_membership;

/// Minimum separation of the cosines of two nodes.
pub const COINCIDENCE_TOL: f64 = 1e-13;
const GRID: usize = 512;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UniformitySample {
    pub thetas: Vec<f64>,
    /// `(1/k) ln max_{z, j} Π_{ℓ≠j} |z − c_ℓ| / |c_j − c_ℓ|`, `c = cos 2πθ`.
    pub epsilon_measured: f64,
    pub argmax_j: usize,
    pub argmax_z: f64,
}

/// Sorted cosines and the permutation that sorts them.
fn cosines(thetas: &[f64]) -> Result<(Vec<f64>, Vec<usize>)> {
    if thetas.len() < 2 {
        return Err(Error::InvalidParameter("need at least two nodes".into()));
    }
    if thetas.iter().any(|t| !t.is_finite()) {
        return Err(Error::InvalidParameter("non-finite node".into()));
    }
    let c: Vec<f64> = thetas.iter().map(|t| (std::f64::consts::TAU * t.rem_euclid(1.0)).cos()).collect();
    let mut order: Vec<usize> = (0..c.len()).collect();
    order.sort_by(|&a, &b| c[a].total_cmp(&c[b]));
    for w in order.windows(2) {
        if (c[w[1]] - c[w[0]]).abs() <= COINCIDENCE_TOL {
            return Err(Error::CoincidentNodes { i: w[0].min(w[1]), j: w[0].max(w[1]) });
        }
    }
    Ok((order.iter().map(|&i| c[i]).collect(), order))
}

/// `Σ_{ℓ} ln|z − c_ℓ|` over all nodes.
fn log_poly(c: &[f64], z: f64) -> f64 {
    c.iter().map(|cl| (z - cl).abs().ln()).sum()
}

/// Golden-section maximum of a function concave on `[a, b]`.
fn golden_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> (f64, f64) {
    const R: f64 = 0.618_033_988_749_894_8;
    let mut x1 = b - R * (b - a);
    let mut x2 = a + R * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..80 {
        if b - a <= 1e-15 * (1.0 + a.abs().max(b.abs())) {
            break;
        }
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + R * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - R * (b - a);
            f1 = f(x1);
        }
    }
    let mut best = if f1 >= f2 { (x1, f1) } else { (x2, f2) };
    for e in [a, b] {
        let v = f(e);
        if v > best.1 {
            best = (e, v);
        }
    }
    best
}

/// The `ε` for which the nodes are exactly `ε`-uniform.
///
/// For each `j`, `ln Π_{ℓ≠j}|z − c_ℓ|` is concave between consecutive
/// remaining roots, so its maximum over `[−1, 1]` is found by ranking those
/// intervals on a candidate set (endpoints, midpoints of adjacent cosines and
/// a 512-point grid) and refining the best three by golden section.
pub fn uniformity_measure(thetas: &[f64]) -> Result<UniformitySample> {
    // Everything below works on the sorted cosines, so the result depends on
    // the multiset {cos 2πθ_j} only, bit for bit.
    let (c, order) = cosines(thetas)?;
    let k = c.len() - 1;
    let sorted = &c;
    let mut cand: Vec<f64> = vec![-1.0, 1.0];
    cand.extend(sorted.windows(2).map(|w| 0.5 * (w[0] + w[1])));
    cand.extend((0..=GRID).map(|i| -1.0 + 2.0 * i as f64 / GRID as f64));
    cand.retain(|z| !sorted.iter().any(|s| s == z));
    let full: Vec<f64> = cand.iter().map(|&z| log_poly(&c, z)).collect();

    let per_node: Vec<(f64, f64)> = (0..c.len())
        .into_par_iter()
        .map(|j| {
            let denom: f64 = c.iter().enumerate().filter(|&(l, _)| l != j).map(|(_, cl)| (c[j] - cl).abs().ln()).sum();
            let others: Vec<f64> = sorted.iter().enumerate().filter(|&(l, _)| l != j).map(|(_, &s)| s).collect();
            // interval of the remaining roots containing z, as (lo, hi)
            let bracket = |z: f64| -> (f64, f64) {
                let i = others.partition_point(|&s| s < z);
                let lo = if i == 0 { -1.0 } else { others[i - 1].max(-1.0) };
                let hi = if i == others.len() { 1.0 } else { others[i].min(1.0) };
                (lo, hi)
            };
            let mut scored: Vec<(f64, f64)> =
                cand.iter().zip(&full).map(|(&z, &fz)| (fz - (z - c[j]).abs().ln(), z)).collect();
            scored.sort_by(|a, b| b.0.total_cmp(&a.0));
            let f = |z: f64| -> f64 { others.iter().map(|s| (z - s).abs().ln()).sum::<f64>() };
            let mut best = (scored[0].1, scored[0].0);
            let mut done: Vec<(f64, f64)> = Vec::new();
            for &(_, z) in &scored {
                let br = bracket(z);
                if done.contains(&br) {
                    continue;
                }
                done.push(br);
                let (zb, vb) = golden_max(f, br.0, br.1);
                if vb > best.1 {
                    best = (zb, vb);
                }
                if done.len() == 3 {
                    break;
                }
            }
            (best.1 - denom, best.0)
        })
        .collect();
    let (argmax_j, &(log_max, argmax_z)) =
        per_node.iter().enumerate().max_by(|a, b| a.1 .0.total_cmp(&b.1 .0)).expect("at least two nodes");
    Ok(UniformitySample {
        thetas: thetas.to_vec(),
        epsilon_measured: log_max / k as f64,
        argmax_j: order[argmax_j],
        argmax_z,
    })
}

/// Value at `z` of the degree-`k` polynomial through `(c_j, values_j)`.
pub fn lagrange_eval(nodes: &[f64], values: &[f64], z: f64) -> f64 {
    let mut total = 0.0;
    for (j, (&cj, &vj)) in nodes.iter().zip(values).enumerate() {
        let mut w = 1.0;
        for (l, &cl) in nodes.iter().enumerate() {
            if l != j {
                w *= (z - cl) / (cj - cl);
            }
        }
        total += vj * w;
    }
    total
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LagrangeVerdict {
    /// Not every node lies in `A_{k, L−ε}`.
    NotApplicable,
    /// The nodes are not `ε₁`-uniform, as the interpolation argument demands.
    NotUniform,
    /// The nodes are `ε₁`-uniform; consistent only when `ε₁` is below the
    /// required uniformity.
    Uniform,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LagrangeReport {
    pub k: u64,
    pub lyapunov: f64,
    pub epsilon: f64,
    pub epsilon1: f64,
    /// Largest `(1/k) ln|P_k|` over the phase grid, and where.
    pub herman_rate: f64,
    pub herman_theta: f64,
    /// Lower bound on the measured uniformity forced by interpolating `Q_k`
    /// at the Herman phase:
    /// `[ln|P_k(θ₀)| − ln(k+1) − (k+1)(L − ε)] / k`.
    pub epsilon_required: f64,
    pub epsilon_measured: f64,
    /// Largest membership margin deficit; positive means some node is outside.
    pub worst_membership_excess: f64,
    pub verdict: LagrangeVerdict,
    /// Whether `epsilon_measured ≥ epsilon_required`.
    pub consistent: bool,
}

/// The interpolation argument behind non-uniformity of `A_{k, L−ε}`: if all
/// nodes satisfy `|Q_k(cos 2πθ_j)| ≤ e^{(k+1)(L−ε)}`, then interpolating at
/// a phase with `|P_k| ≥ e^{kL}` forces the uniformity measure to be at least
/// `epsilon_required`. The Herman phase is searched on `herman_grid` points.
pub fn lagrange_blowup_check(
    params: &OperatorParams,
    k: u64,
    thetas: &[f64],
    lyapunov: f64,
    epsilon: f64,
    epsilon1: f64,
    herman_grid: usize,
) -> Result<LagrangeReport> {
    params.validate()?;
    if k == 0 || thetas.len() as u64 != k + 1 {
        return Err(Error::InvalidParameter(format!("need k + 1 = {} nodes, got {}", k + 1, thetas.len())));
    }
    let r = lyapunov - epsilon;
    let excess = thetas
        .iter()
        .map(|&t| a_kr_membership(params, k, r, t).map(|m| -m.log_margin))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(f64::NEG_INFINITY, f64::max);
    let sample = uniformity_measure(thetas)?;
    let grid = herman_grid.max(1);
    let (herman_theta, herman_log) = (0..grid)
        .into_par_iter()
        .map(|i| {
            let t = i as f64 / grid as f64;
            (t, determinant_p_log(&params.with_theta(t), k).1)
        })
        .reduce(|| (0.0, f64::NEG_INFINITY), |a, b| if b.1 > a.1 { b } else { a });
    let kf = k as f64;
    let epsilon_required = (herman_log - (kf + 1.0).ln() - (kf + 1.0) * r) / kf;
    let verdict = if excess > 0.0 {
        LagrangeVerdict::NotApplicable
    } else if sample.epsilon_measured >= epsilon1 {
        LagrangeVerdict::NotUniform
    } else {
        LagrangeVerdict::Uniform
    };
    Ok(LagrangeReport {
        k,
        lyapunov,
        epsilon,
        epsilon1,
        herman_rate: herman_log / kf,
        herman_theta,
        epsilon_required,
        epsilon_measured: sample.epsilon_measured,
        worst_membership_excess: excess,
        verdict,
        consistent: verdict == LagrangeVerdict::NotApplicable || sample.epsilon_measured >= epsilon_required - 1e-9,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cocycle::{determinant_p, orbit_point};

    #[test]
    fn chebyshev_nodes_are_nearly_uniform() {
        let q = 32;
        let nodes: Vec<f64> = (0..q).map(|j| (j as f64 + 0.5) / (2.0 * q as f64)).collect();
        let s = uniformity_measure(&nodes).unwrap();
        // Lebesgue-type growth: at most logarithmic in k
        assert!(s.epsilon_measured < 0.15, "{}", s.epsilon_measured);
        let mut close = nodes.clone();
        close[5] = close[4] + 1e-9;
        assert!(uniformity_measure(&close).unwrap().epsilon_measured > s.epsilon_measured + 0.3);
    }

    #[test]
    fn depends_only_on_the_cosines() {
        let nodes = [0.03, 0.17, 0.29, 0.41, 0.11];
        let a = uniformity_measure(&nodes).unwrap().epsilon_measured;
        let mut permuted = nodes.to_vec();
        permuted.reverse();
        assert_eq!(uniformity_measure(&permuted).unwrap().epsilon_measured, a);
        // θ ↦ 1 − θ gives the same cosines up to rounding of the argument
        let reflected: Vec<f64> = nodes.iter().map(|t| -t).collect();
        let shifted: Vec<f64> = nodes.iter().map(|t| t + 3.5).collect();
        assert!((uniformity_measure(&reflected).unwrap().epsilon_measured - a).abs() < 1e-12);
        // θ ↦ θ + 1/2 negates every cosine, and z ↦ −z preserves the measure
        assert!((uniformity_measure(&shifted).unwrap().epsilon_measured - a).abs() < 1e-12);
    }

    #[test]
    fn brute_force_oracle() {
        let nodes = [0.02, 0.13, 0.19, 0.33, 0.45, 0.07];
        let c: Vec<f64> = nodes.iter().map(|t| (std::f64::consts::TAU * t).cos()).collect();
        let mut best = f64::NEG_INFINITY;
        for i in 0..=200_000 {
            let z = -1.0 + 2.0 * i as f64 / 200_000.0;
            for j in 0..c.len() {
                let mut p = 1.0;
                for l in 0..c.len() {
                    if l != j {
                        p *= (z - c[l]).abs() / (c[j] - c[l]).abs();
                    }
                }
                best = best.max(p);
            }
        }
        let want = best.ln() / 5.0;
        let got = uniformity_measure(&nodes).unwrap().epsilon_measured;
        assert!(got >= want - 1e-12 && got - want < 1e-6, "{got} {want}");
    }

    #[test]
    fn coincident_cosines_are_rejected() {
        assert!(matches!(uniformity_measure(&[0.1, 0.3, -0.1]), Err(Error::CoincidentNodes { i: 0, j: 2 })));
        assert!(matches!(uniformity_measure(&[0.1, 0.6 - 0.5]), Err(Error::CoincidentNodes { .. })));
    }

    #[test]
    fn linear_interpolation_is_exact() {
        // Q_1(z) = E − 2λz
        let p = OperatorParams::new(1.7, crate::GOLDEN, 0.0, 0.4).unwrap();
        let t = [0.11, 0.37];
        let nodes: Vec<f64> = t.iter().map(|x| (std::f64::consts::TAU * x).cos()).collect();
        let vals: Vec<f64> = t.iter().map(|&x| determinant_p(&p.with_theta(x), 1)).collect();
        for z in [-1.0, -0.3, 0.5, 1.0] {
            assert!((lagrange_eval(&nodes, &vals, z) - (0.4 - 3.4 * z)).abs() < 1e-14);
        }
    }

    #[test]
    fn interpolation_forces_non_uniformity() {
        let (lambda, k, eps) = (2.0f64, 40u64, 0.2);
        let l = lambda.ln();
        let base = OperatorParams::new(lambda, crate::GOLDEN, 0.0, 0.0).unwrap();
        // an energy in the spectrum: an eigenvalue of a long box
        let op = crate::localization::TruncatedOperator::new(&base, 0, 399).unwrap();
        let e = crate::localization::eigen_tridiagonal(&op, &[]).unwrap().eigenvalues[200];
        let p = base.with_energy(e);
        // θ_x = xα + (k−1)α/2, so that Q_k(cos 2πθ_x) = P_k(xα)
        let shift = (k as f64 - 1.0) * crate::GOLDEN / 2.0;
        let members: Vec<f64> = (0..20_000i64)
            .map(|x| orbit_point(shift, crate::GOLDEN, x))
            .filter(|&t| a_kr_membership(&p, k, l - eps, t).unwrap().member)
            .take(k as usize + 1)
            .collect();
        assert_eq!(members.len(), k as usize + 1);
        let r = lagrange_blowup_check(&p, k, &members, l, eps, eps - 0.1, 1024).unwrap();
        assert_ne!(r.verdict, LagrangeVerdict::NotApplicable);
        assert!(r.consistent, "{r:?}");
        assert!(r.herman_rate >= l - 0.05);
        assert!(r.epsilon_measured >= eps - 0.1, "{r:?}");

        let outside = [0.0, 0.5];
        let v = lagrange_blowup_check(&p, 1, &outside, l, 2.0, 0.1, 64).unwrap();
        assert_eq!(v.verdict, LagrangeVerdict::NotApplicable);
    }
}
