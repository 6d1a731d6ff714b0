//! Finite census of the phase condition `|sin 2π(θ + (k/2)α)| < k^{-2}`.
//!
//! Whether θ lies in the exceptional set (the condition holding for
//! infinitely many `k`) is not decided here; the scan only lists witnesses
//! up to `k_max` and checks the second branch of the set, phases of the form
//! `sα/2 mod 1`, under both readings of that branch.

use serde::{Deserialize, Serialize};

use super::expansion::torus_norm;

/// Absolute tolerance on the torus distance for the second-branch match.
pub const SECOND_BRANCH_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThetaWitness {
    pub k: u64,
    pub sine: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThetaScan {
    pub theta: f64,
    pub alpha: f64,
    pub k_max: u64,
    pub witnesses: Vec<ThetaWitness>,
    /// `s` with `θ ≡ sα/2 (mod 1)` within tolerance, smallest `|s|` first.
    pub half_multiple: Option<i64>,
    /// `s` with `θ ≡ sπα/2 (mod 1)`, the literal reading of the set.
    pub pi_multiple: Option<i64>,
}

/// `frac(θ + k·c)` with the product's rounding error folded back in.
fn shifted_phase(theta: f64, k: f64, c: f64) -> f64 {
    let prod = k * c;
    let err = k.mul_add(c, -prod);
    let r = prod - prod.floor();
    let t = theta - theta.floor();
    let s = r + t + err;
    s - s.floor()
}

fn second_branch(theta: f64, step: f64, s_max: i64) -> Option<i64> {
    (0..=s_max).flat_map(|s| if s == 0 { vec![0] } else { vec![s, -s] }).find(|&s| {
        let phase = shifted_phase(0.0, s as f64, step);
        torus_norm(theta - phase) <= SECOND_BRANCH_TOL
    })
}

pub fn theta_membership_scan(theta: f64, alpha: f64, k_max: u64) -> ThetaScan {
    let half = alpha / 2.0;
    let witnesses = (1..=k_max)
        .filter_map(|k| {
            let kf = k as f64;
            let phase = shifted_phase(theta, kf, half);
            let sine = (std::f64::consts::TAU * phase).sin().abs();
            (sine < 1.0 / (kf * kf)).then_some(ThetaWitness { k, sine })
        })
        .collect();
    let s_max = k_max.min(1_000_000) as i64;
    ThetaScan {
        theta,
        alpha,
        k_max,
        witnesses,
        half_multiple: second_branch(theta, half, s_max),
        pi_multiple: second_branch(theta, std::f64::consts::PI * half, s_max),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arithmetic::{ContinuedFractionExpansion, RealInput};
    use crate::GOLDEN;

    #[test]
    fn zero_phase_golden_has_no_witnesses() {
        // k = 1 passes trivially (any |sin| < 1); nothing else up to 10^5.
        let scan = theta_membership_scan(0.0, GOLDEN, 100_000);
        let ks: Vec<u64> = scan.witnesses.iter().map(|w| w.k).collect();
        assert_eq!(ks, vec![1]);
        assert_eq!(scan.half_multiple, Some(0));
    }

    #[test]
    fn half_alpha_hits_second_branch() {
        let scan = theta_membership_scan(GOLDEN / 2.0, GOLDEN, 100);
        assert_eq!(scan.half_multiple, Some(1));
        let scan = theta_membership_scan(0.3, GOLDEN, 100);
        assert_eq!(scan.half_multiple, None);
    }

    #[test]
    fn liouville_like_frequency_produces_witnesses_at_denominators() {
        // a_{n+1} = q_n^3: q = 1, 2, 18, ...
        let mut terms = vec![2u64];
        let mut q = (1u64, 2u64);
        while q.1 < 1_000 {
            let a = q.1.pow(3);
            terms.push(a);
            q = (q.1, a * q.1 + q.0);
        }
        let x = RealInput::from_terms(0, &terms);
        let cf = ContinuedFractionExpansion::expand(&x, 10, 256).unwrap();
        let alpha = cf.value_f64();
        let qs = cf.denominators_u64();
        let scan = theta_membership_scan(0.0, alpha, 2_000);
        let ks: Vec<u64> = scan.witnesses.iter().map(|w| w.k).collect();
        for &qn in qs.iter().filter(|&&q| q > 2 && q <= 2_000) {
            assert!(ks.contains(&qn), "q_n = {qn} missing from {ks:?}");
        }
    }
}
