use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::green::boundary_green_logs;
use super::operator::TruncatedOperator;
use crate::cocycle::{determinant_p_log, OperatorParams};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Regularity {
    Regular,
    Singular,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegularityReport {
    pub y: i64,
    pub k: u64,
    pub m: f64,
    pub witness_interval: Option<(i64, i64)>,
    pub windows_scanned: usize,
    pub classification: Regularity,
}

/// `(m, k)`-regularity of the site `y` at `params.energy`: some window
/// `[x1, x1 + k − 1] ∋ y` with both ends at distance at least `k/40` from `y`
/// has `|G(y, x_i)| < e^{−m|y − x_i|}`. Window starts are scanned exhaustively
/// up to `k = 500` and with stride `⌈k/100⌉` above.
pub fn regularity_classify(params: &OperatorParams, y: i64, k: u64, m: f64) -> Result<RegularityReport> {
    params.validate()?;
    if k < 40 {
        return Err(Error::PreconditionViolated(format!("k = {k} < 40")));
    }
    if !m.is_finite() {
        return Err(Error::InvalidParameter("m must be finite".into()));
    }
    let ki = k as i64;
    let margin = (k.div_ceil(40)) as i64;
    let lo = y - (ki - 1) + margin;
    let hi = y - margin;
    let stride = if k <= 500 { 1 } else { k.div_ceil(100) } as usize;
    let starts: Vec<i64> = (lo..=hi).step_by(stride).collect();
    let passing: Vec<Option<(i64, i64)>> = starts
        .par_iter()
        .map(|&x1| {
            let x2 = x1 + ki - 1;
            let op = TruncatedOperator::new(params, x1, x2).ok()?;
            let (g1, g2) = boundary_green_logs(&op, params.energy, y);
            let ok1 = g1 < -m * (y - x1) as f64;
            let ok2 = g2 < -m * (x2 - y) as f64;
            (ok1 && ok2).then_some((x1, x2))
        })
        .collect();
    let witness = passing.into_iter().flatten().next();
    Ok(RegularityReport {
        y,
        k,
        m,
        witness_interval: witness,
        windows_scanned: starts.len(),
        classification: if witness.is_some() { Regularity::Regular } else { Regularity::Singular },
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MembershipReport {
    pub member: bool,
    /// `(k + 1) r − ln|Q_k(cos 2πθ)|`; non-negative for members.
    pub log_margin: f64,
    pub log_q: f64,
}

/// Membership of `theta` in `A_{k,r} = {θ : |Q_k(cos 2πθ)| ≤ e^{(k+1) r}}`,
/// where `Q_k(cos 2πθ) = P_k(θ − (k − 1)α/2)`.
pub fn a_kr_membership(params: &OperatorParams, k: u64, r: f64, theta: f64) -> Result<MembershipReport> {
    params.validate()?;
    let shift = theta - (k as f64 - 1.0) * params.alpha / 2.0;
    let (_, log_q) = determinant_p_log(&params.with_theta(shift.rem_euclid(1.0)), k);
    let log_margin = (k as f64 + 1.0) * r - log_q;
    Ok(MembershipReport { member: r == f64::INFINITY || log_margin >= 0.0, log_margin, log_q })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneralizedBound {
    pub holds: bool,
    /// Smallest `C` for which the bound holds on the given sites.
    pub required_c: f64,
}

/// `|Ψ(x)| ≤ C(1 + |x|)` over the given sites.
pub fn generalized_bound_check(sites: &[i64], psi: &[f64], c: f64) -> Result<GeneralizedBound> {
    if sites.len() != psi.len() {
        return Err(Error::InvalidParameter("sites and values differ in length".into()));
    }
    let required_c =
        sites.iter().zip(psi).map(|(&x, v)| v.abs() / (1.0 + x.unsigned_abs() as f64)).fold(0.0f64, f64::max);
    Ok(GeneralizedBound { holds: required_c <= c, required_c })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::localization::eigen_tridiagonal;

    #[test]
    fn box_state_is_regular_away_from_its_center_and_singular_at_it() {
        let p = OperatorParams::new(3.0, crate::GOLDEN, 0.1, 0.0).unwrap();
        let op = TruncatedOperator::new(&p, 0, 1499).unwrap();
        let r = eigen_tridiagonal(&op, &[750]).unwrap();
        let pair = &r.pairs[0];
        let v = &pair.vector;
        let c = (0..v.len()).max_by(|&a, &b| v[a].abs().total_cmp(&v[b].abs())).unwrap() as i64;
        let pe = p.with_energy(pair.value);
        let m = 0.9 * 3f64.ln();
        let y = if c > 750 { c - 400 } else { c + 400 };
        let far = regularity_classify(&pe, y, 200, m).unwrap();
        assert_eq!(far.classification, Regularity::Regular);
        let (x1, x2) = far.witness_interval.unwrap();
        assert!(x1 <= y && y <= x2 && x2 - x1 == 199 && (y - x1).min(x2 - y) >= 5);
        let at = regularity_classify(&pe, c, 200, m).unwrap();
        assert_eq!(at.classification, Regularity::Singular);
        assert_eq!(at.windows_scanned, 200 - 2 * 5);
    }

    #[test]
    fn small_scale_is_rejected() {
        let p = OperatorParams::new(3.0, crate::GOLDEN, 0.1, 0.0).unwrap();
        assert!(regularity_classify(&p, 0, 39, 1.0).is_err());
    }

    #[test]
    fn membership_for_supercritical_coupling() {
        let p = OperatorParams::new(2.0, crate::GOLDEN, 0.0, 0.3).unwrap();
        let l = 2f64.ln();
        for j in 0..64 {
            let t = j as f64 / 64.0;
            assert!(a_kr_membership(&p, 50, l + 0.2, t).unwrap().member);
            assert!(a_kr_membership(&p, 50, f64::INFINITY, t).unwrap().member);
        }
        let best = (0..1024)
            .map(|j| a_kr_membership(&p, 100, 0.0, j as f64 / 1024.0).unwrap().log_q / 100.0)
            .fold(f64::NEG_INFINITY, f64::max);
        assert!(best >= l - 0.05, "{best}");
    }

    #[test]
    fn generalized_bounds() {
        let sites: Vec<i64> = (-100..=100).collect();
        let ones = vec![1.0; sites.len()];
        assert!(generalized_bound_check(&sites, &ones, 1.0).unwrap().holds);
        let sq: Vec<f64> = sites.iter().map(|&x| (x * x) as f64).collect();
        assert!(!generalized_bound_check(&sites, &sq, 50.0).unwrap().holds);
    }
}
