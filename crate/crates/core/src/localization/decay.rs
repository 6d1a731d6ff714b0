use serde::{Deserialize, Serialize};

use super::operator::{log_profile, TruncatedOperator};
use crate::error::{Error, Result};

/// Relative floor below which entries of a plain vector are treated as
/// rounding noise.
pub const VECTOR_NOISE_FLOOR: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CenterPolicy {
    ArgMax,
    Fixed(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub slope: f64,
    pub r2: f64,
    pub center: usize,
    /// Distances from the centre used by the fit, per side.
    pub window_used: (usize, usize),
    pub points: usize,
}

/// Least-squares slope of `log_abs[n]` against `|n − center|`. Each side of
/// the centre contributes distances in `[0.2 D, 0.8 D]` where `D` is the
/// usable decay range of that side: 90% of the distance to the edge, cut
/// where `log_abs` first becomes `−∞`.
pub fn decay_rate_log(log_abs: &[f64], center: CenterPolicy) -> Result<DecayFit> {
    let n = log_abs.len();
    if n < 3 {
        return Err(Error::InvalidParameter("need at least 3 sites".into()));
    }
    let c = match center {
        CenterPolicy::ArgMax => (0..n).max_by(|&a, &b| log_abs[a].total_cmp(&log_abs[b])).unwrap_or(0),
        CenterPolicy::Fixed(c) if c < n => c,
        CenterPolicy::Fixed(c) => return Err(Error::InvalidParameter(format!("centre {c} outside the vector"))),
    };
    let range = |dir: i64| -> usize {
        let edge = if dir < 0 { c } else { n - 1 - c };
        let cap = (edge as f64 * 0.9).floor() as usize;
        (1..=cap).find(|&d| !log_abs[(c as i64 + dir * d as i64) as usize].is_finite()).map_or(cap, |d| d - 1)
    };
    let (dl, dr) = (range(-1), range(1));
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (dir, d_max) in [(-1i64, dl), (1, dr)] {
        let lo = (0.2 * d_max as f64).ceil() as usize;
        let hi = (0.8 * d_max as f64).floor() as usize;
        for d in lo.max(1)..=hi {
            xs.push(d as f64);
            ys.push(log_abs[(c as i64 + dir * d as i64) as usize]);
        }
    }
    if xs.len() < 3 {
        return Err(Error::NoDecayDetected { r2: 0.0 });
    }
    let (slope, r2) = linear_fit(&xs, &ys);
    if !(r2 >= 0.5) {
        return Err(Error::NoDecayDetected { r2 });
    }
    Ok(DecayFit { slope, r2, center: c, window_used: (dl, dr), points: xs.len() })
}

/// Decay of a plain eigenvector; entries below `1e-13 · max|v|` are dropped.
pub fn decay_rate(v: &[f64], center: CenterPolicy) -> Result<DecayFit> {
    let max = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if max == 0.0 {
        return Err(Error::InvalidParameter("zero vector".into()));
    }
    let logs: Vec<f64> = v
        .iter()
        .map(|x| {
            let r = x.abs() / max;
            if r > VECTOR_NOISE_FLOOR {
                r.ln()
            } else {
                f64::NEG_INFINITY
            }
        })
        .collect();
    decay_rate_log(&logs, center)
}

/// Decay of the window eigenstate at `energy`, using the underflow-free
/// profile centred at the peak of `vector`.
pub fn state_decay(op: &TruncatedOperator, energy: f64, vector: &[f64]) -> Result<DecayFit> {
    let c = (0..vector.len()).max_by(|&a, &b| vector[a].abs().total_cmp(&vector[b].abs())).unwrap_or(0);
    decay_rate_log(&log_profile(op, energy, c), CenterPolicy::Fixed(c))
}

/// `(slope, r²)` of the ordinary least-squares line.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
        syy += (y - my) * (y - my);
    }
    let slope = sxy / sxx;
    let r2 = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    (slope, r2)
}
