use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::products::{ln_sin_partial_sum, log_sin_sum_rational, sine_identity};
use crate::error::Result;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityTally {
    pub name: String,
    pub cases: usize,
    pub passed: usize,
    pub worst_deviation: f64,
    pub worst_case: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrigReport {
    pub q_max: u64,
    pub p_per_q: usize,
    pub x_per_pair: usize,
    pub seed: u64,
    pub tallies: Vec<IdentityTally>,
}

/// Up to `count` distinct `p` coprime to `q` in `[1, q)`, drawn with `rng`.
pub fn random_coprimes(q: u64, count: usize, rng: &mut impl Rng) -> Vec<i64> {
    use num_integer::Integer;
    let pool: Vec<i64> = (1..q.max(2) as i64).filter(|p| p.unsigned_abs().gcd(&q) == 1).collect();
    if pool.len() <= count {
        return pool;
    }
    rand::seq::index::sample(rng, pool.len(), count).into_iter().map(|i| pool[i]).collect()
}

fn tally(name: &str, rows: Vec<(bool, f64, String)>) -> IdentityTally {
    let worst = rows.iter().max_by(|a, b| a.1.total_cmp(&b.1));
    IdentityTally {
        name: name.into(),
        cases: rows.len(),
        passed: rows.iter().filter(|r| r.0).count(),
        worst_deviation: worst.map_or(0.0, |w| w.1),
        worst_case: worst.map_or_else(String::new, |w| w.2.clone()),
    }
}

/// (passed, deviation, case label)
type Outcome = (bool, f64, String);

/// Batch verification of the exact sine identity (tolerance `1e-9 q`), the
/// two-sided rational bound, and the log-sine Fourier series at `x = π`
/// (alternating-series error `1/(n+1)`).
pub fn trig_report(q_max: u64, p_per_q: usize, x_per_pair: usize, seed: u64) -> Result<TrigReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut jobs = Vec::new();
    for q in 2..=q_max {
        for p in random_coprimes(q, p_per_q, &mut rng) {
            let xs: Vec<f64> = (0..x_per_pair).map(|_| rng.gen()).collect();
            jobs.push((p, q, xs));
        }
    }
    let rows: Vec<(Vec<Outcome>, Vec<Outcome>)> = jobs
        .par_iter()
        .map(|(p, q, xs)| -> Result<_> {
            let id = sine_identity(*p, *q)?;
            let ident = vec![(id.deviation <= 1e-9 * *q as f64, id.deviation, format!("p={p} q={q}"))];
            let mut bounds = Vec::new();
            for &x in xs {
                let r = log_sin_sum_rational(x, *p, *q)?;
                // distance to the nearer bound, negative when violated
                let slack = (r.normalized - r.lower).min(r.upper - r.normalized);
                bounds.push((r.bounds_pass(), -slack, format!("p={p} q={q} x={x}")));
            }
            Ok((ident, bounds))
        })
        .collect::<Result<_>>()?;
    let (ident, bounds): (Vec<_>, Vec<_>) = rows.into_iter().unzip();
    let series: Vec<(bool, f64, String)> = [10u64, 100, 1000, 10_000, 100_000]
        .iter()
        .map(|&n| {
            let s = ln_sin_partial_sum(std::f64::consts::PI, n).abs();
            (s <= 1.0 / (n + 1) as f64 + 1e-12, s, format!("n={n}"))
        })
        .collect();
    Ok(TrigReport {
        q_max,
        p_per_q,
        x_per_pair,
        seed,
        tallies: vec![
            tally("sine_identity", ident.into_iter().flatten().collect()),
            tally("rational_bounds", bounds.into_iter().flatten().collect()),
            tally("log_sine_series", series),
        ],
    })
}
