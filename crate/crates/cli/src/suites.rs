//! `verify` suites: each compares a fast path against an independent oracle
//! on seeded random instances.

use amo_core::cocycle::{herman_bound_check, OperatorParams};
use amo_core::duality::spectra_duality_check;
use amo_core::linalg::{dense_solve, tridiagonal_dense};
use amo_core::localization::{formal_solution, green_function, poisson_residual, TruncatedOperator};
use amo_core::spectrum::discriminant_spread;
use amo_core::trig::{random_coprimes, trig_report};
use amo_core::{Error, GOLDEN};
use num_integer::Integer;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::Value;

use crate::config::Suite;
use crate::error::CliResult;

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub seed: u64,
    pub cases: usize,
    pub passed: usize,
    /// Largest normalized error; a case passes when it is at most `tolerance`.
    pub worst: f64,
    pub tolerance: f64,
    pub all_passed: bool,
    pub details: Value,
}

impl SuiteReport {
    fn from_errors(suite: Suite, seed: u64, errors: &[f64], tolerance: f64, details: Value) -> Self {
        let passed = errors.iter().filter(|&&e| e <= tolerance).count();
        let worst = errors.iter().cloned().fold(0.0f64, |m, e| if e.is_nan() { f64::NAN } else { m.max(e) });
        Self { suite, seed, cases: errors.len(), passed, worst, tolerance, all_passed: passed == errors.len(), details }
    }
}

pub fn run_suite(suite: Suite, qmax: Option<u64>, cases: Option<usize>, seed: u64) -> CliResult<SuiteReport> {
    match suite {
        Suite::Trig => trig(qmax.unwrap_or(200), seed),
        Suite::Chambers => chambers(qmax.unwrap_or(40), cases.unwrap_or(50), seed),
        Suite::Cramer => cramer(cases.unwrap_or(200), seed),
        Suite::Poi => poisson(cases.unwrap_or(50), seed),
        Suite::Duality => duality(qmax.unwrap_or(20), seed),
        Suite::Herman => herman(cases.unwrap_or(10), seed),
    }
}

fn trig(q_max: u64, seed: u64) -> CliResult<SuiteReport> {
    let r = trig_report(q_max, 5, 2, seed)?;
    let cases = r.tallies.iter().map(|t| t.cases).sum();
    let passed = r.tallies.iter().map(|t| t.passed).sum();
    let worst = r.tallies.iter().map(|t| t.worst_deviation).fold(0.0f64, f64::max);
    Ok(SuiteReport {
        suite: Suite::Trig,
        seed,
        cases,
        passed,
        worst,
        tolerance: 1e-9,
        all_passed: passed == cases,
        details: serde_json::to_value(&r).unwrap_or(Value::Null),
    })
}

fn random_fraction(rng: &mut ChaCha8Rng, q_max: u64) -> (u64, u64) {
    let q = rng.gen_range(1..=q_max.max(1));
    let p = if q == 1 { 0 } else { random_coprimes(q, 1, rng)[0] as u64 };
    (p, q)
}

/// Spread of the discriminant over 32 phases, relative to `max(1, |Φ|)`.
fn chambers(q_max: u64, cases: usize, seed: u64) -> CliResult<SuiteReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let thetas: Vec<f64> = (0..32).map(|j| (j as f64 + 0.5) / 32.0).collect();
    let mut errors = Vec::with_capacity(cases);
    for _ in 0..cases {
        let lambda = rng.gen_range(0.2..3.0);
        let (p, q) = random_fraction(&mut rng, q_max);
        let r = 2.0 + 2.0 * lambda;
        let e = rng.gen_range(-r..r);
        let (value, spread) = discriminant_spread(lambda, p, q, e, &thetas);
        errors.push(spread / value.abs().max(1.0));
    }
    Ok(SuiteReport::from_errors(Suite::Chambers, seed, &errors, 1e-9, Value::Null))
}

fn random_window(rng: &mut ChaCha8Rng, max_len: i64) -> CliResult<(TruncatedOperator, f64)> {
    let p = OperatorParams::new(rng.gen_range(0.1..3.0), rng.gen(), rng.gen(), 0.0)?;
    let x1 = rng.gen_range(-50..50);
    let len = rng.gen_range(1..=max_len);
    let e = rng.gen_range(-4.0..4.0);
    Ok((TruncatedOperator::new(&p, x1, x1 + len - 1)?, e))
}

/// Cramer-form Green's function against a dense LU solve, entrywise
/// relative error. Windows with the energy at an eigenvalue are redrawn.
fn cramer(cases: usize, seed: u64) -> CliResult<SuiteReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut errors = Vec::with_capacity(cases);
    let mut redrawn = 0usize;
    while errors.len() < cases {
        let (op, e) = random_window(&mut rng, 30)?;
        let shifted: Vec<f64> = op.diagonal.iter().map(|d| d - e).collect();
        let m = tridiagonal_dense(&shifted, &op.off_diagonal);
        let n = op.dim();
        let mut worst = 0.0f64;
        let mut singular = false;
        'cols: for y in 0..n {
            let mut rhs = vec![0.0; n];
            rhs[y] = 1.0;
            let col = dense_solve(&m, &rhs)?;
            for (i, want) in col.iter().enumerate() {
                match green_function(&op, e, op.x1 + i as i64, op.x1 + y as i64) {
                    Ok(got) => worst = worst.max((got - want).abs() / want.abs().max(f64::MIN_POSITIVE)),
                    Err(Error::NearSingularWindow { .. }) => {
                        singular = true;
                        break 'cols;
                    }
                    Err(err) => return Err(err.into()),
                }
            }
        }
        if singular {
            redrawn += 1;
        } else {
            errors.push(worst);
        }
    }
    Ok(SuiteReport::from_errors(Suite::Cramer, seed, &errors, 1e-8, serde_json::json!({ "redrawn": redrawn })))
}

/// The Poisson formula on formal solutions built by the recurrence.
fn poisson(cases: usize, seed: u64) -> CliResult<SuiteReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut errors = Vec::with_capacity(cases);
    let mut redrawn = 0usize;
    while errors.len() < cases {
        let (op, e) = random_window(&mut rng, 40)?;
        let psi = formal_solution(&op, e, rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        match poisson_residual(&op, e, &psi) {
            Ok(r) => errors.push(r.residual),
            Err(Error::NearSingularWindow { .. }) => redrawn += 1,
            Err(err) => return Err(err.into()),
        }
    }
    Ok(SuiteReport::from_errors(Suite::Poi, seed, &errors, 1e-8, serde_json::json!({ "redrawn": redrawn })))
}

/// Hausdorff distance between `Σ_{λ,p/q}` and `λΣ_{1/λ,p/q}` for every
/// reduced `p/q`, `q ≤ q_max`, `λ ∈ {2, 3}`.
fn duality(q_max: u64, seed: u64) -> CliResult<SuiteReport> {
    let cases: Vec<(f64, u64, u64)> = [2.0, 3.0]
        .into_iter()
        .flat_map(|l| (1..=q_max).flat_map(move |q| (0..q).filter(move |p| p.gcd(&q) == 1).map(move |p| (l, p, q))))
        .collect();
    let errors = cases.par_iter().map(|&(l, p, q)| spectra_duality_check(l, p, q)).collect::<Result<Vec<f64>, _>>()?;
    Ok(SuiteReport::from_errors(Suite::Duality, seed, &errors, 1e-8, Value::Null))
}

/// `∫ ln|P_k| ≥ k ln λ − 0.05k` at random energies; the error is the
/// shortfall per unit `k` beyond the bound, zero when the bound holds.
fn herman(cases: usize, seed: u64) -> CliResult<SuiteReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut inputs = Vec::new();
    for lambda in [2.0, 3.0] {
        for _ in 0..cases {
            let r = 2.0 + 2.0 * lambda;
            inputs.push((lambda, rng.gen_range(-r..r)));
        }
    }
    let rows: Vec<(f64, f64, u64)> =
        inputs.iter().flat_map(|&(l, e)| [10u64, 20, 50].map(move |k| (l, e, k))).collect();
    let errors = rows
        .par_iter()
        .map(|&(l, e, k)| {
            let p = OperatorParams::new(l, GOLDEN, 0.0, e)?;
            let r = herman_bound_check(&p, k, 4096, 0.05 * k as f64)?;
            Ok((r.bound - r.integral_estimate).max(0.0) / k as f64)
        })
        .collect::<Result<Vec<f64>, Error>>()?;
    Ok(SuiteReport::from_errors(Suite::Herman, seed, &errors, 0.05, Value::Null))
}
