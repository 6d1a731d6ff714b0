//! Command execution. Defaults for unset parameters live here.

use std::fs;

use amo_core::arithmetic::{
    beta_estimate, classify_resonance, theta_membership_scan, ContinuedFractionExpansion, RealInput,
};
use amo_core::cocycle::{averaged_rotation_number, lyapunov_exponent, sweep, thouless_residual, OperatorParams};
use amo_core::duality::{build_dual, duality_report};
use amo_core::localization::{
    eigen_tridiagonal, green_function, regularity_classify, AlphaSpec, ExperimentManifest, TruncatedOperator,
};
use amo_core::mfunction::{decay_exponent_a, m_iterate, m_real_limit, reducibility_probe, rotation_angle_phi};
use amo_core::spectrum::{dos_atoms, gap_bound_check, gap_catalog, Tile};
use num_complex::Complex64;
use num_integer::Integer;
use rayon::prelude::*;
use serde_json::json;

use crate::cache::Cache;
use crate::config::*;
use crate::emit::{butterfly_svg, fmt17, to_json_text, Table};
use crate::error::{CliError, CliResult};
use crate::suites::run_suite;

pub const DEFAULT_PRECISION_BITS: usize = 256;

pub enum Output {
    Json(String),
    Csv(Table),
}

fn req<T: Clone>(v: &Option<T>, name: &str) -> CliResult<T> {
    v.clone().ok_or_else(|| CliError::ConfigInvalid(format!("missing parameter {name}")))
}

fn real(x: &Option<String>) -> CliResult<RealInput> {
    Ok(req(x, "x")?.parse::<RealInput>()?)
}

fn alpha(a: &Option<String>) -> CliResult<f64> {
    Ok(a.as_deref().unwrap_or("golden").parse::<RealInput>()?.approx_f64())
}

fn expand(x: &RealInput, terms: usize, g: &Global) -> CliResult<ContinuedFractionExpansion> {
    Ok(ContinuedFractionExpansion::expand(x, terms, g.precision_bits.unwrap_or(DEFAULT_PRECISION_BITS))?)
}

fn json<T: serde::Serialize>(v: &T) -> CliResult<Output> {
    Ok(Output::Json(to_json_text(v)?))
}

fn band_rows(table: &mut Table, lambda: f64, b: &amo_core::spectrum::BandList) {
    for (i, band) in b.bands.iter().enumerate() {
        table.push(vec![
            fmt17(lambda),
            b.p.to_string(),
            b.q.to_string(),
            i.to_string(),
            fmt17(band.lo),
            fmt17(band.hi),
        ]);
    }
}

const BAND_HEADER: [&str; 6] = ["lambda", "p", "q", "band_index", "E_low", "E_high"];

pub fn execute(cfg: &ExperimentConfig, cache: &Cache) -> CliResult<Output> {
    let g = &cfg.global;
    let seed = g.seed.unwrap_or(0);
    match &cfg.command {
        Command::Cf(a) => json(&expand(&real(&a.x)?, a.terms.unwrap_or(20), g)?.to_json()),
        Command::Beta(a) => json(&beta_estimate(&expand(&real(&a.x)?, a.terms.unwrap_or(30), g)?)?),
        Command::Resonance(a) => {
            let cf = expand(&real(&a.x)?, a.terms.unwrap_or(60), g)?;
            json(&classify_resonance(req(&a.k, "k")?, &cf)?)
        }
        Command::ThetaScan(a) => {
            json(&theta_membership_scan(req(&a.theta, "theta")?, alpha(&a.alpha)?, a.k_max.unwrap_or(100)))
        }
        Command::Lyapunov(a) | Command::Rotation(a) => {
            let p = OperatorParams::new(
                req(&a.lambda, "lambda")?,
                alpha(&a.alpha)?,
                a.theta.unwrap_or(0.0),
                a.energy.unwrap_or(0.0),
            )?;
            let (steps, phases) = (a.steps.unwrap_or(100_000), a.phases.unwrap_or(8));
            if matches!(cfg.command, Command::Lyapunov(_)) {
                json(&lyapunov_exponent(&p, steps, phases, seed)?)
            } else {
                json(&averaged_rotation_number(&p, steps, phases)?)
            }
        }
        Command::Ids(a) => {
            let lambda = req(&a.lambda, "lambda")?;
            let r = 2.0 + 2.0 * lambda.abs();
            let (lo, hi, n) = (a.e_min.unwrap_or(-r), a.e_max.unwrap_or(r), a.n_energies.unwrap_or(101));
            if n == 0 || !(lo <= hi) {
                return Err(CliError::ConfigInvalid("need n_energies ≥ 1 and e_min ≤ e_max".into()));
            }
            let energies: Vec<f64> =
                (0..n).map(|i| if n == 1 { lo } else { lo + (hi - lo) * i as f64 / (n - 1) as f64 }).collect();
            let p = OperatorParams::new(lambda, alpha(&a.alpha)?, 0.0, 0.0)?;
            let rows = sweep(&p, &energies, a.steps.unwrap_or(20_000), a.phases.unwrap_or(8))?;
            let mut t = Table::new(&["E", "L", "rho", "ids", "spread"]);
            for r in rows {
                t.push(vec![fmt17(r.energy), fmt17(r.lyapunov), fmt17(r.rho), fmt17(r.ids), fmt17(r.spread)]);
            }
            Ok(Output::Csv(t))
        }
        Command::Thouless(a) => {
            let lambda = req(&a.lambda, "lambda")?;
            let bands = cache.bands(lambda, a.p.unwrap_or(55), a.q.unwrap_or(89))?;
            let dos = dos_atoms(&bands)?;
            let p = OperatorParams::new(lambda, alpha(&a.alpha)?, 0.0, req(&a.energy, "energy")?)?;
            json(&thouless_residual(&p, &dos.measure, a.steps.unwrap_or(100_000), a.phases.unwrap_or(8))?)
        }
        Command::Bands(a) => {
            let lambda = req(&a.lambda, "lambda")?;
            let b = cache.bands(lambda, req(&a.p, "p")?, req(&a.q, "q")?)?;
            let mut t = Table::new(&BAND_HEADER);
            band_rows(&mut t, lambda, &b);
            Ok(Output::Csv(t))
        }
        Command::Gaps(a) => {
            let lambda = req(&a.lambda, "lambda")?;
            let b = cache.bands(lambda, req(&a.p, "p")?, req(&a.q, "q")?)?;
            let target = a.alpha.as_ref().map(|_| alpha(&a.alpha)).transpose()?;
            let mut t = Table::new(&[
                "lambda",
                "p",
                "q",
                "gap_index",
                "a",
                "b",
                "size",
                "ids_num",
                "ids_den",
                "label_k",
                "label_dist",
            ]);
            for gap in gap_catalog(&b, target) {
                t.push(vec![
                    fmt17(lambda),
                    b.p.to_string(),
                    b.q.to_string(),
                    gap.index.to_string(),
                    fmt17(gap.a),
                    fmt17(gap.b),
                    fmt17(gap.size),
                    gap.ids_num.to_string(),
                    gap.ids_den.to_string(),
                    gap.label_k.map(|k| k.to_string()).unwrap_or_default(),
                    gap.label_dist.map(fmt17).unwrap_or_default(),
                ]);
            }
            Ok(Output::Csv(t))
        }
        Command::GapBound(a) => {
            let x: RealInput = a.alpha.as_deref().unwrap_or("golden").parse()?;
            let (lo, hi) = (a.n_min.unwrap_or(2), a.n_max.unwrap_or(8));
            let cf = expand(&x, hi + 2, g)?;
            json(&gap_bound_check(req(&a.lambda, "lambda")?, &cf, lo..hi + 1, a.epsilon.unwrap_or(0.1))?)
        }
        Command::Butterfly(a) => {
            let lambda = req(&a.lambda, "lambda")?;
            let q_max = a.qmax.unwrap_or(20);
            let fractions: Vec<(u64, u64)> =
                (1..=q_max).flat_map(|q| (0..q).filter(move |p| p.gcd(&q) == 1).map(move |p| (p, q))).collect();
            let tiles: Vec<Tile> = fractions
                .par_iter()
                .map(|&(p, q)| match cache.bands(lambda, p, q) {
                    Ok(b) => Tile { p, q, bands: Some(b), error: None },
                    Err(e) => Tile { p, q, bands: None, error: Some(e.to_string()) },
                })
                .collect();
            if let Some(t) = tiles.iter().find(|t| t.error.is_some()) {
                eprintln!("warning: p/q = {}/{}: {}", t.p, t.q, t.error.as_deref().unwrap_or_default());
            }
            if let Some(path) = &a.svg {
                fs::write(path, butterfly_svg(lambda, &tiles))?;
            }
            let mut t = Table::new(&BAND_HEADER);
            for tile in &tiles {
                if let Some(b) = &tile.bands {
                    band_rows(&mut t, lambda, b);
                }
            }
            Ok(Output::Csv(t))
        }
        Command::Dos(a) => {
            let b = cache.bands(req(&a.lambda, "lambda")?, req(&a.p, "p")?, req(&a.q, "q")?)?;
            json(&dos_atoms(&b)?)
        }
        Command::Mfun(a) => {
            let (lambda, al) = (req(&a.lambda, "lambda")?, alpha(&a.alpha)?);
            let (e_re, e_im, x) = (a.e_re.unwrap_or(0.0), a.e_im.unwrap_or(1.0), a.x.unwrap_or(0.0));
            if e_im > 0.0 {
                json(&m_iterate(lambda, al, Complex64::new(e_re, e_im), Complex64::new(x, 0.0), a.n.unwrap_or(200))?)
            } else if e_im == 0.0 {
                json(&m_real_limit(lambda, al, e_re, x, a.n.unwrap_or(2000))?)
            } else {
                Err(CliError::ConfigInvalid("e_im must be non-negative".into()))
            }
        }
        Command::Reduce(a) => json(&reducibility_probe(
            req(&a.lambda, "lambda")?,
            alpha(&a.alpha)?,
            req(&a.energy, "energy")?,
            a.k.unwrap_or(32),
            a.grid.unwrap_or(512),
            a.n_converge.unwrap_or(2000),
            a.allow_dropped.unwrap_or(false),
        )?),
        Command::Adecay(a) => {
            let al = alpha(&a.alpha)?;
            let (phi, _) = rotation_angle_phi(
                req(&a.lambda, "lambda")?,
                al,
                req(&a.energy, "energy")?,
                a.grid.unwrap_or(512),
                a.n_converge.unwrap_or(2000),
            )?;
            let (value, k) = decay_exponent_a(&phi, al, a.k_min.unwrap_or(4))?;
            json(&json!({ "a": value, "k": k, "K": phi.k_max }))
        }
        Command::Localize(a) => {
            let mut m = match &a.manifest {
                Some(path) => {
                    let text = fs::read_to_string(path)
                        .map_err(|e| CliError::ConfigInvalid(format!("{}: {e}", path.display())))?;
                    serde_json::from_str::<ExperimentManifest>(&text)
                        .map_err(|e| CliError::ConfigInvalid(format!("{}: {e}", path.display())))?
                }
                None => ExperimentManifest {
                    lambda: req(&a.lambda, "lambda")?,
                    alpha: AlphaSpec::Terms { cf_terms: vec![1; 40] },
                    theta: 0.0,
                    box_size: 1000,
                    n_states: 20,
                    seed,
                },
            };
            if let Some(l) = a.lambda {
                m.lambda = l;
            }
            match (a.alpha_p, a.alpha_q, &a.cf_terms) {
                (Some(p), Some(q), None) => m.alpha = AlphaSpec::Rational { p, q },
                (None, None, Some(t)) => m.alpha = AlphaSpec::Terms { cf_terms: t.clone() },
                (None, None, None) => {}
                _ => return Err(CliError::ConfigInvalid("give either alpha_p and alpha_q, or cf_terms".into())),
            }
            m.theta = a.theta.unwrap_or(m.theta);
            m.box_size = a.box_size.unwrap_or(m.box_size);
            m.n_states = a.n_states.unwrap_or(m.n_states);
            m.seed = g.seed.unwrap_or(m.seed);
            let mut t = Table::new(&["state_index", "E", "slope", "r2", "center"]);
            for r in m.run()? {
                t.push(vec![
                    r.state_index.to_string(),
                    fmt17(r.energy),
                    fmt17(r.slope),
                    fmt17(r.r2),
                    r.center.to_string(),
                ]);
            }
            Ok(Output::Csv(t))
        }
        Command::Green(a) => {
            let e = req(&a.energy, "energy")?;
            let p = OperatorParams::new(req(&a.lambda, "lambda")?, alpha(&a.alpha)?, a.theta.unwrap_or(0.0), e)?;
            let (x1, x2) = (req(&a.x1, "x1")?, req(&a.x2, "x2")?);
            let op = TruncatedOperator::new(&p, x1, x2)?;
            let (x, y) = (req(&a.x, "x")?, req(&a.y, "y")?);
            if !(x1..=x2).contains(&x) || !(x1..=x2).contains(&y) {
                return Err(CliError::ConfigInvalid(format!("sites must lie in [{x1}, {x2}]")));
            }
            json(&json!({ "x1": x1, "x2": x2, "x": x, "y": y, "E": e, "G": green_function(&op, e, x, y)? }))
        }
        Command::Regularity(a) => {
            let p = OperatorParams::new(
                req(&a.lambda, "lambda")?,
                alpha(&a.alpha)?,
                a.theta.unwrap_or(0.0),
                req(&a.energy, "energy")?,
            )?;
            json(&regularity_classify(&p, req(&a.y, "y")?, a.k.unwrap_or(200), req(&a.m, "m")?)?)
        }
        Command::Verify(a) => json(&run_suite(req(&a.suite, "suite")?, a.qmax, a.cases, seed)?),
        Command::Dual(a) => {
            let (lambda, al, theta) = (req(&a.lambda, "lambda")?, alpha(&a.alpha)?, a.theta.unwrap_or(0.1));
            let n = a.box_size.unwrap_or(1500);
            if n < 2 {
                return Err(CliError::ConfigInvalid("box must be at least 2".into()));
            }
            let half = (n / 2) as i64;
            let p = OperatorParams::new(lambda, al, theta, 0.0)?;
            let op = TruncatedOperator::new(&p, -half, -half + n as i64 - 1)?;
            let selected: Vec<usize> = match a.state {
                Some(s) => vec![s],
                None => (0..20).map(|j| (n / 2 + j).min(n - 1)).collect(),
            };
            let eig = eigen_tridiagonal(&op, &selected)?;
            let peak = |v: &[f64]| (0..v.len()).max_by(|&i, &j| v[i].abs().total_cmp(&v[j].abs())).unwrap_or(0);
            let pair = eig
                .pairs
                .iter()
                .min_by_key(|pr| (peak(&pr.vector) as i64 - half).abs())
                .ok_or_else(|| CliError::ConfigInvalid("no state selected".into()))?;
            let k = a.k.unwrap_or(n * 4 / 15);
            let dual = build_dual(&pair.vector, -half, theta, lambda, al, pair.value, k)?;
            json(&json!({
                "state_index": pair.index,
                "report": duality_report(&dual, a.grid.unwrap_or(256)),
                "tail_mass": dual.tail_mass,
            }))
        }
    }
}
