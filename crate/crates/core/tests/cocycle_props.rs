use amo_core::cocycle::{averaged_rotation_number, determinant_p, lyapunov_exponent, transfer_product, OperatorParams};
use amo_core::localization::TruncatedOperator;
use amo_core::spectrum::band_edges;
use amo_core::GOLDEN;
use nalgebra::DMatrix;
use proptest::prelude::*;

fn params() -> impl Strategy<Value = OperatorParams> {
    (0.0f64..4.0, 0.0f64..1.0, 0.0f64..1.0, -6.0f64..6.0)
        .prop_map(|(l, a, t, e)| OperatorParams::new(l, a, t, e).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// `|det A_n − 1| ≤ 10⁻⁹·n·‖A_n‖²`, evaluated on the normalized factor so
    /// that hyperbolic growth does not overflow.
    #[test]
    fn products_stay_in_sl2(p in params(), n in 1u64..20_000) {
        let a = transfer_product(&p, p.theta, n);
        let u = a.unit_part;
        let unit_det = u[0][0] * u[1][1] - u[0][1] * u[1][0];
        let norm = amo_core::cocycle::op_norm(&u);
        prop_assert!((unit_det - (-2.0 * a.log_scale).exp()).abs() <= 1e-9 * n as f64 * norm * norm);
        if a.log_scale < 5.0 {
            prop_assert!((a.det() - 1.0).abs() <= 1e-9 * n as f64 * (2.0 * a.log_scale).exp().max(1.0));
        }
    }

    /// Dyadic phases keep `θ + nα` exact, so the two sides see identical potentials.
    #[test]
    fn cocycle_is_additive(l in 0.0f64..4.0, a in 1u32..1 << 20, t in 0u32..1 << 20, e in -6.0f64..6.0, m in 1u64..300, n in 1u64..300) {
        let dyadic = |v: u32| v as f64 / (1u64 << 20) as f64;
        let p = OperatorParams::new(l, dyadic(a), dyadic(t), e).unwrap();
        let whole = transfer_product(&p, p.theta, m + n);
        let first = transfer_product(&p, p.theta, n);
        let second = transfer_product(&p, (p.theta + n as f64 * p.alpha).fract(), m);
        let d = whole.rel_distance(&second.mul(&first));
        prop_assert!(d <= 1e-9, "{d:e} log_scale {}", whole.log_scale);
    }

    #[test]
    fn p_k_matches_dense_determinant(p in params(), k in 1u64..=12) {
        let op = TruncatedOperator::new(&p, 0, k as i64 - 1).unwrap();
        let n = k as usize;
        let mut m = DMatrix::<f64>::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = p.energy - op.diagonal[i];
            if i + 1 < n {
                m[(i, i + 1)] = -1.0;
                m[(i + 1, i)] = -1.0;
            }
        }
        let want = m.determinant();
        let scale = (2.0 + 2.0 * p.lambda + p.energy.abs()).powi(k as i32);
        prop_assert!((determinant_p(&p, k) - want).abs() <= 1e-12 * scale, "{} vs {want}", determinant_p(&p, k));
    }

    #[test]
    fn ids_is_non_decreasing(lambda in 0.0f64..3.0, alpha in 0.0f64..1.0, mut es in prop::collection::vec(-8.0f64..8.0, 2..8)) {
        es.sort_by(f64::total_cmp);
        let ids: Vec<f64> = es
            .iter()
            .map(|&e| averaged_rotation_number(&OperatorParams::new(lambda, alpha, 0.0, e).unwrap(), 2000, 4).unwrap().ids)
            .collect();
        for w in ids.windows(2) {
            prop_assert!(w[1] >= w[0] - 1e-12, "{ids:?}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn exponents_of_dual_couplings_differ_by_ln_lambda(lambda in 1.2f64..3.0, j in 0usize..89) {
        let e = band_edges(lambda, 55, 89).unwrap().bands[j].midpoint();
        let l = lyapunov_exponent(&OperatorParams::new(lambda, GOLDEN, 0.0, e).unwrap(), 20_000, 8, 0).unwrap().value;
        let d = lyapunov_exponent(&OperatorParams::new(1.0 / lambda, GOLDEN, 0.0, e / lambda).unwrap(), 20_000, 8, 0)
            .unwrap()
            .value;
        prop_assert!((l - d - lambda.ln()).abs() <= 0.1, "{l} {d}");
    }
}
