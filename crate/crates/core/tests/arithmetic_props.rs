use amo_core::arithmetic::{
    beta_estimate, classify_resonance, scale_b, torus_norm, ContinuedFractionExpansion, RealInput, Resonance,
};
use proptest::prelude::*;

fn surd() -> impl Strategy<Value = (i64, i64, i64, i64)> {
    (-20i64..20, 1i64..10, 2i64..60, 1i64..12)
        .prop_filter("d must not be a square", |&(_, _, d, _)| ((d as f64).sqrt().round() as i64).pow(2) != d)
}

fn expand(p: i64, q: i64, d: i64, r: i64, terms: usize) -> ContinuedFractionExpansion {
    ContinuedFractionExpansion::expand(&RealInput::surd(p, q, d, r).unwrap(), terms, 512).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn errors_are_bracketed_by_neighbouring_denominators((p, q, d, r) in surd()) {
        let cf = expand(p, q, d, r, 30);
        for n in 1..cf.len() - 1 {
            let ln_delta = cf.error_ln(n).unwrap();
            let (lq, lq1) = (cf.ln_q(n), cf.ln_q(n + 1));
            let ln_sum = lq1 + (lq - lq1).exp().ln_1p();
            prop_assert!(ln_delta > -ln_sum - 1e-12, "n={n}");
            prop_assert!(ln_delta < -lq1 + 1e-12, "n={n}");
        }
    }

    #[test]
    fn convergents_are_best_approximations((p, q, d, r) in surd()) {
        let cf = expand(p, q, d, r, 30);
        let alpha = cf.value_f64();
        let dens = cf.denominators_u64();
        for n in 1..dens.len() - 1 {
            if dens[n + 1] > 2000 {
                break;
            }
            let delta = cf.error_f64(n).unwrap();
            for k in 1..dens[n + 1] {
                if k != dens[n] {
                    prop_assert!(torus_norm(k as f64 * alpha) >= delta - 1e-12, "n={n} k={k}");
                }
            }
        }
    }

    #[test]
    fn beta_of_quadratic_irrationals_vanishes((p, q, d, r) in surd()) {
        let b = beta_estimate(&expand(p, q, d, r, 60)).unwrap();
        prop_assert!(b.defined);
        prop_assert!(b.last_tail_sup().unwrap() < 1e-3);
    }

    #[test]
    fn resonance_classes_partition_each_scale(k in 2u64..5000) {
        let cf = ContinuedFractionExpansion::golden(40);
        let r = classify_resonance(k, &cf).unwrap();
        let (lo, hi) = (scale_b(&cf, r.n), scale_b(&cf, r.n + 1));
        prop_assert!(lo < k as f64 + 1e-9 && k as f64 <= hi + 1e-9);
        let q = r.q_n;
        let d = (1..=k / q + 1).map(|l| (k as i64 - (l * q) as i64).unsigned_abs()).min().unwrap();
        prop_assert_eq!(d, r.nearest_multiple_distance);
        if (d as f64 - r.b_n).abs() > 1e-6 {
            let want = if (d as f64) <= r.b_n { Resonance::Resonant } else { Resonance::NonResonant };
            prop_assert_eq!(r.classification, want);
        }
    }
}
