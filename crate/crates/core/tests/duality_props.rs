use amo_core::cocycle::OperatorParams;
use amo_core::duality::{build_dual, det_m_constancy, duality_residual};
use amo_core::localization::{eigen_tridiagonal, TruncatedOperator};
use amo_core::GOLDEN;
use proptest::prelude::*;

fn decaying_vector() -> impl Strategy<Value = (Vec<f64>, i64)> {
    (3usize..40, -20i64..20).prop_flat_map(|(len, first)| {
        (prop::collection::vec((0.5f64..1.5, prop::bool::ANY), len), 0..len).prop_map(move |(amps, c)| {
            let v = amps
                .iter()
                .enumerate()
                .map(|(i, &(a, s))| if s { a } else { -a } * 3f64.powi(-((i as i64 - c as i64).abs() as i32)))
                .collect();
            (v, first)
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn dual_series_of_a_real_vector_is_real((u, first) in decaying_vector(), x in -1.0f64..1.0, theta in 0.0f64..1.0) {
        let pair = build_dual(&u, first, theta, 3.0, GOLDEN, 0.0, 64).unwrap();
        prop_assert!(pair.u_series.coeffs.iter().all(|c| c.im == 0.0));
        let (a, b) = (pair.u_at(-x), pair.u_at(x).conj());
        prop_assert!((a - b).norm() <= 1e-15 * a.norm().max(1.0));
    }
}

fn centered_state(params: &OperatorParams, half: i64) -> (Vec<f64>, f64) {
    let op = TruncatedOperator::new(params, -half, half - 1).unwrap();
    let n = op.dim();
    let cands: Vec<usize> = (0..20).map(|j| n / 2 + j).collect();
    let r = eigen_tridiagonal(&op, &cands).unwrap();
    let peak = |v: &[f64]| (0..v.len()).max_by(|&a, &b| v[a].abs().total_cmp(&v[b].abs())).unwrap() as i64;
    let best = r.pairs.iter().min_by_key(|p| (peak(&p.vector) - half).abs()).unwrap();
    (best.vector.clone(), best.value)
}

#[test]
fn det_m_is_imaginary_when_the_relation_holds() {
    for theta in [0.1, 0.23, 0.41, 0.77] {
        let p = OperatorParams::new(3.0, GOLDEN, theta, 0.0).unwrap();
        let (u, e) = centered_state(&p, 250);
        let pair = build_dual(&u, -250, theta, 3.0, GOLDEN, e, 200).unwrap();
        let r = duality_residual(&pair, 256);
        assert!(r <= 1e-8, "θ={theta}: residual {r}");
        let d = det_m_constancy(&pair, 256);
        assert!(d.real_part_max <= 1e-8 * d.det_max, "θ={theta}: {d:?}");
    }
}

#[test]
fn residual_does_not_grow_with_box_and_cutoff() {
    let p = OperatorParams::new(3.0, GOLDEN, 0.1, 0.0).unwrap();
    let mut previous = f64::INFINITY;
    for (half, k) in [(250i64, 128usize), (500, 256), (750, 400)] {
        let (u, e) = centered_state(&p, half);
        let r = duality_residual(&build_dual(&u, -half, 0.1, 3.0, GOLDEN, e, k).unwrap(), 256);
        assert!(r <= previous.max(1e-12), "box {} K {k}: {r} after {previous}", 2 * half);
        previous = r;
    }
}
