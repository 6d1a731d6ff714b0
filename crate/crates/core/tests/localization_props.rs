use amo_core::cocycle::{determinant_p_log, orbit_point, OperatorParams};
use amo_core::linalg::{dense_solve, symmetric_eigenvalues, tridiagonal_dense};
use amo_core::localization::{formal_solution, green_function, poisson_residual, window_log_det, TruncatedOperator};
use amo_core::Error;
use proptest::prelude::*;

fn window(max_len: i64) -> impl Strategy<Value = (TruncatedOperator, f64)> {
    (0.1f64..3.0, 0.0f64..1.0, 0.0f64..1.0, -50i64..50, 1..=max_len, -4.0f64..4.0).prop_map(|(l, a, t, x1, len, e)| {
        let p = OperatorParams::new(l, a, t, 0.0).unwrap();
        (TruncatedOperator::new(&p, x1, x1 + len - 1).unwrap(), e)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn cramer_form_matches_dense_inverse((op, e) in window(30)) {
        let n = op.dim();
        let shifted: Vec<f64> = op.diagonal.iter().map(|d| d - e).collect();
        let m = tridiagonal_dense(&shifted, &op.off_diagonal);
        for y in 0..n {
            let mut rhs = vec![0.0; n];
            rhs[y] = 1.0;
            let col = dense_solve(&m, &rhs).unwrap();
            for (i, want) in col.iter().enumerate() {
                match green_function(&op, e, op.x1 + i as i64, op.x1 + y as i64) {
                    Ok(got) => prop_assert!((got - want).abs() <= 1e-8 * want.abs().max(f64::MIN_POSITIVE)),
                    Err(Error::NearSingularWindow { .. }) => return Ok(()),
                    Err(err) => return Err(TestCaseError::fail(err.to_string())),
                }
            }
        }
    }

    #[test]
    fn poisson_formula_reproduces_solutions((op, e) in window(40), a in -1.0f64..1.0, b in -1.0f64..1.0) {
        let psi = formal_solution(&op, e, a, b);
        match poisson_residual(&op, e, &psi) {
            Ok(r) => prop_assert!(r.residual <= 1e-8),
            Err(Error::NearSingularWindow { .. }) => {}
            Err(err) => return Err(TestCaseError::fail(err.to_string())),
        }
    }

    #[test]
    fn sturm_count_is_negative_inertia((op, e) in window(60)) {
        let shifted: Vec<f64> = op.diagonal.iter().map(|d| d - e).collect();
        let ev = symmetric_eigenvalues(tridiagonal_dense(&shifted, &op.off_diagonal));
        prop_assume!(ev.iter().all(|v| v.abs() > 1e-9));
        prop_assert_eq!(op.count_below(e), ev.iter().filter(|&&v| v < 0.0).count());
    }

    #[test]
    fn window_determinant_is_p_k((op, e) in window(200)) {
        let d = window_log_det(&op, e);
        let p = OperatorParams::new(op.lambda, op.alpha, orbit_point(op.theta, op.alpha, op.x1), e).unwrap();
        let (_, log) = determinant_p_log(&p, op.dim() as u64);
        prop_assume!(log.is_finite());
        prop_assert!((d.log_abs - log).abs() <= 1e-8 * log.abs().max(1.0));
    }
}
