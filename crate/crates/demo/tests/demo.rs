use regshrink_demo::*;

#[test]
fn curve_decomposes_and_bottoms_out_at_the_optimum() {
    let c = shrinkage_curve(0.4, 0.02, 0.5, 103, 101).unwrap();
    assert_eq!(c.s.len(), 101);
    for k in 0..c.s.len() {
        assert!((c.bias2[k] + c.variance[k] - c.error[k]).abs() < 1e-15);
    }
    assert!((c.error[0] - 0.16).abs() < 1e-15);
    assert!((c.error[100] - 0.02).abs() < 1e-15);
    assert!((c.s_opt - 0.16 / 0.18).abs() < 1e-15);
    assert!(c.error.iter().all(|&e| e >= c.error_at_opt - 1e-15));
    assert!((c.s_population - 1.0 / 1.03).abs() < 1e-12);
}

#[test]
fn curve_rejects_bad_parameters() {
    assert!(shrinkage_curve(0.4, -1.0, 0.5, 50, 11).is_err());
    assert!(shrinkage_curve(0.4, 0.1, 0.0, 50, 11).is_err());
    assert!(shrinkage_curve(0.4, 0.1, 0.5, 3, 11).is_err());
}

fn params(pattern: Pattern, seed: u64) -> PathParams {
    PathParams {
        n: 80,
        p: 6,
        pattern,
        r2: 0.3,
        predictor_cor: 0.3,
        folds: 5,
        seed,
    }
}

#[test]
fn comparison_is_well_formed_and_reproducible() {
    let a = path_comparison(&params(Pattern::Graded, 3)).unwrap();
    let b = path_comparison(&params(Pattern::Graded, 3)).unwrap();
    assert_eq!(
        serde_json::to_string(&a).unwrap(),
        serde_json::to_string(&b).unwrap()
    );
    let w = &a.true_weights;
    assert!(w.windows(2).all(|p| p[0] > p[1]) && (w[0] / w[5] - 6.0).abs() < 1e-12);
    // Weights are scaled to the requested R² under the common correlation.
    let (s2, sum) = (w.iter().map(|x| x * x).sum::<f64>(), w.iter().sum::<f64>());
    assert!((0.7 * s2 + 0.3 * sum * sum - 0.3).abs() < 1e-12);
    // With var(y) = 1 a sensible fit cannot lose much more than the null model.
    assert!(a.equal.test_mse_min < 1.1 && a.standard.test_mse_min < 1.1);
    for m in [&a.standard, &a.equal] {
        let len = m.log_lambda.len();
        assert_eq!(m.cv_mse.len(), len);
        assert_eq!(m.cv_se.len(), len);
        assert_eq!(m.coefficients.len(), len);
        assert!(m.coefficients.iter().all(|c| c.len() == 6));
        assert!(m.chosen_1se <= m.chosen_min && m.chosen_min < len);
        assert!(m.test_mse_min.is_finite() && m.test_mse_1se.is_finite());
    }
    // Top of the equal-weights path: one common weight for every predictor.
    let top = &a.equal.coefficients[0];
    assert!(top.iter().all(|w| (w - top[0]).abs() < 1e-9));
    // Top of the standard path: everything zero.
    assert!(a.standard.coefficients[0].iter().all(|&w| w == 0.0));
}

#[test]
fn equal_weights_help_when_weights_are_equal() {
    let wins = (0..10)
        .filter(|&s| {
            let c = path_comparison(&params(Pattern::Equal, s)).unwrap();
            c.equal.test_mse_min < c.standard.test_mse_min
        })
        .count();
    assert!(wins >= 7, "{wins}/10");
}

#[test]
fn comparison_rejects_bad_parameters() {
    let mut bad = params(Pattern::Equal, 1);
    bad.r2 = 1.0;
    assert!(path_comparison(&bad).is_err());
    let mut bad = params(Pattern::Equal, 1);
    bad.p = 1;
    assert!(path_comparison(&bad).is_err());
    assert_eq!(Pattern::parse("dominant"), Some(Pattern::Dominant));
    assert_eq!(Pattern::parse("other"), None);
}

#[test]
fn unreliable_predictors_call_for_more_shrinkage() {
    let t = reliability_trend(100, 0.3, 200, 5).unwrap();
    assert_eq!(t.len(), RELIABILITIES.len());
    let (first, last) = (&t[0], &t[t.len() - 1]);
    assert!(first.s_median > last.s_median);
    assert!(first.pe_median < last.pe_median);
    assert!(t.iter().all(|p| p.s_q25 <= p.s_median && p.s_median <= p.s_q75));
    assert!(reliability_trend(100, 1.2, 10, 5).is_err());
}

#[test]
fn json_wrappers_serialize() {
    let json = shrinkage_curve_js(0.3, 0.05, 0.4, 60).unwrap();
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v["s"].as_array().unwrap().len(), 101);
    let json = reliability_trend_js(50, 0.3, 20, 1).unwrap();
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 6);
}
