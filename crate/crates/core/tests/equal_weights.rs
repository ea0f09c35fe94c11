mod common;

use common::{linear_data, max_abs_diff, random_data, rng};
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use rand::Rng;
use regshrink::equal_weights::{
    compare_models, fit_equal_at, fit_equal_shrinkage, reparametrize, EqualWeightsFit, TABLE_COLUMNS,
};
use regshrink::linear::{fit_ols, predict};
use regshrink::penalized::LambdaGrid;
use regshrink::selection::kfold_split;
use regshrink::Dataset;

#[test]
fn unpenalized_fit_matches_ols_predictions() {
    for seed in 0..30u64 {
        let mut r = rng(seed);
        let p = r.random_range(2..10);
        let n = r.random_range(p + 3..80);
        let d = random_data(seed, n, p);
        let ols_hat = predict(&fit_ols(&d).unwrap(), d.predictors()).unwrap();
        let eq = fit_equal_at(&d, 1.0, 0.0).unwrap();
        let eq_hat = eq.predict(&reparametrize(&d).unwrap()).unwrap();
        assert!(
            max_abs_diff(ols_hat.as_slice(), eq_hat.as_slice()) < 1e-8,
            "seed {seed}"
        );
        let implied_hat = predict(&eq.implied_coefficients(), d.predictors()).unwrap();
        assert!(
            max_abs_diff(ols_hat.as_slice(), implied_hat.as_slice()) < 1e-8,
            "seed {seed}"
        );
    }
}

proptest! {
    #[test]
    fn implied_coefficients_reproduce_augmented_predictions(
        seed in 0u64..10_000,
        n in 3usize..40,
        p in 2usize..10,
    ) {
        let mut r = rng(seed);
        let x = DMatrix::from_fn(n, p, |_, _| r.random_range(-5.0..5.0));
        let fit = EqualWeightsFit {
            intercept: r.random_range(-3.0..3.0),
            xi: r.random_range(-2.0..2.0),
            gammas: DVector::from_fn(p, |_, _| r.random_range(-2.0..2.0)),
        };
        let design = regshrink::equal_weights::reparametrize_matrix(&x).unwrap();
        let a = fit.predict(&design).unwrap();
        let b = predict(&fit.implied_coefficients(), &x).unwrap();
        prop_assert!(max_abs_diff(a.as_slice(), b.as_slice()) < 1e-10);
        let beta = fit.implied_coefficients().coefficients;
        prop_assert!((beta.mean() - fit.xi).abs() < 1e-12);
    }

    #[test]
    fn deviation_rows_sum_to_zero(seed in 0u64..10_000, n in 1usize..30, p in 2usize..12) {
        let mut r = rng(seed);
        let x = DMatrix::from_fn(n, p, |_, _| r.random_range(-100.0..100.0));
        let design = regshrink::equal_weights::reparametrize_matrix(&x).unwrap();
        for i in 0..n {
            let s: f64 = design.deviations().row(i).sum();
            prop_assert!(s.abs() < 1e-10 * (1.0 + design.sum_score()[i].abs()));
        }
    }
}

#[test]
fn full_shrinkage_is_sum_score_regression() {
    for seed in 0..10u64 {
        let d = random_data(seed, 40, 5);
        for alpha in [1.0, 0.5] {
            let path = fit_equal_shrinkage(&d, alpha, None).unwrap();
            let top = EqualWeightsFit::from_path(&path, 0);
            assert!(top.gammas.iter().all(|&g| g == 0.0));
            let sum = reparametrize(&d).unwrap().sum_score().clone();
            let simple = fit_ols(
                &Dataset::from_matrix(
                    DMatrix::from_column_slice(40, 1, sum.as_slice()),
                    d.response().clone(),
                )
                .unwrap(),
            )
            .unwrap();
            assert!((top.xi - simple.coefficients[0]).abs() < 1e-6);
            assert!((top.intercept - simple.intercept).abs() < 1e-6);
        }
    }
}

#[test]
fn ridge_spread_of_implied_weights_shrinks_with_lambda() {
    for seed in 0..10u64 {
        let mut r = rng(seed);
        let beta: Vec<f64> = (0..6).map(|_| r.random_range(-1.0..2.0)).collect();
        let d = linear_data(&mut r, 60, &beta, 1.0, 1.0);
        let grid = LambdaGrid::log_spaced(50.0, 1e-4, 40).unwrap();
        let path = fit_equal_shrinkage(&d, 0.0, Some(&grid)).unwrap();
        let spread: Vec<f64> = (0..path.len())
            .map(|k| {
                let b = EqualWeightsFit::from_path(&path, k)
                    .implied_coefficients()
                    .coefficients;
                let m = b.mean();
                b.iter().map(|v| (v - m).powi(2)).sum::<f64>()
            })
            .collect();
        for k in 1..spread.len() {
            assert!(
                spread[k - 1] <= spread[k] + 1e-8,
                "seed {seed} k {k}: {} > {}",
                spread[k - 1],
                spread[k]
            );
        }
    }
}

#[test]
fn comparison_uses_shared_folds_and_full_table() {
    let mut r = rng(77);
    let d = linear_data(&mut r, 90, &[0.3; 9], 0.0, 1.5);
    let folds = kfold_split(d.n(), 10, 5).unwrap();
    let cmp = compare_models(&d, 1.0, true, &folds).unwrap();
    assert_eq!(cmp.folds, folds);
    assert_eq!(cmp.table.len(), 11);
    assert_eq!(TABLE_COLUMNS.len(), 9);
    // Intercept row fully populated, Sum row only in the equal-weights block.
    assert!(cmp.table[0].values.iter().all(Option::is_some));
    assert!(cmp.table[1].values[..3].iter().all(Option::is_none));
    assert!(cmp.table[1].values[6..].iter().all(Option::is_none));
    for row in &cmp.table[2..] {
        assert!(row.values.iter().all(Option::is_some));
    }
    // OLS columns agree through the implied back-transform.
    for (j, row) in cmp.table[2..].iter().enumerate() {
        let ols = row.values[0].unwrap();
        let implied = row.values[6].unwrap();
        assert!((ols - implied).abs() < 1e-7, "x{}", j + 1);
    }
    assert!(cmp.equal.curve.chosen_1se <= cmp.equal.curve.chosen_min);
    assert!(cmp.min_cv_ok());
}

trait MinCv {
    fn min_cv_ok(&self) -> bool;
}

impl MinCv for regshrink::equal_weights::ModelComparison {
    fn min_cv_ok(&self) -> bool {
        self.standard.min_cv_mse().is_finite() && self.equal.min_cv_mse().is_finite()
    }
}

#[test]
fn single_predictor_is_rejected() {
    let d = random_data(1, 10, 1);
    assert!(reparametrize(&d).is_err());
    let folds = kfold_split(10, 5, 1).unwrap();
    assert!(compare_models(&d, 1.0, true, &folds).is_err());
}
