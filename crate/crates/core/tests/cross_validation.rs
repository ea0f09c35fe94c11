mod common;

use common::{linear_data, random_data, rng};
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use regshrink::selection::{
    cross_validate_path, cross_validate_shrinkage, default_s_grid, kfold_split, select_1se, select_min,
    CvCurve, FoldAssignment, PathModel,
};
use regshrink::Dataset;

#[test]
fn folds_partition_rows_with_balanced_sizes() {
    for (n, k) in [(10, 3), (100, 10), (7, 7), (2, 2)] {
        let f = kfold_split(n, k, 9).unwrap();
        let sizes = f.fold_sizes();
        assert_eq!(sizes.iter().sum::<usize>(), n);
        assert!(sizes.iter().max().unwrap() - sizes.iter().min().unwrap() <= 1);
        let mut seen = vec![false; n];
        for fold in 0..k {
            let (train, test) = f.split(fold);
            assert_eq!(train.len() + test.len(), n);
            for i in test {
                assert!(!seen[i]);
                seen[i] = true;
            }
        }
        assert!(seen.iter().all(|&s| s));
    }
    assert_eq!(kfold_split(50, 5, 3).unwrap(), kfold_split(50, 5, 3).unwrap());
    assert_ne!(kfold_split(50, 5, 3).unwrap(), kfold_split(50, 5, 4).unwrap());
    assert!(kfold_split(5, 6, 1).is_err());
    assert!(kfold_split(5, 1, 1).is_err());
}

#[test]
fn pure_noise_selects_heavy_penalty() {
    let mut heavy = 0;
    for seed in 0..100u64 {
        let mut r = rng(1000 + seed);
        let x = DMatrix::from_fn(60, 5, |_, _| r.random_range(-1.0..1.0));
        let y = DVector::from_fn(60, |_, _| r.random_range(-1.0..1.0));
        let d = Dataset::from_matrix(x, y).unwrap();
        let folds = kfold_split(60, 10, seed).unwrap();
        let curve = cross_validate_path(&d, PathModel::STANDARD, 1.0, None, &folds).unwrap();
        if curve.chosen_min < curve.len() / 3 {
            heavy += 1;
        }
    }
    assert!(heavy >= 90, "only {heavy}/100 picked the most-regularized third");
}

#[test]
fn strong_signal_selects_light_penalty() {
    for seed in 0..10u64 {
        let mut r = rng(seed);
        let d = linear_data(&mut r, 100, &[2.0, -1.5, 1.0], 0.0, 0.3);
        let folds = kfold_split(100, 10, seed).unwrap();
        let curve = cross_validate_path(&d, PathModel::STANDARD, 1.0, None, &folds).unwrap();
        assert!(
            curve.chosen_min >= 2 * curve.len() / 3,
            "seed {seed}: {}",
            curve.chosen_min
        );
        assert!(curve.chosen_1se <= curve.chosen_min);
    }
}

#[test]
fn two_folds_and_leave_one_out_work() {
    let d = random_data(4, 24, 3);
    for k in [2, 24] {
        let folds = kfold_split(24, k, 1).unwrap();
        for model in [PathModel::STANDARD, PathModel::EqualWeights] {
            let curve = cross_validate_path(&d, model, 1.0, None, &folds).unwrap();
            assert!(curve.mean_error.iter().all(|e| e.is_finite() && *e >= 0.0));
            assert!(curve.std_error.iter().all(|e| e.is_finite() && *e >= 0.0));
        }
    }
}

#[test]
fn relabelling_folds_does_not_change_the_curve() {
    let d = random_data(12, 40, 4);
    let folds = kfold_split(40, 5, 2).unwrap();
    let perm = [3, 0, 4, 1, 2];
    let relabelled =
        FoldAssignment::from_labels(folds.fold_of().iter().map(|&f| perm[f]).collect(), 5).unwrap();
    let a = cross_validate_path(&d, PathModel::STANDARD, 1.0, None, &folds).unwrap();
    let b = cross_validate_path(&d, PathModel::STANDARD, 1.0, None, &relabelled).unwrap();
    for g in 0..a.len() {
        assert!((a.mean_error[g] - b.mean_error[g]).abs() < 1e-12);
        assert!((a.std_error[g] - b.std_error[g]).abs() < 1e-12);
    }
    assert_eq!(a.chosen_min, b.chosen_min);
    assert_eq!(a.chosen_1se, b.chosen_1se);
}

#[test]
fn curve_statistics_by_hand() {
    let grid = vec![3.0, 2.0, 1.0];
    let errs = vec![vec![4.0, 2.0, 3.0], vec![6.0, 2.0, 1.0]];
    let c = CvCurve::from_fold_errors(grid, &errs).unwrap();
    assert_eq!(c.mean_error, vec![5.0, 2.0, 2.0]);
    // sd of {2, 2} is 0; sd of {3, 1} is √2, divided by √2.
    assert!((c.std_error[2] - 1.0).abs() < 1e-15);
    assert_eq!(c.chosen_min, 1);
    assert_eq!(select_min(&c.mean_error), 1);
    assert_eq!(select_1se(&c), 1);

    let c = CvCurve::from_fold_errors(vec![2.0, 1.0], &[vec![2.0, 1.0], vec![2.2, 3.0]]).unwrap();
    // min at index 1 (2.0) with se 1.0; index 0 (2.1) is within one se.
    assert_eq!(c.chosen_min, 1);
    assert_eq!(c.chosen_1se, 0);
}

#[test]
fn shrinkage_cv_follows_the_signal() {
    let grid = default_s_grid();
    let mut low = 0;
    for seed in 0..40u64 {
        let mut r = rng(500 + seed);
        let x = DMatrix::from_fn(50, 1, |_, _| r.random_range(-1.0..1.0));
        let y = DVector::from_fn(50, |_, _| r.random_range(-1.0..1.0));
        let d = Dataset::from_matrix(x, y).unwrap();
        let folds = kfold_split(50, 10, seed).unwrap();
        let c = cross_validate_shrinkage(&d, &grid, &folds).unwrap();
        if c.grid[c.chosen_min] <= 0.3 {
            low += 1;
        }
    }
    assert!(low >= 28, "{low}/40 noise samples picked s <= 0.3");

    let mut r = rng(3);
    let d = linear_data(&mut r, 200, &[1.0], 0.0, 0.2);
    let folds = kfold_split(200, 10, 3).unwrap();
    let c = cross_validate_shrinkage(&d, &grid, &folds).unwrap();
    assert!(c.grid[c.chosen_min] >= 0.95);

    assert!(
        cross_validate_shrinkage(&random_data(1, 20, 2), &grid, &kfold_split(20, 5, 1).unwrap()).is_err()
    );
    assert!(cross_validate_shrinkage(&d, &[0.5, 0.2], &folds).is_err());
}
