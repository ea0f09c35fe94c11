//! K-fold cross-validation over penalty paths and shrinkage factors.
//!
//! Every [`CvCurve`] is ordered from the most to the least regularized grid
//! point: λ grids are decreasing and shrinkage grids are increasing in `s`.
//! Index 0 is therefore always the most regularized model, and both
//! selection rules break ties toward smaller indices.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::dataset::Dataset;
use crate::equal_weights::{equal_weights_spec, reparametrize_dataset, EqualWeightsFit};
use crate::error::{Error, Result};
use crate::linear::{fit_ols, mse, predict, LinearFit};
use crate::penalized::{default_grid, fit_path, CoefficientPath, LambdaGrid, PenaltySpec};
use crate::shrinkage::{shrink_simple, ShrinkageFactor};

/// Fold index (0-based) of every observation.
///
/// The permutation comes from a `ChaCha8Rng` seeded with `seed`, so the
/// assignment is identical on every platform.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoldAssignment {
    fold_of: Vec<usize>,
    k: usize,
    seed: Option<u64>,
}

impl FoldAssignment {
    /// Explicit 0-based labels; every fold in `0..k` must be used.
    pub fn from_labels(fold_of: Vec<usize>, k: usize) -> Result<Self> {
        if k < 2 || fold_of.iter().any(|&f| f >= k) {
            return Err(Error::InvalidParameter(format!(
                "fold labels must lie in 0..{k} with k >= 2"
            )));
        }
        let folds = Self {
            fold_of,
            k,
            seed: None,
        };
        if folds.fold_sizes().contains(&0) {
            return Err(Error::InvalidParameter("every fold must be non-empty".into()));
        }
        Ok(folds)
    }

    pub fn fold_of(&self) -> &[usize] {
        &self.fold_of
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Seed of a [`kfold_split`] assignment; `None` for explicit labels.
    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn n(&self) -> usize {
        self.fold_of.len()
    }

    pub fn fold_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &f in &self.fold_of {
            sizes[f] += 1;
        }
        sizes
    }

    /// Row indices of the training and held-out parts for fold `f`.
    pub fn split(&self, f: usize) -> (Vec<usize>, Vec<usize>) {
        (0..self.n()).partition(|&i| self.fold_of[i] != f)
    }
}

/// Shuffles `0..n` and deals the permutation round-robin into `k` folds.
pub fn kfold_split(n: usize, k: usize, seed: u64) -> Result<FoldAssignment> {
    if k < 2 || k > n {
        return Err(Error::InvalidParameter(format!(
            "fold count must satisfy 2 <= K <= n, got K = {k}, n = {n}"
        )));
    }
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut fold_of = vec![0; n];
    for (pos, &i) in perm.iter().enumerate() {
        fold_of[i] = pos % k;
    }
    Ok(FoldAssignment {
        fold_of,
        k,
        seed: Some(seed),
    })
}

/// Seeded random split into a training part of `round(train_frac · n)` rows
/// and a held-out part; both index lists are sorted.
pub fn train_test_split(n: usize, train_frac: f64, seed: u64) -> Result<(Vec<usize>, Vec<usize>)> {
    if !(train_frac > 0.0 && train_frac < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "training fraction must lie in (0, 1), got {train_frac}"
        )));
    }
    let n_train = (train_frac * n as f64).round() as usize;
    if n_train < 2 || n - n_train < 2 {
        return Err(Error::InvalidParameter(format!(
            "a {train_frac} split of {n} rows leaves fewer than two rows on one side"
        )));
    }
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut train = perm[..n_train].to_vec();
    let mut test = perm[n_train..].to_vec();
    train.sort_unstable();
    test.sort_unstable();
    Ok((train, test))
}

/// Cross-validated error over a grid, with the minimum and 1-SE choices.
#[derive(Debug, Clone, PartialEq)]
pub struct CvCurve {
    pub grid: Vec<f64>,
    pub mean_error: Vec<f64>,
    /// Standard deviation of the K fold means divided by `√K`.
    pub std_error: Vec<f64>,
    pub chosen_min: usize,
    pub chosen_1se: usize,
}

impl CvCurve {
    /// Builds a curve from `fold_errors[f][g]`, the held-out mse of fold `f`
    /// at grid point `g`.
    pub fn from_fold_errors(grid: Vec<f64>, fold_errors: &[Vec<f64>]) -> Result<Self> {
        let m = grid.len();
        let k = fold_errors.len();
        if m == 0 || k == 0 || fold_errors.iter().any(|row| row.len() != m) {
            return Err(Error::Dimension(
                "fold errors must be a non-empty K x grid matrix".into(),
            ));
        }
        let kf = k as f64;
        let mut mean_error = vec![0.0; m];
        let mut std_error = vec![0.0; m];
        for g in 0..m {
            let mean = fold_errors.iter().map(|row| row[g]).sum::<f64>() / kf;
            let var = if k > 1 {
                fold_errors.iter().map(|row| (row[g] - mean).powi(2)).sum::<f64>() / (kf - 1.0)
            } else {
                0.0
            };
            mean_error[g] = mean;
            std_error[g] = (var / kf).sqrt();
        }
        let chosen_min = select_min(&mean_error);
        let mut curve = Self {
            grid,
            mean_error,
            std_error,
            chosen_min,
            chosen_1se: chosen_min,
        };
        curve.chosen_1se = select_1se(&curve);
        Ok(curve)
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    pub fn min_error(&self) -> f64 {
        self.mean_error[self.chosen_min]
    }
}

/// First index attaining the smallest mean error.
pub fn select_min(mean_error: &[f64]) -> usize {
    let mut best = 0;
    for (g, &e) in mean_error.iter().enumerate() {
        if e < mean_error[best] {
            best = g;
        }
    }
    best
}

/// Most regularized point whose mean error is within one standard error of
/// the minimum.
pub fn select_1se(curve: &CvCurve) -> usize {
    let threshold = curve.mean_error[curve.chosen_min] + curve.std_error[curve.chosen_min];
    curve
        .mean_error
        .iter()
        .position(|&e| e <= threshold)
        .unwrap_or(curve.chosen_min)
}

/// The two penalized parametrizations that share the cross-validation code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PathModel {
    /// Lasso/elastic net on the original predictors, shrinking toward zero.
    StandardLasso { standardize: bool },
    /// Sum score plus deviation scores with only the deviations penalized,
    /// shrinking toward a common weight.
    EqualWeights,
}

impl PathModel {
    pub const STANDARD: Self = Self::StandardLasso { standardize: true };

    pub fn name(&self) -> &'static str {
        match self {
            Self::StandardLasso { .. } => "lasso",
            Self::EqualWeights => "equal",
        }
    }

    fn design(&self, data: &Dataset, alpha: f64) -> Result<(Dataset, PenaltySpec)> {
        match *self {
            Self::StandardLasso { standardize } => {
                let mut spec = PenaltySpec::elastic_net(alpha, 0.0, data.p());
                spec.standardize = standardize;
                Ok((data.clone(), spec))
            }
            Self::EqualWeights => Ok((reparametrize_dataset(data)?, equal_weights_spec(alpha, data.p()))),
        }
    }

    pub fn default_grid(&self, data: &Dataset, alpha: f64) -> Result<LambdaGrid> {
        let (design, spec) = self.design(data, alpha)?;
        default_grid(&design, &spec)
    }

    /// Path in the model's own parametrization: the original coefficients
    /// for the standard lasso, `(ξ, γ₁…γ_p)` for the equal-weights model.
    pub fn fit_path(&self, data: &Dataset, alpha: f64, grid: &LambdaGrid) -> Result<CoefficientPath> {
        let (design, spec) = self.design(data, alpha)?;
        fit_path(&design, &spec, grid)
    }

    /// Per-predictor coefficients on the original design at path point `k`.
    pub fn implied_fit(&self, path: &CoefficientPath, k: usize) -> LinearFit {
        match self {
            Self::StandardLasso { .. } => path.fit_at(k),
            Self::EqualWeights => EqualWeightsFit::from_path(path, k).implied_coefficients(),
        }
    }
}

fn map_folds<T, F>(k: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> Result<T> + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..k).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..k).map(f).collect()
    }
}

fn check_folds(data: &Dataset, folds: &FoldAssignment) -> Result<()> {
    if folds.n() != data.n() {
        return Err(Error::Dimension(format!(
            "fold assignment covers {} rows, data has {}",
            folds.n(),
            data.n()
        )));
    }
    if folds.fold_sizes().iter().any(|&s| s == 0 || s + 2 > data.n()) {
        return Err(Error::InvalidParameter(
            "every fold must be non-empty and leave at least two training rows".into(),
        ));
    }
    Ok(())
}

/// Held-out mse along a penalty path for every fold. `grid = None` uses the
/// default grid of the full data; either way the same grid serves all folds.
pub fn cross_validate_path(
    data: &Dataset,
    model: PathModel,
    alpha: f64,
    grid: Option<&LambdaGrid>,
    folds: &FoldAssignment,
) -> Result<CvCurve> {
    check_folds(data, folds)?;
    let owned;
    let grid = match grid {
        Some(g) => g,
        None => {
            owned = model.default_grid(data, alpha)?;
            &owned
        }
    };
    let fold_errors = map_folds(folds.k(), |f| {
        let (train_rows, test_rows) = folds.split(f);
        let train = data.subset(&train_rows)?;
        let test = data.subset(&test_rows)?;
        let path = model.fit_path(&train, alpha, grid)?;
        (0..grid.len())
            .map(|k| {
                let yhat = predict(&model.implied_fit(&path, k), test.predictors())?;
                Ok(mse(test.response().as_slice(), yhat.as_slice()))
            })
            .collect::<Result<Vec<f64>>>()
    })?;
    CvCurve::from_fold_errors(grid.values().to_vec(), &fold_errors)
}

/// `{0.00, 0.01, …, 1.00}`.
pub fn default_s_grid() -> Vec<f64> {
    (0..=100).map(|i| i as f64 / 100.0).collect()
}

/// Cross-validated choice of the slope shrinkage factor for a single
/// predictor. `s_grid` must be strictly increasing inside `[0, 1]`; ties in
/// mean error resolve toward the smaller `s`.
pub fn cross_validate_shrinkage(data: &Dataset, s_grid: &[f64], folds: &FoldAssignment) -> Result<CvCurve> {
    if data.p() != 1 {
        return Err(Error::Dimension(format!(
            "shrinkage cross-validation needs one predictor, got {}",
            data.p()
        )));
    }
    if s_grid.is_empty() || s_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter(
            "s grid must be non-empty and strictly increasing".into(),
        ));
    }
    let factors = s_grid
        .iter()
        .map(|&s| ShrinkageFactor::new(s))
        .collect::<Result<Vec<_>>>()?;
    check_folds(data, folds)?;

    let fold_errors = (0..folds.k())
        .map(|f| {
            let (train_rows, test_rows) = folds.split(f);
            let train = data.subset(&train_rows)?;
            let slope = fit_ols(&train)?.coefficients[0];
            let x_mean = crate::dataset::column_means(train.predictors())[0];
            let y_mean = crate::dataset::mean(train.response().as_slice());
            let x_test: Vec<f64> = test_rows.iter().map(|&i| data.predictors()[(i, 0)]).collect();
            let y_test: Vec<f64> = test_rows.iter().map(|&i| data.response()[i]).collect();
            Ok(factors
                .iter()
                .map(|&s| {
                    let fit = shrink_simple(slope, x_mean, y_mean, s);
                    let b = fit.coefficients[0];
                    let sq: f64 = x_test
                        .iter()
                        .zip(&y_test)
                        .map(|(x, y)| (y - fit.intercept - b * x).powi(2))
                        .sum();
                    sq / x_test.len() as f64
                })
                .collect())
        })
        .collect::<Result<Vec<Vec<f64>>>>()?;
    CvCurve::from_fold_errors(s_grid.to_vec(), &fold_errors)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn leave_one_out_and_balance() {
        let loo = kfold_split(10, 10, 7).unwrap();
        assert_eq!(loo.fold_sizes(), vec![1; 10]);
        let mut sizes = kfold_split(10, 3, 7).unwrap().fold_sizes();
        sizes.sort_unstable();
        assert_eq!(sizes, vec![3, 3, 4]);
        assert_eq!(kfold_split(10, 3, 99).unwrap(), kfold_split(10, 3, 99).unwrap());
        assert_ne!(kfold_split(50, 5, 1).unwrap(), kfold_split(50, 5, 2).unwrap());
        assert!(kfold_split(5, 6, 0).is_err());
        assert!(kfold_split(5, 1, 0).is_err());
    }

    #[test]
    fn split_partitions_rows() {
        let folds = kfold_split(11, 2, 3).unwrap();
        let (train, test) = folds.split(1);
        assert_eq!(train.len() + test.len(), 11);
        assert!(test.iter().all(|&i| folds.fold_of()[i] == 1));
    }

    fn curve(errors: Vec<f64>, se: Vec<f64>) -> CvCurve {
        let chosen_min = select_min(&errors);
        let mut c = CvCurve {
            grid: (0..errors.len()).map(|i| i as f64).collect(),
            mean_error: errors,
            std_error: se,
            chosen_min,
            chosen_1se: chosen_min,
        };
        c.chosen_1se = select_1se(&c);
        c
    }

    #[test]
    fn train_test_split_partitions() {
        let (train, test) = train_test_split(10, 0.7, 3).unwrap();
        assert_eq!((train.len(), test.len()), (7, 3));
        let mut all: Vec<usize> = train.iter().chain(&test).copied().collect();
        all.sort_unstable();
        assert_eq!(all, (0..10).collect::<Vec<_>>());
        assert_eq!(train_test_split(10, 0.7, 3).unwrap(), (train, test));
        assert!(train_test_split(10, 1.0, 3).is_err());
        assert!(train_test_split(3, 0.5, 3).is_err());
    }

    #[test]
    fn one_standard_error_rule() {
        let flat = curve(vec![2.0; 5], vec![0.0; 5]);
        assert_eq!(flat.chosen_min, 0);
        assert_eq!(flat.chosen_1se, 0);

        let c = curve(vec![5.0, 4.0, 3.0, 4.0, 5.0], vec![0.0, 0.0, 1.2, 0.0, 0.0]);
        assert_eq!(c.chosen_min, 2);
        assert_eq!(c.chosen_1se, 1);

        let tight = curve(vec![5.0, 4.0, 3.0, 4.0, 5.0], vec![0.0; 5]);
        assert_eq!(tight.chosen_1se, 2);
    }

    #[test]
    fn standard_error_of_fold_means() {
        let c = CvCurve::from_fold_errors(vec![1.0], &[vec![1.0], vec![2.0], vec![3.0]]).unwrap();
        assert_abs_diff_eq!(c.mean_error[0], 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(c.std_error[0], (1.0_f64 / 3.0).sqrt(), epsilon = 1e-15);
        assert!(CvCurve::from_fold_errors(vec![1.0, 2.0], &[vec![1.0]]).is_err());
    }

    #[test]
    fn noiseless_line_keeps_full_slope() {
        let xs: Vec<f64> = (0..20).map(|i| i as f64 * 0.37 - 2.0).collect();
        let rows: Vec<Vec<f64>> = xs.iter().map(|&x| vec![x]).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 1.5 + 2.0 * x).collect();
        let d = Dataset::from_rows(&rows, &ys).unwrap();
        let folds = kfold_split(20, 10, 4).unwrap();
        let c = cross_validate_shrinkage(&d, &default_s_grid(), &folds).unwrap();
        assert_eq!(c.grid[c.chosen_min], 1.0);
    }

    #[test]
    fn shrinkage_grid_validation() {
        let d = Dataset::from_rows(
            &[vec![1.0], vec![2.0], vec![3.0], vec![4.0]],
            &[1.0, 3.0, 2.0, 4.0],
        )
        .unwrap();
        let folds = kfold_split(4, 2, 0).unwrap();
        assert!(cross_validate_shrinkage(&d, &[0.5, 0.2], &folds).is_err());
        assert!(cross_validate_shrinkage(&d, &[0.5, 1.2], &folds).is_err());
        assert!(cross_validate_shrinkage(&d, &[], &folds).is_err());
        assert!(cross_validate_shrinkage(&d, &[0.0, 1.0], &kfold_split(5, 2, 0).unwrap()).is_err());
    }
}
