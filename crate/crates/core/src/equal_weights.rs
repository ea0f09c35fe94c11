//! Shrinkage toward a common regression weight.
//!
//! Writing every predictor as the person mean plus a deviation,
//! `X_j = X• + Z_j` with `X• = X₊ / p`, turns the multiple regression into
//!
//! ```text
//! y = α + ξ X₊ + γ₁ Z₁ + … + γ_p Z_p + ε
//! ```
//!
//! Penalizing only the `γ` block pulls the model toward the sum-score
//! regression `α + ξ X₊`, i.e. toward equal weights, instead of toward zero.
//! The deviations sum to zero in every row, so the `Z` block is exactly
//! collinear; the penalized problem is still well posed and the unpenalized
//! fit uses the minimum-norm solution.

use nalgebra::{DMatrix, DVector};

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::linear::{fit_ols, LinearFit};
use crate::penalized::{fit_penalized, CoefficientPath, LambdaGrid, PenaltySpec};
use crate::selection::{cross_validate_path, CvCurve, FoldAssignment, PathModel};

pub const SUM_SCORE_NAME: &str = "Sum";

#[derive(Debug, Clone, PartialEq)]
pub struct EqualWeightsDesign {
    sum_score: DVector<f64>,
    deviations: DMatrix<f64>,
}

impl EqualWeightsDesign {
    /// `X₊`, the per-row sum of the predictors.
    pub fn sum_score(&self) -> &DVector<f64> {
        &self.sum_score
    }

    /// `Z_j = X_j − X₊/p`.
    pub fn deviations(&self) -> &DMatrix<f64> {
        &self.deviations
    }

    pub fn p(&self) -> usize {
        self.deviations.ncols()
    }

    pub fn n(&self) -> usize {
        self.deviations.nrows()
    }

    /// `[X₊ | Z₁ … Z_p]`.
    pub fn augmented(&self) -> DMatrix<f64> {
        let (n, p) = self.deviations.shape();
        DMatrix::from_fn(n, p + 1, |i, j| {
            if j == 0 {
                self.sum_score[i]
            } else {
                self.deviations[(i, j - 1)]
            }
        })
    }
}

pub fn reparametrize(data: &Dataset) -> Result<EqualWeightsDesign> {
    reparametrize_matrix(data.predictors())
}

pub fn reparametrize_matrix(x: &DMatrix<f64>) -> Result<EqualWeightsDesign> {
    let (n, p) = x.shape();
    if p < 2 {
        return Err(Error::Dimension(format!(
            "equal-weights reparametrization needs at least 2 predictors, got {p}"
        )));
    }
    let sum_score = DVector::from_iterator(n, x.row_iter().map(|row| row.sum()));
    let pf = p as f64;
    let deviations = DMatrix::from_fn(n, p, |i, j| x[(i, j)] - sum_score[i] / pf);
    Ok(EqualWeightsDesign {
        sum_score,
        deviations,
    })
}

/// The augmented design as a dataset, columns named `Sum` then the original
/// predictor names.
pub fn reparametrize_dataset(data: &Dataset) -> Result<Dataset> {
    let design = reparametrize(data)?;
    let mut names = vec![SUM_SCORE_NAME.to_string()];
    names.extend(data.column_names().iter().cloned());
    Dataset::new(design.augmented(), data.response().clone(), names)
}

/// Penalty on the augmented design: `ξ` free, every `γ_j` penalized, and no
/// standardization so the deviations keep the shared item scale.
pub fn equal_weights_spec(alpha: f64, p: usize) -> PenaltySpec {
    let mut penalty_factors = vec![1.0; p + 1];
    penalty_factors[0] = 0.0;
    PenaltySpec {
        alpha,
        lambda: 0.0,
        penalty_factors,
        standardize: false,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EqualWeightsFit {
    pub intercept: f64,
    /// Coefficient of the sum score.
    pub xi: f64,
    /// Coefficients of the deviation scores.
    pub gammas: DVector<f64>,
}

impl EqualWeightsFit {
    /// Reads `(ξ, γ)` from row `k` of a path fitted on the augmented design.
    pub fn from_path(path: &CoefficientPath, k: usize) -> Self {
        Self::from_augmented(&path.fit_at(k))
    }

    fn from_augmented(fit: &LinearFit) -> Self {
        let c = &fit.coefficients;
        Self {
            intercept: fit.intercept,
            xi: c[0],
            gammas: c.rows(1, c.len() - 1).into_owned(),
        }
    }

    pub fn p(&self) -> usize {
        self.gammas.len()
    }

    pub fn predict(&self, design: &EqualWeightsDesign) -> Result<DVector<f64>> {
        if design.p() != self.p() {
            return Err(Error::Dimension(format!(
                "fit has {} deviation coefficients, design has {}",
                self.p(),
                design.p()
            )));
        }
        Ok((design.sum_score() * self.xi + design.deviations() * &self.gammas).add_scalar(self.intercept))
    }

    /// Per-predictor weights `β_j = ξ + γ_j − γ̄`; predictions on the original
    /// design match [`EqualWeightsFit::predict`] on the augmented one.
    pub fn implied_coefficients(&self) -> LinearFit {
        let gamma_bar = self.gammas.mean();
        LinearFit::new(self.intercept, self.gammas.add_scalar(self.xi - gamma_bar))
    }
}

pub fn implied_coefficients(fit: &EqualWeightsFit) -> LinearFit {
    fit.implied_coefficients()
}

/// Penalty path over `(ξ, γ)`. Without a grid, the default 100-point grid
/// starting at the augmented design's `lambda_max` is used.
pub fn fit_equal_shrinkage(data: &Dataset, alpha: f64, grid: Option<&LambdaGrid>) -> Result<CoefficientPath> {
    let model = PathModel::EqualWeights;
    match grid {
        Some(g) => model.fit_path(data, alpha, g),
        None => {
            let g = model.default_grid(data, alpha)?;
            model.fit_path(data, alpha, &g)
        }
    }
}

/// Single fit at a given λ; `λ = 0` gives the minimum-norm least-squares fit
/// of the augmented design.
pub fn fit_equal_at(data: &Dataset, alpha: f64, lambda: f64) -> Result<EqualWeightsFit> {
    let design = reparametrize_dataset(data)?;
    let spec = equal_weights_spec(alpha, data.p()).with_lambda(lambda);
    Ok(EqualWeightsFit::from_augmented(&fit_penalized(&design, &spec)?))
}

/// Cross-validation results for one parametrization, refit on the full data.
#[derive(Debug, Clone)]
pub struct ModelCv {
    pub model: PathModel,
    pub curve: CvCurve,
    pub path: CoefficientPath,
}

impl ModelCv {
    fn run(data: &Dataset, model: PathModel, alpha: f64, folds: &FoldAssignment) -> Result<Self> {
        let grid = model.default_grid(data, alpha)?;
        let curve = cross_validate_path(data, model, alpha, Some(&grid), folds)?;
        let path = model.fit_path(data, alpha, &grid)?;
        Ok(Self { model, curve, path })
    }

    pub fn min_cv_mse(&self) -> f64 {
        self.curve.min_error()
    }

    pub fn n_nonzero(&self) -> Vec<usize> {
        (0..self.path.len()).map(|k| self.path.n_nonzero(k)).collect()
    }

    pub fn fit_min(&self) -> LinearFit {
        self.path.fit_at(self.curve.chosen_min)
    }

    pub fn fit_1se(&self) -> LinearFit {
        self.path.fit_at(self.curve.chosen_1se)
    }
}

pub const TABLE_COLUMNS: [&str; 9] = [
    "ols_zero",
    "min_zero",
    "1se_zero",
    "ols_equal",
    "min_equal",
    "1se_equal",
    "implied_ols_equal",
    "implied_min_equal",
    "implied_1se_equal",
];

#[derive(Debug, Clone, PartialEq)]
pub struct TableRow {
    pub term: String,
    /// One entry per [`TABLE_COLUMNS`]; `None` where the term does not exist
    /// in that parametrization.
    pub values: [Option<f64>; 9],
}

/// Side-by-side comparison of the standard lasso and the equal-weights lasso
/// on one shared fold assignment.
#[derive(Debug, Clone)]
pub struct ModelComparison {
    pub folds: FoldAssignment,
    pub standard: ModelCv,
    pub equal: ModelCv,
    pub table: Vec<TableRow>,
}

pub fn compare_models(
    data: &Dataset,
    alpha: f64,
    standardize: bool,
    folds: &FoldAssignment,
) -> Result<ModelComparison> {
    if data.p() < 2 {
        return Err(Error::Dimension(
            "model comparison needs at least 2 predictors".into(),
        ));
    }
    let standard = ModelCv::run(data, PathModel::StandardLasso { standardize }, alpha, folds)?;
    let equal = ModelCv::run(data, PathModel::EqualWeights, alpha, folds)?;

    let ols = fit_ols(data)?;
    let ols_equal = fit_equal_at(data, alpha, 0.0)?;
    let zero_fits = [ols, standard.fit_min(), standard.fit_1se()];
    let equal_fits = [
        ols_equal,
        EqualWeightsFit::from_path(&equal.path, equal.curve.chosen_min),
        EqualWeightsFit::from_path(&equal.path, equal.curve.chosen_1se),
    ];
    let implied: Vec<LinearFit> = equal_fits.iter().map(|f| f.implied_coefficients()).collect();

    let mut table = Vec::with_capacity(data.p() + 2);
    let mut intercept = [None; 9];
    let mut sum = [None; 9];
    for c in 0..3 {
        intercept[c] = Some(zero_fits[c].intercept);
        intercept[3 + c] = Some(equal_fits[c].intercept);
        intercept[6 + c] = Some(implied[c].intercept);
        sum[3 + c] = Some(equal_fits[c].xi);
    }
    table.push(TableRow {
        term: "Intercept".into(),
        values: intercept,
    });
    table.push(TableRow {
        term: SUM_SCORE_NAME.into(),
        values: sum,
    });
    for (j, name) in data.column_names().iter().enumerate() {
        let mut values = [None; 9];
        for c in 0..3 {
            values[c] = Some(zero_fits[c].coefficients[j]);
            values[3 + c] = Some(equal_fits[c].gammas[j]);
            values[6 + c] = Some(implied[c].coefficients[j]);
        }
        table.push(TableRow {
            term: name.clone(),
            values,
        });
    }

    Ok(ModelComparison {
        folds: folds.clone(),
        standard,
        equal,
        table,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linear::predict;
    use approx::assert_abs_diff_eq;

    #[test]
    fn hand_reparametrization() {
        let x = DMatrix::from_row_slice(3, 2, &[1.0, 3.0, 2.0, 2.0, 0.0, 0.0]);
        let d = reparametrize_matrix(&x).unwrap();
        assert_eq!(d.sum_score().as_slice(), &[4.0, 4.0, 0.0]);
        assert_eq!(
            d.deviations().row(0).iter().copied().collect::<Vec<_>>(),
            vec![-1.0, 1.0]
        );
        assert!(d.deviations().row(1).iter().all(|&z| z == 0.0));
        assert!(d.deviations().row(2).iter().all(|&z| z == 0.0));
        assert!(reparametrize_matrix(&DMatrix::zeros(3, 1)).is_err());
    }

    #[test]
    fn implied_hand_values() {
        let fit = EqualWeightsFit {
            intercept: 0.5,
            xi: 1.0,
            gammas: DVector::from_vec(vec![0.4, -0.4]),
        };
        let lf = fit.implied_coefficients();
        assert_abs_diff_eq!(lf.coefficients[0], 1.4, epsilon = 1e-15);
        assert_abs_diff_eq!(lf.coefficients[1], 0.6, epsilon = 1e-15);
        assert_eq!(lf.intercept, 0.5);

        let flat = EqualWeightsFit {
            intercept: 0.0,
            xi: 0.7,
            gammas: DVector::zeros(4),
        };
        assert!(flat.implied_coefficients().coefficients.iter().all(|&b| b == 0.7));
    }

    fn sample() -> Dataset {
        let rows = vec![
            vec![3.0, 4.0, 2.0],
            vec![1.0, 2.0, 2.5],
            vec![4.0, 3.0, 5.0],
            vec![2.0, 2.0, 1.0],
            vec![5.0, 4.5, 4.0],
            vec![0.5, 1.0, 2.0],
            vec![3.5, 2.0, 3.0],
            vec![2.5, 3.5, 1.5],
        ];
        let y = [10.0, 6.5, 13.0, 5.5, 15.0, 3.0, 9.5, 8.0];
        Dataset::from_rows(&rows, &y).unwrap()
    }

    #[test]
    fn lambda_zero_reproduces_ols_fitted_values() {
        let d = sample();
        let ols_hat = predict(&fit_ols(&d).unwrap(), d.predictors()).unwrap();
        let eq = fit_equal_at(&d, 1.0, 0.0).unwrap();
        let eq_hat = eq.predict(&reparametrize(&d).unwrap()).unwrap();
        for i in 0..d.n() {
            assert_abs_diff_eq!(ols_hat[i], eq_hat[i], epsilon = 1e-8);
        }
    }

    #[test]
    fn top_of_path_is_sum_score_regression() {
        let d = sample();
        let path = fit_equal_shrinkage(&d, 1.0, None).unwrap();
        let top = EqualWeightsFit::from_path(&path, 0);
        assert!(top.gammas.iter().all(|&g| g == 0.0));
        let design = reparametrize(&d).unwrap();
        let simple = fit_ols(
            &Dataset::from_matrix(
                DMatrix::from_column_slice(d.n(), 1, design.sum_score().as_slice()),
                d.response().clone(),
            )
            .unwrap(),
        )
        .unwrap();
        assert_abs_diff_eq!(top.xi, simple.coefficients[0], epsilon = 1e-6);
        assert_abs_diff_eq!(top.intercept, simple.intercept, epsilon = 1e-6);
        let implied = top.implied_coefficients();
        assert!(implied.coefficients.iter().all(|&b| (b - top.xi).abs() < 1e-15));
    }

    #[test]
    fn comparison_table_layout() {
        let d = sample();
        let folds = crate::selection::kfold_split(d.n(), 4, 11).unwrap();
        let cmp = compare_models(&d, 1.0, true, &folds).unwrap();
        let terms: Vec<&str> = cmp.table.iter().map(|r| r.term.as_str()).collect();
        assert_eq!(terms, vec!["Intercept", "Sum", "x1", "x2", "x3"]);
        assert!(cmp.table[1].values[..3].iter().all(Option::is_none));
        assert!(cmp.table[1].values[3..6].iter().all(Option::is_some));
        assert!(cmp.standard.curve.chosen_1se <= cmp.standard.curve.chosen_min);
        assert_eq!(cmp.standard.curve.len(), 100);
    }
}
