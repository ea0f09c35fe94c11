//! Classical composite-score weighting schemes.
//!
//! Each scheme turns the predictors into one composite `c_i = Σ_j w_j x_ij`.
//! The composite is then calibrated by a simple regression of the criterion
//! on `c` in the training data, so the schemes differ only in the relative
//! weights and are compared on held-out mean squared error.

use nalgebra::{DMatrix, DVector};

use crate::dataset::{column_means, Dataset};
use crate::error::{Error, Result};
use crate::linear::{evaluate, fit_ols, least_squares, predict, LinearFit, PredictionMetrics};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WeightScheme {
    /// Plain sum of raw scores.
    Unit,
    /// Raw scores weighted by their standard deviation.
    Sd,
    /// Raw scores weighted by the reciprocal of their standard deviation.
    InverseSd,
    /// Least-squares regression weights.
    LeastSquares,
}

impl WeightScheme {
    pub const ALL: [Self; 4] = [Self::Unit, Self::Sd, Self::InverseSd, Self::LeastSquares];

    pub fn name(self) -> &'static str {
        match self {
            Self::Unit => "unit",
            Self::Sd => "sd",
            Self::InverseSd => "inverse_sd",
            Self::LeastSquares => "least_squares",
        }
    }
}

/// Sample standard deviations with the `n − 1` denominator.
fn column_sds(x: &DMatrix<f64>) -> DVector<f64> {
    let means = column_means(x);
    let denom = (x.nrows() as f64 - 1.0).max(1.0);
    DVector::from_iterator(
        x.ncols(),
        x.column_iter()
            .enumerate()
            .map(|(j, c)| (c.iter().map(|v| (v - means[j]).powi(2)).sum::<f64>() / denom).sqrt()),
    )
}

pub fn scheme_weights(data: &Dataset, kind: WeightScheme) -> Result<DVector<f64>> {
    let p = data.p();
    match kind {
        WeightScheme::Unit => Ok(DVector::from_element(p, 1.0)),
        WeightScheme::Sd | WeightScheme::InverseSd => {
            let sds = column_sds(data.predictors());
            if let Some(j) = sds.iter().position(|&s| s == 0.0) {
                return Err(Error::ZeroVariance(data.column_names()[j].clone()));
            }
            Ok(if kind == WeightScheme::Sd {
                sds
            } else {
                sds.map(|s| 1.0 / s)
            })
        }
        WeightScheme::LeastSquares => Ok(fit_ols(data)?.coefficients),
    }
}

/// Composite built with `weights`, calibrated on `train`, expressed as
/// per-predictor coefficients (`slope · w_j`).
pub fn calibrated_fit(train: &Dataset, weights: &DVector<f64>) -> Result<LinearFit> {
    if weights.len() != train.p() {
        return Err(Error::Dimension(format!(
            "{} weights for {} predictors",
            weights.len(),
            train.p()
        )));
    }
    if train.n() < 2 {
        return Err(Error::TooFewObservations {
            needed: 2,
            got: train.n(),
        });
    }
    let composite = train.predictors() * weights;
    let x = DMatrix::from_column_slice(train.n(), 1, composite.as_slice());
    let calib = least_squares(&x, train.response());
    Ok(LinearFit::new(calib.intercept, weights * calib.coefficients[0]))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchemeResult {
    pub scheme: WeightScheme,
    pub metrics: PredictionMetrics,
}

/// Fits every scheme on `train` and scores it on `test`.
pub fn evaluate_schemes(train: &Dataset, test: &Dataset) -> Result<Vec<SchemeResult>> {
    if train.p() != test.p() {
        return Err(Error::Dimension(format!(
            "train has {} predictors, test has {}",
            train.p(),
            test.p()
        )));
    }
    WeightScheme::ALL
        .iter()
        .map(|&scheme| {
            let weights = scheme_weights(train, scheme)?;
            let fit = calibrated_fit(train, &weights)?;
            let yhat = predict(&fit, test.predictors())?;
            Ok(SchemeResult {
                scheme,
                metrics: evaluate(test.response().as_slice(), yhat.as_slice())?,
            })
        })
        .collect()
}
