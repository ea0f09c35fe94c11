//! Dense least squares, prediction and out-of-sample metrics.

use nalgebra::{DMatrix, DVector};

use crate::dataset::{column_means, mean, Dataset};
use crate::error::{Error, Result};

/// Singular values below this fraction of the largest are treated as zero.
pub const RANK_CUTOFF: f64 = 1e-10;

/// Intercept plus one slope per predictor column.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearFit {
    pub intercept: f64,
    pub coefficients: DVector<f64>,
}

impl LinearFit {
    pub fn new(intercept: f64, coefficients: DVector<f64>) -> Self {
        Self {
            intercept,
            coefficients,
        }
    }

    pub fn p(&self) -> usize {
        self.coefficients.len()
    }

    pub fn predict(&self, predictors: &DMatrix<f64>) -> Result<DVector<f64>> {
        predict(self, predictors)
    }
}

/// Mean squared error and Pearson correlation of a set of predictions.
///
/// `pearson_r` is `None` when either vector is constant, since the
/// correlation is undefined there.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PredictionMetrics {
    pub mse: f64,
    pub pearson_r: Option<f64>,
}

/// Ordinary least squares with an unpenalized intercept.
///
/// Rank-deficient designs get the minimum-norm solution of the centered
/// problem, so fitted values stay well defined for collinear columns.
pub fn fit_ols(data: &Dataset) -> Result<LinearFit> {
    if data.n() < 2 {
        return Err(Error::TooFewObservations {
            needed: 2,
            got: data.n(),
        });
    }
    Ok(least_squares(data.predictors(), data.response()))
}

pub(crate) fn least_squares(x: &DMatrix<f64>, y: &DVector<f64>) -> LinearFit {
    let x_mean = column_means(x);
    let y_mean = mean(y.as_slice());
    let mut xc = x.clone();
    for (j, mut col) in xc.column_iter_mut().enumerate() {
        col.add_scalar_mut(-x_mean[j]);
    }
    let yc = y.add_scalar(-y_mean);
    let beta = min_norm_solve(&xc, &yc);
    let intercept = y_mean - x_mean.dot(&beta);
    LinearFit::new(intercept, beta)
}

/// Minimum-norm least-squares solution of `x b = y`.
///
/// Tall inputs are first reduced by a Householder QR; the (small) remaining
/// factor is diagonalized with one-sided Jacobi rotations, which stays
/// accurate for exactly rank-deficient designs.
pub(crate) fn min_norm_solve(x: &DMatrix<f64>, y: &DVector<f64>) -> DVector<f64> {
    let p = x.ncols();
    if x.nrows() == 0 || p == 0 {
        return DVector::zeros(p);
    }
    let (mut a, rhs) = reduce_rows(x, y);
    let v = jacobi_orthogonalize(&mut a);

    // Columns of `a` are now `σ_j u_j`.
    let norms: Vec<f64> = a.column_iter().map(|c| c.norm()).collect();
    let cutoff = RANK_CUTOFF * norms.iter().copied().fold(0.0_f64, f64::max);
    let mut beta = DVector::zeros(p);
    for (j, &sigma) in norms.iter().enumerate() {
        if sigma > cutoff && sigma > 0.0 {
            let w = a.column(j).dot(&rhs) / (sigma * sigma);
            beta.axpy(w, &v.column(j), 1.0);
        }
    }
    beta
}

/// Right singular vectors of `x` whose singular value is at most `ratio`
/// times the largest one: the directions along which `‖x b‖` barely changes.
pub(crate) fn flat_directions(x: &DMatrix<f64>, ratio: f64) -> Vec<DVector<f64>> {
    let p = x.ncols();
    if x.nrows() == 0 || p == 0 {
        return Vec::new();
    }
    let (mut a, _) = reduce_rows(x, &DVector::zeros(x.nrows()));
    let v = jacobi_orthogonalize(&mut a);
    let norms: Vec<f64> = a.column_iter().map(|c| c.norm()).collect();
    let top = norms.iter().copied().fold(0.0_f64, f64::max);
    norms
        .iter()
        .enumerate()
        .filter(|&(_, &sigma)| sigma <= ratio * top)
        .map(|(j, _)| v.column(j).into_owned())
        .collect()
}

/// For `n > p`, replaces `(x, y)` by `(R, Qᵀy)` from a Householder QR, which
/// keeps the least-squares problem and the right singular vectors.
fn reduce_rows(x: &DMatrix<f64>, y: &DVector<f64>) -> (DMatrix<f64>, DVector<f64>) {
    let (n, p) = x.shape();
    if n > p {
        let qr = x.clone().qr();
        let mut qty = y.clone();
        qr.q_tr_mul(&mut qty);
        (qr.r(), qty.rows(0, p).into_owned())
    } else {
        (x.clone(), y.clone())
    }
}

/// Rotates the columns of `a` until they are mutually orthogonal and returns
/// the accumulated rotation `V`, so that the original matrix equals `a Vᵀ`.
fn jacobi_orthogonalize(a: &mut DMatrix<f64>) -> DMatrix<f64> {
    const MAX_SWEEPS: usize = 60;
    let p = a.ncols();
    let mut v = DMatrix::identity(p, p);
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for i in 0..p {
            for j in (i + 1)..p {
                let alpha = a.column(i).norm_squared();
                let beta = a.column(j).norm_squared();
                let gamma = a.column(i).dot(&a.column(j));
                if gamma == 0.0 || gamma.abs() <= f64::EPSILON * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate_columns(a, i, j, c, s);
                rotate_columns(&mut v, i, j, c, s);
            }
        }
        if !rotated {
            break;
        }
    }
    v
}

fn rotate_columns(m: &mut DMatrix<f64>, i: usize, j: usize, c: f64, s: f64) {
    for r in 0..m.nrows() {
        let (mi, mj) = (m[(r, i)], m[(r, j)]);
        m[(r, i)] = c * mi - s * mj;
        m[(r, j)] = s * mi + c * mj;
    }
}

/// `ŷ_i = α + Σ_j β_j x_ij`.
pub fn predict(fit: &LinearFit, predictors: &DMatrix<f64>) -> Result<DVector<f64>> {
    if predictors.ncols() != fit.p() {
        return Err(Error::Dimension(format!(
            "fit has {} coefficients but input has {} columns",
            fit.p(),
            predictors.ncols()
        )));
    }
    Ok((predictors * &fit.coefficients).add_scalar(fit.intercept))
}

pub fn evaluate(observed: &[f64], predicted: &[f64]) -> Result<PredictionMetrics> {
    if observed.len() != predicted.len() {
        return Err(Error::Dimension(format!(
            "{} observed values vs {} predictions",
            observed.len(),
            predicted.len()
        )));
    }
    if observed.len() < 2 {
        return Err(Error::TooFewObservations {
            needed: 2,
            got: observed.len(),
        });
    }
    Ok(PredictionMetrics {
        mse: mse(observed, predicted),
        pearson_r: pearson(observed, predicted),
    })
}

pub(crate) fn mse(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>() / a.len() as f64
}

fn pearson(a: &[f64], b: &[f64]) -> Option<f64> {
    let ma = mean(a);
    let mb = mean(b);
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        let (da, db) = (x - ma, y - mb);
        sab += da * db;
        saa += da * da;
        sbb += db * db;
    }
    if saa == 0.0 || sbb == 0.0 {
        return None;
    }
    Some((sab / (saa.sqrt() * sbb.sqrt())).clamp(-1.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn identity_and_constant_cases() {
        let xs = [1.0, 2.0, 4.0, 7.0];
        let d = Dataset::from_rows(&xs.map(|v| vec![v]), &xs).unwrap();
        let fit = fit_ols(&d).unwrap();
        assert_abs_diff_eq!(fit.intercept, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(fit.coefficients[0], 1.0, epsilon = 1e-12);

        let rows = vec![vec![1.0, 0.5], vec![2.0, -1.0], vec![3.0, 4.0]];
        let d = Dataset::from_rows(&rows, &[3.5; 3]).unwrap();
        let fit = fit_ols(&d).unwrap();
        assert_abs_diff_eq!(fit.intercept, 3.5, epsilon = 1e-12);
        assert!(fit.coefficients.iter().all(|b| b.abs() < 1e-12));
    }

    #[test]
    fn rejects_single_row() {
        let d = Dataset::from_rows(&[vec![1.0]], &[1.0]).unwrap();
        assert!(matches!(
            fit_ols(&d),
            Err(Error::TooFewObservations { needed: 2, got: 1 })
        ));
    }

    #[test]
    fn predict_checks_dimensions() {
        let fit = LinearFit::new(2.0, DVector::zeros(3));
        let x = DMatrix::from_element(4, 3, 9.0);
        assert!(predict(&fit, &x).unwrap().iter().all(|&v| v == 2.0));
        assert!(predict(&fit, &DMatrix::zeros(4, 2)).is_err());

        let fit = LinearFit::new(1.0, DVector::from_vec(vec![2.0, -1.0]));
        let row = DMatrix::from_row_slice(1, 2, &[3.0, 4.0]);
        assert_eq!(predict(&fit, &row).unwrap()[0], 1.0 + 6.0 - 4.0);
    }

    #[test]
    fn correlation_ignores_calibration() {
        let observed = [5.0, 6.0, 7.0, 8.0, 9.0];
        let a = evaluate(&observed, &[1.0, 2.0, 3.0, 4.0, 5.0]).unwrap();
        assert_abs_diff_eq!(a.pearson_r.unwrap(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(a.mse, 16.0, epsilon = 1e-12);

        let b = evaluate(&observed, &[6.0, 6.5, 7.0, 7.5, 8.0]).unwrap();
        assert_abs_diff_eq!(b.pearson_r.unwrap(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(b.mse, 0.5, epsilon = 1e-12);

        let c = evaluate(&observed, &observed).unwrap();
        assert_eq!(c.mse, 0.0);
        assert_abs_diff_eq!(c.pearson_r.unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn evaluate_edge_cases() {
        assert!(evaluate(&[1.0, 2.0], &[1.0]).is_err());
        assert!(evaluate(&[1.0], &[1.0]).is_err());
        let m = evaluate(&[1.0, 2.0, 3.0], &[2.0, 2.0, 2.0]).unwrap();
        assert_eq!(m.pearson_r, None);
        assert_abs_diff_eq!(m.mse, 2.0 / 3.0, epsilon = 1e-15);
    }

    #[test]
    fn exact_duplicate_column_splits_the_slope() {
        let x: Vec<f64> = (0..44)
            .map(|i| ((i * 37) % 11) as f64 - 3.0 + 0.1 * i as f64)
            .collect();
        let y: Vec<f64> = x
            .iter()
            .enumerate()
            .map(|(i, v)| 0.8 * v + ((i * 7) % 5) as f64)
            .collect();
        let single = least_squares(
            &DMatrix::from_column_slice(44, 1, &x),
            &DVector::from_vec(y.clone()),
        );
        let dup = DMatrix::from_fn(44, 2, |i, _| x[i]);
        let both = least_squares(&dup, &DVector::from_vec(y));
        assert_abs_diff_eq!(
            both.coefficients[0],
            single.coefficients[0] / 2.0,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            both.coefficients[1],
            single.coefficients[0] / 2.0,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(both.intercept, single.intercept, epsilon = 1e-12);
    }

    #[test]
    fn wide_system_gets_minimum_norm_solution() {
        // One equation, three unknowns: b = x (xᵀx)⁻¹ y.
        let x = DMatrix::from_row_slice(1, 3, &[1.0, 2.0, 2.0]);
        let b = min_norm_solve(&x, &DVector::from_vec(vec![9.0]));
        assert_abs_diff_eq!(b[0], 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(b[1], 2.0, epsilon = 1e-14);
        assert_abs_diff_eq!(b[2], 2.0, epsilon = 1e-14);
    }
}
