use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// A predictor matrix (rows are persons, columns are item or scale scores)
/// together with the criterion it should predict.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    predictors: DMatrix<f64>,
    response: DVector<f64>,
    column_names: Vec<String>,
}

impl Dataset {
    pub fn new(predictors: DMatrix<f64>, response: DVector<f64>, column_names: Vec<String>) -> Result<Self> {
        let (n, p) = predictors.shape();
        if n == 0 || p == 0 {
            return Err(Error::Dimension(format!(
                "dataset needs at least one row and one column, got {n}x{p}"
            )));
        }
        if response.len() != n {
            return Err(Error::Dimension(format!(
                "response has {} entries but predictors have {n} rows",
                response.len()
            )));
        }
        if column_names.len() != p {
            return Err(Error::Dimension(format!(
                "{} column names for {p} predictors",
                column_names.len()
            )));
        }
        if predictors.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("predictors"));
        }
        if response.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("response"));
        }
        Ok(Self {
            predictors,
            response,
            column_names,
        })
    }

    /// Builds a dataset with generated column names `x1..xp`.
    pub fn from_matrix(predictors: DMatrix<f64>, response: DVector<f64>) -> Result<Self> {
        let names = default_names(predictors.ncols());
        Self::new(predictors, response, names)
    }

    /// Row-major convenience constructor.
    pub fn from_rows(rows: &[Vec<f64>], response: &[f64]) -> Result<Self> {
        let n = rows.len();
        let p = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != p) {
            return Err(Error::Dimension("ragged predictor rows".into()));
        }
        let x = DMatrix::from_fn(n, p, |i, j| rows[i][j]);
        Self::from_matrix(x, DVector::from_column_slice(response))
    }

    pub fn n(&self) -> usize {
        self.predictors.nrows()
    }

    pub fn p(&self) -> usize {
        self.predictors.ncols()
    }

    pub fn predictors(&self) -> &DMatrix<f64> {
        &self.predictors
    }

    pub fn response(&self) -> &DVector<f64> {
        &self.response
    }

    pub fn column_names(&self) -> &[String] {
        &self.column_names
    }

    /// Copies the given rows (in the given order) into a new dataset.
    pub fn subset(&self, rows: &[usize]) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::Dimension("empty row subset".into()));
        }
        let x = self.predictors.select_rows(rows);
        let y = DVector::from_iterator(rows.len(), rows.iter().map(|&i| self.response[i]));
        Ok(Self {
            predictors: x,
            response: y,
            column_names: self.column_names.clone(),
        })
    }
}

pub(crate) fn default_names(p: usize) -> Vec<String> {
    (1..=p).map(|j| format!("x{j}")).collect()
}

pub(crate) fn column_means(x: &DMatrix<f64>) -> DVector<f64> {
    let n = x.nrows() as f64;
    DVector::from_iterator(x.ncols(), x.column_iter().map(|c| c.sum() / n))
}

pub(crate) fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}
