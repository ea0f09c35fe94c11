//! Reduced-variance regression for a single predictor.
//!
//! The least-squares slope `b` is unbiased but noisy. Multiplying it by a
//! factor `s` in `[0, 1]` adds squared bias `(1 - s)² β²` while cutting the
//! sampling variance to `s² σ²_b`; the closed forms below give the factor that
//! balances the two. In practice `β` and `σ²_b` are unknown, so the simulation
//! picks `s` by cross-validation instead and uses these formulas only as a
//! reference point.

use nalgebra::DVector;

use crate::dataset::{column_means, mean, Dataset};
use crate::error::{Error, Result};
use crate::linear::{fit_ols, LinearFit};

/// Multiplier applied to the least-squares slope, `0 ≤ s ≤ 1`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct ShrinkageFactor(f64);

impl ShrinkageFactor {
    pub const NONE: Self = Self(1.0);
    pub const FULL: Self = Self(0.0);

    pub fn new(s: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&s) {
            return Err(Error::InvalidParameter(format!(
                "shrinkage factor must lie in [0, 1], got {s}"
            )));
        }
        Ok(Self(s))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Population slope and the sampling variance of its least-squares estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlopeSamplingModel {
    beta: f64,
    sigma2_b: f64,
}

impl SlopeSamplingModel {
    pub fn new(beta: f64, sigma2_b: f64) -> Result<Self> {
        if !beta.is_finite() || !sigma2_b.is_finite() {
            return Err(Error::NonFinite("slope sampling model"));
        }
        if sigma2_b < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "sampling variance must be nonnegative, got {sigma2_b}"
            )));
        }
        Ok(Self { beta, sigma2_b })
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn sigma2_b(&self) -> f64 {
        self.sigma2_b
    }
}

/// Optimal factor together with a flag for the `β = 0` case, where the
/// all-bias solution `s = 0` is exact rather than the result of the formula.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimalShrinkage {
    pub factor: ShrinkageFactor,
    pub degenerate: bool,
}

/// `E(sb − β)² = s²σ²_b + (1 − s)²β²`.
pub fn expected_squared_error(s: ShrinkageFactor, model: &SlopeSamplingModel) -> f64 {
    let s = s.value();
    s * s * model.sigma2_b + (1.0 - s) * (1.0 - s) * model.beta * model.beta
}

/// Minimizer of [`expected_squared_error`]: `1 / (1 + σ²_b / β²)`.
pub fn optimal_s_sampling(model: &SlopeSamplingModel) -> OptimalShrinkage {
    if model.beta == 0.0 {
        return OptimalShrinkage {
            factor: ShrinkageFactor::FULL,
            degenerate: true,
        };
    }
    let b2 = model.beta * model.beta;
    // β²/(β² + σ²_b) is the same quantity without overflow in σ²_b/β².
    OptimalShrinkage {
        factor: ShrinkageFactor(b2 / (b2 + model.sigma2_b)),
        degenerate: false,
    }
}

/// Optimal factor expressed through the population correlation `r` and the
/// sample size `n`: `1 / (1 + ((1 − r²)/r²) / (n − 3))`.
pub fn optimal_s_population(r: f64, n: usize) -> Result<ShrinkageFactor> {
    if n <= 3 {
        return Err(Error::InvalidParameter(format!(
            "sample size must exceed 3, got {n}"
        )));
    }
    if !r.is_finite() || r == 0.0 || r.abs() >= 1.0 {
        return Err(Error::InvalidParameter(format!(
            "correlation must satisfy 0 < |r| < 1, got {r}"
        )));
    }
    let r2 = r * r;
    let ratio = ((1.0 - r2) / r2) / (n as f64 - 3.0);
    Ok(ShrinkageFactor(1.0 / (1.0 + ratio)))
}

/// Simple regression with the slope shrunk by `s`.
///
/// The intercept is refit at the shrunken slope, `ȳ − s·b·x̄`, so `s = 0`
/// predicts the sample mean everywhere and `s = 1` is plain least squares.
pub fn apply_shrinkage(data: &Dataset, s: ShrinkageFactor) -> Result<LinearFit> {
    if data.p() != 1 {
        return Err(Error::Dimension(format!(
            "shrinkage applies to simple regression, got {} predictors",
            data.p()
        )));
    }
    let ols = fit_ols(data)?;
    let x_mean = column_means(data.predictors())[0];
    let y_mean = mean(data.response().as_slice());
    Ok(shrink_simple(ols.coefficients[0], x_mean, y_mean, s))
}

pub(crate) fn shrink_simple(slope: f64, x_mean: f64, y_mean: f64, s: ShrinkageFactor) -> LinearFit {
    let shrunk = s.value() * slope;
    LinearFit::new(y_mean - x_mean * shrunk, DVector::from_element(1, shrunk))
}
