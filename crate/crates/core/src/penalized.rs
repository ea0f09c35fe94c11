//! Elastic-net penalized least squares by cyclic coordinate descent.
//!
//! Minimizes over `(α, β)`:
//!
//! ```text
//! (1/2n) Σ_i (y_i − α − Σ_j β_j x̃_ij)² + λ Σ_j w_j [ a |β_j| + (1 − a)/2 β_j² ]
//! ```
//!
//! where `a` is the L1/L2 mixing weight, `w_j` the per-coefficient penalty
//! factor (`w_j = 0` leaves a coefficient unpenalized) and `x̃` the centered,
//! optionally unit-variance columns. The intercept is never penalized.
//! Coefficients are always reported on the original column scale.

use nalgebra::{DMatrix, DVector};

use crate::dataset::{column_means, mean, Dataset};
use crate::error::{Error, Result};
use crate::linear::{flat_directions, min_norm_solve, LinearFit};

pub const CONVERGENCE_TOLERANCE: f64 = 1e-7;
pub const KKT_TOLERANCE: f64 = 1e-6;
pub const MAX_CYCLES: usize = 100_000;
pub const DEFAULT_GRID_LEN: usize = 100;
pub const DEFAULT_MIN_RATIO: f64 = 1e-3;

/// Internal stationarity target. Tighter than [`KKT_TOLERANCE`] so the
/// public residual-based check has headroom for rounding.
const INTERNAL_KKT_TARGET: f64 = 1e-9;

/// Singular-value ratio below which a design direction gets explicit line
/// searches during coordinate descent.
const FLAT_DIRECTION_RATIO: f64 = 1e-3;

/// `sign(z) · max(|z| − t, 0)`.
#[inline]
pub fn soft_threshold(z: f64, t: f64) -> f64 {
    debug_assert!(t >= 0.0, "threshold must be nonnegative");
    if z > t {
        z - t
    } else if z < -t {
        z + t
    } else {
        0.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PenaltySpec {
    /// Elastic-net mixing: 1 is the lasso, 0 is ridge.
    pub alpha: f64,
    pub lambda: f64,
    pub penalty_factors: Vec<f64>,
    /// Scale columns to unit variance (1/n denominator) before penalizing.
    pub standardize: bool,
}

impl PenaltySpec {
    /// Standardized lasso with every coefficient penalized equally.
    pub fn lasso(lambda: f64, q: usize) -> Self {
        Self::elastic_net(1.0, lambda, q)
    }

    pub fn elastic_net(alpha: f64, lambda: f64, q: usize) -> Self {
        Self {
            alpha,
            lambda,
            penalty_factors: vec![1.0; q],
            standardize: true,
        }
    }

    pub fn with_lambda(&self, lambda: f64) -> Self {
        Self {
            lambda,
            ..self.clone()
        }
    }

    pub fn validate(&self, q: usize) -> Result<()> {
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(Error::InvalidParameter(format!(
                "alpha must lie in [0, 1], got {}",
                self.alpha
            )));
        }
        if !self.lambda.is_finite() || self.lambda < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "lambda must be finite and nonnegative, got {}",
                self.lambda
            )));
        }
        if self.penalty_factors.len() != q {
            return Err(Error::Dimension(format!(
                "{} penalty factors for {q} coefficients",
                self.penalty_factors.len()
            )));
        }
        if self
            .penalty_factors
            .iter()
            .any(|w| !w.is_finite() || *w < 0.0)
        {
            return Err(Error::InvalidParameter(
                "penalty factors must be finite and nonnegative".into(),
            ));
        }
        if self.lambda > 0.0 && self.penalty_factors.iter().all(|&w| w == 0.0) {
            return Err(Error::InvalidParameter(
                "lambda > 0 but every penalty factor is zero".into(),
            ));
        }
        Ok(())
    }
}

/// Strictly decreasing, strictly positive penalty strengths.
#[derive(Debug, Clone, PartialEq)]
pub struct LambdaGrid(Vec<f64>);

impl LambdaGrid {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidParameter("empty lambda grid".into()));
        }
        if values.iter().any(|v| !v.is_finite() || *v <= 0.0) {
            return Err(Error::InvalidParameter(
                "lambda grid values must be finite and positive".into(),
            ));
        }
        if values.windows(2).any(|w| w[1] >= w[0]) {
            return Err(Error::InvalidParameter(
                "lambda grid must be strictly decreasing".into(),
            ));
        }
        Ok(Self(values))
    }

    /// `len` log-spaced values from `max` down to `max · min_ratio`.
    pub fn log_spaced(max: f64, min_ratio: f64, len: usize) -> Result<Self> {
        if len == 1 {
            return Self::new(vec![max]);
        }
        if !(min_ratio > 0.0 && min_ratio < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "min_ratio must lie in (0, 1), got {min_ratio}"
            )));
        }
        let (hi, lo) = (max.ln(), (max * min_ratio).ln());
        let step = (hi - lo) / (len - 1) as f64;
        Self::new((0..len).map(|k| (hi - step * k as f64).exp()).collect())
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Solutions along a lambda grid, one row per grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientPath {
    grid: LambdaGrid,
    intercepts: Vec<f64>,
    coefficients: DMatrix<f64>,
}

impl CoefficientPath {
    pub fn grid(&self) -> &LambdaGrid {
        &self.grid
    }

    pub fn intercepts(&self) -> &[f64] {
        &self.intercepts
    }

    /// `m × q` matrix; row `k` holds the solution at `grid[k]`.
    pub fn coefficients(&self) -> &DMatrix<f64> {
        &self.coefficients
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    pub fn fit_at(&self, k: usize) -> LinearFit {
        LinearFit::new(
            self.intercepts[k],
            self.coefficients.row(k).transpose().into_owned(),
        )
    }

    pub fn n_nonzero(&self, k: usize) -> usize {
        self.coefficients.row(k).iter().filter(|b| **b != 0.0).count()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KktReport {
    pub passed: bool,
    pub max_violation: f64,
}

/// Centered (and optionally scaled) design with its Gram matrix.
struct PreparedDesign {
    x_mean: DVector<f64>,
    scale: Vec<f64>,
    y_mean: f64,
    /// `X̃ᵀX̃ / n`
    gram: DMatrix<f64>,
    /// `X̃ᵀỹ / n`
    xty: DVector<f64>,
    /// `ỹᵀỹ / n`
    #[cfg(any(debug_assertions, test))]
    yty: f64,
    x: DMatrix<f64>,
    y: DVector<f64>,
    /// Nearly flat directions of the loss with their images `G v`.
    flat: Vec<(DVector<f64>, DVector<f64>)>,
}

impl PreparedDesign {
    fn new(data: &Dataset, standardize: bool) -> Self {
        let x_raw = data.predictors();
        let n = data.n() as f64;
        let x_mean = column_means(x_raw);
        let y_mean = mean(data.response().as_slice());
        let mut x = x_raw.clone();
        let mut scale = vec![1.0; x.ncols()];
        for (j, mut col) in x.column_iter_mut().enumerate() {
            col.add_scalar_mut(-x_mean[j]);
            if standardize {
                let sd = (col.norm_squared() / n).sqrt();
                if sd > 0.0 {
                    col /= sd;
                    scale[j] = sd;
                }
            }
        }
        let y = data.response().add_scalar(-y_mean);
        let gram = x.tr_mul(&x) / n;
        let xty = x.tr_mul(&y) / n;
        let flat = flat_directions(&x, FLAT_DIRECTION_RATIO)
            .into_iter()
            .map(|v| {
                let gv = &gram * &v;
                (v, gv)
            })
            .collect();
        Self {
            x_mean,
            scale,
            y_mean,
            gram,
            xty,
            #[cfg(any(debug_assertions, test))]
            yty: y.norm_squared() / n,
            x,
            y,
            flat,
        }
    }

    fn q(&self) -> usize {
        self.scale.len()
    }

    fn to_original(&self, beta: &[f64]) -> LinearFit {
        let coefficients =
            DVector::from_iterator(beta.len(), beta.iter().zip(&self.scale).map(|(b, s)| b / s));
        let intercept = self.y_mean - self.x_mean.dot(&coefficients);
        LinearFit::new(intercept, coefficients)
    }

    /// `X̃ᵀr / n` for residual `r = ỹ − X̃β`.
    fn gradient(&self, beta: &DVector<f64>) -> DVector<f64> {
        &self.xty - &self.gram * beta
    }

    #[cfg(any(debug_assertions, test))]
    fn objective(&self, beta: &DVector<f64>, lambda: f64, alpha: f64, w: &[f64]) -> f64 {
        let loss = 0.5 * (self.yty - 2.0 * self.xty.dot(beta) + beta.dot(&(&self.gram * beta)));
        loss + lambda * penalty(beta.as_slice(), alpha, w)
    }
}

#[cfg(any(debug_assertions, test))]
fn penalty(beta: &[f64], alpha: f64, w: &[f64]) -> f64 {
    beta.iter()
        .zip(w)
        .map(|(b, wj)| wj * (alpha * b.abs() + 0.5 * (1.0 - alpha) * b * b))
        .sum()
}

/// Exact minimizer `t` of the objective along `β + t v`, where `gv = G v`.
///
/// Restricted to a line the objective is a convex piecewise quadratic whose
/// derivative `b + a t` is nondecreasing and jumps up at each kink where a
/// penalized `β_j + t v_j` crosses zero. Walking the kinks in order finds
/// the zero of the derivative (or the kink it jumps across).
fn line_step(
    v: &DVector<f64>,
    gv: &DVector<f64>,
    beta: &DVector<f64>,
    grad: &DVector<f64>,
    lambda: f64,
    alpha: f64,
    w: &[f64],
) -> f64 {
    // Stay put when the current point is already optimal on this line up to
    // rounding: on an exactly flat stretch a rounding-level slope would
    // otherwise carry the step to the far end and back on the next sweep.
    let mut right = -grad.dot(v);
    let mut left = right;
    let mut scale = grad
        .iter()
        .zip(v.iter())
        .map(|(g, vj)| (g * vj).abs())
        .sum::<f64>();
    for j in 0..v.len() {
        let (l1, l2) = (lambda * w[j] * alpha, lambda * w[j] * (1.0 - alpha));
        let smooth = l2 * beta[j] * v[j];
        let kink = l1 * v[j].abs();
        let (r, l) = if beta[j] != 0.0 {
            let s = l1 * beta[j].signum() * v[j];
            (s, s)
        } else {
            (kink, -kink)
        };
        right += smooth + r;
        left += smooth + l;
        scale += smooth.abs() + kink;
    }
    let slack = 1e-12 * scale;
    if right >= -slack && left <= slack {
        return 0.0;
    }

    let mut a = v.dot(gv);
    // Derivative left of every kink, where each sign(β_j + t v_j) = -sign(v_j).
    let mut b = -grad.dot(v);
    let mut kinks = Vec::with_capacity(v.len());
    for j in 0..v.len() {
        let (l1, l2) = (lambda * w[j] * alpha, lambda * w[j] * (1.0 - alpha));
        a += l2 * v[j] * v[j];
        b += l2 * beta[j] * v[j];
        if l1 > 0.0 && v[j] != 0.0 {
            b -= l1 * v[j].abs();
            kinks.push((-beta[j] / v[j], 2.0 * l1 * v[j].abs()));
        }
    }
    kinks.sort_by(|x, y| x.0.total_cmp(&y.0));

    let flat = a <= f64::EPSILON * (1.0 + v.dot(gv).abs());
    let mut previous = f64::NEG_INFINITY;
    for (knot, jump) in kinks {
        if flat {
            if b > 0.0 {
                return if previous.is_finite() { previous } else { 0.0 };
            }
        } else if b + a * knot > 0.0 {
            return (-b / a).max(previous);
        }
        if b + jump + if flat { 0.0 } else { a * knot } >= 0.0 {
            return knot;
        }
        b += jump;
        previous = knot;
    }
    if flat {
        // Unbounded or constant beyond the last kink: stay put.
        if previous.is_finite() && b >= 0.0 {
            previous
        } else {
            0.0
        }
    } else {
        (-b / a).max(previous)
    }
}

/// Largest stationarity violation on the prepared (solver) scale.
fn stationarity_violation(
    grad: &DVector<f64>,
    beta: &DVector<f64>,
    lambda: f64,
    alpha: f64,
    w: &[f64],
    active: &[bool],
) -> f64 {
    let mut worst = 0.0_f64;
    for j in 0..beta.len() {
        if !active[j] {
            continue;
        }
        let l1 = lambda * w[j] * alpha;
        let l2 = lambda * w[j] * (1.0 - alpha);
        let v = if beta[j] != 0.0 {
            (grad[j] - l1 * beta[j].signum() - l2 * beta[j]).abs()
        } else {
            (grad[j].abs() - l1).max(0.0)
        };
        worst = worst.max(v);
    }
    worst
}

/// Cyclic coordinate descent from the warm start in `beta`.
fn coordinate_descent(
    d: &PreparedDesign,
    lambda: f64,
    alpha: f64,
    w: &[f64],
    beta: &mut DVector<f64>,
) -> Result<usize> {
    let q = d.q();
    // Columns that are constant after centering stay at zero.
    let active: Vec<bool> = (0..q).map(|j| d.gram[(j, j)] > 0.0).collect();
    for j in 0..q {
        if !active[j] {
            beta[j] = 0.0;
        }
    }
    let mut grad = d.gradient(beta);
    let mut tol = CONVERGENCE_TOLERANCE;
    #[cfg(debug_assertions)]
    let mut last_objective = d.objective(beta, lambda, alpha, w);

    for cycle in 1..=MAX_CYCLES {
        let mut max_delta = 0.0_f64;
        for j in 0..q {
            if !active[j] {
                continue;
            }
            let ms = d.gram[(j, j)];
            let old = beta[j];
            let z = grad[j] + ms * old;
            let new = soft_threshold(z, lambda * w[j] * alpha) / (ms + lambda * w[j] * (1.0 - alpha));
            if new != old {
                let delta = new - old;
                beta[j] = new;
                grad.axpy(-delta, &d.gram.column(j), 1.0);
                max_delta = max_delta.max(delta.abs());
            }
        }
        // Coordinate moves crawl along (nearly) collinear directions; an exact
        // line search along each of them removes that slow mode.
        for (v, gv) in &d.flat {
            let t = line_step(v, gv, beta, &grad, lambda, alpha, w);
            if t != 0.0 {
                beta.axpy(t, v, 1.0);
                grad.axpy(-t, gv, 1.0);
                max_delta = max_delta.max(t.abs() * v.amax());
            }
        }

        #[cfg(debug_assertions)]
        {
            let obj = d.objective(beta, lambda, alpha, w);
            let slack = 1e-10 * (d.yty + last_objective.abs() + 1.0);
            debug_assert!(
                obj <= last_objective + slack,
                "objective increased from {last_objective} to {obj} in cycle {cycle}"
            );
            last_objective = obj;
        }

        if max_delta < tol {
            // Refresh the running gradient to shed accumulated rounding.
            grad = d.gradient(beta);
            let violation = stationarity_violation(&grad, beta, lambda, alpha, w, &active);
            if violation <= INTERNAL_KKT_TARGET || max_delta == 0.0 {
                return Ok(cycle);
            }
            tol = (tol * 0.1).max(1e-15);
        }
    }

    let best = d.to_original(beta.as_slice());
    Err(Error::NoConvergence {
        cycles: MAX_CYCLES,
        best_intercept: best.intercept,
        best_coefficients: best.coefficients.iter().copied().collect(),
    })
}

fn check_inputs(data: &Dataset, spec: &PenaltySpec) -> Result<()> {
    if data.n() < 2 {
        return Err(Error::TooFewObservations {
            needed: 2,
            got: data.n(),
        });
    }
    spec.validate(data.p())
}

/// Single penalized fit.
///
/// At `λ = 0` the problem is plain least squares and is solved directly
/// with the minimum-norm rule, which also covers collinear designs.
pub fn fit_penalized(data: &Dataset, spec: &PenaltySpec) -> Result<LinearFit> {
    check_inputs(data, spec)?;
    let d = PreparedDesign::new(data, spec.standardize);
    if spec.lambda == 0.0 {
        let beta = min_norm_solve(&d.x, &d.y);
        return Ok(d.to_original(beta.as_slice()));
    }
    let mut beta = DVector::zeros(d.q());
    coordinate_descent(&d, spec.lambda, spec.alpha, &spec.penalty_factors, &mut beta)?;
    Ok(d.to_original(beta.as_slice()))
}

/// Smallest λ at which every penalized coefficient is zero, with the
/// unpenalized block (intercept and `w_j = 0` columns) at its least-squares
/// fit. The value is nudged up by a relative `1e-10` so that the solver
/// returns exact zeros there despite rounding.
pub fn lambda_max(data: &Dataset, spec: &PenaltySpec) -> Result<f64> {
    check_inputs(data, spec)?;
    if spec.alpha == 0.0 {
        return Err(Error::InvalidParameter(
            "lambda_max is infinite for pure ridge (alpha = 0); supply a grid".into(),
        ));
    }
    let w = &spec.penalty_factors;
    if w.iter().all(|&wj| wj == 0.0) {
        return Err(Error::InvalidParameter("no penalized coefficients".into()));
    }
    let d = PreparedDesign::new(data, spec.standardize);
    let n = data.n() as f64;
    let free: Vec<usize> = (0..d.q()).filter(|&j| w[j] == 0.0).collect();
    let residual = if free.is_empty() {
        d.y.clone()
    } else {
        let xu = d.x.select_columns(&free);
        let bu = min_norm_solve(&xu, &d.y);
        &d.y - xu * bu
    };
    let corr = d.x.tr_mul(&residual) / n;
    let value = (0..d.q())
        .filter(|&j| w[j] > 0.0)
        .map(|j| corr[j].abs() / (spec.alpha * w[j]))
        .fold(0.0_f64, f64::max);

    let col_scale = (0..d.q()).map(|j| d.gram[(j, j)].sqrt()).fold(0.0_f64, f64::max);
    let y_scale = (residual.norm_squared() / n).sqrt();
    if value.is_nan() || value <= 1e-12 * col_scale * y_scale {
        return Err(Error::DegenerateLambdaMax);
    }
    Ok(value * (1.0 + 1e-10))
}

/// Default grid: [`DEFAULT_GRID_LEN`] log-spaced values from `lambda_max`
/// down to `lambda_max · DEFAULT_MIN_RATIO`.
pub fn default_grid(data: &Dataset, spec: &PenaltySpec) -> Result<LambdaGrid> {
    LambdaGrid::log_spaced(lambda_max(data, spec)?, DEFAULT_MIN_RATIO, DEFAULT_GRID_LEN)
}

/// Fits every λ on `grid` in order, warm-starting from the previous solution.
/// `spec.lambda` is ignored.
pub fn fit_path(data: &Dataset, spec: &PenaltySpec, grid: &LambdaGrid) -> Result<CoefficientPath> {
    check_inputs(data, spec)?;
    let d = PreparedDesign::new(data, spec.standardize);
    let q = d.q();
    let m = grid.len();
    let mut beta = DVector::zeros(q);
    let mut intercepts = Vec::with_capacity(m);
    let mut coefficients = DMatrix::zeros(m, q);
    for (k, &lambda) in grid.values().iter().enumerate() {
        coordinate_descent(&d, lambda, spec.alpha, &spec.penalty_factors, &mut beta)?;
        let fit = d.to_original(beta.as_slice());
        debug_assert!(
            kkt_check(data, &spec.with_lambda(lambda), &fit).passed,
            "path solution at lambda {lambda} fails the KKT check"
        );
        intercepts.push(fit.intercept);
        coefficients.set_row(k, &fit.coefficients.transpose());
    }
    Ok(CoefficientPath {
        grid: grid.clone(),
        intercepts,
        coefficients,
    })
}

/// Subgradient optimality check for a candidate solution given on the
/// original scale. Residuals are recomputed from the raw data, so the check
/// is independent of the solver's internal bookkeeping.
pub fn kkt_check(data: &Dataset, spec: &PenaltySpec, solution: &LinearFit) -> KktReport {
    let fail = KktReport {
        passed: false,
        max_violation: f64::INFINITY,
    };
    if solution.p() != data.p() || spec.penalty_factors.len() != data.p() {
        return fail;
    }
    let x = data.predictors();
    let n = data.n() as f64;
    let residual = data.response() - (x * &solution.coefficients).add_scalar(solution.intercept);
    let mut worst = mean(residual.as_slice()).abs();

    let x_mean = column_means(x);
    for j in 0..data.p() {
        let col = x.column(j);
        let mut scale = 1.0;
        if spec.standardize {
            let sd = (col.iter().map(|v| (v - x_mean[j]).powi(2)).sum::<f64>() / n).sqrt();
            if sd == 0.0 {
                continue;
            }
            scale = sd;
        }
        let grad = col
            .iter()
            .zip(residual.iter())
            .map(|(xij, ri)| (xij - x_mean[j]) / scale * ri)
            .sum::<f64>()
            / n;
        let beta = solution.coefficients[j] * scale;
        let w = spec.penalty_factors[j];
        let l1 = spec.lambda * w * spec.alpha;
        let l2 = spec.lambda * w * (1.0 - spec.alpha);
        let v = if beta != 0.0 {
            (grad - l1 * beta.signum() - l2 * beta).abs()
        } else {
            (grad.abs() - l1).max(0.0)
        };
        worst = worst.max(v);
    }
    KktReport {
        passed: worst <= KKT_TOLERANCE,
        max_violation: worst,
    }
}
