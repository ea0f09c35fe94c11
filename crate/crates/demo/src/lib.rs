//! Browser demo: three interactive views over `regshrink`.
//!
//! Each operation is a plain Rust function returning a serializable result,
//! so it can be tested natively; the `#[wasm_bindgen]` wrappers at the
//! bottom only turn those results into JSON strings for the page.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;
use wasm_bindgen::prelude::*;

use regshrink::equal_weights::{compare_models, ModelCv};
use regshrink::selection::{kfold_split, PathModel};
use regshrink::shrinkage::{expected_squared_error, optimal_s_population, optimal_s_sampling};
use regshrink::simulation::{run_cell, SimCell, SimConfig};
use regshrink::{evaluate, predict, Dataset, ShrinkageFactor, SlopeSamplingModel};

#[derive(Debug, Clone, Serialize)]
pub struct ShrinkageCurve {
    pub s: Vec<f64>,
    pub error: Vec<f64>,
    pub bias2: Vec<f64>,
    pub variance: Vec<f64>,
    pub s_opt: f64,
    pub error_at_opt: f64,
    /// Same optimum expressed through a population correlation and sample size.
    pub s_population: f64,
}

/// Expected squared error of a shrunken slope `s·b` across `s ∈ [0, 1]`,
/// split into its bias and variance parts.
pub fn shrinkage_curve(
    beta: f64,
    sigma2_b: f64,
    r: f64,
    n: usize,
    points: usize,
) -> regshrink::Result<ShrinkageCurve> {
    let model = SlopeSamplingModel::new(beta, sigma2_b)?;
    let points = points.max(2);
    let s: Vec<f64> = (0..points).map(|i| i as f64 / (points - 1) as f64).collect();
    let error = s
        .iter()
        .map(|&v| ShrinkageFactor::new(v).map(|f| expected_squared_error(f, &model)))
        .collect::<regshrink::Result<Vec<_>>>()?;
    let bias2 = s.iter().map(|v| (1.0 - v).powi(2) * beta * beta).collect();
    let variance = s.iter().map(|v| v * v * sigma2_b).collect();
    let opt = optimal_s_sampling(&model).factor;
    Ok(ShrinkageCurve {
        s,
        error,
        bias2,
        variance,
        s_opt: opt.value(),
        error_at_opt: expected_squared_error(opt, &model),
        s_population: optimal_s_population(r, n)?.value(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pattern {
    /// All predictors share one true weight.
    Equal,
    /// Only the first predictor matters.
    Dominant,
    /// Weights fall off linearly from the first predictor to the last.
    Graded,
}

impl Pattern {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "equal" => Some(Self::Equal),
            "dominant" => Some(Self::Dominant),
            "graded" => Some(Self::Graded),
            _ => None,
        }
    }

    fn weights(self, p: usize) -> Vec<f64> {
        (0..p)
            .map(|j| match self {
                Self::Equal => 1.0,
                Self::Dominant => f64::from(u8::from(j == 0)),
                Self::Graded => (p - j) as f64,
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy)]
pub struct PathParams {
    pub n: usize,
    pub p: usize,
    pub pattern: Pattern,
    /// Population R² of the generating model.
    pub r2: f64,
    /// Common correlation among the predictors.
    pub predictor_cor: f64,
    pub folds: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ModelSummary {
    pub name: &'static str,
    pub log_lambda: Vec<f64>,
    pub cv_mse: Vec<f64>,
    pub cv_se: Vec<f64>,
    pub chosen_min: usize,
    pub chosen_1se: usize,
    /// Per-predictor coefficients at every path point, `coefficients[k][j]`.
    pub coefficients: Vec<Vec<f64>>,
    pub test_mse_min: f64,
    pub test_mse_1se: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct PathComparison {
    pub true_weights: Vec<f64>,
    pub standard: ModelSummary,
    pub equal: ModelSummary,
    pub test_n: usize,
}

const TEST_N: usize = 2000;

/// Predictors with a common correlation (one shared factor) and a linear
/// criterion with unit variance whose population R² is `r2`.
fn synthetic(
    rng: &mut ChaCha8Rng,
    n: usize,
    weights: &[f64],
    r2: f64,
    cor: f64,
) -> regshrink::Result<Dataset> {
    let p = weights.len();
    let (shared, own) = (cor.sqrt(), (1.0 - cor).sqrt());
    let mut x = DMatrix::zeros(n, p);
    for i in 0..n {
        let f: f64 = rng.sample(StandardNormal);
        for j in 0..p {
            let e: f64 = rng.sample(StandardNormal);
            x[(i, j)] = shared * f + own * e;
        }
    }
    let b = DVector::from_column_slice(weights);
    let noise_sd = (1.0 - r2).sqrt();
    let y = &x * &b + DVector::from_fn(n, |_, _| noise_sd * rng.sample::<f64, _>(StandardNormal));
    Dataset::from_matrix(x, y)
}

/// Pattern weights rescaled so that `var(Xb) = r2` under a common
/// predictor correlation `cor`.
fn scaled_weights(pattern: Pattern, p: usize, r2: f64, cor: f64) -> Vec<f64> {
    let b = pattern.weights(p);
    // var(Xb) = (1 − c)·|b|² + c·(Σb)².
    let norm2: f64 = b.iter().map(|w| w * w).sum();
    let total: f64 = b.iter().sum();
    let k = (r2 / ((1.0 - cor) * norm2 + cor * total * total)).sqrt();
    b.into_iter().map(|w| k * w).collect()
}

fn summarize(cv: &ModelCv, test: &Dataset) -> regshrink::Result<ModelSummary> {
    let fits: Vec<_> = (0..cv.path.len())
        .map(|k| cv.model.implied_fit(&cv.path, k))
        .collect();
    let test_mse = |k: usize| -> regshrink::Result<f64> {
        let yhat = predict(&fits[k], test.predictors())?;
        Ok(evaluate(test.response().as_slice(), yhat.as_slice())?.mse)
    };
    Ok(ModelSummary {
        name: cv.model.name(),
        log_lambda: cv.curve.grid.iter().map(|l| l.ln()).collect(),
        cv_mse: cv.curve.mean_error.clone(),
        cv_se: cv.curve.std_error.clone(),
        chosen_min: cv.curve.chosen_min,
        chosen_1se: cv.curve.chosen_1se,
        coefficients: fits
            .iter()
            .map(|f| f.coefficients.iter().copied().collect())
            .collect(),
        test_mse_min: test_mse(cv.curve.chosen_min)?,
        test_mse_1se: test_mse(cv.curve.chosen_1se)?,
    })
}

/// Cross-validated lasso versus equal-weights lasso on one synthetic sample,
/// with both selections scored on a large fresh test sample.
pub fn path_comparison(params: &PathParams) -> regshrink::Result<PathComparison> {
    if !(params.r2 > 0.0 && params.r2 < 1.0) || !(0.0..1.0).contains(&params.predictor_cor) {
        return Err(regshrink::Error::InvalidParameter(
            "R² must lie in (0, 1) and the predictor correlation in [0, 1)".into(),
        ));
    }
    let weights = scaled_weights(params.pattern, params.p, params.r2, params.predictor_cor);
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let train = synthetic(&mut rng, params.n, &weights, params.r2, params.predictor_cor)?;
    let test = synthetic(&mut rng, TEST_N, &weights, params.r2, params.predictor_cor)?;
    let folds = kfold_split(params.n, params.folds, params.seed)?;
    let cmp = compare_models(&train, 1.0, true, &folds)?;
    debug_assert_eq!(cmp.equal.model, PathModel::EqualWeights);
    Ok(PathComparison {
        true_weights: weights,
        standard: summarize(&cmp.standard, &test)?,
        equal: summarize(&cmp.equal, &test)?,
        test_n: TEST_N,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct TrendPoint {
    pub rho: f64,
    pub s_q25: f64,
    pub s_median: f64,
    pub s_q75: f64,
    pub pe_q25: f64,
    pub pe_median: f64,
    pub pe_q75: f64,
}

pub const RELIABILITIES: [f64; 6] = [1.0, 0.9, 0.8, 0.7, 0.6, 0.5];

/// Cross-validated shrinkage factor and validation error as predictor
/// reliability drops, for one sample size and true-score validity.
pub fn reliability_trend(n: usize, r: f64, reps: usize, seed: u64) -> regshrink::Result<Vec<TrendPoint>> {
    let config = SimConfig {
        n_grid: vec![n],
        r_grid: vec![r],
        rho_grid: RELIABILITIES.to_vec(),
        replications: reps,
        validation_n: 1000,
        master_seed: seed,
        ..SimConfig::default()
    };
    config.validate()?;
    RELIABILITIES
        .iter()
        .map(|&rho| {
            let s = run_cell(&config, &SimCell { n, r, rho })?;
            Ok(TrendPoint {
                rho,
                s_q25: s.s_q25,
                s_median: s.s_median,
                s_q75: s.s_q75,
                pe_q25: s.pe_q25,
                pe_median: s.pe_median,
                pe_q75: s.pe_q75,
            })
        })
        .collect()
}

fn to_json<T: Serialize>(result: regshrink::Result<T>) -> Result<String, JsError> {
    let value = result.map_err(|e| JsError::new(&e.to_string()))?;
    serde_json::to_string(&value).map_err(|e| JsError::new(&e.to_string()))
}

#[wasm_bindgen(js_name = shrinkageCurve)]
pub fn shrinkage_curve_js(beta: f64, sigma2_b: f64, r: f64, n: u32) -> Result<String, JsError> {
    to_json(shrinkage_curve(beta, sigma2_b, r, n as usize, 101))
}

#[wasm_bindgen(js_name = pathComparison)]
pub fn path_comparison_js(
    n: u32,
    p: u32,
    pattern: &str,
    r2: f64,
    predictor_cor: f64,
    folds: u32,
    seed: u32,
) -> Result<String, JsError> {
    let pattern = Pattern::parse(pattern).ok_or_else(|| JsError::new("unknown weight pattern"))?;
    to_json(path_comparison(&PathParams {
        n: n as usize,
        p: p as usize,
        pattern,
        r2,
        predictor_cor,
        folds: folds as usize,
        seed: u64::from(seed),
    }))
}

#[wasm_bindgen(js_name = reliabilityTrend)]
pub fn reliability_trend_js(n: u32, r: f64, reps: u32, seed: u32) -> Result<String, JsError> {
    to_json(reliability_trend(n as usize, r, reps as usize, u64::from(seed)))
}
