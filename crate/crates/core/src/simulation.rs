//! Reliability versus cross-validated shrinkage.
//!
//! True scores `T ~ N(0, 1)` drive the criterion `Y = r·T + ε` with
//! `ε ~ N(0, 1 − r²)`, so `r` is the true-score/criterion correlation. The
//! observed test score is `X = T + E` with `var(E) = (1 − ρ)/ρ`, which makes
//! `ρ` the reliability of `X`. Each replication picks the slope shrinkage
//! factor by K-fold cross-validation on a calibration sample, refits on the
//! whole sample and scores the rule on a fresh validation sample.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::selection::{cross_validate_shrinkage, default_s_grid, kfold_split};
use crate::shrinkage::{apply_shrinkage, ShrinkageFactor};

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub n_grid: Vec<usize>,
    pub r_grid: Vec<f64>,
    pub rho_grid: Vec<f64>,
    pub replications: usize,
    pub validation_n: usize,
    pub folds: usize,
    pub s_grid: Vec<f64>,
    pub master_seed: u64,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            n_grid: vec![25, 50, 100, 200],
            r_grid: vec![0.20, 0.25, 0.30, 0.35, 0.40],
            rho_grid: vec![1.0, 0.9, 0.8, 0.7, 0.6, 0.5],
            replications: 1000,
            validation_n: 1000,
            folds: 10,
            s_grid: default_s_grid(),
            master_seed: 1,
        }
    }
}

/// One `(n, r, ρ)` condition of the design.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimCell {
    pub n: usize,
    pub r: f64,
    pub rho: f64,
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        if self.n_grid.is_empty() || self.r_grid.is_empty() || self.rho_grid.is_empty() {
            return bad("n, r and rho grids must be non-empty".into());
        }
        if let Some(r) = self.r_grid.iter().find(|r| !(**r > 0.0 && **r < 1.0)) {
            return bad(format!("effect size must lie in (0, 1), got {r}"));
        }
        if let Some(rho) = self.rho_grid.iter().find(|p| !(**p > 0.0 && **p <= 1.0)) {
            return bad(format!("reliability must lie in (0, 1], got {rho}"));
        }
        if self.replications == 0 || self.validation_n < 2 {
            return bad("replications must be positive and validation_n at least 2".into());
        }
        if let Some(n) = self.n_grid.iter().find(|&&n| n < self.folds || n < 3) {
            return bad(format!(
                "sample size {n} is too small for {}-fold cross-validation",
                self.folds
            ));
        }
        if self.folds < 2 {
            return bad(format!("need at least 2 folds, got {}", self.folds));
        }
        Ok(())
    }

    /// Cells in output order: `n`, then `r`, then `ρ`.
    pub fn cells(&self) -> Vec<SimCell> {
        let mut out = Vec::with_capacity(self.n_grid.len() * self.r_grid.len() * self.rho_grid.len());
        for &n in &self.n_grid {
            for &r in &self.r_grid {
                for &rho in &self.rho_grid {
                    out.push(SimCell { n, r, rho });
                }
            }
        }
        out
    }
}

/// `σ²_E = (1 − ρ)/ρ` for unit true-score variance.
pub fn error_variance_from_reliability(rho: f64) -> Result<f64> {
    if !(rho > 0.0 && rho <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "reliability must lie in (0, 1], got {rho}"
        )));
    }
    Ok((1.0 - rho) / rho)
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratedSample {
    pub true_score: Vec<f64>,
    pub observed_score: Vec<f64>,
    pub criterion: Vec<f64>,
}

impl GeneratedSample {
    pub fn len(&self) -> usize {
        self.criterion.len()
    }

    pub fn is_empty(&self) -> bool {
        self.criterion.is_empty()
    }

    /// Observed score as the single predictor, criterion as response.
    pub fn to_dataset(&self) -> Result<Dataset> {
        Dataset::new(
            nalgebra::DMatrix::from_column_slice(self.len(), 1, &self.observed_score),
            nalgebra::DVector::from_column_slice(&self.criterion),
            vec!["x".into()],
        )
    }
}

/// Draws `T`, then `ε`, then `E`, each as a block of `n` standard normals.
pub fn generate_sample<R: Rng + ?Sized>(n: usize, r: f64, rho: f64, rng: &mut R) -> Result<GeneratedSample> {
    if !(0.0..1.0).contains(&r) {
        return Err(Error::InvalidParameter(format!(
            "effect size must lie in [0, 1), got {r}"
        )));
    }
    let error_sd = error_variance_from_reliability(rho)?.sqrt();
    let noise_sd = (1.0 - r * r).sqrt();
    let mut draw = |k: usize| -> Vec<f64> { (0..k).map(|_| rng.sample(StandardNormal)).collect() };
    let true_score = draw(n);
    let criterion = true_score
        .iter()
        .zip(draw(n))
        .map(|(t, z)| r * t + noise_sd * z)
        .collect();
    let observed_score = true_score
        .iter()
        .zip(draw(n))
        .map(|(t, z)| t + error_sd * z)
        .collect();
    Ok(GeneratedSample {
        true_score,
        observed_score,
        criterion,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReplicationOutcome {
    pub s_opt: f64,
    pub prediction_error: f64,
}

/// One calibration/validation round. Random draws happen in a fixed order:
/// calibration sample, fold seed, validation sample.
pub fn run_replication<R: Rng + ?Sized>(
    n: usize,
    r: f64,
    rho: f64,
    folds: usize,
    s_grid: &[f64],
    validation_n: usize,
    rng: &mut R,
) -> Result<ReplicationOutcome> {
    let calibration = generate_sample(n, r, rho, rng)?.to_dataset()?;
    let fold_seed: u64 = rng.random();
    let assignment = kfold_split(n, folds, fold_seed)?;
    let curve = cross_validate_shrinkage(&calibration, s_grid, &assignment)?;
    let s_opt = curve.grid[curve.chosen_min];
    let fit = apply_shrinkage(&calibration, ShrinkageFactor::new(s_opt)?)?;

    let validation = generate_sample(validation_n, r, rho, rng)?;
    let (a, b) = (fit.intercept, fit.coefficients[0]);
    let sq: f64 = validation
        .observed_score
        .iter()
        .zip(&validation.criterion)
        .map(|(x, y)| (y - a - b * x).powi(2))
        .sum();
    Ok(ReplicationOutcome {
        s_opt,
        prediction_error: sq / validation_n as f64,
    })
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of replication `rep` in `cell`, a fixed mix of the master seed, the
/// cell coordinates and the replication index.
pub fn replication_seed(master_seed: u64, cell: &SimCell, rep: usize) -> u64 {
    [cell.n as u64, cell.r.to_bits(), cell.rho.to_bits(), rep as u64]
        .iter()
        .fold(splitmix64(master_seed), |h, &v| splitmix64(h ^ v))
}

/// Quantiles of the selected shrinkage factor and the validation error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimCellSummary {
    pub n: usize,
    pub r: f64,
    pub rho: f64,
    pub s_q25: f64,
    pub s_median: f64,
    pub s_q75: f64,
    pub pe_q25: f64,
    pub pe_median: f64,
    pub pe_q75: f64,
    pub replications_used: usize,
}

/// Linear-interpolation quantile of sorted data (R's type 7).
pub fn quantile(sorted: &[f64], q: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

fn map_reps<F>(reps: usize, f: F) -> Result<Vec<ReplicationOutcome>>
where
    F: Fn(usize) -> Result<ReplicationOutcome> + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..reps).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..reps).map(f).collect()
    }
}

pub fn run_replications(config: &SimConfig, cell: &SimCell) -> Result<Vec<ReplicationOutcome>> {
    map_reps(config.replications, |rep| {
        let mut rng = ChaCha8Rng::seed_from_u64(replication_seed(config.master_seed, cell, rep));
        run_replication(
            cell.n,
            cell.r,
            cell.rho,
            config.folds,
            &config.s_grid,
            config.validation_n,
            &mut rng,
        )
    })
}

pub fn run_cell(config: &SimConfig, cell: &SimCell) -> Result<SimCellSummary> {
    let outcomes = run_replications(config, cell)?;
    let mut s: Vec<f64> = outcomes.iter().map(|o| o.s_opt).collect();
    let mut pe: Vec<f64> = outcomes.iter().map(|o| o.prediction_error).collect();
    s.sort_by(f64::total_cmp);
    pe.sort_by(f64::total_cmp);
    Ok(SimCellSummary {
        n: cell.n,
        r: cell.r,
        rho: cell.rho,
        s_q25: quantile(&s, 0.25),
        s_median: quantile(&s, 0.5),
        s_q75: quantile(&s, 0.75),
        pe_q25: quantile(&pe, 0.25),
        pe_median: quantile(&pe, 0.5),
        pe_q75: quantile(&pe, 0.75),
        replications_used: outcomes.len(),
    })
}

/// Every cell of the design, in [`SimConfig::cells`] order.
pub fn run_experiment(config: &SimConfig) -> Result<Vec<SimCellSummary>> {
    config.validate()?;
    config.cells().iter().map(|cell| run_cell(config, cell)).collect()
}
