#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use regshrink::Dataset;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn normal_matrix(rng: &mut ChaCha8Rng, n: usize, p: usize) -> DMatrix<f64> {
    DMatrix::from_fn(n, p, |_, _| rng.sample(StandardNormal))
}

/// `y = intercept + X beta + noise_sd * z` with standard normal predictors.
pub fn linear_data(rng: &mut ChaCha8Rng, n: usize, beta: &[f64], intercept: f64, noise_sd: f64) -> Dataset {
    let x = normal_matrix(rng, n, beta.len());
    let b = DVector::from_column_slice(beta);
    let noise = DVector::from_fn(n, |_, _| rng.sample::<f64, _>(StandardNormal) * noise_sd);
    let y = (&x * b).add_scalar(intercept) + noise;
    Dataset::from_matrix(x, y).unwrap()
}

pub fn random_data(seed: u64, n: usize, p: usize) -> Dataset {
    let mut r = rng(seed);
    let beta: Vec<f64> = (0..p).map(|_| r.random_range(-2.0..2.0)).collect();
    let intercept = r.random_range(-3.0..3.0);
    linear_data(&mut r, n, &beta, intercept, 1.0)
}

/// Solves `A b = c` by Gaussian elimination with partial pivoting.
pub fn gauss_solve(mut a: Vec<Vec<f64>>, mut c: Vec<f64>) -> Vec<f64> {
    let m = c.len();
    for col in 0..m {
        let piv = (col..m)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap();
        a.swap(col, piv);
        c.swap(col, piv);
        for row in col + 1..m {
            let f = a[row][col] / a[col][col];
            for k in col..m {
                a[row][k] -= f * a[col][k];
            }
            c[row] -= f * c[col];
        }
    }
    let mut b = vec![0.0; m];
    for row in (0..m).rev() {
        let s: f64 = (row + 1..m).map(|k| a[row][k] * b[k]).sum();
        b[row] = (c[row] - s) / a[row][row];
    }
    b
}

/// Least squares with intercept via the normal equations on `[1 | X]`.
/// Returns `(intercept, coefficients)`.
pub fn normal_equations(data: &Dataset) -> (f64, Vec<f64>) {
    let x = data.predictors();
    let y = data.response();
    let (n, p) = x.shape();
    let design = |i: usize, j: usize| if j == 0 { 1.0 } else { x[(i, j - 1)] };
    let a: Vec<Vec<f64>> = (0..=p)
        .map(|j| {
            (0..=p)
                .map(|k| (0..n).map(|i| design(i, j) * design(i, k)).sum())
                .collect()
        })
        .collect();
    let c: Vec<f64> = (0..=p)
        .map(|j| (0..n).map(|i| design(i, j) * y[i]).sum())
        .collect();
    let b = gauss_solve(a, c);
    (b[0], b[1..].to_vec())
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}
