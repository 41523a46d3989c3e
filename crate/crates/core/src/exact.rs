//! Exact i.i.d. sampling by ancestral simulation of the Gaussian conditionals.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{conditional_decomposition, ModelSpec};
use crate::rng::{RngStream, GAUSSIAN_METHOD};

/// `n` draws stored row-major (sample-major).
#[derive(Clone, Debug, PartialEq)]
pub struct SampleBatch {
    pub spec: ModelSpec,
    pub stream: RngStream,
    pub gaussian_method: &'static str,
    n: usize,
    draws: Vec<f64>,
}

impl SampleBatch {
    pub fn from_rows(spec: ModelSpec, stream: RngStream, draws: Vec<f64>) -> Self {
        assert_eq!(draws.len() % spec.dim(), 0, "draws must hold whole rows");
        let n = draws.len() / spec.dim();
        SampleBatch { spec, stream, gaussian_method: GAUSSIAN_METHOD, n, draws }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn dim(&self) -> usize {
        self.spec.dim()
    }

    pub fn row(&self, k: usize) -> &[f64] {
        let d = self.dim();
        &self.draws[k * d..(k + 1) * d]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.draws.chunks_exact(self.dim())
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.draws
    }

    /// Copy of one component across all draws.
    pub fn column(&self, i: usize) -> Vec<f64> {
        self.rows().map(|r| r[i]).collect()
    }
}

/// Draw `n_samples` exact samples: the root from `N(mu, 1/2a)`, then each
/// child from `N(parent^2, 1/2b)` in topological order, one sample at a time.
pub fn sample_exact(spec: &ModelSpec, n_samples: usize, stream: RngStream) -> Result<SampleBatch> {
    let factors = conditional_decomposition(spec)?;
    if n_samples == 0 {
        return Err(Error::InvalidConfig("n_samples must be at least 1".into()));
    }
    let dim = spec.dim();
    let sds: Vec<f64> = factors.iter().map(|f| (0.5 / f.weight).sqrt()).collect();
    let mut rng = stream.rng();
    let mut draws = vec![0.0; n_samples * dim];
    for row in draws.chunks_exact_mut(dim) {
        for (f, sd) in factors.iter().zip(&sds) {
            let mean = f.conditional(row).mean;
            let z: f64 = rng.sample(StandardNormal);
            row[f.index] = mean + sd * z;
        }
    }
    Ok(SampleBatch { spec: spec.clone(), stream, gaussian_method: GAUSSIAN_METHOD, n: n_samples, draws })
}

/// Moments of one factor's standardized residuals.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResidualStats {
    pub index: usize,
    pub parent: Option<usize>,
    pub mean: f64,
    /// `None` when fewer than two draws are available.
    pub variance: Option<f64>,
    /// `None` when the variance is undefined or zero.
    pub skewness: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditionalMomentReport {
    pub n: usize,
    pub factors: Vec<ResidualStats>,
}

impl ConditionalMomentReport {
    /// Whether every factor's residual moments are within the given absolute
    /// tolerances of the standard normal values (mean 0, variance 1).
    pub fn within(&self, mean_tol: f64, var_tol: f64) -> bool {
        self.factors.iter().all(|f| f.mean.abs() <= mean_tol && f.variance.is_some_and(|v| (v - 1.0).abs() <= var_tol))
    }
}

/// Standardized residuals `(x_child - parent^2) * sqrt(2 b)` per factor; under a
/// correct sampler each set is a standard normal sample.
pub fn conditional_moment_check(batch: &SampleBatch) -> Result<ConditionalMomentReport> {
    let factors = conditional_decomposition(&batch.spec)?;
    let n = batch.len();
    let stats = factors
        .iter()
        .map(|f| {
            let r: Vec<f64> = batch.rows().map(|row| f.standardized_residual(row)).collect();
            let mean = r.iter().sum::<f64>() / n as f64;
            let (variance, skewness) = if n < 2 {
                (None, None)
            } else {
                let m2 = r.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n as f64;
                let m3 = r.iter().map(|v| (v - mean).powi(3)).sum::<f64>() / n as f64;
                let var = m2 * n as f64 / (n - 1) as f64;
                let skew = if m2 > 0.0 { Some(m3 / m2.powf(1.5)) } else { None };
                (Some(var), skew)
            };
            ResidualStats { index: f.index, parent: f.parent, mean, variance, skewness }
        })
        .collect();
    Ok(ConditionalMomentReport { n, factors: stats })
}
