use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{conditional_decomposition, log_kernel, log_norm_constant, Family, ModelSpec};
use crate::quadrature::two_d_kernel_integral;
use crate::rng::RngStream;

/// Standard-deviation inflation of the importance proposal relative to the
/// exact conditionals.
pub const PROPOSAL_WIDENING: f64 = 1.1;

fn default_samples() -> usize {
    10_000_000
}

fn default_rel_tol() -> f64 {
    1e-9
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstantCheckConfig {
    pub model: ModelSpec,
    /// Importance samples (Hybrid kernels only).
    #[serde(default = "default_samples")]
    pub samples: usize,
    /// Quadrature relative tolerance (2-d kernels only).
    #[serde(default = "default_rel_tol")]
    pub rel_tol: f64,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstantCheckReport {
    pub family: String,
    pub method: String,
    pub closed_form_log_constant: f64,
    pub estimated_log_constant: f64,
    /// `|estimate / closed form - 1|` on the constant itself.
    pub relative_error: f64,
    /// Standard error of the estimate relative to its value (importance
    /// sampling) or the quadrature error bound relative to the integral.
    pub relative_uncertainty: f64,
}

/// Importance-sampling estimate of `log` of the kernel integral, using an
/// ancestral proposal whose conditional standard deviations are widened by
/// [`PROPOSAL_WIDENING`]. Returns `(log integral, relative standard error)`.
pub fn importance_log_integral(spec: &ModelSpec, samples: usize, stream: RngStream) -> Result<(f64, f64)> {
    let factors = conditional_decomposition(spec)?;
    if samples == 0 {
        return Err(Error::InvalidConfig("samples must be at least 1".into()));
    }
    let mut rng = stream.rng();
    let mut x = vec![0.0; spec.dim()];
    let mut log_w = Vec::with_capacity(samples);
    for _ in 0..samples {
        let mut log_q = 0.0;
        for f in &factors {
            let mut c = f.conditional(&x);
            c.variance *= PROPOSAL_WIDENING * PROPOSAL_WIDENING;
            let z: f64 = rng.sample(StandardNormal);
            x[f.index] = c.mean + c.std_dev() * z;
            log_q += c.log_pdf(x[f.index]);
        }
        log_w.push(log_kernel(spec, &x)? - log_q);
    }
    let max = log_w.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let n = samples as f64;
    let (mut s1, mut s2) = (0.0, 0.0);
    for lw in &log_w {
        let w = (lw - max).exp();
        s1 += w;
        s2 += w * w;
    }
    let mean = s1 / n;
    let var = (s2 / n - mean * mean).max(0.0);
    Ok((max + mean.ln(), (var / n).sqrt() / mean))
}

pub fn constant_check(cfg: &ConstantCheckConfig) -> Result<ConstantCheckReport> {
    let spec = &cfg.model;
    let closed = log_norm_constant(spec)?;
    let (method, log_integral, rel_unc) = match spec.family() {
        Family::TwoD(_) => {
            let q = two_d_kernel_integral(spec, cfg.rel_tol)?;
            ("adaptive-gauss-kronrod".to_string(), q.value.ln(), q.error_estimate / q.value)
        }
        Family::Hybrid(_) => {
            let (li, se) = importance_log_integral(spec, cfg.samples, RngStream::derive(cfg.seed, &[0]))?;
            (format!("importance-sampling(n={}, widening={PROPOSAL_WIDENING})", cfg.samples), li, se)
        }
        Family::Full(_) => return Err(Error::ConstantUnknown { family: "full" }),
        Family::Even(_) => return Err(Error::ConstantUnknown { family: "even" }),
    };
    let estimated = -log_integral;
    Ok(ConstantCheckReport {
        family: spec.family().name().to_string(),
        method,
        closed_form_log_constant: closed,
        estimated_log_constant: estimated,
        relative_error: (estimated - closed).exp_m1().abs(),
        relative_uncertainty: rel_unc,
    })
}
