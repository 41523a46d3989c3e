//! Random-walk Metropolis, MALA and simplified manifold MALA.

mod kernel;
mod metric;
mod tuning;

pub use kernel::{
    accept_log_ratio, log_acceptance_ratio, mh_accept, propose, propose_with_noise, Geometry, Proposal, StepRecord,
    Transition,
};
pub use metric::{regularized_metric, regularized_metric_with, Metric, Regularization};
pub use tuning::{tune_step_size, StepSizeTuner, GAIN_EXPONENT};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::ModelSpec;
use crate::rng::RngStream;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Rwm,
    Mala,
    Smmala,
}

fn default_target_accept() -> f64 {
    0.5
}

fn default_thin() -> usize {
    1
}

fn default_window() -> usize {
    20
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SamplerConfig {
    pub algorithm: Algorithm,
    /// Initial step size; the warmup adapts it.
    #[serde(deserialize_with = "crate::model::real")]
    pub h: f64,
    #[serde(deserialize_with = "crate::model::real")]
    pub alpha: f64,
    pub n_steps: usize,
    pub warmup: usize,
    #[serde(default = "default_target_accept")]
    pub target_accept: f64,
    /// Start state; the all-ones vector when absent.
    #[serde(default)]
    pub init: Option<Vec<f64>>,
    #[serde(default = "default_thin")]
    pub thin: usize,
    #[serde(default)]
    pub regularization: Regularization,
    /// Steps per step-size update during warmup.
    #[serde(default = "default_window")]
    pub tune_window: usize,
}

impl SamplerConfig {
    /// sMMALA with `alpha = 1e6`, tuned toward 50% acceptance.
    pub fn smmala(n_steps: usize, warmup: usize) -> Self {
        SamplerConfig {
            algorithm: Algorithm::Smmala,
            h: 0.3,
            alpha: 1e6,
            n_steps,
            warmup,
            target_accept: 0.5,
            init: None,
            thin: 1,
            regularization: Regularization::Floor,
            tune_window: default_window(),
        }
    }

    pub fn validate(&self, dim: usize) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if !(self.h.is_finite() && self.h > 0.0) {
            return bad(format!("h must be positive, got {}", self.h));
        }
        if !(self.alpha.is_finite() && self.alpha > 0.0) {
            return bad(format!("alpha must be positive, got {}", self.alpha));
        }
        if self.thin == 0 {
            return bad("thin must be at least 1".into());
        }
        if !(self.target_accept > 0.0 && self.target_accept < 1.0) {
            return bad(format!("target_accept must be in (0, 1), got {}", self.target_accept));
        }
        if let Some(init) = &self.init {
            if init.len() != dim {
                return bad(format!("init has length {}, target dimension is {dim}", init.len()));
            }
        }
        Ok(())
    }
}

/// Output of one sampler run.
#[derive(Clone, Debug, PartialEq)]
pub struct Chain {
    /// Kept states, row-major, `n_steps / thin` rows.
    states: Vec<f64>,
    dim: usize,
    /// One flag per post-warmup step, before thinning.
    pub accepted: Vec<bool>,
    pub divergences: usize,
    pub warmup_divergences: usize,
    pub config: SamplerConfig,
    pub stream: RngStream,
    pub tuned_h: f64,
}

impl Chain {
    /// Wrap externally produced states, e.g. i.i.d. draws, as a chain.
    pub fn from_states(states: Vec<f64>, dim: usize, config: SamplerConfig, stream: RngStream) -> Self {
        let n = states.len() / dim;
        let tuned_h = config.h;
        Chain { states, dim, accepted: vec![true; n], divergences: 0, warmup_divergences: 0, config, stream, tuned_h }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.states.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn states(&self) -> &[f64] {
        &self.states
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.states.chunks_exact(self.dim)
    }

    pub fn column(&self, i: usize) -> Vec<f64> {
        self.rows().map(|r| r[i]).collect()
    }

    pub fn acceptance_rate(&self) -> f64 {
        if self.accepted.is_empty() {
            return 0.0;
        }
        self.accepted.iter().filter(|&&a| a).count() as f64 / self.accepted.len() as f64
    }
}

/// Warmup with step-size adaptation, then `n_steps` transitions at the frozen
/// step size, keeping every `thin`-th state.
pub fn run_chain(spec: &ModelSpec, config: &SamplerConfig, stream: RngStream) -> Result<Chain> {
    let dim = spec.dim();
    config.validate(dim)?;
    let init = config.init.clone().unwrap_or_else(|| vec![1.0; dim]);
    let mut transition = Transition::new(spec, config.algorithm, config.alpha, config.regularization, &init)?;
    let mut rng = stream.rng();

    let mut tuner = StepSizeTuner::new(config.h, config.target_accept, config.tune_window);
    let mut warmup_divergences = 0;
    for _ in 0..config.warmup {
        let rec = transition.step(tuner.step_size(), &mut rng);
        warmup_divergences += rec.divergent as usize;
        tuner.observe(rec.accept_prob);
    }
    let h = tuner.step_size();

    let kept = config.n_steps / config.thin;
    let mut states = Vec::with_capacity(kept * dim);
    let mut accepted = Vec::with_capacity(config.n_steps);
    let mut divergences = 0;
    for step in 0..config.n_steps {
        let rec = transition.step(h, &mut rng);
        accepted.push(rec.accepted);
        divergences += rec.divergent as usize;
        let x = transition.state();
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFiniteState { step });
        }
        if (step + 1) % config.thin == 0 {
            states.extend(x.iter());
        }
    }
    Ok(Chain { states, dim, accepted, divergences, warmup_divergences, config: config.clone(), stream, tuned_h: h })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn thinning_and_shapes() {
        let spec = ModelSpec::hybrid_standard(3, 2).unwrap();
        let mut cfg = SamplerConfig::smmala(1005, 200);
        cfg.thin = 10;
        let chain = run_chain(&spec, &cfg, RngStream::new(11, 0)).unwrap();
        assert_eq!(chain.len(), 100);
        assert_eq!(chain.accepted.len(), 1005);
        assert_eq!(chain.dim(), 5);
        let r = chain.acceptance_rate();
        assert!((0.0..=1.0).contains(&r));
    }

    #[test]
    fn deterministic_given_stream() {
        let spec = ModelSpec::two_d(1.0, 0.05, 5.0).unwrap();
        let cfg = SamplerConfig::smmala(500, 100);
        let a = run_chain(&spec, &cfg, RngStream::new(3, 9)).unwrap();
        let b = run_chain(&spec, &cfg, RngStream::new(3, 9)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn tiny_rwm_steps_almost_always_accept() {
        let spec = ModelSpec::two_d(1.0, 0.05, 5.0).unwrap();
        let cfg = SamplerConfig { algorithm: Algorithm::Rwm, h: 1e-10, warmup: 0, ..SamplerConfig::smmala(2000, 0) };
        let chain = run_chain(&spec, &cfg, RngStream::new(1, 0)).unwrap();
        assert!(chain.acceptance_rate() > 0.999);
    }

    #[test]
    fn config_validation() {
        let spec = ModelSpec::two_d(1.0, 0.05, 5.0).unwrap();
        let mut cfg = SamplerConfig::smmala(10, 0);
        cfg.thin = 0;
        assert!(run_chain(&spec, &cfg, RngStream::new(1, 0)).is_err());
        let mut cfg = SamplerConfig::smmala(10, 0);
        cfg.init = Some(vec![0.0; 3]);
        assert!(run_chain(&spec, &cfg, RngStream::new(1, 0)).is_err());
        let mut cfg = SamplerConfig::smmala(10, 0);
        cfg.h = -1.0;
        assert!(run_chain(&spec, &cfg, RngStream::new(1, 0)).is_err());
    }
}
