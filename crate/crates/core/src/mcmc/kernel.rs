//! One Metropolis-adjusted Langevin kernel shared by all three algorithms.
//!
//! * sMMALA: drift `(h/2) Sigma(x) grad`, noise `N(0, h Sigma(x))`.
//! * MALA: the same with `Sigma = I`.
//! * RWM: MALA with the drift switched off.

use std::f64::consts::PI;

use nalgebra::DVector;
use rand::Rng;
use rand_distr::StandardNormal;

use super::metric::{Metric, Regularization};
use super::Algorithm;
use crate::error::{Error, Result};
use crate::model::{self, ModelSpec};

/// Everything the kernel needs to know about the target at one point.
#[derive(Clone, Debug)]
pub struct Geometry {
    pub x: DVector<f64>,
    pub log_target: f64,
    /// Zero for random-walk proposals.
    pub drift_grad: DVector<f64>,
    pub metric: Metric,
}

impl Geometry {
    pub fn at(
        spec: &ModelSpec,
        x: &[f64],
        algorithm: Algorithm,
        alpha: f64,
        regularization: Regularization,
    ) -> Result<Self> {
        let log_target = model::log_kernel(spec, x)?;
        let dim = spec.dim();
        let (drift_grad, metric) = match algorithm {
            Algorithm::Rwm => (DVector::zeros(dim), Metric::identity(dim)),
            Algorithm::Mala => (DVector::from_vec(model::grad_log_kernel(spec, x)?), Metric::identity(dim)),
            Algorithm::Smmala => {
                let grad = DVector::from_vec(model::grad_log_kernel(spec, x)?);
                let hess = model::hessian_log_kernel(spec, x)?;
                (grad, Metric::from_hessian(hess, alpha, regularization, x)?)
            }
        };
        Ok(Geometry { x: DVector::from_column_slice(x), log_target, drift_grad, metric })
    }

    /// Proposal mean `x + (h/2) Sigma(x) grad`.
    pub fn proposal_mean(&self, h: f64) -> DVector<f64> {
        &self.x + self.metric.mul(&self.drift_grad) * (0.5 * h)
    }

    /// `log N(to; mean(x), h Sigma(x))`.
    pub fn log_proposal_density(&self, h: f64, to: &DVector<f64>) -> f64 {
        let d = to - self.proposal_mean(h);
        let n = self.x.len() as f64;
        -0.5 * (n * (2.0 * PI * h).ln() + self.metric.log_det() + self.metric.inv_quad(&d) / h)
    }
}

/// A proposal drawn from a [`Geometry`].
#[derive(Clone, Debug)]
pub struct Proposal {
    pub x: DVector<f64>,
    pub z: DVector<f64>,
    pub log_q_forward: f64,
}

/// Draw `x' = x + (h/2) Sigma grad + sqrt(h) L z` with `z ~ N(0, I)`.
pub fn propose<R: Rng + ?Sized>(geometry: &Geometry, h: f64, rng: &mut R) -> Result<Proposal> {
    let z = DVector::from_iterator(geometry.x.len(), (0..geometry.x.len()).map(|_| rng.sample(StandardNormal)));
    propose_with_noise(geometry, h, z)
}

/// Deterministic part of [`propose`] for a given standard-normal vector.
pub fn propose_with_noise(geometry: &Geometry, h: f64, z: DVector<f64>) -> Result<Proposal> {
    let x = geometry.proposal_mean(h) + geometry.metric.sqrt_mul(&z) * h.sqrt();
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFiniteResult { quantity: "proposal", point: geometry.x.iter().copied().collect() });
    }
    let log_q_forward = geometry.log_proposal_density(h, &x);
    Ok(Proposal { x, z, log_q_forward })
}

/// `log pi(x') + log q(x | x') - log pi(x) - log q(x' | x)`.
pub fn log_acceptance_ratio(current: &Geometry, proposed: &Geometry, h: f64, log_q_forward: f64) -> f64 {
    let log_q_reverse = proposed.log_proposal_density(h, &current.x);
    proposed.log_target + log_q_reverse - current.log_target - log_q_forward
}

/// Metropolis decision for a precomputed log ratio. Always consumes exactly
/// one uniform so the random stream stays aligned across outcomes.
pub fn accept_log_ratio<R: Rng + ?Sized>(log_ratio: f64, rng: &mut R) -> bool {
    let u: f64 = rng.random();
    log_ratio.is_finite() && (log_ratio >= 0.0 || u.ln() < log_ratio)
}

/// Metropolis-Hastings step on raw states. A proposal at which the target is
/// not finite counts as a rejection.
pub fn mh_accept<R: Rng + ?Sized>(
    spec: &ModelSpec,
    x: &[f64],
    x_prop: &[f64],
    log_q_fwd: f64,
    log_q_rev: f64,
    rng: &mut R,
) -> Result<(Vec<f64>, bool)> {
    let log_cur = model::log_kernel(spec, x)?;
    let log_ratio = match model::log_kernel(spec, x_prop) {
        Ok(log_prop) => log_prop + log_q_rev - log_cur - log_q_fwd,
        Err(_) => f64::NEG_INFINITY,
    };
    if accept_log_ratio(log_ratio, rng) {
        Ok((x_prop.to_vec(), true))
    } else {
        Ok((x.to_vec(), false))
    }
}

/// Full record of one transition, kept for offline replay.
#[derive(Clone, Debug)]
pub struct StepRecord {
    pub from: DVector<f64>,
    pub proposal: Option<DVector<f64>>,
    pub z: DVector<f64>,
    pub log_ratio: f64,
    pub accept_prob: f64,
    pub accepted: bool,
    pub divergent: bool,
}

/// A single-chain transition operator holding the geometry of the current state.
#[derive(Clone, Debug)]
pub struct Transition<'a> {
    spec: &'a ModelSpec,
    algorithm: Algorithm,
    alpha: f64,
    regularization: Regularization,
    current: Geometry,
}

impl<'a> Transition<'a> {
    pub fn new(
        spec: &'a ModelSpec,
        algorithm: Algorithm,
        alpha: f64,
        regularization: Regularization,
        init: &[f64],
    ) -> Result<Self> {
        let current = Geometry::at(spec, init, algorithm, alpha, regularization)?;
        Ok(Transition { spec, algorithm, alpha, regularization, current })
    }

    pub fn state(&self) -> &DVector<f64> {
        &self.current.x
    }

    pub fn current(&self) -> &Geometry {
        &self.current
    }

    pub fn step<R: Rng + ?Sized>(&mut self, h: f64, rng: &mut R) -> StepRecord {
        let dim = self.current.x.len();
        let z = DVector::from_iterator(dim, (0..dim).map(|_| rng.sample(StandardNormal)));
        let proposed = propose_with_noise(&self.current, h, z.clone()).and_then(|p| {
            let xs: Vec<f64> = p.x.iter().copied().collect();
            let g = Geometry::at(self.spec, &xs, self.algorithm, self.alpha, self.regularization)?;
            Ok((p, g))
        });
        match proposed {
            Ok((p, g)) => {
                let log_ratio = log_acceptance_ratio(&self.current, &g, h, p.log_q_forward);
                let divergent = !log_ratio.is_finite() && log_ratio != f64::NEG_INFINITY;
                let accepted = accept_log_ratio(log_ratio, rng);
                let accept_prob = if log_ratio.is_nan() { 0.0 } else { log_ratio.min(0.0).exp() };
                let from = self.current.x.clone();
                if accepted {
                    self.current = g;
                }
                StepRecord { from, proposal: Some(p.x), z, log_ratio, accept_prob, accepted, divergent }
            }
            Err(_) => {
                // Keep the uniform draw so the stream stays aligned.
                let _ = accept_log_ratio(f64::NEG_INFINITY, rng);
                StepRecord {
                    from: self.current.x.clone(),
                    proposal: None,
                    z,
                    log_ratio: f64::NEG_INFINITY,
                    accept_prob: 0.0,
                    accepted: false,
                    divergent: true,
                }
            }
        }
    }
}
