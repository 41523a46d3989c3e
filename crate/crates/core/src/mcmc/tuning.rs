//! Warmup step-size adaptation.
//!
//! Stochastic approximation on `log h`: after each window of `window` steps,
//! `log h += t^(-0.6) * (mean acceptance probability - target)` where `t`
//! counts completed windows.

/// Gain exponent of the Robbins-Monro schedule.
pub const GAIN_EXPONENT: f64 = 0.6;

/// One update of the step size from a window of acceptance values (0/1
/// outcomes or acceptance probabilities) at update count `t >= 1`.
pub fn tune_step_size(h: f64, acceptance_history: &[f64], target: f64, t: usize) -> f64 {
    if acceptance_history.is_empty() {
        return h;
    }
    let rate = acceptance_history.iter().sum::<f64>() / acceptance_history.len() as f64;
    let gain = (t.max(1) as f64).powf(-GAIN_EXPONENT);
    (h.ln() + gain * (rate - target)).exp()
}

#[derive(Clone, Debug)]
pub struct StepSizeTuner {
    h: f64,
    target: f64,
    window: usize,
    updates: usize,
    buffer: Vec<f64>,
}

impl StepSizeTuner {
    pub fn new(h: f64, target: f64, window: usize) -> Self {
        StepSizeTuner { h, target, window: window.max(1), updates: 0, buffer: Vec::with_capacity(window) }
    }

    pub fn step_size(&self) -> f64 {
        self.h
    }

    pub fn observe(&mut self, accept: f64) {
        self.buffer.push(accept);
        if self.buffer.len() == self.window {
            self.updates += 1;
            self.h = tune_step_size(self.h, &self.buffer, self.target, self.updates);
            self.buffer.clear();
        }
    }
}
