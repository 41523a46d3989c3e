use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Paired empirical quantiles of two samples of one component.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuantileTable {
    pub component: usize,
    pub probs: Vec<f64>,
    pub quantiles_a: Vec<f64>,
    pub quantiles_b: Vec<f64>,
}

impl QuantileTable {
    /// Largest `|q_a - q_b|` over probabilities `<= max_prob`.
    pub fn max_abs_deviation(&self, max_prob: f64) -> f64 {
        self.probs
            .iter()
            .zip(self.quantiles_a.iter().zip(&self.quantiles_b))
            .filter(|(p, _)| **p <= max_prob)
            .map(|(_, (a, b))| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn write_csv<W: std::io::Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "component,prob,quantile_a,quantile_b")?;
        for ((p, a), b) in self.probs.iter().zip(&self.quantiles_a).zip(&self.quantiles_b) {
            writeln!(w, "{},{p},{a},{b}", self.component)?;
        }
        w.flush()
    }
}

/// Probabilities `0.005, 0.010, ..., 0.995`.
pub fn default_probs() -> Vec<f64> {
    (1..=199).map(|k| k as f64 * 0.005).collect()
}

/// Type-7 quantile of an ascending sorted sample.
pub fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

pub fn sorted_copy(sample: &[f64]) -> Vec<f64> {
    let mut s = sample.to_vec();
    s.sort_by(f64::total_cmp);
    s
}

pub fn quantiles(sample: &[f64], probs: &[f64]) -> Result<Vec<f64>> {
    if sample.is_empty() {
        return Err(Error::EmptySample);
    }
    check_probs(probs)?;
    let sorted = sorted_copy(sample);
    Ok(probs.iter().map(|&p| quantile_sorted(&sorted, p)).collect())
}

fn check_probs(probs: &[f64]) -> Result<()> {
    for (k, &p) in probs.iter().enumerate() {
        if !(p > 0.0 && p < 1.0) || (k > 0 && p <= probs[k - 1]) {
            return Err(Error::InvalidProbability(p));
        }
    }
    Ok(())
}

pub fn quantile_table(component: usize, sample_a: &[f64], sample_b: &[f64], probs: &[f64]) -> Result<QuantileTable> {
    Ok(QuantileTable {
        component,
        probs: probs.to_vec(),
        quantiles_a: quantiles(sample_a, probs)?,
        quantiles_b: quantiles(sample_b, probs)?,
    })
}
