//! Chain and sample quality metrics.

mod iat;
mod ks;
mod quantile;

pub use iat::{autocorrelation, iat_report, iat_report_rows, integrated_autocorrelation, IatReport, MIN_SERIES_LEN};
pub use ks::{ks_statistic, ks_two_sample, ks_two_sample_deflated, KsResult, KS_COEFF_1PCT};
pub use quantile::{default_probs, quantile_sorted, quantile_table, quantiles, sorted_copy, QuantileTable};

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::mcmc::Chain;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Moments {
    pub mean: f64,
    pub variance: f64,
}

/// Mean and unbiased variance.
pub fn moments(values: &[f64]) -> Moments {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let variance = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    Moments { mean, variance }
}

pub fn pearson_correlation(x: &[f64], y: &[f64]) -> f64 {
    let (mx, my) = (moments(x).mean, moments(y).mean);
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    sxy / (sxx * syy).sqrt()
}

/// Diagnostics of one run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub iat: IatReport,
    pub acceptance_rate: f64,
    pub moments: Vec<Moments>,
    pub ks_per_component: Option<Vec<KsResult>>,
    pub divergences: usize,
}

impl RunReport {
    /// Report for a chain; when `reference` (row-major, same dimension) is
    /// given, each component is compared to it with a KS test whose chain
    /// sample size is deflated by that component's `tau`.
    pub fn from_chain(chain: &Chain, reference: Option<&[f64]>) -> Result<Self> {
        let iat = iat_report(chain)?;
        let dim = chain.dim();
        let columns: Vec<Vec<f64>> = (0..dim).map(|i| chain.column(i)).collect();
        let moments = columns.iter().map(|c| moments(c)).collect();
        let ks_per_component = reference.map(|r| {
            columns
                .iter()
                .enumerate()
                .map(|(i, c)| {
                    let refcol: Vec<f64> = r.chunks_exact(dim).map(|row| row[i]).collect();
                    ks_two_sample_deflated(c, &refcol, iat.tau_per_component[i], 1.0)
                })
                .collect()
        });
        Ok(RunReport {
            iat,
            acceptance_rate: chain.acceptance_rate(),
            moments,
            ks_per_component,
            divergences: chain.divergences,
        })
    }

    /// One row per component.
    pub fn write_csv<W: std::io::Write>(&self, mut w: W, names: &[String]) -> std::io::Result<()> {
        writeln!(w, "component,mean,variance,tau,truncation_lag,ks_statistic,ks_critical,ks_reject")?;
        for (i, m) in self.moments.iter().enumerate() {
            let (stat, crit, rej) = match &self.ks_per_component {
                Some(ks) => {
                    (ks[i].statistic.to_string(), ks[i].critical_value.to_string(), ks[i].reject_at_1pct.to_string())
                }
                None => (String::new(), String::new(), String::new()),
            };
            writeln!(
                w,
                "{},{},{},{},{},{stat},{crit},{rej}",
                names[i], m.mean, m.variance, self.iat.tau_per_component[i], self.iat.truncation_lag_per_component[i]
            )?;
        }
        w.flush()
    }
}
