use serde::{Deserialize, Serialize};

use crate::diagnostics::{default_probs, quantile_table, QuantileTable, RunReport};
use crate::error::Result;
use crate::exact::sample_exact;
use crate::mcmc::{run_chain, SamplerConfig};
use crate::model::ModelSpec;
use crate::rng::RngStream;

/// Largest quantile discrepancy accepted, as a fraction of the exact
/// `q(0.995) - q(0.005)` range.
pub const MAX_RELATIVE_QUANTILE_DEVIATION: f64 = 0.05;

fn default_n_exact() -> usize {
    200_000
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValidateConfig {
    /// Target of the exact sampler.
    pub model: ModelSpec,
    /// Target of the MCMC run; the same as `model` when absent.
    #[serde(default)]
    pub mcmc_model: Option<ModelSpec>,
    pub sampler: SamplerConfig,
    #[serde(default = "default_n_exact")]
    pub n_exact: usize,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComponentValidation {
    pub name: String,
    pub ks_statistic: f64,
    pub ks_critical_value: f64,
    pub ks_reject: bool,
    pub tau: f64,
    /// Largest quantile difference over probabilities up to 0.995.
    pub max_quantile_deviation: f64,
    /// Exact-sample `q(0.995) - q(0.005)`.
    pub exact_range: f64,
}

impl ComponentValidation {
    pub fn relative_quantile_deviation(&self) -> f64 {
        self.max_quantile_deviation / self.exact_range
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub components: Vec<ComponentValidation>,
    pub acceptance_rate: f64,
    pub tuned_h: f64,
    pub divergences: usize,
    pub n_exact: usize,
    pub n_mcmc_kept: usize,
    pub passed: bool,
}

/// Output of [`validate`]: the summary plus per-component quantile tables
/// (exact sample in column `a`, MCMC in column `b`).
pub struct Validation {
    pub report: ValidationReport,
    pub tables: Vec<QuantileTable>,
    pub run: RunReport,
}

/// Compare an exact sample with a thinned MCMC sample component by component.
pub fn validate(cfg: &ValidateConfig) -> Result<Validation> {
    let exact = sample_exact(&cfg.model, cfg.n_exact, RngStream::derive(cfg.seed, &[0]))?;
    let target = cfg.mcmc_model.as_ref().unwrap_or(&cfg.model);
    let chain = run_chain(target, &cfg.sampler, RngStream::derive(cfg.seed, &[1]))?;
    let run = RunReport::from_chain(&chain, Some(exact.as_slice()))?;
    let probs = default_probs();
    let names = cfg.model.component_names();
    let ks = run.ks_per_component.as_ref().expect("reference sample supplied");
    let mut tables = Vec::with_capacity(names.len());
    let mut components = Vec::with_capacity(names.len());
    for (i, name) in names.iter().enumerate() {
        let table = quantile_table(i, &exact.column(i), &chain.column(i), &probs)?;
        let exact_range = table.quantiles_a[table.quantiles_a.len() - 1] - table.quantiles_a[0];
        components.push(ComponentValidation {
            name: name.clone(),
            ks_statistic: ks[i].statistic,
            ks_critical_value: ks[i].critical_value,
            ks_reject: ks[i].reject_at_1pct,
            tau: run.iat.tau_per_component[i],
            max_quantile_deviation: table.max_abs_deviation(0.995 + 1e-12),
            exact_range,
        });
        tables.push(table);
    }
    let passed =
        components.iter().all(|c| !c.ks_reject && c.relative_quantile_deviation() < MAX_RELATIVE_QUANTILE_DEVIATION);
    let report = ValidationReport {
        components,
        acceptance_rate: chain.acceptance_rate(),
        tuned_h: chain.tuned_h,
        divergences: chain.divergences,
        n_exact: cfg.n_exact,
        n_mcmc_kept: chain.len(),
        passed,
    };
    Ok(Validation { report, tables, run })
}
