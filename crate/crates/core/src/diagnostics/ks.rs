use serde::{Deserialize, Serialize};

use super::quantile::sorted_copy;

/// 0.99 quantile of the Kolmogorov distribution (asymptotic 1% critical
/// coefficient).
pub const KS_COEFF_1PCT: f64 = 1.627_623_611_518_950_4;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KsResult {
    pub statistic: f64,
    pub critical_value: f64,
    pub n_eff_a: f64,
    pub n_eff_b: f64,
    pub reject_at_1pct: bool,
    /// Whether the sample sizes were deflated by autocorrelation times.
    pub deflated: bool,
}

/// Supremum distance between the two empirical CDFs.
pub fn ks_statistic(sample_a: &[f64], sample_b: &[f64]) -> f64 {
    let a = sorted_copy(sample_a);
    let b = sorted_copy(sample_b);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < a.len() && j < b.len() {
        let v = a[i].min(b[j]);
        while i < a.len() && a[i] <= v {
            i += 1;
        }
        while j < b.len() && b[j] <= v {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

/// Two-sample test at the 1% level with plain sample sizes.
pub fn ks_two_sample(sample_a: &[f64], sample_b: &[f64]) -> KsResult {
    ks_test(sample_a, sample_b, 1.0, 1.0, false)
}

/// Two-sample test where each sample's size is divided by its integrated
/// autocorrelation time before computing the critical value.
pub fn ks_two_sample_deflated(sample_a: &[f64], sample_b: &[f64], tau_a: f64, tau_b: f64) -> KsResult {
    ks_test(sample_a, sample_b, tau_a.max(1.0), tau_b.max(1.0), true)
}

fn ks_test(a: &[f64], b: &[f64], tau_a: f64, tau_b: f64, deflated: bool) -> KsResult {
    assert!(!a.is_empty() && !b.is_empty(), "KS test needs two nonempty samples");
    let statistic = ks_statistic(a, b);
    let n_eff_a = a.len() as f64 / tau_a;
    let n_eff_b = b.len() as f64 / tau_b;
    let critical_value = KS_COEFF_1PCT * ((n_eff_a + n_eff_b) / (n_eff_a * n_eff_b)).sqrt();
    KsResult { statistic, critical_value, n_eff_a, n_eff_b, reject_at_1pct: statistic > critical_value, deflated }
}
