//! Statistical checks of the direct sampler against closed-form moments.

use rosenbrock_core::diagnostics::{ks_statistic, moments, pearson_correlation, sorted_copy, KS_COEFF_1PCT};
use rosenbrock_core::exact::conditional_moment_check;
use rosenbrock_core::model::{EvenParams, HybridParams};
use rosenbrock_core::{sample_exact, ModelSpec, RngStream};
use statrs::distribution::{ContinuousCDF, Normal};

fn one_sample_ks(sample: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let s = sorted_copy(sample);
    let n = s.len() as f64;
    s.iter()
        .enumerate()
        .map(|(i, &v)| {
            let f = cdf(v);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

#[test]
fn hybrid_marginal_moments_match_closed_form() {
    let spec = ModelSpec::hybrid_standard(3, 2).unwrap();
    let n = 1_000_000;
    let batch = sample_exact(&spec, n, RngStream::new(11, 0)).unwrap();
    let (mu, s2) = (1.0, 10.0);
    let m1 = moments(&batch.column(0));
    assert!((m1.mean - mu).abs() < 4.0 * (s2 / n as f64).sqrt(), "{m1:?}");
    assert!((m1.variance - s2).abs() < 4.0 * s2 * (2.0 / n as f64).sqrt(), "{m1:?}");

    // x_{j,2} | x1 ~ N(x1^2, 1/10): mean E[x1^2], variance Var(x1^2) + 0.1.
    let ex2 = mu * mu + s2;
    let ex4 = mu.powi(4) + 6.0 * mu * mu * s2 + 3.0 * s2 * s2;
    let var2 = ex4 - ex2 * ex2 + 0.1;
    let p = HybridParams::uniform(1.0, 0.05, 5.0, 3, 2);
    for j in 1..=2 {
        let m = moments(&batch.column(p.index(j, 2)));
        assert!((m.mean - ex2).abs() < 4.0 * (var2 / n as f64).sqrt(), "block {j}: {m:?}");
    }
}

#[test]
fn first_coordinate_passes_one_sample_ks() {
    let spec = ModelSpec::hybrid_standard(2, 4).unwrap();
    let normal = Normal::new(1.0, 10f64.sqrt()).unwrap();
    let n = 100_000;
    let mut rejections = 0;
    for rep in 0..20 {
        let batch = sample_exact(&spec, n, RngStream::derive(3, &[rep])).unwrap();
        let d = one_sample_ks(&batch.column(0), |v| normal.cdf(v));
        if d > KS_COEFF_1PCT / (n as f64).sqrt() {
            rejections += 1;
        }
    }
    assert!(rejections <= 1, "{rejections} of 20 replicates rejected");
}

#[test]
fn standardized_residuals_are_standard_normal() {
    let spec = ModelSpec::hybrid(HybridParams {
        mu: -0.3,
        a: 0.7,
        b: vec![vec![3.0, 0.02], vec![50.0, 1.0], vec![0.4, 9.0]],
        n1: 3,
        n2: 3,
    })
    .unwrap();
    let batch = sample_exact(&spec, 1_000_000, RngStream::new(4, 1)).unwrap();
    let report = conditional_moment_check(&batch).unwrap();
    assert_eq!(report.factors.len(), spec.dim());
    assert!(report.within(0.004, 0.005), "{report:?}");
}

#[test]
fn even_blocks_are_independent() {
    let spec = ModelSpec::even(EvenParams::standard(4)).unwrap();
    let n = 500_000;
    let batch = sample_exact(&spec, n, RngStream::new(9, 0)).unwrap();
    let bound = 4.0 / (n as f64).sqrt();
    for (i, j) in [(0, 2), (0, 3), (1, 2), (1, 3)] {
        let r = pearson_correlation(&batch.column(i), &batch.column(j));
        assert!(r.abs() < bound, "corr(x{i}, x{j}) = {r}");
    }
    // Within a block the coordinates are strongly dependent.
    assert!(pearson_correlation(&batch.column(0), &batch.column(1)).abs() > 0.05);
}

#[test]
fn independent_batches_differ_and_pass_two_sample_ks() {
    let spec = ModelSpec::hybrid_standard(3, 2).unwrap();
    let a = sample_exact(&spec, 50_000, RngStream::new(1, 0)).unwrap();
    let b = sample_exact(&spec, 50_000, RngStream::new(1, 1)).unwrap();
    assert_ne!(a.as_slice(), b.as_slice());
    let crit = KS_COEFF_1PCT * (2.0 / 50_000.0f64).sqrt();
    let worst = (0..spec.dim()).map(|i| ks_statistic(&a.column(i), &b.column(i))).fold(0.0, f64::max);
    assert!(worst < crit * 1.2, "{worst} vs {crit}");
}
