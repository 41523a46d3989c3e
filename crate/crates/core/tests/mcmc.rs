//! MCMC kernels checked against independently computed quantities.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rosenbrock_core::diagnostics::{integrated_autocorrelation, moments};
use rosenbrock_core::mcmc::{propose, propose_with_noise, regularized_metric, Geometry, Regularization, Transition};
use rosenbrock_core::model::{grad_log_kernel, hessian_log_kernel, log_kernel};
use rosenbrock_core::{run_chain, Algorithm, ModelSpec, RngStream, SamplerConfig};

/// Gaussian log density via Cholesky of the covariance, built without the
/// library's eigendecomposition.
fn log_normal(x: &DVector<f64>, mean: &DVector<f64>, cov: &DMatrix<f64>) -> f64 {
    let n = x.len() as f64;
    let chol = cov.clone().cholesky().expect("covariance is SPD");
    let d = x - mean;
    let w = chol.solve(&d);
    let log_det = 2.0 * chol.l().diagonal().iter().map(|v| v.ln()).sum::<f64>();
    -0.5 * (n * (2.0 * std::f64::consts::PI).ln() + log_det + d.dot(&w))
}

/// `Sigma(x)` as the inverse of the floored absolute Hessian.
fn oracle_sigma(spec: &ModelSpec, x: &[f64], alpha: f64) -> DMatrix<f64> {
    let h = hessian_log_kernel(spec, x).unwrap();
    let eig = h.symmetric_eigen();
    let lam = eig.eigenvalues.map(|l| l.abs().max(1.0 / alpha));
    let g = &eig.eigenvectors * DMatrix::from_diagonal(&lam) * eig.eigenvectors.transpose();
    let sigma = g.try_inverse().unwrap();
    (&sigma + sigma.transpose()) * 0.5
}

fn oracle_log_ratio(spec: &ModelSpec, x: &[f64], y: &[f64], h: f64, alpha: f64) -> f64 {
    let q = |from: &[f64], to: &[f64]| {
        let sigma = oracle_sigma(spec, from, alpha);
        let g = DVector::from_vec(grad_log_kernel(spec, from).unwrap());
        let mean = DVector::from_column_slice(from) + &sigma * g * (0.5 * h);
        log_normal(&DVector::from_column_slice(to), &mean, &(sigma * h))
    };
    log_kernel(spec, y).unwrap() + q(y, x) - log_kernel(spec, x).unwrap() - q(x, y)
}

#[test]
fn metric_is_inverse_negative_hessian_when_well_conditioned() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..200 {
        let n = rng.random_range(2..7);
        let a = DMatrix::from_fn(n, n, |_, _| rng.sample::<f64, _>(StandardNormal));
        let neg_h = &a * a.transpose() + DMatrix::identity(n, n) * 0.5;
        let m = rosenbrock_core::mcmc::Metric::from_hessian(-neg_h.clone(), 1e6, Regularization::Floor, &vec![0.0; n])
            .unwrap();
        let expect = neg_h.clone().try_inverse().unwrap();
        let err = (m.sigma() - &expect).abs().max() / expect.abs().max();
        assert!(err < 1e-10, "relative error {err}");
        assert!((m.log_det() - expect.determinant().ln()).abs() < 1e-9);
    }
}

#[test]
fn metric_is_positive_definite_everywhere() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let specs = [ModelSpec::hybrid_standard(3, 2).unwrap(), ModelSpec::two_d(0.0, 0.01, 40.0).unwrap()];
    for spec in &specs {
        for _ in 0..500 {
            let x: Vec<f64> = (0..spec.dim()).map(|_| rng.random_range(-5.0..5.0)).collect();
            let m = regularized_metric(spec, &x, 1e6).unwrap();
            assert!(m.sigma().clone().cholesky().is_some());
            assert!(m.precision_eigenvalues().iter().all(|&l| l >= 1e-6));
        }
    }
}

#[test]
fn proposal_moments_match_drift_and_covariance() {
    let spec = ModelSpec::two_d(1.0, 0.05, 5.0).unwrap();
    let x = [0.4, 0.9];
    let h = 0.7;
    let geom = Geometry::at(&spec, &x, Algorithm::Smmala, 1e6, Regularization::Floor).unwrap();
    let sigma = oracle_sigma(&spec, &x, 1e6);
    let g = DVector::from_vec(grad_log_kernel(&spec, &x).unwrap());
    let mean = DVector::from_column_slice(&x) + &sigma * g * (0.5 * h);
    let cov = &sigma * h;

    let mut rng = RngStream::new(6, 0).rng();
    let n = 200_000;
    let draws: Vec<DVector<f64>> = (0..n).map(|_| propose(&geom, h, &mut rng).unwrap().x).collect();
    let emp_mean = draws.iter().fold(DVector::zeros(2), |acc, d| acc + d) / n as f64;
    let mut emp_cov = DMatrix::zeros(2, 2);
    for d in &draws {
        let c = d - &emp_mean;
        emp_cov += &c * c.transpose();
    }
    emp_cov /= (n - 1) as f64;
    for i in 0..2 {
        let se = (cov[(i, i)] / n as f64).sqrt();
        assert!((emp_mean[i] - mean[i]).abs() < 4.0 * se, "mean[{i}]");
        for j in 0..2 {
            let se = ((cov[(i, i)] * cov[(j, j)] + cov[(i, j)].powi(2)) / n as f64).sqrt();
            assert!((emp_cov[(i, j)] - cov[(i, j)]).abs() < 4.0 * se, "cov[{i},{j}]");
        }
    }
}

#[test]
fn replayed_log_ratios_match_oracle() {
    let spec = ModelSpec::two_d(1.0, 0.05, 5.0).unwrap();
    let alpha = 1e6;
    let h = 0.8;
    let mut t = Transition::new(&spec, Algorithm::Smmala, alpha, Regularization::Floor, &[1.0, 1.0]).unwrap();
    let mut rng = RngStream::new(12, 0).rng();
    let mut worst = 0.0f64;
    for _ in 0..10_000 {
        let rec = t.step(h, &mut rng);
        let Some(y) = rec.proposal.as_ref() else { continue };
        let x: Vec<f64> = rec.from.iter().copied().collect();
        let y: Vec<f64> = y.iter().copied().collect();
        let expect = oracle_log_ratio(&spec, &x, &y, h, alpha);
        worst = worst.max((rec.log_ratio - expect).abs() / expect.abs().max(1.0));

        // The proposal is reproducible from the recorded noise.
        let geom = Geometry::at(&spec, &x, Algorithm::Smmala, alpha, Regularization::Floor).unwrap();
        let again = propose_with_noise(&geom, h, rec.z.clone()).unwrap();
        assert_eq!(again.x.as_slice(), y.as_slice());
    }
    assert!(worst < 1e-10, "worst relative log-ratio error {worst}");
}

/// Three-region partition of a stationary chain: transition counts between
/// every pair of regions balance under a reversible kernel.
#[test]
fn detailed_balance_on_coarse_partition() {
    let spec = ModelSpec::two_d(1.0, 0.5, 0.5).unwrap();
    let region = |x: &[f64]| {
        if x[0] < 0.0 {
            0
        } else if x[0] < 1.5 {
            1
        } else {
            2
        }
    };
    for algorithm in [Algorithm::Rwm, Algorithm::Mala, Algorithm::Smmala] {
        let config = SamplerConfig { algorithm, h: 1.0, ..SamplerConfig::smmala(1_000_000, 5_000) };
        let chain = run_chain(&spec, &config, RngStream::new(21, algorithm as u64)).unwrap();
        let mut counts = [[0u64; 3]; 3];
        let rows: Vec<&[f64]> = chain.rows().collect();
        for w in rows.windows(2) {
            counts[region(w[0])][region(w[1])] += 1;
        }
        for (i, j) in [(0, 1), (0, 2), (1, 2)] {
            let (a, b) = (counts[i][j] as f64, counts[j][i] as f64);
            assert!((a - b).abs() < 5.0 * (a + b).sqrt() + 2.0, "{algorithm:?} {i}<->{j}: {a} vs {b}");
        }
    }
}

#[test]
fn mala_recovers_gaussian_like_marginal() {
    // With a = b = 0.5, x1 ~ N(1, 1) and x2 | x1 ~ N(x1^2, 1).
    let spec = ModelSpec::two_d(1.0, 0.5, 0.5).unwrap();
    let config = SamplerConfig { algorithm: Algorithm::Mala, h: 0.5, ..SamplerConfig::smmala(400_000, 10_000) };
    let chain = run_chain(&spec, &config, RngStream::new(8, 0)).unwrap();
    let x1 = chain.column(0);
    let (tau, _) = integrated_autocorrelation(&x1).unwrap();
    let m = moments(&x1);
    let n_eff = x1.len() as f64 / tau;
    assert!((m.mean - 1.0).abs() < 4.0 / n_eff.sqrt(), "mean {} tau {tau}", m.mean);
    assert!((m.variance - 1.0).abs() < 4.0 * (2.0 / n_eff).sqrt(), "var {} tau {tau}", m.variance);
    let x2 = moments(&chain.column(1));
    // E[x2] = E[x1^2] = 2.
    assert!((x2.mean - 2.0).abs() < 0.1, "{x2:?}");
}

#[test]
fn rwm_is_mala_without_drift() {
    let spec = ModelSpec::two_d(1.0, 0.05, 5.0).unwrap();
    let x = [0.3, -0.2];
    let z = DVector::from_vec(vec![0.25, 1.5]);
    let h = 0.2;
    let rwm = Geometry::at(&spec, &x, Algorithm::Rwm, 1e6, Regularization::Floor).unwrap();
    let mala = Geometry::at(&spec, &x, Algorithm::Mala, 1e6, Regularization::Floor).unwrap();
    let p_rwm = propose_with_noise(&rwm, h, z.clone()).unwrap();
    let p_mala = propose_with_noise(&mala, h, z).unwrap();
    let drift = (p_mala.x - p_rwm.x) / (0.5 * h);
    let g = grad_log_kernel(&spec, &x).unwrap();
    for i in 0..2 {
        assert!((drift[i] - g[i]).abs() < 1e-12 * g[i].abs().max(1.0));
    }
}

/// The tuned step size lands near the value a grid search finds for 50%
/// stationary acceptance.
#[test]
fn tuner_agrees_with_grid_search() {
    let spec = ModelSpec::hybrid_standard(3, 2).unwrap();
    let fixed_rate = |h: f64| {
        let cfg = SamplerConfig { h, ..SamplerConfig::smmala(40_000, 0) };
        // Start from an exact draw so no burn-in is needed.
        let init = rosenbrock_core::sample_exact(&spec, 1, RngStream::new(30, 0)).unwrap().row(0).to_vec();
        let cfg = SamplerConfig { init: Some(init), ..cfg };
        run_chain(&spec, &cfg, RngStream::new(31, h.to_bits())).unwrap().acceptance_rate()
    };
    let (mut lo, mut hi) = (1e-3f64, 10.0f64);
    for _ in 0..14 {
        let mid = (lo * hi).sqrt();
        if fixed_rate(mid) > 0.5 {
            lo = mid
        } else {
            hi = mid
        }
    }
    let h_grid = (lo * hi).sqrt();
    let tuned: Vec<f64> = (0..5)
        .map(|rep| run_chain(&spec, &SamplerConfig::smmala(1, 20_000), RngStream::new(40, rep)).unwrap().tuned_h)
        .collect();
    let h_tuned = tuned.iter().map(|h| h.ln()).sum::<f64>().exp().powf(1.0 / tuned.len() as f64);
    assert!((h_tuned / h_grid - 1.0).abs() < 0.2, "tuned {h_tuned} ({tuned:?}) vs grid {h_grid}");
}
