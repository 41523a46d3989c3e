use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{hessian_log_kernel, ModelSpec};

/// How Hessian eigenvalues are made positive and bounded away from zero.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Regularization {
    /// `max(|lambda|, 1 / alpha)`.
    #[default]
    Floor,
    /// `lambda * coth(alpha * lambda)`, which tends to `1 / alpha` at zero and
    /// to `|lambda|` for large eigenvalues.
    SoftAbs,
    /// `max(|lambda|, max_j |lambda_j| / alpha)`: eigenvalues are raised to a
    /// `1 / alpha` fraction of the largest one, so the condition number of the
    /// metric is at most `alpha`.
    Multiplicative,
}

impl Regularization {
    /// Regularize one eigenvalue. `scale` is the largest absolute eigenvalue
    /// and only matters for [`Regularization::Multiplicative`].
    pub fn apply(self, lambda: f64, alpha: f64, scale: f64) -> f64 {
        match self {
            Regularization::Floor => lambda.abs().max(1.0 / alpha),
            Regularization::Multiplicative => lambda.abs().max(scale / alpha),
            Regularization::SoftAbs => {
                let t = alpha * lambda;
                if t.abs() < 1e-8 {
                    1.0 / alpha
                } else {
                    lambda / t.tanh()
                }
            }
        }
    }
}

/// Position-dependent proposal covariance `Sigma(x)`, stored through its
/// eigendecomposition `Sigma = Q diag(1 / lambda') Q^T`.
#[derive(Clone, Debug, PartialEq)]
pub struct Metric {
    eigvecs: DMatrix<f64>,
    /// Regularized eigenvalues of the precision `Sigma^{-1}`, all positive.
    precision_eigs: DVector<f64>,
    sigma: DMatrix<f64>,
    log_det: f64,
}

impl Metric {
    pub fn identity(dim: usize) -> Self {
        Metric {
            eigvecs: DMatrix::identity(dim, dim),
            precision_eigs: DVector::from_element(dim, 1.0),
            sigma: DMatrix::identity(dim, dim),
            log_det: 0.0,
        }
    }

    /// Build from a symmetric Hessian of the log density.
    pub fn from_hessian(
        hessian: DMatrix<f64>,
        alpha: f64,
        regularization: Regularization,
        point: &[f64],
    ) -> Result<Self> {
        let fail = || Error::Eigendecomposition { point: point.to_vec() };
        let eig = SymmetricEigen::try_new(hessian, f64::EPSILON, 10_000).ok_or_else(fail)?;
        if eig.eigenvalues.iter().any(|l| !l.is_finite()) {
            return Err(fail());
        }
        let scale = eig.eigenvalues.iter().fold(0.0f64, |m, l| m.max(l.abs()));
        let precision_eigs = eig.eigenvalues.map(|l| regularization.apply(l, alpha, scale));
        if precision_eigs.iter().any(|l| !(l.is_finite() && *l > 0.0)) {
            return Err(fail());
        }
        let q = eig.eigenvectors;
        let scaled = DMatrix::from_fn(q.nrows(), q.ncols(), |r, c| q[(r, c)] / precision_eigs[c]);
        let mut sigma = &scaled * q.transpose();
        // Symmetrize away rounding in the product.
        sigma = (&sigma + sigma.transpose()) * 0.5;
        let log_det = -precision_eigs.iter().map(|l| l.ln()).sum::<f64>();
        if !log_det.is_finite() {
            return Err(fail());
        }
        Ok(Metric { eigvecs: q, precision_eigs, sigma, log_det })
    }

    pub fn dim(&self) -> usize {
        self.precision_eigs.len()
    }

    /// The covariance matrix `Sigma(x)`.
    pub fn sigma(&self) -> &DMatrix<f64> {
        &self.sigma
    }

    /// Regularized eigenvalues of `Sigma^{-1}`.
    pub fn precision_eigenvalues(&self) -> &DVector<f64> {
        &self.precision_eigs
    }

    /// `log det Sigma`.
    pub fn log_det(&self) -> f64 {
        self.log_det
    }

    pub fn mul(&self, v: &DVector<f64>) -> DVector<f64> {
        &self.sigma * v
    }

    /// `L z` with `L L^T = Sigma`.
    pub fn sqrt_mul(&self, z: &DVector<f64>) -> DVector<f64> {
        let scaled = z.zip_map(&self.precision_eigs, |zi, l| zi / l.sqrt());
        &self.eigvecs * scaled
    }

    /// `d^T Sigma^{-1} d`.
    pub fn inv_quad(&self, d: &DVector<f64>) -> f64 {
        let proj = self.eigvecs.tr_mul(d);
        proj.iter().zip(self.precision_eigs.iter()).map(|(p, l)| l * p * p).sum()
    }
}

/// The regularized-Hessian metric at `x` with the default floor rule.
pub fn regularized_metric(spec: &ModelSpec, x: &[f64], alpha: f64) -> Result<Metric> {
    regularized_metric_with(spec, x, alpha, Regularization::Floor)
}

pub fn regularized_metric_with(
    spec: &ModelSpec,
    x: &[f64],
    alpha: f64,
    regularization: Regularization,
) -> Result<Metric> {
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(Error::InvalidConfig(format!("alpha must be positive, got {alpha}")));
    }
    Metric::from_hessian(hessian_log_kernel(spec, x)?, alpha, regularization, x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_d_origin_metric() {
        let spec = ModelSpec::two_d(1.0, 0.05, 5.0).unwrap();
        for alpha in [10.0, 1e3, 1e6] {
            let m = regularized_metric(&spec, &[0.0, 0.0], alpha).unwrap();
            assert!((m.sigma()[(0, 0)] - 10.0).abs() < 1e-12);
            assert!((m.sigma()[(1, 1)] - 0.1).abs() < 1e-14);
            assert!(m.sigma()[(0, 1)].abs() < 1e-15);
            assert!((m.log_det() - 0.0).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_eigenvalue_is_floored() {
        let h = DMatrix::from_row_slice(2, 2, &[0.0, 0.0, 0.0, -2.0]);
        let m = Metric::from_hessian(h, 1e6, Regularization::Floor, &[0.0, 0.0]).unwrap();
        assert!((m.sigma()[(0, 0)] - 1e6).abs() < 1e-6);
        assert!((m.sigma()[(1, 1)] - 0.5).abs() < 1e-15);
        assert!(m.precision_eigenvalues().iter().all(|&l| l >= 1e-6));
    }

    #[test]
    fn soft_abs_limits() {
        let r = Regularization::SoftAbs;
        assert!((r.apply(0.0, 1e3, 0.0) - 1e-3).abs() < 1e-15);
        assert!((r.apply(-5.0, 1e3, 0.0) - 5.0).abs() < 1e-12);
        assert!((r.apply(5.0, 1e3, 0.0) - 5.0).abs() < 1e-12);
        assert!(r.apply(1e-4, 1e3, 0.0) > 1e-3);
    }

    #[test]
    fn multiplicative_bounds_condition_number() {
        let h = DMatrix::from_diagonal(&DVector::from_vec(vec![-50.0, 0.0, 1e-9, 3.0]));
        let m = Metric::from_hessian(h, 1e3, Regularization::Multiplicative, &[0.0; 4]).unwrap();
        let eigs = m.precision_eigenvalues();
        let (lo, hi) = eigs.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), &l| (lo.min(l), hi.max(l)));
        assert!((hi / lo - 1e3).abs() < 1e-9);
        assert!(Metric::from_hessian(DMatrix::zeros(2, 2), 1e3, Regularization::Multiplicative, &[0.0; 2]).is_err());
    }

    #[test]
    fn sqrt_and_inverse_are_consistent() {
        let h = DMatrix::from_row_slice(3, 3, &[-4.0, 1.0, 0.5, 1.0, 3.0, -0.2, 0.5, -0.2, -1.0]);
        let m = Metric::from_hessian(h, 1e4, Regularization::Floor, &[0.0; 3]).unwrap();
        let z = DVector::from_vec(vec![0.3, -1.0, 2.0]);
        let lz = m.sqrt_mul(&z);
        // (L z)^T Sigma^{-1} (L z) = z^T z
        assert!((m.inv_quad(&lz) - z.norm_squared()).abs() < 1e-10);
        let inv = m.sigma().clone().try_inverse().unwrap();
        let direct = (lz.transpose() * inv * &lz)[(0, 0)];
        assert!((direct - z.norm_squared()).abs() < 1e-10);
    }
}
