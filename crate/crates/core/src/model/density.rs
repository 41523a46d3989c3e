use nalgebra::DMatrix;

use super::{Center, ModelSpec};
use crate::error::{Error, Result};

/// Log-kernel, gradient and (optionally) Hessian at one point.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityEval {
    pub log_kernel: f64,
    pub grad: Vec<f64>,
    pub hessian: Option<DMatrix<f64>>,
}

fn ensure_finite(quantity: &'static str, x: &[f64], values: &[f64]) -> Result<()> {
    if values.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFiniteResult { quantity, point: x.to_vec() })
    }
}

/// Unnormalized log density.
pub fn log_kernel(spec: &ModelSpec, x: &[f64]) -> Result<f64> {
    spec.check_point(x)?;
    let value = log_kernel_unchecked(spec, x);
    ensure_finite("log-kernel", x, &[value])?;
    Ok(value)
}

#[inline]
pub(crate) fn log_kernel_unchecked(spec: &ModelSpec, x: &[f64]) -> f64 {
    -spec
        .terms()
        .iter()
        .map(|t| {
            let r = x[t.target] - t.center_value(x);
            t.weight * r * r
        })
        .sum::<f64>()
}

pub fn grad_log_kernel(spec: &ModelSpec, x: &[f64]) -> Result<Vec<f64>> {
    spec.check_point(x)?;
    let mut grad = vec![0.0; spec.dim()];
    for t in spec.terms() {
        let r = x[t.target] - t.center_value(x);
        grad[t.target] -= 2.0 * t.weight * r;
        if let Center::SquareOf(p) = t.center {
            grad[p] += 4.0 * t.weight * r * x[p];
        }
    }
    ensure_finite("gradient", x, &grad)?;
    Ok(grad)
}

/// Analytic Hessian. Each term writes the mirrored off-diagonal pair with the
/// same value, so the result is exactly symmetric.
pub fn hessian_log_kernel(spec: &ModelSpec, x: &[f64]) -> Result<DMatrix<f64>> {
    spec.check_point(x)?;
    let n = spec.dim();
    let mut h = DMatrix::zeros(n, n);
    for t in spec.terms() {
        let u = t.target;
        h[(u, u)] -= 2.0 * t.weight;
        if let Center::SquareOf(p) = t.center {
            let r = x[u] - x[p] * x[p];
            let cross = 4.0 * t.weight * x[p];
            h[(u, p)] += cross;
            h[(p, u)] += cross;
            h[(p, p)] += 4.0 * t.weight * r - 8.0 * t.weight * x[p] * x[p];
        }
    }
    ensure_finite("Hessian", x, h.as_slice())?;
    Ok(h)
}

/// Evaluate value and gradient, plus the Hessian when `with_hessian` is set.
pub fn evaluate(spec: &ModelSpec, x: &[f64], with_hessian: bool) -> Result<DensityEval> {
    let log_kernel = log_kernel(spec, x)?;
    let grad = grad_log_kernel(spec, x)?;
    let hessian = if with_hessian { Some(hessian_log_kernel(spec, x)?) } else { None };
    Ok(DensityEval { log_kernel, grad, hessian })
}
