use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{Center, Family, FullParams, ModelSpec};
use crate::error::{Error, Result};

/// A univariate normal distribution.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditionalGaussian {
    pub mean: f64,
    pub variance: f64,
}

impl ConditionalGaussian {
    pub fn std_dev(&self) -> f64 {
        self.variance.sqrt()
    }

    pub fn log_pdf(&self, v: f64) -> f64 {
        let d = v - self.mean;
        -0.5 * (2.0 * PI * self.variance).ln() - 0.5 * d * d / self.variance
    }
}

/// One factor of the ancestral factorization: `x[index] | x[parent]`.
///
/// The conditional is `N(center, 1 / (2 weight))` where the center is either a
/// constant or `x[parent]^2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Factor {
    pub index: usize,
    pub parent: Option<usize>,
    pub weight: f64,
    center: Center,
}

impl Factor {
    /// The conditional law of `x[index]` given the parent value stored in `x`.
    /// Only `x[parent]` is read.
    pub fn conditional(&self, x: &[f64]) -> ConditionalGaussian {
        let mean = match self.center {
            Center::Const(m) => m,
            Center::SquareOf(p) => x[p] * x[p],
        };
        ConditionalGaussian { mean, variance: 0.5 / self.weight }
    }

    /// Standardized residual `(x[index] - center) * sqrt(2 weight)`.
    pub fn standardized_residual(&self, x: &[f64]) -> f64 {
        let c = self.conditional(x);
        (x[self.index] - c.mean) * (2.0 * self.weight).sqrt()
    }
}

/// Natural log of the normalizing constant (the reciprocal of the kernel's
/// integral). Only the 2-d and Hybrid kernels have one in closed form.
pub fn log_norm_constant(spec: &ModelSpec) -> Result<f64> {
    match spec.family() {
        Family::TwoD(p) => Ok(0.5 * (p.a.ln() + p.b.ln()) - PI.ln()),
        Family::Hybrid(p) => {
            let n = p.dim() as f64;
            let sum_log_b: f64 = p.b.iter().flatten().map(|b| b.ln()).sum();
            Ok(0.5 * p.a.ln() + 0.5 * sum_log_b - 0.5 * n * PI.ln())
        }
        Family::Full(_) => Err(Error::ConstantUnknown { family: "full" }),
        Family::Even(_) => Err(Error::ConstantUnknown { family: "even" }),
    }
}

/// Ancestral factorization in topological order: roots first, then each
/// variable after its parent.
pub fn conditional_decomposition(spec: &ModelSpec) -> Result<Vec<Factor>> {
    if !spec.is_decomposable() {
        return Err(Error::NotDecomposable { family: spec.family().name() });
    }
    // For the decomposable families every coordinate is the target of exactly
    // one term and terms are generated parent-first.
    Ok(spec
        .terms()
        .iter()
        .map(|t| Factor { index: t.target, parent: t.parent(), weight: t.weight, center: t.center })
        .collect())
}

/// Law of `x2 | x1` after completing the square in
/// `-b (x2 - x1^2)^2 - c (x2 - mu2)^2`.
pub fn completed_square_conditional(b: f64, c: f64, mu2: f64, x1: f64) -> ConditionalGaussian {
    let precision = 2.0 * b + 2.0 * c;
    ConditionalGaussian { mean: (2.0 * b * x1 * x1 + 2.0 * c * mu2) / precision, variance: 1.0 / precision }
}

/// Law of `x2 | x1` for the 3-d chained kernel once `x3` is integrated out.
///
/// The general-form coefficients are `b = quad_coeff * scale`, `c = scale`,
/// `mu2 = mu`.
pub fn full3d_conditional_x2(params: &FullParams, x1: f64) -> Result<ConditionalGaussian> {
    if params.n != 3 {
        return Err(Error::InvalidParams(format!(
            "conditional of x2 is defined for the 3-d kernel, got n = {}",
            params.n
        )));
    }
    let (c, b) = params.general_coefficients();
    Ok(completed_square_conditional(b, c, params.mu, x1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{log_kernel, EvenParams, HybridParams};

    #[test]
    fn two_d_constant_standard() {
        let spec = ModelSpec::two_d(1.0, 1.0 / 20.0, 5.0).unwrap();
        let c = log_norm_constant(&spec).unwrap();
        assert!((c - (1.0 / (2.0 * PI)).ln()).abs() < 1e-14);
        assert!((c + 1.837877).abs() < 1e-6);
    }

    #[test]
    fn hybrid_constant_standard() {
        let spec = ModelSpec::hybrid(HybridParams::uniform(1.0, 0.05, 5.0, 3, 2)).unwrap();
        let c = log_norm_constant(&spec).unwrap();
        let direct = 0.05f64.sqrt() * 25.0 / PI.powf(2.5);
        assert!((c - direct.ln()).abs() < 1e-13);
        assert!((c.exp() - 0.31956).abs() < 1e-5);
    }

    #[test]
    fn hybrid_two_one_matches_two_d() {
        let h = ModelSpec::hybrid(HybridParams::uniform(0.7, 0.3, 2.5, 2, 1)).unwrap();
        let t = ModelSpec::two_d(0.7, 0.3, 2.5).unwrap();
        assert_eq!(log_norm_constant(&h).unwrap(), log_norm_constant(&t).unwrap());
    }

    #[test]
    fn unknown_constants() {
        let full = ModelSpec::full(FullParams::standard(3)).unwrap();
        let even = ModelSpec::even(EvenParams::standard(4)).unwrap();
        assert!(matches!(log_norm_constant(&full), Err(Error::ConstantUnknown { .. })));
        assert!(matches!(log_norm_constant(&even), Err(Error::ConstantUnknown { .. })));
    }

    #[test]
    fn two_d_decomposition() {
        let spec = ModelSpec::two_d(1.0, 0.05, 5.0).unwrap();
        let f = conditional_decomposition(&spec).unwrap();
        assert_eq!(f.len(), 2);
        let x = [3.0, 0.0];
        let root = f[0].conditional(&x);
        assert_eq!(f[0].parent, None);
        assert!((root.mean - 1.0).abs() < 1e-15 && (root.variance - 10.0).abs() < 1e-12);
        let child = f[1].conditional(&x);
        assert_eq!(f[1].parent, Some(0));
        assert!((child.mean - 9.0).abs() < 1e-15 && (child.variance - 0.1).abs() < 1e-15);
    }

    #[test]
    fn hybrid_and_even_decomposition_shape() {
        let spec = ModelSpec::hybrid_standard(3, 2).unwrap();
        let f = conditional_decomposition(&spec).unwrap();
        assert_eq!(f.len(), 5);
        assert_eq!(f.iter().filter(|f| f.parent == Some(0)).count(), 2);
        let mut seen = [false; 5];
        for factor in &f {
            if let Some(p) = factor.parent {
                assert!(seen[p], "parent drawn after child");
            }
            seen[factor.index] = true;
        }

        let even = ModelSpec::even(EvenParams::standard(4)).unwrap();
        let f = conditional_decomposition(&even).unwrap();
        let parents: Vec<_> = f.iter().map(|f| f.parent).collect();
        assert_eq!(parents, [None, Some(0), None, Some(2)]);

        let full = ModelSpec::full(FullParams::standard(3)).unwrap();
        assert!(matches!(conditional_decomposition(&full), Err(Error::NotDecomposable { .. })));
    }

    #[test]
    fn decomposition_reproduces_kernel_pointwise() {
        let spec = ModelSpec::hybrid(HybridParams {
            mu: -0.4,
            a: 0.3,
            b: vec![vec![1.5, 0.2, 4.0], vec![0.7, 2.0, 0.9]],
            n1: 4,
            n2: 2,
        })
        .unwrap();
        let factors = conditional_decomposition(&spec).unwrap();
        let log_c = log_norm_constant(&spec).unwrap();
        let x = [0.3, -1.1, 0.8, 2.0, 0.5, 0.1, -0.2];
        let log_density: f64 = factors.iter().map(|f| f.conditional(&x).log_pdf(x[f.index])).sum();
        assert!((log_density - (log_kernel(&spec, &x).unwrap() + log_c)).abs() < 1e-10);
    }

    #[test]
    fn full3d_conditional_values() {
        let g = completed_square_conditional(5.0, 5.0, 1.0, 2.0);
        assert!((g.variance - 0.05).abs() < 1e-15);
        assert!((g.mean - 2.5).abs() < 1e-15);
        let g = completed_square_conditional(5.0, 1e-12, 1.0, 1.5);
        assert!((g.variance - 0.1).abs() < 1e-12);
        assert!((g.mean - 2.25).abs() < 1e-10);

        let p = FullParams::standard(3);
        let g = full3d_conditional_x2(&p, 1.0).unwrap();
        assert!((g.variance - 1.0 / 10.1).abs() < 1e-15);
        assert!(full3d_conditional_x2(&FullParams::standard(4), 1.0).is_err());
    }
}
