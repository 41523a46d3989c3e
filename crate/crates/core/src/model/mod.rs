//! Rosenbrock-family target densities.
//!
//! Every family is stored as a list of quadratic [`Term`]s of the form
//! `weight * (x[target] - center)^2`, where the center is either a constant or
//! the square of another coordinate. The log-kernel is minus the sum of the
//! terms, which gives one evaluation path for values, gradients and Hessians.

mod analysis;
mod density;

pub use analysis::{
    completed_square_conditional, conditional_decomposition, full3d_conditional_x2, log_norm_constant,
    ConditionalGaussian, Factor,
};
pub use density::{evaluate, grad_log_kernel, hessian_log_kernel, log_kernel, DensityEval};

use serde::{Deserialize, Deserializer, Serialize};

use crate::error::{Error, Result};

/// Parameters of the 2-d kernel `exp{-a (x1 - mu)^2 - b (x2 - x1^2)^2}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TwoDParams {
    #[serde(deserialize_with = "real")]
    pub mu: f64,
    #[serde(deserialize_with = "real")]
    pub a: f64,
    #[serde(deserialize_with = "real")]
    pub b: f64,
}

/// Parameters of the chained ("Full") n-dimensional kernel.
///
/// Stored literally as `scale * sum_i [quad_coeff (x_{i+1} - x_i^2)^2 + (mu - x_i)^2]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FullParams {
    pub n: usize,
    #[serde(deserialize_with = "real")]
    pub scale: f64,
    #[serde(deserialize_with = "real")]
    pub quad_coeff: f64,
    #[serde(deserialize_with = "real")]
    pub mu: f64,
}

/// Parameters of the "Even" kernel: a product of `n / 2` independent 2-d kernels.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvenParams {
    pub n: usize,
    #[serde(deserialize_with = "reals")]
    pub mus: Vec<f64>,
    #[serde(deserialize_with = "real")]
    pub scale: f64,
    #[serde(deserialize_with = "real")]
    pub quad_coeff: f64,
}

/// Parameters of the Hybrid kernel.
///
/// `b[j][i - 2]` is the coefficient of `(x_{j+1,i} - x_{j+1,i-1}^2)^2` for
/// block `j` (zero based) and in-block position `i = 2..=n1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HybridParams {
    #[serde(deserialize_with = "real")]
    pub mu: f64,
    #[serde(deserialize_with = "real")]
    pub a: f64,
    #[serde(deserialize_with = "real_matrix")]
    pub b: Vec<Vec<f64>>,
    pub n1: usize,
    pub n2: usize,
}

impl HybridParams {
    /// Hybrid parameters with every `b[j][i]` equal to `b`.
    pub fn uniform(mu: f64, a: f64, b: f64, n1: usize, n2: usize) -> Self {
        HybridParams { mu, a, b: vec![vec![b; n1.saturating_sub(1)]; n2], n1, n2 }
    }

    /// `n = (n1 - 1) * n2 + 1`.
    pub fn dim(&self) -> usize {
        (self.n1 - 1) * self.n2 + 1
    }

    /// Flat index of `x_{j,i}` with one-based block `j` and in-block `i >= 1`.
    /// `x_{j,1}` is the shared root `x_1`.
    pub fn index(&self, j: usize, i: usize) -> usize {
        if i == 1 {
            0
        } else {
            1 + (j - 1) * (self.n1 - 1) + (i - 2)
        }
    }
}

impl FullParams {
    /// The literal coefficients of the standard chained kernel.
    pub fn standard(n: usize) -> Self {
        FullParams { n, scale: 1.0 / 20.0, quad_coeff: 100.0, mu: 1.0 }
    }

    /// General-form coefficients `(a, b) = (scale, quad_coeff * scale)`.
    pub fn general_coefficients(&self) -> (f64, f64) {
        (self.scale, self.quad_coeff * self.scale)
    }
}

impl EvenParams {
    pub fn standard(n: usize) -> Self {
        EvenParams { n, mus: vec![1.0; n / 2], scale: 1.0 / 20.0, quad_coeff: 100.0 }
    }

    /// General-form coefficients `(a, b) = (scale, quad_coeff * scale)`.
    pub fn general_coefficients(&self) -> (f64, f64) {
        (self.scale, self.quad_coeff * self.scale)
    }
}

/// The parameterized family, as it appears in JSON documents.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum Family {
    TwoD(TwoDParams),
    Full(FullParams),
    Even(EvenParams),
    Hybrid(HybridParams),
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::TwoD(_) => "twod",
            Family::Full(_) => "full",
            Family::Even(_) => "even",
            Family::Hybrid(_) => "hybrid",
        }
    }
}

/// Center of a quadratic term.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Center {
    Const(f64),
    SquareOf(usize),
}

/// One `weight * (x[target] - center)^2` term of the negated log-kernel.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Term {
    pub weight: f64,
    pub target: usize,
    pub center: Center,
}

impl Term {
    #[inline]
    pub fn center_value(&self, x: &[f64]) -> f64 {
        match self.center {
            Center::Const(c) => c,
            Center::SquareOf(p) => x[p] * x[p],
        }
    }

    #[inline]
    pub fn parent(&self) -> Option<usize> {
        match self.center {
            Center::Const(_) => None,
            Center::SquareOf(p) => Some(p),
        }
    }
}

/// A validated target density. Immutable once built.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Family", into = "Family")]
pub struct ModelSpec {
    family: Family,
    dim: usize,
    terms: Vec<Term>,
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParams(format!("{name} must be positive and finite, got {v}")))
    }
}

fn finite(name: &str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParams(format!("{name} must be finite, got {v}")))
    }
}

impl ModelSpec {
    pub fn new(family: Family) -> Result<Self> {
        let (dim, terms) = match &family {
            Family::TwoD(p) => {
                finite("mu", p.mu)?;
                positive("a", p.a)?;
                positive("b", p.b)?;
                let terms = vec![
                    Term { weight: p.a, target: 0, center: Center::Const(p.mu) },
                    Term { weight: p.b, target: 1, center: Center::SquareOf(0) },
                ];
                (2, terms)
            }
            Family::Full(p) => {
                if p.n < 2 {
                    return Err(Error::InvalidParams(format!("full kernel needs n >= 2, got {}", p.n)));
                }
                positive("scale", p.scale)?;
                positive("quad_coeff", p.quad_coeff)?;
                finite("mu", p.mu)?;
                let (a, b) = p.general_coefficients();
                let mut terms = Vec::with_capacity(2 * (p.n - 1));
                for i in 0..p.n - 1 {
                    terms.push(Term { weight: b, target: i + 1, center: Center::SquareOf(i) });
                    terms.push(Term { weight: a, target: i, center: Center::Const(p.mu) });
                }
                (p.n, terms)
            }
            Family::Even(p) => {
                if p.n < 2 || p.n % 2 != 0 {
                    return Err(Error::InvalidParams(format!("even kernel needs an even n >= 2, got {}", p.n)));
                }
                if p.mus.len() != p.n / 2 {
                    return Err(Error::InvalidParams(format!(
                        "even kernel needs {} location values, got {}",
                        p.n / 2,
                        p.mus.len()
                    )));
                }
                positive("scale", p.scale)?;
                positive("quad_coeff", p.quad_coeff)?;
                let (a, b) = p.general_coefficients();
                let mut terms = Vec::with_capacity(p.n);
                for (k, &m) in p.mus.iter().enumerate() {
                    finite("mus", m)?;
                    terms.push(Term { weight: a, target: 2 * k, center: Center::Const(m) });
                    terms.push(Term { weight: b, target: 2 * k + 1, center: Center::SquareOf(2 * k) });
                }
                (p.n, terms)
            }
            Family::Hybrid(p) => {
                if p.n1 < 2 || p.n2 < 1 {
                    return Err(Error::InvalidParams(format!(
                        "hybrid kernel needs n1 >= 2 and n2 >= 1, got n1 = {}, n2 = {}",
                        p.n1, p.n2
                    )));
                }
                finite("mu", p.mu)?;
                positive("a", p.a)?;
                if p.b.len() != p.n2 || p.b.iter().any(|row| row.len() != p.n1 - 1) {
                    return Err(Error::InvalidParams(format!("b must be an {} x {} matrix", p.n2, p.n1 - 1)));
                }
                let mut terms = Vec::with_capacity(p.dim());
                terms.push(Term { weight: p.a, target: 0, center: Center::Const(p.mu) });
                for j in 1..=p.n2 {
                    for i in 2..=p.n1 {
                        let b = p.b[j - 1][i - 2];
                        positive("b", b)?;
                        terms.push(Term {
                            weight: b,
                            target: p.index(j, i),
                            center: Center::SquareOf(p.index(j, i - 1)),
                        });
                    }
                }
                (p.dim(), terms)
            }
        };
        Ok(ModelSpec { family, dim, terms })
    }

    pub fn two_d(mu: f64, a: f64, b: f64) -> Result<Self> {
        Self::new(Family::TwoD(TwoDParams { mu, a, b }))
    }

    pub fn hybrid(params: HybridParams) -> Result<Self> {
        Self::new(Family::Hybrid(params))
    }

    pub fn full(params: FullParams) -> Result<Self> {
        Self::new(Family::Full(params))
    }

    pub fn even(params: EvenParams) -> Result<Self> {
        Self::new(Family::Even(params))
    }

    /// Hybrid kernel with the standard parametrisation `mu = 1, a = 1/20, b = 100/20`.
    pub fn hybrid_standard(n1: usize, n2: usize) -> Result<Self> {
        Self::hybrid(HybridParams::uniform(1.0, 1.0 / 20.0, 100.0 / 20.0, n1, n2))
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    /// Whether the kernel factors into a chain of Gaussian conditionals.
    pub fn is_decomposable(&self) -> bool {
        !matches!(self.family, Family::Full(_))
    }

    /// Column labels used by the CSV writers.
    pub fn component_names(&self) -> Vec<String> {
        match &self.family {
            Family::Hybrid(p) => {
                let mut names = Vec::with_capacity(p.dim());
                names.push("x_1".to_string());
                for j in 1..=p.n2 {
                    for i in 2..=p.n1 {
                        names.push(format!("x_{j}_{i}"));
                    }
                }
                names
            }
            _ => (1..=self.dim).map(|k| format!("x_{k}")).collect(),
        }
    }

    pub(crate) fn check_point(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: x.len() });
        }
        if let Some((index, &value)) = x.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::NonFiniteInput { index, value });
        }
        Ok(())
    }
}

impl TryFrom<Family> for ModelSpec {
    type Error = Error;

    fn try_from(family: Family) -> Result<Self> {
        ModelSpec::new(family)
    }
}

impl From<ModelSpec> for Family {
    fn from(spec: ModelSpec) -> Self {
        spec.family
    }
}

// Numeric parameters may be given either as JSON numbers or as decimal strings.
#[derive(Deserialize)]
#[serde(untagged)]
enum RealRepr {
    Num(f64),
    Str(String),
}

impl RealRepr {
    fn value<E: serde::de::Error>(self) -> std::result::Result<f64, E> {
        match self {
            RealRepr::Num(v) => Ok(v),
            RealRepr::Str(s) => s.trim().parse::<f64>().map_err(|_| E::custom(format!("not a decimal number: {s:?}"))),
        }
    }
}

pub(crate) fn real<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
    RealRepr::deserialize(d)?.value()
}

fn reals<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<f64>, D::Error> {
    Vec::<RealRepr>::deserialize(d)?.into_iter().map(RealRepr::value).collect()
}

fn real_matrix<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Vec<f64>>, D::Error> {
    Vec::<Vec<RealRepr>>::deserialize(d)?
        .into_iter()
        .map(|row| row.into_iter().map(RealRepr::value).collect())
        .collect()
}
