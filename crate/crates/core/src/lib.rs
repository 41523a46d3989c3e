//! Rosenbrock-family benchmark distributions for testing MCMC samplers.
//!
//! * [`model`]: the 2-d, Full, Even and Hybrid kernels with analytic
//!   gradients, Hessians, normalizing constants and conditional structure.
//! * [`exact`]: exact i.i.d. sampling of the decomposable kernels.
//! * [`mcmc`]: RWM, MALA and simplified manifold MALA with warmup tuning.
//! * [`diagnostics`]: integrated autocorrelation time, quantiles, KS tests.
//! * [`harness`]: reproducible experiments and their file outputs.

pub mod diagnostics;
pub mod error;
pub mod exact;
pub mod harness;
pub mod io;
pub mod mcmc;
pub mod model;
pub mod quadrature;
pub mod rng;

pub use error::{Error, Result};
pub use exact::{conditional_moment_check, sample_exact, SampleBatch};
pub use mcmc::{run_chain, Algorithm, Chain, SamplerConfig};
pub use model::{DensityEval, Family, ModelSpec};
pub use rng::RngStream;
