//! `rosenbrock`: experiment driver for the Rosenbrock benchmark family.
//!
//! Exit codes: 0 on success, 2 when `validate` flags at least one component,
//! 1 on any error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use rosenbrock_core::harness::{
    load_config, run_experiment, ConstantCheckConfig, ExperimentConfig, McmcConfig, SampleConfig, SensitivityConfig,
    Sweep, ValidateConfig,
};
use rosenbrock_core::mcmc::{Algorithm, Regularization};
use rosenbrock_core::model::{EvenParams, FullParams, HybridParams};
use rosenbrock_core::{ModelSpec, SamplerConfig};

#[derive(Parser, Debug)]
#[command(name = "rosenbrock", version, about = "Rosenbrock-family MCMC benchmark experiments")]
struct Cli {
    /// Master seed (overrides the seed in --config).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Directory for outputs and the run manifest.
    #[arg(long, global = true, default_value = "out")]
    out_dir: PathBuf,
    /// Worker threads (results do not depend on this).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Experiment config or manifest (JSON). Replaces the subcommand's own flags.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Compare closed-form normalizing constants with numerical estimates.
    ConstantCheck {
        #[command(flatten)]
        model: ModelArgs,
        /// Importance samples for Hybrid kernels.
        #[arg(long, default_value_t = 10_000_000)]
        samples: usize,
    },
    /// Compare exact draws with a thinned sMMALA run (QQ tables + KS tests).
    Validate {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        sampler: SamplerArgs,
        #[arg(long, default_value_t = 200_000)]
        n_exact: usize,
        /// Override b in the MCMC target only (negative control).
        #[arg(long)]
        mcmc_b: Option<f64>,
    },
    /// Autocorrelation-time grid over catalog models and parameter sweeps.
    Sensitivity {
        /// Catalog models (1-6).
        #[arg(long, value_delimiter = ',', default_value = "1,2,3,4,5,6")]
        models: Vec<u8>,
        #[arg(long, value_delimiter = ',', default_value = "-4,1")]
        mu_values: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_value = "0.005,0.05,0.5")]
        a_values: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_value = "0.0005,0.05,5,50")]
        b_values: Vec<f64>,
        /// Only the standard parametrisation.
        #[arg(long)]
        standard_only: bool,
        #[arg(long, default_value_t = 5)]
        repetitions: usize,
        #[command(flatten)]
        sampler: SamplerArgs,
    },
    /// Exact i.i.d. samples (decomposable kernels).
    Sample {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, short = 'n', default_value_t = 10_000)]
        n_samples: usize,
        #[arg(long, default_value_t = 0)]
        stream: u64,
    },
    /// One MCMC run.
    Mcmc {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        sampler: SamplerArgs,
        #[arg(long, default_value_t = 0)]
        stream: u64,
    },
}

#[derive(Args, Debug, Clone)]
struct ModelArgs {
    /// twod | full | even | hybrid
    #[arg(long, default_value = "hybrid")]
    family: String,
    /// Model JSON file; overrides the other model flags.
    #[arg(long)]
    model_file: Option<PathBuf>,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    mu: f64,
    #[arg(long, default_value_t = 0.05)]
    a: f64,
    #[arg(long, default_value_t = 5.0)]
    b: f64,
    #[arg(long, default_value_t = 3)]
    n1: usize,
    #[arg(long, default_value_t = 2)]
    n2: usize,
    /// Dimension of the full and even kernels.
    #[arg(long, default_value_t = 3)]
    n: usize,
}

impl ModelArgs {
    fn build(&self) -> Result<ModelSpec> {
        if let Some(path) = &self.model_file {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            return serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()));
        }
        let spec = match self.family.as_str() {
            "twod" => ModelSpec::two_d(self.mu, self.a, self.b)?,
            "hybrid" => ModelSpec::hybrid(HybridParams::uniform(self.mu, self.a, self.b, self.n1, self.n2))?,
            "full" => ModelSpec::full(FullParams { mu: self.mu, ..FullParams::standard(self.n) })?,
            "even" => ModelSpec::even(EvenParams { mus: vec![self.mu; self.n / 2], ..EvenParams::standard(self.n) })?,
            other => bail!("unknown family {other:?}; expected twod, full, even or hybrid"),
        };
        Ok(spec)
    }
}

#[derive(Args, Debug, Clone)]
struct SamplerArgs {
    /// rwm | mala | smmala
    #[arg(long, default_value = "smmala")]
    algorithm: String,
    /// Initial step size (tuned during warmup).
    #[arg(long, default_value_t = 0.3)]
    h: f64,
    #[arg(long, default_value_t = 1e6)]
    alpha: f64,
    #[arg(long, default_value_t = 100_000)]
    steps: usize,
    #[arg(long, default_value_t = 10_000)]
    warmup: usize,
    #[arg(long, default_value_t = 0.5)]
    target_accept: f64,
    #[arg(long, default_value_t = 1)]
    thin: usize,
    /// floor | softabs | multiplicative
    #[arg(long, default_value = "floor")]
    regularization: String,
}

impl SamplerArgs {
    fn build(&self) -> Result<SamplerConfig> {
        let algorithm = match self.algorithm.as_str() {
            "rwm" => Algorithm::Rwm,
            "mala" => Algorithm::Mala,
            "smmala" => Algorithm::Smmala,
            other => bail!("unknown algorithm {other:?}"),
        };
        let regularization = match self.regularization.as_str() {
            "floor" => Regularization::Floor,
            "softabs" => Regularization::SoftAbs,
            "multiplicative" => Regularization::Multiplicative,
            other => bail!("unknown regularization {other:?}"),
        };
        Ok(SamplerConfig {
            algorithm,
            h: self.h,
            alpha: self.alpha,
            n_steps: self.steps,
            warmup: self.warmup,
            target_accept: self.target_accept,
            init: None,
            thin: self.thin,
            regularization,
            tune_window: 20,
        })
    }
}

fn experiment_from_args(command: &Command, seed: u64) -> Result<ExperimentConfig> {
    Ok(match command {
        Command::ConstantCheck { model, samples } => ExperimentConfig::ConstantCheck(ConstantCheckConfig {
            model: model.build()?,
            samples: *samples,
            rel_tol: 1e-9,
            seed,
        }),
        Command::Validate { model, sampler, n_exact, mcmc_b } => {
            let spec = model.build()?;
            let mcmc_model = match mcmc_b {
                Some(b) => Some(ModelArgs { b: *b, ..model.clone() }.build()?),
                None => None,
            };
            ExperimentConfig::Validate(ValidateConfig {
                model: spec,
                mcmc_model,
                sampler: sampler.build()?,
                n_exact: *n_exact,
                seed,
            })
        }
        Command::Sensitivity { models, mu_values, a_values, b_values, standard_only, repetitions, sampler } => {
            let sweep = if *standard_only {
                Sweep::standard_only()
            } else {
                Sweep { mu: mu_values.clone(), a: a_values.clone(), b: b_values.clone() }
            };
            ExperimentConfig::Sensitivity(SensitivityConfig {
                models: models.clone(),
                sweep,
                repetitions: *repetitions,
                sampler: sampler.build()?,
                seed,
            })
        }
        Command::Sample { model, n_samples, stream } => ExperimentConfig::Sample(SampleConfig {
            model: model.build()?,
            n_samples: *n_samples,
            seed,
            stream_id: *stream,
        }),
        Command::Mcmc { model, sampler, stream } => ExperimentConfig::Mcmc(McmcConfig {
            model: model.build()?,
            sampler: sampler.build()?,
            seed,
            stream_id: *stream,
        }),
    })
}

fn kind_matches(command: &Command, config: &ExperimentConfig) -> bool {
    matches!(
        (command, config),
        (Command::ConstantCheck { .. }, ExperimentConfig::ConstantCheck(_))
            | (Command::Validate { .. }, ExperimentConfig::Validate(_))
            | (Command::Sensitivity { .. }, ExperimentConfig::Sensitivity(_))
            | (Command::Sample { .. }, ExperimentConfig::Sample(_))
            | (Command::Mcmc { .. }, ExperimentConfig::Mcmc(_))
    )
}

fn run(cli: &Cli) -> Result<bool> {
    let experiment = match &cli.config {
        Some(path) => {
            let mut cfg = load_config(path).with_context(|| format!("loading {}", path.display()))?;
            if !kind_matches(&cli.command, &cfg) {
                bail!("{} describes a different experiment than the subcommand", path.display());
            }
            if let Some(seed) = cli.seed {
                cfg.set_seed(seed);
            }
            cfg
        }
        None => experiment_from_args(&cli.command, cli.seed.unwrap_or(0))?,
    };
    let pool = rayon::ThreadPoolBuilder::new().num_threads(cli.threads.unwrap_or(0)).build()?;
    let outcome = pool.install(|| run_experiment(&experiment, Path::new(&cli.out_dir)))?;
    println!("{}", serde_json::to_string_pretty(&outcome.summary)?);
    for path in &outcome.outputs {
        eprintln!("wrote {}", path.display());
    }
    Ok(outcome.passed)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("validation failed: at least one component disagrees with the exact sample");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
