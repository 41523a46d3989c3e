use rustfft::{num_complex::Complex, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mcmc::Chain;

/// Shortest series accepted by [`integrated_autocorrelation`].
pub const MIN_SERIES_LEN: usize = 100;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IatReport {
    pub tau_per_component: Vec<f64>,
    pub tau_max: f64,
    pub truncation_lag_per_component: Vec<usize>,
}

/// Sample autocorrelation with `1/N` normalization for lags `0..n`, via FFT.
pub fn autocorrelation(series: &[f64]) -> Result<Vec<f64>> {
    let n = series.len();
    if n == 0 {
        return Err(Error::EmptySample);
    }
    let mean = series.iter().sum::<f64>() / n as f64;
    let size = (2 * n).next_power_of_two();
    let mut buf: Vec<Complex<f64>> = series.iter().map(|&v| Complex::new(v - mean, 0.0)).collect();
    buf.resize(size, Complex::new(0.0, 0.0));
    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(size).process(&mut buf);
    for c in buf.iter_mut() {
        *c = Complex::new(c.norm_sqr(), 0.0);
    }
    planner.plan_fft_inverse(size).process(&mut buf);
    let c0 = buf[0].re;
    if c0.is_nan() || c0 <= 0.0 {
        return Err(Error::ZeroVariance);
    }
    Ok(buf[..n].iter().map(|c| c.re / c0).collect())
}

/// `tau = 1 + 2 sum_{l=1}^{L} rho(l)`, where `L` is the last lag before the
/// first non-positive sample autocorrelation.
pub fn integrated_autocorrelation(series: &[f64]) -> Result<(f64, usize)> {
    if series.len() < MIN_SERIES_LEN {
        return Err(Error::SeriesTooShort { min: MIN_SERIES_LEN, got: series.len() });
    }
    if series.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFiniteResult { quantity: "series value", point: Vec::new() });
    }
    let first = series[0];
    if series.iter().all(|&v| v == first) {
        return Err(Error::ZeroVariance);
    }
    let rho = autocorrelation(series)?;
    let mut sum = 0.0;
    let mut lag = 0;
    for (l, &r) in rho.iter().enumerate().skip(1) {
        if r <= 0.0 {
            break;
        }
        sum += r;
        lag = l;
    }
    Ok((1.0 + 2.0 * sum, lag))
}

/// Per-component `tau_i` and their maximum.
pub fn iat_report(chain: &Chain) -> Result<IatReport> {
    iat_report_rows(chain.states(), chain.dim())
}

/// [`iat_report`] for any row-major matrix.
pub fn iat_report_rows(states: &[f64], dim: usize) -> Result<IatReport> {
    let n = states.len() / dim;
    if n < MIN_SERIES_LEN {
        return Err(Error::SeriesTooShort { min: MIN_SERIES_LEN, got: n });
    }
    let mut taus = Vec::with_capacity(dim);
    let mut lags = Vec::with_capacity(dim);
    for i in 0..dim {
        let col: Vec<f64> = states.chunks_exact(dim).map(|r| r[i]).collect();
        let (tau, lag) = integrated_autocorrelation(&col)?;
        taus.push(tau);
        lags.push(lag);
    }
    let tau_max = taus.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(IatReport { tau_per_component: taus, tau_max, truncation_lag_per_component: lags })
}
