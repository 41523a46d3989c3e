//! Adaptive Gauss-Kronrod (7/15 point) quadrature.

use crate::error::{Error, Result};
use crate::model::{log_kernel, Family, ModelSpec};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
// Gauss weights for the odd-indexed Kronrod nodes 1, 3, 5, 7.
const WG: [f64; 4] =
    [0.129_484_966_168_869_7, 0.279_705_391_489_276_7, 0.381_830_050_505_118_9, 0.417_959_183_673_469_4];

const MAX_DEPTH: u32 = 60;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub error_estimate: f64,
    pub evaluations: usize,
}

fn gk15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for k in 0..7 {
        let dx = half * XGK[k];
        let s = f(center - dx) + f(center + dx);
        kronrod += WGK[k] * s;
        if k % 2 == 1 {
            gauss += WG[k / 2] * s;
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).abs())
}

/// Integrate `f` over `[a, b]`, bisecting until each piece's Kronrod-Gauss
/// difference is below its share of `max(abs_tol, rel_tol * |estimate|)`.
pub fn integrate<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, rel_tol: f64, abs_tol: f64) -> Result<QuadResult> {
    let (first, first_err) = gk15(&mut f, a, b);
    let tol = abs_tol.max(rel_tol * first.abs());
    let mut evaluations = 15;
    let mut stack = vec![(a, b, first, first_err, tol, 0u32)];
    let mut value = 0.0;
    let mut error_estimate = 0.0;
    while let Some((lo, hi, est, err, tol, depth)) = stack.pop() {
        if err <= tol || depth >= MAX_DEPTH {
            value += est;
            error_estimate += err;
            continue;
        }
        let mid = 0.5 * (lo + hi);
        let (l, le) = gk15(&mut f, lo, mid);
        let (r, re) = gk15(&mut f, mid, hi);
        evaluations += 30;
        stack.push((lo, mid, l, le, 0.5 * tol, depth + 1));
        stack.push((mid, hi, r, re, 0.5 * tol, depth + 1));
    }
    if !value.is_finite() {
        return Err(Error::NonFiniteResult { quantity: "quadrature", point: vec![a, b] });
    }
    Ok(QuadResult { value, error_estimate, evaluations })
}

/// Integral of the 2-d kernel's `exp(log_kernel)` by iterated adaptive
/// quadrature. The outer range covers `mu +- 10` root standard deviations and
/// the inner range `x1^2 +- 10` conditional standard deviations, so the
/// neglected Gaussian tail mass is below `2e-23` of the total.
pub fn two_d_kernel_integral(spec: &ModelSpec, rel_tol: f64) -> Result<QuadResult> {
    let Family::TwoD(p) = spec.family() else {
        return Err(Error::InvalidParams("quadrature check needs a 2-d kernel".into()));
    };
    let sd1 = (0.5 / p.a).sqrt();
    let sd2 = (0.5 / p.b).sqrt();
    let mut inner_evals = 0;
    let mut failure = None;
    let outer = integrate(
        |x1| {
            let c = x1 * x1;
            let inner = integrate(
                |x2| log_kernel(spec, &[x1, x2]).map(f64::exp).unwrap_or(f64::NAN),
                c - 10.0 * sd2,
                c + 10.0 * sd2,
                rel_tol * 1e-2,
                0.0,
            );
            match inner {
                Ok(r) => {
                    inner_evals += r.evaluations;
                    r.value
                }
                Err(e) => {
                    failure.get_or_insert(e);
                    f64::NAN
                }
            }
        },
        p.mu - 10.0 * sd1,
        p.mu + 10.0 * sd1,
        rel_tol * 1e-1,
        0.0,
    );
    if let Some(e) = failure {
        return Err(e);
    }
    let mut r = outer?;
    r.evaluations += inner_evals;
    Ok(r)
}
