//! Generic time-series statistics: Fourier coefficients, moments,
//! quantiles, change and autocorrelation statistics, linear trend.

use super::fft::fft;
use super::stats::{max, mean, median_sorted, min, quantile_sorted, sorted, variance};
use super::FeatureSlice;
use crate::ingest::FPS;

/// Fourier coefficients 0..=10 are reported.
pub const FFT_COEFFS: usize = 11;
pub const AUTOCORR_LAGS: usize = 5;
pub const C3_LAGS: usize = 3;
/// Below this many samples every feature is flagged.
pub const MIN_SAMPLES: usize = 3;

pub fn spectral_feature_names() -> Vec<String> {
    let mut v = Vec::with_capacity(78);
    for k in 0..FFT_COEFFS {
        for part in ["real", "imag", "abs", "angle"] {
            v.push(format!("fft_{k}_{part}"));
        }
    }
    for s in [
        "mean",
        "variance",
        "skewness",
        "kurtosis",
        "minimum",
        "maximum",
        "median",
        "quantile_10",
        "quantile_25",
        "quantile_75",
        "quantile_90",
        "abs_energy",
        "root_mean_square",
        "mean_abs_change",
        "mean_change",
        "count_above_mean",
        "count_below_mean",
        "longest_strike_above_mean",
        "longest_strike_below_mean",
    ] {
        v.push(s.to_string());
    }
    for l in 1..=AUTOCORR_LAGS {
        v.push(format!("autocorrelation_lag_{l}"));
    }
    for l in 1..=C3_LAGS {
        v.push(format!("c3_lag_{l}"));
    }
    for s in ["cid_ce", "number_mean_crossings", "linear_trend_slope", "linear_trend_intercept", "linear_trend_rvalue", "sample_count", "duration_s"] {
        v.push(s.to_string());
    }
    v
}

pub fn spectral_feature_count() -> usize {
    4 * FFT_COEFFS + 19 + AUTOCORR_LAGS + C3_LAGS + 7
}

struct Builder {
    out: FeatureSlice,
}

impl Builder {
    fn push(&mut self, v: f64) {
        self.push_if(true, v);
    }

    /// Pushes `v` when `ok` and it is finite, otherwise a flagged zero.
    fn push_if(&mut self, ok: bool, v: f64) {
        if ok && v.is_finite() {
            self.out.push(v);
        } else {
            self.out.push_flagged();
        }
    }
}

fn longest_strike(x: &[f64], pred: impl Fn(f64) -> bool) -> usize {
    let mut best = 0;
    let mut cur = 0;
    for &v in x {
        if pred(v) {
            cur += 1;
            best = best.max(cur);
        } else {
            cur = 0;
        }
    }
    best
}

/// Autocorrelation at `lag`: `Σ (x_t-μ)(x_{t+l}-μ) / ((n-l)·σ²)`.
fn autocorr_at(x: &[f64], mu: f64, var: f64, lag: usize) -> Option<f64> {
    let n = x.len();
    if lag >= n || var == 0.0 {
        return None;
    }
    let s: f64 = (0..n - lag).map(|t| (x[t] - mu) * (x[t + lag] - mu)).sum();
    Some(s / ((n - lag) as f64 * var))
}

/// Mean of `x_{t+2l}·x_{t+l}·x_t`.
fn c3(x: &[f64], lag: usize) -> Option<f64> {
    let n = x.len();
    if 2 * lag >= n {
        return None;
    }
    let m = n - 2 * lag;
    Some((0..m).map(|t| x[t + 2 * lag] * x[t + lag] * x[t]).sum::<f64>() / m as f64)
}

/// Features of one channel in the order of [`spectral_feature_names`].
pub fn extract_spectral(x: &[f64]) -> FeatureSlice {
    let total = spectral_feature_count();
    let n = x.len();
    if n < MIN_SAMPLES || x.iter().any(|v| !v.is_finite()) {
        return FeatureSlice::all_flagged(total);
    }
    let mut b = Builder { out: FeatureSlice::with_capacity(total) };

    let constant = x.iter().all(|v| *v == x[0]);
    let spec = fft(x).expect("non-empty input");
    for k in 0..FFT_COEFFS {
        // Coefficients above the Nyquist index of a short series are undefined.
        let ok = k <= n / 2;
        // A constant series has an exactly empty spectrum above DC; drop the
        // rounding residue so the angles are not arbitrary.
        let c = if constant && k > 0 { Default::default() } else { spec.get(k).copied().unwrap_or_default() };
        b.push_if(ok, c.re);
        b.push_if(ok, c.im);
        b.push_if(ok, c.abs());
        b.push_if(ok, c.arg());
    }

    let mu = mean(x);
    let var = variance(x);
    let has_var = var > 0.0;
    let sd = var.sqrt();
    b.push(mu);
    b.push(var);
    let m3 = x.iter().map(|v| ((v - mu) / sd).powi(3)).sum::<f64>() / n as f64;
    let m4 = x.iter().map(|v| ((v - mu) / sd).powi(4)).sum::<f64>() / n as f64;
    b.push_if(has_var, m3);
    b.push_if(has_var, m4 - 3.0);

    let s = sorted(x);
    b.push(min(x));
    b.push(max(x));
    b.push(median_sorted(&s));
    for q in [0.10, 0.25, 0.75, 0.90] {
        b.push(quantile_sorted(&s, q));
    }

    let energy: f64 = x.iter().map(|v| v * v).sum();
    b.push(energy);
    b.push((energy / n as f64).sqrt());
    let diffs: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
    b.push(diffs.iter().map(|d| d.abs()).sum::<f64>() / diffs.len() as f64);
    b.push((x[n - 1] - x[0]) / (n - 1) as f64);
    b.push(x.iter().filter(|&&v| v > mu).count() as f64);
    b.push(x.iter().filter(|&&v| v < mu).count() as f64);
    b.push(longest_strike(x, |v| v > mu) as f64);
    b.push(longest_strike(x, |v| v < mu) as f64);

    for lag in 1..=AUTOCORR_LAGS {
        match autocorr_at(x, mu, var, lag) {
            Some(r) => b.push(r),
            None => b.push_if(false, 0.0),
        }
    }
    for lag in 1..=C3_LAGS {
        match c3(x, lag) {
            Some(r) => b.push(r),
            None => b.push_if(false, 0.0),
        }
    }

    // Complexity estimate on the z-normalised series.
    if has_var {
        let z: Vec<f64> = x.iter().map(|v| (v - mu) / sd).collect();
        b.push(z.windows(2).map(|w| (w[1] - w[0]).powi(2)).sum::<f64>().sqrt());
    } else {
        b.push(0.0);
    }
    let crossings = x.windows(2).filter(|w| (w[0] > mu) != (w[1] > mu)).count();
    b.push(crossings as f64);

    let t: Vec<f64> = (0..n).map(|i| i as f64).collect();
    let tm = mean(&t);
    let sxx: f64 = t.iter().map(|v| (v - tm).powi(2)).sum();
    let sxy: f64 = t.iter().zip(x).map(|(a, y)| (a - tm) * (y - mu)).sum();
    let slope = sxy / sxx;
    b.push(slope);
    b.push(mu - slope * tm);
    let syy: f64 = x.iter().map(|y| (y - mu).powi(2)).sum();
    b.push_if(has_var && syy > 0.0, sxy / (sxx * syy).sqrt());

    b.push(n as f64);
    b.push(n as f64 / FPS);

    debug_assert_eq!(b.out.len(), total);
    b.out
}
