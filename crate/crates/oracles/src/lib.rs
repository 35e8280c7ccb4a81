//! Slow, obviously-correct reference computations.
//!
//! Everything here is written straight from the textbook definition, with
//! O(N²) loops where that is the plainest route. Nothing in this crate may
//! call into `socialsig-core`; the point is to have a second, independent
//! path to every number the production code produces.

use std::f64::consts::PI;

/// Naive discrete Fourier transform, `X_k = Σ x_n e^{-2πikn/N}`.
pub fn naive_dft(x: &[f64]) -> Vec<(f64, f64)> {
    let n = x.len();
    (0..n)
        .map(|k| {
            let mut re = 0.0;
            let mut im = 0.0;
            for (j, &v) in x.iter().enumerate() {
                // Reduce the phase index first so the angle stays small.
                let phase = ((k * j) % n) as f64 / n as f64;
                let ang = -2.0 * PI * phase;
                re += v * ang.cos();
                im += v * ang.sin();
            }
            (re, im)
        })
        .collect()
}

/// One-way ANOVA F from explicit between/within sums of squares.
///
/// Returns `f64::INFINITY` when the within-group sum of squares is zero and
/// the between-group one is not, and `0.0` when both vanish.
pub fn anova_f_direct(groups: &[Vec<f64>]) -> f64 {
    let g = groups.len() as f64;
    let n: usize = groups.iter().map(Vec::len).sum();
    let grand = groups.iter().flatten().sum::<f64>() / n as f64;
    let mut ssb = 0.0;
    let mut ssw = 0.0;
    for grp in groups {
        let m = grp.iter().sum::<f64>() / grp.len() as f64;
        ssb += grp.len() as f64 * (m - grand) * (m - grand);
        for v in grp {
            ssw += (v - m) * (v - m);
        }
    }
    if ssw == 0.0 {
        return if ssb == 0.0 { 0.0 } else { f64::INFINITY };
    }
    (ssb / (g - 1.0)) / (ssw / (n as f64 - g))
}

/// Run-length summary of a zone sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunSummary {
    pub transitions: usize,
    pub longest: usize,
    pub shortest: usize,
}

/// Counts transitions and run lengths by enumerating every maximal run.
pub fn zone_runs(zones: &[usize]) -> RunSummary {
    let mut runs: Vec<usize> = Vec::new();
    let mut i = 0;
    while i < zones.len() {
        let mut j = i;
        while j < zones.len() && zones[j] == zones[i] {
            j += 1;
        }
        runs.push(j - i);
        i = j;
    }
    let mut transitions = 0;
    for w in zones.windows(2) {
        if w[0] != w[1] {
            transitions += 1;
        }
    }
    RunSummary {
        transitions,
        longest: runs.iter().copied().max().unwrap_or(0),
        shortest: runs.iter().copied().min().unwrap_or(0),
    }
}

/// ROC-AUC as the fraction of (positive, negative) pairs ranked correctly,
/// ties scoring one half.
pub fn pairwise_auc(scores: &[f64], labels: &[u8]) -> f64 {
    let mut wins = 0.0;
    let mut pairs = 0.0;
    for (i, &si) in scores.iter().enumerate() {
        if labels[i] != 1 {
            continue;
        }
        for (j, &sj) in scores.iter().enumerate() {
            if labels[j] != 0 {
                continue;
            }
            pairs += 1.0;
            if si > sj {
                wins += 1.0;
            } else if si == sj {
                wins += 0.5;
            }
        }
    }
    wins / pairs
}

/// Fills each interior gap with the straight line through its two bounding
/// samples; leading/trailing gaps copy the nearest valid sample.
pub fn gap_line_fill(values: &[Option<f64>]) -> Vec<Option<f64>> {
    let valid: Vec<usize> = (0..values.len()).filter(|&i| values[i].is_some()).collect();
    if valid.is_empty() {
        return values.to_vec();
    }
    let mut out = values.to_vec();
    let first = valid[0];
    let last = *valid.last().unwrap();
    for slot in out.iter_mut().take(first) {
        *slot = values[first];
    }
    for slot in out.iter_mut().skip(last + 1) {
        *slot = values[last];
    }
    for pair in valid.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        if b - a < 2 {
            continue;
        }
        let (ya, yb) = (values[a].unwrap(), values[b].unwrap());
        // Point-slope form anchored at the left end; slope-intercept loses
        // digits once t is large.
        let slope = (yb - ya) / (b - a) as f64;
        for (t, slot) in out.iter_mut().enumerate().take(b).skip(a + 1) {
            *slot = Some(ya + slope * (t - a) as f64);
        }
    }
    out
}

/// Central finite-difference gradient of `f` at `x` with step `h`.
pub fn central_diff_gradient<F: Fn(&[f64]) -> f64>(f: F, x: &[f64], h: f64) -> Vec<f64> {
    let mut probe = x.to_vec();
    (0..x.len())
        .map(|i| {
            probe[i] = x[i] + h;
            let up = f(&probe);
            probe[i] = x[i] - h;
            let down = f(&probe);
            probe[i] = x[i];
            (up - down) / (2.0 * h)
        })
        .collect()
}

/// Derivative of a uniformly sampled series: central difference in the
/// interior, forward/backward difference at the ends, scaled by `rate`.
pub fn series_derivative(x: &[f64], rate: f64) -> Vec<f64> {
    let n = x.len();
    let mut out = vec![0.0; n];
    for t in 0..n {
        out[t] = if t == 0 {
            (x[1] - x[0]) * rate
        } else if t == n - 1 {
            (x[n - 1] - x[n - 2]) * rate
        } else {
            (x[t + 1] - x[t - 1]) * rate / 2.0
        };
    }
    out
}

/// Axis-aligned extent of a point set by exhaustive pairwise scan.
pub fn brute_extent(points: &[[f64; 3]]) -> [f64; 3] {
    let mut ext = [0.0f64; 3];
    for a in points {
        for b in points {
            for d in 0..3 {
                ext[d] = ext[d].max(a[d] - b[d]);
            }
        }
    }
    ext
}

/// Autocorrelation as `Σ (x_t-μ)(x_{t+l}-μ) / ((n-l) σ²)`, population σ².
pub fn autocorrelation_direct(x: &[f64], lag: usize) -> f64 {
    let n = x.len();
    let mean = x.iter().sum::<f64>() / n as f64;
    let var = x.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n as f64;
    let mut acc = 0.0;
    for t in 0..n - lag {
        acc += (x[t] - mean) * (x[t + lag] - mean);
    }
    acc / ((n - lag) as f64 * var)
}

/// Biased sample autocorrelation function normalised so `acf[0] == 1`.
pub fn acf_biased(x: &[f64], max_lag: usize) -> Vec<f64> {
    let n = x.len();
    let mean = x.iter().sum::<f64>() / n as f64;
    let c0: f64 = x.iter().map(|v| (v - mean) * (v - mean)).sum();
    (0..=max_lag)
        .map(|lag| {
            let mut s = 0.0;
            for t in 0..n - lag {
                s += (x[t] - mean) * (x[t + lag] - mean);
            }
            s / c0
        })
        .collect()
}

/// First lag at which the biased autocorrelation is no longer positive.
pub fn acf_first_zero(x: &[f64]) -> usize {
    let acf = acf_biased(x, x.len() - 1);
    acf.iter().position(|&r| r <= 0.0).unwrap_or(x.len())
}

/// Ordinary least-squares slope and intercept.
pub fn ols(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
    }
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// Detrended fluctuation: for each window size, cut the integrated profile
/// into non-overlapping windows, remove a per-window least-squares line and
/// return the root-mean-square residual. Returns `(scale, F(scale))` pairs.
pub fn dfa_fluctuations(profile: &[f64], scales: &[usize]) -> Vec<(usize, f64)> {
    scales
        .iter()
        .map(|&s| {
            let windows = profile.len() / s;
            let mut sum_sq = 0.0;
            for w in 0..windows {
                let seg = &profile[w * s..(w + 1) * s];
                let xs: Vec<f64> = (1..=s).map(|v| v as f64).collect();
                let (m, b) = ols(&xs, seg);
                for (k, v) in seg.iter().enumerate() {
                    let r = v - (m * xs[k] + b);
                    sum_sq += r * r;
                }
            }
            (s, (sum_sq / (windows * s) as f64).sqrt())
        })
        .collect()
}

/// Slope of `ln F` against `ln scale`.
pub fn loglog_slope(points: &[(usize, f64)]) -> f64 {
    let xs: Vec<f64> = points.iter().map(|p| (p.0 as f64).ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    ols(&xs, &ys).0
}

fn gini(counts: [usize; 2]) -> f64 {
    let n = (counts[0] + counts[1]) as f64;
    if n == 0.0 {
        return 0.0;
    }
    let p0 = counts[0] as f64 / n;
    let p1 = counts[1] as f64 / n;
    1.0 - p0 * p0 - p1 * p1
}

/// Best single-feature split by trying every midpoint between consecutive
/// distinct values and keeping the lowest weighted Gini impurity (first wins
/// on ties, scanning thresholds in ascending order).
pub fn best_gini_split(x: &[f64], y: &[u8]) -> Option<f64> {
    let mut vals: Vec<f64> = x.to_vec();
    vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
    vals.dedup();
    let mut best: Option<(f64, f64)> = None;
    for w in vals.windows(2) {
        let thr = (w[0] + w[1]) / 2.0;
        let mut left = [0usize; 2];
        let mut right = [0usize; 2];
        for (v, &c) in x.iter().zip(y) {
            if *v <= thr {
                left[c as usize] += 1;
            } else {
                right[c as usize] += 1;
            }
        }
        let nl = (left[0] + left[1]) as f64;
        let nr = (right[0] + right[1]) as f64;
        let imp = (nl * gini(left) + nr * gini(right)) / (nl + nr);
        if best.is_none_or(|(b, _)| imp < b) {
            best = Some((imp, thr));
        }
    }
    best.map(|b| b.1)
}

/// Two-sample Kolmogorov–Smirnov statistic `sup |F_a - F_b|`, evaluated at
/// every pooled sample point.
pub fn ks_statistic(a: &[f64], b: &[f64]) -> f64 {
    let ecdf = |s: &[f64], t: f64| s.iter().filter(|&&v| v <= t).count() as f64 / s.len() as f64;
    a.iter()
        .chain(b)
        .map(|&t| (ecdf(a, t) - ecdf(b, t)).abs())
        .fold(0.0, f64::max)
}

/// Two-sample KS critical value at significance `alpha` (asymptotic).
pub fn ks_critical(n: usize, m: usize, alpha: f64) -> f64 {
    let c = (-0.5 * (alpha / 2.0).ln()).sqrt();
    c * ((n + m) as f64 / (n * m) as f64).sqrt()
}

/// Percentile with linear interpolation between order statistics
/// (rank `p/100 · (n-1)`).
pub fn percentile_linear(values: &[f64], p: f64) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let rank = p / 100.0 * (v.len() - 1) as f64;
    let lo = rank.floor() as usize;
    let hi = rank.ceil() as usize;
    v[lo] + (rank - lo as f64) * (v[hi] - v[lo])
}

/// Spearman rank correlation (average ranks for ties).
pub fn spearman(a: &[f64], b: &[f64]) -> f64 {
    fn ranks(v: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; v.len()];
        for i in 0..v.len() {
            let less = v.iter().filter(|&&x| x < v[i]).count() as f64;
            let equal = v.iter().filter(|&&x| x == v[i]).count() as f64;
            out[i] = less + (equal + 1.0) / 2.0;
        }
        out
    }
    let ra = ranks(a);
    let rb = ranks(b);
    let n = a.len() as f64;
    let ma = ra.iter().sum::<f64>() / n;
    let mb = rb.iter().sum::<f64>() / n;
    let mut num = 0.0;
    let mut da = 0.0;
    let mut db = 0.0;
    for i in 0..a.len() {
        num += (ra[i] - ma) * (rb[i] - mb);
        da += (ra[i] - ma).powi(2);
        db += (rb[i] - mb).powi(2);
    }
    num / (da * db).sqrt()
}
