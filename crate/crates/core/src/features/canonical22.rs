//! The canonical 22-feature time-series catalog (catch22), reimplemented.
//!
//! Every feature runs on the z-scored series (sample standard deviation).
//! Constant input, or fewer than [`MIN_SAMPLES`] samples, flags all 22.
//! Individual features that come out non-finite are flagged as well.

use super::fft::{autocorrelation, lagged_products, next_pow2, radix2_in_place, Complex};
use super::stats::{linreg, max, mean, min, pearson, sample_std, sorted};
use super::FeatureSlice;

pub const MIN_SAMPLES: usize = 10;

/// Column names in catalog order, paired with the reference long names.
pub const CANONICAL22: [(&str, &str); 22] = [
    ("mode_5", "DN_HistogramMode_5"),
    ("mode_10", "DN_HistogramMode_10"),
    ("acf_timescale", "CO_f1ecac"),
    ("acf_first_min", "CO_FirstMin_ac"),
    ("ami2", "CO_HistogramAMI_even_2_5"),
    ("trev", "CO_trev_1_num"),
    ("high_fluctuation", "MD_hrv_classic_pnn40"),
    ("stretch_high", "SB_BinaryStats_mean_longstretch1"),
    ("transition_matrix", "SB_TransitionMatrix_3ac_sumdiagcov"),
    ("periodicity", "PD_PeriodicityWang_th0_01"),
    ("embedding_dist", "CO_Embed2_Dist_tau_d_expfit_meandiff"),
    ("ami_timescale", "IN_AutoMutualInfoStats_40_gaussian_fmmi"),
    ("whiten_timescale", "FC_LocalSimple_mean1_tauresrat"),
    ("outlier_timing_pos", "DN_OutlierInclude_p_001_mdrmd"),
    ("outlier_timing_neg", "DN_OutlierInclude_n_001_mdrmd"),
    ("low_freq_power", "SP_Summaries_welch_rect_area_5_1"),
    ("stretch_decreasing", "SB_BinaryStats_diff_longstretch0"),
    ("entropy_pairs", "SB_MotifThree_quantile_hh"),
    ("rs_range", "SC_FluctAnal_2_rsrangefit_50_1_logi_prop_r1"),
    ("dfa", "SC_FluctAnal_2_dfa_50_1_2_logi_prop_r1"),
    ("centroid_freq", "SP_Summaries_welch_rect_centroid"),
    ("forecast_error", "FC_LocalSimple_mean3_stderr"),
];

pub fn canonical22_feature_names() -> Vec<String> {
    CANONICAL22.iter().map(|(s, _)| s.to_string()).collect()
}

pub fn zscore(x: &[f64]) -> Vec<f64> {
    let m = mean(x);
    let s = sample_std(x);
    x.iter().map(|v| (v - m) / s).collect()
}

/// Features of one channel in catalog order.
pub fn extract_canonical22(x: &[f64]) -> FeatureSlice {
    let n = x.len();
    if n < MIN_SAMPLES || x.iter().any(|v| !v.is_finite()) || x.iter().all(|v| *v == x[0]) {
        return FeatureSlice::all_flagged(22);
    }
    let y = zscore(x);
    if y.iter().any(|v| !v.is_finite()) {
        return FeatureSlice::all_flagged(22);
    }
    let acf = autocorrelation(&y);
    let (area, centroid) = welch_summaries(&y);
    let values = [
        histogram_mode(&y, 5),
        histogram_mode(&y, 10),
        f1ecac(&acf),
        first_min(&acf) as f64,
        histogram_ami(&y, 2, 5),
        trev(&y),
        pnn40(&y),
        longstretch_above_mean(&y) as f64,
        transition_matrix_sumdiagcov(&y, &acf),
        periodicity_wang(&y, 0.01) as f64,
        embed2_expfit_meandiff(&y, &acf),
        gaussian_ami_first_min(&y, 40) as f64,
        local_mean1_tauresrat(&y, &acf),
        outlier_include(&y, 1.0),
        outlier_include(&y, -1.0),
        area,
        longstretch_decreasing(&y) as f64,
        motif_three_entropy(&y),
        fluct_anal(&y, 1, Fluct::RsRange).unwrap_or(f64::NAN),
        fluct_anal(&y, 2, Fluct::Dfa).unwrap_or(f64::NAN),
        centroid,
        local_mean3_stderr(&y),
    ];
    let mut out = FeatureSlice::with_capacity(22);
    for v in values {
        if v.is_finite() {
            out.push(v);
        } else {
            out.push_flagged();
        }
    }
    out
}

/// Equal-width histogram on `[min, max]`; the top edge falls in the last bin.
fn histcounts(y: &[f64], nbins: usize) -> (Vec<usize>, Vec<f64>) {
    let lo = min(y);
    let hi = max(y);
    let step = (hi - lo) / nbins as f64;
    let mut counts = vec![0usize; nbins];
    for v in y {
        let i = ((v - lo) / step) as isize;
        counts[i.clamp(0, nbins as isize - 1) as usize] += 1;
    }
    let edges = (0..=nbins).map(|i| lo + i as f64 * step).collect();
    (counts, edges)
}

/// Centre of the most populated bin; ties average their centres.
pub fn histogram_mode(y: &[f64], nbins: usize) -> f64 {
    let (counts, edges) = histcounts(y, nbins);
    let top = *counts.iter().max().unwrap();
    let mut sum = 0.0;
    let mut k = 0;
    for i in 0..nbins {
        if counts[i] == top {
            sum += (edges[i] + edges[i + 1]) / 2.0;
            k += 1;
        }
    }
    sum / k as f64
}

/// First lag where the autocorrelation drops below 1/e, interpolated
/// linearly between the bracketing lags.
pub fn f1ecac(acf: &[f64]) -> f64 {
    let th = (-1.0f64).exp();
    for i in 0..acf.len().saturating_sub(1) {
        if acf[i + 1] < th {
            return i as f64 + (th - acf[i]) / (acf[i + 1] - acf[i]);
        }
    }
    acf.len() as f64
}

pub fn first_min(acf: &[f64]) -> usize {
    let n = acf.len();
    for i in 1..n.saturating_sub(1) {
        if acf[i] < acf[i - 1] && acf[i] < acf[i + 1] {
            return i;
        }
    }
    n
}

/// First lag at which the autocorrelation is no longer positive.
pub fn first_zero_crossing(acf: &[f64]) -> usize {
    acf.iter().position(|&r| r <= 0.0).unwrap_or(acf.len())
}

/// Automutual information at `tau` from an equal-width joint histogram whose
/// range is padded by 0.1 on either side.
fn histogram_ami(y: &[f64], tau: usize, nbins: usize) -> f64 {
    let n = y.len();
    if tau >= n {
        return f64::NAN;
    }
    let lo = min(y);
    let step = (max(y) - lo + 0.2) / nbins as f64;
    let edges: Vec<f64> = (0..=nbins).map(|i| lo + step * i as f64 - 0.1).collect();
    let bin = |v: f64| edges.iter().position(|&e| v < e).unwrap_or(0);
    let m = n - tau;
    let mut joint = vec![vec![0.0; nbins + 1]; nbins + 1];
    for i in 0..m {
        joint[bin(y[i])][bin(y[i + tau])] += 1.0 / m as f64;
    }
    let pi: Vec<f64> = joint.iter().map(|r| r.iter().sum()).collect();
    let pj: Vec<f64> = (0..=nbins).map(|j| joint.iter().map(|r| r[j]).sum()).collect();
    let mut ami = 0.0;
    for i in 0..=nbins {
        for j in 0..=nbins {
            if joint[i][j] > 0.0 {
                ami += joint[i][j] * (joint[i][j] / (pi[i] * pj[j])).ln();
            }
        }
    }
    ami
}

pub fn trev(y: &[f64]) -> f64 {
    let d: Vec<f64> = y.windows(2).map(|w| (w[1] - w[0]).powi(3)).collect();
    mean(&d)
}

fn pnn40(y: &[f64]) -> f64 {
    let n = y.len();
    y.windows(2).filter(|w| (w[1] - w[0]).abs() * 1000.0 > 40.0).count() as f64 / (n - 1) as f64
}

/// Longest stretch with the reference's bookkeeping: a stretch ends at each
/// index whose symbol equals `stop` and at the final index.
fn quirky_longest(bits: &[u8], stop: u8) -> usize {
    let n = bits.len();
    let mut best = 0;
    let mut last = 0;
    for i in 0..n {
        if bits[i] == stop || i + 1 == n {
            best = best.max(i - last);
            last = i;
        }
    }
    best
}

fn longstretch_above_mean(y: &[f64]) -> usize {
    let m = mean(y);
    let bits: Vec<u8> = y[..y.len() - 1].iter().map(|v| u8::from(v - m > 0.0)).collect();
    quirky_longest(&bits, 0)
}

fn longstretch_decreasing(y: &[f64]) -> usize {
    let bits: Vec<u8> = y.windows(2).map(|w| u8::from(w[1] - w[0] >= 0.0)).collect();
    quirky_longest(&bits, 1)
}

/// Quantile as in the reference: rank `n·q - 0.5`, clamped to the extremes.
fn quantile_ref(sorted: &[f64], q: f64) -> f64 {
    let n = sorted.len();
    let lim = 0.5 / n as f64;
    if q < lim {
        return sorted[0];
    }
    if q > 1.0 - lim {
        return sorted[n - 1];
    }
    let idx = n as f64 * q - 0.5;
    let l = idx.floor() as usize;
    let r = idx.ceil() as usize;
    if l == r {
        return sorted[l];
    }
    sorted[l] + (idx - l as f64) * (sorted[r] - sorted[l]) / (r - l) as f64
}

/// Labels 1..=groups by quantile bins; the lowest edge is lowered by one.
fn coarsegrain_quantile(y: &[f64], groups: usize) -> Vec<usize> {
    let s = sorted(y);
    let mut th: Vec<f64> = (0..=groups).map(|i| quantile_ref(&s, i as f64 / groups as f64)).collect();
    th[0] -= 1.0;
    let mut labels = vec![0usize; y.len()];
    for g in 0..groups {
        for (j, v) in y.iter().enumerate() {
            if *v > th[g] && *v <= th[g + 1] {
                labels[j] = g + 1;
            }
        }
    }
    labels
}

fn transition_matrix_sumdiagcov(y: &[f64], acf: &[f64]) -> f64 {
    let tau = first_zero_crossing(acf).max(1);
    let down: Vec<f64> = y.iter().step_by(tau).copied().collect();
    if down.len() < 2 {
        return f64::NAN;
    }
    let labels = coarsegrain_quantile(&down, 3);
    let mut t = [[0.0f64; 3]; 3];
    for w in labels.windows(2) {
        if w[0] == 0 || w[1] == 0 {
            continue;
        }
        t[w[0] - 1][w[1] - 1] += 1.0;
    }
    let total = (down.len() - 1) as f64;
    let mut sum = 0.0;
    for col in 0..3 {
        let c: Vec<f64> = (0..3).map(|r| t[r][col] / total).collect();
        let m = mean(&c);
        sum += c.iter().map(|v| (v - m).powi(2)).sum::<f64>() / 2.0;
    }
    sum
}

fn solve_least_squares(design: &[Vec<f64>], y: &[f64]) -> Vec<f64> {
    // Modified Gram-Schmidt QR, then back substitution.
    let p = design.len();
    let mut q: Vec<Vec<f64>> = design.to_vec();
    let mut r = vec![vec![0.0; p]; p];
    for j in 0..p {
        for i in 0..j {
            let d: f64 = q[i].iter().zip(&q[j]).map(|(a, b)| a * b).sum();
            r[i][j] = d;
            let qi = q[i].clone();
            for (v, u) in q[j].iter_mut().zip(&qi) {
                *v -= d * u;
            }
        }
        let norm = q[j].iter().map(|v| v * v).sum::<f64>().sqrt();
        r[j][j] = norm;
        for v in q[j].iter_mut() {
            *v /= norm;
        }
    }
    let qty: Vec<f64> = q.iter().map(|col| col.iter().zip(y).map(|(a, b)| a * b).sum()).collect();
    let mut beta = vec![0.0; p];
    for i in (0..p).rev() {
        let s: f64 = (i + 1..p).map(|k| r[i][k] * beta[k]).sum();
        beta[i] = (qty[i] - s) / r[i][i];
    }
    beta
}

/// Least-squares cubic spline with one interior knot at `floor(n/2) - 1`.
fn spline_detrend(y: &[f64]) -> Vec<f64> {
    let n = y.len();
    let scale = (n - 1) as f64;
    let knot = ((n / 2) as f64 - 1.0) / scale;
    let t: Vec<f64> = (0..n).map(|i| i as f64 / scale).collect();
    let design: Vec<Vec<f64>> = vec![
        vec![1.0; n],
        t.clone(),
        t.iter().map(|v| v * v).collect(),
        t.iter().map(|v| v * v * v).collect(),
        t.iter().map(|v| (v - knot).max(0.0).powi(3)).collect(),
    ];
    let beta = solve_least_squares(&design, y);
    (0..n)
        .map(|i| {
            let fit: f64 = (0..5).map(|k| beta[k] * design[k][i]).sum();
            y[i] - fit
        })
        .collect()
}

/// `cov(x[..n-k], x[k..])` with each segment's own mean, for `k = 1..=max_lag`.
fn lagged_covariances(x: &[f64], max_lag: usize) -> Vec<f64> {
    let n = x.len();
    let s = lagged_products(x);
    let mut prefix = vec![0.0; n + 1];
    for i in 0..n {
        prefix[i + 1] = prefix[i] + x[i];
    }
    (1..=max_lag)
        .map(|k| {
            let m = n - k;
            if m < 2 {
                return f64::NAN;
            }
            let ma = prefix[m] / m as f64;
            let mb = (prefix[n] - prefix[k]) / m as f64;
            (s[k] - m as f64 * ma * mb) / (m as f64 - 1.0)
        })
        .collect()
}

fn periodicity_wang(y: &[f64], th: f64) -> usize {
    let n = y.len();
    let sub = spline_detrend(y);
    let acmax = n.div_ceil(3);
    let ac = lagged_covariances(&sub, acmax);
    let mut troughs = Vec::new();
    let mut peaks = Vec::new();
    for i in 1..acmax.saturating_sub(1) {
        let din = ac[i] - ac[i - 1];
        let dout = ac[i + 1] - ac[i];
        if din < 0.0 && dout > 0.0 {
            troughs.push(i);
        } else if din > 0.0 && dout < 0.0 {
            peaks.push(i);
        }
    }
    for &p in &peaks {
        let Some(&tr) = troughs.iter().take_while(|&&t| t < p).last() else {
            continue;
        };
        if ac[p] - ac[tr] < th || ac[p] < 0.0 {
            continue;
        }
        return p;
    }
    0
}

fn embed2_expfit_meandiff(y: &[f64], acf: &[f64]) -> f64 {
    let n = y.len();
    let mut tau = first_zero_crossing(acf);
    if tau as f64 > n as f64 / 10.0 {
        tau = n / 10;
    }
    if n < tau + 3 {
        return f64::NAN;
    }
    let d: Vec<f64> = (0..n - tau - 1).map(|i| ((y[i + 1] - y[i]).powi(2) + (y[i + tau + 1] - y[i + tau]).powi(2)).sqrt()).collect();
    let sd = sample_std(&d);
    if sd < 0.001 {
        return 0.0;
    }
    let nbins = ((max(&d) - min(&d)) / (3.5 * sd / (d.len() as f64).cbrt())).ceil() as usize;
    if nbins == 0 {
        return 0.0;
    }
    let l = mean(&d);
    let (counts, edges) = histcounts(&d, nbins);
    let diffs: Vec<f64> = (0..nbins)
        .map(|i| {
            let centre = (edges[i] + edges[i + 1]) * 0.5;
            let expf = ((-centre / l).exp() / l).max(0.0);
            (counts[i] as f64 / d.len() as f64 - expf).abs()
        })
        .collect();
    mean(&diffs)
}

/// First local minimum of the Gaussian automutual information over lags
/// `1..=min(max_tau, ceil(n/2))`, as a zero-based lag index.
fn gaussian_ami_first_min(y: &[f64], max_tau: usize) -> usize {
    let n = y.len();
    let tau = max_tau.min(n.div_ceil(2));
    let ami: Vec<f64> = (1..=tau)
        .map(|lag| {
            let r = pearson(&y[..n - lag], &y[lag..]);
            -0.5 * (1.0 - r * r).ln()
        })
        .collect();
    for i in 1..tau.saturating_sub(1) {
        if ami[i] < ami[i - 1] && ami[i] < ami[i + 1] {
            return i;
        }
    }
    tau
}

fn local_mean1_tauresrat(y: &[f64], acf: &[f64]) -> f64 {
    let res: Vec<f64> = y.windows(2).map(|w| w[1] - w[0]).collect();
    let res_acf = autocorrelation(&res);
    first_zero_crossing(&res_acf) as f64 / first_zero_crossing(acf) as f64
}

fn local_mean3_stderr(y: &[f64]) -> f64 {
    let res: Vec<f64> = (0..y.len() - 3).map(|i| y[i + 3] - (y[i] + y[i + 1] + y[i + 2]) / 3.0).collect();
    sample_std(&res)
}

/// Fenwick tree over positions `0..n` supporting k-th smallest queries.
struct Fenwick {
    tree: Vec<usize>,
    log: usize,
}

impl Fenwick {
    fn new(n: usize) -> Self {
        Self { tree: vec![0; n + 1], log: usize::BITS as usize - n.leading_zeros() as usize }
    }

    fn insert(&mut self, pos: usize) {
        let mut i = pos + 1;
        while i < self.tree.len() {
            self.tree[i] += 1;
            i += i & i.wrapping_neg();
        }
    }

    /// Position of the k-th (1-based) inserted element.
    fn kth(&self, mut k: usize) -> usize {
        let mut pos = 0;
        for b in (0..=self.log).rev() {
            let next = pos + (1 << b);
            if next < self.tree.len() && self.tree[next] < k {
                pos = next;
                k -= self.tree[next];
            }
        }
        pos
    }
}

/// Median timing of threshold exceedances as the threshold rises in steps of
/// 0.01σ, trimmed where too few exceedances remain.
fn outlier_include(y: &[f64], sign: f64) -> f64 {
    let n = y.len();
    let inc = 0.01;
    let w: Vec<f64> = y.iter().map(|v| v * sign).collect();
    let tot = w.iter().filter(|&&v| v >= 0.0).count() as f64;
    let maxv = max(&w);
    if maxv < inc {
        return 0.0;
    }
    let nthresh = (maxv / inc) as usize + 1;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| w[b].total_cmp(&w[a]));
    let mut fw = Fenwick::new(n);
    let mut inserted = 0;
    let mut gap_mean = vec![f64::NAN; nthresh];
    let mut share = vec![0.0; nthresh];
    let mut med = vec![0.0; nthresh];
    let half = (n / 2) as f64;
    for j in (0..nthresh).rev() {
        let thr = j as f64 * inc;
        while inserted < n && w[order[inserted]] >= thr {
            fw.insert(order[inserted]);
            inserted += 1;
        }
        let h = inserted;
        if h == 0 {
            continue;
        }
        // Exceedance times are 1-based sample indices.
        let r = |k: usize| (fw.kth(k) + 1) as f64;
        if h >= 2 {
            gap_mean[j] = (r(h) - r(1)) / (h - 1) as f64;
        }
        share[j] = (h - 1) as f64 * 100.0 / tot;
        let m = if h % 2 == 1 { r(h / 2 + 1) } else { (r(h / 2) + r(h / 2 + 1)) / 2.0 };
        med[j] = m / half - 1.0;
    }
    let mut mj = 0;
    let mut fbi = nthresh - 1;
    for i in 0..nthresh {
        if share[i] > 2.0 {
            mj = i;
        }
        if gap_mean[nthresh - 1 - i].is_nan() {
            fbi = nthresh - 1 - i;
        }
    }
    let limit = mj.min(fbi);
    let s = sorted(&med[..=limit]);
    super::stats::median_sorted(&s)
}

fn motif_three_entropy(y: &[f64]) -> f64 {
    let labels = coarsegrain_quantile(y, 3);
    let mut counts = [[0usize; 3]; 3];
    for w in labels.windows(2) {
        if w[0] > 0 && w[1] > 0 {
            counts[w[0] - 1][w[1] - 1] += 1;
        }
    }
    let total = (y.len() - 1) as f64;
    let mut h = 0.0;
    for row in counts {
        for c in row {
            if c > 0 {
                let p = c as f64 / total;
                h -= p * p.ln();
            }
        }
    }
    h
}

/// Power spectrum summaries from a single rectangular window zero-padded to
/// the next power of two: area of the lowest fifth of the band and the
/// frequency (rad/sample) at which the cumulative power passes one half.
fn welch_summaries(y: &[f64]) -> (f64, f64) {
    let n = y.len();
    let nfft = next_pow2(n);
    let m = mean(y);
    let mut buf = vec![Complex::ZERO; nfft];
    for (b, v) in buf.iter_mut().zip(y) {
        b.re = v - m;
    }
    radix2_in_place(&mut buf, false);
    let nout = nfft / 2 + 1;
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut sw: Vec<f64> = (0..nout).map(|i| buf[i].norm_sqr() / n as f64).collect();
    for v in sw.iter_mut().take(nout - 1).skip(1) {
        *v *= 2.0;
    }
    for v in sw.iter_mut() {
        *v /= two_pi;
    }
    let dw = two_pi / nfft as f64;
    let area = sw.iter().take(nout / 5).sum::<f64>() * dw;
    let total: f64 = sw.iter().sum();
    let mut cum = 0.0;
    let mut centroid = 0.0;
    for (i, v) in sw.iter().enumerate() {
        cum += v;
        if cum > total * 0.5 {
            centroid = i as f64 * dw;
            break;
        }
    }
    (area, centroid)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fluct {
    RsRange,
    Dfa,
}

/// Fluctuation function of the lag-`lag` cumulative sum over up to 50
/// log-spaced window sizes from 5 to `n/2`.
#[derive(Debug, Clone, PartialEq)]
pub struct FluctuationCurve {
    pub taus: Vec<usize>,
    pub fluctuations: Vec<f64>,
    /// Cumulative sum of every `lag`-th sample.
    pub profile: Vec<f64>,
}

impl FluctuationCurve {
    /// Slope of `ln F` against `ln τ` over all window sizes.
    pub fn loglog_slope(&self) -> f64 {
        let lx: Vec<f64> = self.taus.iter().map(|&t| (t as f64).ln()).collect();
        let ly: Vec<f64> = self.fluctuations.iter().map(|f| f.ln()).collect();
        linreg(&lx, &ly).0
    }
}

pub fn fluctuation_curve(y: &[f64], lag: usize, kind: Fluct) -> FluctuationCurve {
    let n = y.len();
    let lo = 5f64.ln();
    let hi = ((n / 2) as f64).ln();
    let steps = 50;
    let step = (hi - lo) / (steps - 1) as f64;
    let mut taus: Vec<usize> = (0..steps).map(|i| (lo + i as f64 * step).exp().round() as usize).collect();
    taus.dedup();

    let size_cs = n / lag;
    let mut profile = Vec::with_capacity(size_cs);
    let mut acc = 0.0;
    for i in 0..size_cs {
        acc += y[i * lag];
        profile.push(acc);
    }

    let fluctuations = taus
        .iter()
        .map(|&tau| {
            let nbuf = size_cs / tau;
            let xs: Vec<f64> = (1..=tau).map(|v| v as f64).collect();
            let mut f = 0.0;
            for j in 0..nbuf {
                let seg = &profile[j * tau..(j + 1) * tau];
                let (m, b) = linreg(&xs, seg);
                let res = seg.iter().zip(&xs).map(|(v, x)| v - (m * x + b));
                match kind {
                    Fluct::RsRange => {
                        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
                        for r in res {
                            lo = lo.min(r);
                            hi = hi.max(r);
                        }
                        f += hi - lo;
                    }
                    Fluct::Dfa => f += res.map(|r| r * r).sum::<f64>(),
                }
            }
            match kind {
                Fluct::RsRange => f / nbuf as f64,
                Fluct::Dfa => (f / (nbuf * tau) as f64).sqrt(),
            }
        })
        .collect();
    FluctuationCurve { taus, fluctuations, profile }
}

/// Proportion of window sizes before the breakpoint of the best two-segment
/// linear fit to the log-log fluctuation curve. `None` when fewer than 12
/// distinct window sizes exist.
fn fluct_anal(y: &[f64], lag: usize, kind: Fluct) -> Option<f64> {
    let curve = fluctuation_curve(y, lag, kind);
    let ntt = curve.taus.len();
    if ntt < 12 {
        return None;
    }
    let lt: Vec<f64> = curve.taus.iter().map(|&t| (t as f64).ln()).collect();
    let lf: Vec<f64> = curve.fluctuations.iter().map(|f| f.ln()).collect();
    let resid_norm = |xs: &[f64], ys: &[f64]| {
        let (m, b) = linreg(xs, ys);
        xs.iter().zip(ys).map(|(x, y)| (y - (m * x + b)).powi(2)).sum::<f64>().sqrt()
    };
    let min_points = 6;
    let mut best = f64::INFINITY;
    let mut best_i = 0;
    for i in min_points..=ntt - min_points {
        let e = resid_norm(&lt[..i], &lf[..i]) + resid_norm(&lt[i - 1..], &lf[i - 1..]);
        if e < best {
            best = e;
            best_i = i - min_points;
        }
    }
    let first_min = best_i + min_points - 1;
    Some((first_min + 1) as f64 / ntt as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};
    use socialsig_oracles::{acf_first_zero, dfa_fluctuations, loglog_slope};

    fn noise(n: usize, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| StandardNormal.sample(&mut rng)).collect()
    }

    fn idx(name: &str) -> usize {
        CANONICAL22.iter().position(|(s, _)| *s == name).unwrap()
    }

    #[test]
    fn catalog_is_22_unique() {
        let mut names = canonical22_feature_names();
        names.sort();
        names.dedup();
        assert_eq!(names.len(), 22);
    }

    #[test]
    fn constant_and_short_series_flagged() {
        for x in [vec![3.0; 200], vec![1.0, 2.0, 3.0]] {
            let f = extract_canonical22(&x);
            assert!(f.flagged.iter().all(|&b| b));
            assert!(f.values.iter().all(|&v| v == 0.0));
        }
    }

    #[test]
    fn sine_acf_zero_crossing() {
        let x: Vec<f64> = (0..400).map(|i| (2.0 * std::f64::consts::PI * i as f64 / 40.0).sin()).collect();
        let acf = autocorrelation(&zscore(&x));
        let got = first_zero_crossing(&acf);
        assert!(got.abs_diff(10) <= 1);
        assert_eq!(got, acf_first_zero(&x));
        let f = extract_canonical22(&x);
        assert!(f.values[idx("acf_timescale")] > 5.0 && f.values[idx("acf_timescale")] < 10.0);
        // A peak sits at lag index 39 (lag 40).
        assert!((f.values[idx("periodicity")] - 39.0).abs() <= 1.0);
    }

    #[test]
    fn white_noise_profile_scales_as_half() {
        let y = zscore(&noise(10_000, 7));
        let curve = fluctuation_curve(&y, 2, Fluct::Dfa);
        let oracle = dfa_fluctuations(&curve.profile, &curve.taus);
        for ((_, fo), f) in oracle.iter().zip(&curve.fluctuations) {
            assert!((fo - f).abs() <= 1e-9 * fo.max(1.0));
        }
        let slope = curve.loglog_slope();
        assert!((slope - 0.5).abs() <= 0.1, "slope {slope}");
        assert!((loglog_slope(&oracle) - slope).abs() < 1e-9);
    }

    #[test]
    fn white_noise_feature_ranges() {
        let f = extract_canonical22(&noise(2000, 11));
        assert!(f.flagged.iter().all(|&b| !b), "{:?}", f.flagged);
        assert!(f.values[idx("acf_timescale")] < 2.0);
        assert!(f.values[idx("high_fluctuation")] > 0.9);
        let p = f.values[idx("dfa")];
        assert!(p > 0.0 && p <= 1.0);
        assert!(f.values[idx("entropy_pairs")] > 2.0 && f.values[idx("entropy_pairs")] <= 9f64.ln() + 1e-12);
    }

    #[test]
    fn outlier_timing_matches_direct_scan() {
        let y = zscore(&noise(300, 3));
        // Direct per-threshold rescan, as the definition reads.
        let direct = |sign: f64| {
            let w: Vec<f64> = y.iter().map(|v| v * sign).collect();
            let n = w.len();
            let tot = w.iter().filter(|&&v| v >= 0.0).count() as f64;
            let nth = (max(&w) / 0.01) as usize + 1;
            let mut g = vec![];
            let mut s = vec![];
            let mut md = vec![];
            for j in 0..nth {
                let r: Vec<f64> = (0..n).filter(|&i| w[i] >= j as f64 * 0.01).map(|i| (i + 1) as f64).collect();
                let h = r.len();
                g.push(if h >= 2 { (r[h - 1] - r[0]) / (h - 1) as f64 } else { f64::NAN });
                s.push((h as f64 - 1.0) * 100.0 / tot);
                md.push(super::super::stats::median_sorted(&r) / (n / 2) as f64 - 1.0);
            }
            let mj = (0..nth).rev().find(|&i| s[i] > 2.0).unwrap_or(0);
            let fbi = (0..nth).find(|&i| g[i].is_nan()).unwrap_or(nth - 1);
            super::super::stats::median_sorted(&sorted(&md[..=mj.min(fbi)]))
        };
        assert!((outlier_include(&y, 1.0) - direct(1.0)).abs() < 1e-12);
        assert!((outlier_include(&y, -1.0) - direct(-1.0)).abs() < 1e-12);
    }

    #[test]
    fn lagged_covariance_matches_direct() {
        let x = noise(120, 5);
        let got = lagged_covariances(&x, 40);
        for k in 1..=40 {
            let a = &x[..120 - k];
            let b = &x[k..];
            let (ma, mb) = (mean(a), mean(b));
            let c = a.iter().zip(b).map(|(p, q)| (p - ma) * (q - mb)).sum::<f64>() / (a.len() - 1) as f64;
            assert!((got[k - 1] - c).abs() < 1e-10);
        }
    }

    #[test]
    fn histogram_mode_small_example() {
        // Bins of width 1 over [0, 5]; bin 1 holds three values.
        let y = [0.0, 1.2, 1.5, 1.7, 3.0, 5.0];
        assert!((histogram_mode(&y, 5) - 1.5).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn reversal_negates_trev(x in prop::collection::vec(-3.0f64..3.0, 20..200)) {
            prop_assume!(!x.iter().all(|v| *v == x[0]));
            let rev: Vec<f64> = x.iter().rev().copied().collect();
            let a = extract_canonical22(&x);
            let b = extract_canonical22(&rev);
            let i = idx("trev");
            prop_assert!((a.values[i] + b.values[i]).abs() < 1e-9);
        }

        #[test]
        fn affine_invariant(x in prop::collection::vec(-3.0f64..3.0, 40..160), a in 0.5f64..4.0, c in -10.0f64..10.0) {
            prop_assume!(sample_std(&x) > 0.1);
            let y: Vec<f64> = x.iter().map(|v| a * v + c).collect();
            let fa = extract_canonical22(&x);
            let fb = extract_canonical22(&y);
            for name in ["acf_first_min", "stretch_high", "transition_matrix", "entropy_pairs", "whiten_timescale"] {
                let i = idx(name);
                prop_assert!((fa.values[i] - fb.values[i]).abs() < 1e-6, "{} {} {}", name, fa.values[i], fb.values[i]);
            }
        }
    }
}
