//! The 22 canonical time-series features. Every function expects the
//! z-scored series (sample standard deviation) and at least a few dozen
//! samples; the caller enforces both.

use std::f64::consts::E;

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use super::spline::detrend_fit;
use super::util::*;

fn histogram_mode(y: &[f64], n_bins: usize) -> f64 {
    let (counts, edges) = histogram(y, n_bins);
    let mut max_count = 0;
    let mut n_max = 1;
    let mut out = 0.0;
    for i in 0..n_bins {
        let centre = (edges[i] + edges[i + 1]) * 0.5;
        if counts[i] > max_count {
            max_count = counts[i];
            n_max = 1;
            out = centre;
        } else if counts[i] == max_count {
            n_max += 1;
            out += centre;
        }
    }
    out / n_max as f64
}

pub fn dn_histogram_mode_5(y: &[f64]) -> f64 {
    histogram_mode(y, 5)
}

pub fn dn_histogram_mode_10(y: &[f64]) -> f64 {
    histogram_mode(y, 10)
}

/// First crossing of the 1/e level by the autocorrelation, linearly interpolated.
pub fn co_f1ecac(y: &[f64]) -> f64 {
    let ac = autocorrelation(y);
    let thresh = 1.0 / E;
    for i in 0..y.len().saturating_sub(2) {
        if ac[i + 1] < thresh {
            let slope = ac[i + 1] - ac[i];
            return i as f64 + (thresh - ac[i]) / slope;
        }
    }
    y.len() as f64
}

/// Lag of the first local minimum of the autocorrelation.
pub fn co_first_min_ac(y: &[f64]) -> f64 {
    let ac = autocorrelation(y);
    let n = y.len();
    (1..n - 1)
        .find(|&i| ac[i] < ac[i - 1] && ac[i] < ac[i + 1])
        .unwrap_or(n) as f64
}

/// Automutual information at lag 2 from a 5-bin equal-width histogram.
pub fn co_histogram_ami_even_2_5(y: &[f64]) -> f64 {
    const BINS: usize = 5;
    const TAU: usize = 2;
    let (lo, hi) = min_max(y);
    let step = (hi - lo + 0.2) / BINS as f64;
    let edges: Vec<f64> = (0..=BINS).map(|i| lo + step * i as f64 - 0.1).collect();
    // index of the first edge strictly above v (1..=BINS for in-range values)
    let bin = |v: f64| edges.iter().position(|&e| v < e).unwrap_or(0);
    let mut joint = [[0.0f64; BINS]; BINS];
    let mut total = 0.0;
    for t in 0..y.len() - TAU {
        let (a, b) = (bin(y[t]), bin(y[t + TAU]));
        if (1..=BINS).contains(&a) && (1..=BINS).contains(&b) {
            joint[a - 1][b - 1] += 1.0;
            total += 1.0;
        }
    }
    let mut pa = [0.0; BINS];
    let mut pb = [0.0; BINS];
    for i in 0..BINS {
        for j in 0..BINS {
            joint[i][j] /= total;
            pa[i] += joint[i][j];
            pb[j] += joint[i][j];
        }
    }
    let mut ami = 0.0;
    for i in 0..BINS {
        for j in 0..BINS {
            if joint[i][j] > 0.0 {
                ami += joint[i][j] * (joint[i][j] / (pa[i] * pb[j])).ln();
            }
        }
    }
    ami
}

/// Time-reversibility statistic: mean cubed first difference.
pub fn co_trev_1_num(y: &[f64]) -> f64 {
    let d: Vec<f64> = y.windows(2).map(|w| (w[1] - w[0]).powi(3)).collect();
    mean(&d)
}

/// Fraction of successive differences larger than 0.04.
pub fn md_hrv_classic_pnn40(y: &[f64]) -> f64 {
    let count = y
        .windows(2)
        .filter(|w| (w[1] - w[0]).abs() * 1000.0 > 40.0)
        .count();
    count as f64 / (y.len() - 1) as f64
}

/// Longest stretch of consecutive above-mean values.
pub fn sb_binary_stats_mean_longstretch1(y: &[f64]) -> f64 {
    let m = mean(y);
    let n = y.len();
    let mut longest = 0;
    let mut last = 0;
    for i in 0..n - 1 {
        let above = y[i] - m > 0.0;
        if !above || i == n - 2 {
            longest = longest.max(i - last);
            last = i;
        }
    }
    longest as f64
}

/// Longest stretch of consecutive decreases.
pub fn sb_binary_stats_diff_longstretch0(y: &[f64]) -> f64 {
    let n = y.len();
    let mut longest = 0;
    let mut last = 0;
    for i in 0..n - 1 {
        let rising = y[i + 1] - y[i] >= 0.0;
        if rising || i == n - 2 {
            longest = longest.max(i - last);
            last = i;
        }
    }
    longest as f64
}

/// Trace of the covariance of the columns of a 3-state transition matrix,
/// built on the series downsampled at its first autocorrelation zero.
pub fn sb_transition_matrix_3ac_sumdiagcov(y: &[f64]) -> f64 {
    let n = y.len();
    let ac = autocorrelation(y);
    let tau = first_zero(&ac, n).max(1);
    let down: Vec<f64> = y.iter().step_by(tau).copied().collect();
    let labels = coarsegrain_quantile(&down, 3);
    let mut t = [[0.0f64; 3]; 3];
    for w in labels.windows(2) {
        if w[0] > 0 && w[1] > 0 {
            t[w[0] - 1][w[1] - 1] += 1.0;
        }
    }
    let steps = (down.len() - 1) as f64;
    let mut total = 0.0;
    for col in 0..3 {
        let c: Vec<f64> = (0..3).map(|row| t[row][col] / steps).collect();
        let m = mean(&c);
        total += c.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / 2.0;
    }
    total
}

/// Periodicity estimate: first autocorrelation peak of the spline-detrended
/// series that rises at least 0.01 above the preceding trough.
pub fn pd_periodicity_wang_th0_01(y: &[f64]) -> f64 {
    const TH: f64 = 0.01;
    let n = y.len();
    let fit = detrend_fit(y);
    let resid: Vec<f64> = y.iter().zip(&fit).map(|(a, b)| a - b).collect();
    let max_lag = n.div_ceil(3);
    // acf[k] holds lag k + 1
    let acf: Vec<f64> = (1..=max_lag)
        .map(|lag| {
            let m = n - lag;
            let mut acc = 0.0;
            for i in 0..m {
                acc += resid[i] * resid[i + lag];
            }
            acc / m as f64
        })
        .collect();
    let mut last_trough: Option<usize> = None;
    for i in 1..max_lag.saturating_sub(1) {
        let slope_in = acf[i] - acf[i - 1];
        let slope_out = acf[i + 1] - acf[i];
        if slope_in < 0.0 && slope_out > 0.0 {
            last_trough = Some(i);
        } else if slope_in > 0.0 && slope_out < 0.0 {
            let Some(trough) = last_trough else { continue };
            let peak = acf[i];
            if peak - acf[trough] < TH || peak < 0.0 {
                continue;
            }
            return i as f64;
        }
    }
    0.0
}

/// Mean absolute deviation of the 2-D embedding step-distance histogram
/// from an exponential fit.
pub fn co_embed2_dist_tau_d_expfit_meandiff(y: &[f64]) -> f64 {
    let n = y.len();
    let ac = autocorrelation(y);
    let mut tau = first_zero(&ac, n);
    if tau as f64 > n as f64 / 10.0 {
        tau = n / 10;
    }
    let m = n - tau - 1;
    let d: Vec<f64> = (0..m)
        .map(|i| {
            let a = y[i + 1] - y[i];
            let b = y[i + tau] - y[i + tau + 1];
            (a * a + b * b).sqrt()
        })
        .collect();
    let l = mean(&d);
    let sd = stddev(&d);
    if sd < 0.001 {
        return 0.0;
    }
    let (lo, hi) = min_max(&d);
    let n_bins = ((hi - lo) / (3.5 * sd / (m as f64).powf(1.0 / 3.0))).ceil() as usize;
    if n_bins == 0 {
        return 0.0;
    }
    let (counts, edges) = histogram(&d, n_bins);
    let diffs: Vec<f64> = (0..n_bins)
        .map(|i| {
            let p = counts[i] as f64 / m as f64;
            let expf = (-(edges[i] + edges[i + 1]) * 0.5 / l).exp() / l;
            (p - expf.max(0.0)).abs()
        })
        .collect();
    mean(&diffs)
}

/// First minimum of the Gaussian automutual information over lags up to 40.
pub fn in_auto_mutual_info_stats_40_gaussian_fmmi(y: &[f64]) -> f64 {
    let n = y.len();
    let tau = 40.min(n.div_ceil(2));
    if tau < 3 {
        return tau as f64;
    }
    let ami = |lag: usize| {
        let r = autocorr_lag(y, lag);
        -0.5 * (1.0 - r * r).ln()
    };
    let mut prev = ami(1);
    let mut curr = ami(2);
    for i in 1..tau - 1 {
        let next = ami(i + 2);
        if curr < prev && curr < next {
            return i as f64;
        }
        prev = curr;
        curr = next;
    }
    tau as f64
}

fn mean_forecast_residuals(y: &[f64], train: usize) -> Vec<f64> {
    (0..y.len() - train)
        .map(|i| {
            let est: f64 = y[i..i + train].iter().sum();
            y[i + train] - est / train as f64
        })
        .collect()
}

/// Ratio of autocorrelation decorrelation times of one-step mean-forecast
/// residuals and of the series itself.
pub fn fc_local_simple_mean1_tauresrat(y: &[f64]) -> f64 {
    let res = mean_forecast_residuals(y, 1);
    let res_zero = first_zero(&autocorrelation(&res), res.len()) as f64;
    let y_zero = first_zero(&autocorrelation(y), y.len()) as f64;
    res_zero / y_zero
}

/// Standard deviation of residuals of a 3-sample rolling-mean forecast.
pub fn fc_local_simple_mean3_stderr(y: &[f64]) -> f64 {
    stddev(&mean_forecast_residuals(y, 3))
}

/// Median (over thresholds) of the normalised median time index of samples
/// exceeding a rising threshold, in steps of 0.01. `sign = -1` examines the
/// negative tail.
fn outlier_include_mdrmd(y: &[f64], sign: f64) -> f64 {
    const INC: f64 = 0.01;
    let n = y.len();
    let work: Vec<f64> = y.iter().map(|&v| sign * v).collect();
    if work.iter().all(|&v| v == work[0]) {
        return 0.0;
    }
    let tot = work.iter().filter(|&&v| v >= 0.0).count() as f64;
    let max_val = work.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max_val < INC {
        return 0.0;
    }
    let n_thresh = (max_val / INC) as usize + 1;

    // bucket each position by the highest threshold index it reaches
    let mut buckets: Vec<Vec<usize>> = vec![Vec::new(); n_thresh];
    for (i, &v) in work.iter().enumerate() {
        let q = v / INC;
        let mut j: isize = if q >= (n_thresh - 1) as f64 {
            n_thresh as isize - 1
        } else if q < 0.0 {
            -1
        } else {
            q as isize
        };
        while j + 1 < n_thresh as isize && v >= (j + 1) as f64 * INC {
            j += 1;
        }
        while j >= 0 && v < j as f64 * INC {
            j -= 1;
        }
        if j >= 0 {
            buckets[j as usize].push(i);
        }
    }
    // number of exceedances at each threshold
    let mut counts = vec![0usize; n_thresh];
    let mut run = 0;
    for j in (0..n_thresh).rev() {
        run += buckets[j].len();
        counts[j] = run;
    }
    let mut last_dense = 0;
    for (j, &c) in counts.iter().enumerate() {
        if (c as f64 - 1.0) * 100.0 / tot > 2.0 {
            last_dense = j;
        }
    }
    // first threshold where the mean inter-exceedance gap is undefined
    let first_single = counts
        .iter()
        .position(|&c| c == 1)
        .unwrap_or(n_thresh - 1);
    let trim = last_dense.min(first_single);

    // sweep thresholds downward, keeping the exceedance positions counted
    // in a Fenwick tree for order-statistic queries
    let mut tree = Fenwick::new(n);
    let mut inserted = 0;
    let mut med_idx = vec![0.0; trim + 1];
    let half = n as f64 / 2.0;
    for j in (0..n_thresh).rev() {
        for &i in &buckets[j] {
            tree.add(i + 1);
            inserted += 1;
        }
        if j > trim {
            continue;
        }
        let med = if inserted % 2 == 1 {
            tree.select(inserted / 2 + 1) as f64
        } else {
            let lo = tree.select(inserted / 2) as f64;
            let hi = tree.select(inserted / 2 + 1) as f64;
            (hi + lo) / 2.0
        };
        med_idx[j] = med / half - 1.0;
    }
    median(&med_idx)
}

struct Fenwick {
    tree: Vec<usize>,
    top: usize,
}

impl Fenwick {
    fn new(n: usize) -> Self {
        let mut top = 1;
        while top << 1 <= n {
            top <<= 1;
        }
        Self {
            tree: vec![0; n + 1],
            top,
        }
    }

    fn add(&mut self, mut i: usize) {
        while i < self.tree.len() {
            self.tree[i] += 1;
            i += i & i.wrapping_neg();
        }
    }

    /// Smallest position whose prefix count reaches `k` (1-based).
    fn select(&self, mut k: usize) -> usize {
        let n = self.tree.len() - 1;
        let mut pos = 0;
        let mut step = self.top;
        while step > 0 {
            if pos + step <= n && self.tree[pos + step] < k {
                pos += step;
                k -= self.tree[pos];
            }
            step >>= 1;
        }
        pos + 1
    }
}

pub fn dn_outlier_include_p_001_mdrmd(y: &[f64]) -> f64 {
    outlier_include_mdrmd(y, 1.0)
}

pub fn dn_outlier_include_n_001_mdrmd(y: &[f64]) -> f64 {
    outlier_include_mdrmd(y, -1.0)
}

/// One-sided periodogram of the mean-removed series with a rectangular
/// window spanning the whole series, on an angular frequency grid.
fn welch_rect(y: &[f64]) -> (Vec<f64>, Vec<f64>) {
    // the reference implementation hard-codes this approximation of pi
    const PI_APPROX: f64 = 3.14159265359;
    let n = y.len();
    let nfft = n.next_power_of_two();
    let m = mean(y);
    let mut buf: Vec<Complex<f64>> = y
        .iter()
        .map(|&v| Complex::new(v - m, 0.0))
        .chain(std::iter::repeat(Complex::new(0.0, 0.0)))
        .take(nfft)
        .collect();
    FftPlanner::new().plan_fft_forward(nfft).process(&mut buf);
    let n_out = nfft / 2 + 1;
    let scale = n as f64; // one segment, |window|^2 = n
    let df = 1.0 / nfft as f64;
    let mut w = Vec::with_capacity(n_out);
    let mut s = Vec::with_capacity(n_out);
    for (i, c) in buf.iter().take(n_out).enumerate() {
        let mut p = c.norm_sqr() / scale;
        if i > 0 && i < n_out - 1 {
            p *= 2.0;
        }
        w.push(2.0 * PI_APPROX * i as f64 * df);
        s.push(p / (2.0 * PI_APPROX));
    }
    (w, s)
}

/// Spectral power in the lowest fifth of frequencies.
pub fn sp_summaries_welch_rect_area_5_1(y: &[f64]) -> f64 {
    let (w, s) = welch_rect(y);
    if s.iter().any(|v| v.is_infinite()) {
        return 0.0;
    }
    let dw = w[1] - w[0];
    s[..s.len() / 5].iter().sum::<f64>() * dw
}

/// Frequency at which the cumulative spectral power passes half its total.
pub fn sp_summaries_welch_rect_centroid(y: &[f64]) -> f64 {
    let (w, s) = welch_rect(y);
    if s.iter().any(|v| v.is_infinite()) {
        return 0.0;
    }
    let mut cum = Vec::with_capacity(s.len());
    let mut acc = 0.0;
    for &v in &s {
        acc += v;
        cum.push(acc);
    }
    let half = acc * 0.5;
    cum.iter()
        .position(|&c| c > half)
        .map(|i| w[i])
        .unwrap_or(0.0)
}

/// Entropy of successive-symbol pairs after 3-level quantile coarse-graining.
pub fn sb_motif_three_quantile_hh(y: &[f64]) -> f64 {
    let n = y.len();
    let labels = coarsegrain_quantile(y, 3);
    let mut pairs = [[0usize; 3]; 3];
    for w in labels.windows(2) {
        if w[0] > 0 && w[1] > 0 {
            pairs[w[0] - 1][w[1] - 1] += 1;
        }
    }
    pairs
        .iter()
        .map(|row| {
            let p: Vec<f64> = row.iter().map(|&c| c as f64 / (n as f64 - 1.0)).collect();
            entropy(&p)
        })
        .sum()
}

#[derive(Clone, Copy, PartialEq)]
enum Fluctuation {
    RescaledRange,
    Detrended,
}

/// Fraction of the log-spaced window sizes below the best two-segment
/// breakpoint of the log-log fluctuation function.
fn fluct_anal_prop_r1(y: &[f64], lag: usize, how: Fluctuation) -> f64 {
    let n = y.len();
    let lin_low = 5f64.ln();
    let lin_high = ((n / 2) as f64).ln();
    const STEPS: usize = 50;
    let step = (lin_high - lin_low) / (STEPS - 1) as f64;
    let mut taus: Vec<usize> = (0..STEPS)
        .map(|i| (lin_low + i as f64 * step).exp().round() as usize)
        .collect();
    taus.dedup();
    if taus.len() < 12 {
        return 0.0;
    }

    let n_cs = n / lag;
    let mut cs = Vec::with_capacity(n_cs);
    let mut acc = y[0];
    cs.push(acc);
    for i in 1..n_cs {
        acc += y[i * lag];
        cs.push(acc);
    }

    let fluct: Vec<f64> = taus
        .iter()
        .map(|&t| {
            let n_buf = n_cs / t;
            let xs: Vec<f64> = (1..=t).map(|k| k as f64).collect();
            let mut f = 0.0;
            for win in cs.chunks_exact(t).take(n_buf) {
                let (slope, icpt) = linreg(&xs, win);
                let resid = win.iter().zip(&xs).map(|(&v, &x)| v - (slope * x + icpt));
                match how {
                    Fluctuation::Detrended => f += resid.map(|r| r * r).sum::<f64>(),
                    Fluctuation::RescaledRange => {
                        let (lo, hi) = resid.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), r| {
                            (lo.min(r), hi.max(r))
                        });
                        f += (hi - lo) * (hi - lo);
                    }
                }
            }
            match how {
                Fluctuation::Detrended => (f / (n_buf * t) as f64).sqrt(),
                Fluctuation::RescaledRange => (f / n_buf as f64).sqrt(),
            }
        })
        .collect();

    let nt = taus.len();
    let log_t: Vec<f64> = taus.iter().map(|&t| (t as f64).ln()).collect();
    let log_f: Vec<f64> = fluct.iter().map(|f| f.ln()).collect();
    const MIN_POINTS: usize = 6;
    let sserr: Vec<f64> = (MIN_POINTS..nt - MIN_POINTS + 1)
        .map(|i| {
            let (m1, b1) = linreg(&log_t[..i], &log_f[..i]);
            let (m2, b2) = linreg(&log_t[i - 1..], &log_f[i - 1..]);
            let r1: Vec<f64> = (0..i).map(|j| log_t[j] * m1 + b1 - log_f[j]).collect();
            let r2: Vec<f64> = (i - 1..nt)
                .map(|j| log_t[j] * m2 + b2 - log_f[j])
                .collect();
            norm(&r1) + norm(&r2)
        })
        .collect();
    let min = sserr.iter().copied().fold(f64::INFINITY, f64::min);
    let first = sserr.iter().position(|&v| v == min).unwrap_or(0);
    (first + MIN_POINTS) as f64 / nt as f64
}

pub fn sc_fluct_anal_2_rsrangefit_50_1_logi_prop_r1(y: &[f64]) -> f64 {
    fluct_anal_prop_r1(y, 1, Fluctuation::RescaledRange)
}

pub fn sc_fluct_anal_2_dfa_50_1_2_logi_prop_r1(y: &[f64]) -> f64 {
    fluct_anal_prop_r1(y, 2, Fluctuation::Detrended)
}
