//! Slow, direct reimplementation of the canonical features used as a test
//! oracle. Autocorrelations are summed over all lags, spectra use a plain
//! DFT, the detrending spline uses a truncated power basis, and the outlier
//! statistic recomputes every threshold from scratch.

use std::f64::consts::E;

fn mean(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}

fn sample_std(x: &[f64]) -> f64 {
    let m = mean(x);
    (x.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (x.len() - 1) as f64).sqrt()
}

fn min_of(x: &[f64]) -> f64 {
    x.iter().cloned().fold(f64::INFINITY, f64::min)
}

fn max_of(x: &[f64]) -> f64 {
    x.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
}

fn median_of(x: &[f64]) -> f64 {
    let mut s = x.to_vec();
    s.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = s.len();
    if n % 2 == 0 {
        0.5 * (s[n / 2 - 1] + s[n / 2])
    } else {
        s[n / 2]
    }
}

/// Biased autocorrelation by direct summation, normalised by lag 0.
fn acf(y: &[f64]) -> Vec<f64> {
    let n = y.len();
    let m = mean(y);
    let c: Vec<f64> = y.iter().map(|v| v - m).collect();
    let c0: f64 = c.iter().map(|v| v * v).sum();
    (0..n)
        .map(|k| (0..n - k).map(|i| c[i] * c[i + k]).sum::<f64>() / c0)
        .collect()
}

fn first_nonpositive(ac: &[f64]) -> usize {
    ac.iter().position(|&v| v <= 0.0).unwrap_or(ac.len())
}

fn hist_counts(y: &[f64], bins: usize) -> (Vec<f64>, f64, f64) {
    let lo = min_of(y);
    let width = (max_of(y) - lo) / bins as f64;
    let mut counts = vec![0.0; bins];
    for &v in y {
        let k = ((v - lo) / width).floor().max(0.0) as usize;
        counts[k.min(bins - 1)] += 1.0;
    }
    (counts, lo, width)
}

fn hist_mode(y: &[f64], bins: usize) -> f64 {
    let (counts, lo, width) = hist_counts(y, bins);
    let top = max_of(&counts);
    let centres: Vec<f64> = (0..bins)
        .filter(|&k| counts[k] == top)
        .map(|k| lo + width * (k as f64 + 0.5))
        .collect();
    mean(&centres)
}

fn f1ecac(y: &[f64]) -> f64 {
    let ac = acf(y);
    let th = 1.0 / E;
    for i in 0..y.len() - 2 {
        if ac[i + 1] < th {
            return i as f64 + (th - ac[i]) / (ac[i + 1] - ac[i]);
        }
    }
    y.len() as f64
}

fn first_min_ac(y: &[f64]) -> f64 {
    let ac = acf(y);
    for i in 1..y.len() - 1 {
        if ac[i] < ac[i - 1] && ac[i] < ac[i + 1] {
            return i as f64;
        }
    }
    y.len() as f64
}

fn histogram_ami(y: &[f64]) -> f64 {
    let (lo, hi) = (min_of(y), max_of(y));
    let step = (hi - lo + 0.2) / 5.0;
    let bin = |v: f64| (0..=5).find(|&k| v < lo + step * k as f64 - 0.1);
    let pairs: Vec<(usize, usize)> = (0..y.len() - 2)
        .filter_map(|t| match (bin(y[t]), bin(y[t + 2])) {
            (Some(a), Some(b)) if a >= 1 && b >= 1 => Some((a - 1, b - 1)),
            _ => None,
        })
        .collect();
    let total = pairs.len() as f64;
    let mut mi = 0.0;
    for a in 0..5 {
        for b in 0..5 {
            let pab = pairs.iter().filter(|&&p| p == (a, b)).count() as f64 / total;
            if pab == 0.0 {
                continue;
            }
            let pa = pairs.iter().filter(|p| p.0 == a).count() as f64 / total;
            let pb = pairs.iter().filter(|p| p.1 == b).count() as f64 / total;
            mi += pab * (pab / (pa * pb)).ln();
        }
    }
    mi
}

fn trev(y: &[f64]) -> f64 {
    let d: Vec<f64> = (1..y.len()).map(|i| (y[i] - y[i - 1]).powi(3)).collect();
    mean(&d)
}

fn pnn40(y: &[f64]) -> f64 {
    let hits = (1..y.len())
        .filter(|&i| 1000.0 * (y[i] - y[i - 1]).abs() > 40.0)
        .count();
    hits as f64 / (y.len() - 1) as f64
}

/// Longest gap between consecutive "break" positions among `0..n-1`, where
/// a break is a position not in the run or the final position.
fn longest_between_breaks(is_break: impl Fn(usize) -> bool, len: usize) -> f64 {
    let mut breaks: Vec<usize> = (0..len).filter(|&i| is_break(i) || i == len - 1).collect();
    breaks.insert(0, 0);
    breaks.windows(2).map(|w| w[1] - w[0]).max().unwrap_or(0) as f64
}

fn mean_longstretch1(y: &[f64]) -> f64 {
    let m = mean(y);
    longest_between_breaks(|i| y[i] - m <= 0.0, y.len() - 1)
}

fn diff_longstretch0(y: &[f64]) -> f64 {
    longest_between_breaks(|i| y[i + 1] - y[i] >= 0.0, y.len() - 1)
}

/// Quantile at `q` on the `(i + 0.5) / n` grid.
fn grid_quantile(sorted: &[f64], q: f64) -> f64 {
    let n = sorted.len() as f64;
    if q < 0.5 / n {
        return sorted[0];
    }
    if q > 1.0 - 0.5 / n {
        return sorted[sorted.len() - 1];
    }
    let pos = n * q - 0.5;
    let (i, frac) = (pos.floor() as usize, pos - pos.floor());
    sorted[i] + frac * (sorted[pos.ceil() as usize] - sorted[i])
}

fn three_level_labels(y: &[f64]) -> Vec<usize> {
    let mut s = y.to_vec();
    s.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let third = 1.0 / 3.0;
    let qs = [0.0, third, third + third, third + third + third];
    let mut th: Vec<f64> = qs.iter().map(|&q| grid_quantile(&s, q)).collect();
    th[0] -= 1.0;
    y.iter()
        .map(|&v| (0..3).rev().find(|&g| v > th[g] && v <= th[g + 1]).map_or(0, |g| g + 1))
        .collect()
}

fn transition_sumdiagcov(y: &[f64]) -> f64 {
    let tau = first_nonpositive(&acf(y)).max(1);
    let down: Vec<f64> = (0..y.len()).step_by(tau).map(|i| y[i]).collect();
    let lab = three_level_labels(&down);
    let steps = (down.len() - 1) as f64;
    let mut total = 0.0;
    for to in 1..=3 {
        let col: Vec<f64> = (1..=3)
            .map(|from| {
                (0..lab.len() - 1)
                    .filter(|&i| lab[i] == from && lab[i + 1] == to)
                    .count() as f64
                    / steps
            })
            .collect();
        total += sample_std(&col).powi(2);
    }
    total
}

/// Least-squares fit of a C2 cubic with one interior break, via a truncated
/// power basis on rescaled abscissae and Householder QR.
fn spline_fit(y: &[f64]) -> Vec<f64> {
    let n = y.len();
    let last = (n - 1) as f64;
    let brk = ((n / 2) as f64 - 1.0) / last;
    let rows: Vec<[f64; 5]> = (0..n)
        .map(|i| {
            let s = i as f64 / last;
            [1.0, s, s * s, s * s * s, (s - brk).max(0.0).powi(3)]
        })
        .collect();
    let coef = least_squares(&rows, y);
    rows.iter()
        .map(|r| r.iter().zip(&coef).map(|(a, b)| a * b).sum())
        .collect()
}

fn least_squares(rows: &[[f64; 5]], y: &[f64]) -> [f64; 5] {
    let n = rows.len();
    let mut a: Vec<[f64; 5]> = rows.to_vec();
    let mut b = y.to_vec();
    for k in 0..5 {
        let norm = (k..n).map(|i| a[i][k] * a[i][k]).sum::<f64>().sqrt();
        let alpha = if a[k][k] > 0.0 { -norm } else { norm };
        let mut v: Vec<f64> = (k..n).map(|i| a[i][k]).collect();
        v[0] -= alpha;
        let vv: f64 = v.iter().map(|x| x * x).sum();
        if vv == 0.0 {
            continue;
        }
        for j in k..5 {
            let dot: f64 = (k..n).map(|i| v[i - k] * a[i][j]).sum();
            for i in k..n {
                a[i][j] -= 2.0 * dot / vv * v[i - k];
            }
        }
        let dot: f64 = (k..n).map(|i| v[i - k] * b[i]).sum();
        for i in k..n {
            b[i] -= 2.0 * dot / vv * v[i - k];
        }
    }
    let mut x = [0.0; 5];
    for k in (0..5).rev() {
        let s: f64 = (k + 1..5).map(|j| a[k][j] * x[j]).sum();
        x[k] = (b[k] - s) / a[k][k];
    }
    x
}

fn periodicity_wang(y: &[f64]) -> f64 {
    let n = y.len();
    let fit = spline_fit(y);
    let r: Vec<f64> = (0..n).map(|i| y[i] - fit[i]).collect();
    let lags = n.div_ceil(3);
    let ac: Vec<f64> = (1..=lags)
        .map(|k| (0..n - k).map(|i| r[i] * r[i + k]).sum::<f64>() / (n - k) as f64)
        .collect();
    let mut trough = None;
    for i in 1..lags - 1 {
        let (before, after) = (ac[i] - ac[i - 1], ac[i + 1] - ac[i]);
        if before < 0.0 && after > 0.0 {
            trough = Some(ac[i]);
        }
        if before > 0.0 && after < 0.0 {
            if let Some(t) = trough {
                if ac[i] - t >= 0.01 && ac[i] >= 0.0 {
                    return i as f64;
                }
            }
        }
    }
    0.0
}

fn embed2_expfit_meandiff(y: &[f64]) -> f64 {
    let n = y.len();
    let mut tau = first_nonpositive(&acf(y));
    if tau as f64 > n as f64 / 10.0 {
        tau = n / 10;
    }
    let d: Vec<f64> = (0..n - tau - 1)
        .map(|i| ((y[i + 1] - y[i]).powi(2) + (y[i + tau + 1] - y[i + tau]).powi(2)).sqrt())
        .collect();
    let sd = sample_std(&d);
    if sd < 0.001 {
        return 0.0;
    }
    let l = mean(&d);
    let width_rule = 3.5 * sd / (d.len() as f64).cbrt();
    let bins = ((max_of(&d) - min_of(&d)) / width_rule).ceil() as usize;
    let (counts, lo, width) = hist_counts(&d, bins);
    let dev: Vec<f64> = (0..bins)
        .map(|k| {
            let centre = lo + width * (k as f64 + 0.5);
            (counts[k] / d.len() as f64 - (-centre / l).exp() / l).abs()
        })
        .collect();
    mean(&dev)
}

fn pearson_lag(x: &[f64], lag: usize) -> f64 {
    let a = &x[..x.len() - lag];
    let b = &x[lag..];
    let (ma, mb) = (mean(a), mean(b));
    let cov: f64 = a.iter().zip(b).map(|(u, v)| (u - ma) * (v - mb)).sum();
    let va: f64 = a.iter().map(|u| (u - ma).powi(2)).sum();
    let vb: f64 = b.iter().map(|v| (v - mb).powi(2)).sum();
    cov / (va * vb).sqrt()
}

fn ami_gaussian_fmmi(y: &[f64]) -> f64 {
    let tau = 40.min(y.len().div_ceil(2));
    let ami: Vec<f64> = (1..=tau)
        .map(|k| -0.5 * (1.0 - pearson_lag(y, k).powi(2)).ln())
        .collect();
    for i in 1..tau - 1 {
        if ami[i] < ami[i - 1] && ami[i] < ami[i + 1] {
            return i as f64;
        }
    }
    tau as f64
}

fn rolling_residuals(y: &[f64], w: usize) -> Vec<f64> {
    (w..y.len())
        .map(|i| y[i] - mean(&y[i - w..i]))
        .collect()
}

fn mean1_tauresrat(y: &[f64]) -> f64 {
    let r = rolling_residuals(y, 1);
    first_nonpositive(&acf(&r)) as f64 / first_nonpositive(&acf(y)) as f64
}

fn mean3_stderr(y: &[f64]) -> f64 {
    sample_std(&rolling_residuals(y, 3))
}

fn outlier_mdrmd(y: &[f64], sign: f64) -> f64 {
    let n = y.len();
    let w: Vec<f64> = y.iter().map(|v| sign * v).collect();
    let top = max_of(&w);
    if top < 0.01 {
        return 0.0;
    }
    let tot = w.iter().filter(|&&v| v >= 0.0).count() as f64;
    let n_thresh = (top / 0.01) as usize + 1;
    let mut dense = Vec::new();
    let mut medians = Vec::new();
    let mut first_single = None;
    for j in 0..n_thresh {
        let thr = j as f64 * 0.01;
        let idx: Vec<f64> = (0..n).filter(|&i| w[i] >= thr).map(|i| (i + 1) as f64).collect();
        dense.push((idx.len() as f64 - 1.0) * 100.0 / tot);
        if idx.len() == 1 && first_single.is_none() {
            first_single = Some(j);
        }
        medians.push(if idx.is_empty() {
            f64::NAN
        } else {
            median_of(&idx) / (n as f64 / 2.0) - 1.0
        });
    }
    let last_dense = (0..n_thresh).filter(|&j| dense[j] > 2.0).last().unwrap_or(0);
    let keep = last_dense.min(first_single.unwrap_or(n_thresh - 1));
    median_of(&medians[..=keep])
}

/// One-sided rectangular-window periodogram by direct DFT.
fn periodogram(y: &[f64]) -> (Vec<f64>, Vec<f64>) {
    const PI_LITERAL: f64 = 3.14159265359;
    let n = y.len();
    let nfft = n.next_power_of_two();
    let m = mean(y);
    let half = nfft / 2 + 1;
    let mut w = Vec::new();
    let mut s = Vec::new();
    for k in 0..half {
        let (mut re, mut im) = (0.0, 0.0);
        for (t, v) in y.iter().enumerate() {
            let ang = -2.0 * std::f64::consts::PI * (k * t % nfft) as f64 / nfft as f64;
            re += (v - m) * ang.cos();
            im += (v - m) * ang.sin();
        }
        let edge = k == 0 || k == half - 1;
        let p = (re * re + im * im) / n as f64 * if edge { 1.0 } else { 2.0 };
        w.push(2.0 * PI_LITERAL * k as f64 / nfft as f64);
        s.push(p / (2.0 * PI_LITERAL));
    }
    (w, s)
}

fn welch_area_5_1(y: &[f64]) -> f64 {
    let (w, s) = periodogram(y);
    let dw = w[1] - w[0];
    (0..s.len() / 5).map(|k| s[k] * dw).sum()
}

fn welch_centroid(y: &[f64]) -> f64 {
    let (w, s) = periodogram(y);
    let total: f64 = s.iter().sum();
    let mut acc = 0.0;
    for k in 0..s.len() {
        acc += s[k];
        if acc > total / 2.0 {
            return w[k];
        }
    }
    0.0
}

fn motif_three_hh(y: &[f64]) -> f64 {
    let lab = three_level_labels(y);
    let denom = (y.len() - 1) as f64;
    let mut h = 0.0;
    for a in 1..=3 {
        for b in 1..=3 {
            let c = (0..lab.len() - 1)
                .filter(|&i| lab[i] == a && lab[i + 1] == b)
                .count() as f64;
            if c > 0.0 {
                h -= c / denom * (c / denom).ln();
            }
        }
    }
    h
}

fn fit_line(x: &[f64], y: &[f64]) -> (f64, f64) {
    let (mx, my) = (mean(x), mean(y));
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

fn fluct_prop_r1(y: &[f64], lag: usize, dfa: bool) -> f64 {
    let n = y.len();
    let (lo, hi) = (5f64.ln(), ((n / 2) as f64).ln());
    let mut taus: Vec<usize> = Vec::new();
    for i in 0..50 {
        let t = (lo + i as f64 * (hi - lo) / 49.0).exp().round() as usize;
        if taus.last() != Some(&t) {
            taus.push(t);
        }
    }
    if taus.len() < 12 {
        return 0.0;
    }
    let picked: Vec<f64> = (0..n / lag).map(|i| y[i * lag]).collect();
    let cs: Vec<f64> = picked
        .iter()
        .scan(0.0, |acc, v| {
            *acc += v;
            Some(*acc)
        })
        .collect();
    let mut log_t = Vec::new();
    let mut log_f = Vec::new();
    for &t in &taus {
        let x: Vec<f64> = (1..=t).map(|k| k as f64).collect();
        let nb = cs.len() / t;
        let mut acc = 0.0;
        for b in 0..nb {
            let seg = &cs[b * t..(b + 1) * t];
            let (m, c) = fit_line(&x, seg);
            let r: Vec<f64> = (0..t).map(|k| seg[k] - (m * x[k] + c)).collect();
            acc += if dfa {
                r.iter().map(|v| v * v).sum::<f64>()
            } else {
                (max_of(&r) - min_of(&r)).powi(2)
            };
        }
        let f = if dfa {
            (acc / (nb * t) as f64).sqrt()
        } else {
            (acc / nb as f64).sqrt()
        };
        log_t.push((t as f64).ln());
        log_f.push(f.ln());
    }
    let nt = taus.len();
    let resid_norm = |lo: usize, hi: usize| {
        let (m, c) = fit_line(&log_t[lo..hi], &log_f[lo..hi]);
        (lo..hi)
            .map(|j| (log_t[j] * m + c - log_f[j]).powi(2))
            .sum::<f64>()
            .sqrt()
    };
    let mut best = (f64::INFINITY, 0);
    for i in 6..=nt - 6 {
        let e = resid_norm(0, i) + resid_norm(i - 1, nt);
        if e < best.0 {
            best = (e, i);
        }
    }
    best.1 as f64 / nt as f64
}

/// The 22 canonical features of `x`, in canonical order, after standardising
/// with the sample standard deviation.
pub fn catch22(x: &[f64]) -> [f64; 22] {
    let (m, sd) = (mean(x), sample_std(x));
    let y: Vec<f64> = x.iter().map(|v| (v - m) / sd).collect();
    let y = &y[..];
    [
        hist_mode(y, 5),
        hist_mode(y, 10),
        f1ecac(y),
        first_min_ac(y),
        histogram_ami(y),
        trev(y),
        pnn40(y),
        mean_longstretch1(y),
        transition_sumdiagcov(y),
        periodicity_wang(y),
        embed2_expfit_meandiff(y),
        ami_gaussian_fmmi(y),
        mean1_tauresrat(y),
        outlier_mdrmd(y, 1.0),
        outlier_mdrmd(y, -1.0),
        welch_area_5_1(y),
        diff_longstretch0(y),
        motif_three_hh(y),
        fluct_prop_r1(y, 1, false),
        fluct_prop_r1(y, 2, true),
        welch_centroid(y),
        mean3_stderr(y),
    ]
}

/// Raw mean and population standard deviation.
pub fn mean_and_std(x: &[f64]) -> (f64, f64) {
    let m = mean(x);
    let var = x.iter().map(|v| (v - m).powi(2)).sum::<f64>() / x.len() as f64;
    (m, var.sqrt())
}
