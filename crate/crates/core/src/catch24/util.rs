//! Numeric helpers shared by the canonical features. Conventions (sample
//! standard deviation, quantile interpolation, biased autocorrelation) follow
//! the reference feature definitions, which differ from textbook defaults.

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

pub(crate) fn mean(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}

/// Standard deviation with the `n - 1` denominator.
pub(crate) fn stddev(x: &[f64]) -> f64 {
    let m = mean(x);
    let ss: f64 = x.iter().map(|v| (v - m).powi(2)).sum();
    (ss / (x.len() as f64 - 1.0)).sqrt()
}

pub(crate) fn min_max(x: &[f64]) -> (f64, f64) {
    x.iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        })
}

pub(crate) fn sorted(x: &[f64]) -> Vec<f64> {
    let mut s = x.to_vec();
    s.sort_by(|a, b| a.total_cmp(b));
    s
}

pub(crate) fn median(x: &[f64]) -> f64 {
    let s = sorted(x);
    let n = s.len();
    if n % 2 == 1 {
        s[n / 2]
    } else {
        (s[n / 2] + s[n / 2 - 1]) / 2.0
    }
}

/// Piecewise-linear quantile on the `(i + 0.5) / n` grid, clamped to the
/// extremes outside it.
pub(crate) fn quantile(sorted: &[f64], q: f64) -> f64 {
    let n = sorted.len();
    let edge = 0.5 / n as f64;
    if q < edge {
        return sorted[0];
    }
    if q > 1.0 - edge {
        return sorted[n - 1];
    }
    let idx = n as f64 * q - 0.5;
    let lo = idx.floor();
    let hi = idx.ceil();
    let (a, b) = (sorted[lo as usize], sorted[hi as usize]);
    a + (idx - lo) * (b - a) / (hi - lo)
}

/// Labels each sample 1..=groups by equiprobable quantile bins.
pub(crate) fn coarsegrain_quantile(y: &[f64], groups: usize) -> Vec<usize> {
    let s = sorted(y);
    // breakpoints built by repeated addition, which matters at the last edge
    let step = 1.0 / groups as f64;
    let mut levels = Vec::with_capacity(groups + 1);
    let mut acc = 0.0;
    for _ in 0..=groups {
        levels.push(acc);
        acc += step;
    }
    let mut th: Vec<f64> = levels.iter().map(|&q| quantile(&s, q)).collect();
    th[0] -= 1.0;
    let mut labels = vec![0; y.len()];
    for g in 0..groups {
        for (label, &v) in labels.iter_mut().zip(y) {
            if v > th[g] && v <= th[g + 1] {
                *label = g + 1;
            }
        }
    }
    labels
}

fn next_pow2(n: usize) -> usize {
    n.next_power_of_two()
}

/// Biased autocorrelation of the mean-removed series normalised by lag 0,
/// computed on a zero-padded FFT of length `2 * next_pow2(n)`. Entries at
/// lags `>= n` are (numerically) zero; the vector is that full length.
pub(crate) fn autocorrelation(y: &[f64]) -> Vec<f64> {
    let n = y.len();
    let nfft = next_pow2(n) << 1;
    let m = mean(y);
    let mut buf: Vec<Complex<f64>> = y
        .iter()
        .map(|&v| Complex::new(v - m, 0.0))
        .chain(std::iter::repeat(Complex::new(0.0, 0.0)))
        .take(nfft)
        .collect();
    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(nfft).process(&mut buf);
    for c in buf.iter_mut() {
        *c = *c * c.conj();
    }
    // the spectrum is real and even, so a second forward pass equals the inverse
    planner.plan_fft_forward(nfft).process(&mut buf);
    let d = buf[0];
    buf.iter().map(|c| (c / d).re).collect()
}

/// Index of the first non-positive autocorrelation, capped at `max_tau`.
pub(crate) fn first_zero(ac: &[f64], max_tau: usize) -> usize {
    let mut i = 0;
    while i < max_tau && ac[i] > 0.0 {
        i += 1;
    }
    i
}

/// Pearson correlation between `x[..n-lag]` and `x[lag..]`.
pub(crate) fn autocorr_lag(x: &[f64], lag: usize) -> f64 {
    let n = x.len() - lag;
    let (a, b) = (&x[..n], &x[lag..]);
    let (ma, mb) = (mean(a), mean(b));
    let (mut num, mut da, mut db) = (0.0, 0.0, 0.0);
    for (u, v) in a.iter().zip(b) {
        num += (u - ma) * (v - mb);
        da += (u - ma) * (u - ma);
        db += (v - mb) * (v - mb);
    }
    num / (da * db).sqrt()
}

/// Ordinary least squares fit `y = slope * x + intercept`; a singular design
/// yields `(0, 0)`.
pub(crate) fn linreg(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let (mut sx, mut sx2, mut sxy, mut sy) = (0.0, 0.0, 0.0, 0.0);
    for (&a, &b) in x.iter().zip(y) {
        sx += a;
        sx2 += a * a;
        sxy += a * b;
        sy += b;
    }
    let denom = n * sx2 - sx * sx;
    if denom == 0.0 {
        return (0.0, 0.0);
    }
    ((n * sxy - sx * sy) / denom, (sy * sx2 - sx * sxy) / denom)
}

pub(crate) fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Equal-width histogram over `[min, max]`; returns counts and bin edges.
pub(crate) fn histogram(y: &[f64], n_bins: usize) -> (Vec<usize>, Vec<f64>) {
    let (lo, hi) = min_max(y);
    let step = (hi - lo) / n_bins as f64;
    let mut counts = vec![0usize; n_bins];
    for &v in y {
        // truncation toward zero, then clamp
        let idx = ((v - lo) / step) as i64;
        counts[idx.clamp(0, n_bins as i64 - 1) as usize] += 1;
    }
    let edges = (0..=n_bins).map(|i| i as f64 * step + lo).collect();
    (counts, edges)
}

pub(crate) fn entropy(p: &[f64]) -> f64 {
    -p.iter().filter(|&&a| a > 0.0).map(|a| a * a.ln()).sum::<f64>()
}
