//! Diagnostics for trained models: cumulative frequency response of the
//! first-layer filters and per-task normalised layer-probe matrices.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_N_DFT: usize = 2048;

/// First-layer filters, one row of taps per filter.
#[derive(Debug, Clone, PartialEq)]
pub struct FilterBank {
    pub filters: Vec<Vec<f64>>,
    pub sample_rate: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CumulativeResponse {
    pub magnitude: Vec<f64>,
    pub freq_axis: Vec<f64>,
}

impl CumulativeResponse {
    /// Mean magnitude over bins within `half_width_hz` of `centre_hz`.
    pub fn band_mean(&self, centre_hz: f64, half_width_hz: f64) -> f64 {
        let vals: Vec<f64> = self
            .freq_axis
            .iter()
            .zip(&self.magnitude)
            .filter(|(f, _)| (**f - centre_hz).abs() <= half_width_hz)
            .map(|(_, m)| *m)
            .collect();
        vals.iter().sum::<f64>() / vals.len().max(1) as f64
    }

    pub fn mean(&self) -> f64 {
        self.magnitude.iter().sum::<f64>() / self.magnitude.len() as f64
    }
}

/// One-sided magnitude spectrum (`n_dft / 2 + 1` points) of the taps
/// zero-padded to `n_dft`.
pub fn filter_response(taps: &[f64], n_dft: usize) -> Result<Vec<f64>> {
    if taps.is_empty() {
        return Err(Error::EmptyFilter);
    }
    if taps.len() > n_dft {
        return Err(Error::FilterTooLong { taps: taps.len(), n_dft });
    }
    let mut buf: Vec<Complex<f64>> = taps.iter().map(|&t| Complex::new(t, 0.0)).collect();
    buf.resize(n_dft, Complex::new(0.0, 0.0));
    FftPlanner::new().plan_fft_forward(n_dft).process(&mut buf);
    Ok(buf[..n_dft / 2 + 1].iter().map(|c| c.norm()).collect())
}

/// Sum over filters of each magnitude spectrum divided by its L2 norm.
pub fn cumulative_response(bank: &FilterBank) -> Result<CumulativeResponse> {
    cumulative_response_n(bank, DEFAULT_N_DFT)
}

pub fn cumulative_response_n(bank: &FilterBank, n_dft: usize) -> Result<CumulativeResponse> {
    if bank.filters.is_empty() {
        return Err(Error::EmptyFilter);
    }
    let n_bins = n_dft / 2 + 1;
    let mut total = vec![0.0; n_bins];
    for (k, taps) in bank.filters.iter().enumerate() {
        let mag = filter_response(taps, n_dft)?;
        let norm = mag.iter().map(|m| m * m).sum::<f64>().sqrt();
        if !(norm > 0.0) {
            return Err(Error::ZeroEnergyFilter(k));
        }
        for (t, m) in total.iter_mut().zip(&mag) {
            *t += m / norm;
        }
    }
    let nyquist = bank.sample_rate as f64 / 2.0;
    let freq_axis = (0..n_bins).map(|i| nyquist * i as f64 / (n_bins - 1) as f64).collect();
    Ok(CumulativeResponse { magnitude: total, freq_axis })
}

/// Probe scores per task (rows) and layer (columns), with each row
/// min-max scaled independently.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayerMatrix {
    pub tasks: Vec<String>,
    pub raw_uar: Vec<Vec<f64>>,
    pub normalized: Vec<Vec<f64>>,
    /// Rows whose scores were all equal and were mapped to zeros.
    pub constant_rows: Vec<bool>,
}

impl LayerMatrix {
    pub fn best_layers(&self) -> Vec<usize> {
        self.normalized
            .iter()
            .map(|row| {
                let mut best = 0;
                for (i, &v) in row.iter().enumerate() {
                    if v > row[best] {
                        best = i;
                    }
                }
                best
            })
            .collect()
    }
}

pub fn normalize_layer_matrix(tasks: Vec<String>, raw_uar: Vec<Vec<f64>>) -> Result<LayerMatrix> {
    if tasks.len() != raw_uar.len() {
        return Err(Error::LengthMismatch(format!("{} task names for {} rows", tasks.len(), raw_uar.len())));
    }
    let mut normalized = Vec::with_capacity(raw_uar.len());
    let mut constant_rows = Vec::with_capacity(raw_uar.len());
    for row in &raw_uar {
        if row.len() < 2 {
            return Err(Error::TooFewLayers(row.len()));
        }
        let lo = row.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if hi > lo {
            normalized.push(row.iter().map(|v| (v - lo) / (hi - lo)).collect());
            constant_rows.push(false);
        } else {
            normalized.push(vec![0.0; row.len()]);
            constant_rows.push(true);
        }
    }
    Ok(LayerMatrix { tasks, raw_uar, normalized, constant_rows })
}

fn write_file(path: &Path, body: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    fs::write(path, body).map_err(|e| Error::io(path, e))
}

/// `freq_hz,magnitude`, one row per bin.
pub fn write_response_csv(path: &Path, r: &CumulativeResponse) -> Result<()> {
    let mut out = String::from("freq_hz,magnitude\n");
    for (f, m) in r.freq_axis.iter().zip(&r.magnitude) {
        writeln!(out, "{f},{m}").unwrap();
    }
    write_file(path, &out)
}

/// Rows `task,matrix,layer0..layerN` for both the raw and normalised values.
pub fn write_layer_matrix_csv(path: &Path, m: &LayerMatrix) -> Result<()> {
    let n_layers = m.raw_uar.first().map_or(0, Vec::len);
    let mut out = String::from("task,matrix");
    for l in 0..n_layers {
        write!(out, ",layer{l}").unwrap();
    }
    out.push('\n');
    for (kind, rows) in [("raw", &m.raw_uar), ("normalized", &m.normalized)] {
        for (task, row) in m.tasks.iter().zip(rows) {
            write!(out, "{task},{kind}").unwrap();
            for v in row {
                write!(out, ",{v}").unwrap();
            }
            out.push('\n');
        }
    }
    write_file(path, &out)
}

const W: f64 = 640.0;
const H: f64 = 360.0;
const MARGIN: f64 = 48.0;

/// Line plot of the response against frequency in kHz.
pub fn write_response_svg(path: &Path, r: &CumulativeResponse) -> Result<()> {
    let f_max = r.freq_axis.last().copied().unwrap_or(1.0).max(1.0);
    let m_max = r.magnitude.iter().copied().fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let x = |f: f64| MARGIN + (W - 2.0 * MARGIN) * f / f_max;
    let y = |m: f64| H - MARGIN - (H - 2.0 * MARGIN) * m / m_max;
    let mut svg = format!(
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" font-family="sans-serif" font-size="12">
<rect width="100%" height="100%" fill="white"/>
<line x1="{MARGIN}" y1="{b}" x2="{r}" y2="{b}" stroke="black"/>
<line x1="{MARGIN}" y1="{MARGIN}" x2="{MARGIN}" y2="{b}" stroke="black"/>
<text x="{cx}" y="{ly}" text-anchor="middle">frequency (kHz)</text>
<text x="14" y="{cy}" transform="rotate(-90 14 {cy})" text-anchor="middle">cumulative response</text>
"#,
        b = H - MARGIN,
        r = W - MARGIN,
        cx = W / 2.0,
        ly = H - 10.0,
        cy = H / 2.0,
    );
    let step_khz = if f_max > 20_000.0 { 5.0 } else { 2.0 };
    let mut k = 0.0;
    while k * 1000.0 <= f_max {
        let px = x(k * 1000.0);
        writeln!(svg, r#"<text x="{px:.1}" y="{:.1}" text-anchor="middle">{k}</text>"#, H - MARGIN + 16.0).unwrap();
        k += step_khz;
    }
    svg.push_str(r#"<polyline fill="none" stroke="steelblue" stroke-width="1.5" points=""#);
    for (f, m) in r.freq_axis.iter().zip(&r.magnitude) {
        write!(svg, "{:.2},{:.2} ", x(*f), y(*m)).unwrap();
    }
    svg.push_str("\"/>\n</svg>\n");
    write_file(path, &svg)
}

/// Heat map of the normalised matrix, one row per task.
pub fn write_layer_matrix_svg(path: &Path, m: &LayerMatrix) -> Result<()> {
    let n_layers = m.normalized.first().map_or(0, Vec::len);
    let cell = 36.0;
    let left = 80.0;
    let top = 30.0;
    let width = left + cell * n_layers as f64 + 10.0;
    let height = top + cell * m.tasks.len() as f64 + 10.0;
    let mut svg = format!(
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" font-family="sans-serif" font-size="12">
<rect width="100%" height="100%" fill="white"/>
"#
    );
    for l in 0..n_layers {
        writeln!(svg, r#"<text x="{:.1}" y="20" text-anchor="middle">{l}</text>"#, left + cell * (l as f64 + 0.5)).unwrap();
    }
    for (r, (task, row)) in m.tasks.iter().zip(&m.normalized).enumerate() {
        let y = top + cell * r as f64;
        writeln!(svg, r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{task}</text>"#, left - 6.0, y + cell * 0.6).unwrap();
        for (l, v) in row.iter().enumerate() {
            let shade = (255.0 * (1.0 - v)).round() as u8;
            writeln!(
                svg,
                r#"<rect x="{:.1}" y="{y:.1}" width="{cell}" height="{cell}" fill="rgb({shade},{shade},255)" stroke="white"/>"#,
                left + cell * l as f64
            )
            .unwrap();
        }
    }
    svg.push_str("</svg>\n");
    write_file(path, &svg)
}
