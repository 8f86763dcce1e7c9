//! Waveform loading, resampling and segment slicing.
//!
//! Decoded samples are kept in double precision. 16-bit PCM is scaled by
//! 1/32768 so that every decoded sample satisfies `|x| <= 1`.

use std::f64::consts::PI;
use std::path::Path;

use hound::{SampleFormat, WavReader, WavSpec, WavWriter};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Waveform {
    pub samples: Vec<f64>,
    pub sample_rate: u32,
}

impl Waveform {
    pub fn new(samples: Vec<f64>, sample_rate: u32) -> Self {
        Self {
            samples,
            sample_rate,
        }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn duration_s(&self) -> f64 {
        self.samples.len() as f64 / self.sample_rate as f64
    }

    /// Samples as `f32`, the precision the classifiers train in.
    pub fn to_f32(&self) -> Vec<f32> {
        self.samples.iter().map(|&x| x as f32).collect()
    }
}

/// Parameters of the anti-aliasing resampler.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResampleSpec {
    pub target_rate: u32,
    /// Kernel length measured in output sample periods.
    pub filter_taps: usize,
    /// Passband edge as a fraction of the target Nyquist frequency.
    pub cutoff_fraction: f64,
}

impl ResampleSpec {
    pub fn new(target_rate: u32) -> Self {
        Self {
            target_rate,
            filter_taps: 64,
            cutoff_fraction: 0.9,
        }
    }
}

pub fn read_wav(path: impl AsRef<Path>) -> Result<Waveform> {
    let path = path.as_ref();
    let wav_err = |e: hound::Error| match e {
        hound::Error::IoError(io) => Error::io(path, io),
        other => Error::Wav {
            path: path.to_path_buf(),
            reason: other.to_string(),
        },
    };
    let mut reader = WavReader::open(path).map_err(wav_err)?;
    let spec = reader.spec();
    let channels = spec.channels as usize;
    if channels == 0 {
        return Err(Error::UnsupportedEncoding {
            path: path.to_path_buf(),
            detail: "zero channels".into(),
        });
    }
    if channels > 1 {
        log::warn!(
            "{}: {} channels, using channel 0 only",
            path.display(),
            channels
        );
    }
    let samples: Vec<f64> = match (spec.sample_format, spec.bits_per_sample) {
        (SampleFormat::Int, 16) => reader
            .samples::<i16>()
            .step_by(channels)
            .map(|s| s.map(|v| v as f64 / 32768.0))
            .collect::<std::result::Result<_, _>>()
            .map_err(wav_err)?,
        (SampleFormat::Float, 32) => reader
            .samples::<f32>()
            .step_by(channels)
            .map(|s| s.map(|v| v as f64))
            .collect::<std::result::Result<_, _>>()
            .map_err(wav_err)?,
        (format, bits) => {
            return Err(Error::UnsupportedEncoding {
                path: path.to_path_buf(),
                detail: format!("{format:?} {bits}-bit"),
            })
        }
    };
    if samples.is_empty() {
        return Err(Error::EmptyAudio(path.to_path_buf()));
    }
    if let Some(i) = samples.iter().position(|x| !x.is_finite()) {
        return Err(Error::NonFiniteValue {
            path: path.to_path_buf(),
            index: i,
        });
    }
    Ok(Waveform::new(samples, spec.sample_rate))
}

/// Writes mono 16-bit PCM, clipping to the representable range.
pub fn write_wav_pcm16(path: impl AsRef<Path>, w: &Waveform) -> Result<()> {
    let path = path.as_ref();
    let spec = WavSpec {
        channels: 1,
        sample_rate: w.sample_rate,
        bits_per_sample: 16,
        sample_format: SampleFormat::Int,
    };
    let wav_err = |e: hound::Error| match e {
        hound::Error::IoError(io) => Error::io(path, io),
        other => Error::Wav {
            path: path.to_path_buf(),
            reason: other.to_string(),
        },
    };
    let mut writer = WavWriter::create(path, spec).map_err(wav_err)?;
    for &x in &w.samples {
        let v = (x * 32768.0).round().clamp(-32768.0, 32767.0) as i16;
        writer.write_sample(v).map_err(wav_err)?;
    }
    writer.finalize().map_err(wav_err)
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

fn blackman(x: f64) -> f64 {
    // x in [-1, 1]
    if x.abs() > 1.0 {
        return 0.0;
    }
    let t = PI * (x + 1.0);
    0.42 - 0.5 * t.cos() + 0.08 * (2.0 * t).cos()
}

fn sinc(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        let px = PI * x;
        px.sin() / px
    }
}

/// Rational-ratio polyphase resampler with a Blackman-windowed sinc kernel.
struct Polyphase {
    up: usize,
    down: usize,
    /// Taps either side of the centre, in input samples.
    reach: usize,
    /// `up` rows of `2 * reach` coefficients, unit DC gain per phase.
    table: Vec<f64>,
}

impl Polyphase {
    fn new(source: u32, spec: &ResampleSpec) -> Self {
        let g = gcd(source as u64, spec.target_rate as u64);
        let up = (spec.target_rate as u64 / g) as usize;
        let down = (source as u64 / g) as usize;
        // cycles per input sample
        let cutoff = spec.cutoff_fraction * 0.5 * spec.target_rate as f64 / source as f64;
        let half_width = 0.5 * spec.filter_taps as f64 * source as f64 / spec.target_rate as f64;
        let reach = half_width.ceil() as usize;
        let width = 2 * reach;
        let mut table = vec![0.0; up * width];
        for phase in 0..up {
            let frac = phase as f64 / up as f64;
            let row = &mut table[phase * width..(phase + 1) * width];
            for (j, c) in row.iter_mut().enumerate() {
                // input offset relative to the output instant
                let t = j as f64 - (reach as f64 - 1.0) - frac;
                *c = 2.0 * cutoff * sinc(2.0 * cutoff * t) * blackman(t / half_width);
            }
            let dc: f64 = row.iter().sum();
            row.iter_mut().for_each(|c| *c /= dc);
        }
        Self {
            up,
            down,
            reach,
            table,
        }
    }

    fn run(&self, x: &[f64], n_out: usize) -> Vec<f64> {
        let width = 2 * self.reach;
        let n = x.len() as isize;
        (0..n_out)
            .map(|k| {
                let pos = k * self.down;
                let base = (pos / self.up) as isize;
                let phase = pos % self.up;
                let row = &self.table[phase * width..(phase + 1) * width];
                let first = base - (self.reach as isize - 1);
                row.iter()
                    .enumerate()
                    .filter_map(|(j, &c)| {
                        let i = first + j as isize;
                        (0..n).contains(&i).then(|| c * x[i as usize])
                    })
                    .sum()
            })
            .collect()
    }
}

/// Downsamples `w` to `spec.target_rate`. Identical rates return a copy.
pub fn resample(w: &Waveform, spec: &ResampleSpec) -> Result<Waveform> {
    if spec.target_rate == 0 {
        return Err(Error::InvalidResampleSpec("target rate must be positive".into()));
    }
    if spec.filter_taps < 2 || !(spec.cutoff_fraction > 0.0 && spec.cutoff_fraction <= 1.0) {
        return Err(Error::InvalidResampleSpec(format!(
            "filter_taps {} / cutoff_fraction {}",
            spec.filter_taps, spec.cutoff_fraction
        )));
    }
    if spec.target_rate > w.sample_rate {
        return Err(Error::UnsupportedUpsample {
            from: w.sample_rate,
            to: spec.target_rate,
        });
    }
    if w.samples.len() < 2 {
        return Err(Error::DegenerateInput(w.samples.len()));
    }
    if spec.target_rate == w.sample_rate {
        return Ok(w.clone());
    }
    let n_out = ((w.samples.len() as f64 * spec.target_rate as f64 / w.sample_rate as f64)
        .round() as usize)
        .max(1);
    let filter = Polyphase::new(w.sample_rate, spec);
    Ok(Waveform::new(
        filter.run(&w.samples, n_out),
        spec.target_rate,
    ))
}

/// Extracts `[start_s, end_s)` as `round((end_s - start_s) * sample_rate)` samples
/// beginning at `round(start_s * sample_rate)`.
pub fn slice_segment(w: &Waveform, start_s: f64, end_s: f64) -> Result<Waveform> {
    if !(start_s < end_s) {
        return Err(Error::InvertedInterval { start_s, end_s });
    }
    let sr = w.sample_rate as f64;
    let duration_s = w.duration_s();
    // half a sample of slack on the right edge absorbs rounding in chained slices
    if start_s < 0.0 || end_s > duration_s + 0.5 / sr {
        return Err(Error::SliceOutOfRange {
            start_s,
            end_s,
            duration_s,
        });
    }
    let start = (start_s * sr).round() as usize;
    let len = ((end_s - start_s) * sr).round() as usize;
    let out_of_range = || Error::SliceOutOfRange {
        start_s,
        end_s,
        duration_s,
    };
    if len == 0 || start >= w.samples.len() {
        return Err(out_of_range());
    }
    let stop = start + len;
    if stop > w.samples.len() + 1 {
        return Err(out_of_range());
    }
    let stop = stop.min(w.samples.len());
    Ok(Waveform::new(w.samples[start..stop].to_vec(), w.sample_rate))
}
