//! Seeded tone-in-noise datasets and matching per-layer embeddings, used by
//! the examples and the end-to-end checks.

use std::fs;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::audio::{write_wav_pcm16, Waveform};
use crate::embeddings::{embedding_path, write_embeddings, EmbeddingSequence, N_LAYERS};
use crate::error::{Error, Result};
use crate::manifest::{write_manifest, Manifest, SegmentRecord, Task};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SyntheticSpec {
    /// One tone per class.
    pub tones_hz: Vec<f64>,
    pub count_per_class: usize,
    pub snr_db: f64,
    pub sample_rate: u32,
    pub min_duration_ms: f64,
    pub max_duration_ms: f64,
    /// Noise-only lead-in and tail around each call.
    pub padding_ms: f64,
    /// Peak tone amplitude.
    pub amplitude: f64,
    /// Callers are assigned round-robin; even callers are "f", odd "m".
    pub n_callers: usize,
    pub dataset_name: String,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        Self {
            tones_hz: vec![4000.0, 8000.0, 12000.0],
            count_per_class: 200,
            snr_db: 10.0,
            sample_rate: 44_100,
            min_duration_ms: 40.0,
            max_duration_ms: 80.0,
            padding_ms: 10.0,
            amplitude: 0.3,
            n_callers: 4,
            dataset_name: "synthetic".into(),
        }
    }
}

impl SyntheticSpec {
    pub fn class_name(&self, class: usize) -> String {
        format!("tone{}", self.tones_hz[class].round() as i64)
    }

    pub fn n_segments(&self) -> usize {
        self.tones_hz.len() * self.count_per_class
    }

    /// Noise standard deviation giving the requested tone-to-noise power ratio.
    pub fn noise_std(&self) -> f64 {
        (self.amplitude * self.amplitude / 2.0 / 10f64.powf(self.snr_db / 10.0)).sqrt()
    }

    fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidSynthetic(m));
        if self.tones_hz.len() < 2 {
            return bad(format!("need at least 2 classes, got {}", self.tones_hz.len()));
        }
        let nyquist = self.sample_rate as f64 / 2.0;
        for (i, &f) in self.tones_hz.iter().enumerate() {
            if !(f > 0.0 && f < nyquist) {
                return bad(format!("tone {f} Hz outside (0, {nyquist})"));
            }
            if self.tones_hz[..i].iter().any(|&g| (g - f).abs() < 1.0) {
                return bad(format!("duplicate tone {f} Hz"));
            }
        }
        if self.count_per_class == 0 || self.n_callers == 0 {
            return bad("count_per_class and n_callers must be positive".into());
        }
        if !(self.min_duration_ms > 0.0 && self.min_duration_ms <= self.max_duration_ms) {
            return bad(format!("duration range {}..{} ms", self.min_duration_ms, self.max_duration_ms));
        }
        if !(self.padding_ms >= 0.0) || !self.snr_db.is_finite() || !(self.amplitude > 0.0 && self.amplitude < 1.0) {
            return bad("padding, snr or amplitude out of range".into());
        }
        Ok(())
    }
}

/// Writes `wav/<id>.wav` for every segment plus `manifest.csv` under `out_dir`.
/// Segment times mark the tone inside the padded file.
pub fn make_synthetic_dataset(spec: &SyntheticSpec, seed: u64, out_dir: &Path) -> Result<Manifest> {
    spec.validate()?;
    let wav_dir = out_dir.join("wav");
    fs::create_dir_all(&wav_dir).map_err(|e| Error::io(&wav_dir, e))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise = Normal::new(0.0, spec.noise_std()).map_err(|e| Error::InvalidSynthetic(e.to_string()))?;
    let sr = spec.sample_rate as f64;
    let pad = (spec.padding_ms * 1e-3 * sr).round() as usize;

    let mut records = Vec::with_capacity(spec.n_segments());
    for (class, &freq) in spec.tones_hz.iter().enumerate() {
        for i in 0..spec.count_per_class {
            let idx = records.len();
            let dur_ms = rng.random_range(spec.min_duration_ms..=spec.max_duration_ms);
            let n_tone = (dur_ms * 1e-3 * sr).round() as usize;
            let phase = rng.random_range(0.0..std::f64::consts::TAU);
            let samples: Vec<f64> = (0..n_tone + 2 * pad)
                .map(|t| {
                    let tone = if (pad..pad + n_tone).contains(&t) {
                        spec.amplitude * (std::f64::consts::TAU * freq * (t - pad) as f64 / sr + phase).sin()
                    } else {
                        0.0
                    };
                    (tone + noise.sample(&mut rng)).clamp(-1.0, 1.0)
                })
                .collect();
            let id = format!("seg{idx:05}");
            let rel = PathBuf::from("wav").join(format!("{id}.wav"));
            write_wav_pcm16(out_dir.join(&rel), &Waveform::new(samples, spec.sample_rate))?;
            let caller = (class + i) % spec.n_callers;
            records.push(SegmentRecord {
                segment_id: id,
                wav_path: rel,
                start_s: pad as f64 / sr,
                end_s: (pad + n_tone) as f64 / sr,
                call_type: Some(spec.class_name(class)),
                caller_id: Some(format!("caller{caller}")),
                sex: Some(if caller % 2 == 0 { "f" } else { "m" }.to_string()),
            });
        }
    }
    let mut manifest = Manifest::new(spec.dataset_name.clone(), records);
    // written before base_dir is set so the stored paths stay relative
    write_manifest(&out_dir.join("manifest.csv"), &manifest)?;
    manifest.base_dir = out_dir.to_path_buf();
    manifest.native_sr = Some(spec.sample_rate);
    Ok(manifest)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SyntheticEmbeddingSpec {
    pub dim: usize,
    pub n_frames: usize,
    /// Layer whose frames carry the labels; every other layer is pure noise.
    pub informative_layer: usize,
    /// Offset added along a label's own dimensions in the informative layer.
    pub separation: f64,
    /// Dimensions owned by each label.
    pub label_width: usize,
}

impl Default for SyntheticEmbeddingSpec {
    fn default() -> Self {
        Self { dim: 80, n_frames: 6, informative_layer: 3, separation: 4.0, label_width: 8 }
    }
}

/// Writes one file per segment and layer. In the informative layer each
/// label of each task owns `label_width` dimensions (CTID labels first, then
/// CLID, then SID) so all three tasks are linearly separable there.
pub fn write_synthetic_embeddings(
    manifest: &Manifest,
    spec: &SyntheticEmbeddingSpec,
    seed: u64,
    dir: &Path,
) -> Result<()> {
    if spec.informative_layer >= N_LAYERS || spec.n_frames == 0 {
        return Err(Error::InvalidSynthetic(format!(
            "informative layer {} / frames {}",
            spec.informative_layer, spec.n_frames
        )));
    }
    let mut offsets = Vec::new();
    let mut next = 0;
    for task in Task::ALL {
        let mut labels: Vec<&str> = manifest.records.iter().filter_map(|r| r.label(task)).collect();
        labels.sort_unstable();
        labels.dedup();
        offsets.push((task, next, labels.iter().map(|s| s.to_string()).collect::<Vec<_>>()));
        next += labels.len() * spec.label_width;
    }
    if next > spec.dim || spec.label_width == 0 {
        return Err(Error::InvalidSynthetic(format!(
            "{next} label dimensions (width {}) do not fit in dim {}",
            spec.label_width, spec.dim
        )));
    }
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0f32, 1.0).unwrap();
    for rec in &manifest.records {
        for layer in 0..N_LAYERS {
            let mut frames: Vec<f32> = (0..spec.n_frames * spec.dim).map(|_| normal.sample(&mut rng)).collect();
            if layer == spec.informative_layer {
                for (task, base, labels) in &offsets {
                    let Some(label) = rec.label(*task) else { continue };
                    let first = base + labels.iter().position(|l| l == label).unwrap() * spec.label_width;
                    for f in 0..spec.n_frames {
                        for d in first..first + spec.label_width {
                            frames[f * spec.dim + d] += spec.separation as f32;
                        }
                    }
                }
            }
            let mut seq = EmbeddingSequence::new(frames, spec.n_frames, spec.dim)?;
            seq.layer_index = Some(layer);
            write_embeddings(&embedding_path(dir, &rec.segment_id, layer), &seq)?;
        }
    }
    Ok(())
}
