//! Frame-level embedding files and statistics pooling.
//!
//! File layout: `EMB1`, `u32` frame count, `u32` dimension (both little
//! endian), then `n_frames * dim` little-endian `f32` values, row-major.
//! Files are named `<segment_id>.layer<k>.emb`.

use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

pub const MAGIC: &[u8; 4] = b"EMB1";
pub const N_LAYERS: usize = 13;
const HEADER_LEN: usize = 12;

/// An `n_frames x dim` matrix of frame embeddings from one layer.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingSequence {
    /// Row-major frames.
    pub frames: Vec<f32>,
    pub n_frames: usize,
    pub dim: usize,
    /// Parsed from the file name when it follows the naming convention.
    pub layer_index: Option<usize>,
}

impl EmbeddingSequence {
    pub fn new(frames: Vec<f32>, n_frames: usize, dim: usize) -> Result<Self> {
        if n_frames == 0 || dim == 0 {
            return Err(Error::EmptySequence);
        }
        if frames.len() != n_frames * dim {
            return Err(Error::LengthMismatch(format!(
                "{} values for a {n_frames}x{dim} sequence",
                frames.len()
            )));
        }
        Ok(Self {
            frames,
            n_frames,
            dim,
            layer_index: None,
        })
    }

    pub fn frame(&self, i: usize) -> &[f32] {
        &self.frames[i * self.dim..(i + 1) * self.dim]
    }
}

/// Per-dimension mean followed by per-dimension population std.
#[derive(Debug, Clone, PartialEq)]
pub struct PooledEmbedding {
    pub vector: Vec<f64>,
    pub source_layer: Option<usize>,
}

impl PooledEmbedding {
    pub fn dim(&self) -> usize {
        self.vector.len() / 2
    }
}

pub fn embedding_path(dir: &Path, segment_id: &str, layer: usize) -> PathBuf {
    dir.join(format!("{segment_id}.layer{layer}.emb"))
}

fn layer_from_name(path: &Path) -> Option<usize> {
    let name = path.file_name()?.to_str()?;
    let stem = name.strip_suffix(".emb")?;
    let (_, k) = stem.rsplit_once(".layer")?;
    k.parse().ok()
}

pub fn load_embeddings(path: &Path) -> Result<EmbeddingSequence> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    if bytes.len() < 4 || &bytes[..4] != MAGIC {
        return Err(Error::BadMagic {
            path: path.to_path_buf(),
            expected: "EMB1",
        });
    }
    if bytes.len() < HEADER_LEN {
        return Err(Error::TruncatedPayload {
            path: path.to_path_buf(),
            expected: HEADER_LEN,
            found: bytes.len(),
        });
    }
    let word = |i: usize| u32::from_le_bytes(bytes[i..i + 4].try_into().unwrap()) as usize;
    let (n_frames, dim) = (word(4), word(8));
    if n_frames == 0 || dim == 0 {
        return Err(Error::EmptySequence);
    }
    let expected = n_frames
        .checked_mul(dim)
        .and_then(|c| c.checked_mul(4))
        .and_then(|c| c.checked_add(HEADER_LEN))
        .ok_or_else(|| Error::TruncatedPayload {
            path: path.to_path_buf(),
            expected: usize::MAX,
            found: bytes.len(),
        })?;
    if bytes.len() != expected {
        return Err(Error::TruncatedPayload {
            path: path.to_path_buf(),
            expected,
            found: bytes.len(),
        });
    }
    let mut frames = Vec::with_capacity(n_frames * dim);
    for (index, chunk) in bytes[HEADER_LEN..].chunks_exact(4).enumerate() {
        let v = f32::from_le_bytes(chunk.try_into().unwrap());
        if !v.is_finite() {
            return Err(Error::NonFiniteValue {
                path: path.to_path_buf(),
                index,
            });
        }
        frames.push(v);
    }
    Ok(EmbeddingSequence {
        frames,
        n_frames,
        dim,
        layer_index: layer_from_name(path),
    })
}

pub fn write_embeddings(path: &Path, seq: &EmbeddingSequence) -> Result<()> {
    let mut out = Vec::with_capacity(HEADER_LEN + seq.frames.len() * 4);
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&(seq.n_frames as u32).to_le_bytes());
    out.extend_from_slice(&(seq.dim as u32).to_le_bytes());
    for v in &seq.frames {
        out.extend_from_slice(&v.to_le_bytes());
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

/// Concatenates the per-dimension mean and population standard deviation
/// over frames.
pub fn pool_stats(e: &EmbeddingSequence) -> Result<PooledEmbedding> {
    if e.n_frames == 0 || e.dim == 0 {
        return Err(Error::EmptySequence);
    }
    let d = e.dim;
    let n = e.n_frames as f64;
    let mut mean = vec![0.0f64; d];
    for i in 0..e.n_frames {
        for (m, &v) in mean.iter_mut().zip(e.frame(i)) {
            *m += v as f64;
        }
    }
    mean.iter_mut().for_each(|m| *m /= n);
    let mut var = vec![0.0f64; d];
    for i in 0..e.n_frames {
        for ((s, &v), m) in var.iter_mut().zip(e.frame(i)).zip(&mean) {
            let c = v as f64 - m;
            *s += c * c;
        }
    }
    let mut vector = mean;
    vector.extend(var.iter().map(|s| (s / n).sqrt()));
    Ok(PooledEmbedding {
        vector,
        source_layer: e.layer_index,
    })
}

/// Loads and pools one layer for each segment. Any missing file aborts, as
/// does a dimension that differs from the first segment's.
pub fn load_pooled_layer(
    dir: &Path,
    segment_ids: &[String],
    layer: usize,
) -> Result<Vec<PooledEmbedding>> {
    let mut out = Vec::with_capacity(segment_ids.len());
    let mut dim = None;
    for id in segment_ids {
        let path = embedding_path(dir, id, layer);
        if !path.exists() {
            return Err(Error::MissingEmbedding {
                segment_id: id.clone(),
                layer,
                path,
            });
        }
        let seq = load_embeddings(&path)?;
        match dim {
            None => dim = Some(seq.dim),
            Some(d) if d != seq.dim => {
                return Err(Error::EmbeddingDimMismatch {
                    expected: d,
                    found: seq.dim,
                    context: path.display().to_string(),
                })
            }
            _ => {}
        }
        let mut pooled = pool_stats(&seq)?;
        pooled.source_layer = Some(layer);
        out.push(pooled);
    }
    Ok(out)
}
