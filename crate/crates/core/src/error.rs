use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Coarse grouping used to pick a process exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorCategory {
    /// Bad or missing input data (manifests, audio, embeddings, labels).
    Data,
    /// Numerical failure during training or analysis.
    Numeric,
    /// Filesystem or serialization failure.
    Io,
    /// Invalid configuration or arguments.
    Config,
}

impl ErrorCategory {
    pub fn exit_code(self) -> i32 {
        match self {
            ErrorCategory::Data => 3,
            ErrorCategory::Numeric => 4,
            ErrorCategory::Io => 5,
            ErrorCategory::Config => 6,
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("cannot read WAV {path}: {reason}")]
    Wav { path: PathBuf, reason: String },

    #[error("unsupported audio encoding in {path}: {detail}")]
    UnsupportedEncoding { path: PathBuf, detail: String },

    #[error("audio file {0} contains no samples")]
    EmptyAudio(PathBuf),

    #[error("resampling from {from} Hz to {to} Hz is not supported (downsampling only)")]
    UnsupportedUpsample { from: u32, to: u32 },

    #[error("invalid resampler configuration: {0}")]
    InvalidResampleSpec(String),

    #[error("cannot resample a waveform of {0} sample(s)")]
    DegenerateInput(usize),

    #[error("slice [{start_s}, {end_s}] s is outside the waveform (duration {duration_s} s)")]
    SliceOutOfRange {
        start_s: f64,
        end_s: f64,
        duration_s: f64,
    },

    #[error("inverted interval: start {start_s} s is not before end {end_s} s")]
    InvertedInterval { start_s: f64, end_s: f64 },

    #[error("series too short: {len} samples, at least {min} required")]
    SeriesTooShort { len: usize, min: usize },

    #[error("non-finite sample at index {0}")]
    NonFiniteInput(usize),

    #[error("bad magic in {path}: expected {expected:?}")]
    BadMagic { path: PathBuf, expected: &'static str },

    #[error("truncated payload in {path}: expected {expected} bytes, found {found}")]
    TruncatedPayload {
        path: PathBuf,
        expected: usize,
        found: usize,
    },

    #[error("non-finite value in {path} at element {index}")]
    NonFiniteValue { path: PathBuf, index: usize },

    #[error("empty embedding sequence")]
    EmptySequence,

    #[error("missing embedding for segment {segment_id} layer {layer}: {path}")]
    MissingEmbedding {
        segment_id: String,
        layer: usize,
        path: PathBuf,
    },

    #[error("embedding dimension mismatch: expected {expected}, found {found} ({context})")]
    EmbeddingDimMismatch {
        expected: usize,
        found: usize,
        context: String,
    },

    #[error("manifest {path}: {reason}")]
    Manifest { path: PathBuf, reason: String },

    #[error("manifest {path} row {row}: {reason}")]
    ManifestRow {
        path: PathBuf,
        row: usize,
        reason: String,
    },

    #[error("insufficient classes for task {task}: found {found}, need at least 2")]
    InsufficientClasses { task: String, found: usize },

    #[error("empty manifest")]
    EmptyManifest,

    #[error("class {class:?} has {count} segment(s); at least 3 are needed to stratify")]
    ClassTooSmall { class: String, count: usize },

    #[error("class {class:?} is absent from the {split} split")]
    ClassAbsentFromSplit { class: String, split: &'static str },

    #[error("label {label} out of range for {n_classes} classes")]
    LabelOutOfRange { label: usize, n_classes: usize },

    #[error("length mismatch: {0}")]
    LengthMismatch(String),

    #[error("class {0} has no test items; UAR is undefined")]
    EmptyClassRow(usize),

    #[error("chance level needs at least 2 classes, got {0}")]
    TooFewClasses(usize),

    #[error("invalid model specification: {0}")]
    InvalidSpec(String),

    #[error("input dimension mismatch: model expects {expected}, got {found}")]
    DimMismatch { expected: usize, found: usize },

    #[error("non-finite activation in layer {layer}")]
    NonFiniteActivation { layer: usize },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("training diverged at epoch {epoch}: loss {loss}")]
    Diverged { epoch: usize, loss: f64 },

    #[error("empty dataset: {0}")]
    EmptyDataset(&'static str),

    #[error("filter {0} has zero energy")]
    ZeroEnergyFilter(usize),

    #[error("empty filter")]
    EmptyFilter,

    #[error("filter of {taps} taps exceeds the {n_dft}-point DFT")]
    FilterTooLong { taps: usize, n_dft: usize },

    #[error("layer matrix needs at least 2 layers per row, got {0}")]
    TooFewLayers(usize),

    #[error("pooling over an empty feature map")]
    EmptyFeatureMap,

    #[error("conflicting results for {0}")]
    ConflictingResults(String),

    #[error("invalid synthetic dataset specification: {0}")]
    InvalidSynthetic(String),

    #[error("checkpoint {path}: {reason}")]
    Checkpoint { path: PathBuf, reason: String },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{0}")]
    Serialization(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn category(&self) -> ErrorCategory {
        use Error::*;
        match self {
            Io { .. } | Serialization(_) | Checkpoint { .. } => ErrorCategory::Io,
            NonFiniteActivation { .. } | Diverged { .. } | ZeroEnergyFilter(_) => {
                ErrorCategory::Numeric
            }
            Config(_) | InvalidResampleSpec(_) | InvalidSpec(_) | InvalidSynthetic(_) => {
                ErrorCategory::Config
            }
            _ => ErrorCategory::Data,
        }
    }
}
