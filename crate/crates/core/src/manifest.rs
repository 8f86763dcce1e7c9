//! Dataset manifests: one CSV row per annotated vocalization.
//!
//! Header: `segment_id,wav_path,start_s,end_s,call_type,caller_id,sex`.
//! Empty label fields mean the label is absent. Relative WAV paths are
//! resolved against the manifest's directory.

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const HEADER: [&str; 7] = [
    "segment_id",
    "wav_path",
    "start_s",
    "end_s",
    "call_type",
    "caller_id",
    "sex",
];

/// Labels dropped at load time (compared case-insensitively).
const DISCARDED_CALL_TYPES: [&str; 2] = ["silence", "noise"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Task {
    /// Call type.
    #[serde(rename = "CTID")]
    Ctid,
    /// Caller identity.
    #[serde(rename = "CLID")]
    Clid,
    /// Caller sex.
    #[serde(rename = "SID")]
    Sid,
}

impl Task {
    pub const ALL: [Task; 3] = [Task::Ctid, Task::Clid, Task::Sid];

    pub fn as_str(self) -> &'static str {
        match self {
            Task::Ctid => "CTID",
            Task::Clid => "CLID",
            Task::Sid => "SID",
        }
    }
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Task {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "CTID" => Ok(Task::Ctid),
            "CLID" => Ok(Task::Clid),
            "SID" => Ok(Task::Sid),
            _ => Err(Error::Config(format!("unknown task {s:?} (expected CTID, CLID or SID)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SegmentRecord {
    pub segment_id: String,
    /// As written in the manifest; see [`Manifest::resolve_wav`].
    pub wav_path: PathBuf,
    pub start_s: f64,
    pub end_s: f64,
    pub call_type: Option<String>,
    pub caller_id: Option<String>,
    pub sex: Option<String>,
}

impl SegmentRecord {
    pub fn label(&self, task: Task) -> Option<&str> {
        match task {
            Task::Ctid => self.call_type.as_deref(),
            Task::Clid => self.caller_id.as_deref(),
            Task::Sid => self.sex.as_deref(),
        }
    }

    pub fn duration_s(&self) -> f64 {
        self.end_s - self.start_s
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Manifest {
    pub records: Vec<SegmentRecord>,
    pub dataset_name: String,
    /// Native sampling rate, when known (see [`Manifest::probe_native_sr`]).
    pub native_sr: Option<u32>,
    /// Directory that relative WAV paths are resolved against.
    pub base_dir: PathBuf,
    /// Number of silence/noise rows dropped at load time.
    pub dropped: usize,
}

impl Manifest {
    pub fn new(dataset_name: impl Into<String>, records: Vec<SegmentRecord>) -> Self {
        Self {
            records,
            dataset_name: dataset_name.into(),
            native_sr: None,
            base_dir: PathBuf::new(),
            dropped: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn resolve_wav(&self, rec: &SegmentRecord) -> PathBuf {
        if rec.wav_path.is_absolute() {
            rec.wav_path.clone()
        } else {
            self.base_dir.join(&rec.wav_path)
        }
    }

    /// Copy of this manifest restricted to `records`, keeping metadata.
    pub fn with_records(&self, records: Vec<SegmentRecord>) -> Self {
        Self {
            records,
            dataset_name: self.dataset_name.clone(),
            native_sr: self.native_sr,
            base_dir: self.base_dir.clone(),
            dropped: 0,
        }
    }

    /// Records carrying a label for `task`.
    pub fn labeled_for(&self, task: Task) -> Self {
        self.with_records(
            self.records
                .iter()
                .filter(|r| r.label(task).is_some())
                .cloned()
                .collect(),
        )
    }

    /// Reads the sampling rate from the first record's WAV header.
    pub fn probe_native_sr(&mut self) -> Result<u32> {
        let rec = self.records.first().ok_or(Error::EmptyManifest)?;
        let path = self.resolve_wav(rec);
        let reader = hound::WavReader::open(&path).map_err(|e| Error::Wav {
            path: path.clone(),
            reason: e.to_string(),
        })?;
        let sr = reader.spec().sample_rate;
        self.native_sr = Some(sr);
        Ok(sr)
    }
}

fn parse_time(field: &str, what: &str, path: &Path, row: usize) -> Result<f64> {
    let v: f64 = field.trim().parse().map_err(|_| Error::ManifestRow {
        path: path.to_path_buf(),
        row,
        reason: format!("{what} {field:?} is not a number"),
    })?;
    if !v.is_finite() || v < 0.0 {
        return Err(Error::ManifestRow {
            path: path.to_path_buf(),
            row,
            reason: format!("{what} {field:?} must be a finite non-negative time"),
        });
    }
    Ok(v)
}

fn optional(field: &str) -> Option<String> {
    let t = field.trim();
    (!t.is_empty()).then(|| t.to_string())
}

pub fn load_manifest(path: &Path) -> Result<Manifest> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::Headers)
        .from_path(path)
        .map_err(|e| Error::Manifest {
            path: path.to_path_buf(),
            reason: e.to_string(),
        })?;
    let headers = reader
        .headers()
        .map_err(|e| Error::Manifest {
            path: path.to_path_buf(),
            reason: e.to_string(),
        })?
        .clone();
    let mut col = [0usize; 7];
    for (slot, name) in col.iter_mut().zip(HEADER) {
        *slot = headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::Manifest {
                path: path.to_path_buf(),
                reason: format!("missing column {name:?}"),
            })?;
    }

    let mut records = Vec::new();
    let mut seen = HashSet::new();
    let mut dropped = 0;
    for (i, row) in reader.records().enumerate() {
        // header is line 1
        let row_no = i + 2;
        let row = row.map_err(|e| Error::ManifestRow {
            path: path.to_path_buf(),
            row: row_no,
            reason: e.to_string(),
        })?;
        let get = |k: usize| row.get(col[k]).unwrap_or("");
        let segment_id = get(0).trim().to_string();
        if segment_id.is_empty() {
            return Err(Error::ManifestRow {
                path: path.to_path_buf(),
                row: row_no,
                reason: "empty segment_id".into(),
            });
        }
        let start_s = parse_time(get(2), "start_s", path, row_no)?;
        let end_s = parse_time(get(3), "end_s", path, row_no)?;
        if end_s <= start_s {
            return Err(Error::ManifestRow {
                path: path.to_path_buf(),
                row: row_no,
                reason: format!("end_s {end_s} is not after start_s {start_s}"),
            });
        }
        if !seen.insert(segment_id.clone()) {
            return Err(Error::ManifestRow {
                path: path.to_path_buf(),
                row: row_no,
                reason: format!("duplicate segment_id {segment_id:?}"),
            });
        }
        let call_type = optional(get(4));
        if let Some(ct) = &call_type {
            if DISCARDED_CALL_TYPES.iter().any(|d| ct.eq_ignore_ascii_case(d)) {
                dropped += 1;
                continue;
            }
        }
        records.push(SegmentRecord {
            segment_id,
            wav_path: PathBuf::from(get(1).trim()),
            start_s,
            end_s,
            call_type,
            caller_id: optional(get(5)),
            sex: optional(get(6)),
        });
    }
    if dropped > 0 {
        log::info!("{}: dropped {dropped} silence/noise rows", path.display());
    }
    let dataset_name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    Ok(Manifest {
        records,
        dataset_name,
        native_sr: None,
        // absolute so manifests written from this one resolve from any directory
        base_dir: std::path::absolute(match path.parent() {
            Some(p) if !p.as_os_str().is_empty() => p,
            _ => Path::new("."),
        })
        .map_err(|e| Error::io(path, e))?,
        dropped,
    })
}

/// Writes `manifest` in the loadable CSV format. WAV paths are written
/// resolved, so the file can live in a different directory.
pub fn write_manifest(path: &Path, manifest: &Manifest) -> Result<()> {
    let csv_err = |e: csv::Error| Error::Manifest {
        path: path.to_path_buf(),
        reason: e.to_string(),
    };
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    w.write_record(HEADER).map_err(csv_err)?;
    for r in &manifest.records {
        let wav = manifest.resolve_wav(r);
        w.write_record([
            r.segment_id.as_str(),
            &wav.to_string_lossy(),
            &r.start_s.to_string(),
            &r.end_s.to_string(),
            r.call_type.as_deref().unwrap_or(""),
            r.caller_id.as_deref().unwrap_or(""),
            r.sex.as_deref().unwrap_or(""),
        ])
        .map_err(csv_err)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Sorted class labels of one task; a label's index is its rank.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaskLabelSpace {
    pub task: Task,
    pub classes: Vec<String>,
}

impl TaskLabelSpace {
    pub fn n_classes(&self) -> usize {
        self.classes.len()
    }

    pub fn index(&self, label: &str) -> Option<usize> {
        self.classes.binary_search_by(|c| c.as_str().cmp(label)).ok()
    }

    pub fn label(&self, index: usize) -> &str {
        &self.classes[index]
    }
}

pub fn build_label_space(manifest: &Manifest, task: Task) -> Result<TaskLabelSpace> {
    let classes: BTreeSet<&str> = manifest.records.iter().filter_map(|r| r.label(task)).collect();
    if classes.len() < 2 {
        return Err(Error::InsufficientClasses {
            task: task.to_string(),
            found: classes.len(),
        });
    }
    Ok(TaskLabelSpace {
        task,
        classes: classes.into_iter().map(String::from).collect(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DurationStats {
    pub median_ms: f64,
    pub total_minutes: f64,
    pub count: usize,
}

pub fn duration_stats(manifest: &Manifest) -> Result<DurationStats> {
    if manifest.is_empty() {
        return Err(Error::EmptyManifest);
    }
    let mut d: Vec<f64> = manifest.records.iter().map(|r| r.duration_s()).collect();
    d.sort_by(f64::total_cmp);
    let n = d.len();
    let median = if n % 2 == 1 {
        d[n / 2]
    } else {
        0.5 * (d[n / 2 - 1] + d[n / 2])
    };
    Ok(DurationStats {
        median_ms: median * 1000.0,
        total_minutes: d.iter().sum::<f64>() / 60.0,
        count: n,
    })
}
