//! Config-driven experiment runs: split, materialise features, train,
//! evaluate, and write the artifacts of one cell of the results matrix.
//!
//! A config is one TOML file:
//!
//! ```toml
//! dataset_manifest = "data/manifest.csv"   # relative to the config file
//! dataset = "D1"                           # optional, defaults to the manifest's stem
//! task = "CTID"                            # CTID | CLID | SID
//! feature = "E2E"                          # C22 | WLM | E2E
//! sample_rate = 44100
//! wlm_layer = 6                            # WLM only, 0..=12
//! embeddings_dir = "emb"                   # WLM only
//! seed = 1
//! output_dir = "runs/d1_e2e_44k"
//! shuffle_labels = false                   # optional label-permutation control
//!
//! [train]                                  # optional, overrides the feature's preset
//! max_epochs = 50
//! ```

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::analysis::{normalize_layer_matrix, LayerMatrix};
use crate::audio::{read_wav, resample, slice_segment, ResampleSpec, Waveform};
use crate::catch24::{compute_catch24, FeatureVector, FEATURE_NAMES};
use crate::embeddings::{load_pooled_layer, N_LAYERS};
use crate::error::{Error, Result};
use crate::eval::{split_dataset, EvalReport, SplitSet};
use crate::manifest::{build_label_space, load_manifest, Manifest, Task, TaskLabelSpace};
use crate::nnet::{
    load_checkpoint, save_checkpoint, train, write_history_csv, CnnSpec, LinearProbeSpec, MlpSpec, Model, ModelSpec,
    Samples, Standardizer, TrainConfig,
};

/// Embedding models expect 16 kHz input.
pub const WLM_SAMPLE_RATE: u32 = 16_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum FeatureKind {
    C22,
    WLM,
    E2E,
}

impl std::fmt::Display for FeatureKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            FeatureKind::C22 => "C22",
            FeatureKind::WLM => "WLM",
            FeatureKind::E2E => "E2E",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub dataset_manifest: PathBuf,
    #[serde(default)]
    pub dataset: Option<String>,
    pub task: Task,
    pub feature: FeatureKind,
    pub sample_rate: u32,
    #[serde(default)]
    pub wlm_layer: Option<usize>,
    #[serde(default)]
    pub embeddings_dir: Option<PathBuf>,
    pub train: TrainConfig,
    pub seed: u64,
    pub output_dir: PathBuf,
    #[serde(default)]
    pub shuffle_labels: bool,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    dataset_manifest: PathBuf,
    dataset: Option<String>,
    task: Task,
    feature: FeatureKind,
    sample_rate: u32,
    wlm_layer: Option<usize>,
    embeddings_dir: Option<PathBuf>,
    train: Option<toml::Table>,
    seed: u64,
    output_dir: PathBuf,
    #[serde(default)]
    shuffle_labels: bool,
}

/// Training preset of a feature type.
pub fn train_preset(feature: FeatureKind) -> TrainConfig {
    match feature {
        FeatureKind::E2E => TrainConfig::e2e(),
        _ => TrainConfig::mlp(),
    }
}

fn rebase(base: &Path, p: PathBuf) -> PathBuf {
    if p.is_absolute() {
        p
    } else {
        base.join(p)
    }
}

impl ExperimentConfig {
    /// Config with the feature's training preset.
    pub fn new(manifest: impl Into<PathBuf>, task: Task, feature: FeatureKind, sample_rate: u32, seed: u64, output_dir: impl Into<PathBuf>) -> Self {
        Self {
            dataset_manifest: manifest.into(),
            dataset: None,
            task,
            feature,
            sample_rate,
            wlm_layer: None,
            embeddings_dir: None,
            train: train_preset(feature),
            seed,
            output_dir: output_dir.into(),
            shuffle_labels: false,
        }
    }

    /// Parses TOML. Relative paths are taken relative to `base_dir`, and the
    /// `[train]` table is layered over the feature's preset.
    pub fn from_toml_str(text: &str, base_dir: &Path) -> Result<Self> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        let mut train = toml::Table::try_from(train_preset(raw.feature)).map_err(|e| Error::Config(e.to_string()))?;
        if let Some(overrides) = raw.train {
            for (k, v) in overrides {
                if !train.contains_key(&k) {
                    return Err(Error::Config(format!("unknown train key `{k}`")));
                }
                train.insert(k, v);
            }
        }
        let cfg = Self {
            dataset_manifest: rebase(base_dir, raw.dataset_manifest),
            dataset: raw.dataset,
            task: raw.task,
            feature: raw.feature,
            sample_rate: raw.sample_rate,
            wlm_layer: raw.wlm_layer,
            embeddings_dir: raw.embeddings_dir.map(|p| rebase(base_dir, p)),
            train: train.try_into().map_err(|e: toml::de::Error| Error::Config(e.to_string()))?,
            seed: raw.seed,
            output_dir: rebase(base_dir, raw.output_dir),
            shuffle_labels: raw.shuffle_labels,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text, path.parent().unwrap_or(Path::new(".")))
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Serialization(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        if self.sample_rate == 0 {
            return Err(Error::Config("sample_rate must be positive".into()));
        }
        if self.feature == FeatureKind::WLM {
            match self.wlm_layer {
                Some(l) if l < N_LAYERS => {}
                other => return Err(Error::Config(format!("WLM needs wlm_layer in 0..{N_LAYERS}, got {other:?}"))),
            }
            if self.embeddings_dir.is_none() {
                return Err(Error::Config("WLM needs embeddings_dir".into()));
            }
            if self.sample_rate != WLM_SAMPLE_RATE {
                return Err(Error::Config(format!("WLM runs at {WLM_SAMPLE_RATE} Hz, got {}", self.sample_rate)));
            }
        }
        Ok(())
    }
}

/// Everything that identifies and scores one run. Serialised as
/// `report.json`; contains no timing so reruns are byte-identical.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub dataset: String,
    pub task: Task,
    pub feature: FeatureKind,
    pub sample_rate: u32,
    pub wlm_layer: Option<usize>,
    pub seed: u64,
    pub shuffle_labels: bool,
    pub classes: Vec<String>,
    /// Segments in train, val and test.
    pub split_sizes: [usize; 3],
    pub epochs_run: usize,
    pub best_epoch: usize,
    pub eval: EvalReport,
}

impl ExperimentReport {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::Serialization(format!("{}: {e}", path.display())))
    }

    /// Column label of the results table, e.g. `WLM-L6`.
    pub fn feature_label(&self) -> String {
        match self.wlm_layer {
            Some(l) if self.feature == FeatureKind::WLM => format!("WLM-L{l}"),
            _ => self.feature.to_string(),
        }
    }
}

pub struct ExperimentOutput {
    pub report: ExperimentReport,
    pub model: Model<f32>,
    pub standardizer: Option<Standardizer>,
    pub report_path: PathBuf,
}

/// Waveforms of `records` at `sample_rate`. Each source file is read and
/// resampled once, then sliced.
pub fn load_segments(manifest: &Manifest, sample_rate: u32) -> Result<Vec<Waveform>> {
    let mut cache: HashMap<PathBuf, Waveform> = HashMap::new();
    let mut out = Vec::with_capacity(manifest.len());
    for rec in &manifest.records {
        let path = manifest.resolve_wav(rec);
        if !cache.contains_key(&path) {
            let w = read_wav(&path)?;
            let w = resample(&w, &ResampleSpec::new(sample_rate))?;
            cache.insert(path.clone(), w);
        }
        out.push(slice_segment(&cache[&path], rec.start_s, rec.end_s)?);
    }
    Ok(out)
}

/// catch24 vectors of every segment, in manifest order.
pub fn extract_features(manifest: &Manifest, sample_rate: u32) -> Result<Vec<FeatureVector>> {
    load_segments(manifest, sample_rate)?.iter().map(compute_catch24).collect()
}

/// `segment_id`, the 24 feature columns, then the undefined-value mask.
pub fn write_features_csv(path: &Path, manifest: &Manifest, features: &[FeatureVector]) -> Result<()> {
    let mut out = String::from("segment_id");
    for name in FEATURE_NAMES {
        write!(out, ",{name}").unwrap();
    }
    out.push_str(",nan_mask\n");
    for (rec, f) in manifest.records.iter().zip(features) {
        out.push_str(&rec.segment_id);
        for v in &f.values {
            write!(out, ",{v}").unwrap();
        }
        writeln!(out, ",{}", f.mask_bits()).unwrap();
    }
    write_text(path, &out)
}

fn write_text(path: &Path, body: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    fs::write(path, body).map_err(|e| Error::io(path, e))
}

fn labels_of(part: &Manifest, space: &TaskLabelSpace) -> Vec<usize> {
    part.records.iter().map(|r| space.index(r.label(space.task).unwrap()).unwrap()).collect()
}

/// Raw model inputs of one split: feature vectors (unstandardised) or waveforms.
fn materialize(cfg: &ExperimentConfig, part: &Manifest) -> Result<Vec<Vec<f64>>> {
    match cfg.feature {
        FeatureKind::C22 => Ok(extract_features(part, cfg.sample_rate)?.into_iter().map(|f| f.values).collect()),
        FeatureKind::E2E => Ok(load_segments(part, cfg.sample_rate)?.into_iter().map(|w| w.samples).collect()),
        FeatureKind::WLM => {
            let ids: Vec<String> = part.records.iter().map(|r| r.segment_id.clone()).collect();
            let dir = cfg.embeddings_dir.as_deref().unwrap();
            Ok(load_pooled_layer(dir, &ids, cfg.wlm_layer.unwrap())?.into_iter().map(|p| p.vector).collect())
        }
    }
}

fn dataset_name(cfg: &ExperimentConfig, manifest: &Manifest) -> String {
    cfg.dataset.clone().unwrap_or_else(|| manifest.dataset_name.clone())
}

/// Fits the train-split standardiser for vector features.
fn prepare_inputs(cfg: &ExperimentConfig, raw: [Vec<Vec<f64>>; 3]) -> Result<([Vec<Vec<f32>>; 3], Option<Standardizer>)> {
    if cfg.feature == FeatureKind::E2E {
        let cast = |rows: Vec<Vec<f64>>| rows.into_iter().map(|r| r.into_iter().map(|v| v as f32).collect()).collect();
        let [a, b, c] = raw;
        return Ok(([cast(a), cast(b), cast(c)], None));
    }
    let std = Standardizer::fit(&raw[0])?;
    let apply = |rows: &[Vec<f64>]| rows.iter().map(|r| std.apply_as::<f32>(r)).collect::<Vec<_>>();
    Ok(([apply(&raw[0]), apply(&raw[1]), apply(&raw[2])], Some(std)))
}

fn model_spec(cfg: &ExperimentConfig, input_dim: usize, n_classes: usize) -> ModelSpec {
    match cfg.feature {
        FeatureKind::E2E => ModelSpec::Cnn(CnnSpec::reference(cfg.sample_rate, n_classes)),
        _ => ModelSpec::Mlp(MlpSpec::reference(input_dim, n_classes)),
    }
}

/// Split, materialise, train and evaluate; writes `report.json`,
/// `model.mkm`, `history.csv`, the split manifests and `config.toml`
/// under the output directory.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    cfg.validate()?;
    let manifest = load_manifest(&cfg.dataset_manifest)?;
    let space = build_label_space(&manifest.labeled_for(cfg.task), cfg.task)?;
    let split = split_dataset(&manifest, cfg.task, cfg.seed)?;
    log::info!(
        "{} {} {} @ {} Hz: {} / {} / {} segments, {} classes",
        dataset_name(cfg, &manifest),
        cfg.task,
        cfg.feature,
        cfg.sample_rate,
        split.train.len(),
        split.val.len(),
        split.test.len(),
        space.n_classes()
    );
    let out = &cfg.output_dir;
    fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;
    split.write(&out.join("split"))?;
    write_text(&out.join("config.toml"), &cfg.to_toml_string()?)?;

    let raw = [materialize(cfg, &split.train)?, materialize(cfg, &split.val)?, materialize(cfg, &split.test)?];
    let ([x_train, x_val, x_test], standardizer) = prepare_inputs(cfg, raw)?;
    let mut y = [labels_of(&split.train, &space), labels_of(&split.val, &space), labels_of(&split.test, &space)];
    if cfg.shuffle_labels {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x5eed_5eed);
        y[0].shuffle(&mut rng);
        y[1].shuffle(&mut rng);
    }
    let [y_train, y_val, y_test] = y;

    let input_dim = x_train.first().map_or(0, Vec::len);
    let spec = model_spec(cfg, input_dim, space.n_classes());
    let model = Model::<f32>::init(&spec, cfg.seed)?;
    let tcfg = TrainConfig { seed: cfg.seed, ..cfg.train.clone() };
    let trained = train(model, &Samples::new(x_train, y_train)?, &Samples::new(x_val, y_val)?, &tcfg)?;

    let preds = trained.model.predict_batch(&x_test)?;
    let eval = EvalReport::from_predictions(&preds, &y_test, space.n_classes())?;
    log::info!("test UAR {:.2} (chance {:.2})", eval.uar, eval.chance);

    let report = ExperimentReport {
        dataset: dataset_name(cfg, &manifest),
        task: cfg.task,
        feature: cfg.feature,
        sample_rate: cfg.sample_rate,
        wlm_layer: cfg.wlm_layer.filter(|_| cfg.feature == FeatureKind::WLM),
        seed: cfg.seed,
        shuffle_labels: cfg.shuffle_labels,
        classes: space.classes.clone(),
        split_sizes: [split.train.len(), split.val.len(), split.test.len()],
        epochs_run: trained.history.len(),
        best_epoch: trained.best_epoch,
        eval,
    };
    let report_path = out.join("report.json");
    write_text(&report_path, &to_json(&report)?)?;
    save_checkpoint(&out.join("model.mkm"), &trained.model, standardizer.as_ref())?;
    write_history_csv(&out.join("history.csv"), &trained.history)?;
    Ok(ExperimentOutput { report, model: trained.model, standardizer, report_path })
}

fn to_json<S: Serialize>(v: &S) -> Result<String> {
    serde_json::to_string_pretty(v).map(|s| s + "\n").map_err(|e| Error::Serialization(e.to_string()))
}

/// Scores a saved model on `segments`, whose labels come from the config's
/// full label space.
pub fn evaluate_checkpoint(cfg: &ExperimentConfig, checkpoint: &Path, segments: &Manifest) -> Result<EvalReport> {
    let manifest = load_manifest(&cfg.dataset_manifest)?;
    let space = build_label_space(&manifest.labeled_for(cfg.task), cfg.task)?;
    let (model, standardizer) = load_checkpoint::<f32>(checkpoint)?;
    if model.spec.n_classes() != space.n_classes() {
        return Err(Error::DimMismatch { expected: space.n_classes(), found: model.spec.n_classes() });
    }
    let part = segments.labeled_for(cfg.task);
    let mut y = Vec::with_capacity(part.len());
    for r in &part.records {
        let label = r.label(cfg.task).unwrap();
        y.push(space.index(label).ok_or_else(|| Error::Config(format!("label `{label}` not in the training label space")))?);
    }
    let raw = materialize(cfg, &part)?;
    let x: Vec<Vec<f32>> = match &standardizer {
        Some(s) => raw.iter().map(|r| s.apply_as(r)).collect(),
        None => raw.into_iter().map(|r| r.into_iter().map(|v| v as f32).collect()).collect(),
    };
    let preds = model.predict_batch(&x)?;
    EvalReport::from_predictions(&preds, &y, space.n_classes())
}

/// Writes the train/val/test manifests of the configured split.
pub fn split_only(cfg: &ExperimentConfig) -> Result<SplitSet> {
    let manifest = load_manifest(&cfg.dataset_manifest)?;
    let split = split_dataset(&manifest, cfg.task, cfg.seed)?;
    split.write(&cfg.output_dir.join("split"))?;
    Ok(split)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeConfig {
    pub dataset_manifest: PathBuf,
    pub embeddings_dir: PathBuf,
    #[serde(default = "all_tasks")]
    pub tasks: Vec<Task>,
    #[serde(default)]
    pub train: TrainConfig,
    pub seed: u64,
    pub output_dir: PathBuf,
}

fn all_tasks() -> Vec<Task> {
    Task::ALL.to_vec()
}

impl ProbeConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg: Self = toml::from_str(&text).map_err(|e| Error::Config(e.to_string()))?;
        let base = path.parent().unwrap_or(Path::new("."));
        cfg.dataset_manifest = rebase(base, cfg.dataset_manifest);
        cfg.embeddings_dir = rebase(base, cfg.embeddings_dir);
        cfg.output_dir = rebase(base, cfg.output_dir);
        Ok(cfg)
    }
}

/// Test UAR of a linear probe trained on standardised pooled embeddings.
pub fn probe_uar(split: &SplitSet, space: &TaskLabelSpace, dir: &Path, layer: usize, train_cfg: &TrainConfig) -> Result<f64> {
    let load = |m: &Manifest| -> Result<Vec<Vec<f64>>> {
        let ids: Vec<String> = m.records.iter().map(|r| r.segment_id.clone()).collect();
        Ok(load_pooled_layer(dir, &ids, layer)?.into_iter().map(|p| p.vector).collect())
    };
    let raw = [load(&split.train)?, load(&split.val)?, load(&split.test)?];
    let std = Standardizer::fit(&raw[0])?;
    let x: Vec<Vec<Vec<f32>>> = raw.iter().map(|rows| rows.iter().map(|r| std.apply_as(r)).collect()).collect();
    let spec = ModelSpec::Linear(LinearProbeSpec { input_dim: raw[0][0].len(), n_classes: space.n_classes() });
    let model = Model::<f32>::init(&spec, train_cfg.seed)?;
    let trained = train(
        model,
        &Samples::new(x[0].clone(), labels_of(&split.train, space))?,
        &Samples::new(x[1].clone(), labels_of(&split.val, space))?,
        train_cfg,
    )?;
    let preds = trained.model.predict_batch(&x[2])?;
    Ok(EvalReport::from_predictions(&preds, &labels_of(&split.test, space), space.n_classes())?.uar)
}

/// One linear probe per task and layer; returns the per-task normalised
/// matrix and writes it as `layers.csv` and `layers.json`.
pub fn probe_layers(cfg: &ProbeConfig) -> Result<LayerMatrix> {
    let manifest = load_manifest(&cfg.dataset_manifest)?;
    let train_cfg = TrainConfig { seed: cfg.seed, ..cfg.train.clone() };
    let mut rows = Vec::new();
    for &task in &cfg.tasks {
        let space = build_label_space(&manifest.labeled_for(task), task)?;
        let split = split_dataset(&manifest, task, cfg.seed)?;
        let mut row = Vec::with_capacity(N_LAYERS);
        for layer in 0..N_LAYERS {
            let uar = probe_uar(&split, &space, &cfg.embeddings_dir, layer, &train_cfg)?;
            log::info!("{task} layer {layer}: UAR {uar:.2}");
            row.push(uar);
        }
        rows.push(row);
    }
    let m = normalize_layer_matrix(cfg.tasks.iter().map(|t| t.to_string()).collect(), rows)?;
    crate::analysis::write_layer_matrix_csv(&cfg.output_dir.join("layers.csv"), &m)?;
    write_text(&cfg.output_dir.join("layers.json"), &to_json(&m)?)?;
    Ok(m)
}

/// One row of the results table: a dataset, feature and sampling rate,
/// with a UAR per task where a report exists.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultsRow {
    pub dataset: String,
    pub feature: String,
    pub sample_rate: u32,
    pub uar: BTreeMap<Task, f64>,
    pub best: BTreeMap<Task, bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultsTable {
    pub rows: Vec<ResultsRow>,
}

impl ResultsTable {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("dataset,feature,sample_rate");
        for t in Task::ALL {
            write!(out, ",{t},{t}_best").unwrap();
        }
        out.push('\n');
        for r in &self.rows {
            write!(out, "{},{},{}", r.dataset, r.feature, r.sample_rate).unwrap();
            for t in Task::ALL {
                match r.uar.get(&t) {
                    Some(u) => write!(out, ",{u:.2},{}", r.best[&t]).unwrap(),
                    None => out.push_str(",N/A,false"),
                }
            }
            out.push('\n');
        }
        out
    }

    /// Aligned columns; the best score per dataset and task carries a `*`.
    pub fn to_text(&self) -> String {
        let mut cells = vec![["dataset", "feature", "SR"].map(String::from).to_vec()];
        cells[0].extend(Task::ALL.iter().map(|t| t.to_string()));
        for r in &self.rows {
            let mut line = vec![r.dataset.clone(), r.feature.clone(), format!("{}k", r.sample_rate as f64 / 1000.0)];
            for t in Task::ALL {
                line.push(match r.uar.get(&t) {
                    Some(u) if r.best[&t] => format!("{u:.2}*"),
                    Some(u) => format!("{u:.2}"),
                    None => "N/A".into(),
                });
            }
            cells.push(line);
        }
        let widths: Vec<usize> = (0..cells[0].len()).map(|c| cells.iter().map(|l| l[c].len()).max().unwrap()).collect();
        let mut out = String::new();
        for line in &cells {
            let padded: Vec<String> = line.iter().zip(&widths).map(|(s, w)| format!("{s:<w$}")).collect();
            out.push_str(padded.join("  ").trim_end());
            out.push('\n');
        }
        out
    }
}

/// Groups reports by dataset, feature and sampling rate and flags the best
/// score per dataset and task. Two reports for the same cell with different
/// scores are rejected.
pub fn build_results_table(reports: &[ExperimentReport]) -> Result<ResultsTable> {
    if reports.is_empty() {
        return Err(Error::EmptyDataset("report list"));
    }
    let mut cells: BTreeMap<(String, String, u32), BTreeMap<Task, f64>> = BTreeMap::new();
    for r in reports {
        let key = (r.dataset.clone(), r.feature_label(), r.sample_rate);
        let row = cells.entry(key.clone()).or_default();
        match row.get(&r.task) {
            Some(&u) if u != r.eval.uar => {
                return Err(Error::ConflictingResults(format!(
                    "{} / {} / {} Hz / {}: {u} vs {}",
                    key.0, key.1, key.2, r.task, r.eval.uar
                )))
            }
            _ => {
                row.insert(r.task, r.eval.uar);
            }
        }
    }
    let mut best_of: BTreeMap<(&str, Task), f64> = BTreeMap::new();
    for ((dataset, _, _), row) in &cells {
        for (&t, &u) in row {
            let b = best_of.entry((dataset.as_str(), t)).or_insert(f64::NEG_INFINITY);
            *b = b.max(u);
        }
    }
    let rows = cells
        .iter()
        .map(|((dataset, feature, sr), uar)| ResultsRow {
            dataset: dataset.clone(),
            feature: feature.clone(),
            sample_rate: *sr,
            best: uar.iter().map(|(&t, &u)| (t, u == best_of[&(dataset.as_str(), t)])).collect(),
            uar: uar.clone(),
        })
        .collect();
    Ok(ResultsTable { rows })
}

/// Writes `results.csv`, `results.txt` and `results.json` into `out_dir`.
pub fn emit_results_table(reports: &[ExperimentReport], out_dir: &Path) -> Result<ResultsTable> {
    let table = build_results_table(reports)?;
    write_text(&out_dir.join("results.csv"), &table.to_csv())?;
    write_text(&out_dir.join("results.txt"), &table.to_text())?;
    write_text(&out_dir.join("results.json"), &to_json(&table)?)?;
    Ok(table)
}

/// Every `report.json` under the given files or directories, sorted by path.
pub fn collect_reports(paths: &[PathBuf]) -> Result<Vec<ExperimentReport>> {
    let mut files = Vec::new();
    for p in paths {
        if p.is_dir() {
            for entry in walkdir::WalkDir::new(p).sort_by_file_name() {
                let entry = entry.map_err(|e| Error::Config(e.to_string()))?;
                if entry.file_type().is_file() && entry.file_name() == "report.json" {
                    files.push(entry.into_path());
                }
            }
        } else {
            files.push(p.clone());
        }
    }
    files.iter().map(|f| ExperimentReport::load(f)).collect()
}
