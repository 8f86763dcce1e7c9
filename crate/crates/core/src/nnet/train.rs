use std::io::Write;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::adam::Adam;
use super::loss::cross_entropy;
use super::model::{Model, Tensor};
use super::real::Real;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    pub batch_size: usize,
    pub learning_rate: f64,
    pub max_epochs: usize,
    /// Epochs without validation improvement before the rate is cut.
    pub scheduler_patience: usize,
    pub scheduler_factor: f64,
    pub min_lr: f64,
    pub use_scheduler: bool,
    /// Epochs without validation improvement before training stops.
    pub early_stop_patience: usize,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self::mlp()
    }
}

impl TrainConfig {
    /// 30 epochs, as used for feature classifiers and probes.
    pub fn mlp() -> Self {
        Self {
            batch_size: 16,
            learning_rate: 1e-3,
            max_epochs: 30,
            scheduler_patience: 10,
            scheduler_factor: 0.5,
            min_lr: 1e-6,
            use_scheduler: true,
            early_stop_patience: 30,
            seed: 0,
        }
    }

    /// Up to 100 epochs with early stopping after 20 stale epochs.
    pub fn e2e() -> Self {
        Self {
            max_epochs: 100,
            early_stop_patience: 20,
            ..Self::mlp()
        }
    }

    fn validate(&self) -> Result<()> {
        if self.batch_size == 0 || self.max_epochs == 0 {
            return Err(Error::Config("batch_size and max_epochs must be positive".into()));
        }
        if !(self.learning_rate > 0.0) || !(self.scheduler_factor > 0.0 && self.scheduler_factor < 1.0) {
            return Err(Error::Config("learning_rate must be positive and scheduler_factor in (0, 1)".into()));
        }
        Ok(())
    }
}

/// Labeled inputs: feature vectors or waveforms.
#[derive(Debug, Clone, Default)]
pub struct Samples<T> {
    pub inputs: Vec<Vec<T>>,
    pub labels: Vec<usize>,
}

impl<T: Real> Samples<T> {
    pub fn new(inputs: Vec<Vec<T>>, labels: Vec<usize>) -> Result<Self> {
        if inputs.len() != labels.len() {
            return Err(Error::LengthMismatch(format!("{} inputs for {} labels", inputs.len(), labels.len())));
        }
        Ok(Self { inputs, labels })
    }

    pub fn len(&self) -> usize {
        self.inputs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inputs.is_empty()
    }
}

/// Mean loss and mean parameter gradients over `batch`.
pub fn compute_gradients<T: Real>(model: &Model<T>, batch: &[(&[T], usize)]) -> Result<(f64, Vec<Tensor<T>>)> {
    if batch.is_empty() {
        return Err(Error::EmptyDataset("gradient batch"));
    }
    let mut grads = model.zero_grads();
    let scale = T::one() / T::of(batch.len() as f64);
    let mut loss = 0.0;
    for &(x, label) in batch {
        let trace = model.forward_trace(x)?;
        let (l, d) = cross_entropy(trace.logits(), label)?;
        loss += l.f64();
        model.backward(&trace, &d, &mut grads, scale);
    }
    Ok((loss / batch.len() as f64, grads))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    pub epoch: usize,
    pub train_loss: f64,
    /// Percent.
    pub val_uar: f64,
    pub lr: f64,
}

#[derive(Debug, Clone)]
pub struct TrainedModel<T> {
    pub model: Model<T>,
    pub history: Vec<EpochRecord>,
    /// Index into `history` of the restored epoch.
    pub best_epoch: usize,
}

/// UAR in percent over the classes that occur in `truths`.
pub fn uar_of_present(preds: &[usize], truths: &[usize], n_classes: usize) -> f64 {
    let mut hit = vec![0usize; n_classes];
    let mut total = vec![0usize; n_classes];
    for (&p, &t) in preds.iter().zip(truths) {
        total[t] += 1;
        if p == t {
            hit[t] += 1;
        }
    }
    let recalls: Vec<f64> = (0..n_classes)
        .filter(|&c| total[c] > 0)
        .map(|c| hit[c] as f64 / total[c] as f64)
        .collect();
    100.0 * recalls.iter().sum::<f64>() / recalls.len().max(1) as f64
}

/// Plateau learning-rate schedule on a maximised metric: the rate is cut
/// once the metric has failed to improve for more than `patience` epochs.
#[derive(Debug, Clone)]
struct Plateau {
    best: f64,
    bad_epochs: usize,
    patience: usize,
    factor: f64,
    min_lr: f64,
}

impl Plateau {
    fn step(&mut self, metric: f64, lr: f64) -> f64 {
        if metric > self.best {
            self.best = metric;
            self.bad_epochs = 0;
            return lr;
        }
        self.bad_epochs += 1;
        if self.bad_epochs > self.patience {
            self.bad_epochs = 0;
            return (lr * self.factor).max(self.min_lr);
        }
        lr
    }
}

/// Mini-batch Adam on softmax cross-entropy, monitored by validation UAR.
/// The returned model carries the parameters of the best validation epoch.
pub fn train<T: Real>(mut model: Model<T>, train: &Samples<T>, val: &Samples<T>, cfg: &TrainConfig) -> Result<TrainedModel<T>> {
    cfg.validate()?;
    if train.is_empty() {
        return Err(Error::EmptyDataset("training split"));
    }
    if val.is_empty() {
        return Err(Error::EmptyDataset("validation split"));
    }
    let n_classes = model.spec.n_classes();
    for &label in train.labels.iter().chain(&val.labels) {
        if label >= n_classes {
            return Err(Error::LabelOutOfRange { label, n_classes });
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut opt = Adam::new(&model.params);
    let mut lr = cfg.learning_rate;
    let mut sched = Plateau {
        best: f64::NEG_INFINITY,
        bad_epochs: 0,
        patience: cfg.scheduler_patience,
        factor: cfg.scheduler_factor,
        min_lr: cfg.min_lr,
    };
    let mut history = Vec::new();
    let mut best: Option<(f64, usize, Vec<Tensor<T>>)> = None;
    let mut order: Vec<usize> = (0..train.len()).collect();

    for epoch in 0..cfg.max_epochs {
        order.shuffle(&mut rng);
        let mut loss_sum = 0.0;
        for chunk in order.chunks(cfg.batch_size) {
            let batch: Vec<(&[T], usize)> = chunk.iter().map(|&i| (train.inputs[i].as_slice(), train.labels[i])).collect();
            let (loss, grads) = compute_gradients(&model, &batch)?;
            if !loss.is_finite() {
                return Err(Error::Diverged { epoch, loss });
            }
            loss_sum += loss * chunk.len() as f64;
            opt.step(&mut model.params, &grads, lr)?;
        }
        let train_loss = loss_sum / train.len() as f64;
        let preds = model.predict_batch(&val.inputs)?;
        let val_uar = uar_of_present(&preds, &val.labels, n_classes);
        history.push(EpochRecord { epoch, train_loss, val_uar, lr });
        log::debug!("epoch {epoch}: loss {train_loss:.4} val UAR {val_uar:.2} lr {lr:.2e}");

        if best.as_ref().is_none_or(|b| val_uar > b.0) {
            best = Some((val_uar, epoch, model.params.clone()));
        }
        if cfg.use_scheduler {
            lr = sched.step(val_uar, lr);
        }
        let best_epoch = best.as_ref().unwrap().1;
        if epoch - best_epoch >= cfg.early_stop_patience {
            break;
        }
    }
    let (_, best_epoch, params) = best.unwrap();
    model.params = params;
    Ok(TrainedModel { model, history, best_epoch })
}

pub fn write_history_csv(path: &Path, history: &[EpochRecord]) -> Result<()> {
    let mut out = String::from("epoch,train_loss,val_uar,lr\n");
    for r in history {
        out.push_str(&format!("{},{},{},{}\n", r.epoch, r.train_loss, r.val_uar, r.lr));
    }
    let mut f = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(out.as_bytes()).map_err(|e| Error::io(path, e))
}

/// Per-dimension z-score fitted on training features.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Standardizer {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

impl Standardizer {
    /// Dimensions with zero spread keep unit scale.
    pub fn fit(rows: &[Vec<f64>]) -> Result<Self> {
        let first = rows.first().ok_or(Error::EmptyDataset("standardizer input"))?;
        let d = first.len();
        let n = rows.len() as f64;
        let mut mean = vec![0.0; d];
        for r in rows {
            if r.len() != d {
                return Err(Error::DimMismatch { expected: d, found: r.len() });
            }
            for (m, v) in mean.iter_mut().zip(r) {
                *m += v;
            }
        }
        mean.iter_mut().for_each(|m| *m /= n);
        let mut var = vec![0.0; d];
        for r in rows {
            for ((s, v), m) in var.iter_mut().zip(r).zip(&mean) {
                *s += (v - m) * (v - m);
            }
        }
        let std = var
            .iter()
            .map(|s| {
                let sd = (s / n).sqrt();
                if sd > 0.0 { sd } else { 1.0 }
            })
            .collect();
        Ok(Self { mean, std })
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        x.iter().zip(&self.mean).zip(&self.std).map(|((v, m), s)| (v - m) / s).collect()
    }

    pub fn apply_as<T: Real>(&self, x: &[f64]) -> Vec<T> {
        self.apply(x).into_iter().map(T::of).collect()
    }
}
