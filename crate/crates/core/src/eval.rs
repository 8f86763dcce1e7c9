//! Stratified splits, confusion matrices and unweighted average recall.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::manifest::{write_manifest, Manifest, Task};

/// Train/validation/test fractions.
pub const SPLIT_RATIO: [f64; 3] = [0.7, 0.2, 0.1];
pub const SPLIT_NAMES: [&str; 3] = ["train", "val", "test"];

#[derive(Debug, Clone)]
pub struct SplitSet {
    pub train: Manifest,
    pub val: Manifest,
    pub test: Manifest,
    pub seed: u64,
    pub task: Task,
    /// Per class: `[train, val, test]` counts.
    pub class_counts: BTreeMap<String, [usize; 3]>,
}

impl SplitSet {
    pub fn parts(&self) -> [&Manifest; 3] {
        [&self.train, &self.val, &self.test]
    }

    /// Writes `train.csv`, `val.csv`, `test.csv` and a `split.json` sidecar.
    pub fn write(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        for (name, part) in SPLIT_NAMES.iter().zip(self.parts()) {
            write_manifest(&dir.join(format!("{name}.csv")), part)?;
        }
        #[derive(Serialize)]
        struct Sidecar<'a> {
            seed: u64,
            task: Task,
            ratio: [f64; 3],
            class_counts: &'a BTreeMap<String, [usize; 3]>,
        }
        let json = serde_json::to_string_pretty(&Sidecar {
            seed: self.seed,
            task: self.task,
            ratio: SPLIT_RATIO,
            class_counts: &self.class_counts,
        })
        .map_err(|e| Error::Serialization(e.to_string()))?;
        let path = dir.join("split.json");
        fs::write(&path, json).map_err(|e| Error::io(path, e))
    }
}

/// Largest-remainder allocation of `n` items over the split ratio. Ties in
/// the fractional part go to the later split.
fn allocate(n: usize) -> [usize; 3] {
    let quotas = SPLIT_RATIO.map(|r| r * n as f64);
    let mut counts = quotas.map(|q| q.floor() as usize);
    let mut left = n - counts.iter().sum::<usize>();
    let mut order = [0usize, 1, 2];
    // stable sort on descending remainder, later split first on ties
    order.sort_by(|&a, &b| {
        let (ra, rb) = (quotas[a] - quotas[a].floor(), quotas[b] - quotas[b].floor());
        rb.partial_cmp(&ra).unwrap().then(b.cmp(&a))
    });
    for &k in order.iter().cycle() {
        if left == 0 {
            break;
        }
        counts[k] += 1;
        left -= 1;
    }
    // every split needs at least one item of the class
    for k in 0..3 {
        if counts[k] == 0 {
            let donor = (0..3).max_by_key(|&j| (counts[j], 3 - j)).unwrap();
            counts[donor] -= 1;
            counts[k] += 1;
        }
    }
    counts
}

/// Per-class stratified 70:20:10 split of the records labeled for `task`.
/// Within each class the order is shuffled by a generator seeded from `seed`.
pub fn split_dataset(manifest: &Manifest, task: Task, seed: u64) -> Result<SplitSet> {
    let labeled = manifest.labeled_for(task);
    if labeled.is_empty() {
        return Err(Error::EmptyManifest);
    }
    let mut by_class: BTreeMap<String, Vec<usize>> = BTreeMap::new();
    for (i, r) in labeled.records.iter().enumerate() {
        by_class.entry(r.label(task).unwrap().to_string()).or_default().push(i);
    }
    if by_class.len() < 2 {
        return Err(Error::InsufficientClasses {
            task: task.to_string(),
            found: by_class.len(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut assignment = vec![0usize; labeled.len()];
    let mut class_counts = BTreeMap::new();
    for (class, idx) in &mut by_class {
        if idx.len() < 3 {
            return Err(Error::ClassTooSmall {
                class: class.clone(),
                count: idx.len(),
            });
        }
        idx.shuffle(&mut rng);
        let counts = allocate(idx.len());
        let mut it = idx.iter();
        for (split, &c) in counts.iter().enumerate() {
            for &i in it.by_ref().take(c) {
                assignment[i] = split;
            }
        }
        for (split, &c) in counts.iter().enumerate() {
            if c == 0 {
                return Err(Error::ClassAbsentFromSplit {
                    class: class.clone(),
                    split: SPLIT_NAMES[split],
                });
            }
        }
        class_counts.insert(class.clone(), counts);
    }
    let part = |k: usize| {
        labeled.with_records(
            labeled
                .records
                .iter()
                .zip(&assignment)
                .filter(|(_, &a)| a == k)
                .map(|(r, _)| r.clone())
                .collect(),
        )
    };
    Ok(SplitSet {
        train: part(0),
        val: part(1),
        test: part(2),
        seed,
        task,
        class_counts,
    })
}

/// Rows are truth, columns are predictions.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub counts: Vec<Vec<usize>>,
}

impl ConfusionMatrix {
    pub fn n_classes(&self) -> usize {
        self.counts.len()
    }

    pub fn recalls(&self) -> Result<Vec<f64>> {
        self.counts
            .iter()
            .enumerate()
            .map(|(i, row)| {
                let total: usize = row.iter().sum();
                if total == 0 {
                    Err(Error::EmptyClassRow(i))
                } else {
                    Ok(row[i] as f64 / total as f64)
                }
            })
            .collect()
    }
}

pub fn confusion_matrix(preds: &[usize], truths: &[usize], n_classes: usize) -> Result<ConfusionMatrix> {
    if preds.len() != truths.len() {
        return Err(Error::LengthMismatch(format!(
            "{} predictions for {} truths",
            preds.len(),
            truths.len()
        )));
    }
    let mut counts = vec![vec![0usize; n_classes]; n_classes];
    for (&p, &t) in preds.iter().zip(truths) {
        for label in [p, t] {
            if label >= n_classes {
                return Err(Error::LabelOutOfRange { label, n_classes });
            }
        }
        counts[t][p] += 1;
    }
    Ok(ConfusionMatrix { counts })
}

/// Unweighted average recall in percent.
pub fn uar(cm: &ConfusionMatrix) -> Result<f64> {
    let r = cm.recalls()?;
    Ok(100.0 * r.iter().sum::<f64>() / r.len() as f64)
}

/// Percent UAR of an uninformed classifier.
pub fn chance_level(n_classes: usize) -> Result<f64> {
    if n_classes < 2 {
        return Err(Error::TooFewClasses(n_classes));
    }
    Ok(100.0 / n_classes as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub confusion: ConfusionMatrix,
    pub per_class_recall: Vec<f64>,
    /// Percent.
    pub uar: f64,
    pub n_classes: usize,
    /// Percent.
    pub chance: f64,
}

impl EvalReport {
    pub fn from_predictions(preds: &[usize], truths: &[usize], n_classes: usize) -> Result<Self> {
        let confusion = confusion_matrix(preds, truths, n_classes)?;
        let per_class_recall = confusion.recalls()?;
        let uar = 100.0 * per_class_recall.iter().sum::<f64>() / n_classes as f64;
        Ok(Self {
            confusion,
            per_class_recall,
            uar,
            n_classes,
            chance: chance_level(n_classes)?,
        })
    }
}
