//! Probes 13 synthetic embedding layers for each task and prints the
//! normalised matrix.

use callscope::analysis::write_layer_matrix_svg;
use callscope::embeddings::{embedding_path, load_embeddings, pool_stats};
use callscope::experiment::{probe_layers, ProbeConfig};
use callscope::manifest::Task;
use callscope::nnet::TrainConfig;
use callscope::synthetic::{make_synthetic_dataset, write_synthetic_embeddings, SyntheticEmbeddingSpec, SyntheticSpec};

fn main() -> callscope::Result<()> {
    let root = std::env::temp_dir().join("callscope_probe");
    let spec = SyntheticSpec { count_per_class: 100, min_duration_ms: 5.0, max_duration_ms: 5.0, ..Default::default() };
    let m = make_synthetic_dataset(&spec, 3, &root)?;
    let emb = root.join("embeddings");
    write_synthetic_embeddings(&m, &SyntheticEmbeddingSpec { informative_layer: 2, ..Default::default() }, 3, &emb)?;

    let seq = load_embeddings(&embedding_path(&emb, &m.records[0].segment_id, 2))?;
    let pooled = pool_stats(&seq)?;
    println!("{} frames x {} dims pool to {} values", seq.n_frames, seq.dim, pooled.dim());

    let cfg = ProbeConfig {
        dataset_manifest: root.join("manifest.csv"),
        embeddings_dir: emb,
        tasks: Task::ALL.to_vec(),
        train: TrainConfig::mlp(),
        seed: 3,
        output_dir: root.join("probe"),
    };
    let lm = probe_layers(&cfg)?;
    for (task, row) in lm.tasks.iter().zip(&lm.normalized) {
        let cells: Vec<String> = row.iter().map(|v| format!("{v:.2}")).collect();
        println!("{task:<5} {}", cells.join(" "));
    }
    write_layer_matrix_svg(&cfg.output_dir.join("layers.svg"), &lm)?;
    println!("best layers {:?}", lm.best_layers());
    Ok(())
}
