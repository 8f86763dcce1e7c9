//! Trains the reference MLP on two Gaussian blobs and reloads the checkpoint.

use callscope::nnet::{load_checkpoint, save_checkpoint, train, MlpSpec, Model, ModelSpec, Samples, TrainConfig};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

fn blobs(n: usize, rng: &mut ChaCha8Rng) -> callscope::Result<Samples<f32>> {
    let noise = Normal::new(0.0f32, 0.7).unwrap();
    let mut inputs = Vec::new();
    let mut labels = Vec::new();
    for i in 0..n {
        let c = i % 2;
        let centre = if c == 0 { -1.0 } else { 1.0 };
        inputs.push(vec![centre + noise.sample(rng), -centre + noise.sample(rng)]);
        labels.push(c);
    }
    Samples::new(inputs, labels)
}

fn main() -> callscope::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let (tr, va) = (blobs(400, &mut rng)?, blobs(100, &mut rng)?);
    let model = Model::<f32>::init(&ModelSpec::Mlp(MlpSpec::reference(2, 2)), 0)?;
    println!("{} parameters", model.n_params());

    let trained = train(model, &tr, &va, &TrainConfig::mlp())?;
    for e in trained.history.iter().step_by(5) {
        println!("epoch {:>2}  loss {:.4}  val UAR {:6.2}  lr {:.1e}", e.epoch, e.train_loss, e.val_uar, e.lr);
    }
    println!("best epoch {}", trained.best_epoch);

    let path = std::env::temp_dir().join("blobs.mkm");
    save_checkpoint(&path, &trained.model, None)?;
    let (back, _) = load_checkpoint::<f32>(&path)?;
    assert_eq!(back.predict_batch(&va.inputs)?, trained.model.predict_batch(&va.inputs)?);
    println!("checkpoint reloaded from {}", path.display());
    Ok(())
}
