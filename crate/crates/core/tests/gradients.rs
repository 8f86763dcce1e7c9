mod support;

use callscope::nnet::{compute_gradients, CnnSpec, ConvLayerSpec, LinearProbeSpec, MlpSpec, Model, ModelSpec};
use support::gradcheck::{max_rel_error, min_relu_margin, suites, MAX_REL_ERROR, STEP};

#[test]
fn every_layer_type_passes_finite_differences() {
    for (name, make) in suites() {
        let mut checked = 0;
        let mut seed = 0;
        while checked < 20 {
            seed += 1;
            let stack = make(seed);
            if min_relu_margin(&stack) < 1e-3 {
                continue;
            }
            let err = max_rel_error(&stack);
            assert!(err < MAX_REL_ERROR, "{name} seed {seed}: relative error {err}");
            checked += 1;
        }
    }
}

/// Finite-difference check of the full architectures through the public
/// batch-gradient entry point.
fn check_model(model: &Model<f64>, batch: &[(Vec<f64>, usize)]) {
    // zero biases put dead rectifiers exactly on the kink
    let mut model = model.clone();
    for (t, p) in model.params.iter_mut().enumerate() {
        if p.shape.len() == 1 {
            for (i, v) in p.data.iter_mut().enumerate() {
                *v = 0.1 * ((t * 31 + i) as f64).sin();
            }
        }
    }
    let model = &model;
    let refs: Vec<(&[f64], usize)> = batch.iter().map(|(x, y)| (x.as_slice(), *y)).collect();
    let (_, grads) = compute_gradients(model, &refs).unwrap();
    let mut probe = model.clone();
    let loss = |m: &Model<f64>| compute_gradients(m, &refs).unwrap().0;
    for (t, g) in grads.iter().enumerate() {
        // sample a spread of entries in large tensors
        let stride = (g.data.len() / 40).max(1);
        for i in (0..g.data.len()).step_by(stride) {
            let orig = probe.params[t].data[i];
            probe.params[t].data[i] = orig + STEP;
            let up = loss(&probe);
            probe.params[t].data[i] = orig - STEP;
            let down = loss(&probe);
            probe.params[t].data[i] = orig;
            let numeric = (up - down) / (2.0 * STEP);
            let rel = (numeric - g.data[i]).abs() / numeric.abs().max(g.data[i].abs()).max(1e-6);
            assert!(rel < MAX_REL_ERROR, "tensor {t} entry {i}: {numeric} vs {}", g.data[i]);
        }
    }
}

fn wave(len: usize, phase: f64) -> Vec<f64> {
    (0..len).map(|i| (0.37 * i as f64 + phase).sin() * 0.8).collect()
}

#[test]
fn whole_architectures_pass_finite_differences() {
    let mlp = Model::<f64>::init(&ModelSpec::Mlp(MlpSpec { input_dim: 6, hidden: vec![8, 5, 4], n_classes: 3 }), 2).unwrap();
    let batch: Vec<(Vec<f64>, usize)> = (0..3).map(|k| ((0..6).map(|i| ((i * 7 + k * 3) as f64).cos()).collect(), k)).collect();
    check_model(&mlp, &batch);

    let probe = Model::<f64>::init(&ModelSpec::Linear(LinearProbeSpec { input_dim: 5, n_classes: 4 }), 3).unwrap();
    let batch: Vec<(Vec<f64>, usize)> = (0..4).map(|k| ((0..5).map(|i| ((i + k) as f64).sin()).collect(), k)).collect();
    check_model(&probe, &batch);

    let cnn = Model::<f64>::init(
        &ModelSpec::Cnn(CnnSpec {
            first_filters: 3,
            conv_layers: vec![
                ConvLayerSpec { kernel: 10, stride: 5, filters: 4, pad: 0 },
                ConvLayerSpec { kernel: 4, stride: 2, filters: 4, pad: 2 },
                ConvLayerSpec { kernel: 3, stride: 1, filters: 4, pad: 1 },
            ],
            fc_hidden: vec![6, 5],
            ..CnnSpec::reference(44_100, 3)
        }),
        5,
    )
    .unwrap();
    // one long input and one shorter than the receptive field
    check_model(&cnn, &[(wave(300, 0.0), 0), (wave(40, 1.0), 2)]);
}
