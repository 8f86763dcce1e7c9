//! Central finite-difference checks for hand-built layer stacks.

use callscope::nnet::{cross_entropy, Activation, Layer, LinearProbeSpec, Model, ModelSpec, Tensor};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const STEP: f64 = 1e-5;
pub const MAX_REL_ERROR: f64 = 1e-4;

/// A model assembled from an explicit layer list with random parameters.
pub struct Stack {
    pub model: Model<f64>,
    pub input: Activation<f64>,
    pub label: usize,
}

pub enum Part {
    Dense(usize, usize),
    Conv { c_in: usize, c_out: usize, kernel: usize, stride: usize, pad: usize },
    Relu,
    Pool,
}

pub fn build(parts: &[Part], channels: usize, len: usize, n_classes: usize, rng: &mut ChaCha8Rng) -> Stack {
    let mut layers = Vec::new();
    let mut params: Vec<Tensor<f64>> = Vec::new();
    let mut add = |shape: Vec<usize>, rng: &mut ChaCha8Rng| {
        let n = shape.iter().product();
        params.push(Tensor { shape, data: (0..n).map(|_| rng.random_range(-0.5..0.5)).collect() });
        params.len() - 1
    };
    for p in parts {
        layers.push(match *p {
            Part::Dense(n_in, n_out) => {
                let w = add(vec![n_out, n_in], rng);
                let b = add(vec![n_out], rng);
                Layer::Dense { n_in, n_out, w, b }
            }
            Part::Conv { c_in, c_out, kernel, stride, pad } => {
                let w = add(vec![c_out, c_in, kernel], rng);
                let b = add(vec![c_out], rng);
                Layer::Conv { c_in, c_out, kernel, stride, pad, w, b }
            }
            Part::Relu => Layer::Relu,
            Part::Pool => Layer::GlobalAvgPool,
        });
    }
    let data = (0..channels * len).map(|_| rng.random_range(-1.0..1.0)).collect();
    Stack {
        // the spec is unused when driving the stack through forward_trace_from
        model: Model { spec: ModelSpec::Linear(LinearProbeSpec { input_dim: 1, n_classes }), layers, params },
        input: Activation { channels, len, data },
        label: rng.random_range(0..n_classes),
    }
}

fn loss(model: &Model<f64>, input: &Activation<f64>, label: usize) -> f64 {
    let trace = model.forward_trace_from(input.clone()).unwrap();
    cross_entropy(trace.logits(), label).unwrap().0
}

/// Largest relative error between analytic and numeric gradients over all
/// parameters, with an absolute floor of 1e-6 in the denominator.
pub fn max_rel_error(stack: &Stack) -> f64 {
    let model = &stack.model;
    let trace = model.forward_trace_from(stack.input.clone()).unwrap();
    let (_, d) = cross_entropy(trace.logits(), stack.label).unwrap();
    let mut grads = model.zero_grads();
    model.backward(&trace, &d, &mut grads, 1.0);

    let mut worst: f64 = 0.0;
    let mut probe = model.clone();
    for (t, g) in grads.iter().enumerate() {
        for i in 0..g.data.len() {
            let orig = probe.params[t].data[i];
            probe.params[t].data[i] = orig + STEP;
            let up = loss(&probe, &stack.input, stack.label);
            probe.params[t].data[i] = orig - STEP;
            let down = loss(&probe, &stack.input, stack.label);
            probe.params[t].data[i] = orig;
            let numeric = (up - down) / (2.0 * STEP);
            let analytic = g.data[i];
            let rel = (numeric - analytic).abs() / numeric.abs().max(analytic.abs()).max(1e-6);
            worst = worst.max(rel);
        }
    }
    worst
}

/// Smallest absolute pre-activation feeding any rectifier; used to reject
/// instances that sit on a kink.
pub fn min_relu_margin(stack: &Stack) -> f64 {
    let trace = stack.model.forward_trace_from(stack.input.clone()).unwrap();
    stack
        .model
        .layers
        .iter()
        .enumerate()
        .filter(|(_, l)| matches!(l, Layer::Relu))
        .flat_map(|(i, _)| trace.acts[i].data.iter().map(|v| v.abs()))
        .fold(f64::INFINITY, f64::min)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Named layer-type suites; each returns the worst error over its instances.
pub fn suites() -> Vec<(&'static str, Box<dyn Fn(u64) -> Stack>)> {
    let conv = |name: &'static str, kernel: usize, stride: usize, pad: usize, c_in: usize, len: usize| -> (&'static str, Box<dyn Fn(u64) -> Stack>) {
        (
            name,
            Box::new(move |seed| {
                let mut r = rng(seed);
                // a leading conv makes the input gradient of the tested layer matter
                build(
                    &[
                        Part::Conv { c_in: 1, c_out: c_in, kernel: 3, stride: 1, pad: 1 },
                        Part::Conv { c_in, c_out: 3, kernel, stride, pad },
                        Part::Pool,
                        Part::Dense(3, 3),
                    ],
                    1,
                    len,
                    3,
                    &mut r,
                )
            }),
        )
    };
    vec![
        (
            "linear",
            Box::new(|seed| {
                let mut r = rng(seed);
                build(&[Part::Dense(6, 5), Part::Dense(5, 4)], 6, 1, 4, &mut r)
            }),
        ),
        (
            "rectifier",
            Box::new(|seed| {
                let mut r = rng(seed);
                build(&[Part::Dense(5, 7), Part::Relu, Part::Dense(7, 3)], 5, 1, 3, &mut r)
            }),
        ),
        conv("conv1d 44/2 (1 ms, 0.05 ms at 44.1 kHz)", 44, 2, 0, 1, 120),
        conv("conv1d 160/8 (10 ms, 0.5 ms at 16 kHz)", 160, 8, 0, 1, 260),
        conv("conv1d 10/5", 10, 5, 0, 2, 60),
        conv("conv1d 4/2 pad 2", 4, 2, 2, 2, 17),
        conv("conv1d 3/1 pad 1", 3, 1, 1, 2, 13),
        (
            "adaptive pool",
            Box::new(|seed| {
                let mut r = rng(seed);
                build(
                    &[Part::Conv { c_in: 2, c_out: 4, kernel: 3, stride: 2, pad: 0 }, Part::Pool, Part::Dense(4, 3)],
                    2,
                    21,
                    3,
                    &mut r,
                )
            }),
        ),
        (
            "softmax cross-entropy",
            Box::new(|seed| {
                let mut r = rng(seed);
                build(&[Part::Dense(4, 9)], 4, 1, 9, &mut r)
            }),
        ),
    ]
}
