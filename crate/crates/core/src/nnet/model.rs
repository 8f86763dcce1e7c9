use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::real::Real;
use crate::error::{Error, Result};

/// Multilayer perceptron with rectified hidden layers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MlpSpec {
    pub input_dim: usize,
    pub hidden: Vec<usize>,
    pub n_classes: usize,
}

impl MlpSpec {
    pub const REFERENCE_HIDDEN: [usize; 3] = [128, 64, 32];

    pub fn reference(input_dim: usize, n_classes: usize) -> Self {
        Self {
            input_dim,
            hidden: Self::REFERENCE_HIDDEN.to_vec(),
            n_classes,
        }
    }
}

/// Single affine layer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinearProbeSpec {
    pub input_dim: usize,
    pub n_classes: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConvLayerSpec {
    pub kernel: usize,
    pub stride: usize,
    pub filters: usize,
    pub pad: usize,
}

/// Raw-waveform classifier: a rectified conv stack, global average pooling
/// over time, then a rectified fully connected head.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CnnSpec {
    pub sample_rate: u32,
    pub first_kernel_ms: f64,
    pub first_stride_ms: f64,
    pub first_filters: usize,
    /// Layers after the first.
    pub conv_layers: Vec<ConvLayerSpec>,
    pub fc_hidden: Vec<usize>,
    pub n_classes: usize,
}

impl CnnSpec {
    /// Reference geometry: 1 ms / 0.05 ms first kernel above 16 kHz,
    /// 10 ms / 0.5 ms at 16 kHz and below.
    pub fn reference(sample_rate: u32, n_classes: usize) -> Self {
        let (k_ms, s_ms) = if sample_rate > 16_000 {
            (1.0, 0.05)
        } else {
            (10.0, 0.5)
        };
        Self {
            sample_rate,
            first_kernel_ms: k_ms,
            first_stride_ms: s_ms,
            first_filters: 128,
            conv_layers: vec![
                ConvLayerSpec { kernel: 10, stride: 5, filters: 256, pad: 0 },
                ConvLayerSpec { kernel: 4, stride: 2, filters: 512, pad: 2 },
                ConvLayerSpec { kernel: 3, stride: 1, filters: 512, pad: 1 },
            ],
            fc_hidden: vec![512, 256],
            n_classes,
        }
    }

    fn ms_to_samples(&self, ms: f64) -> usize {
        (ms * self.sample_rate as f64 / 1000.0).round() as usize
    }

    /// The full conv stack, first layer included, in samples.
    pub fn conv_stack(&self) -> Vec<ConvLayerSpec> {
        let mut stack = vec![ConvLayerSpec {
            kernel: self.ms_to_samples(self.first_kernel_ms),
            stride: self.ms_to_samples(self.first_stride_ms).max(1),
            filters: self.first_filters,
            pad: 0,
        }];
        stack.extend_from_slice(&self.conv_layers);
        stack
    }

    /// Shortest input for which every conv layer yields at least one frame.
    pub fn min_input_len(&self) -> usize {
        self.conv_stack()
            .iter()
            .rev()
            .fold(1usize, |need, c| {
                ((need - 1) * c.stride + c.kernel).saturating_sub(2 * c.pad).max(1)
            })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ModelSpec {
    Mlp(MlpSpec),
    Linear(LinearProbeSpec),
    Cnn(CnnSpec),
}

impl ModelSpec {
    pub fn n_classes(&self) -> usize {
        match self {
            ModelSpec::Mlp(s) => s.n_classes,
            ModelSpec::Linear(s) => s.n_classes,
            ModelSpec::Cnn(s) => s.n_classes,
        }
    }

    /// Fixed input dimension, or `None` for variable-length waveforms.
    pub fn input_dim(&self) -> Option<usize> {
        match self {
            ModelSpec::Mlp(s) => Some(s.input_dim),
            ModelSpec::Linear(s) => Some(s.input_dim),
            ModelSpec::Cnn(_) => None,
        }
    }
}

/// Dense row-major parameter tensor.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor<T> {
    pub shape: Vec<usize>,
    pub data: Vec<T>,
}

impl<T: Real> Tensor<T> {
    pub fn zeros(shape: &[usize]) -> Self {
        Self {
            shape: shape.to_vec(),
            data: vec![T::zero(); shape.iter().product()],
        }
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn cast<U: Real>(&self) -> Tensor<U> {
        Tensor {
            shape: self.shape.clone(),
            data: self.data.iter().map(|v| U::of(v.f64())).collect(),
        }
    }
}

/// One step of the network. Weight and bias fields index into
/// [`Model::params`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Layer {
    Dense { n_in: usize, n_out: usize, w: usize, b: usize },
    Conv { c_in: usize, c_out: usize, kernel: usize, stride: usize, pad: usize, w: usize, b: usize },
    Relu,
    GlobalAvgPool,
}

/// A `channels x len` activation, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Activation<T> {
    pub channels: usize,
    pub len: usize,
    pub data: Vec<T>,
}

impl<T: Real> Activation<T> {
    pub fn vector(data: Vec<T>) -> Self {
        Self { channels: data.len(), len: 1, data }
    }

    pub fn signal(data: Vec<T>) -> Self {
        Self { channels: 1, len: data.len(), data }
    }
}

/// Network parameters plus the layer program that uses them.
#[derive(Debug, Clone, PartialEq)]
pub struct Model<T> {
    pub spec: ModelSpec,
    pub layers: Vec<Layer>,
    pub params: Vec<Tensor<T>>,
}

struct Builder<T> {
    layers: Vec<Layer>,
    params: Vec<Tensor<T>>,
}

impl<T: Real> Builder<T> {
    fn push_params(&mut self, w_shape: &[usize], b_len: usize) -> (usize, usize) {
        self.params.push(Tensor::zeros(w_shape));
        self.params.push(Tensor::zeros(&[b_len]));
        (self.params.len() - 2, self.params.len() - 1)
    }

    fn dense(&mut self, n_in: usize, n_out: usize) {
        let (w, b) = self.push_params(&[n_out, n_in], n_out);
        self.layers.push(Layer::Dense { n_in, n_out, w, b });
    }

    fn conv(&mut self, c_in: usize, c: &ConvLayerSpec) {
        let (w, b) = self.push_params(&[c.filters, c_in, c.kernel], c.filters);
        self.layers.push(Layer::Conv {
            c_in,
            c_out: c.filters,
            kernel: c.kernel,
            stride: c.stride,
            pad: c.pad,
            w,
            b,
        });
    }
}

fn check_sizes(what: &str, sizes: &[usize]) -> Result<()> {
    if sizes.contains(&0) {
        return Err(Error::InvalidSpec(format!("{what} has a zero-sized layer: {sizes:?}")));
    }
    Ok(())
}

impl<T: Real> Model<T> {
    /// Builds the network with He-uniform weights and zero biases.
    pub fn init(spec: &ModelSpec, seed: u64) -> Result<Self> {
        let mut b = Builder { layers: Vec::new(), params: Vec::new() };
        match spec {
            ModelSpec::Mlp(s) => {
                let mut sizes = vec![s.input_dim];
                sizes.extend(&s.hidden);
                sizes.push(s.n_classes);
                check_sizes("MLP", &sizes)?;
                for (i, pair) in sizes.windows(2).enumerate() {
                    b.dense(pair[0], pair[1]);
                    if i + 2 < sizes.len() {
                        b.layers.push(Layer::Relu);
                    }
                }
            }
            ModelSpec::Linear(s) => {
                check_sizes("linear probe", &[s.input_dim, s.n_classes])?;
                b.dense(s.input_dim, s.n_classes);
            }
            ModelSpec::Cnn(s) => {
                let stack = s.conv_stack();
                let mut sizes: Vec<usize> = stack.iter().flat_map(|c| [c.kernel, c.stride, c.filters]).collect();
                sizes.extend(&s.fc_hidden);
                sizes.push(s.n_classes);
                check_sizes("CNN", &sizes)?;
                let mut ch = 1;
                for c in &stack {
                    b.conv(ch, c);
                    b.layers.push(Layer::Relu);
                    ch = c.filters;
                }
                b.layers.push(Layer::GlobalAvgPool);
                let mut dims = vec![ch];
                dims.extend(&s.fc_hidden);
                dims.push(s.n_classes);
                for (i, pair) in dims.windows(2).enumerate() {
                    b.dense(pair[0], pair[1]);
                    if i + 2 < dims.len() {
                        b.layers.push(Layer::Relu);
                    }
                }
            }
        }
        let mut model = Model { spec: spec.clone(), layers: b.layers, params: b.params };
        model.reinit(seed);
        Ok(model)
    }

    /// Redraws weights uniformly in `±sqrt(6 / fan_in)` and zeroes biases.
    pub fn reinit(&mut self, seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for layer in self.layers.clone() {
            let (w, b, fan_in) = match layer {
                Layer::Dense { n_in, w, b, .. } => (w, b, n_in),
                Layer::Conv { c_in, kernel, w, b, .. } => (w, b, c_in * kernel),
                _ => continue,
            };
            let bound = (6.0 / fan_in as f64).sqrt();
            for v in self.params[w].data.iter_mut() {
                *v = T::of(rng.random_range(-bound..bound));
            }
            self.params[b].data.iter_mut().for_each(|v| *v = T::zero());
        }
    }

    pub fn n_params(&self) -> usize {
        self.params.iter().map(Tensor::len).sum()
    }

    pub fn cast<U: Real>(&self) -> Model<U> {
        Model {
            spec: self.spec.clone(),
            layers: self.layers.clone(),
            params: self.params.iter().map(Tensor::cast).collect(),
        }
    }

    /// Zero-valued tensors shaped like the parameters.
    pub fn zero_grads(&self) -> Vec<Tensor<T>> {
        self.params.iter().map(|p| Tensor::zeros(&p.shape)).collect()
    }

    /// Validates and shapes a raw input. Waveforms shorter than the conv
    /// stack's receptive field are zero-padded symmetrically.
    pub fn prepare_input(&self, input: &[T]) -> Result<Activation<T>> {
        match &self.spec {
            ModelSpec::Cnn(s) => {
                if input.is_empty() {
                    return Err(Error::EmptyFeatureMap);
                }
                let need = s.min_input_len();
                if input.len() >= need {
                    return Ok(Activation::signal(input.to_vec()));
                }
                let left = (need - input.len()) / 2;
                let mut data = vec![T::zero(); need];
                data[left..left + input.len()].copy_from_slice(input);
                Ok(Activation::signal(data))
            }
            spec => {
                let expected = spec.input_dim().unwrap();
                if input.len() != expected {
                    return Err(Error::DimMismatch { expected, found: input.len() });
                }
                Ok(Activation::vector(input.to_vec()))
            }
        }
    }

    /// Logits for one input.
    pub fn forward(&self, input: &[T]) -> Result<Vec<T>> {
        let mut act = self.prepare_input(input)?;
        for (i, layer) in self.layers.iter().enumerate() {
            act = self.apply(layer, &act, None)?;
            check_finite(&act, i)?;
        }
        Ok(act.data)
    }

    /// Forward pass that keeps what the backward pass needs.
    pub fn forward_trace(&self, input: &[T]) -> Result<Trace<T>> {
        self.forward_trace_from(self.prepare_input(input)?)
    }

    /// Like [`Model::forward_trace`] for an already shaped input, skipping
    /// the spec's validation and padding.
    pub fn forward_trace_from(&self, input: Activation<T>) -> Result<Trace<T>> {
        let mut acts = vec![input];
        let mut cols = Vec::with_capacity(self.layers.len());
        for (i, layer) in self.layers.iter().enumerate() {
            let mut col = None;
            let out = self.apply(layer, acts.last().unwrap(), Some(&mut col))?;
            check_finite(&out, i)?;
            acts.push(out);
            cols.push(col);
        }
        Ok(Trace { acts, cols })
    }

    fn apply(&self, layer: &Layer, x: &Activation<T>, keep_col: Option<&mut Option<Vec<T>>>) -> Result<Activation<T>> {
        Ok(match *layer {
            Layer::Dense { n_in, n_out, w, b } => {
                if x.data.len() != n_in {
                    return Err(Error::ShapeMismatch(format!("dense layer expects {n_in} inputs, got {}", x.data.len())));
                }
                let mut out = self.params[b].data.clone();
                T::gemm(n_out, n_in, 1, &self.params[w].data, false, &x.data, false, &mut out, T::one());
                Activation::vector(out)
            }
            Layer::Conv { c_in, c_out, kernel, stride, pad, w, b } => {
                if x.channels != c_in {
                    return Err(Error::ShapeMismatch(format!("conv expects {c_in} channels, got {}", x.channels)));
                }
                let l_out = conv_out_len(x.len, kernel, stride, pad)?;
                let col = im2col(x, kernel, stride, pad, l_out);
                let mut out = vec![T::zero(); c_out * l_out];
                let bias = &self.params[b].data;
                for (row, &bv) in out.chunks_exact_mut(l_out).zip(bias) {
                    row.iter_mut().for_each(|v| *v = bv);
                }
                T::gemm(c_out, c_in * kernel, l_out, &self.params[w].data, false, &col, false, &mut out, T::one());
                if let Some(slot) = keep_col {
                    *slot = Some(col);
                }
                Activation { channels: c_out, len: l_out, data: out }
            }
            Layer::Relu => Activation {
                channels: x.channels,
                len: x.len,
                data: x.data.iter().map(|&v| v.max(T::zero())).collect(),
            },
            Layer::GlobalAvgPool => Activation::vector(adaptive_avg_pool(&x.data, x.channels, x.len)?),
        })
    }

    /// Accumulates `scale * dLoss/dParams` into `grads` given the gradient
    /// of the loss with respect to the logits.
    pub fn backward(&self, trace: &Trace<T>, d_logits: &[T], grads: &mut [Tensor<T>], scale: T) {
        let mut delta: Vec<T> = d_logits.iter().map(|&g| g * scale).collect();
        for (i, layer) in self.layers.iter().enumerate().rev() {
            let x = &trace.acts[i];
            let first = i == 0;
            delta = match *layer {
                Layer::Dense { n_in, n_out, w, b } => {
                    // dW += delta x^T ; db += delta
                    T::gemm(n_out, 1, n_in, &delta, false, &x.data, false, &mut grads[w].data, T::one());
                    for (g, &d) in grads[b].data.iter_mut().zip(&delta) {
                        *g += d;
                    }
                    if first {
                        break;
                    }
                    let mut dx = vec![T::zero(); n_in];
                    T::gemm(n_in, n_out, 1, &self.params[w].data, true, &delta, false, &mut dx, T::zero());
                    dx
                }
                Layer::Conv { c_in, c_out, kernel, stride, pad, w, b } => {
                    let col = trace.cols[i].as_ref().expect("conv trace keeps im2col");
                    let l_out = delta.len() / c_out;
                    let ck = c_in * kernel;
                    T::gemm(c_out, l_out, ck, &delta, false, col, true, &mut grads[w].data, T::one());
                    for (g, row) in grads[b].data.iter_mut().zip(delta.chunks_exact(l_out)) {
                        *g += row.iter().copied().sum();
                    }
                    if first {
                        break;
                    }
                    let mut dcol = vec![T::zero(); ck * l_out];
                    T::gemm(ck, c_out, l_out, &self.params[w].data, true, &delta, false, &mut dcol, T::zero());
                    col2im(&dcol, c_in, x.len, kernel, stride, pad, l_out)
                }
                Layer::Relu => delta
                    .iter()
                    .zip(&x.data)
                    .map(|(&d, &v)| if v > T::zero() { d } else { T::zero() })
                    .collect(),
                Layer::GlobalAvgPool => {
                    let inv = T::one() / T::of(x.len as f64);
                    let mut dx = Vec::with_capacity(x.channels * x.len);
                    for &d in &delta {
                        dx.extend(std::iter::repeat_n(d * inv, x.len));
                    }
                    dx
                }
            };
        }
    }

    /// Class with the largest logit; ties go to the lowest index.
    pub fn predict(&self, input: &[T]) -> Result<usize> {
        Ok(argmax(&self.forward(input)?))
    }

    pub fn predict_batch(&self, inputs: &[Vec<T>]) -> Result<Vec<usize>> {
        inputs.iter().map(|x| self.predict(x)).collect()
    }

    /// Weights of the first conv layer as `filters x kernel` rows (single
    /// input channel), if the model has one.
    pub fn first_conv_filters(&self) -> Option<Vec<Vec<T>>> {
        self.layers.iter().find_map(|l| match *l {
            Layer::Conv { c_in, kernel, w, .. } => Some(
                self.params[w]
                    .data
                    .chunks_exact(c_in * kernel)
                    .map(|r| r[..kernel].to_vec())
                    .collect(),
            ),
            _ => None,
        })
    }
}

/// Cached activations (`acts[i]` is the input to layer `i`) and im2col buffers.
pub struct Trace<T> {
    pub acts: Vec<Activation<T>>,
    cols: Vec<Option<Vec<T>>>,
}

impl<T: Real> Trace<T> {
    pub fn logits(&self) -> &[T] {
        &self.acts.last().unwrap().data
    }
}

fn check_finite<T: Real>(a: &Activation<T>, layer: usize) -> Result<()> {
    if a.data.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFiniteActivation { layer })
    }
}

pub fn argmax<T: Real>(v: &[T]) -> usize {
    let mut best = 0;
    for (i, &x) in v.iter().enumerate() {
        if x > v[best] {
            best = i;
        }
    }
    best
}

fn conv_out_len(len: usize, kernel: usize, stride: usize, pad: usize) -> Result<usize> {
    let padded = len + 2 * pad;
    if padded < kernel {
        return Err(Error::ShapeMismatch(format!(
            "input of {len} samples (padded {padded}) is shorter than the {kernel}-tap kernel"
        )));
    }
    Ok((padded - kernel) / stride + 1)
}

/// Rows are `(channel, tap)`, columns are output positions.
fn im2col<T: Real>(x: &Activation<T>, kernel: usize, stride: usize, pad: usize, l_out: usize) -> Vec<T> {
    let mut col = vec![T::zero(); x.channels * kernel * l_out];
    for c in 0..x.channels {
        let src = &x.data[c * x.len..(c + 1) * x.len];
        for k in 0..kernel {
            let row = &mut col[(c * kernel + k) * l_out..(c * kernel + k + 1) * l_out];
            for (t, slot) in row.iter_mut().enumerate() {
                let pos = (t * stride + k) as isize - pad as isize;
                if pos >= 0 && (pos as usize) < x.len {
                    *slot = src[pos as usize];
                }
            }
        }
    }
    col
}

fn col2im<T: Real>(dcol: &[T], channels: usize, len: usize, kernel: usize, stride: usize, pad: usize, l_out: usize) -> Vec<T> {
    let mut dx = vec![T::zero(); channels * len];
    for c in 0..channels {
        let dst = &mut dx[c * len..(c + 1) * len];
        for k in 0..kernel {
            let row = &dcol[(c * kernel + k) * l_out..(c * kernel + k + 1) * l_out];
            for (t, &g) in row.iter().enumerate() {
                let pos = (t * stride + k) as isize - pad as isize;
                if pos >= 0 && (pos as usize) < len {
                    dst[pos as usize] += g;
                }
            }
        }
    }
    dx
}

/// Mean over time of each row of a `channels x len` map.
pub fn adaptive_avg_pool<T: Real>(map: &[T], channels: usize, len: usize) -> Result<Vec<T>> {
    if channels == 0 || len == 0 || map.len() != channels * len {
        return Err(Error::EmptyFeatureMap);
    }
    let n = T::of(len as f64);
    Ok(map.chunks_exact(len).map(|row| row.iter().copied().sum::<T>() / n).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn conv_model(kernel: usize, stride: usize, pad: usize) -> Model<f64> {
        Model {
            spec: ModelSpec::Linear(LinearProbeSpec { input_dim: 1, n_classes: 1 }),
            layers: vec![Layer::Conv { c_in: 1, c_out: 1, kernel, stride, pad, w: 0, b: 1 }],
            params: vec![Tensor::zeros(&[1, 1, kernel]), Tensor::zeros(&[1])],
        }
    }

    #[test]
    fn hand_sized_convolution() {
        let mut m = conv_model(3, 1, 0);
        m.params[0].data = vec![1.0, 0.0, -1.0];
        let x = Activation::signal(vec![1.0, 2.0, 3.0, 4.0]);
        let y = m.apply(&m.layers[0], &x, None).unwrap();
        assert_eq!(y.data, vec![-2.0, -2.0]);
    }

    #[test]
    fn padded_strided_convolution() {
        let mut m = conv_model(2, 2, 1);
        m.params[0].data = vec![1.0, 10.0];
        let x = Activation::signal(vec![1.0, 2.0, 3.0]);
        // padded [0,1,2,3,0] -> windows [0,1], [2,3]
        let y = m.apply(&m.layers[0], &x, None).unwrap();
        assert_eq!(y.data, vec![10.0, 32.0]);
    }

    #[test]
    fn reference_geometry() {
        let s = CnnSpec::reference(44_100, 3);
        let st = s.conv_stack();
        assert_eq!((st[0].kernel, st[0].stride), (44, 2));
        assert_eq!(s.min_input_len(), 62);
        let s = CnnSpec::reference(16_000, 3);
        let st = s.conv_stack();
        assert_eq!((st[0].kernel, st[0].stride), (160, 8));
        assert_eq!(s.min_input_len(), 232);
        let s = CnnSpec::reference(60_000, 3);
        assert_eq!(s.conv_stack()[0].kernel, 60);
    }

    #[test]
    fn zero_model_gives_zero_logits() {
        let spec = ModelSpec::Mlp(MlpSpec::reference(24, 5));
        let mut m = Model::<f32>::init(&spec, 0).unwrap();
        m.params.iter_mut().for_each(|p| p.data.iter_mut().for_each(|v| *v = 0.0));
        assert_eq!(m.forward(&[1.5; 24]).unwrap(), vec![0.0; 5]);
        assert!(matches!(m.forward(&[0.0; 23]), Err(Error::DimMismatch { expected: 24, found: 23 })));
    }

    #[test]
    fn probe_selects_weight_column() {
        let spec = ModelSpec::Linear(LinearProbeSpec { input_dim: 4, n_classes: 3 });
        let m = Model::<f64>::init(&spec, 3).unwrap();
        let logits = m.forward(&[0.0, 0.0, 1.0, 0.0]).unwrap();
        for c in 0..3 {
            assert_eq!(logits[c], m.params[0].data[c * 4 + 2]);
        }
    }

    #[test]
    fn init_is_seeded_and_fan_in_scaled() {
        let spec = ModelSpec::Mlp(MlpSpec { input_dim: 200, hidden: vec![128], n_classes: 4 });
        let a = Model::<f32>::init(&spec, 1).unwrap();
        let b = Model::<f32>::init(&spec, 1).unwrap();
        let c = Model::<f32>::init(&spec, 2).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        let w = &a.params[0].data;
        assert!(w.len() >= 10_000);
        let std = (w.iter().map(|v| (*v as f64).powi(2)).sum::<f64>() / w.len() as f64).sqrt();
        let target = (2.0 / 200.0f64).sqrt();
        assert!((std / target - 1.0).abs() < 0.2, "{std} vs {target}");
        assert!(a.params[1].data.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn zero_sized_layers_are_rejected() {
        let spec = ModelSpec::Mlp(MlpSpec { input_dim: 4, hidden: vec![0], n_classes: 2 });
        assert!(matches!(Model::<f32>::init(&spec, 0), Err(Error::InvalidSpec(_))));
    }

    #[test]
    fn short_waveform_is_padded() {
        let spec = ModelSpec::Cnn(CnnSpec {
            first_filters: 4,
            conv_layers: vec![ConvLayerSpec { kernel: 3, stride: 1, filters: 4, pad: 1 }],
            fc_hidden: vec![8],
            ..CnnSpec::reference(16_000, 3)
        });
        let m = Model::<f32>::init(&spec, 0).unwrap();
        let x = m.prepare_input(&[1.0; 10]).unwrap();
        assert_eq!(x.len, 160);
        assert_eq!(x.data[75], 1.0);
        assert_eq!(x.data[0], 0.0);
        for n in [10, 160, 500, 1234] {
            assert_eq!(m.forward(&vec![0.1; n]).unwrap().len(), 3);
        }
    }

    #[test]
    fn pooling_examples() {
        assert_eq!(adaptive_avg_pool(&[2.5f64; 4], 1, 4).unwrap(), vec![2.5]);
        assert_eq!(adaptive_avg_pool(&[1.0f64, 2.0, 3.0], 1, 3).unwrap(), vec![2.0]);
        assert!(adaptive_avg_pool::<f64>(&[], 1, 0).is_err());
    }

    #[test]
    fn argmax_ties_low() {
        assert_eq!(argmax(&[0.1f32, 0.9]), 1);
        assert_eq!(argmax(&[0.5f32, 0.5]), 0);
    }
}
