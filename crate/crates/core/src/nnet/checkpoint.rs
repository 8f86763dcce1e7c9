//! Little-endian model files.
//!
//! ```text
//! "MKM1"  u8 dtype (4 = f32, 8 = f64)  u8 kind (0 MLP, 1 linear, 2 CNN)
//! spec:
//!   MLP     u32 input_dim, u32 n_hidden, n_hidden x u32, u32 n_classes
//!   linear  u32 input_dim, u32 n_classes
//!   CNN     u32 sample_rate, f64 first_kernel_ms, f64 first_stride_ms,
//!           u32 first_filters, u32 n_conv, n_conv x (u32 kernel, stride,
//!           filters, pad), u32 n_fc, n_fc x u32, u32 n_classes
//! u32 n_tensors, each: u32 ndim, ndim x u32 dims, values
//! u8 has_standardizer, then u32 dim, dim x f64 mean, dim x f64 std
//! ```

use std::fs;
use std::path::Path;

use super::model::{CnnSpec, ConvLayerSpec, LinearProbeSpec, MlpSpec, Model, ModelSpec};
use super::real::Real;
use super::train::Standardizer;
use crate::error::{Error, Result};

pub const MAGIC: &[u8; 4] = b"MKM1";

struct Writer(Vec<u8>);

impl Writer {
    fn u8(&mut self, v: u8) {
        self.0.push(v);
    }
    fn u32(&mut self, v: usize) {
        self.0.extend_from_slice(&(v as u32).to_le_bytes());
    }
    fn f64(&mut self, v: f64) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }
    fn list(&mut self, v: &[usize]) {
        self.u32(v.len());
        v.iter().for_each(|&x| self.u32(x));
    }
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
    path: &'a Path,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        if self.bytes.len() - self.pos < n {
            return Err(Error::TruncatedPayload {
                path: self.path.to_path_buf(),
                expected: self.pos + n,
                found: self.bytes.len(),
            });
        }
        self.pos += n;
        Ok(&self.bytes[self.pos - n..self.pos])
    }
    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }
    fn u32(&mut self) -> Result<usize> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()) as usize)
    }
    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
    fn list(&mut self) -> Result<Vec<usize>> {
        let n = self.u32()?;
        (0..n).map(|_| self.u32()).collect()
    }
    fn bad(&self, reason: impl Into<String>) -> Error {
        Error::Checkpoint { path: self.path.to_path_buf(), reason: reason.into() }
    }
}

pub fn save_checkpoint<T: Real>(path: &Path, model: &Model<T>, standardizer: Option<&Standardizer>) -> Result<()> {
    let mut w = Writer(MAGIC.to_vec());
    w.u8(T::DTYPE);
    match &model.spec {
        ModelSpec::Mlp(s) => {
            w.u8(0);
            w.u32(s.input_dim);
            w.list(&s.hidden);
            w.u32(s.n_classes);
        }
        ModelSpec::Linear(s) => {
            w.u8(1);
            w.u32(s.input_dim);
            w.u32(s.n_classes);
        }
        ModelSpec::Cnn(s) => {
            w.u8(2);
            w.u32(s.sample_rate as usize);
            w.f64(s.first_kernel_ms);
            w.f64(s.first_stride_ms);
            w.u32(s.first_filters);
            w.u32(s.conv_layers.len());
            for c in &s.conv_layers {
                [c.kernel, c.stride, c.filters, c.pad].iter().for_each(|&v| w.u32(v));
            }
            w.list(&s.fc_hidden);
            w.u32(s.n_classes);
        }
    }
    w.u32(model.params.len());
    for p in &model.params {
        w.list(&p.shape);
        p.data.iter().for_each(|v| v.write_le(&mut w.0));
    }
    match standardizer {
        Some(s) => {
            w.u8(1);
            w.u32(s.mean.len());
            s.mean.iter().chain(&s.std).for_each(|&v| w.f64(v));
        }
        None => w.u8(0),
    }
    fs::write(path, w.0).map_err(|e| Error::io(path, e))
}

pub fn load_checkpoint<T: Real>(path: &Path) -> Result<(Model<T>, Option<Standardizer>)> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    if bytes.len() < 4 || &bytes[..4] != MAGIC {
        return Err(Error::BadMagic { path: path.to_path_buf(), expected: "MKM1" });
    }
    let mut r = Reader { bytes: &bytes, pos: 4, path };
    let dtype = r.u8()?;
    if dtype != T::DTYPE {
        return Err(r.bad(format!("stored element width {dtype} bytes, requested {}", T::DTYPE)));
    }
    let spec = match r.u8()? {
        0 => ModelSpec::Mlp(MlpSpec { input_dim: r.u32()?, hidden: r.list()?, n_classes: r.u32()? }),
        1 => ModelSpec::Linear(LinearProbeSpec { input_dim: r.u32()?, n_classes: r.u32()? }),
        2 => {
            let sample_rate = r.u32()? as u32;
            let first_kernel_ms = r.f64()?;
            let first_stride_ms = r.f64()?;
            let first_filters = r.u32()?;
            let n_conv = r.u32()?;
            let conv_layers = (0..n_conv)
                .map(|_| {
                    Ok(ConvLayerSpec { kernel: r.u32()?, stride: r.u32()?, filters: r.u32()?, pad: r.u32()? })
                })
                .collect::<Result<Vec<_>>>()?;
            ModelSpec::Cnn(CnnSpec {
                sample_rate,
                first_kernel_ms,
                first_stride_ms,
                first_filters,
                conv_layers,
                fc_hidden: r.list()?,
                n_classes: r.u32()?,
            })
        }
        k => return Err(r.bad(format!("unknown model kind {k}"))),
    };
    let mut model = Model::<T>::init(&spec, 0)?;
    let n = r.u32()?;
    if n != model.params.len() {
        return Err(r.bad(format!("{n} tensors stored, spec needs {}", model.params.len())));
    }
    for p in model.params.iter_mut() {
        let shape = r.list()?;
        if shape != p.shape {
            return Err(r.bad(format!("tensor shape {shape:?}, spec needs {:?}", p.shape)));
        }
        let raw = r.take(p.data.len() * T::BYTES)?;
        for (v, chunk) in p.data.iter_mut().zip(raw.chunks_exact(T::BYTES)) {
            *v = T::read_le(chunk);
        }
    }
    let standardizer = match r.u8()? {
        0 => None,
        _ => {
            let d = r.u32()?;
            let mean = (0..d).map(|_| r.f64()).collect::<Result<Vec<_>>>()?;
            let std = (0..d).map(|_| r.f64()).collect::<Result<Vec<_>>>()?;
            Some(Standardizer { mean, std })
        }
    };
    if r.pos != bytes.len() {
        return Err(r.bad("trailing bytes"));
    }
    Ok((model, standardizer))
}
