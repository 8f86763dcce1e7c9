pub mod analysis;
pub mod audio;
pub mod catch24;
pub mod embeddings;
pub mod error;
pub mod eval;
pub mod experiment;
pub mod manifest;
pub mod nnet;
pub mod synthetic;

pub use error::{Error, ErrorCategory, Result};
