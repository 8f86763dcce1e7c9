#![allow(dead_code)]

pub mod catch22_oracle;
pub mod gradcheck;

use serde::Deserialize;

#[derive(Deserialize)]
pub struct GoldenSeries {
    pub kind: String,
    pub x: Vec<f64>,
    pub names: Vec<String>,
    pub values: Vec<f64>,
}

pub fn golden_series() -> Vec<GoldenSeries> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/data/catch22_golden.json");
    let text = std::fs::read_to_string(path).expect("golden fixture");
    serde_json::from_str(&text).expect("golden fixture parses")
}

/// Relative tolerance with an absolute floor near zero.
pub fn close(a: f64, b: f64, rel: f64, abs: f64) -> bool {
    (a - b).abs() <= abs.max(rel * a.abs().max(b.abs()))
}
