//! catch24 features of a damped sine and of a constant series.

use callscope::audio::Waveform;
use callscope::catch24::{compute_catch24, FEATURE_NAMES};

fn main() -> callscope::Result<()> {
    let sr = 16_000;
    let samples: Vec<f64> = (0..800)
        .map(|t| {
            let s = t as f64 / sr as f64;
            (-30.0 * s).exp() * (std::f64::consts::TAU * 440.0 * s).sin()
        })
        .collect();
    let fv = compute_catch24(&Waveform::new(samples, sr))?;
    for (name, v) in FEATURE_NAMES.iter().zip(&fv.values) {
        println!("{name:<48} {v:>12.6}");
    }

    let flat = compute_catch24(&Waveform::new(vec![0.25; 64], sr))?;
    println!("constant series mask: {}", flat.mask_bits());
    Ok(())
}
