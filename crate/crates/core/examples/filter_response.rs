//! Cumulative frequency response of a bank of band-pass filters, or of a
//! trained CNN checkpoint passed as the first argument.

use std::path::Path;

use callscope::analysis::{cumulative_response, write_response_csv, write_response_svg, FilterBank};
use callscope::nnet::{load_checkpoint, ModelSpec};

fn windowed_tone(freq: f64, sr: f64, len: usize) -> Vec<f64> {
    (0..len)
        .map(|t| {
            let w = 0.5 - 0.5 * (std::f64::consts::TAU * t as f64 / (len - 1) as f64).cos();
            w * (std::f64::consts::TAU * freq * t as f64 / sr).cos()
        })
        .collect()
}

fn main() -> callscope::Result<()> {
    let bank = match std::env::args().nth(1) {
        Some(path) => {
            let (model, _) = load_checkpoint::<f32>(Path::new(&path))?;
            let ModelSpec::Cnn(spec) = &model.spec else {
                panic!("{path} is not a CNN checkpoint");
            };
            let filters = model.first_conv_filters().unwrap();
            FilterBank { filters: filters.iter().map(|f| f.iter().map(|&v| v as f64).collect()).collect(), sample_rate: spec.sample_rate }
        }
        None => FilterBank {
            filters: [4000.0, 4000.0, 8000.0, 12_000.0].iter().map(|&f| windowed_tone(f, 44_100.0, 44)).collect(),
            sample_rate: 44_100,
        },
    };
    let r = cumulative_response(&bank)?;
    for khz in [1.0, 4.0, 8.0, 12.0, 16.0, 20.0] {
        println!("{khz:>4} kHz  {:.3}", r.band_mean(khz * 1000.0, 500.0));
    }
    println!("mean {:.3}", r.mean());
    let out = std::env::temp_dir().join("callscope_response");
    write_response_csv(&out.join("freq_response.csv"), &r)?;
    write_response_svg(&out.join("freq_response.svg"), &r)?;
    println!("wrote {}", out.display());
    Ok(())
}
