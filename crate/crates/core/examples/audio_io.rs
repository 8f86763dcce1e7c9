//! Round-trips a tone through a 16-bit WAV, downsamples it and cuts a segment.

use callscope::audio::{read_wav, resample, slice_segment, write_wav_pcm16, ResampleSpec, Waveform};

fn rms(x: &[f64]) -> f64 {
    (x.iter().map(|v| v * v).sum::<f64>() / x.len() as f64).sqrt()
}

fn main() -> callscope::Result<()> {
    let dir = std::env::temp_dir().join("callscope_audio_io");
    std::fs::create_dir_all(&dir).expect("temp dir");
    let sr = 44_100;
    for freq in [3000.0, 12_000.0] {
        let tone: Vec<f64> = (0..sr).map(|t| 0.5 * (std::f64::consts::TAU * freq * t as f64 / sr as f64).sin()).collect();
        let path = dir.join(format!("tone_{freq}.wav"));
        write_wav_pcm16(&path, &Waveform::new(tone, sr as u32))?;

        let w = read_wav(&path)?;
        let low = resample(&w, &ResampleSpec::new(16_000))?;
        let mid = slice_segment(&low, 0.25, 0.75)?;
        println!(
            "{freq} Hz: {} samples at {} Hz -> {} at 16 kHz, rms {:.4} -> {:.4}",
            w.len(),
            w.sample_rate,
            mid.len(),
            rms(&w.samples),
            rms(&mid.samples)
        );
    }
    Ok(())
}
