//! Generates the three-tone dataset and runs one experiment on it.
//!
//! cargo run --release --example tone_experiment -- [C22|E2E] [sample_rate] [out_dir]

use std::path::PathBuf;

use callscope::experiment::{run_experiment, ExperimentConfig, FeatureKind};
use callscope::manifest::Task;
use callscope::synthetic::{make_synthetic_dataset, SyntheticSpec};

fn main() -> callscope::Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let args: Vec<String> = std::env::args().collect();
    let feature = match args.get(1).map(String::as_str) {
        Some("E2E") => FeatureKind::E2E,
        _ => FeatureKind::C22,
    };
    let sr: u32 = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(44_100);
    let out = PathBuf::from(args.get(3).cloned().unwrap_or_else(|| "target/tone_experiment".into()));

    let data = out.join("data");
    if !data.join("manifest.csv").exists() {
        make_synthetic_dataset(&SyntheticSpec::default(), 7, &data)?;
    }
    let cfg = ExperimentConfig::new(data.join("manifest.csv"), Task::Ctid, feature, sr, 1, out.join(format!("{feature}_{sr}")));
    let t = std::time::Instant::now();
    let run = run_experiment(&cfg)?;
    println!(
        "{feature} @ {sr} Hz: test UAR {:.2} (chance {:.2}), {} epochs, best {}, {:.0} s",
        run.report.eval.uar,
        run.report.eval.chance,
        run.report.epochs_run,
        run.report.best_epoch,
        t.elapsed().as_secs_f64()
    );
    Ok(())
}
