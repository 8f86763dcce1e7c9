//! Runs C22 on two synthetic datasets at two rates and tabulates the reports.

use callscope::experiment::{emit_results_table, run_experiment, ExperimentConfig, FeatureKind};
use callscope::manifest::Task;
use callscope::synthetic::{make_synthetic_dataset, SyntheticSpec};

fn main() -> callscope::Result<()> {
    let root = std::env::temp_dir().join("callscope_table");
    let mut reports = Vec::new();
    for (name, snr) in [("clean", 10.0), ("noisy", -15.0)] {
        let spec = SyntheticSpec { count_per_class: 40, snr_db: snr, dataset_name: name.into(), ..Default::default() };
        make_synthetic_dataset(&spec, 5, &root.join(name))?;
        for sr in [44_100, 16_000] {
            for task in [Task::Ctid, Task::Sid] {
                let mut cfg = ExperimentConfig::new(root.join(name).join("manifest.csv"), task, FeatureKind::C22, sr, 1, root.join(format!("runs/{name}_{sr}_{task}")));
                cfg.dataset = Some(name.into());
                reports.push(run_experiment(&cfg)?.report);
            }
        }
    }
    let table = emit_results_table(&reports, &root)?;
    print!("{}", table.to_text());
    Ok(())
}
