use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use callscope::analysis::{cumulative_response, write_layer_matrix_svg, write_response_csv, write_response_svg, FilterBank};
use callscope::experiment::{
    collect_reports, emit_results_table, evaluate_checkpoint, extract_features, probe_layers, run_experiment,
    split_only, write_features_csv, ExperimentConfig, ProbeConfig,
};
use callscope::manifest::load_manifest;
use callscope::nnet::load_checkpoint;
use callscope::synthetic::{make_synthetic_dataset, write_synthetic_embeddings, SyntheticEmbeddingSpec, SyntheticSpec};
use callscope::{Error, Result};

#[derive(Parser)]
#[command(name = "callscope", version, about = "Vocalization classification experiments and model diagnostics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Experiment or probe config (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Overrides the config's seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides the config's output directory.
    #[arg(long)]
    output: Option<PathBuf>,
}

impl Common {
    fn experiment(&self) -> Result<ExperimentConfig> {
        let mut cfg = ExperimentConfig::load(&self.config)?;
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(o) = &self.output {
            cfg.output_dir = o.clone();
        }
        Ok(cfg)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Write stratified train/val/test manifests.
    Split(Common),
    /// Write catch24 features of every segment as CSV.
    ExtractFeatures {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long, default_value_t = 44_100)]
        sample_rate: u32,
        #[arg(long)]
        output: PathBuf,
    },
    /// Run a full experiment: split, train, evaluate, write artifacts.
    Train(Common),
    /// Score a saved model on a manifest of segments.
    Eval {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        checkpoint: PathBuf,
        /// Segments to score, e.g. a test split written by `split`.
        #[arg(long)]
        segments: PathBuf,
    },
    /// Linear probes on every embedding layer for each task.
    ProbeLayers {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        svg: bool,
    },
    /// Cumulative frequency response of a CNN's first-layer filters.
    FreqResponse {
        #[arg(long)]
        checkpoint: PathBuf,
        #[arg(long)]
        output: PathBuf,
        #[arg(long)]
        svg: bool,
    },
    /// Generate a tone-in-noise dataset, optionally with embeddings.
    MakeSynthetic {
        /// Dataset spec (TOML); defaults to three tones at 4, 8 and 12 kHz.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        output: PathBuf,
        /// Also write per-layer embeddings under `<output>/embeddings`.
        #[arg(long)]
        embeddings: bool,
    },
    /// Collect report.json files into a results table.
    Report {
        /// Report files or directories searched recursively.
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        #[arg(long)]
        output: PathBuf,
    },
}

fn read_toml<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Split(c) => {
            let split = split_only(&c.experiment()?)?;
            for (class, counts) in &split.class_counts {
                println!("{class}: {} / {} / {}", counts[0], counts[1], counts[2]);
            }
        }
        Command::ExtractFeatures { manifest, sample_rate, output } => {
            let m = load_manifest(&manifest)?;
            let features = extract_features(&m, sample_rate)?;
            write_features_csv(&output, &m, &features)?;
            println!("{} segments -> {}", m.len(), output.display());
        }
        Command::Train(c) => {
            let out = run_experiment(&c.experiment()?)?;
            let e = &out.report.eval;
            println!("test UAR {:.2} (chance {:.2}) -> {}", e.uar, e.chance, out.report_path.display());
        }
        Command::Eval { common, checkpoint, segments } => {
            let cfg = common.experiment()?;
            let report = evaluate_checkpoint(&cfg, &checkpoint, &load_manifest(&segments)?)?;
            fs::create_dir_all(&cfg.output_dir).map_err(|e| Error::Config(e.to_string()))?;
            let path = cfg.output_dir.join("eval.json");
            let json = serde_json::to_string_pretty(&report).map_err(|e| Error::Serialization(e.to_string()))?;
            fs::write(&path, json + "\n").map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
            println!("UAR {:.2} (chance {:.2}) -> {}", report.uar, report.chance, path.display());
        }
        Command::ProbeLayers { common, svg } => {
            let mut cfg = ProbeConfig::load(&common.config)?;
            if let Some(s) = common.seed {
                cfg.seed = s;
            }
            if let Some(o) = common.output {
                cfg.output_dir = o;
            }
            let m = probe_layers(&cfg)?;
            if svg {
                write_layer_matrix_svg(&cfg.output_dir.join("layers.svg"), &m)?;
            }
            for (task, best) in m.tasks.iter().zip(m.best_layers()) {
                println!("{task}: best layer {best}");
            }
        }
        Command::FreqResponse { checkpoint, output, svg } => {
            let (model, _) = load_checkpoint::<f32>(&checkpoint)?;
            let callscope::nnet::ModelSpec::Cnn(spec) = &model.spec else {
                return Err(Error::Config("frequency response needs a CNN checkpoint".into()));
            };
            let filters = model.first_conv_filters().unwrap();
            let bank = FilterBank {
                filters: filters.iter().map(|f| f.iter().map(|&v| v as f64).collect()).collect(),
                sample_rate: spec.sample_rate,
            };
            let r = cumulative_response(&bank)?;
            write_response_csv(&output.join("freq_response.csv"), &r)?;
            if svg {
                write_response_svg(&output.join("freq_response.svg"), &r)?;
            }
            println!("{} filters -> {}", bank.filters.len(), output.display());
        }
        Command::MakeSynthetic { config, seed, output, embeddings } => {
            let spec: SyntheticSpec = match &config {
                Some(p) => read_toml(p)?,
                None => SyntheticSpec::default(),
            };
            let m = make_synthetic_dataset(&spec, seed, &output)?;
            if embeddings {
                write_synthetic_embeddings(&m, &SyntheticEmbeddingSpec::default(), seed, &output.join("embeddings"))?;
            }
            println!("{} segments -> {}", m.len(), output.join("manifest.csv").display());
        }
        Command::Report { inputs, output } => {
            let table = emit_results_table(&collect_reports(&inputs)?, &output)?;
            print!("{}", table.to_text());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.category().exit_code() as u8)
        }
    }
}
