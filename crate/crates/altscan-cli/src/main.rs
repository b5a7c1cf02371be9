//! `altscan`: detect structured language alternation in document corpora.
//!
//! Subcommands mirror the pipeline: `synth` or `prepare` produce a corpus,
//! `train`/`eval` fit and score language-ID models, `analyze` runs
//! windowing → inference → spectra → clustering, and `plot` renders the
//! artifacts. Exit codes: 0 success, 1 usage or configuration error,
//! 2 data error, 3 internal invariant violation.

mod analyze;
mod config;
mod error;
mod io;
mod plot;
mod prepare;
mod synth;
mod train;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::config::PipelineConfig;
use crate::error::CliResult;

#[derive(Parser)]
#[command(name = "altscan", version, about = "Detect structured language alternation in document corpora")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic corpus with ground-truth pattern tags
    Synth(CommonArgs),
    /// Ingest a manifest and emit labeled single-script training segments
    Prepare(CommonArgs),
    /// Train language-ID models and report held-out macro F1
    Train(CommonArgs),
    /// Evaluate a stored model on labeled segments
    Eval(EvalArgs),
    /// Window, infer, transform, and cluster a corpus
    Analyze(AnalyzeArgs),
    /// Emit CSV and SVG plot data from analysis artifacts
    Plot(PlotArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// Flat JSON config file; flags override file keys
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    overrides: Overrides,
}

/// Flag mirror of [`PipelineConfig`]; any flag given here wins over the
/// config file.
#[derive(Args, Default)]
struct Overrides {
    /// Words per window
    #[arg(long)]
    window_size: Option<usize>,
    /// Break windows at script-span boundaries
    #[arg(long)]
    script_windows: bool,
    /// Model family: nb, trigram, hashed, or all
    #[arg(long)]
    model: Option<String>,
    /// Spectrum feature length
    #[arg(long)]
    bins: Option<usize>,
    /// Amplitude taper: none or hann
    #[arg(long)]
    taper: Option<String>,
    /// Fixed cluster count (skips the elbow scan)
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    k_min: Option<usize>,
    #[arg(long)]
    k_max: Option<usize>,
    /// K-means restarts per k
    #[arg(long)]
    restarts: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads for analyze (default: all cores)
    #[arg(long)]
    jobs: Option<usize>,
    /// Held-out fraction for train
    #[arg(long)]
    test_fraction: Option<f64>,
    /// Drop documents dated before this year
    #[arg(long)]
    min_year: Option<i32>,
    /// Drop languages with fewer manifest documents than this
    #[arg(long)]
    min_lang_docs: Option<usize>,
    /// Temporal sampling: year buckets per language
    #[arg(long)]
    sample_buckets: Option<usize>,
    /// Temporal sampling: extra random documents per language
    #[arg(long)]
    sample_extra: Option<usize>,
    /// Label for expert-curated positive documents
    #[arg(long)]
    positive_label: Option<String>,
    /// File of positive document ids, one per line
    #[arg(long)]
    positive_ids: Option<String>,
    /// Synthetic generator spec (synth)
    #[arg(long)]
    spec: Option<String>,
    /// Corpus manifest JSONL
    #[arg(long)]
    manifest: Option<String>,
    /// Directory manifest paths are relative to (default: manifest's parent)
    #[arg(long)]
    base_dir: Option<String>,
    /// Labeled segments JSONL (prepare output, train/eval input)
    #[arg(long)]
    segments: Option<String>,
    /// Stored model file
    #[arg(long)]
    model_file: Option<String>,
    /// Output directory
    #[arg(long)]
    out_dir: Option<String>,
}

#[derive(Args)]
struct EvalArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Write the eval report here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct AnalyzeArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Run a single stage: grids, signals, features, or cluster
    #[arg(long)]
    only: Option<String>,
}

#[derive(Args)]
struct PlotArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Directory of analyze artifacts (default: the configured out_dir)
    #[arg(long)]
    artifacts: Option<PathBuf>,
    /// Document to plot
    #[arg(long)]
    doc_id: Option<String>,
    /// Plot the k-vs-inertia elbow curve instead of one document
    #[arg(long)]
    elbow: bool,
}

impl Overrides {
    fn apply(&self, config: &mut PipelineConfig) {
        if let Some(v) = self.window_size {
            config.window_size = v;
        }
        if self.script_windows {
            config.script_windows = true;
        }
        if let Some(v) = &self.model {
            config.model = v.clone();
        }
        if let Some(v) = self.bins {
            config.bin_count = v;
        }
        if let Some(v) = &self.taper {
            config.taper = v.clone();
        }
        if let Some(v) = self.k {
            config.k = Some(v);
        }
        if let Some(v) = self.k_min {
            config.k_min = v;
        }
        if let Some(v) = self.k_max {
            config.k_max = v;
        }
        if let Some(v) = self.restarts {
            config.restarts = v;
        }
        if let Some(v) = self.seed {
            config.seed = v;
        }
        if let Some(v) = self.jobs {
            config.jobs = Some(v);
        }
        if let Some(v) = self.test_fraction {
            config.test_fraction = v;
        }
        if let Some(v) = self.min_year {
            config.min_year = Some(v);
        }
        if let Some(v) = self.min_lang_docs {
            config.min_lang_docs = v;
        }
        if let Some(v) = self.sample_buckets {
            config.sample_buckets = Some(v);
        }
        if let Some(v) = self.sample_extra {
            config.sample_extra = v;
        }
        if let Some(v) = &self.positive_label {
            config.positive_label = Some(v.clone());
        }
        if let Some(v) = &self.positive_ids {
            config.positive_ids = Some(v.clone());
        }
        if let Some(v) = &self.spec {
            config.synth_spec = Some(v.clone());
        }
        if let Some(v) = &self.manifest {
            config.manifest = Some(v.clone());
        }
        if let Some(v) = &self.base_dir {
            config.base_dir = Some(v.clone());
        }
        if let Some(v) = &self.segments {
            config.segments = Some(v.clone());
        }
        if let Some(v) = &self.model_file {
            config.model_file = Some(v.clone());
        }
        if let Some(v) = &self.out_dir {
            config.out_dir = Some(v.clone());
        }
    }
}

fn resolve(common: &CommonArgs) -> CliResult<PipelineConfig> {
    let mut config = PipelineConfig::load(common.config.as_deref())?;
    common.overrides.apply(&mut config);
    config.validate()?;
    Ok(config)
}

fn run(cli: Cli) -> CliResult<()> {
    match &cli.command {
        Command::Synth(common) => synth::cmd_synth(&resolve(common)?),
        Command::Prepare(common) => prepare::cmd_prepare(&resolve(common)?),
        Command::Train(common) => train::cmd_train(&resolve(common)?),
        Command::Eval(args) => train::cmd_eval(&resolve(&args.common)?, args.out.as_deref()),
        Command::Analyze(args) => {
            analyze::cmd_analyze(&resolve(&args.common)?, args.only.as_deref())
        }
        Command::Plot(args) => plot::cmd_plot(
            &resolve(&args.common)?,
            args.artifacts.as_deref(),
            args.doc_id.as_deref(),
            args.elbow,
        ),
    }
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    if let Err(e) = run(cli) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
