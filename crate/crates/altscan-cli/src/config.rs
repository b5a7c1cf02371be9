use std::fs;
use std::path::{Path, PathBuf};

use altscan::langid::HashedLinearParams;
use altscan::spectral::Taper;
use serde::{Deserialize, Serialize};

use crate::error::{at_path, CliError, CliResult};

/// Every knob of the pipeline in one flat document. A config file may set
/// any subset of keys; command-line flags override file values; the fully
/// resolved result is written next to each run's outputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    // Windowing.
    pub window_size: usize,
    /// Break windows at script-span boundaries instead of windowing the raw
    /// text.
    pub script_windows: bool,

    // Model family and hyperparameters.
    /// One of "nb", "trigram", "hashed", or "all" (train only).
    pub model: String,
    pub ngram_min: usize,
    pub ngram_max: usize,
    pub alpha: f64,
    pub order: usize,
    pub smoothing: f64,
    pub hash_ngram_min: usize,
    pub hash_ngram_max: usize,
    pub hash_buckets: usize,
    pub hash_dim: usize,
    pub hash_epochs: usize,
    pub hash_learning_rate: f64,
    pub test_fraction: f64,

    // Spectrum features.
    pub bin_count: usize,
    /// "none" or "hann".
    pub taper: String,

    // Clustering.
    /// Fixed cluster count; skips the elbow scan when set.
    pub k: Option<usize>,
    pub k_min: usize,
    pub k_max: usize,
    pub restarts: usize,
    pub max_iter: usize,
    pub tol: f64,

    // Reproducibility and parallelism.
    pub seed: u64,
    pub jobs: Option<usize>,

    // Manifest filtering and temporal sampling (prepare).
    pub min_year: Option<i32>,
    pub min_lang_docs: usize,
    pub sample_buckets: Option<usize>,
    pub sample_extra: usize,
    pub positive_label: Option<String>,
    pub positive_ids: Option<String>,

    // Paths.
    pub synth_spec: Option<String>,
    pub manifest: Option<String>,
    pub base_dir: Option<String>,
    pub segments: Option<String>,
    pub model_file: Option<String>,
    pub out_dir: Option<String>,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            window_size: 50,
            script_windows: false,
            model: "nb".into(),
            ngram_min: 1,
            ngram_max: 3,
            alpha: 0.1,
            order: 3,
            smoothing: 0.1,
            hash_ngram_min: 2,
            hash_ngram_max: 4,
            hash_buckets: 1 << 18,
            hash_dim: 16,
            hash_epochs: 5,
            hash_learning_rate: 0.2,
            test_fraction: 0.2,
            bin_count: 64,
            taper: "none".into(),
            k: None,
            k_min: 1,
            k_max: 10,
            restarts: 10,
            max_iter: 300,
            tol: 1e-6,
            seed: 0,
            jobs: None,
            min_year: None,
            min_lang_docs: 1,
            sample_buckets: None,
            sample_extra: 5,
            positive_label: None,
            positive_ids: None,
            synth_spec: None,
            manifest: None,
            base_dir: None,
            segments: None,
            model_file: None,
            out_dir: None,
        }
    }
}

pub const MODEL_FAMILIES: [&str; 3] = ["nb", "trigram", "hashed"];

impl PipelineConfig {
    pub fn load(path: Option<&Path>) -> CliResult<Self> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = at_path(fs::read_to_string(path), path)?;
        let config: Self = serde_json::from_str(&text)
            .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
        Ok(config)
    }

    pub fn validate(&self) -> CliResult<()> {
        let usage = |msg: String| Err(CliError::Usage(msg));
        if self.window_size == 0 {
            return usage("window_size must be at least 1".into());
        }
        if self.model != "all" && !MODEL_FAMILIES.contains(&self.model.as_str()) {
            return usage(format!(
                "unknown model {:?}; expected nb, trigram, hashed, or all",
                self.model
            ));
        }
        if self.taper != "none" && self.taper != "hann" {
            return usage(format!("unknown taper {:?}; expected none or hann", self.taper));
        }
        Ok(())
    }

    pub fn taper(&self) -> Taper {
        match self.taper.as_str() {
            "hann" => Taper::Hann,
            _ => Taper::None,
        }
    }

    pub fn hashed_params(&self) -> HashedLinearParams {
        HashedLinearParams {
            n_min: self.hash_ngram_min,
            n_max: self.hash_ngram_max,
            bucket_count: self.hash_buckets,
            dim: self.hash_dim,
            epochs: self.hash_epochs,
            learning_rate: self.hash_learning_rate,
            seed: self.seed,
        }
    }

    /// A path the subcommand cannot run without.
    pub fn require(&self, field: &Option<String>, flag: &str) -> CliResult<PathBuf> {
        field.as_deref().map(PathBuf::from).ok_or_else(|| {
            CliError::Usage(format!("missing --{flag} (or the matching config key)"))
        })
    }

    /// Directory documents are resolved against: --base-dir if given, else
    /// the manifest's parent directory.
    pub fn resolve_base_dir(&self, manifest: &Path) -> PathBuf {
        match &self.base_dir {
            Some(dir) => PathBuf::from(dir),
            None => manifest.parent().unwrap_or(Path::new(".")).to_path_buf(),
        }
    }

    pub fn write_resolved(&self, out_dir: &Path) -> CliResult<()> {
        let path = out_dir.join("config.resolved.json");
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        at_path(fs::write(&path, text), &path)
    }
}
