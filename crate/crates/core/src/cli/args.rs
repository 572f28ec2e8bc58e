use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use super::{Command, KnnConfig, RunConfig, UsageError};
use crate::audio_io::{PreprocessSpec, WavFormat};
use crate::classify::Protocol;
use crate::dataset::ExtractConfig;
use crate::spectral::StftParams;

pub const OUT_ENV: &str = "VGMFEAT_OUT";

#[derive(Debug, Parser)]
#[command(
    name = "vgmfeat",
    version,
    about = "Video game music feature extraction and sub-genre classification"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: CliCommand,
}

#[derive(Debug, Subcommand)]
pub enum CliCommand {
    /// Decode, resample, peak-normalize and center-trim every manifest track.
    Preprocess(PipelineArgs),
    /// Write the per-track feature table (CSV and JSON).
    Extract(PipelineArgs),
    /// Write per-genre statistics and per-frame series for plotting.
    Summarize(PipelineArgs),
    /// Evaluate the KNN classifier on a feature table or manifest.
    Classify(PipelineArgs),
    /// Run extract, summarize and classify into one directory.
    Report(PipelineArgs),
    /// Generate a labeled synthetic corpus.
    #[command(hide = true)]
    SynthCorpus(SynthArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ProtocolArg {
    Split,
    Loocv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum WavFormatArg {
    Pcm16,
    Float32,
}

#[derive(Debug, Args)]
pub struct PipelineArgs {
    /// Track manifest CSV with path, game, genre and title columns.
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    /// Feature table written by `extract` (classify only).
    #[arg(long)]
    pub table: Option<PathBuf>,
    /// Output directory.
    #[arg(long, env = OUT_ENV, default_value = "vgmfeat-out")]
    pub out: PathBuf,
    #[arg(long, default_value_t = -5.0, allow_hyphen_values = true)]
    pub peak_dbfs: f64,
    #[arg(long, default_value_t = 15.0)]
    pub clip_seconds: f64,
    #[arg(long, default_value_t = 48_000)]
    pub sample_rate: u32,
    /// Zero-pad tracks shorter than the clip instead of rejecting them.
    #[arg(long)]
    pub pad_short: bool,
    #[arg(long, default_value_t = 2048)]
    pub n_fft: usize,
    #[arg(long, default_value_t = 512)]
    pub hop: usize,
    #[arg(long, default_value_t = 128)]
    pub n_mels: usize,
    #[arg(long, default_value_t = 13)]
    pub n_mfcc: usize,
    #[arg(long, default_value_t = 3)]
    pub k: usize,
    #[arg(long, default_value_t = 1.0 / 3.0)]
    pub test_fraction: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = ProtocolArg::Split)]
    pub protocol: ProtocolArg,
    /// Worker threads for per-track work; 0 uses all cores.
    #[arg(long, default_value_t = 0)]
    pub jobs: usize,
    /// Comma-separated feature names or groups (tempo, zcr, centroid, chroma,
    /// mfcc, mfcc_mean, mfcc_range) used for classification.
    #[arg(long, value_delimiter = ',')]
    pub features: Option<Vec<String>>,
    /// Sample format of WAVs written by `preprocess`.
    #[arg(long, value_enum, default_value_t = WavFormatArg::Float32)]
    pub wav_format: WavFormatArg,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long, env = OUT_ENV, default_value = "vgmfeat-out")]
    pub out: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 20.0)]
    pub duration: f64,
    #[arg(long, default_value_t = 44_100)]
    pub sample_rate: u32,
}

impl PipelineArgs {
    pub fn into_config(self, command: Command) -> Result<RunConfig, UsageError> {
        let features = self.features.map(|names| {
            names
                .into_iter()
                .map(|s| s.trim().to_string())
                .filter(|s| !s.is_empty())
                .collect::<Vec<_>>()
        });
        let cfg = RunConfig {
            command,
            manifest_path: self.manifest,
            features_table: self.table,
            output_dir: self.out,
            extract: ExtractConfig {
                preprocess: PreprocessSpec {
                    target_peak_dbfs: self.peak_dbfs,
                    clip_duration_s: self.clip_seconds,
                    target_sample_rate_hz: self.sample_rate,
                    pad_short: self.pad_short,
                },
                stft: StftParams {
                    n_fft: self.n_fft,
                    hop: self.hop,
                    ..StftParams::default()
                },
                n_mels: self.n_mels,
                n_mfcc: self.n_mfcc,
                ..ExtractConfig::default()
            },
            knn: KnnConfig {
                k: self.k,
                test_fraction: self.test_fraction,
                seed: self.seed,
                protocol: match self.protocol {
                    ProtocolArg::Split => Protocol::Split,
                    ProtocolArg::Loocv => Protocol::Loocv,
                },
            },
            feature_subset: features,
            jobs: self.jobs,
            wav_format: match self.wav_format {
                WavFormatArg::Pcm16 => WavFormat::Pcm16,
                WavFormatArg::Float32 => WavFormat::Float32,
            },
        };
        cfg.validate()?;
        Ok(cfg)
    }
}
