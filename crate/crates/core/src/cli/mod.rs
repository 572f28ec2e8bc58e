//! Command-line orchestration: `preprocess`, `extract`, `summarize`,
//! `classify` and `report`, each writing deterministic CSV/JSON artifacts and
//! a produced-files manifest into the output directory.

mod args;
mod pipeline;
mod produced;
pub mod synth;

use std::ffi::OsString;
use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

pub use args::OUT_ENV;
pub use produced::{ProducedFile, ProducedManifest};

use crate::audio_io::WavFormat;
use crate::classify::Protocol;
use crate::dataset::ExtractConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Preprocess,
    Extract,
    Summarize,
    Classify,
    Report,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Preprocess => "preprocess",
            Command::Extract => "extract",
            Command::Summarize => "summarize",
            Command::Classify => "classify",
            Command::Report => "report",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KnnConfig {
    pub k: usize,
    pub test_fraction: f64,
    pub seed: u64,
    pub protocol: Protocol,
}

impl Default for KnnConfig {
    fn default() -> Self {
        Self {
            k: 3,
            test_fraction: 1.0 / 3.0,
            seed: 0,
            protocol: Protocol::Split,
        }
    }
}

/// One fully resolved invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub manifest_path: Option<PathBuf>,
    /// Feature table to classify instead of extracting from a manifest.
    pub features_table: Option<PathBuf>,
    pub output_dir: PathBuf,
    pub extract: ExtractConfig,
    pub knn: KnnConfig,
    pub feature_subset: Option<Vec<String>>,
    /// Worker threads; 0 means one per core.
    pub jobs: usize,
    pub wav_format: WavFormat,
}

impl RunConfig {
    pub fn new(
        command: Command,
        manifest_path: impl Into<PathBuf>,
        output_dir: impl Into<PathBuf>,
    ) -> Self {
        Self {
            command,
            manifest_path: Some(manifest_path.into()),
            features_table: None,
            output_dir: output_dir.into(),
            extract: ExtractConfig::default(),
            knn: KnnConfig::default(),
            feature_subset: None,
            jobs: 0,
            wav_format: WavFormat::default(),
        }
    }

    pub fn validate(&self) -> Result<(), UsageError> {
        let usage = |e: crate::Error| UsageError(e.to_string());
        self.extract.preprocess.validate().map_err(usage)?;
        self.extract.stft.validate().map_err(usage)?;
        if self.extract.n_mels == 0 || self.extract.n_mels > self.extract.stft.n_bins() {
            return Err(UsageError(format!(
                "--n-mels must be in 1..={}",
                self.extract.stft.n_bins()
            )));
        }
        if self.extract.n_mfcc == 0 || self.extract.n_mfcc > self.extract.n_mels {
            return Err(UsageError(format!(
                "--n-mfcc must be in 1..={}",
                self.extract.n_mels
            )));
        }
        if self.knn.k == 0 {
            return Err(UsageError("--k must be at least 1".into()));
        }
        if !(self.knn.test_fraction > 0.0 && self.knn.test_fraction < 1.0) {
            return Err(UsageError(
                "--test-fraction must be strictly between 0 and 1".into(),
            ));
        }
        if let Some(subset) = &self.feature_subset {
            if subset.is_empty() {
                return Err(UsageError("--features needs at least one name".into()));
            }
        }
        let needs_source = self.manifest_path.is_none()
            && !(self.command == Command::Classify && self.features_table.is_some());
        if needs_source {
            let hint = if self.command == Command::Classify {
                " (or --table)"
            } else {
                ""
            };
            return Err(UsageError(format!(
                "{} requires --manifest{hint}",
                self.command.name()
            )));
        }
        Ok(())
    }
}

/// Bad flags or an inconsistent configuration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

#[derive(Debug)]
pub enum CliError {
    Usage(UsageError),
    Data(crate::Error),
}

impl CliError {
    /// 1 for usage errors, 2 for data errors.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(e) => write!(f, "usage error: {e}"),
            CliError::Data(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<UsageError> for CliError {
    fn from(e: UsageError) -> Self {
        CliError::Usage(e)
    }
}

impl From<crate::Error> for CliError {
    fn from(e: crate::Error) -> Self {
        CliError::Data(e)
    }
}

/// Execute one command and return what it wrote.
pub fn run(config: &RunConfig) -> Result<ProducedManifest, CliError> {
    config.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.jobs)
        .build()
        .map_err(|e| UsageError(format!("cannot start {} worker threads: {e}", config.jobs)))?;
    pool.install(|| pipeline::run(config))
}

/// Parse `args` (including the program name), run, and map the outcome to an
/// exit status. Diagnostics go to stderr.
pub fn main_with_args<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match args::Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let outcome = match cli.command {
        args::CliCommand::SynthCorpus(a) => synth::write_corpus(
            &a.out,
            &synth::SynthSpec {
                seed: a.seed,
                duration_s: a.duration,
                sample_rate_hz: a.sample_rate,
            },
        )
        .map(|records| eprintln!("wrote {} tracks to {}", records.len(), a.out.display()))
        .map_err(CliError::from),
        args::CliCommand::Preprocess(a) => dispatch(a, Command::Preprocess),
        args::CliCommand::Extract(a) => dispatch(a, Command::Extract),
        args::CliCommand::Summarize(a) => dispatch(a, Command::Summarize),
        args::CliCommand::Classify(a) => dispatch(a, Command::Classify),
        args::CliCommand::Report(a) => dispatch(a, Command::Report),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("vgmfeat: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn dispatch(a: args::PipelineArgs, command: Command) -> Result<(), CliError> {
    let cfg = a.into_config(command)?;
    let produced = run(&cfg)?;
    println!(
        "{}: wrote {} files to {} (listed in {})",
        command.name(),
        produced.files.len(),
        cfg.output_dir.display(),
        ProducedManifest::file_name(command.name())
    );
    Ok(())
}
