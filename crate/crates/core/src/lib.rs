//! Feature extraction and sub-genre classification for instrumental video game music.
//!
//! The pipeline runs in five stages:
//!
//! 1. [`audio_io`]: WAV decoding, mono mixdown, windowed-sinc resampling,
//!    peak normalization and a fixed-length window from the middle of the track.
//! 2. [`spectral`]: real FFT, centered STFT and mel filterbanks.
//! 3. [`features`]: zero-crossing rate, spectral centroid, chroma, MFCC and tempo.
//! 4. [`dataset`]: manifests, the per-track feature table and per-genre summaries.
//! 5. [`classify`]: z-score standardization and k-nearest-neighbour evaluation
//!    (stratified split and leave-one-out).
//!
//! The [`cli`] module wires these into the `vgmfeat` command-line tool.

pub mod audio_io;
pub mod classify;
pub mod cli;
pub mod dataset;
mod error;
pub mod features;
pub mod spectral;

pub use error::{Error, Result};
