use std::path::Path;

use super::{TrackFeatures, TrackRecord, N_CHROMA, N_MFCC};
use crate::audio_io::{
    center_trim, center_trim_or_pad, decode_wav, peak_normalize, resample, AudioBuffer,
    PreprocessSpec,
};
use crate::features::{
    chroma, mfcc, spectral_centroid, tempo_from_spectrogram, zero_crossing_rate, ChromaParams,
    FrameSeries, TempoEstimate, TempoRange,
};
use crate::spectral::{
    apply_filterbank, mel_filterbank, stft, FilterNorm, MelScale, SpectrumKind, StftParams,
};
use crate::{Error, Result};

/// Everything that controls per-track extraction.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtractConfig {
    pub preprocess: PreprocessSpec,
    pub stft: StftParams,
    pub n_mels: usize,
    pub n_mfcc: usize,
    pub mel_scale: MelScale,
    pub filter_norm: FilterNorm,
    pub chroma: ChromaParams,
    pub tempo_range: TempoRange,
}

impl Default for ExtractConfig {
    fn default() -> Self {
        Self {
            preprocess: PreprocessSpec::default(),
            stft: StftParams::default(),
            n_mels: 128,
            n_mfcc: N_MFCC,
            mel_scale: MelScale::Htk,
            filter_norm: FilterNorm::Peak,
            chroma: ChromaParams::default(),
            tempo_range: TempoRange::default(),
        }
    }
}

/// Aggregated features plus the per-frame series they were computed from.
#[derive(Debug, Clone)]
pub struct TrackAnalysis {
    pub features: TrackFeatures,
    pub zcr: FrameSeries,
    pub centroid: FrameSeries,
    pub chroma: FrameSeries,
    pub mfcc: FrameSeries,
    pub tempo: TempoEstimate,
}

/// Extract features from an already preprocessed clip.
pub fn analyze_buffer(clip: &AudioBuffer, cfg: &ExtractConfig) -> Result<TrackAnalysis> {
    let magnitude = stft(clip, &cfg.stft, SpectrumKind::Magnitude)?;
    let power = magnitude.to_power();

    let zcr = zero_crossing_rate(clip, cfg.stft.n_fft, cfg.stft.hop)?;
    let centroid = spectral_centroid(&magnitude)?;
    let chroma = chroma(&power, &cfg.chroma)?;
    let nyquist = clip.sample_rate_hz() as f64 / 2.0;
    let bank = mel_filterbank(
        clip.sample_rate_hz(),
        cfg.stft.n_fft,
        cfg.n_mels,
        0.0,
        nyquist,
        cfg.mel_scale,
        cfg.filter_norm,
    )?;
    let mel = apply_filterbank(&power, &bank)?;
    let mfcc = mfcc(&mel, cfg.n_mfcc, magnitude.frame_rate_hz())?;
    let tempo = tempo_from_spectrogram(&magnitude, cfg.tempo_range)?;

    let chroma_mean: [f64; N_CHROMA] = chroma.mean().to_vec().try_into().expect("12 chroma rows");
    let features = TrackFeatures {
        tempo_bpm: tempo.bpm,
        zcr_mean: zcr.mean()[0],
        zcr_std: zcr.std()[0],
        centroid_mean_hz: centroid.mean()[0],
        centroid_std_hz: centroid.std()[0],
        chroma_mean,
        mfcc_mean: mfcc.mean().to_vec(),
        mfcc_range: mfcc.range().to_vec(),
    };
    Ok(TrackAnalysis {
        features,
        zcr,
        centroid,
        chroma,
        mfcc,
        tempo,
    })
}

/// Read, decode and preprocess one file; errors carry the path and stage.
pub fn load_and_preprocess(path: &Path, spec: &PreprocessSpec) -> Result<AudioBuffer> {
    spec.validate()?;
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e).in_track(path, "read"))?;
    let decoded = decode_wav(&bytes).map_err(|e| e.in_track(path, "decode"))?;
    if decoded.is_empty() {
        return Err(Error::invalid("no samples").in_track(path, "decode"));
    }
    let resampled =
        resample(&decoded, spec.target_sample_rate_hz).map_err(|e| e.in_track(path, "resample"))?;
    let normalized = peak_normalize(&resampled, spec.target_peak_dbfs)
        .map_err(|e| e.in_track(path, "normalize"))?;
    let trimmed = if spec.pad_short {
        center_trim_or_pad(&normalized, spec.clip_duration_s)
    } else {
        center_trim(&normalized, spec.clip_duration_s)
    };
    trimmed.map_err(|e| e.in_track(path, "trim"))
}

/// Full chain for the file at `path`.
pub fn analyze_track(path: &Path, cfg: &ExtractConfig) -> Result<TrackAnalysis> {
    let clip = load_and_preprocess(path, &cfg.preprocess)?;
    analyze_buffer(&clip, cfg).map_err(|e| e.in_track(path, "features"))
}

/// Full chain for one manifest record, returning only the aggregate vector.
pub fn extract_track(rec: &TrackRecord, cfg: &ExtractConfig) -> Result<TrackFeatures> {
    analyze_track(&rec.path, cfg).map(|a| a.features)
}
