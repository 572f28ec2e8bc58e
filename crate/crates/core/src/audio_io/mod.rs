//! Audio decoding and the fixed preprocessing chain applied to every track:
//! decode, mix down to mono, resample, peak-normalize over the whole file,
//! then cut a window out of the middle.

mod resample;
mod wav;

pub use resample::resample;
pub use wav::{decode_wav, encode_wav, WavFormat};

use crate::{Error, Result};

/// Mono sample sequence in full-scale units with its sample rate.
#[derive(Debug, Clone, PartialEq)]
pub struct AudioBuffer {
    samples: Vec<f64>,
    sample_rate_hz: u32,
}

impl AudioBuffer {
    /// Fails if the rate is zero or any sample is NaN/Inf.
    pub fn new(samples: Vec<f64>, sample_rate_hz: u32) -> Result<Self> {
        if sample_rate_hz == 0 {
            return Err(Error::invalid("sample rate must be positive"));
        }
        if let Some(i) = samples.iter().position(|s| !s.is_finite()) {
            return Err(Error::invalid(format!("sample {i} is not finite")));
        }
        Ok(Self {
            samples,
            sample_rate_hz,
        })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }

    pub fn sample_rate_hz(&self) -> u32 {
        self.sample_rate_hz
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn duration_s(&self) -> f64 {
        self.samples.len() as f64 / self.sample_rate_hz as f64
    }

    pub fn peak(&self) -> f64 {
        self.samples.iter().fold(0.0f64, |m, s| m.max(s.abs()))
    }
}

/// Parameters of the preprocessing chain.
#[derive(Debug, Clone, PartialEq)]
pub struct PreprocessSpec {
    pub target_peak_dbfs: f64,
    pub clip_duration_s: f64,
    pub target_sample_rate_hz: u32,
    /// Zero-pad (centered) inputs shorter than the clip instead of rejecting them.
    pub pad_short: bool,
}

impl Default for PreprocessSpec {
    fn default() -> Self {
        Self {
            target_peak_dbfs: -5.0,
            clip_duration_s: 15.0,
            target_sample_rate_hz: 48_000,
            pad_short: false,
        }
    }
}

impl PreprocessSpec {
    pub fn validate(&self) -> Result<()> {
        if self.target_peak_dbfs.is_nan() || self.target_peak_dbfs > 0.0 {
            return Err(Error::invalid(format!(
                "target peak must be <= 0 dBFS, got {}",
                self.target_peak_dbfs
            )));
        }
        if !self.clip_duration_s.is_finite() || self.clip_duration_s <= 0.0 {
            return Err(Error::invalid(format!(
                "clip duration must be positive, got {}",
                self.clip_duration_s
            )));
        }
        if self.target_sample_rate_hz == 0 {
            return Err(Error::invalid("target sample rate must be positive"));
        }
        Ok(())
    }
}

/// Linear amplitude for a level in dBFS.
pub fn dbfs_to_linear(dbfs: f64) -> f64 {
    10f64.powf(dbfs / 20.0)
}

/// Scale by one positive gain so that the absolute peak equals `target_peak_dbfs`.
pub fn peak_normalize(buf: &AudioBuffer, target_peak_dbfs: f64) -> Result<AudioBuffer> {
    if !target_peak_dbfs.is_finite() {
        return Err(Error::invalid("target peak must be finite"));
    }
    let peak = buf.peak();
    if peak == 0.0 {
        return Err(Error::CannotNormalize);
    }
    let target = dbfs_to_linear(target_peak_dbfs);
    let gain = target / peak;
    let samples = buf.samples.iter().map(|s| s * gain).collect();
    Ok(AudioBuffer {
        samples,
        sample_rate_hz: buf.sample_rate_hz,
    })
}

fn clip_len(duration_s: f64, sample_rate_hz: u32) -> Result<usize> {
    if !duration_s.is_finite() || duration_s <= 0.0 {
        return Err(Error::invalid(format!(
            "clip duration must be positive, got {duration_s}"
        )));
    }
    Ok((duration_s * sample_rate_hz as f64).round() as usize)
}

/// Keep exactly `round(duration_s * rate)` samples starting at
/// `floor((n_in - n_out) / 2)`.
pub fn center_trim(buf: &AudioBuffer, duration_s: f64) -> Result<AudioBuffer> {
    let n_out = clip_len(duration_s, buf.sample_rate_hz)?;
    let n_in = buf.samples.len();
    if n_in < n_out {
        return Err(Error::TooShort {
            actual_s: buf.duration_s(),
            required_s: duration_s,
        });
    }
    let start = (n_in - n_out) / 2;
    Ok(AudioBuffer {
        samples: buf.samples[start..start + n_out].to_vec(),
        sample_rate_hz: buf.sample_rate_hz,
    })
}

/// Like [`center_trim`], but inputs shorter than the clip are centered in
/// zeros instead of being rejected.
pub fn center_trim_or_pad(buf: &AudioBuffer, duration_s: f64) -> Result<AudioBuffer> {
    let n_out = clip_len(duration_s, buf.sample_rate_hz)?;
    let n_in = buf.samples.len();
    if n_in >= n_out {
        return center_trim(buf, duration_s);
    }
    let lead = (n_out - n_in) / 2;
    let mut samples = vec![0.0; n_out];
    samples[lead..lead + n_in].copy_from_slice(&buf.samples);
    Ok(AudioBuffer {
        samples,
        sample_rate_hz: buf.sample_rate_hz,
    })
}

/// Resample, normalize (gain measured on the whole file), then trim.
pub fn preprocess(buf: &AudioBuffer, spec: &PreprocessSpec) -> Result<AudioBuffer> {
    spec.validate()?;
    if buf.is_empty() {
        return Err(Error::invalid("empty audio"));
    }
    let resampled = resample(buf, spec.target_sample_rate_hz)?;
    let normalized = peak_normalize(&resampled, spec.target_peak_dbfs)?;
    if spec.pad_short {
        center_trim_or_pad(&normalized, spec.clip_duration_s)
    } else {
        center_trim(&normalized, spec.clip_duration_s)
    }
}
