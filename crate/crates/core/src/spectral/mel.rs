use ndarray::Array2;

use super::{Spectrogram, SpectrumKind};
use crate::{Error, Result};

/// Hz-to-mel mapping.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MelScale {
    /// `2595 * log10(1 + f / 700)`.
    #[default]
    Htk,
    /// Linear below 1 kHz, logarithmic above (Auditory Toolbox).
    Slaney,
}

/// Height of each triangular filter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FilterNorm {
    /// Apex at 1.
    #[default]
    Peak,
    /// Unit area: each triangle is scaled by `2 / (f_hi - f_lo)`.
    Area,
}

const SLANEY_F_SP: f64 = 200.0 / 3.0;
const SLANEY_MIN_LOG_HZ: f64 = 1000.0;
const SLANEY_MIN_LOG_MEL: f64 = SLANEY_MIN_LOG_HZ / SLANEY_F_SP;

fn slaney_logstep() -> f64 {
    6.4f64.ln() / 27.0
}

pub fn hz_to_mel(f: f64, scale: MelScale) -> f64 {
    match scale {
        MelScale::Htk => 2595.0 * (1.0 + f / 700.0).log10(),
        MelScale::Slaney if f >= SLANEY_MIN_LOG_HZ => {
            SLANEY_MIN_LOG_MEL + (f / SLANEY_MIN_LOG_HZ).ln() / slaney_logstep()
        }
        MelScale::Slaney => f / SLANEY_F_SP,
    }
}

pub fn mel_to_hz(m: f64, scale: MelScale) -> f64 {
    match scale {
        MelScale::Htk => 700.0 * (10f64.powf(m / 2595.0) - 1.0),
        MelScale::Slaney if m >= SLANEY_MIN_LOG_MEL => {
            SLANEY_MIN_LOG_HZ * (slaney_logstep() * (m - SLANEY_MIN_LOG_MEL)).exp()
        }
        MelScale::Slaney => m * SLANEY_F_SP,
    }
}

/// Triangular filters over the FFT bins, `n_mels x (n_fft/2 + 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MelFilterbank {
    weights: Array2<f64>,
    /// Lower/centre/upper frequency of each filter (`n_mels + 2` points).
    edges_hz: Vec<f64>,
    /// Half-open bin range holding the non-zero weights of each filter.
    support: Vec<(usize, usize)>,
    fmin: f64,
    fmax: f64,
}

impl MelFilterbank {
    pub fn weights(&self) -> &Array2<f64> {
        &self.weights
    }

    pub fn n_mels(&self) -> usize {
        self.weights.nrows()
    }

    pub fn n_bins(&self) -> usize {
        self.weights.ncols()
    }

    pub fn fmin(&self) -> f64 {
        self.fmin
    }

    pub fn fmax(&self) -> f64 {
        self.fmax
    }

    pub fn center_hz(&self) -> &[f64] {
        &self.edges_hz[1..self.edges_hz.len() - 1]
    }
}

/// Build `n_mels` triangular filters whose centres are equally spaced on the
/// chosen mel scale between `fmin` and `fmax`.
pub fn mel_filterbank(
    sample_rate_hz: u32,
    n_fft: usize,
    n_mels: usize,
    fmin: f64,
    fmax: f64,
    scale: MelScale,
    norm: FilterNorm,
) -> Result<MelFilterbank> {
    let nyquist = sample_rate_hz as f64 / 2.0;
    if n_mels == 0 {
        return Err(Error::invalid("n_mels must be positive"));
    }
    if n_fft < 2 {
        return Err(Error::invalid("n_fft must be at least 2"));
    }
    if !(fmin >= 0.0 && fmin < fmax) {
        return Err(Error::invalid(format!(
            "require 0 <= fmin < fmax, got {fmin}..{fmax}"
        )));
    }
    if fmax > nyquist {
        return Err(Error::invalid(format!(
            "fmax {fmax} Hz exceeds Nyquist {nyquist} Hz"
        )));
    }

    let n_bins = n_fft / 2 + 1;
    let lo = hz_to_mel(fmin, scale);
    let hi = hz_to_mel(fmax, scale);
    let edges_hz: Vec<f64> = (0..n_mels + 2)
        .map(|i| mel_to_hz(lo + (hi - lo) * i as f64 / (n_mels + 1) as f64, scale))
        .collect();
    let bin_hz = |k: usize| k as f64 * sample_rate_hz as f64 / n_fft as f64;

    let mut weights = Array2::zeros((n_mels, n_bins));
    let mut support = Vec::with_capacity(n_mels);
    for m in 0..n_mels {
        let (f_lo, f_c, f_hi) = (edges_hz[m], edges_hz[m + 1], edges_hz[m + 2]);
        let height = match norm {
            FilterNorm::Peak => 1.0,
            FilterNorm::Area => 2.0 / (f_hi - f_lo),
        };
        let mut first = n_bins;
        let mut last = 0;
        for k in 0..n_bins {
            let f = bin_hz(k);
            let rising = (f - f_lo) / (f_c - f_lo);
            let falling = (f_hi - f) / (f_hi - f_c);
            let w = rising.min(falling).max(0.0);
            if w > 0.0 {
                weights[[m, k]] = w * height;
                first = first.min(k);
                last = k + 1;
            }
        }
        support.push(if first < last { (first, last) } else { (0, 0) });
    }
    Ok(MelFilterbank {
        weights,
        edges_hz,
        support,
        fmin,
        fmax,
    })
}

/// `weights x power`, giving an `n_mels x n_frames` matrix.
pub fn apply_filterbank(spec: &Spectrogram, fb: &MelFilterbank) -> Result<Array2<f64>> {
    if spec.kind() != SpectrumKind::Power {
        return Err(Error::invalid("mel filterbank expects a power spectrogram"));
    }
    if spec.n_bins() != fb.n_bins() {
        return Err(Error::invalid(format!(
            "filterbank expects {} bins, spectrogram has {}",
            fb.n_bins(),
            spec.n_bins()
        )));
    }
    let values = spec.values();
    let mut out = Array2::zeros((fb.n_mels(), spec.n_frames()));
    for (m, &(a, b)) in fb.support.iter().enumerate() {
        let w = fb.weights.row(m);
        for t in 0..spec.n_frames() {
            let col = values.column(t);
            out[[m, t]] = (a..b).map(|k| w[k] * col[k]).sum();
        }
    }
    Ok(out)
}
