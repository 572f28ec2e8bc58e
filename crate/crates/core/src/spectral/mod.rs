//! Time-frequency analysis: real FFT, centered STFT and mel filterbanks.

mod fft;
mod mel;

pub use fft::{fft_real, RealFft};
pub use mel::{
    apply_filterbank, hz_to_mel, mel_filterbank, mel_to_hz, FilterNorm, MelFilterbank, MelScale,
};

use ndarray::Array2;
use rustfft::num_complex::Complex64;

use crate::audio_io::AudioBuffer;
use crate::{Error, Result};

/// Analysis window applied to each frame before the FFT.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Window {
    /// Periodic Hann, `0.5 - 0.5 cos(2 pi t / n)`.
    #[default]
    Hann,
    Hamming,
    Rectangular,
}

impl Window {
    pub fn coefficients(self, n: usize) -> Vec<f64> {
        let w = |t: usize| {
            let phase = 2.0 * std::f64::consts::PI * t as f64 / n as f64;
            match self {
                Window::Hann => 0.5 - 0.5 * phase.cos(),
                Window::Hamming => 0.54 - 0.46 * phase.cos(),
                Window::Rectangular => 1.0,
            }
        };
        (0..n).map(w).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StftParams {
    pub n_fft: usize,
    pub hop: usize,
    pub window: Window,
}

impl Default for StftParams {
    fn default() -> Self {
        Self {
            n_fft: 2048,
            hop: 512,
            window: Window::Hann,
        }
    }
}

impl StftParams {
    pub fn validate(&self) -> Result<()> {
        if !self.n_fft.is_power_of_two() {
            return Err(Error::invalid(format!(
                "n_fft {} is not a power of two",
                self.n_fft
            )));
        }
        if self.hop == 0 || self.hop > self.n_fft {
            return Err(Error::invalid(format!(
                "hop {} must be in 1..={}",
                self.hop, self.n_fft
            )));
        }
        Ok(())
    }

    pub fn n_bins(&self) -> usize {
        self.n_fft / 2 + 1
    }

    /// Number of centered frames for a signal of `len` samples.
    pub fn n_frames(&self, len: usize) -> usize {
        1 + len / self.hop
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpectrumKind {
    Magnitude,
    Power,
}

/// Non-negative `(n_fft/2 + 1) x n_frames` matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrogram {
    values: Array2<f64>,
    params: StftParams,
    sample_rate_hz: u32,
    kind: SpectrumKind,
}

impl Spectrogram {
    /// Wrap an existing matrix; rows must equal `n_fft / 2 + 1` and every
    /// entry must be finite and non-negative.
    pub fn from_values(
        values: Array2<f64>,
        params: StftParams,
        sample_rate_hz: u32,
        kind: SpectrumKind,
    ) -> Result<Self> {
        params.validate()?;
        if values.nrows() != params.n_bins() {
            return Err(Error::invalid(format!(
                "spectrogram has {} rows, expected {}",
                values.nrows(),
                params.n_bins()
            )));
        }
        if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::invalid(
                "spectrogram entries must be finite and non-negative",
            ));
        }
        if sample_rate_hz == 0 {
            return Err(Error::invalid("sample rate must be positive"));
        }
        Ok(Self {
            values,
            params,
            sample_rate_hz,
            kind,
        })
    }

    pub fn values(&self) -> &Array2<f64> {
        &self.values
    }

    pub fn params(&self) -> &StftParams {
        &self.params
    }

    pub fn sample_rate_hz(&self) -> u32 {
        self.sample_rate_hz
    }

    pub fn kind(&self) -> SpectrumKind {
        self.kind
    }

    pub fn n_bins(&self) -> usize {
        self.values.nrows()
    }

    pub fn n_frames(&self) -> usize {
        self.values.ncols()
    }

    pub fn frame_rate_hz(&self) -> f64 {
        self.sample_rate_hz as f64 / self.params.hop as f64
    }

    /// Centre frequency of row `k`, `k * sr / n_fft`.
    pub fn bin_hz(&self, k: usize) -> f64 {
        k as f64 * self.sample_rate_hz as f64 / self.params.n_fft as f64
    }

    pub fn to_power(&self) -> Spectrogram {
        match self.kind {
            SpectrumKind::Power => self.clone(),
            SpectrumKind::Magnitude => Spectrogram {
                values: self.values.mapv(|v| v * v),
                kind: SpectrumKind::Power,
                ..self.clone()
            },
        }
    }

    pub fn to_magnitude(&self) -> Spectrogram {
        match self.kind {
            SpectrumKind::Magnitude => self.clone(),
            SpectrumKind::Power => Spectrogram {
                values: self.values.mapv(f64::sqrt),
                kind: SpectrumKind::Magnitude,
                ..self.clone()
            },
        }
    }
}

/// Index into a signal of length `n` extended by mirror reflection about its
/// end samples (the edge samples themselves are not repeated).
fn reflect_index(i: isize, n: usize) -> usize {
    if n == 1 {
        return 0;
    }
    let period = 2 * (n as isize - 1);
    let m = i.rem_euclid(period);
    if m < n as isize {
        m as usize
    } else {
        (period - m) as usize
    }
}

/// Short-time Fourier transform with frames centered at `t * hop`
/// (reflect-padded by `n_fft / 2` at both ends).
pub fn stft(buf: &AudioBuffer, params: &StftParams, kind: SpectrumKind) -> Result<Spectrogram> {
    params.validate()?;
    if buf.is_empty() {
        return Err(Error::invalid("cannot analyse an empty buffer"));
    }
    let x = buf.samples();
    let n = x.len();
    let n_fft = params.n_fft;
    let half = (n_fft / 2) as isize;
    let n_frames = params.n_frames(n);
    let window = params.window.coefficients(n_fft);
    let fft = RealFft::new(n_fft)?;

    let mut values = Array2::zeros((params.n_bins(), n_frames));
    let mut frame = vec![0.0; n_fft];
    let mut scratch: Vec<Complex64> = Vec::with_capacity(n_fft);
    let mut spectrum: Vec<Complex64> = Vec::with_capacity(params.n_bins());
    for t in 0..n_frames {
        let origin = (t * params.hop) as isize - half;
        for (j, (f, w)) in frame.iter_mut().zip(&window).enumerate() {
            let i = origin + j as isize;
            let s = if (0..n as isize).contains(&i) {
                x[i as usize]
            } else {
                x[reflect_index(i, n)]
            };
            *f = s * w;
        }
        fft.process_into(&frame, &mut scratch, &mut spectrum)?;
        let mut col = values.column_mut(t);
        for (v, c) in col.iter_mut().zip(&spectrum) {
            *v = match kind {
                SpectrumKind::Magnitude => c.norm(),
                SpectrumKind::Power => c.norm_sqr(),
            };
        }
    }
    Ok(Spectrogram {
        values,
        params: *params,
        sample_rate_hz: buf.sample_rate_hz(),
        kind,
    })
}
