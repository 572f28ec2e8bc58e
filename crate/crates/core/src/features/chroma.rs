use ndarray::Array2;

use super::{FeatureKind, FrameSeries};
use crate::spectral::Spectrogram;
use crate::{Error, Result};

/// Pitch-class names, index 0 = C.
pub const PITCH_CLASSES: [&str; 12] = [
    "C", "C#", "D", "D#", "E", "F", "F#", "G", "G#", "A", "A#", "B",
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChromaParams {
    /// Reference frequency of A4 (MIDI 69).
    pub a4_hz: f64,
    /// Bins below this frequency are ignored (default C1).
    pub fmin_hz: f64,
}

impl Default for ChromaParams {
    fn default() -> Self {
        Self {
            a4_hz: 440.0,
            fmin_hz: 32.7,
        }
    }
}

/// Nearest equal-tempered pitch class of `f_hz` (0 = C, 9 = A).
pub fn pitch_class(f_hz: f64, a4_hz: f64) -> usize {
    let midi = (12.0 * (f_hz / a4_hz).log2() + 69.0).round() as i64;
    midi.rem_euclid(12) as usize
}

/// 12-bin chromagram: each bin's power is added to its nearest pitch class,
/// then every frame is divided by its largest entry (silent frames stay 0).
pub fn chroma(spec: &Spectrogram, params: &ChromaParams) -> Result<FrameSeries> {
    if spec.n_frames() == 0 {
        return Err(Error::invalid("chroma of an empty spectrogram"));
    }
    if params.a4_hz.is_nan()
        || params.a4_hz <= 0.0
        || params.fmin_hz.is_nan()
        || params.fmin_hz <= 0.0
    {
        return Err(Error::invalid("chroma reference and fmin must be positive"));
    }
    let power = spec.to_power();
    let classes: Vec<Option<usize>> = (0..spec.n_bins())
        .map(|k| {
            let f = spec.bin_hz(k);
            (f >= params.fmin_hz).then(|| pitch_class(f, params.a4_hz))
        })
        .collect();

    let mut out = Array2::zeros((12, spec.n_frames()));
    for (t, col) in power.values().columns().into_iter().enumerate() {
        for (p, class) in col.iter().zip(&classes) {
            if let Some(c) = class {
                out[[*c, t]] += p;
            }
        }
        let max = out.column(t).fold(0.0f64, |m, v| m.max(*v));
        if max > 0.0 {
            out.column_mut(t).mapv_inplace(|v| v / max);
        }
    }
    Ok(FrameSeries {
        values: out,
        kind: FeatureKind::Chroma,
        frame_rate_hz: spec.frame_rate_hz(),
    })
}
