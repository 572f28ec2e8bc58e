//! Frame-level feature extractors and their summary statistics.

mod centroid;
mod chroma;
mod mfcc;
mod tempo;
mod zcr;

pub use centroid::spectral_centroid;
pub use chroma::{chroma, pitch_class, ChromaParams, PITCH_CLASSES};
pub use mfcc::{dct2_orthonormal, log_mel, mfcc, LOG_FLOOR};
pub use tempo::{tempo_bpm, tempo_from_spectrogram, TempoEstimate, TempoRange};
pub use zcr::zero_crossing_rate;

use ndarray::{Array1, Array2, Axis};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FeatureKind {
    ZeroCrossingRate,
    SpectralCentroid,
    Chroma,
    Mfcc,
}

/// A `d x n_frames` matrix of per-frame feature values.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameSeries {
    pub values: Array2<f64>,
    pub kind: FeatureKind,
    pub frame_rate_hz: f64,
}

impl FrameSeries {
    pub fn dim(&self) -> usize {
        self.values.nrows()
    }

    pub fn n_frames(&self) -> usize {
        self.values.ncols()
    }

    /// Per-row arithmetic mean over frames.
    pub fn mean(&self) -> Array1<f64> {
        self.values
            .mean_axis(Axis(1))
            .unwrap_or_else(|| Array1::zeros(self.dim()))
    }

    /// Per-row population standard deviation over frames.
    pub fn std(&self) -> Array1<f64> {
        if self.n_frames() == 0 {
            return Array1::zeros(self.dim());
        }
        let mean = self.mean();
        Array1::from_iter(self.values.outer_iter().zip(mean.iter()).map(|(row, m)| {
            (row.iter().map(|v| (v - m).powi(2)).sum::<f64>() / row.len() as f64).sqrt()
        }))
    }

    /// Per-row `max - min` over frames.
    pub fn range(&self) -> Array1<f64> {
        Array1::from_iter(self.values.outer_iter().map(|row| {
            let (lo, hi) = row
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
                    (lo.min(v), hi.max(v))
                });
            if lo.is_finite() {
                hi - lo
            } else {
                0.0
            }
        }))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn aggregate_statistics() {
        let s = FrameSeries {
            values: array![[1.0, 3.0, 5.0], [2.0, 2.0, 2.0]],
            kind: FeatureKind::Mfcc,
            frame_rate_hz: 10.0,
        };
        assert_eq!(s.mean(), array![3.0, 2.0]);
        assert!((s.std()[0] - (8.0f64 / 3.0).sqrt()).abs() < 1e-15);
        assert_eq!(s.std()[1], 0.0);
        assert_eq!(s.range(), array![4.0, 0.0]);
    }
}
