use ndarray::Array2;

use super::{FeatureKind, FrameSeries};
use crate::spectral::Spectrogram;
use crate::{Error, Result};

/// Magnitude-weighted mean frequency per frame. A frame with zero total
/// magnitude has centroid 0.
pub fn spectral_centroid(spec: &Spectrogram) -> Result<FrameSeries> {
    if spec.n_frames() == 0 {
        return Err(Error::invalid("spectral centroid of an empty spectrogram"));
    }
    let mag = spec.to_magnitude();
    let freqs: Vec<f64> = (0..spec.n_bins()).map(|k| spec.bin_hz(k)).collect();
    let centroids: Vec<f64> = mag
        .values()
        .columns()
        .into_iter()
        .map(|col| {
            let total: f64 = col.sum();
            if total == 0.0 {
                0.0
            } else {
                col.iter().zip(&freqs).map(|(m, f)| m * f).sum::<f64>() / total
            }
        })
        .collect();
    let n = centroids.len();
    Ok(FrameSeries {
        values: Array2::from_shape_vec((1, n), centroids).expect("1 x n shape"),
        kind: FeatureKind::SpectralCentroid,
        frame_rate_hz: spec.frame_rate_hz(),
    })
}
