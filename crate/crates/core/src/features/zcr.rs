use ndarray::Array2;

use super::{FeatureKind, FrameSeries};
use crate::audio_io::AudioBuffer;
use crate::{Error, Result};

/// Fraction of adjacent sample pairs whose signs differ, per frame, with
/// `sign(0) = +1`. Frames start at multiples of `hop`; only whole frames are
/// used unless the buffer is shorter than one frame, in which case the whole
/// buffer forms a single frame.
pub fn zero_crossing_rate(buf: &AudioBuffer, frame_len: usize, hop: usize) -> Result<FrameSeries> {
    if frame_len < 2 {
        return Err(Error::invalid(format!(
            "ZCR frame length must be >= 2, got {frame_len}"
        )));
    }
    if hop == 0 {
        return Err(Error::invalid("ZCR hop must be positive"));
    }
    if buf.is_empty() {
        return Err(Error::invalid("ZCR of an empty buffer"));
    }
    let x = buf.samples();
    let crossings: Vec<u32> = x
        .windows(2)
        .map(|w| ((w[0] < 0.0) != (w[1] < 0.0)) as u32)
        .collect();

    let rates: Vec<f64> = if x.len() < frame_len {
        let pairs = x.len().saturating_sub(1);
        let count: u32 = crossings.iter().sum();
        vec![if pairs == 0 {
            0.0
        } else {
            count as f64 / pairs as f64
        }]
    } else {
        let n_frames = 1 + (x.len() - frame_len) / hop;
        (0..n_frames)
            .map(|f| {
                let start = f * hop;
                let count: u32 = crossings[start..start + frame_len - 1].iter().sum();
                count as f64 / (frame_len - 1) as f64
            })
            .collect()
    };
    let n = rates.len();
    Ok(FrameSeries {
        values: Array2::from_shape_vec((1, n), rates).expect("1 x n shape"),
        kind: FeatureKind::ZeroCrossingRate,
        frame_rate_hz: buf.sample_rate_hz() as f64 / hop as f64,
    })
}
