use ndarray::Array2;

use super::{FeatureKind, FrameSeries};
use crate::{Error, Result};

/// Floor added before the logarithm.
pub const LOG_FLOOR: f64 = 1e-10;

/// Natural log of `mel + LOG_FLOOR`, element-wise.
pub fn log_mel(mel_power: &Array2<f64>) -> Array2<f64> {
    mel_power.mapv(|v| (v + LOG_FLOOR).ln())
}

/// Orthonormal DCT-II of `x`, keeping the first `n_out` coefficients:
/// `c_k = s_k * sum_n x_n cos(pi k (2n + 1) / 2N)`, `s_0 = sqrt(1/N)`,
/// `s_k = sqrt(2/N)`.
pub fn dct2_orthonormal(x: &[f64], n_out: usize) -> Vec<f64> {
    DctBasis::new(x.len(), n_out).apply(x)
}

struct DctBasis {
    n: usize,
    rows: Vec<Vec<f64>>,
}

impl DctBasis {
    fn new(n: usize, n_out: usize) -> Self {
        let rows = (0..n_out)
            .map(|k| {
                let scale = if k == 0 {
                    (1.0 / n as f64).sqrt()
                } else {
                    (2.0 / n as f64).sqrt()
                };
                (0..n)
                    .map(|i| {
                        scale
                            * (std::f64::consts::PI * k as f64 * (2 * i + 1) as f64
                                / (2 * n) as f64)
                                .cos()
                    })
                    .collect()
            })
            .collect();
        Self { n, rows }
    }

    fn apply(&self, x: &[f64]) -> Vec<f64> {
        debug_assert_eq!(x.len(), self.n);
        self.rows
            .iter()
            .map(|r| r.iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }
}

/// Cepstral coefficients from an `n_mels x n_frames` mel power matrix.
pub fn mfcc(mel_power: &Array2<f64>, n_mfcc: usize, frame_rate_hz: f64) -> Result<FrameSeries> {
    let n_mels = mel_power.nrows();
    if n_mfcc == 0 || n_mfcc > n_mels {
        return Err(Error::invalid(format!(
            "n_mfcc must be in 1..={n_mels}, got {n_mfcc}"
        )));
    }
    if mel_power.iter().any(|v| !v.is_finite() || *v < 0.0) {
        return Err(Error::invalid("mel power must be finite and non-negative"));
    }
    let basis = DctBasis::new(n_mels, n_mfcc);
    let logs = log_mel(mel_power);
    let mut out = Array2::zeros((n_mfcc, mel_power.ncols()));
    let mut column = vec![0.0; n_mels];
    for (t, col) in logs.columns().into_iter().enumerate() {
        column.iter_mut().zip(col.iter()).for_each(|(d, s)| *d = *s);
        for (k, c) in basis.apply(&column).into_iter().enumerate() {
            out[[k, t]] = c;
        }
    }
    Ok(FrameSeries {
        values: out,
        kind: FeatureKind::Mfcc,
        frame_rate_hz,
    })
}
