use crate::audio_io::AudioBuffer;
use crate::spectral::{stft, Spectrogram, SpectrumKind, StftParams};
use crate::{Error, Result};

/// Inclusive tempo search window in BPM.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TempoRange {
    pub low_bpm: f64,
    pub high_bpm: f64,
}

impl Default for TempoRange {
    fn default() -> Self {
        Self {
            low_bpm: 60.0,
            high_bpm: 180.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TempoEstimate {
    pub bpm: f64,
    /// Mean-removed positive spectral flux, one value per STFT frame.
    pub onset_envelope: Vec<f64>,
    pub search_range_bpm: TempoRange,
}

/// Half-wave-rectified frame-to-frame magnitude increase summed over bins.
/// Frame 0 has no predecessor and gets 0.
fn spectral_flux(mag: &Spectrogram) -> Vec<f64> {
    let v = mag.values();
    let mut flux = vec![0.0; mag.n_frames()];
    for (t, slot) in flux.iter_mut().enumerate().skip(1) {
        *slot = v
            .column(t)
            .iter()
            .zip(v.column(t - 1).iter())
            .map(|(cur, prev)| (cur - prev).max(0.0))
            .sum();
    }
    flux
}

/// Five-frame Hann smoothing (zero beyond the ends), so that a beat period
/// falling between two integer lags still produces a well-formed peak.
fn smooth(x: &[f64]) -> Vec<f64> {
    const KERNEL: [f64; 5] = [0.25, 0.75, 1.0, 0.75, 0.25];
    let norm: f64 = KERNEL.iter().sum();
    (0..x.len())
        .map(|i| {
            KERNEL
                .iter()
                .enumerate()
                .filter_map(|(j, w)| {
                    let idx = (i + j).checked_sub(2)?;
                    x.get(idx).map(|v| v * w)
                })
                .sum::<f64>()
                / norm
        })
        .collect()
}

/// Vertex of the parabola through `(-1, l) (0, c) (1, r)`: (offset, height).
/// Falls back to the centre sample when the three points are not concave.
fn parabolic_peak(l: f64, c: f64, r: f64) -> (f64, f64) {
    let curvature = l - 2.0 * c + r;
    if curvature >= 0.0 {
        return (0.0, c);
    }
    let offset = (0.5 * (l - r) / curvature).clamp(-0.5, 0.5);
    (offset, c - 0.25 * (l - r) * offset)
}

fn autocorrelation(x: &[f64], lag: usize) -> f64 {
    x.iter()
        .zip(&x[lag.min(x.len())..])
        .map(|(a, b)| a * b)
        .sum()
}

/// Estimate a global tempo from the autocorrelation of the onset envelope.
///
/// The flux envelope is lightly smoothed and mean-removed, then its
/// autocorrelation is searched over the integer lags whose tempo lies in
/// `range`. Each lag is scored by the height of the parabola through it and
/// its two neighbours, so peaks between integer lags compete fairly; the
/// winning vertex gives the period and the result is clamped to `range`.
pub fn tempo_bpm(
    buf: &AudioBuffer,
    params: &StftParams,
    range: TempoRange,
) -> Result<TempoEstimate> {
    check_range(range)?;
    let required_s = 4.0 * 60.0 / range.low_bpm;
    if buf.duration_s() < required_s {
        return Err(Error::TooShort {
            actual_s: buf.duration_s(),
            required_s,
        });
    }
    let spec = stft(buf, params, SpectrumKind::Magnitude)?;
    tempo_from_spectrogram(&spec, range)
}

fn check_range(range: TempoRange) -> Result<()> {
    if !(range.low_bpm > 0.0 && range.low_bpm < range.high_bpm && range.high_bpm.is_finite()) {
        return Err(Error::invalid(format!(
            "tempo range must satisfy 0 < low < high, got {}..{}",
            range.low_bpm, range.high_bpm
        )));
    }
    Ok(())
}

/// [`tempo_bpm`] on an already computed STFT (magnitude or power; power is
/// converted to magnitude first).
pub fn tempo_from_spectrogram(spec: &Spectrogram, range: TempoRange) -> Result<TempoEstimate> {
    check_range(range)?;
    let spec = spec.to_magnitude();
    let required_s = 4.0 * 60.0 / range.low_bpm;
    let covered_s = spec.n_frames() as f64 / spec.frame_rate_hz();
    if covered_s < required_s {
        return Err(Error::TooShort {
            actual_s: covered_s,
            required_s,
        });
    }
    let frame_rate = spec.frame_rate_hz();
    let flux = spectral_flux(&spec);
    if flux.iter().all(|v| *v == 0.0) {
        return Err(Error::NoTempo);
    }
    let mut envelope = smooth(&flux);
    let mean = envelope.iter().sum::<f64>() / envelope.len() as f64;
    envelope.iter_mut().for_each(|v| *v -= mean);

    let min_lag = ((60.0 * frame_rate / range.high_bpm).ceil() as usize).max(1);
    let max_lag = ((60.0 * frame_rate / range.low_bpm).floor() as usize).min(envelope.len() - 1);
    if min_lag > max_lag {
        return Err(Error::invalid(
            "tempo range has no admissible lag at this frame rate",
        ));
    }
    let acf: Vec<f64> = (0..=max_lag + 1)
        .map(|l| autocorrelation(&envelope, l))
        .collect();
    let (lag, _) = (min_lag..=max_lag)
        .map(|l| {
            let (offset, height) = parabolic_peak(acf[l - 1], acf[l], acf[l + 1]);
            (l as f64 + offset, height)
        })
        // Strictly greater wins, so ties keep the shorter lag.
        .fold((0.0, f64::NEG_INFINITY), |best, cand| {
            if cand.1 > best.1 {
                cand
            } else {
                best
            }
        });
    let bpm = (60.0 * frame_rate / lag).clamp(range.low_bpm, range.high_bpm);
    Ok(TempoEstimate {
        bpm,
        onset_envelope: envelope,
        search_range_bpm: range,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// 10 ms decaying noise-free clicks (a 2 kHz burst) at exact beat times.
    pub(crate) fn click_track(bpm: f64, seconds: f64, rate: u32) -> AudioBuffer {
        let n = (seconds * rate as f64) as usize;
        let mut s = vec![0.0; n];
        let period = 60.0 / bpm * rate as f64;
        let click_len = (0.01 * rate as f64) as usize;
        let mut beat: f64 = 0.0;
        while (beat as usize) < n {
            let start = beat.round() as usize;
            for j in 0..click_len.min(n - start) {
                let t = j as f64 / rate as f64;
                s[start + j] = (2.0 * std::f64::consts::PI * 2000.0 * t).sin()
                    * (1.0 - j as f64 / click_len as f64);
            }
            beat += period;
        }
        AudioBuffer::new(s, rate).unwrap()
    }

    #[test]
    fn click_tracks_recover_tempo() {
        for bpm in [60.0, 90.0, 120.0, 150.0] {
            let est = tempo_bpm(
                &click_track(bpm, 15.0, 48_000),
                &StftParams::default(),
                TempoRange::default(),
            )
            .unwrap();
            assert!((est.bpm - bpm).abs() <= 2.0, "{bpm}: got {}", est.bpm);
            assert!(est.bpm >= 60.0 && est.bpm <= 180.0);
            assert_eq!(est.onset_envelope.len(), 1407);
        }
    }

    #[test]
    fn silence_has_no_tempo() {
        let buf = AudioBuffer::new(vec![0.0; 48_000 * 5], 48_000).unwrap();
        assert!(matches!(
            tempo_bpm(&buf, &StftParams::default(), TempoRange::default()),
            Err(Error::NoTempo)
        ));
    }

    #[test]
    fn too_short_for_four_beats() {
        let buf = click_track(120.0, 3.0, 48_000);
        assert!(matches!(
            tempo_bpm(&buf, &StftParams::default(), TempoRange::default()),
            Err(Error::TooShort { .. })
        ));
    }

    #[test]
    fn invalid_range() {
        let buf = click_track(120.0, 5.0, 48_000);
        let r = TempoRange {
            low_bpm: 120.0,
            high_bpm: 100.0,
        };
        assert!(tempo_bpm(&buf, &StftParams::default(), r).is_err());
    }

    #[test]
    fn parabola_vertex() {
        assert_eq!(parabolic_peak(1.0, 2.0, 1.0), (0.0, 2.0));
        let (o, h) = parabolic_peak(1.0, 2.0, 2.0);
        assert!((o - 0.5).abs() < 1e-12 && (h - 2.125).abs() < 1e-12);
        assert_eq!(parabolic_peak(1.0, 0.0, 1.0), (0.0, 0.0));
    }

    #[test]
    fn smoothing_preserves_mass_of_interior_pulse() {
        let mut x = vec![0.0; 11];
        x[5] = 3.0;
        let y = smooth(&x);
        assert!((y.iter().sum::<f64>() - 3.0).abs() < 1e-12);
        assert_eq!(y[5], 1.0);
        assert_eq!(y[2], 0.0);
    }

    #[test]
    fn envelope_is_mean_removed() {
        let est = tempo_bpm(
            &click_track(100.0, 8.0, 48_000),
            &StftParams::default(),
            TempoRange::default(),
        )
        .unwrap();
        let mean: f64 = est.onset_envelope.iter().sum::<f64>() / est.onset_envelope.len() as f64;
        assert!(mean.abs() < 1e-9);
    }
}
