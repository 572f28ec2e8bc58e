//! Band-limited sample-rate conversion with a Kaiser-windowed sinc kernel,
//! evaluated through a polyphase coefficient table.

use super::AudioBuffer;
use crate::{Error, Result};

/// Zero crossings of the sinc on each side of the kernel centre. With the
/// cutoff below, every phase has at least 64 taps.
const HALF_ZEROS: usize = 32;
/// Kaiser shape; gives roughly 90 dB of stop-band attenuation.
const KAISER_BETA: f64 = 8.6;
/// Passband edge as a fraction of the output Nyquist frequency.
const ROLLOFF: f64 = 0.9;
/// Largest number of exact phases stored; beyond it phases are interpolated.
const MAX_PHASES: u64 = 4096;

/// Modified Bessel function of the first kind, order zero (power series).
fn bessel_i0(x: f64) -> f64 {
    let q = x * x / 4.0;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut k = 1.0;
    while term > sum * 1e-17 {
        term *= q / (k * k);
        sum += term;
        k += 1.0;
    }
    sum
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

struct Kernel {
    /// Cutoff in cycles per input sample.
    cutoff: f64,
    /// Half support in input samples.
    half_width: f64,
    i0_beta: f64,
}

impl Kernel {
    fn new(ratio: f64) -> Self {
        let cutoff = 0.5 * ratio.min(1.0) * ROLLOFF;
        Self {
            cutoff,
            half_width: HALF_ZEROS as f64 / (2.0 * cutoff),
            i0_beta: bessel_i0(KAISER_BETA),
        }
    }

    fn eval(&self, x: f64) -> f64 {
        let r = x / self.half_width;
        if r.abs() >= 1.0 {
            return 0.0;
        }
        let arg = 2.0 * self.cutoff * x;
        let sinc = if arg == 0.0 {
            1.0
        } else {
            (std::f64::consts::PI * arg).sin() / (std::f64::consts::PI * arg)
        };
        let window = bessel_i0(KAISER_BETA * (1.0 - r * r).sqrt()) / self.i0_beta;
        2.0 * self.cutoff * sinc * window
    }
}

/// Coefficients for `phases + 1` fractional offsets in `[0, 1]`; row `p` holds
/// the taps applied to input samples `base - left + j` for an output instant
/// at `base + p / phases`.
struct PhaseTable {
    phases: usize,
    left: usize,
    taps: usize,
    coeffs: Vec<f64>,
}

impl PhaseTable {
    fn new(kernel: &Kernel, phases: usize) -> Self {
        let left = kernel.half_width.floor() as usize;
        let taps = 2 * left + 2;
        let mut coeffs = vec![0.0; (phases + 1) * taps];
        for p in 0..=phases {
            let frac = p as f64 / phases as f64;
            let row = &mut coeffs[p * taps..(p + 1) * taps];
            for (j, c) in row.iter_mut().enumerate() {
                let offset = frac + left as f64 - j as f64;
                *c = kernel.eval(offset);
            }
            // Unity DC gain for every phase.
            let sum: f64 = row.iter().sum();
            row.iter_mut().for_each(|c| *c /= sum);
        }
        Self {
            phases,
            left,
            taps,
            coeffs,
        }
    }

    fn row(&self, p: usize) -> &[f64] {
        &self.coeffs[p * self.taps..(p + 1) * self.taps]
    }
}

fn dot_at(input: &[f64], start: isize, coeffs: &[f64]) -> f64 {
    let n = input.len() as isize;
    if start >= 0 && start + coeffs.len() as isize <= n {
        let s = start as usize;
        return input[s..s + coeffs.len()]
            .iter()
            .zip(coeffs)
            .map(|(x, c)| x * c)
            .sum();
    }
    coeffs
        .iter()
        .enumerate()
        .filter_map(|(j, c)| {
            let i = start + j as isize;
            (0..n).contains(&i).then(|| input[i as usize] * c)
        })
        .sum()
}

/// Convert to `target_rate`. The output has `round(len * target / source)`
/// samples; the identity rate returns an exact copy.
pub fn resample(buf: &AudioBuffer, target_rate: u32) -> Result<AudioBuffer> {
    if target_rate == 0 {
        return Err(Error::invalid("target sample rate must be positive"));
    }
    if buf.is_empty() {
        return Err(Error::invalid("cannot resample an empty buffer"));
    }
    let source_rate = buf.sample_rate_hz();
    if target_rate == source_rate {
        return Ok(buf.clone());
    }

    let g = gcd(source_rate as u64, target_rate as u64);
    let up = target_rate as u64 / g;
    let down = source_rate as u64 / g;
    let n_in = buf.len() as u64;
    let n_out = ((n_in as u128 * target_rate as u128 + source_rate as u128 / 2)
        / source_rate as u128) as usize;

    let kernel = Kernel::new(target_rate as f64 / source_rate as f64);
    let exact = up <= MAX_PHASES;
    let phases = if exact {
        up as usize
    } else {
        MAX_PHASES as usize
    };
    let table = PhaseTable::new(&kernel, phases);
    let input = buf.samples();
    let mut scratch = vec![0.0; table.taps];

    let mut out = Vec::with_capacity(n_out);
    for n in 0..n_out as u64 {
        let pos = n as u128 * down as u128;
        let base = (pos / up as u128) as isize;
        let rem = (pos % up as u128) as u64;
        let start = base - table.left as isize;
        let coeffs: &[f64] = if exact {
            table.row(rem as usize)
        } else {
            let x = rem as f64 / up as f64 * table.phases as f64;
            let p = (x.floor() as usize).min(table.phases - 1);
            let t = x - p as f64;
            for ((s, a), b) in scratch.iter_mut().zip(table.row(p)).zip(table.row(p + 1)) {
                *s = a + (b - a) * t;
            }
            &scratch
        };
        out.push(dot_at(input, start, coeffs));
    }
    AudioBuffer::new(out, target_rate)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn tone(freq: f64, rate: u32, n: usize, amp: f64) -> AudioBuffer {
        let s = (0..n)
            .map(|i| amp * (2.0 * PI * freq * i as f64 / rate as f64).sin())
            .collect();
        AudioBuffer::new(s, rate).unwrap()
    }

    /// Magnitude of the naive DFT at integer bin `k`.
    fn naive_dft_mag(x: &[f64], k: usize) -> f64 {
        let n = x.len() as f64;
        let (mut re, mut im) = (0.0, 0.0);
        for (t, v) in x.iter().enumerate() {
            let a = -2.0 * PI * k as f64 * t as f64 / n;
            re += v * a.cos();
            im += v * a.sin();
        }
        re.hypot(im)
    }

    fn rms(x: &[f64]) -> f64 {
        (x.iter().map(|v| v * v).sum::<f64>() / x.len() as f64).sqrt()
    }

    #[test]
    fn bessel_reference_values() {
        assert_eq!(bessel_i0(0.0), 1.0);
        assert!((bessel_i0(1.0) - 1.266_065_877_752_008_4).abs() < 1e-14);
        assert!((bessel_i0(8.6) - 750.461_159_563_165_9).abs() < 1e-12 * 750.46);
    }

    #[test]
    fn identity_rate_is_bit_identical() {
        let b = tone(440.0, 48_000, 1000, 0.5);
        assert_eq!(resample(&b, 48_000).unwrap(), b);
    }

    #[test]
    fn zero_rate_rejected() {
        let b = tone(440.0, 48_000, 10, 0.5);
        assert!(matches!(resample(&b, 0), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn output_length_follows_ratio() {
        let b = tone(440.0, 44_100, 44_100, 0.5);
        assert_eq!(resample(&b, 48_000).unwrap().len(), 48_000);
        let b = tone(440.0, 44_100, 1001, 0.5);
        // 1001 * 48000 / 44100 = 1089.52 -> 1090
        assert_eq!(resample(&b, 48_000).unwrap().len(), 1090);
        let b = tone(440.0, 48_000, 48_000, 0.5);
        assert_eq!(resample(&b, 16_000).unwrap().len(), 16_000);
    }

    #[test]
    fn every_phase_has_at_least_64_taps() {
        for ratio in [48_000.0 / 44_100.0, 44_100.0 / 48_000.0, 2.0, 0.25] {
            let k = Kernel::new(ratio);
            let table = PhaseTable::new(&k, 16);
            for p in 0..=16 {
                let nonzero = table.row(p).iter().filter(|c| **c != 0.0).count();
                assert!(nonzero >= 64, "ratio {ratio} phase {p}: {nonzero} taps");
            }
        }
    }

    #[test]
    fn tone_frequency_and_level_preserved_44k1_to_48k() {
        let src = tone(440.0, 44_100, 44_100, 0.5);
        let out = resample(&src, 48_000).unwrap();
        // Analyse a 0.1 s window away from the edges: bins are 10 Hz wide.
        let seg = &out.samples()[20_000..24_800];
        let peak_bin = (1..seg.len() / 2)
            .max_by(|&a, &b| naive_dft_mag(seg, a).total_cmp(&naive_dft_mag(seg, b)))
            .unwrap();
        let bin_hz = 48_000.0 / seg.len() as f64;
        assert!(
            (peak_bin as f64 * bin_hz - 440.0).abs() <= bin_hz,
            "peak at bin {peak_bin}"
        );

        let db = 20.0 * (rms(seg) / rms(&src.samples()[20_000..30_000])).log10();
        assert!(db.abs() < 1.0, "rms changed by {db} dB");
    }

    #[test]
    fn downsampling_attenuates_content_above_new_nyquist() {
        // 20 kHz at 48 kHz folds to 4 kHz after going to 16 kHz unless filtered.
        let src = tone(20_000.0, 48_000, 48_000, 0.5);
        let out = resample(&src, 16_000).unwrap();
        let level = rms(&out.samples()[2000..14_000]);
        assert!(20.0 * (level / rms(src.samples())).log10() < -80.0);
    }

    #[test]
    fn interpolated_phase_path_matches_exact_tone() {
        // 44_101 -> 48_000 has 48_000 phases, beyond the exact table limit.
        let src = tone(300.0, 44_101, 8_000, 0.5);
        let out = resample(&src, 48_000).unwrap();
        let expect = tone(300.0, 48_000, out.len(), 0.5);
        let err = out.samples()[200..out.len() - 200]
            .iter()
            .zip(&expect.samples()[200..])
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(err < 1e-3, "max error {err}");
    }

    #[test]
    fn dc_is_preserved() {
        let src = AudioBuffer::new(vec![0.25; 4000], 22_050).unwrap();
        let out = resample(&src, 48_000).unwrap();
        for s in &out.samples()[200..out.len() - 200] {
            assert!((s - 0.25).abs() < 1e-9);
        }
    }
}
