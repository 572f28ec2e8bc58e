use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::{Error, Result};

/// Forward transform of real frames of one fixed power-of-two length,
/// returning the non-negative half of the spectrum (`n / 2 + 1` bins).
#[derive(Clone)]
pub struct RealFft {
    n: usize,
    plan: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for RealFft {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("RealFft").field("n", &self.n).finish()
    }
}

impl RealFft {
    pub fn new(n: usize) -> Result<Self> {
        if !n.is_power_of_two() {
            return Err(Error::invalid(format!(
                "FFT length {n} is not a power of two"
            )));
        }
        let plan = FftPlanner::new().plan_fft_forward(n);
        Ok(Self { n, plan })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Transform `frame` into `out`, using `scratch` (both resized as needed).
    pub fn process_into(
        &self,
        frame: &[f64],
        scratch: &mut Vec<Complex64>,
        out: &mut Vec<Complex64>,
    ) -> Result<()> {
        if frame.len() != self.n {
            return Err(Error::invalid(format!(
                "frame length {} does not match FFT length {}",
                frame.len(),
                self.n
            )));
        }
        scratch.clear();
        scratch.extend(frame.iter().map(|&x| Complex64::new(x, 0.0)));
        self.plan.process(scratch);
        out.clear();
        out.extend_from_slice(&scratch[..self.n / 2 + 1]);
        Ok(())
    }

    pub fn process(&self, frame: &[f64]) -> Result<Vec<Complex64>> {
        let mut scratch = Vec::with_capacity(self.n);
        let mut out = Vec::with_capacity(self.n / 2 + 1);
        self.process_into(frame, &mut scratch, &mut out)?;
        Ok(out)
    }
}

/// `X[k] = sum_t frame[t] * exp(-2*pi*i*k*t/n)` for `k = 0..=n/2`.
pub fn fft_real(frame: &[f64]) -> Result<Vec<Complex64>> {
    RealFft::new(frame.len())?.process(frame)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn naive_dft(x: &[f64]) -> Vec<Complex64> {
        let n = x.len();
        (0..=n / 2)
            .map(|k| {
                x.iter()
                    .enumerate()
                    .fold(Complex64::new(0.0, 0.0), |acc, (t, &v)| {
                        let a = -2.0 * PI * ((k * t) % n) as f64 / n as f64;
                        acc + Complex64::new(v * a.cos(), v * a.sin())
                    })
            })
            .collect()
    }

    #[test]
    fn impulse_has_flat_spectrum() {
        let mut x = vec![0.0; 8];
        x[0] = 1.0;
        for c in fft_real(&x).unwrap() {
            assert!((c.norm() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn constant_is_dc_only() {
        let out = fft_real(&[1.0; 8]).unwrap();
        assert_eq!(out.len(), 5);
        assert!((out[0].norm() - 8.0).abs() < 1e-15);
        for c in &out[1..] {
            assert!(c.norm() < 1e-15);
        }
    }

    #[test]
    fn rejects_non_power_of_two() {
        assert!(matches!(
            fft_real(&[0.0; 12]),
            Err(Error::InvalidArgument(_))
        ));
        assert!(fft_real(&[]).is_err());
    }

    #[test]
    fn wrong_frame_length_rejected() {
        let fft = RealFft::new(16).unwrap();
        assert!(fft.process(&[0.0; 8]).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn matches_naive_dft(log_n in 0u32..=10, seed in prop::collection::vec(-1.0f64..1.0, 1024)) {
            let n = 1usize << log_n;
            let x = &seed[..n];
            let fast = fft_real(x).unwrap();
            let slow = naive_dft(x);
            let scale = slow.iter().map(|c| c.norm()).fold(1e-300, f64::max);
            for (a, b) in fast.iter().zip(&slow) {
                prop_assert!((a - b).norm() / scale < 1e-9);
            }
        }
    }
}
