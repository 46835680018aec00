//! Length-`p` DFT with the `+` sign convention, by chirp-z embedding into a
//! circular convolution whose length `L ≥ 2p − 1` has only factors 2, 3 and 5.
//!
//! With `w[n] = e(n² / 2p)` and `nK = (n² + K² − (K−n)²) / 2`,
//!
//! ```text
//! Σ_n a_n e(nK/p) = w[K] · Σ_n (a_n w[n]) · conj(w[K − n]).
//! ```
//!
//! `n² mod 2p` is reduced in integers, so the chirp carries no phase error
//! growing with `n`.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::{e, Error, Result};

pub struct ChirpZ {
    p: usize,
    len: usize,
    chirp: Vec<Complex64>,
    kernel_hat: Vec<Complex64>,
    forward: Arc<dyn Fft<f64>>,
}

/// Least `n ≥ min` of the form `2^a 3^b 5^c`. Much closer to `min` than the
/// next power of two, which matters at `p ~ 10^7` where each length-`L`
/// buffer is hundreds of megabytes.
pub fn smooth_len(min: usize) -> usize {
    let mut best = min.next_power_of_two();
    let mut f5 = 1usize;
    while f5 < best {
        let mut f35 = f5;
        while f35 < best {
            let mut n = f35;
            while n < min {
                n *= 2;
            }
            best = best.min(n);
            f35 *= 3;
        }
        f5 *= 5;
    }
    best
}

impl std::fmt::Debug for ChirpZ {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ChirpZ").field("p", &self.p).field("len", &self.len).finish()
    }
}

impl ChirpZ {
    pub fn new(p: usize) -> Self {
        assert!(p >= 1);
        let len = smooth_len(2 * p - 1);
        let two_p = 2 * p as u64;
        let chirp: Vec<Complex64> = (0..p as u64)
            .map(|n| e(((n * n) % two_p) as f64 / two_p as f64))
            .collect();
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(len);
        let mut kernel_hat = vec![Complex64::new(0.0, 0.0); len];
        kernel_hat[0] = chirp[0].conj();
        for m in 1..p {
            kernel_hat[m] = chirp[m].conj();
            kernel_hat[len - m] = chirp[m].conj();
        }
        forward.process(&mut kernel_hat);
        // Fold the 1/len normalization of the inverse transform into the kernel.
        let scale = 1.0 / len as f64;
        kernel_hat.iter_mut().for_each(|z| *z *= scale);
        Self { p, len, chirp, kernel_hat, forward }
    }

    pub fn p(&self) -> usize {
        self.p
    }

    /// Inner FFT length.
    pub fn fft_len(&self) -> usize {
        self.len
    }

    /// `out[K] = Σ_n a_n e(nK/p)`.
    pub fn dft(&self, coeffs: &[Complex64]) -> Result<Vec<Complex64>> {
        self.check(coeffs.len())?;
        let mut buf = vec![Complex64::new(0.0, 0.0); self.len];
        for n in 0..self.p {
            buf[n] = coeffs[n] * self.chirp[n];
        }
        Ok(self.finish(buf))
    }

    /// `out[K] = Σ_n a_n e(n x / p) e(nK/p)`, i.e. the values at `e_p(K + x)`.
    pub fn twisted_dft(&self, coeffs: &[Complex64], x: f64) -> Result<Vec<Complex64>> {
        self.check(coeffs.len())?;
        let mut buf = vec![Complex64::new(0.0, 0.0); self.len];
        let pf = self.p as f64;
        for n in 0..self.p {
            buf[n] = coeffs[n] * self.chirp[n] * e(n as f64 * x / pf);
        }
        Ok(self.finish(buf))
    }

    fn check(&self, got: usize) -> Result<()> {
        if got != self.p {
            return Err(Error::LengthMismatch { expected: self.p, got });
        }
        Ok(())
    }

    fn finish(&self, mut buf: Vec<Complex64>) -> Vec<Complex64> {
        let mut scratch = vec![Complex64::new(0.0, 0.0); self.forward.get_inplace_scratch_len()];
        self.forward.process_with_scratch(&mut buf, &mut scratch);
        // Inverse transform as conj ∘ forward ∘ conj, so only one plan is kept.
        for (b, k) in buf.iter_mut().zip(&self.kernel_hat) {
            *b = (*b * k).conj();
        }
        self.forward.process_with_scratch(&mut buf, &mut scratch);
        drop(scratch);
        buf.iter().zip(&self.chirp).map(|(b, w)| b.conj() * w).collect()
    }
}

/// One-shot convenience wrapper around [`ChirpZ::twisted_dft`].
pub fn twisted_dft(coeffs: &[Complex64], x: f64) -> Vec<Complex64> {
    ChirpZ::new(coeffs.len()).twisted_dft(coeffs, x).expect("length matches plan")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive(coeffs: &[Complex64], x: f64) -> Vec<Complex64> {
        let p = coeffs.len();
        (0..p)
            .map(|k| {
                coeffs
                    .iter()
                    .enumerate()
                    .map(|(n, c)| c * e((((n * k) % p) as f64 + n as f64 * x) / p as f64))
                    .sum()
            })
            .collect()
    }

    #[test]
    fn matches_naive_dft() {
        for p in [1usize, 2, 3, 5, 17, 101, 257] {
            let coeffs: Vec<Complex64> = (0..p)
                .map(|n| Complex64::new(((n * 7919) % 13) as f64 - 6.0, ((n * 31) % 5) as f64))
                .collect();
            for x in [0.0, 0.5, 0.123] {
                let fast = ChirpZ::new(p).twisted_dft(&coeffs, x).unwrap();
                let slow = naive(&coeffs, x);
                let err: f64 = fast.iter().zip(&slow).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
                let scale: f64 = slow.iter().map(|z| z.norm()).fold(1.0, f64::max);
                assert!(err / scale < 1e-12, "p={p} x={x} err={err}");
            }
        }
    }

    fn is_smooth(mut n: usize) -> bool {
        for f in [2, 3, 5] {
            while n % f == 0 {
                n /= f;
            }
        }
        n == 1
    }

    #[test]
    fn smooth_lengths() {
        for min in [1usize, 2, 7, 13, 100, 1000, 20_013, 99_991] {
            let n = smooth_len(min);
            assert!(n >= min && is_smooth(n));
            assert!(!(min..n).any(is_smooth), "min={min} n={n}");
        }
        assert_eq!(smooth_len(13), 15);
        assert_eq!(smooth_len(40_001_641), 40_310_784);
    }

    #[test]
    fn rejects_wrong_length() {
        let plan = ChirpZ::new(7);
        assert_eq!(
            plan.dft(&[Complex64::new(1.0, 0.0); 6]).unwrap_err(),
            Error::LengthMismatch { expected: 7, got: 6 }
        );
    }
}
