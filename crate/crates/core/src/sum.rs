//! Deterministic summation.
//!
//! Every reduction in the crate that feeds a reported number goes through
//! one of these, so results depend only on the input order and never on how
//! work was split across threads.

use num_complex::Complex64;

const PAIRWISE_BLOCK: usize = 64;

/// Pairwise sum with a fixed tree shape (blocks of 64 summed left to right).
pub fn pairwise(xs: &[f64]) -> f64 {
    if xs.len() <= PAIRWISE_BLOCK {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise(&xs[..mid]) + pairwise(&xs[mid..])
}

pub fn pairwise_complex(xs: &[Complex64]) -> Complex64 {
    if xs.len() <= PAIRWISE_BLOCK {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_complex(&xs[..mid]) + pairwise_complex(&xs[mid..])
}

/// Neumaier-compensated running sum.
#[derive(Debug, Default, Clone, Copy)]
pub struct Compensated {
    sum: f64,
    comp: f64,
}

impl Compensated {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl FromIterator<f64> for Compensated {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = Compensated::new();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

/// Mean and jackknife standard error of the mean.
///
/// For the sample mean the delete-one jackknife has the closed form
/// `sqrt(Σ (x_i - x̄)² / (N (N - 1)))`.
pub fn mean_and_jackknife_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = pairwise(xs) / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let ss: f64 = xs.iter().map(|x| (x - mean) * (x - mean)).collect::<Compensated>().value();
    (mean, (ss / (n as f64 * (n as f64 - 1.0))).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairwise_exact_on_ones() {
        let xs = vec![1.0; 1_000_003];
        assert_eq!(pairwise(&xs), 1_000_003.0);
    }

    #[test]
    fn compensated_recovers_small_terms() {
        let mut acc = Compensated::new();
        acc.add(1e16);
        for _ in 0..1000 {
            acc.add(1.0);
        }
        acc.add(-1e16);
        assert_eq!(acc.value(), 1000.0);
    }

    #[test]
    fn jackknife_matches_brute_force() {
        let xs: Vec<f64> = (0..50).map(|i| ((i * 37) % 11) as f64 * 0.3 - 1.0).collect();
        let (mean, se) = mean_and_jackknife_se(&xs);
        let n = xs.len() as f64;
        let loo: Vec<f64> = (0..xs.len())
            .map(|i| (xs.iter().sum::<f64>() - xs[i]) / (n - 1.0))
            .collect();
        let loo_mean = loo.iter().sum::<f64>() / n;
        let brute = ((n - 1.0) / n * loo.iter().map(|t| (t - loo_mean).powi(2)).sum::<f64>()).sqrt();
        assert!((mean - xs.iter().sum::<f64>() / n).abs() < 1e-14);
        assert!((se - brute).abs() < 1e-12);
    }

    #[test]
    fn constant_sample_has_zero_error() {
        let (m, se) = mean_and_jackknife_se(&[1.0; 17]);
        assert_eq!(m, 1.0);
        assert_eq!(se, 0.0);
    }
}
