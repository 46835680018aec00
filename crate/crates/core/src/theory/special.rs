//! Digamma, harmonic-type sums, modified Bessel functions of the first kind
//! and the log-average `α_d`.

use std::f64::consts::{PI, TAU};

use crate::{Error, Result};

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_860_6;

/// `ψ(x)` for `x > 0`: upward recurrence to `x ≥ 10`, then the asymptotic series.
pub fn digamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::InvalidArgument(format!("digamma needs x > 0, got {x}")));
    }
    let mut x = x;
    let mut shift = 0.0;
    while x < 10.0 {
        shift -= 1.0 / x;
        x += 1.0;
    }
    let inv2 = 1.0 / (x * x);
    // Bernoulli terms B_{2k} / (2k) through x^{-14}.
    let series = inv2
        * (1.0 / 12.0
            - inv2
                * (1.0 / 120.0
                    - inv2
                        * (1.0 / 252.0
                            - inv2 * (1.0 / 240.0 - inv2 * (1.0 / 132.0 - inv2 * (691.0 / 32760.0 - inv2 / 12.0))))));
    Ok(shift + x.ln() - 0.5 / x - series)
}

const HARMONIC_DIRECT_LIMIT: u64 = 1_000_000;

/// `H_n(x) = Σ_{k=0}^{n−1} 1/(k + x)`; summed directly up to `n = 10^6`,
/// as `ψ(n + x) − ψ(x)` beyond.
pub fn digamma_harmonic(n: u64, x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::InvalidArgument(format!("digamma_harmonic needs x > 0, got {x}")));
    }
    if n == 0 {
        return Err(Error::InvalidArgument("digamma_harmonic needs n >= 1".into()));
    }
    if n <= HARMONIC_DIRECT_LIMIT {
        // Smallest terms first.
        Ok((0..n).rev().map(|k| 1.0 / (k as f64 + x)).sum())
    } else {
        Ok(digamma(n as f64 + x)? - digamma(x)?)
    }
}

const BESSEL_LIMIT: f64 = 700.0;

/// `I_n(x) = Σ_k (x/2)^{2k+n} / (k! (k+n)!)`.
pub fn bessel_i(n: u32, x: f64) -> Result<f64> {
    if !(x.abs() <= BESSEL_LIMIT) {
        return Err(Error::Overflow(format!("bessel_i argument |{x}| exceeds {BESSEL_LIMIT}")));
    }
    let sign = if x < 0.0 && n % 2 == 1 { -1.0 } else { 1.0 };
    let h = 0.5 * x.abs();
    // Leading term (x/2)^n / n!, built as a product to avoid overflow.
    let mut term = 1.0;
    for k in 1..=n {
        term *= h / k as f64;
    }
    if term == 0.0 {
        return Ok(0.0);
    }
    let q = h * h;
    let mut sum = term;
    let mut k = 0u64;
    loop {
        term *= q / ((k + 1) as f64 * (k + 1 + n as u64) as f64);
        sum += term;
        k += 1;
        if term < 1e-18 * sum && k as f64 > h {
            break;
        }
    }
    Ok(sign * sum)
}

/// `log(e^{−u} I_0(u))` for `u ≥ 0`, via the Hankel expansion for large `u`.
pub fn log_scaled_i0(u: f64) -> f64 {
    let u = u.abs();
    if u < 50.0 {
        return bessel_i(0, u).expect("within range").ln() - u;
    }
    // Σ_k ((2k−1)!!)² / (k! (8u)^k)
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..=12u32 {
        let odd = (2 * k - 1) as f64;
        term *= odd * odd / (k as f64 * 8.0 * u);
        sum += term;
    }
    sum.ln() - 0.5 * (TAU * u).ln()
}

/// `cos(2πk/d)` for `k = 0..d`, exact on the axes.
pub fn unit_cosines(d: u32) -> Vec<f64> {
    (0..d).map(|k| crate::charmod::root_of_unity(k as u64, d as u64).re).collect()
}

/// `μ_r = (1/d) Σ_k cos^r(2πk/d) = 2^{−r} #{j : d | r − 2j}` weighted by `C(r, j)`.
fn cosine_moments(d: u32, max_r: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(max_r + 1);
    let mut row = vec![1.0f64]; // C(r, ·) / 2^r
    for r in 0..=max_r {
        let m: f64 = row
            .iter()
            .enumerate()
            .filter(|(j, _)| (r as i64 - 2 * *j as i64).rem_euclid(d as i64) == 0)
            .map(|(_, c)| c)
            .sum();
        out.push(m);
        let mut next = vec![0.0; r + 2];
        for (j, c) in row.iter().enumerate() {
            next[j] += 0.5 * c;
            next[j + 1] += 0.5 * c;
        }
        row = next;
    }
    out
}

const SERIES_TERMS: usize = 40;

/// `α_d(u) = log((1/d) Σ_k exp(u cos(2πk/d)))` and its derivative.
#[derive(Debug, Clone)]
pub struct AlphaFunction {
    d: u32,
    cosines: Vec<f64>,
    /// `μ_r / r!`
    series: Vec<f64>,
}

impl AlphaFunction {
    pub fn new(d: u32) -> Self {
        assert!(d >= 2, "α_d needs d >= 2");
        let mu = cosine_moments(d, SERIES_TERMS);
        let mut fact = 1.0;
        let series = mu
            .iter()
            .enumerate()
            .map(|(r, m)| {
                if r > 0 {
                    fact *= r as f64;
                }
                m / fact
            })
            .collect();
        Self { d, cosines: unit_cosines(d), series }
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    /// `lim_{u→0} α_d(u)/u² = μ_2 / 2`.
    pub fn quadratic_coefficient(&self) -> f64 {
        self.series[2]
    }

    pub fn value(&self, u: f64) -> f64 {
        if u.abs() < 1.0 {
            // exp(α) − 1 = Σ_{r≥2} μ_r u^r / r!  (μ_0 = 1, μ_1 = 0)
            let s = self.series[2..].iter().rev().fold(0.0, |acc, c| acc * u + c) * u * u;
            return s.ln_1p();
        }
        let m = self.cosines.iter().map(|c| u * c).fold(f64::NEG_INFINITY, f64::max);
        let mean = self.cosines.iter().map(|c| (u * c - m).exp()).sum::<f64>() / self.d as f64;
        m + mean.ln()
    }

    /// `α_d(u) − u = log((1/d) Σ exp(u (cos − 1)))`, free of cancellation for large `u > 0`.
    pub fn minus_u(&self, u: f64) -> f64 {
        if u.abs() < 1.0 {
            return self.value(u) - u;
        }
        let m = self.cosines.iter().map(|c| u * (c - 1.0)).fold(f64::NEG_INFINITY, f64::max);
        let mean = self.cosines.iter().map(|c| (u * (c - 1.0) - m).exp()).sum::<f64>() / self.d as f64;
        m + mean.ln()
    }

    /// `α_d′(u) = Σ cos_k e^{u cos_k} / Σ e^{u cos_k}`.
    pub fn derivative(&self, u: f64) -> f64 {
        let m = self.cosines.iter().map(|c| u * c).fold(f64::NEG_INFINITY, f64::max);
        let (num, den) = self.cosines.iter().fold((0.0, 0.0), |(n, d), c| {
            let w = (u * c - m).exp();
            (n + c * w, d + w)
        });
        num / den
    }

    /// `(1/d) Σ_k exp(u cos(2πk/d))`.
    pub fn mean_exp(&self, u: f64) -> f64 {
        self.cosines.iter().map(|c| (u * c).exp()).sum::<f64>() / self.d as f64
    }
}

pub fn alpha(d: u32, u: f64) -> f64 {
    AlphaFunction::new(d).value(u)
}

pub fn alpha_prime(d: u32, u: f64) -> f64 {
    AlphaFunction::new(d).derivative(u)
}

pub fn alpha_minus_u(d: u32, u: f64) -> f64 {
    AlphaFunction::new(d).minus_u(u)
}

/// `I_0(x) + 2 Σ_{n≥1} I_{nd}(x)`, stopping once a term is below `1e-17`.
pub fn bessel_average(d: u32, x: f64) -> Result<f64> {
    let mut total = bessel_i(0, x)?;
    let mut n = 1u32;
    loop {
        let t = bessel_i(n * d, x)?;
        total += 2.0 * t;
        if t.abs() < 1e-17 {
            return Ok(total);
        }
        n += 1;
    }
}

/// `δ_d`.
pub fn delta(d: u32) -> f64 {
    if d % 2 == 0 {
        2.0
    } else {
        2.0 * (PI / (2.0 * d as f64)).cos()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digamma_special_values() {
        assert!((digamma(1.0).unwrap() + EULER_GAMMA).abs() < 1e-14);
        let target = EULER_GAMMA + 2.0 * 2f64.ln();
        assert!((-digamma(0.5).unwrap() - target).abs() < 1e-13);
        assert!((-digamma(0.5).unwrap() - 1.963_510_026_021_42).abs() < 1e-12);
        // ψ(x+1) = ψ(x) + 1/x
        for x in [0.1, 0.37, 2.5, 13.0] {
            assert!((digamma(x + 1.0).unwrap() - digamma(x).unwrap() - 1.0 / x).abs() < 1e-12);
        }
        assert!(digamma(0.0).is_err());
        assert!(digamma(-1.0).is_err());
    }

    #[test]
    fn harmonic_sum() {
        let direct: f64 = (0..10).map(|k| 1.0 / (k as f64 + 0.5)).sum();
        assert!((digamma_harmonic(10, 0.5).unwrap() - direct).abs() < 1e-14);
        assert!((direct - 4.266_511_060_319_109).abs() < 1e-13);
        let a = digamma_harmonic(1_000_000, 0.5).unwrap();
        let b = digamma(1_000_000.5).unwrap() - digamma(0.5).unwrap();
        assert!((a - b).abs() < 1e-9);
        let big = digamma_harmonic(10_000_000, 1.0).unwrap();
        assert!((big - (1e7f64.ln() + EULER_GAMMA)).abs() < 1e-6);
    }

    #[test]
    fn bessel_values() {
        assert_eq!(bessel_i(0, 0.0).unwrap(), 1.0);
        assert_eq!(bessel_i(3, 0.0).unwrap(), 0.0);
        assert!((bessel_i(0, 1.0).unwrap() - 1.266_065_877_752_008_4).abs() < 1e-14);
        assert!((bessel_i(1, 1.0).unwrap() - 0.565_159_103_992_485_0).abs() < 1e-14);
        assert!((bessel_i(1, -1.0).unwrap() + 0.565_159_103_992_485_0).abs() < 1e-14);
        assert!(bessel_i(0, 701.0).is_err());
        assert!(bessel_i(0, 700.0).unwrap().is_finite());
    }

    #[test]
    fn log_scaled_i0_branches_agree() {
        for u in [50.0, 80.0, 200.0, 600.0] {
            let series = bessel_i(0, u).unwrap().ln() - u;
            assert!((log_scaled_i0(u) - series).abs() < 1e-12, "u = {u}");
        }
    }

    #[test]
    fn alpha_closed_forms() {
        let a2 = AlphaFunction::new(2);
        for u in [0.5, 1.0, 3.0, -0.2, 1e-4] {
            assert!((a2.value(u) - u.cosh().ln()).abs() < 1e-12, "u = {u}");
        }
        for d in 2..10 {
            assert_eq!(alpha(d, 0.0), 0.0);
        }
        let e2 = 2f64.exp();
        let expected = (e2 + 2.0 + 1.0 / e2) / 4.0;
        assert!((alpha(4, 2.0).exp() - expected).abs() < 1e-12);
        assert!((expected - 2.381_097_845_541_815_7).abs() < 1e-12);
    }

    #[test]
    fn alpha_series_matches_direct_average() {
        for d in 2..12u32 {
            let a = AlphaFunction::new(d);
            for u in [-0.99, -0.5, 0.01, 0.3, 0.999] {
                let direct = a.mean_exp(u).ln();
                assert!((a.value(u) - direct).abs() < 1e-14, "d={d} u={u}");
            }
        }
        assert_eq!(AlphaFunction::new(2).quadratic_coefficient(), 0.5);
        assert_eq!(AlphaFunction::new(3).quadratic_coefficient(), 0.25);
    }

    #[test]
    fn alpha_derivative_by_differences() {
        let a = AlphaFunction::new(6);
        for u in [-3.0, 0.2, 1.0, 7.5] {
            let h = 1e-5;
            let fd = (a.value(u + h) - a.value(u - h)) / (2.0 * h);
            assert!((fd - a.derivative(u)).abs() < 1e-8);
        }
    }

    #[test]
    fn delta_values() {
        assert_eq!(delta(2), 2.0);
        assert!((delta(3) - 3f64.sqrt()).abs() < 1e-15);
    }
}
