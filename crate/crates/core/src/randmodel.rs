//! The random model `G = (i/p) Σ_{|j| ≤ W} X(j) / (e_p(j + 1/2) − 1)` with
//! `X(j)` i.i.d. uniform on the `d`-th roots of unity, and its comparison
//! with the arithmetic values `g_{χ,K}(1/2)`.
//!
//! Writing `t_j = (2j+1)/(2p)`, the coefficient of `X(j)` is
//! `c_j = (cot(π t_j) − i) / (2p)`.
//!
//! Monte Carlo draws are reproducible: sample `i` uses a ChaCha8 stream
//! selected by `i` under a key derived from the master seed, so a sample does
//! not depend on which thread computed it or in which order.

use num_complex::Complex64;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::charmod::DirichletCharacter;
use crate::spectrum::{exceptional_set_from_abs, midpoint_g, ExceptionalSetReport};
use crate::sum::{mean_and_jackknife_se, pairwise, Compensated};
use crate::theory::special::{unit_cosines, AlphaFunction};
use crate::{Error, Result};

const EXP_LIMIT: f64 = 709.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomModelConfig {
    pub p: u64,
    pub d: u32,
    /// Keep `|j| ≤ truncation`; at most `(p−1)/2`, which is the full model.
    pub truncation: u64,
    pub samples: usize,
    pub seed: u64,
}

impl RandomModelConfig {
    /// Full-range model. `p` only needs to be odd here: no character is involved.
    pub fn new(p: u64, d: u32, samples: usize, seed: u64) -> Result<Self> {
        if p < 3 || p % 2 == 0 {
            return Err(Error::InvalidArgument(format!("p must be odd and at least 3, got {p}")));
        }
        if d < 2 {
            return Err(Error::OrderTooSmall(d as u64));
        }
        if samples == 0 {
            return Err(Error::InvalidArgument("sample count must be at least 1".into()));
        }
        Ok(Self { p, d, truncation: (p - 1) / 2, samples, seed })
    }

    pub fn with_truncation(mut self, w: u64) -> Result<Self> {
        if w > (self.p - 1) / 2 {
            return Err(Error::InvalidArgument(format!(
                "truncation {w} exceeds (p-1)/2 = {}",
                (self.p - 1) / 2
            )));
        }
        self.truncation = w;
        Ok(self)
    }

    fn j_range(&self) -> std::ops::RangeInclusive<i64> {
        let w = self.truncation as i64;
        -w..=w
    }
}

/// `c_j = (cot(π(2j+1)/(2p)) − i) / (2p)`.
pub fn coefficient(p: u64, j: i64) -> Complex64 {
    let pf = p as f64;
    let t = std::f64::consts::PI * (2 * j + 1) as f64 / (2.0 * pf);
    Complex64::new(t.cos() / t.sin(), -1.0) / (2.0 * pf)
}

/// Largest `g` with `d^g ≤ 256` (at least 1).
pub fn group_size(d: u32) -> u32 {
    let mut g = 1;
    while (d as u64).pow(g + 1) <= 256 {
        g += 1;
    }
    g
}

struct Chunk {
    /// `d^len` entries; entry `code` is `Σ_i c_{j_i} ω^{digit_i(code)}`.
    table: Vec<Complex64>,
}

/// Uniform integers on `[0, range)` unpacked from 64-bit draws.
struct DigitSource {
    range: u64,
    per_draw: u32,
    /// `range^per_draw`, or 0 when that equals 2^64.
    block: u64,
    buffer: u64,
    left: u32,
}

impl DigitSource {
    fn new(range: u64) -> Self {
        let mut per_draw = 0u32;
        let mut block: u128 = 1;
        while block * range as u128 <= 1u128 << 64 {
            block *= range as u128;
            per_draw += 1;
        }
        let block = if block == 1u128 << 64 { 0 } else { block as u64 };
        Self { range, per_draw, block, buffer: 0, left: 0 }
    }

    #[inline]
    fn next(&mut self, rng: &mut ChaCha8Rng) -> usize {
        if self.left == 0 {
            self.buffer = if self.block == 0 { rng.next_u64() } else { uniform_below(rng, self.block) };
            self.left = self.per_draw;
        }
        let digit = self.buffer % self.range;
        self.buffer /= self.range;
        self.left -= 1;
        digit as usize
    }
}

/// Lemire's multiply-and-reject method on 64-bit words.
#[inline]
fn uniform_below(rng: &mut ChaCha8Rng, range: u64) -> u64 {
    let mut m = rng.next_u64() as u128 * range as u128;
    if (m as u64) < range {
        let threshold = range.wrapping_neg() % range;
        while (m as u64) < threshold {
            m = rng.next_u64() as u128 * range as u128;
        }
    }
    (m >> 64) as u64
}

/// Monte Carlo engine with per-group lookup tables.
pub struct RandomModel {
    config: RandomModelConfig,
    full_chunks: Vec<Chunk>,
    remainder: Option<Chunk>,
    group_range: u64,
    base: ChaCha8Rng,
}

impl std::fmt::Debug for RandomModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("RandomModel").field("config", &self.config).finish()
    }
}

impl RandomModel {
    pub fn new(config: RandomModelConfig) -> Self {
        let d = config.d as usize;
        let roots: Vec<Complex64> =
            (0..d).map(|k| crate::charmod::root_of_unity(k as u64, d as u64)).collect();
        let g = group_size(config.d) as usize;
        let coeffs: Vec<Complex64> = config.j_range().map(|j| coefficient(config.p, j)).collect();
        let build = |terms: &[Complex64]| {
            let size = d.pow(terms.len() as u32);
            let table = (0..size)
                .map(|code| {
                    let mut rest = code;
                    let mut acc = Complex64::new(0.0, 0.0);
                    for c in terms {
                        acc += c * roots[rest % d];
                        rest /= d;
                    }
                    acc
                })
                .collect();
            Chunk { table }
        };
        let mut full_chunks = Vec::new();
        let mut remainder = None;
        for group in coeffs.chunks(g) {
            if group.len() == g {
                full_chunks.push(build(group));
            } else {
                remainder = Some(build(group));
            }
        }
        let base = ChaCha8Rng::seed_from_u64(config.seed);
        Self { group_range: (d as u64).pow(g as u32), config, full_chunks, remainder, base }
    }

    pub fn config(&self) -> &RandomModelConfig {
        &self.config
    }

    /// One draw of `G`; depends only on `(seed, index)`.
    pub fn sample(&self, index: u64) -> Complex64 {
        let mut rng = self.base.clone();
        rng.set_stream(index);
        let mut digits = DigitSource::new(self.group_range);
        let mut acc = Complex64::new(0.0, 0.0);
        for chunk in &self.full_chunks {
            acc += chunk.table[digits.next(&mut rng)];
        }
        if let Some(chunk) = &self.remainder {
            acc += chunk.table[uniform_below(&mut rng, chunk.table.len() as u64) as usize];
        }
        acc
    }

    /// Draws `0..N` in parallel, collected in index order.
    pub fn samples(&self) -> RandomModelSamples {
        let values = (0..self.config.samples as u64).into_par_iter().map(|i| self.sample(i)).collect();
        RandomModelSamples { config: self.config.clone(), values }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomModelEstimate {
    pub value: f64,
    pub std_error: f64,
    #[serde(rename = "N")]
    pub samples: usize,
    pub seed: u64,
    pub p: u64,
    pub d: u32,
    pub s: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct RandomModelSamples {
    pub config: RandomModelConfig,
    pub values: Vec<Complex64>,
}

impl RandomModelSamples {
    fn estimate(&self, xs: &[f64], s: Option<f64>) -> RandomModelEstimate {
        let (value, std_error) = mean_and_jackknife_se(xs);
        RandomModelEstimate {
            value,
            std_error,
            samples: xs.len(),
            seed: self.config.seed,
            p: self.config.p,
            d: self.config.d,
            s,
        }
    }

    pub fn mean_re(&self) -> RandomModelEstimate {
        let xs: Vec<f64> = self.values.iter().map(|z| z.re).collect();
        self.estimate(&xs, None)
    }

    pub fn mean_im(&self) -> RandomModelEstimate {
        let xs: Vec<f64> = self.values.iter().map(|z| z.im).collect();
        self.estimate(&xs, None)
    }

    pub fn mean_abs2(&self) -> RandomModelEstimate {
        let xs: Vec<f64> = self.values.iter().map(|z| z.norm_sqr()).collect();
        self.estimate(&xs, None)
    }

    /// `E (Re G)^n`.
    pub fn moment_re(&self, n: u32) -> RandomModelEstimate {
        let xs: Vec<f64> = self.values.iter().map(|z| z.re.powi(n as i32)).collect();
        self.estimate(&xs, None)
    }

    /// `E exp(2s Re G)`; fails rather than saturate when an exponent leaves the `f64` range.
    pub fn laplace(&self, s: f64) -> Result<RandomModelEstimate> {
        let worst = self.values.iter().map(|z| 2.0 * s * z.re).fold(f64::NEG_INFINITY, f64::max);
        if worst > EXP_LIMIT {
            return Err(Error::Overflow(format!(
                "2s·Re G reaches {worst:.1} at s = {s}, beyond exp range {EXP_LIMIT}"
            )));
        }
        let xs: Vec<f64> = self.values.iter().map(|z| (2.0 * s * z.re).exp()).collect();
        Ok(self.estimate(&xs, Some(s)))
    }
}

/// Monte Carlo `E exp(2s Re G)`.
pub fn empirical_laplace(config: &RandomModelConfig, s: f64) -> Result<RandomModelEstimate> {
    RandomModel::new(config.clone()).samples().laplace(s)
}

/// `Σ_j |c_j|² = E|G|²`.
pub fn second_moment_abs(config: &RandomModelConfig) -> f64 {
    config.j_range().map(|j| coefficient(config.p, j).norm_sqr()).collect::<Compensated>().value()
}

/// `log((1/n) Σ exp(a_i))` without loss for small or large arguments.
fn log_mean_exp(args: &[f64]) -> f64 {
    let n = args.len() as f64;
    let m = args.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lo = args.iter().copied().fold(f64::INFINITY, f64::min);
    if m.abs().max(lo.abs()) < 0.5 {
        (args.iter().map(|a| a.exp_m1()).sum::<f64>() / n).ln_1p()
    } else {
        m + (args.iter().map(|a| (a - m).exp()).sum::<f64>() / n).ln()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LaplaceProducts {
    pub log_p1: f64,
    pub log_p2: f64,
    pub log_value: f64,
    pub value: f64,
    /// `H = floor((log p)²)`.
    pub cutoff: u64,
}

/// Split product for `E exp(2s Re G)`: near terms `|j| ≤ (log p)²` use the
/// approximation `cot(πt) ≈ 1/(πt)` and so reduce to `α_d(2s/(π(2j+1)))`;
/// far terms keep the exact cotangent.
pub fn theoretical_laplace(p: u64, d: u32, s: f64) -> LaplaceProducts {
    let half = ((p - 1) / 2) as i64;
    let cutoff = ((p as f64).ln().powi(2)).floor() as u64;
    let h = (cutoff as i64).min(half);
    let alpha = AlphaFunction::new(d);
    let cosines = unit_cosines(d);
    let sines: Vec<f64> = (0..d).map(|k| crate::charmod::root_of_unity(k as u64, d as u64).im).collect();
    let near: Compensated = (-h..=h)
        .map(|j| alpha.value(2.0 * s / (std::f64::consts::PI * (2 * j + 1) as f64)))
        .collect();
    let pf = p as f64;
    let mut args = vec![0.0; d as usize];
    let mut far = Compensated::new();
    for j in (-half..=half).filter(|j| j.abs() > h) {
        let t = std::f64::consts::PI * (2 * j + 1) as f64 / (2.0 * pf);
        let cot = t.cos() / t.sin();
        for k in 0..d as usize {
            args[k] = (s / pf) * (cosines[k] * cot + sines[k]);
        }
        far.add(log_mean_exp(&args));
    }
    let (log_p1, log_p2) = (near.value(), far.value());
    LaplaceProducts { log_p1, log_p2, log_value: log_p1 + log_p2, value: (log_p1 + log_p2).exp(), cutoff }
}

/// `log E exp(2s Re G)` from the exact product over every retained `j`.
pub fn exact_log_laplace(config: &RandomModelConfig, s: f64) -> f64 {
    let d = config.d as usize;
    let roots: Vec<Complex64> =
        (0..d).map(|k| crate::charmod::root_of_unity(k as u64, d as u64)).collect();
    let mut args = vec![0.0; d];
    config
        .j_range()
        .map(|j| {
            let c = coefficient(config.p, j);
            for (a, w) in args.iter_mut().zip(&roots) {
                *a = 2.0 * s * (c * w).re;
            }
            log_mean_exp(&args)
        })
        .collect::<Compensated>()
        .value()
}

/// Exact `E (Re G)^r` for `r = 0..=n_max`.
///
/// Each `Y_j = Re(c_j X(j))` has explicit raw moments; independence turns the
/// moments of the sum into binomial convolutions, applied term by term.
pub fn exact_moments(config: &RandomModelConfig, n_max: usize) -> Vec<f64> {
    let d = config.d as usize;
    let roots: Vec<Complex64> =
        (0..d).map(|k| crate::charmod::root_of_unity(k as u64, d as u64)).collect();
    let binom = binomials(n_max);
    let mut m = vec![0.0; n_max + 1];
    m[0] = 1.0;
    let mut mu = vec![0.0; n_max + 1];
    let mut next = vec![0.0; n_max + 1];
    for j in config.j_range() {
        let c = coefficient(config.p, j);
        mu.iter_mut().for_each(|x| *x = 0.0);
        for w in &roots {
            let y = (c * w).re;
            let mut pw = 1.0;
            for x in mu.iter_mut() {
                *x += pw;
                pw *= y;
            }
        }
        mu.iter_mut().for_each(|x| *x /= d as f64);
        for r in 0..=n_max {
            next[r] = (0..=r).map(|i| binom[r][i] * m[i] * mu[r - i]).sum();
        }
        std::mem::swap(&mut m, &mut next);
    }
    m
}

fn binomials(n: usize) -> Vec<Vec<f64>> {
    let mut rows = vec![vec![1.0]];
    for r in 1..=n {
        let prev = &rows[r - 1];
        let mut row = vec![1.0; r + 1];
        for i in 1..r {
            row[i] = prev[i - 1] + prev[i];
        }
        rows.push(row);
    }
    rows
}

/// Named ranges of `s` used by different comparison statements.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ParameterWindow {
    /// `|s| ≤ log p / (100 (log log p)²)`
    Moment,
    /// `|s| ≤ log p / log log log p`
    Saddle,
}

impl ParameterWindow {
    pub fn bound(&self, p: u64) -> f64 {
        let l1 = (p as f64).ln();
        match self {
            ParameterWindow::Moment => l1 / (100.0 * l1.ln().powi(2)),
            ParameterWindow::Saddle => l1 / l1.ln().ln(),
        }
    }

    pub fn contains(&self, p: u64, s: f64) -> bool {
        s.abs() <= self.bound(p)
    }
}

/// Midpoint values `g_{χ,K}(1/2)` and the exceptional set of one character.
#[derive(Debug, Clone)]
pub struct ArithmeticModel {
    pub p: u64,
    pub d: u32,
    pub g: Vec<Complex64>,
    pub exceptional: ExceptionalSetReport,
    excluded: Vec<bool>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ArithmeticLaplace {
    pub value: f64,
    pub s: f64,
    pub excluded: u64,
    /// `false` when `s` lies outside the moment window.
    pub in_window: bool,
}

impl ArithmeticModel {
    pub fn new(chi: &DirichletCharacter) -> Self {
        let g = midpoint_g(chi, 0);
        let abs: Vec<f64> = g.iter().map(|z| z.norm()).collect();
        let exceptional = exceptional_set_from_abs(chi.p(), &abs, true);
        let mut excluded = vec![false; g.len()];
        for &k in exceptional.members.as_deref().unwrap_or(&[]) {
            excluded[k as usize] = true;
        }
        Self { p: chi.p(), d: chi.order(), g, exceptional, excluded }
    }

    /// `(1/p) Σ_{K ∉ E_p} exp(2s Re g_K)`.
    pub fn laplace(&self, s: f64) -> ArithmeticLaplace {
        let terms: Vec<f64> = self
            .g
            .iter()
            .zip(&self.excluded)
            .map(|(z, &skip)| if skip { 0.0 } else { (2.0 * s * z.re).exp() })
            .collect();
        ArithmeticLaplace {
            value: pairwise(&terms) / self.p as f64,
            s,
            excluded: self.exceptional.count,
            in_window: ParameterWindow::Moment.contains(self.p, s),
        }
    }

    /// `(1/p) Σ_K (Re g_K)^n` over every `K`.
    pub fn moment(&self, n: u32) -> f64 {
        let terms: Vec<f64> = self.g.iter().map(|z| z.re.powi(n as i32)).collect();
        pairwise(&terms) / self.p as f64
    }
}

pub fn arithmetic_laplace(chi: &DirichletCharacter, s: f64) -> ArithmeticLaplace {
    ArithmeticModel::new(chi).laplace(s)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MomentComparison {
    pub n: u32,
    pub arithmetic: f64,
    pub probabilistic: f64,
    /// `10 (n/√p)(log p/π)^n`
    pub envelope: f64,
    pub gap: f64,
    pub within: bool,
}

pub fn moment_envelope(p: u64, n: u32) -> f64 {
    let pf = p as f64;
    10.0 * n as f64 / pf.sqrt() * (pf.ln() / std::f64::consts::PI).powi(n as i32)
}

pub fn moment_compare_with(model: &ArithmeticModel, exact: &[f64], n: u32) -> MomentComparison {
    let arithmetic = model.moment(n);
    let probabilistic = exact[n as usize];
    let envelope = moment_envelope(model.p, n);
    let gap = (arithmetic - probabilistic).abs();
    MomentComparison { n, arithmetic, probabilistic, envelope, gap, within: gap <= envelope }
}

pub fn moment_compare(chi: &DirichletCharacter, n: u32) -> MomentComparison {
    let model = ArithmeticModel::new(chi);
    let config = RandomModelConfig::new(chi.p(), chi.order(), 1, 0).expect("valid character parameters");
    moment_compare_with(&model, &exact_moments(&config, n as usize), n)
}
