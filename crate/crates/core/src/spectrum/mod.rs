//! Evaluation of `f_χ` on every subarc `{e_p(K + x) : x ∈ [0, 1]}` at once.
//!
//! All routines normalize by `√p` at the very end. Per-`K` post-processing is
//! data-parallel over disjoint index ranges; every reduction is either an
//! integer count or a fixed-order scan, so output does not depend on the
//! number of worker threads.

mod chirpz;

pub use chirpz::{twisted_dft, ChirpZ};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::charmod::DirichletCharacter;
use crate::{e, Error, Result};

pub const DEFAULT_GRID: usize = 32;
pub const DEFAULT_REFINE_TOL: f64 = 1e-4;
pub const DEFAULT_V_STEP: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SpectrumKind {
    /// `|f(e_p(K + 1/2))| / √p`.
    Midpoint,
    /// Estimated `max_{x ∈ [0,1]} |f(e_p(K + x))| / √p`.
    ArcMax { grid: usize, refine_tol: f64 },
}

impl SpectrumKind {
    pub fn name(&self) -> &'static str {
        match self {
            SpectrumKind::Midpoint => "midpoint",
            SpectrumKind::ArcMax { .. } => "arcmax",
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Spectrum {
    pub p: u64,
    pub order: u32,
    pub index: u32,
    pub shift: i64,
    pub kind: SpectrumKind,
    pub values: Vec<f64>,
}

impl Spectrum {
    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    /// Mean of `values[K]²`; equals `(p−1)/p` for a midpoint spectrum.
    pub fn mean_square(&self) -> f64 {
        let sq: Vec<f64> = self.values.iter().map(|v| v * v).collect();
        crate::sum::pairwise(&sq) / self.values.len() as f64
    }
}

/// Coefficients `χ(n + a)` and the √p normalizer.
fn coefficients(chi: &DirichletCharacter, shift: i64) -> (Vec<Complex64>, f64) {
    (chi.coefficients(shift), (chi.p() as f64).sqrt())
}

/// `f_{χ,a}(e_p(K + x))` for all `K`, unnormalized.
pub fn transform_at(chi: &DirichletCharacter, shift: i64, x: f64) -> Vec<Complex64> {
    let (c, _) = coefficients(chi, shift);
    ChirpZ::new(c.len()).twisted_dft(&c, x).expect("length matches plan")
}

/// `f_{χ,a}(e_p(K + 1/2))` for all `K`, unnormalized.
pub fn midpoint_transform(chi: &DirichletCharacter, shift: i64) -> Vec<Complex64> {
    transform_at(chi, shift, 0.5)
}

pub fn midpoint_spectrum(chi: &DirichletCharacter, shift: i64) -> Spectrum {
    let sqrt_p = (chi.p() as f64).sqrt();
    let values = midpoint_transform(chi, shift).iter().map(|z| z.norm() / sqrt_p).collect();
    Spectrum {
        p: chi.p(),
        order: chi.order(),
        index: chi.index(),
        shift,
        kind: SpectrumKind::Midpoint,
        values,
    }
}

/// `g_{χ,K}(1/2)` for every `K`. Since `z^p = e(1/2) = −1` on the midpoints,
/// `g = −(i/2) f / τ(χ)`.
pub fn midpoint_g(chi: &DirichletCharacter, shift: i64) -> Vec<Complex64> {
    let factor = Complex64::new(0.0, -0.5) / chi.gauss_sum();
    midpoint_transform(chi, shift).into_iter().map(|f| f * factor).collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GMode {
    /// Closed form `i f(z) / ((z^p − 1) τ(χ))` with a direct O(p) evaluation of `f`.
    Exact,
    /// Interpolation sum over `|j| ≤ window` only.
    Truncated { window: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GValue {
    pub value: Complex64,
    /// Bound on the modulus of the dropped terms (0 in exact mode).
    pub tail_bound: f64,
}

/// The auxiliary function `g_{χ,K}(x)` for the shifted polynomial `f_{χ,a}`.
///
/// Truncated mode evaluates
/// `(i/p) Σ_{|j| ≤ W} e_p(−a(K−j)) conj(χ(K−j)) / (e_p(j + x) − 1)`.
pub fn g_aux(chi: &DirichletCharacter, k: i64, x: f64, shift: i64, mode: GMode) -> Result<GValue> {
    if !(x > 0.0 && x < 1.0) {
        return Err(Error::InvalidArgument(format!("g_aux needs x in (0, 1), got {x}")));
    }
    let p = chi.p() as i64;
    let tau = chi.gauss_sum();
    match mode {
        GMode::Exact => {
            let f = chi.eval_f_arc(k, x, shift);
            let value = Complex64::new(0.0, 1.0) * f / ((e(x) - 1.0) * tau);
            Ok(GValue { value, tail_bound: 0.0 })
        }
        GMode::Truncated { window } => {
            let half = (p - 1) / 2;
            if window < 1 || window as i64 > half {
                return Err(Error::InvalidArgument(format!(
                    "window must lie in [1, {half}], got {window}"
                )));
            }
            let w = window as i64;
            let a = shift.rem_euclid(p);
            let pf = p as f64;
            let mut acc = Complex64::new(0.0, 0.0);
            for j in -w..=w {
                let r = (k - j).rem_euclid(p);
                let chi_bar = chi.conj_value_at(r);
                if chi_bar == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let twist = e(-((crate::arith::mul_mod(a as u64, r as u64, p as u64)) as f64) / pf);
                acc += twist * chi_bar / (e((j as f64 + x) / pf) - 1.0);
            }
            let value = Complex64::new(0.0, 1.0 / pf) * acc;
            let tail_bound: f64 = (w + 1..=half).map(|j| 0.5 / (j - 1) as f64).sum();
            Ok(GValue { value, tail_bound })
        }
    }
}

/// Taylor data for `f(K, 1/2 + h) = Σ_r (2πi h)^r / r! · D_r[K]`, stored per `K`.
struct LocalExpansion {
    terms: usize,
    /// `coeffs[K * terms + r] = D_r[K] / r!` for `K` in the current block.
    coeffs: Vec<Complex64>,
}

impl LocalExpansion {
    fn eval(&self, local_k: usize, h: f64) -> Complex64 {
        let z = Complex64::new(0.0, std::f64::consts::TAU * h);
        let row = &self.coeffs[local_k * self.terms..(local_k + 1) * self.terms];
        row.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, d| acc * z + d)
    }
}

/// Number of Taylor terms so the remainder over `|h| ≤ 1/2` is below `1e-12 √p`.
fn taylor_terms(p: usize) -> usize {
    let target = 1e-12 * (p as f64).sqrt();
    let pi = std::f64::consts::PI;
    let mut term = p as f64; // p · π^r / r!
    let mut r = 0usize;
    loop {
        r += 1;
        term *= pi / r as f64;
        if r > 4 && term / (1.0 - pi / (r + 1) as f64) < target {
            return r;
        }
    }
}

// Upper limit for the per-block Taylor table.
const EXPANSION_BYTES: usize = 1 << 30;

/// Maximum of `|f|/√p` over each subarc: a `T`-point grid in `x`, then a
/// golden-section search around each local grid maximum (skipped when
/// `refine_tol <= 0`). The search evaluates a local expansion about `x = 1/2`
/// whose truncation error is far below double-precision rounding of `f`.
/// Refinement only ever raises an entry.
pub fn arc_max_spectrum(
    chi: &DirichletCharacter,
    shift: i64,
    grid: usize,
    refine_tol: f64,
) -> Result<Spectrum> {
    if grid < 2 {
        return Err(Error::InvalidArgument(format!("grid must be at least 2, got {grid}")));
    }
    if refine_tol.is_nan() {
        return Err(Error::InvalidArgument("refine_tol is NaN".into()));
    }
    let (c, sqrt_p) = coefficients(chi, shift);
    let p = c.len();
    let plan = ChirpZ::new(p);

    let mut best = vec![0.0f64; p];
    let mut at_zero = Vec::new();
    for t in 0..grid {
        let x = t as f64 / grid as f64;
        let f = plan.twisted_dft(&c, x)?;
        for (k, z) in f.iter().enumerate() {
            let v = z.norm();
            if v > best[k] {
                best[k] = v;
            }
        }
        if t == 0 {
            at_zero = f.iter().map(|z| z.norm()).collect();
        }
    }
    // x = 1 on arc K is x = 0 on arc K + 1.
    for k in 0..p {
        let v = at_zero[(k + 1) % p];
        best[k] = best[k].max(v);
    }

    if refine_tol > 0.0 {
        let terms = taylor_terms(p);
        let block = (EXPANSION_BYTES / (terms * std::mem::size_of::<Complex64>())).clamp(1, p);
        let mut weighted = vec![Complex64::new(0.0, 0.0); p];
        let mut start = 0;
        while start < p {
            let end = (start + block).min(p);
            let mut exp = LocalExpansion { terms, coeffs: vec![Complex64::new(0.0, 0.0); (end - start) * terms] };
            let mut fact = 1.0;
            for r in 0..terms {
                if r > 0 {
                    fact *= r as f64;
                }
                for (n, w) in weighted.iter_mut().enumerate() {
                    *w = c[n] * (n as f64 / p as f64).powi(r as i32);
                }
                let d = plan.twisted_dft(&weighted, 0.5)?;
                for k in start..end {
                    exp.coeffs[(k - start) * terms + r] = d[k] / fact;
                }
            }
            best[start..end].par_iter_mut().enumerate().for_each(|(local, b)| {
                let at = |x: f64| exp.eval(local, x - 0.5).norm();
                let step = 1.0 / grid as f64;
                let vals: Vec<f64> = (0..=grid).map(|t| at(t as f64 * step)).collect();
                // Search around every local maximum of the grid, not only the best one.
                for t in 0..=grid {
                    let left = t == 0 || vals[t - 1] <= vals[t];
                    let right = t == grid || vals[t + 1] <= vals[t];
                    if left && right {
                        let x0 = t as f64 * step;
                        let found = golden_max(at, (x0 - step).max(0.0), (x0 + step).min(1.0), refine_tol);
                        *b = b.max(found);
                    }
                }
            });
            start = end;
        }
    }

    Ok(Spectrum {
        p: chi.p(),
        order: chi.order(),
        index: chi.index(),
        shift,
        kind: SpectrumKind::ArcMax { grid, refine_tol },
        values: best.into_iter().map(|v| v / sqrt_p).collect(),
    })
}

/// Golden-section search; returns the largest value seen at any probe.
fn golden_max(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    let mut seen = f1.max(f2);
    while hi - lo > tol {
        if f1 >= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
            seen = seen.max(f1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
            seen = seen.max(f2);
        }
    }
    seen
}

#[derive(Debug, Clone, Serialize)]
pub struct TailCurve {
    pub p: u64,
    pub order: u32,
    pub index: u32,
    pub shift: i64,
    pub kind: SpectrumKind,
    pub v_grid: Vec<f64>,
    pub phi: Vec<f64>,
    /// `counts[i] = #{K : values[K] ≥ v_grid[i]}`, so `phi = counts / p`.
    pub counts: Vec<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub points: usize,
}

impl TailCurve {
    /// Least-squares line through `(V, log(−log Φ̂(V)))` over grid points with
    /// `phi_lo ≤ Φ̂ ≤ phi_hi`. `None` with fewer than two usable points.
    pub fn loglog_fit(&self, phi_lo: f64, phi_hi: f64) -> Option<LineFit> {
        let pts: Vec<(f64, f64)> = self
            .v_grid
            .iter()
            .zip(&self.phi)
            .filter(|(_, &f)| f >= phi_lo && f <= phi_hi && f > 0.0 && f < 1.0)
            .map(|(&v, &f)| (v, (-f.ln()).ln()))
            .collect();
        least_squares(&pts)
    }
}

pub fn least_squares(pts: &[(f64, f64)]) -> Option<LineFit> {
    let n = pts.len();
    if n < 2 {
        return None;
    }
    let nf = n as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / nf;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / nf;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    Some(LineFit { slope, intercept: my - slope * mx, points: n })
}

/// `0, step, 2 step, …` up to `ceil(max value)`.
pub fn default_v_grid(spec: &Spectrum, step: f64) -> Vec<f64> {
    assert!(step > 0.0);
    let top = spec.max().ceil();
    let n = (top / step).round() as usize;
    (0..=n).map(|i| i as f64 * step).collect()
}

/// Empirical `Φ̂(V) = #{K : values[K] ≥ V} / p` on an increasing grid.
pub fn tail_curve(spec: &Spectrum, v_grid: &[f64]) -> Result<TailCurve> {
    if v_grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidArgument("V grid must be strictly increasing".into()));
    }
    let mut sorted = spec.values.clone();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as u64;
    let counts: Vec<u64> = v_grid
        .iter()
        .map(|&v| n - sorted.partition_point(|&x| x < v) as u64)
        .collect();
    Ok(TailCurve {
        p: spec.p,
        order: spec.order,
        index: spec.index,
        shift: spec.shift,
        kind: spec.kind,
        v_grid: v_grid.to_vec(),
        phi: counts.iter().map(|&c| c as f64 / spec.p as f64).collect(),
        counts,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ExceptionalSetReport {
    pub p: u64,
    pub threshold: f64,
    pub count: u64,
    pub members: Option<Vec<u64>>,
}

/// `log log p`.
pub fn exceptional_threshold(p: u64) -> f64 {
    (p as f64).ln().ln()
}

/// Residues `K` with `|g_{χ,K}(1/2)| ≥ log log p`.
pub fn exceptional_set(chi: &DirichletCharacter, with_members: bool) -> ExceptionalSetReport {
    let spec = midpoint_spectrum(chi, 0);
    let g_abs: Vec<f64> = spec.values.iter().map(|v| v / 2.0).collect();
    exceptional_set_from_abs(chi.p(), &g_abs, with_members)
}

pub(crate) fn exceptional_set_from_abs(p: u64, g_abs: &[f64], with_members: bool) -> ExceptionalSetReport {
    let threshold = exceptional_threshold(p);
    let members: Vec<u64> = g_abs
        .iter()
        .enumerate()
        .filter(|(_, &g)| g >= threshold)
        .map(|(k, _)| k as u64)
        .collect();
    ExceptionalSetReport {
        p,
        threshold,
        count: members.len() as u64,
        members: with_members.then_some(members),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_5_midpoint() {
        let chi = DirichletCharacter::legendre(5).unwrap();
        let spec = midpoint_spectrum(&chi, 0);
        assert!((spec.values[0] - 0.324_919_696_232_906_23).abs() < 1e-12);
        assert!((spec.mean_square() - 0.8).abs() < 1e-12);
    }

    #[test]
    fn g_half_matches_midpoint() {
        let chi = DirichletCharacter::legendre(5).unwrap();
        let g = g_aux(&chi, 0, 0.5, 0, GMode::Exact).unwrap();
        assert!((g.value.norm() - 0.162_459_848_116_453_1).abs() < 1e-12);
        let via_fft = midpoint_g(&chi, 0);
        assert!((via_fft[0] - g.value).norm() < 1e-12);
    }

    #[test]
    fn truncated_full_window_is_exact() {
        let chi = DirichletCharacter::from_prime(101, 4, 1).unwrap();
        for (k, x, a) in [(0, 0.5, 0), (7, 0.3, 0), (55, 0.71, 12)] {
            let exact = g_aux(&chi, k, x, a, GMode::Exact).unwrap();
            let trunc = g_aux(&chi, k, x, a, GMode::Truncated { window: 50 }).unwrap();
            assert!((exact.value - trunc.value).norm() < 1e-9);
            assert_eq!(trunc.tail_bound, 0.0);
        }
    }

    #[test]
    fn truncation_error_within_bound() {
        let chi = DirichletCharacter::legendre(1009).unwrap();
        for w in [5u64, 40, 200] {
            let exact = g_aux(&chi, 321, 0.4, 0, GMode::Exact).unwrap();
            let trunc = g_aux(&chi, 321, 0.4, 0, GMode::Truncated { window: w }).unwrap();
            assert!((exact.value - trunc.value).norm() <= trunc.tail_bound);
        }
    }

    #[test]
    fn g_aux_rejects_endpoints() {
        let chi = DirichletCharacter::legendre(5).unwrap();
        assert!(g_aux(&chi, 0, 0.0, 0, GMode::Exact).is_err());
        assert!(g_aux(&chi, 0, 1.0, 0, GMode::Exact).is_err());
        assert!(g_aux(&chi, 0, 0.5, 0, GMode::Truncated { window: 0 }).is_err());
    }

    #[test]
    fn taylor_expansion_reproduces_direct_values() {
        let chi = DirichletCharacter::from_prime(211, 3, 2).unwrap();
        let c = chi.coefficients(4);
        let p = c.len();
        let terms = taylor_terms(p);
        let plan = ChirpZ::new(p);
        let mut coeffs = vec![Complex64::new(0.0, 0.0); p * terms];
        let mut fact = 1.0;
        for r in 0..terms {
            if r > 0 {
                fact *= r as f64;
            }
            let w: Vec<Complex64> = (0..p).map(|n| c[n] * (n as f64 / p as f64).powi(r as i32)).collect();
            let d = plan.twisted_dft(&w, 0.5).unwrap();
            for k in 0..p {
                coeffs[k * terms + r] = d[k] / fact;
            }
        }
        let exp = LocalExpansion { terms, coeffs };
        for (k, x) in [(0usize, 0.0), (10, 0.93), (200, 1.0), (77, 0.5)] {
            let direct = chi.eval_f_arc(k as i64, x, 4);
            assert!((exp.eval(k, x - 0.5) - direct).norm() < 1e-10, "k={k} x={x}");
        }
    }

    #[test]
    fn tail_curve_counts() {
        let chi = DirichletCharacter::legendre(101).unwrap();
        let spec = midpoint_spectrum(&chi, 0);
        let curve = tail_curve(&spec, &default_v_grid(&spec, 0.01)).unwrap();
        assert_eq!(curve.phi[0], 1.0);
        assert!(curve.phi.windows(2).all(|w| w[1] <= w[0]));
        assert_eq!(*curve.counts.last().unwrap(), 0);
        assert!(tail_curve(&spec, &[0.0, 0.0]).is_err());
    }

    #[test]
    fn exceptional_threshold_value() {
        let t = exceptional_threshold(10_007);
        assert_eq!(t, 10_007f64.ln().ln());
        assert!((t - 2.2211).abs() < 1e-3);
    }
}
