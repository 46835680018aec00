//! Explicit constants attached to an order `d`.

use std::f64::consts::{FRAC_2_PI, PI};

use serde::{Deserialize, Serialize};

use super::quad::{adaptive_simpson, Quadrature};
use super::special::{delta, log_scaled_i0, AlphaFunction, EULER_GAMMA};

pub const QUAD_TOL: f64 = 1e-10;
const BASE_CUTOFF: f64 = 50.0;
const LIMIT_CUTOFF: f64 = 400.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TheoryConstants {
    pub d: u32,
    pub delta_d: f64,
    /// `∫_0^1 α_d(u)/u² du`
    pub head_integral: f64,
    /// `∫_1^∞ (α_d(u) − u)/u² du`
    pub tail_integral: f64,
    /// `(2/π)(γ + log(4/π) + tail_integral)`
    pub hat_c_d: f64,
    /// `hat_c_d + (2/π) head_integral`
    pub c_d: f64,
    /// `(2/π) exp(−(π/2) C_d − 1)`
    pub c_d_lower: f64,
    /// `7 exp(−γ − 2 log 2 − 5 log 10 − π/δ_d)`
    pub c_d_upper_proof: f64,
    /// `28·10^5 exp(−π/δ_d − γ)`
    pub c_d_upper_displayed: f64,
    /// `(log d / 2) exp((7π/δ_d) √(log d) − γ)`, odd `d` only.
    pub c_tilde_odd: Option<f64>,
    /// Odd orders lie outside the even-order theory and are reported for exploration only.
    pub exploratory: bool,
    pub head_error: f64,
    pub tail_error: f64,
    pub hat_c_d_error: f64,
    pub c_d_error: f64,
    pub c_d_lower_error: f64,
    /// Truncation point of the tail integral.
    pub tail_cutoff: f64,
}

/// Cutoff `U` such that `α_d(u) − u + log d` is negligible beyond it.
/// The remainder decays like `exp(−u (1 − cos(2π/d)))`.
pub fn tail_cutoff(d: u32) -> f64 {
    let gap = 1.0 - (2.0 * PI / d as f64).cos();
    BASE_CUTOFF.max(40.0 / gap)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailIntegrals {
    pub head: Quadrature,
    pub tail: Quadrature,
    pub cutoff: f64,
}

/// Head integrand `α_d(u)/u²`, continued by `μ_2/2` at `u = 0`.
pub fn head_integrand(alpha: &AlphaFunction, u: f64) -> f64 {
    if u == 0.0 {
        alpha.quadratic_coefficient()
    } else {
        alpha.value(u) / (u * u)
    }
}

pub fn tail_integrals(d: u32) -> TailIntegrals {
    let a = AlphaFunction::new(d);
    let head = adaptive_simpson(|u| head_integrand(&a, u), 0.0, 1.0, QUAD_TOL);
    let cutoff = tail_cutoff(d);
    let mut tail = adaptive_simpson(|u| a.minus_u(u) / (u * u), 1.0, cutoff, QUAD_TOL);
    // ∫_U^∞ −log d / u² du
    tail.value -= (d as f64).ln() / cutoff;
    TailIntegrals { head, tail, cutoff }
}

pub fn constants(d: u32) -> TheoryConstants {
    assert!(d >= 2, "constants need d >= 2");
    let ints = tail_integrals(d);
    let delta_d = delta(d);
    let hat_c_d = FRAC_2_PI * (EULER_GAMMA + (4.0 / PI).ln() + ints.tail.value);
    let c_d = hat_c_d + FRAC_2_PI * ints.head.value;
    let c_d_lower = FRAC_2_PI * (-(PI / 2.0) * c_d - 1.0).exp();
    let c_d_upper_proof = 7.0 * (-EULER_GAMMA - 2.0 * 2f64.ln() - 5.0 * 10f64.ln() - PI / delta_d).exp();
    let c_d_upper_displayed = 28e5 * (-PI / delta_d - EULER_GAMMA).exp();
    let odd = d % 2 == 1;
    let c_tilde_odd = odd.then(|| {
        let ln_d = (d as f64).ln();
        0.5 * ln_d * (7.0 * PI / delta_d * ln_d.sqrt() - EULER_GAMMA).exp()
    });
    let hat_c_d_error = FRAC_2_PI * ints.tail.error;
    let c_d_error = hat_c_d_error + FRAC_2_PI * ints.head.error;
    TheoryConstants {
        d,
        delta_d,
        head_integral: ints.head.value,
        tail_integral: ints.tail.value,
        hat_c_d,
        c_d,
        c_d_lower,
        c_d_upper_proof,
        c_d_upper_displayed,
        c_tilde_odd,
        exploratory: odd,
        head_error: ints.head.error,
        tail_error: ints.tail.error,
        hat_c_d_error,
        c_d_error,
        c_d_lower_error: c_d_lower * (PI / 2.0) * c_d_error,
        tail_cutoff: ints.cutoff,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LimitConstant {
    /// `lim_{d→∞} C_{2d}`, all `α_{2d}` replaced by `log I_0`.
    pub value: f64,
    pub error: f64,
    pub head_integral: f64,
    pub tail_integral: f64,
    /// `(2/π) exp(−(π/2) value − 1)`
    pub lower: f64,
}

pub fn limit_constant() -> LimitConstant {
    let head = adaptive_simpson(
        |u| if u == 0.0 { 0.25 } else { (log_scaled_i0(u) + u) / (u * u) },
        0.0,
        1.0,
        QUAD_TOL,
    );
    let mut tail = adaptive_simpson(|u| log_scaled_i0(u) / (u * u), 1.0, LIMIT_CUTOFF, QUAD_TOL);
    // log(e^{−u} I_0(u)) = −log(2πu)/2 + 1/(8u) + 1/(16u²) + O(u^{-3})
    let u = LIMIT_CUTOFF;
    tail.value += -((2.0 * PI * u).ln() + 1.0) / (2.0 * u) + 1.0 / (16.0 * u * u) + 1.0 / (48.0 * u * u * u);
    let value = FRAC_2_PI * (EULER_GAMMA + (4.0 / PI).ln() + tail.value + head.value);
    LimitConstant {
        value,
        error: FRAC_2_PI * (head.error + tail.error),
        head_integral: head.value,
        tail_integral: tail.value,
        lower: FRAC_2_PI * (-(PI / 2.0) * value - 1.0).exp(),
    }
}

/// `C_2^-` through `log cosh` and `log(1 + e^{−2u})` integrals.
pub fn c2_lower_direct() -> f64 {
    // log cosh u = log1p(2 sinh²(u/2))
    let log_cosh = |u: f64| {
        let s = (0.5 * u).sinh();
        (2.0 * s * s).ln_1p()
    };
    let head = adaptive_simpson(|u| if u == 0.0 { 0.5 } else { log_cosh(u) / (u * u) }, 0.0, 1.0, QUAD_TOL);
    // Beyond u = 20 the integrand is below e^{-40}.
    let tail = adaptive_simpson(|u| (-2.0 * u).exp().ln_1p() / (u * u), 1.0, 20.0, QUAD_TOL);
    FRAC_2_PI * (-EULER_GAMMA - 1.0 + (PI / 2.0).ln() - head.value - tail.value).exp()
}
