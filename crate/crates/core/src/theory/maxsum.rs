//! `max |sin(πx) Σ_{|j|≤n} a_j/(j+x)|` over `x ∈ (0,1)` and `a_j ∈ U_d`.

use std::f64::consts::{PI, TAU};

use super::special::EULER_GAMMA;

pub const DEFAULT_STEPS: usize = 512;

/// Main terms: `2 log n + 2γ + 4 log 2` for even `d`,
/// `2 cos(π/2d)(log n + γ + 2 log 2)` for odd `d`.
pub fn maxsum_closed_form(n: u64, d: u32) -> f64 {
    let base = (n as f64).ln() + EULER_GAMMA + 2.0 * 2f64.ln();
    if d % 2 == 0 {
        2.0 * base
    } else {
        2.0 * (PI / (2.0 * d as f64)).cos() * base
    }
}

/// Grid maximization. For a direction `θ`, each term is rotated onto `e^{iθ}`
/// by the best root of unity, worth `max_a Re(e^{−iθ} a)` when `j + x > 0`
/// and `−min_a Re(e^{−iθ} a)` otherwise.
pub fn maxsum_bruteforce(n: u64, d: u32, x_steps: usize, theta_steps: usize) -> f64 {
    assert!(n >= 1 && d >= 2 && x_steps >= 2 && theta_steps >= 1);
    let n = n as i64;
    let mut best = 0.0f64;
    for ti in 0..=theta_steps {
        let theta = ti as f64 * (TAU / d as f64) / theta_steps as f64;
        let proj: Vec<f64> = (0..d).map(|k| (TAU * k as f64 / d as f64 - theta).cos()).collect();
        let hi = proj.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let lo = proj.iter().copied().fold(f64::INFINITY, f64::min);
        for xi in 1..x_steps {
            let x = xi as f64 / x_steps as f64;
            let mut s = 0.0;
            for j in -n..=n {
                let t = j as f64 + x;
                s += if t > 0.0 { hi / t } else { lo / t };
            }
            best = best.max((PI * x).sin() * s);
        }
    }
    best
}
