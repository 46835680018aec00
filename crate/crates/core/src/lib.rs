//! Numerical laboratory for large values of mixed character sums
//! `S(θ) = Σ χ(n) e(nθ)` with `χ` a Dirichlet character modulo a prime.
//!
//! The crate is split into layers that check one another:
//!
//! * [`charmod`]: exact characters, Gauss sums and O(p) reference evaluation;
//! * [`spectrum`]: O(p log p) evaluation of `f_χ` at every arc of the circle,
//!   arc maxima, tail curves and the exceptional-set diagnostic;
//! * [`randmodel`]: the random model with i.i.d. uniform roots of unity,
//!   its Laplace transform and moments;
//! * [`theory`]: special functions, quadrature for the explicit constants and
//!   predicted tail envelopes;
//! * [`format`]: CSV and number formatting shared by the CLI and bindings.

pub mod arith;
pub mod charmod;
mod error;
pub mod format;
pub mod randmodel;
pub mod spectrum;
pub mod sum;
pub mod theory;

pub use charmod::{DirichletCharacter, PrimeModulus};
pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use randmodel::{RandomModel, RandomModelConfig, RandomModelEstimate};
pub use spectrum::{Spectrum, SpectrumKind, TailCurve};
pub use theory::TheoryConstants;

/// `e(t) = exp(2πi t)`.
#[inline]
pub fn e(t: f64) -> Complex64 {
    let (s, c) = (std::f64::consts::TAU * t).sin_cos();
    Complex64::new(c, s)
}
