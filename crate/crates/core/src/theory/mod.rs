//! Special functions, quadrature of the explicit constants, predicted tail
//! envelopes and the extremal-sum closed form.

pub mod constants;
pub mod envelope;
pub mod maxsum;
pub mod quad;
pub mod special;

pub use constants::{c2_lower_direct, constants, limit_constant, tail_integrals, LimitConstant, TheoryConstants};
pub use envelope::{predict_tail, saddle_s, EnvelopeKind, PredictionEnvelope};
pub use maxsum::{maxsum_bruteforce, maxsum_closed_form};
pub use special::{
    alpha, alpha_minus_u, alpha_prime, bessel_average, bessel_i, delta, digamma, digamma_harmonic,
    log_scaled_i0, AlphaFunction, EULER_GAMMA,
};
