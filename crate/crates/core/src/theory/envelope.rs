//! Predicted tail envelopes `V ↦ exp(−C exp(rate · V))` and the saddle point.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::constants::{c2_lower_direct, constants, TheoryConstants};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnvelopeKind {
    /// Even `d`: `C_d^-` at rate `π/2`.
    Lower,
    /// Any `d`: `C_d^+` at rate `π/δ_d`.
    Upper,
    /// `d = 2`: `C_2^-` evaluated through the direct integral route.
    MidpointLower,
    /// Odd `d`: `C̃_d^-` at rate `π/δ_d`.
    OddLower,
}

impl EnvelopeKind {
    pub fn name(&self) -> &'static str {
        match self {
            EnvelopeKind::Lower => "lower",
            EnvelopeKind::Upper => "upper",
            EnvelopeKind::MidpointLower => "midpoint_lower",
            EnvelopeKind::OddLower => "odd_lower",
        }
    }
}

impl std::str::FromStr for EnvelopeKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lower" => Ok(Self::Lower),
            "upper" => Ok(Self::Upper),
            "midpoint_lower" => Ok(Self::MidpointLower),
            "odd_lower" => Ok(Self::OddLower),
            other => Err(Error::InvalidArgument(format!("unknown envelope kind '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PredictionEnvelope {
    pub d: u32,
    pub kind: EnvelopeKind,
    pub constant: f64,
    pub rate: f64,
}

impl PredictionEnvelope {
    pub fn new(d: u32, kind: EnvelopeKind) -> Result<Self> {
        Self::from_constants(&constants(d), kind)
    }

    pub fn from_constants(c: &TheoryConstants, kind: EnvelopeKind) -> Result<Self> {
        let d = c.d;
        let rate_d = PI / c.delta_d;
        let (constant, rate) = match kind {
            EnvelopeKind::Lower if d % 2 == 0 => (c.c_d_lower, PI / 2.0),
            EnvelopeKind::Upper => (c.c_d_upper_proof, rate_d),
            EnvelopeKind::MidpointLower if d == 2 => (c2_lower_direct(), PI / 2.0),
            EnvelopeKind::OddLower => match c.c_tilde_odd {
                Some(ct) => (ct, rate_d),
                None => return Err(Error::InvalidArgument(format!("odd_lower needs odd d, got {d}"))),
            },
            _ => return Err(Error::InvalidArgument(format!("{} envelope undefined for d = {d}", kind.name()))),
        };
        Ok(Self { d, kind, constant, rate })
    }

    pub fn eval(&self, v: f64) -> f64 {
        (-self.constant * (self.rate * v).exp()).exp()
    }

    /// `log(−log Φ)` of the envelope, the natural scale for comparison with data.
    pub fn loglog(&self, v: f64) -> f64 {
        self.constant.ln() + self.rate * v
    }
}

pub fn predict_tail(v: f64, d: u32, kind: EnvelopeKind) -> Result<f64> {
    Ok(PredictionEnvelope::new(d, kind)?.eval(v))
}

/// `s(V) = exp((π/2)(V − C_d) − 1)`.
pub fn saddle_s(v: f64, d: u32) -> f64 {
    saddle_s_with(v, constants(d).c_d)
}

pub fn saddle_s_with(v: f64, c_d: f64) -> f64 {
    ((PI / 2.0) * (v - c_d) - 1.0).exp()
}
