//! Dimensional scale constants shared by every other module.
//!
//! The model has three input scales (length R0, mass m0, time t0) plus the
//! circulation. Two derived quantities are stored alongside them: the energy
//! scale E0 = m0 R0^2 / t0^2 and the bracket constant beta = -2 / (E0 t0).
//! The momentum sign convention `sigma` reconciles the step-kernel form of
//! the momentum with the hydrodynamic ring impulse; it is fixed to -1 by the
//! impulse line-integral oracle (see `invariants`).

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelConstants {
    /// Length scale (length units), strictly positive.
    pub r0: f64,
    /// Mass scale (mass units), strictly positive.
    pub m0: f64,
    /// Time scale (time units), strictly positive.
    pub t0: f64,
    /// Circulation (length^2 / time). Zero is permitted and flags a
    /// degenerate filament.
    pub gamma: f64,
    /// Energy scale, always m0 * r0^2 / t0^2.
    pub e0: f64,
    /// Bracket constant, always -2 / (e0 * t0).
    pub beta: f64,
    /// Momentum sign convention, +1 or -1. Defaults to -1.
    pub sigma: f64,
}

pub const DEFAULT_SIGMA: f64 = -1.0;

/// Builds the constants record, computing the derived scales.
pub fn make_constants(r0: f64, m0: f64, t0: f64, gamma: f64, sigma: f64) -> Result<ModelConstants> {
    for (name, v) in [("R0", r0), ("m0", m0), ("t0", t0)] {
        if !(v > 0.0) || !v.is_finite() {
            return Err(Error::RejectedInput(format!("{name} must be positive, got {v}")));
        }
    }
    if !gamma.is_finite() {
        return Err(Error::RejectedInput(format!("Gamma must be finite, got {gamma}")));
    }
    if sigma != 1.0 && sigma != -1.0 {
        return Err(Error::RejectedInput(format!("sigma must be +1 or -1, got {sigma}")));
    }
    let e0 = m0 * r0 * r0 / (t0 * t0);
    let beta = -2.0 / (e0 * t0);
    Ok(ModelConstants { r0, m0, t0, gamma, e0, beta, sigma })
}

impl ModelConstants {
    /// Unit scales with Gamma = 1 and the default sign convention.
    pub fn unit() -> Self {
        make_constants(1.0, 1.0, 1.0, 1.0, DEFAULT_SIGMA).expect("unit constants are valid")
    }

    /// Same scales with a different circulation.
    pub fn with_gamma(&self, gamma: f64) -> Result<Self> {
        make_constants(self.r0, self.m0, self.t0, gamma, self.sigma)
    }

    /// Recomputes the derived quantities and checks they match the stored
    /// values exactly. Used when a record arrives from a config file.
    pub fn validate(&self) -> Result<()> {
        let fresh = make_constants(self.r0, self.m0, self.t0, self.gamma, self.sigma)?;
        if fresh.e0 != self.e0 {
            return Err(Error::RejectedInput(format!(
                "E0 = {} does not match m0*R0^2/t0^2 = {}",
                self.e0, fresh.e0
            )));
        }
        if fresh.beta != self.beta {
            return Err(Error::RejectedInput(format!(
                "beta = {} does not match -2/(E0*t0) = {}",
                self.beta, fresh.beta
            )));
        }
        Ok(())
    }
}
