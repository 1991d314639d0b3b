//! The two parametrizations of the filament and the bijection between them.
//!
//! The classical set A holds (z0, Gamma, j); the phase-space set Omega holds
//! (q, p, j) with q = m0 z0 + tau t0 p and p = sigma R0^2 Gamma f constructed
//! collinear with f. Going back recovers Gamma from |p|/(R0^2 |f|) with the
//! sign read off sigma * (p . f), so the roundtrip is exact for negative
//! circulations too. Points whose p is not collinear with f (Phi_0 != 0) do
//! not represent any filament and are rejected.

use crate::constants::ModelConstants;
use crate::error::{Error, Result};
use crate::field::{SpinField, TOL_MEAN, TOL_UNIT};
use crate::invariants::{phi0_from_f, vector_f, FMethod, DEGENERATE_F};
use crate::vec3::{self, Vec3};

/// Relative tolerance on |Phi_0| <= tol * (|p|^2 |f|^2 + tiny) for
/// admissibility.
pub const TOL_PHI0: f64 = 1e-8;

/// Classical variables: position, circulation and the spin field.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassicalPoint {
    pub z0: Vec3,
    pub gamma: f64,
    pub field: SpinField,
}

/// Phase-space variables: q (mass * length), p (momentum) and the spin field.
#[derive(Debug, Clone, PartialEq)]
pub struct PhasePoint {
    pub q: Vec3,
    pub p: Vec3,
    pub field: SpinField,
}

fn require_surface(field: &SpinField) -> Result<()> {
    if !field.on_constraint_surface(TOL_UNIT, TOL_MEAN) {
        return Err(Error::RejectedInput(format!(
            "field is off the constraint surface (unit residual {:.3e}, mean residual {:.3e})",
            field.residual_unit_norm(),
            vec3::norm_inf(field.residual_zero_mean()),
        )));
    }
    Ok(())
}

/// A -> Omega at parameter time tau. The constructed p is parallel to f, so
/// Phi_0 vanishes to the square of round-off.
pub fn to_omega(point: &ClassicalPoint, tau: f64, constants: &ModelConstants) -> Result<PhasePoint> {
    require_surface(&point.field)?;
    let f = vector_f(&point.field, FMethod::Fast);
    if point.gamma != 0.0 && vec3::norm(f) <= DEGENERATE_F {
        return Err(Error::DegenerateDirection(
            "cannot orient the momentum: |f| is numerically zero while Gamma != 0".into(),
        ));
    }
    let p = vec3::scale(
        constants.sigma * constants.r0 * constants.r0 * point.gamma,
        f,
    );
    let q = vec3::add(
        vec3::scale(constants.m0, point.z0),
        vec3::scale(tau * constants.t0, p),
    );
    Ok(PhasePoint { q, p, field: point.field.clone() })
}

/// Omega -> A at parameter time tau. Fails when the point is inadmissible
/// (Phi_0 beyond tolerance) or the chart is degenerate (|f| = 0 with p != 0).
pub fn from_omega(point: &PhasePoint, tau: f64, constants: &ModelConstants) -> Result<ClassicalPoint> {
    require_surface(&point.field)?;
    let f = vector_f(&point.field, FMethod::Fast);
    let phi0 = phi0_from_f(point.p, f);
    let scale = vec3::norm_sq(point.p) * vec3::norm_sq(f) + 1e-300;
    if phi0.abs() > TOL_PHI0 * scale {
        return Err(Error::NotInOmega(format!(
            "Phi_0 = {phi0:.3e} exceeds {TOL_PHI0:.0e} * |p|^2 |f|^2; \
             p is not collinear with f and the point represents no filament"
        )));
    }
    let p_norm = vec3::norm(point.p);
    let gamma = if p_norm == 0.0 {
        0.0
    } else {
        let f_norm = vec3::norm(f);
        if f_norm <= DEGENERATE_F {
            return Err(Error::DegenerateDirection(
                "cannot recover Gamma: |f| is numerically zero while p != 0".into(),
            ));
        }
        let sign = (constants.sigma * vec3::dot(point.p, f)).signum();
        sign * p_norm / (constants.r0 * constants.r0 * f_norm)
    };
    let z0 = vec3::scale(
        1.0 / constants.m0,
        vec3::sub(point.q, vec3::scale(tau * constants.t0, point.p)),
    );
    Ok(ClassicalPoint { z0, gamma, field: point.field.clone() })
}
