//! Conserved and derived quantities of the filament: the dimensionless
//! f-vector, linear and angular momentum, the energy, the restricted energy
//! on the constraint surface, the collinearity constraint and the inverse
//! effective-mass tensor.
//!
//! Two independent routes exist for the momentum and are kept deliberately
//! separate:
//!
//! * `momentum` goes through the double-integral functional f of the spin
//!   field and the convention constant sigma, p = sigma * R0^2 * Gamma * f;
//! * `impulse_direct` is the hydrodynamic line integral (Gamma/2) * closed
//!   integral of z x dz over the reconstructed curve.
//!
//! Their agreement pins both the kernel convention and sigma = -1: the
//! counterclockwise unit ring has f = (0, 0, -pi) but carries the classical
//! impulse +pi along the axis.

use crate::constants::ModelConstants;
use crate::error::{Error, Result};
use crate::field::SpinField;
use crate::reconstruction::{closure_residual, FilamentCurve};
use crate::spectral::{self, KernelConvention};
use crate::vec3::{self, Vec3};
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

/// |f| below this is treated as a degenerate direction (n_f undefined).
pub const DEGENERATE_F: f64 = 1e-12;

/// Which algorithm computes the f-vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FMethod {
    /// O(N^2) double sum against the exact kernel-antiderivative weights.
    Reference,
    /// FFT evaluation of the kernel integral followed by one quadrature pass.
    #[default]
    Fast,
}

/// f = (1/2) * double integral of [xi - eta] j(xi) x j(eta), evaluated
/// exactly on the trigonometric interpolant.
pub fn vector_f(field: &SpinField, method: FMethod) -> Vec3 {
    vector_f_with_convention(field, method, KernelConvention::Floor)
}

/// f with an explicit kernel convention (truncation kills the kernel and
/// with it the whole vector; used by the convention-mutation checks).
pub fn vector_f_with_convention(
    field: &SpinField,
    method: FMethod,
    convention: KernelConvention,
) -> Vec3 {
    match method {
        FMethod::Fast => {
            let integral = spectral::kernel_integral(field.samples(), convention);
            half_h_cross_sum(field, &integral)
        }
        FMethod::Reference => reference_f(field, convention),
    }
}

fn half_h_cross_sum(field: &SpinField, integral: &[Vec3]) -> Vec3 {
    let h = field.spacing();
    let mut acc = [0.0; 3];
    for (j, i) in field.samples().iter().zip(integral) {
        acc = vec3::add(acc, vec3::cross(*j, *i));
    }
    vec3::scale(0.5 * h, acc)
}

/// Direct O(N^2) evaluation. The weight of sample j in the inner integral at
/// node i is the exact integral of the step kernel against the cardinal
/// interpolation basis,
///
/// ```text
/// w_ij = (2pi - xi_i)/N - G(xi_j) - G(xi_i - xi_j),
/// G(x) = (2/N) sum_{m=1}^{N/2-1} sin(m x)/m,
/// ```
///
/// so this path shares no code with the FFT route.
fn reference_f(field: &SpinField, convention: KernelConvention) -> Vec3 {
    if convention == KernelConvention::TruncateTowardZero {
        // The truncation kernel vanishes identically on (-2pi, 2pi).
        return [0.0; 3];
    }
    let n = field.len();
    let nodes = field.grid();
    let g: Vec<f64> = nodes
        .iter()
        .map(|&x| {
            let mut s = 0.0;
            for m in 1..(n / 2) {
                s += (m as f64 * x).sin() / m as f64;
            }
            2.0 * s / n as f64
        })
        .collect();
    let samples = field.samples();
    let h = field.spacing();
    let mut acc = [0.0; 3];
    for i in 0..n {
        let mut inner = [0.0; 3];
        for j in 0..n {
            let w = (TAU - nodes[i]) / n as f64 - g[j] - g[(n + i - j) % n];
            inner = vec3::sub(inner, vec3::scale(w, samples[j]));
        }
        acc = vec3::add(acc, vec3::cross(samples[i], inner));
    }
    vec3::scale(0.5 * h, acc)
}

/// Exact gradient data for the f functional: returns the per-sample vectors
/// W_i such that the derivative of (p . f) with respect to sample j_i is
/// (h/2) * (W_i x p). W combines the kernel integral with its transpose.
pub fn vector_f_gradient_terms(field: &SpinField) -> Vec<Vec3> {
    let forward = spectral::kernel_integral(field.samples(), KernelConvention::Floor);
    let transpose = spectral::kernel_integral_transpose(field.samples());
    forward
        .into_iter()
        .zip(transpose)
        .map(|(a, b)| vec3::sub(a, b))
        .collect()
}

/// Canonical momentum p = sigma * R0^2 * Gamma * f.
pub fn momentum(field: &SpinField, constants: &ModelConstants) -> Vec3 {
    momentum_with_convention(field, constants, KernelConvention::Floor)
}

pub fn momentum_with_convention(
    field: &SpinField,
    constants: &ModelConstants,
    convention: KernelConvention,
) -> Vec3 {
    let f = vector_f_with_convention(field, FMethod::Fast, convention);
    vec3::scale(
        constants.sigma * constants.r0 * constants.r0 * constants.gamma,
        f,
    )
}

/// Hydrodynamic impulse (Gamma/2) * closed integral of z x dz, the
/// independent oracle for `momentum`. Requires a closed curve.
pub fn impulse_direct(
    curve: &FilamentCurve,
    field: &SpinField,
    constants: &ModelConstants,
) -> Result<Vec3> {
    require_closed(curve, field, constants)?;
    let tangents = spectral::derivative(curve.points(), 1);
    let h = spectral::spacing(curve.len());
    let mut acc = [0.0; 3];
    for (z, t) in curve.points().iter().zip(&tangents) {
        acc = vec3::add(acc, vec3::cross(*z, *t));
    }
    Ok(vec3::scale(0.5 * constants.gamma * h, acc))
}

/// Angular momentum along the filament, (Gamma/3) * closed integral of
/// z x (z x dz). Requires a closed curve.
pub fn angular_momentum(
    curve: &FilamentCurve,
    field: &SpinField,
    constants: &ModelConstants,
) -> Result<Vec3> {
    require_closed(curve, field, constants)?;
    let tangents = spectral::derivative(curve.points(), 1);
    let h = spectral::spacing(curve.len());
    let mut acc = [0.0; 3];
    for (z, t) in curve.points().iter().zip(&tangents) {
        acc = vec3::add(acc, vec3::cross(*z, vec3::cross(*z, *t)));
    }
    Ok(vec3::scale(constants.gamma * h / 3.0, acc))
}

fn require_closed(curve: &FilamentCurve, field: &SpinField, constants: &ModelConstants) -> Result<()> {
    let residual = closure_residual(curve, field, constants);
    let tol = 1e-6 * constants.r0;
    if residual > tol {
        return Err(Error::OracleInapplicable(format!(
            "curve does not close (residual {residual:.3e} > {tol:.3e})"
        )));
    }
    Ok(())
}

/// H0 = |p|^2 / (2 m0) + E0 * spin energy.
pub fn hamiltonian_h0(p: Vec3, field: &SpinField, constants: &ModelConstants) -> f64 {
    vec3::norm_sq(p) / (2.0 * constants.m0) + constants.e0 * field.spin_energy()
}

/// Restricted energy (p . n_f)^2 / (2 m0) + E0 * spin energy, defined only
/// when the direction n_f = f/|f| exists.
pub fn energy_restricted(p: Vec3, field: &SpinField, constants: &ModelConstants) -> Result<f64> {
    let f = vector_f(field, FMethod::Fast);
    energy_restricted_given_f(p, f, field.spin_energy(), constants)
}

pub fn energy_restricted_given_f(
    p: Vec3,
    f: Vec3,
    spin_energy: f64,
    constants: &ModelConstants,
) -> Result<f64> {
    let n_f = vec3::normalized(f, DEGENERATE_F).ok_or_else(|| {
        Error::DegenerateDirection("|f| is numerically zero, n_f undefined".into())
    })?;
    let along = vec3::dot(p, n_f);
    Ok(along * along / (2.0 * constants.m0) + constants.e0 * spin_energy)
}

/// Inverse effective-mass tensor (1/m0) n_f n_f^T: symmetric, positive
/// semidefinite, rank 1, trace 1/m0.
pub fn effective_mass_inverse(field: &SpinField, constants: &ModelConstants) -> Result<[[f64; 3]; 3]> {
    let f = vector_f(field, FMethod::Fast);
    let n_f = vec3::normalized(f, DEGENERATE_F).ok_or_else(|| {
        Error::DegenerateDirection("|f| is numerically zero, n_f undefined".into())
    })?;
    let mut out = [[0.0; 3]; 3];
    for (i, row) in out.iter_mut().enumerate() {
        for (k, entry) in row.iter_mut().enumerate() {
            *entry = n_f[i] * n_f[k] / constants.m0;
        }
    }
    Ok(out)
}

/// Collinearity constraint Phi_0 = (p.f)^2 - p^2 f^2, evaluated as -|p x f|^2
/// (the Lagrange identity) so collinear data lands at zero to the square of
/// round-off instead of suffering catastrophic cancellation.
pub fn constraint_phi0(p: Vec3, field: &SpinField) -> f64 {
    phi0_from_f(p, vector_f(field, FMethod::Fast))
}

pub fn phi0_from_f(p: Vec3, f: Vec3) -> f64 {
    -vec3::norm_sq(vec3::cross(p, f))
}

/// Snapshot of every invariant the model tracks. `s`, `E_restricted` and
/// `inv_mass` are absent when their preconditions fail (non-closed curve or
/// degenerate f); `degenerate_direction` marks the latter explicitly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvariantReport {
    pub phi: Vec3,
    pub unit_norm_res: f64,
    pub f: Vec3,
    pub p: Vec3,
    pub s: Option<Vec3>,
    pub spin_energy: f64,
    #[serde(rename = "H0")]
    pub h0: f64,
    #[serde(rename = "E_restricted")]
    pub e_restricted: Option<f64>,
    /// Row-major 3x3 tensor.
    pub inv_mass: Option<[f64; 9]>,
    pub phi0: f64,
    pub degenerate_direction: bool,
}

/// Builds the full report for a field and a given momentum vector. The
/// angular momentum is taken over the curve reconstructed at the origin.
pub fn report_for(field: &SpinField, p: Vec3, constants: &ModelConstants) -> InvariantReport {
    let f = vector_f(field, FMethod::Fast);
    let spin_energy = field.spin_energy();
    let curve = crate::reconstruction::reconstruct_curve(field, [0.0; 3], constants);
    let s = angular_momentum(&curve, field, constants).ok();
    let degenerate = vec3::norm(f) <= DEGENERATE_F;
    let e_restricted = energy_restricted_given_f(p, f, spin_energy, constants).ok();
    let inv_mass = effective_mass_inverse(field, constants).ok().map(flatten);
    InvariantReport {
        phi: field.residual_zero_mean(),
        unit_norm_res: field.residual_unit_norm(),
        f,
        p,
        s,
        spin_energy,
        h0: hamiltonian_h0(p, field, constants),
        e_restricted,
        inv_mass,
        phi0: phi0_from_f(p, f),
        degenerate_direction: degenerate,
    }
}

fn flatten(m: [[f64; 3]; 3]) -> [f64; 9] {
    [
        m[0][0], m[0][1], m[0][2], m[1][0], m[1][1], m[1][2], m[2][0], m[2][1], m[2][2],
    ]
}
