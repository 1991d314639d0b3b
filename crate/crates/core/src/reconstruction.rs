//! Curve reconstruction from the spin field through the step-kernel integral
//!
//! ```text
//! z(xi) = z0 + R0 * int_0^{2pi} [xi - eta] j(eta) d eta
//! ```
//!
//! with `[x]` the integer part of x/2pi in the floor reading. Floor is the
//! only reading under which the reconstructed curve satisfies dz/dxi = R0 j
//! and closes exactly when the mean constraint holds; both facts are checked
//! by `tangent_residual` and `closure_residual`, and the truncation variant
//! is kept around so the verification suite can demonstrate that it fails
//! them.

use crate::constants::ModelConstants;
use crate::error::{Error, Result};
use crate::field::SpinField;
use crate::phase_space::PhasePoint;
use crate::spectral::{self, KernelConvention};
use crate::vec3::{self, Vec3};

pub use crate::spectral::kernel_value;

/// Closed-curve samples z_i at the field nodes, plus the basepoint z0 of the
/// reconstruction formula (which is the curve value at xi = 0 only when the
/// mean constraint holds).
#[derive(Debug, Clone, PartialEq)]
pub struct FilamentCurve {
    points: Vec<Vec3>,
    basepoint: Vec3,
    convention: KernelConvention,
}

impl FilamentCurve {
    pub fn points(&self) -> &[Vec3] {
        &self.points
    }

    pub fn basepoint(&self) -> Vec3 {
        self.basepoint
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn convention(&self) -> KernelConvention {
        self.convention
    }

    /// Pointwise Frenet curvature |z' x z''| / |z'|^3 from spectral
    /// derivatives. Fails on a vanishing tangent.
    pub fn curvature_profile(&self) -> Result<Vec<f64>> {
        curvature_of_points(&self.points)
    }
}

/// Curvature profile of a closed polyline sampled on the periodic grid.
/// Shared diagnostic; also used on curves evolved outside the reconstruction
/// path.
pub fn curvature_of_points(points: &[Vec3]) -> Result<Vec<f64>> {
    let d1 = spectral::derivative(points, 1);
    let d2 = spectral::derivative(points, 2);
    let tangent_scale = d1.iter().map(|v| vec3::norm(*v)).fold(0.0, f64::max);
    let floor = 1e-12 * tangent_scale.max(f64::MIN_POSITIVE);
    d1.iter()
        .zip(d2.iter())
        .enumerate()
        .map(|(i, (t, a))| {
            let speed = vec3::norm(*t);
            if speed < floor {
                return Err(Error::DegenerateGeometry(format!(
                    "vanishing tangent at sample {i}"
                )));
            }
            Ok(vec3::norm(vec3::cross(*t, *a)) / (speed * speed * speed))
        })
        .collect()
}

/// Reconstructs the curve from the field with the floor kernel.
pub fn reconstruct_curve(
    field: &SpinField,
    basepoint: Vec3,
    constants: &ModelConstants,
) -> FilamentCurve {
    reconstruct_curve_with_convention(field, basepoint, constants, KernelConvention::Floor)
}

/// Same reconstruction with an explicit kernel convention; the truncation
/// variant exists for the convention-mutation checks.
pub fn reconstruct_curve_with_convention(
    field: &SpinField,
    basepoint: Vec3,
    constants: &ModelConstants,
    convention: KernelConvention,
) -> FilamentCurve {
    let integral = spectral::kernel_integral(field.samples(), convention);
    let points = integral
        .into_iter()
        .map(|v| vec3::add(basepoint, vec3::scale(constants.r0, v)))
        .collect();
    FilamentCurve { points, basepoint, convention }
}

/// Reconstruction through the phase-space coordinates: the basepoint is
/// (q - tau * t0 * p) / m0.
pub fn reconstruct_from_phase(
    point: &PhasePoint,
    tau: f64,
    constants: &ModelConstants,
) -> FilamentCurve {
    let basepoint = vec3::scale(
        1.0 / constants.m0,
        vec3::sub(point.q, vec3::scale(tau * constants.t0, point.p)),
    );
    reconstruct_curve(&point.field, basepoint, constants)
}

/// Magnitude of the jump of z across xi = 2pi, computed through the kernel's
/// period jump. Under the floor convention this is exactly R0 * |Phi|, so a
/// curve closes precisely when the mean constraint holds; under truncation
/// the identity breaks, which is what the mutation test looks for.
pub fn closure_residual(
    curve: &FilamentCurve,
    field: &SpinField,
    constants: &ModelConstants,
) -> f64 {
    let h = field.spacing();
    let mut jump = [0.0; 3];
    for (xi, s) in field.grid().into_iter().zip(field.samples()) {
        let w = spectral::kernel_period_jump(-xi, curve.convention);
        jump = vec3::add(jump, vec3::scale(w, *s));
    }
    constants.r0 * h * vec3::norm(jump)
}

/// max_i |(dz/dxi)_i - R0 j_i| with the spectral derivative of the curve.
pub fn tangent_residual(
    curve: &FilamentCurve,
    field: &SpinField,
    constants: &ModelConstants,
) -> f64 {
    let d = spectral::derivative(&curve.points, 1);
    d.iter()
        .zip(field.samples())
        .map(|(t, j)| vec3::norm(vec3::sub(*t, vec3::scale(constants.r0, *j))))
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{make_scenario_field, Scenario};
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{PI, TAU};

    fn unit() -> ModelConstants {
        ModelConstants::unit()
    }

    #[test]
    fn circle_reconstructs_the_unit_ring() {
        let field = make_scenario_field(Scenario::Circle, 256).unwrap();
        let curve = reconstruct_curve(&field, [0.0; 3], &unit());
        for (xi, z) in field.grid().into_iter().zip(curve.points()) {
            assert_abs_diff_eq!(z[0], xi.sin(), epsilon = 1e-12);
            assert_abs_diff_eq!(z[1], 1.0 - xi.cos(), epsilon = 1e-12);
            assert_abs_diff_eq!(z[2], 0.0, epsilon = 1e-12);
        }
        // xi = pi/2 lands on sample N/4.
        let q = curve.points()[64];
        assert_abs_diff_eq!(q[0], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(q[1], 1.0, epsilon = 1e-12);
    }

    #[test]
    fn basepoint_and_scale_transport_affinely() {
        let field = make_scenario_field(Scenario::Circle, 256).unwrap();
        let constants = crate::constants::make_constants(2.0, 1.0, 1.0, 1.0, -1.0).unwrap();
        let curve = reconstruct_curve(&field, [5.0, 0.0, 0.0], &constants);
        let q = curve.points()[64];
        assert_abs_diff_eq!(q[0], 7.0, epsilon = 1e-12);
        assert_abs_diff_eq!(q[1], 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(q[2], 0.0, epsilon = 1e-12);
    }

    #[test]
    fn translation_equivariance_is_exact() {
        let field = make_scenario_field(Scenario::KelvinPerturbed { m: 3, eps: 0.05 }, 64).unwrap();
        let d = [1.5, -2.0, 0.25];
        let a = reconstruct_curve(&field, [0.0; 3], &unit());
        let b = reconstruct_curve(&field, d, &unit());
        for (pa, pb) in a.points().iter().zip(b.points()) {
            assert_eq!(vec3::add(*pa, d), *pb);
        }
    }

    #[test]
    fn doubling_r0_doubles_displacements() {
        let field = make_scenario_field(Scenario::Circle, 64).unwrap();
        let c1 = unit();
        let c2 = crate::constants::make_constants(2.0, 1.0, 1.0, 1.0, -1.0).unwrap();
        let a = reconstruct_curve(&field, [0.0; 3], &c1);
        let b = reconstruct_curve(&field, [0.0; 3], &c2);
        for (pa, pb) in a.points().iter().zip(b.points()) {
            for c in 0..3 {
                assert_abs_diff_eq!(2.0 * pa[c], pb[c], epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn closure_residual_is_r0_times_mean_constraint() {
        let constants = crate::constants::make_constants(1.7, 1.0, 1.0, 1.0, -1.0).unwrap();
        let field = make_scenario_field(Scenario::TiltedConstant, 64).unwrap();
        let curve = reconstruct_curve(&field, [0.0; 3], &constants);
        assert_abs_diff_eq!(
            closure_residual(&curve, &field, &constants),
            TAU * 1.7,
            epsilon = 1e-12
        );
        let circle = make_scenario_field(Scenario::Circle, 64).unwrap();
        let ring = reconstruct_curve(&circle, [0.0; 3], &constants);
        assert!(closure_residual(&ring, &circle, &constants) <= 1e-13);

        // Algebraic identity: residual == R0 * |Phi| for any field.
        let kelvin = make_scenario_field(Scenario::KelvinPerturbed { m: 3, eps: 0.05 }, 64).unwrap();
        let curve = reconstruct_curve(&kelvin, [0.0; 3], &constants);
        let direct = constants.r0 * vec3::norm(kelvin.residual_zero_mean());
        assert_abs_diff_eq!(
            closure_residual(&curve, &kelvin, &constants),
            direct,
            epsilon = 1e-15
        );
    }

    #[test]
    fn tangent_residual_is_spectrally_small_on_surface_fields() {
        let constants = unit();
        for scenario in [Scenario::Circle, Scenario::KelvinPerturbed { m: 3, eps: 0.05 }] {
            let field = make_scenario_field(scenario, 256).unwrap();
            let curve = reconstruct_curve(&field, [0.3, -0.1, 2.0], &constants);
            let res = tangent_residual(&curve, &field, &constants);
            assert!(res <= 1e-10, "residual {res} for {scenario:?}");
        }
    }

    #[test]
    fn truncation_kernel_fails_the_tangent_check() {
        let constants = unit();
        let field = make_scenario_field(Scenario::Circle, 256).unwrap();
        let curve = reconstruct_curve_with_convention(
            &field,
            [0.0; 3],
            &constants,
            KernelConvention::TruncateTowardZero,
        );
        assert!(tangent_residual(&curve, &field, &constants) > 0.5);
    }

    #[test]
    fn curvature_of_ring_is_inverse_radius() {
        let field = make_scenario_field(Scenario::Circle, 128).unwrap();
        for (r0, expected) in [(1.0, 1.0), (2.0, 0.5)] {
            let constants = crate::constants::make_constants(r0, 1.0, 1.0, 1.0, -1.0).unwrap();
            let curve = reconstruct_curve(&field, [0.0; 3], &constants);
            for kappa in curve.curvature_profile().unwrap() {
                assert_abs_diff_eq!(kappa, expected, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn unperturbed_kelvin_curvature_matches_the_ring() {
        let a = make_scenario_field(Scenario::KelvinPerturbed { m: 3, eps: 0.0 }, 64).unwrap();
        let b = make_scenario_field(Scenario::Circle, 64).unwrap();
        assert_eq!(a.samples(), b.samples());
    }

    #[test]
    fn degenerate_tangent_is_reported() {
        let points = vec![[0.0, 0.0, 0.0]; 16];
        assert!(matches!(
            curvature_of_points(&points),
            Err(Error::DegenerateGeometry(_))
        ));
    }

    #[test]
    fn kernel_value_floor_convention_examples() {
        assert_eq!(kernel_value(PI, KernelConvention::Floor), 0.0);
        assert_eq!(kernel_value(-PI, KernelConvention::Floor), -1.0);
        assert_eq!(kernel_value(TAU, KernelConvention::Floor), 1.0);
    }
}
