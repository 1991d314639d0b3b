//! Independent reference computations used by the verification suite. Each
//! oracle reaches its answer by a different route from the code it checks:
//! the curve integrator advances the curve samples directly instead of going
//! through the spin field, and the Hessian probe differentiates the energy
//! numerically instead of assembling the tensor.

use crate::constants::ModelConstants;
use crate::error::Result;
use crate::field::SpinField;
use crate::invariants::energy_restricted;
use crate::spectral;
use crate::vec3::{self, Vec3};

/// One RK4 step of the local induction equation
/// dz/dtau = (1/R0) z' x z'' acting on the curve samples themselves, with
/// spectral derivatives in xi.
pub fn lia_step_rk4(points: &[Vec3], r0: f64, dtau: f64) -> Vec<Vec3> {
    let rhs = |pts: &[Vec3]| -> Vec<Vec3> {
        let d1 = spectral::derivative(pts, 1);
        let d2 = spectral::derivative(pts, 2);
        d1.iter()
            .zip(d2)
            .map(|(t, a)| vec3::scale(1.0 / r0, vec3::cross(*t, a)))
            .collect()
    };
    let advance = |pts: &[Vec3], k: &[Vec3], factor: f64| -> Vec<Vec3> {
        pts.iter()
            .zip(k)
            .map(|(p, v)| vec3::add(*p, vec3::scale(factor, *v)))
            .collect()
    };
    let k1 = rhs(points);
    let k2 = rhs(&advance(points, &k1, 0.5 * dtau));
    let k3 = rhs(&advance(points, &k2, 0.5 * dtau));
    let k4 = rhs(&advance(points, &k3, dtau));
    (0..points.len())
        .map(|i| {
            let increment = vec3::add(
                vec3::add(k1[i], vec3::scale(2.0, k2[i])),
                vec3::add(vec3::scale(2.0, k3[i]), k4[i]),
            );
            vec3::add(points[i], vec3::scale(dtau / 6.0, increment))
        })
        .collect()
}

/// Integrates the curve over `n_steps` RK4 steps.
pub fn lia_evolve(points: &[Vec3], r0: f64, dtau: f64, n_steps: usize) -> Vec<Vec3> {
    let mut current = points.to_vec();
    for _ in 0..n_steps {
        current = lia_step_rk4(&current, r0, dtau);
    }
    current
}

/// Central-difference Hessian of the restricted energy in the momentum,
/// the defining form of the inverse effective-mass tensor.
pub fn restricted_energy_hessian(
    field: &SpinField,
    constants: &ModelConstants,
    p: Vec3,
    step: f64,
) -> Result<[[f64; 3]; 3]> {
    let energy = |p: Vec3| energy_restricted(p, field, constants);
    let mut out = [[0.0; 3]; 3];
    for i in 0..3 {
        for k in 0..3 {
            let shifted = |si: f64, sk: f64| -> Result<f64> {
                let mut q = p;
                q[i] += si;
                q[k] += sk;
                energy(q)
            };
            out[i][k] = if i == k {
                (shifted(step, 0.0)? - 2.0 * energy(p)? + shifted(-step, 0.0)?) / (step * step)
            } else {
                (shifted(step, step)? - shifted(step, -step)? - shifted(-step, step)?
                    + shifted(-step, -step)?)
                    / (4.0 * step * step)
            };
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{make_scenario_field, Scenario};
    use crate::reconstruction::reconstruct_curve;

    #[test]
    fn lia_keeps_the_ring_rigid() {
        // The ring translates along its axis under local induction; its
        // shape (distance to the moving centre) is preserved.
        let constants = ModelConstants::unit();
        let field = make_scenario_field(Scenario::Circle, 64).unwrap();
        let curve = reconstruct_curve(&field, [0.0; 3], &constants);
        let h = spectral::spacing(64);
        let dtau = 0.1 * h * h;
        let moved = lia_evolve(curve.points(), 1.0, dtau, 200);
        let centre = spectral::mean(&moved);
        for p in &moved {
            let r = vec3::norm(vec3::sub(*p, centre));
            assert!((r - 1.0).abs() <= 1e-8, "radius {r}");
        }
        // Axial translation at unit speed in tau.
        let tau = 200.0 * dtau;
        assert!((centre[2] - tau).abs() <= 1e-8, "centre {centre:?} at tau {tau}");
    }

    #[test]
    fn hessian_probe_recovers_a_quadratic_exactly() {
        let constants = ModelConstants::unit();
        let field = make_scenario_field(Scenario::Circle, 64).unwrap();
        let p = [0.4, -0.2, 1.0];
        let hess = restricted_energy_hessian(&field, &constants, p, 1e-4).unwrap();
        // The restricted energy is quadratic in p, so central differences are
        // exact up to round-off; n_f is the z axis here.
        for i in 0..3 {
            for k in 0..3 {
                let expected = if i == 2 && k == 2 { 1.0 } else { 0.0 };
                assert!(
                    (hess[i][k] - expected).abs() <= 1e-8,
                    "entry ({i},{k}) = {}",
                    hess[i][k]
                );
            }
        }
    }
}
