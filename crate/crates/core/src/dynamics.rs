//! Time integration of the spin-chain equation d j / d tau = j x d^2 j / d xi^2
//! with invariant monitoring, plus the local-induction cross-check on the
//! reconstructed curve.
//!
//! Two steppers are provided. The implicit midpoint rule is the default: it
//! preserves the pointwise sphere constraint |j_i| = 1 and every quadratic
//! invariant of the semi-discretization (spin energy, the mean constraint)
//! up to round-off, without any renormalization. Projected RK4 is the
//! independent cross-check; it renormalizes each sample after the stage
//! combination.

use crate::constants::ModelConstants;
use crate::error::{Error, Result};
use crate::field::SpinField;
use crate::invariants::{report_for, InvariantReport};
use crate::reconstruction::reconstruct_curve;
use crate::spectral;
use crate::vec3::{self, Vec3};

/// Right-hand side j x d^2 j / d xi^2 with the spectral second derivative.
pub fn rhs_spin(field: &SpinField) -> Vec<Vec3> {
    rhs_samples(field.samples())
}

fn rhs_samples(samples: &[Vec3]) -> Vec<Vec3> {
    let d2 = spectral::derivative(samples, 2);
    samples
        .iter()
        .zip(d2)
        .map(|(j, w)| vec3::cross(*j, w))
        .collect()
}

/// One classical RK4 step followed by per-sample renormalization.
pub fn step_rk4_projected(field: &SpinField, dtau: f64) -> Result<SpinField> {
    if !(dtau > 0.0) {
        return Err(Error::RejectedInput(format!("step must be positive, got {dtau}")));
    }
    let y0 = field.samples();
    let k1 = rhs_samples(y0);
    let k2 = rhs_samples(&advanced(y0, &k1, 0.5 * dtau));
    let k3 = rhs_samples(&advanced(y0, &k2, 0.5 * dtau));
    let k4 = rhs_samples(&advanced(y0, &k3, dtau));
    let mut out = Vec::with_capacity(y0.len());
    for i in 0..y0.len() {
        let increment = vec3::add(
            vec3::add(k1[i], vec3::scale(2.0, k2[i])),
            vec3::add(vec3::scale(2.0, k3[i]), k4[i]),
        );
        let raw = vec3::add(y0[i], vec3::scale(dtau / 6.0, increment));
        match vec3::normalized(raw, 1e-8) {
            Some(u) => out.push(u),
            None => {
                return Err(Error::StepFailed(format!(
                    "sample {i} collapsed below 1e-8 during an RK4 step"
                )))
            }
        }
    }
    SpinField::from_samples(out)
}

fn advanced(y: &[Vec3], k: &[Vec3], factor: f64) -> Vec<Vec3> {
    y.iter()
        .zip(k)
        .map(|(a, b)| vec3::add(*a, vec3::scale(factor, *b)))
        .collect()
}

/// One implicit midpoint step, j+ = j + dtau * F((j + j+)/2), solved by
/// fixed-point iteration seeded with an explicit Euler predictor. Preserves
/// |j_i| without renormalization: the update is orthogonal to the midpoint.
pub fn step_implicit_midpoint(
    field: &SpinField,
    dtau: f64,
    tol: f64,
    max_iter: usize,
) -> Result<SpinField> {
    if !(dtau > 0.0 && tol > 0.0) {
        return Err(Error::RejectedInput(format!(
            "step and tolerance must be positive, got dtau={dtau}, tol={tol}"
        )));
    }
    let y0 = field.samples();
    let mut w = advanced(y0, &rhs_samples(y0), dtau);
    let mut previous_delta = f64::INFINITY;
    let mut contraction = f64::NAN;
    for _ in 0..max_iter {
        let midpoint: Vec<Vec3> = y0
            .iter()
            .zip(&w)
            .map(|(a, b)| vec3::scale(0.5, vec3::add(*a, *b)))
            .collect();
        let next = advanced(y0, &rhs_samples(&midpoint), dtau);
        let delta = next
            .iter()
            .zip(&w)
            .map(|(a, b)| vec3::norm_inf(vec3::sub(*a, *b)))
            .fold(0.0, f64::max);
        w = next;
        if delta <= tol {
            return SpinField::from_samples(w);
        }
        contraction = delta / previous_delta;
        previous_delta = delta;
        if !delta.is_finite() {
            break;
        }
    }
    Err(Error::FixedPointDiverged { iterations: max_iter, contraction })
}

/// Stepper choice for `evolve`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Integrator {
    #[default]
    ImplicitMidpoint,
    Rk4Projected,
}

impl Integrator {
    /// Unit-norm residual above which a run is considered broken. Midpoint
    /// drifts only by round-off; RK4 renormalizes, so anything visible
    /// signals instability.
    pub fn drift_budget(self) -> f64 {
        match self {
            Integrator::ImplicitMidpoint => 1e-10,
            Integrator::Rk4Projected => 1e-12,
        }
    }

    /// Conservative default step for grid spacing h (dispersive CFL).
    pub fn default_dtau(self, n: usize) -> f64 {
        let h = spectral::spacing(n);
        match self {
            Integrator::ImplicitMidpoint => 0.1 * h * h,
            Integrator::Rk4Projected => 0.2 * h * h,
        }
    }
}

/// Integration plan for `evolve`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolveSpec {
    pub integrator: Integrator,
    pub dtau: f64,
    pub n_steps: usize,
    /// Snapshot cadence in steps; the initial and final states are always
    /// recorded.
    pub monitor_every: usize,
    /// Fixed-point tolerance of the midpoint solve.
    pub tol: f64,
    /// Fixed-point iteration cap.
    pub max_iter: usize,
}

impl EvolveSpec {
    pub fn new(integrator: Integrator, dtau: f64, n_steps: usize) -> Self {
        Self {
            integrator,
            dtau,
            n_steps,
            monitor_every: (n_steps / 100).max(1),
            tol: 1e-14,
            max_iter: 200,
        }
    }
}

/// Monitored trajectory: snapshots, their times and invariant reports.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<SpinField>,
    pub reports: Vec<InvariantReport>,
}

/// An aborted run carries whatever was recorded before the failure.
#[derive(Debug)]
pub struct EvolveAbort {
    pub cause: Error,
    pub partial: Trajectory,
}

/// Integrates the field over `spec.n_steps` steps, recording an invariant
/// report every `monitor_every` steps. The momentum `p` is a conserved
/// coordinate of this flow and is carried through unchanged.
pub fn evolve(
    field: &SpinField,
    spec: &EvolveSpec,
    constants: &ModelConstants,
    p: Vec3,
) -> std::result::Result<Trajectory, Box<EvolveAbort>> {
    let mut trajectory = Trajectory {
        times: Vec::new(),
        states: Vec::new(),
        reports: Vec::new(),
    };
    let mut record = |state: &SpinField, tau: f64| {
        trajectory.times.push(tau);
        trajectory.states.push(state.clone());
        trajectory.reports.push(report_for(state, p, constants));
    };
    record(field, 0.0);

    let budget = spec.integrator.drift_budget();
    let mut state = field.clone();
    for step in 1..=spec.n_steps {
        let next = match spec.integrator {
            Integrator::ImplicitMidpoint => {
                step_implicit_midpoint(&state, spec.dtau, spec.tol, spec.max_iter)
            }
            Integrator::Rk4Projected => step_rk4_projected(&state, spec.dtau),
        };
        state = match next {
            Ok(s) => s,
            Err(cause) => return Err(Box::new(EvolveAbort { cause, partial: trajectory })),
        };
        let drift = state.residual_unit_norm();
        if drift > budget {
            return Err(Box::new(EvolveAbort {
                cause: Error::StepFailed(format!(
                    "unit-norm residual {drift:.3e} exceeded the {budget:.0e} budget at step {step}"
                )),
                partial: trajectory,
            }));
        }
        if step % spec.monitor_every == 0 || step == spec.n_steps {
            record(&state, step as f64 * spec.dtau);
        }
    }
    Ok(trajectory)
}

/// Residual of the local induction equation, split into its spatially
/// uniform part and the rest.
///
/// A = R0 * kernel integral of (j x j''), the velocity of the reconstructed
/// curve; B = (1/R0) z' x z''. Their difference is uniform in xi (it equals
/// -R0 (j x j')(0) up to discretization), so the curve moves by local
/// induction modulo a rigid translation; `nonuniform_norm` measures how far
/// that statement holds and `uniform_part` reports the drift itself.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LieResidual {
    pub uniform_part: Vec3,
    pub nonuniform_norm: f64,
}

pub fn lie_residual(field: &SpinField, constants: &ModelConstants) -> LieResidual {
    let velocity = spectral::kernel_integral(&rhs_spin(field), spectral::KernelConvention::Floor);
    let curve = reconstruct_curve(field, [0.0; 3], constants);
    let d1 = spectral::derivative(curve.points(), 1);
    let d2 = spectral::derivative(curve.points(), 2);
    let difference: Vec<Vec3> = velocity
        .iter()
        .zip(d1.iter().zip(d2.iter()))
        .map(|(a, (t, c))| {
            let b = vec3::scale(1.0 / constants.r0, vec3::cross(*t, *c));
            vec3::sub(vec3::scale(constants.r0, *a), b)
        })
        .collect();
    let uniform_part = spectral::mean(&difference);
    let nonuniform_norm = difference
        .iter()
        .map(|d| vec3::norm(vec3::sub(*d, uniform_part)))
        .fold(0.0, f64::max);
    LieResidual { uniform_part, nonuniform_norm }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{make_scenario_field, Scenario};
    use approx::assert_abs_diff_eq;

    fn max_sample_diff(a: &SpinField, b: &SpinField) -> f64 {
        a.samples()
            .iter()
            .zip(b.samples())
            .map(|(x, y)| vec3::norm_inf(vec3::sub(*x, *y)))
            .fold(0.0, f64::max)
    }

    #[test]
    fn ring_is_a_relative_equilibrium_of_the_rhs() {
        let field = make_scenario_field(Scenario::Circle, 128).unwrap();
        for v in rhs_spin(&field) {
            assert!(vec3::norm(v) <= 1e-12);
        }
    }

    #[test]
    fn constant_field_has_zero_rhs() {
        let field = make_scenario_field(Scenario::TiltedConstant, 32).unwrap();
        for v in rhs_spin(&field) {
            assert_eq!(v, [0.0; 3]);
        }
    }

    #[test]
    fn rhs_of_tilted_circle_matches_the_closed_form() {
        // j = (a cos, a sin, b) gives j x j'' = ab (sin, -cos, 0).
        let a = 1.0 / 2.0_f64.sqrt();
        let b = a;
        let n = 128;
        let samples: Vec<Vec3> = spectral::grid(n)
            .into_iter()
            .map(|xi| [a * xi.cos(), a * xi.sin(), b])
            .collect();
        let field = SpinField::from_samples(samples).unwrap();
        let rhs = rhs_spin(&field);
        for (xi, v) in spectral::grid(n).into_iter().zip(rhs) {
            assert_abs_diff_eq!(v[0], a * b * xi.sin(), epsilon = 1e-12);
            assert_abs_diff_eq!(v[1], -a * b * xi.cos(), epsilon = 1e-12);
            assert_abs_diff_eq!(v[2], 0.0, epsilon = 1e-12);
        }
        // Sample 0 sits at xi = 0: (0, -ab, 0) = (0, -1/2, 0).
        assert_abs_diff_eq!(rhs_spin(&field)[0][1], -0.5, epsilon = 1e-12);
    }

    #[test]
    fn both_steppers_fix_the_ring() {
        let field = make_scenario_field(Scenario::Circle, 64).unwrap();
        let dtau = Integrator::ImplicitMidpoint.default_dtau(64);
        let a = step_implicit_midpoint(&field, dtau, 1e-14, 100).unwrap();
        assert!(max_sample_diff(&field, &a) <= 1e-14);
        let b = step_rk4_projected(&field, dtau).unwrap();
        assert!(max_sample_diff(&field, &b) <= 1e-14);
    }

    #[test]
    fn midpoint_preserves_unit_norms_without_renormalization() {
        let field = make_scenario_field(Scenario::KelvinPerturbed { m: 3, eps: 0.05 }, 64).unwrap();
        let dtau = Integrator::ImplicitMidpoint.default_dtau(64);
        let next = step_implicit_midpoint(&field, dtau, 1e-14, 100).unwrap();
        assert!(next.residual_unit_norm() <= 1e-13);
    }

    #[test]
    fn rk4_renormalizes_exactly() {
        let field = make_scenario_field(Scenario::KelvinPerturbed { m: 3, eps: 0.05 }, 64).unwrap();
        let dtau = Integrator::Rk4Projected.default_dtau(64);
        let next = step_rk4_projected(&field, dtau).unwrap();
        assert!(next.residual_unit_norm() <= 4.0 * f64::EPSILON);
    }

    #[test]
    fn oversized_midpoint_steps_fail_to_contract() {
        let field = make_scenario_field(Scenario::KelvinPerturbed { m: 3, eps: 0.05 }, 64).unwrap();
        let h = spectral::spacing(64);
        let err = step_implicit_midpoint(&field, 1e3 * h * h, 1e-14, 50);
        assert!(matches!(err, Err(Error::FixedPointDiverged { .. })));
    }

    #[test]
    fn great_circle_modes_are_stationary_under_evolve() {
        let field = make_scenario_field(Scenario::GreatCircle { m: 2 }, 64).unwrap();
        let spec = EvolveSpec::new(Integrator::ImplicitMidpoint, 1e-3, 50);
        let constants = ModelConstants::unit();
        let trajectory = evolve(&field, &spec, &constants, [0.0; 3]).unwrap();
        let last = trajectory.states.last().unwrap();
        assert!(max_sample_diff(&field, last) <= 1e-12);
    }

    #[test]
    fn evolve_conserves_the_quadratic_invariants_short_run() {
        let field = make_scenario_field(Scenario::KelvinPerturbed { m: 3, eps: 0.05 }, 64).unwrap();
        let dtau = Integrator::ImplicitMidpoint.default_dtau(64);
        let spec = EvolveSpec::new(Integrator::ImplicitMidpoint, dtau, 400);
        let constants = ModelConstants::unit();
        let trajectory = evolve(&field, &spec, &constants, [0.0; 3]).unwrap();
        let first = &trajectory.reports[0];
        let last = trajectory.reports.last().unwrap();
        let energy_drift = (last.spin_energy - first.spin_energy).abs() / first.spin_energy;
        assert!(energy_drift <= 1e-11, "energy drift {energy_drift:.3e}");
        assert!(vec3::norm_inf(last.phi) <= 1e-11);
        let f_drift = vec3::norm(vec3::sub(last.f, first.f)) / vec3::norm(first.f);
        assert!(f_drift <= 1e-9, "f drift {f_drift:.3e}");
        assert!(last.unit_norm_res <= 1e-13);
    }

    #[test]
    fn midpoint_stepping_is_time_reversible() {
        let field = make_scenario_field(Scenario::KelvinPerturbed { m: 3, eps: 0.05 }, 64).unwrap();
        let dtau = Integrator::ImplicitMidpoint.default_dtau(64);
        let n = 200;
        let mut state = field.clone();
        for _ in 0..n {
            state = step_implicit_midpoint(&state, dtau, 1e-15, 200).unwrap();
        }
        // Reverse time by negating the field's sense of the step: midpoint is
        // symmetric, so stepping the reversed flow retraces the orbit.
        let mut back = SpinField::from_samples(
            state.samples().iter().map(|s| [-s[0], -s[1], -s[2]]).collect(),
        )
        .unwrap();
        for _ in 0..n {
            back = step_implicit_midpoint(&back, dtau, 1e-15, 200).unwrap();
        }
        let restored =
            SpinField::from_samples(back.samples().iter().map(|s| [-s[0], -s[1], -s[2]]).collect())
                .unwrap();
        assert!(max_sample_diff(&field, &restored) <= 1e-9);
    }

    #[test]
    fn midpoint_converges_at_second_order() {
        let field = make_scenario_field(Scenario::KelvinPerturbed { m: 3, eps: 0.2 }, 32).unwrap();
        let horizon = 0.02;
        let run = |dtau: f64| -> SpinField {
            let steps = (horizon / dtau).round() as usize;
            let mut state = field.clone();
            for _ in 0..steps {
                state = step_implicit_midpoint(&state, dtau, 1e-15, 400).unwrap();
            }
            state
        };
        let reference = run(horizon / 2048.0);
        let coarse = max_sample_diff(&run(horizon / 64.0), &reference);
        let fine = max_sample_diff(&run(horizon / 128.0), &reference);
        let order = (coarse / fine).log2();
        assert!(
            (order - 2.0).abs() <= 0.5,
            "observed order {order:.2} (errors {coarse:.3e} -> {fine:.3e})"
        );
    }

    #[test]
    fn lie_residual_of_the_ring_is_a_pure_translation() {
        let constants = ModelConstants::unit();
        let field = make_scenario_field(Scenario::Circle, 128).unwrap();
        let r = lie_residual(&field, &constants);
        assert!(r.nonuniform_norm <= 1e-12, "nonuniform {:.3e}", r.nonuniform_norm);
        assert_abs_diff_eq!(r.uniform_part[2], -1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(r.uniform_part[0], 0.0, epsilon = 1e-12);
    }

    #[test]
    fn lie_residual_of_great_circle_modes_is_uniform() {
        let constants = ModelConstants::unit();
        let field = make_scenario_field(Scenario::GreatCircle { m: 2 }, 128).unwrap();
        let r = lie_residual(&field, &constants);
        assert!(r.nonuniform_norm <= 1e-12);
        assert_abs_diff_eq!(r.uniform_part[2], -2.0, epsilon = 1e-11);
    }

    #[test]
    fn lie_residual_of_kelvin_waves_is_uniform_to_spectral_accuracy() {
        let constants = ModelConstants::unit();
        let field = make_scenario_field(Scenario::KelvinPerturbed { m: 3, eps: 0.05 }, 256).unwrap();
        let r = lie_residual(&field, &constants);
        assert!(r.nonuniform_norm <= 1e-6, "nonuniform {:.3e}", r.nonuniform_norm);
    }
}
