//! Discrete sphere-valued field j(xi) on the uniform periodic grid, its
//! derivatives, the constraint residuals, constraint projection and the
//! internal (spin) energy.
//!
//! A field is "on the constraint surface" when every sample is a unit vector
//! (to `TOL_UNIT`) and the three mean constraints Phi_k = int j_k d xi vanish
//! (to `TOL_MEAN`).

use crate::error::{Error, Result};
use crate::spectral;
use crate::vec3::{self, Vec3};
use std::f64::consts::TAU;

/// Default tolerance on max_i | |j_i|^2 - 1 |.
pub const TOL_UNIT: f64 = 1e-12;
/// Default tolerance on each component of the mean constraint.
pub const TOL_MEAN: f64 = 1e-10;

/// N uniform periodic samples of the field j at xi_i = 2*pi*i/N.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinField {
    samples: Vec<Vec3>,
}

/// Derivative backend: spectral is the default, the 4th-order stencil is a
/// cross-check path.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DerivativeMethod {
    #[default]
    Spectral,
    Fd4,
}

/// Initial-data scenarios.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Scenario {
    /// j = (cos xi, sin xi, 0); the ring at relative equilibrium.
    Circle,
    /// j = (cos m xi, sin m xi, 0), a pure great-circle mode.
    GreatCircle { m: u32 },
    /// Circle plus a third-component ripple eps*sin(m xi), projected back
    /// onto the constraint surface. The generic non-equilibrium test case.
    KelvinPerturbed { m: u32, eps: f64 },
    /// Constant (0,0,1). Deliberately violates the mean constraint; used by
    /// negative tests.
    TiltedConstant,
}

impl SpinField {
    /// Wraps raw samples, enforcing the grid contract (N even, N >= 8).
    pub fn from_samples(samples: Vec<Vec3>) -> Result<Self> {
        let n = samples.len();
        if n < 8 {
            return Err(Error::RejectedInput(format!(
                "need at least 8 samples, got {n}"
            )));
        }
        if n % 2 != 0 {
            return Err(Error::RejectedInput(format!(
                "sample count must be even for the spectral derivative, got {n}"
            )));
        }
        if samples.iter().any(|s| s.iter().any(|x| !x.is_finite())) {
            return Err(Error::RejectedInput("non-finite sample".into()));
        }
        Ok(Self { samples })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn samples(&self) -> &[Vec3] {
        &self.samples
    }

    /// Grid spacing h = 2*pi/N.
    pub fn spacing(&self) -> f64 {
        spectral::spacing(self.len())
    }

    /// Grid nodes.
    pub fn grid(&self) -> Vec<f64> {
        spectral::grid(self.len())
    }

    /// Periodic derivative of the given order (1 or 2).
    pub fn derivative(&self, order: u32, method: DerivativeMethod) -> Vec<Vec3> {
        assert!(order == 1 || order == 2, "only orders 1 and 2 are supported");
        match method {
            DerivativeMethod::Spectral => spectral::derivative(&self.samples, order),
            DerivativeMethod::Fd4 => fd4_derivative(&self.samples, order),
        }
    }

    /// max_i | |j_i|^2 - 1 |.
    pub fn residual_unit_norm(&self) -> f64 {
        self.samples
            .iter()
            .map(|s| (vec3::norm_sq(*s) - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// Phi = h * sum_i j_i, the periodic rectangle rule for int j d xi.
    pub fn residual_zero_mean(&self) -> Vec3 {
        spectral::integral(&self.samples)
    }

    /// True when both constraint residuals are within the given tolerances.
    pub fn on_constraint_surface(&self, tol_unit: f64, tol_mean: f64) -> bool {
        self.residual_unit_norm() <= tol_unit
            && vec3::norm_inf(self.residual_zero_mean()) <= tol_mean
    }

    /// Alternating projection onto the constraint surface: subtract the mean,
    /// renormalize each sample, repeat until both residuals are within `tol`.
    pub fn project_to_constraints(&self, tol: f64, max_iter: usize) -> Result<SpinField> {
        if !(tol > 0.0) {
            return Err(Error::RejectedInput(format!("tolerance must be positive, got {tol}")));
        }
        let mut current = self.samples.clone();
        for _ in 0..=max_iter {
            let unit_res = max_unit_residual(&current);
            let phi = spectral::integral(&current);
            if unit_res <= tol && vec3::norm_inf(phi) <= tol {
                return SpinField::from_samples(current);
            }
            let shift = vec3::scale(1.0 / TAU, phi);
            for s in current.iter_mut() {
                let shifted = vec3::sub(*s, shift);
                match vec3::normalized(shifted, 1e-14) {
                    Some(u) => *s = u,
                    None => {
                        return Err(Error::DegenerateInput(
                            "sample collapsed to zero length during projection".into(),
                        ))
                    }
                }
            }
        }
        let unit_res = max_unit_residual(&current);
        let phi = spectral::integral(&current);
        Err(Error::ProjectionDiverged {
            iterations: max_iter,
            unit_residual: unit_res,
            mean_residual: vec3::norm_inf(phi),
        })
    }

    /// Dimensionless internal energy (1/2pi) int |d j/d xi|^2 d xi, evaluated
    /// with the spectral derivative. The physical internal energy is E0 times
    /// this value; it equals m^2 on a pure great-circle mode m.
    pub fn spin_energy(&self) -> f64 {
        let d = spectral::derivative(&self.samples, 1);
        let h = self.spacing();
        h / TAU * d.iter().map(|v| vec3::norm_sq(*v)).sum::<f64>()
    }
}

fn max_unit_residual(samples: &[Vec3]) -> f64 {
    samples
        .iter()
        .map(|s| (vec3::norm_sq(*s) - 1.0).abs())
        .fold(0.0, f64::max)
}

/// Builds one of the named scenarios on an N-point grid.
pub fn make_scenario_field(scenario: Scenario, n: usize) -> Result<SpinField> {
    let nodes = spectral::grid(n);
    let base = |f: &dyn Fn(f64) -> Vec3| -> Vec<Vec3> { nodes.iter().map(|&xi| f(xi)).collect() };
    match scenario {
        Scenario::Circle => SpinField::from_samples(base(&|xi| [xi.cos(), xi.sin(), 0.0])),
        Scenario::GreatCircle { m } => {
            validate_mode(m, n)?;
            let mf = m as f64;
            SpinField::from_samples(base(&|xi| [(mf * xi).cos(), (mf * xi).sin(), 0.0]))
        }
        Scenario::KelvinPerturbed { m, eps } => {
            validate_mode(m, n)?;
            if !(eps >= 0.0) {
                return Err(Error::RejectedInput(format!(
                    "perturbation amplitude must be nonnegative, got {eps}"
                )));
            }
            let mf = m as f64;
            let raw = SpinField::from_samples(base(&|xi| {
                [xi.cos(), xi.sin(), eps * (mf * xi).sin()]
            }))?;
            raw.project_to_constraints(TOL_UNIT, 50)
        }
        Scenario::TiltedConstant => SpinField::from_samples(vec![[0.0, 0.0, 1.0]; n]),
    }
}

fn validate_mode(m: u32, n: usize) -> Result<()> {
    if m < 1 {
        return Err(Error::RejectedInput("mode number must be at least 1".into()));
    }
    if 2 * m as usize >= n {
        return Err(Error::RejectedInput(format!(
            "mode {m} is not resolvable on {n} samples"
        )));
    }
    Ok(())
}

/// 4th-order central differences on the periodic grid.
fn fd4_derivative(samples: &[Vec3], order: u32) -> Vec<Vec3> {
    let n = samples.len();
    let h = spectral::spacing(n);
    let idx = |i: isize| -> Vec3 { samples[(i.rem_euclid(n as isize)) as usize] };
    (0..n as isize)
        .map(|i| {
            let (m2, m1, p1, p2) = (idx(i - 2), idx(i - 1), idx(i + 1), idx(i + 2));
            let mut out = [0.0; 3];
            for c in 0..3 {
                out[c] = match order {
                    1 => (m2[c] - 8.0 * m1[c] + 8.0 * p1[c] - p2[c]) / (12.0 * h),
                    2 => {
                        let center = samples[i as usize][c];
                        (-m2[c] + 16.0 * m1[c] - 30.0 * center + 16.0 * p1[c] - p2[c])
                            / (12.0 * h * h)
                    }
                    _ => unreachable!("orders other than 1 and 2 are rejected upstream"),
                };
            }
            out
        })
        .collect()
}
