//! Discrete Lie-Poisson bracket engine, functional-derivative oracle, the
//! first-class constraint checks and the Hamiltonian-flow normalization
//! check.
//!
//! The continuum bracket {j_a(xi), j_b(eta)} = beta eps_abc j_c(xi)
//! delta(xi - eta) is discretized with delta(xi_i - xi_j) -> delta_ij / h
//! and functional derivatives carried as per-sample gradients dF/dj_i
//! (which absorb one factor of h relative to the density dF/dj(xi)):
//!
//! ```text
//! {F, G} = (beta / h) sum_i j_i . (dF/dj_i x dG/dj_i)
//! ```
//!
//! This pairing makes the constraint algebra {Phi_a, Phi_b} =
//! beta eps_abc Phi_c close exactly at every N, not just asymptotically.

use crate::constants::ModelConstants;
use crate::error::{Error, Result};
use crate::field::SpinField;
use crate::invariants::{phi0_from_f, vector_f, vector_f_gradient_terms, FMethod};
use crate::spectral;
use crate::vec3::{self, Vec3};
use rayon::prelude::*;
use serde::Serialize;
use std::sync::Arc;

/// Default step of the central-difference gradient oracle.
pub const FD_STEP: f64 = 1e-6;

type EvalFn = Arc<dyn Fn(&SpinField) -> f64 + Send + Sync>;
type GradFn = Arc<dyn Fn(&SpinField) -> Vec<Vec3> + Send + Sync>;

/// A scalar functional of the spin field, optionally with an analytic
/// per-sample gradient. When a gradient is present it must agree with the
/// central-difference oracle; `functional_gradient_fd` is the referee.
#[derive(Clone)]
pub struct DiscreteFunctional {
    pub name: String,
    eval: EvalFn,
    gradient: Option<GradFn>,
}

impl DiscreteFunctional {
    pub fn new(
        name: impl Into<String>,
        eval: impl Fn(&SpinField) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self { name: name.into(), eval: Arc::new(eval), gradient: None }
    }

    pub fn with_gradient(
        mut self,
        gradient: impl Fn(&SpinField) -> Vec<Vec3> + Send + Sync + 'static,
    ) -> Self {
        self.gradient = Some(Arc::new(gradient));
        self
    }

    pub fn evaluate(&self, field: &SpinField) -> f64 {
        (self.eval)(field)
    }

    pub fn has_analytic_gradient(&self) -> bool {
        self.gradient.is_some()
    }

    /// Analytic gradient when present, central differences otherwise.
    pub fn gradient(&self, field: &SpinField) -> Vec<Vec3> {
        match &self.gradient {
            Some(g) => g(field),
            None => functional_gradient_fd(self, field, FD_STEP),
        }
    }

    /// Mean constraint component Phi_k = h sum_i (j_i)_k; the gradient is the
    /// constant h e_k.
    pub fn phi_component(axis: usize) -> Self {
        assert!(axis < 3);
        Self::new(format!("Phi_{}", axis + 1), move |field: &SpinField| {
            field.residual_zero_mean()[axis]
        })
        .with_gradient(move |field: &SpinField| {
            let h = field.spacing();
            let mut e = [0.0; 3];
            e[axis] = h;
            vec![e; field.len()]
        })
    }

    /// scale * spin energy; the gradient is -scale * (h/pi) * j''.
    pub fn spin_energy_scaled(name: impl Into<String>, scale: f64) -> Self {
        Self::new(name, move |field: &SpinField| scale * field.spin_energy()).with_gradient(
            move |field: &SpinField| {
                let h = field.spacing();
                let d2 = spectral::derivative(field.samples(), 2);
                d2.into_iter()
                    .map(|v| vec3::scale(-scale * h / std::f64::consts::PI, v))
                    .collect()
            },
        )
    }

    /// The spin part of the energy, E0 * spin energy.
    pub fn hamiltonian_spin(constants: &ModelConstants) -> Self {
        Self::spin_energy_scaled("H0_spin", constants.e0)
    }

    /// Coordinate functional j_axis at one sample.
    pub fn coordinate(sample: usize, axis: usize) -> Self {
        assert!(axis < 3);
        Self::new(format!("j{}[{}]", axis + 1, sample), move |field: &SpinField| {
            field.samples()[sample][axis]
        })
        .with_gradient(move |field: &SpinField| {
            let mut g = vec![[0.0; 3]; field.len()];
            g[sample][axis] = 1.0;
            g
        })
    }

    /// Pointwise Casimir |j(sample)|^2.
    pub fn casimir_norm_sq(sample: usize) -> Self {
        Self::new(format!("|j[{sample}]|^2"), move |field: &SpinField| {
            vec3::norm_sq(field.samples()[sample])
        })
        .with_gradient(move |field: &SpinField| {
            let mut g = vec![[0.0; 3]; field.len()];
            g[sample] = vec3::scale(2.0, field.samples()[sample]);
            g
        })
    }

    /// Component of the f-vector. The gradient uses the exact adjoint of the
    /// kernel-integral operator.
    pub fn f_component(axis: usize) -> Self {
        assert!(axis < 3);
        let mut e = [0.0; 3];
        e[axis] = 1.0;
        Self::new(format!("f_{}", axis + 1), move |field: &SpinField| {
            vector_f(field, FMethod::Fast)[axis]
        })
        .with_gradient(move |field: &SpinField| {
            let h = field.spacing();
            vector_f_gradient_terms(field)
                .into_iter()
                .map(|w| vec3::scale(0.5 * h, vec3::cross(w, e)))
                .collect()
        })
    }

    /// Collinearity constraint Phi_0 at fixed momentum p.
    pub fn phi0(p: Vec3) -> Self {
        Self::new("Phi_0", move |field: &SpinField| {
            phi0_from_f(p, vector_f(field, FMethod::Fast))
        })
        .with_gradient(move |field: &SpinField| {
            let h = field.spacing();
            let f = vector_f(field, FMethod::Fast);
            let direction = vec3::sub(
                vec3::scale(vec3::dot(p, f), p),
                vec3::scale(vec3::norm_sq(p), f),
            );
            vector_f_gradient_terms(field)
                .into_iter()
                .map(|w| vec3::scale(h, vec3::cross(w, direction)))
                .collect()
        })
    }

    /// Product functional F * G with the product-rule gradient when both
    /// factors carry one.
    pub fn product(f: &Self, g: &Self) -> Self {
        let name = format!("({})*({})", f.name, g.name);
        let fe = f.eval.clone();
        let ge = g.eval.clone();
        let mut out = Self {
            name,
            eval: Arc::new(move |field: &SpinField| fe(field) * ge(field)),
            gradient: None,
        };
        if let (Some(fg), Some(gg)) = (f.gradient.clone(), g.gradient.clone()) {
            let fe = f.eval.clone();
            let ge = g.eval.clone();
            out.gradient = Some(Arc::new(move |field: &SpinField| {
                let fval = fe(field);
                let gval = ge(field);
                fg(field)
                    .into_iter()
                    .zip(gg(field))
                    .map(|(a, b)| vec3::add(vec3::scale(gval, a), vec3::scale(fval, b)))
                    .collect()
            }));
        }
        out
    }
}

/// Central-difference gradient (F(j + s e) - F(j - s e)) / (2 s) for every
/// sample and component. Perturbations are applied to the raw samples with
/// no constraint enforcement. Rows are computed in parallel and assembled in
/// index order, so the result is deterministic.
pub fn functional_gradient_fd(
    functional: &DiscreteFunctional,
    field: &SpinField,
    step: f64,
) -> Vec<Vec3> {
    assert!(step > 0.0, "FD step must be positive");
    let samples = field.samples().to_vec();
    (0..samples.len())
        .into_par_iter()
        .map(|i| {
            let mut row = [0.0; 3];
            let mut perturbed = samples.clone();
            for c in 0..3 {
                let original = perturbed[i][c];
                perturbed[i][c] = original + step;
                let plus = (functional.eval)(
                    &SpinField::from_samples(perturbed.clone()).expect("perturbed field is valid"),
                );
                perturbed[i][c] = original - step;
                let minus = (functional.eval)(
                    &SpinField::from_samples(perturbed.clone()).expect("perturbed field is valid"),
                );
                perturbed[i][c] = original;
                row[c] = (plus - minus) / (2.0 * step);
            }
            row
        })
        .collect()
}

/// Discrete Lie-Poisson bracket {F, G} at the given field.
pub fn poisson_bracket(
    f: &DiscreteFunctional,
    g: &DiscreteFunctional,
    field: &SpinField,
    constants: &ModelConstants,
) -> f64 {
    poisson_bracket_with_beta(f, g, field, constants.beta)
}

pub fn poisson_bracket_with_beta(
    f: &DiscreteFunctional,
    g: &DiscreteFunctional,
    field: &SpinField,
    beta: f64,
) -> f64 {
    let gf = f.gradient(field);
    let gg = g.gradient(field);
    bracket_from_gradients(&gf, &gg, field, beta)
}

fn bracket_from_gradients(gf: &[Vec3], gg: &[Vec3], field: &SpinField, beta: f64) -> f64 {
    let h = field.spacing();
    let sum: f64 = field
        .samples()
        .iter()
        .zip(gf.iter().zip(gg))
        .map(|(j, (a, b))| vec3::dot(*j, vec3::cross(*a, *b)))
        .sum();
    beta / h * sum
}

/// Natural magnitude of the bracket sum before cancellation; residuals are
/// judged relative to it.
fn bracket_scale(gf: &[Vec3], gg: &[Vec3], field: &SpinField, beta: f64) -> f64 {
    let h = field.spacing();
    let sum: f64 = gf
        .iter()
        .zip(gg)
        .map(|(a, b)| vec3::norm(*a) * vec3::norm(*b))
        .sum();
    (beta.abs() / h * sum).max(f64::MIN_POSITIVE)
}

/// One verdict row of the constraint-algebra report.
#[derive(Debug, Clone, Serialize)]
pub struct AlgebraRow {
    pub name: String,
    pub residual: f64,
    pub scale: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl AlgebraRow {
    fn judge(name: impl Into<String>, residual: f64, scale: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            residual,
            scale,
            tolerance,
            pass: residual <= tolerance * scale,
        }
    }
}

/// Constraint-algebra report: (a) closure of the su(2) algebra of Phi_1..3,
/// (b) brackets of Phi_a with Phi_0, (c) brackets of the spin Hamiltonian
/// with every constraint.
#[derive(Debug, Clone, Serialize)]
pub struct FirstClassReport {
    pub rows: Vec<AlgebraRow>,
    pub beta_used: f64,
}

impl FirstClassReport {
    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }

    /// Serializes as `{identity_residuals: {...}, beta_used: ...}`.
    pub fn to_json(&self) -> serde_json::Value {
        let mut residuals = serde_json::Map::new();
        for row in &self.rows {
            residuals.insert(row.name.clone(), serde_json::json!(row.residual));
        }
        serde_json::json!({ "identity_residuals": residuals, "beta_used": self.beta_used })
    }
}

/// Runs the first-class checks at the given field and momentum. The rows for
/// Phi_0 are only meaningful at admissible data (field on the constraint
/// surface, p parallel to f); the caller controls that.
pub fn check_first_class(
    field: &SpinField,
    p: Vec3,
    constants: &ModelConstants,
    beta_override: Option<f64>,
) -> FirstClassReport {
    let beta = beta_override.unwrap_or(constants.beta);
    let phi: Vec<DiscreteFunctional> = (0..3).map(DiscreteFunctional::phi_component).collect();
    let phi_values = field.residual_zero_mean();
    let mut rows = Vec::new();

    // (a) {Phi_a, Phi_b} = beta eps_abc Phi_c, exact at every N.
    let mut worst = 0.0f64;
    let mut worst_scale = f64::MIN_POSITIVE;
    for a in 0..3 {
        for b in 0..3 {
            let ga = phi[a].gradient(field);
            let gb = phi[b].gradient(field);
            let bracket = bracket_from_gradients(&ga, &gb, field, beta);
            let expected: f64 = (0..3).map(|c| beta * levi_civita(a, b, c) * phi_values[c]).sum();
            worst = worst.max((bracket - expected).abs());
            worst_scale = worst_scale.max(bracket_scale(&ga, &gb, field, beta));
        }
    }
    rows.push(AlgebraRow::judge("su2_closure", worst, worst_scale, 1e-13));

    // (b) {Phi_a, Phi_0} at the supplied momentum.
    let phi0 = DiscreteFunctional::phi0(p);
    let g0 = phi0.gradient(field);
    for (a, phi_a) in phi.iter().enumerate() {
        let ga = phi_a.gradient(field);
        let bracket = bracket_from_gradients(&ga, &g0, field, beta);
        // Phi_0 is quartic in (p, f); judge against that magnitude rather
        // than the gradient product, which itself vanishes at collinear data.
        let f = vector_f(field, FMethod::Fast);
        let scale = beta.abs() * (vec3::norm_sq(p) * vec3::norm_sq(f)).max(f64::MIN_POSITIVE);
        rows.push(AlgebraRow::judge(
            format!("phi{}_phi0", a + 1),
            bracket.abs(),
            scale,
            1e-8,
        ));
    }

    // (c) {H_spin, Phi_k} for k = 0..3.
    let h_spin = DiscreteFunctional::hamiltonian_spin(constants);
    let gh = h_spin.gradient(field);
    for (k, phi_k) in phi.iter().enumerate() {
        let gk = phi_k.gradient(field);
        let bracket = bracket_from_gradients(&gh, &gk, field, beta);
        let scale = bracket_scale(&gh, &gk, field, beta);
        rows.push(AlgebraRow::judge(
            format!("h_spin_phi{}", k + 1),
            bracket.abs(),
            scale,
            1e-10,
        ));
    }
    let bracket = bracket_from_gradients(&gh, &g0, field, beta);
    let scale = bracket_scale(&gh, &g0, field, beta).max(
        beta.abs() * vec3::norm_sq(p) * vec3::norm_sq(vector_f(field, FMethod::Fast)),
    );
    rows.push(AlgebraRow::judge("h_spin_phi0", bracket.abs(), scale, 1e-8));

    FirstClassReport { rows, beta_used: beta }
}

fn levi_civita(a: usize, b: usize, c: usize) -> f64 {
    match (a, b, c) {
        (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1.0,
        (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1.0,
        _ => 0.0,
    }
}

/// Result of the Hamiltonian-flow comparison: the bracket-generated velocity
/// {H0, j} is fitted against the equation of motion j x j''. `kappa` is the
/// least-squares factor between t0 * V and the right-hand side; it is
/// reported, not asserted, because it measures the mutual normalization of
/// beta, H0 and the evolution equation (2/pi under beta = -2/(E0 t0)).
#[derive(Debug, Clone, Copy, Serialize)]
pub struct FlowReport {
    pub kappa: f64,
    pub fit_residual: f64,
    pub beta_used: f64,
}

/// Compares the bracket flow of the spin Hamiltonian with the equation of
/// motion. The gradient of H0 is taken by central differences so the check
/// does not share the analytic-gradient path it is meant to validate.
pub fn check_hamiltonian_flow(
    field: &SpinField,
    constants: &ModelConstants,
    beta_override: Option<f64>,
) -> Result<FlowReport> {
    let beta = beta_override.unwrap_or(constants.beta);
    let rhs = crate::dynamics::rhs_spin(field);
    let rhs_norm_sq: f64 = rhs.iter().map(|v| vec3::norm_sq(*v)).sum();
    if rhs_norm_sq <= 1e-24 {
        return Err(Error::OracleInapplicable(
            "the field is stationary, the flow comparison is undefined".into(),
        ));
    }
    let h_spin = DiscreteFunctional::spin_energy_scaled("H0_spin", constants.e0);
    let gradient = functional_gradient_fd(&h_spin, field, FD_STEP);
    let h = field.spacing();
    // {H0, j_i} with coordinate functionals reduces to (beta/h) j_i x gH_i.
    let velocity: Vec<Vec3> = field
        .samples()
        .iter()
        .zip(&gradient)
        .map(|(j, g)| vec3::scale(beta / h, vec3::cross(*j, *g)))
        .collect();
    let scaled: Vec<Vec3> = velocity
        .iter()
        .map(|v| vec3::scale(constants.t0, *v))
        .collect();
    let numerator: f64 = scaled
        .iter()
        .zip(&rhs)
        .map(|(a, b)| vec3::dot(*a, *b))
        .sum();
    let kappa = numerator / rhs_norm_sq;
    let mut residual_sq = 0.0;
    let mut scaled_sq = 0.0;
    for (a, b) in scaled.iter().zip(&rhs) {
        residual_sq += vec3::norm_sq(vec3::sub(*a, vec3::scale(kappa, *b)));
        scaled_sq += vec3::norm_sq(*a);
    }
    Ok(FlowReport {
        kappa,
        fit_residual: (residual_sq / scaled_sq).sqrt(),
        beta_used: beta,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{make_scenario_field, Scenario};
    use approx::assert_abs_diff_eq;
    use rand::Rng;
    use rand::SeedableRng;
    use std::f64::consts::{FRAC_2_PI, PI};

    fn random_unit_field(n: usize, seed: u64) -> SpinField {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let samples: Vec<Vec3> = (0..n)
            .map(|_| {
                let v: Vec3 = [
                    rng.gen_range(-1.0..1.0),
                    rng.gen_range(-1.0..1.0),
                    rng.gen_range(-1.0..1.0),
                ];
                vec3::normalized(v, 1e-6).unwrap_or([1.0, 0.0, 0.0])
            })
            .collect();
        SpinField::from_samples(samples).unwrap()
    }

    fn random_smooth_surface_field(n: usize, seed: u64) -> SpinField {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let nodes = spectral::grid(n);
        let mut samples: Vec<Vec3> = nodes.iter().map(|&xi| [xi.cos(), xi.sin(), 0.0]).collect();
        for m in 1..=4u32 {
            let amp_cos: Vec3 = [
                rng.gen_range(-0.1..0.1),
                rng.gen_range(-0.1..0.1),
                rng.gen_range(-0.1..0.1),
            ];
            let amp_sin: Vec3 = [
                rng.gen_range(-0.1..0.1),
                rng.gen_range(-0.1..0.1),
                rng.gen_range(-0.1..0.1),
            ];
            for (s, &xi) in samples.iter_mut().zip(&nodes) {
                let (c, sn) = ((m as f64 * xi).cos(), (m as f64 * xi).sin());
                *s = vec3::add(*s, vec3::add(vec3::scale(c, amp_cos), vec3::scale(sn, amp_sin)));
            }
        }
        SpinField::from_samples(samples)
            .unwrap()
            .project_to_constraints(1e-13, 200)
            .unwrap()
    }

    #[test]
    fn phi_gradient_is_linear_and_exact_under_fd() {
        let field = random_unit_field(16, 3);
        let phi3 = DiscreteFunctional::phi_component(2);
        let fd = functional_gradient_fd(&phi3, &field, FD_STEP);
        let h = field.spacing();
        for g in fd {
            assert_abs_diff_eq!(g[2], h, epsilon = 1e-9);
            assert_abs_diff_eq!(g[0], 0.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn spin_energy_gradient_matches_second_derivative_form() {
        let field = random_smooth_surface_field(32, 11);
        let functional = DiscreteFunctional::spin_energy_scaled("spin", 1.0);
        let analytic = functional.gradient(&field);
        let fd = functional_gradient_fd(&functional, &field, FD_STEP);
        let scale = analytic.iter().map(|v| vec3::norm(*v)).fold(0.0, f64::max);
        for (a, b) in analytic.iter().zip(&fd) {
            assert!(vec3::norm(vec3::sub(*a, *b)) <= 1e-6 * scale);
        }
    }

    #[test]
    fn f_and_phi0_gradients_match_fd_on_arbitrary_fields() {
        let field = random_unit_field(24, 5);
        for axis in 0..3 {
            let functional = DiscreteFunctional::f_component(axis);
            let analytic = functional.gradient(&field);
            let fd = functional_gradient_fd(&functional, &field, FD_STEP);
            let scale = analytic
                .iter()
                .map(|v| vec3::norm(*v))
                .fold(1e-30, f64::max);
            for (a, b) in analytic.iter().zip(&fd) {
                assert!(
                    vec3::norm(vec3::sub(*a, *b)) <= 1e-6 * scale,
                    "axis {axis}: {a:?} vs {b:?}"
                );
            }
        }
        let p = [0.4, -1.0, 0.8];
        let functional = DiscreteFunctional::phi0(p);
        let analytic = functional.gradient(&field);
        let fd = functional_gradient_fd(&functional, &field, FD_STEP);
        let scale = analytic.iter().map(|v| vec3::norm(*v)).fold(1e-30, f64::max);
        for (a, b) in analytic.iter().zip(&fd) {
            assert!(vec3::norm(vec3::sub(*a, *b)) <= 1e-5 * scale);
        }
    }

    #[test]
    fn constraint_algebra_closes_exactly() {
        let constants = ModelConstants::unit();
        for seed in 0..20 {
            let field = random_unit_field(32, seed);
            let phi_values = field.residual_zero_mean();
            let phi1 = DiscreteFunctional::phi_component(0);
            let phi2 = DiscreteFunctional::phi_component(1);
            let bracket = poisson_bracket(&phi1, &phi2, &field, &constants);
            let expected = constants.beta * phi_values[2];
            assert!(
                (bracket - expected).abs() <= 1e-13 * expected.abs().max(1.0),
                "seed {seed}: {bracket} vs {expected}"
            );
        }
    }

    #[test]
    fn bracket_is_antisymmetric_and_vanishes_on_the_diagonal() {
        let constants = ModelConstants::unit();
        let field = random_unit_field(16, 9);
        let f = DiscreteFunctional::f_component(2);
        let g = DiscreteFunctional::phi_component(0);
        let fg = poisson_bracket(&f, &g, &field, &constants);
        let gf = poisson_bracket(&g, &f, &field, &constants);
        assert_abs_diff_eq!(fg, -gf, epsilon = 1e-15 * fg.abs().max(1.0));
        assert_eq!(poisson_bracket(&f, &f, &field, &constants), 0.0);
    }

    #[test]
    fn coordinate_bracket_documents_the_delta_over_h_convention() {
        // {j_1, j_2} at one sample of the constant field (0,0,1) equals
        // (beta/h) j_3 = -2 N / (2 pi) at beta = -2.
        let n = 8;
        let field = make_scenario_field(Scenario::TiltedConstant, n).unwrap();
        let constants = ModelConstants::unit();
        let a = DiscreteFunctional::coordinate(0, 0);
        let b = DiscreteFunctional::coordinate(0, 1);
        let bracket = poisson_bracket(&a, &b, &field, &constants);
        assert_abs_diff_eq!(bracket, -8.0 / PI, epsilon = 1e-13);
    }

    #[test]
    fn jacobi_identity_on_the_per_sample_algebra() {
        let constants = ModelConstants::unit();
        let field = random_unit_field(16, 21);
        let beta = constants.beta;
        let h = field.spacing();
        let sample = 4;
        // {j_a, j_b} at one sample is itself a coordinate functional,
        // (beta/h) eps_abd j_d; bracket it once more and sum cyclically.
        let inner = |a: usize, b: usize| {
            DiscreteFunctional::new(format!("{{j{a},j{b}}}"), move |fld: &SpinField| {
                let s = fld.samples()[sample];
                (0..3).map(|d| beta / h * levi_civita(a, b, d) * s[d]).sum()
            })
            .with_gradient(move |fld: &SpinField| {
                let mut g = vec![[0.0; 3]; fld.len()];
                for d in 0..3 {
                    g[sample][d] = beta / h * levi_civita(a, b, d);
                }
                g
            })
        };
        let mut cyclic = 0.0;
        for (a, b, c) in [(0usize, 1usize, 2usize), (1, 2, 0), (2, 0, 1)] {
            let outer = DiscreteFunctional::coordinate(sample, c);
            cyclic += poisson_bracket(&inner(a, b), &outer, &field, &constants);
        }
        let scale = (beta / h) * (beta / h);
        assert!(cyclic.abs() <= 1e-10 * scale.abs(), "cyclic sum {cyclic:.3e}");
    }

    #[test]
    fn leibniz_rule_holds_for_products() {
        let constants = ModelConstants::unit();
        let field = random_unit_field(16, 33);
        let f = DiscreteFunctional::phi_component(0);
        let g = DiscreteFunctional::phi_component(1);
        let h = DiscreteFunctional::phi_component(2);
        let product = DiscreteFunctional::product(&f, &g);
        let lhs = poisson_bracket(&product, &h, &field, &constants);
        let rhs = f.evaluate(&field) * poisson_bracket(&g, &h, &field, &constants)
            + g.evaluate(&field) * poisson_bracket(&f, &h, &field, &constants);
        let scale = lhs.abs().max(rhs.abs()).max(1e-3);
        assert!((lhs - rhs).abs() <= 1e-10 * scale, "{lhs} vs {rhs}");

        // Same statement with the FD gradient of the product.
        let product_fd = DiscreteFunctional::new("fd_product", {
            let f = f.clone();
            let g = g.clone();
            move |fld: &SpinField| f.evaluate(fld) * g.evaluate(fld)
        });
        let lhs_fd = poisson_bracket(&product_fd, &h, &field, &constants);
        assert!((lhs_fd - rhs).abs() <= 1e-10 * scale, "{lhs_fd} vs {rhs}");
    }

    #[test]
    fn pointwise_norms_are_casimirs() {
        let constants = ModelConstants::unit();
        let field = random_unit_field(16, 44);
        let casimir = DiscreteFunctional::casimir_norm_sq(7);
        for other in [
            DiscreteFunctional::phi_component(1),
            DiscreteFunctional::f_component(0),
            DiscreteFunctional::coordinate(7, 2),
            DiscreteFunctional::spin_energy_scaled("spin", 1.0),
        ] {
            let bracket = poisson_bracket(&casimir, &other, &field, &constants);
            assert!(bracket.abs() <= 1e-10, "{}: {bracket}", other.name);
        }
    }

    #[test]
    fn first_class_report_passes_at_admissible_data() {
        let constants = ModelConstants::unit();
        let field = random_smooth_surface_field(64, 2);
        let f = vector_f(&field, FMethod::Fast);
        let p = vec3::scale(2.0, f);
        let report = check_first_class(&field, p, &constants, None);
        assert!(report.all_pass(), "{report:?}");
    }

    #[test]
    fn phi0_rows_fail_visibly_at_inadmissible_momentum() {
        let constants = ModelConstants::unit();
        let field = random_smooth_surface_field(64, 2);
        let f = vector_f(&field, FMethod::Fast);
        let perp = vec3::normalized(vec3::cross(f, [1.0, 0.0, 0.0]), 1e-12).unwrap();
        let p = vec3::scale(2.0 * vec3::norm(f), perp);
        let report = check_first_class(&field, p, &constants, None);
        let worst = report
            .rows
            .iter()
            .filter(|r| r.name.starts_with("phi") && r.name.ends_with("_phi0"))
            .map(|r| r.residual / r.scale)
            .fold(0.0, f64::max);
        assert!(worst > 1e-4, "cancellation should require collinearity, got {worst:.3e}");
    }

    #[test]
    fn flow_normalization_is_two_over_pi_under_the_model_beta() {
        let constants = ModelConstants::unit();
        let field = make_scenario_field(Scenario::KelvinPerturbed { m: 3, eps: 0.05 }, 64).unwrap();
        let report = check_hamiltonian_flow(&field, &constants, None).unwrap();
        assert!(report.fit_residual <= 1e-6, "residual {:.3e}", report.fit_residual);
        assert_abs_diff_eq!(report.kappa, FRAC_2_PI, epsilon = 1e-6);

        let beta_override = -PI / (constants.e0 * constants.t0);
        let report = check_hamiltonian_flow(&field, &constants, Some(beta_override)).unwrap();
        assert_abs_diff_eq!(report.kappa, 1.0, epsilon = 1e-6);
    }

    #[test]
    fn flow_check_refuses_stationary_fields() {
        let constants = ModelConstants::unit();
        let field = make_scenario_field(Scenario::Circle, 64).unwrap();
        assert!(matches!(
            check_hamiltonian_flow(&field, &constants, None),
            Err(Error::OracleInapplicable(_))
        ));
    }

    #[test]
    fn flow_parallelism_holds_off_the_constraint_surface() {
        let n = 64;
        let a = 1.0 / 2.0_f64.sqrt();
        let samples: Vec<Vec3> = spectral::grid(n)
            .into_iter()
            .map(|xi| [a * xi.cos(), a * xi.sin(), a])
            .collect();
        let field = SpinField::from_samples(samples).unwrap();
        let constants = ModelConstants::unit();
        let report = check_hamiltonian_flow(&field, &constants, None).unwrap();
        assert!(report.fit_residual <= 1e-6);
    }

    #[test]
    fn reports_serialize_to_the_documented_shape() {
        let constants = ModelConstants::unit();
        let field = random_smooth_surface_field(32, 8);
        let f = vector_f(&field, FMethod::Fast);
        let report = check_first_class(&field, vec3::scale(1.5, f), &constants, None);
        let json = report.to_json();
        assert!(json["identity_residuals"].get("su2_closure").is_some());
        assert!(json["beta_used"].is_number());

        let flow = check_hamiltonian_flow(
            &make_scenario_field(Scenario::KelvinPerturbed { m: 2, eps: 0.1 }, 32).unwrap(),
            &constants,
            None,
        )
        .unwrap();
        let json = serde_json::to_value(flow).unwrap();
        assert!(json.get("kappa").is_some());
        assert!(json.get("fit_residual").is_some());
        assert!(json.get("beta_used").is_some());
    }
}
