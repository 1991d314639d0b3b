//! Fourier machinery on the uniform periodic grid xi_i = 2*pi*i/N.
//!
//! Everything here treats the N samples as a trigonometric interpolant and
//! evaluates derivatives and kernel integrals exactly on that interpolant.
//! For even N the Nyquist mode is zeroed in both the derivative and the
//! antiderivative: its true derivative and antiderivative both sample to
//! zero at the grid nodes, so this choice is exact at the nodes and keeps
//! d(d(u)) identical to the second-derivative multiplier.
//!
//! The step-kernel integral
//!
//! ```text
//! I(xi) = int_0^{2pi} floor((xi - eta) / 2pi) u(eta) d eta = -int_xi^{2pi} u
//! ```
//!
//! is the workhorse of the curve reconstruction and of the momentum
//! functional. Evaluated mode by mode it reads
//!
//! ```text
//! I(xi_i) = u_hat_0 (xi_i - 2pi) + sum_{m != 0} u_hat_m (e^{i m xi_i} - 1) / (i m)
//! ```
//!
//! which is what `kernel_integral` computes. A rectangle-rule sum over the
//! raw kernel values would only be first-order accurate (the integrand jumps
//! at eta = xi); the modal form keeps the tangent and closure identities at
//! round-off, which the residual checks in `reconstruction` rely on.

use crate::vec3::Vec3;
use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::collections::HashMap;
use std::f64::consts::TAU;
use std::sync::{Arc, Mutex, OnceLock};

#[derive(Clone)]
struct Plans {
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

fn plans(n: usize) -> Plans {
    static CACHE: OnceLock<Mutex<HashMap<usize, Plans>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().expect("fft plan cache poisoned");
    guard
        .entry(n)
        .or_insert_with(|| {
            let mut planner = FftPlanner::new();
            Plans {
                forward: planner.plan_fft_forward(n),
                inverse: planner.plan_fft_inverse(n),
            }
        })
        .clone()
}

/// Signed frequency of DFT bin `k` for length `n`; `None` marks the Nyquist
/// bin of an even-length transform.
#[inline]
fn signed_frequency(k: usize, n: usize) -> Option<i64> {
    if 2 * k == n {
        None
    } else if 2 * k < n {
        Some(k as i64)
    } else {
        Some(k as i64 - n as i64)
    }
}

/// Grid nodes xi_i = 2*pi*i/n.
pub fn grid(n: usize) -> Vec<f64> {
    let h = TAU / n as f64;
    (0..n).map(|i| h * i as f64).collect()
}

/// Grid spacing 2*pi/n.
#[inline]
pub fn spacing(n: usize) -> f64 {
    TAU / n as f64
}

fn to_complex(component: impl Iterator<Item = f64>) -> Vec<Complex64> {
    component.map(|x| Complex64::new(x, 0.0)).collect()
}

/// Applies `multiplier(k)` to the spectrum of one real component and returns
/// the transformed samples.
fn apply_multiplier(samples: &[f64], multiplier: impl Fn(usize) -> Complex64) -> Vec<f64> {
    let n = samples.len();
    let p = plans(n);
    let mut buf = to_complex(samples.iter().copied());
    p.forward.process(&mut buf);
    for (k, value) in buf.iter_mut().enumerate() {
        *value *= multiplier(k);
    }
    p.inverse.process(&mut buf);
    let scale = 1.0 / n as f64;
    buf.into_iter().map(|z| z.re * scale).collect()
}

/// Spectral derivative of the given order for one scalar component.
pub fn derivative_component(samples: &[f64], order: u32) -> Vec<f64> {
    let n = samples.len();
    apply_multiplier(samples, |k| match signed_frequency(k, n) {
        Some(m) => Complex64::new(0.0, m as f64).powu(order),
        None => Complex64::new(0.0, 0.0),
    })
}

/// Spectral derivative of a 3-vector field.
pub fn derivative(samples: &[Vec3], order: u32) -> Vec<Vec3> {
    per_component(samples, |c| derivative_component(c, order))
}

fn per_component(samples: &[Vec3], f: impl Fn(&[f64]) -> Vec<f64>) -> Vec<Vec3> {
    let n = samples.len();
    let mut out = vec![[0.0; 3]; n];
    let mut comp = vec![0.0; n];
    for c in 0..3 {
        for (i, s) in samples.iter().enumerate() {
            comp[i] = s[c];
        }
        let transformed = f(&comp);
        for (i, v) in transformed.into_iter().enumerate() {
            out[i][c] = v;
        }
    }
    out
}

/// Mean of the samples, (1/N) * sum_i u_i.
pub fn mean(samples: &[Vec3]) -> Vec3 {
    let mut acc = [0.0; 3];
    for s in samples {
        acc[0] += s[0];
        acc[1] += s[1];
        acc[2] += s[2];
    }
    let inv = 1.0 / samples.len() as f64;
    [acc[0] * inv, acc[1] * inv, acc[2] * inv]
}

/// Samples of the zero-mean modal antiderivative
/// P(xi_i) = sum_{m != 0} u_hat_m e^{i m xi_i} / (i m).
pub fn antiderivative_component(samples: &[f64]) -> Vec<f64> {
    let n = samples.len();
    apply_multiplier(samples, |k| match signed_frequency(k, n) {
        Some(0) | None => Complex64::new(0.0, 0.0),
        Some(m) => Complex64::new(0.0, -1.0 / m as f64),
    })
}

/// Which reading of the bracket `[x]` drives the kernel.
///
/// `Floor` is floor(x / 2pi); `TruncateTowardZero` is the integer part with
/// truncation, which vanishes identically on (-2pi, 2pi) and therefore kills
/// the reconstruction. The truncation variant exists so the convention can
/// be pinned by mutation tests rather than by assertion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum KernelConvention {
    #[default]
    Floor,
    TruncateTowardZero,
}

/// Step-kernel value `[x]` for the given convention.
pub fn kernel_value(x: f64, convention: KernelConvention) -> f64 {
    match convention {
        KernelConvention::Floor => (x / TAU).floor(),
        KernelConvention::TruncateTowardZero => (x / TAU).trunc(),
    }
}

/// Jump of the kernel across one period, `[x + 2pi] - [x]`. Equals 1 for
/// every x under the floor convention; under truncation it vanishes on
/// (-2pi, 0), which is what breaks the closure identity there.
pub fn kernel_period_jump(x: f64, convention: KernelConvention) -> f64 {
    kernel_value(x + TAU, convention) - kernel_value(x, convention)
}

/// Exact step-kernel integral of the interpolant,
/// I(xi_i) = int_0^{2pi} [xi_i - eta] u(eta) d eta.
pub fn kernel_integral(samples: &[Vec3], convention: KernelConvention) -> Vec<Vec3> {
    match convention {
        KernelConvention::TruncateTowardZero => vec![[0.0; 3]; samples.len()],
        KernelConvention::Floor => {
            let n = samples.len();
            let nodes = grid(n);
            let mu = mean(samples);
            per_component_indexed(samples, |comp, c| {
                let p = antiderivative_component(comp);
                let p0 = p[0];
                (0..n)
                    .map(|i| mu[c] * (nodes[i] - TAU) + p[i] - p0)
                    .collect()
            })
        }
    }
}

fn per_component_indexed(samples: &[Vec3], f: impl Fn(&[f64], usize) -> Vec<f64>) -> Vec<Vec3> {
    let n = samples.len();
    let mut out = vec![[0.0; 3]; n];
    let mut comp = vec![0.0; n];
    for c in 0..3 {
        for (i, s) in samples.iter().enumerate() {
            comp[i] = s[c];
        }
        let transformed = f(&comp, c);
        for (i, v) in transformed.into_iter().enumerate() {
            out[i][c] = v;
        }
    }
    out
}

/// Samples of G(xi_i) = (2/N) sum_{m=1}^{N/2-1} sin(m xi_i)/m, the modal
/// antiderivative of the unit sample at node 0. Appears in the transpose of
/// the kernel-integral operator.
pub fn delta_antiderivative(n: usize) -> Vec<f64> {
    let mut delta = vec![0.0; n];
    delta[0] = 1.0;
    antiderivative_component(&delta)
}

/// Transpose of the floor-kernel integral operator applied to the samples.
/// Needed by the exact gradient of the momentum functional.
pub fn kernel_integral_transpose(samples: &[Vec3]) -> Vec<Vec3> {
    let n = samples.len();
    let nodes = grid(n);
    let g = delta_antiderivative(n);
    per_component(samples, |comp| {
        let p = antiderivative_component(comp);
        let total: f64 = comp.iter().sum();
        let ramp_moment: f64 = comp
            .iter()
            .zip(nodes.iter())
            .map(|(u, xi)| (xi - TAU) * u)
            .sum::<f64>()
            / n as f64;
        (0..n).map(|i| -p[i] + total * g[i] + ramp_moment).collect()
    })
}

/// Periodic rectangle-rule integral h * sum_i u_i of a scalar sequence.
/// Spectrally accurate for smooth periodic integrands.
pub fn integral_scalar(samples: impl Iterator<Item = f64>, n: usize) -> f64 {
    spacing(n) * samples.sum::<f64>()
}

/// Periodic rectangle-rule integral of a 3-vector sequence.
pub fn integral(samples: &[Vec3]) -> Vec3 {
    let h = spacing(samples.len());
    let mut acc = [0.0; 3];
    for s in samples {
        acc[0] += s[0];
        acc[1] += s[1];
        acc[2] += s[2];
    }
    [acc[0] * h, acc[1] * h, acc[2] * h]
}
