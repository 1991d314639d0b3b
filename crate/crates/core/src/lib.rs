//! Numerical laboratory for the closed vortex filament modelled as a
//! 2pi-periodic continuous Heisenberg spin chain.
//!
//! The sphere-valued field j(xi) evolves by d j/d tau = j x j''; the filament
//! curve is recovered from j through a step-kernel integral evaluated
//! spectrally; and the crate verifies the structure of the model
//! numerically: constraint algebra under the discrete Lie-Poisson bracket,
//! conservation of the momentum functional, energy and mean constraints
//! along structure-preserving integrators, the local-induction equivalence
//! of the curve motion, and the quasiparticle energy and effective-mass
//! tensor.
//!
//! Modules follow the moving parts of the model:
//!
//! * [`constants`]: dimensional scales and derived quantities;
//! * [`field`]: the discrete spin field, scenarios, projection, energy;
//! * [`spectral`]: Fourier derivatives and the exact step-kernel integral;
//! * [`reconstruction`]: the filament curve and its geometric residuals;
//! * [`dynamics`]: time integrators, monitoring, local-induction residual;
//! * [`invariants`]: f-vector, momenta, energies, effective mass;
//! * [`phase_space`]: the classical/phase-space bijection;
//! * [`bracket`]: discrete Lie-Poisson bracket and the structure checks;
//! * [`oracles`]: independent reference computations for the test suite;
//! * [`acceptance`]: the verification suite behind `filament-lab verify`;
//! * [`io`]: CSV/JSON/OBJ/SVG formats.

pub mod acceptance;
pub mod bracket;
pub mod constants;
pub mod dynamics;
pub mod error;
pub mod field;
pub mod invariants;
pub mod io;
pub mod oracles;
pub mod phase_space;
pub mod reconstruction;
pub mod spectral;
pub mod vec3;

pub use constants::{make_constants, ModelConstants};
pub use dynamics::{evolve, EvolveSpec, Integrator, Trajectory};
pub use error::{Error, Result};
pub use field::{make_scenario_field, DerivativeMethod, Scenario, SpinField};
pub use invariants::{InvariantReport, FMethod};
pub use phase_space::{ClassicalPoint, PhasePoint};
pub use reconstruction::FilamentCurve;
pub use spectral::KernelConvention;
pub use vec3::Vec3;
