//! Numerical tools for the space-time resonance method applied to quadratic
//! dispersive equations `i∂ₜu + P(D)u = N(u)`.
//!
//! - [`dispersion`]: symbols `P(ξ)`, their gradients, diagonal systems.
//! - [`resonance`]: interaction phases and the sets `T`, `S`, `R`.
//! - [`spectral`]: periodic fields, transforms, pseudo-products.
//! - [`solver`]: profile-form integration and the integration-by-parts
//!   identities.
//! - [`experiments`]: configurable scenarios producing reports.

pub mod dispersion;
pub mod error;
pub mod experiments;
pub mod fit;
pub mod resonance;
pub mod solver;
pub mod spectral;
mod vec2;

pub use dispersion::{
    evaluate_dispersion_jet, make_dispersion, make_system, strauss_exponent, DispersionKind,
    DispersionRelation, DispersionSystem,
};
pub use error::{Error, Result};
pub use experiments::{run_experiment, ExperimentConfig, ExperimentName, Outcome, Report, Verdict};
pub use resonance::{
    compute_resonant_sets, make_phase, phase_jet, GridMode, GridSpec2, Interval, Phase, ResonantSets,
    Sign, SignPair,
};
pub use solver::{EvolutionProblem, ProfileState, QuadraticTerm, Trajectory};
pub use spectral::{Field, Grid, Rep, Symbol2};
pub use vec2::Vec2;
