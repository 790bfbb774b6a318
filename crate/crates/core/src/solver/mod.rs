//! Profile-form integration of `i∂ₜu + P(D)u = Σ c B_m(u_{ε₁,j}, u_{ε₂,k})`.
//!
//! With `f̂ = e^{−itP} û` the equation reads
//! `∂ₛf̂_i(ξ) = −ic Σ_η m e^{−isφ} f̂_{ε₁,j}(η) f̂_{ε₂,k}(ξ−η)`, where
//! `f̂_+ = f̂` and `f̂_−(η) = conj f̂(−η)`.

mod identities;
mod problem;
mod stepper;

pub use identities::{
    normal_form_split, transformed_integrand_norm, vector_field_split, weighted_profile_derivative,
    NormalFormOptions, NormalFormSplit, VectorFieldOptions, VectorFieldSplit,
};
pub use problem::{conjugate_slot, EvolutionProblem, ProfileState, QuadraticTerm, Trajectory};
pub use stepper::{
    duhamel_picard_oracle, evolve_from, evolve_profile, evolve_strided, linear_evolve, picard_iterates, profile_rhs,
};
