//! Interaction phases and their resonant sets.
//!
//! For a quadratic interaction the Duhamel integrand oscillates like
//! `exp(i s φ(ξ,η))` with `φ(ξ,η) = P_i(ξ) − ε₁P_j(η) − ε₂P_k(ξ−η)`.
//! Time resonances `T` are the zeros of `φ`, space resonances `S` the zeros of
//! `∂_η φ`, and space-time resonances `R = T ∩ S`.

mod classify;
mod contour;
mod diagnostics;
mod grid;
mod nearest;
mod phase;
mod sets;

pub use classify::{classify_homogeneous, classify_relation, ClaimVerdict, ClassificationReport, SetCounts};
pub use diagnostics::{
    dxi_zero_containment, fit_radial_points, fit_radial_r, null_ratio_report, project_and_separate,
    separation_of, DxiContainment,
    NullRatioReport, NullVerdict, RadialFit, RadialForm, Separation,
};
pub use grid::{GridMode, GridSpec2, Interval};
pub use phase::{make_phase, phase_jet, Phase, PhaseJet, Sign, SignPair};
pub use sets::{
    compute_resonant_sets, DistanceField, FreqPair, ResonantSets, SetLabel, ZeroSet,
    EMPTY_DISTANCE,
};
