//! Configurable scenarios that turn resonance statements into pass/fail
//! reports and emit CSV data for plotting.
//!
//! Every runner takes an [`ExperimentConfig`], fills unset fields with its
//! documented defaults and returns an [`Outcome`]: a [`Report`] plus the CSV
//! artifacts. Verdicts pass when `deviation < tolerance`; tolerances can be
//! overridden per verdict through `tolerances` in the config.

mod checks;
mod config;
mod geometry;
mod packets;
mod report;
mod strichartz;
mod tools;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub use checks::{run_normal_form_check, run_vector_field_check};
pub use config::{DispersionConfig, ExperimentConfig, ExperimentName, GridConfig, Params, SolverConfig};
pub use geometry::{run_classification_suite, run_cutoff_decomposition};
pub use packets::{oscillation_bound_violation, run_resonant_growth, run_wave_packet};
pub use report::{Artifact, Outcome, Provenance, Report, Verdict};
pub use strichartz::{run_bilinear_strichartz, strichartz_ratio};
pub use tools::{run_classify, run_resonances, run_simulate};

use crate::error::{Error, Result};
use crate::spectral::{Field, Grid, Rep};

/// Runs the experiment named in `cfg.experiment`.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Outcome> {
    let name = cfg
        .experiment
        .ok_or_else(|| Error::Config("config does not name an experiment".into()))?;
    run_named(name, cfg)
}

/// Runs `name` with `cfg`, ignoring `cfg.experiment`.
pub fn run_named(name: ExperimentName, cfg: &ExperimentConfig) -> Result<Outcome> {
    match name {
        ExperimentName::WavePacket => run_wave_packet(cfg),
        ExperimentName::ResonantGrowth => run_resonant_growth(cfg),
        ExperimentName::NormalFormCheck => run_normal_form_check(cfg),
        ExperimentName::VectorFieldCheck => run_vector_field_check(cfg),
        ExperimentName::CutoffDecomposition => run_cutoff_decomposition(cfg),
        ExperimentName::BilinearStrichartz => run_bilinear_strichartz(cfg),
        ExperimentName::ClassificationSuite => run_classification_suite(cfg),
    }
}

/// Seeded random coefficients on `|k| ≤ kmax` lattice steps (every axis),
/// scaled to `ℓ²` norm `size`.
pub(crate) fn random_data(grid: Grid, kmax: i64, size: f64, seed: u64) -> Field {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut f = Field::zeros(grid, Rep::Frequency);
    for i in grid.ascending() {
        let k = grid.wave_index(i);
        if k[0].abs() <= kmax && k[1].abs() <= kmax {
            f.values_mut()[i] = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        }
    }
    let norm = f.l2_norm();
    if norm == 0.0 || size == 0.0 {
        return Field::zeros(grid, Rep::Frequency);
    }
    f.scale(Complex64::new(size / norm, 0.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_data_is_seeded_and_band_limited() {
        let g = Grid::new_1d(32, std::f64::consts::TAU).unwrap();
        let a = random_data(g, 3, 0.5, 7);
        assert_eq!(a.values(), random_data(g, 3, 0.5, 7).values());
        assert_ne!(a.values(), random_data(g, 3, 0.5, 8).values());
        assert!((a.l2_norm() - 0.5).abs() < 1e-14);
        for (i, v) in a.values().iter().enumerate() {
            if g.wave_index(i)[0].abs() > 3 {
                assert_eq!(*v, Complex64::new(0.0, 0.0));
            }
        }
    }

    #[test]
    fn every_experiment_reports_deterministic_finite_verdicts() {
        for name in ExperimentName::ALL {
            let cfg = ExperimentConfig::for_experiment(name);
            let a = run_experiment(&cfg).unwrap().report;
            assert!(!a.verdicts.is_empty(), "{name}");
            for (k, v) in &a.verdicts {
                assert!(v.deviation.is_finite() && v.tolerance.is_finite(), "{name}/{k}");
            }
            assert!(a.metrics.values().all(|m| m.is_finite()), "{name}");
            if name != ExperimentName::BilinearStrichartz {
                assert_eq!(a.metrics, run_experiment(&cfg).unwrap().report.metrics, "{name}");
            }
        }
    }

    #[test]
    fn missing_name_is_a_config_error() {
        assert!(matches!(run_experiment(&ExperimentConfig::default()), Err(Error::Config(_))));
    }
}
