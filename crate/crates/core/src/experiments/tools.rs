use std::f64::consts::TAU;

use super::config::ExperimentConfig;
use super::geometry::classification;
use super::random_data;
use super::report::{Artifact, Outcome, ReportBuilder};
use crate::dispersion::{DispersionKind, DispersionSystem};
use crate::error::{invalid, Error, Result};
use crate::resonance::{compute_resonant_sets, GridMode, GridSpec2, Interval, SignPair};
use crate::solver::{evolve_strided, EvolutionProblem, QuadraticTerm};

/// `T`, `S`, `R` of the configured phase, written to `resonant_sets.csv`.
///
/// Reads `dispersion` or `system` + `params.indices`, `signs` (++),
/// `grid.dim` (1), `params.half_width` (2), `params.h` (0.01),
/// `params.mode` (curve in one dimension, band in two), `params.band_tol`
/// (h² for curves, h for bands).
pub fn run_resonances(cfg: &ExperimentConfig) -> Result<Outcome> {
    let dim = cfg.grid.dim.unwrap_or(1);
    let phase = cfg.phase_or(DispersionKind::Schrodinger, SignPair::PP, dim)?;
    let p = &cfg.params;
    let half = p.half_width.unwrap_or(2.0);
    let h = p.h.unwrap_or(if dim == 1 { 0.01 } else { 0.05 });
    let mode = p.mode.unwrap_or(if dim == 1 { GridMode::Curve } else { GridMode::Band });
    let grid = match dim {
        1 => GridSpec2::square_1d(half, h, mode)?,
        2 => {
            let iv = Interval::symmetric(half);
            GridSpec2::new_2d([iv, iv], [iv, iv], h)?
        }
        d => return Err(invalid(format!("dimension must be 1 or 2, got {d}"))),
    };
    let band_tol = p.band_tol.unwrap_or(if grid.mode() == GridMode::Curve { h * h } else { h });
    let sets = compute_resonant_sets(&phase, &grid, band_tol)?;

    let mut rb = ReportBuilder::new("resonances", cfg);
    rb.metric("t_samples", sets.t.len() as f64);
    rb.metric("s_samples", sets.s.len() as f64);
    rb.metric("r_samples", sets.r.len() as f64);
    // every R sample satisfies both band conditions
    let mut worst: f64 = 0.0;
    for q in &sets.r.points {
        let g = phase.grad_eta(q.xi, q.eta).map_or(f64::INFINITY, |g| g.norm());
        worst = worst.max(phase.value(q.xi, q.eta).abs()).max(g);
    }
    rb.metric("r_max_band_value", worst);
    rb.check("r_within_band", worst, band_tol * (1.0 + 1e-12));
    if sets.r.is_empty() {
        rb.note("R is empty on this grid");
    }
    let mut buf = Vec::new();
    sets.write_csv(&mut buf).expect("writing to memory cannot fail");
    let csv = Artifact {
        file_name: "resonant_sets.csv".into(),
        contents: String::from_utf8(buf).expect("csv output is utf-8"),
    };
    Ok(Outcome {
        report: rb.finish()?,
        artifacts: vec![csv],
    })
}

/// Classification of one homogeneous phase: `dispersion.alpha` (2) with
/// `signs` (++), on the grid of `params.h` and `params.half_width`.
pub fn run_classify(cfg: &ExperimentConfig) -> Result<Outcome> {
    let alpha = match &cfg.dispersion {
        None => 2.0,
        Some(d) if d.kind == DispersionKind::Homogeneous => d.alpha.unwrap_or(2.0),
        Some(d) => {
            let rel = d.build(1)?;
            match rel.alpha() {
                Some(a) if matches!(d.kind, DispersionKind::Schrodinger | DispersionKind::HalfWave) => a,
                _ => return Err(invalid(format!("classification needs a homogeneous relation, got {:?}", d.kind))),
            }
        }
    };
    classification(cfg, "classify", &[alpha], &[cfg.signs_or(SignPair::PP)], cfg.params.radial.unwrap_or(false))
}

/// Profile-form integration of the configured quadratic problem from seeded
/// random data; writes `trajectory.csv` and `trajectory_summary.csv`.
///
/// Reads `dispersion` or `system` + `params.indices`, `signs` (++), `grid`
/// (d = 1, N = 64, L = 2π), `solver.dt` (1e-3), `solver.t_final` (1),
/// `solver.dealias` (true), `params.kmax` (N/8), `params.amplitude` (1e-2),
/// `params.stride` (100), `seed`.
pub fn run_simulate(cfg: &ExperimentConfig) -> Result<Outcome> {
    let grid = cfg.grid_or(1, 64, TAU)?;
    let signs = cfg.signs_or(SignPair::PP);
    let (system, term) = match &cfg.system {
        Some(parts) => {
            let rels = parts.iter().map(|d| d.build(grid.dim())).collect::<Result<Vec<_>>>()?;
            let n = rels.len();
            let [i, j, k] = cfg.params.indices.unwrap_or([1, n.min(2), n.min(3)]);
            (DispersionSystem::new(rels)?, QuadraticTerm::power(i, signs).with_sources(j, k))
        }
        None => (
            DispersionSystem::scalar(cfg.relation_or(DispersionKind::Schrodinger, grid.dim())?),
            QuadraticTerm::power(1, signs),
        ),
    };
    let problem = EvolutionProblem::new(system, grid)?
        .with_term(term)
        .map_err(|e| Error::Config(format!("quadratic term: {e}")))?
        .with_dealias(cfg.solver.dealias.unwrap_or(true));
    let p = &cfg.params;
    let kmax = p.kmax.unwrap_or(grid.n()[0] as i64 / 8);
    let amplitude = p.amplitude.unwrap_or(1e-2);
    let u0: Vec<_> = (0..problem.components())
        .map(|c| random_data(grid, kmax, amplitude, cfg.seed.wrapping_add(c as u64)))
        .collect();
    let dt = cfg.solver.dt.unwrap_or(1e-3);
    let t_final = cfg.solver.t_final.unwrap_or(1.0);
    let stride = p.stride.unwrap_or(100);

    let mut rb = ReportBuilder::new("simulate", cfg);
    let traj = match evolve_strided(&problem, &u0, t_final, dt, stride) {
        Ok(t) => t,
        Err(Error::SolverDiverged { time }) => {
            rb.metric("divergence_time", time);
            rb.check("no_divergence", 1.0, 0.5);
            return Ok(Outcome {
                report: rb.finish()?,
                artifacts: Vec::new(),
            });
        }
        Err(e) => return Err(e),
    };
    rb.check("no_divergence", 0.0, 0.5);
    let norm = |s: &crate::solver::ProfileState| s.profiles.iter().map(|f| f.l2_norm().powi(2)).sum::<f64>().sqrt();
    let (n0, n1) = (norm(&traj.samples[0]), norm(traj.last()));
    rb.metric("dt", traj.dt);
    rb.metric("samples", traj.samples.len() as f64);
    rb.metric("initial_l2", n0);
    rb.metric("final_l2", n1);
    if n0 > 0.0 {
        rb.metric("relative_l2_change", (n1 - n0) / n0);
    }
    let full = Artifact::csv("trajectory.csv", |w| traj.write_csv(w));
    let summary = Artifact::csv("trajectory_summary.csv", |w| traj.write_summary_csv(w));
    Ok(Outcome {
        report: rb.finish()?,
        artifacts: vec![full, summary],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::DispersionConfig;

    #[test]
    fn resonances_schrodinger() {
        let out = run_resonances(&ExperimentConfig::default()).unwrap();
        assert!(out.report.all_pass(), "{}", out.report.to_json());
        assert!(out.artifacts[0].contents.starts_with("set_label,xi,eta\n"));
        assert!(out.report.metrics["r_samples"] >= 1.0);
    }

    #[test]
    fn classify_single() {
        let mut cfg = ExperimentConfig::default();
        cfg.dispersion = Some(DispersionConfig {
            alpha: Some(2.0),
            ..DispersionConfig::of_kind(DispersionKind::Homogeneous)
        });
        cfg.signs = Some(SignPair::PM);
        let out = run_classify(&cfg).unwrap();
        assert!(out.report.verdicts["alpha2_pm_R_is_xi_zero"].pass);
    }

    #[test]
    fn simulate_writes_trajectory() {
        let mut cfg = ExperimentConfig::default();
        cfg.solver.t_final = Some(0.1);
        cfg.solver.dt = Some(0.01);
        cfg.params.stride = Some(5);
        let out = run_simulate(&cfg).unwrap();
        assert!(out.report.all_pass());
        assert_eq!(out.report.metrics["samples"], 3.0);
        assert!(out.artifacts[1].contents.starts_with("t,component,L2,Linf\n"));
    }

    #[test]
    fn simulate_reports_divergence() {
        let mut cfg = ExperimentConfig::default();
        cfg.params.amplitude = Some(1e4);
        cfg.solver.t_final = Some(5.0);
        cfg.solver.dt = Some(0.05);
        let out = run_simulate(&cfg).unwrap();
        assert!(!out.report.all_pass());
    }
}
