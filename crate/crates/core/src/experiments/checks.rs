use std::f64::consts::TAU;
use std::io::Write;

use num_complex::Complex64;

use super::config::ExperimentConfig;
use super::random_data;
use super::report::{Artifact, Outcome, ReportBuilder};
use crate::dispersion::{DispersionKind, DispersionSystem};
use crate::error::{invalid, Result};
use crate::fit::log_log_slope;
use crate::resonance::SignPair;
use crate::solver::{
    linear_evolve, normal_form_split, picard_iterates, transformed_integrand_norm, vector_field_split,
    weighted_profile_derivative, EvolutionProblem, NormalFormOptions, QuadraticTerm, VectorFieldOptions,
};
use crate::spectral::{Field, Symbol2};

fn scalar_problem(cfg: &ExperimentConfig, n: usize, period: f64) -> Result<EvolutionProblem> {
    let grid = cfg.grid_or(1, n, period)?;
    let rel = cfg.relation_or(DispersionKind::Schrodinger, grid.dim())?;
    Ok(EvolutionProblem::new(DispersionSystem::scalar(rel), grid)?
        .with_term(QuadraticTerm::power(1, cfg.signs_or(SignPair::PP)))?
        .with_dealias(cfg.solver.dealias.unwrap_or(false)))
}

fn norm_of(fields: &[Field]) -> f64 {
    fields.iter().map(|f| f.l2_norm().powi(2)).sum::<f64>().sqrt()
}

/// `max|a − b| / max|b|`, or the absolute difference when `b` vanishes.
fn relative_diff(a: &Field, b: &Field) -> Result<f64> {
    let d = a.max_diff(b)?;
    let scale = b.linf_norm();
    Ok(if scale > 0.0 { d / scale } else { d })
}

/// Normal-form split of a small-data quadratic run with the non-resonant
/// restriction `|φ| ≥ φ_min`, repeated under data scaling `u₀ → λu₀`.
///
/// Reads `dispersion` (schrodinger), `signs` (++), `grid` (N = 16, L = 2π),
/// `solver.t_final` (1), `solver.dt` (1/1024), `params.kmax` (2),
/// `params.amplitude` (1e-2), `params.phi_min` (0.5), `params.lambdas`
/// ([1, 0.5, 0.25]), `seed`.
pub fn run_normal_form_check(cfg: &ExperimentConfig) -> Result<Outcome> {
    let problem = scalar_problem(cfg, 16, TAU)?;
    let p = &cfg.params;
    let t = cfg.solver.t_final.unwrap_or(1.0);
    let opts = NormalFormOptions {
        phi_min: p.phi_min.unwrap_or(0.5),
        dt: cfg.solver.dt.unwrap_or(1.0 / 1024.0),
    };
    let amplitude = p.amplitude.unwrap_or(1e-2);
    let lambdas = p.lambdas.clone().unwrap_or_else(|| vec![1.0, 0.5, 0.25]);
    if lambdas.is_empty() || lambdas.iter().any(|l| !(*l > 0.0)) {
        return Err(invalid("lambdas must be a non-empty list of positive numbers"));
    }
    let base = random_data(*problem.grid(), p.kmax.unwrap_or(2), amplitude, cfg.seed);
    let phase = problem.phase(&problem.terms()[0]);
    let phi_min = opts.phi_min;
    let m_reg = Symbol2::from_fn(move |xi, eta| if phase.value(xi, eta).abs() >= phi_min { 1.0 } else { 0.0 });

    let mut rb = ReportBuilder::new("normal_form_check", cfg);
    let mut residual: f64 = 0.0;
    let (mut rem, mut bnd) = (Vec::new(), Vec::new());
    let mut ratio: f64 = 1.0;
    let mut rows = Vec::new();
    for (n, &lambda) in lambdas.iter().enumerate() {
        let u0 = base.scale(Complex64::new(lambda, 0.0));
        let split = normal_form_split(&problem, &[u0], t, &m_reg, opts)?;
        residual = residual.max(split.residual);
        rem.push(norm_of(&split.remainder));
        bnd.push(norm_of(&split.boundary_t));
        if n == 0 {
            let (lo, hi) = split
                .boundary_norms
                .iter()
                .fold((f64::INFINITY, 0.0f64), |(lo, hi), b| (lo.min(b.1), hi.max(b.1)));
            ratio = hi / lo;
            rows = split.boundary_norms.clone();
        }
        rb.metric(format!("remainder_norm_lambda{lambda}"), rem[n]);
        rb.metric(format!("boundary_norm_lambda{lambda}"), bnd[n]);
    }
    rb.metric("residual", residual);
    rb.check("residual", residual, 1e-6);

    if amplitude == 0.0 {
        rb.note("zero data: every term vanishes, scaling exponents are undefined");
    } else {
        if lambdas.len() >= 2 {
            let rem_exp = log_log_slope(&lambdas, &rem).unwrap_or(f64::NAN);
            let bnd_exp = log_log_slope(&lambdas, &bnd).unwrap_or(f64::NAN);
            rb.metric("remainder_exponent", rem_exp);
            rb.metric("boundary_exponent", bnd_exp);
            rb.check("remainder_exponent", (rem_exp - 3.0).abs(), 0.1);
            rb.check("boundary_exponent", (bnd_exp - 2.0).abs(), 0.1);
        } else {
            rb.note("a single lambda gives no scaling exponent");
        }
        rb.metric("boundary_max_over_min", ratio);
        rb.check("boundary_uniform", ratio, 10.0);

        // contraction of successive Picard differences at the unscaled data
        let iterates = picard_iterates(&problem, &[base.clone()], t, 3)?;
        let diff = |a: usize, b: usize| -> Result<f64> {
            let d = iterates[a].profiles[0].add(&iterates[b].profiles[0].scale(Complex64::new(-1.0, 0.0)))?;
            Ok(d.l2_norm())
        };
        let (d1, d2) = (diff(1, 0)?, diff(2, 1)?);
        if d1 > 0.0 {
            rb.metric("picard_contraction", d2 / d1);
        }
    }
    let csv = Artifact::csv("normal_form_boundary.csv", |w| {
        writeln!(w, "t,boundary_norm")?;
        for (s, b) in &rows {
            writeln!(w, "{s},{b}")?;
        }
        Ok(())
    });
    Ok(Outcome {
        report: rb.finish()?,
        artifacts: vec![csv],
    })
}

/// Summation by parts in `η` over `[t₀, t]`, the weighted-derivative
/// identities and the decay of the transformed integrand.
///
/// Reads `dispersion` (schrodinger), `signs` (++), `grid` (N = 128,
/// L = 2π·32), `params.t0` (1), `solver.t_final` (2), `solver.dt` (1/32),
/// `params.kmax` (16), `params.amplitude` (1e-2), `params.g_min` (0.5),
/// `params.decay_times` ([2, 4]), `params.times` ([0.5, 2, 17]), `seed`.
pub fn run_vector_field_check(cfg: &ExperimentConfig) -> Result<Outcome> {
    let problem = scalar_problem(cfg, 128, TAU * 32.0)?;
    let p = &cfg.params;
    let t0 = p.t0.unwrap_or(1.0);
    let t = cfg.solver.t_final.unwrap_or(2.0);
    let opts = VectorFieldOptions {
        g_min: p.g_min.unwrap_or(0.5),
        dt: cfg.solver.dt.unwrap_or(1.0 / 32.0),
    };
    let amplitude = p.amplitude.unwrap_or(1e-2);
    let grid = *problem.grid();
    let u0 = random_data(grid, p.kmax.unwrap_or(16), amplitude, cfg.seed);
    let phase = problem.phase(&problem.terms()[0]);
    let g_min = opts.g_min;
    let m_reg = Symbol2::from_fn(move |xi, eta| match phase.grad_eta(xi, eta) {
        Ok(g) if g.norm() >= g_min => 1.0,
        _ => 0.0,
    });
    let mut rb = ReportBuilder::new("vector_field_check", cfg);

    let split = vector_field_split(&problem, &[u0.clone()], t0, t, &m_reg, opts)?;
    rb.metric("direct_norm", norm_of(&split.direct));
    rb.metric("transformed_norm", norm_of(&split.transformed_term));
    rb.metric("product_rule_norm", norm_of(&split.product_rule_term));
    rb.metric("sbp_residual", split.residual);
    rb.check("sbp_residual", split.residual, 1e-6);

    let rel = problem.system().components()[0].clone();
    let x0 = u0.to_physical();
    let jx0 = weighted_profile_derivative(&rel, &x0, 0.0)?;
    let mut commutation: f64 = 0.0;
    for &s in p.times.as_deref().unwrap_or(&[0.5, 2.0, 17.0]) {
        let lhs = weighted_profile_derivative(&rel, &linear_evolve(&rel, &x0, s), s)?;
        let rhs = linear_evolve(&rel, &jx0, s);
        commutation = commutation.max(relative_diff(&lhs, &rhs)?);
    }
    rb.metric("commutation", commutation);
    rb.check("commutation", commutation, 1e-10);

    let period = grid.period()[0];
    let weighted = Field::from_physical(grid, |x| {
        let idx = ((x.x / grid.dx(0)).round() as usize) % grid.len();
        Complex64::new(0.0, -1.0) * (period / TAU) * (TAU * x.x / period).sin() * x0.values()[idx]
    });
    let position = relative_diff(&jx0, &weighted)?;
    rb.metric("position_weight", position);
    rb.check("position_weight", position, 1e-10);

    let [s1, s2] = p.decay_times.unwrap_or([2.0, 4.0]);
    if !(s1 > 0.0 && s2 > s1) {
        return Err(invalid(format!("decay_times must satisfy 0 < s1 < s2, got [{s1}, {s2}]")));
    }
    let a = transformed_integrand_norm(&problem, &[u0.clone()], &m_reg, g_min, s1)?;
    let b = transformed_integrand_norm(&problem, &[u0], &m_reg, g_min, s2)?;
    rb.metric("integrand_norm_s1", a);
    rb.metric("integrand_norm_s2", b);
    if a > 0.0 {
        let expected = s1 / s2;
        rb.metric("decay_ratio", b / a);
        rb.check("decay", (b / a / expected - 1.0).abs(), 0.2);
    } else {
        rb.note("zero data: the transformed integrand vanishes, no decay ratio");
    }
    Ok(Outcome {
        report: rb.finish()?,
        artifacts: Vec::new(),
    })
}
