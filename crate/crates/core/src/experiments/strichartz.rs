use std::f64::consts::TAU;
use std::io::Write;

use num_complex::Complex64;

use super::config::ExperimentConfig;
use super::report::{Artifact, Outcome, ReportBuilder};
use crate::dispersion::{DispersionKind, DispersionRelation};
use crate::error::{invalid, Result};
use crate::fit::linear_fit;
use crate::solver::linear_evolve;
use crate::spectral::{Field, Grid};

/// Unit-norm Gaussian annulus `exp(−(|k| − M)²/(2(wM)²))`.
fn annulus(grid: Grid, m: f64, width: f64) -> Result<Field> {
    let s = width * m;
    let f = Field::from_frequency(grid, |k| {
        let r = k.norm() - m;
        Complex64::new((-(r * r) / (2.0 * s * s)).exp(), 0.0)
    });
    let norm = f.l2_norm();
    if !(norm > 0.0) {
        return Err(invalid(format!("annulus at radius {m} has zero norm on this grid")));
    }
    Ok(f.scale(Complex64::new(1.0 / norm, 0.0)))
}

/// `‖e^{itP}ψ₁ · e^{itP}ψ₂‖_{L²([−T,T]×torus)} / (‖ψ₁‖‖ψ₂‖)` for unit
/// annulus Gaussians at radii `m1`, `m2` of relative width `width`, with the
/// trapezoid rule on `samples` nodes.
pub fn strichartz_ratio(
    rel: &DispersionRelation,
    grid: Grid,
    m1: f64,
    m2: f64,
    width: f64,
    window: f64,
    samples: usize,
) -> Result<f64> {
    let band = grid.n()[0] as f64 / 3.0 * grid.dk(0);
    for m in [m1, m2] {
        if !(m > 0.0) {
            return Err(invalid(format!("annulus radius must be positive, got {m}")));
        }
        if m * (1.0 + 2.0 * width) > band {
            return Err(invalid(format!(
                "annulus at radius {m} (width {width}) exceeds the dealias band {band}"
            )));
        }
    }
    if !(width > 0.0 && window > 0.0 && samples >= 2) {
        return Err(invalid("need positive width and window and at least two time samples"));
    }
    let psi1 = annulus(grid, m1, width)?;
    let psi2 = annulus(grid, m2, width)?;
    let dt = 2.0 * window / (samples - 1) as f64;
    let mut acc = 0.0;
    for i in 0..samples {
        let t = -window + i as f64 * dt;
        let w = if i == 0 || i == samples - 1 { 0.5 * dt } else { dt };
        let u1 = linear_evolve(rel, &psi1, t).to_physical();
        let u2 = linear_evolve(rel, &psi2, t).to_physical();
        let prod = u1.pointwise(&u2)?;
        acc += w * prod.l2_norm().powi(2);
    }
    // unit discrete norms; the torus measure contributes L^{-d/2} overall
    let volume: f64 = (0..grid.dim()).map(|a| grid.period()[a]).product();
    Ok((acc / volume).sqrt())
}

/// Bilinear estimate trend: `log₂ Q` against `log₂(M₂/M₁)`.
///
/// Reads `dispersion` (schrodinger), `grid` (d = 2, N = 128, L = 2π),
/// `params.m2` (24), `params.ratios` ([2, 4, 8]), `params.annulus_width`
/// (0.2), `params.window` (L/(4·M₂)), `params.time_samples` (enough for
/// `dt·P_max ≤ 1/2`).
pub fn run_bilinear_strichartz(cfg: &ExperimentConfig) -> Result<Outcome> {
    let grid = cfg.grid_or(2, 128, TAU)?;
    if grid.dim() != 2 {
        return Err(invalid("bilinear_strichartz runs on two-dimensional grids"));
    }
    let rel = cfg.relation_or(DispersionKind::Schrodinger, 2)?;
    let p = &cfg.params;
    let m2 = p.m2.unwrap_or(24.0);
    let ratios = p.ratios.clone().unwrap_or_else(|| vec![2.0, 4.0, 8.0]);
    if ratios.len() < 2 || ratios.iter().any(|r| !(*r >= 1.0)) {
        return Err(invalid("ratios must hold at least two values ≥ 1"));
    }
    let width = p.annulus_width.unwrap_or(0.2);
    let window = p.window.unwrap_or(grid.period()[0] / (4.0 * m2));
    let p_max = rel.value(crate::vec2::Vec2::scalar(m2 * (1.0 + 3.0 * width))).abs();
    let samples = p
        .time_samples
        .unwrap_or_else(|| (2.0 * window * p_max / 0.5).ceil() as usize + 1);
    let mut rb = ReportBuilder::new("bilinear_strichartz", cfg);
    rb.metric("window", window);
    rb.metric("time_samples", samples as f64);

    let q1 = strichartz_ratio(&rel, grid, m2, m2, width, window, samples)?;
    rb.metric("q_ratio1", q1);
    let mut rows = vec![(1.0, m2, m2, q1)];
    for &r in &ratios {
        let m1 = m2 / r;
        let q = strichartz_ratio(&rel, grid, m1, m2, width, window, samples)?;
        rb.metric(format!("q_ratio{r}"), q);
        rows.push((r, m1, m2, q));
    }
    let xs: Vec<f64> = rows[1..].iter().map(|r| r.0.log2()).collect();
    let ys: Vec<f64> = rows[1..].iter().map(|r| r.3.log2()).collect();
    let slope = linear_fit(&xs, &ys).map_or(f64::NAN, |f| f.slope);
    rb.metric("slope", slope);
    rb.check("slope", (slope + 0.5).abs(), 0.15);
    let csv = Artifact::csv("bilinear_strichartz.csv", |w| {
        writeln!(w, "ratio,m1,m2,q")?;
        for (r, a, b, q) in &rows {
            writeln!(w, "{r},{a},{b},{q}")?;
        }
        Ok(())
    });
    Ok(Outcome {
        report: rb.finish()?,
        artifacts: vec![csv],
    })
}
