use std::f64::consts::TAU;
use std::io::Write;

use num_complex::Complex64;

use super::config::ExperimentConfig;
use super::report::{Artifact, Outcome, ReportBuilder};
use crate::dispersion::{DispersionKind, DispersionRelation};
use crate::error::{invalid, Result};
use crate::fit::linear_fit;
use crate::resonance::{compute_resonant_sets, FreqPair, GridMode, GridSpec2, Phase, SignPair};
use crate::solver::linear_evolve;
use crate::spectral::{oscillation_integral, Field, Grid};
use crate::vec2::Vec2;

/// Gaussian of width `width` centred at `L/2`, modulated at lattice mode `k`.
fn packet(grid: Grid, k: f64, width: f64) -> Field {
    let center = grid.period()[0] / 2.0;
    Field::from_physical(grid, |x| {
        let y = x.x - center;
        Complex64::from_polar((-(y * y) / (2.0 * width * width)).exp(), k * x.x)
    })
}

/// Circular mean position of `|u|²` on the periodic line.
fn circular_centroid(u: &Field) -> f64 {
    let grid = *u.grid();
    let period = grid.period()[0];
    let u = u.to_physical();
    let acc: Complex64 = u
        .values()
        .iter()
        .enumerate()
        .map(|(i, v)| v.norm_sqr() * Complex64::from_polar(1.0, TAU * grid.position(i).x / period))
        .sum();
    acc.arg().rem_euclid(TAU) * period / TAU
}

fn overlap(a: &Field, b: &Field) -> f64 {
    let (a, b) = (a.to_physical(), b.to_physical());
    let mut cross = 0.0;
    let (mut na, mut nb) = (0.0, 0.0);
    for (x, y) in a.values().iter().zip(b.values()) {
        cross += x.norm() * y.norm();
        na += x.norm_sqr();
        nb += y.norm_sqr();
    }
    cross / (na * nb).sqrt()
}

fn is_linear_speed(rel: &DispersionRelation) -> bool {
    rel.alpha() == Some(1.0)
}

/// Centroid velocity of a linearly evolved packet against `−P′(ξ₀)`, plus
/// the co-travel overlap of two packets.
///
/// Reads `dispersion` (schrodinger), `grid.n` (1024), `grid.period`
/// (2π·8), `solver.t_final` (1), `params.xi0` (5), `params.width` (1),
/// `params.samples` (11), `params.packet_pair` ([4, 9]),
/// `params.overlap_time` (5).
pub fn run_wave_packet(cfg: &ExperimentConfig) -> Result<Outcome> {
    let rel = cfg.relation_or(DispersionKind::Schrodinger, 1)?;
    let grid = cfg.grid_or(1, 1024, TAU * 8.0)?;
    if grid.dim() != 1 {
        return Err(invalid("wave_packet runs on one-dimensional grids"));
    }
    let p = &cfg.params;
    let width = p.width.unwrap_or(1.0);
    let period = grid.period()[0];
    if !(width > 2.0 * grid.dx(0) && width < period / 8.0) {
        return Err(invalid(format!("packet width {width} must exceed two grid spacings and stay below L/8")));
    }
    let t_final = cfg.solver.t_final.unwrap_or(1.0);
    let samples = p.samples.unwrap_or(11).max(2);
    let dk = grid.dk(0);
    let lattice = |xi: f64| (xi / dk).round() * dk;
    let xi0 = lattice(p.xi0.unwrap_or(5.0));
    let mut rb = ReportBuilder::new("wave_packet", cfg);
    if (xi0 - p.xi0.unwrap_or(5.0)).abs() > 1e-12 {
        rb.note(format!("xi0 moved to the nearest lattice frequency {xi0}"));
    }

    let u0 = packet(grid, xi0, width);
    let times: Vec<f64> = (0..samples).map(|i| t_final * i as f64 / (samples - 1) as f64).collect();
    let mut centroids = Vec::with_capacity(samples);
    let mut prev: Option<f64> = None;
    for &t in &times {
        let raw = circular_centroid(&linear_evolve(&rel, &u0, t));
        // unwrap across the periodic boundary
        let c = match prev {
            None => raw,
            Some(q) => raw + period * ((q - raw) / period).round(),
        };
        centroids.push(c);
        prev = Some(c);
    }
    let fit = linear_fit(&times, &centroids).ok_or_else(|| invalid("need a positive time window"))?;
    let group = rel.gradient(Vec2::scalar(xi0)).map(|g| g.x).unwrap_or(0.0);
    let expected = -group;
    rb.metric("xi0", xi0);
    rb.metric("velocity", fit.slope);
    rb.metric("expected_velocity", expected);
    rb.check("velocity", (fit.slope - expected).abs() / group.abs().max(1.0), 0.02);

    let [k1, k2] = p.packet_pair.unwrap_or([4.0, 9.0]);
    let (k1, k2) = (lattice(k1), lattice(k2));
    let t_overlap = p.overlap_time.unwrap_or(5.0);
    let a = linear_evolve(&rel, &packet(grid, k1, width), t_overlap);
    let b = linear_evolve(&rel, &packet(grid, k2, width), t_overlap);
    let ov = overlap(&a, &b);
    rb.metric("overlap", ov);
    if is_linear_speed(&rel) {
        rb.check("co_travel_overlap", 1.0 - ov, 0.1);
    } else {
        let speed = |k: f64| rel.gradient(Vec2::scalar(k)).map_or(0.0, |g| g.x);
        let drift = ((speed(k1) - speed(k2)) * t_overlap).abs() % period;
        let apart = drift.min(period - drift);
        rb.metric("packet_separation", apart);
        rb.note(format!(
            "packets at {k1} and {k2} have distinct group velocities; at t = {t_overlap} their centres are \
             {apart:.3} apart on the torus and the overlap is {ov:.4}"
        ));
    }
    let csv = Artifact::csv("wave_packet_centroid.csv", |w| {
        writeln!(w, "t,centroid")?;
        for (t, c) in times.iter().zip(&centroids) {
            writeln!(w, "{t},{c}")?;
        }
        Ok(())
    });
    Ok(Outcome {
        report: rb.finish()?,
        artifacts: vec![csv],
    })
}

/// Closed-form time integral `I(t,φ)` along resonant and non-resonant
/// pairs, cross-checked against the `T` band of the resonance module.
///
/// Reads `dispersion` (schrodinger), `signs` (++), `params.resonant_pairs`
/// ([[2, 2]]), `params.nonresonant_pairs` ([[2, 1]]), `params.times`
/// ([0, 0.5, 1, 2, 4, 8, 16, 32, 64, 100]), `params.band_tol` (1e-9).
pub fn run_resonant_growth(cfg: &ExperimentConfig) -> Result<Outcome> {
    let phase = cfg.phase_or(DispersionKind::Schrodinger, SignPair::PP, 1)?;
    if phase.dim() != 1 {
        return Err(invalid("resonant_growth samples one-dimensional pairs"));
    }
    let p = &cfg.params;
    let resonant = p.resonant_pairs.clone().unwrap_or_else(|| vec![[2.0, 2.0]]);
    let nonresonant = p.nonresonant_pairs.clone().unwrap_or_else(|| vec![[2.0, 1.0]]);
    let times = p
        .times
        .clone()
        .unwrap_or_else(|| vec![0.0, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0, 100.0]);
    if times.iter().any(|t| !(*t >= 0.0)) {
        return Err(invalid("times must be non-negative"));
    }
    let band_tol = p.band_tol.unwrap_or(1e-9);
    let mut rb = ReportBuilder::new("resonant_growth", cfg);
    let mut rows = Vec::new();

    let phi_of = |pair: &[f64; 2]| phase.value(Vec2::scalar(pair[0]), Vec2::scalar(pair[1]));
    let mut worst_slope: f64 = 0.0;
    let mut worst_r2: f64 = 0.0;
    for (n, pair) in resonant.iter().enumerate() {
        let phi = phi_of(pair);
        let mags: Vec<f64> = times.iter().map(|&t| oscillation_integral(t, phi).norm()).collect();
        rows.extend(times.iter().zip(&mags).map(|(&t, &m)| (t, *pair, phi, m)));
        let fit = linear_fit(&times, &mags).ok_or_else(|| invalid("need two distinct times"))?;
        rb.metric(format!("resonant{n}_slope"), fit.slope);
        rb.metric(format!("resonant{n}_phi"), phi);
        worst_slope = worst_slope.max((fit.slope - 1.0).abs());
        worst_r2 = worst_r2.max(1.0 - fit.r_squared);
        if let Some(i) = times.iter().position(|&t| t == 4.0) {
            rb.metric(format!("resonant{n}_magnitude_t4"), mags[i]);
        }
    }
    rb.check("resonant_slope", worst_slope, 1e-6);
    rb.check("resonant_r_squared", worst_r2, 1e-6);

    let mut excess: f64 = 0.0;
    for (n, pair) in nonresonant.iter().enumerate() {
        let phi = phi_of(pair);
        let bound = if phi.abs() > 0.0 { 2.0 / phi.abs() } else { f64::INFINITY };
        let mags: Vec<f64> = times.iter().map(|&t| oscillation_integral(t, phi).norm()).collect();
        rows.extend(times.iter().zip(&mags).map(|(&t, &m)| (t, *pair, phi, m)));
        let sup = mags.iter().copied().fold(0.0, f64::max);
        rb.metric(format!("nonresonant{n}_sup"), sup);
        rb.metric(format!("nonresonant{n}_phi"), phi);
        excess = excess.max((sup - bound).max(0.0));
    }
    // the margin is zero when the bound holds; any positive excess fails
    rb.check("nonresonant_bounded", excess, f64::MIN_POSITIVE);

    // membership in the T band of a sampling grid through the pairs
    let reach = resonant
        .iter()
        .chain(&nonresonant)
        .flat_map(|p| p.iter().map(|v| v.abs()))
        .fold(1.0, f64::max);
    let h = 0.5;
    let half = (reach / h).ceil() * h + h;
    let grid = GridSpec2::square_1d(half, h, GridMode::Band)?;
    let sets = compute_resonant_sets(&phase, &grid, band_tol)?;
    let in_t = |pair: &[f64; 2]| {
        let q = FreqPair::scalar(pair[0], pair[1]);
        sets.t.points.iter().any(|p| p.distance(&q) < 1e-9) || phi_of(pair).abs() <= band_tol
    };
    let mismatches = resonant.iter().filter(|p| !in_t(p)).count() + nonresonant.iter().filter(|p| in_t(p)).count();
    rb.metric("t_band_mismatches", mismatches as f64);
    rb.check("t_band_consistency", mismatches as f64, 0.5);

    let csv = Artifact::csv("resonant_growth.csv", |w| {
        writeln!(w, "t,xi,eta,phi,abs_integral")?;
        for (t, pair, phi, m) in &rows {
            writeln!(w, "{t},{},{},{phi},{m}", pair[0], pair[1])?;
        }
        Ok(())
    });
    Ok(Outcome {
        report: rb.finish()?,
        artifacts: vec![csv],
    })
}

/// `I(t,φ)` bounds over a whole lattice of pairs: `|I| ≤ min(t, 2/|φ|)`.
pub fn oscillation_bound_violation(phase: &Phase, grid: &Grid, t: f64) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..grid.len() {
        for j in 0..grid.len() {
            let phi = phase.value(grid.frequency(i), grid.frequency(j));
            let bound = if phi.abs() > 0.0 { t.min(2.0 / phi.abs()) } else { t };
            worst = worst.max(oscillation_integral(t, phi).norm() - bound);
        }
    }
    worst.max(0.0)
}
