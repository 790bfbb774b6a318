use serde::Serialize;

use super::grid::{GridSpec2, Interval};
use super::nearest::NearestIndex;
use super::phase::Phase;
use super::sets::{FreqPair, ResonantSets, ZeroSet};
use crate::error::{invalid, Result};
use crate::fit::log_log_slope;
use crate::spectral::Symbol2;
use crate::vec2::Vec2;

/// Projections of `R` onto the output and input frequency slots.
#[derive(Debug, Clone, Serialize)]
pub struct Separation {
    /// `ξ` for every `(ξ,η) ∈ R`.
    pub outcome: Vec<Vec2>,
    /// `η` and `ξ−η` for every `(ξ,η) ∈ R`.
    pub source: Vec<Vec2>,
    pub separated: bool,
    /// Smallest outcome/source distance; `None` when `R` is empty.
    pub min_distance: Option<f64>,
    pub note: String,
}

/// Outcome and source frequencies of the resonant set and whether they are
/// separated by more than `tol`.
pub fn project_and_separate(sets: &ResonantSets, tol: f64) -> Separation {
    separation_of(&sets.r.points, tol)
}

/// [`project_and_separate`] for an explicit list of `R` samples.
pub fn separation_of(r: &[FreqPair], tol: f64) -> Separation {
    let outcome: Vec<Vec2> = r.iter().map(|p| p.xi).collect();
    let source: Vec<Vec2> = r
        .iter()
        .flat_map(|p| [p.eta, p.xi - p.eta])
        .collect();
    let to4 = |v: &Vec2| [v.x, v.y, 0.0, 0.0];
    let index = NearestIndex::new(dedup(&source).iter().map(to4).collect());
    let min_distance = dedup(&outcome)
        .iter()
        .filter_map(|v| index.nearest(&to4(v)))
        .reduce(f64::min);
    Separation {
        separated: min_distance.is_none_or(|d| d > tol),
        outcome,
        source,
        min_distance,
        note: "source frequencies are the union of the η and ξ−η projections".into(),
    }
}

fn dedup(v: &[Vec2]) -> Vec<Vec2> {
    let mut out = v.to_vec();
    out.sort_by(|a, b| (a.x, a.y).partial_cmp(&(b.x, b.y)).expect("finite frequencies"));
    out.dedup();
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum NullVerdict {
    Bounded,
    Divergent,
    Inconclusive,
}

#[derive(Debug, Clone, Serialize)]
pub struct NullRatioReport {
    pub bands: Vec<f64>,
    /// `sup |m/φ|` over nodes with `|φ| ≥ b`, per band.
    pub time_sups: Vec<f64>,
    /// `sup |m·∂_ηφ| / |∂_ηφ|²` over nodes with `|∂_ηφ| ≥ b`, per band.
    pub space_sups: Vec<f64>,
    pub time_verdict: NullVerdict,
    pub space_verdict: NullVerdict,
    pub time_slope: Option<f64>,
    pub space_slope: Option<f64>,
}

/// Measures how `m/φ` and `m ∂_ηφ/|∂_ηφ|²` behave as the grid approaches
/// `T` and `S`, over a decreasing sequence of bands.
pub fn null_ratio_report(
    m: &Symbol2,
    phase: &Phase,
    grid: &GridSpec2,
    bands: &[f64],
) -> Result<NullRatioReport> {
    if bands.is_empty() || bands.iter().any(|b| !(*b > 0.0 && b.is_finite())) {
        return Err(invalid("bands must be positive and finite"));
    }
    if bands.windows(2).any(|w| w[1] >= w[0]) {
        return Err(invalid("bands must be strictly decreasing"));
    }
    let mask = 0.5 * grid.h();
    let mut time_sups = vec![0.0f64; bands.len()];
    let mut space_sups = vec![0.0f64; bands.len()];
    for k in 0..grid.len() {
        let (xi, eta) = grid.node(k);
        let mv = m.eval(xi, eta).abs();
        let phi = phase.value(xi, eta).abs();
        let grad = phase.grad_eta_masked(xi, eta, mask).map(Vec2::norm);
        for (b, band) in bands.iter().enumerate() {
            if phi >= *band {
                time_sups[b] = time_sups[b].max(mv / phi);
            }
            if let Some(g) = grad.filter(|g| g >= band) {
                space_sups[b] = space_sups[b].max(mv / g);
            }
        }
    }
    let (time_verdict, time_slope) = judge(bands, &time_sups);
    let (space_verdict, space_slope) = judge(bands, &space_sups);
    Ok(NullRatioReport {
        bands: bands.to_vec(),
        time_sups,
        space_sups,
        time_verdict,
        space_verdict,
        time_slope,
        space_slope,
    })
}

fn judge(bands: &[f64], sups: &[f64]) -> (NullVerdict, Option<f64>) {
    let usable: Vec<usize> = (0..bands.len()).filter(|&i| sups[i] > 0.0).collect();
    let slope = (usable.len() >= 2)
        .then(|| {
            let b: Vec<f64> = usable.iter().map(|&i| bands[i]).collect();
            let s: Vec<f64> = usable.iter().map(|&i| sups[i]).collect();
            log_log_slope(&b, &s)
        })
        .flatten();
    if slope.is_some_and(|s| (s + 1.0).abs() <= 0.2) {
        return (NullVerdict::Divergent, slope);
    }
    match sups {
        [.., prev, last] if *prev > 0.0 && last / prev <= 2.0 => (NullVerdict::Bounded, slope),
        [only] if only.is_finite() => (NullVerdict::Bounded, slope),
        _ => (NullVerdict::Inconclusive, slope),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DxiContainment {
    pub contains_t: bool,
    pub contains_s: bool,
    pub contains_r: bool,
    /// Largest `|∂_ξφ|` seen on each set (0 for empty sets).
    pub max_t: f64,
    pub max_s: f64,
    pub max_r: f64,
    /// Samples skipped because `∂_ξφ` is singular there.
    pub skipped: usize,
}

/// Whether `∂_ξφ` vanishes (to `tol`) on every sample of `T`, `S` and `R`.
pub fn dxi_zero_containment(phase: &Phase, sets: &ResonantSets, tol: f64) -> DxiContainment {
    let mask = sets.mask_radius();
    let mut skipped = 0;
    let mut max_on = |set: &ZeroSet| {
        let mut worst = 0.0f64;
        for p in &set.points {
            match phase.grad_xi_masked(p.xi, p.eta, mask) {
                Some(g) => worst = worst.max(g.norm()),
                None => skipped += 1,
            }
        }
        worst
    };
    let max_t = max_on(&sets.t);
    let max_s = max_on(&sets.s);
    let max_r = max_on(&sets.r);
    DxiContainment {
        contains_t: max_t <= tol,
        contains_s: max_s <= tol,
        contains_r: max_r <= tol,
        max_t,
        max_s,
        max_r,
        skipped,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RadialForm {
    Empty,
    SphereRay,
    Other,
}

#[derive(Debug, Clone, Serialize)]
pub struct RadialFit {
    pub form: RadialForm,
    pub r0: f64,
    /// Range of `λ` in `η = λξ`; `None` if every sample has `ξ = 0`.
    pub lambda_range: Option<Interval>,
    pub max_radius_deviation: f64,
    pub max_cross: f64,
}

/// Tests whether `R` is of the form `{|ξ| = R₀, η = λξ}`.
pub fn fit_radial_r(sets: &ResonantSets, tol: f64) -> RadialFit {
    fit_radial_points(&sets.r.points, tol)
}

/// [`fit_radial_r`] for an explicit list of `R` samples.
pub fn fit_radial_points(r: &[FreqPair], tol: f64) -> RadialFit {
    if r.is_empty() {
        return RadialFit {
            form: RadialForm::Empty,
            r0: 0.0,
            lambda_range: None,
            max_radius_deviation: 0.0,
            max_cross: 0.0,
        };
    }
    let (lo, hi) = r
        .iter()
        .map(|p| p.xi.norm())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), n| (lo.min(n), hi.max(n)));
    let r0 = 0.5 * (lo + hi);
    let max_radius_deviation = 0.5 * (hi - lo);
    let max_cross = r.iter().map(|p| p.xi.cross(p.eta).abs()).fold(0.0, f64::max);
    let mut lambda: Option<Interval> = None;
    for p in r {
        let n2 = p.xi.norm_sq();
        if n2 > 0.0 {
            let l = p.eta.dot(p.xi) / n2;
            lambda = Some(match lambda {
                None => Interval::new(l, l),
                Some(iv) => Interval::new(iv.lo.min(l), iv.hi.max(l)),
            });
        }
    }
    let form = if max_radius_deviation <= tol && max_cross <= tol {
        RadialForm::SphereRay
    } else {
        RadialForm::Other
    };
    RadialFit {
        form,
        r0,
        lambda_range: lambda,
        max_radius_deviation,
        max_cross,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dispersion::{DispersionRelation, DispersionSystem};
    use crate::resonance::{compute_resonant_sets, GridMode, SignPair};

    fn grid(half: f64, h: f64) -> GridSpec2 {
        GridSpec2::square_1d(half, h, GridMode::Curve).unwrap()
    }

    #[test]
    fn single_point_separation() {
        let s = separation_of(&[FreqPair::scalar(1.0, 0.5)], 0.1);
        assert_eq!(s.outcome, vec![Vec2::scalar(1.0)]);
        assert_eq!(s.source, vec![Vec2::scalar(0.5), Vec2::scalar(0.5)]);
        assert!(s.separated);
        assert_eq!(s.min_distance, Some(0.5));
    }

    #[test]
    fn empty_r_is_separated() {
        let s = separation_of(&[], 0.1);
        assert!(s.separated && s.min_distance.is_none());
    }

    fn mixed_phase() -> Phase {
        let sys = DispersionSystem::new(vec![
            DispersionRelation::schrodinger(1).unwrap(),
            DispersionRelation::wave(1).unwrap(),
            DispersionRelation::wave(1).unwrap(),
        ])
        .unwrap();
        Phase::new(sys, 1, 2, 3, SignPair::PP).unwrap()
    }

    #[test]
    fn mixed_system_is_a_sphere_ray_and_not_separated() {
        // contact at |ξ| = 1 is resolved to one grid spacing, so h < tol
        let h = 0.005;
        let sets = compute_resonant_sets(&mixed_phase(), &grid(1.5, h), h * h).unwrap();
        let fit = fit_radial_r(&sets, 2.0 * h);
        assert_eq!(fit.form, RadialForm::SphereRay);
        assert!((fit.r0 - 1.0).abs() <= 2.0 * h, "R0 = {}", fit.r0);
        let lam = fit.lambda_range.unwrap();
        assert!(lam.lo >= -2.0 * h && lam.hi <= 1.0 + 2.0 * h, "{lam:?}");
        let sep = project_and_separate(&sets, 0.01);
        assert!(sep.outcome.iter().all(|x| (x.norm() - 1.0).abs() <= 2.0 * h));
        assert!(sep.source.iter().all(|e| e.norm() <= 1.0 + 2.0 * h));
        assert!(!sep.separated);
    }

    #[test]
    fn klein_gordon_r_is_empty() {
        let phase = Phase::scalar(DispersionRelation::klein_gordon(1.0, 1).unwrap(), SignPair::PP);
        let sets = compute_resonant_sets(&phase, &grid(3.0, 0.02), 1e-4).unwrap();
        assert_eq!(fit_radial_r(&sets, 0.04).form, RadialForm::Empty);
    }

    #[test]
    fn origin_is_a_degenerate_sphere() {
        let fit = fit_radial_points(&[FreqPair::scalar(0.0, 0.0)], 1e-3);
        assert_eq!(fit.form, RadialForm::SphereRay);
        assert_eq!(fit.r0, 0.0);
    }

    fn schrodinger_pp() -> Phase {
        Phase::scalar(DispersionRelation::schrodinger(1).unwrap(), SignPair::PP)
    }

    #[test]
    fn null_ratios() {
        let phase = schrodinger_pp();
        let g = grid(2.0, 0.01);
        let bands = [0.1, 0.05, 0.025, 0.0125];
        let p = phase.clone();
        let m_phi = Symbol2::from_fn(move |xi, eta| p.value(xi, eta));
        let rep = null_ratio_report(&m_phi, &phase, &g, &bands).unwrap();
        assert_eq!(rep.time_verdict, NullVerdict::Bounded);
        assert!(rep.time_sups.iter().all(|s| (s - 1.0).abs() < 1e-12));

        let rep = null_ratio_report(&Symbol2::constant(1.0), &phase, &g, &bands).unwrap();
        assert_eq!(rep.time_verdict, NullVerdict::Divergent);

        let p = phase.clone();
        let m_grad = Symbol2::from_fn(move |xi, eta| p.grad_eta(xi, eta).map_or(0.0, |g| g.x));
        let rep = null_ratio_report(&m_grad, &phase, &g, &bands).unwrap();
        assert_eq!(rep.space_verdict, NullVerdict::Bounded);
        assert!(rep.space_sups.iter().all(|s| (s - 1.0).abs() < 1e-12));
    }

    #[test]
    fn bands_must_decrease() {
        let phase = schrodinger_pp();
        let g = grid(1.0, 0.1);
        assert!(null_ratio_report(&Symbol2::constant(1.0), &phase, &g, &[0.1, 0.2]).is_err());
    }

    #[test]
    fn dxi_containment_examples() {
        let wave = Phase::scalar(DispersionRelation::wave(1).unwrap(), SignPair::PP);
        let g = GridSpec2::square_1d(2.0, 0.02, GridMode::Band).unwrap();
        let sets = compute_resonant_sets(&wave, &g, 1e-9).unwrap();
        let c = dxi_zero_containment(&wave, &sets, 1e-12);
        assert!(c.contains_t);
        assert!(sets.t.len() > 1000);

        let pm = Phase::scalar(DispersionRelation::schrodinger(1).unwrap(), SignPair::PM);
        let sets = compute_resonant_sets(&pm, &grid(2.0, 0.02), 4e-4).unwrap();
        let c = dxi_zero_containment(&pm, &sets, 1e-6);
        assert!(!c.contains_r);

        let kg = Phase::scalar(DispersionRelation::klein_gordon(1.0, 1).unwrap(), SignPair::PP);
        let sets = compute_resonant_sets(&kg, &grid(2.0, 0.05), 1e-4).unwrap();
        assert!(dxi_zero_containment(&kg, &sets, 1e-12).contains_r);
    }
}
