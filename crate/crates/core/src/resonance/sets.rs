use std::fmt;
use std::io::Write;
use std::sync::Arc;

use serde::Serialize;

use super::contour::zero_curve;
use super::grid::{GridMode, GridSpec2};
use super::nearest::NearestIndex;
use super::phase::Phase;
use crate::error::{invalid, Error, Result};
use crate::vec2::Vec2;

/// Stand-in for `+∞` in distance fields when `R` has no samples.
pub const EMPTY_DISTANCE: f64 = 1e30;

/// A point `(ξ, η)` of frequency space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FreqPair {
    pub xi: Vec2,
    pub eta: Vec2,
}

impl FreqPair {
    pub fn new(xi: Vec2, eta: Vec2) -> Self {
        FreqPair { xi, eta }
    }

    pub fn scalar(xi: f64, eta: f64) -> Self {
        FreqPair::new(Vec2::scalar(xi), Vec2::scalar(eta))
    }

    pub(crate) fn coords(&self) -> [f64; 4] {
        [self.xi.x, self.eta.x, self.xi.y, self.eta.y]
    }

    pub fn distance(&self, other: &FreqPair) -> f64 {
        ((self.xi - other.xi).norm_sq() + (self.eta - other.eta).norm_sq()).sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum SetLabel {
    T,
    S,
    R,
    Dxi,
}

impl fmt::Display for SetLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SetLabel::T => "T",
            SetLabel::S => "S",
            SetLabel::R => "R",
            SetLabel::Dxi => "DXI",
        })
    }
}

/// Samples of one zero locus.
#[derive(Debug, Clone)]
pub struct ZeroSet {
    pub label: SetLabel,
    pub points: Vec<FreqPair>,
    /// Polyline connectivity as index pairs into `points` (curve mode only).
    pub segments: Vec<(usize, usize)>,
    pub band_tol: f64,
}

impl ZeroSet {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Distance to the `R` samples, tabulated on the scan grid and queryable
/// anywhere.
#[derive(Debug, Clone)]
pub struct DistanceField {
    grid: GridSpec2,
    values: Vec<f64>,
    index: Arc<NearestIndex>,
}

impl DistanceField {
    fn new(grid: &GridSpec2, samples: &[FreqPair]) -> Self {
        let index = NearestIndex::new(samples.iter().map(FreqPair::coords).collect());
        let values = (0..grid.len())
            .map(|k| {
                let (xi, eta) = grid.node(k);
                index.nearest(&FreqPair::new(xi, eta).coords()).unwrap_or(EMPTY_DISTANCE)
            })
            .collect();
        DistanceField {
            grid: grid.clone(),
            values,
            index: Arc::new(index),
        }
    }

    pub fn grid(&self) -> &GridSpec2 {
        &self.grid
    }

    /// Node values in the grid's row-major order.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn is_empty_set(&self) -> bool {
        self.index.is_empty()
    }

    /// Exact distance from an arbitrary `(ξ, η)` to the nearest `R` sample.
    pub fn distance(&self, xi: Vec2, eta: Vec2) -> f64 {
        self.index
            .nearest(&FreqPair::new(xi, eta).coords())
            .unwrap_or(EMPTY_DISTANCE)
    }
}

/// `T`, `S`, `R` and the distance to `R` for one phase on one grid.
#[derive(Debug, Clone)]
pub struct ResonantSets {
    pub t: ZeroSet,
    pub s: ZeroSet,
    pub r: ZeroSet,
    pub dist_to_r: DistanceField,
    grid: GridSpec2,
}

impl ResonantSets {
    pub fn grid(&self) -> &GridSpec2 {
        &self.grid
    }

    /// Radius around singular frequencies inside which gradients are not
    /// evaluated: half a grid spacing, so only the node on the singularity.
    pub fn mask_radius(&self) -> f64 {
        0.5 * self.grid.h()
    }

    pub fn sets(&self) -> [&ZeroSet; 3] {
        [&self.t, &self.s, &self.r]
    }

    /// CSV with columns `set_label, xi, eta` (one dimension) or
    /// `set_label, xi_x, xi_y, eta_x, eta_y` (two dimensions).
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        let two_d = self.grid.dim() == 2;
        if two_d {
            writeln!(w, "set_label,xi_x,xi_y,eta_x,eta_y")?;
        } else {
            writeln!(w, "set_label,xi,eta")?;
        }
        for set in self.sets() {
            for p in &set.points {
                if two_d {
                    writeln!(w, "{},{},{},{},{}", set.label, p.xi.x, p.xi.y, p.eta.x, p.eta.y)?;
                } else {
                    writeln!(w, "{},{},{}", set.label, p.xi.x, p.eta.x)?;
                }
            }
        }
        Ok(())
    }
}

/// Scans `grid` for the time, space and space-time resonances of `phase`.
///
/// Curve mode extracts zero levels of `φ` and `∂_η φ` on the (ξ,η) plane and
/// adds the nodes already within `band_tol`; band mode keeps every node with `|φ| ≤ band_tol` (resp. `|∂_η φ|`). `R`
/// keeps the samples of `T` and `S` at which both quantities are within
/// `band_tol`.
pub fn compute_resonant_sets(phase: &Phase, grid: &GridSpec2, band_tol: f64) -> Result<ResonantSets> {
    if !(band_tol > 0.0 && band_tol.is_finite()) {
        return Err(invalid(format!("band tolerance must be positive, got {band_tol}")));
    }
    if grid.mode() == GridMode::Curve && (phase.dim() != 1 || grid.dim() != 1) {
        return Err(Error::UnsupportedMode(
            "curve extraction needs a one-dimensional phase".into(),
        ));
    }
    if grid.dim() != phase.dim() {
        return Err(invalid(format!(
            "grid dimension {} does not match phase dimension {}",
            grid.dim(),
            phase.dim()
        )));
    }
    let mask = 0.5 * grid.h();
    let (t, s) = match grid.mode() {
        GridMode::Curve => curve_sets(phase, grid, band_tol, mask),
        GridMode::Band => band_sets(phase, grid, band_tol, mask),
    };

    let mut candidates: Vec<FreqPair> = t.points.iter().chain(&s.points).copied().collect();
    candidates.sort_by(|a, b| a.coords().partial_cmp(&b.coords()).expect("finite samples"));
    candidates.dedup();
    let r_points: Vec<FreqPair> = candidates
        .into_iter()
        .filter(|p| {
            phase.value(p.xi, p.eta).abs() <= band_tol
                && phase
                    .grad_eta_masked(p.xi, p.eta, mask)
                    .is_some_and(|g| g.norm() <= band_tol)
        })
        .collect();
    let r = ZeroSet {
        label: SetLabel::R,
        points: r_points,
        segments: Vec::new(),
        band_tol,
    };
    let dist_to_r = DistanceField::new(grid, &r.points);
    Ok(ResonantSets {
        t,
        s,
        r,
        dist_to_r,
        grid: grid.clone(),
    })
}

fn curve_sets(phase: &Phase, grid: &GridSpec2, tol: f64, mask: f64) -> (ZeroSet, ZeroSet) {
    let (nx, ny) = (grid.counts()[0], grid.counts()[1]);
    let mut phi = Vec::with_capacity(nx * ny);
    let mut deta = Vec::with_capacity(nx * ny);
    for i in 0..nx {
        for j in 0..ny {
            let (x, e) = grid.plane_node(i, j);
            let (xi, eta) = (Vec2::scalar(x), Vec2::scalar(e));
            phi.push(phase.value(xi, eta));
            deta.push(phase.grad_eta_masked(xi, eta, mask).map_or(f64::NAN, |g| g.x));
        }
    }
    let coord = |i, j| grid.plane_node(i, j);
    let phi_at = |x: f64, e: f64| Some(phase.value(Vec2::scalar(x), Vec2::scalar(e)));
    let deta_at = |x: f64, e: f64| {
        phase
            .grad_eta_masked(Vec2::scalar(x), Vec2::scalar(e), mask)
            .map(|g| g.x)
    };
    let t_curve = zero_curve(nx, ny, &phi, coord, phi_at);
    let s_curve = zero_curve(nx, ny, &deta, coord, deta_at);
    let mut t = filtered(SetLabel::T, t_curve, tol, phi_at);
    let mut s = filtered(SetLabel::S, s_curve, tol, deta_at);
    // zeros without a sign change (minima touching zero, flat regions) never
    // produce crossings, so near-zero nodes are kept as well
    for (set, values) in [(&mut t, &phi), (&mut s, &deta)] {
        for (idx, &v) in values.iter().enumerate() {
            if v != 0.0 && v.abs() <= tol {
                let (x, e) = grid.plane_node(idx / ny, idx % ny);
                set.points.push(FreqPair::scalar(x, e));
            }
        }
    }
    (t, s)
}

/// Keeps the curve points whose tracked quantity is within `tol`, remapping
/// segments accordingly.
fn filtered(
    label: SetLabel,
    curve: super::contour::Curve,
    tol: f64,
    f: impl Fn(f64, f64) -> Option<f64>,
) -> ZeroSet {
    let mut remap = vec![usize::MAX; curve.points.len()];
    let mut points = Vec::new();
    for (k, &(x, e)) in curve.points.iter().enumerate() {
        if f(x, e).is_some_and(|v| v.abs() <= tol) {
            remap[k] = points.len();
            points.push(FreqPair::scalar(x, e));
        }
    }
    let segments = curve
        .segments
        .iter()
        .filter_map(|&(a, b)| {
            let (a, b) = (remap[a], remap[b]);
            (a != usize::MAX && b != usize::MAX && a != b).then_some((a, b))
        })
        .collect();
    ZeroSet {
        label,
        points,
        segments,
        band_tol: tol,
    }
}

fn band_sets(phase: &Phase, grid: &GridSpec2, tol: f64, mask: f64) -> (ZeroSet, ZeroSet) {
    let mut t = Vec::new();
    let mut s = Vec::new();
    for k in 0..grid.len() {
        let (xi, eta) = grid.node(k);
        if phase.value(xi, eta).abs() <= tol {
            t.push(FreqPair::new(xi, eta));
        }
        if phase
            .grad_eta_masked(xi, eta, mask)
            .is_some_and(|g| g.norm() <= tol)
        {
            s.push(FreqPair::new(xi, eta));
        }
    }
    let set = |label, points| ZeroSet {
        label,
        points,
        segments: Vec::new(),
        band_tol: tol,
    };
    (set(SetLabel::T, t), set(SetLabel::S, s))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dispersion::DispersionRelation;
    use crate::resonance::{Interval, SignPair};

    fn schrodinger_pp() -> Phase {
        Phase::scalar(DispersionRelation::schrodinger(1).unwrap(), SignPair::PP)
    }

    #[test]
    fn invariants_hold_on_every_sample() {
        let phase = schrodinger_pp();
        let grid = GridSpec2::square_1d(1.0, 0.02, GridMode::Curve).unwrap();
        let sets = compute_resonant_sets(&phase, &grid, 4e-4).unwrap();
        for p in &sets.t.points {
            assert!(phase.value(p.xi, p.eta).abs() <= sets.t.band_tol);
        }
        for p in &sets.s.points {
            assert!(phase.grad_eta(p.xi, p.eta).unwrap().norm() <= sets.s.band_tol);
        }
        for p in &sets.r.points {
            assert!(phase.value(p.xi, p.eta).abs() <= 4e-4);
            assert!(phase.grad_eta(p.xi, p.eta).unwrap().norm() <= 4e-4);
        }
        assert!(!sets.r.is_empty());
    }

    #[test]
    fn distance_field_is_zero_on_r_and_lipschitz() {
        let phase = schrodinger_pp();
        let grid = GridSpec2::square_1d(1.0, 0.02, GridMode::Curve).unwrap();
        let sets = compute_resonant_sets(&phase, &grid, 4e-4).unwrap();
        let field = &sets.dist_to_r;
        let n = grid.counts()[1];
        for (k, &d) in field.values().iter().enumerate() {
            assert!(d >= 0.0);
            let (xi, eta) = grid.node(k);
            if sets.r.points.contains(&FreqPair::new(xi, eta)) {
                assert_eq!(d, 0.0);
            }
            if (k + 1) % n != 0 {
                assert!((d - field.values()[k + 1]).abs() <= grid.h() * 2f64.sqrt() + 1e-12);
            }
            if k + n < field.values().len() {
                assert!((d - field.values()[k + n]).abs() <= grid.h() * 2f64.sqrt() + 1e-12);
            }
        }
    }

    #[test]
    fn curve_mode_needs_one_dimension() {
        let phase = Phase::scalar(DispersionRelation::schrodinger(2).unwrap(), SignPair::PP);
        let iv = Interval::symmetric(1.0);
        let grid = GridSpec2::new_2d([iv; 2], [iv; 2], 0.5).unwrap().with_mode(GridMode::Curve);
        assert!(matches!(
            compute_resonant_sets(&phase, &grid, 0.1),
            Err(Error::UnsupportedMode(_))
        ));
    }

    #[test]
    fn band_mode_in_two_dimensions() {
        let phase = Phase::scalar(DispersionRelation::schrodinger(2).unwrap(), SignPair::MM);
        let iv = Interval::symmetric(1.0);
        let grid = GridSpec2::new_2d([iv; 2], [iv; 2], 0.25).unwrap();
        let sets = compute_resonant_sets(&phase, &grid, 1e-9).unwrap();
        // φ = |ξ|² + |η|² + |ξ−η|² vanishes only at the origin
        assert_eq!(sets.t.points, vec![FreqPair::new(Vec2::ZERO, Vec2::ZERO)]);
        assert_eq!(sets.r.points, sets.t.points);
        let far = sets.dist_to_r.distance(Vec2::new(1.0, 0.0), Vec2::new(0.0, 1.0));
        assert!((far - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn empty_r_uses_sentinel() {
        let phase = Phase::scalar(DispersionRelation::klein_gordon(1.0, 1).unwrap(), SignPair::PP);
        let grid = GridSpec2::square_1d(1.0, 0.05, GridMode::Curve).unwrap();
        let sets = compute_resonant_sets(&phase, &grid, 1e-3).unwrap();
        assert!(sets.t.is_empty() && sets.r.is_empty());
        assert!(sets.dist_to_r.values().iter().all(|&d| d == EMPTY_DISTANCE));
    }

    #[test]
    fn csv_layout() {
        let phase = schrodinger_pp();
        let grid = GridSpec2::square_1d(0.2, 0.1, GridMode::Curve).unwrap();
        let sets = compute_resonant_sets(&phase, &grid, 1e-3).unwrap();
        let mut buf = Vec::new();
        sets.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("set_label,xi,eta\n"));
        assert!(text.lines().skip(1).all(|l| l.split(',').count() == 3));
        assert!(text.contains("\nR,0,0"));
    }
}
