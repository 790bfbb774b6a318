use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::vec2::Vec2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub const fn new(lo: f64, hi: f64) -> Self {
        Interval { lo, hi }
    }

    pub fn symmetric(half_width: f64) -> Self {
        Interval::new(-half_width, half_width)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GridMode {
    /// Contour extraction on the (ξ,η) plane; one spatial dimension only.
    Curve,
    /// Threshold scan, any dimension.
    Band,
}

/// Uniform sampling grid over a box in (ξ,η) space.
///
/// Axes are ordered ξ first, then η; in two dimensions that is
/// `(ξ_x, ξ_y, η_x, η_y)`. Nodes sit at `lo + i·h`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec2 {
    dim: usize,
    xi: [Interval; 2],
    eta: [Interval; 2],
    h: f64,
    mode: GridMode,
    counts: Vec<usize>,
}

impl GridSpec2 {
    pub fn new_1d(xi: Interval, eta: Interval, h: f64, mode: GridMode) -> Result<Self> {
        Self::build(1, [xi, Interval::new(0.0, 0.0)], [eta, Interval::new(0.0, 0.0)], h, mode)
    }

    pub fn new_2d(xi: [Interval; 2], eta: [Interval; 2], h: f64) -> Result<Self> {
        Self::build(2, xi, eta, h, GridMode::Band)
    }

    /// `[-half, half]` on every axis.
    pub fn square_1d(half: f64, h: f64, mode: GridMode) -> Result<Self> {
        Self::new_1d(Interval::symmetric(half), Interval::symmetric(half), h, mode)
    }

    fn build(dim: usize, xi: [Interval; 2], eta: [Interval; 2], h: f64, mode: GridMode) -> Result<Self> {
        if !(h > 0.0 && h.is_finite()) {
            return Err(invalid(format!("grid spacing must be positive, got {h}")));
        }
        let axes: Vec<Interval> = xi[..dim].iter().chain(&eta[..dim]).copied().collect();
        let mut counts = Vec::with_capacity(axes.len());
        for iv in &axes {
            if !(iv.lo.is_finite() && iv.hi.is_finite()) || iv.hi < iv.lo {
                return Err(invalid(format!("empty or non-finite range [{}, {}]", iv.lo, iv.hi)));
            }
            // tolerate ranges that are not an exact multiple of h
            counts.push(((iv.hi - iv.lo) / h + 1e-9).floor() as usize + 1);
        }
        Ok(GridSpec2 {
            dim,
            xi,
            eta,
            h,
            mode,
            counts,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn mode(&self) -> GridMode {
        self.mode
    }

    pub fn with_mode(mut self, mode: GridMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn xi_range(&self) -> &[Interval] {
        &self.xi[..self.dim]
    }

    pub fn eta_range(&self) -> &[Interval] {
        &self.eta[..self.dim]
    }

    /// Nodes per axis, ξ axes first.
    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    pub fn len(&self) -> usize {
        self.counts.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn axis_coord(&self, axis: usize, i: usize) -> f64 {
        let iv = if axis < self.dim {
            self.xi[axis]
        } else {
            self.eta[axis - self.dim]
        };
        iv.lo + i as f64 * self.h
    }

    /// Row-major node index → `(ξ, η)`; the last axis varies fastest.
    pub fn node(&self, mut index: usize) -> (Vec2, Vec2) {
        let naxes = self.counts.len();
        let mut coords = [0.0; 4];
        for axis in (0..naxes).rev() {
            let c = self.counts[axis];
            coords[axis] = self.axis_coord(axis, index % c);
            index /= c;
        }
        if self.dim == 1 {
            (Vec2::scalar(coords[0]), Vec2::scalar(coords[1]))
        } else {
            (Vec2::new(coords[0], coords[1]), Vec2::new(coords[2], coords[3]))
        }
    }

    /// Plane nodes for the one-dimensional case: `ξ_i`, `η_j`.
    pub(crate) fn plane_node(&self, i: usize, j: usize) -> (f64, f64) {
        (self.axis_coord(0, i), self.axis_coord(1, j))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_and_nodes() {
        let g = GridSpec2::square_1d(2.0, 0.01, GridMode::Curve).unwrap();
        assert_eq!(g.counts(), &[401, 401]);
        let (xi, eta) = g.node(0);
        assert_eq!((xi.x, eta.x), (-2.0, -2.0));
        let (xi, eta) = g.node(g.len() - 1);
        assert!((xi.x - 2.0).abs() < 1e-12 && (eta.x - 2.0).abs() < 1e-12);
        // last axis fastest
        let (xi, eta) = g.node(1);
        assert_eq!(xi.x, -2.0);
        assert!((eta.x + 1.99).abs() < 1e-12);
    }

    #[test]
    fn two_dimensional_layout() {
        let iv = Interval::new(0.0, 1.0);
        let g = GridSpec2::new_2d([iv; 2], [iv; 2], 0.5).unwrap();
        assert_eq!(g.len(), 81);
        let (xi, eta) = g.node(80);
        assert_eq!((xi, eta), (Vec2::new(1.0, 1.0), Vec2::new(1.0, 1.0)));
        let (xi, eta) = g.node(3);
        assert_eq!((xi, eta), (Vec2::ZERO, Vec2::new(0.5, 0.0)));
    }

    #[test]
    fn rejects_bad_specs() {
        assert!(GridSpec2::square_1d(1.0, 0.0, GridMode::Band).is_err());
        assert!(GridSpec2::new_1d(Interval::new(1.0, 0.0), Interval::symmetric(1.0), 0.1, GridMode::Band).is_err());
    }
}
