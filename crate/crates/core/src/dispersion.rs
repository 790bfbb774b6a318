//! Dispersion relations `P(ξ)` and diagonal systems of them.
//!
//! Every builtin relation is radial, so evaluation goes through the radial
//! profile `p(r)` and its derivative; the gradient is `p'(|ξ|) ξ/|ξ|`.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::vec2::Vec2;

/// Exclusion radius assigned to symbols that are not differentiable at the
/// origin. Grid scans additionally mask the node sitting on the singularity.
pub const DEFAULT_EXCLUSION_RADIUS: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DispersionKind {
    Homogeneous,
    Schrodinger,
    Wave,
    HalfWave,
    KleinGordon,
    CustomRadial,
}

/// A real, radial Fourier multiplier.
#[derive(Debug, Clone)]
pub struct DispersionRelation {
    kind: DispersionKind,
    alpha: f64,
    mass: f64,
    dim: usize,
    origin_exclusion_radius: f64,
    table: Option<Arc<MonotoneCubic>>,
}

/// Builds a builtin relation. `alpha` is read only for the homogeneous kind
/// and `mass` only for Klein-Gordon.
pub fn make_dispersion(
    kind: DispersionKind,
    alpha: f64,
    mass: f64,
    dim: usize,
) -> Result<DispersionRelation> {
    check_dim(dim)?;
    let alpha = match kind {
        DispersionKind::Homogeneous => {
            if !(alpha > 0.0 && alpha.is_finite()) {
                return Err(invalid(format!("alpha must be positive, got {alpha}")));
            }
            alpha
        }
        DispersionKind::Schrodinger => 2.0,
        DispersionKind::Wave | DispersionKind::HalfWave => 1.0,
        DispersionKind::KleinGordon => f64::NAN,
        DispersionKind::CustomRadial => {
            return Err(invalid("custom_radial relations are built with DispersionRelation::custom_radial"))
        }
    };
    let mass = if kind == DispersionKind::KleinGordon {
        if !(mass > 0.0 && mass.is_finite()) {
            return Err(invalid(format!("mass must be positive, got {mass}")));
        }
        mass
    } else {
        f64::NAN
    };
    let mut rel = DispersionRelation {
        kind,
        alpha,
        mass,
        dim,
        origin_exclusion_radius: 0.0,
        table: None,
    };
    if rel.singular_at_origin() {
        rel.origin_exclusion_radius = DEFAULT_EXCLUSION_RADIUS;
    }
    Ok(rel)
}

fn check_dim(dim: usize) -> Result<()> {
    if dim == 1 || dim == 2 {
        Ok(())
    } else {
        Err(invalid(format!("dimension must be 1 or 2, got {dim}")))
    }
}

impl DispersionRelation {
    pub fn homogeneous(alpha: f64, dim: usize) -> Result<Self> {
        make_dispersion(DispersionKind::Homogeneous, alpha, 0.0, dim)
    }

    pub fn schrodinger(dim: usize) -> Result<Self> {
        make_dispersion(DispersionKind::Schrodinger, 0.0, 0.0, dim)
    }

    pub fn wave(dim: usize) -> Result<Self> {
        make_dispersion(DispersionKind::Wave, 0.0, 0.0, dim)
    }

    pub fn half_wave(dim: usize) -> Result<Self> {
        make_dispersion(DispersionKind::HalfWave, 0.0, 0.0, dim)
    }

    pub fn klein_gordon(mass: f64, dim: usize) -> Result<Self> {
        make_dispersion(DispersionKind::KleinGordon, 0.0, mass, dim)
    }

    /// A radial relation interpolated from `(r, P(r))` samples with a
    /// monotone (Fritsch-Carlson) cubic. Outside the table the interpolant is
    /// continued linearly with its end slope.
    pub fn custom_radial(samples: &[(f64, f64)], dim: usize) -> Result<Self> {
        check_dim(dim)?;
        let table = MonotoneCubic::new(samples)?;
        Ok(DispersionRelation {
            kind: DispersionKind::CustomRadial,
            alpha: f64::NAN,
            mass: f64::NAN,
            dim,
            origin_exclusion_radius: DEFAULT_EXCLUSION_RADIUS,
            table: Some(Arc::new(table)),
        })
    }

    /// Overrides the radius inside which gradients are refused.
    pub fn with_exclusion_radius(mut self, radius: f64) -> Result<Self> {
        if !(radius >= 0.0 && radius.is_finite()) {
            return Err(invalid(format!("exclusion radius must be >= 0, got {radius}")));
        }
        self.origin_exclusion_radius = radius;
        Ok(self)
    }

    pub fn kind(&self) -> DispersionKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn mass(&self) -> Option<f64> {
        (self.kind == DispersionKind::KleinGordon).then_some(self.mass)
    }

    /// Homogeneity degree, for the kinds that have one.
    pub fn alpha(&self) -> Option<f64> {
        match self.kind {
            DispersionKind::KleinGordon | DispersionKind::CustomRadial => None,
            _ => Some(self.alpha),
        }
    }

    pub fn origin_exclusion_radius(&self) -> f64 {
        self.origin_exclusion_radius
    }

    /// True when `∇P` has no limit at `ξ = 0`.
    pub fn singular_at_origin(&self) -> bool {
        match self.kind {
            DispersionKind::Schrodinger | DispersionKind::KleinGordon => false,
            DispersionKind::Homogeneous => self.alpha <= 1.0,
            DispersionKind::Wave | DispersionKind::HalfWave => true,
            DispersionKind::CustomRadial => true,
        }
    }

    /// Radial profile and its derivative at `r >= 0`.
    pub fn radial(&self, r: f64) -> (f64, f64) {
        match self.kind {
            DispersionKind::Homogeneous => {
                if r == 0.0 {
                    let slope = if self.alpha == 1.0 {
                        1.0
                    } else if self.alpha > 1.0 {
                        0.0
                    } else {
                        f64::INFINITY
                    };
                    (0.0, slope)
                } else {
                    let p = r.powf(self.alpha);
                    (p, self.alpha * p / r)
                }
            }
            DispersionKind::Schrodinger => (r * r, 2.0 * r),
            DispersionKind::Wave | DispersionKind::HalfWave => (r, 1.0),
            DispersionKind::KleinGordon => {
                let p = self.mass.hypot(r);
                (p, r / p)
            }
            DispersionKind::CustomRadial => {
                let table = self.table.as_ref().expect("custom relation carries a table");
                table.eval(r)
            }
        }
    }

    /// `P(ξ)`.
    pub fn value(&self, xi: Vec2) -> f64 {
        match self.kind {
            DispersionKind::Schrodinger => xi.norm_sq(),
            _ => self.radial(xi.norm()).0,
        }
    }

    /// `∇P(ξ)`, refused inside the exclusion ball of a non-smooth symbol.
    pub fn gradient(&self, xi: Vec2) -> Result<Vec2> {
        match self.kind {
            DispersionKind::Schrodinger => return Ok(xi * 2.0),
            DispersionKind::KleinGordon => return Ok(xi * (1.0 / self.mass.hypot(xi.norm()))),
            _ => {}
        }
        let r = xi.norm();
        if self.singular_at_origin() && (r < self.origin_exclusion_radius || r == 0.0) {
            return Err(Error::OriginSingular {
                norm: r,
                radius: self.origin_exclusion_radius,
            });
        }
        if r == 0.0 {
            return Ok(Vec2::ZERO);
        }
        let (_, dp) = self.radial(r);
        Ok(xi * (dp / r))
    }

    pub fn evaluate_jet(&self, xi: Vec2) -> Result<(f64, Vec2)> {
        Ok((self.value(xi), self.gradient(xi)?))
    }
}

/// Same as [`DispersionRelation::evaluate_jet`].
pub fn evaluate_dispersion_jet(rel: &DispersionRelation, xi: Vec2) -> Result<(f64, Vec2)> {
    rel.evaluate_jet(xi)
}

/// `γ(d) = 1/2 + 1/d + sqrt((1/2 + 1/d)^2 + 2/d)`.
pub fn strauss_exponent(d: u32) -> Result<f64> {
    if d < 1 {
        return Err(invalid("Strauss exponent needs d >= 1"));
    }
    let d = f64::from(d);
    let a = 0.5 + 1.0 / d;
    Ok(a + (a * a + 2.0 / d).sqrt())
}

/// Diagonal system `diag(P_1(D), …, P_n(D))`.
#[derive(Debug, Clone)]
pub struct DispersionSystem {
    components: Vec<DispersionRelation>,
}

pub fn make_system(rels: Vec<DispersionRelation>) -> Result<DispersionSystem> {
    DispersionSystem::new(rels)
}

impl DispersionSystem {
    pub fn new(components: Vec<DispersionRelation>) -> Result<Self> {
        let first = components
            .first()
            .ok_or_else(|| invalid("a dispersion system needs at least one component"))?;
        let dim = first.dim();
        if let Some(bad) = components.iter().find(|r| r.dim() != dim) {
            return Err(invalid(format!(
                "mixed dimensions in system: {dim} and {}",
                bad.dim()
            )));
        }
        Ok(DispersionSystem { components })
    }

    pub fn scalar(rel: DispersionRelation) -> Self {
        DispersionSystem {
            components: vec![rel],
        }
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.components[0].dim()
    }

    /// Component `i`, counted from 1.
    pub fn component(&self, i: usize) -> Option<&DispersionRelation> {
        i.checked_sub(1).and_then(|i| self.components.get(i))
    }

    pub fn components(&self) -> &[DispersionRelation] {
        &self.components
    }
}

/// Shape-preserving piecewise cubic Hermite interpolant.
#[derive(Debug, Clone)]
pub struct MonotoneCubic {
    x: Vec<f64>,
    y: Vec<f64>,
    slopes: Vec<f64>,
}

impl MonotoneCubic {
    pub fn new(samples: &[(f64, f64)]) -> Result<Self> {
        if samples.len() < 2 {
            return Err(invalid("radial table needs at least two samples"));
        }
        let (x, y): (Vec<f64>, Vec<f64>) = samples.iter().copied().unzip();
        if x.iter().chain(&y).any(|v| !v.is_finite()) {
            return Err(invalid("radial table contains non-finite values"));
        }
        if x[0] < 0.0 || x.windows(2).any(|w| w[1] <= w[0]) {
            return Err(invalid("radial table abscissae must be >= 0 and strictly increasing"));
        }
        let n = x.len();
        let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
        let delta: Vec<f64> = (0..n - 1).map(|k| (y[k + 1] - y[k]) / h[k]).collect();
        let mut slopes = vec![0.0; n];
        if n == 2 {
            slopes.fill(delta[0]);
        } else {
            for k in 1..n - 1 {
                if delta[k - 1] * delta[k] > 0.0 {
                    let w1 = 2.0 * h[k] + h[k - 1];
                    let w2 = h[k] + 2.0 * h[k - 1];
                    slopes[k] = (w1 + w2) / (w1 / delta[k - 1] + w2 / delta[k]);
                }
            }
            slopes[0] = end_slope(h[0], h[1], delta[0], delta[1]);
            slopes[n - 1] = end_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
        }
        Ok(MonotoneCubic { x, y, slopes })
    }

    /// Value and derivative.
    pub fn eval(&self, t: f64) -> (f64, f64) {
        let n = self.x.len();
        if t <= self.x[0] {
            let d = self.slopes[0];
            return (self.y[0] + d * (t - self.x[0]), d);
        }
        if t >= self.x[n - 1] {
            let d = self.slopes[n - 1];
            return (self.y[n - 1] + d * (t - self.x[n - 1]), d);
        }
        let k = self.x.partition_point(|&v| v <= t) - 1;
        let h = self.x[k + 1] - self.x[k];
        let s = (t - self.x[k]) / h;
        let (y0, y1, d0, d1) = (self.y[k], self.y[k + 1], self.slopes[k], self.slopes[k + 1]);
        let s2 = s * s;
        let s3 = s2 * s;
        let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        let h10 = s3 - 2.0 * s2 + s;
        let h01 = -2.0 * s3 + 3.0 * s2;
        let h11 = s3 - s2;
        let value = h00 * y0 + h10 * h * d0 + h01 * y1 + h11 * h * d1;
        let dh00 = (6.0 * s2 - 6.0 * s) / h;
        let dh10 = 3.0 * s2 - 4.0 * s + 1.0;
        let dh01 = (-6.0 * s2 + 6.0 * s) / h;
        let dh11 = 3.0 * s2 - 2.0 * s;
        let deriv = dh00 * y0 + dh10 * d0 + dh01 * y1 + dh11 * d1;
        (value, deriv)
    }
}

fn end_slope(h0: f64, h1: f64, d0: f64, d1: f64) -> f64 {
    let d = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if d.signum() != d0.signum() {
        0.0
    } else if d0.signum() != d1.signum() && d.abs() > 3.0 * d0.abs() {
        3.0 * d0
    } else {
        d
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rel_err(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    #[test]
    fn builtin_symbols() {
        let p = DispersionRelation::homogeneous(2.0, 1).unwrap();
        assert_eq!(p.value(Vec2::scalar(3.0)), 9.0);
        let kg = DispersionRelation::klein_gordon(1.0, 1).unwrap();
        assert_eq!(kg.value(Vec2::ZERO), 1.0);
        assert!(matches!(
            DispersionRelation::homogeneous(-1.0, 1),
            Err(Error::InvalidParameter(_))
        ));
        assert!(DispersionRelation::klein_gordon(0.0, 1).is_err());
        assert!(DispersionRelation::schrodinger(3).is_err());
    }

    #[test]
    fn jets() {
        let w = DispersionRelation::wave(2).unwrap();
        let (p, g) = w.evaluate_jet(Vec2::new(3.0, 4.0)).unwrap();
        assert_eq!(p, 5.0);
        assert!((g.x - 0.6).abs() < 1e-15 && (g.y - 0.8).abs() < 1e-15);

        let s = DispersionRelation::schrodinger(1).unwrap();
        let (p, g) = s.evaluate_jet(Vec2::scalar(3.0)).unwrap();
        assert_eq!((p, g.x), (9.0, 6.0));

        let half = DispersionRelation::homogeneous(0.5, 1).unwrap();
        assert!(matches!(
            half.gradient(Vec2::ZERO),
            Err(Error::OriginSingular { .. })
        ));
        // the value itself is always available
        assert_eq!(half.value(Vec2::ZERO), 0.0);
    }

    #[test]
    fn smooth_kinds_have_no_exclusion_ball() {
        for rel in [
            DispersionRelation::schrodinger(1).unwrap(),
            DispersionRelation::klein_gordon(2.0, 2).unwrap(),
            DispersionRelation::homogeneous(4.0, 1).unwrap(),
            DispersionRelation::homogeneous(3.0, 1).unwrap(),
        ] {
            assert_eq!(rel.origin_exclusion_radius(), 0.0);
            assert_eq!(rel.gradient(Vec2::ZERO).unwrap(), Vec2::ZERO);
        }
        assert!(DispersionRelation::wave(1).unwrap().origin_exclusion_radius() > 0.0);
    }

    #[test]
    fn strauss_values() {
        assert!((strauss_exponent(3).unwrap() - 2.0).abs() <= 1e-12);
        assert!((strauss_exponent(2).unwrap() - (1.0 + 2f64.sqrt())).abs() <= 1e-12);
        assert!((strauss_exponent(1).unwrap() - (3.0 + 17f64.sqrt()) / 2.0).abs() <= 1e-12);
        assert!(strauss_exponent(0).is_err());
        for d in 1..=10u32 {
            let g = strauss_exponent(d).unwrap();
            let d = f64::from(d);
            assert!((d * g * g - (d + 2.0) * g - 2.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn systems() {
        let s = DispersionRelation::schrodinger(1).unwrap();
        assert_eq!(make_system(vec![s.clone()]).unwrap().len(), 1);
        let sys = make_system(vec![s.clone(), DispersionRelation::wave(1).unwrap()]).unwrap();
        assert_eq!(sys.len(), 2);
        assert_eq!(sys.component(2).unwrap().kind(), DispersionKind::Wave);
        assert!(sys.component(0).is_none());
        assert!(make_system(vec![s, DispersionRelation::wave(2).unwrap()]).is_err());
        assert!(make_system(vec![]).is_err());
    }

    #[test]
    fn custom_radial_reproduces_monotone_data() {
        let samples: Vec<(f64, f64)> = (0..=20).map(|k| {
            let r = k as f64 * 0.25;
            (r, r * r)
        }).collect();
        let rel = DispersionRelation::custom_radial(&samples, 1).unwrap();
        // exact at the knots
        assert!((rel.value(Vec2::scalar(2.0)) - 4.0).abs() < 1e-12);
        // close to r^2 in between
        assert!((rel.value(Vec2::scalar(2.1)) - 4.41).abs() < 1e-2);
        let g = rel.gradient(Vec2::scalar(-2.0)).unwrap();
        assert!((g.x + 4.0).abs() < 0.05);
        assert!(MonotoneCubic::new(&[(1.0, 0.0), (0.5, 1.0)]).is_err());
    }

    #[test]
    fn custom_radial_stays_monotone() {
        let table = MonotoneCubic::new(&[(0.0, 0.0), (1.0, 0.1), (2.0, 0.1), (3.0, 5.0)]).unwrap();
        let mut prev = f64::NEG_INFINITY;
        for k in 0..=300 {
            let (v, d) = table.eval(k as f64 * 0.01);
            assert!(v >= prev - 1e-14);
            assert!(d >= -1e-12);
            prev = v;
        }
    }

    fn finite_diff(rel: &DispersionRelation, xi: Vec2) -> Vec2 {
        let step = 1e-5 * (1.0 + xi.norm());
        let dx = Vec2::new(step, 0.0);
        let dy = Vec2::new(0.0, step);
        let gx = (rel.value(xi + dx) - rel.value(xi - dx)) / (2.0 * step);
        let gy = if rel.dim() == 2 {
            (rel.value(xi + dy) - rel.value(xi - dy)) / (2.0 * step)
        } else {
            0.0
        };
        Vec2::new(gx, gy)
    }

    fn kinds() -> impl Strategy<Value = DispersionRelation> {
        prop_oneof![
            (0.3f64..4.0, 1usize..=2).prop_map(|(a, d)| DispersionRelation::homogeneous(a, d).unwrap()),
            (1usize..=2).prop_map(|d| DispersionRelation::schrodinger(d).unwrap()),
            (1usize..=2).prop_map(|d| DispersionRelation::wave(d).unwrap()),
            (0.2f64..3.0, 1usize..=2).prop_map(|(m, d)| DispersionRelation::klein_gordon(m, d).unwrap()),
        ]
    }

    fn point(dim: usize) -> impl Strategy<Value = Vec2> {
        (0.1f64..10.0, 0.0f64..std::f64::consts::TAU).prop_map(move |(r, th)| {
            if dim == 1 {
                Vec2::scalar(if th < std::f64::consts::PI { r } else { -r })
            } else {
                Vec2::new(r * th.cos(), r * th.sin())
            }
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        #[test]
        fn gradient_matches_central_differences(
            (rel, xi) in kinds().prop_flat_map(|r| { let d = r.dim(); (Just(r), point(d)) })
        ) {
            let g = rel.gradient(xi).unwrap();
            let fd = finite_diff(&rel, xi);
            let err = (g - fd).norm() / g.norm().max(1e-12);
            prop_assert!(err <= 1e-6, "{:?} at {:?}: {} vs {:?}", rel.kind(), xi, err, fd);
        }

        #[test]
        fn homogeneity_and_euler(alpha in 0.3f64..4.0, xi in point(2)) {
            let rel = DispersionRelation::homogeneous(alpha, 2).unwrap();
            let p = rel.value(xi);
            prop_assert!(rel_err(rel.value(xi * 2.0), 2f64.powf(alpha) * p) <= 1e-12);
            let g = rel.gradient(xi).unwrap();
            prop_assert!(rel_err(xi.dot(g), alpha * p) <= 1e-9);
        }

        #[test]
        fn radial_symbols_are_rotation_invariant(rel in kinds(), r in 0.1f64..10.0, a in 0.0f64..6.3, b in 0.0f64..6.3) {
            prop_assume!(rel.dim() == 2);
            let p1 = rel.value(Vec2::new(r * a.cos(), r * a.sin()));
            let p2 = rel.value(Vec2::new(r * b.cos(), r * b.sin()));
            prop_assert!(rel_err(p1, p2) <= 1e-12);
            prop_assert!(p1.is_finite());
        }

        #[test]
        fn strauss_solves_its_quadratic(d in 1u32..=10) {
            let g = strauss_exponent(d).unwrap();
            let d = f64::from(d);
            prop_assert!((d * g * g - (d + 2.0) * g - 2.0).abs() <= 1e-12);
        }
    }
}
