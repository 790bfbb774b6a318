use std::fmt;
use std::io::Write;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::grid::Grid;
use crate::error::{invalid, Result};
use crate::resonance::{DistanceField, Interval};
use crate::vec2::Vec2;

type Fn1 = Arc<dyn Fn(Vec2) -> f64 + Send + Sync>;
type Fn2 = Arc<dyn Fn(Vec2, Vec2) -> f64 + Send + Sync>;

#[derive(Clone)]
enum Rule {
    Constant(f64),
    /// `a(η) · b(ξ−η)`.
    Separable { eta: Fn1, rest: Fn1 },
    Closure(Fn2),
    /// Values over lattice pairs of a 1-D grid, `values[ξ_idx * N + η_idx]`
    /// in storage order.
    Table { grid: Grid, values: Arc<Vec<f64>> },
}

/// Real bilinear symbol `m(ξ,η)`, optionally restricted to a box.
#[derive(Clone)]
pub struct Symbol2 {
    rule: Rule,
    support: Option<SupportBox>,
}

/// Closed box in `(ξ,η)`; the symbol is zero outside.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SupportBox {
    pub xi: [Interval; 2],
    pub eta: [Interval; 2],
}

impl SupportBox {
    pub fn contains(&self, xi: Vec2, eta: Vec2) -> bool {
        let inside = |iv: &Interval, v: f64| iv.lo <= v && v <= iv.hi;
        inside(&self.xi[0], xi.x) && inside(&self.xi[1], xi.y) && inside(&self.eta[0], eta.x) && inside(&self.eta[1], eta.y)
    }
}

impl fmt::Debug for Symbol2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rule = match &self.rule {
            Rule::Constant(c) => format!("Constant({c})"),
            Rule::Separable { .. } => "Separable".into(),
            Rule::Closure(_) => "Closure".into(),
            Rule::Table { grid, .. } => format!("Table({} nodes)", grid.n()[0]),
        };
        f.debug_struct("Symbol2").field("rule", &rule).field("support", &self.support).finish()
    }
}

impl Symbol2 {
    pub fn constant(c: f64) -> Self {
        Symbol2 {
            rule: Rule::Constant(c),
            support: None,
        }
    }

    /// `m ≡ 1`, the pointwise product.
    pub fn one() -> Self {
        Self::constant(1.0)
    }

    pub fn from_fn(f: impl Fn(Vec2, Vec2) -> f64 + Send + Sync + 'static) -> Self {
        Symbol2 {
            rule: Rule::Closure(Arc::new(f)),
            support: None,
        }
    }

    /// `m(ξ,η) = a(η)·b(ξ−η)`; such symbols use the transform fast path.
    pub fn separable(
        a: impl Fn(Vec2) -> f64 + Send + Sync + 'static,
        b: impl Fn(Vec2) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Symbol2 {
            rule: Rule::Separable {
                eta: Arc::new(a),
                rest: Arc::new(b),
            },
            support: None,
        }
    }

    /// Table over all lattice pairs of a one-dimensional grid, indexed
    /// `values[ξ_idx * N + η_idx]` by storage index.
    pub fn table(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if grid.dim() != 1 {
            return Err(invalid("tabulated symbols are one-dimensional"));
        }
        if values.len() != grid.len() * grid.len() {
            return Err(invalid("table size must be N²"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(invalid("symbol values must be finite"));
        }
        Ok(Symbol2 {
            rule: Rule::Table {
                grid,
                values: Arc::new(values),
            },
            support: None,
        })
    }

    pub fn with_support(mut self, support: SupportBox) -> Self {
        self.support = Some(support);
        self
    }

    pub fn support(&self) -> Option<&SupportBox> {
        self.support.as_ref()
    }

    pub fn eval(&self, xi: Vec2, eta: Vec2) -> f64 {
        if let Some(b) = &self.support {
            if !b.contains(xi, eta) {
                return 0.0;
            }
        }
        match &self.rule {
            Rule::Constant(c) => *c,
            Rule::Separable { eta: a, rest: b } => a(eta) * b(xi - eta),
            Rule::Closure(f) => f(xi, eta),
            Rule::Table { grid, values } => {
                let locate = |v: Vec2| {
                    let k = (v.x / grid.dk(0)).round();
                    ((v.x - k * grid.dk(0)).abs() <= 1e-9 * grid.dk(0) && v.y == 0.0)
                        .then(|| grid.index_of([k as i64, 0]))
                        .flatten()
                };
                match (locate(xi), locate(eta)) {
                    (Some(i), Some(j)) => values[i * grid.len() + j],
                    _ => 0.0,
                }
            }
        }
    }

    /// The factors `(a, b)` when the symbol is `a(η)·b(ξ−η)` everywhere.
    pub(crate) fn factors(&self) -> Option<(Fn1, Fn1)> {
        if self.support.is_some() {
            return None;
        }
        match &self.rule {
            Rule::Constant(c) => {
                let c = *c;
                Some((Arc::new(move |_| c), Arc::new(|_| 1.0)))
            }
            Rule::Separable { eta, rest } => Some((eta.clone(), rest.clone())),
            _ => None,
        }
    }

    pub fn is_separable(&self) -> bool {
        self.factors().is_some()
    }

    /// `1 − m`.
    pub fn complement(&self) -> Symbol2 {
        let m = self.clone();
        Symbol2::from_fn(move |xi, eta| 1.0 - m.eval(xi, eta))
    }

    /// `m₁ · m₂`.
    pub fn times(&self, other: &Symbol2) -> Symbol2 {
        let (a, b) = (self.clone(), other.clone());
        Symbol2::from_fn(move |xi, eta| a.eval(xi, eta) * b.eval(xi, eta))
    }

    /// Samples the symbol on every lattice pair of a one-dimensional grid.
    pub fn tabulate(&self, grid: &Grid) -> Result<Symbol2> {
        if grid.dim() != 1 {
            return Err(invalid("tabulated symbols are one-dimensional"));
        }
        let n = grid.len();
        let mut values = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                values.push(self.eval(grid.frequency(i), grid.frequency(j)));
            }
        }
        Symbol2::table(*grid, values)
    }

    /// CSV over all lattice pairs: `xi, eta, m` (one dimension) or
    /// `xi_x, xi_y, eta_x, eta_y, m`, in ascending frequency order.
    pub fn write_csv<W: Write>(&self, grid: &Grid, mut w: W) -> std::io::Result<()> {
        let two = grid.dim() == 2;
        writeln!(w, "{}", if two { "xi_x,xi_y,eta_x,eta_y,m" } else { "xi,eta,m" })?;
        let order = grid.ascending();
        for &i in &order {
            let xi = grid.frequency(i);
            for &j in &order {
                let eta = grid.frequency(j);
                let m = self.eval(xi, eta);
                if two {
                    writeln!(w, "{},{},{},{},{}", xi.x, xi.y, eta.x, eta.y, m)?;
                } else {
                    writeln!(w, "{},{},{}", xi.x, eta.x, m)?;
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChiProfile {
    /// 1 on `|r| ≤ 1/2`, 0 on `|r| ≥ 1`, quintic smoothstep between: C².
    #[default]
    QuinticSmoothstep,
}

impl ChiProfile {
    pub fn eval(self, r: f64) -> f64 {
        let r = r.abs();
        match self {
            ChiProfile::QuinticSmoothstep => {
                if r <= 0.5 {
                    1.0
                } else if r >= 1.0 {
                    0.0
                } else {
                    let s = 2.0 * (1.0 - r);
                    s * s * s * (10.0 - 15.0 * s + 6.0 * s * s)
                }
            }
        }
    }
}

/// `χ(t^δ · dist((ξ,η), R))`: one near `R`, zero beyond `t^{−δ}`.
pub fn cutoff_symbol_near_r(dist: &DistanceField, t: f64, delta: f64, chi: ChiProfile) -> Result<Symbol2> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(invalid(format!("cutoff time must be positive, got {t}")));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(invalid(format!("cutoff exponent must lie in (0, 1), got {delta}")));
    }
    let scale = t.powf(delta);
    let dist = dist.clone();
    Ok(Symbol2::from_fn(move |xi, eta| chi.eval(scale * dist.distance(xi, eta))))
}

/// Lattice measure `#{(ξ,η) : m(ξ,η) > 0} · (∏ dk)²` over all pairs of `grid`.
pub fn support_measure(m: &Symbol2, grid: &Grid) -> f64 {
    let n = grid.len();
    let mut count = 0usize;
    for i in 0..n {
        let xi = grid.frequency(i);
        for j in 0..n {
            if m.eval(xi, grid.frequency(j)) > 0.0 {
                count += 1;
            }
        }
    }
    count as f64 * grid.frequency_cell().powi(2)
}
