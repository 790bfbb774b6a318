use std::io::Write;

use num_complex::Complex64;

use crate::dispersion::DispersionSystem;
use crate::error::{invalid, Error, Result};
use crate::resonance::{Phase, SignPair};
use crate::spectral::{Field, Grid, Rep, Symbol2};

/// `c · B_m(u_{ε₁,j}, u_{ε₂,k})` added to the equation of component `target`.
#[derive(Debug, Clone)]
pub struct QuadraticTerm {
    /// 1-based component receiving the term.
    pub target: usize,
    pub coeff: Complex64,
    pub signs: SignPair,
    /// 1-based source components `(j, k)`.
    pub sources: (usize, usize),
    pub symbol: Symbol2,
}

impl QuadraticTerm {
    /// `u²`, `ū²`, `uū` or `ūu` on a single component, with `m ≡ 1`, `c = 1`.
    pub fn power(component: usize, signs: SignPair) -> Self {
        QuadraticTerm {
            target: component,
            coeff: Complex64::new(1.0, 0.0),
            signs,
            sources: (component, component),
            symbol: Symbol2::one(),
        }
    }

    pub fn with_coeff(mut self, c: Complex64) -> Self {
        self.coeff = c;
        self
    }

    pub fn with_symbol(mut self, m: Symbol2) -> Self {
        self.symbol = m;
        self
    }

    pub fn with_sources(mut self, j: usize, k: usize) -> Self {
        self.sources = (j, k);
        self
    }
}

/// `i∂ₜu + P(D)u = Σ c B_m(u_{ε₁,j}, u_{ε₂,k})` on a periodic grid.
#[derive(Debug, Clone)]
pub struct EvolutionProblem {
    system: DispersionSystem,
    grid: Grid,
    terms: Vec<QuadraticTerm>,
    dealias: bool,
}

impl EvolutionProblem {
    pub fn new(system: DispersionSystem, grid: Grid) -> Result<Self> {
        if system.dim() != grid.dim() {
            return Err(invalid(format!(
                "system dimension {} does not match grid dimension {}",
                system.dim(),
                grid.dim()
            )));
        }
        Ok(EvolutionProblem {
            system,
            grid,
            terms: Vec::new(),
            dealias: false,
        })
    }

    pub fn with_term(mut self, term: QuadraticTerm) -> Result<Self> {
        let n = self.system.len();
        let (j, k) = term.sources;
        if [term.target, j, k].iter().any(|&c| c == 0 || c > n) {
            return Err(invalid(format!("term indices must lie in 1..={n}")));
        }
        self.terms.push(term);
        Ok(self)
    }

    pub fn with_dealias(mut self, on: bool) -> Self {
        self.dealias = on;
        self
    }

    pub fn system(&self) -> &DispersionSystem {
        &self.system
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn terms(&self) -> &[QuadraticTerm] {
        &self.terms
    }

    pub fn dealias(&self) -> bool {
        self.dealias
    }

    pub fn components(&self) -> usize {
        self.system.len()
    }

    /// The interaction phase of a term.
    pub fn phase(&self, term: &QuadraticTerm) -> Phase {
        Phase::new(self.system.clone(), term.target, term.sources.0, term.sources.1, term.signs)
            .expect("indices validated on insertion")
    }

    /// Frequency coefficients of the initial data, one field per component.
    pub(crate) fn initial_profiles(&self, u0: &[Field]) -> Result<Vec<Field>> {
        if u0.len() != self.components() {
            return Err(invalid(format!(
                "expected {} initial fields, got {}",
                self.components(),
                u0.len()
            )));
        }
        if u0.iter().any(|f| f.grid() != &self.grid) {
            return Err(Error::GridMismatch);
        }
        Ok(u0.iter().map(Field::to_frequency).collect())
    }
}

/// Profiles `f̂_i(s) = e^{−isP_i} û_i(s)` at time `s`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfileState {
    pub time: f64,
    /// One frequency-representation field per component.
    pub profiles: Vec<Field>,
}

impl ProfileState {
    pub fn is_finite(&self) -> bool {
        self.profiles
            .iter()
            .all(|f| f.values().iter().all(|v| v.re.is_finite() && v.im.is_finite()))
    }

    /// Physical solution `u_i(s) = e^{isP_i(D)} f_i(s)`.
    pub fn solution(&self, system: &DispersionSystem) -> Vec<Field> {
        self.profiles
            .iter()
            .zip(system.components())
            .map(|(f, rel)| f.apply_multiplier(|k| Complex64::from_polar(1.0, self.time * rel.value(k))))
            .collect()
    }
}

/// `f̂_−(η) = conj f̂(−η)`, zero where `−η` is off the lattice.
pub fn conjugate_slot(f: &Field) -> Field {
    let f = f.to_frequency();
    let grid = *f.grid();
    let mut out = Field::zeros(grid, Rep::Frequency);
    for (i, slot) in out.values_mut().iter_mut().enumerate() {
        let k = grid.wave_index(i);
        if let Some(j) = grid.index_of([-k[0], -k[1]]) {
            *slot = f.values()[j].conj();
        }
    }
    out
}

/// Profile samples at a uniform output stride.
#[derive(Debug, Clone)]
pub struct Trajectory {
    /// Step actually used by the integrator.
    pub dt: f64,
    pub samples: Vec<ProfileState>,
}

impl Trajectory {
    pub fn last(&self) -> &ProfileState {
        self.samples.last().expect("trajectories hold at least the initial state")
    }

    pub fn times(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.time).collect()
    }

    /// CSV `t, component, k, re, im` (`kx, ky` in two dimensions).
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        let Some(first) = self.samples.first() else {
            return Ok(());
        };
        let grid = *first.profiles[0].grid();
        let two = grid.dim() == 2;
        writeln!(w, "{}", if two { "t,component,kx,ky,re,im" } else { "t,component,k,re,im" })?;
        let order = grid.ascending();
        for s in &self.samples {
            for (c, f) in s.profiles.iter().enumerate() {
                for &i in &order {
                    let k = grid.frequency(i);
                    let v = f.values()[i];
                    if two {
                        writeln!(w, "{},{},{},{},{},{}", s.time, c + 1, k.x, k.y, v.re, v.im)?;
                    } else {
                        writeln!(w, "{},{},{},{},{}", s.time, c + 1, k.x, v.re, v.im)?;
                    }
                }
            }
        }
        Ok(())
    }

    /// CSV `t, component, L2, Linf` of the profiles.
    pub fn write_summary_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "t,component,L2,Linf")?;
        for s in &self.samples {
            for (c, f) in s.profiles.iter().enumerate() {
                writeln!(w, "{},{},{},{}", s.time, c + 1, f.l2_norm(), f.linf_norm())?;
            }
        }
        Ok(())
    }
}
