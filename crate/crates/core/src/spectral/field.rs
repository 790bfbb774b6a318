use std::io::Write;
use std::sync::{Mutex, OnceLock};

use num_complex::Complex64;
use rustfft::{FftDirection, FftPlanner};
use serde::{Deserialize, Serialize};

use super::grid::Grid;
use crate::error::{Error, Result};
use crate::vec2::Vec2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rep {
    Physical,
    Frequency,
}

/// Complex samples on a [`Grid`], either at the physical nodes or as
/// frequency coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    grid: Grid,
    rep: Rep,
    values: Vec<Complex64>,
}

fn planner() -> &'static Mutex<FftPlanner<f64>> {
    static PLANNER: OnceLock<Mutex<FftPlanner<f64>>> = OnceLock::new();
    PLANNER.get_or_init(|| Mutex::new(FftPlanner::new()))
}

/// In-place unnormalized DFT along every axis of `grid`.
fn fft_in_place(grid: &Grid, data: &mut [Complex64], direction: FftDirection) {
    let [n0, n1] = grid.n();
    let mut planner = planner().lock().expect("fft planner lock");
    if grid.dim() == 1 {
        planner.plan_fft(n0, direction).process(data);
        return;
    }
    let rows = planner.plan_fft(n1, direction);
    let cols = planner.plan_fft(n0, direction);
    drop(planner);
    rows.process(data);
    let mut column = vec![Complex64::new(0.0, 0.0); n0];
    for j in 0..n1 {
        for i in 0..n0 {
            column[i] = data[i * n1 + j];
        }
        cols.process(&mut column);
        for i in 0..n0 {
            data[i * n1 + j] = column[i];
        }
    }
}

impl Field {
    pub fn new(grid: Grid, rep: Rep, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch);
        }
        Ok(Field { grid, rep, values })
    }

    pub fn zeros(grid: Grid, rep: Rep) -> Self {
        Field {
            grid,
            rep,
            values: vec![Complex64::new(0.0, 0.0); grid.len()],
        }
    }

    /// Samples `f` at the physical nodes.
    pub fn from_physical(grid: Grid, mut f: impl FnMut(Vec2) -> Complex64) -> Self {
        let values = (0..grid.len()).map(|i| f(grid.position(i))).collect();
        Field {
            grid,
            rep: Rep::Physical,
            values,
        }
    }

    /// Coefficients given as a function of the lattice frequency.
    pub fn from_frequency(grid: Grid, mut f: impl FnMut(Vec2) -> Complex64) -> Self {
        let values = (0..grid.len()).map(|i| f(grid.frequency(i))).collect();
        Field {
            grid,
            rep: Rep::Frequency,
            values,
        }
    }

    /// The plane wave `exp(i k·x)` for integer wave numbers `k`.
    pub fn plane_wave(grid: Grid, k: [i64; 2]) -> Result<Self> {
        let idx = grid
            .index_of(k)
            .ok_or_else(|| crate::error::invalid(format!("wave number {k:?} is off the lattice")))?;
        let mut f = Field::zeros(grid, Rep::Frequency);
        f.values[idx] = Complex64::new(1.0, 0.0);
        Ok(f)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn rep(&self) -> Rep {
        self.rep
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    /// Forward: `û(k) = N^{−d} Σ_j u(x_j) e^{−ik·x_j}`; inverse: the sum
    /// `Σ_k û(k) e^{ik·x_j}`.
    pub fn transform(&self, target: Rep) -> Field {
        if target == self.rep {
            return self.clone();
        }
        let mut values = self.values.clone();
        match target {
            Rep::Frequency => {
                fft_in_place(&self.grid, &mut values, FftDirection::Forward);
                let scale = 1.0 / self.grid.len() as f64;
                values.iter_mut().for_each(|v| *v *= scale);
            }
            Rep::Physical => fft_in_place(&self.grid, &mut values, FftDirection::Inverse),
        }
        Field {
            grid: self.grid,
            rep: target,
            values,
        }
    }

    pub fn to_frequency(&self) -> Field {
        self.transform(Rep::Frequency)
    }

    pub fn to_physical(&self) -> Field {
        self.transform(Rep::Physical)
    }

    /// Discrete `L²` norm normalized so that it agrees in both
    /// representations: `(N^{−d} Σ |u(x_j)|²)^{1/2} = (Σ |û(k)|²)^{1/2}`.
    pub fn l2_norm(&self) -> f64 {
        let s: f64 = self.values.iter().map(|v| v.norm_sqr()).sum();
        match self.rep {
            Rep::Frequency => s.sqrt(),
            Rep::Physical => (s / self.grid.len() as f64).sqrt(),
        }
    }

    pub fn linf_norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// `max |a − b|` over matching samples; both fields in the same rep.
    pub fn max_diff(&self, other: &Field) -> Result<f64> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        let other = other.transform(self.rep);
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    pub fn scale(&self, c: Complex64) -> Field {
        Field {
            values: self.values.iter().map(|v| v * c).collect(),
            ..self.clone()
        }
    }

    pub fn add(&self, other: &Field) -> Result<Field> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        let other = other.transform(self.rep);
        Ok(Field {
            values: self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect(),
            ..self.clone()
        })
    }

    pub fn conj(&self) -> Field {
        Field {
            values: self.values.iter().map(|v| v.conj()).collect(),
            ..self.clone()
        }
    }

    /// Pointwise product in physical space (aliased).
    pub fn pointwise(&self, other: &Field) -> Result<Field> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        let a = self.to_physical();
        let b = other.to_physical();
        Ok(Field {
            grid: self.grid,
            rep: Rep::Physical,
            values: a.values.iter().zip(&b.values).map(|(x, y)| x * y).collect(),
        })
    }

    /// Multiplies each frequency coefficient by `m(k)`.
    pub fn apply_multiplier(&self, m: impl Fn(Vec2) -> Complex64) -> Field {
        let mut f = self.to_frequency();
        for (i, v) in f.values.iter_mut().enumerate() {
            *v *= m(self.grid.frequency(i));
        }
        f
    }

    /// Coefficients re-embedded on `target`, which must share dimension and
    /// period; modes missing from the smaller lattice are zero.
    pub fn resample(&self, target: Grid) -> Result<Field> {
        if target.dim() != self.grid.dim() || target.period() != self.grid.period() {
            return Err(Error::GridMismatch);
        }
        let src = self.to_frequency();
        let mut out = Field::zeros(target, Rep::Frequency);
        for (i, v) in src.values.iter().enumerate() {
            if let Some(j) = target.index_of(self.grid.wave_index(i)) {
                out.values[j] = *v;
            }
        }
        Ok(out)
    }

    /// CSV with columns `x, re, im` or `k, re, im` (`x, y, …` / `kx, ky, …`
    /// in two dimensions), frequencies in ascending order.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        let two = self.grid.dim() == 2;
        match (self.rep, two) {
            (Rep::Physical, false) => writeln!(w, "x,re,im")?,
            (Rep::Physical, true) => writeln!(w, "x,y,re,im")?,
            (Rep::Frequency, false) => writeln!(w, "k,re,im")?,
            (Rep::Frequency, true) => writeln!(w, "kx,ky,re,im")?,
        }
        let order: Vec<usize> = match self.rep {
            Rep::Physical => (0..self.grid.len()).collect(),
            Rep::Frequency => self.grid.ascending(),
        };
        for i in order {
            let p = match self.rep {
                Rep::Physical => self.grid.position(i),
                Rep::Frequency => self.grid.frequency(i),
            };
            let v = self.values[i];
            if two {
                writeln!(w, "{},{},{},{}", p.x, p.y, v.re, v.im)?;
            } else {
                writeln!(w, "{},{},{}", p.x, v.re, v.im)?;
            }
        }
        Ok(())
    }
}

/// Fourier transform of `field` into `target` representation.
pub fn transform(field: &Field, target: Rep) -> Field {
    field.transform(target)
}

/// Zeroes every coefficient with some axis index `|k| > N/3`.
pub fn dealias(field: &Field) -> Field {
    let mut f = field.to_frequency();
    let grid = f.grid;
    let n = grid.n();
    for (i, v) in f.values.iter_mut().enumerate() {
        let k = grid.wave_index(i);
        if (0..grid.dim()).any(|a| 3 * k[a].unsigned_abs() as usize > n[a]) {
            *v = Complex64::new(0.0, 0.0);
        }
    }
    f
}
