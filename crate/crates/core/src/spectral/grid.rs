use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::vec2::Vec2;

/// Periodic grid on the torus `∏ [0, L_a)` with `N_a` nodes per axis.
///
/// Frequency coefficients are stored in FFT order: storage index `j` on an
/// axis holds the wave number `j` for `j < N/2` and `j − N` otherwise, times
/// `2π/L`. Two-dimensional data is row-major with the second axis fastest.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    dim: usize,
    n: [usize; 2],
    period: [f64; 2],
}

impl Grid {
    pub fn new_1d(n: usize, period: f64) -> Result<Self> {
        Self::build(1, [n, 1], [period, 1.0])
    }

    /// Square two-dimensional grid.
    pub fn new_2d(n: usize, period: f64) -> Result<Self> {
        Self::build(2, [n, n], [period, period])
    }

    pub fn new(dim: usize, n: usize, period: f64) -> Result<Self> {
        match dim {
            1 => Self::new_1d(n, period),
            2 => Self::new_2d(n, period),
            _ => Err(invalid(format!("grid dimension must be 1 or 2, got {dim}"))),
        }
    }

    fn build(dim: usize, n: [usize; 2], period: [f64; 2]) -> Result<Self> {
        for a in 0..dim {
            if n[a] < 8 || n[a] % 2 != 0 {
                return Err(invalid(format!("grid size must be even and at least 8, got {}", n[a])));
            }
            if !(period[a] > 0.0 && period[a].is_finite()) {
                return Err(invalid(format!("period must be positive, got {}", period[a])));
            }
        }
        Ok(Grid { dim, n, period })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Nodes per axis (the unused axis of a 1-D grid reports 1).
    pub fn n(&self) -> [usize; 2] {
        self.n
    }

    pub fn period(&self) -> [f64; 2] {
        self.period
    }

    pub fn len(&self) -> usize {
        self.n[0] * self.n[1]
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Lattice spacing `2π/L` along `axis`.
    pub fn dk(&self, axis: usize) -> f64 {
        TAU / self.period[axis]
    }

    /// Physical spacing `L/N` along `axis`.
    pub fn dx(&self, axis: usize) -> f64 {
        self.period[axis] / self.n[axis] as f64
    }

    /// Same node counts in twice the resolution, for zero padding.
    pub fn doubled(&self) -> Grid {
        let mut n = self.n;
        for v in n.iter_mut().take(self.dim) {
            *v *= 2;
        }
        Grid { n, ..*self }
    }

    pub(crate) fn split(&self, idx: usize) -> [usize; 2] {
        [idx / self.n[1], idx % self.n[1]]
    }

    /// Integer wave numbers of the storage index `idx`.
    pub fn wave_index(&self, idx: usize) -> [i64; 2] {
        let s = self.split(idx);
        let mut out = [0i64; 2];
        for a in 0..self.dim {
            out[a] = signed(s[a], self.n[a]);
        }
        out
    }

    /// Storage index of integer wave numbers, if they lie in `[−N/2, N/2)`.
    pub fn index_of(&self, k: [i64; 2]) -> Option<usize> {
        let mut s = [0usize; 2];
        for a in 0..2 {
            if a >= self.dim {
                if k[a] != 0 {
                    return None;
                }
                continue;
            }
            let half = (self.n[a] / 2) as i64;
            if k[a] < -half || k[a] >= half {
                return None;
            }
            s[a] = k[a].rem_euclid(self.n[a] as i64) as usize;
        }
        Some(s[0] * self.n[1] + s[1])
    }

    pub fn frequency(&self, idx: usize) -> Vec2 {
        self.frequency_of(self.wave_index(idx))
    }

    pub fn frequency_of(&self, k: [i64; 2]) -> Vec2 {
        Vec2::new(k[0] as f64 * self.dk(0), k[1] as f64 * self.dk(1))
    }

    pub fn position(&self, idx: usize) -> Vec2 {
        let s = self.split(idx);
        let y = if self.dim == 2 { s[1] as f64 * self.dx(1) } else { 0.0 };
        Vec2::new(s[0] as f64 * self.dx(0), y)
    }

    /// Storage indices ordered by ascending wave number (lexicographic).
    pub fn ascending(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.len()).collect();
        idx.sort_by_key(|&i| self.wave_index(i));
        idx
    }

    /// Volume element `∏ dk` of the frequency lattice.
    pub fn frequency_cell(&self) -> f64 {
        (0..self.dim).map(|a| self.dk(a)).product()
    }
}

fn signed(j: usize, n: usize) -> i64 {
    if j < n / 2 {
        j as i64
    } else {
        j as i64 - n as i64
    }
}
