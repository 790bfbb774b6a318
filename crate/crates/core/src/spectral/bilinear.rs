use num_complex::Complex64;

use super::field::{Field, Rep};
use super::grid::Grid;
use super::symbol::Symbol2;
use crate::error::{invalid, Error, Result};
use crate::resonance::Phase;
use crate::vec2::Vec2;

/// Below this `|φ|` the time integral uses its `φ = 0` value `t`.
pub const PHI_FLOOR: f64 = 1e-10;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// `I(t,φ) = ∫₀ᵗ e^{isφ} ds`.
pub fn oscillation_integral(t: f64, phi: f64) -> Complex64 {
    if phi.abs() <= PHI_FLOOR {
        return Complex64::new(t, 0.0);
    }
    // e^{iθ} − 1 = −2 sin²(θ/2) + i sin θ, without cancellation
    let theta = t * phi;
    let half = (0.5 * theta).sin();
    let num = Complex64::new(-2.0 * half * half, theta.sin());
    num / Complex64::new(0.0, phi)
}

/// Frequency-domain convolution `Σ_η w(ξ,η) f̂(η) ĝ(ξ−η)` over the lattice,
/// dropping pairs whose `ξ−η` leaves it. `η` runs in ascending order.
pub(crate) fn lattice_sum(
    grid: &Grid,
    f: &[Complex64],
    g: &[Complex64],
    weight: impl Fn(Vec2, Vec2) -> Complex64,
) -> Vec<Complex64> {
    let n = grid.len();
    let order = grid.ascending();
    let waves: Vec<[i64; 2]> = (0..n).map(|i| grid.wave_index(i)).collect();
    let freqs: Vec<Vec2> = (0..n).map(|i| grid.frequency(i)).collect();
    let mut out = vec![ZERO; n];
    for (xi_idx, slot) in out.iter_mut().enumerate() {
        let kx = waves[xi_idx];
        let mut acc = ZERO;
        for &e in &order {
            let fe = f[e];
            if fe == ZERO {
                continue;
            }
            let ke = waves[e];
            let Some(z) = grid.index_of([kx[0] - ke[0], kx[1] - ke[1]]) else {
                continue;
            };
            let gz = g[z];
            if gz == ZERO {
                continue;
            }
            acc += weight(freqs[xi_idx], freqs[e]) * fe * gz;
        }
        *slot = acc;
    }
    out
}

/// Non-wrapping product of `a(D)f` and `b(D)g` via zero padding to twice
/// the resolution, multiplied by `c(ξ)` on output.
pub(crate) fn padded_product(
    grid: &Grid,
    f: &[Complex64],
    g: &[Complex64],
    a: impl Fn(Vec2) -> Complex64,
    b: impl Fn(Vec2) -> Complex64,
    c: impl Fn(Vec2) -> Complex64,
) -> Vec<Complex64> {
    let big = grid.doubled();
    let lift = |src: &[Complex64], w: &dyn Fn(Vec2) -> Complex64| {
        let mut out = Field::zeros(big, Rep::Frequency);
        for (i, v) in src.iter().enumerate() {
            if *v != ZERO {
                let j = big.index_of(grid.wave_index(i)).expect("lattice embeds in the padded lattice");
                out.values_mut()[j] = w(grid.frequency(i)) * v;
            }
        }
        out.to_physical()
    };
    let fa = lift(f, &a);
    let gb = lift(g, &b);
    let prod = fa.pointwise(&gb).expect("same padded grid").to_frequency();
    (0..grid.len())
        .map(|i| {
            let j = big.index_of(grid.wave_index(i)).expect("lattice embeds in the padded lattice");
            c(grid.frequency(i)) * prod.values()[j]
        })
        .collect()
}

fn frequency_pair(f: &Field, g: &Field) -> Result<(Grid, Field, Field)> {
    if f.grid() != g.grid() {
        return Err(Error::GridMismatch);
    }
    Ok((*f.grid(), f.to_frequency(), g.to_frequency()))
}

fn check_phase(phase: &Phase, grid: &Grid) -> Result<()> {
    if phase.dim() != grid.dim() {
        return Err(Error::GridMismatch);
    }
    Ok(())
}

fn weight(m: f64, angle: f64) -> Complex64 {
    if angle == 0.0 {
        Complex64::new(m, 0.0)
    } else {
        Complex64::from_polar(m, angle)
    }
}

fn bilinear(
    m: &Symbol2,
    osc: Option<(&Phase, f64)>,
    f: &Field,
    g: &Field,
    allow_fast: bool,
) -> Result<Field> {
    let (grid, f, g) = frequency_pair(f, g)?;
    if let Some((phase, _)) = osc {
        check_phase(phase, &grid)?;
    }
    let values = match (allow_fast, m.factors()) {
        (true, Some((a, b))) => match osc {
            None => padded_product(
                &grid,
                f.values(),
                g.values(),
                |eta| Complex64::new(a(eta), 0.0),
                |z| Complex64::new(b(z), 0.0),
                |_| Complex64::new(1.0, 0.0),
            ),
            Some((phase, s)) => {
                let (p_out, p1, p2) = (phase.out_relation(), phase.first_relation(), phase.second_relation());
                let (e1, e2) = (phase.signs().0.value(), phase.signs().1.value());
                padded_product(
                    &grid,
                    f.values(),
                    g.values(),
                    |eta| weight(a(eta), -s * e1 * p1.value(eta)),
                    |z| weight(b(z), -s * e2 * p2.value(z)),
                    |xi| weight(1.0, s * p_out.value(xi)),
                )
            }
        },
        _ => lattice_sum(&grid, f.values(), g.values(), |xi, eta| {
            let angle = osc.map_or(0.0, |(phase, s)| s * phase.value(xi, eta));
            weight(m.eval(xi, eta), angle)
        }),
    };
    Field::new(grid, Rep::Frequency, values)
}

/// `B̂(ξ) = Σ_η m(ξ,η) f̂(η) ĝ(ξ−η)`; separable symbols go through the
/// zero-padded transform path, everything else is summed directly.
pub fn pseudo_product(m: &Symbol2, f: &Field, g: &Field) -> Result<Field> {
    bilinear(m, None, f, g, true)
}

/// [`pseudo_product`] by direct lattice summation regardless of the symbol.
pub fn pseudo_product_direct(m: &Symbol2, f: &Field, g: &Field) -> Result<Field> {
    bilinear(m, None, f, g, false)
}

/// `Σ_η m(ξ,η) e^{isφ(ξ,η)} f̂(η) ĝ(ξ−η)`.
pub fn oscillatory_pseudo_product(m: &Symbol2, phase: &Phase, s: f64, f: &Field, g: &Field) -> Result<Field> {
    bilinear(m, Some((phase, s)), f, g, true)
}

/// [`oscillatory_pseudo_product`] by direct lattice summation.
pub fn oscillatory_pseudo_product_direct(
    m: &Symbol2,
    phase: &Phase,
    s: f64,
    f: &Field,
    g: &Field,
) -> Result<Field> {
    bilinear(m, Some((phase, s)), f, g, false)
}

/// `Σ_η m(ξ,η) I(t,φ(ξ,η)) f̂(η) ĝ(ξ−η)` for time-independent inputs, with
/// the time integral in closed form.
pub fn time_integrated_oscillatory(m: &Symbol2, phase: &Phase, t: f64, f: &Field, g: &Field) -> Result<Field> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(invalid(format!("integration time must be non-negative, got {t}")));
    }
    let (grid, f, g) = frequency_pair(f, g)?;
    check_phase(phase, &grid)?;
    let values = lattice_sum(&grid, f.values(), g.values(), |xi, eta| {
        m.eval(xi, eta) * oscillation_integral(t, phase.value(xi, eta))
    });
    Field::new(grid, Rep::Frequency, values)
}

/// `∫₀ᵗ Σ_η m e^{isφ} f̂(s,η) ĝ(s,ξ−η) ds` for inputs that depend on `s`, by
/// the composite midpoint rule with step at most `ds`.
pub fn time_integrated_midpoint(
    m: &Symbol2,
    phase: &Phase,
    t: f64,
    ds: f64,
    inputs: impl Fn(f64) -> Result<(Field, Field)>,
) -> Result<Field> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(invalid(format!("integration time must be non-negative, got {t}")));
    }
    if !(ds > 0.0) {
        return Err(invalid(format!("quadrature step must be positive, got {ds}")));
    }
    let steps = (t / ds).ceil().max(1.0) as usize;
    let h = t / steps as f64;
    let mut total: Option<Field> = None;
    for k in 0..steps {
        let s = (k as f64 + 0.5) * h;
        let (f, g) = inputs(s)?;
        let term = oscillatory_pseudo_product(m, phase, s, &f, &g)?.scale(Complex64::new(h, 0.0));
        total = Some(match total {
            None => term,
            Some(acc) => acc.add(&term)?,
        });
    }
    total.ok_or_else(|| invalid("empty quadrature"))
}
