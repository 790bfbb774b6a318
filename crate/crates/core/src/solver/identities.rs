use num_complex::Complex64;

use super::problem::{EvolutionProblem, ProfileState, QuadraticTerm};
use super::stepper::{evolve_from, evolve_strided, profile_rhs, slot};
use crate::dispersion::DispersionRelation;
use crate::error::{invalid, Result};
use crate::spectral::{oscillatory_pseudo_product_direct, Field, Grid, Rep, Symbol2};
use crate::vec2::Vec2;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const MINUS_I: Complex64 = Complex64::new(0.0, -1.0);

/// Pieces of the time integration by parts of the quadratic term restricted
/// by `m_reg`, one field per component.
#[derive(Debug, Clone)]
pub struct NormalFormSplit {
    /// Direct quadrature of `∫₀ᵗ Σ_η m_reg·(−ic m) e^{−isφ} f̂f̂ ds`.
    pub lhs: Vec<Field>,
    pub boundary_t: Vec<Field>,
    pub boundary_0: Vec<Field>,
    pub remainder: Vec<Field>,
    /// `‖lhs − (boundary_t − boundary_0 + remainder)‖ / ‖lhs‖`, zero when `lhs = 0`.
    pub residual: f64,
    /// `(s, ‖boundary(s)‖)` at every quadrature node.
    pub boundary_norms: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, Copy)]
pub struct NormalFormOptions {
    /// `m_reg` must vanish on lattice pairs with `|φ| < phi_min`.
    pub phi_min: f64,
    /// Upper bound on the RK step; the actual step gives an even node count.
    pub dt: f64,
}

/// Pieces of the η summation by parts on `[t₀, t]`, one field per component.
#[derive(Debug, Clone)]
pub struct VectorFieldSplit {
    /// Direct quadrature of `∫_{t₀}^{t} Σ_η m_reg·(−ic m) e^{−isφ} f̂f̂ ds`.
    pub direct: Vec<Field>,
    /// Part carrying the η difference of `f̂(η) f̂(ξ−η)`, weighted `~1/s`.
    pub transformed_term: Vec<Field>,
    /// Part carrying the η difference of the weight.
    pub product_rule_term: Vec<Field>,
    /// `‖direct − (transformed + product rule)‖ / ‖direct‖`, zero when `direct = 0`.
    pub residual: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct VectorFieldOptions {
    /// `m_reg` must vanish on lattice pairs with `|∂ηφ| < g_min`.
    pub g_min: f64,
    pub dt: f64,
}

fn total_norm(fields: &[Field]) -> f64 {
    fields.iter().map(|f| f.l2_norm().powi(2)).sum::<f64>().sqrt()
}

fn zeros(problem: &EvolutionProblem) -> Vec<Field> {
    vec![Field::zeros(*problem.grid(), Rep::Frequency); problem.components()]
}

fn accumulate(acc: &mut [Field], target: usize, term: &Field, w: Complex64) -> Result<()> {
    acc[target - 1] = acc[target - 1].add(&term.scale(w))?;
    Ok(())
}

fn relative_residual(lhs: &[Field], rhs: &[Field]) -> Result<f64> {
    let scale = total_norm(lhs);
    if scale == 0.0 {
        return Ok(0.0);
    }
    let diff: Vec<Field> = lhs
        .iter()
        .zip(rhs)
        .map(|(a, b)| a.add(&b.scale(Complex64::new(-1.0, 0.0))))
        .collect::<Result<_>>()?;
    Ok(total_norm(&diff) / scale)
}

/// Composite Simpson weights on `n + 1` equispaced nodes, `n` even.
fn simpson_weights(n: usize, h: f64) -> Vec<f64> {
    (0..=n)
        .map(|i| {
            let c = if i == 0 || i == n {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            c * h / 3.0
        })
        .collect()
}

fn even_steps(span: f64, dt: f64) -> Result<usize> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(invalid(format!("time step must be positive, got {dt}")));
    }
    let n = (span / dt).ceil().max(2.0) as usize;
    Ok(n + n % 2)
}

fn lattice_pairs(grid: &Grid) -> impl Iterator<Item = (Vec2, Vec2)> + '_ {
    let n = grid.len();
    (0..n).flat_map(move |i| {
        let ki = grid.wave_index(i);
        (0..n).filter_map(move |j| {
            let kj = grid.wave_index(j);
            grid.index_of([ki[0] - kj[0], ki[1] - kj[1]])
                .map(|_| (grid.frequency(i), grid.frequency(j)))
        })
    })
}

/// Integration by parts in time of the quadratic term restricted to `m_reg`,
/// with `e^{−isφ} = ∂ₛe^{−isφ} / (−iφ)`; both product-rule terms of
/// `∂ₛ(f̂f̂)` enter the remainder, evaluated through the equation.
pub fn normal_form_split(
    problem: &EvolutionProblem,
    u0: &[Field],
    t: f64,
    m_reg: &Symbol2,
    opts: NormalFormOptions,
) -> Result<NormalFormSplit> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(invalid(format!("integration time must be positive, got {t}")));
    }
    if !(opts.phi_min > 0.0) {
        return Err(invalid("phi_min must be positive"));
    }
    let grid = *problem.grid();
    for term in problem.terms() {
        let phase = problem.phase(term);
        if let Some((xi, eta)) = lattice_pairs(&grid)
            .find(|&(xi, eta)| m_reg.eval(xi, eta) != 0.0 && phase.value(xi, eta).abs() < opts.phi_min)
        {
            return Err(invalid(format!(
                "region symbol is nonzero at (ξ, η) = ({:?}, {:?}) where |φ| < {}",
                xi, eta, opts.phi_min
            )));
        }
    }
    let steps = even_steps(t, opts.dt)?;
    let traj = evolve_strided(problem, u0, t, t / steps as f64, 1)?;
    let weights = simpson_weights(steps, traj.dt);

    let per_term: Vec<(&QuadraticTerm, Symbol2, Symbol2)> = problem
        .terms()
        .iter()
        .map(|term| {
            let phase = problem.phase(term);
            let (m, reg) = (term.symbol.clone(), m_reg.clone());
            let restricted = reg.times(&m);
            let divided = Symbol2::from_fn(move |xi, eta| {
                let r = reg.eval(xi, eta);
                if r == 0.0 {
                    0.0
                } else {
                    r * m.eval(xi, eta) / phase.value(xi, eta)
                }
            });
            (term, restricted, divided)
        })
        .collect();

    let boundary_at = |state: &ProfileState| -> Result<Vec<Field>> {
        let mut out = zeros(problem);
        for (term, _, divided) in &per_term {
            let phase = problem.phase(term);
            let (j, k) = term.sources;
            let f = slot(&state.profiles[j - 1], term.signs.0);
            let g = slot(&state.profiles[k - 1], term.signs.1);
            let b = oscillatory_pseudo_product_direct(divided, &phase, -state.time, &f, &g)?;
            accumulate(&mut out, term.target, &b, term.coeff)?;
        }
        Ok(out)
    };

    let mut lhs = zeros(problem);
    let mut remainder = zeros(problem);
    let mut boundary_norms = Vec::with_capacity(traj.samples.len());
    for (state, &w) in traj.samples.iter().zip(&weights) {
        let s = state.time;
        let deriv = profile_rhs(problem, s, &state.profiles)?;
        for (term, restricted, divided) in &per_term {
            let phase = problem.phase(term);
            let (j, k) = term.sources;
            let f = slot(&state.profiles[j - 1], term.signs.0);
            let g = slot(&state.profiles[k - 1], term.signs.1);
            let df = slot(&deriv[j - 1], term.signs.0);
            let dg = slot(&deriv[k - 1], term.signs.1);
            let direct = oscillatory_pseudo_product_direct(restricted, &phase, -s, &f, &g)?;
            accumulate(&mut lhs, term.target, &direct, MINUS_I * term.coeff * w)?;
            let r1 = oscillatory_pseudo_product_direct(divided, &phase, -s, &df, &g)?;
            let r2 = oscillatory_pseudo_product_direct(divided, &phase, -s, &f, &dg)?;
            accumulate(&mut remainder, term.target, &r1.add(&r2)?, -term.coeff * w)?;
        }
        boundary_norms.push((s, total_norm(&boundary_at(state)?)));
    }
    let boundary_t = boundary_at(traj.last())?;
    let boundary_0 = boundary_at(&traj.samples[0])?;
    let rhs: Vec<Field> = (0..problem.components())
        .map(|c| boundary_t[c].add(&boundary_0[c].scale(Complex64::new(-1.0, 0.0)))?.add(&remainder[c]))
        .collect::<Result<_>>()?;
    let residual = relative_residual(&lhs, &rhs)?;
    Ok(NormalFormSplit {
        lhs,
        boundary_t,
        boundary_0,
        remainder,
        residual,
        boundary_norms,
    })
}

/// Summation by parts on a one-dimensional lattice for one term at time `s`.
struct SbpTerm<'a> {
    grid: Grid,
    f: &'a [Complex64],
    g: &'a [Complex64],
}

#[derive(Default)]
struct SbpParts {
    direct: Vec<Complex64>,
    transformed: Vec<Complex64>,
    product_rule: Vec<Complex64>,
    /// `Σ |A(η−Δ)·D₋H(η)|²` over all pairs.
    transformed_sq: f64,
}

impl SbpTerm<'_> {
    fn run(
        &self,
        problem: &EvolutionProblem,
        term: &QuadraticTerm,
        m_reg: &Symbol2,
        g_min: f64,
        s: f64,
    ) -> Result<SbpParts> {
        let grid = self.grid;
        let n = grid.n()[0] as i64;
        let dk = grid.dk(0);
        let phase = problem.phase(term);
        let weight = MINUS_I * term.coeff;
        let at = |k: i64| grid.index_of([k, 0]);
        let freq = |k: i64| Vec2::scalar(k as f64 * dk);
        let mut parts = SbpParts {
            direct: vec![ZERO; grid.len()],
            transformed: vec![ZERO; grid.len()],
            product_rule: vec![ZERO; grid.len()],
            transformed_sq: 0.0,
        };
        for xi_idx in 0..grid.len() {
            let kx = grid.wave_index(xi_idx)[0];
            let xi = freq(kx);
            // A(η) = a(η)·w(η) and H(η) on η ∈ [−N/2, N/2], zero at the top
            let mut a_vals = vec![ZERO; (n + 1) as usize];
            let mut h_vals = vec![ZERO; (n + 1) as usize];
            for (slot, ke) in (-n / 2..n / 2).enumerate() {
                let eta = freq(ke);
                let h = match (at(ke), at(kx - ke)) {
                    (Some(e), Some(z)) => self.f[e] * self.g[z],
                    _ => ZERO,
                };
                h_vals[slot] = h;
                let m = m_reg.eval(xi, eta) * term.symbol.eval(xi, eta);
                if m == 0.0 {
                    continue;
                }
                let grad = phase.grad_eta(xi, eta)?;
                if grad.norm() < g_min {
                    return Err(invalid(format!(
                        "region symbol is nonzero at (ξ, η) = ({}, {}) where |∂ηφ| < {g_min}",
                        xi.x, eta.x
                    )));
                }
                let dphi = phase.value(xi, freq(ke + 1)) - phase.value(xi, eta);
                let denom = Complex64::from_polar(1.0, -s * dphi) - 1.0;
                if denom.norm() < 1e-12 {
                    return Err(invalid(format!("summation weight is singular at s = {s}, ξ = {}", xi.x)));
                }
                a_vals[slot] = weight * m / denom;
                parts.direct[xi_idx] += weight * m * Complex64::from_polar(1.0, -s * phase.value(xi, eta)) * h;
            }
            let mut tr = ZERO;
            let mut pr = ZERO;
            for slot in 0..=(n as usize) {
                let ke = slot as i64 - n / 2;
                let e = Complex64::from_polar(1.0, -s * phase.value(xi, freq(ke)));
                let (a_prev, h_prev) = if slot == 0 { (ZERO, ZERO) } else { (a_vals[slot - 1], h_vals[slot - 1]) };
                let piece = a_prev * (h_vals[slot] - h_prev);
                parts.transformed_sq += piece.norm_sqr();
                tr -= e * piece;
                pr -= e * h_vals[slot] * (a_vals[slot] - a_prev);
            }
            parts.transformed[xi_idx] = tr;
            parts.product_rule[xi_idx] = pr;
        }
        Ok(parts)
    }
}

fn check_vector_field(problem: &EvolutionProblem) -> Result<()> {
    if problem.grid().dim() != 1 {
        return Err(invalid("the summation by parts in η is implemented in one dimension"));
    }
    Ok(())
}

fn sbp_all(
    problem: &EvolutionProblem,
    state: &ProfileState,
    m_reg: &Symbol2,
    g_min: f64,
) -> Result<Vec<(usize, SbpParts)>> {
    let grid = *problem.grid();
    problem
        .terms()
        .iter()
        .map(|term| {
            let (j, k) = term.sources;
            let f = slot(&state.profiles[j - 1], term.signs.0);
            let g = slot(&state.profiles[k - 1], term.signs.1);
            let parts = SbpTerm {
                grid,
                f: f.values(),
                g: g.values(),
            }
            .run(problem, term, m_reg, g_min, state.time)?;
            Ok((term.target, parts))
        })
        .collect()
}

/// Integration by parts in η of the restricted quadratic term over `[t₀, t]`,
/// through the exact discrete identity
/// `e^{−isφ(η)} = a(η)·(e^{−isφ(η+Δ)} − e^{−isφ(η)})`, `a = 1/(e^{−isδφ} − 1)`,
/// and summation by parts on the lattice.
pub fn vector_field_split(
    problem: &EvolutionProblem,
    u0: &[Field],
    t0: f64,
    t: f64,
    m_reg: &Symbol2,
    opts: VectorFieldOptions,
) -> Result<VectorFieldSplit> {
    check_vector_field(problem)?;
    if !(t0 > 0.0 && t > t0 && t.is_finite()) {
        return Err(invalid(format!("need 0 < t0 < t, got t0 = {t0}, t = {t}")));
    }
    if !(opts.g_min > 0.0) {
        return Err(invalid("g_min must be positive"));
    }
    let head = evolve_strided(problem, u0, t0, opts.dt, usize::MAX)?;
    let steps = even_steps(t - t0, opts.dt)?;
    let start = head.last().clone();
    let start = ProfileState {
        time: t0,
        profiles: start.profiles,
    };
    let traj = evolve_from(problem, start, t, (t - t0) / steps as f64, 1)?;
    let weights = simpson_weights(steps, traj.dt);
    let grid = *problem.grid();
    let mut acc = [zeros(problem), zeros(problem), zeros(problem)];
    for (state, &w) in traj.samples.iter().zip(&weights) {
        for (target, parts) in sbp_all(problem, state, m_reg, opts.g_min)? {
            for (slot, values) in acc.iter_mut().zip([parts.direct, parts.transformed, parts.product_rule]) {
                let f = Field::new(grid, Rep::Frequency, values)?;
                accumulate(slot, target, &f, Complex64::new(w, 0.0))?;
            }
        }
    }
    let [direct, transformed_term, product_rule_term] = acc;
    let rhs: Vec<Field> = transformed_term
        .iter()
        .zip(&product_rule_term)
        .map(|(a, b)| a.add(b))
        .collect::<Result<_>>()?;
    let residual = relative_residual(&direct, &rhs)?;
    Ok(VectorFieldSplit {
        direct,
        transformed_term,
        product_rule_term,
        residual,
    })
}

/// `ℓ²` norm over lattice pairs of the summand of the transformed term at
/// time `s`, for the given (frozen) profiles.
pub fn transformed_integrand_norm(
    problem: &EvolutionProblem,
    profiles: &[Field],
    m_reg: &Symbol2,
    g_min: f64,
    s: f64,
) -> Result<f64> {
    check_vector_field(problem)?;
    let state = ProfileState {
        time: s,
        profiles: profiles.iter().map(Field::to_frequency).collect(),
    };
    Ok(sbp_all(problem, &state, m_reg, g_min)?
        .iter()
        .map(|(_, p)| p.transformed_sq)
        .sum::<f64>()
        .sqrt())
}

/// `e^{itP(D)} F⁻¹ ∂_ξ (e^{−itP(ξ)} û(ξ))` on a one-dimensional grid, with a
/// centered difference in `ξ` (one-sided at the two end modes).
///
/// With the forward transform `û(k) = N⁻¹ Σ u(x) e^{−ikx}`, the result is
/// `−i (x̃ + t P′(D)) u` for band-limited `u`, `x̃ = (L/2π) sin(2πx/L)`
/// standing in for `x` on the torus.
pub fn weighted_profile_derivative(rel: &DispersionRelation, u: &Field, t: f64) -> Result<Field> {
    let grid = *u.grid();
    if grid.dim() != 1 {
        return Err(invalid("the weighted derivative is implemented in one dimension"));
    }
    let profile = u.apply_multiplier(|k| Complex64::from_polar(1.0, -t * rel.value(k)));
    let n = grid.n()[0] as i64;
    let dk = grid.dk(0);
    let value = |k: i64| profile.values()[grid.index_of([k, 0]).expect("index in range")];
    let mut out = Field::zeros(grid, Rep::Frequency);
    for (i, slot) in out.values_mut().iter_mut().enumerate() {
        let k = grid.wave_index(i)[0];
        *slot = if k == -n / 2 {
            (value(k + 1) - value(k)) / dk
        } else if k == n / 2 - 1 {
            (value(k) - value(k - 1)) / dk
        } else {
            (value(k + 1) - value(k - 1)) / (2.0 * dk)
        };
    }
    Ok(out
        .apply_multiplier(|k| Complex64::from_polar(1.0, t * rel.value(k)))
        .to_physical())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dispersion::DispersionSystem;
    use crate::fit::log_log_slope;
    use crate::resonance::SignPair;
    use crate::solver::linear_evolve;
    use std::f64::consts::TAU;

    fn problem(grid: Grid) -> EvolutionProblem {
        let sys = DispersionSystem::scalar(DispersionRelation::schrodinger(1).unwrap());
        EvolutionProblem::new(sys, grid)
            .unwrap()
            .with_term(QuadraticTerm::power(1, SignPair::PP))
            .unwrap()
    }

    /// Smooth low-frequency data with coefficients on `|k| ≤ kmax` lattice steps.
    fn data(grid: Grid, kmax: i64, size: f64) -> Field {
        let f = Field::from_frequency(grid, |k| {
            let j = (k.x / grid.dk(0)).round() as i64;
            if j.abs() <= kmax {
                Complex64::new(1.0 + 0.3 * j as f64, 0.5 - 0.2 * (j * j) as f64)
            } else {
                ZERO
            }
        });
        let norm = f.l2_norm();
        f.scale(Complex64::new(size / norm, 0.0))
    }

    fn phase_cut(p: &EvolutionProblem, phi_min: f64) -> Symbol2 {
        let phase = p.phase(&p.terms()[0]);
        Symbol2::from_fn(move |xi, eta| if phase.value(xi, eta).abs() >= phi_min { 1.0 } else { 0.0 })
    }

    fn gradient_cut(p: &EvolutionProblem, g_min: f64) -> Symbol2 {
        let phase = p.phase(&p.terms()[0]);
        Symbol2::from_fn(move |xi, eta| match phase.grad_eta(xi, eta) {
            Ok(g) if g.norm() >= g_min => 1.0,
            _ => 0.0,
        })
    }

    #[test]
    fn normal_form_identity_and_scaling() {
        let g = Grid::new_1d(16, TAU).unwrap();
        let p = problem(g);
        let m_reg = phase_cut(&p, 0.5);
        let opts = NormalFormOptions { phi_min: 0.5, dt: 1.0 / 1024.0 };
        let base = data(g, 2, 1e-2);
        let mut rem = Vec::new();
        let mut bnd = Vec::new();
        let lambdas = [1.0, 0.5, 0.25];
        for lambda in lambdas {
            let u0 = base.scale(Complex64::new(lambda, 0.0));
            let split = normal_form_split(&p, &[u0], 1.0, &m_reg, opts).unwrap();
            assert!(split.residual <= 1e-6, "residual {}", split.residual);
            rem.push(total_norm(&split.remainder));
            bnd.push(total_norm(&split.boundary_t));
            let norms: Vec<f64> = split.boundary_norms.iter().map(|b| b.1).collect();
            let (lo, hi) = norms.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &v| (a.min(v), b.max(v)));
            assert!(hi / lo <= 10.0);
        }
        let rem_exp = log_log_slope(&lambdas, &rem).unwrap();
        let bnd_exp = log_log_slope(&lambdas, &bnd).unwrap();
        assert!((rem_exp - 3.0).abs() <= 0.1, "{rem_exp}");
        assert!((bnd_exp - 2.0).abs() <= 0.1, "{bnd_exp}");
    }

    #[test]
    fn normal_form_rejects_resonant_support() {
        let g = Grid::new_1d(16, TAU).unwrap();
        let p = problem(g);
        let opts = NormalFormOptions { phi_min: 0.5, dt: 0.01 };
        let err = normal_form_split(&p, &[data(g, 2, 1e-2)], 1.0, &Symbol2::one(), opts);
        assert!(err.is_err());
    }

    #[test]
    fn zero_data_gives_zero_splits() {
        let g = Grid::new_1d(16, TAU).unwrap();
        let p = problem(g);
        let z = Field::zeros(g, Rep::Frequency);
        let nf = normal_form_split(&p, &[z.clone()], 1.0, &phase_cut(&p, 0.5), NormalFormOptions { phi_min: 0.5, dt: 0.1 })
            .unwrap();
        for f in nf.lhs.iter().chain(&nf.boundary_t).chain(&nf.boundary_0).chain(&nf.remainder) {
            assert_eq!(f.linf_norm(), 0.0);
        }
        assert_eq!(nf.residual, 0.0);
        let (g, p) = (wide_grid(), problem(wide_grid()));
        let z = Field::zeros(g, Rep::Frequency);
        let vf = vector_field_split(&p, &[z], 1.0, 2.0, &gradient_cut(&p, 0.5), VectorFieldOptions { g_min: 0.5, dt: 0.1 })
            .unwrap();
        assert_eq!(total_norm(&vf.direct) + total_norm(&vf.transformed_term), 0.0);
    }

    fn wide_grid() -> Grid {
        Grid::new_1d(128, TAU * 32.0).unwrap()
    }

    #[test]
    fn summation_by_parts_is_exact() {
        let g = wide_grid();
        let p = problem(g);
        let m_reg = gradient_cut(&p, 0.5);
        let u0 = data(g, 16, 1e-2);
        let split = vector_field_split(&p, &[u0], 1.0, 2.0, &m_reg, VectorFieldOptions { g_min: 0.5, dt: 1.0 / 32.0 }).unwrap();
        assert!(total_norm(&split.direct) > 0.0);
        assert!(split.residual <= 1e-6, "{}", split.residual);
    }

    #[test]
    fn transformed_integrand_halves() {
        let g = wide_grid();
        let p = problem(g);
        let m_reg = gradient_cut(&p, 0.5);
        let f = [data(g, 16, 1e-2)];
        let a = transformed_integrand_norm(&p, &f, &m_reg, 0.5, 2.0).unwrap();
        let b = transformed_integrand_norm(&p, &f, &m_reg, 0.5, 4.0).unwrap();
        assert!((b / a - 0.5).abs() <= 0.1, "{}", b / a);
    }

    #[test]
    fn vector_field_preconditions() {
        let g = wide_grid();
        let p = problem(g);
        let u0 = [data(g, 4, 1e-2)];
        let opts = VectorFieldOptions { g_min: 0.5, dt: 0.1 };
        assert!(vector_field_split(&p, &u0, 0.0, 1.0, &gradient_cut(&p, 0.5), opts).is_err());
        assert!(vector_field_split(&p, &u0, 1.0, 2.0, &Symbol2::one(), opts).is_err());
    }

    #[test]
    fn weighted_derivative_at_zero_time_is_position_weight() {
        let g = Grid::new_1d(64, TAU).unwrap();
        let rel = DispersionRelation::schrodinger(1).unwrap();
        let u = data(g, 10, 1.0).to_physical();
        let got = weighted_profile_derivative(&rel, &u, 0.0).unwrap();
        let period = g.period()[0];
        let expect = Field::from_physical(g, |x| {
            let idx = ((x.x / g.dx(0)).round() as usize) % 64;
            Complex64::new(0.0, -1.0) * (period / TAU) * (TAU * x.x / period).sin() * u.values()[idx]
        });
        assert!(got.max_diff(&expect).unwrap() < 1e-12);
    }

    #[test]
    fn weighted_derivative_commutes_with_the_flow() {
        let g = Grid::new_1d(64, TAU).unwrap();
        let rel = DispersionRelation::schrodinger(1).unwrap();
        let u0 = data(g, 10, 1.0).to_physical();
        for t in [0.3, 2.0, 17.0] {
            let lhs = weighted_profile_derivative(&rel, &linear_evolve(&rel, &u0, t), t).unwrap();
            let rhs = linear_evolve(&rel, &weighted_profile_derivative(&rel, &u0, 0.0).unwrap(), t);
            assert!(lhs.max_diff(&rhs).unwrap() < 1e-10);
        }
    }

    #[test]
    fn weighted_derivative_grows_with_group_velocity() {
        // packet at ξ₀ = 2 on a wide torus: ‖J u₀‖ ≈ |P′(ξ₀)| t ‖u₀‖ for t ≫ width
        let period = TAU * 128.0;
        let g = Grid::new_1d(2048, period).unwrap();
        let rel = DispersionRelation::schrodinger(1).unwrap();
        let width = 3.0;
        let u0 = Field::from_physical(g, |x| {
            let y = if x.x > period / 2.0 { x.x - period } else { x.x };
            Complex64::from_polar((-(y * y) / (2.0 * width * width)).exp(), 2.0 * y)
        });
        let norm = |t: f64| weighted_profile_derivative(&rel, &u0, t).unwrap().l2_norm();
        let slope = (norm(5.0) - norm(4.0)) / 1.0;
        let expect = 4.0 * u0.l2_norm();
        assert!((slope / expect - 1.0).abs() <= 0.05, "{slope} vs {expect}");
    }
}
