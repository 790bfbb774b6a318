use num_complex::Complex64;

use super::problem::{conjugate_slot, EvolutionProblem, ProfileState, QuadraticTerm, Trajectory};
use crate::dispersion::DispersionRelation;
use crate::error::{invalid, Error, Result};
use crate::resonance::Sign;
use crate::spectral::{dealias, oscillatory_pseudo_product, Field, Rep};

const MINUS_I: Complex64 = Complex64::new(0.0, -1.0);

/// `e^{itP(D)} u₀`, returned in the representation of `u₀`.
pub fn linear_evolve(rel: &DispersionRelation, u0: &Field, t: f64) -> Field {
    u0.apply_multiplier(|k| Complex64::from_polar(1.0, t * rel.value(k)))
        .transform(u0.rep())
}

/// Slot `f̂_ε` of a profile: itself for `+`, [`conjugate_slot`] for `−`.
pub(crate) fn slot(f: &Field, sign: Sign) -> Field {
    match sign {
        Sign::Plus => f.to_frequency(),
        Sign::Minus => conjugate_slot(f),
    }
}

/// Contribution of one term, `−ic Σ_η m e^{−isφ} f̂_{ε₁,j}(η) f̂_{ε₂,k}(ξ−η)`.
pub(crate) fn term_rhs(problem: &EvolutionProblem, term: &QuadraticTerm, s: f64, profiles: &[Field]) -> Result<Field> {
    let (j, k) = term.sources;
    let f = slot(&profiles[j - 1], term.signs.0);
    let g = slot(&profiles[k - 1], term.signs.1);
    let phase = problem.phase(term);
    Ok(oscillatory_pseudo_product(&term.symbol, &phase, -s, &f, &g)?.scale(MINUS_I * term.coeff))
}

/// `∂ₛf̂_i(s)` for every component.
pub fn profile_rhs(problem: &EvolutionProblem, s: f64, profiles: &[Field]) -> Result<Vec<Field>> {
    let grid = *problem.grid();
    let mut out = vec![Field::zeros(grid, Rep::Frequency); problem.components()];
    for term in problem.terms() {
        let contrib = term_rhs(problem, term, s, profiles)?;
        let slot = &mut out[term.target - 1];
        *slot = slot.add(&contrib)?;
    }
    if problem.dealias() {
        out = out.iter().map(dealias).collect();
    }
    Ok(out)
}

fn axpy(base: &[Field], h: f64, dir: &[Field]) -> Result<Vec<Field>> {
    base.iter()
        .zip(dir)
        .map(|(b, d)| b.add(&d.scale(Complex64::new(h, 0.0))))
        .collect()
}

fn rk4_step(problem: &EvolutionProblem, s: f64, f: &[Field], dt: f64) -> Result<Vec<Field>> {
    let k1 = profile_rhs(problem, s, f)?;
    let k2 = profile_rhs(problem, s + 0.5 * dt, &axpy(f, 0.5 * dt, &k1)?)?;
    let k3 = profile_rhs(problem, s + 0.5 * dt, &axpy(f, 0.5 * dt, &k2)?)?;
    let k4 = profile_rhs(problem, s + dt, &axpy(f, dt, &k3)?)?;
    let mut next = Vec::with_capacity(f.len());
    for c in 0..f.len() {
        let mut v = f[c].values().to_vec();
        for (i, x) in v.iter_mut().enumerate() {
            *x += dt / 6.0 * (k1[c].values()[i] + 2.0 * k2[c].values()[i] + 2.0 * k3[c].values()[i] + k4[c].values()[i]);
        }
        next.push(Field::new(*f[c].grid(), Rep::Frequency, v)?);
    }
    Ok(next)
}

/// RK4 in the profile variables from `s = 0` to `T`, every step recorded.
pub fn evolve_profile(problem: &EvolutionProblem, u0: &[Field], t_end: f64, dt: f64) -> Result<Trajectory> {
    evolve_strided(problem, u0, t_end, dt, 1)
}

/// As [`evolve_profile`], recording every `stride`-th step and the endpoint.
/// The step is shrunk so that it divides `T`.
pub fn evolve_strided(
    problem: &EvolutionProblem,
    u0: &[Field],
    t_end: f64,
    dt: f64,
    stride: usize,
) -> Result<Trajectory> {
    let mut f = problem.initial_profiles(u0)?;
    if problem.dealias() {
        f = f.iter().map(dealias).collect();
    }
    let start = ProfileState { time: 0.0, profiles: f };
    evolve_from(problem, start, t_end, dt, stride)
}

/// RK4 from an arbitrary profile state up to `t_end`.
pub fn evolve_from(
    problem: &EvolutionProblem,
    start: ProfileState,
    t_end: f64,
    dt: f64,
    stride: usize,
) -> Result<Trajectory> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(invalid(format!("time step must be positive, got {dt}")));
    }
    if !(t_end >= start.time && t_end.is_finite()) {
        return Err(invalid(format!("final time {t_end} precedes the start time {}", start.time)));
    }
    if stride == 0 {
        return Err(invalid("output stride must be positive"));
    }
    if start.profiles.len() != problem.components() || start.profiles.iter().any(|f| f.grid() != problem.grid()) {
        return Err(Error::GridMismatch);
    }
    let t0 = start.time;
    let span = t_end - t0;
    let steps = (span / dt).ceil() as usize;
    let h = if steps == 0 { dt } else { span / steps as f64 };
    let mut f: Vec<Field> = start.profiles.iter().map(Field::to_frequency).collect();
    let mut samples = vec![ProfileState {
        time: t0,
        profiles: f.clone(),
    }];
    for n in 0..steps {
        let s = t0 + n as f64 * h;
        f = rk4_step(problem, s, &f, h)?;
        let time = t0 + (n + 1) as f64 * h;
        let state = ProfileState {
            time,
            profiles: f.clone(),
        };
        if !state.is_finite() {
            return Err(Error::SolverDiverged { time });
        }
        if (n + 1) % stride == 0 || n + 1 == steps {
            samples.push(state);
        }
    }
    Ok(Trajectory { dt: h, samples })
}

/// Picard iterates of the integral equation on `[0, t]`, with the time
/// integral taken by fourth-order cumulative quadrature on 64 intervals.
pub fn duhamel_picard_oracle(problem: &EvolutionProblem, u0: &[Field], t: f64, iterations: usize) -> Result<ProfileState> {
    Ok(picard_iterates(problem, u0, t, iterations)?
        .pop()
        .expect("iterate list is never empty"))
}

/// Endpoint states of iterates `0..=iterations`.
pub fn picard_iterates(problem: &EvolutionProblem, u0: &[Field], t: f64, iterations: usize) -> Result<Vec<ProfileState>> {
    const PANELS: usize = 64;
    if !(t >= 0.0 && t.is_finite()) {
        return Err(invalid(format!("oracle time must be non-negative, got {t}")));
    }
    let f0 = problem.initial_profiles(u0)?;
    let h = t / PANELS as f64;
    let nodes: Vec<f64> = (0..=PANELS).map(|m| m as f64 * h).collect();
    // iterate values at every node
    let mut current: Vec<Vec<Field>> = vec![f0.clone(); PANELS + 1];
    let mut out = vec![ProfileState {
        time: t,
        profiles: f0.clone(),
    }];
    for _ in 0..iterations {
        let q: Vec<Vec<Field>> = nodes
            .iter()
            .zip(&current)
            .map(|(&s, f)| profile_rhs(problem, s, f))
            .collect::<Result<_>>()?;
        let mut next = Vec::with_capacity(PANELS + 1);
        for m in 0..=PANELS {
            let w = cumulative_weights(m, h);
            let mut comps = Vec::with_capacity(f0.len());
            for c in 0..f0.len() {
                let mut v = f0[c].values().to_vec();
                for (node, wn) in &w {
                    for (x, y) in v.iter_mut().zip(q[*node][c].values()) {
                        *x += *wn * y;
                    }
                }
                comps.push(Field::new(*f0[c].grid(), Rep::Frequency, v)?);
            }
            next.push(comps);
        }
        current = next;
        out.push(ProfileState {
            time: t,
            profiles: current[PANELS].clone(),
        });
    }
    Ok(out)
}

/// Weights `(node, w)` of a fourth-order rule for `∫₀^{m h}` on equispaced nodes.
fn cumulative_weights(m: usize, h: f64) -> Vec<(usize, f64)> {
    let mut w = vec![0.0; m + 1];
    match m {
        0 => {}
        1 => {
            // cubic through nodes 0..=3 integrated over the first interval
            w = [9.0, 19.0, -5.0, 1.0].iter().map(|c| c * h / 24.0).collect();
        }
        _ => {
            let simpson_end = if m % 2 == 0 { m } else { m - 3 };
            for p in (0..simpson_end).step_by(2) {
                w[p] += h / 3.0;
                w[p + 1] += 4.0 * h / 3.0;
                w[p + 2] += h / 3.0;
            }
            if m % 2 == 1 {
                let b = m - 3;
                for (o, c) in [1.0, 3.0, 3.0, 1.0].iter().enumerate() {
                    w[b + o] += 3.0 * h / 8.0 * c;
                }
            }
        }
    }
    w.into_iter().enumerate().filter(|(_, x)| *x != 0.0).collect()
}
