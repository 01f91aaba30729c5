//! Time stepping of the parabolic semigroup and the Schrödinger group on a
//! [`DiscreteSystem`].
//!
//! The semi-discrete parabolic problem is `Mass u' = -A u`, the Schrödinger
//! problem `Mass u' = -i A u`. Each run factors its step matrix once; when
//! `T` is not a multiple of `dt` a shorter final step gets its own factor.

use nalgebra::LU;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::assembly::{kirchhoff_residual_norm, DiscreteSystem, StateVector};
use crate::error::{Error, Result};
use crate::linalg::max_abs_vec;
use crate::{CMatrix, CVector};

/// Threshold below which a grid value counts as a positivity violation.
pub const POSITIVITY_TOL: f64 = -1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    BackwardEuler,
    CrankNicolson,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Parabolic,
    Schrodinger,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationOptions {
    pub dt: f64,
    pub t_end: f64,
    /// Keep every `stride`-th step; the final state is always kept.
    pub stride: usize,
}

impl SimulationOptions {
    pub fn new(dt: f64, t_end: f64) -> Self {
        Self { dt, t_end, stride: 1 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Observables {
    pub time: f64,
    /// Mass norm.
    pub l2: f64,
    pub linf: f64,
    pub min_real: f64,
    /// Real part of `u* A u`.
    pub energy: f64,
    pub nodal_trace: Vec<Complex64>,
    pub kirchhoff_residual: f64,
}

impl Observables {
    pub fn of(sys: &DiscreteSystem, time: f64, u: &CVector) -> Self {
        let state = StateVector::new(sys.dof.clone(), u.clone()).expect("state length matches system");
        Self {
            time,
            l2: sys.mass_norm(u),
            linf: max_abs_vec(u),
            min_real: u.iter().map(|z| z.re).fold(f64::INFINITY, f64::min),
            energy: sys.energy(u).re,
            nodal_trace: state.nodal_trace().iter().copied().collect(),
            kirchhoff_residual: kirchhoff_residual_norm(&state, sys),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<CVector>,
    pub observables: Vec<Observables>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last_state(&self) -> &CVector {
        self.states.last().expect("trajectory holds the initial state")
    }
}

/// Factored one-step map `u ↦ L⁻¹ R u`.
struct Step {
    lu: LU<Complex64, nalgebra::Dyn, nalgebra::Dyn>,
    rhs: CMatrix,
}

impl Step {
    fn new(sys: &DiscreteSystem, scheme: Scheme, mode: Mode, dt: f64) -> Result<Self> {
        let factor = match mode {
            Mode::Parabolic => Complex64::new(dt, 0.0),
            Mode::Schrodinger => Complex64::new(0.0, dt),
        };
        let (lhs, rhs) = match scheme {
            Scheme::BackwardEuler => (&sys.mass + &sys.a_matrix * factor, sys.mass.clone()),
            Scheme::CrankNicolson => {
                let half = &sys.a_matrix * (factor * 0.5);
                (&sys.mass + &half, &sys.mass - &half)
            }
        };
        let lu = lhs.lu();
        if !lu.is_invertible() {
            return Err(Error::SolverFailure(format!("step matrix is singular for dt = {dt}")));
        }
        Ok(Self { lu, rhs })
    }

    fn apply(&self, u: &CVector) -> Result<CVector> {
        let next = self
            .lu
            .solve(&(&self.rhs * u))
            .ok_or_else(|| Error::SolverFailure("triangular solve failed".into()))?;
        if next.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::SolverFailure("non-finite state".into()));
        }
        Ok(next)
    }
}

/// Step sizes covering `[0, t_end]`: full steps of `dt` and possibly one
/// shorter final step.
fn step_plan(dt: f64, t_end: f64) -> Result<(usize, Option<f64>)> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::InvalidTimeStep(format!("dt must be positive, got {dt}")));
    }
    if !(t_end.is_finite() && t_end >= 0.0) {
        return Err(Error::InvalidTimeStep(format!("T must be nonnegative, got {t_end}")));
    }
    let ratio = t_end / dt;
    let mut full = (ratio + 1e-9).floor() as usize;
    let mut rest = t_end - full as f64 * dt;
    if rest < 0.0 {
        full -= 1;
        rest += dt;
    }
    let partial = (rest > 1e-12 * t_end.max(dt)).then_some(rest);
    Ok((full, partial))
}

fn run(
    sys: &DiscreteSystem,
    u0: &CVector,
    opts: &SimulationOptions,
    scheme: Scheme,
    mode: Mode,
) -> Result<Trajectory> {
    if u0.len() != sys.total_dofs() {
        return Err(Error::DimensionMismatch {
            what: "initial state length",
            expected: sys.total_dofs(),
            found: u0.len(),
        });
    }
    let (full, partial) = step_plan(opts.dt, opts.t_end)?;
    let stride = opts.stride.max(1);
    let mut traj = Trajectory {
        times: vec![0.0],
        states: vec![u0.clone()],
        observables: vec![Observables::of(sys, 0.0, u0)],
    };
    let total = full + usize::from(partial.is_some());
    let mut u = u0.clone();
    if full > 0 {
        let step = Step::new(sys, scheme, mode, opts.dt)?;
        for s in 1..=full {
            u = step.apply(&u)?;
            if s % stride == 0 || s == total {
                let t = s as f64 * opts.dt;
                traj.observables.push(Observables::of(sys, t, &u));
                traj.times.push(t);
                traj.states.push(u.clone());
            }
        }
    }
    if let Some(rest) = partial {
        let step = Step::new(sys, scheme, mode, rest)?;
        u = step.apply(&u)?;
        traj.observables.push(Observables::of(sys, opts.t_end, &u));
        traj.times.push(opts.t_end);
        traj.states.push(u);
    }
    Ok(traj)
}

pub fn simulate_parabolic(
    sys: &DiscreteSystem,
    u0: &StateVector,
    dt: f64,
    t_end: f64,
    scheme: Scheme,
) -> Result<Trajectory> {
    run(sys, &u0.coeffs, &SimulationOptions::new(dt, t_end), scheme, Mode::Parabolic)
}

pub fn simulate_parabolic_with(
    sys: &DiscreteSystem,
    u0: &CVector,
    opts: &SimulationOptions,
    scheme: Scheme,
) -> Result<Trajectory> {
    run(sys, u0, opts, scheme, Mode::Parabolic)
}

/// Cayley (Crank–Nicolson) steps of the Schrödinger group.
pub fn simulate_schrodinger(
    sys: &DiscreteSystem,
    u0: &StateVector,
    dt: f64,
    t_end: f64,
) -> Result<Trajectory> {
    simulate_schrodinger_with(sys, &u0.coeffs, &SimulationOptions::new(dt, t_end))
}

pub fn simulate_schrodinger_with(
    sys: &DiscreteSystem,
    u0: &CVector,
    opts: &SimulationOptions,
) -> Result<Trajectory> {
    if !sys.hermitian {
        return Err(Error::NotSelfAdjoint);
    }
    run(sys, u0, opts, Scheme::CrankNicolson, Mode::Schrodinger)
}

/// State at `t_end` only.
pub fn propagate(
    sys: &DiscreteSystem,
    u0: &CVector,
    dt: f64,
    t_end: f64,
    mode: Mode,
) -> Result<CVector> {
    let opts = SimulationOptions {
        dt,
        t_end,
        stride: usize::MAX,
    };
    let traj = match mode {
        Mode::Parabolic => run(sys, u0, &opts, Scheme::CrankNicolson, mode)?,
        Mode::Schrodinger => simulate_schrodinger_with(sys, u0, &opts)?,
    };
    Ok(traj.last_state().clone())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PositivityReport {
    pub trials: usize,
    pub min_value_seen: f64,
    pub violated: bool,
}

/// Time step for positivity probes, `h² / 2`.
pub fn default_probe_dt(h: f64) -> f64 {
    h * h / 2.0
}

/// Nonnegative random initial data for probe `trial`: uniform values on all
/// unknowns for even trials, uniform values on the interior of one random
/// edge for odd trials.
pub fn probe_initial(sys: &DiscreteSystem, seed: u64, trial: usize) -> CVector {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    let nd = sys.total_dofs();
    if trial.is_multiple_of(2) {
        return CVector::from_fn(nd, |_, _| Complex64::new(rng.random::<f64>(), 0.0));
    }
    let dof = &sys.dof;
    let j = rng.random_range(0..dof.n_edges());
    let mut u = CVector::zeros(nd);
    for k in 1..dof.n_points() - 1 {
        u[dof.dof(j, k)] = Complex64::new(rng.random::<f64>(), 0.0);
    }
    u
}

/// Runs backward Euler from random nonnegative data and records the most
/// negative real grid value over `[0, t_end]`.
pub fn positivity_probe(
    sys: &DiscreteSystem,
    trials: usize,
    dt: f64,
    t_end: f64,
    seed: u64,
) -> Result<PositivityReport> {
    let mut min_value_seen = f64::INFINITY;
    for trial in 0..trials {
        let u0 = probe_initial(sys, seed, trial);
        let traj = simulate_parabolic_with(sys, &u0, &SimulationOptions::new(dt, t_end), Scheme::BackwardEuler)?;
        let lo = traj
            .observables
            .iter()
            .map(|o| o.min_real)
            .fold(f64::INFINITY, f64::min);
        min_value_seen = min_value_seen.min(lo);
    }
    if trials == 0 {
        min_value_seen = 0.0;
    }
    Ok(PositivityReport {
        trials,
        min_value_seen,
        violated: min_value_seen < POSITIVITY_TOL,
    })
}
