//! The four commands. Each returns a report value; files other than
//! `report.json` are written here.

use std::f64::consts::PI;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;
use std::sync::Arc;
use std::time::Instant;

use netflowsym_core::assembly::{assemble, build_dof_map, interpolate, DiscreteSystem, StateVector};
use netflowsym_core::coupling::classify_semigroup;
use netflowsym_core::evolution::{
    default_probe_dt, positivity_probe, simulate_parabolic_with, simulate_schrodinger_with, Mode, Observables,
    PositivityReport, SimulationOptions, Trajectory,
};
use netflowsym_core::io::{format_g17, to_json_g17, write_trajectory_csv, GraphFile};
use netflowsym_core::symmetry::{full_report, report_for_system, RandomEdgeFunction};
use netflowsym_core::{Complex64, CouplingField, GraphClass, NodeMatrix, SymmetryReport, WellPosednessReport};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::bundle::{Bundle, Discretization, Initial};
use crate::failure::Failure;

#[derive(Debug, Clone, Serialize)]
pub struct Timing {
    pub label: String,
    pub seconds: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ProjectionResult {
    pub name: String,
    pub expect_invariant: Option<bool>,
    /// `None` when nothing was asserted.
    pub assertion_holds: Option<bool>,
    pub report: SymmetryReport,
}

#[derive(Debug, Clone, Serialize)]
pub struct OraclePoint {
    pub time: f64,
    pub max_error: f64,
    pub tolerance: f64,
    pub within_tolerance: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunResult {
    pub index: usize,
    pub mode: Mode,
    pub initial: String,
    pub trajectory_file: String,
    pub observables_file: String,
    pub oracle_file: Option<String>,
    pub n_snapshots: usize,
    pub final_observables: Observables,
    /// Heat kernel comparison on a single edge with constant scalar `C`
    /// and zero `M`.
    pub oracle: Option<Vec<OraclePoint>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub command: &'static str,
    pub bundle: String,
    pub seed: u64,
    pub graph: GraphFile,
    pub graph_class: GraphClass,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wellposedness: Option<WellPosednessReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub positivity: Option<PositivityReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub symmetry: Option<Vec<ProjectionResult>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub simulation: Option<Vec<RunResult>>,
    pub status: &'static str,
    /// Wall-clock timings; the only nondeterministic part of the report.
    pub timings: Vec<Timing>,
}

impl Report {
    fn new(command: &'static str, b: &Bundle) -> Self {
        Self {
            command,
            bundle: b.name.clone(),
            seed: b.seed,
            graph: GraphFile::of(&b.graph),
            graph_class: b.graph.classify(),
            wellposedness: None,
            positivity: None,
            symmetry: None,
            simulation: None,
            status: "ok",
            timings: Vec::new(),
        }
    }

    fn timed<T>(&mut self, label: &str, f: impl FnOnce() -> T) -> T {
        let start = Instant::now();
        let out = f();
        self.timings.push(Timing {
            label: label.to_string(),
            seconds: start.elapsed().as_secs_f64(),
        });
        out
    }
}

fn coefficients(b: &Bundle) -> (CouplingField, NodeMatrix) {
    let c = b.c.clone().unwrap_or_else(|| CouplingField::identity(b.graph.n_edges()));
    let m = b.m.clone().unwrap_or_else(|| NodeMatrix::zeros(b.graph.n_nodes()));
    (c, m)
}

pub fn classify(b: &Bundle) -> Result<(Report, Option<Failure>), Failure> {
    let mut r = Report::new("classify", b);
    r.timed("classify", || ());
    Ok((r, None))
}

pub fn wellposed(b: &Bundle) -> Result<(Report, Option<Failure>), Failure> {
    let (Some(c), Some(m)) = (&b.c, &b.m) else {
        return Err(Failure::Input("wellposed needs both \"C\" and \"M\"".into()));
    };
    let mut r = Report::new("wellposed", b);
    r.wellposedness = Some(r.timed("wellposedness", || classify_semigroup(c, m, &b.graph))?);
    if let Some(p) = &b.positivity {
        let dof = build_dof_map(&b.graph, p.n_per_edge);
        let sys = assemble(&b.graph, &dof, c, m)?;
        let dt = default_probe_dt(dof.h());
        r.positivity = Some(r.timed("positivity", || positivity_probe(&sys, p.trials, dt, p.t_end, b.seed))?);
    }
    Ok((r, None))
}

pub fn symmetry(b: &Bundle) -> Result<(Report, Option<Failure>), Failure> {
    let (c, m) = coefficients(b);
    let mut r = Report::new("symmetry", b);
    let sys = match &b.numeric {
        Some(s) => {
            let dof = build_dof_map(&b.graph, s.n_per_edge);
            Some(r.timed("assembly", || assemble(&b.graph, &dof, &c, &m))?)
        }
        None => None,
    };
    let outcomes: Vec<(Result<SymmetryReport, netflowsym_core::Error>, f64)> = b
        .projections
        .par_iter()
        .map(|entry| {
            let start = Instant::now();
            let rep = match &sys {
                Some(sys) => report_for_system(sys, &entry.projection, b.numeric.as_ref()),
                None => full_report(&b.graph, &c, &m, &entry.projection, None),
            };
            (rep, start.elapsed().as_secs_f64())
        })
        .collect();
    let mut results = Vec::with_capacity(outcomes.len());
    let mut failed = Vec::new();
    for (entry, (rep, secs)) in b.projections.iter().zip(outcomes) {
        let report = rep?;
        r.timings.push(Timing {
            label: format!("projection:{}", entry.name),
            seconds: secs,
        });
        let assertion_holds = entry.expect_invariant.map(|want| {
            let numeric_ok = report.numeric.as_ref().is_none_or(|n| n.agrees);
            report.invariant == want && numeric_ok
        });
        if assertion_holds == Some(false) {
            failed.push(entry.name.clone());
        }
        results.push(ProjectionResult {
            name: entry.name.clone(),
            expect_invariant: entry.expect_invariant,
            assertion_holds,
            report,
        });
    }
    r.symmetry = Some(results);
    let failure = if failed.is_empty() {
        None
    } else {
        r.status = "assertion_failed";
        Some(Failure::Assertion(format!("invariance expectation violated for {}", failed.join(", "))))
    };
    Ok((r, failure))
}

fn describe(init: &Initial) -> String {
    match init {
        Initial::Constant(z) => format!("constant({}, {})", z.re, z.im),
        Initial::Cosine(k) => format!("cosine({k})"),
        Initial::Nodal(_) => "nodal".into(),
        Initial::Random { complex } => if *complex { "random(complex)" } else { "random(real)" }.into(),
    }
}

fn initial_state(sys: &DiscreteSystem, init: &Initial, seed: u64, index: usize) -> Result<StateVector, Failure> {
    let g = &sys.graph;
    let state = match init {
        Initial::Constant(z) => StateVector::constant(sys.dof.clone(), *z),
        Initial::Cosine(k) => {
            let k = *k as f64;
            interpolate(g, &sys.dof, |_, x| Complex64::new((k * PI * x).cos(), 0.0))?
        }
        Initial::Nodal(d) => {
            let (t, h) = (g.tails(), g.heads());
            interpolate(g, &sys.dof, |j, x| d[t[j]] * (1.0 - x) + d[h[j]] * x)?
        }
        Initial::Random { complex } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(index as u64);
            let f = RandomEdgeFunction::sample(g, &mut rng, *complex);
            interpolate(g, &sys.dof, |j, x| f.eval(j, x))?
        }
    };
    Ok(state)
}

/// Scalar diffusion constant when the heat kernel applies.
fn oracle_rate(b: &Bundle, c: &CouplingField, m: &NodeMatrix) -> Option<f64> {
    if b.graph.n_edges() != 1 || m.matrix().iter().any(|z| z.norm() != 0.0) || !c.is_constant() {
        return None;
    }
    let c0 = c.evaluate(0.0).ok()?[(0, 0)];
    (c0.im == 0.0 && c0.re > 0.0).then_some(c0.re)
}

fn heat_oracle(traj: &Trajectory, sys: &DiscreteSystem, k: u32, rate: f64, d: &Discretization) -> Vec<OraclePoint> {
    let kp = k as f64 * PI;
    let h = sys.h();
    let tolerance = d.oracle_tolerance.unwrap_or(kp * kp * (h * h + d.dt * d.dt));
    let grid = sys.dof.grid();
    traj.times
        .iter()
        .zip(&traj.states)
        .map(|(&t, u)| {
            let decay = (-rate * kp * kp * t).exp();
            let max_error = grid
                .iter()
                .enumerate()
                .map(|(i, &x)| (u[sys.dof.dof(0, i)] - Complex64::new(decay * (kp * x).cos(), 0.0)).norm())
                .fold(0.0, f64::max);
            OraclePoint {
                time: t,
                max_error,
                tolerance,
                within_tolerance: max_error <= tolerance,
            }
        })
        .collect()
}

fn write_oracle_csv<W: Write>(points: &[OraclePoint], mut out: W) -> std::io::Result<()> {
    writeln!(out, "time,max_error,tolerance,within_tolerance")?;
    for p in points {
        writeln!(
            out,
            "{},{},{},{}",
            format_g17(p.time),
            format_g17(p.max_error),
            format_g17(p.tolerance),
            p.within_tolerance
        )?;
    }
    Ok(())
}

pub fn simulate(b: &Bundle, out_dir: &Path) -> Result<(Report, Option<Failure>), Failure> {
    let d = b
        .discretization
        .as_ref()
        .ok_or_else(|| Failure::Input("simulate needs a \"discretization\" block".into()))?;
    if b.initial.is_empty() {
        return Err(Failure::Input("simulate needs at least one \"initial\" entry".into()));
    }
    let (c, m) = coefficients(b);
    let mut r = Report::new("simulate", b);
    let dof = Arc::new(build_dof_map(&b.graph, d.n_per_edge));
    let sys = r.timed("assembly", || assemble(&b.graph, &dof, &c, &m))?;
    if d.modes.contains(&Mode::Schrodinger) && !sys.hermitian {
        return Err(netflowsym_core::Error::NotSelfAdjoint.into());
    }
    let jobs: Vec<(usize, Mode, &Initial)> = d
        .modes
        .iter()
        .flat_map(|&mode| b.initial.iter().map(move |init| (mode, init)))
        .enumerate()
        .map(|(k, (mode, init))| (k, mode, init))
        .collect();
    let opts = SimulationOptions {
        dt: d.dt,
        t_end: d.t_end,
        stride: d.stride,
    };
    let runs: Vec<Result<(Trajectory, f64), Failure>> = jobs
        .par_iter()
        .map(|&(k, mode, init)| {
            let start = Instant::now();
            let u0 = initial_state(&sys, init, b.seed, k)?;
            let traj = match mode {
                Mode::Parabolic => simulate_parabolic_with(&sys, &u0.coeffs, &opts, d.scheme)?,
                Mode::Schrodinger => simulate_schrodinger_with(&sys, &u0.coeffs, &opts)?,
            };
            Ok((traj, start.elapsed().as_secs_f64()))
        })
        .collect();
    fs::create_dir_all(out_dir)?;
    let rate = oracle_rate(b, &c, &m);
    let mut results = Vec::new();
    let mut oracle_failed = Vec::new();
    for (&(k, mode, init), run) in jobs.iter().zip(runs) {
        let (traj, secs) = run?;
        r.timings.push(Timing {
            label: format!("run:{k}"),
            seconds: secs,
        });
        let trajectory_file = format!("trajectory_{k}.csv");
        let observables_file = format!("observables_{k}.json");
        write_trajectory_csv(&traj, BufWriter::new(File::create(out_dir.join(&trajectory_file))?))?;
        fs::write(out_dir.join(&observables_file), to_json_g17(&traj.observables)?)?;
        let oracle = match (mode, init, rate) {
            (Mode::Parabolic, Initial::Cosine(kk), Some(rate)) => Some(heat_oracle(&traj, &sys, *kk, rate, d)),
            _ => None,
        };
        let mut oracle_file = None;
        if let Some(points) = &oracle {
            if points.iter().any(|p| !p.within_tolerance) {
                oracle_failed.push(k);
            }
            let name = format!("oracle_{k}.csv");
            write_oracle_csv(points, BufWriter::new(File::create(out_dir.join(&name))?))?;
            oracle_file = Some(name);
        }
        results.push(RunResult {
            index: k,
            mode,
            initial: describe(init),
            trajectory_file,
            observables_file,
            oracle_file,
            n_snapshots: traj.len(),
            final_observables: traj.observables.last().expect("trajectory is never empty").clone(),
            oracle,
        });
    }
    r.simulation = Some(results);
    let failure = if oracle_failed.is_empty() {
        None
    } else {
        r.status = "assertion_failed";
        Some(Failure::Assertion(format!("heat oracle tolerance exceeded in runs {oracle_failed:?}")))
    };
    Ok((r, failure))
}

pub fn write_report(r: &Report, out_dir: &Path) -> Result<(), Failure> {
    fs::create_dir_all(out_dir)?;
    fs::write(out_dir.join("report.json"), to_json_g17(r)?)?;
    Ok(())
}
