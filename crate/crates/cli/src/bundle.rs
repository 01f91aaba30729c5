//! Problem bundles: one JSON document describing graph, coefficients,
//! discretization, initial data and projections.

use std::fs;
use std::path::{Path, PathBuf};

use netflowsym_core::evolution::{Mode, Scheme};
use netflowsym_core::io::{parse_coupling, parse_graph, parse_node_matrix, parse_projection, parse_scalar, parse_vector};
use netflowsym_core::symmetry::NumericSettings;
use netflowsym_core::{Complex64, CouplingField, EdgeProjection, MetricGraph, NodeMatrix};
use serde_json::Value;

use crate::failure::Failure;

#[derive(Debug, Clone)]
pub struct Discretization {
    pub n_per_edge: usize,
    pub dt: f64,
    pub t_end: f64,
    pub scheme: Scheme,
    pub stride: usize,
    pub modes: Vec<Mode>,
    pub oracle_tolerance: Option<f64>,
}

impl Default for Discretization {
    fn default() -> Self {
        Self {
            n_per_edge: 31,
            dt: 1e-3,
            t_end: 0.1,
            scheme: Scheme::CrankNicolson,
            stride: 1,
            modes: vec![Mode::Parabolic],
            oracle_tolerance: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Initial {
    Constant(Complex64),
    /// `cos(kπx)` on every edge.
    Cosine(u32),
    /// Node values joined linearly along each edge.
    Nodal(Vec<Complex64>),
    /// Random nodal values plus a sine bump per edge.
    Random { complex: bool },
}

#[derive(Debug, Clone)]
pub struct ProjectionEntry {
    pub name: String,
    pub projection: EdgeProjection,
    pub expect_invariant: Option<bool>,
}

#[derive(Debug, Clone)]
pub struct PositivityProbe {
    pub trials: usize,
    pub n_per_edge: usize,
    pub t_end: f64,
}

#[derive(Debug, Clone)]
pub struct Bundle {
    pub name: String,
    pub graph: MetricGraph,
    pub c: Option<CouplingField>,
    pub m: Option<NodeMatrix>,
    pub discretization: Option<Discretization>,
    pub initial: Vec<Initial>,
    pub projections: Vec<ProjectionEntry>,
    pub numeric: Option<NumericSettings>,
    pub positivity: Option<PositivityProbe>,
    pub seed: u64,
}

#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub dt: Option<f64>,
    pub t_end: Option<f64>,
    pub seed: Option<u64>,
}

fn bad(path: &str, msg: impl std::fmt::Display) -> Failure {
    Failure::Input(format!("{path}: {msg}"))
}

fn field<'a>(v: &'a Value, key: &str) -> Option<&'a Value> {
    v.get(key).filter(|x| !x.is_null())
}

fn as_usize(v: &Value, path: &str) -> Result<usize, Failure> {
    v.as_u64().map(|x| x as usize).ok_or_else(|| bad(path, "expected a nonnegative integer"))
}

fn as_f64(v: &Value, path: &str) -> Result<f64, Failure> {
    v.as_f64().ok_or_else(|| bad(path, "expected a number"))
}

fn as_bool(v: &Value, path: &str) -> Result<bool, Failure> {
    v.as_bool().ok_or_else(|| bad(path, "expected true or false"))
}

fn as_str<'a>(v: &'a Value, path: &str) -> Result<&'a str, Failure> {
    v.as_str().ok_or_else(|| bad(path, "expected a string"))
}

const TOP_LEVEL: &[&str] = &[
    "name", "graph", "C", "M", "discretization", "initial", "projections", "numeric", "positivity", "seed",
];

pub fn load(path: &Path, overrides: &Overrides) -> Result<Bundle, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
    let default_name = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    parse(&text, &base, &default_name, overrides)
}

pub fn parse(text: &str, base: &Path, default_name: &str, overrides: &Overrides) -> Result<Bundle, Failure> {
    let v: Value = serde_json::from_str(text).map_err(|e| Failure::Input(format!("bundle: {e}")))?;
    let obj = v.as_object().ok_or_else(|| bad("bundle", "expected a JSON object"))?;
    if let Some(key) = obj.keys().find(|k| !TOP_LEVEL.contains(&k.as_str())) {
        return Err(bad("bundle", format!("unknown field \"{key}\"")));
    }
    let name = match field(&v, "name") {
        Some(n) => as_str(n, "name")?.to_string(),
        None => default_name.to_string(),
    };
    let graph = parse_graph_ref(field(&v, "graph").ok_or_else(|| bad("bundle", "missing field \"graph\""))?, base)?;
    let c = field(&v, "C").map(|x| parse_coupling(x, graph.n_edges(), "C")).transpose()?;
    let m = match v.get("M") {
        Some(x) => Some(parse_node_matrix(x, graph.n_nodes(), "M")?),
        None => None,
    };
    let mut discretization = field(&v, "discretization").map(parse_discretization).transpose()?;
    let initial = match field(&v, "initial") {
        None => Vec::new(),
        Some(Value::Array(items)) => items
            .iter()
            .enumerate()
            .map(|(i, x)| parse_initial(x, &graph, &format!("initial[{i}]")))
            .collect::<Result<_, _>>()?,
        Some(x) => vec![parse_initial(x, &graph, "initial")?],
    };
    let projections = match field(&v, "projections") {
        None => Vec::new(),
        Some(Value::Array(items)) => {
            let identity = CouplingField::identity(graph.n_edges());
            let cref = c.as_ref().unwrap_or(&identity);
            items
                .iter()
                .enumerate()
                .map(|(i, x)| parse_projection_entry(x, &graph, cref, i))
                .collect::<Result<_, _>>()?
        }
        Some(_) => return Err(bad("projections", "expected a list")),
    };
    let mut numeric = match field(&v, "numeric") {
        None | Some(Value::Bool(false)) => None,
        Some(Value::Bool(true)) => Some(NumericSettings::default()),
        Some(x) => Some(parse_numeric(x)?),
    };
    let positivity = field(&v, "positivity").map(parse_positivity).transpose()?;
    let mut seed = match field(&v, "seed") {
        Some(x) => x.as_u64().ok_or_else(|| bad("seed", "expected a nonnegative integer"))?,
        None => 0,
    };

    if let Some(s) = overrides.seed {
        seed = s;
    }
    if let Some(n) = numeric.as_mut() {
        n.seed = seed;
    }
    if let Some(dt) = overrides.dt {
        check_positive(dt, "--dt")?;
        if let Some(d) = discretization.as_mut() {
            d.dt = dt;
        }
        if let Some(n) = numeric.as_mut() {
            n.dt = dt;
        }
    }
    if let Some(t) = overrides.t_end {
        check_nonnegative(t, "--T")?;
        if let Some(d) = discretization.as_mut() {
            d.t_end = t;
        }
        if let Some(n) = numeric.as_mut() {
            n.t_end = t;
        }
    }

    Ok(Bundle {
        name,
        graph,
        c,
        m,
        discretization,
        initial,
        projections,
        numeric,
        positivity,
        seed,
    })
}

fn check_positive(x: f64, path: &str) -> Result<(), Failure> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        Err(bad(path, "must be a positive number"))
    }
}

fn check_nonnegative(x: f64, path: &str) -> Result<(), Failure> {
    if x.is_finite() && x >= 0.0 {
        Ok(())
    } else {
        Err(bad(path, "must be a nonnegative number"))
    }
}

fn parse_graph_ref(v: &Value, base: &Path) -> Result<MetricGraph, Failure> {
    match v {
        Value::String(p) => {
            let path: PathBuf = base.join(p);
            let text = fs::read_to_string(&path).map_err(|e| Failure::Input(format!("graph {}: {e}", path.display())))?;
            let g: Value =
                serde_json::from_str(&text).map_err(|e| Failure::Input(format!("graph {}: {e}", path.display())))?;
            Ok(parse_graph(&g)?)
        }
        _ => Ok(parse_graph(v)?),
    }
}

fn parse_scheme(s: &str, path: &str) -> Result<Scheme, Failure> {
    match s {
        "crank_nicolson" | "cn" => Ok(Scheme::CrankNicolson),
        "backward_euler" | "be" => Ok(Scheme::BackwardEuler),
        other => Err(bad(path, format!("unknown scheme \"{other}\""))),
    }
}

fn parse_mode(s: &str, path: &str) -> Result<Mode, Failure> {
    match s {
        "parabolic" | "heat" => Ok(Mode::Parabolic),
        "schrodinger" => Ok(Mode::Schrodinger),
        other => Err(bad(path, format!("unknown mode \"{other}\""))),
    }
}

fn parse_discretization(v: &Value) -> Result<Discretization, Failure> {
    let p = "discretization";
    let mut d = Discretization::default();
    let obj = v.as_object().ok_or_else(|| bad(p, "expected an object"))?;
    for (key, x) in obj {
        let path = format!("{p}.{key}");
        match key.as_str() {
            "n_per_edge" => d.n_per_edge = as_usize(x, &path)?,
            "dt" => {
                d.dt = as_f64(x, &path)?;
                check_positive(d.dt, &path)?;
            }
            "T" => {
                d.t_end = as_f64(x, &path)?;
                check_nonnegative(d.t_end, &path)?;
            }
            "scheme" => d.scheme = parse_scheme(as_str(x, &path)?, &path)?,
            "stride" => {
                d.stride = as_usize(x, &path)?;
                if d.stride == 0 {
                    return Err(bad(&path, "must be at least 1"));
                }
            }
            "mode" => d.modes = vec![parse_mode(as_str(x, &path)?, &path)?],
            "modes" => {
                let items = x.as_array().ok_or_else(|| bad(&path, "expected a list"))?;
                d.modes = items
                    .iter()
                    .enumerate()
                    .map(|(i, s)| {
                        let ip = format!("{path}[{i}]");
                        parse_mode(as_str(s, &ip)?, &ip)
                    })
                    .collect::<Result<_, _>>()?;
            }
            "oracle_tolerance" => d.oracle_tolerance = Some(as_f64(x, &path)?),
            other => return Err(bad(p, format!("unknown field \"{other}\""))),
        }
    }
    Ok(d)
}

fn parse_initial(v: &Value, g: &MetricGraph, path: &str) -> Result<Initial, Failure> {
    let kind = as_str(v.get("kind").ok_or_else(|| bad(path, "missing field \"kind\""))?, &format!("{path}.kind"))?;
    match kind {
        "constant" => {
            let value = match v.get("value") {
                Some(x) => parse_scalar(x, &format!("{path}.value"))?,
                None => Complex64::new(1.0, 0.0),
            };
            Ok(Initial::Constant(value))
        }
        "cosine" => {
            let k = match v.get("k") {
                Some(x) => as_usize(x, &format!("{path}.k"))? as u32,
                None => 1,
            };
            Ok(Initial::Cosine(k))
        }
        "nodal" => {
            let vp = format!("{path}.values");
            let vals = parse_vector(v.get("values").ok_or_else(|| bad(path, "missing field \"values\""))?, &vp)?;
            if vals.len() != g.n_nodes() {
                return Err(bad(&vp, format!("expected {} node values", g.n_nodes())));
            }
            Ok(Initial::Nodal(vals))
        }
        "random" => {
            let complex = match v.get("complex") {
                Some(x) => as_bool(x, &format!("{path}.complex"))?,
                None => false,
            };
            Ok(Initial::Random { complex })
        }
        other => Err(bad(path, format!("unknown initial kind \"{other}\""))),
    }
}

fn parse_projection_entry(v: &Value, g: &MetricGraph, c: &CouplingField, i: usize) -> Result<ProjectionEntry, Failure> {
    let path = format!("projections[{i}]");
    let name = match v.get("name") {
        Some(n) => as_str(n, &format!("{path}.name"))?.to_string(),
        None => format!("projection_{i}"),
    };
    let kpath = format!("{path}.K");
    let k = v.get("K").ok_or_else(|| bad(&path, "missing field \"K\""))?;
    let projection = parse_projection(k, g, c, &kpath)?;
    let expect_invariant = match v.get("expect_invariant") {
        Some(Value::Null) | None => None,
        Some(x) => Some(as_bool(x, &format!("{path}.expect_invariant"))?),
    };
    Ok(ProjectionEntry {
        name,
        projection,
        expect_invariant,
    })
}

fn parse_numeric(v: &Value) -> Result<NumericSettings, Failure> {
    let p = "numeric";
    let mut s = NumericSettings::default();
    let obj = v.as_object().ok_or_else(|| bad(p, "expected an object or a boolean"))?;
    for (key, x) in obj {
        let path = format!("{p}.{key}");
        match key.as_str() {
            "n_per_edge" => s.n_per_edge = as_usize(x, &path)?,
            "dt" => {
                s.dt = as_f64(x, &path)?;
                check_positive(s.dt, &path)?;
            }
            "T" => {
                s.t_end = as_f64(x, &path)?;
                check_nonnegative(s.t_end, &path)?;
            }
            "trials" => s.trials = as_usize(x, &path)?,
            "calibration" => s.calibration = as_f64(x, &path)?,
            other => return Err(bad(p, format!("unknown field \"{other}\""))),
        }
    }
    Ok(s)
}

fn parse_positivity(v: &Value) -> Result<PositivityProbe, Failure> {
    let p = "positivity";
    let mut s = PositivityProbe {
        trials: 20,
        n_per_edge: 15,
        t_end: 0.5,
    };
    let obj = v.as_object().ok_or_else(|| bad(p, "expected an object"))?;
    for (key, x) in obj {
        let path = format!("{p}.{key}");
        match key.as_str() {
            "trials" => s.trials = as_usize(x, &path)?,
            "n_per_edge" => s.n_per_edge = as_usize(x, &path)?,
            "T" => {
                s.t_end = as_f64(x, &path)?;
                check_nonnegative(s.t_end, &path)?;
            }
            other => return Err(bad(p, format!("unknown field \"{other}\""))),
        }
    }
    Ok(s)
}
