//! File formats: graph and coefficient JSON, projection descriptions,
//! 17-significant-digit JSON output, trajectory CSV and Matrix Market export.
//!
//! Complex scalars are written either as a plain number or as `[re, im]`.

use std::io::{self, Write};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::ser::{Formatter, PrettyFormatter};
use serde_json::Value;

use crate::coupling::{CouplingField, NodeMatrix, ScalarFn};
use crate::error::{Error, Result};
use crate::evolution::Trajectory;
use crate::graph::MetricGraph;
use crate::symmetry::{krylov_projection, layer_projection, EdgeProjection};
use crate::CMatrix;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphFile {
    pub nodes: usize,
    pub edges: Vec<[usize; 2]>,
}

impl GraphFile {
    pub fn build(&self) -> Result<MetricGraph> {
        let edges: Vec<(usize, usize)> = self.edges.iter().map(|e| (e[0], e[1])).collect();
        MetricGraph::new(self.nodes, &edges)
    }

    pub fn of(g: &MetricGraph) -> Self {
        Self {
            nodes: g.n_nodes(),
            edges: g.edges().into_iter().map(|(t, h)| [t, h]).collect(),
        }
    }
}

pub fn parse_graph(value: &Value) -> Result<MetricGraph> {
    let file: GraphFile =
        serde_json::from_value(value.clone()).map_err(|e| Error::Parse(format!("graph: {e}")))?;
    file.build()
}

fn perr(path: &str, msg: impl std::fmt::Display) -> Error {
    Error::Parse(format!("{path}: {msg}"))
}

pub fn parse_scalar(v: &Value, path: &str) -> Result<Complex64> {
    match v {
        Value::Number(n) => n
            .as_f64()
            .map(|x| Complex64::new(x, 0.0))
            .ok_or_else(|| perr(path, "number out of range")),
        Value::Array(pair) if pair.len() == 2 => {
            let re = pair[0].as_f64().ok_or_else(|| perr(path, "real part is not a number"))?;
            let im = pair[1].as_f64().ok_or_else(|| perr(path, "imaginary part is not a number"))?;
            Ok(Complex64::new(re, im))
        }
        _ => Err(perr(path, "expected a number or [re, im]")),
    }
}

fn parse_list<T>(v: &Value, path: &str, item: impl Fn(&Value, &str) -> Result<T>) -> Result<Vec<T>> {
    let arr = v.as_array().ok_or_else(|| perr(path, "expected an array"))?;
    arr.iter()
        .enumerate()
        .map(|(i, x)| item(x, &format!("{path}[{i}]")))
        .collect()
}

pub fn parse_vector(v: &Value, path: &str) -> Result<Vec<Complex64>> {
    parse_list(v, path, parse_scalar)
}

/// Square or rectangular matrix given as a list of rows.
pub fn parse_matrix(v: &Value, path: &str) -> Result<CMatrix> {
    let rows = parse_list(v, path, parse_vector)?;
    let nrows = rows.len();
    let ncols = rows.first().map_or(0, Vec::len);
    if let Some(bad) = rows.iter().position(|r| r.len() != ncols) {
        return Err(perr(&format!("{path}[{bad}]"), format!("expected {ncols} entries")));
    }
    Ok(CMatrix::from_fn(nrows, ncols, |i, j| rows[i][j]))
}

fn kind_of<'a>(v: &'a Value, path: &str) -> Result<&'a str> {
    v.get("kind")
        .and_then(Value::as_str)
        .ok_or_else(|| perr(path, "missing string field \"kind\""))
}

fn data_of<'a>(v: &'a Value, path: &str) -> Result<&'a Value> {
    v.get("data").ok_or_else(|| perr(path, "missing field \"data\""))
}

fn parse_entry(v: &Value, path: &str) -> Result<ScalarFn> {
    if !v.is_object() {
        return parse_scalar(v, path).map(ScalarFn::Constant);
    }
    let data = data_of(v, path)?;
    let dpath = format!("{path}.data");
    match kind_of(v, path)? {
        "constant" => parse_scalar(data, &dpath).map(ScalarFn::Constant),
        "poly" => parse_vector(data, &dpath).map(ScalarFn::Poly),
        "samples" => {
            let s = parse_vector(data, &dpath)?;
            if s.is_empty() {
                return Err(perr(&dpath, "need at least one sample"));
            }
            Ok(ScalarFn::Samples(s))
        }
        other => Err(perr(path, format!("unknown entry kind \"{other}\""))),
    }
}

/// The coefficient `C`: a matrix of entries (numbers, `[re, im]` pairs or
/// `{"kind", "data"}` objects), or a whole-matrix object of kind
/// `identity`, `diagonal`, `constant`, `poly` (list of coefficient matrices)
/// or `samples` (list of matrices on a uniform grid).
pub fn parse_coupling(v: &Value, m: usize, path: &str) -> Result<CouplingField> {
    let field = if v.is_array() {
        let rows = parse_list(v, path, |r, p| parse_list(r, p, parse_entry))?;
        if rows.len() != m || rows.iter().any(|r| r.len() != m) {
            return Err(perr(path, format!("expected a {m}x{m} matrix")));
        }
        CouplingField::new(m, rows.into_iter().flatten().collect())?
    } else {
        let dpath = format!("{path}.data");
        match kind_of(v, path)? {
            "identity" => CouplingField::identity(m),
            "diagonal" => {
                let d = parse_vector(data_of(v, path)?, &dpath)?;
                let c = CMatrix::from_diagonal(&crate::CVector::from_vec(d));
                CouplingField::constant(&c)?
            }
            "constant" => CouplingField::constant(&parse_matrix(data_of(v, path)?, &dpath)?)?,
            kind @ ("poly" | "samples") => {
                let mats = parse_list(data_of(v, path)?, &dpath, parse_matrix)?;
                if mats.is_empty() {
                    return Err(perr(&dpath, "need at least one matrix"));
                }
                if mats.iter().any(|a| a.nrows() != m || a.ncols() != m) {
                    return Err(perr(&dpath, format!("every matrix must be {m}x{m}")));
                }
                let entries = (0..m * m)
                    .map(|idx| {
                        let vals = mats.iter().map(|a| a[(idx / m, idx % m)]).collect();
                        if kind == "poly" {
                            ScalarFn::Poly(vals)
                        } else {
                            ScalarFn::Samples(vals)
                        }
                    })
                    .collect();
                CouplingField::new(m, entries)?
            }
            other => return Err(perr(path, format!("unknown coefficient kind \"{other}\""))),
        }
    };
    if field.m() != m {
        return Err(perr(path, format!("expected a {m}x{m} matrix")));
    }
    Ok(field)
}

/// The node matrix: a matrix of scalars, `{"kind": "zero"}` or
/// `{"kind": "scaled_identity", "data": s}`. `null` means zero.
pub fn parse_node_matrix(v: &Value, n: usize, path: &str) -> Result<NodeMatrix> {
    let mat = match v {
        Value::Null => CMatrix::zeros(n, n),
        Value::Array(_) => parse_matrix(v, path)?,
        _ => match kind_of(v, path)? {
            "zero" => CMatrix::zeros(n, n),
            "scaled_identity" => {
                let s = parse_scalar(data_of(v, path)?, &format!("{path}.data"))?;
                CMatrix::identity(n, n) * s
            }
            other => return Err(perr(path, format!("unknown node matrix kind \"{other}\""))),
        },
    };
    if mat.nrows() != n || mat.ncols() != n {
        return Err(perr(path, format!("expected a {n}x{n} matrix")));
    }
    NodeMatrix::new(mat)
}

/// A projection: an m×m matrix, or an object of kind `averaging`, `layer`,
/// `identity`, `zero`, `krylov`, `matrix` (field `data`) or `subspace`
/// (field `basis`, a list of spanning vectors).
pub fn parse_projection(v: &Value, g: &MetricGraph, c: &CouplingField, path: &str) -> Result<EdgeProjection> {
    let m = g.n_edges();
    let from_matrix = |a: CMatrix| -> Result<EdgeProjection> {
        if a.nrows() != m || a.ncols() != m {
            return Err(perr(path, format!("expected a {m}x{m} matrix")));
        }
        EdgeProjection::new(a)
    };
    if v.is_array() {
        return from_matrix(parse_matrix(v, path)?);
    }
    match kind_of(v, path)? {
        "averaging" => Ok(EdgeProjection::averaging(m)),
        "layer" => layer_projection(g),
        "identity" => Ok(EdgeProjection::identity(m)),
        "zero" => Ok(EdgeProjection::zero(m)),
        "krylov" => {
            if !c.is_constant() {
                return Err(Error::NotConstant);
            }
            Ok(krylov_projection(&c.evaluate(0.0)?))
        }
        "matrix" => from_matrix(parse_matrix(data_of(v, path)?, &format!("{path}.data"))?),
        "subspace" => {
            let bpath = format!("{path}.basis");
            let basis = v.get("basis").ok_or_else(|| perr(path, "missing field \"basis\""))?;
            let vecs = parse_list(basis, &bpath, parse_vector)?;
            if vecs.iter().any(|b| b.len() != m) {
                return Err(perr(&bpath, format!("every basis vector needs {m} entries")));
            }
            let b = CMatrix::from_fn(m, vecs.len(), |i, j| vecs[j][i]);
            Ok(EdgeProjection::from_basis(&b))
        }
        other => Err(perr(path, format!("unknown projection kind \"{other}\""))),
    }
}

/// Shortest decimal form with 17 significant digits, as C's `%.17g`.
pub fn format_g17(x: f64) -> String {
    if !x.is_finite() {
        return "null".into();
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let sci = format!("{x:.16e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..17).contains(&exp) {
        let fixed = format!("{:.*}", (16 - exp) as usize, x);
        trim_zeros(&fixed).to_string()
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{}{:02}", trim_zeros(mantissa), sign, exp.abs())
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Pretty JSON formatter writing every float with [`format_g17`].
pub struct G17Formatter<'a> {
    pretty: PrettyFormatter<'a>,
}

impl Default for G17Formatter<'_> {
    fn default() -> Self {
        Self {
            pretty: PrettyFormatter::with_indent(b"  "),
        }
    }
}

impl Formatter for G17Formatter<'_> {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        writer.write_all(format_g17(value).as_bytes())
    }

    fn write_f32<W: ?Sized + Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, f64::from(value))
    }

    fn begin_array<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.pretty.begin_array(writer)
    }

    fn end_array<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.pretty.end_array(writer)
    }

    fn begin_array_value<W: ?Sized + Write>(&mut self, writer: &mut W, first: bool) -> io::Result<()> {
        self.pretty.begin_array_value(writer, first)
    }

    fn end_array_value<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.pretty.end_array_value(writer)
    }

    fn begin_object<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.pretty.begin_object(writer)
    }

    fn end_object<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.pretty.end_object(writer)
    }

    fn begin_object_key<W: ?Sized + Write>(&mut self, writer: &mut W, first: bool) -> io::Result<()> {
        self.pretty.begin_object_key(writer, first)
    }

    fn begin_object_value<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.pretty.begin_object_value(writer)
    }

    fn end_object_value<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.pretty.end_object_value(writer)
    }
}

pub fn to_json_g17<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, G17Formatter::default());
    value
        .serialize(&mut ser)
        .map_err(|e| Error::Parse(format!("serialization: {e}")))?;
    buf.push(b'\n');
    Ok(String::from_utf8(buf).expect("JSON output is UTF-8"))
}

/// `time,dof_0_re,dof_0_im,…` with one row per stored time.
pub fn write_trajectory_csv<W: Write>(traj: &Trajectory, mut out: W) -> io::Result<()> {
    let n = traj.states.first().map_or(0, |s| s.len());
    let mut header = String::from("time");
    for k in 0..n {
        header.push_str(&format!(",dof_{k}_re,dof_{k}_im"));
    }
    writeln!(out, "{header}")?;
    for (t, u) in traj.times.iter().zip(&traj.states) {
        let mut line = format_g17(*t);
        for z in u.iter() {
            line.push(',');
            line.push_str(&format_g17(z.re));
            line.push(',');
            line.push_str(&format_g17(z.im));
        }
        writeln!(out, "{line}")?;
    }
    Ok(())
}

/// Coordinate-format complex Matrix Market text; entries with `|a_ij| = 0`
/// are skipped.
pub fn write_matrix_market<W: Write>(a: &CMatrix, mut out: W) -> io::Result<()> {
    let entries: Vec<(usize, usize, Complex64)> = (0..a.ncols())
        .flat_map(|j| (0..a.nrows()).map(move |i| (i, j)))
        .map(|(i, j)| (i, j, a[(i, j)]))
        .filter(|(_, _, z)| z.norm() != 0.0)
        .collect();
    writeln!(out, "%%MatrixMarket matrix coordinate complex general")?;
    writeln!(out, "{} {} {}", a.nrows(), a.ncols(), entries.len())?;
    for (i, j, z) in entries {
        writeln!(out, "{} {} {} {}", i + 1, j + 1, format_g17(z.re), format_g17(z.im))?;
    }
    Ok(())
}
