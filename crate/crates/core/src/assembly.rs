//! P1 finite elements on the node-continuous space.
//!
//! Every edge carries the uniform grid `x_k = k h`, `h = 1 / (N + 1)`. The
//! global unknowns are one value per node followed by the `N` interior values
//! of each edge, so continuity at the nodes holds by construction. With
//! coefficient vectors `f`, `g` the discrete form is `g* A f`, where
//! `A = stiffness - node_term`.

use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::coupling::{sample_points, CouplingField, NodeMatrix, ALG_TOL, DEFAULT_SAMPLES};
use crate::error::{Error, Result};
use crate::graph::MetricGraph;
use crate::linalg::{is_hermitian, max_abs_vec};
use crate::{CMatrix, CVector};

/// Node values of incident edges must agree to this tolerance.
pub const CONTINUITY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DofMap {
    n_nodes: usize,
    n_per_edge: usize,
    /// Per edge: global indices of the grid values `x_0, …, x_{N+1}`.
    edge_dofs: Vec<Vec<usize>>,
}

impl DofMap {
    pub fn n_nodes(&self) -> usize {
        self.n_nodes
    }

    pub fn n_edges(&self) -> usize {
        self.edge_dofs.len()
    }

    pub fn n_per_edge(&self) -> usize {
        self.n_per_edge
    }

    /// Number of grid points per edge including both endpoints.
    pub fn n_points(&self) -> usize {
        self.n_per_edge + 2
    }

    pub fn h(&self) -> f64 {
        1.0 / (self.n_per_edge + 1) as f64
    }

    pub fn total_dofs(&self) -> usize {
        self.n_nodes + self.n_edges() * self.n_per_edge
    }

    pub fn edge_dofs(&self, j: usize) -> &[usize] {
        &self.edge_dofs[j]
    }

    /// Global index of grid point `k` on edge `j`.
    pub fn dof(&self, j: usize, k: usize) -> usize {
        self.edge_dofs[j][k]
    }

    pub fn grid(&self) -> Vec<f64> {
        let h = self.h();
        (0..self.n_points()).map(|k| k as f64 * h).collect()
    }
}

pub fn build_dof_map(g: &MetricGraph, n_per_edge: usize) -> DofMap {
    let n = g.n_nodes();
    let edge_dofs = (0..g.n_edges())
        .map(|j| {
            let (t, h) = g.edge(j);
            let mut dofs = Vec::with_capacity(n_per_edge + 2);
            dofs.push(t);
            dofs.extend((1..=n_per_edge).map(|k| n + j * n_per_edge + k - 1));
            dofs.push(h);
            dofs
        })
        .collect();
    DofMap {
        n_nodes: n,
        n_per_edge,
        edge_dofs,
    }
}

/// Coefficients of a function in the discrete space.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    dof: Arc<DofMap>,
    pub coeffs: CVector,
}

impl StateVector {
    pub fn new(dof: Arc<DofMap>, coeffs: CVector) -> Result<Self> {
        if coeffs.len() != dof.total_dofs() {
            return Err(Error::DimensionMismatch {
                what: "state vector length",
                expected: dof.total_dofs(),
                found: coeffs.len(),
            });
        }
        Ok(Self { dof, coeffs })
    }

    pub fn zeros(dof: Arc<DofMap>) -> Self {
        let len = dof.total_dofs();
        Self {
            dof,
            coeffs: CVector::zeros(len),
        }
    }

    pub fn constant(dof: Arc<DofMap>, value: Complex64) -> Self {
        let len = dof.total_dofs();
        Self {
            dof,
            coeffs: CVector::from_element(len, value),
        }
    }

    pub fn dof_map(&self) -> &Arc<DofMap> {
        &self.dof
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `u_j(x)` by linear interpolation between grid values.
    pub fn evaluate(&self, j: usize, x: f64) -> Result<Complex64> {
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::OutOfDomain(x));
        }
        if j >= self.dof.n_edges() {
            return Err(Error::BadIndex {
                index: j,
                n_nodes: self.dof.n_edges(),
            });
        }
        let pos = x / self.dof.h();
        let k = (pos.floor() as usize).min(self.dof.n_per_edge);
        let t = pos - k as f64;
        let dofs = self.dof.edge_dofs(j);
        Ok(self.coeffs[dofs[k]] * (1.0 - t) + self.coeffs[dofs[k + 1]] * t)
    }

    /// Grid values of edge `j`, endpoints included.
    pub fn edge_values(&self, j: usize) -> Vec<Complex64> {
        self.dof.edge_dofs(j).iter().map(|&d| self.coeffs[d]).collect()
    }

    /// The common node values `d^u`.
    pub fn nodal_trace(&self) -> CVector {
        self.coeffs.rows(0, self.dof.n_nodes()).into_owned()
    }
}

/// Discretized system on a graph.
#[derive(Debug, Clone)]
pub struct DiscreteSystem {
    pub graph: MetricGraph,
    pub dof: Arc<DofMap>,
    pub c: CouplingField,
    pub m: NodeMatrix,
    pub mass: CMatrix,
    pub stiffness: CMatrix,
    pub node_term: CMatrix,
    pub a_matrix: CMatrix,
    /// `C(x)` Hermitian at every sample and `M` Hermitian; `a_matrix` was
    /// symmetrized.
    pub hermitian: bool,
}

impl DiscreteSystem {
    pub fn total_dofs(&self) -> usize {
        self.dof.total_dofs()
    }

    pub fn h(&self) -> f64 {
        self.dof.h()
    }

    /// `(u | v)` in the mass inner product.
    pub fn inner(&self, u: &CVector, v: &CVector) -> Complex64 {
        (v.adjoint() * (&self.mass * u))[(0, 0)]
    }

    pub fn mass_norm(&self, u: &CVector) -> f64 {
        self.inner(u, u).re.max(0.0).sqrt()
    }

    /// `u* A u`
    pub fn energy(&self, u: &CVector) -> Complex64 {
        (u.adjoint() * (&self.a_matrix * u))[(0, 0)]
    }

    pub fn ones(&self) -> CVector {
        CVector::from_element(self.total_dofs(), Complex64::new(1.0, 0.0))
    }

    pub fn state(&self, coeffs: CVector) -> Result<StateVector> {
        StateVector::new(self.dof.clone(), coeffs)
    }
}

const GAUSS_OFFSET: f64 = 0.288_675_134_594_812_9; // 1 / (2 sqrt 3)

pub fn assemble(
    g: &MetricGraph,
    dof: &DofMap,
    c: &CouplingField,
    m: &NodeMatrix,
) -> Result<DiscreteSystem> {
    let n_edges = g.n_edges();
    if c.m() != n_edges {
        return Err(Error::DimensionMismatch {
            what: "coupling size vs edges",
            expected: n_edges,
            found: c.m(),
        });
    }
    if m.n() != g.n_nodes() {
        return Err(Error::DimensionMismatch {
            what: "node matrix size vs nodes",
            expected: g.n_nodes(),
            found: m.n(),
        });
    }
    if dof.n_edges() != n_edges || dof.n_nodes() != g.n_nodes() {
        return Err(Error::DimensionMismatch {
            what: "dof map vs graph edges",
            expected: n_edges,
            found: dof.n_edges(),
        });
    }
    let nd = dof.total_dofs();
    let h = dof.h();
    let n_el = dof.n_per_edge() + 1;
    let zero = Complex64::new(0.0, 0.0);

    let mut mass = CMatrix::zeros(nd, nd);
    for j in 0..n_edges {
        let dofs = dof.edge_dofs(j);
        for k in 0..n_el {
            let (p, q) = (dofs[k], dofs[k + 1]);
            mass[(p, p)] += h / 3.0;
            mass[(q, q)] += h / 3.0;
            mass[(p, q)] += h / 6.0;
            mass[(q, p)] += h / 6.0;
        }
    }

    let mut stiffness = CMatrix::zeros(nd, nd);
    let sign = [-1.0, 1.0];
    for i in 0..n_edges {
        for j in 0..n_edges {
            let cij = c.entry(i, j);
            if cij.is_zero() {
                continue;
            }
            let (di, dj) = (dof.edge_dofs(i), dof.edge_dofs(j));
            for k in 0..n_el {
                let mid = (k as f64 + 0.5) * h;
                let cbar = (cij.at(mid - GAUSS_OFFSET * h) + cij.at(mid + GAUSS_OFFSET * h)) * 0.5;
                for a in 0..2 {
                    for b in 0..2 {
                        stiffness[(di[k + a], dj[k + b])] += cbar * (sign[a] * sign[b] / h);
                    }
                }
            }
        }
    }

    let mut node_term = CMatrix::zeros(nd, nd);
    let n = g.n_nodes();
    node_term.view_mut((0, 0), (n, n)).copy_from(m.matrix());

    let mut a_matrix = &stiffness - &node_term;
    let hermitian = sample_points(DEFAULT_SAMPLES)
        .into_iter()
        .all(|x| is_hermitian(&c.at(x), ALG_TOL))
        && is_hermitian(m.matrix(), ALG_TOL);
    if hermitian {
        a_matrix = (&a_matrix + a_matrix.adjoint()).scale(0.5);
    }
    debug_assert!(mass.iter().all(|z| z.im == zero.im));

    Ok(DiscreteSystem {
        graph: g.clone(),
        dof: Arc::new(dof.clone()),
        c: c.clone(),
        m: m.clone(),
        mass,
        stiffness,
        node_term,
        a_matrix,
        hermitian,
    })
}

/// Samples `f(j, x)` on every edge grid.
pub fn interpolate<F>(g: &MetricGraph, dof: &Arc<DofMap>, f: F) -> Result<StateVector>
where
    F: Fn(usize, f64) -> Complex64,
{
    let grid = dof.grid();
    let last = dof.n_points() - 1;
    let mut coeffs = CVector::zeros(dof.total_dofs());
    let mut node_vals: Vec<Vec<Complex64>> = vec![Vec::new(); g.n_nodes()];
    for j in 0..g.n_edges() {
        let (t, hd) = g.edge(j);
        node_vals[t].push(f(j, 0.0));
        node_vals[hd].push(f(j, 1.0));
        for k in 1..last {
            coeffs[dof.dof(j, k)] = f(j, grid[k]);
        }
    }
    for (k, vals) in node_vals.iter().enumerate() {
        let spread = vals
            .iter()
            .flat_map(|a| vals.iter().map(move |b| (a - b).norm()))
            .fold(0.0, f64::max);
        if spread > CONTINUITY_TOL {
            return Err(Error::DiscontinuousAtNode { node: k, spread });
        }
        coeffs[k] = vals[0];
    }
    StateVector::new(dof.clone(), coeffs)
}

/// `D⁻¹ Ĩᵀ (f0, f1)` together with the residual `‖Ĩ d − (f0, f1)‖∞`.
pub fn nodal_vector_with_residual(
    f0: &[Complex64],
    f1: &[Complex64],
    g: &MetricGraph,
) -> Result<(CVector, f64)> {
    let m = g.n_edges();
    for (what, v) in [("tail traces", f0), ("head traces", f1)] {
        if v.len() != m {
            return Err(Error::DimensionMismatch {
                what,
                expected: m,
                found: v.len(),
            });
        }
    }
    let mut d = CVector::zeros(g.n_nodes());
    for j in 0..m {
        let (t, h) = g.edge(j);
        d[t] += f0[j];
        d[h] += f1[j];
    }
    for k in 0..g.n_nodes() {
        d[k] /= g.degree(k) as f64;
    }
    let residual = (0..m)
        .map(|j| {
            let (t, h) = g.edge(j);
            (d[t] - f0[j]).norm().max((d[h] - f1[j]).norm())
        })
        .fold(0.0, f64::max);
    Ok((d, residual))
}

pub fn nodal_vector(f0: &[Complex64], f1: &[Complex64], g: &MetricGraph) -> Result<CVector> {
    let (d, residual) = nodal_vector_with_residual(f0, f1, g)?;
    if residual > CONTINUITY_TOL {
        return Err(Error::NotContinuous { residual });
    }
    Ok(d)
}

/// Per-node residual of the generalized Kirchhoff law
/// `Σ_{j∈Γ⁺(k)} (C(0)u′(0))_j − Σ_{j∈Γ⁻(k)} (C(1)u′(1))_j + (M d^u)_k`,
/// with one-sided difference quotients in the direction of the parametrization.
pub fn kirchhoff_residual(u: &StateVector, sys: &DiscreteSystem) -> CVector {
    let dof = &sys.dof;
    let g = &sys.graph;
    let h = dof.h();
    let last = dof.n_points() - 1;
    let m = g.n_edges();
    let du0 = CVector::from_iterator(
        m,
        (0..m).map(|j| (u.coeffs[dof.dof(j, 1)] - u.coeffs[dof.dof(j, 0)]) / h),
    );
    let du1 = CVector::from_iterator(
        m,
        (0..m).map(|j| (u.coeffs[dof.dof(j, last)] - u.coeffs[dof.dof(j, last - 1)]) / h),
    );
    let flux0 = sys.c.at(0.0) * du0;
    let flux1 = sys.c.at(1.0) * du1;
    let mut r = sys.m.matrix() * u.nodal_trace();
    for j in 0..m {
        let (t, hd) = g.edge(j);
        r[t] += flux0[j];
        r[hd] -= flux1[j];
    }
    r
}

pub fn kirchhoff_residual_norm(u: &StateVector, sys: &DiscreteSystem) -> f64 {
    max_abs_vec(&kirchhoff_residual(u, sys))
}
