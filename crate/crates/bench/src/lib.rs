//! Fixtures shared by the benchmarks.

use std::sync::Arc;

use netflowsym_core::assembly::{assemble, build_dof_map, interpolate, DiscreteSystem, StateVector};
use netflowsym_core::{Complex64, CouplingField, MetricGraph, NodeMatrix};

/// Directed cycle on `n` nodes.
pub fn cycle(n: usize) -> MetricGraph {
    MetricGraph::from_edges(&(0..n).map(|v| (v, (v + 1) % n)).collect::<Vec<_>>()).expect("cycle is valid")
}

/// Outbound star with `m` leaves.
pub fn star(m: usize) -> MetricGraph {
    MetricGraph::from_edges(&(1..=m).map(|v| (0, v)).collect::<Vec<_>>()).expect("star is valid")
}

/// Tridiagonal real coupling, diagonally dominant.
pub fn banded_coupling(m: usize) -> CouplingField {
    let mut rows = vec![0.0; m * m];
    for i in 0..m {
        rows[i * m + i] = 3.0 + i as f64 / m as f64;
        if i + 1 < m {
            rows[i * m + i + 1] = 0.5;
            rows[(i + 1) * m + i] = 0.5;
        }
    }
    CouplingField::constant_real(m, &rows).expect("square")
}

pub fn system(g: &MetricGraph, n_per_edge: usize) -> DiscreteSystem {
    let dof = build_dof_map(g, n_per_edge);
    assemble(g, &dof, &banded_coupling(g.n_edges()), &NodeMatrix::scaled_identity(g.n_nodes(), -0.5))
        .expect("consistent sizes")
}

/// Smooth node-continuous initial datum.
pub fn initial(sys: &DiscreteSystem) -> StateVector {
    let g = &sys.graph;
    let d: Vec<f64> = (0..g.n_nodes()).map(|v| (v as f64).cos()).collect();
    let (t, h) = (g.tails().to_vec(), g.heads().to_vec());
    let dof: &Arc<_> = &sys.dof;
    interpolate(g, dof, |j, x| Complex64::new(d[t[j]] * (1.0 - x) + d[h[j]] * x, 0.0)).expect("continuous")
}
