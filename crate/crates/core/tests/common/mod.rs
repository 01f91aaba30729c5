#![allow(dead_code)]

use netflowsym_core::coupling::{CouplingField, NodeMatrix};
use netflowsym_core::graph::MetricGraph;
use netflowsym_core::{CMatrix, Complex64};
use proptest::prelude::*;

pub fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// Builds a graph from raw pairs; self-loops are dropped and isolated nodes
/// are attached to their successor.
pub fn graph_from_raw(n: usize, raw: &[(usize, usize)]) -> MetricGraph {
    let mut edges: Vec<(usize, usize)> = raw
        .iter()
        .map(|&(a, b)| (a % n, b % n))
        .filter(|(a, b)| a != b)
        .collect();
    for v in 0..n {
        if !edges.iter().any(|&(a, b)| a == v || b == v) {
            edges.push((v, (v + 1) % n));
        }
    }
    MetricGraph::new(n, &edges).expect("valid by construction")
}

pub fn arb_graph(max_nodes: usize, max_edges: usize) -> impl Strategy<Value = MetricGraph> {
    (2..=max_nodes).prop_flat_map(move |n| {
        prop::collection::vec((0..n, 0..n), 1..=max_edges).prop_map(move |raw| graph_from_raw(n, &raw))
    })
}

pub fn arb_complex() -> impl Strategy<Value = Complex64> {
    (-1.0..1.0f64, -1.0..1.0f64).prop_map(|(a, b)| Complex64::new(a, b))
}

pub fn arb_matrix(rows: usize, cols: usize) -> impl Strategy<Value = CMatrix> {
    prop::collection::vec(arb_complex(), rows * cols)
        .prop_map(move |v| CMatrix::from_row_slice(rows, cols, &v))
}

/// Hermitian positive definite: `B B* + shift·Id`.
pub fn hermitian_pd(b: &CMatrix, shift: f64) -> CMatrix {
    let m = b.nrows();
    b * b.adjoint() + CMatrix::identity(m, m).scale(shift)
}

/// Hermitian negative semidefinite `-B B*`.
pub fn dissipative(b: &CMatrix) -> NodeMatrix {
    NodeMatrix::new(-(b * b.adjoint())).unwrap()
}

pub fn coupling(c: &CMatrix) -> CouplingField {
    CouplingField::constant(c).unwrap()
}
