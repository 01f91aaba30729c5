mod common;

use std::f64::consts::PI;
use std::sync::Arc;

use common::{arb_graph, arb_matrix, coupling, hermitian_pd, re};
use netflowsym_core::assembly::{assemble, build_dof_map, interpolate, kirchhoff_residual_norm, StateVector};
use netflowsym_core::coupling::{uniform_ellipticity, CouplingField, NodeMatrix, ScalarFn, DEFAULT_SAMPLES};
use netflowsym_core::evolution::{simulate_parabolic, Scheme};
use netflowsym_core::linalg::{hermitian_eigenvalues, hermitian_part, max_abs_vec};
use netflowsym_core::MetricGraph;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn dof_map_shares_node_values(g in arb_graph(5, 7), n in 0usize..5) {
        let dof = build_dof_map(&g, n);
        prop_assert_eq!(dof.total_dofs(), g.n_nodes() + g.n_edges() * n);
        let mut seen = vec![false; dof.total_dofs()];
        for j in 0..g.n_edges() {
            let (t, h) = g.edge(j);
            prop_assert_eq!(dof.dof(j, 0), t);
            prop_assert_eq!(dof.dof(j, n + 1), h);
            for &d in dof.edge_dofs(j) {
                seen[d] = true;
            }
        }
        prop_assert!(seen.iter().all(|&s| s));
    }

    #[test]
    fn hermitian_data_gives_bitwise_hermitian_operator(
        (g, b, mb) in arb_graph(4, 5).prop_flat_map(|g| {
            let (e, n) = (g.n_edges(), g.n_nodes());
            (Just(g), arb_matrix(e, e), arb_matrix(n, n))
        }),
        n in 1usize..6,
    ) {
        let c = coupling(&hermitian_pd(&b, 0.1));
        let m = NodeMatrix::new(&mb + mb.adjoint()).unwrap();
        let sys = assemble(&g, &build_dof_map(&g, n), &c, &m).unwrap();
        prop_assert!(sys.hermitian);
        prop_assert_eq!(sys.a_matrix.clone(), sys.a_matrix.adjoint());
        prop_assert!(hermitian_eigenvalues(&sys.mass)[0] > 0.0);
    }

    #[test]
    fn coercive_coefficients_give_accretive_stiffness(
        (g, b) in arb_graph(4, 5).prop_flat_map(|g| { let e = g.n_edges(); (Just(g), arb_matrix(e, e)) }),
        skew in -1.0..1.0f64,
    ) {
        let e = g.n_edges();
        let mut cm = hermitian_pd(&b, 0.05);
        if e > 1 {
            cm[(0, 1)] += re(skew);
            cm[(1, 0)] -= re(skew);
        }
        let c = coupling(&cm);
        prop_assert!(uniform_ellipticity(&c, DEFAULT_SAMPLES).0);
        let sys = assemble(&g, &build_dof_map(&g, 3), &c, &NodeMatrix::zeros(g.n_nodes())).unwrap();
        let lo = hermitian_eigenvalues(&hermitian_part(&sys.a_matrix))[0];
        prop_assert!(lo >= -1e-10, "smallest eigenvalue {lo}");
        prop_assert!(max_abs_vec(&(&sys.a_matrix * sys.ones())) < 1e-11);
    }

    #[test]
    fn node_term_acts_on_constants(g in arb_graph(4, 5), n in 0usize..4, s in -2.0..2.0f64) {
        let m = NodeMatrix::scaled_identity(g.n_nodes(), s);
        let sys = assemble(&g, &build_dof_map(&g, n), &CouplingField::identity(g.n_edges()), &m).unwrap();
        let r = &sys.a_matrix * sys.ones() + &sys.node_term * sys.ones();
        prop_assert!(max_abs_vec(&r) < 1e-11);
    }
}

/// `a(f, g)` for smooth data on the 2-star with an x-dependent coefficient,
/// by composite Simpson quadrature.
fn exact_form() -> f64 {
    let n = 20_000;
    let mut acc = 0.0;
    for k in 0..=n {
        let x = k as f64 / n as f64;
        let w = if k == 0 || k == n { 1.0 } else if k % 2 == 1 { 4.0 } else { 2.0 };
        let c = [[1.0 + x, 0.5], [0.5 * x, 2.0]];
        let df = [-PI * (PI * x).sin() + 1.0, -2.0 * PI * (2.0 * PI * x).sin()];
        let dg = [PI * (PI * x).cos(), 2.0 * x];
        let mut s = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                s += c[i][j] * df[j] * dg[i];
            }
        }
        acc += w * s;
    }
    let integral = acc / (3.0 * n as f64);
    // nodal values: f = (1, 0, 1), g = (1, 1, 2)
    let (df, dg) = ([1.0, 0.0, 1.0], [1.0, 1.0, 2.0]);
    let m = [[-1.0, 0.2, 0.0], [0.2, 0.0, 0.0], [0.0, 0.0, 0.3]];
    let mut node = 0.0;
    for k in 0..3 {
        for l in 0..3 {
            node += m[k][l] * df[l] * dg[k];
        }
    }
    integral - node
}

#[test]
fn discrete_form_converges_quadratically() {
    let g = MetricGraph::from_edges(&[(0, 1), (0, 2)]).unwrap();
    let c = CouplingField::new(
        2,
        vec![
            ScalarFn::Poly(vec![re(1.0), re(1.0)]),
            ScalarFn::Constant(re(0.5)),
            ScalarFn::Poly(vec![re(0.0), re(0.5)]),
            ScalarFn::Constant(re(2.0)),
        ],
    )
    .unwrap();
    let m = NodeMatrix::from_real(3, &[-1.0, 0.2, 0.0, 0.2, 0.0, 0.0, 0.0, 0.0, 0.3]).unwrap();
    let exact = exact_form();
    let mut errs = Vec::new();
    for n in [7, 15, 31, 63] {
        let dof = Arc::new(build_dof_map(&g, n));
        let sys = assemble(&g, &dof, &c, &m).unwrap();
        let f = interpolate(&g, &dof, |j, x| re(if j == 0 { (PI * x).cos() + x } else { (2.0 * PI * x).cos() })).unwrap();
        let gg = interpolate(&g, &dof, |j, x| re(if j == 0 { (PI * x).sin() + 1.0 } else { 1.0 + x * x })).unwrap();
        let val = (gg.coeffs.adjoint() * &sys.a_matrix * &f.coeffs)[(0, 0)];
        errs.push((val.re - exact).abs());
    }
    for w in errs.windows(2) {
        let ratio = w[0] / w[1];
        assert!(ratio > 3.5 && ratio < 4.5, "errors {errs:?}");
    }
}

#[test]
fn kirchhoff_residual_of_steady_state_vanishes_with_h() {
    // u = x on every edge of an outbound star, with C chosen so the flux balances
    let g = MetricGraph::from_edges(&[(0, 1), (0, 2)]).unwrap();
    let mut residuals = Vec::new();
    for n in [7, 15, 31] {
        let dof = Arc::new(build_dof_map(&g, n));
        // node 0 carries the outflow, nodes 1, 2 the inflow through M
        let m = NodeMatrix::from_real(3, &[-2.0, 0.0, 0.0, 0.0, 0.5, 0.0, 0.0, 0.0, 0.5]).unwrap();
        let sys = assemble(&g, &dof, &CouplingField::identity(2), &m).unwrap();
        // stationary profile u_j(x) = 1/2 + x/2 satisfies -u'' = 0 and the node law
        let u = interpolate(&g, &dof, |_, x| re(0.5 + 0.5 * x)).unwrap();
        residuals.push(kirchhoff_residual_norm(&u, &sys));
        let tr = simulate_parabolic(&sys, &u, 0.01, 0.0, Scheme::CrankNicolson).unwrap();
        assert_eq!(tr.len(), 1);
    }
    assert!(residuals.iter().all(|&r| r < 1e-12), "{residuals:?}");

    // a genuinely evolving solution: residual of the long-time limit decreases with h
    let mut late = Vec::new();
    for n in [7, 15, 31] {
        let dof = Arc::new(build_dof_map(&g, n));
        let m = NodeMatrix::from_real(3, &[-1.0, 0.0, 0.0, 0.0, -1.0, 0.0, 0.0, 0.0, -1.0]).unwrap();
        let c = CouplingField::constant_real(2, &[2.0, 0.5, 0.5, 1.0]).unwrap();
        let sys = assemble(&g, &dof, &c, &m).unwrap();
        let u0 = interpolate(&g, &dof, |j, x| re(1.0 + (j as f64 + 1.0) * x * x)).unwrap();
        let tr = simulate_parabolic(&sys, &u0, 0.01, 0.3, Scheme::BackwardEuler).unwrap();
        let u = StateVector::new(dof.clone(), tr.last_state().clone()).unwrap();
        let scale = max_abs_vec(&u.coeffs);
        late.push(kirchhoff_residual_norm(&u, &sys) / scale);
    }
    assert!(late[2] < late[1] && late[1] < late[0], "{late:?}");
}
