//! Acceptance suite: one PASS/FAIL line per criterion.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

use netflowsym_core::assembly::{assemble, build_dof_map, interpolate, DiscreteSystem, StateVector};
use netflowsym_core::coupling::{CouplingField, NodeMatrix};
use netflowsym_core::evolution::{
    default_probe_dt, positivity_probe, simulate_parabolic, simulate_parabolic_with, simulate_schrodinger_with,
    Scheme, SimulationOptions,
};
use netflowsym_core::graph::{enumerate_oriented, MetricGraph};
use netflowsym_core::linalg::generalized_hermitian_eigenvalues;
use netflowsym_core::symmetry::{
    averaging_projection, bipartite_alpha_check, brute_force_admissible, check_admissible, check_c_orthogonal,
    check_m_orthogonal, continuity_violation, full_report, krylov_projection, layer_projection,
    m_orthogonality_defect, one_is_eigenvector, random_one_projection, random_projection, EdgeProjection,
    NumericSettings, NumericVerdict,
};
use netflowsym_core::{CMatrix, CVector, Complex64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = (bool, String);
type Criterion = (&'static str, fn() -> Outcome);

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn sweep() -> Vec<MetricGraph> {
    enumerate_oriented(2, 4, 5)
}

fn system(g: &MetricGraph, n_per_edge: usize, c: &CouplingField, m: &NodeMatrix) -> DiscreteSystem {
    assemble(g, &build_dof_map(g, n_per_edge), c, m).expect("consistent dimensions")
}

/// Random partition of `0..m` into groups, for block-averaging projections.
fn random_groups<R: Rng>(m: usize, rng: &mut R) -> Vec<usize> {
    let k = rng.random_range(1..=m);
    (0..m).map(|_| rng.random_range(0..k)).collect()
}

fn sweep_projections<R: Rng>(g: &MetricGraph, rng: &mut R) -> Vec<EdgeProjection> {
    let m = g.n_edges();
    let mut out = Vec::with_capacity(24);
    for t in 0..20 {
        let complex = t % 2 == 1;
        let p = match t % 5 {
            0 => random_projection(m, rng.random_range(0..=m), complex, rng),
            1 => random_one_projection(m, rng.random_range(1..=m), true, complex, rng),
            2 => random_one_projection(m, rng.random_range(1..=m), false, complex, rng),
            3 => EdgeProjection::block_averaging(&random_groups(m, rng)),
            _ => EdgeProjection::block_averaging(&random_groups(m, rng)).complement(),
        };
        out.push(p);
    }
    out.push(averaging_projection(m));
    if let Ok(p) = layer_projection(g) {
        out.push(p);
    }
    out
}

fn criterion_1() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let (mut pairs, mut agree, mut admissible) = (0usize, 0usize, 0usize);
    let graphs = sweep();
    for (gi, g) in graphs.iter().enumerate() {
        for (pi, k) in sweep_projections(g, &mut rng).iter().enumerate() {
            let alg = check_admissible(k, g).unwrap();
            let bf = brute_force_admissible(k, g, 200, (gi * 1000 + pi) as u64).unwrap();
            pairs += 1;
            agree += usize::from(alg == bf);
            admissible += usize::from(alg);
        }
    }
    (
        agree == pairs,
        format!("{agree}/{pairs} pairs agree over {} graphs ({admissible} admissible)", graphs.len()),
    )
}

fn criterion_2() -> Outcome {
    let graphs = sweep();
    let matches = graphs
        .iter()
        .filter(|g| {
            let c = g.classify();
            check_admissible(&averaging_projection(g.n_edges()), g).unwrap() == (c.bipartite || c.eulerian)
        })
        .count();
    let star = MetricGraph::from_edges(&[(0, 1), (0, 2)]).unwrap();
    let cycle = MetricGraph::from_edges(&[(0, 1), (1, 2), (2, 0)]).unwrap();
    let mixed = MetricGraph::from_edges(&[(0, 1), (1, 2), (0, 2)]).unwrap();
    let named = check_admissible(&averaging_projection(2), &star).unwrap()
        && check_admissible(&averaging_projection(3), &cycle).unwrap()
        && !check_admissible(&averaging_projection(3), &mixed).unwrap();
    (
        matches == graphs.len() && named,
        format!("{matches}/{} graphs match; named cases ok = {named}", graphs.len()),
    )
}

/// Candidate projections with `K𝟙 ∈ {0, 𝟙}`: pair averages, random ones and
/// their complements.
fn one_eigen_candidates<R: Rng>(m: usize, rng: &mut R) -> Vec<EdgeProjection> {
    let mut out = Vec::new();
    for a in 0..m {
        for b in a + 1..m {
            let groups: Vec<usize> = (0..m).map(|j| if j == b { a } else { j }).collect();
            out.push(EdgeProjection::block_averaging(&groups));
        }
    }
    for t in 0..30 {
        out.push(random_one_projection(m, rng.random_range(1..=m), t % 2 == 0, t % 3 == 0, rng));
    }
    let complements: Vec<_> = out.iter().map(EdgeProjection::complement).collect();
    out.extend(complements);
    out
}

fn criterion_3() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut checked = 0;
    let mut mismatches = Vec::new();
    for g in sweep().iter().filter(|g| g.is_simple()) {
        let is_star = g.classify().star.is_some();
        let cands = one_eigen_candidates(g.n_edges(), &mut rng);
        debug_assert!(cands.iter().all(one_is_eigenvector));
        let all_ok = cands.iter().enumerate().all(|(i, k)| {
            let alg = check_admissible(k, g).unwrap();
            // the sampling oracle must agree on every candidate
            alg && brute_force_admissible(k, g, 50, i as u64).unwrap()
        });
        checked += 1;
        if all_ok != is_star {
            mismatches.push(format!("{:?}", g.edges()));
        }
    }

    let cycle = MetricGraph::from_edges(&[(0, 1), (1, 2), (2, 0)]).unwrap();
    let l_cycle = EdgeProjection::from_real(3, &[0.5, 0.5, 0.0, 0.5, 0.5, 0.0, 0.0, 0.0, 1.0]).unwrap();
    let line = MetricGraph::from_edges(&[(0, 1), (2, 1), (2, 3)]).unwrap();
    let l_line = EdgeProjection::from_real(3, &[0.5, 0.0, 0.5, 0.0, 1.0, 0.0, 0.5, 0.0, 0.5]).unwrap();
    let rejected = !check_admissible(&l_cycle, &cycle).unwrap() && !check_admissible(&l_line, &line).unwrap();
    let w_cycle = continuity_violation(&l_cycle, &cycle, |j, x| re([x, 1.0 - x, 0.0][j])).unwrap();
    let w_line = continuity_violation(&l_line, &line, |j, x| re([x, x, 0.0][j])).unwrap();
    let witnesses = w_cycle > 1e-8 && w_line > 1e-8;
    let image = l_line.apply(&[re(0.7), re(0.7), re(0.0)]);
    let image_ok = (image[0] - re(0.35)).norm() < 1e-15
        && (image[1] - re(0.7)).norm() < 1e-15
        && (image[2] - re(0.35)).norm() < 1e-15;
    (
        mismatches.is_empty() && rejected && witnesses && image_ok,
        format!(
            "{}/{checked} simple graphs match; counterexamples rejected = {rejected}; witness residuals {w_cycle:.3}, {w_line:.3}{}",
            checked - mismatches.len(),
            if mismatches.is_empty() { String::new() } else { format!("; mismatches {mismatches:?}") }
        ),
    )
}

/// L² distance on one edge between the P1 function and `exact`, with
/// three-point Gauss quadrature per element.
fn l2_error(u: &StateVector, exact: impl Fn(f64) -> f64) -> f64 {
    let dof = u.dof_map();
    let h = dof.h();
    let nodes = [-(0.6f64).sqrt(), 0.0, (0.6f64).sqrt()];
    let weights = [5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0];
    let mut acc = 0.0;
    for k in 0..dof.n_per_edge() + 1 {
        let mid = (k as f64 + 0.5) * h;
        for (s, w) in nodes.iter().zip(weights) {
            let x = mid + s * h / 2.0;
            let d = u.evaluate(0, x).unwrap().re - exact(x);
            acc += w * d * d * h / 2.0;
        }
    }
    acc.sqrt()
}

fn criterion_4() -> Outcome {
    let g = MetricGraph::from_edges(&[(0, 1)]).unwrap();
    let t = 0.1;
    let mut errors = Vec::new();
    for (n_inv, steps) in [(16usize, 2usize), (32, 4), (64, 8)] {
        let sys = system(&g, n_inv - 1, &CouplingField::identity(1), &NodeMatrix::zeros(2));
        let u0 = interpolate(&g, &sys.dof, |_, x| re((PI * x).cos())).unwrap();
        let tr = simulate_parabolic(&sys, &u0, t / steps as f64, t, Scheme::CrankNicolson).unwrap();
        let u = sys.state(tr.last_state().clone()).unwrap();
        errors.push(l2_error(&u, |x| (-PI * PI * t).exp() * (PI * x).cos()));
    }
    let ratios = [errors[0] / errors[1], errors[1] / errors[2]];
    (
        ratios.iter().all(|r| (3.5..=4.5).contains(r)),
        format!(
            "errors {:.3e}, {:.3e}, {:.3e}; ratios {:.3}, {:.3}",
            errors[0], errors[1], errors[2], ratios[0], ratios[1]
        ),
    )
}

fn criterion_5() -> Outcome {
    let n_per_edge = 15;
    let h = 1.0 / (n_per_edge + 1) as f64;
    let dt = default_probe_dt(h);
    let star = MetricGraph::from_edges(&[(0, 1), (0, 2)]).unwrap();
    let cycle = MetricGraph::from_edges(&[(0, 1), (1, 2), (2, 0)]).unwrap();
    let diag_cases = [
        (star.clone(), CouplingField::diagonal(&[1.0, 2.0])),
        (cycle, CouplingField::diagonal(&[1.0, 1.5, 2.0])),
    ];
    let mut diag_min = f64::INFINITY;
    for (g, c) in &diag_cases {
        let sys = system(g, n_per_edge, c, &NodeMatrix::zeros(g.n_nodes()));
        let r = positivity_probe(&sys, 50, dt, 0.5, 5).unwrap();
        diag_min = diag_min.min(r.min_value_seen);
    }
    let coupled = CouplingField::constant_real(2, &[2.0, 1.0, 1.0, 2.0]).unwrap();
    let sys = system(&star, n_per_edge, &coupled, &NodeMatrix::zeros(3));
    let r = positivity_probe(&sys, 50, dt, 0.5, 5).unwrap();
    (
        diag_min >= -1e-8 && r.min_value_seen <= -1e-4,
        format!("diagonal min {diag_min:.3e}; coupled min {:.3e}", r.min_value_seen),
    )
}

fn criterion_6() -> Outcome {
    let g = MetricGraph::from_edges(&[(0, 1), (0, 2), (1, 2)]).unwrap();
    let c = CouplingField::constant_real(3, &[2.0, 0.5, 0.0, 0.5, 1.5, 0.2, 0.0, 0.2, 1.0]).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(6);

    let sys = system(&g, 15, &c, &NodeMatrix::scaled_identity(3, -1.0));
    let lambda = generalized_hermitian_eigenvalues(&sys.a_matrix, &sys.mass).unwrap()[0];
    let u0 = CVector::from_fn(sys.total_dofs(), |_, _| re(rng.random::<f64>()));
    let t_end = 3.0;
    let tr = simulate_parabolic_with(&sys, &u0, &SimulationOptions::new(0.01, t_end), Scheme::CrankNicolson).unwrap();
    let mid = tr.times.iter().position(|&t| t >= t_end / 2.0 - 1e-12).unwrap();
    let last = tr.len() - 1;
    let rate = (tr.observables[mid].l2 / tr.observables[last].l2).ln() / (tr.times[last] - tr.times[mid]);
    let rel = (rate - lambda).abs() / lambda;
    let decay_ok = rate > 0.0 && rel <= 0.2;

    let sys = system(&g, 15, &c, &NodeMatrix::zeros(3));
    let tr = simulate_parabolic_with(&sys, &u0, &SimulationOptions::new(0.01, 1.0), Scheme::CrankNicolson).unwrap();
    let monotone = tr.observables.windows(2).all(|w| w[1].l2 <= w[0].l2 + 1e-10);
    let ones = sys.ones();
    let m0 = sys.inner(&tr.states[0], &ones);
    let drift = tr.states.iter().map(|u| (sys.inner(u, &ones) - m0).norm()).fold(0.0, f64::max);
    (
        decay_ok && monotone && drift <= 1e-9,
        format!(
            "rate {rate:.5} vs eigenvalue {lambda:.5} (rel {rel:.2e}); M = 0: monotone = {monotone}, mass drift {drift:.2e}"
        ),
    )
}

fn criterion_7() -> Outcome {
    let g = MetricGraph::from_edges(&[(0, 1), (1, 2), (2, 0)]).unwrap();
    let c = CouplingField::constant(&CMatrix::from_row_slice(
        3,
        3,
        &[
            re(2.0),
            Complex64::new(0.0, 0.5),
            re(0.0),
            Complex64::new(0.0, -0.5),
            re(2.0),
            Complex64::new(0.3, 0.1),
            re(0.0),
            Complex64::new(0.3, -0.1),
            re(1.5),
        ],
    ))
    .unwrap();
    let m = NodeMatrix::new(CMatrix::from_row_slice(
        3,
        3,
        &[
            re(-1.0),
            Complex64::new(0.2, 0.3),
            re(0.0),
            Complex64::new(0.2, -0.3),
            re(0.5),
            re(0.1),
            re(0.0),
            re(0.1),
            re(-0.4),
        ],
    ))
    .unwrap();
    let sys = system(&g, 15, &c, &m);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut u0 = CVector::from_fn(sys.total_dofs(), |_, _| Complex64::new(rng.random(), rng.random()));
    u0 /= Complex64::new(sys.mass_norm(&u0), 0.0);
    let tr = simulate_schrodinger_with(&sys, &u0, &SimulationOptions::new(1e-3, 1.0)).unwrap();
    let steps = tr.len() - 1;
    let drift = tr.observables.windows(2).map(|w| (w[1].l2 - w[0].l2).abs()).fold(0.0, f64::max);
    (
        sys.hermitian && steps == 1000 && drift < 1e-10,
        format!("{steps} steps, max per-step drift {drift:.2e}"),
    )
}

fn criterion_8() -> Outcome {
    let star = MetricGraph::from_edges(&[(0, 1), (0, 2)]).unwrap();
    let settings = NumericSettings::default();
    let cases = [
        ("identity coefficient", CouplingField::identity(2), true),
        ("diag(1,2)", CouplingField::diagonal(&[1.0, 2.0]), false),
    ];
    let mut ok = true;
    let mut parts = Vec::new();
    for (name, c, expected) in cases {
        let r = full_report(&star, &c, &NodeMatrix::zeros(3), &averaging_projection(2), Some(&settings)).unwrap();
        let n = r.numeric.as_ref().unwrap();
        let want = if expected { NumericVerdict::Invariant } else { NumericVerdict::NotInvariant };
        let case_ok = r.invariant == expected
            && n.parabolic_verdict == Some(want)
            && n.schrodinger_verdict == Some(want)
            && n.agrees;
        ok &= case_ok;
        parts.push(format!(
            "{name}: invariant={} parabolic {:.2e} schrodinger {:.2e}",
            r.invariant,
            n.parabolic_defect.unwrap(),
            n.schrodinger_defect.unwrap()
        ));
    }
    (ok, format!("bound {:.2e}; {}", settings.bound(), parts.join("; ")))
}

fn criterion_9() -> Outcome {
    let g = MetricGraph::from_edges(&[(0, 2), (0, 3), (1, 2), (1, 3)]).unwrap();
    let alpha = [[-1.0, 0.5], [0.3, -2.0]];
    let blocks = [
        [[0.3, 0.7], [0.6, 0.4]],
        [[0.5, 0.5], [0.1, 0.9]],
        [[1.0, 0.0], [0.25, 0.75]],
        [[0.2, 0.8], [0.7, 0.3]],
    ];
    let mut rows = [0.0; 16];
    for p in 0..2 {
        for q in 0..2 {
            let b = blocks[2 * p + q];
            for i in 0..2 {
                for j in 0..2 {
                    rows[(2 * p + i) * 4 + 2 * q + j] = alpha[p][q] * b[i][j];
                }
            }
        }
    }
    let m = NodeMatrix::from_real(4, &rows).unwrap();
    let k = averaging_projection(4);
    let table = bipartite_alpha_check(&m, &g).unwrap();
    let table_ok = table.is_some_and(|t| {
        (0..2).all(|p| (0..2).all(|q| (t[p][q] - re(alpha[p][q] / 2.0)).norm() < 1e-12))
    });
    let (orth, _) = check_m_orthogonal(&k, &m, &g).unwrap();
    let direct = m_orthogonality_defect(&k, &m, &g).unwrap();

    rows[1] += 0.1;
    let perturbed = NodeMatrix::from_real(4, &rows).unwrap();
    let table_p = bipartite_alpha_check(&perturbed, &g).unwrap();
    let (orth_p, _) = check_m_orthogonal(&k, &perturbed, &g).unwrap();
    let direct_p = m_orthogonality_defect(&k, &perturbed, &g).unwrap();
    (
        table_ok && orth && direct < 1e-12 && table_p.is_none() && !orth_p && direct_p > 1e-3,
        format!(
            "consistent: table={table_ok} orthogonal={orth} (form defect {direct:.1e}); perturbed: table={} orthogonal={orth_p} (form defect {direct_p:.1e})",
            table_p.is_some()
        ),
    )
}

fn criterion_10() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let graphs: Vec<MetricGraph> = sweep().into_iter().filter(|g| g.n_edges() >= 2).collect();
    let mut tried = 0;
    let mut counterexamples = 0;
    while tried < 1000 {
        let g = &graphs[rng.random_range(0..graphs.len())];
        let m = g.n_edges();
        let diag: Vec<f64> = (0..m).map(|i| 1.0 + i as f64 + rng.random::<f64>() * 0.5).collect();
        let c = CouplingField::diagonal(&diag);
        let k = match tried % 3 {
            0 => random_one_projection(m, rng.random_range(1..=m), rng.random(), rng.random(), &mut rng),
            1 => EdgeProjection::block_averaging(&random_groups(m, &mut rng)),
            _ => {
                // coordinate subspaces commute with C; keep those with 𝟙 as eigenvector
                let mask: Vec<f64> = (0..m).map(|_| f64::from(rng.random_range(0..2u8))).collect();
                let d = CVector::from_iterator(m, mask.iter().map(|&x| re(x)));
                EdgeProjection::new(CMatrix::from_diagonal(&d)).unwrap()
            }
        };
        if !one_is_eigenvector(&k) {
            continue;
        }
        tried += 1;
        let trivial = k.rank() == 0 || k.rank() == m;
        if !trivial && check_c_orthogonal(&k, &c, 16).unwrap() {
            counterexamples += 1;
        }
    }

    let repeated = CouplingField::diagonal(&[1.0, 2.0, 1.0, 3.0]);
    let kry = krylov_projection(&repeated.evaluate(0.0).unwrap());
    let krylov_ok = check_c_orthogonal(&kry, &repeated, 16).unwrap() && kry.rank() == 3 && one_is_eigenvector(&kry);
    (
        counterexamples == 0 && krylov_ok,
        format!("{tried} projections, {counterexamples} nontrivial passing; repeated-entry Krylov projection ok = {krylov_ok}"),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("admissibility oracle agreement", criterion_1),
        ("averaging admissible iff bipartite or Eulerian", criterion_2),
        ("stars are exactly the graphs admitting every 1-eigenvector projection", criterion_3),
        ("Crank-Nicolson heat convergence", criterion_4),
        ("positivity dichotomy", criterion_5),
        ("stability flags vs dynamics", criterion_6),
        ("Schrodinger unitarity", criterion_7),
        ("parabolic and Schrodinger invariance agree with algebra", criterion_8),
        ("bipartite alpha table and stochastic blocks", criterion_9),
        ("distinct diagonal coefficients admit no nontrivial symmetry", criterion_10),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (ok, detail) = run();
        failed += usize::from(!ok);
        println!(
            "{} [{}] {name}: {detail} ({:.2} s)",
            if ok { "PASS" } else { "FAIL" },
            i + 1,
            start.elapsed().as_secs_f64()
        );
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
