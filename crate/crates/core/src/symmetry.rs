//! Invariance of subspaces of the form `{f : f(x) ∈ Range K for all x}`
//! under the parabolic and Schrödinger evolutions.
//!
//! An orthogonal projection `K` on ℂᵐ acts pointwise on edge vectors. The
//! induced subspace is invariant iff three conditions hold:
//!
//! * admissibility: pointwise application of `K` preserves node continuity,
//! * `C(x)` leaves `Range K` invariant at every `x`,
//! * the node matrix satisfies the range condition `Range 𝓜 K̃ Ĩ ⊆ Range K̃`
//!   with `𝓜 = Ĩ D⁻¹ M D⁻¹ Ĩᵀ`.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::assembly::{
    assemble, build_dof_map, interpolate, nodal_vector_with_residual, DiscreteSystem, StateVector,
    CONTINUITY_TOL,
};
use crate::coupling::{CouplingField, NodeMatrix, DEFAULT_SAMPLES};
use crate::error::{Error, Result};
use crate::evolution::{propagate, Mode};
use crate::graph::{find_layers, numbering_from, MetricGraph};
use crate::linalg::{block_diag2, int_to_complex, max_abs, max_abs_vec, projector_onto, range_contains, rank};
use crate::{CMatrix, CVector};

/// Tolerance of the algebraic symmetry checks.
pub const SYM_TOL: f64 = 1e-10;
/// Continuity tolerance of the sampling oracle.
pub const BRUTE_FORCE_TOL: f64 = 1e-8;

fn one() -> Complex64 {
    Complex64::new(1.0, 0.0)
}

/// Entries of a projection lie in the unit disc; parts below this are
/// rounding noise.
const SNAP_TOL: f64 = 1e-14;

/// Zeroes rounding-level real and imaginary parts, so that a numerically
/// zero projection is exactly zero for the relative rank tests.
fn snap(k: CMatrix) -> CMatrix {
    let chop = |x: f64| if x.abs() <= SNAP_TOL { 0.0 } else { x };
    k.map(|z| Complex64::new(chop(z.re), chop(z.im)))
}

/// An orthogonal projection on ℂᵐ acting pointwise on edge values.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeProjection {
    k: CMatrix,
}

impl EdgeProjection {
    /// Accepts `k` if `K² = K` and `K* = K` within `1e-10`.
    pub fn new(k: CMatrix) -> Result<Self> {
        if !k.is_square() {
            return Err(Error::DimensionMismatch {
                what: "projection columns",
                expected: k.nrows(),
                found: k.ncols(),
            });
        }
        let defect = max_abs(&(&k * &k - &k)).max(max_abs(&(&k - k.adjoint())));
        if defect > SYM_TOL {
            return Err(Error::NotProjection { defect });
        }
        Ok(Self { k: snap(k) })
    }

    pub fn from_real(m: usize, rows: &[f64]) -> Result<Self> {
        if rows.len() != m * m {
            return Err(Error::DimensionMismatch {
                what: "projection entries",
                expected: m * m,
                found: rows.len(),
            });
        }
        Self::new(CMatrix::from_row_iterator(m, m, rows.iter().map(|&x| Complex64::new(x, 0.0))))
    }

    /// Projection onto the span of the columns of `basis`.
    pub fn from_basis(basis: &CMatrix) -> Self {
        Self {
            k: snap(projector_onto(basis)),
        }
    }

    pub fn identity(m: usize) -> Self {
        Self {
            k: CMatrix::identity(m, m),
        }
    }

    pub fn zero(m: usize) -> Self {
        Self {
            k: CMatrix::zeros(m, m),
        }
    }

    /// All entries `1/m`.
    pub fn averaging(m: usize) -> Self {
        Self {
            k: CMatrix::from_element(m, m, Complex64::new(1.0 / m as f64, 0.0)),
        }
    }

    /// Averaging within groups of edges; `groups[j]` is the group of edge `j`.
    pub fn block_averaging(groups: &[usize]) -> Self {
        let m = groups.len();
        let k = CMatrix::from_fn(m, m, |i, j| {
            if groups[i] == groups[j] {
                let size = groups.iter().filter(|&&g| g == groups[i]).count();
                Complex64::new(1.0 / size as f64, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        Self { k }
    }

    /// `Id − K`
    pub fn complement(&self) -> Self {
        let m = self.m();
        Self {
            k: snap(CMatrix::identity(m, m) - &self.k),
        }
    }

    pub fn m(&self) -> usize {
        self.k.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.k
    }

    /// `K̃ = diag(K, K)`
    pub fn k_tilde(&self) -> CMatrix {
        block_diag2(&self.k)
    }

    pub fn rank(&self) -> usize {
        rank(&self.k)
    }

    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        let x = CVector::from_column_slice(v);
        (&self.k * x).iter().copied().collect()
    }

    /// Applies `K` at every grid coordinate. The node values are recomputed
    /// from the projected endpoint traces; the returned residual measures how
    /// far those traces are from being node-continuous.
    pub fn apply_coeffs(&self, sys: &DiscreteSystem, u: &CVector) -> Result<(CVector, f64)> {
        let dof = &sys.dof;
        let g = &sys.graph;
        let m = g.n_edges();
        if self.m() != m {
            return Err(Error::DimensionMismatch {
                what: "projection size vs edges",
                expected: m,
                found: self.m(),
            });
        }
        let mut out = CVector::zeros(u.len());
        let last = dof.n_points() - 1;
        for k in 1..last {
            let vals = CVector::from_iterator(m, (0..m).map(|j| u[dof.dof(j, k)]));
            let p = &self.k * vals;
            for j in 0..m {
                out[dof.dof(j, k)] = p[j];
            }
        }
        let f0: Vec<Complex64> = (0..m).map(|j| u[dof.dof(j, 0)]).collect();
        let f1: Vec<Complex64> = (0..m).map(|j| u[dof.dof(j, last)]).collect();
        let (d, residual) = nodal_vector_with_residual(&self.apply(&f0), &self.apply(&f1), g)?;
        out.rows_mut(0, g.n_nodes()).copy_from(&d);
        Ok((out, residual))
    }

    /// `P_K u`; fails with [`Error::NotAdmissible`] if the result leaves the
    /// node-continuous space.
    pub fn apply_state(&self, sys: &DiscreteSystem, u: &StateVector) -> Result<StateVector> {
        let (out, residual) = self.apply_coeffs(sys, &u.coeffs)?;
        if residual > BRUTE_FORCE_TOL * max_abs_vec(&u.coeffs).max(1.0) {
            return Err(Error::NotAdmissible);
        }
        StateVector::new(sys.dof.clone(), out)
    }
}

fn ones(m: usize) -> CVector {
    CVector::from_element(m, one())
}

/// `K𝟙 ∈ {0, 𝟙}`; vacuously true on disconnected graphs.
pub fn check_one_eigenvector(k: &EdgeProjection, g: &MetricGraph) -> bool {
    !g.is_connected() || one_is_eigenvector(k)
}

pub fn one_is_eigenvector(k: &EdgeProjection) -> bool {
    let e = ones(k.m());
    let ke = k.matrix() * &e;
    max_abs_vec(&ke) <= SYM_TOL || max_abs_vec(&(ke - e)) <= SYM_TOL
}

fn check_size(k: &EdgeProjection, g: &MetricGraph) -> Result<()> {
    if k.m() != g.n_edges() {
        return Err(Error::DimensionMismatch {
            what: "projection size vs edges",
            expected: g.n_edges(),
            found: k.m(),
        });
    }
    Ok(())
}

/// `Range K̃ Ĩ ⊆ Range Ĩ`.
pub fn check_admissible(k: &EdgeProjection, g: &MetricGraph) -> Result<bool> {
    check_size(k, g)?;
    let it = int_to_complex(&g.incidence().i_tilde);
    Ok(range_contains(&it, &(k.k_tilde() * &it)))
}

/// A random element of the continuous space: random node values joined
/// linearly along each edge, plus a sine bump vanishing at the endpoints.
#[derive(Debug, Clone)]
pub struct RandomEdgeFunction {
    tails: Vec<Complex64>,
    heads: Vec<Complex64>,
    bumps: Vec<Complex64>,
}

impl RandomEdgeFunction {
    pub fn sample<R: Rng>(g: &MetricGraph, rng: &mut R, complex: bool) -> Self {
        let draw = |rng: &mut R| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = if complex { rng.sample(StandardNormal) } else { 0.0 };
            Complex64::new(re, im)
        };
        let d: Vec<Complex64> = (0..g.n_nodes()).map(|_| draw(rng)).collect();
        let bumps = (0..g.n_edges()).map(|_| draw(rng)).collect();
        Self {
            tails: g.tails().iter().map(|&t| d[t]).collect(),
            heads: g.heads().iter().map(|&h| d[h]).collect(),
            bumps,
        }
    }

    pub fn eval(&self, j: usize, x: f64) -> Complex64 {
        self.tails[j] * (1.0 - x) + self.heads[j] * x + self.bumps[j] * (std::f64::consts::PI * x).sin()
    }
}

/// Node-continuity residual of `P_K f` for a function `f` given per edge.
/// Fails if `f` itself is not node-continuous.
pub fn continuity_violation<F>(k: &EdgeProjection, g: &MetricGraph, f: F) -> Result<f64>
where
    F: Fn(usize, f64) -> Complex64,
{
    check_size(k, g)?;
    let f0: Vec<Complex64> = (0..g.n_edges()).map(|j| f(j, 0.0)).collect();
    let f1: Vec<Complex64> = (0..g.n_edges()).map(|j| f(j, 1.0)).collect();
    let (_, own) = nodal_vector_with_residual(&f0, &f1, g)?;
    if own > CONTINUITY_TOL {
        return Err(Error::NotContinuous { residual: own });
    }
    let (_, residual) = nodal_vector_with_residual(&k.apply(&f0), &k.apply(&f1), g)?;
    Ok(residual)
}

/// Largest continuity residual of `P_K f` over `trials` random `f`.
pub fn max_continuity_violation(k: &EdgeProjection, g: &MetricGraph, trials: usize, seed: u64) -> Result<f64> {
    check_size(k, g)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for t in 0..trials {
        let f = RandomEdgeFunction::sample(g, &mut rng, t % 2 == 1);
        worst = worst.max(continuity_violation(k, g, |j, x| f.eval(j, x))?);
    }
    Ok(worst)
}

/// Sampling oracle for admissibility: `false` iff some random `f` has
/// `P_K f` discontinuous beyond `1e-8`.
pub fn brute_force_admissible(k: &EdgeProjection, g: &MetricGraph, trials: usize, seed: u64) -> Result<bool> {
    Ok(max_continuity_violation(k, g, trials, seed)? <= BRUTE_FORCE_TOL)
}

/// `‖(Id − K) C(x) K‖∞ ≤ 1e-10` at every sample point.
pub fn check_c_orthogonal(k: &EdgeProjection, c: &CouplingField, n_samples: usize) -> Result<bool> {
    if k.m() != c.m() {
        return Err(Error::DimensionMismatch {
            what: "projection size vs coupling",
            expected: c.m(),
            found: k.m(),
        });
    }
    let comp = k.complement();
    Ok(c
        .samples(n_samples)
        .iter()
        .all(|cx| max_abs(&(comp.matrix() * cx * k.matrix())) <= SYM_TOL))
}

/// `𝓜 = Ĩ D⁻¹ M D⁻¹ Ĩᵀ`
pub fn build_mcal(m: &NodeMatrix, g: &MetricGraph) -> Result<CMatrix> {
    if m.n() != g.n_nodes() {
        return Err(Error::DimensionMismatch {
            what: "node matrix size vs nodes",
            expected: g.n_nodes(),
            found: m.n(),
        });
    }
    let inc = g.incidence();
    let it = int_to_complex(&inc.i_tilde);
    let deg = inc.degrees();
    let mw = CMatrix::from_fn(g.n_nodes(), g.n_nodes(), |k, l| {
        m.matrix()[(k, l)] / (deg[k] * deg[l]) as f64
    });
    Ok(&it * mw * it.transpose())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SufficientCondition {
    /// `Range 𝓜 Ĩ ⊆ Range K̃`
    #[serde(rename = "range_McalI")]
    RangeMcalI,
    /// `Range 𝓜 K̃ ⊆ Range K̃`
    #[serde(rename = "range_McalK")]
    RangeMcalK,
    /// `Range 𝓜 K̃ Ĩ ⊆ Range K̃`
    #[serde(rename = "full_rank_test")]
    FullRankTest,
    #[serde(rename = "none")]
    None,
}

/// Orthogonality of the node term for an admissible `K`. The two cheaper
/// sufficient inclusions are tried before the characterizing one.
pub fn check_m_orthogonal(
    k: &EdgeProjection,
    m: &NodeMatrix,
    g: &MetricGraph,
) -> Result<(bool, SufficientCondition)> {
    if !check_admissible(k, g)? {
        return Err(Error::NotAdmissible);
    }
    let mcal = build_mcal(m, g)?;
    let kt = k.k_tilde();
    let it = int_to_complex(&g.incidence().i_tilde);
    if range_contains(&kt, &(&mcal * &it)) {
        return Ok((true, SufficientCondition::RangeMcalI));
    }
    if range_contains(&kt, &(&mcal * &kt)) {
        return Ok((true, SufficientCondition::RangeMcalK));
    }
    Ok((range_contains(&kt, &(&mcal * &kt * &it)), SufficientCondition::FullRankTest))
}

/// Direct evaluation of `(M d^{P f} | d^{(Id−P) g})` over a basis of nodal
/// values; independent of the range formulation.
pub fn m_orthogonality_defect(k: &EdgeProjection, m: &NodeMatrix, g: &MetricGraph) -> Result<f64> {
    check_size(k, g)?;
    let n = g.n_nodes();
    let it = int_to_complex(&g.incidence().i_tilde);
    let deg = g.incidence().degrees();
    let dinv = CMatrix::from_fn(n, n, |a, b| {
        if a == b {
            Complex64::new(1.0 / deg[a] as f64, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    let kt = k.k_tilde();
    let comp = CMatrix::identity(kt.nrows(), kt.nrows()) - &kt;
    let range_part = &dinv * it.transpose() * &kt * &it;
    let kernel_part = &dinv * it.transpose() * comp * &it;
    Ok(max_abs(&(kernel_part.adjoint() * m.matrix() * range_part)))
}

/// Row-wise partition sums of `M` divided by the node degree, per side of a
/// bipartite graph. `table[p][q]` belongs to rows in part `p` summed over
/// columns in part `q`; part 0 holds the nodes with outgoing edges only.
pub type AlphaTable = [[Complex64; 2]; 2];

pub fn bipartite_parts(g: &MetricGraph) -> Result<[Vec<usize>; 2]> {
    let class = g.classify();
    if !class.bipartite {
        return Err(Error::NotBipartite);
    }
    let sources = (0..g.n_nodes()).filter(|&v| g.in_degree(v) == 0).collect();
    let sinks = (0..g.n_nodes()).filter(|&v| g.in_degree(v) > 0).collect();
    Ok([sources, sinks])
}

pub fn bipartite_alpha_check(m: &NodeMatrix, g: &MetricGraph) -> Result<Option<AlphaTable>> {
    if m.n() != g.n_nodes() {
        return Err(Error::DimensionMismatch {
            what: "node matrix size vs nodes",
            expected: g.n_nodes(),
            found: m.n(),
        });
    }
    let parts = bipartite_parts(g)?;
    let mm = m.matrix();
    let partial = |l: usize, q: usize| -> Complex64 { parts[q].iter().map(|&k| mm[(l, k)]).sum() };
    let mut table = [[Complex64::new(0.0, 0.0); 2]; 2];
    for p in 0..2 {
        let first = parts[p][0];
        for (q, slot) in table[p].iter_mut().enumerate() {
            let alpha = partial(first, q) / g.degree(first) as f64;
            let consistent = parts[p]
                .iter()
                .all(|&l| (alpha * g.degree(l) as f64 - partial(l, q)).norm() <= SYM_TOL);
            if !consistent {
                return Ok(None);
            }
            *slot = alpha;
        }
    }
    Ok(Some(table))
}

pub fn averaging_projection(m: usize) -> EdgeProjection {
    EdgeProjection::averaging(m)
}

/// Block averaging over the edge layers of a symmetric layer graph.
pub fn layer_projection(g: &MetricGraph) -> Result<EdgeProjection> {
    let dec = find_layers(g).ok_or(Error::NotLayerGraph)?;
    if !dec.symmetric {
        return Err(Error::NotSymmetricLayerGraph);
    }
    let numbering = numbering_from(g, &dec);
    Ok(EdgeProjection::block_averaging(&numbering.edge_blocks()))
}

/// Decides admissibility without a rank test where the graph class allows:
/// completely unconnected graphs accept every `K`, simple stars every `K`
/// with `K𝟙 ∈ {0, 𝟙}`.
pub fn star_shortcut(g: &MetricGraph, k: &EdgeProjection) -> Option<bool> {
    let class = g.classify();
    if class.completely_unconnected {
        return Some(true);
    }
    if class.star.is_some() && class.simple && one_is_eigenvector(k) {
        return Some(true);
    }
    None
}

/// Admissibility of the averaging projection from the graph class alone.
pub fn averaging_shortcut(g: &MetricGraph) -> bool {
    let class = g.classify();
    class.bipartite || class.eulerian
}

/// Projection onto `span{Cⁿ 𝟙 : n = 0, …, m−1}` for a constant coefficient.
pub fn krylov_projection(c: &CMatrix) -> EdgeProjection {
    let m = c.nrows();
    let mut basis = CMatrix::zeros(m, m);
    let mut v = ones(m);
    for col in 0..m {
        basis.set_column(col, &v);
        v = c * v;
    }
    EdgeProjection::from_basis(&basis)
}

/// Uniformly oriented random subspace of dimension `dim`.
pub fn random_projection<R: Rng>(m: usize, dim: usize, complex: bool, rng: &mut R) -> EdgeProjection {
    EdgeProjection::from_basis(&random_matrix(m, dim, complex, rng))
}

/// Random projection with `K𝟙 = 𝟙` (if `contains_one`) or `K𝟙 = 0`;
/// `dim` counts the dimension of the range including `𝟙`.
pub fn random_one_projection<R: Rng>(
    m: usize,
    dim: usize,
    contains_one: bool,
    complex: bool,
    rng: &mut R,
) -> EdgeProjection {
    let dim = dim.clamp(1, m);
    let mut basis = random_matrix(m, dim, complex, rng);
    basis.set_column(0, &ones(m));
    let p = EdgeProjection::from_basis(&basis);
    if contains_one {
        p
    } else {
        p.complement()
    }
}

fn random_matrix<R: Rng>(m: usize, cols: usize, complex: bool, rng: &mut R) -> CMatrix {
    CMatrix::from_fn(m, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = if complex { rng.sample(StandardNormal) } else { 0.0 };
        Complex64::new(re, im)
    })
}

/// Parameters of the numerical commutation test.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NumericSettings {
    pub n_per_edge: usize,
    pub dt: f64,
    pub t_end: f64,
    pub trials: usize,
    pub seed: u64,
    /// Scale of the invariant-case bound `calibration · (h² + dt²)`.
    pub calibration: f64,
}

impl Default for NumericSettings {
    fn default() -> Self {
        Self {
            n_per_edge: 63,
            dt: 1.0 / 64.0,
            t_end: 0.1,
            trials: 4,
            seed: 0,
            calibration: 1e-3,
        }
    }
}

impl NumericSettings {
    pub fn h(&self) -> f64 {
        1.0 / (self.n_per_edge + 1) as f64
    }

    pub fn bound(&self) -> f64 {
        let h = self.h();
        self.calibration * (h * h + self.dt * self.dt)
    }
}

/// `max_f ‖E(T) P f − P E(T) f‖_Mass` over random smooth `f`.
pub fn verify_invariance_numerically(
    sys: &DiscreteSystem,
    k: &EdgeProjection,
    trials: usize,
    dt: f64,
    t_end: f64,
    mode: Mode,
    seed: u64,
) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let complex = mode == Mode::Schrodinger;
    let mut defect: f64 = 0.0;
    for _ in 0..trials {
        let f = RandomEdgeFunction::sample(&sys.graph, &mut rng, complex);
        let u = interpolate(&sys.graph, &sys.dof, |j, x| f.eval(j, x))?;
        let pu = k.apply_state(sys, &u)?;
        let evolved_projected = propagate(sys, &pu.coeffs, dt, t_end, mode)?;
        let evolved = StateVector::new(sys.dof.clone(), propagate(sys, &u.coeffs, dt, t_end, mode)?)?;
        let projected_evolved = k.apply_state(sys, &evolved)?;
        defect = defect.max(sys.mass_norm(&(evolved_projected - projected_evolved.coeffs)));
    }
    Ok(defect)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NumericVerdict {
    Invariant,
    NotInvariant,
    Inconclusive,
}

pub fn numeric_verdict(defect: f64, bound: f64) -> NumericVerdict {
    if defect <= bound {
        NumericVerdict::Invariant
    } else if defect >= 100.0 * bound {
        NumericVerdict::NotInvariant
    } else {
        NumericVerdict::Inconclusive
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NumericOutcome {
    pub bound: f64,
    pub parabolic_defect: Option<f64>,
    pub parabolic_verdict: Option<NumericVerdict>,
    /// Absent when the system is not self-adjoint.
    pub schrodinger_defect: Option<f64>,
    pub schrodinger_verdict: Option<NumericVerdict>,
    /// Every available numeric verdict matches the algebraic one.
    pub agrees: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymmetryReport {
    pub admissible: bool,
    pub one_eigenvector: bool,
    pub c_orthogonal: bool,
    /// Only decided for admissible projections.
    pub m_orthogonal: Option<bool>,
    pub sufficient_condition_used: SufficientCondition,
    pub invariant: bool,
    /// Largest node-continuity residual of `P_K f` over random `f`, reported
    /// for non-admissible projections.
    pub continuity_violation: Option<f64>,
    pub numeric: Option<NumericOutcome>,
}

impl SymmetryReport {
    /// Largest numeric defect over both modes.
    pub fn numeric_defect(&self) -> Option<f64> {
        let n = self.numeric.as_ref()?;
        match (n.parabolic_defect, n.schrodinger_defect) {
            (Some(a), Some(b)) => Some(a.max(b)),
            (a, b) => a.or(b),
        }
    }
}

/// Runs every check; assembles a system on demand for the numeric part.
pub fn full_report(
    g: &MetricGraph,
    c: &CouplingField,
    m: &NodeMatrix,
    k: &EdgeProjection,
    numeric: Option<&NumericSettings>,
) -> Result<SymmetryReport> {
    match numeric {
        Some(settings) => {
            let dof = build_dof_map(g, settings.n_per_edge);
            let sys = assemble(g, &dof, c, m)?;
            report_for_system(&sys, k, Some(settings))
        }
        None => algebraic_report(g, c, m, k),
    }
}

fn algebraic_report(
    g: &MetricGraph,
    c: &CouplingField,
    m: &NodeMatrix,
    k: &EdgeProjection,
) -> Result<SymmetryReport> {
    let admissible = check_admissible(k, g)?;
    let one_eigenvector = check_one_eigenvector(k, g);
    let c_orthogonal = check_c_orthogonal(k, c, DEFAULT_SAMPLES)?;
    let (m_orthogonal, sufficient_condition_used) = if admissible {
        let (ok, cond) = check_m_orthogonal(k, m, g)?;
        (Some(ok), cond)
    } else {
        (None, SufficientCondition::None)
    };
    let continuity_violation = if admissible {
        None
    } else {
        Some(max_continuity_violation(k, g, 16, 0)?)
    };
    Ok(SymmetryReport {
        admissible,
        one_eigenvector,
        c_orthogonal,
        m_orthogonal,
        sufficient_condition_used,
        invariant: admissible && c_orthogonal && m_orthogonal == Some(true),
        continuity_violation,
        numeric: None,
    })
}

/// [`full_report`] on an already assembled system.
pub fn report_for_system(
    sys: &DiscreteSystem,
    k: &EdgeProjection,
    numeric: Option<&NumericSettings>,
) -> Result<SymmetryReport> {
    let mut report = algebraic_report(&sys.graph, &sys.c, &sys.m, k)?;
    let Some(settings) = numeric else {
        return Ok(report);
    };
    let bound = settings.bound();
    let mut outcome = NumericOutcome {
        bound,
        parabolic_defect: None,
        parabolic_verdict: None,
        schrodinger_defect: None,
        schrodinger_verdict: None,
        agrees: true,
    };
    if report.admissible {
        let run = |mode| {
            verify_invariance_numerically(sys, k, settings.trials, settings.dt, settings.t_end, mode, settings.seed)
        };
        let expected = if report.invariant {
            NumericVerdict::Invariant
        } else {
            NumericVerdict::NotInvariant
        };
        let p = run(Mode::Parabolic)?;
        outcome.parabolic_defect = Some(p);
        outcome.parabolic_verdict = Some(numeric_verdict(p, bound));
        if sys.hermitian {
            let s = run(Mode::Schrodinger)?;
            outcome.schrodinger_defect = Some(s);
            outcome.schrodinger_verdict = Some(numeric_verdict(s, bound));
        }
        outcome.agrees = [outcome.parabolic_verdict, outcome.schrodinger_verdict]
            .into_iter()
            .flatten()
            .all(|v| v == expected);
    }
    report.numeric = Some(outcome);
    Ok(report)
}
