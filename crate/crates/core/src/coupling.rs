//! Coefficient field `C(x)`, node matrix `M`, and the algebraic
//! well-posedness and semigroup-property checks built on them.

use nalgebra::DVector;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::MetricGraph;
use crate::linalg::{hermitian_eigenvalues, hermitian_part, is_diagonal, is_hermitian, is_real};
use crate::CMatrix;

/// Default number of interior sample points for x-dependent checks; both
/// endpoints are added on top.
pub const DEFAULT_SAMPLES: usize = 64;

/// Tolerance for algebraic equalities (Hermitian, real, diagonal, sign tests).
pub const ALG_TOL: f64 = 1e-12;

/// A complex scalar function on [0, 1].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "data", rename_all = "lowercase")]
pub enum ScalarFn {
    Constant(Complex64),
    /// Coefficients in increasing degree.
    Poly(Vec<Complex64>),
    /// Values on the uniform grid `k / (len - 1)`, linearly interpolated.
    Samples(Vec<Complex64>),
}

impl ScalarFn {
    pub fn zero() -> Self {
        ScalarFn::Constant(Complex64::new(0.0, 0.0))
    }

    pub fn real(c: f64) -> Self {
        ScalarFn::Constant(Complex64::new(c, 0.0))
    }

    /// Evaluates without a domain check.
    pub fn at(&self, x: f64) -> Complex64 {
        match self {
            ScalarFn::Constant(c) => *c,
            ScalarFn::Poly(coeffs) => coeffs
                .iter()
                .rev()
                .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * x + c),
            ScalarFn::Samples(s) => match s.len() {
                0 => Complex64::new(0.0, 0.0),
                1 => s[0],
                len => {
                    let pos = x.clamp(0.0, 1.0) * (len - 1) as f64;
                    let k = (pos.floor() as usize).min(len - 2);
                    let t = pos - k as f64;
                    s[k] * (1.0 - t) + s[k + 1] * t
                }
            },
        }
    }

    pub fn is_constant(&self) -> bool {
        match self {
            ScalarFn::Constant(_) => true,
            ScalarFn::Poly(c) => c.iter().skip(1).all(|z| z.norm() == 0.0),
            ScalarFn::Samples(s) => s.windows(2).all(|w| w[0] == w[1]),
        }
    }

    /// Identically zero on [0, 1].
    pub fn is_zero(&self) -> bool {
        match self {
            ScalarFn::Constant(c) => c.norm() == 0.0,
            ScalarFn::Poly(c) | ScalarFn::Samples(c) => c.iter().all(|z| z.norm() == 0.0),
        }
    }

    pub fn conj(&self) -> Self {
        match self {
            ScalarFn::Constant(c) => ScalarFn::Constant(c.conj()),
            ScalarFn::Poly(c) => ScalarFn::Poly(c.iter().map(|z| z.conj()).collect()),
            ScalarFn::Samples(s) => ScalarFn::Samples(s.iter().map(|z| z.conj()).collect()),
        }
    }
}

/// The m×m matrix-valued coefficient `C(x)`, stored row-major.
///
/// Entries are only required to be continuous; smoother coefficients are the
/// caller's responsibility.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CouplingField {
    m: usize,
    entries: Vec<ScalarFn>,
}

impl CouplingField {
    pub fn new(m: usize, entries: Vec<ScalarFn>) -> Result<Self> {
        if entries.len() != m * m {
            return Err(Error::DimensionMismatch {
                what: "coupling entries",
                expected: m * m,
                found: entries.len(),
            });
        }
        Ok(Self { m, entries })
    }

    pub fn constant(c: &CMatrix) -> Result<Self> {
        if !c.is_square() {
            return Err(Error::DimensionMismatch {
                what: "coupling matrix columns",
                expected: c.nrows(),
                found: c.ncols(),
            });
        }
        let m = c.nrows();
        let entries = (0..m * m)
            .map(|idx| ScalarFn::Constant(c[(idx / m, idx % m)]))
            .collect();
        Self::new(m, entries)
    }

    pub fn constant_real(m: usize, rows: &[f64]) -> Result<Self> {
        if rows.len() != m * m {
            return Err(Error::DimensionMismatch {
                what: "coupling entries",
                expected: m * m,
                found: rows.len(),
            });
        }
        Self::constant(&CMatrix::from_row_iterator(
            m,
            m,
            rows.iter().map(|&x| Complex64::new(x, 0.0)),
        ))
    }

    pub fn identity(m: usize) -> Self {
        Self::constant(&CMatrix::identity(m, m)).expect("square")
    }

    pub fn diagonal(diag: &[f64]) -> Self {
        let d = DVector::from_iterator(diag.len(), diag.iter().map(|&x| Complex64::new(x, 0.0)));
        Self::constant(&CMatrix::from_diagonal(&d)).expect("square")
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn entry(&self, i: usize, j: usize) -> &ScalarFn {
        &self.entries[i * self.m + j]
    }

    pub fn entries(&self) -> &[ScalarFn] {
        &self.entries
    }

    pub fn is_constant(&self) -> bool {
        self.entries.iter().all(ScalarFn::is_constant)
    }

    /// `C(x)` for `x` in [0, 1].
    pub fn evaluate(&self, x: f64) -> Result<CMatrix> {
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::OutOfDomain(x));
        }
        Ok(self.at(x))
    }

    pub(crate) fn at(&self, x: f64) -> CMatrix {
        CMatrix::from_fn(self.m, self.m, |i, j| self.entry(i, j).at(x))
    }

    /// `C(x)` on the default sampling grid.
    pub fn samples(&self, n_samples: usize) -> Vec<CMatrix> {
        sample_points(n_samples).into_iter().map(|x| self.at(x)).collect()
    }

    /// Pointwise `U C(x) U*` for a constant unitary `U`.
    pub fn conjugated(&self, u: &CMatrix) -> Result<Self> {
        // Only the sampled representation is closed under this operation.
        let xs = sample_points(DEFAULT_SAMPLES);
        let mats: Vec<CMatrix> = xs.iter().map(|&x| u * self.at(x) * u.adjoint()).collect();
        if self.is_constant() {
            return Self::constant(&mats[0]);
        }
        let m = self.m;
        let entries = (0..m * m)
            .map(|idx| ScalarFn::Samples(mats.iter().map(|c| c[(idx / m, idx % m)]).collect()))
            .collect();
        Self::new(m, entries)
    }
}

/// `n_samples` uniform interior points plus both endpoints, ascending.
pub fn sample_points(n_samples: usize) -> Vec<f64> {
    let total = n_samples + 2;
    (0..total).map(|k| k as f64 / (total - 1) as f64).collect()
}

/// The n×n node matrix `M`.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeMatrix(pub CMatrix);

impl NodeMatrix {
    pub fn new(m: CMatrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::DimensionMismatch {
                what: "node matrix columns",
                expected: m.nrows(),
                found: m.ncols(),
            });
        }
        Ok(Self(m))
    }

    pub fn zeros(n: usize) -> Self {
        Self(CMatrix::zeros(n, n))
    }

    pub fn from_real(n: usize, rows: &[f64]) -> Result<Self> {
        if rows.len() != n * n {
            return Err(Error::DimensionMismatch {
                what: "node matrix entries",
                expected: n * n,
                found: rows.len(),
            });
        }
        Self::new(CMatrix::from_row_iterator(
            n,
            n,
            rows.iter().map(|&x| Complex64::new(x, 0.0)),
        ))
    }

    pub fn scaled_identity(n: usize, s: f64) -> Self {
        Self(CMatrix::identity(n, n).scale(s))
    }

    pub fn n(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }
}

/// Smallest eigenvalue of the Hermitian part of `C(x)` over the sample grid;
/// the flag is `μ > 0`.
pub fn uniform_ellipticity(c: &CouplingField, n_samples: usize) -> (bool, f64) {
    let mu = c
        .samples(n_samples)
        .iter()
        .map(|cx| hermitian_eigenvalues(&hermitian_part(cx))[0])
        .fold(f64::INFINITY, f64::min);
    (mu > ALG_TOL, mu)
}

/// Row-wise strict diagonal dominance of the Hermitian part of a constant `C`:
/// `Re c_ii > Σ_{j≠i} |c_ij + conj(c_ji)| / 2`.
pub fn gershgorin_wellposed(c: &CouplingField) -> Result<bool> {
    if !c.is_constant() {
        return Err(Error::NotConstant);
    }
    let cm = c.at(0.0);
    let m = c.m();
    Ok((0..m).all(|i| {
        let off: f64 = (0..m)
            .filter(|&j| j != i)
            .map(|j| (cm[(i, j)] + cm[(j, i)].conj()).norm() / 2.0)
            .sum();
        cm[(i, i)].re > off
    }))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WellPosednessReport {
    pub uniformly_elliptic: bool,
    pub mu: f64,
    /// `None` when `C` depends on `x`.
    pub gershgorin_ok: Option<bool>,
    pub self_adjoint: bool,
    pub real: bool,
    pub positive: bool,
    pub linf_contractive: bool,
    pub l1_contractive: bool,
    pub m_dissipative: bool,
    pub m_negative_definite: bool,
    pub strongly_stable: bool,
    pub exponentially_stable: bool,
    /// Largest eigenvalue of the Hermitian part of `M`.
    pub m_max_eigenvalue: f64,
}

pub fn classify_semigroup(
    c: &CouplingField,
    m: &NodeMatrix,
    g: &MetricGraph,
) -> Result<WellPosednessReport> {
    classify_semigroup_sampled(c, m, g, DEFAULT_SAMPLES)
}

pub fn classify_semigroup_sampled(
    c: &CouplingField,
    m: &NodeMatrix,
    g: &MetricGraph,
    n_samples: usize,
) -> Result<WellPosednessReport> {
    if c.m() != g.n_edges() {
        return Err(Error::DimensionMismatch {
            what: "coupling size vs edges",
            expected: g.n_edges(),
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
    let (uniformly_elliptic, mu) = uniform_ellipticity(c, n_samples);
    let gershgorin_ok = gershgorin_wellposed(c).ok();
    let samples = c.samples(n_samples);
    let mm = m.matrix();
    let n = m.n();

    let c_real = samples.iter().all(|cx| is_real(cx, ALG_TOL));
    let m_real = is_real(mm, ALG_TOL);
    let c_diag_real = c_real && samples.iter().all(|cx| is_diagonal(cx, ALG_TOL));
    let m_offdiag_nonneg = (0..n)
        .all(|k| (0..n).all(|h| h == k || mm[(k, h)].re >= -ALG_TOL));

    let row_ok = (0..n).all(|k| {
        mm[(k, k)].re + (0..n).filter(|&h| h != k).map(|h| mm[(k, h)].norm()).sum::<f64>()
            <= ALG_TOL
    });
    let col_ok = (0..n).all(|k| {
        mm[(k, k)].re + (0..n).filter(|&h| h != k).map(|h| mm[(h, k)].norm()).sum::<f64>()
            <= ALG_TOL
    });

    let m_max_eigenvalue = *hermitian_eigenvalues(&hermitian_part(mm))
        .last()
        .expect("nonempty node matrix");
    let m_dissipative = m_max_eigenvalue <= ALG_TOL;
    let m_negative_definite = m_max_eigenvalue < -ALG_TOL;
    let ones = crate::CVector::from_element(n, Complex64::new(1.0, 0.0));
    let m_star_one = mm.adjoint() * ones;
    let m_star_one_nonzero = m_star_one.iter().any(|z| z.norm() > ALG_TOL);

    Ok(WellPosednessReport {
        uniformly_elliptic,
        mu,
        gershgorin_ok,
        self_adjoint: samples.iter().all(|cx| is_hermitian(cx, ALG_TOL)) && is_hermitian(mm, ALG_TOL),
        real: c_real && m_real,
        positive: c_diag_real && m_real && m_offdiag_nonneg,
        linf_contractive: c_diag_real && row_ok,
        l1_contractive: c_diag_real && col_ok,
        m_dissipative,
        m_negative_definite,
        strongly_stable: m_dissipative && m_star_one_nonzero,
        exponentially_stable: m_negative_definite,
        m_max_eigenvalue,
    })
}
