//! Small dense linear-algebra helpers shared by the checks.
//!
//! Ranks and range inclusions are decided from singular values with the
//! relative threshold `max_dim * sigma_max * 1e-12`.

use nalgebra::{DMatrix, SVD};
use num_complex::Complex64;

use crate::{CMatrix, CVector};

/// Relative factor of the rank threshold.
pub const RANK_RTOL: f64 = 1e-12;

pub fn zeros(rows: usize, cols: usize) -> CMatrix {
    CMatrix::zeros(rows, cols)
}

pub fn to_complex(a: &DMatrix<f64>) -> CMatrix {
    a.map(|x| Complex64::new(x, 0.0))
}

pub fn int_to_complex(a: &DMatrix<i64>) -> CMatrix {
    a.map(|x| Complex64::new(x as f64, 0.0))
}

pub fn singular_values(a: &CMatrix) -> Vec<f64> {
    if a.nrows() == 0 || a.ncols() == 0 {
        return Vec::new();
    }
    SVD::new(a.clone(), false, false).singular_values.iter().copied().collect()
}

fn threshold(a: &CMatrix, sv: &[f64]) -> f64 {
    let sigma_max = sv.iter().copied().fold(0.0, f64::max);
    a.nrows().max(a.ncols()) as f64 * sigma_max * RANK_RTOL
}

pub fn rank(a: &CMatrix) -> usize {
    let sv = singular_values(a);
    let tau = threshold(a, &sv);
    sv.iter().filter(|&&s| s > tau && s > 0.0).count()
}

/// `Range a ⊆ Range b`, decided by `rank([b | a]) == rank(b)`.
pub fn range_contains(b: &CMatrix, a: &CMatrix) -> bool {
    assert_eq!(a.nrows(), b.nrows(), "range inclusion needs equal row counts");
    if a.ncols() == 0 || a.iter().all(|z| z.norm() == 0.0) {
        return true;
    }
    let mut joined = zeros(b.nrows(), b.ncols() + a.ncols());
    joined.columns_mut(0, b.ncols()).copy_from(b);
    joined.columns_mut(b.ncols(), a.ncols()).copy_from(a);
    // Share one threshold between both ranks so that tiny columns of `a`
    // do not get counted against a smaller σ_max of `b`.
    let sv_joined = singular_values(&joined);
    let tau = threshold(&joined, &sv_joined);
    let r_joined = sv_joined.iter().filter(|&&s| s > tau && s > 0.0).count();
    let r_b = singular_values(b).iter().filter(|&&s| s > tau && s > 0.0).count();
    r_joined == r_b
}

pub fn hermitian_part(a: &CMatrix) -> CMatrix {
    (a + a.adjoint()).scale(0.5)
}

/// Eigenvalues of a Hermitian matrix in ascending order.
pub fn hermitian_eigenvalues(h: &CMatrix) -> Vec<f64> {
    if h.nrows() == 0 {
        return Vec::new();
    }
    let mut ev: Vec<f64> = h.clone().symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(|a, b| a.total_cmp(b));
    ev
}

/// Largest absolute entry.
pub fn max_abs(a: &CMatrix) -> f64 {
    a.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn max_abs_vec(v: &CVector) -> f64 {
    v.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn is_hermitian(a: &CMatrix, tol: f64) -> bool {
    a.is_square() && max_abs(&(a - a.adjoint())) <= tol
}

pub fn is_real(a: &CMatrix, tol: f64) -> bool {
    a.iter().all(|z| z.im.abs() <= tol)
}

pub fn is_diagonal(a: &CMatrix, tol: f64) -> bool {
    a.iter()
        .enumerate()
        .all(|(idx, z)| idx % a.nrows() == idx / a.nrows() || z.norm() <= tol)
}

/// Orthonormal basis (as columns) of the span of the columns of `a`.
pub fn orthonormal_basis(a: &CMatrix) -> CMatrix {
    if a.ncols() == 0 || a.nrows() == 0 {
        return zeros(a.nrows(), 0);
    }
    let svd = SVD::new(a.clone(), true, false);
    let sv: Vec<f64> = svd.singular_values.iter().copied().collect();
    let tau = threshold(a, &sv);
    let u = svd.u.expect("left singular vectors requested");
    let keep: Vec<usize> = (0..sv.len()).filter(|&i| sv[i] > tau && sv[i] > 0.0).collect();
    let mut q = zeros(a.nrows(), keep.len());
    for (c, &i) in keep.iter().enumerate() {
        q.set_column(c, &u.column(i));
    }
    q
}

/// Orthogonal projector `Q Q*` onto the column span of `a`.
pub fn projector_onto(a: &CMatrix) -> CMatrix {
    let q = orthonormal_basis(a);
    &q * q.adjoint()
}

/// Eigenvalues of `a v = λ b v` for Hermitian `a` and Hermitian positive
/// definite `b`, ascending. `None` if `b` is not positive definite.
pub fn generalized_hermitian_eigenvalues(a: &CMatrix, b: &CMatrix) -> Option<Vec<f64>> {
    // complex Cholesky does not reject indefinite input on its own
    if hermitian_eigenvalues(&hermitian_part(b)).first().is_none_or(|&e| e <= 0.0) {
        return None;
    }
    let l = b.clone().cholesky()?.unpack();
    let x = l.solve_lower_triangular(a)?;
    let y = l.solve_lower_triangular(&x.adjoint())?;
    Some(hermitian_eigenvalues(&hermitian_part(&y)))
}

pub fn block_diag2(a: &CMatrix) -> CMatrix {
    let m = a.nrows();
    let mut out = zeros(2 * m, 2 * m);
    out.view_mut((0, 0), (m, m)).copy_from(a);
    out.view_mut((m, m), (m, m)).copy_from(a);
    out
}
