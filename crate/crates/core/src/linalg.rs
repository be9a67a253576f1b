//! Dense complex linear algebra helpers on top of nalgebra.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;

pub fn frob(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// ‖x − y‖_F / max(‖y‖_F, tiny).
pub fn rel_diff(x: &CMat, y: &CMat) -> f64 {
    frob(&(x - y)) / frob(y).max(f64::MIN_POSITIVE)
}

pub fn rel_err(x: C64, y: C64) -> f64 {
    (x - y).norm() / y.norm().max(f64::MIN_POSITIVE)
}

pub fn identity(n: usize) -> CMat {
    CMat::identity(n, n)
}

pub fn diag(v: &[C64]) -> CMat {
    CMat::from_diagonal(&CVec::from_column_slice(v))
}

pub fn inverse(m: &CMat) -> Result<CMat> {
    m.clone()
        .try_inverse()
        .ok_or_else(|| Error::Domain("singular matrix".into()))
}

pub fn solve(m: &CMat, rhs: &CVec) -> Result<CVec> {
    m.clone()
        .lu()
        .solve(rhs)
        .ok_or_else(|| Error::Domain("singular linear system".into()))
}

/// Singular values in descending order.
pub fn singular_values(m: &CMat) -> Vec<f64> {
    let mut s: Vec<f64> = m.clone().svd(false, false).singular_values.iter().copied().collect();
    s.sort_by(|a, b| b.partial_cmp(a).unwrap());
    s
}

/// Unit right singular vector for the smallest singular value, plus the sorted
/// singular values.
pub fn null_vector(m: &CMat) -> (CVec, Vec<f64>) {
    let svd = m.clone().svd(false, true);
    let v_t = svd.v_t.expect("requested V^T");
    let (imin, _) = svd
        .singular_values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.partial_cmp(b.1).unwrap())
        .expect("nonempty matrix");
    let v = v_t.row(imin).transpose().map(|z| z.conj());
    let mut s: Vec<f64> = svd.singular_values.iter().copied().collect();
    s.sort_by(|a, b| b.partial_cmp(a).unwrap());
    (v, s)
}

/// Eigenvalues read off the diagonal of the complex Schur form.
pub fn eigenvalues(m: &CMat) -> Vec<C64> {
    let (_, t) = m.clone().schur().unpack();
    t.diagonal().iter().copied().collect()
}

/// Unit vector spanning the kernel of m − λI.
pub fn eigvec_for(m: &CMat, lambda: C64) -> CVec {
    let n = m.nrows();
    let shifted = m - identity(n) * lambda;
    null_vector(&shifted).0
}
