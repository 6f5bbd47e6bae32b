//! Complex linear-algebra aliases and the few numeric helpers shared by the
//! channel, precoder and metrics modules.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}

pub fn dbm_to_watts(dbm: f64) -> f64 {
    db_to_linear(dbm - 30.0)
}

/// Wraps an azimuth into [-180, 180).
pub fn wrap_deg(angle: f64) -> f64 {
    if (-180.0..180.0).contains(&angle) {
        return angle;
    }
    let wrapped = (angle + 180.0).rem_euclid(360.0) - 180.0;
    // rem_euclid can return exactly 360.0 for tiny negative inputs
    if wrapped >= 180.0 {
        wrapped - 360.0
    } else {
        wrapped
    }
}

/// Hermitian inner product `a^H b`.
pub fn inner(a: &CVector, b: &CVector) -> C64 {
    a.dotc(b)
}

/// Pseudo-inverse of a full-row-rank matrix computed from its SVD, together
/// with the 2-norm condition number. Rows are UEs, so a wide or square input
/// yields the right inverse `A^H (A A^H)^{-1}`.
pub fn right_pseudo_inverse(a: &CMatrix) -> (Option<CMatrix>, f64) {
    let (rows, cols) = a.shape();
    if rows == 0 || rows > cols {
        return (None, f64::INFINITY);
    }
    let svd = a.clone().svd(true, true);
    let s = &svd.singular_values;
    let s_max = s.max();
    let s_min = s.min();
    if !(s_min > 0.0) || !s_max.is_finite() {
        return (None, f64::INFINITY);
    }
    let condition = s_max / s_min;
    let u = svd.u.as_ref().expect("u requested");
    let v_t = svd.v_t.as_ref().expect("v_t requested");
    // A = U S V^H  =>  A^+ = V S^{-1} U^H
    let mut v_scaled = v_t.adjoint();
    for (j, mut col) in v_scaled.column_iter_mut().enumerate() {
        col /= C64::new(s[j], 0.0);
    }
    (Some(v_scaled * u.adjoint()), condition)
}
