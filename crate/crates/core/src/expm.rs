//! Matrix exponential and real scalar powers `t^M = exp(M ln t)`.

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::matrix::SquareMatrix;

// Padé (13, 13) coefficients and the 1-norm threshold below which no scaling
// is needed (Higham 2005).
const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];
const THETA13: f64 = 5.371920351148152;

/// `exp(M)` by scaling and squaring with a degree-13 Padé approximant.
pub fn mat_exp(m: &SquareMatrix) -> Result<SquareMatrix> {
    if !m.is_finite() {
        return Err(Error::validation("matrix exponential of a non-finite matrix"));
    }
    let n = m.order();
    let norm = m.one_norm();
    if norm == 0.0 {
        return Ok(SquareMatrix::identity(n));
    }
    let s = if norm > THETA13 {
        (norm / THETA13).log2().ceil().max(0.0) as i32
    } else {
        0
    };
    if s > 1000 {
        return Err(Error::convergence("matrix exponential", "norm too large to scale"));
    }
    let a = m.scale_real(0.5f64.powi(s));
    let id = SquareMatrix::identity(n);
    let a2 = &a * &a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let b = &PADE13;

    let mut u_inner = a6.scale_real(b[13]);
    u_inner.add_scaled(&a4, Complex64::new(b[11], 0.0));
    u_inner.add_scaled(&a2, Complex64::new(b[9], 0.0));
    let mut u_tail = a6.scale_real(b[7]);
    u_tail.add_scaled(&a4, Complex64::new(b[5], 0.0));
    u_tail.add_scaled(&a2, Complex64::new(b[3], 0.0));
    u_tail.add_scaled(&id, Complex64::new(b[1], 0.0));
    let u = &a * &(&(&a6 * &u_inner) + &u_tail);

    let mut v_inner = a6.scale_real(b[12]);
    v_inner.add_scaled(&a4, Complex64::new(b[10], 0.0));
    v_inner.add_scaled(&a2, Complex64::new(b[8], 0.0));
    let mut v_tail = a6.scale_real(b[6]);
    v_tail.add_scaled(&a4, Complex64::new(b[4], 0.0));
    v_tail.add_scaled(&a2, Complex64::new(b[2], 0.0));
    v_tail.add_scaled(&id, Complex64::new(b[0], 0.0));
    let v = &(&a6 * &v_inner) + &v_tail;

    let p = &v + &u;
    let q = &v - &u;
    let mut r = q
        .solve(&p)
        .map_err(|_| Error::convergence("matrix exponential", "Padé denominator is singular"))?;
    for _ in 0..s {
        r = &r * &r;
    }
    if !r.is_finite() {
        return Err(Error::convergence("matrix exponential", "result overflowed"));
    }
    Ok(r)
}

/// `t^M = exp(M ln t)` for real `t > 0`.
pub fn mat_pow_scalar(m: &SquareMatrix, t: f64) -> Result<SquareMatrix> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::validation(alloc::format!(
            "matrix power needs a positive finite base, got {t}"
        )));
    }
    if t == 1.0 {
        return Ok(SquareMatrix::identity(m.order()));
    }
    mat_exp(&m.scale_real(t.ln()))
}

/// `w^M = exp(M log w)` on the principal branch, for complex `w ≠ 0`.
pub fn mat_pow_complex(m: &SquareMatrix, w: Complex64) -> Result<SquareMatrix> {
    if w.norm() == 0.0 || !w.is_finite() {
        return Err(Error::validation("matrix power needs a non-zero finite base"));
    }
    if w == Complex64::new(1.0, 0.0) {
        return Ok(SquareMatrix::identity(m.order()));
    }
    mat_exp(&m.scale(w.ln()))
}
