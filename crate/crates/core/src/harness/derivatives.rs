//! Closed-form partial derivatives against finite differences.

use alloc::format;
use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use super::{case_label, ResidualReport};
use crate::error::{Error, Result};
use crate::gamma::Variant;
use crate::matrix::SquareMatrix;
use crate::series::SeriesControl;
use crate::triple::{evaluate, partial_derivative, DerivativeOrders, ParamSet, TriplePoint};

/// Base step for a stencil of total order `k`.
fn step_for(total: usize) -> f64 {
    match total {
        0 | 1 => 1e-5,
        2 => 2e-3,
        _ => 1e-2,
    }
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Offsets (in units of `h`) and weights of the central stencil of order `k`.
fn stencil(k: usize) -> Vec<(f64, f64)> {
    (0..=k)
        .map(|j| {
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            (k as f64 / 2.0 - j as f64, sign * binomial(k, j))
        })
        .collect()
}

fn central(
    p: &ParamSet,
    variant: Variant,
    z: &TriplePoint,
    orders: DerivativeOrders,
    h: f64,
    ctl: &SeriesControl,
) -> Result<SquareMatrix> {
    let ords = orders.as_array();
    let sts: Vec<Vec<(f64, f64)>> = ords.iter().map(|&k| stencil(k)).collect();
    let base = z.as_array();
    let mut acc = SquareMatrix::zeros(p.order());
    for &(o1, w1) in &sts[0] {
        for &(o2, w2) in &sts[1] {
            for &(o3, w3) in &sts[2] {
                let zz = TriplePoint::new(
                    base[0] + Complex64::new(o1 * h, 0.0),
                    base[1] + Complex64::new(o2 * h, 0.0),
                    base[2] + Complex64::new(o3 * h, 0.0),
                );
                acc += &evaluate(p, variant, &zz, ctl)?.value.scale_real(w1 * w2 * w3);
            }
        }
    }
    Ok(acc.scale_real(h.powi(-(orders.total() as i32))))
}

/// Central finite difference of the `variant` series with one Richardson
/// step (`h` and `h/2`). Steps are real; the series is analytic in each
/// argument.
pub fn finite_difference(
    p: &ParamSet,
    variant: Variant,
    z: &TriplePoint,
    orders: DerivativeOrders,
    ctl: &SeriesControl,
) -> Result<SquareMatrix> {
    if orders.total() == 0 {
        return Ok(evaluate(p, variant, z, ctl)?.value);
    }
    if orders.total() > 3 {
        return Err(Error::validation("finite differences are limited to total order 3"));
    }
    let h = step_for(orders.total());
    let coarse = central(p, variant, z, orders, h, ctl)?;
    let fine = central(p, variant, z, orders, h / 2.0, ctl)?;
    Ok((&fine.scale_real(4.0) - &coarse).scale_real(1.0 / 3.0))
}

/// Closed-form derivative against [`finite_difference`] evaluated under
/// [`SeriesControl::strict`].
pub fn verify_derivative(
    p: &ParamSet,
    variant: Variant,
    z: &TriplePoint,
    orders: DerivativeOrders,
    ctl: &SeriesControl,
    tol: f64,
) -> Result<ResidualReport> {
    let closed = partial_derivative(p, variant, z, ctl, orders)?.value;
    let fd = finite_difference(p, variant, z, orders, &SeriesControl::strict())?;
    Ok(ResidualReport::compare(
        format!("derivative.{}", variant.name()),
        Some(p.family),
        format!("d={orders} {}", case_label(p, z)),
        &closed,
        &fd,
        tol,
    )
    .with_diagnostics(format!("step {:.0e}", step_for(orders.total()))))
}
