//! Truncation control shared by every series evaluator.

use alloc::format;

use crate::error::{Error, Result};
use crate::matrix::SquareMatrix;

/// Stopping rule for layered series.
///
/// A series with `d` indices is summed in layers of constant total index.
/// Summation stops after `stagnation_layers` consecutive layers whose
/// Frobenius norm is at most `max(abs_tol, rel_tol·‖partial sum‖)`.
/// Reaching `max_terms_per_index` layers without stopping is a
/// convergence failure.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SeriesControl {
    pub max_terms_per_index: usize,
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub stagnation_layers: usize,
}

impl Default for SeriesControl {
    fn default() -> Self {
        SeriesControl {
            max_terms_per_index: 200,
            abs_tol: 1e-14,
            rel_tol: 1e-12,
            stagnation_layers: 3,
        }
    }
}

impl SeriesControl {
    pub fn validate(&self) -> Result<()> {
        if self.max_terms_per_index == 0 || self.stagnation_layers == 0 {
            return Err(Error::validation(
                "series control needs at least one term and one stagnation layer",
            ));
        }
        if !(self.abs_tol > 0.0) || !(self.rel_tol > 0.0) {
            return Err(Error::validation("series tolerances must be positive"));
        }
        Ok(())
    }

    /// Same control with both tolerances divided by `factor`.
    pub fn tightened(&self, factor: f64) -> Self {
        SeriesControl {
            abs_tol: self.abs_tol / factor,
            rel_tol: self.rel_tol / factor,
            ..*self
        }
    }

    /// Tolerances near the floating-point floor, for finite-difference work.
    pub fn strict() -> Self {
        SeriesControl {
            max_terms_per_index: 400,
            abs_tol: 1e-18,
            rel_tol: 1e-16,
            stagnation_layers: 3,
        }
    }
}

/// A series or quadrature value with its truncation diagnostics.
#[derive(Clone, Debug, PartialEq)]
pub struct EvalResult {
    pub value: SquareMatrix,
    /// Largest Frobenius norm among the trailing layers that triggered the stop.
    pub error_estimate: f64,
    /// Number of individual (non-vanishing) terms summed.
    pub terms_used: usize,
    /// Number of layers summed.
    pub layers: usize,
    /// Always true on `Ok`; failures are returned as [`Error::Convergence`].
    pub converged: bool,
}

/// Sums `layer(L)` for `L = 0, 1, …` under `ctl`.
///
/// `layer` returns the layer matrix and the number of terms it contains.
pub(crate) fn sum_layers<F>(
    order: usize,
    ctl: &SeriesControl,
    context: &str,
    mut layer: F,
) -> Result<EvalResult>
where
    F: FnMut(usize) -> Result<(SquareMatrix, usize)>,
{
    ctl.validate()?;
    let mut sum = SquareMatrix::zeros(order);
    let mut terms = 0usize;
    let mut quiet = 0usize;
    let mut trailing_max = 0.0f64;
    for l in 0..ctl.max_terms_per_index {
        let (lay, count) = layer(l)?;
        if !lay.is_finite() {
            return Err(Error::convergence(
                context,
                format!("non-finite terms in layer {l}"),
            ));
        }
        terms += count;
        sum += &lay;
        if !sum.is_finite() {
            return Err(Error::convergence(context, format!("partial sum overflowed at layer {l}")));
        }
        let norm = lay.frobenius_norm();
        let threshold = ctl.abs_tol.max(ctl.rel_tol * sum.frobenius_norm());
        if norm <= threshold {
            quiet += 1;
            trailing_max = trailing_max.max(norm);
            if quiet >= ctl.stagnation_layers {
                return Ok(EvalResult {
                    value: sum,
                    error_estimate: trailing_max,
                    terms_used: terms,
                    layers: l + 1,
                    converged: true,
                });
            }
        } else {
            quiet = 0;
            trailing_max = 0.0;
        }
    }
    Err(Error::convergence(
        context,
        format!(
            "terms still above tolerance after {} layers",
            ctl.max_terms_per_index
        ),
    ))
}

/// `zᵏ/k!` for `k = 0..len`.
pub(crate) fn power_over_factorial(z: num_complex::Complex64, len: usize) -> alloc::vec::Vec<num_complex::Complex64> {
    let mut out = alloc::vec::Vec::with_capacity(len);
    let mut cur = num_complex::Complex64::new(1.0, 0.0);
    for k in 0..len {
        if k > 0 {
            cur = cur * z / k as f64;
        }
        out.push(cur);
    }
    out
}
