//! Scalar kernels lifted through the spectral path: complex gamma and the
//! incomplete gamma pair at real truncation points.

use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;
use num_traits::Zero;

use crate::error::{Error, Result};

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

const MAX_SERIES_TERMS: usize = 2000;
const MAX_CF_TERMS: usize = 5000;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Distance from `z` to the nearest non-positive integer, or `None` when the
/// real part is positive enough that no pole is near.
fn pole_distance(z: Complex64) -> Option<f64> {
    if z.re > 0.5 {
        return None;
    }
    let k = z.re.round().min(0.0);
    Some(c(z.re - k, z.im).norm())
}

fn is_pole(z: Complex64) -> bool {
    matches!(pole_distance(z), Some(d) if d < 1e-14)
}

/// `ln Γ(z)` for `Re z ≥ 0.5` (Lanczos, g = 7).
fn ln_gamma_right(z: Complex64) -> Complex64 {
    let z = z - 1.0;
    let mut acc = c(LANCZOS[0], 0.0);
    for (i, &coef) in LANCZOS.iter().enumerate().skip(1) {
        acc += coef / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    (z + 0.5) * t.ln() - t + LN_SQRT_2PI + acc.ln()
}

/// Complex gamma function; errors at the poles `0, −1, −2, …`.
pub fn gamma(z: Complex64) -> Result<Complex64> {
    if !z.is_finite() {
        return Err(Error::validation("gamma of a non-finite argument"));
    }
    if is_pole(z) {
        return Err(Error::validation(alloc::format!("gamma pole at {z}")));
    }
    if z.im == 0.0 && z.re == z.re.round() && z.re > 0.0 && z.re <= 171.0 {
        // exact factorials
        let mut f = 1.0;
        let mut k = 2.0;
        while k < z.re {
            f *= k;
            k += 1.0;
        }
        return Ok(c(f, 0.0));
    }
    if z.re < 0.5 {
        let s = (z * PI).sin();
        let g = ln_gamma_right(1.0 - z).exp();
        return Ok(c(PI, 0.0) / (s * g));
    }
    Ok(ln_gamma_right(z).exp())
}

/// `1/Γ(z)`, entire; zero at the poles of Γ.
pub fn rgamma(z: Complex64) -> Complex64 {
    if is_pole(z) {
        return Complex64::zero();
    }
    if z.re < 0.5 {
        let s = (z * PI).sin();
        return s * ln_gamma_right(1.0 - z).exp() / PI;
    }
    (-ln_gamma_right(z)).exp()
}

/// `ln Γ(z)` (principal branch of the log is not tracked across reflection).
pub fn ln_gamma(z: Complex64) -> Result<Complex64> {
    if is_pole(z) {
        return Err(Error::validation(alloc::format!("gamma pole at {z}")));
    }
    if z.re < 0.5 {
        let s = (z * PI).sin();
        return Ok(c(PI, 0.0).ln() - s.ln() - ln_gamma_right(1.0 - z));
    }
    Ok(ln_gamma_right(z))
}

/// `Σₖ xᵏ / ((a)(a+1)···(a+k))`, so that `γ(a,x) = xᵃ e^{−x} · sum`.
fn lower_series_sum(a: Complex64, x: f64) -> Result<Complex64> {
    if is_pole(a) {
        return Err(Error::validation(alloc::format!(
            "lower incomplete gamma diverges at a = {a}"
        )));
    }
    let mut term = c(1.0, 0.0) / a;
    let mut sum = term;
    for k in 1..MAX_SERIES_TERMS {
        term = term * x / (a + k as f64);
        sum += term;
        if term.norm() <= f64::EPSILON * 0.5 * sum.norm() {
            return Ok(sum);
        }
    }
    Err(Error::convergence(
        "lower incomplete gamma series",
        alloc::format!("no convergence for a = {a}, x = {x}"),
    ))
}

/// Modified Lentz evaluation of the continued fraction for
/// `Γ(a,x)·eˣ·x^{−a}`.
fn upper_continued_fraction(a: Complex64, x: f64) -> Result<Complex64> {
    let tiny = c(1e-30, 0.0);
    let mut b = c(x + 1.0, 0.0) - a;
    let mut cc = c(1.0, 0.0) / tiny;
    let mut d = c(1.0, 0.0) / b;
    let mut h = d;
    for i in 1..MAX_CF_TERMS {
        let an = -(i as f64) * (c(i as f64, 0.0) - a);
        b += 2.0;
        d = an * d + b;
        if d.norm() < 1e-30 {
            d = tiny;
        }
        cc = b + an / cc;
        if cc.norm() < 1e-30 {
            cc = tiny;
        }
        d = c(1.0, 0.0) / d;
        let delta = d * cc;
        h *= delta;
        if (delta - 1.0).norm() <= 4.0 * f64::EPSILON {
            return Ok(h);
        }
    }
    Err(Error::convergence(
        "upper incomplete gamma continued fraction",
        alloc::format!("no convergence for a = {a}, x = {x}"),
    ))
}

fn prefactor(a: Complex64, x: f64) -> Complex64 {
    // xᵃ e^{−x}
    (a * x.ln() - x).exp()
}

fn check_x(x: f64) -> Result<()> {
    if !(x >= 0.0) || !x.is_finite() {
        return Err(Error::validation(alloc::format!(
            "incomplete gamma needs a finite x ≥ 0, got {x}"
        )));
    }
    Ok(())
}

/// Lower incomplete gamma `γ(a,x) = ∫₀ˣ e^{−t} t^{a−1} dt` for `Re a > 0`.
pub fn lower_incomplete_gamma(a: Complex64, x: f64) -> Result<Complex64> {
    check_x(x)?;
    if x == 0.0 {
        return Ok(Complex64::zero());
    }
    if x >= a.re + 1.0 && !is_pole(a) && a.re > 0.0 {
        let upper = prefactor(a, x) * upper_continued_fraction(a, x)?;
        return Ok(gamma(a)? - upper);
    }
    Ok(prefactor(a, x) * lower_series_sum(a, x)?)
}

/// Upper incomplete gamma `Γ(a,x) = ∫ₓ^∞ e^{−t} t^{a−1} dt`, any `a` when `x > 0`.
pub fn upper_incomplete_gamma(a: Complex64, x: f64) -> Result<Complex64> {
    check_x(x)?;
    if x == 0.0 {
        return gamma(a);
    }
    let near_pole = matches!(pole_distance(a), Some(d) if d < 1e-3);
    if x >= a.re + 1.0 || near_pole {
        return Ok(prefactor(a, x) * upper_continued_fraction(a, x)?);
    }
    Ok(gamma(a)? - prefactor(a, x) * lower_series_sum(a, x)?)
}
