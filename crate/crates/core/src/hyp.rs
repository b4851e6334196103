//! Matrix hypergeometric kernels: `₀F₁`, `₁F₁`, the incomplete Gauss pair,
//! Humbert `Ψ₂` and `Φ₃`, the incomplete Appell `F₁`/`F₂` pair, Bessel
//! `J_A`/`I_A` and Laguerre matrix polynomials.
//!
//! Coefficients are kept in normalized form, `(M)ₙ/n!` and `(C)ₙ⁻¹·n!`,
//! which grow at most polynomially in `n`; the factorials are folded into
//! the scalar part of each term. The kernel structs cache these tables so
//! that quadrature can evaluate one kernel at many points cheaply.

use alloc::format;
use alloc::vec::Vec;

use num_complex::Complex64;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::expm::{mat_pow_complex, mat_pow_scalar};
use crate::gamma::{reciprocal_gamma_matrix, IncompletePochhammer, Variant};
use crate::matrix::{checked_inverse, SquareMatrix};
use crate::series::{power_over_factorial, sum_layers, EvalResult, SeriesControl};
use crate::spectral::{check_commuting, is_shifted_invertible, DEFAULT_COMMUTE_TOL};

/// Validation error unless all matrices share one order and commute.
pub(crate) fn require_commuting(family: &[&SquareMatrix], context: &str) -> Result<()> {
    if !check_commuting(family, DEFAULT_COMMUTE_TOL)? {
        return Err(Error::validation(format!(
            "parameters of {context} do not commute"
        )));
    }
    Ok(())
}

fn require_finite(z: Complex64, context: &str) -> Result<()> {
    if !z.is_finite() {
        return Err(Error::validation(format!("{context}: non-finite argument {z}")));
    }
    Ok(())
}

/// `(M)ₙ/n!` for growing `n`.
#[derive(Clone, Debug)]
pub(crate) struct ScaledRising {
    base: SquareMatrix,
    values: Vec<SquareMatrix>,
}

impl ScaledRising {
    pub(crate) fn new(base: &SquareMatrix) -> Self {
        ScaledRising {
            base: base.clone(),
            values: alloc::vec![SquareMatrix::identity(base.order())],
        }
    }

    pub(crate) fn get(&mut self, n: usize) -> &SquareMatrix {
        while self.values.len() <= n {
            let j = self.values.len() - 1;
            let next = (&self.values[j] * &self.base.shifted(j as f64)).scale_real(1.0 / (j + 1) as f64);
            self.values.push(next);
        }
        &self.values[n]
    }
}

/// `(C)ₙ⁻¹·n!` for growing `n`, one checked inverse of `C + nI` per step.
#[derive(Clone, Debug)]
pub(crate) struct ScaledInverseRising {
    base: SquareMatrix,
    name: &'static str,
    values: Vec<SquareMatrix>,
}

impl ScaledInverseRising {
    pub(crate) fn new(base: &SquareMatrix, name: &'static str) -> Self {
        ScaledInverseRising {
            base: base.clone(),
            name,
            values: alloc::vec![SquareMatrix::identity(base.order())],
        }
    }

    pub(crate) fn get(&mut self, n: usize) -> Result<&SquareMatrix> {
        while self.values.len() <= n {
            let j = self.values.len() - 1;
            let inv = checked_inverse(&self.base.shifted(j as f64), &format!("{} + {j}I", self.name))?;
            let next = (&self.values[j] * &inv).scale_real((j + 1) as f64);
            self.values.push(next);
        }
        Ok(&self.values[n])
    }
}

/// `binom(l, m)` for `m = 0..=l`.
pub(crate) fn binomial_row(l: usize) -> Vec<f64> {
    let mut row = Vec::with_capacity(l + 1);
    let mut b = 1.0;
    for m in 0..=l {
        row.push(b);
        b = b * (l - m) as f64 / (m + 1) as f64;
    }
    row
}

/// `₀F₁(−; C; z) = Σₙ (C)ₙ⁻¹ zⁿ/n!` with a cached coefficient table.
#[derive(Clone, Debug)]
pub struct Hyp0F1 {
    coef: ScaledInverseRising,
    order: usize,
}

impl Hyp0F1 {
    pub fn new(c: &SquareMatrix) -> Self {
        Hyp0F1 { coef: ScaledInverseRising::new(c, "C"), order: c.order() }
    }

    pub fn eval(&mut self, z: Complex64, ctl: &SeriesControl) -> Result<EvalResult> {
        require_finite(z, "0F1")?;
        let mut s = Complex64::new(1.0, 0.0);
        sum_layers(self.order, ctl, "0F1 series", |n| {
            if n > 0 {
                s = s * z / (n * n) as f64;
            }
            if s.is_zero() {
                return Ok((SquareMatrix::zeros(self.order), 0));
            }
            Ok((self.coef.get(n)?.scale(s), 1))
        })
    }
}

pub fn hyp0f1(c: &SquareMatrix, z: Complex64, ctl: &SeriesControl) -> Result<EvalResult> {
    Hyp0F1::new(c).eval(z, ctl)
}

/// `₁F₁(B; C; z) = Σₙ (B)ₙ (C)ₙ⁻¹ zⁿ/n!`.
#[derive(Clone, Debug)]
pub struct Hyp1F1 {
    num: ScaledRising,
    den: ScaledInverseRising,
    coef: Vec<SquareMatrix>,
    order: usize,
}

impl Hyp1F1 {
    pub fn new(b: &SquareMatrix, c: &SquareMatrix) -> Result<Self> {
        require_commuting(&[b, c], "1F1")?;
        Ok(Hyp1F1 {
            num: ScaledRising::new(b),
            den: ScaledInverseRising::new(c, "C"),
            coef: Vec::new(),
            order: b.order(),
        })
    }

    fn coefficient(&mut self, n: usize) -> Result<&SquareMatrix> {
        while self.coef.len() <= n {
            let j = self.coef.len();
            let m = self.num.get(j) * self.den.get(j)?;
            self.coef.push(m);
        }
        Ok(&self.coef[n])
    }

    pub fn eval(&mut self, z: Complex64, ctl: &SeriesControl) -> Result<EvalResult> {
        require_finite(z, "1F1")?;
        let mut s = Complex64::new(1.0, 0.0);
        let order = self.order;
        sum_layers(order, ctl, "1F1 series", |n| {
            if n > 0 {
                s = s * z / n as f64;
            }
            if s.is_zero() {
                return Ok((SquareMatrix::zeros(order), 0));
            }
            Ok((self.coefficient(n)?.scale(s), 1))
        })
    }
}

pub fn hyp1f1(b: &SquareMatrix, c: &SquareMatrix, z: Complex64, ctl: &SeriesControl) -> Result<EvalResult> {
    Hyp1F1::new(b, c)?.eval(z, ctl)
}

fn incomplete_gauss(
    variant: Variant,
    a: &SquareMatrix,
    x: f64,
    b: &SquareMatrix,
    c: &SquareMatrix,
    z: Complex64,
    ctl: &SeriesControl,
) -> Result<EvalResult> {
    require_commuting(&[a, b, c], "incomplete Gauss function")?;
    require_finite(z, "incomplete Gauss function")?;
    let mut ip = IncompletePochhammer::new(a, x)?;
    let mut num = ScaledRising::new(b);
    let mut den = ScaledInverseRising::new(c, "C");
    let pf = power_over_factorial(z, ctl.max_terms_per_index);
    let order = a.order();
    sum_layers(order, ctl, "incomplete Gauss series", |n| {
        if pf[n].is_zero() {
            return Ok((SquareMatrix::zeros(order), 0));
        }
        // [A;x]ₙ (B)ₙ (C)ₙ⁻¹ zⁿ/n!
        let t = &(&ip.get(variant, n)? * num.get(n)) * den.get(n)?;
        Ok((t.scale(pf[n]), 1))
    })
}

/// `₂γ₁[(A;x), B; C; z] = Σₙ (A;x)ₙ (B)ₙ (C)ₙ⁻¹ zⁿ/n!`.
pub fn incomplete_gauss_lower(
    a: &SquareMatrix,
    x: f64,
    b: &SquareMatrix,
    c: &SquareMatrix,
    z: Complex64,
    ctl: &SeriesControl,
) -> Result<EvalResult> {
    incomplete_gauss(Variant::Lower, a, x, b, c, z, ctl)
}

/// `₂Γ₁[[A;x], B; C; z] = Σₙ [A;x]ₙ (B)ₙ (C)ₙ⁻¹ zⁿ/n!`.
pub fn incomplete_gauss_upper(
    a: &SquareMatrix,
    x: f64,
    b: &SquareMatrix,
    c: &SquareMatrix,
    z: Complex64,
    ctl: &SeriesControl,
) -> Result<EvalResult> {
    incomplete_gauss(Variant::Upper, a, x, b, c, z, ctl)
}

/// Gauss `₂F₁(A, B; C; z)`.
pub fn gauss_2f1(
    a: &SquareMatrix,
    b: &SquareMatrix,
    c: &SquareMatrix,
    z: Complex64,
    ctl: &SeriesControl,
) -> Result<EvalResult> {
    incomplete_gauss(Variant::Complete, a, 0.0, b, c, z, ctl)
}

/// Humbert `Ψ₂(A; C, C′; z₁, z₂) = Σ (A)_{m+n} (C)ₘ⁻¹ (C′)ₙ⁻¹ z₁ᵐz₂ⁿ/(m!n!)`.
#[derive(Clone, Debug)]
pub struct HumbertPsi2 {
    a: ScaledRising,
    c: ScaledInverseRising,
    cp: ScaledInverseRising,
    order: usize,
}

impl HumbertPsi2 {
    pub fn new(a: &SquareMatrix, c: &SquareMatrix, cp: &SquareMatrix) -> Result<Self> {
        require_commuting(&[a, c, cp], "Psi2")?;
        Ok(HumbertPsi2 {
            a: ScaledRising::new(a),
            c: ScaledInverseRising::new(c, "C"),
            cp: ScaledInverseRising::new(cp, "C'"),
            order: a.order(),
        })
    }

    pub fn eval(&mut self, z1: Complex64, z2: Complex64, ctl: &SeriesControl) -> Result<EvalResult> {
        require_finite(z1, "Psi2")?;
        require_finite(z2, "Psi2")?;
        let p1 = power_over_factorial(z1, ctl.max_terms_per_index);
        let p2 = power_over_factorial(z2, ctl.max_terms_per_index);
        let order = self.order;
        sum_layers(order, ctl, "Psi2 series", |l| {
            let binom = binomial_row(l);
            let mut layer = SquareMatrix::zeros(order);
            let mut count = 0;
            for m in 0..=l {
                let n = l - m;
                let s = p1[m] * p2[n] * binom[m];
                if s.is_zero() {
                    continue;
                }
                let t = &(self.a.get(l) * self.c.get(m)?) * self.cp.get(n)?;
                layer.add_scaled(&t, s);
                count += 1;
            }
            Ok((layer, count))
        })
    }
}

pub fn humbert_psi2(
    a: &SquareMatrix,
    c: &SquareMatrix,
    cp: &SquareMatrix,
    z1: Complex64,
    z2: Complex64,
    ctl: &SeriesControl,
) -> Result<EvalResult> {
    HumbertPsi2::new(a, c, cp)?.eval(z1, z2, ctl)
}

/// Humbert `Φ₃(B′; C; z₁, z₂) = Σ (B′)ₘ (C)_{m+n}⁻¹ z₁ᵐz₂ⁿ/(m!n!)`.
#[derive(Clone, Debug)]
pub struct HumbertPhi3 {
    bp: ScaledRising,
    c: ScaledInverseRising,
    order: usize,
}

impl HumbertPhi3 {
    pub fn new(bp: &SquareMatrix, c: &SquareMatrix) -> Result<Self> {
        require_commuting(&[bp, c], "Phi3")?;
        Ok(HumbertPhi3 {
            bp: ScaledRising::new(bp),
            c: ScaledInverseRising::new(c, "C"),
            order: bp.order(),
        })
    }

    pub fn eval(&mut self, z1: Complex64, z2: Complex64, ctl: &SeriesControl) -> Result<EvalResult> {
        require_finite(z1, "Phi3")?;
        require_finite(z2, "Phi3")?;
        let p1 = power_over_factorial(z1, ctl.max_terms_per_index);
        // z₂ⁿ/(n!)²
        let mut r2 = Vec::with_capacity(ctl.max_terms_per_index);
        let mut cur = Complex64::new(1.0, 0.0);
        for n in 0..ctl.max_terms_per_index {
            if n > 0 {
                cur = cur * z2 / (n * n) as f64;
            }
            r2.push(cur);
        }
        let order = self.order;
        sum_layers(order, ctl, "Phi3 series", |l| {
            let binom = binomial_row(l);
            let mut layer = SquareMatrix::zeros(order);
            let mut count = 0;
            for m in 0..=l {
                let n = l - m;
                // z₁ᵐz₂ⁿ/((m+n)! n!) after the normalizations
                let s = p1[m] * r2[n] / binom[m];
                if s.is_zero() {
                    continue;
                }
                let t = self.bp.get(m) * self.c.get(l)?;
                layer.add_scaled(&t, s);
                count += 1;
            }
            Ok((layer, count))
        })
    }
}

pub fn humbert_phi3(
    bp: &SquareMatrix,
    c: &SquareMatrix,
    z1: Complex64,
    z2: Complex64,
    ctl: &SeriesControl,
) -> Result<EvalResult> {
    HumbertPhi3::new(bp, c)?.eval(z1, z2, ctl)
}

/// How the denominators of a two-variable incomplete Appell series couple.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum AppellKind {
    /// `(C)_{m+n}⁻¹`
    First,
    /// `(C)ₘ⁻¹ (C′)ₙ⁻¹`
    Second,
}

#[allow(clippy::too_many_arguments)]
fn incomplete_appell(
    kind: AppellKind,
    variant: Variant,
    a: &SquareMatrix,
    x: f64,
    b: &SquareMatrix,
    bp: &SquareMatrix,
    c: &SquareMatrix,
    cp: Option<&SquareMatrix>,
    z1: Complex64,
    z2: Complex64,
    ctl: &SeriesControl,
) -> Result<EvalResult> {
    let mut family = alloc::vec![a, b, bp, c];
    if let Some(cp) = cp {
        family.push(cp);
    }
    require_commuting(&family, "incomplete Appell function")?;
    require_finite(z1, "incomplete Appell function")?;
    require_finite(z2, "incomplete Appell function")?;
    let mut ip = IncompletePochhammer::new(a, x)?;
    let mut pb = ScaledRising::new(b);
    let mut pbp = ScaledRising::new(bp);
    let mut qc = ScaledInverseRising::new(c, "C");
    let mut qcp = cp.map(|cp| ScaledInverseRising::new(cp, "C'"));
    let p1 = power_over_factorial(z1, ctl.max_terms_per_index);
    let p2 = power_over_factorial(z2, ctl.max_terms_per_index);
    let order = a.order();
    sum_layers(order, ctl, "incomplete Appell series", |l| {
        let binom = binomial_row(l);
        let mut layer = SquareMatrix::zeros(order);
        let mut count = 0;
        let mut num_l: Option<SquareMatrix> = None;
        for m in 0..=l {
            let n = l - m;
            let mut s = p1[m] * p2[n];
            if kind == AppellKind::First {
                s /= binom[m];
            }
            if s.is_zero() {
                continue;
            }
            if num_l.is_none() {
                num_l = Some(ip.get(variant, l)?);
            }
            let head = num_l.as_ref().expect("just set");
            let mut t = &(head * pb.get(m)) * pbp.get(n);
            t = match kind {
                // the (m+n)! of (C)_{m+n}⁻¹ sits in the binomial
                AppellKind::First => &t * qc.get(l)?,
                AppellKind::Second => {
                    let qcp = qcp.as_mut().expect("second Appell needs C'");
                    &(&t * qc.get(m)?) * qcp.get(n)?
                }
            };
            layer.add_scaled(&t, s);
            count += 1;
        }
        Ok((layer, count))
    })
}

/// Incomplete first Appell function with numerator `(A;x)` or `[A;x]`:
/// `Σ [A;x]_{m+n} (B)ₘ (B′)ₙ (C)_{m+n}⁻¹ z₁ᵐz₂ⁿ/(m!n!)`.
#[allow(clippy::too_many_arguments)]
pub fn incomplete_appell_f1(
    variant: Variant,
    a: &SquareMatrix,
    x: f64,
    b: &SquareMatrix,
    bp: &SquareMatrix,
    c: &SquareMatrix,
    z1: Complex64,
    z2: Complex64,
    ctl: &SeriesControl,
) -> Result<EvalResult> {
    incomplete_appell(AppellKind::First, variant, a, x, b, bp, c, None, z1, z2, ctl)
}

/// Incomplete second Appell function:
/// `Σ [A;x]_{m+n} (B)ₘ (B′)ₙ (C)ₘ⁻¹ (C′)ₙ⁻¹ z₁ᵐz₂ⁿ/(m!n!)`.
#[allow(clippy::too_many_arguments)]
pub fn incomplete_appell_f2(
    variant: Variant,
    a: &SquareMatrix,
    x: f64,
    b: &SquareMatrix,
    bp: &SquareMatrix,
    c: &SquareMatrix,
    cp: &SquareMatrix,
    z1: Complex64,
    z2: Complex64,
    ctl: &SeriesControl,
) -> Result<EvalResult> {
    incomplete_appell(AppellKind::Second, variant, a, x, b, bp, c, Some(cp), z1, z2, ctl)
}

/// Bessel matrix function `J_A` or its modified form `I_A`, with the
/// coefficients `Γ⁻¹(A+(m+1)I)·m!` cached.
#[derive(Clone, Debug)]
pub struct BesselMatrix {
    a: SquareMatrix,
    modified: bool,
    coef: Vec<SquareMatrix>,
}

impl BesselMatrix {
    /// `J_A`.
    pub fn j(a: &SquareMatrix) -> Result<Self> {
        Self::new(a, false)
    }

    /// `I_A`.
    pub fn i(a: &SquareMatrix) -> Result<Self> {
        Self::new(a, true)
    }

    fn new(a: &SquareMatrix, modified: bool) -> Result<Self> {
        let g0 = reciprocal_gamma_matrix(&a.shifted(1.0))?;
        Ok(BesselMatrix { a: a.clone(), modified, coef: alloc::vec![g0] })
    }

    fn coefficient(&mut self, m: usize) -> Result<&SquareMatrix> {
        while self.coef.len() <= m {
            let j = self.coef.len();
            // Γ⁻¹(A+(j+1)I) = Γ⁻¹(A+jI)·(A+jI)⁻¹
            let inv = checked_inverse(&self.a.shifted(j as f64), &format!("A + {j}I"))?;
            let next = (&self.coef[j - 1] * &inv).scale_real(j as f64);
            self.coef.push(next);
        }
        Ok(&self.coef[m])
    }

    /// Evaluates at `z ≠ 0`; `(z/2)ᴬ` uses the principal logarithm.
    pub fn eval(&mut self, z: Complex64, ctl: &SeriesControl) -> Result<EvalResult> {
        require_finite(z, "Bessel matrix function")?;
        if z.is_zero() {
            return Err(Error::validation("Bessel matrix function needs z ≠ 0"));
        }
        let half = z * 0.5;
        let w = if self.modified { half * half } else { -(half * half) };
        let order = self.a.order();
        let mut s = Complex64::new(1.0, 0.0);
        let mut r = sum_layers(order, ctl, "Bessel series", |m| {
            if m > 0 {
                s = s * w / (m * m) as f64;
            }
            if s.is_zero() {
                return Ok((SquareMatrix::zeros(order), 0));
            }
            Ok((self.coefficient(m)?.scale(s), 1))
        })?;
        let pow = if half.im == 0.0 && half.re > 0.0 {
            mat_pow_scalar(&self.a, half.re)?
        } else {
            mat_pow_complex(&self.a, half)?
        };
        r.value = &r.value * &pow;
        r.error_estimate *= pow.frobenius_norm();
        Ok(r)
    }
}

/// `J_A(z) = Σₘ (−1)ᵐ Γ⁻¹(A+(m+1)I)/m! (z/2)^{A+2mI}`.
pub fn bessel_j(a: &SquareMatrix, z: Complex64, ctl: &SeriesControl) -> Result<EvalResult> {
    BesselMatrix::j(a)?.eval(z, ctl)
}

/// `I_A(z) = Σₘ Γ⁻¹(A+(m+1)I)/m! (z/2)^{A+2mI}`.
pub fn bessel_i(a: &SquareMatrix, z: Complex64, ctl: &SeriesControl) -> Result<EvalResult> {
    BesselMatrix::i(a)?.eval(z, ctl)
}

/// Laguerre matrix polynomial
/// `L_n^{(A,λ)}(z) = Σₖ (−1)ᵏλᵏ/(k!(n−k)!) (A+I)ₙ [(A+I)ₖ]⁻¹ zᵏ`.
///
/// `(A+I)ₙ[(A+I)ₖ]⁻¹` is formed as the product `(A+(k+1)I)···(A+nI)`.
pub fn laguerre(n: usize, a: &SquareMatrix, lambda: Complex64, z: Complex64) -> Result<SquareMatrix> {
    require_finite(lambda, "Laguerre matrix polynomial")?;
    require_finite(z, "Laguerre matrix polynomial")?;
    let a1 = a.shifted(1.0);
    let tol = 1e-12 * a1.frobenius_norm().max(1.0);
    if n > 0 && !is_shifted_invertible(&a1, n - 1, tol) {
        return Err(Error::singular(format!(
            "(A+I)ₖ is singular for some k ≤ {n} in the Laguerre polynomial"
        )));
    }
    let order = a.order();
    // tails[k] = (A+(k+1)I)···(A+nI)
    let mut tails = alloc::vec![SquareMatrix::identity(order); n + 1];
    for k in (0..n).rev() {
        tails[k] = &a.shifted((k + 1) as f64) * &tails[k + 1];
    }
    let mut out = SquareMatrix::zeros(order);
    let mut fact_k = 1.0;
    let mut fact_nk: f64 = (1..=n).map(|j| j as f64).product();
    let mut pw = Complex64::new(1.0, 0.0);
    let lz = -(lambda * z);
    for (k, tail) in tails.iter().enumerate() {
        if k > 0 {
            fact_k *= k as f64;
            fact_nk /= (n - k + 1) as f64;
            pw *= lz;
        }
        out.add_scaled(tail, pw / (fact_k * fact_nk));
    }
    Ok(out)
}
