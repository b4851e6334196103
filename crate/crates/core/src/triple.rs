//! Incomplete Srivastava triple series `H_A`, `H_B`, `H_C` with matrix
//! parameters.
//!
//! All three share the numerator `N_{m+p} (B)_{m+n} (B′)_{n+p}`, where
//! `N` is `(A;x)`, `[A;x]` or `(A)`. The denominators are
//!
//! * `H_A`: `(C)ₘ⁻¹ (C′)_{n+p}⁻¹`
//! * `H_B`: `(C)ₘ⁻¹ (C′)ₙ⁻¹ (C″)ₚ⁻¹`
//! * `H_C`: `(C)_{m+n+p}⁻¹`
//!
//! each term carrying `z₁ᵐ z₂ⁿ z₃ᵖ/(m! n! p!)`. Summation runs over layers
//! `m+n+p = L` under [`SeriesControl`], and every term is multiplied in the
//! order written above.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::gamma::{pochhammer, IncompletePochhammer};
use crate::hyp::{require_commuting, ScaledInverseRising, ScaledRising};
use crate::matrix::{checked_inverse, SquareMatrix};
use crate::series::{sum_layers, EvalResult, SeriesControl};
use crate::spectral::is_positive_stable;

pub use crate::gamma::Variant;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    HA,
    HB,
    HC,
}

impl Family {
    pub const ALL: [Family; 3] = [Family::HA, Family::HB, Family::HC];

    pub fn name(self) -> &'static str {
        match self {
            Family::HA => "HA",
            Family::HB => "HB",
            Family::HC => "HC",
        }
    }

    pub fn parse(s: &str) -> Option<Family> {
        match s.to_ascii_uppercase().as_str() {
            "HA" => Some(Family::HA),
            "HB" => Some(Family::HB),
            "HC" => Some(Family::HC),
            _ => None,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A parameter slot of a [`ParamSet`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Role {
    A,
    B,
    Bp,
    C,
    Cp,
    Cpp,
}

impl Role {
    pub fn name(self) -> &'static str {
        match self {
            Role::A => "A",
            Role::B => "B",
            Role::Bp => "B'",
            Role::C => "C",
            Role::Cp => "C'",
            Role::Cpp => "C''",
        }
    }
}

/// Commuting matrix parameters of one family plus the truncation point `x`.
///
/// `cp` is present for `H_A` and `H_B`, `cpp` for `H_B` only.
#[derive(Clone, Debug, PartialEq)]
pub struct ParamSet {
    pub family: Family,
    pub a: SquareMatrix,
    pub b: SquareMatrix,
    pub bp: SquareMatrix,
    pub c: SquareMatrix,
    pub cp: Option<SquareMatrix>,
    pub cpp: Option<SquareMatrix>,
    pub x: f64,
}

impl ParamSet {
    pub fn ha(a: SquareMatrix, b: SquareMatrix, bp: SquareMatrix, c: SquareMatrix, cp: SquareMatrix, x: f64) -> Result<Self> {
        let p = ParamSet { family: Family::HA, a, b, bp, c, cp: Some(cp), cpp: None, x };
        p.validate()?;
        Ok(p)
    }

    #[allow(clippy::too_many_arguments)]
    pub fn hb(
        a: SquareMatrix,
        b: SquareMatrix,
        bp: SquareMatrix,
        c: SquareMatrix,
        cp: SquareMatrix,
        cpp: SquareMatrix,
        x: f64,
    ) -> Result<Self> {
        let p = ParamSet { family: Family::HB, a, b, bp, c, cp: Some(cp), cpp: Some(cpp), x };
        p.validate()?;
        Ok(p)
    }

    pub fn hc(a: SquareMatrix, b: SquareMatrix, bp: SquareMatrix, c: SquareMatrix, x: f64) -> Result<Self> {
        let p = ParamSet { family: Family::HC, a, b, bp, c, cp: None, cpp: None, x };
        p.validate()?;
        Ok(p)
    }

    pub fn order(&self) -> usize {
        self.a.order()
    }

    /// The matrices present for this family, in role order.
    pub fn matrices(&self) -> Vec<(Role, &SquareMatrix)> {
        let mut v = alloc::vec![(Role::A, &self.a), (Role::B, &self.b), (Role::Bp, &self.bp), (Role::C, &self.c)];
        if let Some(cp) = &self.cp {
            v.push((Role::Cp, cp));
        }
        if let Some(cpp) = &self.cpp {
            v.push((Role::Cpp, cpp));
        }
        v
    }

    /// Checks slot presence, common order, commutation, `x ≥ 0` and
    /// positive stability of `A`. Invertibility of the shifted denominators
    /// is checked as the series reaches each shift.
    pub fn validate(&self) -> Result<()> {
        let (need_cp, need_cpp) = match self.family {
            Family::HA => (true, false),
            Family::HB => (true, true),
            Family::HC => (false, false),
        };
        if self.cp.is_some() != need_cp || self.cpp.is_some() != need_cpp {
            return Err(Error::validation(format!(
                "{} takes C'{} and {} C''",
                self.family,
                if need_cp { "" } else { " no" },
                if need_cpp { "a" } else { "no" }
            )));
        }
        if !(self.x >= 0.0) || !self.x.is_finite() {
            return Err(Error::validation(format!("truncation point x must be finite and ≥ 0, got {}", self.x)));
        }
        let mats: Vec<&SquareMatrix> = self.matrices().into_iter().map(|(_, m)| m).collect();
        require_commuting(&mats, &format!("{}", self.family))?;
        if !is_positive_stable(&self.a) {
            return Err(Error::validation("A must be positive stable"));
        }
        Ok(())
    }

    pub fn get(&self, role: Role) -> Option<&SquareMatrix> {
        match role {
            Role::A => Some(&self.a),
            Role::B => Some(&self.b),
            Role::Bp => Some(&self.bp),
            Role::C => Some(&self.c),
            Role::Cp => self.cp.as_ref(),
            Role::Cpp => self.cpp.as_ref(),
        }
    }

    fn slot(&mut self, role: Role) -> Result<&mut SquareMatrix> {
        let family = self.family;
        let m = match role {
            Role::A => Some(&mut self.a),
            Role::B => Some(&mut self.b),
            Role::Bp => Some(&mut self.bp),
            Role::C => Some(&mut self.c),
            Role::Cp => self.cp.as_mut(),
            Role::Cpp => self.cpp.as_mut(),
        };
        m.ok_or_else(|| Error::validation(format!("{family} has no parameter {}", role.name())))
    }

    /// Copy with `role` replaced by `value` (not re-validated).
    pub fn with(&self, role: Role, value: SquareMatrix) -> Result<Self> {
        let mut p = self.clone();
        *p.slot(role)? = value;
        Ok(p)
    }

    /// Copy with `role` shifted by `k·I`.
    pub fn shifted(&self, role: Role, k: f64) -> Result<Self> {
        let mut p = self.clone();
        let m = p.slot(role)?;
        *m = m.shifted(k);
        Ok(p)
    }

    /// Applies several shifts at once.
    pub fn shifted_many(&self, shifts: &[(Role, f64)]) -> Result<Self> {
        let mut p = self.clone();
        for &(role, k) in shifts {
            let m = p.slot(role)?;
            *m = m.shifted(k);
        }
        Ok(p)
    }

    pub fn with_x(&self, x: f64) -> Self {
        ParamSet { x, ..self.clone() }
    }
}

/// The three scalar arguments.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TriplePoint {
    pub z1: Complex64,
    pub z2: Complex64,
    pub z3: Complex64,
}

impl TriplePoint {
    pub fn new(z1: Complex64, z2: Complex64, z3: Complex64) -> Self {
        TriplePoint { z1, z2, z3 }
    }

    pub fn real(z1: f64, z2: f64, z3: f64) -> Self {
        TriplePoint::new(Complex64::new(z1, 0.0), Complex64::new(z2, 0.0), Complex64::new(z3, 0.0))
    }

    pub fn zero() -> Self {
        TriplePoint::real(0.0, 0.0, 0.0)
    }

    pub fn as_array(&self) -> [Complex64; 3] {
        [self.z1, self.z2, self.z3]
    }

    pub fn from_array(z: [Complex64; 3]) -> Self {
        TriplePoint::new(z[0], z[1], z[2])
    }

    pub fn is_finite(&self) -> bool {
        self.z1.is_finite() && self.z2.is_finite() && self.z3.is_finite()
    }

    pub fn scaled(&self, f: [f64; 3]) -> Self {
        TriplePoint::new(self.z1 * f[0], self.z2 * f[1], self.z3 * f[2])
    }
}

/// Numerator symbol in index `m+p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Numerator {
    Of(Variant),
    /// `(A;x)ₖ + [A;x]ₖ`, used where the complete function is needed with
    /// its two halves computed separately.
    SplitSum,
}

/// `ln k!` for `k = 0..len`.
fn ln_factorials(len: usize) -> Vec<f64> {
    let mut v = Vec::with_capacity(len);
    let mut acc = 0.0;
    for k in 0..len {
        if k > 1 {
            acc += (k as f64).ln();
        }
        v.push(acc);
    }
    v
}

/// `(z/|z|)ᵏ` and `ln|z|`, so that powers stay exact in sign for real `z`.
struct PowerTable {
    phase: Vec<Complex64>,
    ln_abs: f64,
    zero: bool,
}

impl PowerTable {
    fn new(z: Complex64, len: usize) -> Self {
        let r = z.norm();
        let zero = r == 0.0;
        let u = if zero { Complex64::new(1.0, 0.0) } else { z / r };
        let mut phase = Vec::with_capacity(len);
        let mut cur = Complex64::new(1.0, 0.0);
        for k in 0..len {
            if k > 0 {
                cur *= u;
            }
            phase.push(cur);
        }
        PowerTable { phase, ln_abs: if zero { 0.0 } else { r.ln() }, zero }
    }

    /// `false` if `zᵏ` vanishes.
    fn live(&self, k: usize) -> bool {
        !(self.zero && k > 0)
    }
}

/// Lazily grown coefficient tables for one parameter set and numerator.
pub(crate) struct TripleSeries {
    family: Family,
    numerator: Numerator,
    order: usize,
    ip: IncompletePochhammer,
    /// `N_k/k!`
    num: Vec<SquareMatrix>,
    b: ScaledRising,
    bp: ScaledRising,
    c: ScaledInverseRising,
    cp: Option<ScaledInverseRising>,
    cpp: Option<ScaledInverseRising>,
    ln_fact: Vec<f64>,
}

impl TripleSeries {
    pub(crate) fn new(p: &ParamSet, numerator: Numerator) -> Result<Self> {
        p.validate()?;
        let x = if numerator == Numerator::Of(Variant::Complete) { 0.0 } else { p.x };
        Ok(TripleSeries {
            family: p.family,
            numerator,
            order: p.order(),
            ip: IncompletePochhammer::new(&p.a, x)?,
            num: Vec::new(),
            b: ScaledRising::new(&p.b),
            bp: ScaledRising::new(&p.bp),
            c: ScaledInverseRising::new(&p.c, "C"),
            cp: p.cp.as_ref().map(|m| ScaledInverseRising::new(m, "C'")),
            cpp: p.cpp.as_ref().map(|m| ScaledInverseRising::new(m, "C''")),
            ln_fact: ln_factorials(64),
        })
    }

    fn ln_fact(&mut self, k: usize) -> f64 {
        if k >= self.ln_fact.len() {
            self.ln_fact = ln_factorials(2 * k + 1);
        }
        self.ln_fact[k]
    }

    fn numerator(&mut self, k: usize) -> Result<&SquareMatrix> {
        while self.num.len() <= k {
            let j = self.num.len();
            let raw = match self.numerator {
                Numerator::Of(v) => self.ip.get(v, j)?,
                Numerator::SplitSum => self.ip.split_sum(j)?,
            };
            let inv_fact = (-self.ln_fact(j)).exp();
            self.num.push(raw.scale_real(inv_fact));
        }
        Ok(&self.num[k])
    }

    /// `ln` of the factorial weight left in the scalar part after the
    /// normalizations, combined with `1/(m!n!p!)`.
    fn ln_weight(&mut self, m: usize, n: usize, p: usize) -> f64 {
        let num = self.ln_fact(m + p) + self.ln_fact(m + n) + self.ln_fact(n + p);
        let base = self.ln_fact(m) + self.ln_fact(n) + self.ln_fact(p);
        let den = match self.family {
            Family::HA => self.ln_fact(m) + self.ln_fact(n + p),
            Family::HB => self.ln_fact(m) + self.ln_fact(n) + self.ln_fact(p),
            Family::HC => self.ln_fact(m + n + p),
        };
        num - base - den
    }

    /// The matrix part of term `(m,n,p)`, in canonical order.
    fn matrix_part(&mut self, m: usize, n: usize, p: usize) -> Result<SquareMatrix> {
        let head = self.numerator(m + p)?.clone();
        let mut t = &(&head * self.b.get(m + n)) * self.bp.get(n + p);
        t = match self.family {
            Family::HA => {
                let cp = self.cp.as_mut().expect("validated");
                &(&t * self.c.get(m)?) * cp.get(n + p)?
            }
            Family::HB => {
                let cp = self.cp.as_mut().expect("validated");
                let cpp = self.cpp.as_mut().expect("validated");
                &(&(&t * self.c.get(m)?) * cp.get(n)?) * cpp.get(p)?
            }
            Family::HC => &t * self.c.get(m + n + p)?,
        };
        Ok(t)
    }

    /// Calls `f(m, n, p, term)` for each non-vanishing term of layer `l`.
    fn layer_terms<F>(&mut self, tables: &[PowerTable; 3], l: usize, mut f: F) -> Result<()>
    where
        F: FnMut(usize, usize, usize, &SquareMatrix),
    {
        for m in 0..=l {
            if !tables[0].live(m) {
                continue;
            }
            for n in 0..=(l - m) {
                let p = l - m - n;
                if !tables[1].live(n) || !tables[2].live(p) {
                    continue;
                }
                let ln_mag = self.ln_weight(m, n, p)
                    + m as f64 * tables[0].ln_abs
                    + n as f64 * tables[1].ln_abs
                    + p as f64 * tables[2].ln_abs;
                let s = tables[0].phase[m] * tables[1].phase[n] * tables[2].phase[p] * ln_mag.exp();
                if s.is_zero() {
                    continue;
                }
                let t = self.matrix_part(m, n, p)?.scale(s);
                f(m, n, p, &t);
            }
        }
        Ok(())
    }

    fn tables(z: &TriplePoint, len: usize) -> [PowerTable; 3] {
        [PowerTable::new(z.z1, len), PowerTable::new(z.z2, len), PowerTable::new(z.z3, len)]
    }

    pub(crate) fn sum(&mut self, z: &TriplePoint, ctl: &SeriesControl) -> Result<EvalResult> {
        if !z.is_finite() {
            return Err(Error::validation("triple series point must be finite"));
        }
        let tables = Self::tables(z, ctl.max_terms_per_index + 1);
        let order = self.order;
        let context = format!("{} triple series", self.family);
        sum_layers(order, ctl, &context, |l| {
            let mut layer = SquareMatrix::zeros(order);
            let mut count = 0;
            self.layer_terms(&tables, l, |_, _, _, t| {
                layer += t;
                count += 1;
            })?;
            Ok((layer, count))
        })
    }

    /// Visits every term of layers `0..layers`.
    pub(crate) fn visit<F>(&mut self, z: &TriplePoint, layers: usize, mut f: F) -> Result<()>
    where
        F: FnMut(usize, usize, usize, &SquareMatrix),
    {
        let tables = Self::tables(z, layers + 1);
        for l in 0..layers {
            self.layer_terms(&tables, l, &mut f)?;
        }
        Ok(())
    }
}

/// Evaluates the triple series of `p.family` with numerator `variant`.
///
/// [`Variant::Complete`] ignores `p.x`.
pub fn evaluate(p: &ParamSet, variant: Variant, z: &TriplePoint, ctl: &SeriesControl) -> Result<EvalResult> {
    TripleSeries::new(p, Numerator::Of(variant))?.sum(z, ctl)
}

fn require_family(p: &ParamSet, family: Family) -> Result<()> {
    if p.family != family {
        return Err(Error::validation(format!(
            "expected {family} parameters, got {}",
            p.family
        )));
    }
    Ok(())
}

macro_rules! evaluator {
    ($(#[$doc:meta])* $name:ident, $family:expr, $variant:expr) => {
        $(#[$doc])*
        pub fn $name(p: &ParamSet, z: &TriplePoint, ctl: &SeriesControl) -> Result<EvalResult> {
            require_family(p, $family)?;
            evaluate(p, $variant, z, ctl)
        }
    };
}

evaluator!(
    /// `Γ_A^H`: upper incomplete `H_A`, numerator `[A;x]_{m+p}`.
    eval_gamma_ha, Family::HA, Variant::Upper
);
evaluator!(
    /// `γ_A^H`: lower incomplete `H_A`, numerator `(A;x)_{m+p}`.
    eval_gamma_lower_ha, Family::HA, Variant::Lower
);
evaluator!(
    /// Complete `H_A`.
    eval_ha, Family::HA, Variant::Complete
);
evaluator!(
    /// Upper incomplete `H_B`.
    eval_gamma_hb, Family::HB, Variant::Upper
);
evaluator!(
    /// Lower incomplete `H_B`.
    eval_gamma_lower_hb, Family::HB, Variant::Lower
);
evaluator!(
    /// Complete `H_B`.
    eval_hb, Family::HB, Variant::Complete
);
evaluator!(
    /// Upper incomplete `H_C`.
    eval_gamma_hc, Family::HC, Variant::Upper
);
evaluator!(
    /// Lower incomplete `H_C`.
    eval_gamma_lower_hc, Family::HC, Variant::Lower
);
evaluator!(
    /// Complete `H_C`.
    eval_hc, Family::HC, Variant::Complete
);

/// Orders of differentiation in `(z₁, z₂, z₃)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct DerivativeOrders {
    pub m: usize,
    pub n: usize,
    pub p: usize,
}

impl DerivativeOrders {
    pub fn new(m: usize, n: usize, p: usize) -> Self {
        DerivativeOrders { m, n, p }
    }

    pub fn total(&self) -> usize {
        self.m + self.n + self.p
    }

    pub fn as_array(&self) -> [usize; 3] {
        [self.m, self.n, self.p]
    }
}

impl fmt::Display for DerivativeOrders {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.m, self.n, self.p)
    }
}

/// Constant prefactor and shifted parameters of the closed-form
/// derivative `∂ᵐ₁∂ⁿ₂∂ᵖ₃ F = prefactor · F[shifted]`.
pub fn derivative_parameters(p: &ParamSet, orders: DerivativeOrders) -> Result<(SquareMatrix, ParamSet)> {
    let DerivativeOrders { m, n, p: q } = orders;
    let mut pre = &(&pochhammer(&p.a, m + q) * &pochhammer(&p.b, m + n)) * &pochhammer(&p.bp, n + q);
    let inv_poch = |c: &SquareMatrix, k: usize, what: &str| -> Result<SquareMatrix> {
        checked_inverse(&pochhammer(c, k), &format!("({what})_{k}"))
    };
    let mut shifts: Vec<(Role, f64)> = alloc::vec![
        (Role::A, (m + q) as f64),
        (Role::B, (m + n) as f64),
        (Role::Bp, (n + q) as f64),
    ];
    match p.family {
        Family::HA => {
            let cp = p.cp.as_ref().expect("validated");
            pre = &(&pre * &inv_poch(&p.c, m, "C")?) * &inv_poch(cp, n + q, "C'")?;
            shifts.push((Role::C, m as f64));
            shifts.push((Role::Cp, (n + q) as f64));
        }
        Family::HB => {
            let cp = p.cp.as_ref().expect("validated");
            let cpp = p.cpp.as_ref().expect("validated");
            pre = &(&(&pre * &inv_poch(&p.c, m, "C")?) * &inv_poch(cp, n, "C'")?) * &inv_poch(cpp, q, "C''")?;
            shifts.push((Role::C, m as f64));
            shifts.push((Role::Cp, n as f64));
            shifts.push((Role::Cpp, q as f64));
        }
        Family::HC => {
            pre = &pre * &inv_poch(&p.c, m + n + q, "C")?;
            shifts.push((Role::C, (m + n + q) as f64));
        }
    }
    Ok((pre, p.shifted_many(&shifts)?))
}

/// Closed-form partial derivative of the `variant` series of `p.family`.
pub fn partial_derivative(
    p: &ParamSet,
    variant: Variant,
    z: &TriplePoint,
    ctl: &SeriesControl,
    orders: DerivativeOrders,
) -> Result<EvalResult> {
    p.validate()?;
    if orders.total() == 0 {
        return evaluate(p, variant, z, ctl);
    }
    let (pre, shifted) = derivative_parameters(p, orders)?;
    let mut r = evaluate(&shifted, variant, z, ctl)?;
    r.error_estimate *= pre.frobenius_norm();
    r.value = &pre * &r.value;
    Ok(r)
}

/// One-line description of a parameter set, for diagnostics.
pub fn describe(p: &ParamSet) -> String {
    let mut s = format!("{} order {} x={}", p.family, p.order(), p.x);
    for (role, m) in p.matrices() {
        let d: Vec<String> = m.diagonal().iter().map(|v| format!("{:.4}", v.re)).collect();
        s.push_str(&format!(" {}=diag~[{}]", role.name(), d.join(",")));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gamma::{gamma_matrix, upper_incomplete_gamma};
    use crate::hyp::gauss_2f1;

    fn s(v: f64) -> SquareMatrix {
        SquareMatrix::from_real_diag(&[v])
    }

    fn d(v: &[f64]) -> SquareMatrix {
        SquareMatrix::from_real_diag(v)
    }

    fn ha_scalar(x: f64) -> ParamSet {
        ParamSet::ha(s(1.5), s(1.0), s(2.0), s(2.5), s(3.5), x).unwrap()
    }

    fn ha_diag(x: f64) -> ParamSet {
        ParamSet::ha(d(&[1.5, 2.5]), d(&[1.0, 2.0]), d(&[2.0, 1.0]), d(&[2.5, 3.5]), d(&[3.5, 2.5]), x).unwrap()
    }

    #[test]
    fn origin_values() {
        let ctl = SeriesControl::default();
        let p = ha_diag(0.7);
        let z = TriplePoint::zero();
        let up = eval_gamma_ha(&p, &z, &ctl).unwrap().value;
        let want = &upper_incomplete_gamma(&p.a, 0.7).unwrap() * &gamma_matrix(&p.a).unwrap().inverse().unwrap();
        assert!(up.relative_distance(&want) < 1e-13);
        assert!(eval_ha(&p, &z, &ctl).unwrap().value.relative_distance(&SquareMatrix::identity(2)) < 1e-15);
    }

    #[test]
    fn decomposition_diag() {
        let ctl = SeriesControl::default();
        let z = TriplePoint::real(0.1, -0.08, 0.12);
        for p in [
            ha_diag(1.0),
            ParamSet::hb(d(&[1.5, 2.5]), d(&[1.0, 2.0]), d(&[2.0, 1.0]), d(&[2.5, 3.5]), d(&[3.5, 2.5]), d(&[1.5, 2.0]), 0.5).unwrap(),
            ParamSet::hc(d(&[1.5, 2.5]), d(&[1.0, 2.0]), d(&[2.0, 1.0]), d(&[2.5, 3.5]), 2.0).unwrap(),
        ] {
            let lo = evaluate(&p, Variant::Lower, &z, &ctl).unwrap().value;
            let up = evaluate(&p, Variant::Upper, &z, &ctl).unwrap().value;
            let full = evaluate(&p, Variant::Complete, &z, &ctl).unwrap().value;
            assert!((&lo + &up).relative_distance(&full) < 1e-12, "{}", p.family);
        }
    }

    #[test]
    fn z1_collapse_is_gauss() {
        let ctl = SeriesControl::default();
        let p = ha_diag(0.0);
        let z = TriplePoint::real(0.2, 0.0, 0.0);
        let h = eval_ha(&p, &z, &ctl).unwrap().value;
        let g = gauss_2f1(&p.a, &p.b, &p.c, z.z1, &ctl).unwrap().value;
        assert!(h.relative_distance(&g) < 1e-14);
    }

    #[test]
    fn lower_vanishes_at_zero_truncation() {
        let ctl = SeriesControl::default();
        let p = ha_scalar(0.0);
        let r = eval_gamma_lower_ha(&p, &TriplePoint::real(0.1, 0.1, 0.1), &ctl).unwrap();
        assert_eq!(r.value, SquareMatrix::zeros(1));
    }

    #[test]
    fn family_mismatch_rejected() {
        let ctl = SeriesControl::default();
        assert!(eval_hb(&ha_scalar(0.5), &TriplePoint::zero(), &ctl).unwrap_err().is_validation());
        let mut bad = ha_scalar(0.5);
        bad.cpp = Some(s(1.0));
        assert!(bad.validate().unwrap_err().is_validation());
    }

    #[test]
    fn divergence_is_reported() {
        let ctl = SeriesControl::default();
        let r = eval_ha(&ha_scalar(0.5), &TriplePoint::real(3.0, 3.0, 3.0), &ctl);
        assert!(matches!(r, Err(Error::Convergence { .. })));
    }

    #[test]
    fn derivative_of_order_zero_is_value() {
        let ctl = SeriesControl::default();
        let p = ha_diag(1.0);
        let z = TriplePoint::real(0.1, 0.1, 0.1);
        let v = eval_gamma_ha(&p, &z, &ctl).unwrap().value;
        let dv = partial_derivative(&p, Variant::Upper, &z, &ctl, DerivativeOrders::new(0, 0, 0)).unwrap().value;
        assert_eq!(v, dv);
    }
}
