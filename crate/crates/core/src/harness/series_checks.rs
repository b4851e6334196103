//! Identities checked purely between series evaluations.

use alloc::format;
use alloc::vec::Vec;

use num_complex::Complex64;
use num_traits::Zero;

use super::{case_label, ResidualReport};
use crate::error::{Error, Result};
use crate::expm::mat_pow_scalar;
use crate::gamma::{pochhammer, Variant};
use crate::hyp::{incomplete_appell_f1, incomplete_appell_f2, ScaledInverseRising};
use crate::hyp::{incomplete_gauss_lower, incomplete_gauss_upper};
use crate::matrix::{checked_inverse, SquareMatrix};
use crate::series::{power_over_factorial, SeriesControl};
use crate::triple::{evaluate, Family, Numerator, ParamSet, Role, TriplePoint, TripleSeries};

fn upper(p: &ParamSet, z: &TriplePoint, ctl: &SeriesControl) -> Result<SquareMatrix> {
    Ok(evaluate(p, Variant::Upper, z, ctl)?.value)
}

fn cp(p: &ParamSet) -> &SquareMatrix {
    p.cp.as_ref().expect("validated")
}

fn cpp(p: &ParamSet) -> &SquareMatrix {
    p.cpp.as_ref().expect("validated")
}

/// `(A;x) + [A;x]` against the complete series.
pub fn verify_decomposition(
    p: &ParamSet,
    z: &TriplePoint,
    ctl: &SeriesControl,
    tol: f64,
) -> Result<ResidualReport> {
    let lo = evaluate(p, Variant::Lower, z, ctl)?;
    let up = evaluate(p, Variant::Upper, z, ctl)?;
    let full = evaluate(p, Variant::Complete, z, ctl)?;
    let lhs = &lo.value + &up.value;
    let est = lo.error_estimate.max(up.error_estimate).max(full.error_estimate);
    Ok(ResidualReport::compare("decomposition", Some(p.family), case_label(p, z), &lhs, &full.value, tol)
        .with_diagnostics(format!("series error estimate {est:.2e}")))
}

/// One equation of the second-order system satisfied by the complete series.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PdeEquation {
    /// The equation in `z₁`.
    First,
    Second,
    Third,
}

impl PdeEquation {
    pub const ALL: [PdeEquation; 3] = [PdeEquation::First, PdeEquation::Second, PdeEquation::Third];

    pub fn name(self) -> &'static str {
        match self {
            PdeEquation::First => "pde.z1",
            PdeEquation::Second => "pde.z2",
            PdeEquation::Third => "pde.z3",
        }
    }
}

/// Applies one differential equation termwise to the complete series.
///
/// With `θᵢ = zᵢ∂ᵢ`, a term `t_{mnp}` is an eigenvector of each `θᵢ`, so the
/// operator reduces to index factors. The terms come from the split
/// numerator `(A;x) + [A;x]`, truncated at the layer count where the series
/// converged; the residual is then the first omitted layer.
pub fn verify_pde(
    p: &ParamSet,
    z: &TriplePoint,
    eq: PdeEquation,
    ctl: &SeriesControl,
    tol: f64,
) -> Result<ResidualReport> {
    let mut series = TripleSeries::new(p, Numerator::SplitSum)?;
    let layers = series.sum(z, ctl)?.layers;
    let order = p.order();
    let mut lhs = SquareMatrix::zeros(order);
    let mut rhs = SquareMatrix::zeros(order);
    let (zi, x_rhs, y_rhs) = match eq {
        PdeEquation::First => (z.z1, &p.a, &p.b),
        PdeEquation::Second => (z.z2, &p.b, &p.bp),
        PdeEquation::Third => (z.z3, &p.a, &p.bp),
    };
    series.visit(z, layers, |m, n, q, t| {
        let (k, gamma_shift, den) = match (p.family, eq) {
            (_, PdeEquation::First) if p.family != Family::HC => (m, m, &p.c),
            (Family::HA, PdeEquation::Second) => (n, n + q, cp(p)),
            (Family::HA, PdeEquation::Third) => (q, n + q, cp(p)),
            (Family::HB, PdeEquation::Second) => (n, n, cp(p)),
            (Family::HB, PdeEquation::Third) => (q, q, cpp(p)),
            (Family::HC, PdeEquation::First) => (m, m + n + q, &p.c),
            (Family::HC, PdeEquation::Second) => (n, m + n + q, &p.c),
            (Family::HC, PdeEquation::Third) => (q, m + n + q, &p.c),
            _ => unreachable!(),
        };
        if k > 0 {
            // θᵢ(θᵢ + D − I) on the term
            let f = den.shifted(gamma_shift as f64 - 1.0).scale_real(k as f64);
            lhs += &(&f * t);
        }
        // zᵢ(θ + X)(θ' + Y), with the index sums matching the numerator symbols
        let (sx, sy) = match eq {
            PdeEquation::First => (m + q, m + n),
            PdeEquation::Second => (m + n, n + q),
            PdeEquation::Third => (m + q, n + q),
        };
        let g = &x_rhs.shifted(sx as f64) * &y_rhs.shifted(sy as f64);
        rhs += &(&g * t).scale(zi);
    })?;
    Ok(ResidualReport::compare(eq.name(), Some(p.family), case_label(p, z), &lhs, &rhs, tol)
        .with_diagnostics(format!("{layers} layers")))
}

/// Direction of a parameter-shift recursion.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Up,
    Down,
}

impl Direction {
    pub fn name(self) -> &'static str {
        match self {
            Direction::Up => "up",
            Direction::Down => "down",
        }
    }
}

/// Denominator slots paired with `z₂` and `z₃` in the `B′` recursions.
fn bp_partners(family: Family) -> (Role, Role) {
    match family {
        Family::HA => (Role::Cp, Role::Cp),
        Family::HB => (Role::Cp, Role::Cpp),
        Family::HC => (Role::C, Role::C),
    }
}

fn role_matrix(p: &ParamSet, role: Role) -> Result<&SquareMatrix> {
    p.get(role).ok_or_else(|| Error::validation(format!("{} has no parameter {}", p.family, role.name())))
}

/// `B′ ± sI` expanded as a sum of `s` single-step corrections.
pub fn verify_recursion_bp(
    p: &ParamSet,
    z: &TriplePoint,
    s: usize,
    dir: Direction,
    ctl: &SeriesControl,
    tol: f64,
) -> Result<ResidualReport> {
    p.validate()?;
    let sign = match dir {
        Direction::Up => 1.0,
        Direction::Down => -1.0,
    };
    let lhs = upper(&p.shifted(Role::Bp, sign * s as f64)?, z, ctl)?;
    let (d2, d3) = bp_partners(p.family);
    let f2 = &p.b * &checked_inverse(role_matrix(p, d2)?, "B' recursion denominator")?;
    let f3 = &p.a * &checked_inverse(role_matrix(p, d3)?, "B' recursion denominator")?;
    let mut acc2 = SquareMatrix::zeros(p.order());
    let mut acc3 = SquareMatrix::zeros(p.order());
    let ks: Vec<f64> = match dir {
        Direction::Up => (1..=s).map(|k| k as f64).collect(),
        Direction::Down => (0..s).map(|k| -(k as f64)).collect(),
    };
    for k in ks {
        acc2 += &upper(&p.shifted_many(&[(Role::B, 1.0), (Role::Bp, k), (d2, 1.0)])?, z, ctl)?;
        acc3 += &upper(&p.shifted_many(&[(Role::A, 1.0), (Role::Bp, k), (d3, 1.0)])?, z, ctl)?;
    }
    let corr = &(&f2 * &acc2).scale(z.z2) + &(&f3 * &acc3).scale(z.z3);
    let rhs = &upper(p, z, ctl)? + &corr.scale_real(sign);
    Ok(ResidualReport::compare(
        format!("recursion.bp.{}", dir.name()),
        Some(p.family),
        format!("s={s} {}", case_label(p, z)),
        &lhs,
        &rhs,
        tol,
    ))
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// `B′ ± sI` in closed multinomial form.
pub fn verify_multinomial_recursion(
    p: &ParamSet,
    z: &TriplePoint,
    s: usize,
    dir: Direction,
    ctl: &SeriesControl,
    tol: f64,
) -> Result<ResidualReport> {
    p.validate()?;
    let sign = match dir {
        Direction::Up => 1.0,
        Direction::Down => -1.0,
    };
    let lhs = upper(&p.shifted(Role::Bp, sign * s as f64)?, z, ctl)?;
    let (d2, d3) = bp_partners(p.family);
    let mut inv2 = ScaledInverseRising::new(role_matrix(p, d2)?, "recursion denominator");
    let mut inv3 = ScaledInverseRising::new(role_matrix(p, d3)?, "recursion denominator");
    let (w2, w3) = (z.z2 * sign, z.z3 * sign);
    let mut rhs = SquareMatrix::zeros(p.order());
    for k1 in 0..=s {
        for k2 in 0..=(s - k1) {
            let j = k1 + k2;
            let multi = factorial(s) / (factorial(k1) * factorial(k2) * factorial(s - j));
            // ScaledInverseRising carries n!, removed here
            let den = match p.family {
                Family::HB => &inv2.get(k1)?.scale_real(1.0 / factorial(k1)) * &inv3.get(k2)?.scale_real(1.0 / factorial(k2)),
                _ => inv2.get(j)?.scale_real(1.0 / factorial(j)),
            };
            let coef = &(&pochhammer(&p.a, k2) * &pochhammer(&p.b, k1)) * &den;
            let mut shifts = alloc::vec![(Role::A, k2 as f64), (Role::B, k1 as f64)];
            if dir == Direction::Up {
                shifts.push((Role::Bp, j as f64));
            }
            match p.family {
                Family::HB => {
                    shifts.push((d2, k1 as f64));
                    shifts.push((d3, k2 as f64));
                }
                _ => shifts.push((d2, j as f64)),
            }
            let f = upper(&p.shifted_many(&shifts)?, z, ctl)?;
            let scalar = w2.powu(k1 as u32) * w3.powu(k2 as u32) * multi;
            rhs += &(&coef * &f).scale(scalar);
        }
    }
    Ok(ResidualReport::compare(
        format!("recursion.multinomial.{}", dir.name()),
        Some(p.family),
        format!("s={s} {}", case_label(p, z)),
        &lhs,
        &rhs,
        tol,
    ))
}

/// Terms `(argument index, leading factor, parameter shifts)` of the single
/// step `D → D − I` for denominator slot `which`.
fn denominator_terms(p: &ParamSet, which: Role) -> Result<Vec<(usize, SquareMatrix, [(Role, f64); 2])>> {
    let t1 = (0, &p.a * &p.b, [(Role::A, 1.0), (Role::B, 1.0)]);
    let t2 = (1, &p.b * &p.bp, [(Role::B, 1.0), (Role::Bp, 1.0)]);
    let t3 = (2, &p.a * &p.bp, [(Role::A, 1.0), (Role::Bp, 1.0)]);
    Ok(match (p.family, which) {
        (Family::HA | Family::HB, Role::C) => alloc::vec![t1],
        (Family::HA, Role::Cp) => alloc::vec![t2, t3],
        (Family::HB, Role::Cp) => alloc::vec![t2],
        (Family::HB, Role::Cpp) => alloc::vec![t3],
        (Family::HC, Role::C) => alloc::vec![t1, t2, t3],
        _ => {
            return Err(Error::validation(format!(
                "{} has no denominator recursion in {}",
                p.family,
                which.name()
            )))
        }
    })
}

/// Lowering a denominator parameter by `sI`.
pub fn verify_denominator_recursion(
    p: &ParamSet,
    z: &TriplePoint,
    which: Role,
    s: usize,
    ctl: &SeriesControl,
    tol: f64,
) -> Result<ResidualReport> {
    p.validate()?;
    let terms = denominator_terms(p, which)?;
    let w = role_matrix(p, which)?.clone();
    let lhs = upper(&p.shifted(which, -(s as f64))?, z, ctl)?;
    let zs = z.as_array();
    let mut rhs = upper(p, z, ctl)?;
    for k in 1..=s {
        let inv = &checked_inverse(&w.shifted(-(k as f64)), "shifted denominator")?
            * &checked_inverse(&w.shifted(-(k as f64) + 1.0), "shifted denominator")?;
        for (idx, lead, shifts) in &terms {
            let mut all = shifts.to_vec();
            all.push((which, 2.0 - k as f64));
            let f = upper(&p.shifted_many(&all)?, z, ctl)?;
            rhs += &(&(lead * &f) * &inv).scale(zs[*idx]);
        }
    }
    Ok(ResidualReport::compare(
        format!("recursion.denominator.{}", which.name()),
        Some(p.family),
        format!("s={s} {}", case_label(p, z)),
        &lhs,
        &rhs,
        tol,
    ))
}

/// Three-term relations between neighbouring parameter values.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Recurrence {
    /// `(C′ − B′ − I)F = (C′ − I)F[C′ − I] − B′F[B′ + I]`, `H_A` only.
    Kummer,
    /// `F = F[C − I] − z₁ AB C⁻¹(C − I)⁻¹ F[A + I, B + I, C + I]`, `H_A` and `H_B`.
    ZeroFOne,
}

impl Recurrence {
    pub fn name(self) -> &'static str {
        match self {
            Recurrence::Kummer => "recurrence.1f1",
            Recurrence::ZeroFOne => "recurrence.0f1",
        }
    }
}

pub fn verify_recurrence(
    p: &ParamSet,
    z: &TriplePoint,
    kind: Recurrence,
    ctl: &SeriesControl,
    tol: f64,
) -> Result<ResidualReport> {
    p.validate()?;
    let f = upper(p, z, ctl)?;
    let (lhs, rhs) = match (kind, p.family) {
        (Recurrence::Kummer, Family::HA) => {
            let c1 = cp(p);
            let lhs = &(c1 - &p.bp).shifted(-1.0) * &f;
            let down = upper(&p.shifted(Role::Cp, -1.0)?, z, ctl)?;
            let up = upper(&p.shifted(Role::Bp, 1.0)?, z, ctl)?;
            (lhs, &(&c1.shifted(-1.0) * &down) - &(&p.bp * &up))
        }
        (Recurrence::ZeroFOne, Family::HA | Family::HB) => {
            let down = upper(&p.shifted(Role::C, -1.0)?, z, ctl)?;
            let shifted = upper(&p.shifted_many(&[(Role::A, 1.0), (Role::B, 1.0), (Role::C, 1.0)])?, z, ctl)?;
            let inv = &checked_inverse(&p.c, "C")? * &checked_inverse(&p.c.shifted(-1.0), "C - I")?;
            let corr = &(&(&p.a * &p.b) * &inv) * &shifted;
            (f, &down - &corr.scale(z.z1))
        }
        _ => {
            return Err(Error::validation(format!(
                "{} is not available for {}",
                kind.name(),
                p.family
            )))
        }
    };
    Ok(ResidualReport::compare(kind.name(), Some(p.family), case_label(p, z), &lhs, &rhs, tol))
}

/// `H_A` with `C′ = B′` against a scaled incomplete Gauss function.
///
/// Needs real `z₂, z₃ < 1`; `p.cp` is ignored.
pub fn verify_reduction(
    p: &ParamSet,
    z: &TriplePoint,
    ctl: &SeriesControl,
    tol: f64,
) -> Result<ResidualReport> {
    if p.family != Family::HA {
        return Err(Error::validation("the reduction applies to HA only"));
    }
    if z.z2.im != 0.0 || z.z3.im != 0.0 || !(z.z2.re < 1.0) || !(z.z3.re < 1.0) {
        return Err(Error::validation("the reduction needs real z2, z3 < 1"));
    }
    let q = p.with(Role::Cp, p.bp.clone())?;
    let lhs = upper(&q, z, ctl)?;
    let (u2, u3) = (1.0 - z.z2.re, 1.0 - z.z3.re);
    let w = z.z1 / (u2 * u3);
    let g = incomplete_gauss_upper(&p.a, p.x * u3, &p.b, &p.c, w, ctl)?.value;
    let pre = &mat_pow_scalar(&p.a.scale_real(-1.0), u3)? * &mat_pow_scalar(&p.b.scale_real(-1.0), u2)?;
    let rhs = &pre * &g;
    Ok(ResidualReport::compare("reduction", Some(p.family), case_label(&q, z), &lhs, &rhs, tol))
}

/// Special points where the triple series collapses to a known function.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Degeneration {
    /// `x = 0`: the upper series is the complete one, the lower vanishes.
    ZeroTruncation,
    /// `z₂ = 0`: an incomplete Appell function.
    SecondArgumentZero,
    /// `z₂ = z₃ = 0`: incomplete Gauss in `z₁`.
    OnlyFirst,
    /// `z₁ = z₂ = 0`: incomplete Gauss in `z₃`.
    OnlyThird,
}

impl Degeneration {
    pub const ALL: [Degeneration; 4] = [
        Degeneration::ZeroTruncation,
        Degeneration::SecondArgumentZero,
        Degeneration::OnlyFirst,
        Degeneration::OnlyThird,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Degeneration::ZeroTruncation => "degeneration.x0",
            Degeneration::SecondArgumentZero => "degeneration.z2-zero",
            Degeneration::OnlyFirst => "degeneration.z1-only",
            Degeneration::OnlyThird => "degeneration.z3-only",
        }
    }
}

/// Compares the `variant` series (lower or upper) at a degenerate point
/// with its closed reduction. The relevant arguments of `z` are zeroed.
pub fn verify_degeneration(
    p: &ParamSet,
    variant: Variant,
    z: &TriplePoint,
    kind: Degeneration,
    ctl: &SeriesControl,
    tol: f64,
) -> Result<ResidualReport> {
    if variant == Variant::Complete {
        return Err(Error::validation("degenerations compare an incomplete variant"));
    }
    p.validate()?;
    let zero = Complex64::zero();
    let order = p.order();
    let gauss = |b: &SquareMatrix, c: &SquareMatrix, w: Complex64| {
        match variant {
            Variant::Lower => incomplete_gauss_lower(&p.a, p.x, b, c, w, ctl),
            _ => incomplete_gauss_upper(&p.a, p.x, b, c, w, ctl),
        }
        .map(|r| r.value)
    };
    let (zz, lhs, rhs) = match kind {
        Degeneration::ZeroTruncation => {
            let q = p.with_x(0.0);
            let lhs = evaluate(&q, variant, z, ctl)?.value;
            let rhs = match variant {
                Variant::Lower => SquareMatrix::zeros(order),
                _ => evaluate(p, Variant::Complete, z, ctl)?.value,
            };
            let label = case_label(&q, z);
            return Ok(ResidualReport::compare(
                format!("{}.{}", kind.name(), variant.name()),
                Some(p.family),
                label,
                &lhs,
                &rhs,
                tol,
            ));
        }
        Degeneration::SecondArgumentZero => {
            let zz = TriplePoint::new(z.z1, zero, z.z3);
            let lhs = evaluate(p, variant, &zz, ctl)?.value;
            let rhs = match p.family {
                Family::HA => incomplete_appell_f2(variant, &p.a, p.x, &p.b, &p.bp, &p.c, cp(p), z.z1, z.z3, ctl)?,
                Family::HB => incomplete_appell_f2(variant, &p.a, p.x, &p.b, &p.bp, &p.c, cpp(p), z.z1, z.z3, ctl)?,
                Family::HC => incomplete_appell_f1(variant, &p.a, p.x, &p.b, &p.bp, &p.c, z.z1, z.z3, ctl)?,
            };
            (zz, lhs, rhs.value)
        }
        Degeneration::OnlyFirst => {
            let zz = TriplePoint::new(z.z1, zero, zero);
            (zz, evaluate(p, variant, &zz, ctl)?.value, gauss(&p.b, &p.c, z.z1)?)
        }
        Degeneration::OnlyThird => {
            let zz = TriplePoint::new(zero, zero, z.z3);
            let den = match p.family {
                Family::HA => cp(p),
                Family::HB => cpp(p),
                Family::HC => &p.c,
            };
            (zz, evaluate(p, variant, &zz, ctl)?.value, gauss(&p.bp, den, z.z3)?)
        }
    };
    Ok(ResidualReport::compare(
        format!("{}.{}", kind.name(), variant.name()),
        Some(p.family),
        case_label(p, &zz),
        &lhs,
        &rhs,
        tol,
    ))
}

/// `Σ_N f(N)(z₁+z₂)^N/N!` against `Σ_{m,n} f(m+n) z₁ᵐz₂ⁿ/(m!n!)`, both
/// truncated at total degree `f.len() − 1`.
pub fn verify_reindexing(f: &[SquareMatrix], z1: Complex64, z2: Complex64, tol: f64) -> Result<ResidualReport> {
    let Some(first) = f.first() else {
        return Err(Error::validation("reindexing needs a non-empty coefficient table"));
    };
    let order = first.order();
    if f.iter().any(|m| m.order() != order) {
        return Err(Error::validation("reindexing coefficients must share one order"));
    }
    let len = f.len();
    let pw = power_over_factorial(z1 + z2, len);
    let mut lhs = SquareMatrix::zeros(order);
    for (k, fk) in f.iter().enumerate() {
        lhs += &fk.scale(pw[k]);
    }
    let p1 = power_over_factorial(z1, len);
    let p2 = power_over_factorial(z2, len);
    let mut rhs = SquareMatrix::zeros(order);
    for m in 0..len {
        for n in 0..(len - m) {
            rhs += &f[m + n].scale(p1[m] * p2[n]);
        }
    }
    Ok(ResidualReport::compare(
        "reindexing",
        None,
        format!("order {order} N={} z1={z1} z2={z2}", len - 1),
        &lhs,
        &rhs,
        tol,
    ))
}
