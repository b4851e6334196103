//! Fixed parameter sets and the full verification suite.

use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use super::{
    verify_corollary, verify_decomposition, verify_degeneration, verify_denominator_recursion, verify_derivative,
    verify_double_integral, verify_multinomial_recursion, verify_pde, verify_recurrence, verify_recursion_bp,
    verify_reduction, verify_reindexing, verify_triple_integral, Corollary, Degeneration, Direction, IdentityKind,
    IntegralOptions, PdeEquation, Recurrence, ResidualReport, Tolerances,
};
use crate::error::Result;
use crate::gamma::{pochhammer, Variant};
use crate::matrix::{checked_inverse, SquareMatrix};
use crate::series::SeriesControl;
use crate::triple::{DerivativeOrders, Family, ParamSet, Role, TriplePoint};

/// Real point inside the convergence region of all three families.
pub const DESK_POINT: [f64; 3] = [0.1, 0.05, 0.08];

fn desk(family: Family, x: f64, m: impl Fn(f64, f64) -> SquareMatrix) -> Result<ParamSet> {
    let (a, b, bp, c) = (m(1.5, 2.5), m(1.0, 2.0), m(2.0, 1.0), m(2.5, 3.5));
    match family {
        Family::HA => ParamSet::ha(a, b, bp, c, m(3.5, 2.5), x),
        Family::HB => ParamSet::hb(a, b, bp, c, m(3.5, 2.5), m(1.5, 2.0), x),
        Family::HC => ParamSet::hc(a, b, bp, c, x),
    }
}

/// Scalar (order 1) desk parameters.
pub fn desk_scalar(family: Family, x: f64) -> Result<ParamSet> {
    desk(family, x, |v, _| SquareMatrix::from_real_diag(&[v]))
}

/// Diagonal order-2 desk parameters; `B` and `B′` are integer, as the
/// quadrature checks need.
pub fn desk_diag(family: Family, x: f64) -> Result<ParamSet> {
    desk(family, x, |v, w| SquareMatrix::from_real_diag(&[v, w]))
}

/// Which reports [`run_suite`] produces, and against what tolerances.
#[derive(Clone, Debug, PartialEq)]
pub struct SuiteFilter {
    /// `None` runs every group.
    pub kinds: Option<Vec<IdentityKind>>,
    /// `None` runs every family; family-free checks always run.
    pub family: Option<Family>,
    pub tolerances: Tolerances,
    pub integrals: IntegralOptions,
}

impl Default for SuiteFilter {
    fn default() -> Self {
        SuiteFilter { kinds: None, family: None, tolerances: Tolerances::default(), integrals: IntegralOptions::default() }
    }
}

impl SuiteFilter {
    fn wants(&self, kind: IdentityKind) -> bool {
        self.kinds.as_ref().map_or(true, |k| k.contains(&kind))
    }

    fn families(&self) -> Vec<Family> {
        match self.family {
            Some(f) => alloc::vec![f],
            None => Family::ALL.to_vec(),
        }
    }
}

fn point() -> TriplePoint {
    TriplePoint::real(DESK_POINT[0], DESK_POINT[1], DESK_POINT[2])
}

/// Parameters whose denominator in `which` stays invertible after lowering
/// by up to `3I`.
fn denominator_params(family: Family) -> Result<ParamSet> {
    let p = desk_diag(family, 1.0)?;
    match family {
        Family::HB => p.with(Role::Cpp, SquareMatrix::from_real_diag(&[3.5, 2.5])),
        _ => Ok(p),
    }
}

fn denominator_slots(family: Family) -> &'static [Role] {
    match family {
        Family::HA => &[Role::C, Role::Cp],
        Family::HB => &[Role::C, Role::Cp, Role::Cpp],
        Family::HC => &[Role::C],
    }
}

fn reindexing_tables() -> Result<Vec<(Vec<SquareMatrix>, Complex64, Complex64)>> {
    const N: usize = 41;
    let ones = (0..N).map(|_| SquareMatrix::identity(1)).collect();
    let a = SquareMatrix::from_real_diag(&[1.5, 2.5]);
    let c = SquareMatrix::from_real_diag(&[2.5, 3.5]);
    let mut ratio = Vec::with_capacity(N);
    for k in 0..N {
        ratio.push(&pochhammer(&a, k) * &checked_inverse(&pochhammer(&c, k), "(C)_k")?);
    }
    // bounded, irregular coefficients
    let wobble = (0..N)
        .map(|k| {
            let k = k as f64;
            SquareMatrix::from_parts(
                2,
                &[1.3 * k.cos(), (0.7 * k).sin(), 0.2, (1.9 * k + 0.3).cos()],
                &[0.1 * (2.3 * k).sin(), 0.0, -0.4 * (0.5 * k).cos(), 0.25],
            )
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(alloc::vec![
        (ones, Complex64::new(0.3, 0.0), Complex64::new(0.2, 0.0)),
        (ratio, Complex64::new(0.2, 0.1), Complex64::new(-0.15, 0.0)),
        (wobble, Complex64::new(0.4, -0.3), Complex64::new(0.25, 0.5)),
    ])
}

/// Runs the fixed verification suite selected by `filter`.
///
/// Reports come back in a fixed order; any evaluation error aborts the run.
pub fn run_suite(filter: &SuiteFilter, ctl: &SeriesControl) -> Result<Vec<ResidualReport>> {
    let tol = &filter.tolerances;
    let opts = &filter.integrals;
    let z = point();
    let complex_z = TriplePoint::new(Complex64::new(0.1, 0.05), Complex64::new(-0.08, 0.0), Complex64::new(0.12, -0.03));
    let mut out = Vec::new();
    let families = filter.families();

    if filter.wants(IdentityKind::Decomposition) {
        for &f in &families {
            out.push(verify_decomposition(&desk_scalar(f, 0.5)?, &TriplePoint::real(0.1, 0.1, 0.1), ctl, tol.decomposition)?);
            out.push(verify_decomposition(&desk_diag(f, 1.0)?, &z, ctl, tol.decomposition)?);
            out.push(verify_decomposition(&desk_diag(f, 2.0)?, &complex_z, ctl, tol.decomposition)?);
        }
    }
    if filter.wants(IdentityKind::Pde) {
        for &f in &families {
            let p = desk_diag(f, 1.0)?;
            for eq in PdeEquation::ALL {
                out.push(verify_pde(&p, &z, eq, ctl, tol.pde)?);
            }
        }
    }
    if filter.wants(IdentityKind::Integral) {
        for &f in &families {
            let p = desk_diag(f, 1.0)?;
            out.push(verify_double_integral(&p, &z, ctl, opts, tol.double_integral)?);
            out.push(verify_triple_integral(&p, &z, ctl, opts, tol.triple_integral)?);
        }
    }
    if filter.wants(IdentityKind::Corollary) {
        for (f, form) in Corollary::all(2) {
            if families.contains(&f) {
                out.push(verify_corollary(&desk_diag(f, 1.0)?, &z, form, ctl, opts, tol.corollary)?);
            }
        }
    }
    if filter.wants(IdentityKind::Reduction) && families.contains(&Family::HA) {
        out.push(verify_reduction(&desk_scalar(Family::HA, 0.5)?, &z, ctl, tol.reduction)?);
        out.push(verify_reduction(&desk_diag(Family::HA, 2.0)?, &TriplePoint::real(0.12, -0.1, 0.15), ctl, tol.reduction)?);
    }
    if filter.wants(IdentityKind::Recursion) {
        for &f in &families {
            let p = desk_diag(f, 1.0)?;
            for dir in [Direction::Up, Direction::Down] {
                for s in 1..=3 {
                    out.push(verify_recursion_bp(&p, &z, s, dir, ctl, tol.recursion)?);
                }
                out.push(verify_multinomial_recursion(&p, &z, 3, dir, ctl, tol.recursion)?);
            }
            let q = denominator_params(f)?;
            for &slot in denominator_slots(f) {
                out.push(verify_denominator_recursion(&q, &z, slot, 3, ctl, tol.recursion)?);
            }
        }
    }
    if filter.wants(IdentityKind::Recurrence) {
        let cases = [(Family::HA, Recurrence::Kummer), (Family::HA, Recurrence::ZeroFOne), (Family::HB, Recurrence::ZeroFOne)];
        for (f, kind) in cases {
            if families.contains(&f) {
                out.push(verify_recurrence(&desk_diag(f, 1.0)?, &z, kind, ctl, tol.recurrence)?);
            }
        }
    }
    if filter.wants(IdentityKind::Derivative) {
        let orders = [
            DerivativeOrders::new(1, 0, 0),
            DerivativeOrders::new(0, 1, 1),
            DerivativeOrders::new(0, 0, 2),
            DerivativeOrders::new(1, 1, 1),
        ];
        for &f in &families {
            let p = desk_diag(f, 1.0)?;
            for o in orders {
                out.push(verify_derivative(&p, Variant::Upper, &z, o, ctl, tol.derivative)?);
            }
        }
    }
    if filter.wants(IdentityKind::Degeneration) {
        for &f in &families {
            let p = desk_diag(f, 1.0)?;
            for kind in Degeneration::ALL {
                for v in [Variant::Lower, Variant::Upper] {
                    out.push(verify_degeneration(&p, v, &z, kind, ctl, tol.degeneration)?);
                }
            }
        }
    }
    if filter.wants(IdentityKind::Reindexing) {
        for (f, z1, z2) in reindexing_tables()? {
            out.push(verify_reindexing(&f, z1, z2, tol.reindexing)?);
        }
    }
    Ok(out)
}
