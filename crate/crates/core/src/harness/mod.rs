//! Residual checks for the identities satisfied by the triple series.
//!
//! Each check computes both sides of an identity by separate code paths and
//! returns a [`ResidualReport`]. Evaluation failures are returned as errors
//! rather than folded into a failing report.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::matrix::SquareMatrix;
use crate::triple::Family;

mod derivatives;
mod desk;
mod integrals;
mod series_checks;

pub use derivatives::{finite_difference, verify_derivative};
pub use desk::{desk_diag, desk_scalar, run_suite, SuiteFilter, DESK_POINT};
pub use integrals::BesselKind;
pub use integrals::{
    verify_corollary, verify_double_integral, verify_triple_integral, Corollary, IntegralOptions,
};
pub use series_checks::{
    verify_decomposition, verify_degeneration, verify_denominator_recursion, verify_multinomial_recursion,
    verify_pde, verify_recurrence, verify_recursion_bp, verify_reduction, verify_reindexing, Degeneration,
    Direction, PdeEquation, Recurrence,
};

/// Outcome of one identity check.
#[derive(Clone, Debug, PartialEq)]
pub struct ResidualReport {
    pub identity: String,
    pub family: Option<Family>,
    /// Parameter and point summary.
    pub case: String,
    pub lhs_norm: f64,
    pub rhs_norm: f64,
    pub residual_norm: f64,
    /// `residual_norm / max(lhs_norm, rhs_norm, 1)`.
    pub relative_residual: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub diagnostics: String,
}

impl ResidualReport {
    pub fn compare(
        identity: impl Into<String>,
        family: Option<Family>,
        case: impl Into<String>,
        lhs: &SquareMatrix,
        rhs: &SquareMatrix,
        tolerance: f64,
    ) -> Self {
        let lhs_norm = lhs.frobenius_norm();
        let rhs_norm = rhs.frobenius_norm();
        let residual_norm = (lhs - rhs).frobenius_norm();
        Self::from_norms(identity, family, case, lhs_norm, rhs_norm, residual_norm, tolerance)
    }

    pub fn from_norms(
        identity: impl Into<String>,
        family: Option<Family>,
        case: impl Into<String>,
        lhs_norm: f64,
        rhs_norm: f64,
        residual_norm: f64,
        tolerance: f64,
    ) -> Self {
        let relative_residual = residual_norm / lhs_norm.max(rhs_norm).max(1.0);
        ResidualReport {
            identity: identity.into(),
            family,
            case: case.into(),
            lhs_norm,
            rhs_norm,
            residual_norm,
            relative_residual,
            tolerance,
            passed: relative_residual <= tolerance,
            diagnostics: String::new(),
        }
    }

    pub fn with_diagnostics(mut self, note: impl Into<String>) -> Self {
        let note = note.into();
        if self.diagnostics.is_empty() {
            self.diagnostics = note;
        } else {
            self.diagnostics = format!("{}; {note}", self.diagnostics);
        }
        self
    }

    /// Re-judges the report against another tolerance.
    pub fn retolerate(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self.passed = self.relative_residual <= tolerance;
        self
    }
}

impl fmt::Display for ResidualReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {}{} rel={:.3e} tol={:.1e} [{}]",
            if self.passed { "PASS" } else { "FAIL" },
            self.identity,
            self.family.map(|fam| format!(" {fam}")).unwrap_or_default(),
            self.relative_residual,
            self.tolerance,
            self.case
        )
    }
}

/// Per-identity tolerances, relative to `max(‖lhs‖, ‖rhs‖, 1)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances {
    pub decomposition: f64,
    pub pde: f64,
    pub double_integral: f64,
    pub triple_integral: f64,
    pub corollary: f64,
    pub reduction: f64,
    pub recursion: f64,
    pub recurrence: f64,
    pub derivative: f64,
    pub reindexing: f64,
    pub degeneration: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            decomposition: 1e-8,
            pde: 1e-8,
            double_integral: 1e-6,
            triple_integral: 1e-5,
            corollary: 1e-4,
            reduction: 1e-7,
            recursion: 1e-7,
            recurrence: 1e-8,
            derivative: 1e-5,
            reindexing: 1e-12,
            degeneration: 1e-10,
        }
    }
}

impl Tolerances {
    /// Every entry set to `tol`.
    pub fn uniform(tol: f64) -> Self {
        Tolerances {
            decomposition: tol,
            pde: tol,
            double_integral: tol,
            triple_integral: tol,
            corollary: tol,
            reduction: tol,
            recursion: tol,
            recurrence: tol,
            derivative: tol,
            reindexing: tol,
            degeneration: tol,
        }
    }
}

/// Identity groups, as selected by [`SuiteFilter`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum IdentityKind {
    Decomposition,
    Pde,
    Integral,
    Corollary,
    Reduction,
    Recursion,
    Recurrence,
    Derivative,
    Degeneration,
    Reindexing,
}

impl IdentityKind {
    pub const ALL: [IdentityKind; 10] = [
        IdentityKind::Decomposition,
        IdentityKind::Pde,
        IdentityKind::Integral,
        IdentityKind::Corollary,
        IdentityKind::Reduction,
        IdentityKind::Recursion,
        IdentityKind::Recurrence,
        IdentityKind::Derivative,
        IdentityKind::Degeneration,
        IdentityKind::Reindexing,
    ];

    pub fn name(self) -> &'static str {
        match self {
            IdentityKind::Decomposition => "decomposition",
            IdentityKind::Pde => "pde",
            IdentityKind::Integral => "integral",
            IdentityKind::Corollary => "corollary",
            IdentityKind::Reduction => "reduction",
            IdentityKind::Recursion => "recursion",
            IdentityKind::Recurrence => "recurrence",
            IdentityKind::Derivative => "derivative",
            IdentityKind::Degeneration => "degeneration",
            IdentityKind::Reindexing => "reindexing",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        IdentityKind::ALL.iter().copied().find(|k| k.name() == s)
    }
}

/// Aggregate counts over a batch of reports.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
}

impl Summary {
    pub fn of(reports: &[ResidualReport]) -> Self {
        let passed = reports.iter().filter(|r| r.passed).count();
        Summary { total: reports.len(), passed, failed: reports.len() - passed }
    }

    pub fn all_passed(&self) -> bool {
        self.failed == 0
    }
}

pub(crate) fn point_label(z: &crate::triple::TriplePoint) -> String {
    let parts: Vec<String> = z
        .as_array()
        .iter()
        .map(|v| if v.im == 0.0 { format!("{}", v.re) } else { format!("{}{:+}i", v.re, v.im) })
        .collect();
    format!("z=({})", parts.join(","))
}

pub(crate) fn case_label(p: &crate::triple::ParamSet, z: &crate::triple::TriplePoint) -> String {
    format!("order {} x={} {}", p.order(), p.x, point_label(z))
}
