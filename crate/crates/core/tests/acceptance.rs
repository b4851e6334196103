//! Acceptance run: every criterion at its stated tolerance, one line each.
//!
//! `cargo test -p triplehyp --test acceptance -- --nocapture` shows the lines.

use std::time::{Duration, Instant};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use statrs::function::gamma::{gamma_li, gamma_ui};

use triplehyp::gamma::{gamma_matrix, lower_incomplete_gamma, upper_incomplete_gamma, IncompletePochhammer};
mod common;

use common::{brute_triple, real, rel, Scalars};
use triplehyp::harness::{
    desk_diag, desk_scalar, verify_corollary, verify_decomposition, verify_degeneration, verify_denominator_recursion,
    verify_derivative, verify_double_integral, verify_multinomial_recursion, verify_pde, verify_recurrence,
    verify_recursion_bp, verify_reduction, verify_triple_integral, Corollary, Degeneration, Direction,
    IntegralOptions, PdeEquation, Recurrence, ResidualReport, Tolerances,
};
use triplehyp::triple::{self, DerivativeOrders};
use triplehyp::{Complex64, EvalResult, Family, ParamSet, Result, Role, SeriesControl, SquareMatrix, TriplePoint, Variant};

struct Outcome {
    checks: usize,
    worst: f64,
    tol: f64,
    failures: Vec<String>,
    elapsed: Duration,
    budget: Option<Duration>,
}

impl Outcome {
    fn new(tol: f64) -> Self {
        Outcome { checks: 0, worst: 0.0, tol, failures: Vec::new(), elapsed: Duration::ZERO, budget: None }
    }

    fn record(&mut self, rel: f64, what: impl FnOnce() -> String) {
        self.checks += 1;
        if rel.is_nan() || rel > self.worst {
            self.worst = rel;
        }
        if !(rel <= self.tol) {
            self.failures.push(format!("{} rel={rel:.3e}", what()));
        }
    }

    fn report(&mut self, r: ResidualReport) {
        let t = r.tolerance.min(self.tol);
        let r = r.retolerate(t);
        self.checks += 1;
        if r.relative_residual > self.worst || r.relative_residual.is_nan() {
            self.worst = r.relative_residual;
        }
        if !r.passed {
            self.failures.push(r.to_string());
        }
    }

    fn fail(&mut self, msg: String) {
        self.checks += 1;
        self.failures.push(msg);
    }

    fn passed(&self) -> bool {
        self.failures.is_empty() && self.budget.map_or(true, |b| self.elapsed <= b)
    }
}


// ---------------------------------------------------------------------------
// 1. gamma-level decompositions on random matrices

/// `S·D·S⁻¹` with positive-stable `D`. Returns the real spectrum when `D`
/// is diagonal so that a per-eigenvalue oracle applies.
fn random_matrix(rng: &mut StdRng) -> (SquareMatrix, SquareMatrix, Option<Vec<f64>>) {
    let n = rng.random_range(1..=4usize);
    let mut s = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            s[i * n + j] = if i == j { 1.0 } else { 0.0 } + rng.random_range(-0.4..0.4);
        }
    }
    let s = SquareMatrix::from_real(n, &s).unwrap();
    let s_inv = s.inverse().unwrap();
    let mut d = vec![0.0; n * n];
    let with_pair = n >= 2 && rng.random_bool(0.4);
    let mut eig = Vec::new();
    let mut i = 0;
    while i < n {
        if with_pair && i == 0 {
            let (re, im) = (rng.random_range(0.4..3.0), rng.random_range(0.1..1.5));
            d[0] = re;
            d[1] = im;
            d[n] = -im;
            d[n + 1] = re;
            i = 2;
            continue;
        }
        let l = rng.random_range(0.3..4.0);
        d[i * n + i] = l;
        eig.push(l);
        i += 1;
    }
    let d = SquareMatrix::from_real(n, &d).unwrap();
    let a = &(&s * &d) * &s_inv;
    (a, s, (!with_pair).then_some(eig))
}

fn similar_diag(s: &SquareMatrix, vals: &[f64]) -> SquareMatrix {
    let d = SquareMatrix::from_real_diag(vals);
    &(s * &d) * &s.inverse().unwrap()
}

fn criterion_1() -> Outcome {
    let mut out = Outcome::new(1e-9);
    out.budget = Some(Duration::from_secs(10));
    let mut rng = StdRng::seed_from_u64(0x5eed_0001);
    for id in 0..50 {
        let (a, s, eig) = random_matrix(&mut rng);
        let g = match gamma_matrix(&a) {
            Ok(g) => g,
            Err(e) => {
                out.fail(format!("matrix {id}: {e}"));
                continue;
            }
        };
        for x in [0.1, 1.0, 5.0] {
            let mut step = || -> Result<()> {
                let lo = lower_incomplete_gamma(&a, x)?;
                let up = upper_incomplete_gamma(&a, x)?;
                out.record(rel(&(&lo + &up), &g), || format!("gamma split, matrix {id}, x={x}"));
                if let Some(eig) = &eig {
                    let lo_ref = similar_diag(&s, &eig.iter().map(|&l| gamma_li(l, x)).collect::<Vec<_>>());
                    let up_ref = similar_diag(&s, &eig.iter().map(|&l| gamma_ui(l, x)).collect::<Vec<_>>());
                    out.record(rel(&lo, &lo_ref), || format!("lower gamma vs oracle, matrix {id}, x={x}"));
                    out.record(rel(&up, &up_ref), || format!("upper gamma vs oracle, matrix {id}, x={x}"));
                }
                let mut t = IncompletePochhammer::new(&a, x)?;
                for k in 0..=20 {
                    let sum = &t.lower(k)? + &t.upper(k)?;
                    out.record(rel(&sum, &t.complete(k)), || format!("Pochhammer split, matrix {id}, x={x}, n={k}"));
                }
                Ok(())
            };
            if let Err(e) = step() {
                out.fail(format!("matrix {id}, x={x}: {e}"));
            }
        }
    }
    out
}

// ---------------------------------------------------------------------------
// 2. scalar evaluators against a brute-force triple sum

type Evaluator = fn(&ParamSet, &TriplePoint, &SeriesControl) -> Result<EvalResult>;

fn evaluators() -> [(Family, Variant, &'static str, Evaluator); 9] {
    [
        (Family::HA, Variant::Lower, "gamma_lower_ha", triple::eval_gamma_lower_ha),
        (Family::HA, Variant::Upper, "gamma_ha", triple::eval_gamma_ha),
        (Family::HA, Variant::Complete, "ha", triple::eval_ha),
        (Family::HB, Variant::Lower, "gamma_lower_hb", triple::eval_gamma_lower_hb),
        (Family::HB, Variant::Upper, "gamma_hb", triple::eval_gamma_hb),
        (Family::HB, Variant::Complete, "hb", triple::eval_hb),
        (Family::HC, Variant::Lower, "gamma_lower_hc", triple::eval_gamma_lower_hc),
        (Family::HC, Variant::Upper, "gamma_hc", triple::eval_gamma_hc),
        (Family::HC, Variant::Complete, "hc", triple::eval_hc),
    ]
}

fn criterion_2() -> Outcome {
    let mut out = Outcome::new(1e-10);
    out.budget = Some(Duration::from_secs(30));
    let s = Scalars { a: 1.5, b: 1.0, bp: 2.0, c: 2.5, cp: 3.5, cpp: 1.5 };
    let axis = [Complex64::new(-0.15, 0.0), Complex64::new(0.1, 0.1), Complex64::new(0.15, 0.0)];
    let ctl = SeriesControl::default();
    for (family, variant, name, eval) in evaluators() {
        for x in [0.0, 0.5, 2.0] {
            let p = desk_scalar(family, x).unwrap();
            for &z1 in &axis {
                for &z2 in &axis {
                    for &z3 in &axis {
                        let z = TriplePoint::new(z1, z2, z3);
                        let oracle = brute_triple(family, &s, x, variant, [z1, z2, z3]);
                        match eval(&p, &z, &ctl) {
                            Ok(r) => {
                                let v = r.value.entries()[0];
                                let e = (v - oracle).norm() / oracle.norm().max(1.0);
                                out.record(e, || format!("{name} x={x} z=({z1},{z2},{z3})"));
                            }
                            Err(e) => out.fail(format!("{name} x={x}: {e}")),
                        }
                    }
                }
            }
        }
    }
    out
}

// ---------------------------------------------------------------------------
// shared desk grid

const XS: [f64; 3] = [0.5, 1.0, 2.0];

fn params(family: Family, x: f64) -> [ParamSet; 2] {
    [desk_scalar(family, x).unwrap(), desk_diag(family, x).unwrap()]
}

fn run(out: &mut Outcome, r: Result<ResidualReport>, what: impl FnOnce() -> String) {
    match r {
        Ok(r) => out.report(r),
        Err(e) => out.fail(format!("{}: {e}", what())),
    }
}

fn criterion_3(tol: &Tolerances) -> Outcome {
    let mut out = Outcome::new(tol.decomposition);
    let t = out.tol;
    let ctl = SeriesControl::default();
    let points = [
        TriplePoint::real(0.1, 0.1, 0.1),
        TriplePoint::real(-0.15, 0.15, 0.1),
        TriplePoint::real(0.15, 0.15, 0.15),
        TriplePoint::new(Complex64::new(0.1, 0.1), real(-0.05), Complex64::new(0.0, 0.15)),
    ];
    for f in Family::ALL {
        for x in XS {
            for p in params(f, x) {
                for z in &points {
                    run(&mut out, verify_decomposition(&p, z, &ctl, t), || format!("decomposition {f}"));
                }
            }
        }
    }
    out
}

fn criterion_4(tol: &Tolerances) -> Outcome {
    let mut out = Outcome::new(tol.pde);
    let t = out.tol;
    let ctl = SeriesControl::default();
    let points = [
        TriplePoint::real(0.05, 0.05, 0.05),
        TriplePoint::real(0.05, -0.05, 0.02),
        TriplePoint::new(Complex64::new(0.03, 0.02), real(0.04), Complex64::new(0.0, -0.03)),
    ];
    for f in Family::ALL {
        for x in XS {
            for p in params(f, x) {
                for z in &points {
                    for eq in PdeEquation::ALL {
                        run(&mut out, verify_pde(&p, z, eq, &ctl, t), || format!("{} {f}", eq.name()));
                    }
                }
            }
        }
    }
    out
}

fn criterion_5(tol: &Tolerances) -> Outcome {
    let mut out = Outcome::new(tol.double_integral);
    out.budget = Some(Duration::from_secs(120));
    let ctl = SeriesControl::default();
    let opts = IntegralOptions::default();
    let z = TriplePoint::real(0.1, 0.05, 0.08);
    let small = TriplePoint::real(0.05, 0.05, 0.05);
    // three tolerances apply; the worst is tracked as residual over tolerance
    out.tol = f64::INFINITY;
    let push = |out: &mut Outcome, r: Result<ResidualReport>, t: f64, what: String| match r {
        Ok(r) => {
            let r = r.retolerate(t);
            out.checks += 1;
            out.worst = out.worst.max(r.relative_residual / t);
            if !r.passed {
                out.failures.push(r.to_string());
            }
        }
        Err(e) => out.fail(format!("{what}: {e}")),
    };
    for f in Family::ALL {
        for p in params(f, 1.0) {
            push(&mut out, verify_double_integral(&p, &small, &ctl, &opts, tol.double_integral), tol.double_integral, format!("double {f}"));
            push(&mut out, verify_double_integral(&p, &z, &ctl, &opts, tol.double_integral), tol.double_integral, format!("double {f}"));
            push(&mut out, verify_triple_integral(&p, &z, &ctl, &opts, tol.triple_integral), tol.triple_integral, format!("triple {f}"));
        }
    }
    for (f, form) in Corollary::all(2).into_iter().chain([(Family::HA, Corollary::Laguerre { m: 0 })]) {
        for p in params(f, 1.0) {
            push(&mut out, verify_corollary(&p, &z, form, &ctl, &opts, tol.corollary), tol.corollary, form.name());
        }
    }
    out
}

fn criterion_6(tol: &Tolerances) -> Outcome {
    let mut out = Outcome::new(tol.reduction);
    let t = out.tol;
    let ctl = SeriesControl::default();
    let points = [
        TriplePoint::real(0.1, 0.2, -0.2),
        TriplePoint::real(0.05, -0.2, 0.2),
        TriplePoint::real(0.12, -0.1, 0.15),
        TriplePoint::new(Complex64::new(0.1, 0.05), real(0.2), real(0.1)),
    ];
    for x in XS {
        for p in params(Family::HA, x) {
            for z in &points {
                run(&mut out, verify_reduction(&p, z, &ctl, t), || "reduction".into());
            }
        }
    }
    out
}

/// Desk parameters whose denominators stay invertible when lowered by `3I`.
fn lowered_params(family: Family, x: f64) -> [ParamSet; 2] {
    let [s, d] = params(family, x);
    let d = match family {
        Family::HB => d.with(Role::Cpp, SquareMatrix::from_real_diag(&[3.5, 2.5])).unwrap(),
        _ => d,
    };
    [s, d]
}

fn slots(family: Family) -> &'static [Role] {
    match family {
        Family::HA => &[Role::C, Role::Cp],
        Family::HB => &[Role::C, Role::Cp, Role::Cpp],
        Family::HC => &[Role::C],
    }
}

fn criterion_7(tol: &Tolerances) -> Outcome {
    let mut out = Outcome::new(tol.recursion);
    let t = out.tol;
    let ctl = SeriesControl::default();
    let points = [
        TriplePoint::real(0.1, 0.05, 0.08),
        TriplePoint::new(Complex64::new(0.08, 0.04), real(-0.1), Complex64::new(0.1, -0.05)),
    ];
    for f in Family::ALL {
        for x in [0.5, 2.0] {
            for (p, q) in params(f, x).into_iter().zip(lowered_params(f, x)) {
                for z in &points {
                    for s in 1..=3 {
                        for dir in [Direction::Up, Direction::Down] {
                            run(&mut out, verify_recursion_bp(&p, z, s, dir, &ctl, t), || format!("bp {f} s={s}"));
                            run(&mut out, verify_multinomial_recursion(&p, z, s, dir, &ctl, t), || {
                                format!("multinomial {f} s={s}")
                            });
                        }
                        for &slot in slots(f) {
                            run(&mut out, verify_denominator_recursion(&q, z, slot, s, &ctl, t), || {
                                format!("denominator {f} {} s={s}", slot.name())
                            });
                        }
                    }
                }
            }
        }
    }
    out
}

fn criterion_8(tol: &Tolerances) -> Outcome {
    let mut out = Outcome::new(tol.recurrence);
    let t = out.tol;
    let ctl = SeriesControl::default();
    let points = [TriplePoint::real(0.1, 0.05, 0.08), TriplePoint::real(-0.12, 0.1, 0.15)];
    let cases = [(Family::HA, Recurrence::Kummer), (Family::HA, Recurrence::ZeroFOne), (Family::HB, Recurrence::ZeroFOne)];
    for (f, kind) in cases {
        for x in XS {
            for p in params(f, x) {
                for z in &points {
                    run(&mut out, verify_recurrence(&p, z, kind, &ctl, t), || format!("{} {f}", kind.name()));
                }
            }
        }
    }
    out
}

fn criterion_9(tol: &Tolerances) -> Outcome {
    let mut out = Outcome::new(tol.derivative);
    let t = out.tol;
    let ctl = SeriesControl::default();
    let z = TriplePoint::real(0.1, 0.05, 0.08);
    let mut orders = Vec::new();
    for m in 0..=3 {
        for n in 0..=3 - m {
            for p in 0..=3 - m - n {
                if m + n + p > 0 {
                    orders.push(DerivativeOrders::new(m, n, p));
                }
            }
        }
    }
    for f in Family::ALL {
        for p in params(f, 1.0) {
            for &o in &orders {
                for v in [Variant::Lower, Variant::Upper] {
                    run(&mut out, verify_derivative(&p, v, &z, o, &ctl, t), || format!("derivative {f} {o}"));
                }
            }
        }
    }
    out
}

fn criterion_10(tol: &Tolerances) -> Outcome {
    let mut out = Outcome::new(tol.degeneration);
    let t = out.tol;
    let ctl = SeriesControl::default();
    let points = [
        TriplePoint::real(0.1, 0.05, 0.08),
        TriplePoint::new(Complex64::new(0.12, -0.05), real(0.1), Complex64::new(-0.1, 0.08)),
    ];
    for f in Family::ALL {
        for x in [0.5, 2.0] {
            for p in params(f, x) {
                for z in &points {
                    for kind in Degeneration::ALL {
                        for v in [Variant::Lower, Variant::Upper] {
                            run(&mut out, verify_degeneration(&p, v, z, kind, &ctl, t), || {
                                format!("{} {f}", kind.name())
                            });
                        }
                    }
                }
            }
        }
    }
    out
}

// ---------------------------------------------------------------------------
// 11. determinism

fn fingerprint() -> Vec<String> {
    let ctl = SeriesControl::default();
    let tol = Tolerances::default();
    let opts = IntegralOptions::default();
    let z = TriplePoint::new(Complex64::new(0.1, 0.03), real(0.05), real(-0.08));
    let zr = TriplePoint::real(0.1, 0.05, 0.08);
    let mut lines = Vec::new();
    for f in Family::ALL {
        let p = desk_diag(f, 1.0).unwrap();
        for v in [Variant::Lower, Variant::Upper, Variant::Complete] {
            let r = triple::evaluate(&p, v, &z, &ctl).unwrap();
            let bits: Vec<(u64, u64)> = r.value.entries().iter().map(|c| (c.re.to_bits(), c.im.to_bits())).collect();
            lines.push(format!("{f} {v:?} {bits:?} {} {} {}", r.error_estimate.to_bits(), r.terms_used, r.layers));
        }
        let reports = [
            verify_decomposition(&p, &z, &ctl, tol.decomposition),
            verify_pde(&p, &z, PdeEquation::Second, &ctl, tol.pde),
            verify_recursion_bp(&p, &z, 2, Direction::Up, &ctl, tol.recursion),
            verify_derivative(&p, Variant::Upper, &z, DerivativeOrders::new(1, 0, 1), &ctl, tol.derivative),
            verify_double_integral(&p, &zr, &ctl, &opts, tol.double_integral),
        ];
        for r in reports {
            let r = r.unwrap();
            lines.push(format!(
                "{r} {} {} {} {} {}",
                r.lhs_norm.to_bits(),
                r.rhs_norm.to_bits(),
                r.residual_norm.to_bits(),
                r.relative_residual.to_bits(),
                r.diagnostics
            ));
        }
    }
    lines
}

fn criterion_11() -> Outcome {
    let mut out = Outcome::new(0.0);
    let first = fingerprint();
    let second = fingerprint();
    for (i, (a, b)) in first.iter().zip(&second).enumerate() {
        out.record(if a == b { 0.0 } else { 1.0 }, || format!("record {i} differs"));
    }
    if first.len() != second.len() {
        out.fail("record counts differ".into());
    }
    out
}

#[test]
fn acceptance() {
    let tol = Tolerances::default();
    let criteria: Vec<(&str, Box<dyn Fn() -> Outcome>)> = vec![
        ("gamma and Pochhammer decompositions", Box::new(criterion_1)),
        ("scalar brute-force equivalence", Box::new(criterion_2)),
        ("triple decompositions", Box::new(move || criterion_3(&tol))),
        ("PDE systems", Box::new(move || criterion_4(&tol))),
        ("integral representations", Box::new(move || criterion_5(&tol))),
        ("reduction formula", Box::new(move || criterion_6(&tol))),
        ("recursions", Box::new(move || criterion_7(&tol))),
        ("recurrences", Box::new(move || criterion_8(&tol))),
        ("derivative formulas", Box::new(move || criterion_9(&tol))),
        ("degenerations", Box::new(move || criterion_10(&tol))),
        ("determinism", Box::new(criterion_11)),
    ];
    let mut failed = Vec::new();
    for (i, (name, f)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let mut o = f();
        o.elapsed = start.elapsed();
        let status = if o.passed() { "PASS" } else { "FAIL" };
        let worst = if i == 4 { format!("worst rel/tol={:.3e}", o.worst) } else { format!("worst={:.3e} tol={:.0e}", o.worst, o.tol) };
        let budget = o.budget.map(|b| format!(" budget={}s", b.as_secs())).unwrap_or_default();
        println!(
            "{status} criterion {}: {name}: {} checks, {worst}, {:.2}s{budget}",
            i + 1,
            o.checks,
            o.elapsed.as_secs_f64()
        );
        for msg in o.failures.iter().take(10) {
            println!("    {msg}");
        }
        if !o.passed() {
            failed.push(i + 1);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
