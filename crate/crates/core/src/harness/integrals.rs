//! Integral representations over `[x, ∞) × [0, ∞)^{d−1}` and the Bessel
//! and Laguerre forms derived from them.
//!
//! Coordinates are `t` (first axis, carrying the cut `x`), `s`, then `u`.
//! The series side is always the upper variant.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use super::{case_label, ResidualReport};
use crate::error::{Error, Result};
use crate::expm::mat_pow_scalar;
use crate::gamma::{gamma_matrix, pochhammer, reciprocal_gamma_matrix, Variant};
use crate::hyp::{laguerre, BesselMatrix, Hyp0F1, Hyp1F1, HumbertPhi3, HumbertPsi2};
use crate::matrix::{checked_inverse, SquareMatrix};
use crate::quadrature::{integrate_weighted, QuadratureSpec};
use crate::series::{EvalResult, SeriesControl};
use crate::triple::{evaluate, Family, ParamSet, Role, TriplePoint};

/// Quadrature and kernel settings for the integral checks.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IntegralOptions {
    /// Base nodes per axis in two dimensions (doubled for the estimate).
    pub nodes_2d: usize,
    /// Base nodes per axis in three dimensions.
    pub nodes_3d: usize,
    pub rel_tol_2d: f64,
    pub rel_tol_3d: f64,
    /// Control for kernel series at quadrature nodes, where arguments are large.
    pub kernel: SeriesControl,
}

impl Default for IntegralOptions {
    fn default() -> Self {
        IntegralOptions {
            nodes_2d: 80,
            nodes_3d: 32,
            rel_tol_2d: 1e-7,
            rel_tol_3d: 1e-6,
            kernel: SeriesControl { max_terms_per_index: 1000, abs_tol: 1e-30, rel_tol: 1e-15, stagnation_layers: 2 },
        }
    }
}

/// `v^M` for repeated node values `v`.
struct Powers {
    exponent: SquareMatrix,
    cache: BTreeMap<u64, SquareMatrix>,
}

impl Powers {
    fn new(exponent: SquareMatrix) -> Self {
        Powers { exponent, cache: BTreeMap::new() }
    }

    fn at(&mut self, v: f64) -> Result<&SquareMatrix> {
        let key = v.to_bits();
        if !self.cache.contains_key(&key) {
            let m = mat_pow_scalar(&self.exponent, v)?;
            self.cache.insert(key, m);
        }
        Ok(&self.cache[&key])
    }
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn weighted(
    dim: usize,
    x: f64,
    opts: &IntegralOptions,
    g: impl FnMut(&[f64]) -> Result<SquareMatrix>,
) -> Result<EvalResult> {
    let (nodes, rel_tol) = if dim == 3 { (opts.nodes_3d, opts.rel_tol_3d) } else { (opts.nodes_2d, opts.rel_tol_2d) };
    let spec = QuadratureSpec { nodes, ..QuadratureSpec::gauss_laguerre(dim, x, rel_tol) };
    integrate_weighted(g, &spec)
}

fn cp(p: &ParamSet) -> &SquareMatrix {
    p.cp.as_ref().expect("validated")
}

fn cpp(p: &ParamSet) -> &SquareMatrix {
    p.cpp.as_ref().expect("validated")
}

fn minus_identity(m: &SquareMatrix) -> SquareMatrix {
    m.shifted(-1.0)
}

fn quad_note(r: &EvalResult) -> String {
    format!("quadrature estimate {:.2e}", r.error_estimate)
}

/// Double integral with `₀F₁` and the family's confluent kernel.
pub fn verify_double_integral(
    p: &ParamSet,
    z: &TriplePoint,
    ctl: &SeriesControl,
    opts: &IntegralOptions,
    tol: f64,
) -> Result<ResidualReport> {
    p.validate()?;
    let lhs = evaluate(p, Variant::Upper, z, ctl)?.value;
    let kctl = opts.kernel;
    let mut pt = Powers::new(minus_identity(&p.a));
    let mut ps = Powers::new(minus_identity(&p.b));
    let mut f01 = Hyp0F1::new(&p.c);
    let (z1, z2, z3) = (z.z1, z.z2, z.z3);
    let r = match p.family {
        Family::HA => {
            let mut f11 = Hyp1F1::new(&p.bp, cp(p))?;
            weighted(2, p.x, opts, |v| {
                let (t, s) = (v[0], v[1]);
                let k = &f01.eval(z1 * (s * t), &kctl)?.value * &f11.eval(z2 * s + z3 * t, &kctl)?.value;
                Ok(&(&*pt.at(t)? * ps.at(s)?) * &k)
            })?
        }
        Family::HB => {
            let mut psi = HumbertPsi2::new(&p.bp, cp(p), cpp(p))?;
            weighted(2, p.x, opts, |v| {
                let (t, s) = (v[0], v[1]);
                let k = &f01.eval(z1 * (s * t), &kctl)?.value * &psi.eval(z2 * s, z3 * t, &kctl)?.value;
                Ok(&(&*pt.at(t)? * ps.at(s)?) * &k)
            })?
        }
        Family::HC => {
            let mut phi = HumbertPhi3::new(&p.bp, &p.c)?;
            weighted(2, p.x, opts, |v| {
                let (t, s) = (v[0], v[1]);
                let k = phi.eval(z2 * s + z3 * t, z1 * (s * t), &kctl)?.value;
                Ok(&(&*pt.at(t)? * ps.at(s)?) * &k)
            })?
        }
    };
    let pre = &reciprocal_gamma_matrix(&p.a)? * &reciprocal_gamma_matrix(&p.b)?;
    let rhs = &pre * &r.value;
    Ok(ResidualReport::compare("integral.double", Some(p.family), case_label(p, z), &lhs, &rhs, tol)
        .with_diagnostics(quad_note(&r)))
}

/// Triple integral with products of `₀F₁` kernels.
pub fn verify_triple_integral(
    p: &ParamSet,
    z: &TriplePoint,
    ctl: &SeriesControl,
    opts: &IntegralOptions,
    tol: f64,
) -> Result<ResidualReport> {
    p.validate()?;
    let lhs = evaluate(p, Variant::Upper, z, ctl)?.value;
    let kctl = opts.kernel;
    let mut pt = Powers::new(minus_identity(&p.a));
    let mut ps = Powers::new(minus_identity(&p.b));
    let mut pu = Powers::new(minus_identity(&p.bp));
    let mut k1 = Hyp0F1::new(&p.c);
    let (z1, z2, z3) = (z.z1, z.z2, z.z3);
    let r = match p.family {
        Family::HA => {
            let mut k2 = Hyp0F1::new(cp(p));
            weighted(3, p.x, opts, |v| {
                let (t, s, u) = (v[0], v[1], v[2]);
                let k = &k1.eval(z1 * (s * t), &kctl)?.value * &k2.eval(z2 * (u * s) + z3 * (u * t), &kctl)?.value;
                Ok(&(&(&*pt.at(t)? * ps.at(s)?) * pu.at(u)?) * &k)
            })?
        }
        Family::HB => {
            let mut k2 = Hyp0F1::new(cp(p));
            let mut k3 = Hyp0F1::new(cpp(p));
            weighted(3, p.x, opts, |v| {
                let (t, s, u) = (v[0], v[1], v[2]);
                let k = &(&k1.eval(z1 * (s * t), &kctl)?.value * &k2.eval(z2 * (u * s), &kctl)?.value)
                    * &k3.eval(z3 * (u * t), &kctl)?.value;
                Ok(&(&(&*pt.at(t)? * ps.at(s)?) * pu.at(u)?) * &k)
            })?
        }
        Family::HC => weighted(3, p.x, opts, |v| {
            let (t, s, u) = (v[0], v[1], v[2]);
            let k = k1.eval(z1 * (s * t) + z2 * (u * s) + z3 * (u * t), &kctl)?.value;
            Ok(&(&(&*pt.at(t)? * ps.at(s)?) * pu.at(u)?) * &k)
        })?,
    };
    let pre = &(&reciprocal_gamma_matrix(&p.a)? * &reciprocal_gamma_matrix(&p.b)?) * &reciprocal_gamma_matrix(&p.bp)?;
    let rhs = &pre * &r.value;
    Ok(ResidualReport::compare("integral.triple", Some(p.family), case_label(p, z), &lhs, &rhs, tol)
        .with_diagnostics(quad_note(&r)))
}

/// `J` kernels pair with negated arguments on the series side, `I` kernels
/// with the arguments as given.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BesselKind {
    J,
    I,
}

impl BesselKind {
    fn name(self) -> &'static str {
        match self {
            BesselKind::J => "j",
            BesselKind::I => "i",
        }
    }

    fn sign(self) -> f64 {
        match self {
            BesselKind::J => -1.0,
            BesselKind::I => 1.0,
        }
    }

    fn kernel(self, a: &SquareMatrix) -> Result<BesselMatrix> {
        match self {
            BesselKind::J => BesselMatrix::j(a),
            BesselKind::I => BesselMatrix::i(a),
        }
    }
}

/// Special forms of the integral representations.
///
/// Laguerre forms replace `B′` by `−mI`; every form shifts the denominators
/// it names by `I` on the series side.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Corollary {
    /// `H_A`: `C′ + I`, kernel `₀F₁(C; z₁st) L_m^{(C′)}(z₂s + z₃t)`.
    Laguerre { m: usize },
    /// `H_A`, `H_B`: `C + I`, kernel `J_C` or `I_C` of `2√(z₁st)` times the
    /// family's confluent kernel.
    BesselDouble(BesselKind),
    /// `H_A`: `C + I`, `C′ + I`, kernel `J_C` or `I_C` times `L_m^{(C′)}`.
    BesselLaguerre(BesselKind, usize),
    /// `H_A`: `C + I`, kernel `J_C` or `I_C` times `₀F₁(C′; u(z₂s + z₃t))`.
    BesselTriple(BesselKind),
    /// `H_B`: every denominator shifted, kernel a product of three Bessel
    /// functions of `2√(z₁st)`, `2√(z₂su)`, `2√(z₃ut)`.
    BesselProduct(BesselKind),
}

impl Corollary {
    /// The eleven forms with the given Laguerre degree.
    pub fn all(m: usize) -> [(Family, Corollary); 11] {
        use BesselKind::{I, J};
        [
            (Family::HA, Corollary::Laguerre { m }),
            (Family::HA, Corollary::BesselDouble(J)),
            (Family::HA, Corollary::BesselDouble(I)),
            (Family::HA, Corollary::BesselLaguerre(J, m)),
            (Family::HA, Corollary::BesselLaguerre(I, m)),
            (Family::HA, Corollary::BesselTriple(J)),
            (Family::HA, Corollary::BesselTriple(I)),
            (Family::HB, Corollary::BesselDouble(J)),
            (Family::HB, Corollary::BesselDouble(I)),
            (Family::HB, Corollary::BesselProduct(J)),
            (Family::HB, Corollary::BesselProduct(I)),
        ]
    }

    pub fn name(&self) -> String {
        match self {
            Corollary::Laguerre { m } => format!("corollary.laguerre.m{m}"),
            Corollary::BesselDouble(k) => format!("corollary.bessel-{}.double", k.name()),
            Corollary::BesselLaguerre(k, m) => format!("corollary.bessel-{}.laguerre.m{m}", k.name()),
            Corollary::BesselTriple(k) => format!("corollary.bessel-{}.triple", k.name()),
            Corollary::BesselProduct(k) => format!("corollary.bessel-{}.product", k.name()),
        }
    }

    fn families(&self) -> &'static [Family] {
        match self {
            Corollary::BesselDouble(_) => &[Family::HA, Family::HB],
            Corollary::BesselProduct(_) => &[Family::HB],
            _ => &[Family::HA],
        }
    }
}

fn positive(z: Complex64, what: &str) -> Result<f64> {
    if z.im != 0.0 || !(z.re > 0.0) {
        return Err(Error::validation(format!("this form needs real {what} > 0, got {z}")));
    }
    Ok(z.re)
}

/// `2√(w·a·b)` as a Bessel argument.
fn bessel_arg(w: f64, a: f64, b: f64) -> Complex64 {
    c(2.0 * (w * a * b).sqrt())
}

/// Checks one [`Corollary`] for base parameters `p` (before the shifts and
/// substitutions the form applies).
pub fn verify_corollary(
    p: &ParamSet,
    z: &TriplePoint,
    form: Corollary,
    ctl: &SeriesControl,
    opts: &IntegralOptions,
    tol: f64,
) -> Result<ResidualReport> {
    p.validate()?;
    if !form.families().contains(&p.family) {
        return Err(Error::validation(format!("{} does not apply to {}", form.name(), p.family)));
    }
    let order = p.order();
    let kctl = opts.kernel;
    let (z1, z2, z3) = (z.z1, z.z2, z.z3);
    let mut with_bp = p.clone();
    if let Corollary::Laguerre { m } | Corollary::BesselLaguerre(_, m) = form {
        with_bp = p.with(Role::Bp, SquareMatrix::scalar(order, c(-(m as f64))))?;
    }
    let laguerre_pre = |m: usize| -> Result<SquareMatrix> {
        let f: f64 = (1..=m).map(|k| k as f64).product();
        Ok(checked_inverse(&pochhammer(&cp(p).shifted(1.0), m), "(C'+I)_m")?.scale_real(f))
    };
    let ga_gb = &reciprocal_gamma_matrix(&p.a)? * &reciprocal_gamma_matrix(&p.b)?;
    let mut pt_a = Powers::new(minus_identity(&p.a));
    let mut ps_b = Powers::new(minus_identity(&p.b));

    let (lhs_params, lhs_point, pre, r) = match form {
        Corollary::Laguerre { m } => {
            let q = with_bp.shifted(Role::Cp, 1.0)?;
            let mut f01 = Hyp0F1::new(&p.c);
            let a = cp(p).clone();
            let r = weighted(2, p.x, opts, |v| {
                let (t, s) = (v[0], v[1]);
                let k = &f01.eval(z1 * (s * t), &kctl)?.value * &laguerre(m, &a, c(1.0), z2 * s + z3 * t)?;
                Ok(&(&*pt_a.at(t)? * ps_b.at(s)?) * &k)
            })?;
            (q, *z, &laguerre_pre(m)? * &ga_gb, r)
        }
        Corollary::BesselDouble(kind) | Corollary::BesselLaguerre(kind, _) | Corollary::BesselTriple(kind) => {
            let w1 = positive(z1, "z1")?;
            let mut q = with_bp.shifted(Role::C, 1.0)?;
            let point = TriplePoint::new(z1 * kind.sign(), z2, z3);
            let half_c = p.c.scale_real(0.5);
            let mut pt = Powers::new(&minus_identity(&p.a) - &half_c);
            let mut ps = Powers::new(&minus_identity(&p.b) - &half_c);
            let mut bes = kind.kernel(&p.c)?;
            let mut pre =
                &(&mat_pow_scalar(&half_c.scale_real(-1.0), w1)? * &ga_gb) * &gamma_matrix(&p.c.shifted(1.0))?;
            let r = match form {
                Corollary::BesselDouble(_) => {
                    let mut conf: ConfluentKernel = match p.family {
                        Family::HA => ConfluentKernel::F11(Hyp1F1::new(&p.bp, cp(p))?),
                        _ => ConfluentKernel::Psi2(HumbertPsi2::new(&p.bp, cp(p), cpp(p))?),
                    };
                    weighted(2, p.x, opts, |v| {
                        let (t, s) = (v[0], v[1]);
                        let k = &bes.eval(bessel_arg(w1, s, t), &kctl)?.value * &conf.eval(z2, z3, s, t, &kctl)?;
                        Ok(&(&*pt.at(t)? * ps.at(s)?) * &k)
                    })?
                }
                Corollary::BesselLaguerre(_, m) => {
                    q = q.shifted(Role::Cp, 1.0)?;
                    pre = &laguerre_pre(m)? * &pre;
                    let a = cp(p).clone();
                    weighted(2, p.x, opts, |v| {
                        let (t, s) = (v[0], v[1]);
                        let k = &bes.eval(bessel_arg(w1, s, t), &kctl)?.value
                            * &laguerre(m, &a, c(1.0), z2 * s + z3 * t)?;
                        Ok(&(&*pt.at(t)? * ps.at(s)?) * &k)
                    })?
                }
                _ => {
                    pre = &pre * &reciprocal_gamma_matrix(&p.bp)?;
                    let mut pu = Powers::new(minus_identity(&p.bp));
                    let mut k2 = Hyp0F1::new(cp(p));
                    weighted(3, p.x, opts, |v| {
                        let (t, s, u) = (v[0], v[1], v[2]);
                        let k = &bes.eval(bessel_arg(w1, s, t), &kctl)?.value
                            * &k2.eval(z2 * (u * s) + z3 * (u * t), &kctl)?.value;
                        Ok(&(&(&*pt.at(t)? * ps.at(s)?) * pu.at(u)?) * &k)
                    })?
                }
            };
            (q, point, pre, r)
        }
        Corollary::BesselProduct(kind) => {
            let w1 = positive(z1, "z1")?;
            let w2 = positive(z2, "z2")?;
            let w3 = positive(z3, "z3")?;
            let q = p.shifted_many(&[(Role::C, 1.0), (Role::Cp, 1.0), (Role::Cpp, 1.0)])?;
            let point = z.scaled([kind.sign(); 3]);
            let (hc, hcp, hcpp) = (p.c.scale_real(0.5), cp(p).scale_real(0.5), cpp(p).scale_real(0.5));
            let mut pt = Powers::new(&(&minus_identity(&p.a) - &hc) - &hcpp);
            let mut ps = Powers::new(&(&minus_identity(&p.b) - &hc) - &hcp);
            let mut pu = Powers::new(&(&minus_identity(&p.bp) - &hcp) - &hcpp);
            let mut b1 = kind.kernel(&p.c)?;
            let mut b2 = kind.kernel(cp(p))?;
            let mut b3 = kind.kernel(cpp(p))?;
            let zpow = &(&mat_pow_scalar(&hc.scale_real(-1.0), w1)? * &mat_pow_scalar(&hcp.scale_real(-1.0), w2)?)
                * &mat_pow_scalar(&hcpp.scale_real(-1.0), w3)?;
            let gammas = &(&gamma_matrix(&p.c.shifted(1.0))? * &gamma_matrix(&cp(p).shifted(1.0))?)
                * &gamma_matrix(&cpp(p).shifted(1.0))?;
            let pre = &(&(&zpow * &ga_gb) * &reciprocal_gamma_matrix(&p.bp)?) * &gammas;
            let r = weighted(3, p.x, opts, |v| {
                let (t, s, u) = (v[0], v[1], v[2]);
                let k = &(&b1.eval(bessel_arg(w1, s, t), &kctl)?.value * &b2.eval(bessel_arg(w2, s, u), &kctl)?.value)
                    * &b3.eval(bessel_arg(w3, u, t), &kctl)?.value;
                Ok(&(&(&*pt.at(t)? * ps.at(s)?) * pu.at(u)?) * &k)
            })?;
            (q, point, pre, r)
        }
    };
    let lhs = evaluate(&lhs_params, Variant::Upper, &lhs_point, ctl)?.value;
    let rhs = &pre * &r.value;
    Ok(ResidualReport::compare(form.name(), Some(p.family), case_label(p, z), &lhs, &rhs, tol)
        .with_diagnostics(quad_note(&r)))
}

/// The confluent factor of the double Bessel forms.
enum ConfluentKernel {
    F11(Hyp1F1),
    Psi2(HumbertPsi2),
}

impl ConfluentKernel {
    fn eval(
        &mut self,
        z2: Complex64,
        z3: Complex64,
        s: f64,
        t: f64,
        ctl: &SeriesControl,
    ) -> Result<SquareMatrix> {
        Ok(match self {
            ConfluentKernel::F11(f) => f.eval(z2 * s + z3 * t, ctl)?.value,
            ConfluentKernel::Psi2(f) => f.eval(z2 * s, z3 * t, ctl)?.value,
        })
    }
}
