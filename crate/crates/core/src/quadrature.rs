//! Quadrature for matrix-valued integrands on `[x, ∞) × [0, ∞)^{d−1}`.
//!
//! Two schemes are provided. Tensor-product Gauss–Laguerre handles the
//! smooth, exponentially damped integrands of the integral representations;
//! the error estimate comes from comparing the rule against one with twice
//! as many nodes per axis. The exp-sinh rule is a one-dimensional fallback
//! that copes with algebraic endpoint singularities such as `t^{A−I}` at the
//! origin, refining the step until successive levels agree.

use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::FRAC_PI_2;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::matrix::SquareMatrix;
use crate::series::EvalResult;

/// Tensor nodes whose combined weight falls below `e^{LOG_WEIGHT_FLOOR}` are
/// skipped by [`integrate_weighted`].
const LOG_WEIGHT_FLOOR: f64 = -230.0;

/// Largest node count per axis for three-dimensional rules.
pub const MAX_NODES_3D: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scheme {
    GaussLaguerre,
    AdaptiveExp,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadratureSpec {
    pub scheme: Scheme,
    /// Base node count per axis; the estimate doubles it.
    pub nodes: usize,
    /// Lower limit `x` of the first axis.
    pub lower_cut: f64,
    pub dimension: usize,
    pub rel_tol: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            scheme: Scheme::GaussLaguerre,
            nodes: 80,
            lower_cut: 0.0,
            dimension: 1,
            rel_tol: 1e-8,
        }
    }
}

impl QuadratureSpec {
    pub fn gauss_laguerre(dimension: usize, lower_cut: f64, rel_tol: f64) -> Self {
        QuadratureSpec {
            dimension,
            lower_cut,
            rel_tol,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.nodes < 8 {
            return Err(Error::validation("quadrature needs at least 8 nodes"));
        }
        if !(self.rel_tol > 0.0) {
            return Err(Error::validation("quadrature tolerance must be positive"));
        }
        if !(1..=3).contains(&self.dimension) {
            return Err(Error::validation("quadrature dimension must be 1, 2 or 3"));
        }
        if !(self.lower_cut >= 0.0) || !self.lower_cut.is_finite() {
            return Err(Error::validation("lower cut must be finite and non-negative"));
        }
        if self.scheme == Scheme::AdaptiveExp && self.dimension != 1 {
            return Err(Error::validation("the exp-sinh rule is one-dimensional"));
        }
        Ok(())
    }

    /// Base and refined node counts per axis after the 3D cap.
    pub fn node_pair(&self) -> (usize, usize) {
        if self.dimension == 3 {
            let fine = (2 * self.nodes).min(MAX_NODES_3D);
            (fine / 2, fine)
        } else {
            (self.nodes, 2 * self.nodes)
        }
    }
}

/// Gauss–Laguerre rule `∫₀^∞ e^{−u} g(u) du ≈ Σᵢ wᵢ g(uᵢ)`.
#[derive(Clone, Debug)]
pub struct GaussLaguerre {
    pub nodes: Vec<f64>,
    /// `ln wᵢ`; the largest nodes carry weights below the double range.
    pub log_weights: Vec<f64>,
}

/// Eigenvalues of the symmetric tridiagonal matrix with diagonal `d` and
/// off-diagonal `e` (`e[i]` couples `i` and `i+1`), by implicit QL.
fn tridiagonal_eigenvalues(mut d: Vec<f64>, mut e: Vec<f64>) -> Result<Vec<f64>> {
    let n = d.len();
    e.push(0.0);
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                return Err(Error::convergence("Gauss–Laguerre nodes", "QL iteration stalled"));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + if g >= 0.0 { r.abs() } else { -r.abs() });
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut i = m;
            let mut deflated = false;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    d.sort_by(|a, b| a.partial_cmp(b).unwrap_or(core::cmp::Ordering::Equal));
    Ok(d)
}

/// `(L_{k−1}(x), L_k(x))` scaled by `e^{−log_scale}`, with `log_scale` returned.
fn laguerre_pair(k: usize, x: f64) -> (f64, f64, f64) {
    let mut prev = 1.0;
    let mut cur = 1.0 - x;
    let mut log_scale = 0.0;
    if k == 0 {
        return (0.0, 1.0, 0.0);
    }
    for j in 1..k {
        let jf = j as f64;
        let next = ((2.0 * jf + 1.0 - x) * cur - jf * prev) / (jf + 1.0);
        prev = cur;
        cur = next;
        let big = cur.abs().max(prev.abs());
        if big > 1e150 {
            prev /= 1e150;
            cur /= 1e150;
            log_scale += 150.0 * core::f64::consts::LN_10;
        }
    }
    (prev, cur, log_scale)
}

impl GaussLaguerre {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::validation("Gauss–Laguerre rule needs at least one node"));
        }
        let d: Vec<f64> = (0..n).map(|i| 2.0 * i as f64 + 1.0).collect();
        let e: Vec<f64> = (1..n).map(|i| i as f64).collect();
        let mut nodes = tridiagonal_eigenvalues(d, e)?;
        // polish with Newton steps on L_n, using L_n' = n(L_n − L_{n−1})/x
        for x in nodes.iter_mut() {
            for _ in 0..4 {
                let (lm1, l, _) = laguerre_pair(n, *x);
                let deriv = n as f64 * (l - lm1) / *x;
                if deriv == 0.0 || !deriv.is_finite() {
                    break;
                }
                let step = l / deriv;
                let cand = *x - step;
                if cand > 0.0 && step.abs() < 1e-6 * x.abs().max(1.0) {
                    *x = cand;
                }
                if step.abs() <= f64::EPSILON * x.abs() {
                    break;
                }
            }
        }
        let np1 = (n + 1) as f64;
        let log_weights = nodes
            .iter()
            .map(|&x| {
                let (_, l, scale) = laguerre_pair(n + 1, x);
                x.ln() - 2.0 * np1.ln() - 2.0 * (l.abs().ln() + scale)
            })
            .collect();
        Ok(GaussLaguerre { nodes, log_weights })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

fn tensor_sum<F>(
    rules: &[&GaussLaguerre],
    shift: f64,
    full_integrand: bool,
    f: &mut F,
) -> Result<Option<SquareMatrix>>
where
    F: FnMut(&[f64]) -> Result<SquareMatrix>,
{
    let dim = rules.len();
    let mut idx = [0usize; 3];
    let mut coords = [0.0f64; 3];
    let mut acc: Option<SquareMatrix> = None;
    let total: usize = rules.iter().map(|r| r.len()).product();
    for flat in 0..total {
        let mut rem = flat;
        for axis in (0..dim).rev() {
            idx[axis] = rem % rules[axis].len();
            rem /= rules[axis].len();
        }
        let mut log_w = 0.0;
        for axis in 0..dim {
            let u = rules[axis].nodes[idx[axis]];
            log_w += rules[axis].log_weights[idx[axis]];
            if full_integrand {
                log_w += u;
            }
            coords[axis] = if axis == 0 { shift + u } else { u };
        }
        if !full_integrand && log_w < LOG_WEIGHT_FLOOR {
            continue;
        }
        let value = f(&coords[..dim])?;
        if !value.is_finite() {
            return Err(Error::convergence(
                "quadrature",
                format!("integrand is not finite at {:?}", &coords[..dim]),
            ));
        }
        let w = Complex64::new(log_w.exp(), 0.0);
        match acc.as_mut() {
            Some(a) => a.add_scaled(&value, w),
            None => acc = Some(value.scale(w)),
        }
    }
    Ok(acc)
}

fn gauss_laguerre_pair<F>(spec: &QuadratureSpec, full_integrand: bool, mut f: F) -> Result<EvalResult>
where
    F: FnMut(&[f64]) -> Result<SquareMatrix>,
{
    let (coarse_n, fine_n) = spec.node_pair();
    let coarse = GaussLaguerre::new(coarse_n)?;
    let fine = GaussLaguerre::new(fine_n)?;
    let coarse_rules: Vec<&GaussLaguerre> = (0..spec.dimension).map(|_| &coarse).collect();
    let fine_rules: Vec<&GaussLaguerre> = (0..spec.dimension).map(|_| &fine).collect();
    let a = tensor_sum(&coarse_rules, spec.lower_cut, full_integrand, &mut f)?;
    let b = tensor_sum(&fine_rules, spec.lower_cut, full_integrand, &mut f)?;
    let (a, mut b) = match (a, b) {
        (Some(a), Some(b)) => (a, b),
        _ => {
            return Err(Error::convergence(
                "quadrature",
                "every node fell below the weight floor",
            ))
        }
    };
    let mut a = a;
    if !full_integrand && spec.lower_cut > 0.0 {
        let pre = (-spec.lower_cut).exp();
        a = a.scale_real(pre);
        b = b.scale_real(pre);
    }
    let err = (&b - &a).frobenius_norm();
    let scale = b.frobenius_norm();
    if !(err <= spec.rel_tol * scale) && err > f64::MIN_POSITIVE {
        return Err(Error::convergence(
            "quadrature",
            format!(
                "node doubling {coarse_n}→{fine_n} changed the result by {:e} (relative), above {:e}",
                err / scale.max(f64::MIN_POSITIVE),
                spec.rel_tol
            ),
        ));
    }
    let evaluations = fine_n.pow(spec.dimension as u32) + coarse_n.pow(spec.dimension as u32);
    Ok(EvalResult {
        value: b,
        error_estimate: err,
        terms_used: evaluations,
        layers: 2,
        converged: true,
    })
}

// exp-sinh window in the transformed variable: t − x runs from about
// e^{−521} to about 1100.
const EXPSINH_LEFT: f64 = -6.5;
const EXPSINH_RIGHT: f64 = 2.2;
const EXPSINH_MAX_LEVEL: usize = 10;

fn exp_sinh<F>(spec: &QuadratureSpec, weighted: bool, mut f: F) -> Result<EvalResult>
where
    F: FnMut(&[f64]) -> Result<SquareMatrix>,
{
    let x = spec.lower_cut;
    let mut eval = |u: f64| -> Result<Option<SquareMatrix>> {
        let e = (FRAC_PI_2 * u.sinh()).exp();
        let jac = FRAC_PI_2 * u.cosh() * e;
        let t = x + e;
        if !(e > 0.0) || !jac.is_finite() {
            return Ok(None);
        }
        let mut factor = jac;
        if weighted {
            factor *= (-t).exp();
            if factor == 0.0 {
                return Ok(None);
            }
        }
        let v = f(&[t])?;
        let out = v.scale_real(factor);
        if !out.is_finite() {
            return Err(Error::convergence(
                "exp-sinh quadrature",
                format!("integrand is not finite at t = {t:e}"),
            ));
        }
        Ok(Some(out))
    };
    let mut h = 0.5;
    let mut sum: Option<SquareMatrix> = None;
    let steps = ((EXPSINH_RIGHT - EXPSINH_LEFT) / h).round() as usize;
    for k in 0..=steps {
        if let Some(v) = eval(EXPSINH_LEFT + k as f64 * h)? {
            match sum.as_mut() {
                Some(s) => *s += &v,
                None => sum = Some(v),
            }
        }
    }
    let mut sum = sum.ok_or_else(|| Error::convergence("exp-sinh quadrature", "no usable nodes"))?;
    let mut estimate = sum.scale_real(h);
    let mut evaluations = steps + 1;
    for level in 1..=EXPSINH_MAX_LEVEL {
        let count = ((EXPSINH_RIGHT - EXPSINH_LEFT) / h).round() as usize;
        for k in 0..count {
            if let Some(v) = eval(EXPSINH_LEFT + (k as f64 + 0.5) * h)? {
                sum += &v;
            }
        }
        evaluations += count;
        h *= 0.5;
        let next = sum.scale_real(h);
        let diff = (&next - &estimate).frobenius_norm();
        let scale = next.frobenius_norm();
        estimate = next;
        if level >= 3 && diff <= spec.rel_tol * scale {
            return Ok(EvalResult {
                value: estimate,
                error_estimate: diff,
                terms_used: evaluations,
                layers: level + 1,
                converged: true,
            });
        }
    }
    Err(Error::convergence(
        "exp-sinh quadrature",
        format!("no agreement to {:e} after {EXPSINH_MAX_LEVEL} refinements", spec.rel_tol),
    ))
}

/// `∫ f` over `[x, ∞) × [0, ∞)^{d−1}` for a full integrand `f` (its decay
/// included).
pub fn integrate_semi_infinite<F>(f: F, spec: &QuadratureSpec) -> Result<EvalResult>
where
    F: FnMut(&[f64]) -> Result<SquareMatrix>,
{
    spec.validate()?;
    match spec.scheme {
        Scheme::GaussLaguerre => gauss_laguerre_pair(spec, true, f),
        Scheme::AdaptiveExp => exp_sinh(spec, false, f),
    }
}

/// `∫ e^{−(t₁+…+t_d)} g(t)` over `[x, ∞) × [0, ∞)^{d−1}`; the exponential
/// weight is handled by the rule, so `g` should not include it.
pub fn integrate_weighted<F>(g: F, spec: &QuadratureSpec) -> Result<EvalResult>
where
    F: FnMut(&[f64]) -> Result<SquareMatrix>,
{
    spec.validate()?;
    match spec.scheme {
        Scheme::GaussLaguerre => gauss_laguerre_pair(spec, false, g),
        Scheme::AdaptiveExp => exp_sinh(spec, true, g),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expm::mat_pow_scalar;
    use core::f64::consts::E;

    #[test]
    fn rule_moments() {
        for &n in &[8usize, 32, 80, 160] {
            let rule = GaussLaguerre::new(n).unwrap();
            assert!(rule.nodes.windows(2).all(|w| w[0] < w[1]));
            let total: f64 = rule.log_weights.iter().map(|w| w.exp()).sum();
            assert!((total - 1.0).abs() < 1e-10, "n={n}: {total}");
            // ∫ u^k e^{−u} = k! exactly for k < 2n
            let mut fact = 1.0;
            for k in 1..12usize.min(2 * n) {
                fact *= k as f64;
                let m: f64 = rule
                    .nodes
                    .iter()
                    .zip(&rule.log_weights)
                    .map(|(u, w)| w.exp() * u.powi(k as i32))
                    .sum();
                assert!((m - fact).abs() < 1e-10 * fact, "n={n} k={k}");
            }
        }
    }

    #[test]
    fn small_rule_known_nodes() {
        // two-point rule: nodes 2 ∓ √2, weights (2 ± √2)/4
        let rule = GaussLaguerre::new(2).unwrap();
        let s = 2f64.sqrt();
        assert!((rule.nodes[0] - (2.0 - s)).abs() < 1e-15);
        assert!((rule.nodes[1] - (2.0 + s)).abs() < 1e-14);
        assert!((rule.log_weights[0].exp() - (2.0 + s) / 4.0).abs() < 1e-15);
    }

    fn diag_gamma_integrand(a: &SquareMatrix) -> impl FnMut(&[f64]) -> Result<SquareMatrix> + '_ {
        let am1 = a.shifted(-1.0);
        move |t: &[f64]| Ok(mat_pow_scalar(&am1, t[0])?.scale_real((-t[0]).exp()))
    }

    #[test]
    fn examples() {
        let spec = QuadratureSpec::default();
        let one = integrate_semi_infinite(|t: &[f64]| Ok(SquareMatrix::scalar(2, Complex64::new((-t[0]).exp(), 0.0))), &spec).unwrap();
        assert!(one.value.relative_distance(&SquareMatrix::identity(2)) < 1e-10);

        let a = SquareMatrix::from_real_diag(&[2.0, 3.0]);
        let g = integrate_semi_infinite(diag_gamma_integrand(&a), &spec).unwrap();
        assert!(g.value.relative_distance(&SquareMatrix::from_real_diag(&[1.0, 2.0])) < 1e-10);

        let cut = QuadratureSpec { lower_cut: 1.0, ..spec };
        let a1 = SquareMatrix::identity(1);
        let u = integrate_semi_infinite(diag_gamma_integrand(&a1), &cut).unwrap();
        assert!((u.value[(0, 0)].re - 1.0 / E).abs() < 1e-10);
    }

    #[test]
    fn separable_two_dimensional() {
        let spec = QuadratureSpec::gauss_laguerre(2, 0.5, 1e-8);
        let two = integrate_weighted(
            |p: &[f64]| Ok(SquareMatrix::scalar(1, Complex64::new((1.0 + p[0]).sqrt() * (p[1] * 0.3).cos(), 0.0))),
            &spec,
        )
        .unwrap();
        let s1 = integrate_weighted(
            |p: &[f64]| Ok(SquareMatrix::scalar(1, Complex64::new((1.0 + p[0]).sqrt(), 0.0))),
            &QuadratureSpec::gauss_laguerre(1, 0.5, 1e-8),
        )
        .unwrap();
        let s2 = integrate_weighted(
            |p: &[f64]| Ok(SquareMatrix::scalar(1, Complex64::new((p[0] * 0.3).cos(), 0.0))),
            &QuadratureSpec::gauss_laguerre(1, 0.0, 1e-8),
        )
        .unwrap();
        let prod = s1.value[(0, 0)] * s2.value[(0, 0)];
        assert!((two.value[(0, 0)] - prod).norm() < 1e-10 * prod.norm());
        // ∫₀^∞ e^{−s} cos(0.3 s) ds = 1/(1 + 0.09)
        assert!((s2.value[(0, 0)].re - 1.0 / 1.09).abs() < 1e-10);
    }

    #[test]
    fn exp_sinh_handles_endpoint_singularity() {
        let spec = QuadratureSpec { scheme: Scheme::AdaptiveExp, rel_tol: 1e-12, ..Default::default() };
        let a = SquareMatrix::from_real_diag(&[0.5, 0.25]);
        let g = integrate_semi_infinite(diag_gamma_integrand(&a), &spec).unwrap();
        let want = [crate::scalar::gamma(Complex64::new(0.5, 0.0)).unwrap(), crate::scalar::gamma(Complex64::new(0.25, 0.0)).unwrap()];
        assert!((g.value[(0, 0)] - want[0]).norm() < 1e-11 * want[0].norm());
        assert!((g.value[(1, 1)] - want[1]).norm() < 1e-10 * want[1].norm());
    }

    #[test]
    fn rejects_bad_specs() {
        let f = |_: &[f64]| Ok(SquareMatrix::identity(1));
        assert!(integrate_semi_infinite(f, &QuadratureSpec { nodes: 4, ..Default::default() }).unwrap_err().is_validation());
        assert!(integrate_semi_infinite(f, &QuadratureSpec { dimension: 4, ..Default::default() }).is_err());
        assert!(integrate_weighted(f, &QuadratureSpec { scheme: Scheme::AdaptiveExp, dimension: 2, ..Default::default() }).is_err());
    }

    #[test]
    fn nonconvergence_is_reported() {
        // sin √t is not smooth at the origin, so 8 and 16 nodes disagree
        let spec = QuadratureSpec { nodes: 8, rel_tol: 1e-14, ..Default::default() };
        let r = integrate_weighted(|t: &[f64]| Ok(SquareMatrix::scalar(1, Complex64::new((t[0]).sqrt().sin(), 0.0))), &spec);
        assert!(matches!(r, Err(Error::Convergence { .. })));
    }
}
