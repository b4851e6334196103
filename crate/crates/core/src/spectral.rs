//! Eigendecomposition and the spectral fast path of the functional calculus.
//!
//! Eigenvalues come from a complex Schur form (Householder reduction to
//! Hessenberg form followed by shifted QR sweeps). Eigenvectors are recovered
//! from the triangular factor by back substitution, so a defective matrix
//! produces a nearly singular eigenvector basis and a huge condition estimate
//! instead of a silently wrong answer.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::matrix::SquareMatrix;

/// Default ceiling on the eigenvector condition number for [`spectral_apply`].
pub const DEFAULT_CONDITION_CEILING: f64 = 1e8;

/// Default relative tolerance for [`check_commuting`].
pub const DEFAULT_COMMUTE_TOL: f64 = 1e-10;

const MAX_QR_SWEEPS_PER_EIGENVALUE: usize = 60;

/// Complex Schur form `M = Q·T·Qᴴ` with `T` upper triangular and `Q` unitary.
#[derive(Clone, Debug)]
pub struct Schur {
    pub unitary: SquareMatrix,
    pub triangular: SquareMatrix,
}

fn hessenberg(m: &SquareMatrix) -> (SquareMatrix, SquareMatrix) {
    let n = m.order();
    let mut h = m.clone();
    let mut q = SquareMatrix::identity(n);
    if n < 3 {
        return (h, q);
    }
    for k in 0..n - 2 {
        let alpha_norm: f64 = ((k + 1)..n).map(|i| h[(i, k)].norm_sqr()).sum::<f64>().sqrt();
        if alpha_norm == 0.0 {
            continue;
        }
        let x0 = h[(k + 1, k)];
        let phase = if x0.norm() == 0.0 {
            Complex64::new(1.0, 0.0)
        } else {
            x0 / x0.norm()
        };
        // v = x + phase·‖x‖·e₁, reflector I − 2vvᴴ/(vᴴv)
        let mut v: Vec<Complex64> = ((k + 1)..n).map(|i| h[(i, k)]).collect();
        v[0] += phase * alpha_norm;
        let vnorm2: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        if vnorm2 == 0.0 {
            continue;
        }
        // H ← P·H
        for j in 0..n {
            let mut dot = Complex64::zero();
            for (idx, i) in ((k + 1)..n).enumerate() {
                dot += v[idx].conj() * h[(i, j)];
            }
            let f = dot * (2.0 / vnorm2);
            for (idx, i) in ((k + 1)..n).enumerate() {
                let delta = v[idx] * f;
                h[(i, j)] -= delta;
            }
        }
        // H ← H·P, Q ← Q·P
        for target in [&mut h, &mut q] {
            for i in 0..n {
                let mut dot = Complex64::zero();
                for (idx, j) in ((k + 1)..n).enumerate() {
                    dot += target[(i, j)] * v[idx];
                }
                let f = dot * (2.0 / vnorm2);
                for (idx, j) in ((k + 1)..n).enumerate() {
                    let delta = f * v[idx].conj();
                    target[(i, j)] -= delta;
                }
            }
        }
        for i in (k + 2)..n {
            h[(i, k)] = Complex64::zero();
        }
    }
    (h, q)
}

/// Givens rotation `[c s; −s̄ c]` (c real) mapping `(a, b)` to `(r, 0)`.
fn givens(a: Complex64, b: Complex64) -> (f64, Complex64) {
    let an = a.norm();
    let bn = b.norm();
    if bn == 0.0 {
        return (1.0, Complex64::zero());
    }
    if an == 0.0 {
        return (0.0, (b / bn).conj());
    }
    let r = an.hypot(bn);
    let c = an / r;
    let s = (a / an) * b.conj() / r;
    (c, s)
}

fn wilkinson_shift(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Complex64 {
    // eigenvalue of [[a, b], [c, d]] closest to d
    let tr_half = (a + d) * 0.5;
    let det = a * d - b * c;
    let disc = (tr_half * tr_half - det).sqrt();
    let l1 = tr_half + disc;
    let l2 = tr_half - disc;
    if (l1 - d).norm() < (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

impl Schur {
    pub fn new(m: &SquareMatrix) -> Result<Self> {
        if !m.is_finite() {
            return Err(Error::validation("cannot decompose a non-finite matrix"));
        }
        let n = m.order();
        let (mut h, mut q) = hessenberg(m);
        let scale = m.max_norm().max(f64::MIN_POSITIVE);
        let mut hi = n.saturating_sub(1);
        let mut iter = 0usize;
        let mut total = 0usize;
        while hi > 0 {
            // locate the active unreduced block [lo, hi]
            let mut lo = hi;
            while lo > 0 {
                let sub = h[(lo, lo - 1)].norm();
                let diag = h[(lo - 1, lo - 1)].norm() + h[(lo, lo)].norm();
                let thresh = f64::EPSILON * if diag == 0.0 { scale } else { diag };
                if sub <= thresh {
                    h[(lo, lo - 1)] = Complex64::zero();
                    break;
                }
                lo -= 1;
            }
            if lo == hi {
                hi -= 1;
                iter = 0;
                continue;
            }
            iter += 1;
            total += 1;
            if total > MAX_QR_SWEEPS_PER_EIGENVALUE * n {
                return Err(Error::convergence(
                    "Schur decomposition",
                    format!("QR sweeps did not deflate after {total} iterations"),
                ));
            }
            let mu = if iter % 11 == 0 {
                // exceptional shift to break cycles
                h[(hi, hi)] + Complex64::new(h[(hi, hi - 1)].norm() * 0.75, 0.0)
            } else {
                wilkinson_shift(
                    h[(hi - 1, hi - 1)],
                    h[(hi - 1, hi)],
                    h[(hi, hi - 1)],
                    h[(hi, hi)],
                )
            };
            for i in lo..=hi {
                h[(i, i)] -= mu;
            }
            let mut rotations: Vec<(f64, Complex64)> = Vec::with_capacity(hi - lo);
            for k in lo..hi {
                let (c, s) = givens(h[(k, k)], h[(k + 1, k)]);
                rotations.push((c, s));
                for j in k..n {
                    let x = h[(k, j)];
                    let y = h[(k + 1, j)];
                    h[(k, j)] = x * c + s * y;
                    h[(k + 1, j)] = -s.conj() * x + y * c;
                }
            }
            for (idx, k) in (lo..hi).enumerate() {
                let (c, s) = rotations[idx];
                let last = (k + 2).min(hi);
                for i in 0..=last {
                    let x = h[(i, k)];
                    let y = h[(i, k + 1)];
                    h[(i, k)] = x * c + y * s.conj();
                    h[(i, k + 1)] = -x * s + y * c;
                }
                for i in 0..n {
                    let x = q[(i, k)];
                    let y = q[(i, k + 1)];
                    q[(i, k)] = x * c + y * s.conj();
                    q[(i, k + 1)] = -x * s + y * c;
                }
            }
            for i in lo..=hi {
                h[(i, i)] += mu;
            }
        }
        for i in 1..n {
            for j in 0..i {
                h[(i, j)] = Complex64::zero();
            }
        }
        Ok(Schur {
            unitary: q,
            triangular: h,
        })
    }

    pub fn eigenvalues(&self) -> Vec<Complex64> {
        self.triangular.diagonal()
    }
}

/// Eigenvalues of `m` (unordered).
pub fn eigenvalues(m: &SquareMatrix) -> Result<Vec<Complex64>> {
    Ok(Schur::new(m)?.eigenvalues())
}

/// `M = V · diag(λ) · V⁻¹`.
#[derive(Clone, Debug)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<Complex64>,
    pub eigenvectors: SquareMatrix,
    pub inverse_eigenvectors: SquareMatrix,
    /// Frobenius condition number `‖V‖_F·‖V⁻¹‖_F` with unit-norm columns.
    pub condition_estimate: f64,
}

impl SpectralDecomposition {
    /// Decomposes `m`. Defective or nearly defective inputs yield an
    /// infinite or very large `condition_estimate` rather than an error.
    pub fn new(m: &SquareMatrix) -> Result<Self> {
        let schur = Schur::new(m)?;
        let n = m.order();
        let t = &schur.triangular;
        let lambdas = schur.eigenvalues();
        let small = f64::EPSILON * t.max_norm().max(f64::MIN_POSITIVE);
        let mut y = SquareMatrix::zeros(n);
        for k in 0..n {
            y[(k, k)] = Complex64::new(1.0, 0.0);
            for i in (0..k).rev() {
                let mut acc = Complex64::zero();
                for j in (i + 1)..=k {
                    acc += t[(i, j)] * y[(j, k)];
                }
                let mut denom = t[(i, i)] - lambdas[k];
                if denom.norm() < small {
                    denom = Complex64::new(small, 0.0);
                }
                y[(i, k)] = -acc / denom;
            }
        }
        let mut v = &schur.unitary * &y;
        for k in 0..n {
            let norm: f64 = (0..n).map(|i| v[(i, k)].norm_sqr()).sum::<f64>().sqrt();
            if norm > 0.0 && norm.is_finite() {
                for i in 0..n {
                    v[(i, k)] = v[(i, k)] / norm;
                }
            }
        }
        let (inverse, condition) = match v.inverse() {
            Ok(inv) if inv.is_finite() => {
                let c = v.frobenius_norm() * inv.frobenius_norm();
                (inv, if c.is_finite() { c } else { f64::INFINITY })
            }
            _ => (SquareMatrix::identity(n), f64::INFINITY),
        };
        Ok(SpectralDecomposition {
            eigenvalues: lambdas,
            eigenvectors: v,
            inverse_eigenvectors: inverse,
            condition_estimate: condition,
        })
    }

    pub fn order(&self) -> usize {
        self.eigenvalues.len()
    }

    /// `V · diag(f(λᵢ)) · V⁻¹`.
    pub fn apply<F>(&self, mut f: F) -> Result<SquareMatrix>
    where
        F: FnMut(Complex64) -> Result<Complex64>,
    {
        let n = self.order();
        let mut scaled = self.eigenvectors.clone();
        for k in 0..n {
            let fk = f(self.eigenvalues[k])?;
            for i in 0..n {
                scaled[(i, k)] *= fk;
            }
        }
        Ok(&scaled * &self.inverse_eigenvectors)
    }

    /// Errors unless the condition estimate is below `ceiling`.
    pub fn require_conditioned(&self, ceiling: f64) -> Result<()> {
        if self.condition_estimate <= ceiling {
            Ok(())
        } else {
            Err(Error::IllConditioned {
                condition: self.condition_estimate,
                ceiling,
            })
        }
    }

    pub fn reconstruct(&self) -> SquareMatrix {
        let d = SquareMatrix::from_diag(&self.eigenvalues);
        &(&self.eigenvectors * &d) * &self.inverse_eigenvectors
    }
}

/// Applies a scalar analytic function through the eigenbasis of `m`.
///
/// Rejects matrices whose eigenvector condition estimate exceeds `ceiling`;
/// callers fall back to basis-free paths (series, quadrature, exponential).
pub fn spectral_apply_with<F>(f: F, m: &SquareMatrix, ceiling: f64) -> Result<SquareMatrix>
where
    F: FnMut(Complex64) -> Result<Complex64>,
{
    let dec = SpectralDecomposition::new(m)?;
    dec.require_conditioned(ceiling)?;
    dec.apply(f)
}

/// [`spectral_apply_with`] at the default ceiling of `1e8`.
pub fn spectral_apply<F>(f: F, m: &SquareMatrix) -> Result<SquareMatrix>
where
    F: FnMut(Complex64) -> Result<Complex64>,
{
    spectral_apply_with(f, m, DEFAULT_CONDITION_CEILING)
}

/// True iff every eigenvalue has strictly positive real part.
pub fn is_positive_stable(m: &SquareMatrix) -> bool {
    match eigenvalues(m) {
        Ok(ev) => {
            let scale = m.max_norm().max(1.0);
            ev.iter().all(|l| l.re > f64::EPSILON * scale * 16.0)
        }
        Err(_) => false,
    }
}

/// Pairwise commutation test `‖MᵢMⱼ − MⱼMᵢ‖_F ≤ tol·‖Mᵢ‖_F·‖Mⱼ‖_F`.
pub fn check_commuting(family: &[&SquareMatrix], tol: f64) -> Result<bool> {
    if let Some(first) = family.first() {
        if family.iter().any(|m| m.order() != first.order()) {
            return Err(Error::validation("commutation check over matrices of mixed order"));
        }
    }
    for (i, a) in family.iter().enumerate() {
        for b in &family[i + 1..] {
            let bound = tol * a.frobenius_norm() * b.frobenius_norm();
            if a.commutator_norm(b) > bound {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Singular values in decreasing order, by one-sided Jacobi rotations.
pub fn singular_values(m: &SquareMatrix) -> Vec<f64> {
    let n = m.order();
    // columns of the working copy converge to U·Σ
    let mut a = m.clone();
    for _sweep in 0..60 {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let mut alpha = 0.0;
                let mut beta = 0.0;
                let mut gamma = Complex64::zero();
                for i in 0..n {
                    alpha += a[(i, p)].norm_sqr();
                    beta += a[(i, q)].norm_sqr();
                    gamma += a[(i, p)].conj() * a[(i, q)];
                }
                let g = gamma.norm();
                if g == 0.0 || g <= f64::EPSILON * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let phase = gamma / g;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let t = if zeta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for i in 0..n {
                    let x = a[(i, p)];
                    let y = a[(i, q)];
                    a[(i, p)] = x * c - y * phase.conj() * s;
                    a[(i, q)] = x * phase * s + y * c;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut sv: Vec<f64> = (0..n)
        .map(|j| (0..n).map(|i| a[(i, j)].norm_sqr()).sum::<f64>().sqrt())
        .collect();
    sv.sort_by(|x, y| y.partial_cmp(x).unwrap_or(core::cmp::Ordering::Equal));
    sv
}

pub fn min_singular_value(m: &SquareMatrix) -> f64 {
    singular_values(m).last().copied().unwrap_or(0.0)
}

/// True iff `σ_min(M + kI) > tol` for every `0 ≤ k ≤ k_max`.
pub fn is_shifted_invertible(m: &SquareMatrix, k_max: usize, tol: f64) -> bool {
    (0..=k_max).all(|k| min_singular_value(&m.shifted(k as f64)) > tol)
}

/// Like [`is_shifted_invertible`] but stepping downwards, `M − kI`.
pub fn is_down_shifted_invertible(m: &SquareMatrix, k_max: usize, tol: f64) -> bool {
    (0..=k_max).all(|k| min_singular_value(&m.shifted(-(k as f64))) > tol)
}

#[allow(dead_code)]
pub(crate) fn sorted_by_real(mut v: Vec<Complex64>) -> Vec<Complex64> {
    v.sort_by(|a, b| {
        a.re.partial_cmp(&b.re)
            .unwrap_or(core::cmp::Ordering::Equal)
            .then(a.im.partial_cmp(&b.im).unwrap_or(core::cmp::Ordering::Equal))
    });
    v
}

#[allow(dead_code)]
pub(crate) fn zero_vec(n: usize) -> Vec<Complex64> {
    vec![Complex64::zero(); n]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn similar(d: &[f64]) -> SquareMatrix {
        let p = SquareMatrix::new(
            d.len(),
            (0..d.len() * d.len())
                .map(|k| c(((k * 7 + 3) % 5) as f64 * 0.3 + if k % (d.len() + 1) == 0 { 2.0 } else { 0.0 }, (k % 3) as f64 * 0.1))
                .collect(),
        )
        .unwrap();
        let pinv = p.inverse().unwrap();
        &(&p * &SquareMatrix::from_real_diag(d)) * &pinv
    }

    #[test]
    fn eigenvalues_of_similar_matrix() {
        let m = similar(&[0.5, 1.5, 3.0, -2.0]);
        let ev = sorted_by_real(eigenvalues(&m).unwrap());
        let want = [-2.0, 0.5, 1.5, 3.0];
        for (l, w) in ev.iter().zip(want) {
            assert!((l - c(w, 0.0)).norm() < 1e-10, "{l} vs {w}");
        }
    }

    #[test]
    fn rotation_has_imaginary_pair() {
        let m = SquareMatrix::from_real(2, &[0.0, 1.0, -1.0, 0.0]).unwrap();
        let ev = eigenvalues(&m).unwrap();
        assert!(ev.iter().all(|l| l.re.abs() < 1e-14 && (l.im.abs() - 1.0).abs() < 1e-14));
        assert!(!is_positive_stable(&m));
    }

    #[test]
    fn decomposition_invariants() {
        let m = similar(&[1.0, 2.0, 2.5]);
        let dec = SpectralDecomposition::new(&m).unwrap();
        let vvinv = &dec.eigenvectors * &dec.inverse_eigenvectors;
        assert!((&vvinv - &SquareMatrix::identity(3)).max_norm() < 1e-10 * 3.0);
        assert!(dec.reconstruct().relative_distance(&m) < 1e-12 * dec.condition_estimate);
    }

    #[test]
    fn jordan_block_is_ill_conditioned() {
        let j = SquareMatrix::from_real(2, &[1.5, 1.0, 0.0, 1.5]).unwrap();
        let dec = SpectralDecomposition::new(&j).unwrap();
        assert!(dec.condition_estimate > DEFAULT_CONDITION_CEILING);
        let err = spectral_apply(|l| Ok(l), &j).unwrap_err();
        assert!(matches!(err, Error::IllConditioned { .. }));
    }

    #[test]
    fn repeated_eigenvalue_diagonalizable() {
        let m = similar(&[2.0, 2.0, 5.0]);
        let dec = SpectralDecomposition::new(&m).unwrap();
        assert!(dec.condition_estimate < 1e6, "{}", dec.condition_estimate);
        assert!(dec.reconstruct().relative_distance(&m) < 1e-9);
    }

    #[test]
    fn spectral_apply_examples() {
        let m = similar(&[0.3, 1.1]);
        let id = spectral_apply(|l| Ok(l), &m).unwrap();
        assert!(id.relative_distance(&m) < 1e-13);
        let d = SquareMatrix::from_real_diag(&[1.0, 2.0]);
        let e = spectral_apply(|l| Ok(l.exp()), &d).unwrap();
        assert!((e[(0, 0)] - c(core::f64::consts::E, 0.0)).norm() < 1e-14);
        assert!((e[(1, 1)] - c(core::f64::consts::E.powi(2), 0.0)).norm() < 1e-13);
    }

    #[test]
    fn positive_stability_examples() {
        assert!(is_positive_stable(&SquareMatrix::from_real_diag(&[1.0, 2.0])));
        assert!(!is_positive_stable(&SquareMatrix::from_real_diag(&[-1.0, 2.0])));
    }

    #[test]
    fn commuting_examples() {
        let a = SquareMatrix::from_real_diag(&[1.0, 2.0]);
        let b = SquareMatrix::from_real_diag(&[3.0, 4.0]);
        assert!(check_commuting(&[&a, &b], DEFAULT_COMMUTE_TOL).unwrap());
        let e12 = SquareMatrix::from_real(2, &[0.0, 1.0, 0.0, 0.0]).unwrap();
        let e21 = SquareMatrix::from_real(2, &[0.0, 0.0, 1.0, 0.0]).unwrap();
        assert!(!check_commuting(&[&e12, &e21], DEFAULT_COMMUTE_TOL).unwrap());
        let m = similar(&[0.7, 1.9]);
        let two_m = m.scale_real(2.0);
        let i = SquareMatrix::identity(2);
        assert!(check_commuting(&[&m, &i, &two_m], DEFAULT_COMMUTE_TOL).unwrap());
        let three = SquareMatrix::identity(3);
        assert!(check_commuting(&[&m, &three], 1e-10).is_err());
    }

    #[test]
    fn shifted_invertibility_examples() {
        assert!(is_shifted_invertible(&SquareMatrix::identity(2), 25, 1e-10));
        assert!(!is_shifted_invertible(&SquareMatrix::from_real_diag(&[-2.0, 1.0]), 3, 1e-10));
        assert!(is_shifted_invertible(&SquareMatrix::from_real_diag(&[0.5, 1.5]), 10, 1e-10));
    }

    #[test]
    fn singular_values_of_known_matrix() {
        // [[3, 0], [4, 5]] has singular values sqrt(45) and sqrt(5)
        let m = SquareMatrix::from_real(2, &[3.0, 0.0, 4.0, 5.0]).unwrap();
        let sv = singular_values(&m);
        assert!((sv[0] - 45f64.sqrt()).abs() < 1e-13);
        assert!((sv[1] - 5f64.sqrt()).abs() < 1e-13);
        let complex = SquareMatrix::new(2, vec![c(1.0, 1.0), c(0.0, 2.0), c(0.0, 0.0), c(1.0, -1.0)]).unwrap();
        let sv = singular_values(&complex);
        let prod = sv[0] * sv[1];
        let det = complex.lu().unwrap().determinant().norm();
        assert!((prod - det).abs() < 1e-13);
    }
}
