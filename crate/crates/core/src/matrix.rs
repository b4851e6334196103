//! Dense complex square matrices.
//!
//! Every parameter and value in the crate is a [`SquareMatrix`]: a row-major
//! `r × r` block of `Complex64`. Orders are tiny (the parameter families are
//! typically 1×1 to 4×4), so the routines here favour clarity over blocking.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub, SubAssign};

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;
use num_traits::Zero;

use crate::error::{Error, Result};

/// Dense complex `r × r` matrix stored row-major.
#[derive(Clone, PartialEq)]
pub struct SquareMatrix {
    order: usize,
    data: Vec<Complex64>,
}

impl SquareMatrix {
    /// Builds a matrix from row-major entries, rejecting non-finite values.
    pub fn new(order: usize, entries: Vec<Complex64>) -> Result<Self> {
        if order == 0 {
            return Err(Error::validation("matrix order must be at least 1"));
        }
        if entries.len() != order * order {
            return Err(Error::validation(format!(
                "expected {} entries for order {}, got {}",
                order * order,
                order,
                entries.len()
            )));
        }
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::validation("matrix entries must be finite"));
        }
        Ok(SquareMatrix {
            order,
            data: entries,
        })
    }

    /// Real row-major entries.
    pub fn from_real(order: usize, entries: &[f64]) -> Result<Self> {
        Self::new(
            order,
            entries.iter().map(|&v| Complex64::new(v, 0.0)).collect(),
        )
    }

    /// Separate real and imaginary planes, the layout used by the JSON schema.
    pub fn from_parts(order: usize, re: &[f64], im: &[f64]) -> Result<Self> {
        if re.len() != im.len() {
            return Err(Error::validation("real and imaginary parts differ in length"));
        }
        Self::new(
            order,
            re.iter()
                .zip(im)
                .map(|(&a, &b)| Complex64::new(a, b))
                .collect(),
        )
    }

    pub fn zeros(order: usize) -> Self {
        assert!(order > 0, "matrix order must be at least 1");
        SquareMatrix {
            order,
            data: vec![Complex64::zero(); order * order],
        }
    }

    pub fn identity(order: usize) -> Self {
        Self::scalar(order, Complex64::new(1.0, 0.0))
    }

    /// `value · I`.
    pub fn scalar(order: usize, value: Complex64) -> Self {
        let mut m = Self::zeros(order);
        for i in 0..order {
            m[(i, i)] = value;
        }
        m
    }

    pub fn from_diag(diag: &[Complex64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    pub fn from_real_diag(diag: &[f64]) -> Self {
        let d: Vec<Complex64> = diag.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        Self::from_diag(&d)
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.order
    }

    #[inline]
    pub fn entries(&self) -> &[Complex64] {
        &self.data
    }

    pub fn diagonal(&self) -> Vec<Complex64> {
        (0..self.order).map(|i| self[(i, i)]).collect()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Maximum absolute column sum.
    pub fn one_norm(&self) -> f64 {
        (0..self.order)
            .map(|j| (0..self.order).map(|i| self[(i, j)].norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.order).map(|i| self[(i, i)]).sum()
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let n = self.order;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        SquareMatrix {
            order: self.order,
            data: self.data.iter().map(|&z| z * factor).collect(),
        }
    }

    pub fn scale_real(&self, factor: f64) -> Self {
        SquareMatrix {
            order: self.order,
            data: self.data.iter().map(|&z| z * factor).collect(),
        }
    }

    /// `self + shift · I`.
    pub fn shifted(&self, shift: f64) -> Self {
        self.shifted_complex(Complex64::new(shift, 0.0))
    }

    pub fn shifted_complex(&self, shift: Complex64) -> Self {
        let mut out = self.clone();
        for i in 0..self.order {
            out[(i, i)] += shift;
        }
        out
    }

    /// `self += factor · other`, the accumulation used by every series loop.
    pub fn add_scaled(&mut self, other: &SquareMatrix, factor: Complex64) {
        debug_assert_eq!(self.order, other.order);
        for (a, &b) in self.data.iter_mut().zip(&other.data) {
            *a += b * factor;
        }
    }

    /// Writes `self · rhs` into `out` without allocating.
    pub fn mul_into(&self, rhs: &SquareMatrix, out: &mut SquareMatrix) {
        let n = self.order;
        debug_assert_eq!(n, rhs.order);
        debug_assert_eq!(n, out.order);
        for i in 0..n {
            for j in 0..n {
                let mut acc = Complex64::zero();
                for k in 0..n {
                    acc += self.data[i * n + k] * rhs.data[k * n + j];
                }
                out.data[i * n + j] = acc;
            }
        }
    }

    /// `‖self·other − other·self‖_F`.
    pub fn commutator_norm(&self, other: &SquareMatrix) -> f64 {
        (self * other - other * self).frobenius_norm()
    }

    pub fn lu(&self) -> Result<Lu> {
        Lu::new(self)
    }

    pub fn inverse(&self) -> Result<SquareMatrix> {
        Ok(self.lu()?.inverse())
    }

    /// `self⁻¹ · rhs`.
    pub fn solve(&self, rhs: &SquareMatrix) -> Result<SquareMatrix> {
        Ok(self.lu()?.solve(rhs))
    }

    /// Integer power by repeated squaring.
    pub fn powi(&self, mut exp: u32) -> SquareMatrix {
        let mut base = self.clone();
        let mut acc = SquareMatrix::identity(self.order);
        while exp > 0 {
            if exp & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            exp >>= 1;
        }
        acc
    }

    /// Relative distance `‖self − other‖_F / max(‖self‖_F, ‖other‖_F, 1)`.
    pub fn relative_distance(&self, other: &SquareMatrix) -> f64 {
        let scale = self
            .frobenius_norm()
            .max(other.frobenius_norm())
            .max(1.0);
        (self - other).frobenius_norm() / scale
    }
}

impl Index<(usize, usize)> for SquareMatrix {
    type Output = Complex64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.order + j]
    }
}

impl IndexMut<(usize, usize)> for SquareMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.order + j]
    }
}

impl fmt::Debug for SquareMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SquareMatrix[")?;
        for i in 0..self.order {
            if i > 0 {
                write!(f, "; ")?;
            }
            for j in 0..self.order {
                if j > 0 {
                    write!(f, ", ")?;
                }
                let z = self[(i, j)];
                write!(f, "{:.6e}{:+.6e}i", z.re, z.im)?;
            }
        }
        write!(f, "]")
    }
}

impl<'a> Add<&'a SquareMatrix> for &'a SquareMatrix {
    type Output = SquareMatrix;
    fn add(self, rhs: &'a SquareMatrix) -> SquareMatrix {
        assert_eq!(self.order, rhs.order, "order mismatch in matrix addition");
        SquareMatrix {
            order: self.order,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Add for SquareMatrix {
    type Output = SquareMatrix;
    fn add(self, rhs: SquareMatrix) -> SquareMatrix {
        &self + &rhs
    }
}

impl<'a> Sub<&'a SquareMatrix> for &'a SquareMatrix {
    type Output = SquareMatrix;
    fn sub(self, rhs: &'a SquareMatrix) -> SquareMatrix {
        assert_eq!(self.order, rhs.order, "order mismatch in matrix subtraction");
        SquareMatrix {
            order: self.order,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Sub for SquareMatrix {
    type Output = SquareMatrix;
    fn sub(self, rhs: SquareMatrix) -> SquareMatrix {
        &self - &rhs
    }
}

impl<'a> Mul<&'a SquareMatrix> for &'a SquareMatrix {
    type Output = SquareMatrix;
    fn mul(self, rhs: &'a SquareMatrix) -> SquareMatrix {
        assert_eq!(self.order, rhs.order, "order mismatch in matrix product");
        let mut out = SquareMatrix::zeros(self.order);
        self.mul_into(rhs, &mut out);
        out
    }
}

impl Mul for SquareMatrix {
    type Output = SquareMatrix;
    fn mul(self, rhs: SquareMatrix) -> SquareMatrix {
        &self * &rhs
    }
}

impl Mul<Complex64> for &SquareMatrix {
    type Output = SquareMatrix;
    fn mul(self, rhs: Complex64) -> SquareMatrix {
        self.scale(rhs)
    }
}

impl Neg for &SquareMatrix {
    type Output = SquareMatrix;
    fn neg(self) -> SquareMatrix {
        SquareMatrix {
            order: self.order,
            data: self.data.iter().map(|z| -z).collect(),
        }
    }
}

impl AddAssign<&SquareMatrix> for SquareMatrix {
    fn add_assign(&mut self, rhs: &SquareMatrix) {
        assert_eq!(self.order, rhs.order, "order mismatch in matrix addition");
        for (a, b) in self.data.iter_mut().zip(&rhs.data) {
            *a += b;
        }
    }
}

impl SubAssign<&SquareMatrix> for SquareMatrix {
    fn sub_assign(&mut self, rhs: &SquareMatrix) {
        assert_eq!(self.order, rhs.order, "order mismatch in matrix subtraction");
        for (a, b) in self.data.iter_mut().zip(&rhs.data) {
            *a -= b;
        }
    }
}

/// Inverses whose 1-norm condition number exceeds this are reported singular.
pub const MAX_INVERSE_CONDITION: f64 = 1e12;

/// LU factorization with partial pivoting, `P·M = L·U`.
#[derive(Clone, Debug)]
pub struct Lu {
    factors: SquareMatrix,
    perm: Vec<usize>,
    norm_one: f64,
}

impl Lu {
    pub fn new(m: &SquareMatrix) -> Result<Self> {
        let n = m.order();
        let mut a = m.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let scale = m.max_norm();
        if scale == 0.0 {
            return Err(Error::singular("zero matrix"));
        }
        for k in 0..n {
            let (p, pivot_abs) = (k..n)
                .map(|i| (i, a[(i, k)].norm()))
                .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            if pivot_abs <= scale * f64::EPSILON * 1e-3 {
                return Err(Error::singular(format!("zero pivot in column {k}")));
            }
            if p != k {
                for j in 0..n {
                    let tmp = a[(k, j)];
                    a[(k, j)] = a[(p, j)];
                    a[(p, j)] = tmp;
                }
                perm.swap(k, p);
            }
            let pivot = a[(k, k)];
            for i in (k + 1)..n {
                let factor = a[(i, k)] / pivot;
                a[(i, k)] = factor;
                for j in (k + 1)..n {
                    let u = a[(k, j)];
                    a[(i, j)] -= factor * u;
                }
            }
        }
        Ok(Lu {
            factors: a,
            perm,
            norm_one: m.one_norm(),
        })
    }

    fn solve_vec(&self, b: &mut [Complex64]) {
        let n = self.factors.order();
        let permuted: Vec<Complex64> = self.perm.iter().map(|&p| b[p]).collect();
        b.copy_from_slice(&permuted);
        for i in 0..n {
            let mut acc = b[i];
            for k in 0..i {
                acc -= self.factors[(i, k)] * b[k];
            }
            b[i] = acc;
        }
        for i in (0..n).rev() {
            let mut acc = b[i];
            for k in (i + 1)..n {
                acc -= self.factors[(i, k)] * b[k];
            }
            b[i] = acc / self.factors[(i, i)];
        }
    }

    /// `M⁻¹ · rhs`.
    pub fn solve(&self, rhs: &SquareMatrix) -> SquareMatrix {
        let n = self.factors.order();
        let mut out = SquareMatrix::zeros(n);
        let mut col = vec![Complex64::zero(); n];
        for j in 0..n {
            for i in 0..n {
                col[i] = rhs[(i, j)];
            }
            self.solve_vec(&mut col);
            for i in 0..n {
                out[(i, j)] = col[i];
            }
        }
        out
    }

    pub fn inverse(&self) -> SquareMatrix {
        self.solve(&SquareMatrix::identity(self.factors.order()))
    }

    /// `‖M‖₁ · ‖M⁻¹‖₁`, computed from the explicit inverse.
    pub fn condition_one(&self) -> f64 {
        self.norm_one * self.inverse().one_norm()
    }

    pub fn determinant(&self) -> Complex64 {
        let n = self.factors.order();
        let mut det = Complex64::new(1.0, 0.0);
        for i in 0..n {
            det *= self.factors[(i, i)];
        }
        // parity of the permutation
        let mut seen = vec![false; n];
        let mut swaps = 0;
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut len = 0;
            let mut j = start;
            while !seen[j] {
                seen[j] = true;
                j = self.perm[j];
                len += 1;
            }
            swaps += len - 1;
        }
        if swaps % 2 == 1 {
            -det
        } else {
            det
        }
    }
}

/// Inverts `m`, rejecting it when the 1-norm condition exceeds
/// [`MAX_INVERSE_CONDITION`].
pub fn checked_inverse(m: &SquareMatrix, what: &str) -> Result<SquareMatrix> {
    let lu = Lu::new(m).map_err(|e| match e {
        Error::Singular(msg) => Error::singular(format!("{what}: {msg}")),
        other => other,
    })?;
    let inv = lu.inverse();
    let cond = m.one_norm() * inv.one_norm();
    if !cond.is_finite() || cond > MAX_INVERSE_CONDITION {
        return Err(Error::singular(format!(
            "{what}: condition number {cond:e} exceeds {MAX_INVERSE_CONDITION:e}"
        )));
    }
    Ok(inv)
}
