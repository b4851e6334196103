//! Independent scalar oracles shared by the integration tests.

#![allow(dead_code)]

use statrs::function::gamma::{gamma_lr, gamma_ur, ln_gamma};
use triplehyp::{Complex64, Family, SquareMatrix, Variant};

pub fn rel(a: &SquareMatrix, b: &SquareMatrix) -> f64 {
    (a - b).frobenius_norm() / a.frobenius_norm().max(b.frobenius_norm()).max(1.0)
}

pub fn real(v: f64) -> Complex64 {
    Complex64::new(v, 0.0)
}

pub const BRUTE_N: usize = 40;

pub fn ln_poch(a: f64, k: usize) -> f64 {
    ln_gamma(a + k as f64) - ln_gamma(a)
}

pub fn ln_fact(k: usize) -> f64 {
    ln_gamma(k as f64 + 1.0)
}

/// Numerator `N_k` for the scalar oracle, from statrs' regularized
/// incomplete gamma.
pub fn numerator(a: f64, x: f64, variant: Variant, k: usize) -> f64 {
    let poch = ln_poch(a, k).exp();
    let ak = a + k as f64;
    match variant {
        Variant::Complete => poch,
        Variant::Lower if x == 0.0 => 0.0,
        Variant::Upper if x == 0.0 => poch,
        Variant::Lower => gamma_lr(ak, x) * poch,
        Variant::Upper => gamma_ur(ak, x) * poch,
    }
}

pub struct Scalars {
    pub a: f64,
    pub b: f64,
    pub bp: f64,
    pub c: f64,
    pub cp: f64,
    pub cpp: f64,
}

pub fn brute_triple(family: Family, s: &Scalars, x: f64, variant: Variant, z: [Complex64; 3]) -> Complex64 {
    let n = BRUTE_N;
    let nums: Vec<f64> = (0..=2 * n).map(|k| numerator(s.a, x, variant, k)).collect();
    let pow = |w: Complex64| -> Vec<Complex64> {
        let mut v = vec![real(1.0)];
        for k in 1..=n {
            v.push(v[k - 1] * w);
        }
        v
    };
    let (p1, p2, p3) = (pow(z[0]), pow(z[1]), pow(z[2]));
    let table = |a: f64| -> Vec<f64> { (0..=3 * n).map(|k| ln_poch(a, k)).collect() };
    let (lb, lbp, lc, lcp, lcpp) = (table(s.b), table(s.bp), table(s.c), table(s.cp), table(s.cpp));
    let lf: Vec<f64> = (0..=n).map(ln_fact).collect();
    let mut sum = Complex64::new(0.0, 0.0);
    for m in 0..=n {
        for nn in 0..=n {
            for p in 0..=n {
                let mut lw = lb[m + nn] + lbp[nn + p] - lf[m] - lf[nn] - lf[p];
                lw -= match family {
                    Family::HA => lc[m] + lcp[nn + p],
                    Family::HB => lc[m] + lcp[nn] + lcpp[p],
                    Family::HC => lc[m + nn + p],
                };
                sum += p1[m] * p2[nn] * p3[p] * (nums[m + p] * lw.exp());
            }
        }
    }
    sum
}
