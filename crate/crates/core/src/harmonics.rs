//! Spherical harmonics and their product couplings.
//!
//! Harmonics are complex, orthonormal on the unit sphere, and carry the
//! Condon-Shortley phase. Wigner 3j symbols are evaluated exactly with the
//! Racah sum over big-integer factorials; only the final signed square root
//! is rounded to `f64`, so couplings that vanish by parity are exactly zero.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{OnceLock, RwLock};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Degree and order `(ℓ, m)` of a spherical harmonic.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct HarmonicIndex {
    pub ell: i32,
    pub m: i32,
}

impl HarmonicIndex {
    pub fn new(ell: i32, m: i32) -> Result<Self> {
        if ell < 0 || m.abs() > ell {
            return Err(Error::InvalidHarmonic { l: ell, m });
        }
        Ok(HarmonicIndex { ell, m })
    }

    /// The constant harmonic `Y_00`.
    pub const fn constant() -> Self {
        HarmonicIndex { ell: 0, m: 0 }
    }

    pub fn is_valid(&self) -> bool {
        self.ell >= 0 && self.m.abs() <= self.ell
    }
}

/// `Y_x · Y_y = Σ coeff · Y_{ell_out, m}` with `m = x.m + y.m`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProductExpansion {
    pub m: i32,
    pub terms: Vec<(i32, f64)>,
}

/// A real number stored as `sign · √square` with `square` exact.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignedSqrt {
    pub sign: i8,
    pub square: BigRational,
}

impl SignedSqrt {
    pub fn zero() -> Self {
        SignedSqrt {
            sign: 0,
            square: BigRational::zero(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.sign == 0
    }

    pub fn to_f64(&self) -> f64 {
        if self.sign == 0 {
            return 0.0;
        }
        let sq = self.square.to_f64().expect("finite rational");
        f64::from(self.sign) * sq.sqrt()
    }

    fn mul(&self, other: &SignedSqrt) -> SignedSqrt {
        if self.is_zero() || other.is_zero() {
            return SignedSqrt::zero();
        }
        SignedSqrt {
            sign: self.sign * other.sign,
            square: &self.square * &other.square,
        }
    }
}

fn factorial(n: i64) -> BigInt {
    debug_assert!(n >= 0);
    (2..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

/// Exact 3j symbol from doubled arguments `2j` and `2m`.
///
/// Returns zero outside the physical domain: triangle violations, `|m| > j`,
/// mismatched integer/half-integer parity, or `m1 + m2 + m3 ≠ 0`.
pub fn wigner3j_exact(two_j: [i32; 3], two_m: [i32; 3]) -> SignedSqrt {
    let [j1, j2, j3] = two_j;
    let [m1, m2, m3] = two_m;
    if j1 < 0 || j2 < 0 || j3 < 0 {
        return SignedSqrt::zero();
    }
    if m1 + m2 + m3 != 0 {
        return SignedSqrt::zero();
    }
    for (j, m) in two_j.iter().zip(two_m.iter()) {
        if m.abs() > *j || (j + m) % 2 != 0 {
            return SignedSqrt::zero();
        }
    }
    if (j1 + j2 + j3) % 2 != 0 || j3 > j1 + j2 || j3 < (j1 - j2).abs() {
        return SignedSqrt::zero();
    }

    // Undoubled integer combinations.
    let h = |x: i32| -> i64 { i64::from(x / 2) };
    let a = h(j1 + j2 - j3);
    let b = h(j1 - j2 + j3);
    let c = h(-j1 + j2 + j3);
    let total = h(j1 + j2 + j3);
    let (j1pm, j1mm) = (h(j1 + m1), h(j1 - m1));
    let (j2pm, j2mm) = (h(j2 + m2), h(j2 - m2));
    let (j3pm, j3mm) = (h(j3 + m3), h(j3 - m3));

    let t1 = h(j3 - j2 + m1);
    let t2 = h(j3 - j1 - m2);
    let kmin = 0.max(-t1).max(-t2);
    let kmax = a.min(j1mm).min(j2pm);

    let mut sum = BigRational::zero();
    for k in kmin..=kmax {
        let denom = factorial(k)
            * factorial(t1 + k)
            * factorial(t2 + k)
            * factorial(a - k)
            * factorial(j1mm - k)
            * factorial(j2pm - k);
        let term = BigRational::new(BigInt::one(), denom);
        if k % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    if sum.is_zero() {
        return SignedSqrt::zero();
    }

    let delta = BigRational::new(
        factorial(a) * factorial(b) * factorial(c),
        factorial(total + 1),
    );
    let prod = factorial(j1pm)
        * factorial(j1mm)
        * factorial(j2pm)
        * factorial(j2mm)
        * factorial(j3pm)
        * factorial(j3mm);
    let square = delta * BigRational::from_integer(prod) * (&sum * &sum);

    // phase (-1)^{j1 - j2 - m3}
    let phase_exp = (j1 - j2 - m3) / 2;
    let phase: i8 = if phase_exp.rem_euclid(2) == 0 { 1 } else { -1 };
    let sign = if sum.is_negative() { -phase } else { phase };
    SignedSqrt { sign, square }
}

/// 3j symbol `(j1 j2 j3; m1 m2 m3)` for doubled arguments, rounded to `f64`.
pub fn wigner3j(two_j: [i32; 3], two_m: [i32; 3]) -> f64 {
    wigner3j_exact(two_j, two_m).to_f64()
}

/// 3j symbol for integer arguments.
pub fn wigner3j_int(j: [i32; 3], m: [i32; 3]) -> f64 {
    wigner3j(j.map(|x| 2 * x), m.map(|x| 2 * x))
}

/// Uncached Gaunt expansion coefficient: the coefficient of
/// `Y_{l3, m1+m2}` in the product `Y_{l1,m1} Y_{l2,m2}`.
pub fn gaunt_uncached(l1: i32, m1: i32, l2: i32, m2: i32, l3: i32) -> f64 {
    let mo = m1 + m2;
    if l1 < 0 || l2 < 0 || l3 < 0 || m1.abs() > l1 || m2.abs() > l2 || mo.abs() > l3 {
        return 0.0;
    }
    let parity = wigner3j_exact([2 * l1, 2 * l2, 2 * l3], [0, 0, 0]);
    if parity.is_zero() {
        return 0.0;
    }
    let orders = wigner3j_exact([2 * l1, 2 * l2, 2 * l3], [2 * m1, 2 * m2, -2 * mo]);
    let prod = parity.mul(&orders);
    if prod.is_zero() {
        return 0.0;
    }
    let dims = BigInt::from((2 * l1 + 1) * (2 * l2 + 1) * (2 * l3 + 1));
    let scaled = SignedSqrt {
        sign: prod.sign,
        square: prod.square * BigRational::from_integer(dims),
    };
    // conj(Y_{l,M}) = (-1)^M Y_{l,-M}
    let phase = if mo.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    phase * scaled.to_f64() / (4.0 * PI).sqrt()
}

type GauntKey = (i32, i32, i32, i32, i32);

/// Thread-safe memo table for Gaunt coefficients.
#[derive(Default)]
pub struct GauntCache {
    table: RwLock<HashMap<GauntKey, f64>>,
}

impl GauntCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, l1: i32, m1: i32, l2: i32, m2: i32, l3: i32) -> f64 {
        let key = (l1, m1, l2, m2, l3);
        if let Some(&v) = self.table.read().expect("gaunt cache poisoned").get(&key) {
            return v;
        }
        let v = gaunt_uncached(l1, m1, l2, m2, l3);
        self.table
            .write()
            .expect("gaunt cache poisoned")
            .insert(key, v);
        v
    }

    pub fn len(&self) -> usize {
        self.table.read().expect("gaunt cache poisoned").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

fn global_cache() -> &'static GauntCache {
    static CACHE: OnceLock<GauntCache> = OnceLock::new();
    CACHE.get_or_init(GauntCache::new)
}

/// Gaunt coefficient `C^{l3}_{l1,l2}` for output order `m1 + m2`, through
/// the process-wide cache.
pub fn gaunt(l1: i32, m1: i32, l2: i32, m2: i32, l3: i32) -> f64 {
    global_cache().get(l1, m1, l2, m2, l3)
}

/// All nonzero couplings of `Y_x · Y_y`.
pub fn expand_product(x: HarmonicIndex, y: HarmonicIndex) -> ProductExpansion {
    let m = x.m + y.m;
    let lo = (x.ell - y.ell).abs().max(m.abs());
    let hi = x.ell + y.ell;
    let terms = (lo..=hi)
        .filter(|l3| (x.ell + y.ell + l3) % 2 == 0)
        .filter_map(|l3| {
            let g = gaunt(x.ell, x.m, y.ell, y.m, l3);
            (g != 0.0).then_some((l3, g))
        })
        .collect();
    ProductExpansion { m, terms }
}

/// Orthonormal spherical harmonic `Y_{ℓm}(θ, φ)` with Condon-Shortley phase.
pub fn spherical_harmonic(h: HarmonicIndex, theta: f64, phi: f64) -> Complex64 {
    let ma = h.m.unsigned_abs() as i32;
    let p = normalized_legendre(h.ell, ma, theta.cos(), theta.sin());
    let y = Complex64::from_polar(p, f64::from(ma) * phi);
    if h.m >= 0 {
        y
    } else if ma % 2 == 0 {
        y.conj()
    } else {
        -y.conj()
    }
}

/// `√((2ℓ+1)/4π · (ℓ-m)!/(ℓ+m)!) P_ℓ^m(x)` including the `(-1)^m` phase,
/// for `m ≥ 0`, by the normalized three-term recurrence.
fn normalized_legendre(ell: i32, m: i32, x: f64, sin_theta: f64) -> f64 {
    if m > ell {
        return 0.0;
    }
    let mut pmm = (1.0 / (4.0 * PI)).sqrt();
    for i in 1..=m {
        let fi = f64::from(i);
        pmm *= -((2.0 * fi + 1.0) / (2.0 * fi)).sqrt() * sin_theta;
    }
    if ell == m {
        return pmm;
    }
    let fm = f64::from(m);
    let mut prev = pmm;
    let mut cur = x * (2.0 * fm + 3.0).sqrt() * pmm;
    for l in (m + 2)..=ell {
        let fl = f64::from(l);
        let a = ((4.0 * fl * fl - 1.0) / (fl * fl - fm * fm)).sqrt();
        let fl1 = fl - 1.0;
        let b = ((fl1 * fl1 - fm * fm) / (4.0 * fl1 * fl1 - 1.0)).sqrt();
        let next = a * (x * cur - b * prev);
        prev = cur;
        cur = next;
    }
    cur
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let nf = n as f64;
    (0..n)
        .map(|i| {
            let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 1.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let kf = k as f64;
                    let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                    p0 = p1;
                    p1 = p2;
                }
                dp = nf * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            (x, 2.0 / ((1.0 - x * x) * dp * dp))
        })
        .collect()
}

/// `∫ Y_{l1 m1} Y_{l2 m2} conj(Y_{l3, m1+m2}) dΩ` by product quadrature,
/// exact for the degrees involved. Independent of the 3j route.
pub fn gaunt_by_quadrature(l1: i32, m1: i32, l2: i32, m2: i32, l3: i32) -> f64 {
    let m3 = m1 + m2;
    let (Ok(h1), Ok(h2), Ok(h3)) = (
        HarmonicIndex::new(l1, m1),
        HarmonicIndex::new(l2, m2),
        HarmonicIndex::new(l3, m3),
    ) else {
        return 0.0;
    };
    let deg = (l1 + l2 + l3) as usize;
    let nodes = gauss_legendre(deg / 2 + 2);
    let nphi = 2 * deg + 4;
    let dphi = 2.0 * PI / nphi as f64;
    let mut acc = Complex64::new(0.0, 0.0);
    for &(x, w) in &nodes {
        let theta = x.acos();
        for k in 0..nphi {
            let phi = k as f64 * dphi;
            acc += w
                * dphi
                * spherical_harmonic(h1, theta, phi)
                * spherical_harmonic(h2, theta, phi)
                * spherical_harmonic(h3, theta, phi).conj();
        }
    }
    acc.re
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_j_small_cases() {
        assert!((wigner3j_int([1, 1, 0], [0, 0, 0]) + 1.0 / 3f64.sqrt()).abs() < 1e-15);
        assert!(wigner3j_exact([2, 2, 2], [0, 0, 0]).is_zero());
        // frozen from an independent exact evaluation: √70/70
        assert!((wigner3j_int([2, 2, 2], [1, -1, 0]) - 70f64.sqrt() / 70.0).abs() < 1e-15);
        assert!((wigner3j_int([3, 2, 4], [1, -2, 1]) - 0.178_174_161_274_949_6).abs() < 1e-15);
        // half-integer: (1/2 1/2 1; 1/2 -1/2 0) = 1/√6
        assert!((wigner3j([1, 1, 2], [1, -1, 0]) - 1.0 / 6f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn three_j_out_of_domain_is_zero() {
        assert_eq!(wigner3j_int([1, 1, 3], [0, 0, 0]), 0.0);
        assert_eq!(wigner3j_int([1, 1, 1], [1, 1, 0]), 0.0);
        assert_eq!(wigner3j_int([1, 1, 1], [2, -2, 0]), 0.0);
        assert_eq!(wigner3j([1, 2, 2], [1, 0, -1]), 0.0);
    }

    #[test]
    fn gaunt_named_cases() {
        let inv = 1.0 / (4.0 * PI).sqrt();
        for (l2, m2) in [(0, 0), (1, -1), (3, 2), (5, -4)] {
            assert!((gaunt(0, 0, l2, m2, l2) - inv).abs() < 1e-15);
        }
        assert!((gaunt(1, 0, 1, 0, 0) - inv).abs() < 1e-15);
        assert_eq!(gaunt(1, 1, 1, 1, 1), 0.0);
        // frozen from an exact Gaunt integral evaluation
        assert!((gaunt(2, 1, 1, -1, 1) + 0.218_509_686_118_415_8).abs() < 1e-15);
        assert!((gaunt(2, 1, 1, -1, 3) - 0.143_048_168_102_668_8).abs() < 1e-15);
        assert!((gaunt(1, 0, 1, 0, 2) - 0.252_313_252_202_016).abs() < 1e-15);
    }

    #[test]
    fn expansion_selection_rules() {
        let e = expand_product(HarmonicIndex::constant(), HarmonicIndex::new(3, 2).unwrap());
        assert_eq!(e.m, 2);
        assert_eq!(e.terms.len(), 1);
        assert_eq!(e.terms[0].0, 3);
        assert!((e.terms[0].1 - 1.0 / (4.0 * PI).sqrt()).abs() < 1e-15);

        let y10 = HarmonicIndex::new(1, 0).unwrap();
        let e = expand_product(y10, y10);
        let ls: Vec<_> = e.terms.iter().map(|t| t.0).collect();
        assert_eq!(ls, vec![0, 2]);
    }

    #[test]
    fn low_degree_harmonics_match_closed_forms() {
        let (t, p) = (0.7, 1.3);
        let y = |l, m| spherical_harmonic(HarmonicIndex::new(l, m).unwrap(), t, p);
        let e = |m: f64| Complex64::from_polar(1.0, m * p);
        let close = |a: Complex64, b: Complex64| (a - b).norm() < 1e-14;
        assert!(close(y(0, 0), Complex64::from(0.5 / PI.sqrt())));
        assert!(close(y(1, 0), Complex64::from((3.0 / (4.0 * PI)).sqrt() * t.cos())));
        assert!(close(y(1, 1), -e(1.0) * (3.0 / (8.0 * PI)).sqrt() * t.sin()));
        assert!(close(y(1, -1), e(-1.0) * (3.0 / (8.0 * PI)).sqrt() * t.sin()));
        assert!(close(
            y(2, 1),
            -e(1.0) * (15.0 / (8.0 * PI)).sqrt() * t.sin() * t.cos()
        ));
        assert!(close(
            y(2, -2),
            e(-2.0) * 0.25 * (15.0 / (2.0 * PI)).sqrt() * t.sin().powi(2)
        ));
    }

    #[test]
    fn invalid_harmonic_index_rejected() {
        assert!(HarmonicIndex::new(1, 2).is_err());
        assert!(HarmonicIndex::new(-1, 0).is_err());
    }

    #[test]
    fn quadrature_oracle_agrees() {
        let total: f64 = gauss_legendre(7).iter().map(|n| n.1).sum();
        assert!((total - 2.0).abs() < 1e-14);
        for (l1, m1, l2, m2, l3) in [(2, 1, 1, -1, 1), (2, 1, 1, -1, 3), (1, 0, 1, 0, 2), (3, -2, 2, 1, 3)] {
            let q = gaunt_by_quadrature(l1, m1, l2, m2, l3);
            assert!((q - gaunt(l1, m1, l2, m2, l3)).abs() < 1e-13, "{l1}{m1}{l2}{m2}{l3}: {q}");
        }
    }

    #[test]
    fn cache_is_consistent() {
        let cache = GauntCache::new();
        let a = cache.get(3, 1, 2, -2, 3);
        assert_eq!(cache.len(), 1);
        assert_eq!(a, cache.get(3, 1, 2, -2, 3));
        assert_eq!(a, gaunt_uncached(3, 1, 2, -2, 3));
    }
}
