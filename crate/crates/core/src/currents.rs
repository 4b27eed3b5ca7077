//! The graded current algebra `map(ℝ³, ġ)` in the basis
//! `J^a_{n,ℓ,m} = r^n Y_{ℓm} J^a`.
//!
//! Brackets multiply radial powers and couple harmonics through Gaunt
//! coefficients. Elements are sparse complex combinations of basis labels;
//! coefficients below [`PRUNE_TOL`] are dropped so that equality is
//! canonical.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::FiniteLieAlgebra;
use crate::error::{Error, Result};
use crate::harmonics::{expand_product, spherical_harmonic, HarmonicIndex};

pub const PRUNE_TOL: f64 = 1e-14;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Label `(a, n, ℓ, m)` of the basis element `r^n Y_{ℓm} J^a`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BasisLabel {
    pub gen: usize,
    pub n: i32,
    pub harm: HarmonicIndex,
}

impl BasisLabel {
    pub fn new(gen: usize, n: i32, ell: i32, m: i32) -> Result<Self> {
        Ok(BasisLabel {
            gen,
            n,
            harm: HarmonicIndex::new(ell, m)?,
        })
    }

    pub fn validate(&self, alg: &FiniteLieAlgebra) -> Result<()> {
        alg.check_generator(self.gen)?;
        if !self.harm.is_valid() {
            return Err(Error::InvalidHarmonic {
                l: self.harm.ell,
                m: self.harm.m,
            });
        }
        Ok(())
    }
}

/// Growth class of a gauge transformation at spatial infinity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum GaugeClass {
    Local,
    Global,
    Divergent,
}

/// Filtration degree; `None` is the −∞ of the zero element.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FiltrationDegree(pub Option<i32>);

impl FiltrationDegree {
    pub const NEG_INFINITY: FiltrationDegree = FiltrationDegree(None);

    pub fn finite(n: i32) -> Self {
        FiltrationDegree(Some(n))
    }

    pub fn is_neg_infinity(&self) -> bool {
        self.0.is_none()
    }

    pub fn class(&self) -> GaugeClass {
        match self.0 {
            None => GaugeClass::Local,
            Some(n) => match n.cmp(&0) {
                Ordering::Less => GaugeClass::Local,
                Ordering::Equal => GaugeClass::Global,
                Ordering::Greater => GaugeClass::Divergent,
            },
        }
    }

    /// Degree bound for a bracket: `m + n`, absorbing −∞.
    pub fn plus(self, other: FiltrationDegree) -> FiltrationDegree {
        match (self.0, other.0) {
            (Some(a), Some(b)) => FiltrationDegree(Some(a + b)),
            _ => FiltrationDegree(None),
        }
    }
}

impl fmt::Display for FiltrationDegree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            Some(n) => write!(f, "{n}"),
            None => f.write_str("-inf"),
        }
    }
}

/// Sparse complex linear combination of basis labels.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct CurrentElement {
    terms: BTreeMap<BasisLabel, Complex64>,
}

impl CurrentElement {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn basis(label: BasisLabel) -> Self {
        Self::single(label, Complex64::new(1.0, 0.0))
    }

    pub fn single(label: BasisLabel, coeff: Complex64) -> Self {
        let mut e = Self::zero();
        e.add_term(label, coeff);
        e
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (BasisLabel, Complex64)>) -> Self {
        let mut e = Self::zero();
        for (l, c) in terms {
            e.add_term(l, c);
        }
        e
    }

    pub fn add_term(&mut self, label: BasisLabel, coeff: Complex64) {
        let slot = self.terms.entry(label).or_insert(Complex64::new(0.0, 0.0));
        *slot += coeff;
        if slot.norm() < PRUNE_TOL {
            self.terms.remove(&label);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, label: &BasisLabel) -> Complex64 {
        self.terms.get(label).copied().unwrap_or_default()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&BasisLabel, &Complex64)> {
        self.terms.iter()
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self::from_terms(self.terms.iter().map(|(l, c)| (*l, c * s)))
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (l, c) in &other.terms {
            out.add_term(*l, *c);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    /// Largest coefficient modulus, 0 for the zero element.
    pub fn max_abs(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Maximum radial power present (−∞ for zero).
    pub fn filtration_degree(&self) -> FiltrationDegree {
        FiltrationDegree(self.terms.keys().map(|l| l.n).max())
    }

    /// Degree `n` when every stored label has the same radial power.
    pub fn homogeneous_degree(&self) -> Option<i32> {
        let mut it = self.terms.keys().map(|l| l.n);
        let first = it.next()?;
        it.all(|n| n == first).then_some(first)
    }

    /// Random sparse element with `1..=max_terms` terms, radial powers in
    /// `n_range` and harmonic degrees up to `ell_max`.
    pub fn random<R: Rng>(
        rng: &mut R,
        alg: &FiniteLieAlgebra,
        max_terms: usize,
        n_range: (i32, i32),
        ell_max: i32,
    ) -> Self {
        let count = rng.random_range(1..=max_terms.max(1));
        let mut e = Self::zero();
        for _ in 0..count {
            let ell = rng.random_range(0..=ell_max);
            let label = BasisLabel {
                gen: rng.random_range(0..alg.dim()),
                n: rng.random_range(n_range.0..=n_range.1),
                harm: HarmonicIndex {
                    ell,
                    m: rng.random_range(-ell..=ell),
                },
            };
            let c = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            e.add_term(label, c);
        }
        e
    }

    /// JSON report form: `[{"gen","n","l","m","re","im"}, ...]`.
    pub fn to_json_value(&self) -> serde_json::Value {
        let rows: Vec<_> = self
            .terms
            .iter()
            .map(|(l, c)| ElementTerm {
                gen: l.gen,
                n: l.n,
                l: l.harm.ell,
                m: l.harm.m,
                re: c.re,
                im: c.im,
            })
            .collect();
        serde_json::to_value(rows).expect("element serializes")
    }

    pub fn from_json_value(v: &serde_json::Value) -> Result<Self> {
        let rows: Vec<ElementTerm> = serde_json::from_value(v.clone())?;
        let mut e = Self::zero();
        for t in rows {
            e.add_term(BasisLabel::new(t.gen, t.n, t.l, t.m)?, Complex64::new(t.re, t.im));
        }
        Ok(e)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ElementTerm {
    gen: usize,
    n: i32,
    l: i32,
    m: i32,
    re: f64,
    im: f64,
}

/// `[J^a_{nℓm}, J^b_{n'ℓ'm'}] = i f^{ab}_c Σ_{ℓ''} C^{ℓ''}_{ℓℓ'} J^c_{n+n',ℓ'',m+m'}`.
pub fn bracket_basis(x: &BasisLabel, y: &BasisLabel, alg: &FiniteLieAlgebra) -> CurrentElement {
    let mut out = CurrentElement::zero();
    let fs: Vec<_> = alg.f_row(x.gen, y.gen).collect();
    if fs.is_empty() {
        return out;
    }
    let expansion = expand_product(x.harm, y.harm);
    for (c, f) in fs {
        for &(ell, g) in &expansion.terms {
            let label = BasisLabel {
                gen: c,
                n: x.n + y.n,
                harm: HarmonicIndex { ell, m: expansion.m },
            };
            out.add_term(label, I * (f * g));
        }
    }
    out
}

/// Bilinear extension of [`bracket_basis`].
pub fn bracket(x: &CurrentElement, y: &CurrentElement, alg: &FiniteLieAlgebra) -> CurrentElement {
    let mut acc: BTreeMap<BasisLabel, Complex64> = BTreeMap::new();
    for (lx, cx) in &x.terms {
        for (ly, cy) in &y.terms {
            let s = cx * cy;
            for (l, c) in bracket_basis(lx, ly, alg).terms {
                *acc.entry(l).or_default() += s * c;
            }
        }
    }
    CurrentElement::from_terms(acc)
}

/// `[x,[y,z]] + [y,[z,x]] + [z,[x,y]]`.
pub fn jacobi_sum(
    x: &CurrentElement,
    y: &CurrentElement,
    z: &CurrentElement,
    alg: &FiniteLieAlgebra,
) -> CurrentElement {
    bracket(x, &bracket(y, z, alg), alg)
        .add(&bracket(y, &bracket(z, x, alg), alg))
        .add(&bracket(z, &bracket(x, y, alg), alg))
}

/// Radial dependence of a smeared generator.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RadialProfile {
    Power(i32),
    /// 1 for r ≤ 1, `1 - exp(-1/(r-1))` beyond; smooth, decays like 1/r.
    BumpF,
    /// Pointwise inverse of `BumpF`; smooth, grows linearly.
    BumpG,
}

impl RadialProfile {
    pub fn eval(&self, r: f64) -> Result<f64> {
        if r < 0.0 || r.is_nan() {
            return Err(Error::SingularEvaluation {
                power: self.power_or_zero(),
                r,
            });
        }
        match *self {
            RadialProfile::Power(n) => {
                if n < 0 && r == 0.0 {
                    Err(Error::SingularEvaluation { power: n, r })
                } else {
                    Ok(r.powi(n))
                }
            }
            RadialProfile::BumpF => Ok(bump_f(r)),
            RadialProfile::BumpG => Ok(bump_g(r)),
        }
    }

    /// Nominal growth exponent at infinity.
    pub fn growth(&self) -> i32 {
        match *self {
            RadialProfile::Power(n) => n,
            RadialProfile::BumpF => -1,
            RadialProfile::BumpG => 1,
        }
    }

    fn power_or_zero(&self) -> i32 {
        match *self {
            RadialProfile::Power(n) => n,
            _ => 0,
        }
    }
}

pub fn bump_f(r: f64) -> f64 {
    if r <= 1.0 {
        1.0
    } else {
        -(-1.0 / (r - 1.0)).exp_m1()
    }
}

pub fn bump_g(r: f64) -> f64 {
    1.0 / bump_f(r)
}

/// `𝒥_X` for `X = coeff · profile(r) Y_{ℓm}(θ,φ)` along generator `gen`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SmearedGenerator {
    pub gen: usize,
    pub profile: RadialProfile,
    pub harm: HarmonicIndex,
    pub coeff: Complex64,
}

impl SmearedGenerator {
    pub fn new(gen: usize, profile: RadialProfile, harm: HarmonicIndex) -> Self {
        SmearedGenerator {
            gen,
            profile,
            harm,
            coeff: Complex64::new(1.0, 0.0),
        }
    }

    /// Value of the smearing function at a point of ℝ³.
    pub fn eval(&self, point: [f64; 3]) -> Result<Complex64> {
        if self.coeff == Complex64::new(0.0, 0.0) {
            return Ok(Complex64::new(0.0, 0.0));
        }
        let (r, theta, phi) = spherical(point);
        let radial = self.profile.eval(r)?;
        Ok(self.coeff * radial * spherical_harmonic(self.harm, theta, phi))
    }
}

/// `(r, θ, φ)` with θ = 0 at the origin.
pub fn spherical(p: [f64; 3]) -> (f64, f64, f64) {
    let r = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
    let theta = if r == 0.0 { 0.0 } else { (p[2] / r).clamp(-1.0, 1.0).acos() };
    let phi = p[1].atan2(p[0]);
    (r, theta, phi)
}

/// `[𝒥_X, ψ(x)] = X_a(x) R(J^a) ψ(x)` at one point.
pub fn act_on_field(
    x: &SmearedGenerator,
    point: [f64; 3],
    psi: &[Complex64],
    alg: &FiniteLieAlgebra,
) -> Result<Vec<Complex64>> {
    alg.check_generator(x.gen)?;
    let rep_dim = alg.rep_dim().ok_or(Error::NoRepresentation)?;
    if psi.len() != rep_dim {
        return Err(Error::DimensionMismatch {
            expected: rep_dim,
            got: psi.len(),
        });
    }
    let value = x.eval(point)?;
    let r = &alg.rep_matrices()[x.gen];
    Ok((0..rep_dim)
        .map(|i| value * (0..rep_dim).map(|j| r[(i, j)] * psi[j]).sum::<Complex64>())
        .collect())
}

/// Radial samples of `[𝒥_x, 𝒥_y]`, keyed by output generator and harmonic.
#[derive(Clone, Debug, PartialEq)]
pub struct SampledBracket {
    pub grid: Vec<f64>,
    pub components: BTreeMap<(usize, HarmonicIndex), Vec<Complex64>>,
}

impl SampledBracket {
    /// Largest spread `max - min` of any component over the grid.
    pub fn max_deviation_from_constant(&self) -> f64 {
        self.components
            .values()
            .map(|vals| {
                let first = vals.first().copied().unwrap_or_default();
                vals.iter().map(|v| (v - first).norm()).fold(0.0, f64::max)
            })
            .fold(0.0, f64::max)
    }

    pub fn is_zero(&self) -> bool {
        self.components.is_empty()
    }
}

/// Pointwise bracket of two smeared generators on a radial grid: the
/// profiles multiply, harmonics couple through Gaunt coefficients, and the
/// generators through `i f^{ab}_c`.
pub fn bracket_smeared_numeric(
    x: &SmearedGenerator,
    y: &SmearedGenerator,
    grid: &[f64],
    alg: &FiniteLieAlgebra,
) -> Result<SampledBracket> {
    alg.check_generator(x.gen)?;
    alg.check_generator(y.gen)?;
    let radial: Vec<f64> = grid
        .iter()
        .map(|&r| Ok(x.profile.eval(r)? * y.profile.eval(r)?))
        .collect::<Result<_>>()?;
    let expansion = expand_product(x.harm, y.harm);
    let scale = x.coeff * y.coeff;
    let mut components = BTreeMap::new();
    for (c, f) in alg.f_row(x.gen, y.gen) {
        for &(ell, g) in &expansion.terms {
            let k = I * f * g * scale;
            if k.norm() < PRUNE_TOL {
                continue;
            }
            let h = HarmonicIndex { ell, m: expansion.m };
            components.insert((c, h), radial.iter().map(|&p| k * p).collect());
        }
    }
    Ok(SampledBracket {
        grid: grid.to_vec(),
        components,
    })
}

/// The constant coefficient `1/√(4π)` of `Y_00`, which the orthonormal
/// convention carries into `[J^a_{n00}, J^b_{-n00}]`.
pub fn y00() -> f64 {
    1.0 / (4.0 * PI).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::build_su;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn lbl(g: usize, n: i32, l: i32, m: i32) -> BasisLabel {
        BasisLabel::new(g, n, l, m).unwrap()
    }

    #[test]
    fn charged_bracket_of_opposite_radial_powers() {
        let su2 = build_su(2).unwrap();
        for n in [1, 2, 5] {
            let b = bracket_basis(&lbl(0, n, 0, 0), &lbl(1, -n, 0, 0), &su2);
            assert_eq!(b.len(), 1);
            let c = b.coeff(&lbl(2, 0, 0, 0));
            assert!((c - I * y00()).norm() < 1e-15);
        }
    }

    #[test]
    fn same_generator_brackets_vanish() {
        let su3 = build_su(3).unwrap();
        for a in 0..8 {
            assert!(bracket_basis(&lbl(a, 2, 3, 1), &lbl(a, -1, 2, -2), &su3).is_zero());
        }
    }

    #[test]
    fn dipole_bracket_lands_on_even_degrees() {
        let su2 = build_su(2).unwrap();
        let b = bracket_basis(&lbl(0, 1, 1, 0), &lbl(1, 0, 1, 0), &su2);
        let labels: Vec<_> = b.terms().map(|(l, _)| *l).collect();
        assert_eq!(labels, vec![lbl(2, 1, 0, 0), lbl(2, 1, 2, 0)]);
        // coefficients i·f^{123}·C with C frozen from an exact Gaunt integral
        assert!((b.coeff(&lbl(2, 1, 0, 0)) - I * 0.282_094_791_773_878_14).norm() < 1e-15);
        assert!((b.coeff(&lbl(2, 1, 2, 0)) - I * 0.252_313_252_202_016).norm() < 1e-15);
    }

    #[test]
    fn zero_and_self_brackets() {
        let su3 = build_su(3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let x = CurrentElement::random(&mut rng, &su3, 4, (-2, 2), 3);
        assert!(bracket(&x, &x, &su3).is_zero());
        assert!(bracket(&CurrentElement::zero(), &x, &su3).is_zero());
    }

    #[test]
    fn filtration_degrees_and_classes() {
        let d = CurrentElement::basis(lbl(0, -2, 1, 0)).filtration_degree();
        assert_eq!(d, FiltrationDegree::finite(-2));
        assert_eq!(d.class(), GaugeClass::Local);
        let e = CurrentElement::basis(lbl(0, 0, 0, 0)).add(&CurrentElement::basis(lbl(1, -1, 0, 0)));
        assert_eq!(e.filtration_degree(), FiltrationDegree::finite(0));
        assert_eq!(e.filtration_degree().class(), GaugeClass::Global);
        assert!(CurrentElement::zero().filtration_degree().is_neg_infinity());
        assert!(FiltrationDegree::NEG_INFINITY < FiltrationDegree::finite(-100));
        assert_eq!(FiltrationDegree::finite(3).class(), GaugeClass::Divergent);
    }

    #[test]
    fn bump_functions() {
        assert_eq!(bump_f(0.3), 1.0);
        assert_eq!(bump_f(1.0), 1.0);
        assert!((bump_f(2.0) - (1.0 - (-1.0f64).exp())).abs() < 1e-15);
        for i in 0..=1000 {
            let r = 10.0 * f64::from(i) / 1000.0;
            assert!((bump_f(r) * bump_g(r) - 1.0).abs() < 1e-12);
        }
        for r in [1e3, 1e6] {
            assert!((bump_g(r) / r - 1.0).abs() < 0.01);
        }
    }

    #[test]
    fn bump_f_is_flat_at_the_seam() {
        // one-sided difference quotients of orders 1..4 vanish on both sides
        let h = 0.005;
        for order in 1..=4u32 {
            let fwd: f64 = (0..=order)
                .map(|k| {
                    let s = if (order - k) % 2 == 0 { 1.0 } else { -1.0 };
                    s * binom(order, k) * bump_f(1.0 + f64::from(k) * h)
                })
                .sum::<f64>()
                / h.powi(order as i32);
            let bwd: f64 = (0..=order)
                .map(|k| {
                    let s = if k % 2 == 0 { 1.0 } else { -1.0 };
                    s * binom(order, k) * bump_f(1.0 - f64::from(k) * h)
                })
                .sum::<f64>()
                / h.powi(order as i32);
            assert_eq!(bwd, 0.0);
            assert!(fwd.abs() < 1e-10, "order {order}: {fwd}");
        }
    }

    fn binom(n: u32, k: u32) -> f64 {
        (0..k).fold(1.0, |acc, i| acc * f64::from(n - i) / f64::from(i + 1))
    }

    #[test]
    fn smeared_bump_bracket_is_constant() {
        let su2 = build_su(2).unwrap();
        let grid: Vec<f64> = (0..=2000).map(|i| 10.0 * f64::from(i) / 2000.0).collect();
        let f = SmearedGenerator::new(0, RadialProfile::BumpF, HarmonicIndex::constant());
        let g = SmearedGenerator::new(1, RadialProfile::BumpG, HarmonicIndex::constant());
        let s = bracket_smeared_numeric(&f, &g, &grid, &su2).unwrap();
        assert_eq!(s.components.len(), 1);
        let vals = &s.components[&(2, HarmonicIndex::constant())];
        assert!(s.max_deviation_from_constant() < 1e-12);
        assert!((vals[0] - I * y00()).norm() < 1e-15);

        let same = bracket_smeared_numeric(&f, &f, &grid, &su2).unwrap();
        assert!(same.is_zero());

        let pos: Vec<f64> = grid[1..].to_vec();
        let p1 = SmearedGenerator::new(0, RadialProfile::Power(1), HarmonicIndex::constant());
        let pm1 = SmearedGenerator::new(1, RadialProfile::Power(-1), HarmonicIndex::constant());
        let s = bracket_smeared_numeric(&p1, &pm1, &pos, &su2).unwrap();
        assert!(s.max_deviation_from_constant() < 1e-12);
        assert!(bracket_smeared_numeric(&p1, &pm1, &grid, &su2).is_err());
    }

    #[test]
    fn field_action() {
        let su2 = build_su(2).unwrap();
        let psi = vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)];
        let x = SmearedGenerator::new(2, RadialProfile::Power(0), HarmonicIndex::constant());
        let out = act_on_field(&x, [0.3, -0.2, 0.9], &psi, &su2).unwrap();
        assert!((out[0] - Complex64::from(0.5 * y00())).norm() < 1e-15);
        assert_eq!(out[1], Complex64::new(0.0, 0.0));

        let mut zero = x;
        zero.coeff = Complex64::new(0.0, 0.0);
        let out = act_on_field(&zero, [0.0, 0.0, 0.0], &psi, &su2).unwrap();
        assert!(out.iter().all(|z| z.norm() == 0.0));

        // σ1/2 maps (1,0) to (0,1/2)
        let x = SmearedGenerator::new(0, RadialProfile::BumpF, HarmonicIndex::constant());
        let out = act_on_field(&x, [0.0, 0.0, 2.0], &psi, &su2).unwrap();
        let expect = bump_f(2.0) * y00() * 0.5;
        assert!(out[0].norm() < 1e-16);
        assert!((out[1] - Complex64::from(expect)).norm() < 1e-15);

        let sing = SmearedGenerator::new(0, RadialProfile::Power(-1), HarmonicIndex::constant());
        assert!(matches!(
            act_on_field(&sing, [0.0; 3], &psi, &su2),
            Err(Error::SingularEvaluation { .. })
        ));
        assert!(matches!(
            act_on_field(&x, [1.0, 0.0, 0.0], &psi[..1], &su2),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn json_form() {
        let e = CurrentElement::from_terms([
            (lbl(0, 1, 2, -1), Complex64::new(0.5, -1.0)),
            (lbl(2, -3, 0, 0), Complex64::new(0.0, 2.0)),
        ]);
        let v = e.to_json_value();
        assert_eq!(v[0]["gen"], 0);
        assert_eq!(v[0]["l"], 2);
        assert_eq!(v[1]["im"], 2.0);
        assert_eq!(CurrentElement::from_json_value(&v).unwrap(), e);
    }
}
