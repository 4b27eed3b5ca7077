//! Finite Fourier series on the torus T³ = [0, 2π)³.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::FiniteLieAlgebra;
use crate::error::{Error, Result};

pub type Wavevector = [i32; 3];

const I: Complex64 = Complex64::new(0.0, 1.0);
const ZERO_TOL: f64 = 1e-15;

/// `Σ_k c_k e^{ik·x}` with finitely many nonzero coefficients.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ModeSeries {
    modes: BTreeMap<Wavevector, Complex64>,
}

impl ModeSeries {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn single(k: Wavevector, c: Complex64) -> Self {
        let mut s = Self::zero();
        s.add_mode(k, c);
        s
    }

    pub fn from_modes(modes: impl IntoIterator<Item = (Wavevector, Complex64)>) -> Self {
        let mut s = Self::zero();
        for (k, c) in modes {
            s.add_mode(k, c);
        }
        s
    }

    pub fn add_mode(&mut self, k: Wavevector, c: Complex64) {
        let slot = self.modes.entry(k).or_default();
        *slot += c;
        if slot.norm() < ZERO_TOL {
            self.modes.remove(&k);
        }
    }

    pub fn modes(&self) -> impl Iterator<Item = (&Wavevector, &Complex64)> {
        self.modes.iter()
    }

    pub fn coeff(&self, k: &Wavevector) -> Complex64 {
        self.modes.get(k).copied().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.modes.is_empty()
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self::from_modes(self.modes.iter().map(|(k, c)| (*k, c * s)))
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (k, c) in &other.modes {
            out.add_mode(*k, *c);
        }
        out
    }

    /// Pointwise product (mode convolution).
    pub fn mul(&self, other: &Self) -> Self {
        let mut acc: BTreeMap<Wavevector, Complex64> = BTreeMap::new();
        for (k1, c1) in &self.modes {
            for (k2, c2) in &other.modes {
                let k = [k1[0] + k2[0], k1[1] + k2[1], k1[2] + k2[2]];
                *acc.entry(k).or_default() += c1 * c2;
            }
        }
        Self::from_modes(acc)
    }

    /// `∂_j`, exact: `∂_j e^{ik·x} = i k_j e^{ik·x}`.
    pub fn derivative(&self, j: usize) -> Self {
        Self::from_modes(
            self.modes
                .iter()
                .map(|(k, c)| (*k, c * I * f64::from(k[j]))),
        )
    }

    pub fn zero_mode(&self) -> Complex64 {
        self.coeff(&[0, 0, 0])
    }

    /// Zero mode of `self · other` without forming the full product.
    pub fn pair_zero_mode(&self, other: &Self) -> Complex64 {
        self.modes
            .iter()
            .map(|(k, c)| c * other.coeff(&[-k[0], -k[1], -k[2]]))
            .sum()
    }

    /// `∫_{T³} d³x` of the series.
    pub fn integral(&self) -> Complex64 {
        self.zero_mode() * (2.0 * PI).powi(3)
    }

    pub fn eval(&self, x: [f64; 3]) -> Complex64 {
        self.modes
            .iter()
            .map(|(k, c)| c * Complex64::from_polar(1.0, dot(k, x)))
            .sum()
    }

    /// Value and gradient at `x`.
    pub fn eval_with_grad(&self, x: [f64; 3]) -> (Complex64, [Complex64; 3]) {
        let mut v = Complex64::new(0.0, 0.0);
        let mut g = [Complex64::new(0.0, 0.0); 3];
        for (k, c) in &self.modes {
            let term = c * Complex64::from_polar(1.0, dot(k, x));
            v += term;
            for j in 0..3 {
                g[j] += term * I * f64::from(k[j]);
            }
        }
        (v, g)
    }

    /// Random series with `count` modes, wavevector entries in `-kmax..=kmax`.
    pub fn random<R: Rng>(rng: &mut R, count: usize, kmax: i32) -> Self {
        let mut s = Self::zero();
        for _ in 0..count {
            let k = [
                rng.random_range(-kmax..=kmax),
                rng.random_range(-kmax..=kmax),
                rng.random_range(-kmax..=kmax),
            ];
            s.add_mode(k, Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
        }
        s
    }

    pub fn max_abs(&self) -> f64 {
        self.modes.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    fn to_pairs(&self) -> Vec<ModePair> {
        self.modes
            .iter()
            .map(|(k, c)| ModePair(*k, [c.re, c.im]))
            .collect()
    }

    fn from_pairs(pairs: Vec<ModePair>) -> Self {
        Self::from_modes(pairs.into_iter().map(|ModePair(k, [re, im])| (k, Complex64::new(re, im))))
    }
}

fn dot(k: &Wavevector, x: [f64; 3]) -> f64 {
    f64::from(k[0]) * x[0] + f64::from(k[1]) * x[1] + f64::from(k[2]) * x[2]
}

/// `[[k1,k2,k3],[re,im]]` on the wire.
#[derive(Serialize, Deserialize)]
struct ModePair(Wavevector, [f64; 2]);

/// One generator component `X_a(x) = Σ c_k e^{ik·x}` of a smearing function.
#[derive(Clone, Debug, PartialEq)]
pub struct TorusModeFunction {
    pub gen: usize,
    pub modes: ModeSeries,
}

impl TorusModeFunction {
    pub fn new(gen: usize, modes: ModeSeries) -> Self {
        TorusModeFunction { gen, modes }
    }

    /// `c · e^{ik·x} J^gen`.
    pub fn single(gen: usize, k: Wavevector, c: Complex64) -> Self {
        TorusModeFunction {
            gen,
            modes: ModeSeries::single(k, c),
        }
    }

    /// Whether `X(x)` is real: `c_{-k} = conj(c_k)` for every mode.
    pub fn is_real(&self) -> bool {
        self.modes.modes().all(|(k, c)| {
            (self.modes.coeff(&[-k[0], -k[1], -k[2]]) - c.conj()).norm() < 1e-14
        })
    }
}

/// A ġ-valued function on T³, one [`ModeSeries`] per generator.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct TorusField {
    components: BTreeMap<usize, ModeSeries>,
}

impl TorusField {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn from_functions(parts: impl IntoIterator<Item = TorusModeFunction>) -> Self {
        let mut f = Self::zero();
        for p in parts {
            f.add_component(p.gen, &p.modes);
        }
        f
    }

    pub fn single(gen: usize, k: Wavevector, c: Complex64) -> Self {
        Self::from_functions([TorusModeFunction::single(gen, k, c)])
    }

    pub fn add_component(&mut self, gen: usize, s: &ModeSeries) {
        let sum = self.component(gen).add(s);
        if sum.is_zero() {
            self.components.remove(&gen);
        } else {
            self.components.insert(gen, sum);
        }
    }

    pub fn component(&self, gen: usize) -> ModeSeries {
        self.components.get(&gen).cloned().unwrap_or_default()
    }

    pub fn components(&self) -> impl Iterator<Item = (&usize, &ModeSeries)> {
        self.components.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.components.is_empty()
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let mut out = Self::zero();
        for (g, m) in &self.components {
            out.add_component(*g, &m.scale(s));
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (g, m) in &other.components {
            out.add_component(*g, m);
        }
        out
    }

    pub fn to_functions(&self) -> Vec<TorusModeFunction> {
        self.components
            .iter()
            .map(|(g, m)| TorusModeFunction::new(*g, m.clone()))
            .collect()
    }

    pub fn validate(&self, alg: &FiniteLieAlgebra) -> Result<()> {
        for g in self.components.keys() {
            alg.check_generator(*g)?;
        }
        Ok(())
    }

    /// Pointwise Lie bracket `[X,Y]_c = i f^{ab}_c X_a Y_b`.
    pub fn bracket(&self, other: &Self, alg: &FiniteLieAlgebra) -> Self {
        let mut out = Self::zero();
        for (a, xa) in &self.components {
            for (b, yb) in &other.components {
                let fs: Vec<_> = alg.f_row(*a, *b).collect();
                if fs.is_empty() {
                    continue;
                }
                let prod = xa.mul(yb);
                for (c, f) in fs {
                    out.add_component(c, &prod.scale(I * f));
                }
            }
        }
        out
    }

    /// Random field with `gens` generator components, each with `modes`
    /// random modes of entries bounded by `kmax`.
    pub fn random<R: Rng>(
        rng: &mut R,
        alg: &FiniteLieAlgebra,
        gens: usize,
        modes: usize,
        kmax: i32,
    ) -> Self {
        let mut out = Self::zero();
        for _ in 0..gens {
            let g = rng.random_range(0..alg.dim());
            out.add_component(g, &ModeSeries::random(rng, modes, kmax));
        }
        out
    }

    /// JSON: `[{"gen": a, "modes": [[[k1,k2,k3],[re,im]], ...]}, ...]`.
    pub fn to_json(&self) -> String {
        let docs: Vec<_> = self
            .components
            .iter()
            .map(|(g, m)| FunctionDoc {
                gen: *g,
                modes: m.to_pairs(),
            })
            .collect();
        serde_json::to_string_pretty(&docs).expect("field serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let docs: Vec<FunctionDoc> = serde_json::from_str(text)?;
        Ok(Self::from_functions(
            docs.into_iter()
                .map(|d| TorusModeFunction::new(d.gen, ModeSeries::from_pairs(d.modes))),
        ))
    }
}

impl From<Vec<TorusModeFunction>> for TorusField {
    fn from(parts: Vec<TorusModeFunction>) -> Self {
        Self::from_functions(parts)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FunctionDoc {
    gen: usize,
    modes: Vec<ModePair>,
}

/// Gauge field `A_{ai}(x)`, keyed by `(generator, spatial index 0..3)`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct GaugeFieldModes {
    components: BTreeMap<(usize, usize), ModeSeries>,
}

impl GaugeFieldModes {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn single(gen: usize, dir: usize, k: Wavevector, c: Complex64) -> Self {
        let mut a = Self::zero();
        a.add_component(gen, dir, &ModeSeries::single(k, c));
        a
    }

    pub fn add_component(&mut self, gen: usize, dir: usize, s: &ModeSeries) {
        assert!(dir < 3, "spatial index must be 0, 1 or 2");
        let sum = self.component(gen, dir).add(s);
        if sum.is_zero() {
            self.components.remove(&(gen, dir));
        } else {
            self.components.insert((gen, dir), sum);
        }
    }

    pub fn component(&self, gen: usize, dir: usize) -> ModeSeries {
        self.components.get(&(gen, dir)).cloned().unwrap_or_default()
    }

    pub fn components(&self) -> impl Iterator<Item = (&(usize, usize), &ModeSeries)> {
        self.components.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.components.is_empty()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for ((g, i), m) in &other.components {
            out.add_component(*g, *i, m);
        }
        out
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let mut out = Self::zero();
        for ((g, i), m) in &self.components {
            out.add_component(*g, *i, &m.scale(s));
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.components.values().map(ModeSeries::max_abs).fold(0.0, f64::max)
    }

    pub fn random<R: Rng>(
        rng: &mut R,
        alg: &FiniteLieAlgebra,
        components: usize,
        modes: usize,
        kmax: i32,
    ) -> Self {
        let mut out = Self::zero();
        for _ in 0..components {
            let g = rng.random_range(0..alg.dim());
            let i = rng.random_range(0..3);
            out.add_component(g, i, &ModeSeries::random(rng, modes, kmax));
        }
        out
    }

    /// JSON: `{"components": [{"gen": a, "dir": i, "modes": [...]}, ...]}`.
    pub fn to_json(&self) -> String {
        let doc = GaugeDoc {
            components: self
                .components
                .iter()
                .map(|((g, i), m)| GaugeComponentDoc {
                    gen: *g,
                    dir: *i,
                    modes: m.to_pairs(),
                })
                .collect(),
        };
        serde_json::to_string_pretty(&doc).expect("gauge field serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: GaugeDoc = serde_json::from_str(text)?;
        let mut out = Self::zero();
        for c in doc.components {
            if c.dir > 2 {
                return Err(Error::Config(format!("gauge component dir {} out of range", c.dir)));
            }
            out.add_component(c.gen, c.dir, &ModeSeries::from_pairs(c.modes));
        }
        Ok(out)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GaugeDoc {
    components: Vec<GaugeComponentDoc>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GaugeComponentDoc {
    gen: usize,
    dir: usize,
    modes: Vec<ModePair>,
}
