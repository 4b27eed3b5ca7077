//! p-jet truncation of the Klein-Gordon equation `φ̈ = ∇²φ - ω²φ` about a
//! fixed base point `q`.
//!
//! With `φ(x, t) = Σ_m φ_m(t) (x - q)^m / m!` the equation becomes the
//! hierarchy `φ̈_m = Σ_j φ_{m+2ĵ} - ω² φ_m`. Truncating at order `p` closes
//! it for `|m| ≤ p - 2`; the coefficients with `|m| ∈ {p-1, p}` are free and
//! supplied as boundary functions of `t`.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const I: Complex64 = Complex64::new(0.0, 1.0);
const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MultiIndex(pub [u32; 3]);

impl MultiIndex {
    pub fn len(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.len() == 0
    }

    pub fn plus_two(&self, j: usize) -> MultiIndex {
        let mut m = self.0;
        m[j] += 2;
        MultiIndex(m)
    }

    /// `m! = m1! m2! m3!`
    pub fn factorial(&self) -> f64 {
        self.0.iter().map(|&k| factorial(k)).product()
    }

    /// `x^m = x1^{m1} x2^{m2} x3^{m3}`
    pub fn power(&self, x: [f64; 3]) -> f64 {
        (0..3).map(|j| x[j].powi(self.0[j] as i32)).product()
    }

    /// Position in the graded layout used by [`JetState`].
    pub fn position(&self) -> usize {
        let n = self.len() as usize;
        let d = n - self.0[0] as usize;
        binomial(n + 2, 3) + d * (d + 1) / 2 + (d - self.0[1] as usize)
    }
}

impl std::fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}{}{}", self.0[0], self.0[1], self.0[2])
    }
}

pub fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// Multi-indices of length exactly `n`, in layout order.
pub fn multi_indices_of_length(n: u32) -> Vec<MultiIndex> {
    let mut out = Vec::new();
    for m1 in (0..=n).rev() {
        for m2 in (0..=n - m1).rev() {
            out.push(MultiIndex([m1, m2, n - m1 - m2]));
        }
    }
    out
}

/// Multi-indices with `|m| ≤ p`, in layout order.
pub fn multi_indices(p: u32) -> Vec<MultiIndex> {
    (0..=p).flat_map(multi_indices_of_length).collect()
}

/// Number of free boundary functions: multi-indices with `|m| ∈ {p-1, p}`.
pub fn count_free_functions(p: u32) -> usize {
    let p = p as usize;
    binomial(p + 1, 2) + binomial(p + 2, 2)
}

/// Truncated Taylor data at time `t`.
///
/// `coeffs` and `rates` hold `φ_m` and `φ̇_m` for every `|m| ≤ p` in the
/// order of [`multi_indices`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JetState {
    pub p: u32,
    pub omega: f64,
    pub q: [f64; 3],
    pub t: f64,
    pub coeffs: Vec<Complex64>,
    pub rates: Vec<Complex64>,
}

impl JetState {
    pub fn zero(p: u32, omega: f64, q: [f64; 3], t: f64) -> Self {
        let n = binomial(p as usize + 3, 3);
        JetState {
            p,
            omega,
            q,
            t,
            coeffs: vec![ZERO; n],
            rates: vec![ZERO; n],
        }
    }

    pub fn coeff(&self, m: MultiIndex) -> Complex64 {
        if m.len() > self.p {
            return ZERO;
        }
        self.coeffs[m.position()]
    }

    pub fn rate(&self, m: MultiIndex) -> Complex64 {
        if m.len() > self.p {
            return ZERO;
        }
        self.rates[m.position()]
    }

    pub fn set(&mut self, m: MultiIndex, value: Complex64, rate: Complex64) {
        let i = m.position();
        self.coeffs[i] = value;
        self.rates[i] = rate;
    }

    /// Number of interior coefficients `|m| ≤ p - 2`.
    pub fn interior_len(&self) -> usize {
        if self.p < 2 {
            0
        } else {
            binomial(self.p as usize + 1, 3)
        }
    }

    pub fn scale(&self, s: Complex64) -> JetState {
        let mut out = self.clone();
        out.coeffs.iter_mut().for_each(|c| *c *= s);
        out.rates.iter_mut().for_each(|c| *c *= s);
        out
    }

    pub fn add(&self, other: &JetState) -> JetState {
        let mut out = self.clone();
        for (a, b) in out.coeffs.iter_mut().zip(&other.coeffs) {
            *a += b;
        }
        for (a, b) in out.rates.iter_mut().zip(&other.rates) {
            *a += b;
        }
        out
    }

    pub fn max_abs_diff(&self, other: &JetState) -> f64 {
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlaneWaveSpec {
    pub omega: f64,
    pub kvec: [f64; 3],
}

impl PlaneWaveSpec {
    /// `√(ω² + k²)`
    pub fn energy(&self) -> f64 {
        (self.omega * self.omega + self.kvec.iter().map(|k| k * k).sum::<f64>()).sqrt()
    }

    /// Closed form `exp(i√(ω²+k²) t - i k·x)`.
    pub fn field(&self, x: [f64; 3], t: f64) -> Complex64 {
        let kx: f64 = (0..3).map(|j| self.kvec[j] * x[j]).sum();
        Complex64::from_polar(1.0, self.energy() * t - kx)
    }

    /// `φ_m = (-i)^{|m|} k^m exp(i√(ω²+k²) t - i k·q)`
    pub fn coefficient(&self, m: MultiIndex, q: [f64; 3], t: f64) -> Complex64 {
        (-I).powu(m.len()) * m.power(self.kvec) * self.field(q, t)
    }
}

pub fn plane_wave_jet(spec: &PlaneWaveSpec, p: u32, q: [f64; 3], t: f64) -> JetState {
    let mut state = JetState::zero(p, spec.omega, q, t);
    let e = spec.energy();
    for m in multi_indices(p) {
        let c = spec.coefficient(m, q, t);
        state.set(m, c, I * e * c);
    }
    state
}

/// Closed-form scalar function of `t`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BoundaryFn {
    Zero,
    /// `amplitude · sin(frequency · t + phase)`
    Sinusoid {
        frequency: f64,
        amplitude: Complex64,
        phase: f64,
    },
    /// `amplitude · exp(i frequency · t)`
    Exponential { frequency: f64, amplitude: Complex64 },
    Sum { terms: Vec<(Complex64, BoundaryFn)> },
}

impl BoundaryFn {
    /// Value and first derivative at `t`.
    pub fn eval(&self, t: f64) -> (Complex64, Complex64) {
        match self {
            BoundaryFn::Zero => (ZERO, ZERO),
            BoundaryFn::Sinusoid {
                frequency,
                amplitude,
                phase,
            } => {
                let arg = frequency * t + phase;
                (amplitude * arg.sin(), amplitude * frequency * arg.cos())
            }
            BoundaryFn::Exponential { frequency, amplitude } => {
                let v = amplitude * Complex64::from_polar(1.0, frequency * t);
                (v, I * frequency * v)
            }
            BoundaryFn::Sum { terms } => terms.iter().fold((ZERO, ZERO), |(v, d), (c, f)| {
                let (fv, fd) = f.eval(t);
                (v + c * fv, d + c * fd)
            }),
        }
    }
}

/// Boundary functions for the slots `|m| ∈ {p-1, p}`, evaluated at
/// `t - time_shift`.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryInput {
    pub p: u32,
    pub functions: BTreeMap<MultiIndex, BoundaryFn>,
    pub time_shift: f64,
}

impl BoundaryInput {
    fn slots(p: u32) -> Vec<MultiIndex> {
        let lo = p.saturating_sub(1);
        (lo..=p).flat_map(multi_indices_of_length).collect()
    }

    pub fn from_fn(p: u32, mut f: impl FnMut(MultiIndex) -> BoundaryFn) -> Self {
        BoundaryInput {
            p,
            functions: Self::slots(p).into_iter().map(|m| (m, f(m))).collect(),
            time_shift: 0.0,
        }
    }

    pub fn zero(p: u32) -> Self {
        Self::from_fn(p, |_| BoundaryFn::Zero)
    }

    /// The same sinusoid in every slot.
    pub fn sinusoid(p: u32, frequency: f64, amplitude: f64) -> Self {
        Self::from_fn(p, |_| BoundaryFn::Sinusoid {
            frequency,
            amplitude: Complex64::from(amplitude),
            phase: 0.0,
        })
    }

    /// The slots of the plane-wave jet, so that the truncated system
    /// reproduces it exactly.
    pub fn plane_wave_consistent(p: u32, spec: &PlaneWaveSpec, q: [f64; 3]) -> Self {
        Self::from_fn(p, |m| BoundaryFn::Exponential {
            frequency: spec.energy(),
            amplitude: spec.coefficient(m, q, 0.0),
        })
    }

    /// An independent mixture of `terms` sinusoids per slot.
    pub fn random_sinusoids<R: Rng>(p: u32, rng: &mut R, terms: usize) -> Self {
        Self::from_fn(p, |_| BoundaryFn::Sum {
            terms: (0..terms)
                .map(|_| {
                    let c = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
                    let f = BoundaryFn::Sinusoid {
                        frequency: rng.random_range(0.2..3.0),
                        amplitude: Complex64::new(1.0, 0.0),
                        phase: rng.random_range(0.0..std::f64::consts::TAU),
                    };
                    (c, f)
                })
                .collect(),
        })
    }

    /// `α·self + β·other`, slot by slot.
    pub fn combine(&self, alpha: Complex64, other: &BoundaryInput, beta: Complex64) -> Self {
        let mut out = self.clone();
        for (m, f) in out.functions.iter_mut() {
            let g = other.functions.get(m).cloned().unwrap_or(BoundaryFn::Zero);
            *f = BoundaryFn::Sum {
                terms: vec![(alpha, f.clone()), (beta, g)],
            };
        }
        out
    }

    pub fn shifted(mut self, shift: f64) -> Self {
        self.time_shift += shift;
        self
    }

    pub fn eval(&self, m: MultiIndex, t: f64) -> Result<(Complex64, Complex64)> {
        self.functions
            .get(&m)
            .map(|f| f.eval(t - self.time_shift))
            .ok_or(Error::MissingBoundary(m.0))
    }

    fn check(&self, p: u32) -> Result<()> {
        for m in Self::slots(p) {
            if !self.functions.contains_key(&m) {
                return Err(Error::MissingBoundary(m.0));
            }
        }
        Ok(())
    }
}

fn interior(p: u32) -> Vec<MultiIndex> {
    if p < 2 {
        vec![]
    } else {
        multi_indices(p - 2)
    }
}

fn second_derivatives(coeffs: &[Complex64], omega: f64, p: u32, t: f64, boundary: &BoundaryInput) -> Result<Vec<Complex64>> {
    let w2 = omega * omega;
    interior(p)
        .into_iter()
        .map(|m| {
            let mut acc = -w2 * coeffs[m.position()];
            for j in 0..3 {
                let up = m.plus_two(j);
                acc += if up.len() + 1 < p {
                    coeffs[up.position()]
                } else {
                    boundary.eval(up, t)?.0
                };
            }
            Ok(acc)
        })
        .collect()
}

/// `φ̈_m` for `|m| ≤ p - 2`, in layout order. Slots with `|m| ≥ p - 1` are
/// read from the boundary at `state.t`.
pub fn hierarchy_rhs(state: &JetState, boundary: &BoundaryInput) -> Result<Vec<Complex64>> {
    boundary.check(state.p)?;
    second_derivatives(&state.coeffs, state.omega, state.p, state.t, boundary)
}

/// `max |φ̈_m - rhs_m|` over the interior, given second derivatives.
pub fn hierarchy_residual(state: &JetState, accel: &[Complex64], boundary: &BoundaryInput) -> Result<f64> {
    let rhs = hierarchy_rhs(state, boundary)?;
    Ok(rhs.iter().zip(accel).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max))
}

/// Classical RK4 on `(φ_m, φ̇_m)`, `|m| ≤ p - 2`. Returns `steps + 1`
/// states including the initial one; boundary slots are filled from the
/// boundary at each output time.
pub fn integrate(state: &JetState, boundary: &BoundaryInput, dt: f64, steps: usize) -> Result<Vec<JetState>> {
    if !(dt > 0.0) {
        return Err(Error::InvalidJet(format!("time step must be positive, got {dt}")));
    }
    boundary.check(state.p)?;
    let p = state.p;
    let inner = state.interior_len();
    let mut out = Vec::with_capacity(steps + 1);
    let mut cur = state.clone();
    fill_boundary(&mut cur, boundary)?;
    out.push(cur.clone());

    // scratch holds a full coefficient vector; only the interior evolves
    let mut scratch = cur.coeffs.clone();
    let accel = |x: &[Complex64], t: f64, scratch: &mut Vec<Complex64>| -> Result<Vec<Complex64>> {
        scratch[..inner].copy_from_slice(x);
        second_derivatives(scratch, state.omega, p, t, boundary)
    };
    for _ in 0..steps {
        let t = cur.t;
        let x0 = cur.coeffs[..inner].to_vec();
        let v0 = cur.rates[..inner].to_vec();
        let axpy = |a: &[Complex64], h: f64, b: &[Complex64]| -> Vec<Complex64> {
            a.iter().zip(b).map(|(x, y)| x + h * y).collect()
        };
        let a1 = accel(&x0, t, &mut scratch)?;
        let x2 = axpy(&x0, 0.5 * dt, &v0);
        let v2 = axpy(&v0, 0.5 * dt, &a1);
        let a2 = accel(&x2, t + 0.5 * dt, &mut scratch)?;
        let x3 = axpy(&x0, 0.5 * dt, &v2);
        let v3 = axpy(&v0, 0.5 * dt, &a2);
        let a3 = accel(&x3, t + 0.5 * dt, &mut scratch)?;
        let x4 = axpy(&x0, dt, &v3);
        let v4 = axpy(&v0, dt, &a3);
        let a4 = accel(&x4, t + dt, &mut scratch)?;
        for i in 0..inner {
            cur.coeffs[i] = x0[i] + dt / 6.0 * (v0[i] + 2.0 * v2[i] + 2.0 * v3[i] + v4[i]);
            cur.rates[i] = v0[i] + dt / 6.0 * (a1[i] + 2.0 * a2[i] + 2.0 * a3[i] + a4[i]);
        }
        cur.t = t + dt;
        fill_boundary(&mut cur, boundary)?;
        out.push(cur.clone());
    }
    Ok(out)
}

fn fill_boundary(state: &mut JetState, boundary: &BoundaryInput) -> Result<()> {
    for m in BoundaryInput::slots(state.p) {
        let (v, d) = boundary.eval(m, state.t)?;
        state.set(m, v, d);
    }
    Ok(())
}

/// `φ(x, t) ≈ Σ_{|m| ≤ p} φ_m(t) (x - q)^m / m!`
pub fn reconstruct_field(state: &JetState, x: [f64; 3]) -> Complex64 {
    let dx = [x[0] - state.q[0], x[1] - state.q[1], x[2] - state.q[2]];
    multi_indices(state.p)
        .into_iter()
        .map(|m| state.coeff(m) * (m.power(dx) / m.factorial()))
        .sum()
}

/// Remainder bound `(|k| |x - q|)^{p+1} / (p+1)!` for plane-wave jets.
pub fn taylor_remainder_bound(kvec: [f64; 3], dist: f64, p: u32) -> f64 {
    let k = kvec.iter().map(|v| v * v).sum::<f64>().sqrt();
    (k * dist).powi(p as i32 + 1) / factorial(p + 1)
}

/// A solution of the form `P(x, t) e^{iωt}` supported on `|m| ≤ p - 2`:
/// the `k`-derivative `∂_k^α` at `k = 0` of the plane-wave family.
#[derive(Clone, Debug, PartialEq)]
pub struct PolynomialSolution {
    pub alpha: MultiIndex,
    /// Nonzero components: `m` with `m ≤ α` and `α - m` even.
    pub terms: Vec<(MultiIndex, Vec<(u32, f64)>)>,
    omega: f64,
}

impl PolynomialSolution {
    /// Jet at time `t` with `φ̇` filled in.
    pub fn jet(&self, p: u32, q: [f64; 3], t: f64) -> JetState {
        let e = exp_sqrt_series(self.omega, self.alpha.len() / 2 + 1, t);
        let mut state = JetState::zero(p, self.omega, q, t);
        for (m, parts) in &self.terms {
            let (mut v, mut d) = (ZERO, ZERO);
            for &(s, w) in parts {
                v += w * e.value[s as usize];
                d += w * e.rate[s as usize];
            }
            let phase = (-I).powu(m.len());
            state.set(*m, phase * v, phase * d);
        }
        state
    }

    /// `φ̈_m` at `t` over the interior of order `p`.
    pub fn accel(&self, p: u32, t: f64) -> Vec<Complex64> {
        let e = exp_sqrt_series(self.omega, self.alpha.len() / 2 + 1, t);
        let mut out = vec![ZERO; binomial(p as usize + 1, 3)];
        for (m, parts) in &self.terms {
            if m.len() + 2 > p {
                continue;
            }
            let mut a = ZERO;
            for &(s, w) in parts {
                // f(u) = exp(i t √(ω²+u)) obeys f̈ = -(ω² + u) f
                let prev = if s == 0 { ZERO } else { e.value[s as usize - 1] };
                a -= w * (self.omega * self.omega * e.value[s as usize] + prev);
            }
            out[m.position()] = (-I).powu(m.len()) * a;
        }
        out
    }
}

struct SeriesAt {
    value: Vec<Complex64>,
    rate: Vec<Complex64>,
}

/// Taylor coefficients in `u` of `exp(i t √(ω² + u))` and of its time
/// derivative, up to `u^{n-1}`.
fn exp_sqrt_series(omega: f64, n: u32, t: f64) -> SeriesAt {
    let n = n as usize;
    // √(ω² + u) = Σ g_s u^s
    let mut g = vec![0.0; n];
    let mut binom = 1.0;
    for (s, gs) in g.iter_mut().enumerate() {
        *gs = binom * omega.powf(1.0 - 2.0 * s as f64);
        binom *= (0.5 - s as f64) / (s as f64 + 1.0);
    }
    let h: Vec<Complex64> = g.iter().map(|&x| I * t * x).collect();
    let mut value = vec![ZERO; n];
    value[0] = h[0].exp();
    for s in 1..n {
        let mut acc = ZERO;
        for j in 1..=s {
            acc += f64::from(j as u32) * h[j] * value[s - j];
        }
        value[s] = acc / s as f64;
    }
    // ∂_t f = i √(ω²+u) f
    let rate = (0..n)
        .map(|s| (0..=s).map(|j| I * g[j] * value[s - j]).sum())
        .collect();
    SeriesAt { value, rate }
}

/// Basis of polynomial solutions for truncation order `p`, one per `|α| ≤ p - 2`.
pub fn polynomial_solutions(p: u32, omega: f64) -> Result<Vec<PolynomialSolution>> {
    if p < 2 {
        return Err(Error::InvalidJet(format!("polynomial solutions need p ≥ 2, got {p}")));
    }
    if !(omega > 0.0) {
        return Err(Error::InvalidJet(format!("polynomial solutions need ω > 0, got {omega}")));
    }
    Ok(multi_indices(p - 2)
        .into_iter()
        .map(|alpha| {
            let mut terms = Vec::new();
            for m in multi_indices(alpha.len()) {
                let rem: Vec<u32> = (0..3).map(|j| alpha.0[j].wrapping_sub(m.0[j])).collect();
                if rem.iter().any(|&r| r > alpha.len() || r % 2 == 1) {
                    continue;
                }
                let beta = MultiIndex([rem[0] / 2, rem[1] / 2, rem[2] / 2]);
                let s = beta.len();
                let w = alpha.factorial() * factorial(s) / beta.factorial();
                terms.push((m, vec![(s, w)]));
            }
            PolynomialSolution { alpha, terms, omega }
        })
        .collect())
}

/// Relative distance of a sampled trajectory from the span of the
/// polynomial solutions, using interior coefficients at the given states.
pub fn distance_from_polynomial_span(states: &[JetState], solutions: &[PolynomialSolution]) -> f64 {
    let Some(first) = states.first() else {
        return 0.0;
    };
    let inner = first.interior_len();
    let rows = states.len() * inner;
    let target = DVector::from_iterator(rows, states.iter().flat_map(|s| s.coeffs[..inner].iter().copied()));
    let mut basis = DMatrix::<Complex64>::zeros(rows, solutions.len());
    for (c, sol) in solutions.iter().enumerate() {
        let col = states.iter().flat_map(|s| sol.jet(s.p, s.q, s.t).coeffs[..inner].to_vec());
        for (r, v) in col.enumerate() {
            basis[(r, c)] = v;
        }
    }
    let norm = target.norm();
    if norm == 0.0 {
        return 0.0;
    }
    let svd = basis.clone().svd(true, true);
    let coef = match svd.solve(&target, 1e-12) {
        Ok(c) => c,
        Err(_) => return 1.0,
    };
    (&basis * coef - &target).norm() / norm
}

/// Boundary choices available from a run config.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum BoundaryConfig {
    Zero {},
    Sinusoid {
        frequency: f64,
        amplitude: f64,
    },
    PlaneWaveConsistent {},
    RandomSinusoid {
        terms: usize,
        seed: u64,
    },
}

impl Default for BoundaryConfig {
    fn default() -> Self {
        BoundaryConfig::Zero {}
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialData {
    #[default]
    PlaneWave,
    Zero,
}

fn default_outputs() -> Vec<[u32; 3]> {
    vec![[0, 0, 0]]
}

fn default_stride() -> usize {
    1
}

/// `{omega, kvec, p, dt, steps, boundary, q, initial, output, every}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JetRunConfig {
    pub omega: f64,
    pub kvec: [f64; 3],
    pub p: u32,
    pub dt: f64,
    pub steps: usize,
    #[serde(default)]
    pub q: [f64; 3],
    #[serde(default)]
    pub boundary: BoundaryConfig,
    #[serde(default)]
    pub initial: InitialData,
    /// Coefficients written to the time series.
    #[serde(default = "default_outputs")]
    pub output: Vec<[u32; 3]>,
    /// Keep every n-th state.
    #[serde(default = "default_stride")]
    pub every: usize,
}

impl JetRunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        if let Some(m) = cfg.output.iter().find(|m| m.iter().sum::<u32>() > cfg.p) {
            return Err(Error::Config(format!("output index {m:?} exceeds p = {}", cfg.p)));
        }
        if cfg.every == 0 {
            return Err(Error::Config("every must be at least 1".into()));
        }
        Ok(cfg)
    }

    pub fn plane_wave(&self) -> PlaneWaveSpec {
        PlaneWaveSpec {
            omega: self.omega,
            kvec: self.kvec,
        }
    }

    pub fn boundary_input(&self) -> BoundaryInput {
        match &self.boundary {
            BoundaryConfig::Zero {} => BoundaryInput::zero(self.p),
            BoundaryConfig::Sinusoid { frequency, amplitude } => BoundaryInput::sinusoid(self.p, *frequency, *amplitude),
            BoundaryConfig::PlaneWaveConsistent {} => BoundaryInput::plane_wave_consistent(self.p, &self.plane_wave(), self.q),
            BoundaryConfig::RandomSinusoid { terms, seed } => {
                use rand::SeedableRng;
                let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(*seed);
                BoundaryInput::random_sinusoids(self.p, &mut rng, *terms)
            }
        }
    }

    pub fn run(&self) -> Result<Vec<JetState>> {
        let start = match self.initial {
            InitialData::PlaneWave => plane_wave_jet(&self.plane_wave(), self.p, self.q, 0.0),
            InitialData::Zero => JetState::zero(self.p, self.omega, self.q, 0.0),
        };
        let series = integrate(&start, &self.boundary_input(), self.dt, self.steps)?;
        Ok(series.into_iter().step_by(self.every).collect())
    }
}

/// CSV with columns `t,re_m,im_m,...` for the selected coefficients.
pub fn series_to_csv(series: &[JetState], output: &[[u32; 3]]) -> String {
    let mut s = String::from("t");
    for m in output {
        let m = MultiIndex(*m);
        s.push_str(&format!(",re_{m},im_{m}"));
    }
    s.push('\n');
    for state in series {
        s.push_str(&format!("{:e}", state.t));
        for m in output {
            let c = state.coeff(MultiIndex(*m));
            s.push_str(&format!(",{:e},{:e}", c.re, c.im));
        }
        s.push('\n');
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn run_config_parses_and_runs() {
        let cfg = JetRunConfig::from_json(
            r#"{"omega": 1.0, "kvec": [0.5, 0, 0], "p": 4, "dt": 0.01, "steps": 10,
                "boundary": {"kind": "plane_wave_consistent"}, "output": [[0,0,0],[1,0,0]], "every": 5}"#,
        )
        .unwrap();
        let series = cfg.run().unwrap();
        assert_eq!(series.len(), 3);
        let csv = series_to_csv(&series, &cfg.output);
        assert!(csv.starts_with("t,re_000,im_000,re_100,im_100\n"));
        assert_eq!(csv.lines().count(), 4);
        let err = JetRunConfig::from_json(r#"{"omega":1,"kvec":[0,0,0],"p":2,"dt":0.1,"steps":1,"bogus":1}"#);
        assert!(err.unwrap_err().to_string().contains("bogus"));
        let err = JetRunConfig::from_json(
            r#"{"omega":1,"kvec":[0,0,0],"p":2,"dt":0.1,"steps":1,"boundary":{"kind":"zero","x":1}}"#,
        );
        assert!(err.is_err());
        let err = JetRunConfig::from_json(r#"{"omega":1,"kvec":[0,0,0],"p":2,"dt":0.1,"steps":1,"output":[[3,0,0]]}"#);
        assert!(err.is_err());
    }

    #[test]
    fn layout_positions_are_dense() {
        for p in 0..8 {
            let all = multi_indices(p);
            assert_eq!(all.len(), binomial(p as usize + 3, 3));
            for (i, m) in all.iter().enumerate() {
                assert_eq!(m.position(), i);
            }
        }
    }

    #[test]
    fn free_function_counts() {
        assert_eq!(count_free_functions(1), 4);
        assert_eq!(count_free_functions(2), 9);
    }

    #[test]
    fn plane_wave_examples() {
        let s = PlaneWaveSpec {
            omega: 1.0,
            kvec: [1.0, 0.0, 0.0],
        };
        let c = s.coefficient(MultiIndex([2, 0, 0]), [0.0; 3], 0.0);
        assert!((c - Complex64::new(-1.0, 0.0)).norm() < 1e-15);
        let rest = PlaneWaveSpec {
            omega: 1.0,
            kvec: [0.0; 3],
        };
        let j = plane_wave_jet(&rest, 3, [0.2, 0.0, 0.0], 0.7);
        assert!((j.coeff(MultiIndex([0, 0, 0])) - Complex64::from_polar(1.0, 0.7)).norm() < 1e-15);
        assert!(j.coeffs[1..].iter().all(|c| c.norm() == 0.0));
    }

    #[test]
    fn harmonic_oscillator_rhs() {
        let s = PlaneWaveSpec {
            omega: 1.0,
            kvec: [0.0; 3],
        };
        let j = plane_wave_jet(&s, 2, [0.0; 3], 0.3);
        let rhs = hierarchy_rhs(&j, &BoundaryInput::zero(2)).unwrap();
        assert_eq!(rhs.len(), 1);
        assert!((rhs[0] + j.coeffs[0]).norm() < 1e-15);
    }

    #[test]
    fn missing_boundary_is_reported() {
        let mut b = BoundaryInput::zero(3);
        b.functions.remove(&MultiIndex([0, 3, 0]));
        let j = JetState::zero(3, 1.0, [0.0; 3], 0.0);
        assert!(matches!(hierarchy_rhs(&j, &b), Err(Error::MissingBoundary([0, 3, 0]))));
        assert!(integrate(&j, &BoundaryInput::zero(3), 0.0, 1).is_err());
    }

    #[test]
    fn zero_data_stays_zero() {
        let j = JetState::zero(4, 1.3, [0.0; 3], 0.0);
        let series = integrate(&j, &BoundaryInput::zero(4), 0.05, 40).unwrap();
        assert!(series.iter().all(|s| s.coeffs.iter().all(|c| c.norm() == 0.0)));
    }

    #[test]
    fn oscillator_integrates_to_e_to_the_i() {
        let s = PlaneWaveSpec {
            omega: 1.0,
            kvec: [0.0; 3],
        };
        let j = plane_wave_jet(&s, 2, [0.0; 3], 0.0);
        let series = integrate(&j, &BoundaryInput::zero(2), 0.01, 100).unwrap();
        let end = series.last().unwrap();
        assert!((end.t - 1.0).abs() < 1e-12);
        assert!((end.coeffs[0] - I.exp()).norm() < 1e-8);
    }

    #[test]
    fn constant_polynomial_solution() {
        let sols = polynomial_solutions(2, 0.8).unwrap();
        assert_eq!(sols.len(), 1);
        let j = sols[0].jet(2, [0.0; 3], 1.1);
        assert!((j.coeffs[0] - Complex64::from_polar(1.0, 0.88)).norm() < 1e-14);
        assert!(polynomial_solutions(1, 1.0).is_err());
        assert!(polynomial_solutions(3, 0.0).is_err());
    }

    #[test]
    fn polynomial_solutions_solve_the_hierarchy() {
        for p in 2..=7 {
            let sols = polynomial_solutions(p, 1.2).unwrap();
            assert_eq!(sols.len(), binomial(p as usize + 1, 3));
            for sol in &sols {
                for t in [0.0, 0.4, 1.7] {
                    let j = sol.jet(p, [0.0; 3], t);
                    let r = hierarchy_residual(&j, &sol.accel(p, t), &BoundaryInput::zero(p)).unwrap();
                    assert!(r < 1e-10, "p={p} α={} r={r}", sol.alpha);
                }
            }
        }
    }

    #[test]
    fn polynomial_solution_matches_k_derivative() {
        // ∂_{k1} of the plane-wave family at k=0 gives φ_{(1,0,0)} = -i e^{iωt}
        let sols = polynomial_solutions(3, 1.0).unwrap();
        let sol = sols.iter().find(|s| s.alpha == MultiIndex([1, 0, 0])).unwrap();
        let j = sol.jet(3, [0.0; 3], 0.5);
        assert!((j.coeff(MultiIndex([1, 0, 0])) + I * Complex64::from_polar(1.0, 0.5)).norm() < 1e-14);
        assert_eq!(j.coeff(MultiIndex([0, 0, 0])), ZERO);
    }
}
