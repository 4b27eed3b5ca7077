//! Anomalous extensions of current algebras and their cocycle conditions.
//!
//! * affine: `k m δ^{ab} δ_{m+n,0}` on loop modes `J^a_m = z^m J^a`;
//! * toroidal: `(k/2πi) δ^{ab} ∫ dt q̇^k ∂_k X_a(q(t)) Y_b(q(t))` along an
//!   observer trajectory;
//! * Mickelsson-Faddeev: `ε^{ijk} d^{abc} ∫ d³x ∂_i X_a ∂_j Y_b A_{ck}`.
//!
//! Smearing functions live on T³ = [0, 2π)³ as finite Fourier series with
//! sign convention `e^{+ik·x}`; `ε^{123} = +1`. Trajectories are plain input
//! data and are never transformed, which is how `[𝒥_X, q^i(t)] = 0` is
//! represented.

mod modes;
mod trajectory;

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::FiniteLieAlgebra;
use crate::error::{Error, Result};

pub use modes::{GaugeFieldModes, ModeSeries, TorusField, TorusModeFunction, Wavevector};
pub use trajectory::Trajectory;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Loop-algebra generator `J^a_m = z^m J^a`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LoopMode {
    pub gen: usize,
    pub winding: i32,
}

impl LoopMode {
    pub fn new(gen: usize, winding: i32) -> Self {
        LoopMode { gen, winding }
    }
}

/// Sparse combination of loop modes.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct LoopElement {
    terms: BTreeMap<LoopMode, Complex64>,
}

impl LoopElement {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn mode(m: LoopMode) -> Self {
        let mut e = Self::zero();
        e.add_term(m, Complex64::new(1.0, 0.0));
        e
    }

    pub fn add_term(&mut self, m: LoopMode, c: Complex64) {
        let slot = self.terms.entry(m).or_default();
        *slot += c;
        if slot.norm() < 1e-15 {
            self.terms.remove(&m);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&LoopMode, &Complex64)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Centerless loop bracket `[J^a_m, J^b_n] = i f^{ab}_c J^c_{m+n}`.
    pub fn bracket(&self, other: &Self, alg: &FiniteLieAlgebra) -> Self {
        let mut out = Self::zero();
        for (x, cx) in &self.terms {
            for (y, cy) in &other.terms {
                for (c, f) in alg.f_row(x.gen, y.gen) {
                    out.add_term(LoopMode::new(c, x.winding + y.winding), cx * cy * I * f);
                }
            }
        }
        out
    }

    pub fn random<R: Rng>(rng: &mut R, alg: &FiniteLieAlgebra, terms: usize, max_winding: i32) -> Self {
        let mut e = Self::zero();
        for _ in 0..terms {
            let m = LoopMode::new(rng.random_range(0..alg.dim()), rng.random_range(-max_winding..=max_winding));
            e.add_term(m, Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
        }
        e
    }
}

/// Value of an extension 2-cocycle.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CocycleValue {
    pub value: Complex64,
}

impl CocycleValue {
    pub fn norm(&self) -> f64 {
        self.value.norm()
    }
}

impl From<Complex64> for CocycleValue {
    fn from(value: Complex64) -> Self {
        CocycleValue { value }
    }
}

/// `k · m · δ^{ab} · δ_{m+n,0}`.
pub fn affine_cocycle(x: LoopMode, y: LoopMode, k_level: f64, alg: &FiniteLieAlgebra) -> CocycleValue {
    if x.winding + y.winding != 0 {
        return Complex64::new(0.0, 0.0).into();
    }
    Complex64::from(k_level * f64::from(x.winding) * alg.killing(x.gen, y.gen)).into()
}

/// Bilinear extension of [`affine_cocycle`].
pub fn affine_cocycle_elements(
    x: &LoopElement,
    y: &LoopElement,
    k_level: f64,
    alg: &FiniteLieAlgebra,
) -> CocycleValue {
    let mut acc = Complex64::new(0.0, 0.0);
    for (mx, cx) in x.terms() {
        for (my, cy) in y.terms() {
            acc += cx * cy * affine_cocycle(*mx, *my, k_level, alg).value;
        }
    }
    acc.into()
}

/// Trapezoid evaluation of the toroidal cocycle along `traj`.
pub fn toroidal_cocycle(
    x: &TorusField,
    y: &TorusField,
    traj: &Trajectory,
    k_level: f64,
    alg: &FiniteLieAlgebra,
) -> Result<CocycleValue> {
    if traj.len() < 3 {
        return Err(Error::DegenerateTrajectory(format!("{} samples", traj.len())));
    }
    x.validate(alg)?;
    y.validate(alg)?;
    let pairs: Vec<_> = x
        .components()
        .flat_map(|(a, xa)| {
            y.components().filter_map(move |(b, yb)| {
                let kab = alg.killing(*a, *b);
                (kab != 0.0).then_some((kab, xa, yb))
            })
        })
        .collect();
    let mut integral = Complex64::new(0.0, 0.0);
    if !pairs.is_empty() {
        for (w, q, v) in traj.quadrature_nodes() {
            let mut f = Complex64::new(0.0, 0.0);
            for (kab, xa, yb) in &pairs {
                let (_, grad) = xa.eval_with_grad(q);
                let dx = grad[0] * v[0] + grad[1] * v[1] + grad[2] * v[2];
                if dx == Complex64::new(0.0, 0.0) {
                    continue;
                }
                f += dx * yb.eval(q) * *kab;
            }
            integral += f * w;
        }
    }
    Ok((integral * k_level / (2.0 * PI * I)).into())
}

/// Exact Mickelsson-Faddeev cocycle on T³ in mode space.
pub fn mf_cocycle(
    x: &TorusField,
    y: &TorusField,
    a_field: &GaugeFieldModes,
    alg: &FiniteLieAlgebra,
) -> CocycleValue {
    let mut acc = Complex64::new(0.0, 0.0);
    for (a, xa) in x.components() {
        for (b, yb) in y.components() {
            let ds: Vec<(usize, f64)> = (0..alg.dim())
                .filter_map(|c| {
                    let d = alg.d(*a, *b, c);
                    (d != 0.0).then_some((c, d))
                })
                .collect();
            if ds.is_empty() {
                continue;
            }
            for i in 0..3 {
                let dxa = xa.derivative(i);
                if dxa.is_zero() {
                    continue;
                }
                for j in 0..3 {
                    if i == j {
                        continue;
                    }
                    let k = 3 - i - j;
                    let eps = levi_civita(i, j, k);
                    let prod = dxa.mul(&yb.derivative(j));
                    if prod.is_zero() {
                        continue;
                    }
                    for &(c, d) in &ds {
                        let ack = a_field.component(c, k);
                        acc += prod.pair_zero_mode(&ack) * (eps * d);
                    }
                }
            }
        }
    }
    (acc * (2.0 * PI).powi(3)).into()
}

/// Mickelsson-Faddeev cocycle by a real-space Riemann sum on an `n³` grid.
///
/// Exact for band-limited inputs once `n` exceeds the largest total
/// wavevector component of the integrand.
pub fn mf_cocycle_riemann(
    x: &TorusField,
    y: &TorusField,
    a_field: &GaugeFieldModes,
    alg: &FiniteLieAlgebra,
    n: usize,
) -> CocycleValue {
    let h = 2.0 * PI / n as f64;
    let dim = alg.dim();
    let mut acc = Complex64::new(0.0, 0.0);
    let xs: Vec<_> = x.components().map(|(a, s)| (*a, s)).collect();
    let ys: Vec<_> = y.components().map(|(b, s)| (*b, s)).collect();
    let aks: Vec<_> = a_field.components().map(|(key, s)| (*key, s)).collect();
    for i0 in 0..n {
        for i1 in 0..n {
            for i2 in 0..n {
                let p = [i0 as f64 * h, i1 as f64 * h, i2 as f64 * h];
                let gx: Vec<_> = xs.iter().map(|(a, s)| (*a, s.eval_with_grad(p).1)).collect();
                let gy: Vec<_> = ys.iter().map(|(b, s)| (*b, s.eval_with_grad(p).1)).collect();
                let mut av = vec![[Complex64::new(0.0, 0.0); 3]; dim];
                for ((c, k), s) in &aks {
                    av[*c][*k] += s.eval(p);
                }
                for (a, dxa) in &gx {
                    for (b, dyb) in &gy {
                        for (c, ac) in av.iter().enumerate() {
                            let d = alg.d(*a, *b, c);
                            if d == 0.0 {
                                continue;
                            }
                            let cross = dxa[0] * (dyb[1] * ac[2] - dyb[2] * ac[1])
                                + dxa[1] * (dyb[2] * ac[0] - dyb[0] * ac[2])
                                + dxa[2] * (dyb[0] * ac[1] - dyb[1] * ac[0]);
                            acc += cross * d;
                        }
                    }
                }
            }
        }
    }
    (acc * h.powi(3)).into()
}

/// `[𝒥_X, A_{ai}] = i f^{bc}_a X_b A_{ci} + ∂_i X_a`, in mode space.
pub fn gauge_transform_a(x: &TorusField, a_field: &GaugeFieldModes, alg: &FiniteLieAlgebra) -> GaugeFieldModes {
    let mut out = GaugeFieldModes::zero();
    for (b, xb) in x.components() {
        for ((c, i), aci) in a_field.components() {
            let prod = xb.mul(aci);
            if prod.is_zero() {
                continue;
            }
            for (a, f) in alg.f_row(*b, *c) {
                out.add_component(a, *i, &prod.scale(I * f));
            }
        }
        for i in 0..3 {
            out.add_component(*b, i, &xb.derivative(i));
        }
    }
    out
}

fn levi_civita(i: usize, j: usize, k: usize) -> f64 {
    match (i, j, k) {
        (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1.0,
        (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1.0,
        _ => 0.0,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CocycleKind {
    Affine,
    Toroidal,
    Mf,
}

/// The three arguments of a cocycle-condition check.
#[derive(Clone, Debug)]
pub enum CocycleTriple {
    Loop([LoopElement; 3]),
    Torus([TorusField; 3]),
}

/// Extra data a cocycle needs: the level, the trajectory, or the gauge field.
#[derive(Clone, Copy, Debug, Default)]
pub struct CocycleContext<'a> {
    pub k_level: Option<f64>,
    pub trajectory: Option<&'a Trajectory>,
    pub gauge_field: Option<&'a GaugeFieldModes>,
}

/// Jacobi consistency of an extension.
///
/// Scalar extensions return `|ω([X,Y],Z) + ω([Y,Z],X) + ω([Z,X],Y)|`. The
/// Mickelsson-Faddeev cocycle depends on `A`, which the algebra itself
/// moves, so its condition reads
/// `Σ_cyc ω_A([X,Y],Z) + Σ_cyc ω_{δ_X A}(Y,Z) = 0`, with `δ_X A` from
/// [`gauge_transform_a`] (the inhomogeneous part drops out of the cyclic
/// sum after integration).
pub fn cocycle_condition_residual(
    kind: CocycleKind,
    triple: &CocycleTriple,
    ctx: CocycleContext<'_>,
    alg: &FiniteLieAlgebra,
) -> Result<f64> {
    match (kind, triple) {
        (CocycleKind::Affine, CocycleTriple::Loop([x, y, z])) => {
            let k = ctx
                .k_level
                .ok_or_else(|| Error::InconsistentContext("affine cocycle needs k_level".into()))?;
            let w = |p: &LoopElement, q: &LoopElement| affine_cocycle_elements(p, q, k, alg).value;
            let s = w(&x.bracket(y, alg), z) + w(&y.bracket(z, alg), x) + w(&z.bracket(x, alg), y);
            Ok(s.norm())
        }
        (CocycleKind::Toroidal, CocycleTriple::Torus([x, y, z])) => {
            let (Some(k), Some(traj)) = (ctx.k_level, ctx.trajectory) else {
                return Err(Error::InconsistentContext(
                    "toroidal cocycle needs k_level and a trajectory".into(),
                ));
            };
            let w = |p: &TorusField, q: &TorusField| toroidal_cocycle(p, q, traj, k, alg).map(|c| c.value);
            let s = w(&x.bracket(y, alg), z)? + w(&y.bracket(z, alg), x)? + w(&z.bracket(x, alg), y)?;
            Ok(s.norm())
        }
        (CocycleKind::Mf, CocycleTriple::Torus([x, y, z])) => {
            let a = ctx
                .gauge_field
                .ok_or_else(|| Error::InconsistentContext("MF cocycle needs a gauge field".into()))?;
            let w = |p: &TorusField, q: &TorusField, field: &GaugeFieldModes| mf_cocycle(p, q, field, alg).value;
            let brackets = w(&x.bracket(y, alg), z, a) + w(&y.bracket(z, alg), x, a) + w(&z.bracket(x, alg), y, a);
            let variations = w(y, z, &gauge_transform_a(x, a, alg))
                + w(z, x, &gauge_transform_a(y, a, alg))
                + w(x, y, &gauge_transform_a(z, a, alg));
            Ok((brackets + variations).norm())
        }
        (kind, _) => Err(Error::InconsistentContext(format!(
            "{kind:?} cocycle given the wrong kind of arguments"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::build_su;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn one() -> Complex64 {
        Complex64::new(1.0, 0.0)
    }

    #[test]
    fn affine_named_cases() {
        let su2 = build_su(2).unwrap();
        let v = affine_cocycle(LoopMode::new(0, 1), LoopMode::new(0, -1), 2.0, &su2);
        assert_eq!(v.value, Complex64::from(2.0));
        assert_eq!(affine_cocycle(LoopMode::new(0, 3), LoopMode::new(1, -3), 1.0, &su2).norm(), 0.0);
        assert_eq!(affine_cocycle(LoopMode::new(0, 2), LoopMode::new(0, -1), 1.0, &su2).norm(), 0.0);
        // antisymmetric: k m δ_{m+n} = -k n δ_{m+n}
        let a = affine_cocycle(LoopMode::new(1, 4), LoopMode::new(1, -4), 1.5, &su2).value;
        let b = affine_cocycle(LoopMode::new(1, -4), LoopMode::new(1, 4), 1.5, &su2).value;
        assert_eq!(a + b, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn toroidal_circle_reduces_to_affine() {
        let su2 = build_su(2).unwrap();
        let traj = Trajectory::winding_line(4096, [0.0; 3], [1, 0, 0]).unwrap();
        for m in [1, 3, -2] {
            let x = TorusField::single(0, [m, 0, 0], one());
            let y = TorusField::single(0, [-m, 0, 0], one());
            let w = toroidal_cocycle(&x, &y, &traj, 1.0, &su2).unwrap().value;
            assert!((w - Complex64::from(f64::from(m))).norm() < 1e-8, "m={m}: {w}");
            let back = toroidal_cocycle(&y, &x, &traj, 1.0, &su2).unwrap().value;
            assert!((w + back).norm() < 1e-8);
        }
        let constant = TorusField::single(0, [0, 0, 0], one());
        let y = TorusField::single(0, [2, 1, 0], one());
        assert_eq!(toroidal_cocycle(&constant, &y, &traj, 1.0, &su2).unwrap().norm(), 0.0);
    }

    #[test]
    fn mf_vanishes_for_su2_and_constant_fields() {
        let su2 = build_su(2).unwrap();
        let su3 = build_su(3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let x = TorusField::random(&mut rng, &su2, 2, 2, 2);
        let y = TorusField::random(&mut rng, &su2, 2, 2, 2);
        let a = GaugeFieldModes::random(&mut rng, &su2, 3, 2, 2);
        assert_eq!(mf_cocycle(&x, &y, &a, &su2).norm(), 0.0);
        let constant = TorusField::single(0, [0, 0, 0], one());
        let y = TorusField::random(&mut rng, &su3, 3, 2, 2);
        let a = GaugeFieldModes::random(&mut rng, &su3, 3, 2, 2);
        assert_eq!(mf_cocycle(&constant, &y, &a, &su3).norm(), 0.0);
    }

    #[test]
    fn mf_golden_value() {
        let su3 = build_su(3).unwrap();
        let x = TorusField::single(0, [1, 0, 0], one());
        let y = TorusField::single(0, [0, 1, 0], one());
        let a = GaugeFieldModes::single(7, 2, [-1, -1, 0], one());
        let w = mf_cocycle(&x, &y, &a, &su3).value;
        // ε^{123} d^{118} (i)(i) (2π)³
        let expect = -(2.0 * PI).powi(3) / 3f64.sqrt();
        assert!((w - Complex64::from(expect)).norm() < 1e-12);
        let swapped = mf_cocycle(&y, &x, &a, &su3).value;
        assert!((w + swapped).norm() < 1e-12);
    }

    #[test]
    fn mf_matches_riemann_sum() {
        let su3 = build_su(3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..3 {
            let x = TorusField::random(&mut rng, &su3, 2, 2, 2);
            let y = TorusField::random(&mut rng, &su3, 2, 2, 2);
            let a = GaugeFieldModes::random(&mut rng, &su3, 3, 2, 2);
            let exact = mf_cocycle(&x, &y, &a, &su3).value;
            let grid = mf_cocycle_riemann(&x, &y, &a, &su3, 16).value;
            assert!((exact - grid).norm() < 1e-9 * (1.0 + exact.norm()), "{exact} vs {grid}");
        }
    }

    #[test]
    fn gauge_transform_named_cases() {
        let su3 = build_su(3).unwrap();
        let a = GaugeFieldModes::single(2, 1, [1, 0, 0], one());
        assert!(gauge_transform_a(&TorusField::zero(), &a, &su3).is_zero());
        let x = TorusField::single(4, [2, -1, 3], one());
        let d = gauge_transform_a(&x, &GaugeFieldModes::zero(), &su3);
        for i in 0..3 {
            let k = [2.0, -1.0, 3.0][i];
            assert_eq!(d.component(4, i), ModeSeries::single([2, -1, 3], I * k));
        }
        assert_eq!(d.components().count(), 3);
    }

    #[test]
    fn residual_kind_mismatch_is_reported() {
        let su2 = build_su(2).unwrap();
        let t = CocycleTriple::Loop([LoopElement::zero(), LoopElement::zero(), LoopElement::zero()]);
        let err = cocycle_condition_residual(CocycleKind::Mf, &t, CocycleContext::default(), &su2);
        assert!(matches!(err, Err(Error::InconsistentContext(_))));
        let err = cocycle_condition_residual(CocycleKind::Affine, &t, CocycleContext::default(), &su2);
        assert!(matches!(err, Err(Error::InconsistentContext(_))));
    }

    #[test]
    fn cocycle_conditions_hold() {
        let su2 = build_su(2).unwrap();
        let su3 = build_su(3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(99);

        let loops = CocycleTriple::Loop([
            LoopElement::random(&mut rng, &su2, 3, 3),
            LoopElement::random(&mut rng, &su2, 3, 3),
            LoopElement::random(&mut rng, &su2, 3, 3),
        ]);
        let ctx = CocycleContext {
            k_level: Some(1.0),
            ..Default::default()
        };
        assert!(cocycle_condition_residual(CocycleKind::Affine, &loops, ctx, &su2).unwrap() < 1e-12);

        let traj = Trajectory::winding_line(512, [0.3, 0.1, -0.2], [1, 1, 0]).unwrap();
        let torus = CocycleTriple::Torus([
            TorusField::random(&mut rng, &su3, 2, 1, 2),
            TorusField::random(&mut rng, &su3, 2, 1, 2),
            TorusField::random(&mut rng, &su3, 2, 1, 2),
        ]);
        let ctx = CocycleContext {
            k_level: Some(1.0),
            trajectory: Some(&traj),
            ..Default::default()
        };
        assert!(cocycle_condition_residual(CocycleKind::Toroidal, &torus, ctx, &su3).unwrap() < 1e-9);

        let a = GaugeFieldModes::random(&mut rng, &su3, 4, 2, 2);
        let ctx = CocycleContext {
            gauge_field: Some(&a),
            ..Default::default()
        };
        let r = cocycle_condition_residual(CocycleKind::Mf, &torus, ctx, &su3).unwrap();
        assert!(r < 1e-8, "mf residual {r}");
    }
}
