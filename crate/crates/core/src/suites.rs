//! Named check suites over every module, driven by a JSON config and a seed.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::{
    build_su, jacobi_residual, killing_invariance_residual, representation_residual, FiniteLieAlgebra,
    WeightLabel,
};
use crate::currents::{
    bracket, bracket_basis, bump_f, bump_g, bracket_smeared_numeric, jacobi_sum, y00, BasisLabel,
    CurrentElement, RadialProfile, SmearedGenerator,
};
use crate::error::{Error, Result};
use crate::extensions::{
    cocycle_condition_residual, mf_cocycle, mf_cocycle_riemann, toroidal_cocycle, CocycleContext, CocycleKind,
    CocycleTriple, GaugeFieldModes, LoopElement, TorusField, Trajectory,
};
use crate::harmonics::{
    expand_product, gauss_legendre, gaunt, gaunt_uncached, spherical_harmonic, wigner3j, HarmonicIndex,
};
use crate::jets::{
    binomial, count_free_functions, distance_from_polynomial_span, hierarchy_residual, integrate, multi_indices,
    plane_wave_jet, polynomial_solutions, reconstruct_field, taylor_remainder_bound,
    BoundaryInput, JetState, PlaneWaveSpec,
};
use crate::lowest_weight::{
    grade_one_spectrum, shapovalov_gram, unitarity_scan, AffineModuleSpec, CentralForm, GroundMultiplet,
    ScanOptions, ScanRow, Verdict, NEGATIVE_TOL,
};
use crate::report::{CheckReport, Conventions, Recorder, SCHEMA_VERSION};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SuiteName {
    Algebra,
    Harmonics,
    Currents,
    Cocycles,
    Unitarity,
    Jets,
    All,
}

impl SuiteName {
    pub const MODULES: [SuiteName; 6] = [
        SuiteName::Algebra,
        SuiteName::Harmonics,
        SuiteName::Currents,
        SuiteName::Cocycles,
        SuiteName::Unitarity,
        SuiteName::Jets,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            SuiteName::Algebra => "algebra",
            SuiteName::Harmonics => "harmonics",
            SuiteName::Currents => "currents",
            SuiteName::Cocycles => "cocycles",
            SuiteName::Unitarity => "unitarity",
            SuiteName::Jets => "jets",
            SuiteName::All => "all",
        }
    }

    fn stream(&self) -> u64 {
        *self as u64
    }
}

impl fmt::Display for SuiteName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SuiteName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::MODULES
            .into_iter()
            .chain([SuiteName::All])
            .find(|n| n.as_str() == s)
            .ok_or_else(|| Error::Config(format!("unknown suite `{s}`")))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct UnitarityConfig {
    pub levels: Vec<f64>,
    pub spins: Vec<f64>,
    pub central_form: CentralForm,
    pub relax_lowest_weight: bool,
}

impl Default for UnitarityConfig {
    fn default() -> Self {
        UnitarityConfig {
            levels: vec![0.0, 1.0, 2.0],
            spins: vec![0.0, 0.5, 1.0],
            central_form: CentralForm::Trace,
            relax_lowest_weight: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct JetSuiteConfig {
    pub omega: f64,
    pub kvec: [f64; 3],
    pub q: [f64; 3],
}

impl Default for JetSuiteConfig {
    fn default() -> Self {
        JetSuiteConfig {
            omega: 1.0,
            kvec: [0.4, -0.3, 0.5],
            q: [0.1, 0.2, -0.3],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SuiteConfig {
    /// Quadrature nodes for the toroidal reduction.
    pub samples: usize,
    /// Quadrature nodes for the toroidal cocycle condition.
    pub cocycle_samples: usize,
    pub max_grade: usize,
    /// Largest truncation order in the jet checks.
    pub p: u32,
    /// Random triples per cocycle condition.
    pub trials: usize,
    /// Random pairs/triples for the current-algebra bracket.
    pub bracket_trials: usize,
    pub sphere_points: usize,
    pub ell_max: i32,
    pub max_winding: i32,
    /// Record wall-clock time per check (makes reports non-reproducible).
    pub timings: bool,
    pub unitarity: UnitarityConfig,
    pub jets: JetSuiteConfig,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            samples: 4096,
            cocycle_samples: 256,
            max_grade: 3,
            p: 10,
            trials: 100,
            bracket_trials: 500,
            sphere_points: 100,
            ell_max: 6,
            max_winding: 8,
            timings: false,
            unitarity: UnitarityConfig::default(),
            jets: JetSuiteConfig::default(),
        }
    }
}

impl SuiteConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

/// Runs one suite (or all of them) and returns the sorted report.
pub fn run_suite(name: SuiteName, config: &SuiteConfig, seed: u64) -> Result<CheckReport> {
    let mut rec = Recorder::new(config.timings);
    let mut scan = Vec::new();
    let names: Vec<SuiteName> = if name == SuiteName::All {
        SuiteName::MODULES.to_vec()
    } else {
        vec![name]
    };
    for n in names {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(n.stream());
        match n {
            SuiteName::Algebra => algebra_suite(&mut rec),
            SuiteName::Harmonics => harmonics_suite(&mut rec, config, &mut rng),
            SuiteName::Currents => currents_suite(&mut rec, config, &mut rng)?,
            SuiteName::Cocycles => cocycles_suite(&mut rec, config, &mut rng)?,
            SuiteName::Unitarity => scan = unitarity_suite(&mut rec, config)?,
            SuiteName::Jets => jets_suite(&mut rec, config, &mut rng)?,
            SuiteName::All => unreachable!(),
        }
    }
    let mut report = CheckReport {
        schema_version: SCHEMA_VERSION,
        suite: name.to_string(),
        seed,
        conventions: Conventions::default(),
        config: serde_json::to_value(config)?,
        records: rec.records,
        unitarity_scan: scan,
    };
    report.sort();
    Ok(report)
}

fn algebra_suite(rec: &mut Recorder) {
    for n in [2usize, 3] {
        let tag = format!("algebra.su{n}");
        let alg = match build_su(n) {
            Ok(a) => a,
            Err(e) => {
                rec.max(format!("{tag}.build"), 0.0, || Err(e));
                continue;
            }
        };
        rec.max(format!("{tag}.jacobi"), 1e-12, || Ok(jacobi_residual(&alg)));
        rec.max(format!("{tag}.antisymmetry"), 0.0, || Ok(alg.antisymmetry_residual()));
        rec.max(format!("{tag}.dsym_symmetry"), 0.0, || Ok(alg.dsym_symmetry_residual()));
        rec.max(format!("{tag}.killing_invariance"), 1e-12, || Ok(killing_invariance_residual(&alg)));
        rec.max(format!("{tag}.representation"), 1e-12, || Ok(representation_residual(&alg)));
        rec.max(format!("{tag}.json_round_trip"), 0.0, || {
            let back = FiniteLieAlgebra::from_json(&alg.to_json())?;
            Ok(max_tensor_diff(&alg, &back))
        });
    }
    let su2 = build_su(2).expect("su(2) builds");
    rec.max("algebra.su2.d_vanishes", 0.0, || {
        Ok(iter3(3).map(|(a, b, c)| su2.d(a, b, c).abs()).fold(0.0, f64::max))
    });
    rec.max("algebra.su2.charges", 1e-15, || {
        let up = su2.charge_eigenvalues(WeightLabel(0))?;
        let down = su2.charge_eigenvalues(WeightLabel(1))?;
        Ok((up[0] - 0.5).abs().max((down[0] + 0.5).abs()))
    });
    let su3 = build_su(3).expect("su(3) builds");
    rec.max("algebra.su3.golden_values", 1e-14, || {
        let cases = [
            (su3.f(0, 1, 2), 1.0),
            (su3.f(3, 4, 7), 3f64.sqrt() / 2.0),
            (su3.f(5, 6, 7), 3f64.sqrt() / 2.0),
            (su3.f(0, 3, 6), 0.5),
            (su3.d(0, 0, 7), 1.0 / 3f64.sqrt()),
            (su3.d(7, 7, 7), -1.0 / 3f64.sqrt()),
            (su3.d(2, 3, 3), 0.5),
        ];
        Ok(cases.iter().map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
    });
    rec.max("algebra.su3.rank", 0.0, || Ok((su3.rank() as f64 - 2.0).abs()));
    rec.min("algebra.su3.corrupted_jacobi_detected", 0.05, || {
        let mut f = su3.structure_constants().clone();
        f.set(0, 1, 2, f.get(0, 1, 2) + 0.1);
        let bad = su3.clone().with_structure_constants(f);
        if bad.validate(1e-10).is_ok() {
            return Ok(0.0);
        }
        Ok(jacobi_residual(&bad))
    });
}

fn iter3(n: usize) -> impl Iterator<Item = (usize, usize, usize)> {
    (0..n).flat_map(move |a| (0..n).flat_map(move |b| (0..n).map(move |c| (a, b, c))))
}

fn max_tensor_diff(x: &FiniteLieAlgebra, y: &FiniteLieAlgebra) -> f64 {
    if x.dim() != y.dim() {
        return f64::INFINITY;
    }
    iter3(x.dim())
        .map(|(a, b, c)| (x.f(a, b, c) - y.f(a, b, c)).abs().max((x.d(a, b, c) - y.d(a, b, c)).abs()))
        .fold(0.0, f64::max)
}

/// All `Y_{ℓm}` with `ℓ ≤ ell_max`.
fn harmonics_up_to(ell_max: i32) -> Vec<HarmonicIndex> {
    (0..=ell_max).flat_map(|ell| (-ell..=ell).map(move |m| HarmonicIndex { ell, m })).collect()
}

fn harmonics_suite(rec: &mut Recorder, cfg: &SuiteConfig, rng: &mut ChaCha8Rng) {
    let ell_max = cfg.ell_max;
    let all = harmonics_up_to(ell_max);
    rec.max("harmonics.three_j.golden", 1e-15, || {
        let cases = [
            (wigner3j([2, 2, 0], [0, 0, 0]), -1.0 / 3f64.sqrt()),
            (wigner3j([4, 4, 4], [2, -2, 0]), 70f64.sqrt() / 70.0),
            (wigner3j([6, 4, 8], [2, -4, 2]), 0.1781741612749496),
            (wigner3j([1, 1, 2], [1, -1, 0]), 1.0 / 6f64.sqrt()),
        ];
        Ok(cases.iter().map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
    });
    rec.max("harmonics.three_j.permutation_symmetry", 1e-15, || {
        let mut worst = 0.0f64;
        for _ in 0..200 {
            let j1 = rng.random_range(0..=ell_max);
            let j2 = rng.random_range(0..=ell_max);
            let j3 = rng.random_range((j1 - j2).abs()..=j1 + j2);
            let m1 = rng.random_range(-j1..=j1);
            let m2 = rng.random_range(-j2..=j2);
            let m3 = -m1 - m2;
            let base = wigner3j([2 * j1, 2 * j2, 2 * j3], [2 * m1, 2 * m2, 2 * m3]);
            let cyc = wigner3j([2 * j2, 2 * j3, 2 * j1], [2 * m2, 2 * m3, 2 * m1]);
            let sign = if (j1 + j2 + j3) % 2 == 0 { 1.0 } else { -1.0 };
            let swap = wigner3j([2 * j2, 2 * j1, 2 * j3], [2 * m2, 2 * m1, 2 * m3]);
            let flip = wigner3j([2 * j1, 2 * j2, 2 * j3], [-2 * m1, -2 * m2, -2 * m3]);
            worst = worst
                .max((base - cyc).abs())
                .max((base - sign * swap).abs())
                .max((base - sign * flip).abs());
        }
        Ok(worst)
    });
    rec.max("harmonics.gaunt.cache_consistent", 0.0, || {
        let mut worst = 0.0f64;
        for x in &all {
            for y in &all {
                for l3 in 0..=(x.ell + y.ell) {
                    let a = gaunt(x.ell, x.m, y.ell, y.m, l3);
                    let b = gaunt_uncached(x.ell, x.m, y.ell, y.m, l3);
                    worst = worst.max((a - b).abs());
                }
            }
        }
        Ok(worst)
    });
    rec.max("harmonics.gaunt.quadrature_oracle", 1e-9, || Ok(gaunt_quadrature_deviation(ell_max)));
    rec.max("harmonics.product_identity", 1e-9, || {
        let points: Vec<(f64, f64)> = (0..cfg.sphere_points)
            .map(|_| {
                let z: f64 = rng.random_range(-1.0..1.0);
                (z.acos(), rng.random_range(0.0..2.0 * PI))
            })
            .collect();
        let mut worst = 0.0f64;
        for x in &all {
            for y in &all {
                let exp = expand_product(*x, *y);
                for &(th, ph) in &points {
                    let lhs = spherical_harmonic(*x, th, ph) * spherical_harmonic(*y, th, ph);
                    let rhs: Complex64 = exp
                        .terms
                        .iter()
                        .map(|&(ell, c)| c * spherical_harmonic(HarmonicIndex { ell, m: exp.m }, th, ph))
                        .sum();
                    worst = worst.max((lhs - rhs).norm());
                }
            }
        }
        Ok(worst)
    });
    rec.max("harmonics.selection_rules", 0.0, || {
        let mut worst = 0.0f64;
        for x in &all {
            for y in &all {
                for l3 in 0..=(2 * ell_max + 2) {
                    let parity = (x.ell + y.ell + l3) % 2 == 1;
                    let triangle = l3 < (x.ell - y.ell).abs() || l3 > x.ell + y.ell;
                    let order = (x.m + y.m).abs() > l3;
                    if parity || triangle || order {
                        worst = worst.max(gaunt(x.ell, x.m, y.ell, y.m, l3).abs());
                    }
                }
            }
        }
        Ok(worst)
    });
}

/// Largest gap between Gaunt coefficients and a product-quadrature
/// evaluation of `∫ Y Y conj(Y)` on a shared grid.
fn gaunt_quadrature_deviation(ell_max: i32) -> f64 {
    let out = harmonics_up_to(2 * ell_max);
    let deg = 4 * ell_max as usize;
    let nodes = gauss_legendre(deg / 2 + 2);
    let nphi = 2 * deg + 4;
    let dphi = 2.0 * PI / nphi as f64;
    let mut grid = Vec::new();
    for &(x, w) in &nodes {
        for k in 0..nphi {
            grid.push((x.acos(), k as f64 * dphi, w * dphi));
        }
    }
    let table: Vec<Vec<Complex64>> = out
        .iter()
        .map(|h| grid.iter().map(|&(t, p, _)| spherical_harmonic(*h, t, p)).collect())
        .collect();
    let idx = |h: HarmonicIndex| (h.ell * h.ell + h.ell + h.m) as usize;
    let small = harmonics_up_to(ell_max);
    let mut worst = 0.0f64;
    for x in &small {
        for y in &small {
            let m = x.m + y.m;
            for l3 in m.abs()..=(x.ell + y.ell) {
                let (ya, yb, yc) = (&table[idx(*x)], &table[idx(*y)], &table[idx(HarmonicIndex { ell: l3, m })]);
                let q: Complex64 = (0..grid.len()).map(|i| grid[i].2 * ya[i] * yb[i] * yc[i].conj()).sum();
                worst = worst.max((q.re - gaunt(x.ell, x.m, y.ell, y.m, l3)).abs()).max(q.im.abs());
            }
        }
    }
    worst
}

fn currents_suite(rec: &mut Recorder, cfg: &SuiteConfig, rng: &mut ChaCha8Rng) -> Result<()> {
    let su3 = build_su(3)?;
    let trials = cfg.bracket_trials;
    let ell = 4.min(cfg.ell_max);
    let mut pairs = Vec::with_capacity(trials);
    for _ in 0..trials {
        let x = CurrentElement::random(rng, &su3, 3, (-2, 2), ell);
        let y = CurrentElement::random(rng, &su3, 3, (-2, 2), ell);
        pairs.push((x, y));
    }
    rec.max("currents.bracket.antisymmetry", 0.0, || {
        Ok(pairs
            .iter()
            .map(|(x, y)| bracket(x, y, &su3).add(&bracket(y, x, &su3)).max_abs())
            .fold(0.0, f64::max))
    });
    rec.max("currents.bracket.jacobi", 1e-10, || {
        let mut worst = 0.0f64;
        for _ in 0..trials {
            let x = CurrentElement::random(rng, &su3, 2, (-2, 2), ell);
            let y = CurrentElement::random(rng, &su3, 2, (-2, 2), ell);
            let z = CurrentElement::random(rng, &su3, 2, (-2, 2), ell);
            worst = worst.max(jacobi_sum(&x, &y, &z, &su3).max_abs());
        }
        Ok(worst)
    });
    rec.max("currents.filtration.additivity", 0.0, || {
        let mut violations = 0usize;
        for _ in 0..trials {
            let (n1, n2) = (rng.random_range(-3..=3), rng.random_range(-3..=3));
            let x = CurrentElement::random(rng, &su3, 3, (n1, n1), ell);
            let y = CurrentElement::random(rng, &su3, 3, (n2, n2), ell);
            let b = bracket(&x, &y, &su3);
            if b.is_zero() {
                continue;
            }
            if b.homogeneous_degree() != Some(n1 + n2)
                || b.filtration_degree() != x.filtration_degree().plus(y.filtration_degree())
            {
                violations += 1;
            }
        }
        Ok(violations as f64)
    });
    rec.max("currents.bracket.radial_singlet_case", 1e-15, || {
        let mut worst = 0.0f64;
        for n in -2..=2 {
            for a in 0..su3.dim() {
                for b in 0..su3.dim() {
                    let got = bracket_basis(&BasisLabel::new(a, n, 0, 0)?, &BasisLabel::new(b, -n, 0, 0)?, &su3);
                    let mut want = CurrentElement::zero();
                    for (c, f) in su3.f_row(a, b) {
                        want.add_term(BasisLabel::new(c, 0, 0, 0)?, Complex64::new(0.0, f * y00()));
                    }
                    worst = worst.max(got.sub(&want).max_abs());
                }
            }
        }
        Ok(worst)
    });
    rec.max("currents.bump.product_is_one", 1e-12, || {
        Ok((0..=10_000)
            .map(|i| {
                let r = i as f64 * 1e-3;
                (bump_f(r) * bump_g(r) - 1.0).abs()
            })
            .fold(0.0, f64::max))
    });
    rec.max("currents.bump.smeared_bracket_constant", 1e-12, || {
        let y0 = HarmonicIndex::constant();
        let x = SmearedGenerator::new(0, RadialProfile::BumpF, y0);
        let y = SmearedGenerator::new(1, RadialProfile::BumpG, y0);
        let grid: Vec<f64> = (0..=1000).map(|i| i as f64 * 0.01).collect();
        let s = bracket_smeared_numeric(&x, &y, &grid, &su3)?;
        if s.is_zero() {
            return Err(Error::InconsistentContext("bracket of bump generators vanished".into()));
        }
        Ok(s.max_deviation_from_constant())
    });
    rec.max("currents.bump.g_linear_growth", 0.01, || Ok((bump_g(1e6) / 1e6 - 1.0).abs()));
    Ok(())
}

fn cocycles_suite(rec: &mut Recorder, cfg: &SuiteConfig, rng: &mut ChaCha8Rng) -> Result<()> {
    let su2 = build_su(2)?;
    let su3 = build_su(3)?;
    let one = Complex64::new(1.0, 0.0);
    let k_level = 1.0;

    let circle = Trajectory::winding_line(cfg.samples, [0.0; 3], [1, 0, 0])?;
    let w = cfg.max_winding;
    for m in -w..=w {
        rec.max(format!("cocycles.toroidal_reduction.m{m:+03}"), 1e-8, || {
            let mut worst = 0.0f64;
            for n in -w..=w {
                for a in 0..3 {
                    for b in 0..3 {
                        let x = TorusField::single(a, [m, 0, 0], one);
                        let y = TorusField::single(b, [n, 0, 0], one);
                        let got = toroidal_cocycle(&x, &y, &circle, k_level, &su2)?.value;
                        let want = if a == b && m + n == 0 { k_level * f64::from(m) } else { 0.0 };
                        worst = worst.max((got - want).norm());
                    }
                }
            }
            Ok(worst)
        });
    }

    rec.min("cocycles.toroidal_convergence_ratio", 3.0, || toroidal_convergence_ratio(&su2));

    let k_aff = 1.7;
    rec.max("cocycles.affine.condition", 1e-12, || {
        let mut worst = 0.0f64;
        for _ in 0..cfg.trials {
            let t = [0, 1, 2].map(|_| LoopElement::random(rng, &su2, 3, 4));
            let ctx = CocycleContext {
                k_level: Some(k_aff),
                ..Default::default()
            };
            worst = worst.max(cocycle_condition_residual(
                CocycleKind::Affine,
                &CocycleTriple::Loop(t),
                ctx,
                &su2,
            )?);
        }
        Ok(worst)
    });
    rec.max("cocycles.toroidal.condition", 1e-7, || {
        let mut worst = 0.0f64;
        for _ in 0..cfg.trials {
            let traj = random_closed_curve(rng, cfg.cocycle_samples)?;
            let t = [0, 1, 2].map(|_| TorusField::random(rng, &su2, 2, 2, 2));
            let ctx = CocycleContext {
                k_level: Some(k_level),
                trajectory: Some(&traj),
                ..Default::default()
            };
            worst = worst.max(cocycle_condition_residual(
                CocycleKind::Toroidal,
                &CocycleTriple::Torus(t),
                ctx,
                &su2,
            )?);
        }
        Ok(worst)
    });
    rec.max("cocycles.mf.condition", 1e-8, || {
        let mut worst = 0.0f64;
        for _ in 0..cfg.trials {
            let t = [0, 1, 2].map(|_| TorusField::random(rng, &su3, 2, 2, 2));
            let a = GaugeFieldModes::random(rng, &su3, 4, 2, 2);
            let ctx = CocycleContext {
                gauge_field: Some(&a),
                ..Default::default()
            };
            worst = worst.max(cocycle_condition_residual(CocycleKind::Mf, &CocycleTriple::Torus(t), ctx, &su3)?);
        }
        Ok(worst)
    });
    rec.max("cocycles.mf.riemann_oracle", 1e-6, || {
        let mut worst = 0.0f64;
        for _ in 0..10 {
            let x = TorusField::random(rng, &su3, 2, 2, 2);
            let y = TorusField::random(rng, &su3, 2, 2, 2);
            let a = GaugeFieldModes::random(rng, &su3, 3, 2, 2);
            let exact = mf_cocycle(&x, &y, &a, &su3).value;
            let grid = mf_cocycle_riemann(&x, &y, &a, &su3, 32).value;
            worst = worst.max((exact - grid).norm());
        }
        Ok(worst)
    });
    rec.max("cocycles.mf.golden", 1e-12, || {
        let x = TorusField::single(0, [1, 0, 0], one);
        let y = TorusField::single(0, [0, 1, 0], one);
        let a = GaugeFieldModes::single(7, 2, [-1, -1, 0], one);
        let want = -(2.0 * PI).powi(3) / 3f64.sqrt();
        Ok((mf_cocycle(&x, &y, &a, &su3).value - want).norm())
    });
    Ok(())
}

/// A straight closed loop with random origin and nonzero winding.
pub fn random_closed_curve<R: Rng>(rng: &mut R, n: usize) -> Result<Trajectory> {
    let origin = [0, 1, 2].map(|_| rng.random_range(0.0..2.0 * PI));
    let mut winding = [0, 1, 2].map(|_| rng.random_range(-2..=2));
    if winding == [0, 0, 0] {
        winding[rng.random_range(0..3)] = 1;
    }
    Trajectory::winding_line(n, origin, winding)
}

/// Error ratio `e(32) / e(64)` of the toroidal cocycle on a non-uniformly
/// parametrized loop, against a `2^16`-node reference.
pub fn toroidal_convergence_ratio(alg: &FiniteLieAlgebra) -> Result<f64> {
    let curve = |t: f64| [t + 0.3 * t.sin(), 0.5 * (2.0 * t).sin(), 0.2 * t.cos()];
    let one = Complex64::new(1.0, 0.0);
    let x = TorusField::single(0, [1, 1, 1], one);
    let y = TorusField::single(0, [-1, 0, 0], one);
    let value = |n: usize| -> Result<Complex64> {
        let traj = Trajectory::closed_from_fn(n, curve)?;
        Ok(toroidal_cocycle(&x, &y, &traj, 1.0, alg)?.value)
    };
    let reference = value(1 << 16)?;
    let e1 = (value(32)? - reference).norm();
    let e2 = (value(64)? - reference).norm();
    Ok(e1 / e2)
}

fn unitarity_suite(rec: &mut Recorder, cfg: &SuiteConfig) -> Result<Vec<ScanRow>> {
    let su2 = build_su(2)?;
    let ucfg = &cfg.unitarity;
    let opts = ScanOptions {
        central_form: ucfg.central_form,
        relax_lowest_weight: ucfg.relax_lowest_weight,
    };
    let rows = unitarity_scan(&su2, &ucfg.levels, &ucfg.spins, cfg.max_grade, opts)?;
    let factor = match ucfg.central_form {
        CentralForm::Trace => 1.0,
        CentralForm::Killing => 2.0,
    };
    for row in &rows {
        if row.verdict == Verdict::LowestWeightRelaxed {
            continue;
        }
        // 2j ≤ k (in trace normalization) is necessary for unitarity and,
        // for su(2), sufficient
        let expect_negative = 2.0 * row.weight > factor * row.k + 1e-12;
        let got_negative = matches!(row.verdict, Verdict::NegativeNorm { .. });
        rec.max(format!("unitarity.scan.k{}_j{}", row.k, row.weight), 0.0, || {
            Ok(if expect_negative == got_negative { 0.0 } else { 1.0 })
        });
    }

    let spec = |k: f64, two_j: u32, grade: usize| AffineModuleSpec::new(su2.clone(), k, GroundMultiplet::Spin(two_j), grade);
    for two_j in [1u32, 2] {
        let j = f64::from(two_j) / 2.0;
        rec.min(format!("unitarity.k0_j{j}.grade1_negative_ratio"), 1.0 - 1e-6, || {
            let rows = unitarity_scan(&su2, &[0.0], &[j], cfg.max_grade, ScanOptions::default())?;
            match (&rows[0].verdict, rows[0].min_eigenvalue) {
                (Verdict::NegativeNorm { grade: 1 }, Some(min)) => Ok(min / -j),
                _ => Ok(0.0),
            }
        });
    }
    rec.max("unitarity.k1_j0.5.psd_min_eigenvalue", NEGATIVE_TOL, || {
        let mut worst = 0.0f64;
        for grade in 1..=cfg.max_grade.max(3) {
            let g = shapovalov_gram(&spec(1.0, 1, grade)?, grade)?;
            worst = worst.max(-g.eigenvalues()[0]);
        }
        Ok(worst)
    });
    rec.max("unitarity.k1_j1.negative_by_grade", 2.0, || {
        let rows = unitarity_scan(&su2, &[1.0], &[1.0], cfg.max_grade.max(2), ScanOptions::default())?;
        Ok(match rows[0].verdict {
            Verdict::NegativeNorm { grade } => grade as f64,
            _ => f64::from(u32::MAX),
        })
    });
    rec.max("unitarity.grade1_oracle", 1e-10, || {
        let mut worst = 0.0f64;
        for k in [0.0, 1.0, 2.0] {
            for two_j in 0..4 {
                let eig = shapovalov_gram(&spec(k, two_j, 1)?, 1)?.eigenvalues();
                let oracle = grade_one_spectrum(k, two_j, CentralForm::Trace);
                if eig.len() != oracle.len() {
                    return Ok(f64::INFINITY);
                }
                for (a, b) in eig.iter().zip(&oracle) {
                    worst = worst.max((a - b).abs());
                }
            }
        }
        Ok(worst)
    });
    rec.max("unitarity.gram_linear_in_k", 1e-10, || gram_k_difference(&su2, 1, 2));
    // two central contractions make grade-2 entries quadratic in k
    rec.max("unitarity.gram_quadratic_in_k.grade2", 1e-10, || gram_k_difference(&su2, 2, 3));
    rec.max("unitarity.gram_hermitian", 1e-12, || {
        let mut worst = 0.0f64;
        for two_j in [1u32, 2] {
            for grade in 1..=cfg.max_grade.min(3) {
                worst = worst.max(shapovalov_gram(&spec(1.5, two_j, grade)?, grade)?.hermiticity_defect());
            }
        }
        Ok(worst)
    });
    Ok(rows)
}

/// Largest entry of the `order`-th finite difference in `k = 0, 1, …` of the
/// Gram matrices at `grade`, over spins ½ and 1.
pub fn gram_k_difference(alg: &FiniteLieAlgebra, grade: usize, order: usize) -> Result<f64> {
    let mut worst = 0.0f64;
    for two_j in [1u32, 2] {
        let g: Vec<DMatrix<Complex64>> = (0..=order)
            .map(|k| {
                let spec = AffineModuleSpec::new(alg.clone(), k as f64, GroundMultiplet::Spin(two_j), grade)?;
                Ok(shapovalov_gram(&spec, grade)?.entries)
            })
            .collect::<Result<_>>()?;
        let n = g[0].nrows();
        let mut diff = DMatrix::<Complex64>::zeros(n, n);
        for (i, gi) in g.iter().enumerate() {
            let sign = if (order - i) % 2 == 0 { 1.0 } else { -1.0 };
            diff += gi * Complex64::from(sign * binomial(order, i) as f64);
        }
        worst = worst.max(diff.iter().map(|z| z.norm()).fold(0.0, f64::max));
    }
    Ok(worst)
}

fn jets_suite(rec: &mut Recorder, cfg: &SuiteConfig, rng: &mut ChaCha8Rng) -> Result<()> {
    let jc = &cfg.jets;
    let wave = PlaneWaveSpec {
        omega: jc.omega,
        kvec: jc.kvec,
    };
    let q = jc.q;
    let p_max = cfg.p.max(2);
    rec.max("jets.plane_wave.hierarchy_residual", 1e-12, || {
        let mut worst = 0.0f64;
        for p in 2..=p_max {
            let t = 0.37;
            let state = plane_wave_jet(&wave, p, q, t);
            let e2 = wave.energy().powi(2);
            let accel: Vec<Complex64> = state.coeffs[..state.interior_len()].iter().map(|c| -e2 * c).collect();
            worst = worst.max(hierarchy_residual(&state, &accel, &BoundaryInput::plane_wave_consistent(p, &wave, q))?);
        }
        Ok(worst)
    });
    rec.max("jets.rk4.oscillator", 1e-8, || {
        let rest = PlaneWaveSpec {
            omega: 1.0,
            kvec: [0.0; 3],
        };
        let series = integrate(&plane_wave_jet(&rest, 2, q, 0.0), &BoundaryInput::zero(2), 0.01, 100)?;
        Ok((series[100].coeffs[0] - Complex64::new(0.0, 1.0).exp()).norm())
    });
    rec.max("jets.rk4.order_ratio_minus_16", 4.0, || Ok((rk4_error_ratio(&wave, q, 4)? - 16.0).abs()));
    rec.max("jets.reconstruction.error_over_bound", 1.0, || {
        let mut worst = 0.0f64;
        for p in 2..=10 {
            let (err, bound) = reconstruction_error(&wave, q, p, 0.5);
            worst = worst.max(err / bound);
        }
        Ok(worst)
    });
    rec.max("jets.reconstruction.monotone_violations", 0.0, || {
        let errs: Vec<f64> = (2..=10).map(|p| reconstruction_error(&wave, q, p, 0.5).0).collect();
        Ok(errs.windows(2).filter(|w| w[1] >= w[0]).count() as f64)
    });
    rec.max("jets.free_function_count_mismatches", 0.0, || {
        Ok((1..=12)
            .filter(|&p| {
                let n = multi_indices(p).into_iter().filter(|m| m.len() + 1 >= p).count();
                n != count_free_functions(p)
            })
            .count() as f64)
    });
    rec.max("jets.polynomial_solutions.residual", 1e-10, || {
        let mut worst = 0.0f64;
        for p in 2..=p_max {
            let sols = polynomial_solutions(p, jc.omega)?;
            if sols.len() != binomial(p as usize + 1, 3) {
                return Ok(f64::INFINITY);
            }
            for sol in &sols {
                for t in [0.0, 0.8] {
                    let state = sol.jet(p, q, t);
                    worst = worst.max(hierarchy_residual(&state, &sol.accel(p, t), &BoundaryInput::zero(p))?);
                }
            }
        }
        Ok(worst)
    });
    rec.min("jets.second_class.distance_from_polynomial_span", 1e-3, || {
        let p = 4;
        let boundary = BoundaryInput::random_sinusoids(p, rng, 3);
        let start = JetState::zero(p, jc.omega, q, 0.0);
        let series = integrate(&start, &boundary, 0.01, 200)?;
        let samples: Vec<JetState> = series.into_iter().step_by(20).collect();
        Ok(distance_from_polynomial_span(&samples, &polynomial_solutions(p, jc.omega)?))
    });
    rec.max("jets.linearity", 1e-10, || {
        let p = 5;
        let u = random_jet(rng, p, jc.omega, q);
        let v = random_jet(rng, p, jc.omega, q);
        let bu = BoundaryInput::random_sinusoids(p, rng, 2);
        let bv = BoundaryInput::random_sinusoids(p, rng, 2);
        let (alpha, beta) = (Complex64::new(0.7, -0.2), Complex64::new(-1.3, 0.4));
        let su = integrate(&u, &bu, 0.02, 50)?;
        let sv = integrate(&v, &bv, 0.02, 50)?;
        let combined = integrate(&u.scale(alpha).add(&v.scale(beta)), &bu.combine(alpha, &bv, beta), 0.02, 50)?;
        Ok(combined
            .iter()
            .zip(su.iter().zip(&sv))
            .map(|(c, (a, b))| c.max_abs_diff(&a.scale(alpha).add(&b.scale(beta))))
            .fold(0.0, f64::max))
    });
    rec.max("jets.time_translation", 1e-9, || {
        let p = 4;
        let u = random_jet(rng, p, jc.omega, q);
        let b = BoundaryInput::random_sinusoids(p, rng, 2);
        let shift = 0.75;
        let mut later = u.clone();
        later.t += shift;
        let base = integrate(&u, &b, 0.02, 50)?;
        let moved = integrate(&later, &b.clone().shifted(shift), 0.02, 50)?;
        Ok(base
            .iter()
            .zip(&moved)
            .map(|(x, y)| x.max_abs_diff(y))
            .fold(0.0, f64::max))
    });
    rec.max("jets.zero_stays_zero", 0.0, || {
        let series = integrate(&JetState::zero(4, jc.omega, q, 0.0), &BoundaryInput::zero(4), 0.05, 20)?;
        Ok(series
            .iter()
            .flat_map(|s| s.coeffs.iter())
            .map(|c| c.norm())
            .fold(0.0, f64::max))
    });
    Ok(())
}

fn random_jet<R: Rng>(rng: &mut R, p: u32, omega: f64, q: [f64; 3]) -> JetState {
    let mut s = JetState::zero(p, omega, q, 0.0);
    for m in multi_indices(p) {
        let v = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        let d = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        s.set(m, v, d);
    }
    s
}

/// RK4 error ratio on halving `dt` for a plane wave with consistent boundary.
pub fn rk4_error_ratio(wave: &PlaneWaveSpec, q: [f64; 3], p: u32) -> Result<f64> {
    let boundary = BoundaryInput::plane_wave_consistent(p, wave, q);
    let start = plane_wave_jet(wave, p, q, 0.0);
    let exact = plane_wave_jet(wave, p, q, 1.0);
    let err = |steps: usize| -> Result<f64> {
        let series = integrate(&start, &boundary, 1.0 / steps as f64, steps)?;
        let end = series.last().expect("nonempty series");
        Ok(end.max_abs_diff(&exact))
    };
    Ok(err(10)? / err(20)?)
}

/// `(|φ_jet(x) - φ(x)|, remainder bound)` at distance `dist` from `q`
/// along `k`. The bound carries a four-ulp allowance for rounding in the
/// O(1) partial sum, which matters once the remainder reaches ~1e-13.
pub fn reconstruction_error(wave: &PlaneWaveSpec, q: [f64; 3], p: u32, dist: f64) -> (f64, f64) {
    let t = 0.3;
    let k = wave.kvec;
    let norm = k.iter().map(|v| v * v).sum::<f64>().sqrt();
    let dir = if norm > 0.0 { k.map(|v| v / norm) } else { [1.0, 0.0, 0.0] };
    let x = [q[0] + dist * dir[0], q[1] + dist * dir[1], q[2] + dist * dir[2]];
    let jet = plane_wave_jet(wave, p, q, t);
    let err = (reconstruct_field(&jet, x) - wave.field(x, t)).norm();
    (err, taylor_remainder_bound(k, dist, p) + 4.0 * f64::EPSILON)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_parse() {
        for n in SuiteName::MODULES {
            assert_eq!(n.as_str().parse::<SuiteName>().unwrap(), n);
        }
        assert_eq!("all".parse::<SuiteName>().unwrap(), SuiteName::All);
        assert!("nope".parse::<SuiteName>().is_err());
    }

    #[test]
    fn config_rejects_unknown_keys_by_name() {
        let err = SuiteConfig::from_json(r#"{"samples": 64, "smaples": 3}"#).unwrap_err();
        assert!(err.to_string().contains("smaples"), "{err}");
        let err = SuiteConfig::from_json(r#"{"unitarity": {"level": [1]}}"#).unwrap_err();
        assert!(err.to_string().contains("level"), "{err}");
        let cfg = SuiteConfig::from_json(r#"{"p": 6}"#).unwrap();
        assert_eq!(cfg.p, 6);
        assert_eq!(cfg.samples, 4096);
    }

    #[test]
    fn algebra_suite_passes() {
        let r = run_suite(SuiteName::Algebra, &SuiteConfig::default(), 0).unwrap();
        for f in r.failures() {
            panic!("{f:?}");
        }
    }
}
