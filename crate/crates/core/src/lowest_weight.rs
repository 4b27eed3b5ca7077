//! Lowest-weight modules of the affine algebra
//! `[J^a_m, J^b_n] = i f^{ab}_c J^c_{m+n} + k m κ^{ab} δ_{m+n,0}`
//! and their Shapovalov forms.
//!
//! Ground states form a multiplet of the zero-mode algebra and are killed by
//! every positive mode; negative modes create. The inner product follows
//! from `(J^a_n)† = J^a_{-n}` and orthonormal ground states. A negative
//! eigenvalue of the Gram matrix at some grade is a negative-norm state.
//!
//! Level normalization: by default `κ^{ab} = Tr(R(J^a) R(J^b)) = ½ δ^{ab}`,
//! so that `k` is the integer level of the usual unitarity bound `2j ≤ k`.
//! [`CentralForm::Killing`] uses `κ = δ^{ab}` instead, which doubles the
//! effective level.

use std::collections::{BTreeMap, HashMap};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::algebra::FiniteLieAlgebra;
use crate::error::{Error, Result};

/// Hard cap on the grade; word counts grow combinatorially beyond it.
pub const GRADE_CAP: usize = 6;
pub const DEFAULT_MAX_GRADE: usize = 3;
/// Eigenvalues below `-NEGATIVE_TOL` count as negative norms.
pub const NEGATIVE_TOL: f64 = 1e-10;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Invariant form multiplying the level in the central term.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CentralForm {
    /// `κ^{ab} = ½ Killing^{ab}`, i.e. the trace form of the defining
    /// representation.
    #[default]
    Trace,
    /// `κ^{ab} = Killing^{ab} = δ^{ab}`.
    Killing,
}

impl CentralForm {
    fn factor(self) -> f64 {
        match self {
            CentralForm::Trace => 0.5,
            CentralForm::Killing => 1.0,
        }
    }
}

/// Representation of the zero-mode algebra on the ground states.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GroundMultiplet {
    /// Spin-j multiplet of su(2), stored as `2j`.
    Spin(u32),
    /// One state on which every zero mode vanishes.
    Trivial,
    /// The algebra's defining representation.
    Defining,
}

impl GroundMultiplet {
    pub fn spin(j: f64) -> Self {
        GroundMultiplet::Spin((2.0 * j).round() as u32)
    }

    fn matrices(&self, alg: &FiniteLieAlgebra) -> Result<Vec<DMatrix<Complex64>>> {
        match *self {
            GroundMultiplet::Trivial => Ok(vec![DMatrix::zeros(1, 1); alg.dim()]),
            GroundMultiplet::Defining => {
                if alg.rep_matrices().is_empty() {
                    Err(Error::NoRepresentation)
                } else {
                    Ok(alg.rep_matrices().to_vec())
                }
            }
            GroundMultiplet::Spin(two_j) => {
                if !is_su2(alg) {
                    return Err(Error::UnsupportedWeight(
                        "spin multiplets require su(2) with f^{abc} = ε^{abc}".into(),
                    ));
                }
                Ok(spin_matrices(two_j))
            }
        }
    }

    /// Spin `j` when the multiplet is a spin multiplet, 0 for the trivial one.
    pub fn spin_value(&self) -> Option<f64> {
        match *self {
            GroundMultiplet::Spin(two_j) => Some(f64::from(two_j) / 2.0),
            GroundMultiplet::Trivial => Some(0.0),
            GroundMultiplet::Defining => None,
        }
    }
}

fn is_su2(alg: &FiniteLieAlgebra) -> bool {
    if alg.dim() != 3 {
        return false;
    }
    let eps = |a, b, c| match (a, b, c) {
        (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1.0,
        (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1.0,
        _ => 0.0,
    };
    (0..3).all(|a| (0..3).all(|b| (0..3).all(|c| (alg.f(a, b, c) - eps(a, b, c)).abs() < 1e-12)))
}

/// `(J_x, J_y, J_z)` for spin `two_j / 2` in the basis `m = j, j-1, …, -j`.
pub fn spin_matrices(two_j: u32) -> Vec<DMatrix<Complex64>> {
    let n = two_j as usize + 1;
    let j = f64::from(two_j) / 2.0;
    let m_of = |idx: usize| j - idx as f64;
    let mut jp = DMatrix::<Complex64>::zeros(n, n);
    let mut jz = DMatrix::<Complex64>::zeros(n, n);
    for idx in 0..n {
        let m = m_of(idx);
        jz[(idx, idx)] = Complex64::from(m);
        if idx > 0 {
            // J+ |m> = √(j(j+1) - m(m+1)) |m+1>, and m+1 sits at idx-1
            jp[(idx - 1, idx)] = Complex64::from((j * (j + 1.0) - m * (m + 1.0)).sqrt());
        }
    }
    let jm = jp.adjoint();
    let jx = (&jp + &jm) * Complex64::from(0.5);
    let jy = (&jp - &jm) * (-0.5 * I);
    vec![jx, jy, jz]
}

#[derive(Clone, Debug)]
pub struct AffineModuleSpec {
    pub alg: FiniteLieAlgebra,
    pub level: f64,
    pub ground: GroundMultiplet,
    pub max_grade: usize,
    pub central_form: CentralForm,
}

impl AffineModuleSpec {
    pub fn new(alg: FiniteLieAlgebra, level: f64, ground: GroundMultiplet, max_grade: usize) -> Result<Self> {
        if max_grade > GRADE_CAP {
            return Err(Error::GradeExceedsCap {
                grade: max_grade,
                cap: GRADE_CAP,
            });
        }
        Ok(AffineModuleSpec {
            alg,
            level,
            ground,
            max_grade,
            central_form: CentralForm::default(),
        })
    }

    pub fn with_central_form(mut self, form: CentralForm) -> Self {
        self.central_form = form;
        self
    }
}

/// Creation-operator key `(mode, gen)`; words are sorted ascending.
pub type ModeKey = (i32, usize);

/// A PBW monomial `J^{a1}_{n1} ⋯ J^{ar}_{nr} |ground⟩` in canonical order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PbwWord {
    pub factors: Vec<ModeKey>,
    pub ground: usize,
}

impl PbwWord {
    pub fn grade(&self) -> usize {
        self.factors.iter().map(|(n, _)| (-n) as usize).sum()
    }
}

/// Canonical words of a grade over the creation modes of `dim` generators.
fn creation_words(dim: usize, grade: usize) -> Vec<Vec<ModeKey>> {
    fn rec(dim: usize, remaining: usize, min: ModeKey, cur: &mut Vec<ModeKey>, out: &mut Vec<Vec<ModeKey>>) {
        if remaining == 0 {
            out.push(cur.clone());
            return;
        }
        for n in (-(remaining as i32))..=-1 {
            for a in 0..dim {
                let key = (n, a);
                if key < min {
                    continue;
                }
                cur.push(key);
                rec(dim, remaining - (-n) as usize, key, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    rec(dim, grade, (i32::MIN, 0), &mut Vec::new(), &mut out);
    out
}

/// All canonical PBW words of `grade` tensored with the ground labels.
pub fn build_basis(spec: &AffineModuleSpec, grade: usize) -> Result<Vec<PbwWord>> {
    if grade > spec.max_grade {
        return Err(Error::GradeExceedsCap {
            grade,
            cap: spec.max_grade,
        });
    }
    let ground_dim = spec.ground.matrices(&spec.alg)?[0].nrows();
    let mut out = Vec::new();
    for w in creation_words(spec.alg.dim(), grade) {
        for g in 0..ground_dim {
            out.push(PbwWord {
                factors: w.clone(),
                ground: g,
            });
        }
    }
    Ok(out)
}

type State = BTreeMap<PbwWord, Complex64>;

fn add_into(acc: &mut State, other: &State, scale: Complex64) {
    for (w, c) in other {
        *acc.entry(w.clone()).or_default() += c * scale;
    }
}

/// Normal-ordering engine for one module.
struct ModuleAction<'a> {
    alg: &'a FiniteLieAlgebra,
    zero_modes: Vec<DMatrix<Complex64>>,
    central: f64,
    memo: HashMap<(usize, i32, PbwWord), State>,
}

impl<'a> ModuleAction<'a> {
    fn new(spec: &'a AffineModuleSpec) -> Result<Self> {
        Ok(ModuleAction {
            alg: &spec.alg,
            zero_modes: spec.ground.matrices(&spec.alg)?,
            central: spec.level * spec.central_form.factor(),
            memo: HashMap::new(),
        })
    }

    fn kappa(&self, a: usize, b: usize) -> f64 {
        self.central * self.alg.killing(a, b)
    }

    /// `J^a_n` applied to a canonical word.
    fn apply(&mut self, a: usize, n: i32, word: &PbwWord) -> State {
        let key = (a, n, word.clone());
        if let Some(s) = self.memo.get(&key) {
            return s.clone();
        }
        let out = self.apply_uncached(a, n, word);
        self.memo.insert(key, out.clone());
        out
    }

    fn apply_uncached(&mut self, a: usize, n: i32, word: &PbwWord) -> State {
        let mut out = State::new();
        let Some((&first, rest)) = word.factors.split_first() else {
            match n.signum() {
                1 => {}
                0 => {
                    let m = &self.zero_modes[a];
                    for h in 0..m.nrows() {
                        let c = m[(h, word.ground)];
                        if c != Complex64::new(0.0, 0.0) {
                            out.insert(
                                PbwWord {
                                    factors: vec![],
                                    ground: h,
                                },
                                c,
                            );
                        }
                    }
                }
                _ => {
                    out.insert(
                        PbwWord {
                            factors: vec![(n, a)],
                            ground: word.ground,
                        },
                        Complex64::new(1.0, 0.0),
                    );
                }
            }
            return out;
        };
        if n < 0 && (n, a) <= first {
            let mut factors = Vec::with_capacity(word.factors.len() + 1);
            factors.push((n, a));
            factors.extend_from_slice(&word.factors);
            out.insert(
                PbwWord {
                    factors,
                    ground: word.ground,
                },
                Complex64::new(1.0, 0.0),
            );
            return out;
        }
        let rest_word = PbwWord {
            factors: rest.to_vec(),
            ground: word.ground,
        };
        // J x1 rest = x1 (J rest) + [J, x1] rest
        let (m, b) = first;
        let inner = self.apply(a, n, &rest_word);
        for (w, c) in &inner {
            let moved = self.apply(b, m, w);
            add_into(&mut out, &moved, *c);
        }
        let fs: Vec<_> = self.alg.f_row(a, b).collect();
        for (c, f) in fs {
            let t = self.apply(c, n + m, &rest_word);
            add_into(&mut out, &t, I * f);
        }
        if n + m == 0 {
            let k = self.kappa(a, b) * f64::from(n);
            if k != 0.0 {
                *out.entry(rest_word).or_default() += Complex64::from(k);
            }
        }
        out.retain(|_, c| c.norm() > 1e-14);
        out
    }

    /// `⟨bra|ket⟩` for canonical words of equal grade.
    fn inner(&mut self, bra: &PbwWord, ket: &PbwWord) -> Complex64 {
        // apply the adjoint word: x1† first, then x2†, ...
        let mut state = State::new();
        state.insert(ket.clone(), Complex64::new(1.0, 0.0));
        for &(n, a) in &bra.factors {
            let mut next = State::new();
            for (w, c) in &state {
                let s = self.apply(a, -n, w);
                add_into(&mut next, &s, *c);
            }
            next.retain(|_, c| c.norm() > 1e-14);
            state = next;
        }
        state
            .get(&PbwWord {
                factors: vec![],
                ground: bra.ground,
            })
            .copied()
            .unwrap_or_default()
    }
}

/// Hermitian Shapovalov form on the PBW basis of one grade.
#[derive(Clone, Debug)]
pub struct GramMatrix {
    pub grade: usize,
    pub basis: Vec<PbwWord>,
    pub entries: DMatrix<Complex64>,
}

impl GramMatrix {
    pub fn hermiticity_defect(&self) -> f64 {
        (&self.entries - self.entries.adjoint())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        if self.entries.nrows() == 0 {
            return vec![];
        }
        let mut v: Vec<f64> = self.hermitian_part().symmetric_eigenvalues().iter().copied().collect();
        v.sort_by(f64::total_cmp);
        v
    }

    /// Smallest eigenvalue and a unit eigenvector for it.
    pub fn min_eigenpair(&self) -> Option<(f64, DVector<Complex64>)> {
        if self.entries.nrows() == 0 {
            return None;
        }
        let eig = self.hermitian_part().symmetric_eigen();
        let (idx, &val) = eig
            .eigenvalues
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))?;
        Some((val, eig.eigenvectors.column(idx).into_owned()))
    }

    fn hermitian_part(&self) -> DMatrix<Complex64> {
        (&self.entries + self.entries.adjoint()) * Complex64::from(0.5)
    }
}

/// Gram matrix of the Shapovalov form at `grade`.
pub fn shapovalov_gram(spec: &AffineModuleSpec, grade: usize) -> Result<GramMatrix> {
    let basis = build_basis(spec, grade)?;
    let mut action = ModuleAction::new(spec)?;
    let n = basis.len();
    let mut entries = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            entries[(i, j)] = action.inner(&basis[i], &basis[j]);
        }
    }
    Ok(GramMatrix { grade, basis, entries })
}

/// Closed-form grade-1 spectrum for a spin-j multiplet of su(2).
///
/// The grade-1 Gram matrix is `κk + M` with `M = -L·S` on `1 ⊗ j`, so its
/// eigenvalues are `κk - j` (total spin `j+1`), `κk + 1` (spin `j`, when
/// `j > 0`) and `κk + j + 1` (spin `j-1`, when `j ≥ 1`), with the usual
/// multiplicities. Sorted ascending.
pub fn grade_one_spectrum(level: f64, two_j: u32, form: CentralForm) -> Vec<f64> {
    let j = f64::from(two_j) / 2.0;
    let c = form.factor() * level;
    let mut out = vec![c - j; two_j as usize + 3];
    if two_j >= 1 {
        out.extend(std::iter::repeat_n(c + 1.0, two_j as usize + 1));
    }
    if two_j >= 2 {
        out.extend(std::iter::repeat_n(c + j + 1.0, two_j as usize - 1));
    }
    out.sort_by(f64::total_cmp);
    out
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Verdict {
    NegativeNorm { grade: usize },
    PsdUpToGrade { grade: usize },
    /// The lowest-weight requirement was relaxed; the negative-norm
    /// argument does not apply and nothing was computed.
    LowestWeightRelaxed,
}

impl Verdict {
    pub fn label(&self) -> &'static str {
        match self {
            Verdict::NegativeNorm { .. } => "negative-norm",
            Verdict::PsdUpToGrade { .. } => "psd",
            Verdict::LowestWeightRelaxed => "lowest-weight-relaxed",
        }
    }
}

/// Negative-norm state found in a scan.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub grade: usize,
    pub eigenvalue: f64,
    /// Nonzero components `(word, re, im)` of the eigenvector.
    pub vector: Vec<(PbwWord, f64, f64)>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub k: f64,
    /// Spin `j` of the ground multiplet.
    pub weight: f64,
    pub grade_reached: usize,
    pub verdict: Verdict,
    /// Smallest Gram eigenvalue over the grades examined (grade ≥ 1).
    pub min_eigenvalue: Option<f64>,
    pub witness: Option<Witness>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ScanOptions {
    pub central_form: CentralForm,
    /// Drop the lowest-weight condition, e.g. for a direct sum of a
    /// highest- and a lowest-energy module. Rows are then marked and not
    /// computed.
    pub relax_lowest_weight: bool,
}

/// Scans `(k, j)` cells grade by grade and stops at the first negative norm.
pub fn unitarity_scan(
    alg: &FiniteLieAlgebra,
    k_list: &[f64],
    spins: &[f64],
    max_grade: usize,
    opts: ScanOptions,
) -> Result<Vec<ScanRow>> {
    let mut rows = Vec::new();
    for &k in k_list {
        for &j in spins {
            if opts.relax_lowest_weight {
                rows.push(ScanRow {
                    k,
                    weight: j,
                    grade_reached: 0,
                    verdict: Verdict::LowestWeightRelaxed,
                    min_eigenvalue: None,
                    witness: None,
                });
                continue;
            }
            let ground = if j == 0.0 {
                GroundMultiplet::Spin(0)
            } else {
                GroundMultiplet::spin(j)
            };
            let spec = AffineModuleSpec::new(alg.clone(), k, ground, max_grade)?.with_central_form(opts.central_form);
            rows.push(scan_cell(&spec, j)?);
        }
    }
    Ok(rows)
}

fn scan_cell(spec: &AffineModuleSpec, j: f64) -> Result<ScanRow> {
    let mut min_eig = f64::INFINITY;
    for grade in 1..=spec.max_grade {
        let gram = shapovalov_gram(spec, grade)?;
        let Some((val, vec)) = gram.min_eigenpair() else {
            continue;
        };
        min_eig = min_eig.min(val);
        if val < -NEGATIVE_TOL {
            let vector = gram
                .basis
                .iter()
                .zip(vec.iter())
                .filter(|(_, c)| c.norm() > 1e-12)
                .map(|(w, c)| (w.clone(), c.re, c.im))
                .collect();
            return Ok(ScanRow {
                k: spec.level,
                weight: j,
                grade_reached: grade,
                verdict: Verdict::NegativeNorm { grade },
                min_eigenvalue: Some(val),
                witness: Some(Witness {
                    grade,
                    eigenvalue: val,
                    vector,
                }),
            });
        }
    }
    Ok(ScanRow {
        k: spec.level,
        weight: j,
        grade_reached: spec.max_grade,
        verdict: Verdict::PsdUpToGrade { grade: spec.max_grade },
        min_eigenvalue: min_eig.is_finite().then_some(min_eig),
        witness: None,
    })
}

pub const SCAN_CSV_HEADER: &str = "k,weight,grade_reached,verdict,min_eigenvalue";

/// CSV table `k,weight,grade_reached,verdict,min_eigenvalue`.
pub fn scan_to_csv(rows: &[ScanRow]) -> String {
    let mut s = String::from(SCAN_CSV_HEADER);
    s.push('\n');
    for r in rows {
        let min = r.min_eigenvalue.map(|v| format!("{v:.12e}")).unwrap_or_default();
        s.push_str(&format!(
            "{},{},{},{},{}\n",
            r.k,
            r.weight,
            r.grade_reached,
            r.verdict.label(),
            min
        ));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::build_su;

    fn spec(k: f64, two_j: u32, g: usize) -> AffineModuleSpec {
        AffineModuleSpec::new(build_su(2).unwrap(), k, GroundMultiplet::Spin(two_j), g).unwrap()
    }

    #[test]
    fn spin_matrices_close_under_brackets() {
        for two_j in 0..5 {
            let m = spin_matrices(two_j);
            let comm = &m[0] * &m[1] - &m[1] * &m[0];
            let diff = comm - &m[2] * I;
            assert!(diff.iter().all(|z| z.norm() < 1e-14));
            let cas = &m[0] * &m[0] + &m[1] * &m[1] + &m[2] * &m[2];
            let j = f64::from(two_j) / 2.0;
            for i in 0..cas.nrows() {
                assert!((cas[(i, i)].re - j * (j + 1.0)).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn basis_counts() {
        for two_j in [0u32, 1, 2] {
            let mult = two_j as usize + 1;
            let s = spec(1.0, two_j, 3);
            assert_eq!(build_basis(&s, 0).unwrap().len(), mult);
            assert_eq!(build_basis(&s, 1).unwrap().len(), 3 * mult);
            assert_eq!(build_basis(&s, 2).unwrap().len(), (3 + 6) * mult);
            assert_eq!(build_basis(&s, 3).unwrap().len(), (3 + 9 + 10) * mult);
        }
        assert!(matches!(build_basis(&spec(1.0, 1, 2), 3), Err(Error::GradeExceedsCap { .. })));
        assert!(AffineModuleSpec::new(build_su(2).unwrap(), 1.0, GroundMultiplet::Trivial, 7).is_err());
    }

    #[test]
    fn grade_zero_is_identity() {
        let g = shapovalov_gram(&spec(1.0, 2, 2), 0).unwrap();
        assert_eq!(g.entries, DMatrix::identity(3, 3));
    }

    #[test]
    fn grade_one_matches_direct_commutator() {
        // ⟨J^b_{-1} w | J^a_{-1} v⟩ = i f^{bac} ⟨w|T^c|v⟩ + κ k δ^{ab} δ_{wv}
        let alg = build_su(2).unwrap();
        for (k, two_j) in [(0.0, 1u32), (1.0, 2), (2.5, 3)] {
            let s = spec(k, two_j, 1);
            let g = shapovalov_gram(&s, 1).unwrap();
            let t = spin_matrices(two_j);
            for (r, bra) in g.basis.iter().enumerate() {
                for (c, ket) in g.basis.iter().enumerate() {
                    let (b, a) = (bra.factors[0].1, ket.factors[0].1);
                    let mut expect = Complex64::new(0.0, 0.0);
                    for cc in 0..3 {
                        expect += I * alg.f(b, a, cc) * t[cc][(bra.ground, ket.ground)];
                    }
                    if a == b && bra.ground == ket.ground {
                        expect += 0.5 * k;
                    }
                    assert!((g.entries[(r, c)] - expect).norm() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn grade_one_matches_closed_form() {
        for k in [0.0, 1.0, 2.0] {
            for two_j in 0..4 {
                let eig = shapovalov_gram(&spec(k, two_j, 1), 1).unwrap().eigenvalues();
                let oracle = grade_one_spectrum(k, two_j, CentralForm::Trace);
                assert_eq!(eig.len(), oracle.len());
                for (a, b) in eig.iter().zip(&oracle) {
                    assert!((a - b).abs() < 1e-12, "k={k} 2j={two_j}: {eig:?} vs {oracle:?}");
                }
            }
        }
    }

    #[test]
    fn trivial_module_at_level_zero_has_null_gram() {
        for grade in 1..=3 {
            let g = shapovalov_gram(&spec(0.0, 0, 3), grade).unwrap();
            assert!(g.entries.iter().all(|z| z.norm() < 1e-14));
        }
    }

    #[test]
    fn verdict_labels_and_relaxed_rows() {
        let alg = build_su(2).unwrap();
        let rows = unitarity_scan(
            &alg,
            &[0.0],
            &[0.5],
            2,
            ScanOptions {
                relax_lowest_weight: true,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(rows[0].verdict, Verdict::LowestWeightRelaxed);
        let csv = scan_to_csv(&rows);
        assert!(csv.starts_with("k,weight,grade_reached,verdict,min_eigenvalue\n"));
        assert!(csv.contains("lowest-weight-relaxed"));
    }

    #[test]
    fn spin_multiplet_requires_su2() {
        let su3 = build_su(3).unwrap();
        let s = AffineModuleSpec::new(su3, 1.0, GroundMultiplet::Spin(1), 1).unwrap();
        assert!(matches!(shapovalov_gram(&s, 1), Err(Error::UnsupportedWeight(_))));
    }
}
