//! Finite-dimensional compact Lie algebra data.
//!
//! Generators are indexed from zero. Brackets follow the physicist
//! convention `[J^a, J^b] = i f^{ab}_c J^c` with real structure constants,
//! and the defining representation is normalized so that
//! `Tr(R(J^a) R(J^b)) = ½ δ^{ab}`. With that normalization the Killing
//! metric stored here is the identity and indices are raised and lowered
//! freely.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance used when validating user-supplied tensors.
pub const VALIDATION_TOL: f64 = 1e-10;

/// Dense rank-3 real tensor indexed `[a][b][c]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Tensor3 {
    dim: usize,
    data: Vec<f64>,
}

impl Tensor3 {
    pub fn zeros(dim: usize) -> Self {
        Tensor3 {
            dim,
            data: vec![0.0; dim * dim * dim],
        }
    }

    #[inline]
    pub fn get(&self, a: usize, b: usize, c: usize) -> f64 {
        self.data[(a * self.dim + b) * self.dim + c]
    }

    #[inline]
    pub fn set(&mut self, a: usize, b: usize, c: usize, v: f64) {
        self.data[(a * self.dim + b) * self.dim + c] = v;
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    fn from_nested(dim: usize, nested: &[Vec<Vec<f64>>], what: &str) -> Result<Self> {
        let mut t = Tensor3::zeros(dim);
        if nested.len() != dim {
            return Err(Error::MalformedAlgebra(format!("{what}: expected {dim} slices")));
        }
        for (a, plane) in nested.iter().enumerate() {
            if plane.len() != dim || plane.iter().any(|row| row.len() != dim) {
                return Err(Error::MalformedAlgebra(format!("{what}: slice {a} is not {dim}x{dim}")));
            }
            for (b, row) in plane.iter().enumerate() {
                for (c, &v) in row.iter().enumerate() {
                    t.set(a, b, c, v);
                }
            }
        }
        Ok(t)
    }

    fn to_nested(&self) -> Vec<Vec<Vec<f64>>> {
        (0..self.dim)
            .map(|a| {
                (0..self.dim)
                    .map(|b| (0..self.dim).map(|c| self.get(a, b, c)).collect())
                    .collect()
            })
            .collect()
    }
}

/// A compact real Lie algebra ġ together with its invariant tensors.
#[derive(Clone, Debug)]
pub struct FiniteLieAlgebra {
    name: String,
    dim: usize,
    f: Tensor3,
    killing: DMatrix<f64>,
    dsym: Tensor3,
    rep_matrices: Vec<DMatrix<Complex64>>,
    cartan_indices: Vec<usize>,
}

/// Index of a basis vector of the defining representation. The Cartan
/// generators of the built-in algebras are diagonal in that basis, so each
/// basis vector is a weight vector.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct WeightLabel(pub usize);

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn pauli() -> Vec<DMatrix<Complex64>> {
    let z = c(0.0, 0.0);
    let one = c(1.0, 0.0);
    let i = c(0.0, 1.0);
    vec![
        DMatrix::from_row_slice(2, 2, &[z, one, one, z]),
        DMatrix::from_row_slice(2, 2, &[z, -i, i, z]),
        DMatrix::from_row_slice(2, 2, &[one, z, z, -one]),
    ]
}

fn gell_mann() -> Vec<DMatrix<Complex64>> {
    let z = c(0.0, 0.0);
    let one = c(1.0, 0.0);
    let i = c(0.0, 1.0);
    let s = c(1.0 / 3f64.sqrt(), 0.0);
    #[rustfmt::skip]
    let mats = vec![
        [z, one, z, one, z, z, z, z, z],
        [z, -i, z, i, z, z, z, z, z],
        [one, z, z, z, -one, z, z, z, z],
        [z, z, one, z, z, z, one, z, z],
        [z, z, -i, z, z, z, i, z, z],
        [z, z, z, z, z, one, z, one, z],
        [z, z, z, z, z, -i, z, i, z],
        [s, z, z, z, s, z, z, z, -s * 2.0],
    ];
    mats.into_iter()
        .map(|m| DMatrix::from_row_slice(3, 3, &m))
        .collect()
}

/// `build_su(n)` for the built-in ranks.
pub fn build_su(n: usize) -> Result<FiniteLieAlgebra> {
    let (mats, cartan) = match n {
        2 => (pauli(), vec![2]),
        3 => (gell_mann(), vec![2, 7]),
        _ => return Err(Error::UnsupportedRank(n)),
    };
    let half = c(0.5, 0.0);
    let reps: Vec<_> = mats.into_iter().map(|m| m * half).collect();
    Ok(FiniteLieAlgebra::from_representation(format!("su({n})"), reps, cartan))
}

impl FiniteLieAlgebra {
    /// Derives f, d and the Killing metric from trace-normalized
    /// representation matrices.
    pub fn from_representation(
        name: String,
        reps: Vec<DMatrix<Complex64>>,
        cartan_indices: Vec<usize>,
    ) -> Self {
        let dim = reps.len();
        let mut f = Tensor3::zeros(dim);
        let mut dsym = Tensor3::zeros(dim);
        let mut killing = DMatrix::zeros(dim, dim);
        for a in 0..dim {
            for b in 0..dim {
                killing[(a, b)] = 2.0 * (&reps[a] * &reps[b]).trace().re;
                let comm = &reps[a] * &reps[b] - &reps[b] * &reps[a];
                let anti = &reps[a] * &reps[b] + &reps[b] * &reps[a];
                for (cc, rc) in reps.iter().enumerate() {
                    // [Ra,Rb] = i f Rc and Tr(Rc Rd) = δ/2  =>  f = -2i Tr([Ra,Rb] Rc)
                    let fv = (c(0.0, -2.0) * (&comm * rc).trace()).re;
                    let dv = (c(2.0, 0.0) * (&anti * rc).trace()).re;
                    f.set(a, b, cc, clean(fv));
                    dsym.set(a, b, cc, clean(dv));
                }
            }
        }
        FiniteLieAlgebra {
            name,
            dim,
            f,
            killing: killing.map(clean),
            dsym,
            rep_matrices: reps,
            cartan_indices,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Structure constant f^{ab}_c.
    #[inline]
    pub fn f(&self, a: usize, b: usize, c: usize) -> f64 {
        self.f.get(a, b, c)
    }

    /// Symmetric invariant d^{abc}.
    #[inline]
    pub fn d(&self, a: usize, b: usize, c: usize) -> f64 {
        self.dsym.get(a, b, c)
    }

    #[inline]
    pub fn killing(&self, a: usize, b: usize) -> f64 {
        self.killing[(a, b)]
    }

    pub fn killing_matrix(&self) -> &DMatrix<f64> {
        &self.killing
    }

    pub fn structure_constants(&self) -> &Tensor3 {
        &self.f
    }

    pub fn d_symbols(&self) -> &Tensor3 {
        &self.dsym
    }

    pub fn rep_matrices(&self) -> &[DMatrix<Complex64>] {
        &self.rep_matrices
    }

    pub fn rep_dim(&self) -> Option<usize> {
        self.rep_matrices.first().map(|m| m.nrows())
    }

    pub fn cartan_indices(&self) -> &[usize] {
        &self.cartan_indices
    }

    pub fn rank(&self) -> usize {
        self.cartan_indices.len()
    }

    pub fn check_generator(&self, gen: usize) -> Result<()> {
        if gen < self.dim {
            Ok(())
        } else {
            Err(Error::GeneratorOutOfRange { gen, dim: self.dim })
        }
    }

    /// Nonzero structure constants `(c, f^{ab}_c)` for fixed `(a, b)`.
    pub fn f_row(&self, a: usize, b: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        (0..self.dim).filter_map(move |c| {
            let v = self.f(a, b, c);
            (v != 0.0).then_some((c, v))
        })
    }

    /// Replaces the structure constants. Used to build deliberately broken
    /// algebras when exercising the validators.
    pub fn with_structure_constants(mut self, f: Tensor3) -> Self {
        assert_eq!(f.dim(), self.dim);
        self.f = f;
        self
    }

    /// Eigenvalues of the Cartan generators on a weight vector of the
    /// defining representation.
    pub fn charge_eigenvalues(&self, weight: WeightLabel) -> Result<Vec<f64>> {
        let rep_dim = self.rep_dim().ok_or(Error::NoRepresentation)?;
        if weight.0 >= rep_dim {
            return Err(Error::UnknownWeight {
                label: weight.0,
                dim: rep_dim,
            });
        }
        self.cartan_indices
            .iter()
            .map(|&h| {
                let m = &self.rep_matrices[h];
                let off_diag = (0..rep_dim).any(|r| r != weight.0 && m[(r, weight.0)].norm() > 1e-14);
                if off_diag {
                    return Err(Error::NonDiagonalCartan(h));
                }
                Ok(m[(weight.0, weight.0)].re)
            })
            .collect()
    }

    /// Loads an algebra from `{"dim", "f", "d", "killing"[, "cartan"]}` and
    /// validates every invariant, naming the first one that fails.
    pub fn from_json(text: &str) -> Result<Self> {
        let doc: AlgebraDocument = serde_json::from_str(text)?;
        let dim = doc.dim;
        if dim == 0 {
            return Err(Error::MalformedAlgebra("dim must be positive".into()));
        }
        let f = Tensor3::from_nested(dim, &doc.f, "f")?;
        let dsym = Tensor3::from_nested(dim, &doc.d, "d")?;
        if doc.killing.len() != dim || doc.killing.iter().any(|r| r.len() != dim) {
            return Err(Error::MalformedAlgebra(format!("killing: expected {dim}x{dim}")));
        }
        let killing = DMatrix::from_fn(dim, dim, |a, b| doc.killing[a][b]);
        let cartan_indices = doc.cartan.unwrap_or_default();
        if let Some(&bad) = cartan_indices.iter().find(|&&h| h >= dim) {
            return Err(Error::GeneratorOutOfRange { gen: bad, dim });
        }
        let alg = FiniteLieAlgebra {
            name: doc.name.unwrap_or_else(|| "user".into()),
            dim,
            f,
            killing,
            dsym,
            rep_matrices: Vec::new(),
            cartan_indices,
        };
        alg.validate(VALIDATION_TOL)?;
        Ok(alg)
    }

    pub fn to_json(&self) -> String {
        let doc = AlgebraDocument {
            name: Some(self.name.clone()),
            dim: self.dim,
            f: self.f.to_nested(),
            d: self.dsym.to_nested(),
            killing: (0..self.dim)
                .map(|a| (0..self.dim).map(|b| self.killing(a, b)).collect())
                .collect(),
            cartan: Some(self.cartan_indices.clone()),
        };
        serde_json::to_string_pretty(&doc).expect("algebra document serializes")
    }

    /// Checks all type invariants; the error names the violated identity.
    pub fn validate(&self, tol: f64) -> Result<()> {
        let checks: [(&'static str, f64); 7] = [
            ("antisymmetry f^{ab}_c = -f^{ba}_c", self.antisymmetry_residual()),
            ("Jacobi identity", jacobi_residual(self)),
            ("total symmetry of d^{abc}", self.dsym_symmetry_residual()),
            ("symmetry of the Killing metric", self.killing_symmetry_residual()),
            ("positive definiteness of the Killing metric", self.killing_definiteness_defect()),
            ("Killing invariance f^{ab}_d k^{dc} totally antisymmetric", killing_invariance_residual(self)),
            ("commuting Cartan generators", self.cartan_residual()),
        ];
        for (identity, residual) in checks {
            if residual > tol {
                return Err(Error::InvalidAlgebra { identity, residual });
            }
        }
        if !self.rep_matrices.is_empty() {
            let residual = representation_residual(self);
            if residual > tol {
                return Err(Error::InvalidAlgebra {
                    identity: "[R(J^a), R(J^b)] = i f^{ab}_c R(J^c)",
                    residual,
                });
            }
        }
        Ok(())
    }

    pub fn antisymmetry_residual(&self) -> f64 {
        let n = self.dim;
        let mut worst = 0.0f64;
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    worst = worst.max((self.f(a, b, c) + self.f(b, a, c)).abs());
                }
            }
        }
        worst
    }

    /// Largest deviation of d^{abc} from total symmetry. Exactly zero for
    /// the built-in algebras.
    pub fn dsym_symmetry_residual(&self) -> f64 {
        let n = self.dim;
        let mut worst = 0.0f64;
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    let v = self.d(a, b, c);
                    for w in [
                        self.d(b, a, c),
                        self.d(a, c, b),
                        self.d(c, b, a),
                        self.d(b, c, a),
                        self.d(c, a, b),
                    ] {
                        worst = worst.max((v - w).abs());
                    }
                }
            }
        }
        worst
    }

    fn killing_symmetry_residual(&self) -> f64 {
        (&self.killing - self.killing.transpose()).amax()
    }

    /// Zero when positive definite, otherwise the magnitude of the most
    /// negative eigenvalue (or 1 for a singular metric).
    fn killing_definiteness_defect(&self) -> f64 {
        let sym = (&self.killing + self.killing.transpose()) * 0.5;
        let min = sym.symmetric_eigenvalues().min();
        if min > 0.0 {
            0.0
        } else if min == 0.0 {
            1.0
        } else {
            -min
        }
    }

    fn cartan_residual(&self) -> f64 {
        let mut worst = 0.0f64;
        for &h1 in &self.cartan_indices {
            for &h2 in &self.cartan_indices {
                for c in 0..self.dim {
                    worst = worst.max(self.f(h1, h2, c).abs());
                }
            }
        }
        worst
    }
}

/// Maximum absolute Jacobi sum over all index quadruples.
pub fn jacobi_residual(alg: &FiniteLieAlgebra) -> f64 {
    let n = alg.dim();
    let mut worst = 0.0f64;
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    let mut s = 0.0;
                    for e in 0..n {
                        s += alg.f(a, b, e) * alg.f(e, c, d)
                            + alg.f(b, c, e) * alg.f(e, a, d)
                            + alg.f(c, a, e) * alg.f(e, b, d);
                    }
                    worst = worst.max(s.abs());
                }
            }
        }
    }
    worst
}

/// Deviation of `f^{ab}_d k^{dc}` from total antisymmetry.
pub fn killing_invariance_residual(alg: &FiniteLieAlgebra) -> f64 {
    let n = alg.dim();
    let lowered = |a: usize, b: usize, c: usize| -> f64 {
        (0..n).map(|d| alg.f(a, b, d) * alg.killing(d, c)).sum()
    };
    let mut worst = 0.0f64;
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                let v = lowered(a, b, c);
                worst = worst
                    .max((v + lowered(b, a, c)).abs())
                    .max((v - lowered(b, c, a)).abs());
            }
        }
    }
    worst
}

/// Entrywise residual of `[R(J^a), R(J^b)] = i f^{ab}_c R(J^c)`.
pub fn representation_residual(alg: &FiniteLieAlgebra) -> f64 {
    let reps = alg.rep_matrices();
    let n = alg.dim();
    let mut worst = 0.0f64;
    for a in 0..n {
        for b in 0..n {
            let mut diff = &reps[a] * &reps[b] - &reps[b] * &reps[a];
            for (c, rc) in reps.iter().enumerate() {
                diff -= rc * Complex64::new(0.0, alg.f(a, b, c));
            }
            worst = worst.max(diff.iter().map(|z| z.norm()).fold(0.0, f64::max));
        }
    }
    worst
}

fn clean(v: f64) -> f64 {
    if v.abs() < 1e-14 {
        0.0
    } else {
        v
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AlgebraDocument {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    name: Option<String>,
    dim: usize,
    f: Vec<Vec<Vec<f64>>>,
    d: Vec<Vec<Vec<f64>>>,
    killing: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    cartan: Option<Vec<usize>>,
}
