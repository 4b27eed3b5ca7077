//! Current algebras over ℝ³ and their anomalous extensions, as executable
//! checks.
//!
//! * [`algebra`]: finite Lie algebras (built-in su(2), su(3)).
//! * [`harmonics`]: Wigner 3j symbols, Gaunt coefficients, `Y_{ℓm}`.
//! * [`currents`]: the graded current algebra `J^a_{n,ℓ,m}` and smeared
//!   generators.
//! * [`extensions`]: affine, toroidal and Mickelsson-Faddeev cocycles.
//! * [`lowest_weight`]: Shapovalov forms of affine lowest-weight modules.
//! * [`jets`]: the p-jet Klein-Gordon hierarchy.
//! * [`suites`], [`report`]: named check suites and their reports.

pub mod algebra;
pub mod currents;
pub mod error;
pub mod extensions;
pub mod harmonics;
pub mod jets;
pub mod lowest_weight;
pub mod report;
pub mod suites;

pub use algebra::{build_su, FiniteLieAlgebra, Tensor3, WeightLabel};
pub use currents::{BasisLabel, CurrentElement, FiltrationDegree, GaugeClass, RadialProfile, SmearedGenerator};
pub use error::{Error, Result};
pub use extensions::{
    CocycleKind, CocycleTriple, CocycleValue, GaugeFieldModes, LoopElement, LoopMode, ModeSeries, TorusField,
    Trajectory,
};
pub use harmonics::{HarmonicIndex, ProductExpansion};
pub use jets::{BoundaryInput, JetRunConfig, JetState, MultiIndex, PlaneWaveSpec};
pub use lowest_weight::{AffineModuleSpec, CentralForm, GramMatrix, GroundMultiplet, PbwWord, ScanRow, Verdict};
pub use report::{CheckRecord, CheckReport, Format, Status};
pub use suites::{run_suite, SuiteConfig, SuiteName};
