//! Quantum-group covariant Heisenberg (Weyl and Clifford) algebras realized on
//! truncated Fock spaces, together with the numerical machinery needed to
//! check them: braid matrices, explicit deforming maps, q-special functions,
//! the so(N) orbital shift operators, and the Knizhnik–Zamolodchikov
//! coassociator. Every identity is checked as a residual norm and collected
//! into a deterministic [`Report`].

pub mod braid;
pub mod deform;
pub mod error;
pub mod fock;
pub mod harness;
pub mod kz;
pub mod liealg;
pub mod linalg;
pub mod ode;
pub mod qspecial;
pub mod report;
pub mod soshift;
pub mod verify;

pub use braid::{build_relations, RelationMatrices};
pub use deform::{DeformedGenerators, Ordering};
pub use error::{Error, Result};
pub use fock::{FockSpace, LinOp, Statistics};
pub use harness::{run_suite, PartialConfig, SuiteConfig, SuiteId};
pub use kz::{KzOperatorSystem, KzScalarParams};
pub use liealg::{Family, LieData};
pub use linalg::{CMat, C64};
pub use qspecial::{DeformParams, Sign};
pub use report::{emit_report, Case, Report};
