//! Solvers for large sparse linear systems and continuous Sylvester
//! equations built on two-parameter alternating-direction splitting, with
//! both formula-based and Gaussian-process-regression-based selection of
//! the splitting parameters.
//!
//! The pieces fit together like this:
//!
//! - [`sparse`] and [`dense`] hold the matrix/vector kernels.
//! - [`krylov`] provides the CG/CGNE inner solvers and the power-iteration
//!   spectral estimators.
//! - [`gadi`] implements the exact-subsolve outer iterations (GADI-HS, HSS,
//!   DRS) and the sweep error operators; [`inexact`] the practical variant
//!   with loose inner tolerances (and IHSS at omega = 0).
//! - [`sylvester`] solves AX + XB = C by the same alternation with banded
//!   direct factorizations.
//! - [`params`] computes quasi-optimal splitting parameters from spectral
//!   summaries; [`gpr`] learns the size-to-alpha map from traversal data.
//! - [`problems`] generates the benchmark families and [`traverse`] runs
//!   parameter grid searches over them.

pub mod dense;
pub mod error;
pub mod gadi;
pub mod gpr;
pub mod inexact;
pub mod krylov;
pub mod matrix_market;
pub mod params;
pub mod problems;
pub mod sparse;
pub mod sylvester;
pub mod traverse;

pub use dense::DenseMatrix;
pub use error::{Error, Result};
pub use gadi::{GadiConfig, SolveReport, Termination};
pub use gpr::{GprModel, Prediction};
pub use inexact::InexactConfig;
pub use params::SpectralSummary;
pub use problems::{LinearProblem, ProblemFamily, SylvesterProblem};
pub use sparse::SparseMatrix;
pub use sylvester::SylvesterReport;
pub use traverse::{GridSpec, TraversalMethod, TraversalResult, TraversalSettings};
