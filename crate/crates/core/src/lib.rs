//! Spectral analysis of one-dimensional Dirac operators
//! `L(v) y = iσ₃ y′ + v(x) y` on `[0, π]` with regular boundary conditions.
//!
//! The crate is organised bottom-up:
//!
//! * [`bc_algebra`] normalizes and classifies boundary conditions and computes
//!   characteristic roots, τ branches and reduced-matrix eigenvectors.
//! * [`free_basis`] builds the free eigen/associated system Φ, its
//!   biorthogonal system Φ̃, the isomorphism `A` and Riesz constants.
//! * [`potential_rep`] represents `v = [[0, P], [Q, 0]]` and computes the
//!   Fourier matrix elements of `V` in Φ-coordinates.
//! * [`localization`] evaluates the dominating Hilbert–Schmidt sums and picks
//!   the rectangle/disc geometry that isolates the perturbed spectrum.
//! * [`resolvent_proj`] assembles the truncated operator, its resolvent and
//!   contour-quadrature Riesz projections.
//! * [`spectral_solver`] runs eigensolves, deviation diagnostics,
//!   reconstruction checks and pointwise-convergence experiments.
//! * [`config`] and [`report`] handle JSON input and CSV/JSON output, and
//!   [`pipeline`] strings the stages together.

pub mod bc_algebra;
pub mod config;
pub mod expoly;
pub mod free_basis;
pub mod linalg;
pub mod localization;
pub mod pipeline;
pub mod potential_rep;
pub mod quadrature;
pub mod report;
pub mod resolvent_proj;
pub mod spectral_solver;
pub mod testbed;

pub use num_complex::Complex64 as C64;

pub use bc_algebra::{BcClass, BcError, CanonicalBc, CharData, NonStrictKind, RawBc, Roots, Taus, VectorData};
pub use free_basis::{BasisError, BasisFamily, Truncation};
pub use localization::{LocalizationError, LocalizationPlan};
pub use potential_rep::{PotentialError, PotentialSpec, WTable};
pub use resolvent_proj::{Contour, ProjectionError, ProjectionMatrix, TruncatedOperator};
