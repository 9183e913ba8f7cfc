//! Pseudospectral simulation and verification toolkit for defocusing
//! nonlinear Schrödinger equations with non-vanishing data at infinity.
//!
//! The state is written as u = phi + w: a fixed background profile phi
//! carrying the boundary condition |u|^2 -> rho0, plus an H^1 perturbation
//! w that the solvers evolve. The crate provides
//!
//! * polynomial nonlinearities with executable certifiers for the
//!   defocusing and growth hypotheses ([`nonlinearity`]);
//! * a periodic spectral core: FFT-backed multipliers, derivatives and
//!   the Lebesgue/Sobolev/mixed norms ([`grid`], [`field`], [`spectral`],
//!   [`norms`]);
//! * background profiles and their regularity checks ([`background`]);
//! * the free Schrödinger group, the Duhamel integral and empirical
//!   dispersive-estimate probes ([`propagator`]);
//! * the nonlinear forcing, its smooth/quadratic splitting and the
//!   low/high frequency decomposition ([`forcing`]);
//! * two independent time integrators — Strang splitting and a
//!   fixed-point iteration of the integral equation — that cross-validate
//!   each other ([`solver`]);
//! * the conserved Ginzburg–Landau energy and drift diagnostics
//!   ([`conservation`]);
//! * deterministic seeded random fields and a binary snapshot format
//!   ([`rng`], [`snapshot`]).

// `!(x > 0.0)` style guards are used throughout so NaN parameters land in
// the error branch; rewriting them as `x <= 0.0` would silently accept NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod background;
pub mod conservation;
pub mod error;
pub mod field;
pub mod forcing;
pub mod grid;
pub mod nonlinearity;
pub mod norms;
pub mod propagator;
pub mod rng;
pub mod snapshot;
pub mod solver;
pub mod spectral;

pub use error::{Error, Result};
pub use field::Field;
pub use grid::{Grid, GridSummary};
pub use nonlinearity::{Nonlinearity, NonlinearityKind};
