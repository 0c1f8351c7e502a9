//! Similarity solutions of one-phase Stefan problems for the diffusion-convection
//! equation with temperature-dependent conductivity, heat capacity and
//! convective speed.
//!
//! The similarity variable `xi = x / (2 sqrt(alpha0 t))` reduces the moving-boundary
//! problem to a profile `f` on `[0, lambda]` and a scalar front coefficient `lambda`,
//! with the free boundary at `s(t) = 2 lambda sqrt(alpha0 t)`. Both are found by a
//! double fixed point:
//!
//! * an inner Picard iteration `f <- H(f)` for fixed `lambda`, where `H` is an
//!   integral operator built from the kernels `U`, `I`, `E` and `Phi`
//!   ([`kernels`], [`fixed_point`]);
//! * an outer scalar root find of `V(lambda) = lambda` ([`lambda_solver`]).
//!
//! The four fixed-face conditions (prescribed temperature, prescribed flux,
//! convective and radiative-convective) are interchangeable strategies held in a
//! [`boundary::BoundaryRegistry`]. The [`existence`] module evaluates the
//! sufficient conditions under which the iteration is guaranteed to converge and
//! a root exists, [`closed_form`] gives the constant-coefficient oracles,
//! [`reconstruct`] maps results back to physical variables and [`pde_verifier`]
//! re-integrates the original PDE as an independent check.
//!
//! ```
//! use std::sync::Arc;
//! use stefan_core::boundary::Dirichlet;
//! use stefan_core::coefficients::DimensionlessProblem;
//! use stefan_core::lambda_solver::{solve_lambda, SolverSettings};
//!
//! let prob = DimensionlessProblem::constant(0.0, Arc::new(Dirichlet::new(1.0).unwrap())).unwrap();
//! let report = solve_lambda(&prob, &SolverSettings::default()).unwrap();
//! assert!((report.lambda - 0.6201).abs() < 1e-3);
//! ```

pub mod boundary;
pub mod closed_form;
pub mod coefficients;
pub mod error;
pub mod existence;
pub mod fixed_point;
pub mod kernels;
pub mod lambda_solver;
pub mod pde_verifier;
pub mod quadrature;
pub mod reconstruct;

pub use error::{Error, Result};
