//! Numerical machinery for nonlocal elliptic equations with singular
//! nonlinearities, built on dense Nystrom discretizations of Green operators
//! whose kernels obey a two-sided interior/boundary estimate with parameters
//! `(s, gamma)`.
//!
//! The crate is organized around five layers:
//!
//! - [`geometry`]: domains, boundary-graded quadrature grids, grid functions;
//! - [`kernels`]: a catalog of Green kernels (closed-form fractional-Laplacian
//!   kernels on the interval and the radial ball, a spectral interval kernel,
//!   and a synthetic model kernel with free boundary exponent);
//! - [`operator`]: dense symmetric assembly with singularity-corrected entries,
//!   product-integrated images of singular densities, and operator-level checks;
//! - [`solvers`]: regularized Newton continuation for the pure singular problem,
//!   shifted outer iterations for source and absorption terms, and the principal
//!   eigenpair;
//! - [`regimes`]: critical-exponent arithmetic, boundary-class prediction, and
//!   log-log exponent fitting, plus a verification harness for the kernel-level
//!   estimates the solvers rely on.
//!
//! The `singular-green` binary exposes all of this behind `classify`, `solve`,
//! `verify`, `sweep`, and `eigen` subcommands; see [`config`].

pub mod config;
pub mod geometry;
pub mod kernels;
pub mod operator;
pub mod regimes;
pub mod solvers;

mod error;

pub use error::{Error, Result};
