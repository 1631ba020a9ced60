//! Solvers and verification experiments for constant-mean-curvature graphs over
//! catenoidal necks and over their small-scale limit, the unit disk.
//!
//! A neck of scale `tau` is the truncated catenoid `tau * (cosh(s) e_r(x) + s e_z)`
//! over the cylinder `S^1 x [-l, l]`, truncated at `l = arccosh(1/tau)` so that the
//! boundary circles sit at unit distance from the axis. Graphs are taken along the
//! unit normal, and the central object is the weighted graph function
//! `h' = h / (tau cosh s)`: the weight is the distance to the axis, so bounds on `h'`
//! are decay statements for the physical graph `h`.
//!
//! Module map:
//! - [`geometry`]: parametrization, normals, neck parameters, matching scale.
//! - [`modes`]: angular Fourier analysis, lower modes (|k| <= 1), waist signature,
//!   the six-dimensional Jacobi-field basis and signature normalization.
//! - [`operators`]: discrete immersions, mean curvature, the weighted operator
//!   `H'(u) = cosh(s) H(cosh(s) u)` and its hand-assembled linearization.
//! - [`linear`]: modewise two-point boundary-value solvers, the modified (normalized,
//!   higher-trace) Poisson problem, decay solves, variation-of-parameters profiles,
//!   and the Dirichlet spectrum probe used by the nondegeneracy sweep.
//! - [`nonlinear`]: the frozen-Jacobian Picard solver for prescribed mean curvature
//!   `delta` and higher-mode boundary data on a neck.
//! - [`disk`]: the polar-grid solver for the disk limit, the spherical-cap closed
//!   form, pullbacks of disk solutions onto necks, and the tau-derivative limit solve.
//! - [`norms`]: weighted windowed grid norms and least-squares exponent fits.
//! - [`experiments`]: the decay, tau-continuity, and tau-derivative experiments.
//! - [`verify`]: the acceptance checks run by `catcmc verify` and the test suite.

// Lint posture for numerical code: `!(x > 0)` deliberately rejects NaN together
// with nonpositive values, and index loops over several parallel arrays read
// more clearly here than chained iterators.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![allow(clippy::needless_range_loop)]
#![allow(clippy::manual_is_multiple_of)]

pub mod disk;
pub mod error;
pub mod experiments;
mod fft;
pub mod geometry;
pub mod linear;
pub mod modes;
pub mod nonlinear;
pub mod norms;
pub mod operators;
mod tridiag;
pub mod verify;

pub use error::{Error, Result};
pub use geometry::{CylinderField, NeckParams, Point3};
