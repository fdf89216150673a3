//! Numerical verification toolkit for a sharp, conformally invariant gap
//! inequality for Yang-Mills connections on four-manifolds.
//!
//! Modules, bottom up:
//! - [`forms4`]: 2-forms on oriented Euclidean 4-space, Hodge star, circ product,
//!   self-dual Weyl-type operators.
//! - [`liealg`]: skew matrix Lie algebras, Lie-valued 2-forms, gamma constants.
//! - [`instanton`]: the BPST connection family on the flat chart.
//! - [`quad4`]: quadrature over R^4 (energy, Chern-Weil number, L2 norms).
//! - [`conformal`]: modified scalar curvature, conformal Laplacian, first
//!   eigenvalue and Yamabe quotients on the round 4-sphere.
//! - [`report`]: gap inequality evaluation, energy thresholds, suites.

// `!(x > 0.0)` rejects NaN on purpose; index loops read better in small matrix code.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod conformal;
pub mod error;
pub mod forms4;
pub mod instanton;
pub mod liealg;
pub mod quad4;
pub mod report;
pub mod sampling;

pub use error::{Error, Result};
