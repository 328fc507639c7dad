//! Principal eigenvalue of the two-dimensional Dirac operator with infinite-mass
//! boundary conditions on smooth simply connected planar domains.
//!
//! Two independent solvers are provided: a multiquadric RBF collocation of the
//! first-order system (`dirac`) and the root of the first min-max level of a
//! nonlinear quadratic form (`varform`). `bounds` evaluates the closed-form
//! geometric bounds, `harness` runs seeded sweeps.

pub mod bounds;
pub mod config;
pub mod dirac;
pub mod discretize;
pub mod error;
pub mod geometry;
pub mod harness;
pub mod quadrature;
pub mod specfun;
pub mod varform;

pub use error::{Error, ErrorClass, Result};

/// Float with 17 significant digits, the CSV convention of every export.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Pin faer to one thread so results do not depend on the thread count.
pub(crate) fn sequential_linalg() {
    faer::set_global_parallelism(faer::Par::Seq);
}
