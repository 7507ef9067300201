//! Numerical companion for the quasilinear equation `-Δ_m u = u^q |∇u|^p`.
//!
//! * [`params`] classifies exponent regimes and scans the structure conditions.
//! * [`bernstein`] evaluates the gradient-estimate trinomial and searches for
//!   admissible substitution frames.
//! * [`radial`] holds sampled radial profiles, the radial m-Laplacian, the exact
//!   inverse operator and the closed-form solution families.
//! * [`solver`] drives fixed-point, homotopy and eigenvalue computations.
//! * [`verify`] measures Harnack ratios, integral scaling laws and runs shooting probes.

// `!(x > 0.0)` style checks reject NaN along with out-of-range values
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bernstein;
pub mod error;
pub mod exec;
pub mod ode;
pub mod params;
pub mod quadrature;
pub mod radial;
pub mod solver;
pub mod verify;

pub use error::{Error, Result};
pub use exec::Execution;
pub use params::ProblemParams;
