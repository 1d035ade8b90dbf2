//! Structure-preserving integrators for nonholonomic mechanical systems.
//!
//! The projected geometric nonholonomic integrator ([`gni`]) works in full
//! coordinates on any [`mech::ConstrainedSystem`]; the reduced
//! d'Alembert–Pontryagin integrator ([`rdp`]) works on systems with an
//! SE(2) symmetry via [`rdp::ReducedSystem`]. [`reference`] provides the
//! explicit Runge–Kutta baselines and [`bench`] the CLI plumbing.

// `!(x <= tol)` is used on purpose so that NaN fails the check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bench;
pub mod control;
pub mod error;
pub mod gni;
pub mod mech;
pub mod models;
pub mod newton;
pub mod rdp;
pub mod reference;
pub mod se2;

pub use error::{Error, Result};
