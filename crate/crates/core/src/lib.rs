//! Gaussian states of the open quantum harmonic oscillator: moment dynamics
//! for Karrlein–Grabert and Lindblad master equations, purity-of-state
//! conditions and linear-entropy production.

// `!(x > 0.0)` guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dynamics;
pub mod entropy;
pub mod error;
pub mod models;
pub mod purity;
pub mod state;

pub use error::{Error, Result};
pub use state::{entropy_from_nu, GaussianState, PhysConstants, UncertaintyClass, PURITY_REL_TOL};
