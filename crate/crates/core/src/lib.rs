//! Driven-dissipative condensation as the output of a three-level heat engine.
//!
//! A working medium with levels e1 = 0 < e2 < e3 couples to a cold phonon
//! bath (1 ↔ 2), a hot pump bath (1 ↔ 3) and a classical condensate field
//! (2 ↔ 3). The crate assembles the non-secular master equation in the frame
//! rotating with the condensate, solves its steady state, evaluates energy
//! currents, closes the gain–loss balance `M R(N) = γ N` for the condensate
//! population and maps phase boundaries over bath parameters.
//!
//! Internal units: energies and rates in ps⁻¹ (ħ = 1), temperatures in K.

// `!(x > 0.0)` is used deliberately so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod condensate;
pub mod error;
pub mod liouville;
pub mod model;
pub mod phases;
pub mod thermo;

pub use error::{Error, Result};
pub use model::{BathKind, BathSpec, DressedFrame, EngineParams, Scenario, UnitSystem};
