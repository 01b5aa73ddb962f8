//! Multi-setting Bell operators for qudit GHZ scenarios.
//!
//! For a scenario of `N` parties, `M` measurement settings per party, and `d`
//! outcomes per measurement, this crate
//!
//! - builds the unitary observable family (cyclic shift conjugated by exact
//!   rational phase shifts) and the Bell operator over it ([`observables`],
//!   [`quantum`]),
//! - certifies that the generalized GHZ state reaches the quantum bound
//!   `d - 1`, both by exact phase bookkeeping and by a dense eigenvalue
//!   cross-check ([`quantum`]),
//! - computes exact classical (local-hidden-variable) bounds for tripartite
//!   scenarios by two independent routes: exhaustive search over deterministic
//!   assignments ([`lhv`]) and congruence-infeasibility analysis over `Z_d`
//!   via Smith normal form ([`congruence`]),
//! - cross-validates the two classical oracles and emits machine-readable
//!   reports ([`report`]).
//!
//! All operator phases are exact roots of unity ([`cyclotomic`]); floating
//! point enters only in dense cross-checks and final report rendering.

pub mod congruence;
pub mod cyclotomic;
pub mod error;
pub mod lhv;
pub mod observables;
pub mod quantum;
pub mod report;

pub use error::{Error, Result};
