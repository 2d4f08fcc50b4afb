//! Entanglement generated in the spin degrees of freedom when two spin-1/2
//! particles scatter elastically.
//!
//! The crate is organized bottom-up:
//!
//! - [`su2`]: Clebsch-Gordan coefficients and Wigner D-matrices.
//! - [`spin_states`]: two-spin pure states in the product and coupled bases.
//! - [`entanglement`]: partial traces, von Neumann entropy, Schmidt coefficients.
//! - [`spin_smatrix`]: the rotationally invariant two-spin S-matrix.
//! - [`partial_wave`]: Galilean channel labels, phase-shift tables and the
//!   central-force S-matrix applied per partial wave.
//! - [`checks`]: the invariant suite behind `spinscat check`.

pub mod checks;
pub mod entanglement;
pub mod error;
pub mod partial_wave;
pub mod spin_smatrix;
pub mod spin_states;
pub mod su2;

pub use error::{Error, Result};
