//! The rotationally invariant S-matrix of two spin-1/2 particles.
//!
//! Rotational invariance forces the S-matrix to be diagonal in the coupled
//! basis, `⟨s'χ'|S|sχ⟩ = δ_{s's} δ_{χ'χ} e^{2iδ_s}`, so it is fully described
//! by the singlet and triplet phases `δ0` and `δ1`.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4};

use nalgebra::Matrix4;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::spin_states::{coupling_matrix, Basis, TwoSpinState};

/// Singlet and triplet phases in radians. Only `e^{2iδ_s}` is physical, so
/// phases differing by π describe the same S-matrix; they are not reduced.
#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpinPhasePair {
    pub delta0: f64,
    pub delta1: f64,
}

impl SpinPhasePair {
    pub const fn new(delta0: f64, delta1: f64) -> Self {
        Self { delta0, delta1 }
    }

    /// `Δδ = δ0 - δ1`.
    pub fn delta_diff(&self) -> f64 {
        self.delta0 - self.delta1
    }

    /// `e^{2iδ_s}` for total spin `s ∈ {0, 1}`.
    pub fn channel_factor(&self, s: u32) -> Complex64 {
        let delta = if s == 0 { self.delta0 } else { self.delta1 };
        Complex64::from_polar(1.0, 2.0 * delta)
    }

    // coupled order (|00⟩, |1-1⟩, |10⟩, |11⟩)
    fn coupled_diagonal(&self) -> [Complex64; 4] {
        let (singlet, triplet) = (self.channel_factor(0), self.channel_factor(1));
        [singlet, triplet, triplet, triplet]
    }
}

/// Applies the S-matrix to a normalized state, returned in the caller's basis.
pub fn apply_spin_smatrix(state: &TwoSpinState, phases: SpinPhasePair) -> Result<TwoSpinState> {
    state.require_normalized()?;
    let coupled = state.in_basis(Basis::Coupled);
    let mut amps: [Complex64; 4] = (*coupled.amplitudes()).into();
    for (a, f) in amps.iter_mut().zip(phases.coupled_diagonal()) {
        *a *= f;
    }
    Ok(TwoSpinState::new(Basis::Coupled, amps).in_basis(state.basis()))
}

/// The S-matrix as a 4x4 unitary acting on product-basis amplitudes.
pub fn smatrix_as_operator(phases: SpinPhasePair) -> Matrix4<Complex64> {
    let c = coupling_matrix().map(|x| Complex64::new(x, 0.0));
    let diag = Matrix4::from_diagonal(&phases.coupled_diagonal().into());
    c.transpose() * diag * c
}

/// The maximally entangled out-state reached from `|+-⟩` when `2Δδ = π/2`:
/// `(e^{2iδ1}/√2)(|10⟩ + i|00⟩)`, in the coupled basis.
pub fn maximal_out_state(delta1: f64) -> TwoSpinState {
    let g = Complex64::from_polar(FRAC_1_SQRT_2, 2.0 * delta1);
    let zero = Complex64::new(0.0, 0.0);
    TwoSpinState::new(Basis::Coupled, [g * Complex64::i(), zero, g, zero])
}

/// Phases realizing the maximal case for a given triplet phase.
pub fn maximal_phases(delta1: f64) -> SpinPhasePair {
    SpinPhasePair::new(delta1 + FRAC_PI_4, delta1)
}
