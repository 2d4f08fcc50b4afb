//! Entanglement of pure two-spin states: partial traces, von Neumann entropy
//! and Schmidt coefficients.

use nalgebra::Matrix2;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::spin_states::{Basis, TwoSpinState};

/// Tolerance for Hermiticity, unit trace and positivity of a reduced density.
pub const DENSITY_TOL: f64 = 1e-12;

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Particle {
    First,
    Second,
}

/// A validated single-spin density matrix.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct ReducedDensity(Matrix2<Complex64>);

impl ReducedDensity {
    pub fn new(matrix: Matrix2<Complex64>) -> Result<Self> {
        if matrix.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::InvalidDensity("non-finite entry".into()));
        }
        let herm = (matrix - matrix.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if herm > DENSITY_TOL {
            return Err(Error::InvalidDensity(format!("not Hermitian (deviation {herm:e})")));
        }
        let trace = matrix.trace();
        if (trace - Complex64::new(1.0, 0.0)).norm() > DENSITY_TOL {
            return Err(Error::InvalidDensity(format!("trace is {trace}, expected 1")));
        }
        let rho = Self(matrix);
        let (_, low) = rho.eigenvalues_unclamped();
        if low < -DENSITY_TOL {
            return Err(Error::InvalidDensity(format!("negative eigenvalue {low:e}")));
        }
        Ok(rho)
    }

    pub fn diagonal(p_up: f64, p_down: f64) -> Result<Self> {
        Self::new(Matrix2::new(
            Complex64::new(p_up, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(p_down, 0.0),
        ))
    }

    pub fn matrix(&self) -> &Matrix2<Complex64> {
        &self.0
    }

    fn eigenvalues_unclamped(&self) -> (f64, f64) {
        let a = self.0[(0, 0)].re;
        let d = self.0[(1, 1)].re;
        let b = self.0[(0, 1)];
        let mean = 0.5 * (a + d);
        let radius = (0.25 * (a - d) * (a - d) + b.norm_sqr()).sqrt();
        (mean + radius, mean - radius)
    }

    /// Eigenvalues `(larger, smaller)` from the trace/determinant quadratic,
    /// clamped into `[0, 1]`.
    pub fn eigenvalues(&self) -> (f64, f64) {
        let (hi, lo) = self.eigenvalues_unclamped();
        (hi.clamp(0.0, 1.0), lo.clamp(0.0, 1.0))
    }
}

/// `-p log₂ p` with `0 log 0 = 0`.
fn entropy_term(p: f64) -> f64 {
    if p <= 0.0 {
        0.0
    } else {
        -p * p.log2()
    }
}

/// Reduced density matrix of one particle of a normalized product-basis state.
pub fn reduced_density(state: &TwoSpinState, keep: Particle) -> Result<ReducedDensity> {
    if state.basis() != Basis::Product {
        return Err(Error::WrongBasis { expected: "product" });
    }
    state.require_normalized()?;
    let c = state.amplitude_matrix();
    let rho = match keep {
        // ρ1[i][i'] = Σ_j c[i][j] c*[i'][j]
        Particle::First => c * c.adjoint(),
        // ρ2[j][j'] = Σ_i c[i][j] c*[i][j']
        Particle::Second => c.transpose() * c.conjugate(),
    };
    ReducedDensity::new(rho)
}

/// `S(ρ) = -tr ρ log₂ ρ` in bits.
pub fn von_neumann_entropy(rho: &ReducedDensity) -> f64 {
    let (hi, lo) = rho.eigenvalues();
    entropy_term(hi) + entropy_term(lo)
}

#[derive(Copy, Clone, Debug, PartialEq, Serialize)]
pub struct EntanglementReport {
    /// Schmidt coefficients `(λ+, λ-)`, `λ+ ≥ λ-`.
    pub schmidt: (f64, f64),
    /// Eigenvalues `((1+x)/2, (1-x)/2)` of either reduced density.
    pub eigenvalues: (f64, f64),
    pub entropy_bits: f64,
}

impl EntanglementReport {
    /// `x = λ+² - λ-²`; 1 for product states and 0 for maximal entanglement.
    pub fn x(&self) -> f64 {
        self.eigenvalues.0 - self.eigenvalues.1
    }
}

/// Entropy of entanglement `E = S(ρ1)` of a normalized pure state in either basis.
pub fn entanglement_entropy(state: &TwoSpinState) -> Result<EntanglementReport> {
    let rho = reduced_density(&state.in_basis(Basis::Product), Particle::First)?;
    let eigenvalues = rho.eigenvalues();
    Ok(EntanglementReport {
        schmidt: (eigenvalues.0.sqrt(), eigenvalues.1.sqrt()),
        eigenvalues,
        entropy_bits: von_neumann_entropy(&rho),
    })
}

/// Schmidt coefficients as singular values of the amplitude matrix `c[χ1][χ2]`.
pub fn schmidt_coefficients(state: &TwoSpinState) -> Result<(f64, f64)> {
    state.require_normalized()?;
    let sv = state.amplitude_matrix().singular_values();
    Ok((sv[0].max(sv[1]), sv[0].min(sv[1])))
}

/// `x = √(1 - sin⁴θ sin²(2Δδ))` for `Δδ = δ0 - δ1`.
pub fn closed_form_x(theta: f64, delta0: f64, delta1: f64) -> f64 {
    let s2 = theta.sin().powi(2);
    let p = (2.0 * (delta0 - delta1)).sin();
    (1.0 - s2 * s2 * p * p).max(0.0).sqrt()
}

/// Entanglement in bits of the canonical in-state `cos θ|++⟩ + sin θ|+-⟩`
/// after the spin S-matrix with channel phases `(δ0, δ1)`:
///
/// ```text
/// E = 1 - ½ log₂[(1+x)^(1+x) (1-x)^(1-x)]
/// ```
pub fn closed_form_entanglement(theta: f64, delta0: f64, delta1: f64) -> f64 {
    let x = closed_form_x(theta, delta0, delta1);
    let term = |y: f64| if y <= 0.0 { 0.0 } else { y * y.log2() };
    1.0 - 0.5 * (term(1.0 + x) + term(1.0 - x))
}
