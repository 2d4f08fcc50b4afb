//! Pure states of two spin-1/2 particles in the product basis
//! `|χ1 χ2⟩` and the coupled (singlet/triplet) basis `|s χ⟩`.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;
use std::sync::OnceLock;

use nalgebra::{Matrix2, Matrix4, Vector2, Vector4};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::su2::{self, AngularMomentum, Rotation};

/// Tolerance on `Σ|c|² = 1` for states that must be normalized.
pub const NORM_TOL: f64 = 1e-12;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum Basis {
    /// Amplitudes ordered `(|++⟩, |+-⟩, |-+⟩, |--⟩)`.
    Product,
    /// Amplitudes ordered `(|00⟩, |1-1⟩, |10⟩, |11⟩)`.
    Coupled,
}

impl Basis {
    pub fn labels(self) -> [&'static str; 4] {
        match self {
            Basis::Product => ["++", "+-", "-+", "--"],
            Basis::Coupled => ["00", "1-1", "10", "11"],
        }
    }

    fn name(self) -> &'static str {
        match self {
            Basis::Product => "product",
            Basis::Coupled => "coupled",
        }
    }
}

/// A single spin-1/2 state `a₊|+⟩ + a₋|-⟩`.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct SingleSpinState {
    amplitudes: Vector2<Complex64>,
}

impl SingleSpinState {
    pub fn new(up: Complex64, down: Complex64) -> Result<Self> {
        let norm_sqr = up.norm_sqr() + down.norm_sqr();
        if !norm_sqr.is_finite() || (norm_sqr - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized { norm_sqr });
        }
        Ok(Self {
            amplitudes: Vector2::new(up, down),
        })
    }

    pub fn real(up: f64, down: f64) -> Result<Self> {
        Self::new(Complex64::new(up, 0.0), Complex64::new(down, 0.0))
    }

    pub fn up() -> Self {
        Self {
            amplitudes: Vector2::new(ONE, ZERO),
        }
    }

    pub fn down() -> Self {
        Self {
            amplitudes: Vector2::new(ZERO, ONE),
        }
    }

    /// Spin polarized along the Bloch direction `(θ, φ)`.
    pub fn polarized(theta: f64, phi: f64) -> Self {
        let (s, c) = (theta / 2.0).sin_cos();
        Self {
            amplitudes: Vector2::new(Complex64::new(c, 0.0), Complex64::from_polar(s, phi)),
        }
    }

    pub fn amplitudes(&self) -> &Vector2<Complex64> {
        &self.amplitudes
    }
}

/// A two-spin-1/2 pure state tagged with the basis its amplitudes refer to.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct TwoSpinState {
    basis: Basis,
    amplitudes: Vector4<Complex64>,
}

impl TwoSpinState {
    pub fn new(basis: Basis, amplitudes: [Complex64; 4]) -> Self {
        Self {
            basis,
            amplitudes: Vector4::from(amplitudes),
        }
    }

    pub fn from_real(basis: Basis, amplitudes: [f64; 4]) -> Self {
        Self::new(basis, amplitudes.map(|a| Complex64::new(a, 0.0)))
    }

    /// Rescales `amplitudes` to unit norm.
    pub fn normalized(basis: Basis, amplitudes: [Complex64; 4]) -> Result<Self> {
        let state = Self::new(basis, amplitudes);
        let norm_sqr = state.norm_sqr();
        if !(norm_sqr.is_finite() && norm_sqr > 0.0) {
            return Err(Error::NotNormalized { norm_sqr });
        }
        Ok(Self {
            basis,
            amplitudes: state.amplitudes.map(|a| a / norm_sqr.sqrt()),
        })
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn amplitudes(&self) -> &Vector4<Complex64> {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn require_normalized(&self) -> Result<()> {
        let norm_sqr = self.norm_sqr();
        if !norm_sqr.is_finite() || (norm_sqr - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized { norm_sqr });
        }
        Ok(())
    }

    fn require_basis(&self, basis: Basis) -> Result<()> {
        if self.basis != basis {
            return Err(Error::WrongBasis {
                expected: basis.name(),
            });
        }
        Ok(())
    }

    /// The same physical state expressed in `basis`.
    pub fn in_basis(&self, basis: Basis) -> Self {
        let c = coupling_matrix().map(|x| Complex64::new(x, 0.0));
        let amplitudes = match (self.basis, basis) {
            (Basis::Product, Basis::Coupled) => c * self.amplitudes,
            (Basis::Coupled, Basis::Product) => c.transpose() * self.amplitudes,
            _ => self.amplitudes,
        };
        Self { basis, amplitudes }
    }

    /// `⟨self|other⟩`, converting `other` to this state's basis.
    pub fn inner(&self, other: &Self) -> Complex64 {
        self.amplitudes.dotc(&other.in_basis(self.basis).amplitudes)
    }

    /// Product-basis amplitudes as the matrix `c[χ1][χ2]`.
    pub fn amplitude_matrix(&self) -> Matrix2<Complex64> {
        let a = self.in_basis(Basis::Product).amplitudes;
        Matrix2::new(a[0], a[1], a[2], a[3])
    }

    /// Largest absolute amplitude difference after converting `other` to this basis.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let other = other.in_basis(self.basis);
        self.amplitudes
            .iter()
            .zip(other.amplitudes.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

impl fmt::Display for TwoSpinState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (amp, label) in self.amplitudes.iter().zip(self.basis.labels()) {
            if amp.norm() < 1e-15 {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({:.6}{:+.6}i)|{label}⟩", amp.re, amp.im)?;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// `⟨s χ | χ1 χ2⟩` with rows in coupled order and columns in product order.
pub fn coupling_matrix() -> &'static Matrix4<f64> {
    static MATRIX: OnceLock<Matrix4<f64>> = OnceLock::new();
    MATRIX.get_or_init(|| {
        let m = su2::clebsch_gordan_matrix(AngularMomentum::HALF, AngularMomentum::HALF)
            .expect("spin-1/2 coupling is always valid");
        Matrix4::from_fn(|r, c| m[(r, c)])
    })
}

/// `|φ1⟩ ⊗ |φ2⟩` in the product basis.
pub fn product_state(a: &SingleSpinState, b: &SingleSpinState) -> TwoSpinState {
    let (a, b) = (a.amplitudes, b.amplitudes);
    TwoSpinState::new(Basis::Product, [a[0] * b[0], a[0] * b[1], a[1] * b[0], a[1] * b[1]])
}

/// The canonical product in-state `cos θ |++⟩ + sin θ |+-⟩`, `θ ∈ [0, π)`.
pub fn in_state_from_angle(theta: f64) -> Result<TwoSpinState> {
    if !(0.0..std::f64::consts::PI).contains(&theta) {
        return Err(Error::OutOfRange {
            name: "theta",
            value: theta,
            allowed: "[0, π)",
        });
    }
    let (s, c) = theta.sin_cos();
    Ok(TwoSpinState::from_real(Basis::Product, [c, s, 0.0, 0.0]))
}

pub fn to_coupled(state: &TwoSpinState) -> Result<TwoSpinState> {
    state.require_basis(Basis::Product)?;
    Ok(state.in_basis(Basis::Coupled))
}

pub fn to_product(state: &TwoSpinState) -> Result<TwoSpinState> {
    state.require_basis(Basis::Coupled)?;
    Ok(state.in_basis(Basis::Product))
}

/// The four maximally entangled kets of the magic basis.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum MagicKet {
    EprPlus,
    EprMinus,
    BellPlus,
    BellMinus,
}

impl MagicKet {
    pub const ALL: [MagicKet; 4] = [
        MagicKet::EprPlus,
        MagicKet::EprMinus,
        MagicKet::BellPlus,
        MagicKet::BellMinus,
    ];

    pub fn label(self) -> &'static str {
        match self {
            MagicKet::EprPlus => "EPR+",
            MagicKet::EprMinus => "EPR-",
            MagicKet::BellPlus => "Bell+",
            MagicKet::BellMinus => "Bell-",
        }
    }

    /// Product-basis form.
    pub fn state(self) -> TwoSpinState {
        let h = FRAC_1_SQRT_2;
        let amps = match self {
            MagicKet::EprPlus => [0.0, h, h, 0.0],
            MagicKet::EprMinus => [0.0, h, -h, 0.0],
            MagicKet::BellPlus => [h, 0.0, 0.0, h],
            MagicKet::BellMinus => [h, 0.0, 0.0, -h],
        };
        TwoSpinState::from_real(Basis::Product, amps)
    }
}

/// `[EPR+, EPR-, Bell+, Bell-]` in the product basis.
pub fn magic_basis() -> [TwoSpinState; 4] {
    MagicKet::ALL.map(MagicKet::state)
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum MagicFamily {
    /// Built on `|+-⟩, |-+⟩`.
    Epr,
    /// Built on `|++⟩, |--⟩`.
    Bell,
}

/// `(e^{iφ}/√2)(|+-⟩ ± i|-+⟩)` or `(e^{iφ}/√2)(|++⟩ ± i|--⟩)`.
///
/// Another family of maximally entangled states; `phase` is a free overall
/// phase and `plus` selects the sign of the relative `i`.
pub fn phased_maximal(family: MagicFamily, plus: bool, phase: f64) -> TwoSpinState {
    let g = Complex64::from_polar(FRAC_1_SQRT_2, phase);
    let second = if plus { g * Complex64::i() } else { -g * Complex64::i() };
    let amps = match family {
        MagicFamily::Epr => [ZERO, g, second, ZERO],
        MagicFamily::Bell => [g, ZERO, ZERO, second],
    };
    TwoSpinState::new(Basis::Product, amps)
}

/// `(u1 ⊗ u2)|ψ⟩` for a product-basis state.
pub fn apply_local(state: &TwoSpinState, u1: &Matrix2<Complex64>, u2: &Matrix2<Complex64>) -> Result<TwoSpinState> {
    state.require_basis(Basis::Product)?;
    Ok(TwoSpinState {
        basis: Basis::Product,
        amplitudes: u1.kronecker(u2) * state.amplitudes,
    })
}

/// The spin-1/2 rotation matrix `D^{1/2}(r)` in `(+, -)` order.
pub fn spin_half_rotation(r: Rotation) -> Matrix2<Complex64> {
    let d = su2::wigner_big_d_matrix(AngularMomentum::HALF, r).expect("spin-1/2 labels are valid");
    Matrix2::from_fn(|i, j| d[(i, j)])
}

/// Rotates both spins by `r`, i.e. applies `D^{1/2}(r) ⊗ D^{1/2}(r)`.
pub fn rotate(state: &TwoSpinState, r: Rotation) -> Result<TwoSpinState> {
    let d = spin_half_rotation(r);
    apply_local(state, &d, &d)
}

/// Rotates a coupled-basis state with the block representation `D^0 ⊕ D^1`.
pub fn rotate_coupled(state: &TwoSpinState, r: Rotation) -> Result<TwoSpinState> {
    state.require_basis(Basis::Coupled)?;
    let d1 = su2::wigner_big_d_matrix(AngularMomentum::ONE, r).expect("spin-1 labels are valid");
    // coupled index k = 1, 2, 3 holds χ = k - 2; D^1 rows run χ = 1, 0, -1
    let block = Matrix4::from_fn(|row, col| match (row, col) {
        (0, 0) => ONE,
        (0, _) | (_, 0) => ZERO,
        _ => d1[(3 - row, 3 - col)],
    });
    Ok(TwoSpinState {
        basis: Basis::Coupled,
        amplitudes: block * state.amplitudes,
    })
}
