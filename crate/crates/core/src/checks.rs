//! Self-check suite: each property is sampled with a fixed seed and reports
//! the worst deviation it saw against its tolerance.

use std::f64::consts::PI;

use nalgebra::{DMatrix, Matrix4};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::entanglement::{closed_form_entanglement, entanglement_entropy, reduced_density, von_neumann_entropy, Particle};
use crate::partial_wave::{apply_central_smatrix, central_smatrix_total_j, couple_orbital_spin, PartialWaveLabels, PhaseShiftTable};
use crate::spin_smatrix::{apply_spin_smatrix, smatrix_as_operator, SpinPhasePair};
use crate::spin_states::{in_state_from_angle, product_state, spin_half_rotation, Basis, SingleSpinState, TwoSpinState};
use crate::su2::{self, AngularMomentum, Projection, Rotation};
use crate::Result;

const SEED: u64 = 0x5eed_2005;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub worst: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl CheckOutcome {
    fn new(name: &'static str, worst: f64, tolerance: f64) -> Self {
        Self {
            name,
            worst,
            tolerance,
            passed: worst.is_finite() && worst < tolerance,
        }
    }
}

fn random_rotation(rng: &mut impl Rng) -> Rotation {
    Rotation::new(rng.gen_range(0.0..2.0 * PI), rng.gen_range(0.0..PI), rng.gen_range(0.0..2.0 * PI))
}

fn random_phases(rng: &mut impl Rng) -> SpinPhasePair {
    SpinPhasePair::new(rng.gen_range(-PI..PI), rng.gen_range(-PI..PI))
}

fn max_norm<'a>(it: impl IntoIterator<Item = &'a Complex64>) -> f64 {
    it.into_iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn wigner_unitarity(rng: &mut impl Rng) -> Result<f64> {
    let mut worst = 0.0_f64;
    for _ in 0..100 {
        let r = random_rotation(rng);
        for twice_j in 0..=8 {
            let d = su2::wigner_big_d_matrix(AngularMomentum::from_twice(twice_j), r)?;
            let n = d.nrows();
            worst = worst.max(max_norm((&d * d.adjoint() - DMatrix::identity(n, n)).iter()));
        }
    }
    Ok(worst)
}

fn cgc_orthogonality() -> Result<f64> {
    let mut worst = 0.0_f64;
    for tj1 in 0..=4 {
        for tj2 in 0..=4 {
            let (j1, j2) = (AngularMomentum::from_twice(tj1), AngularMomentum::from_twice(tj2));
            let m = su2::clebsch_gordan_matrix(j1, j2)?;
            let n = m.nrows();
            worst = worst.max((&m * m.transpose() - DMatrix::identity(n, n)).abs().max());
            worst = worst.max((m.transpose() * &m - DMatrix::identity(n, n)).abs().max());
        }
    }
    Ok(worst)
}

fn smatrix_unitarity(rng: &mut impl Rng) -> f64 {
    (0..100)
        .map(|_| {
            let s = smatrix_as_operator(random_phases(rng));
            max_norm((s * s.adjoint() - Matrix4::identity()).iter())
        })
        .fold(0.0, f64::max)
}

fn rotational_invariance(rng: &mut impl Rng) -> f64 {
    (0..100)
        .map(|_| {
            let s = smatrix_as_operator(random_phases(rng));
            let d = spin_half_rotation(random_rotation(rng));
            let dd = d.kronecker(&d);
            max_norm((dd * s * dd.adjoint() - s).iter())
        })
        .fold(0.0, f64::max)
}

fn closed_form_agreement() -> Result<f64> {
    let n = 64;
    let mut worst = 0.0_f64;
    for i in 0..n {
        let theta = PI * i as f64 / n as f64;
        let state = in_state_from_angle(theta)?;
        for k in 0..n {
            let dd = PI * k as f64 / n as f64;
            let phases = SpinPhasePair::new(dd, 0.0);
            let piped = entanglement_entropy(&apply_spin_smatrix(&state, phases)?)?.entropy_bits;
            worst = worst.max((piped - closed_form_entanglement(theta, phases.delta0, phases.delta1)).abs());
        }
    }
    Ok(worst)
}

fn marginal_symmetry(rng: &mut impl Rng) -> Result<f64> {
    let mut worst = 0.0_f64;
    for _ in 0..1000 {
        let amps = [(); 4].map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        let s = TwoSpinState::normalized(Basis::Product, amps)?;
        let s1 = von_neumann_entropy(&reduced_density(&s, Particle::First)?);
        let s2 = von_neumann_entropy(&reduced_density(&s, Particle::Second)?);
        worst = worst.max((s1 - s2).abs());
    }
    Ok(worst)
}

fn reduction_theorem(rng: &mut impl Rng) -> Result<f64> {
    let q_grid: Vec<f64> = (0..=20).map(|k| 0.1 * k as f64).collect();
    let channels: Vec<(u32, u32)> = (0..=4).flat_map(|l| [(l, 0), (l, 1)]).collect();
    let offsets: Vec<f64> = channels.iter().map(|_| rng.gen_range(-PI..PI)).collect();
    let slopes: Vec<f64> = channels.iter().map(|_| rng.gen_range(-2.0..2.0)).collect();
    let table = PhaseShiftTable::from_fn(&channels, &q_grid, |l, s, q| {
        let i = (2 * l + s) as usize;
        offsets[i] + slopes[i] * q
    })?;
    let mut worst = 0.0_f64;
    for l in 0..=4u32 {
        let l_am = AngularMomentum::integer(l);
        for _ in 0..20 {
            let q = rng.gen_range(0.0..2.0);
            let labels = PartialWaveLabels::new([0.0; 3], q, l_am, Projection::integer(0))?;
            for _ in 0..10 {
                let a = SingleSpinState::polarized(rng.gen_range(0.0..PI), rng.gen_range(0.0..2.0 * PI));
                let b = SingleSpinState::polarized(rng.gen_range(0.0..PI), rng.gen_range(0.0..2.0 * PI));
                let out = apply_central_smatrix(&a, &b, &labels, &table)?;
                let spin_only = apply_spin_smatrix(&product_state(&a, &b), table.spin_phases(l, q)?)?;
                worst = worst.max(out.spin.max_abs_diff(&spin_only));
            }
        }
    }
    Ok(worst)
}

fn coupling_orthogonality() -> Result<f64> {
    let mut worst = 0.0_f64;
    for l in 0..=4 {
        for twice_s in 0..=2 {
            let t = couple_orbital_spin(AngularMomentum::integer(l), AngularMomentum::from_twice(twice_s))?;
            worst = worst.max(t.orthogonality_error());
        }
    }
    Ok(worst)
}

fn total_j_diagonal(rng: &mut impl Rng) -> Result<f64> {
    let mut worst = 0.0_f64;
    for l in 0..=4 {
        let s = central_smatrix_total_j(AngularMomentum::integer(l), random_phases(rng))?;
        worst = worst.max(s.max_off_diagonal());
    }
    Ok(worst)
}

/// Runs every property with a fixed seed.
pub fn run_all() -> Result<Vec<CheckOutcome>> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    Ok(vec![
        CheckOutcome::new("wigner-d unitarity (j <= 4)", wigner_unitarity(&mut rng)?, 1e-12),
        CheckOutcome::new("clebsch-gordan orthogonality (j1, j2 <= 2)", cgc_orthogonality()?, 1e-12),
        CheckOutcome::new("s-matrix unitarity", smatrix_unitarity(&mut rng), 1e-12),
        CheckOutcome::new("s-matrix rotational invariance", rotational_invariance(&mut rng), 1e-12),
        CheckOutcome::new("closed form vs pipeline (64x64 grid)", closed_form_agreement()?, 1e-10),
        CheckOutcome::new("S(rho1) = S(rho2)", marginal_symmetry(&mut rng)?, 1e-10),
        CheckOutcome::new("partial-wave reduction theorem", reduction_theorem(&mut rng)?, 1e-12),
        CheckOutcome::new("orbital-spin coupling orthogonality", coupling_orthogonality()?, 1e-12),
        CheckOutcome::new("central s-matrix diagonal in total-j basis", total_j_diagonal(&mut rng)?, 1e-12),
    ])
}
