//! Independent oracles and sampling helpers shared by the integration tests.
//!
//! Nothing here calls into the library's numerical routines: Clebsch-Gordan
//! coefficients come from explicit lowering-operator construction, rotation
//! matrices from matrix exponentials of the generators, and entropies from a
//! general Hermitian eigensolver.

#![allow(dead_code)]

use std::collections::HashMap;
use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector, Matrix2};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use spinscat::spin_states::{Basis, SingleSpinState, TwoSpinState};
use spinscat::su2::Rotation;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Magnetic components `2m` in descending order.
fn components(twice_j: u32) -> Vec<i32> {
    (0..=twice_j as i32).map(|k| twice_j as i32 - 2 * k).collect()
}

/// `J₊` in the descending-m basis of spin `j`.
pub fn raising(twice_j: u32) -> DMatrix<f64> {
    let j = f64::from(twice_j) / 2.0;
    let ms = components(twice_j);
    let n = ms.len();
    let mut out = DMatrix::zeros(n, n);
    for i in 1..n {
        let m = f64::from(ms[i]) / 2.0;
        out[(i - 1, i)] = (j * (j + 1.0) - m * (m + 1.0)).sqrt();
    }
    out
}

pub fn lowering(twice_j: u32) -> DMatrix<f64> {
    raising(twice_j).transpose()
}

/// `<j m | j1 m1; j2 m2>` keyed by `(2j, 2m, 2m1, 2m2)`, built by lowering
/// each highest-weight state and fixing phases so that the coefficient with
/// `m1 = j1` is positive.
pub fn lowering_operator_cg(tj1: u32, tj2: u32) -> HashMap<(u32, i32, i32, i32), f64> {
    let m1s = components(tj1);
    let m2s = components(tj2);
    let n = m1s.len() * m2s.len();
    let idx = |a: usize, b: usize| a * m2s.len() + b;
    let lower = lowering(tj1).kronecker(&DMatrix::identity(m2s.len(), m2s.len()))
        + DMatrix::identity(m1s.len(), m1s.len()).kronecker(&lowering(tj2));

    let mut built: Vec<(u32, i32, DVector<f64>)> = Vec::new();
    let mut out = HashMap::new();
    let mut tj = tj1 + tj2;
    loop {
        // candidate basis vectors with m1 + m2 = j
        let mut best: Option<DVector<f64>> = None;
        for (a, &m1) in m1s.iter().enumerate() {
            for (b, &m2) in m2s.iter().enumerate() {
                if m1 + m2 != tj as i32 {
                    continue;
                }
                let mut v = DVector::zeros(n);
                v[idx(a, b)] = 1.0;
                for (_, tm, w) in &built {
                    if *tm == tj as i32 {
                        let proj = w.dot(&v);
                        v -= w * proj;
                    }
                }
                if best.as_ref().is_none_or(|bv| v.norm() > bv.norm()) {
                    best = Some(v);
                }
            }
        }
        let mut top = best.expect("highest weight exists");
        top /= top.norm();
        let a_max = m1s.iter().position(|&m| m == tj1 as i32).unwrap();
        let b_for = m2s.iter().position(|&m| m == tj as i32 - tj1 as i32);
        let sign_ref = b_for.map(|b| top[idx(a_max, b)]).unwrap_or(0.0);
        assert!(sign_ref.abs() > 1e-12, "phase reference vanishes");
        if sign_ref < 0.0 {
            top = -top;
        }

        let mut v = top;
        let mut tm = tj as i32;
        loop {
            for (a, &m1) in m1s.iter().enumerate() {
                for (b, &m2) in m2s.iter().enumerate() {
                    out.insert((tj, tm, m1, m2), v[idx(a, b)]);
                }
            }
            built.push((tj, tm, v.clone()));
            if tm == -(tj as i32) {
                break;
            }
            v = &lower * v;
            v /= v.norm();
            tm -= 2;
        }
        if tj == tj1.abs_diff(tj2) {
            break;
        }
        tj -= 2;
    }
    out
}

/// `exp(a)` by scaling and squaring of the Taylor series.
pub fn expm(a: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let n = a.nrows();
    let norm: f64 = a.iter().map(|z| z.norm()).sum();
    let mut squarings = 0;
    let mut scale = 1.0;
    while norm * scale > 0.1 {
        scale /= 2.0;
        squarings += 1;
    }
    let x = a * Complex64::new(scale, 0.0);
    let mut term = DMatrix::<Complex64>::identity(n, n);
    let mut sum = term.clone();
    for k in 1..30 {
        term = &term * &x / Complex64::new(k as f64, 0.0);
        sum += &term;
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    sum
}

/// `exp(-iαJz) exp(-iβJy) exp(-iγJz)` from the generators.
pub fn rotation_by_exponential(twice_j: u32, r: Rotation) -> DMatrix<Complex64> {
    let jp = raising(twice_j).map(|x| c(x, 0.0));
    let jm = lowering(twice_j).map(|x| c(x, 0.0));
    let jy = (&jp - &jm) / c(0.0, 2.0);
    let jz = DMatrix::from_diagonal(&DVector::from_iterator(
        components(twice_j).len(),
        components(twice_j).iter().map(|&m| c(f64::from(m) / 2.0, 0.0)),
    ));
    let mi = c(0.0, -1.0);
    expm(&(&jz * (mi * r.alpha))) * expm(&(&jy * (mi * r.beta))) * expm(&(&jz * (mi * r.gamma)))
}

/// Entropy in bits of particle 1, via a general Hermitian eigensolver.
pub fn entropy_by_eigensolver(state: &TwoSpinState) -> f64 {
    let a = state.in_basis(Basis::Product);
    let a = a.amplitudes();
    let m = Matrix2::new(a[0], a[1], a[2], a[3]);
    let rho = m * m.adjoint();
    let eig = rho.symmetric_eigenvalues();
    eig.iter()
        .map(|&e| if e > 1e-300 { -e * e.log2() } else { 0.0 })
        .sum()
}

pub fn random_angle<R: Rng>(rng: &mut R) -> f64 {
    rng.gen_range(-PI..PI)
}

pub fn random_rotation<R: Rng>(rng: &mut R) -> Rotation {
    Rotation::new(rng.gen_range(0.0..2.0 * PI), rng.gen_range(0.0..PI), rng.gen_range(0.0..2.0 * PI))
}

pub fn random_single<R: Rng>(rng: &mut R) -> SingleSpinState {
    SingleSpinState::polarized(rng.gen_range(0.0..PI), rng.gen_range(0.0..2.0 * PI))
}

pub fn random_two_spin<R: Rng>(rng: &mut R) -> TwoSpinState {
    let amps = [(); 4].map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    TwoSpinState::normalized(Basis::Product, amps).unwrap()
}

/// A random 2x2 unitary `e^{iφ} D^{1/2}(r)`.
pub fn random_unitary2<R: Rng>(rng: &mut R) -> Matrix2<Complex64> {
    let d = rotation_by_exponential(1, random_rotation(rng));
    Matrix2::from_fn(|i, j| d[(i, j)]) * Complex64::from_polar(1.0, random_angle(rng))
}

pub fn max_abs(m: &DMatrix<Complex64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Legendre polynomial `P_l(x)` by the three-term recurrence.
pub fn legendre(l: u32, x: f64) -> f64 {
    let (mut p0, mut p1) = (1.0, x);
    if l == 0 {
        return p0;
    }
    for n in 1..l {
        let n = f64::from(n);
        let p2 = ((2.0 * n + 1.0) * x * p1 - n * p0) / (n + 1.0);
        p0 = p1;
        p1 = p2;
    }
    p1
}
