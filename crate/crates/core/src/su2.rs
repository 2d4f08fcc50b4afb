//! SU(2) representation machinery: Clebsch-Gordan coefficients and Wigner
//! D-matrices.
//!
//! Angular momenta are stored as doubled integers (`2j`, `2m`) so that
//! half-integer labels are exact. Phases follow the Condon-Shortley
//! convention, which makes every Clebsch-Gordan coefficient real, and
//! rotations use Euler angles in the z-y-z convention:
//!
//! ```text
//! D^j_{m'm}(α, β, γ) = e^{-i m' α} d^j_{m'm}(β) e^{-i m γ},   d^j(β) = exp(-i β J_y)
//! ```
//!
//! Matrices returned by this module index magnetic components in descending
//! order, `m = j, j - 1, ..., -j`, unless stated otherwise.

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Largest supported `2j` (j = 20).
pub const MAX_TWICE_J: u32 = 40;

// j1 + j2 + j + 1 is the largest factorial argument in the Racah sum.
const MAX_FACTORIAL: usize = (3 * MAX_TWICE_J / 2 + 1) as usize;

fn big_factorials() -> &'static [BigInt] {
    static TABLE: OnceLock<Vec<BigInt>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut table = Vec::with_capacity(MAX_FACTORIAL + 1);
        let mut acc = BigInt::one();
        table.push(acc.clone());
        for n in 1..=MAX_FACTORIAL {
            acc *= n;
            table.push(acc.clone());
        }
        table
    })
}

fn float_factorials() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        big_factorials()
            .iter()
            .map(|f| f.to_f64().expect("factorial fits in f64"))
            .collect()
    })
}

/// Total angular momentum `j`, stored as `2j`.
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AngularMomentum(u32);

impl AngularMomentum {
    pub const ZERO: Self = Self(0);
    pub const HALF: Self = Self(1);
    pub const ONE: Self = Self(2);

    pub const fn from_twice(twice_j: u32) -> Self {
        Self(twice_j)
    }

    pub const fn integer(j: u32) -> Self {
        Self(2 * j)
    }

    pub const fn twice(self) -> u32 {
        self.0
    }

    pub fn value(self) -> f64 {
        f64::from(self.0) / 2.0
    }

    pub const fn is_integer(self) -> bool {
        self.0.is_multiple_of(2)
    }

    /// Dimension `2j + 1` of the irreducible representation.
    pub const fn dim(self) -> usize {
        self.0 as usize + 1
    }

    /// Magnetic components in descending order, `j, j - 1, ..., -j`.
    pub fn projections(self) -> impl DoubleEndedIterator<Item = Projection> + Clone {
        let tj = self.0 as i32;
        (0..=self.0 as i32).map(move |k| Projection(tj - 2 * k))
    }

    /// Values allowed by the triangle rule, `|j1 - j2|, ..., j1 + j2`.
    pub fn coupled_range(j1: Self, j2: Self) -> impl Iterator<Item = Self> + Clone {
        let lo = j1.0.abs_diff(j2.0);
        (lo..=j1.0 + j2.0).step_by(2).map(Self)
    }

    /// Whether `m` is a valid component of `self`.
    pub fn admits(self, m: Projection) -> bool {
        m.0.unsigned_abs() <= self.0 && (self.0 as i32 - m.0) % 2 == 0
    }

    fn check(self, m: Projection) -> Result<()> {
        if self.0 > MAX_TWICE_J {
            return Err(Error::SpinTooLarge {
                twice_j: self.0,
                max_twice_j: MAX_TWICE_J,
            });
        }
        if !self.admits(m) {
            return Err(Error::InvalidLabel(format!("m = {m} is not a component of j = {self}")));
        }
        Ok(())
    }
}

impl fmt::Display for AngularMomentum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_halves(f, self.0 as i32)
    }
}

/// Accepts `"1"`, `"3/2"` or decimal forms such as `"0.5"`.
impl FromStr for AngularMomentum {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let twice = parse_halves(s)?;
        u32::try_from(twice)
            .map(Self)
            .map_err(|_| Error::InvalidLabel(format!("angular momentum must be non-negative: {s:?}")))
    }
}

/// Magnetic component `m`, stored as `2m`.
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Projection(i32);

impl Projection {
    pub const fn from_twice(twice_m: i32) -> Self {
        Self(twice_m)
    }

    pub const fn integer(m: i32) -> Self {
        Self(2 * m)
    }

    pub const fn twice(self) -> i32 {
        self.0
    }

    pub fn value(self) -> f64 {
        f64::from(self.0) / 2.0
    }
}

impl fmt::Display for Projection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_halves(f, self.0)
    }
}

impl FromStr for Projection {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_halves(s).map(Self)
    }
}

impl std::ops::Add for Projection {
    type Output = Self;

    fn add(self, rhs: Self) -> Self {
        Self(self.0 + rhs.0)
    }
}

impl std::ops::Neg for Projection {
    type Output = Self;

    fn neg(self) -> Self {
        Self(-self.0)
    }
}

fn write_halves(f: &mut fmt::Formatter<'_>, twice: i32) -> fmt::Result {
    if twice % 2 == 0 {
        write!(f, "{}", twice / 2)
    } else {
        write!(f, "{twice}/2")
    }
}

fn parse_halves(s: &str) -> Result<i32> {
    let s = s.trim();
    let bad = || Error::InvalidLabel(format!("not an integer or half-integer: {s:?}"));
    if let Some((num, den)) = s.split_once('/') {
        let num: i32 = num.trim().parse().map_err(|_| bad())?;
        return match den.trim() {
            "1" => Ok(2 * num),
            "2" => Ok(num),
            _ => Err(bad()),
        };
    }
    if let Ok(n) = s.parse::<i32>() {
        return Ok(2 * n);
    }
    let v: f64 = s.parse().map_err(|_| bad())?;
    let twice = (2.0 * v).round();
    if (2.0 * v - twice).abs() > 1e-9 || twice.abs() > f64::from(i32::MAX) {
        return Err(bad());
    }
    Ok(twice as i32)
}

/// A rotation given by z-y-z Euler angles in radians.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct Rotation {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl Rotation {
    pub const IDENTITY: Self = Self {
        alpha: 0.0,
        beta: 0.0,
        gamma: 0.0,
    };

    pub const fn new(alpha: f64, beta: f64, gamma: f64) -> Self {
        Self { alpha, beta, gamma }
    }
}

// Half the difference/sum of two doubled labels as a factorial index.
fn half(twice: i64) -> usize {
    debug_assert!(twice >= 0 && twice % 2 == 0, "odd or negative factorial argument {twice}");
    (twice / 2) as usize
}

/// Clebsch-Gordan coefficient `<j m | j1 m1; j2 m2>` (Condon-Shortley phases).
///
/// Evaluated with the Racah closed form in exact rational arithmetic; only the
/// final square root is taken in floating point. Returns 0 when `m != m1 + m2`
/// or `j` violates the triangle rule.
pub fn cgc(
    j1: AngularMomentum,
    m1: Projection,
    j2: AngularMomentum,
    m2: Projection,
    j: AngularMomentum,
    m: Projection,
) -> Result<f64> {
    j1.check(m1)?;
    j2.check(m2)?;
    j.check(m)?;
    if m1.0 + m2.0 != m.0 || j.0 < j1.0.abs_diff(j2.0) || j.0 > j1.0 + j2.0 {
        return Ok(0.0);
    }

    let f = big_factorials();
    let (tj1, tj2, tj) = (i64::from(j1.0), i64::from(j2.0), i64::from(j.0));
    let (tm1, tm2, tm) = (i64::from(m1.0), i64::from(m2.0), i64::from(m.0));

    let num = BigInt::from(tj + 1)
        * &f[half(tj + tj1 - tj2)]
        * &f[half(tj - tj1 + tj2)]
        * &f[half(tj1 + tj2 - tj)]
        * &f[half(tj + tm)]
        * &f[half(tj - tm)]
        * &f[half(tj1 - tm1)]
        * &f[half(tj1 + tm1)]
        * &f[half(tj2 - tm2)]
        * &f[half(tj2 + tm2)];
    let prefactor = BigRational::new(num, f[half(tj1 + tj2 + tj + 2)].clone());

    // Σ_k (-1)^k / [k! (j1+j2-j-k)! (j1-m1-k)! (j2+m2-k)! (j-j2+m1+k)! (j-j1-m2+k)!]
    let k_min = 0.max((tj2 - tj - tm1) / 2).max((tj1 - tj + tm2) / 2);
    let k_max = ((tj1 + tj2 - tj) / 2).min((tj1 - tm1) / 2).min((tj2 + tm2) / 2);
    let mut sum = BigRational::zero();
    for k in k_min..=k_max {
        let den = f[k as usize].clone()
            * &f[half(tj1 + tj2 - tj - 2 * k)]
            * &f[half(tj1 - tm1 - 2 * k)]
            * &f[half(tj2 + tm2 - 2 * k)]
            * &f[half(tj - tj2 + tm1 + 2 * k)]
            * &f[half(tj - tj1 - tm2 + 2 * k)];
        let term = BigRational::new(BigInt::one(), den);
        if k % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    if sum.is_zero() {
        return Ok(0.0);
    }
    let sign = if sum.is_negative() { -1.0 } else { 1.0 };
    let square = prefactor * &sum * &sum;
    Ok(sign * square.to_f64().expect("finite rational").sqrt())
}

/// Coupled labels `(j, m)` for `j1 ⊗ j2`: `j` ascending, then `m` ascending.
pub fn coupled_labels(j1: AngularMomentum, j2: AngularMomentum) -> Vec<(AngularMomentum, Projection)> {
    AngularMomentum::coupled_range(j1, j2)
        .flat_map(|j| j.projections().rev().map(move |m| (j, m)))
        .collect()
}

/// Product labels `(m1, m2)` for `j1 ⊗ j2`: `m1` descending, then `m2` descending.
pub fn product_labels(j1: AngularMomentum, j2: AngularMomentum) -> Vec<(Projection, Projection)> {
    j1.projections()
        .flat_map(|m1| j2.projections().map(move |m2| (m1, m2)))
        .collect()
}

/// The real orthogonal change of basis `<j m | j1 m1; j2 m2>` with rows in
/// [`coupled_labels`] order and columns in [`product_labels`] order.
pub fn clebsch_gordan_matrix(j1: AngularMomentum, j2: AngularMomentum) -> Result<DMatrix<f64>> {
    let rows = coupled_labels(j1, j2);
    let cols = product_labels(j1, j2);
    let mut out = DMatrix::zeros(rows.len(), cols.len());
    for (r, &(j, m)) in rows.iter().enumerate() {
        for (c, &(m1, m2)) in cols.iter().enumerate() {
            out[(r, c)] = cgc(j1, m1, j2, m2, j, m)?;
        }
    }
    Ok(out)
}

/// Wigner small-d element `d^j_{m'm}(β)`.
pub fn wigner_d_small(j: AngularMomentum, m_prime: Projection, m: Projection, beta: f64) -> Result<f64> {
    j.check(m_prime)?;
    j.check(m)?;
    let f = float_factorials();
    let (tj, tmp, tm) = (i64::from(j.0), i64::from(m_prime.0), i64::from(m.0));

    let norm = (f[half(tj + tmp)] * f[half(tj - tmp)] * f[half(tj + tm)] * f[half(tj - tm)]).sqrt();
    let (s, c) = (beta / 2.0).sin_cos();
    let k_min = 0.max((tm - tmp) / 2);
    let k_max = ((tj + tm) / 2).min((tj - tmp) / 2);
    let mut sum = 0.0;
    for k in k_min..=k_max {
        let den = f[half(tj + tm - 2 * k)] * f[k as usize] * f[half(tj - tmp - 2 * k)] * f[half(2 * k - tm + tmp)];
        // cos(β/2)^{2j + m - m' - 2k} sin(β/2)^{2k - m + m'}
        let cos_pow = (tj + (tm - tmp) / 2 - 2 * k) as i32;
        let sin_pow = (2 * k + (tmp - tm) / 2) as i32;
        let sign = if (k + (tmp - tm) / 2) % 2 == 0 { 1.0 } else { -1.0 };
        sum += sign * c.powi(cos_pow) * s.powi(sin_pow) / den;
    }
    Ok(norm * sum)
}

/// Wigner D element `D^j_{m'm}(α, β, γ) = e^{-i m' α} d^j_{m'm}(β) e^{-i m γ}`.
pub fn wigner_big_d(j: AngularMomentum, m_prime: Projection, m: Projection, r: Rotation) -> Result<Complex64> {
    let d = wigner_d_small(j, m_prime, m, r.beta)?;
    let phase = -(m_prime.value() * r.alpha + m.value() * r.gamma);
    Ok(Complex64::from_polar(d, phase))
}

/// Full `(2j+1) x (2j+1)` small-d matrix, components in descending order.
pub fn wigner_d_small_matrix(j: AngularMomentum, beta: f64) -> Result<DMatrix<f64>> {
    let ms: Vec<_> = j.projections().collect();
    let mut out = DMatrix::zeros(ms.len(), ms.len());
    for (r, &mp) in ms.iter().enumerate() {
        for (c, &m) in ms.iter().enumerate() {
            out[(r, c)] = wigner_d_small(j, mp, m, beta)?;
        }
    }
    Ok(out)
}

/// Full `(2j+1) x (2j+1)` D-matrix, components in descending order.
pub fn wigner_big_d_matrix(j: AngularMomentum, r: Rotation) -> Result<DMatrix<Complex64>> {
    let ms: Vec<_> = j.projections().collect();
    let mut out = DMatrix::zeros(ms.len(), ms.len());
    for (row, &mp) in ms.iter().enumerate() {
        for (col, &m) in ms.iter().enumerate() {
            out[(row, col)] = wigner_big_d(j, mp, m, r)?;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    use approx::assert_abs_diff_eq;

    use super::*;

    const H: AngularMomentum = AngularMomentum::HALF;

    fn p(twice: i32) -> Projection {
        Projection::from_twice(twice)
    }

    #[test]
    fn spin_half_coefficients() {
        let one = AngularMomentum::ONE;
        assert_eq!(cgc(H, p(1), H, p(1), one, p(2)).unwrap(), 1.0);
        assert_abs_diff_eq!(cgc(H, p(1), H, p(-1), AngularMomentum::ZERO, p(0)).unwrap(), FRAC_1_SQRT_2, epsilon = 1e-16);
        assert_abs_diff_eq!(cgc(H, p(-1), H, p(1), AngularMomentum::ZERO, p(0)).unwrap(), -FRAC_1_SQRT_2, epsilon = 1e-16);
        assert_eq!(cgc(H, p(1), H, p(1), one, p(0)).unwrap(), 0.0);
    }

    #[test]
    fn triangle_rule_gives_zero() {
        let two = AngularMomentum::integer(2);
        assert_eq!(cgc(H, p(1), H, p(-1), two, p(0)).unwrap(), 0.0);
    }

    #[test]
    fn malformed_labels_are_errors() {
        assert!(matches!(cgc(H, p(3), H, p(1), AngularMomentum::ONE, p(2)), Err(Error::InvalidLabel(_))));
        assert!(matches!(cgc(H, p(0), H, p(1), AngularMomentum::ONE, p(2)), Err(Error::InvalidLabel(_))));
        assert!(wigner_d_small(AngularMomentum::ONE, p(1), p(0), 0.2).is_err());
        let big = AngularMomentum::from_twice(MAX_TWICE_J + 2);
        assert!(matches!(cgc(big, p(0), H, p(1), big, p(1)), Err(Error::SpinTooLarge { .. })));
    }

    #[test]
    fn largest_supported_spin_is_finite() {
        let j = AngularMomentum::integer(20);
        let v = cgc(j, Projection::integer(3), j, Projection::integer(-3), AngularMomentum::integer(20), Projection::integer(0)).unwrap();
        assert!(v.is_finite() && v != 0.0);
        assert!(wigner_d_small(j, Projection::integer(20), Projection::integer(-20), 1.0).unwrap().is_finite());
    }

    #[test]
    fn small_d_spin_half() {
        assert_eq!(wigner_d_small(H, p(1), p(1), 0.0).unwrap(), 1.0);
        assert_abs_diff_eq!(wigner_d_small(H, p(1), p(-1), PI).unwrap(), -1.0, epsilon = 1e-15);
        for beta in [0.0, 0.3, 1.7, -2.9] {
            let d = wigner_d_small(AngularMomentum::ONE, p(0), p(0), beta).unwrap();
            assert_abs_diff_eq!(d, f64::cos(beta), epsilon = 1e-15);
        }
    }

    #[test]
    fn identity_rotation_is_identity() {
        let d = wigner_big_d_matrix(H, Rotation::IDENTITY).unwrap();
        assert_eq!(d, DMatrix::identity(2, 2));
    }

    #[test]
    fn parsing_and_display() {
        assert_eq!("1/2".parse::<AngularMomentum>().unwrap(), H);
        assert_eq!("0.5".parse::<AngularMomentum>().unwrap(), H);
        assert_eq!("3".parse::<AngularMomentum>().unwrap(), AngularMomentum::integer(3));
        assert_eq!("-3/2".parse::<Projection>().unwrap(), p(-3));
        assert!("-1".parse::<AngularMomentum>().is_err());
        assert!("1/3".parse::<AngularMomentum>().is_err());
        assert!("0.3".parse::<AngularMomentum>().is_err());
        assert_eq!(AngularMomentum::from_twice(3).to_string(), "3/2");
        assert_eq!(Projection::integer(-1).to_string(), "-1");
    }

    #[test]
    fn label_orderings() {
        let one = AngularMomentum::ONE;
        let coupled = coupled_labels(H, H);
        assert_eq!(coupled, vec![(AngularMomentum::ZERO, p(0)), (one, p(-2)), (one, p(0)), (one, p(2))]);
        assert_eq!(product_labels(H, H), vec![(p(1), p(1)), (p(1), p(-1)), (p(-1), p(1)), (p(-1), p(-1))]);
        assert_eq!(AngularMomentum::coupled_range(one, H).collect::<Vec<_>>(), vec![H, AngularMomentum::from_twice(3)]);
    }
}
