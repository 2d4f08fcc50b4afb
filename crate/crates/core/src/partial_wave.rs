//! Two-particle scattering channels for equal-mass, non-relativistic spin-1/2
//! particles.
//!
//! States are handled one fiber `(p, q, l, m)` at a time: a central-force
//! S-matrix is diagonal in total momentum, relative momentum, orbital angular
//! momentum and its component, so only the spin part of a fiber changes.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::spin_smatrix::SpinPhasePair;
use crate::spin_states::{coupling_matrix, Basis, SingleSpinState, TwoSpinState};
use crate::su2::{self, AngularMomentum, Projection};

/// Tolerance for unitarity and diagonality of reduced S-matrix blocks.
pub const BLOCK_TOL: f64 = 1e-10;

/// Invariant labels `{M, W, s}` of an irreducible representation of the
/// mass-extended Galilean group.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct GalileanInvariants {
    pub mass: f64,
    pub internal_energy: f64,
    pub spin: AngularMomentum,
}

impl GalileanInvariants {
    pub fn new(mass: f64, internal_energy: f64, spin: AngularMomentum) -> Result<Self> {
        if !(mass.is_finite() && mass > 0.0) {
            return Err(Error::NonPositiveMass(mass));
        }
        Ok(Self {
            mass,
            internal_energy,
            spin,
        })
    }
}

/// Internal energy `W(q) = W1 + W2 + q²/2M0` of two particles of mass `M0`
/// with relative momentum `q`.
pub fn internal_energy(q: f64, m0: f64, w1: f64, w2: f64) -> Result<f64> {
    if !(m0.is_finite() && m0 > 0.0) {
        return Err(Error::NonPositiveMass(m0));
    }
    check_q(q)?;
    Ok(w1 + w2 + q * q / (2.0 * m0))
}

fn check_q(q: f64) -> Result<()> {
    if !(q.is_finite() && q >= 0.0) {
        return Err(Error::OutOfRange {
            name: "q",
            value: q,
            allowed: "[0, ∞)",
        });
    }
    Ok(())
}

fn require_integer(l: AngularMomentum) -> Result<()> {
    if !l.is_integer() {
        return Err(Error::InvalidLabel(format!("orbital angular momentum must be an integer, got {l}")));
    }
    if l.twice() > su2::MAX_TWICE_J {
        return Err(Error::SpinTooLarge {
            twice_j: l.twice(),
            max_twice_j: su2::MAX_TWICE_J,
        });
    }
    Ok(())
}

/// One copy of an irreducible representation in the decomposition of a
/// two-particle product, with its degeneracy labels `(l, m)`.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct GalileanComponent {
    pub invariants: GalileanInvariants,
    pub l: AngularMomentum,
    pub m: Projection,
}

/// Enumerates the components `{2M0, W(q), s}` with degeneracy labels `(l, m)`
/// up to `l_max` for two particles of equal mass.
///
/// Only the labels are enumerated; no closed-form multiplicity is claimed.
pub fn equal_mass_decomposition(
    masses: (f64, f64),
    energies: (f64, f64),
    spins: (AngularMomentum, AngularMomentum),
    q: f64,
    l_max: u32,
) -> Result<Vec<GalileanComponent>> {
    let (m1, m2) = masses;
    if m1 != m2 {
        return Err(Error::UnequalMasses(m1, m2));
    }
    let w = internal_energy(q, m1, energies.0, energies.1)?;
    let mut out = Vec::new();
    for s in AngularMomentum::coupled_range(spins.0, spins.1) {
        let invariants = GalileanInvariants::new(2.0 * m1, w, s)?;
        for l in (0..=l_max).map(AngularMomentum::integer) {
            out.extend(l.projections().map(|m| GalileanComponent { invariants, l, m }));
        }
    }
    Ok(out)
}

/// Fiber labels of a two-particle momentum ket: total momentum `p`, relative
/// momentum magnitude `q`, orbital angular momentum `l` and its component `m`.
#[derive(Copy, Clone, Debug, PartialEq, Serialize)]
pub struct PartialWaveLabels {
    pub p: [f64; 3],
    pub q: f64,
    #[serde(serialize_with = "ser_halves_am")]
    pub l: AngularMomentum,
    #[serde(serialize_with = "ser_halves_proj")]
    pub m: Projection,
}

fn ser_halves_am<S: serde::Serializer>(v: &AngularMomentum, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_f64(v.value())
}

fn ser_halves_proj<S: serde::Serializer>(v: &Projection, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_f64(v.value())
}

impl PartialWaveLabels {
    pub fn new(p: [f64; 3], q: f64, l: AngularMomentum, m: Projection) -> Result<Self> {
        check_q(q)?;
        require_integer(l)?;
        if !l.admits(m) {
            return Err(Error::InvalidLabel(format!("m = {m} is not a component of l = {l}")));
        }
        Ok(Self { p, q, l, m })
    }
}

/// Orthogonal change of basis from `|m χ⟩` (orbital ⊗ spin) to `|j j3⟩`.
#[derive(Clone, Debug, PartialEq)]
pub struct CouplingTransform {
    pub l: AngularMomentum,
    pub s: AngularMomentum,
    /// `(j, j3)`: `j` ascending from `|l - s|`, `j3` ascending.
    pub rows: Vec<(AngularMomentum, Projection)>,
    /// `(m, χ)`: `m` descending, then `χ` descending.
    pub cols: Vec<(Projection, Projection)>,
    pub matrix: DMatrix<f64>,
}

impl CouplingTransform {
    pub fn dim(&self) -> usize {
        self.cols.len()
    }

    pub fn column_index(&self, m: Projection, chi: Projection) -> Option<usize> {
        self.cols.iter().position(|&c| c == (m, chi))
    }

    /// `max |U Uᵀ - 1|`.
    pub fn orthogonality_error(&self) -> f64 {
        let n = self.dim();
        (&self.matrix * self.matrix.transpose() - DMatrix::identity(n, n)).abs().max()
    }
}

/// Couples orbital angular momentum `l` with spin `s` into total `j`.
pub fn couple_orbital_spin(l: AngularMomentum, s: AngularMomentum) -> Result<CouplingTransform> {
    require_integer(l)?;
    Ok(CouplingTransform {
        l,
        s,
        rows: su2::coupled_labels(l, s),
        cols: su2::product_labels(l, s),
        matrix: su2::clebsch_gordan_matrix(l, s)?,
    })
}

#[derive(Clone, Debug, PartialEq)]
struct PhaseCurve {
    q: Vec<f64>,
    delta: Vec<f64>,
}

impl PhaseCurve {
    fn interpolate(&self, q: f64) -> Option<f64> {
        let (first, last) = (*self.q.first()?, *self.q.last()?);
        if !(first..=last).contains(&q) {
            return None;
        }
        let hi = self.q.partition_point(|&x| x < q);
        if self.q[hi] == q {
            return Some(self.delta[hi]);
        }
        let lo = hi - 1;
        let t = (q - self.q[lo]) / (self.q[hi] - self.q[lo]);
        Some(self.delta[lo] + t * (self.delta[hi] - self.delta[lo]))
    }
}

/// Sampled phase shifts `δ_{ls}(q)` per channel, linearly interpolated.
///
/// CSV form: a header `l,s,q,delta` followed by rows with integer `l ≥ 0`,
/// `s ∈ {0, 1}`, decimal `q` and `delta` in radians. Rows of one channel must
/// have strictly ascending `q`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct PhaseShiftTable {
    channels: BTreeMap<(u32, u32), PhaseCurve>,
}

const HEADER: [&str; 4] = ["l", "s", "q", "delta"];

impl PhaseShiftTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds or replaces channel `(l, s)`.
    pub fn insert_channel(&mut self, l: u32, s: u32, q: Vec<f64>, delta: Vec<f64>) -> Result<()> {
        let bad = |message: String| Err(Error::InvalidLabel(format!("channel l = {l}, s = {s}: {message}")));
        if s > 1 {
            return bad("s must be 0 or 1".into());
        }
        if q.is_empty() || q.len() != delta.len() {
            return bad(format!("{} q values and {} phases", q.len(), delta.len()));
        }
        if q.iter().chain(&delta).any(|v| !v.is_finite()) || q.iter().any(|&v| v < 0.0) {
            return bad("non-finite phase or invalid q".into());
        }
        if q.windows(2).any(|w| w[0] >= w[1]) {
            return bad("q grid is not strictly ascending".into());
        }
        self.channels.insert((l, s), PhaseCurve { q, delta });
        Ok(())
    }

    /// Samples `delta(l, s, q)` on `q_grid` for every listed channel.
    pub fn from_fn(channels: &[(u32, u32)], q_grid: &[f64], delta: impl Fn(u32, u32, f64) -> f64) -> Result<Self> {
        let mut table = Self::new();
        for &(l, s) in channels {
            let d = q_grid.iter().map(|&q| delta(l, s, q)).collect();
            table.insert_channel(l, s, q_grid.to_vec(), d)?;
        }
        Ok(table)
    }

    pub fn channels(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.channels.keys().copied()
    }

    pub fn q_range(&self, l: u32, s: u32) -> Option<(f64, f64)> {
        let c = self.channels.get(&(l, s))?;
        Some((c.q[0], *c.q.last()?))
    }

    /// `δ_{ls}(q)` by linear interpolation; no extrapolation.
    pub fn lookup_phase(&self, l: u32, s: u32, q: f64) -> Result<f64> {
        let curve = self.channels.get(&(l, s)).ok_or(Error::MissingChannel { l, s })?;
        curve.interpolate(q).ok_or_else(|| Error::QOutOfRange {
            l,
            s,
            q,
            min: curve.q[0],
            max: curve.q[curve.q.len() - 1],
        })
    }

    /// `(δ_{l0}(q), δ_{l1}(q))`.
    pub fn spin_phases(&self, l: u32, q: f64) -> Result<SpinPhasePair> {
        Ok(SpinPhasePair::new(self.lookup_phase(l, 0, q)?, self.lookup_phase(l, 1, q)?))
    }

    pub fn from_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .from_reader(reader);
        let mut builder: BTreeMap<(u32, u32), PhaseCurve> = BTreeMap::new();
        let mut saw_header = false;
        for record in rdr.records() {
            let record = record.map_err(|e| Error::Table {
                line: e.position().map_or(0, |p| p.line()),
                message: e.to_string(),
            })?;
            let line = record.position().map_or(0, |p| p.line());
            let table_err = |message: String| Error::Table { line, message };
            if !saw_header {
                if record.iter().ne(HEADER) {
                    return Err(table_err(format!("expected header `l,s,q,delta`, found `{}`", record.iter().collect::<Vec<_>>().join(","))));
                }
                saw_header = true;
                continue;
            }
            if record.len() == 1 && record[0].is_empty() {
                continue;
            }
            if record.len() != 4 {
                return Err(table_err(format!("expected 4 fields, found {}", record.len())));
            }
            let l: u32 = record[0]
                .parse()
                .map_err(|_| table_err(format!("l must be a non-negative integer, found `{}`", &record[0])))?;
            let s: u32 = record[1]
                .parse()
                .ok()
                .filter(|&s| s <= 1)
                .ok_or_else(|| table_err(format!("s must be 0 or 1, found `{}`", &record[1])))?;
            let parse_float = |idx: usize, name: &str| -> Result<f64> {
                record[idx]
                    .parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| table_err(format!("{name} must be a finite decimal, found `{}`", &record[idx])))
            };
            let q = parse_float(2, "q")?;
            let delta = parse_float(3, "delta")?;
            if q < 0.0 {
                return Err(table_err(format!("q must be non-negative, found {q}")));
            }
            let curve = builder.entry((l, s)).or_insert_with(|| PhaseCurve {
                q: Vec::new(),
                delta: Vec::new(),
            });
            if let Some(&last) = curve.q.last() {
                if q <= last {
                    return Err(table_err(format!(
                        "q = {q} is not strictly greater than the previous q = {last} for channel l = {l}, s = {s}"
                    )));
                }
            }
            curve.q.push(q);
            curve.delta.push(delta);
        }
        if !saw_header {
            return Err(Error::Table {
                line: 1,
                message: "missing header `l,s,q,delta`".into(),
            });
        }
        Ok(Self { channels: builder })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = File::open(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::from_csv(file)
    }

    /// Writes the table in its CSV form, channels in `(l, s)` order.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let io = |e: csv::Error| Error::Io(e.to_string());
        let mut wtr = csv::Writer::from_writer(writer);
        wtr.write_record(HEADER).map_err(io)?;
        for (&(l, s), curve) in &self.channels {
            for (q, d) in curve.q.iter().zip(&curve.delta) {
                wtr.write_record([l.to_string(), s.to_string(), q.to_string(), d.to_string()])
                    .map_err(io)?;
            }
        }
        wtr.flush().map_err(|e| Error::Io(e.to_string()))
    }
}

/// Out-state of a single fiber: the labels pass through, the spin part scatters.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct PartialWaveOutState {
    pub labels: PartialWaveLabels,
    pub phases: SpinPhasePair,
    pub spin: TwoSpinState,
}

/// Applies the central-force S-matrix `e^{2iδ_{ls}(q)}` to the spin-product
/// in-state `Σ a_{χ1} b_{χ2} |p χ1 χ2 (q l m)⟩`.
///
/// Evaluates the double Clebsch-Gordan sum
/// `Σ_{χ1χ2} Σ_{sχ} ⟨sχ|χ'1χ'2⟩⟨sχ|χ1χ2⟩ e^{2iδ_{ls}(q)} a_{χ1} b_{χ2}` term by term.
pub fn apply_central_smatrix(
    a: &SingleSpinState,
    b: &SingleSpinState,
    labels: &PartialWaveLabels,
    table: &PhaseShiftTable,
) -> Result<PartialWaveOutState> {
    let l = labels.l.twice() / 2;
    let phases = table.spin_phases(l, labels.q)?;
    let half = AngularMomentum::HALF;
    let spin_labels = su2::product_labels(half, half);

    let mut out = [Complex64::new(0.0, 0.0); 4];
    for (slot, &(m1p, m2p)) in out.iter_mut().zip(&spin_labels) {
        for (i, &(m1, m2)) in spin_labels.iter().enumerate() {
            let amp = a.amplitudes()[i / 2] * b.amplitudes()[i % 2];
            for s in AngularMomentum::coupled_range(half, half) {
                for chi in s.projections() {
                    let overlap = su2::cgc(half, m1p, half, m2p, s, chi)? * su2::cgc(half, m1, half, m2, s, chi)?;
                    if overlap != 0.0 {
                        *slot += phases.channel_factor(s.twice() / 2) * amp * overlap;
                    }
                }
            }
        }
    }
    Ok(PartialWaveOutState {
        labels: *labels,
        phases,
        spin: TwoSpinState::new(Basis::Product, out),
    })
}

/// Reduced S-matrix `S^j_{l's',ls}(q)` over coupled channels at fixed `j` and `q`.
#[derive(Clone, Debug, PartialEq)]
pub struct ChannelBlockS {
    pub j: AngularMomentum,
    pub q: f64,
    /// `(l, s)` labels of the rows and columns.
    pub channels: Vec<(AngularMomentum, AngularMomentum)>,
    pub block: DMatrix<Complex64>,
}

impl ChannelBlockS {
    pub fn new(
        j: AngularMomentum,
        q: f64,
        channels: Vec<(AngularMomentum, AngularMomentum)>,
        block: DMatrix<Complex64>,
    ) -> Self {
        Self { j, q, channels, block }
    }

    /// The diagonal central-force block `diag(e^{2iδ_{ls}(q)})`.
    pub fn central(
        j: AngularMomentum,
        q: f64,
        channels: Vec<(AngularMomentum, AngularMomentum)>,
        table: &PhaseShiftTable,
    ) -> Result<Self> {
        let mut diag = Vec::with_capacity(channels.len());
        for &(l, s) in &channels {
            require_integer(l)?;
            let delta = table.lookup_phase(l.twice() / 2, s.twice() / 2, q)?;
            diag.push(Complex64::from_polar(1.0, 2.0 * delta));
        }
        let block = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(diag));
        Ok(Self { j, q, channels, block })
    }

    /// Applies the block to channel amplitudes ordered like `channels`.
    pub fn apply(&self, amplitudes: &[Complex64]) -> Result<Vec<Complex64>> {
        if amplitudes.len() != self.block.ncols() {
            return Err(Error::InvalidLabel(format!(
                "expected {} channel amplitudes, got {}",
                self.block.ncols(),
                amplitudes.len()
            )));
        }
        let v = nalgebra::DVector::from_column_slice(amplitudes);
        Ok((&self.block * v).iter().copied().collect())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum BlockViolation {
    Shape { rows: usize, cols: usize, channels: usize },
    NonFinite,
    NotUnitary { max_deviation: f64 },
    DuplicateChannel { l: f64, s: f64 },
    NonIntegerOrbital { l: f64 },
    /// `j` is not reachable by coupling `l` and `s`.
    Triangle { l: f64, s: f64, j: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BlockValidation {
    pub violations: Vec<BlockViolation>,
    /// Off-diagonal entries vanish within tolerance, i.e. no channel mixing.
    pub central: bool,
}

impl BlockValidation {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks unitarity, channel labels and diagonality of a reduced S-matrix block.
pub fn validate_block_s(block: &ChannelBlockS) -> BlockValidation {
    let mut violations = Vec::new();
    let (rows, cols) = block.block.shape();
    let n = block.channels.len();
    let square = rows == cols && rows == n;
    if !square {
        violations.push(BlockViolation::Shape { rows, cols, channels: n });
    }
    let finite = block.block.iter().all(|z| z.re.is_finite() && z.im.is_finite());
    if !finite {
        violations.push(BlockViolation::NonFinite);
    }

    for (i, &(l, s)) in block.channels.iter().enumerate() {
        if block.channels[..i].contains(&(l, s)) {
            violations.push(BlockViolation::DuplicateChannel {
                l: l.value(),
                s: s.value(),
            });
        }
        if !l.is_integer() {
            violations.push(BlockViolation::NonIntegerOrbital { l: l.value() });
        }
        if !AngularMomentum::coupled_range(l, s).any(|j| j == block.j) {
            violations.push(BlockViolation::Triangle {
                l: l.value(),
                s: s.value(),
                j: block.j.value(),
            });
        }
    }

    let mut central = false;
    if rows == cols && finite {
        let product = &block.block * block.block.adjoint();
        let max_deviation = (product - DMatrix::identity(rows, cols))
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        if max_deviation > BLOCK_TOL {
            violations.push(BlockViolation::NotUnitary { max_deviation });
        }
        central = (0..rows).all(|r| (0..cols).all(|c| r == c || block.block[(r, c)].norm() <= BLOCK_TOL));
    }
    BlockValidation { violations, central }
}

/// Central-force S-matrix of partial wave `l` written in the total angular
/// momentum basis `|(l s) j j3⟩`.
#[derive(Clone, Debug, PartialEq)]
pub struct TotalJSMatrix {
    /// `(s, j, j3)` for each row and column.
    pub labels: Vec<(AngularMomentum, AngularMomentum, Projection)>,
    pub matrix: DMatrix<Complex64>,
}

impl TotalJSMatrix {
    pub fn max_off_diagonal(&self) -> f64 {
        let n = self.matrix.nrows();
        (0..n)
            .flat_map(|r| (0..n).filter(move |&c| c != r).map(move |c| (r, c)))
            .map(|idx| self.matrix[idx].norm())
            .fold(0.0, f64::max)
    }
}

/// Builds the central-force S-matrix on the reducible `|m χ1 χ2⟩` space of
/// partial wave `l` and transforms it to the total-j basis by recoupling the
/// spins and then the orbital and spin angular momenta.
pub fn central_smatrix_total_j(l: AngularMomentum, phases: SpinPhasePair) -> Result<TotalJSMatrix> {
    require_integer(l)?;
    let orbital: Vec<Projection> = l.projections().collect();
    let n = 4 * orbital.len();
    // reducible basis index: m index * 4 + product spin index
    let spin_s = crate::spin_smatrix::smatrix_as_operator(phases);
    let mut s_red = DMatrix::<Complex64>::zeros(n, n);
    for k in 0..orbital.len() {
        for r in 0..4 {
            for c in 0..4 {
                s_red[(4 * k + r, 4 * k + c)] = spin_s[(r, c)];
            }
        }
    }

    let spin_c = coupling_matrix();
    // coupled spin index -> (s, χ)
    let spin_coupled = su2::coupled_labels(AngularMomentum::HALF, AngularMomentum::HALF);
    let mut labels = Vec::with_capacity(n);
    let mut u = DMatrix::<f64>::zeros(n, n);
    for s in [AngularMomentum::ZERO, AngularMomentum::ONE] {
        let coupling = couple_orbital_spin(l, s)?;
        for (row, &(j, j3)) in coupling.rows.iter().enumerate() {
            let out_row = labels.len();
            labels.push((s, j, j3));
            for (k, &m) in orbital.iter().enumerate() {
                for (ci, &(s_c, chi)) in spin_coupled.iter().enumerate() {
                    if s_c != s {
                        continue;
                    }
                    let col = coupling
                        .column_index(m, chi)
                        .expect("(m, χ) is a column of the coupling transform");
                    let w = coupling.matrix[(row, col)];
                    if w == 0.0 {
                        continue;
                    }
                    for p in 0..4 {
                        u[(out_row, 4 * k + p)] += w * spin_c[(ci, p)];
                    }
                }
            }
        }
    }
    let u = u.map(|x| Complex64::new(x, 0.0));
    let matrix = &u * s_red * u.transpose();
    Ok(TotalJSMatrix { labels, matrix })
}

/// Whether channel `(l, s)` survives antisymmetrization for identical
/// spin-1/2 fermions: spatial exchange parity `(-1)^l` times spin exchange
/// parity `(-1)^{s+1}` must be `-1`, i.e. `l + s` even.
pub fn fermion_channel_allowed(l: AngularMomentum, s: AngularMomentum) -> Result<bool> {
    require_integer(l)?;
    if s != AngularMomentum::ZERO && s != AngularMomentum::ONE {
        return Err(Error::InvalidLabel(format!("two spin-1/2 particles couple to s = 0 or 1, got {s}")));
    }
    Ok((l.twice() / 2 + s.twice() / 2).is_multiple_of(2))
}

#[cfg(test)]
mod tests {
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    use approx::assert_abs_diff_eq;

    use super::*;
    use crate::entanglement::entanglement_entropy;

    fn am(twice: u32) -> AngularMomentum {
        AngularMomentum::from_twice(twice)
    }

    #[test]
    fn internal_energy_kinematics() {
        assert_eq!(internal_energy(0.0, 2.0, 0.5, 0.25).unwrap(), 0.75);
        let w0 = internal_energy(0.0, 1.5, 0.1, 0.2).unwrap();
        let w = internal_energy(3.0, 1.5, 0.1, 0.2).unwrap();
        assert_abs_diff_eq!(w - w0, 9.0 / 3.0, epsilon = 1e-14);
        let k1 = internal_energy(1.3, 0.7, 0.0, 0.0).unwrap();
        let k2 = internal_energy(2.6, 0.7, 0.0, 0.0).unwrap();
        assert_abs_diff_eq!(k2, 4.0 * k1, epsilon = 1e-14);
        assert!(matches!(internal_energy(1.0, 0.0, 0.0, 0.0), Err(Error::NonPositiveMass(_))));
        assert!(internal_energy(-1.0, 1.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn decomposition_labels() {
        let comps = equal_mass_decomposition((1.0, 1.0), (0.0, 0.0), (am(1), am(1)), 2.0, 2).unwrap();
        // s ∈ {0, 1}, Σ_{l ≤ 2} (2l + 1) = 9
        assert_eq!(comps.len(), 18);
        assert!(comps.iter().all(|c| c.invariants.mass == 2.0 && c.invariants.internal_energy == 2.0));
        assert!(matches!(
            equal_mass_decomposition((1.0, 2.0), (0.0, 0.0), (am(1), am(1)), 1.0, 1),
            Err(Error::UnequalMasses(..))
        ));
        assert!(GalileanInvariants::new(-1.0, 0.0, am(0)).is_err());
    }

    #[test]
    fn labels_are_validated() {
        assert!(PartialWaveLabels::new([0.0; 3], 1.0, am(2), Projection::integer(1)).is_ok());
        assert!(PartialWaveLabels::new([0.0; 3], 1.0, am(2), Projection::integer(2)).is_err());
        assert!(PartialWaveLabels::new([0.0; 3], 1.0, am(1), Projection::from_twice(1)).is_err());
        assert!(PartialWaveLabels::new([0.0; 3], -1.0, am(0), Projection::integer(0)).is_err());
    }

    #[test]
    fn coupling_examples() {
        let t = couple_orbital_spin(am(0), am(0)).unwrap();
        assert_eq!(t.matrix, DMatrix::identity(1, 1));
        let t = couple_orbital_spin(am(2), am(2)).unwrap();
        assert_eq!(t.dim(), 9);
        assert!(t.orthogonality_error() < 1e-12);
        let t = couple_orbital_spin(am(2), am(1)).unwrap();
        let row = t.rows.iter().position(|&r| r == (am(3), Projection::from_twice(3))).unwrap();
        let col = t.column_index(Projection::integer(1), Projection::from_twice(1)).unwrap();
        for c in 0..t.dim() {
            assert_eq!(t.matrix[(row, c)], if c == col { 1.0 } else { 0.0 });
        }
        assert!(couple_orbital_spin(am(1), am(1)).is_err());
    }

    fn table() -> PhaseShiftTable {
        let mut t = PhaseShiftTable::new();
        t.insert_channel(0, 0, vec![0.0, 1.0, 2.0], vec![0.0, 0.4, 1.0]).unwrap();
        t.insert_channel(0, 1, vec![0.0, 1.0, 2.0], vec![0.0, 0.2, -0.2]).unwrap();
        t
    }

    #[test]
    fn lookup_interpolates_linearly() {
        let t = table();
        assert_eq!(t.lookup_phase(0, 0, 1.0).unwrap(), 0.4);
        assert_abs_diff_eq!(t.lookup_phase(0, 0, 1.5).unwrap(), 0.7, epsilon = 1e-15);
        assert_eq!(t.lookup_phase(0, 1, 2.0).unwrap(), -0.2);
        assert!(matches!(t.lookup_phase(1, 0, 1.0), Err(Error::MissingChannel { l: 1, s: 0 })));
        assert!(matches!(t.lookup_phase(0, 0, 2.5), Err(Error::QOutOfRange { .. })));
        assert!(matches!(t.lookup_phase(0, 0, -0.5), Err(Error::QOutOfRange { .. })));
    }

    #[test]
    fn insert_channel_rejects_bad_curves() {
        let mut t = PhaseShiftTable::new();
        assert!(t.insert_channel(0, 2, vec![0.0], vec![0.0]).is_err());
        assert!(t.insert_channel(0, 0, vec![0.0, 0.0], vec![0.0, 1.0]).is_err());
        assert!(t.insert_channel(0, 0, vec![0.0, 1.0], vec![0.0]).is_err());
        assert!(t.insert_channel(0, 0, vec![0.0, 1.0], vec![0.0, f64::NAN]).is_err());
    }

    #[test]
    fn csv_round_trip() {
        let t = table();
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("l,s,q,delta\n"));
        assert_eq!(PhaseShiftTable::from_csv(text.as_bytes()).unwrap(), t);
    }

    #[test]
    fn csv_errors_name_the_line() {
        let cases = [
            ("l,s,q\n", 1),
            ("l,s,q,delta\n0,0,0.0,0.1\n0,0,0.0,0.2\n", 3),
            ("l,s,q,delta\n0,0,0.0,0.1\n0,2,1.0,0.2\n", 3),
            ("l,s,q,delta\n0,0,0.0,0.1\n1,0,1.0,0.2\n-1,0,1.0,0.2\n", 4),
            ("l,s,q,delta\n0,0,0.0,abc\n", 2),
            ("l,s,q,delta\n0,0,0.0\n", 2),
            ("", 1),
        ];
        for (text, line) in cases {
            match PhaseShiftTable::from_csv(text.as_bytes()) {
                Err(Error::Table { line: got, .. }) => assert_eq!(got, line, "{text:?}"),
                other => panic!("{text:?}: {other:?}"),
            }
        }
    }

    #[test]
    fn equal_channel_phases_generate_nothing() {
        let mut t = PhaseShiftTable::new();
        t.insert_channel(3, 0, vec![0.0, 1.0], vec![0.3, 0.9]).unwrap();
        t.insert_channel(3, 1, vec![0.0, 1.0], vec![0.3, 0.9]).unwrap();
        let labels = PartialWaveLabels::new([0.1, 0.0, 0.0], 0.4, am(6), Projection::integer(-2)).unwrap();
        let a = SingleSpinState::polarized(0.3, 0.0);
        let b = SingleSpinState::polarized(1.9, 0.5);
        let out = apply_central_smatrix(&a, &b, &labels, &t).unwrap();
        assert_eq!(out.labels, labels);
        assert!(entanglement_entropy(&out.spin).unwrap().entropy_bits < 1e-12);
        let overlap = out.spin.inner(&crate::spin_states::product_state(&a, &b)).norm();
        assert_abs_diff_eq!(overlap, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn s_wave_maximal_case() {
        let mut t = PhaseShiftTable::new();
        t.insert_channel(0, 0, vec![1.0], vec![0.1 + FRAC_PI_4]).unwrap();
        t.insert_channel(0, 1, vec![1.0], vec![0.1]).unwrap();
        let labels = PartialWaveLabels::new([0.0; 3], 1.0, am(0), Projection::integer(0)).unwrap();
        let b = SingleSpinState::real(FRAC_PI_2.cos(), FRAC_PI_2.sin()).unwrap();
        let out = apply_central_smatrix(&SingleSpinState::up(), &b, &labels, &t).unwrap();
        assert_abs_diff_eq!(entanglement_entropy(&out.spin).unwrap().entropy_bits, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn block_validation_cases() {
        let mut t = PhaseShiftTable::new();
        t.insert_channel(1, 0, vec![0.5], vec![0.3]).unwrap();
        t.insert_channel(1, 1, vec![0.5], vec![-0.2]).unwrap();
        let central = ChannelBlockS::central(am(2), 0.5, vec![(am(2), am(0)), (am(2), am(2))], &t).unwrap();
        let v = validate_block_s(&central);
        assert!(v.is_valid(), "{v:?}");
        assert!(v.central);

        // j = 1 mixes (l = 0, s = 1) with (l = 2, s = 1)
        let eps: f64 = 0.05;
        let (s, c) = eps.sin_cos();
        let e = Complex64::from_polar(1.0, 0.8);
        let block = DMatrix::from_row_slice(2, 2, &[e * c, -e * s, e * s, e * c]);
        let mixing = ChannelBlockS::new(am(2), 0.5, vec![(am(0), am(2)), (am(4), am(2))], block);
        let v = validate_block_s(&mixing);
        assert!(v.is_valid(), "{v:?}");
        assert!(!v.central);

        let mut broken = mixing.clone();
        broken.block[(0, 0)] *= 1.01;
        assert!(matches!(validate_block_s(&broken).violations[0], BlockViolation::NotUnitary { .. }));

        let bad_labels = ChannelBlockS::new(
            am(2),
            0.5,
            vec![(am(0), am(0)), (am(0), am(0))],
            DMatrix::identity(2, 2),
        );
        let v = validate_block_s(&bad_labels);
        assert!(v.violations.iter().any(|x| matches!(x, BlockViolation::DuplicateChannel { .. })));
        assert!(v.violations.iter().any(|x| matches!(x, BlockViolation::Triangle { .. })));

        let shape = ChannelBlockS::new(am(0), 0.5, vec![(am(0), am(0))], DMatrix::identity(2, 2));
        assert!(matches!(validate_block_s(&shape).violations[0], BlockViolation::Shape { .. }));
    }

    #[test]
    fn block_apply_checks_length() {
        let b = ChannelBlockS::new(am(0), 0.0, vec![(am(0), am(0))], DMatrix::identity(1, 1));
        let one = Complex64::new(1.0, 0.0);
        assert_eq!(b.apply(&[one]).unwrap(), vec![one]);
        assert!(b.apply(&[one, one]).is_err());
    }

    #[test]
    fn fermion_channels() {
        assert!(fermion_channel_allowed(am(0), am(0)).unwrap());
        assert!(!fermion_channel_allowed(am(0), am(2)).unwrap());
        assert!(fermion_channel_allowed(am(2), am(2)).unwrap());
        assert!(!fermion_channel_allowed(am(2), am(0)).unwrap());
        assert!(fermion_channel_allowed(am(1), am(0)).is_err());
        assert!(fermion_channel_allowed(am(0), am(1)).is_err());
    }

    #[test]
    fn total_j_matrix_for_s_wave() {
        let phases = SpinPhasePair::new(0.5, -0.1);
        let s = central_smatrix_total_j(am(0), phases).unwrap();
        assert_eq!(s.labels.len(), 4);
        assert!(s.max_off_diagonal() < 1e-12);
        assert!((s.matrix[(0, 0)] - phases.channel_factor(0)).norm() < 1e-12);
        for k in 1..4 {
            assert!((s.matrix[(k, k)] - phases.channel_factor(1)).norm() < 1e-12);
        }
    }
}
