//! Dense complex linear algebra for one, two and three qubits.
//!
//! Matrices are stored row-major and restricted to dimensions 2, 4 and 8.
//! Every value is immutable once built; all operations are pure.

use std::fmt;

pub use num_complex::Complex64 as Complex;
use rand::Rng;

use crate::error::{Error, Result};

/// Absolute tolerance for constructed quantities.
pub const EXACT_TOL: f64 = 1e-12;
/// Absolute tolerance for iteratively computed quantities.
pub const ITERATIVE_TOL: f64 = 1e-9;

const MAX_SQUARINGS: usize = 96;

fn check_dim(dim: usize) -> Result<()> {
    match dim {
        2 | 4 | 8 => Ok(()),
        d => Err(Error::UnsupportedDimension(d)),
    }
}

fn real(x: f64) -> Complex {
    Complex::new(x, 0.0)
}

pub(crate) fn dot3(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub(crate) fn norm3(a: [f64; 3]) -> f64 {
    dot3(a, a).sqrt()
}

pub(crate) fn add3(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

pub(crate) fn sub3(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

/// A direction in three-dimensional space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitVector3 {
    x: f64,
    y: f64,
    z: f64,
}

impl UnitVector3 {
    pub const X: UnitVector3 = UnitVector3 { x: 1.0, y: 0.0, z: 0.0 };
    pub const Y: UnitVector3 = UnitVector3 { x: 0.0, y: 1.0, z: 0.0 };
    pub const Z: UnitVector3 = UnitVector3 { x: 0.0, y: 0.0, z: 1.0 };

    /// Accepts `(x, y, z)` only if it already has unit length.
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        Self::new_with_tol(x, y, z, EXACT_TOL)
    }

    pub fn new_with_tol(x: f64, y: f64, z: f64, tol: f64) -> Result<Self> {
        let n2 = x * x + y * y + z * z;
        if !n2.is_finite() || (n2 - 1.0).abs() > tol {
            return Err(Error::NotNormalized { norm: n2.sqrt() });
        }
        Ok(Self { x, y, z })
    }

    /// Rescales a nonzero vector to unit length.
    pub fn normalize(x: f64, y: f64, z: f64) -> Result<Self> {
        let n = norm3([x, y, z]);
        if !n.is_finite() || n < EXACT_TOL {
            return Err(Error::NotNormalized { norm: n });
        }
        Ok(Self { x: x / n, y: y / n, z: z / n })
    }

    /// Polar angle `theta` from +z, azimuth `phi` from +x.
    pub fn from_angles(theta: f64, phi: f64) -> Self {
        let (st, ct) = theta.sin_cos();
        let (sp, cp) = phi.sin_cos();
        Self { x: st * cp, y: st * sp, z: ct }
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn y(&self) -> f64 {
        self.y
    }

    pub fn z(&self) -> f64 {
        self.z
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn dot(&self, other: [f64; 3]) -> f64 {
        dot3(self.to_array(), other)
    }

    pub fn neg(self) -> Self {
        Self { x: -self.x, y: -self.y, z: -self.z }
    }
}

impl fmt::Display for UnitVector3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.x, self.y, self.z)
    }
}

/// A normalized pure state of one, two or three qubits.
///
/// Basis order is the computational one with `|+>` (spin up along z) as
/// index 0, so two-qubit amplitudes are ordered `++, +-, -+, --`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amps: Vec<Complex>,
}

impl StateVector {
    /// Accepts amplitudes that already have unit norm.
    pub fn new(amps: Vec<Complex>) -> Result<Self> {
        check_dim(amps.len())?;
        let norm = norm(&amps);
        if (norm * norm - 1.0).abs() > EXACT_TOL {
            return Err(Error::NotNormalized { norm });
        }
        Ok(Self { amps })
    }

    /// Normalizing constructor.
    pub fn normalized(amps: Vec<Complex>) -> Result<Self> {
        check_dim(amps.len())?;
        let norm = norm(&amps);
        if !norm.is_finite() || norm < EXACT_TOL {
            return Err(Error::NotNormalized { norm });
        }
        Ok(Self { amps: amps.into_iter().map(|a| a / norm).collect() })
    }

    pub fn from_real(amps: &[f64]) -> Result<Self> {
        Self::normalized(amps.iter().copied().map(real).collect())
    }

    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        check_dim(dim)?;
        if index >= dim {
            return Err(Error::InvalidParameter(format!("basis index {index} out of range for dimension {dim}")));
        }
        let mut amps = vec![Complex::new(0.0, 0.0); dim];
        amps[index] = real(1.0);
        Ok(Self { amps })
    }

    /// The pure qubit state whose Bloch vector is `n`.
    pub fn from_bloch(n: UnitVector3) -> Self {
        let theta = n.z().clamp(-1.0, 1.0).acos();
        let phi = n.y().atan2(n.x());
        let (s, c) = (theta / 2.0).sin_cos();
        Self { amps: vec![real(c), Complex::from_polar(s, phi)] }
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amps(&self) -> &[Complex] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        norm(&self.amps)
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &StateVector) -> Result<Complex> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: other.dim() });
        }
        Ok(self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum())
    }

    /// Kronecker product `self ⊗ other`.
    pub fn tensor(&self, other: &StateVector) -> Result<StateVector> {
        let dim = self.dim() * other.dim();
        check_dim(dim)?;
        let amps = self
            .amps
            .iter()
            .flat_map(|a| other.amps.iter().map(move |b| a * b))
            .collect();
        Ok(Self { amps })
    }
}

fn norm(amps: &[Complex]) -> f64 {
    amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
}

/// A Hermitian operator on one, two or three qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct Observable {
    dim: usize,
    entries: Vec<Complex>,
}

impl Observable {
    /// Row-major entries; rejects matrices that are not Hermitian within
    /// [`EXACT_TOL`].
    pub fn from_entries(dim: usize, entries: Vec<Complex>) -> Result<Self> {
        Self::from_entries_with_tol(dim, entries, EXACT_TOL)
    }

    pub fn from_entries_with_tol(dim: usize, entries: Vec<Complex>, tol: f64) -> Result<Self> {
        check_dim(dim)?;
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch { expected: dim * dim, got: entries.len() });
        }
        let deviation = hermiticity_deviation(dim, &entries);
        if deviation > tol {
            return Err(Error::NotHermitian { deviation });
        }
        Ok(Self { dim, entries })
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let dim = rows.len();
        let entries = rows
            .iter()
            .flat_map(|r| r.iter().copied().map(real))
            .collect();
        Self::from_entries(dim, entries)
    }

    pub fn identity(dim: usize) -> Result<Self> {
        check_dim(dim)?;
        let mut entries = vec![Complex::new(0.0, 0.0); dim * dim];
        for i in 0..dim {
            entries[i * dim + i] = real(1.0);
        }
        Ok(Self { dim, entries })
    }

    pub fn diagonal(values: &[f64]) -> Result<Self> {
        let dim = values.len();
        check_dim(dim)?;
        let mut entries = vec![Complex::new(0.0, 0.0); dim * dim];
        for (i, v) in values.iter().enumerate() {
            entries[i * dim + i] = real(*v);
        }
        Ok(Self { dim, entries })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[Complex] {
        &self.entries
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex {
        self.entries[row * self.dim + col]
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.entry(i, i).re).sum()
    }

    fn same_dim(&self, other: &Observable) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: other.dim });
        }
        Ok(())
    }

    pub fn add(&self, other: &Observable) -> Result<Observable> {
        self.same_dim(other)?;
        let entries = self.entries.iter().zip(&other.entries).map(|(a, b)| a + b).collect();
        Ok(Self { dim: self.dim, entries })
    }

    pub fn sub(&self, other: &Observable) -> Result<Observable> {
        self.same_dim(other)?;
        let entries = self.entries.iter().zip(&other.entries).map(|(a, b)| a - b).collect();
        Ok(Self { dim: self.dim, entries })
    }

    pub fn scale(&self, factor: f64) -> Observable {
        Self { dim: self.dim, entries: self.entries.iter().map(|a| a * factor).collect() }
    }

    /// `self · other`, which is Hermitian only when the two commute.
    pub fn product(&self, other: &Observable) -> Result<Observable> {
        self.same_dim(other)?;
        Self::from_entries(self.dim, matmul(self.dim, &self.entries, &other.entries))
    }

    /// `self · other · self`, Hermitian for any Hermitian pair.
    pub fn sandwich(&self, other: &Observable) -> Result<Observable> {
        self.same_dim(other)?;
        let left = matmul(self.dim, &self.entries, &other.entries);
        let mut entries = matmul(self.dim, &left, &self.entries);
        symmetrize(self.dim, &mut entries);
        Ok(Self { dim: self.dim, entries })
    }

    pub fn square(&self) -> Observable {
        let mut entries = matmul(self.dim, &self.entries, &self.entries);
        symmetrize(self.dim, &mut entries);
        Self { dim: self.dim, entries }
    }

    pub fn apply(&self, psi: &StateVector) -> Result<Vec<Complex>> {
        if psi.dim() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: psi.dim() });
        }
        Ok(apply(self.dim, &self.entries, psi.amps()))
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Observable) -> Result<f64> {
        self.same_dim(other)?;
        Ok(self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    pub fn is_projector(&self, tol: f64) -> bool {
        self.square().max_abs_diff(self).map(|d| d <= tol).unwrap_or(false)
    }
}

fn hermiticity_deviation(dim: usize, entries: &[Complex]) -> f64 {
    let mut dev = 0.0f64;
    for i in 0..dim {
        for j in i..dim {
            dev = dev.max((entries[i * dim + j] - entries[j * dim + i].conj()).norm());
        }
    }
    dev
}

// Removes round-off asymmetry from products that are Hermitian in exact arithmetic.
fn symmetrize(dim: usize, entries: &mut [Complex]) {
    for i in 0..dim {
        entries[i * dim + i].im = 0.0;
        for j in (i + 1)..dim {
            let avg = (entries[i * dim + j] + entries[j * dim + i].conj()) * 0.5;
            entries[i * dim + j] = avg;
            entries[j * dim + i] = avg.conj();
        }
    }
}

fn matmul(dim: usize, a: &[Complex], b: &[Complex]) -> Vec<Complex> {
    let mut out = vec![Complex::new(0.0, 0.0); dim * dim];
    for i in 0..dim {
        for k in 0..dim {
            let aik = a[i * dim + k];
            if aik == Complex::new(0.0, 0.0) {
                continue;
            }
            for j in 0..dim {
                out[i * dim + j] += aik * b[k * dim + j];
            }
        }
    }
    out
}

fn apply(dim: usize, m: &[Complex], v: &[Complex]) -> Vec<Complex> {
    (0..dim)
        .map(|i| (0..dim).map(|j| m[i * dim + j] * v[j]).sum())
        .collect()
}

pub fn pauli_x() -> Observable {
    pauli_observable(UnitVector3::X)
}

pub fn pauli_y() -> Observable {
    pauli_observable(UnitVector3::Y)
}

pub fn pauli_z() -> Observable {
    pauli_observable(UnitVector3::Z)
}

/// `n·σ` for a unit vector `n`.
pub fn pauli_observable(n: UnitVector3) -> Observable {
    let entries = vec![
        real(n.z()),
        Complex::new(n.x(), -n.y()),
        Complex::new(n.x(), n.y()),
        real(-n.z()),
    ];
    Observable { dim: 2, entries }
}

/// `(1 + n·σ)/2`, the projector onto spin up along `n`.
pub fn spin_projector(n: UnitVector3) -> Observable {
    let mut p = pauli_observable(n).scale(0.5);
    p.entries[0] += 0.5;
    p.entries[3] += 0.5;
    p
}

/// Kronecker product `a ⊗ b`.
pub fn tensor_product(a: &Observable, b: &Observable) -> Result<Observable> {
    let dim = a.dim * b.dim;
    check_dim(dim)?;
    let mut entries = vec![Complex::new(0.0, 0.0); dim * dim];
    for i in 0..a.dim {
        for j in 0..a.dim {
            let aij = a.entry(i, j);
            for k in 0..b.dim {
                for l in 0..b.dim {
                    entries[(i * b.dim + k) * dim + (j * b.dim + l)] = aij * b.entry(k, l);
                }
            }
        }
    }
    Ok(Observable { dim, entries })
}

/// `<psi|o|psi>`.
pub fn expectation(o: &Observable, psi: &StateVector) -> Result<f64> {
    expectation_with_tol(o, psi, EXACT_TOL)
}

pub fn expectation_with_tol(o: &Observable, psi: &StateVector, tol: f64) -> Result<f64> {
    let o_psi = o.apply(psi)?;
    let q: Complex = psi.amps().iter().zip(&o_psi).map(|(a, b)| a.conj() * b).sum();
    if q.im.abs() > tol {
        return Err(Error::NotHermitian { deviation: q.im.abs() });
    }
    Ok(q.re)
}

/// `|k><k|` for a normalized `k`.
pub fn projector(k: &StateVector) -> Result<Observable> {
    let norm = k.norm();
    if (norm * norm - 1.0).abs() > EXACT_TOL {
        return Err(Error::NotNormalized { norm });
    }
    let dim = k.dim();
    let amps = k.amps();
    let entries = (0..dim)
        .flat_map(|i| (0..dim).map(move |j| amps[i] * amps[j].conj()))
        .collect();
    Ok(Observable { dim, entries })
}

/// Splits a qubit observable as `c0·1 + c·σ`, returning `(c0, c)`.
pub fn bloch_components(h: &Observable) -> Result<(f64, [f64; 3])> {
    if h.dim != 2 {
        return Err(Error::DimensionMismatch { expected: 2, got: h.dim });
    }
    let h00 = h.entry(0, 0).re;
    let h11 = h.entry(1, 1).re;
    let h01 = h.entry(0, 1);
    Ok(((h00 + h11) / 2.0, [h01.re, -h01.im, (h00 - h11) / 2.0]))
}

/// Eigenvalues and spectral projectors of a qubit observable.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralPair {
    pub mu1: f64,
    pub mu2: f64,
    pub p1: Observable,
    pub p2: Observable,
}

impl SpectralPair {
    pub fn reconstruct(&self) -> Observable {
        self.p1
            .scale(self.mu1)
            .add(&self.p2.scale(self.mu2))
            .expect("projectors share dimension 2")
    }
}

/// Spectral decomposition `h = mu1·p1 + mu2·p2` with `mu1 >= mu2`.
///
/// With `h = c0 + c·σ` the eigenvalues are `c0 ± |c|` and the projectors
/// `(1 ± ĉ·σ)/2`. When `|c|` vanishes the pair `diag(1,0)`, `diag(0,1)` is
/// returned.
pub fn spectral_decompose2(h: &Observable) -> Result<SpectralPair> {
    let (c0, c) = bloch_components(h)?;
    let r = norm3(c);
    if r < EXACT_TOL {
        return Ok(SpectralPair {
            mu1: c0,
            mu2: c0,
            p1: Observable::diagonal(&[1.0, 0.0])?,
            p2: Observable::diagonal(&[0.0, 1.0])?,
        });
    }
    let axis = UnitVector3 { x: c[0] / r, y: c[1] / r, z: c[2] / r };
    Ok(SpectralPair {
        mu1: c0 + r,
        mu2: c0 - r,
        p1: spin_projector(axis),
        p2: spin_projector(axis.neg()),
    })
}

/// Largest absolute eigenvalue of a Hermitian operator.
///
/// Power iteration on `O²`, run on all computational basis vectors at once
/// by repeated squaring: after `k` squarings column `j` holds
/// `(O²)^(2^k) e_j`. The column with the largest norm seeds a Rayleigh
/// quotient, which is exact to second order in the eigenvector error.
pub fn operator_norm(o: &Observable) -> Result<f64> {
    let dim = o.dim;
    let m = o.square();
    let scale = max_abs(&m.entries);
    if scale == 0.0 {
        return Ok(0.0);
    }
    let mut power: Vec<Complex> = m.entries.iter().map(|a| a / scale).collect();
    let mut converged = false;
    for _ in 0..MAX_SQUARINGS {
        let mut next = matmul(dim, &power, &power);
        symmetrize(dim, &mut next);
        let s = max_abs(&next);
        next.iter_mut().for_each(|a| *a /= s);
        let change = next
            .iter()
            .zip(&power)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        power = next;
        if change < 1e-13 {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NonConvergence { what: "operator norm power iteration", iterations: MAX_SQUARINGS });
    }

    let column = |j: usize| (0..dim).map(|i| power[i * dim + j]).collect::<Vec<_>>();
    let best = (0..dim)
        .max_by(|&a, &b| norm(&column(a)).total_cmp(&norm(&column(b))))
        .expect("dimension is nonzero");
    let mut x = column(best);
    let n = norm(&x);
    x.iter_mut().for_each(|a| *a /= n);

    // two plain power steps against the unscaled O²
    for _ in 0..2 {
        let y = apply(dim, &m.entries, &x);
        let n = norm(&y);
        if n == 0.0 {
            break;
        }
        x = y.into_iter().map(|a| a / n).collect();
    }
    let mx = apply(dim, &m.entries, &x);
    let rho: f64 = x.iter().zip(&mx).map(|(a, b)| (a.conj() * b).re).sum();
    let residual = norm(&mx.iter().zip(&x).map(|(a, b)| a - b * rho).collect::<Vec<_>>());
    if residual > 1e-6 * scale.max(1.0) {
        return Err(Error::NonConvergence { what: "operator norm residual", iterations: MAX_SQUARINGS });
    }
    Ok(rho.max(0.0).sqrt())
}

fn max_abs(entries: &[Complex]) -> f64 {
    entries.iter().map(|a| a.norm()).fold(0.0, f64::max)
}

/// A uniformly distributed direction.
pub fn random_unit_vector<R: Rng + ?Sized>(rng: &mut R) -> UnitVector3 {
    let z: f64 = rng.gen_range(-1.0..=1.0);
    let phi: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
    let r = (1.0 - z * z).max(0.0).sqrt();
    UnitVector3 { x: r * phi.cos(), y: r * phi.sin(), z }
}

/// A random normalized state with Gaussian-like amplitudes.
pub fn random_state<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Result<StateVector> {
    let amps = (0..dim)
        .map(|_| Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    StateVector::normalized(amps)
}

/// A random Hermitian matrix with entries of order one.
pub fn random_hermitian<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Result<Observable> {
    check_dim(dim)?;
    let mut entries = vec![Complex::new(0.0, 0.0); dim * dim];
    for i in 0..dim {
        entries[i * dim + i] = real(rng.gen_range(-1.0..1.0));
        for j in (i + 1)..dim {
            let z = Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            entries[i * dim + j] = z;
            entries[j * dim + i] = z.conj();
        }
    }
    Ok(Observable { dim, entries })
}
