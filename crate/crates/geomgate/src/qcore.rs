//! Dense complex linear algebra for small Hilbert spaces: states, unitaries,
//! Pauli algebra, gate construction and comparison metrics.
//!
//! Conventions used throughout the crate:
//!
//! * basis order is |0⟩, |1⟩ (and |00⟩, |01⟩, |10⟩, |11⟩ for two qubits),
//! * σ_z = |0⟩⟨0| − |1⟩⟨1|, σ_x = |0⟩⟨1| + |1⟩⟨0|, σ_y = −i|0⟩⟨1| + i|1⟩⟨0|,
//! * phases are reported in the principal branch (−π, π]; accumulated
//!   (unwrapped) phases come from continuous integrals in [`crate::evolve`],
//!   never from `arg()`.

use ndarray::{Array1, Array2};
use num_complex::Complex64;
use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};
use thiserror::Error;

pub type C64 = Complex64;

/// Construction tolerance on state norms.
pub const NORM_TOL: f64 = 1e-12;
/// Default entrywise tolerance on ‖U†U − I‖_max.
pub const DEFAULT_UNITARITY_TOL: f64 = 1e-9;
/// Default residual tolerance for deciding that a vector is an eigenvector.
pub const DEFAULT_EIGENTOL: f64 = 1e-6;

#[derive(Debug, Error)]
pub enum QcoreError {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("state norm {norm} deviates from 1 by more than {tol:e}")]
    NotNormalized { norm: f64, tol: f64 },
    #[error("matrix is not unitary: max |U\u{2020}U - I| = {defect:.3e} > {tol:.3e}")]
    NotUnitary { defect: f64, tol: f64 },
    #[error("matrix is not Hermitian: max |H - H\u{2020}| = {defect:.3e} > {tol:.3e}")]
    NotHermitian { defect: f64, tol: f64 },
    #[error(
        "evolution is not cyclic on basis vector {index}: \
         eigen-residual {residual:.3e} > {tol:.3e}"
    )]
    NonCyclic { index: usize, residual: f64, tol: f64 },
    #[error("rotation axis has norm {0}, expected a unit vector within 1e-12")]
    BadAxis(f64),
}

/// Wrap an angle into the principal branch (−π, π].
pub fn principal_angle(x: f64) -> f64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    let y = x.rem_euclid(two_pi);
    if y > std::f64::consts::PI {
        y - two_pi
    } else {
        y
    }
}

fn fmt_c(z: C64) -> [f64; 2] {
    [z.re, z.im]
}

/// Normalized pure state of a small Hilbert space.
///
/// Renormalization is deliberately not offered: norm drift produced by a
/// propagation is a diagnostic, not something to hide.
#[derive(Clone, Debug)]
pub struct StateVector {
    amps: Array1<C64>,
}

impl StateVector {
    pub fn new(amps: Array1<C64>) -> Result<Self, QcoreError> {
        let state = Self { amps };
        let norm = state.norm();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(QcoreError::NotNormalized {
                norm,
                tol: NORM_TOL,
            });
        }
        Ok(state)
    }

    pub fn from_slice(amps: &[C64]) -> Result<Self, QcoreError> {
        Self::new(Array1::from(amps.to_vec()))
    }

    /// Build without the norm check. Intended for vectors produced by exact
    /// unitaries, whose drift is measured afterwards via [`Self::norm_defect`].
    pub(crate) fn from_raw(amps: Array1<C64>) -> Self {
        Self { amps }
    }

    /// Computational basis state |k⟩.
    pub fn basis_state(dim: usize, k: usize) -> Self {
        let mut amps = Array1::zeros(dim);
        amps[k] = C64::new(1.0, 0.0);
        Self { amps }
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &Array1<C64> {
        &self.amps
    }

    pub fn amp(&self, k: usize) -> C64 {
        self.amps[k]
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn norm_defect(&self) -> f64 {
        (self.norm() - 1.0).abs()
    }

    /// ⟨self|other⟩.
    pub fn inner(&self, other: &Self) -> C64 {
        self.amps
            .iter()
            .zip(other.amps.iter())
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// Tensor product |self⟩ ⊗ |other⟩.
    pub fn kron(&self, other: &Self) -> Self {
        let mut amps = Array1::zeros(self.dim() * other.dim());
        for (i, a) in self.amps.iter().enumerate() {
            for (j, b) in other.amps.iter().enumerate() {
                amps[i * other.dim() + j] = a * b;
            }
        }
        Self { amps }
    }
}

impl Serialize for StateVector {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.dim()))?;
        for z in self.amps.iter() {
            seq.serialize_element(&fmt_c(*z))?;
        }
        seq.end()
    }
}

/// A matrix stored exactly Hermitian: the constructor symmetrizes, so
/// `entry(i, j) == entry(j, i).conj()` holds bit for bit.
#[derive(Clone, Debug)]
pub struct HermitianMatrix {
    m: Array2<C64>,
}

impl HermitianMatrix {
    /// Symmetrize (H + H†)/2 unconditionally.
    pub fn hermitize(m: Array2<C64>) -> Self {
        let n = m.nrows();
        let mut out = Array2::zeros((n, n));
        for i in 0..n {
            for j in 0..n {
                out[(i, j)] = 0.5 * (m[(i, j)] + m[(j, i)].conj());
            }
        }
        Self { m: out }
    }

    /// Symmetrize after checking the anti-Hermitian residual against `tol`.
    pub fn from_matrix(m: Array2<C64>, tol: f64) -> Result<Self, QcoreError> {
        let defect = anti_hermitian_defect(&m);
        if defect > tol {
            return Err(QcoreError::NotHermitian { defect, tol });
        }
        Ok(Self::hermitize(m))
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            m: Array2::zeros((dim, dim)),
        }
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &Array2<C64> {
        &self.m
    }

    pub fn entry(&self, i: usize, j: usize) -> C64 {
        self.m[(i, j)]
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            m: self.m.mapv(|z| z * factor),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            m: &self.m + &other.m,
        }
    }

    /// ⟨ψ|H|ψ⟩ (real for Hermitian H; the imaginary part is dropped).
    pub fn expectation(&self, psi: &StateVector) -> f64 {
        let hp = self.m.dot(psi.amplitudes());
        psi.amplitudes()
            .iter()
            .zip(hp.iter())
            .map(|(a, b)| (a.conj() * b).re)
            .sum()
    }

    pub fn apply(&self, psi: &StateVector) -> Array1<C64> {
        self.m.dot(psi.amplitudes())
    }

    pub fn max_abs(&self) -> f64 {
        self.m.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

pub fn anti_hermitian_defect(m: &Array2<C64>) -> f64 {
    let n = m.nrows();
    let mut defect = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            defect = defect.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    defect
}

/// Unitary matrix, validated entrywise against U†U = I at construction.
#[derive(Clone, Debug)]
pub struct UnitaryMatrix {
    m: Array2<C64>,
}

impl UnitaryMatrix {
    pub fn new(m: Array2<C64>, unitarity_tol: f64) -> Result<Self, QcoreError> {
        let defect = unitarity_defect(&m);
        if defect > unitarity_tol {
            return Err(QcoreError::NotUnitary {
                defect,
                tol: unitarity_tol,
            });
        }
        Ok(Self { m })
    }

    /// Build without the check; for products of already-validated factors.
    pub(crate) fn from_raw(m: Array2<C64>) -> Self {
        Self { m }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            m: Array2::eye(dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &Array2<C64> {
        &self.m
    }

    pub fn entry(&self, i: usize, j: usize) -> C64 {
        self.m[(i, j)]
    }

    pub fn adjoint(&self) -> Self {
        let n = self.dim();
        let mut out = Array2::zeros((n, n));
        for i in 0..n {
            for j in 0..n {
                out[(i, j)] = self.m[(j, i)].conj();
            }
        }
        Self { m: out }
    }

    /// self · other.
    pub fn compose(&self, other: &Self) -> Self {
        Self {
            m: self.m.dot(&other.m),
        }
    }

    pub fn apply(&self, psi: &StateVector) -> StateVector {
        StateVector::from_raw(self.m.dot(psi.amplitudes()))
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim()).map(|i| self.m[(i, i)]).sum()
    }

    pub fn unitarity_defect(&self) -> f64 {
        unitarity_defect(&self.m)
    }

    /// R · self · R†.
    pub fn conjugated_by(&self, r: &Self) -> Self {
        r.compose(self).compose(&r.adjoint())
    }
}

impl Serialize for UnitaryMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut rows = serializer.serialize_seq(Some(self.dim()))?;
        for i in 0..self.dim() {
            let row: Vec<[f64; 2]> = (0..self.dim()).map(|j| fmt_c(self.m[(i, j)])).collect();
            rows.serialize_element(&row)?;
        }
        rows.end()
    }
}

/// max |(U†U − I)_{ij}|.
pub fn unitarity_defect(m: &Array2<C64>) -> f64 {
    let n = m.nrows();
    let mut defect = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let mut s = C64::new(0.0, 0.0);
            for k in 0..n {
                s += m[(k, i)].conj() * m[(k, j)];
            }
            if i == j {
                s -= 1.0;
            }
            defect = defect.max(s.norm());
        }
    }
    defect
}

pub fn sigma_x() -> HermitianMatrix {
    let one = C64::new(1.0, 0.0);
    let zero = C64::new(0.0, 0.0);
    HermitianMatrix {
        m: ndarray::array![[zero, one], [one, zero]],
    }
}

pub fn sigma_y() -> HermitianMatrix {
    let zero = C64::new(0.0, 0.0);
    let i = C64::new(0.0, 1.0);
    HermitianMatrix {
        m: ndarray::array![[zero, -i], [i, zero]],
    }
}

pub fn sigma_z() -> HermitianMatrix {
    let one = C64::new(1.0, 0.0);
    let zero = C64::new(0.0, 0.0);
    HermitianMatrix {
        m: ndarray::array![[one, zero], [zero, -one]],
    }
}

/// n·σ for a real 3-vector n (need not be unit).
pub fn pauli_combination(n: [f64; 3]) -> HermitianMatrix {
    let mut m = Array2::zeros((2, 2));
    m[(0, 0)] = C64::new(n[2], 0.0);
    m[(1, 1)] = C64::new(-n[2], 0.0);
    m[(0, 1)] = C64::new(n[0], -n[1]);
    m[(1, 0)] = C64::new(n[0], n[1]);
    HermitianMatrix { m }
}

/// XY exchange R^x = (σ_x σ_x + σ_y σ_y)/2 = |01⟩⟨10| + |10⟩⟨01|.
pub fn xy_exchange() -> HermitianMatrix {
    let mut m = Array2::zeros((4, 4));
    m[(1, 2)] = C64::new(1.0, 0.0);
    m[(2, 1)] = C64::new(1.0, 0.0);
    HermitianMatrix { m }
}

/// Dzyaloshinskii–Moriya exchange R^y = (σ_x σ_y − σ_y σ_x)/2
/// = i|01⟩⟨10| − i|10⟩⟨01|.
pub fn dm_exchange() -> HermitianMatrix {
    let mut m = Array2::zeros((4, 4));
    m[(1, 2)] = C64::new(0.0, 1.0);
    m[(2, 1)] = C64::new(0.0, -1.0);
    HermitianMatrix { m }
}

/// R^z = (σ_z ⊗ I − I ⊗ σ_z)/2 = |01⟩⟨01| − |10⟩⟨10|.
pub fn z_imbalance() -> HermitianMatrix {
    let mut m = Array2::zeros((4, 4));
    m[(1, 1)] = C64::new(1.0, 0.0);
    m[(2, 2)] = C64::new(-1.0, 0.0);
    HermitianMatrix { m }
}

/// Target rotation: axis n (unit 3-vector) and half-angle γ, i.e. the gate
/// exp(−iγ n·σ) with rotation angle 2γ. The Bloch point (θ₀, φ₀) where the
/// axis pierces the sphere is the required start point of any evolution path
/// realizing the gate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GateSpec {
    axis: [f64; 3],
    half_angle: f64,
}

impl GateSpec {
    /// `axis` must be unit within 1e-12; `half_angle` is wrapped into (−π, π].
    pub fn new(axis: [f64; 3], half_angle: f64) -> Result<Self, QcoreError> {
        let norm = (axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]).sqrt();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(QcoreError::BadAxis(norm));
        }
        Ok(Self {
            axis: [axis[0] / norm, axis[1] / norm, axis[2] / norm],
            half_angle: principal_angle(half_angle),
        })
    }

    pub fn z(half_angle: f64) -> Self {
        Self::new([0.0, 0.0, 1.0], half_angle).expect("z axis is unit")
    }

    pub fn axis(&self) -> [f64; 3] {
        self.axis
    }

    pub fn half_angle(&self) -> f64 {
        self.half_angle
    }

    /// (θ₀, φ₀) with n = (sinθ₀cosφ₀, sinθ₀sinφ₀, cosθ₀). φ₀ = 0 at the poles.
    pub fn start_point(&self) -> (f64, f64) {
        let theta = self.axis[2].clamp(-1.0, 1.0).acos();
        let phi = if self.axis[0] == 0.0 && self.axis[1] == 0.0 {
            0.0
        } else {
            self.axis[1].atan2(self.axis[0])
        };
        (theta, phi)
    }
}

/// exp(−iγ n·σ) = cos(γ) I − i sin(γ) n·σ.
pub fn gate_from_spec(spec: &GateSpec) -> UnitaryMatrix {
    let g = spec.half_angle();
    let ns = pauli_combination(spec.axis());
    let cos = C64::new(g.cos(), 0.0);
    let misin = C64::new(0.0, -g.sin());
    let mut m = Array2::zeros((2, 2));
    for i in 0..2 {
        for j in 0..2 {
            m[(i, j)] = misin * ns.entry(i, j);
            if i == j {
                m[(i, j)] += cos;
            }
        }
    }
    UnitaryMatrix { m }
}

/// Embed a 2×2 unitary into the {|01⟩, |10⟩} block of a 4×4 identity.
pub fn embed_central_block(u: &UnitaryMatrix) -> UnitaryMatrix {
    assert_eq!(u.dim(), 2, "central-block embedding takes a 2x2 unitary");
    let mut m = Array2::eye(4);
    for i in 0..2 {
        for j in 0..2 {
            m[(i + 1, j + 1)] = u.entry(i, j);
        }
    }
    UnitaryMatrix { m }
}

/// Global-phase-insensitive gate fidelity F = |Tr(U†V)| / d ∈ [0, 1].
///
/// F = 1 exactly when U = e^{iχ}V; the metric is symmetric and invariant
/// under simultaneous left- or right-multiplication by any unitary.
pub fn gate_fidelity(u: &UnitaryMatrix, v: &UnitaryMatrix) -> Result<f64, QcoreError> {
    if u.dim() != v.dim() {
        return Err(QcoreError::DimensionMismatch(u.dim(), v.dim()));
    }
    let n = u.dim();
    let mut tr = C64::new(0.0, 0.0);
    for i in 0..n {
        for k in 0..n {
            tr += u.matrix()[(k, i)].conj() * v.matrix()[(k, i)];
        }
    }
    Ok(tr.norm() / n as f64)
}

/// Extract holonomy phases from a cyclic evolution operator.
///
/// Each basis vector must be an eigenvector of `u` up to `eigentol`; the
/// returned phases are arg⟨φ_k|U|φ_k⟩ in (−π, π], one per basis vector.
pub fn holonomy_extract(
    u: &UnitaryMatrix,
    basis: &[StateVector],
    eigentol: f64,
) -> Result<Vec<f64>, QcoreError> {
    let mut phases = Vec::with_capacity(basis.len());
    for (index, phi) in basis.iter().enumerate() {
        if phi.dim() != u.dim() {
            return Err(QcoreError::DimensionMismatch(phi.dim(), u.dim()));
        }
        let u_phi = u.apply(phi);
        let lambda = phi.inner(&u_phi);
        let residual = phi
            .amplitudes()
            .iter()
            .zip(u_phi.amplitudes().iter())
            .map(|(p, up)| (up - lambda * p).norm_sqr())
            .sum::<f64>()
            .sqrt();
        if residual > eigentol {
            return Err(QcoreError::NonCyclic {
                index,
                residual,
                tol: eigentol,
            });
        }
        phases.push(principal_angle(lambda.arg()));
    }
    Ok(phases)
}
