//! Driving-Hamiltonian construction from a cyclic auxiliary frame.
//!
//! Given orthonormal frame vectors |ν_k(t)⟩ with ν_k(τ) = ν_k(0), the
//! inverse-engineered Hamiltonian
//!
//! ```text
//! H(t) = i Σ_{l≠k} ⟨ν_l(t)|ν̇_k(t)⟩ |ν_l(t)⟩⟨ν_k(t)|
//! ```
//!
//! transports each state e^{iγ_k(t)}|ν_k(t)⟩ cyclically with zero dynamical
//! phase, where γ_k(t) = i ∫ ⟨ν_k|ν̇_k⟩ dt′. Closed forms are provided for
//! the standard one-qubit frame over (θ, φ) and the two-qubit frame over
//! (α, β) acting on the {|01⟩, |10⟩} exchange block.
//!
//! Sign bookkeeping for the control decomposition: with
//! σ_z = |0⟩⟨0| − |1⟩⟨1| the σ_z coefficient of the one-qubit Hamiltonian is
//! +φ̇ sin²θ/2, and writing H = Δ(|1⟩⟨1| − |0⟩⟨0|) + (Ω|1⟩⟨0| + h.c.) gives
//! Δ = −φ̇ sin²θ/2 and Ω = ⟨1|H|0⟩. Both statements describe the same matrix;
//! the reconstruction identity in [`ControlSignals::reconstruct`] is the
//! ground truth and is enforced by tests.

use crate::paths::{CurvePoint, ParamCurve};
use crate::qcore::{
    anti_hermitian_defect, dm_exchange, xy_exchange, z_imbalance, C64, HermitianMatrix,
    StateVector, UnitaryMatrix,
};
use crate::quad;
use ndarray::{Array1, Array2};
use std::sync::Arc;
use thiserror::Error;

/// Orthonormality / cyclicity tolerance for frames.
pub const FRAME_TOL: f64 = 1e-10;
/// Default finite-difference step, as a fraction of τ.
pub const DEFAULT_FD_STEP_FRACTION: f64 = 1e-6;

#[derive(Debug, Error)]
pub enum SynthError {
    #[error("frame is not orthonormal at t = {t}: max |⟨ν_i|ν_j⟩ - δ_ij| = {defect:.3e}")]
    FrameNotOrthonormal { t: f64, defect: f64 },
    #[error("frame is not cyclic: max_k ‖ν_k(τ) - ν_k(0)‖ = {defect:.3e}")]
    NonCyclicFrame { defect: f64 },
    #[error("schedule carries no control decomposition")]
    MissingControls,
    #[error(
        "drive envelope has nonconstant phase on [{t_from}, {t_to}]: \
         meridian and arc components are both active"
    )]
    ComplexEnvelope { t_from: f64, t_to: f64 },
    #[error("window [{0}, {1}] is outside the schedule domain")]
    BadWindow(f64, f64),
}

/// Laboratory control decomposition of a schedule sample.
#[derive(Clone, Copy, Debug)]
pub enum ControlSignals {
    /// One-qubit drive: H = Δ(|1⟩⟨1|−|0⟩⟨0|) + (Ω|1⟩⟨0| + h.c.).
    /// `carrier_phase` is the chart azimuth φ(t) the drive phase is
    /// referenced to.
    Qubit {
        delta: f64,
        rabi: C64,
        carrier_phase: f64,
    },
    /// Two-qubit exchange drive: H = c_x R^x + c_y R^y + c_z R^z.
    Exchange { cx: f64, cy: f64, cz: f64 },
}

impl ControlSignals {
    /// Rebuild the Hamiltonian matrix this sample describes.
    pub fn reconstruct(&self) -> HermitianMatrix {
        match self {
            ControlSignals::Qubit { delta, rabi, .. } => {
                let mut m = Array2::zeros((2, 2));
                m[(0, 0)] = C64::new(-delta, 0.0);
                m[(1, 1)] = C64::new(*delta, 0.0);
                m[(1, 0)] = *rabi;
                m[(0, 1)] = rabi.conj();
                HermitianMatrix::hermitize(m)
            }
            ControlSignals::Exchange { cx, cy, cz } => xy_exchange()
                .scaled(*cx)
                .add(&dm_exchange().scaled(*cy))
                .add(&z_imbalance().scaled(*cz)),
        }
    }
}

type EvalFn = dyn Fn(f64) -> HermitianMatrix + Send + Sync;
type ControlFn = dyn Fn(f64) -> ControlSignals + Send + Sync;

/// Time-dependent Hermitian generator on [0, τ], with an optional control
/// decomposition. Evaluators are pure functions of t and shareable across
/// threads.
#[derive(Clone)]
pub struct HamiltonianSchedule {
    dim: usize,
    tau: f64,
    eval: Arc<EvalFn>,
    controls: Option<Arc<ControlFn>>,
    /// Interior times where the generator may be discontinuous; integrators
    /// align step edges to these.
    breakpoints: Vec<f64>,
}

impl HamiltonianSchedule {
    pub fn from_fn<F>(dim: usize, tau: f64, eval: F) -> Self
    where
        F: Fn(f64) -> HermitianMatrix + Send + Sync + 'static,
    {
        Self {
            dim,
            tau,
            eval: Arc::new(eval),
            controls: None,
            breakpoints: Vec::new(),
        }
    }

    pub fn with_breakpoints(mut self, mut breakpoints: Vec<f64>) -> Self {
        breakpoints.retain(|t| *t > 0.0 && *t < self.tau);
        breakpoints.sort_by(|a, b| a.partial_cmp(b).unwrap());
        breakpoints.dedup();
        self.breakpoints = breakpoints;
        self
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn hamiltonian(&self, t: f64) -> HermitianMatrix {
        (self.eval)(t)
    }

    pub fn controls(&self, t: f64) -> Option<ControlSignals> {
        self.controls.as_ref().map(|c| c(t))
    }

    pub fn has_controls(&self) -> bool {
        self.controls.is_some()
    }

    /// R H(t) R†; the control decomposition does not survive the basis
    /// change and is dropped.
    pub fn conjugated(&self, r: &UnitaryMatrix) -> Self {
        assert_eq!(r.dim(), self.dim, "conjugation dimension mismatch");
        let eval = self.eval.clone();
        let r = r.clone();
        let rd = r.adjoint();
        Self {
            dim: self.dim,
            tau: self.tau,
            eval: Arc::new(move |t| {
                let h = eval(t);
                let m = r.matrix().dot(h.matrix()).dot(rd.matrix());
                HermitianMatrix::hermitize(m)
            }),
            controls: None,
            breakpoints: self.breakpoints.clone(),
        }
    }

    /// Same path traversed at a warped rate: H'(t) = w'(t/τ) · H(τ·w(t/τ)).
    pub fn time_warped(&self, profile: crate::paths::RateProfile) -> Self {
        let eval = self.eval.clone();
        let controls = self.controls.clone();
        let tau = self.tau;
        let p2 = profile.clone();
        let breakpoints = self
            .breakpoints
            .iter()
            .map(|bp| tau * profile.inverse(bp / tau))
            .collect();
        Self {
            dim: self.dim,
            tau,
            eval: Arc::new(move |t| {
                let x = (t / tau).clamp(0.0, 1.0);
                eval(tau * profile.warp(x)).scaled(profile.rate(x))
            }),
            controls: controls.map(|c| {
                let warped: Arc<ControlFn> = Arc::new(move |t: f64| {
                    let x = (t / tau).clamp(0.0, 1.0);
                    let rate = p2.rate(x);
                    match c(tau * p2.warp(x)) {
                        ControlSignals::Qubit {
                            delta,
                            rabi,
                            carrier_phase,
                        } => ControlSignals::Qubit {
                            delta: delta * rate,
                            rabi: rabi * rate,
                            carrier_phase,
                        },
                        ControlSignals::Exchange { cx, cy, cz } => ControlSignals::Exchange {
                            cx: cx * rate,
                            cy: cy * rate,
                            cz: cz * rate,
                        },
                    }
                });
                warped
            }),
            breakpoints,
        }
    }

    /// Scale the Rabi drive by (1 + ε), keeping the detuning and the nominal
    /// duration fixed. Without a control decomposition the whole generator is
    /// scaled.
    pub fn amplitude_scaled(&self, epsilon: f64) -> Self {
        match &self.controls {
            Some(c) => {
                let c = c.clone();
                let scaled: Arc<ControlFn> = Arc::new(move |t: f64| match c(t) {
                    ControlSignals::Qubit {
                        delta,
                        rabi,
                        carrier_phase,
                    } => ControlSignals::Qubit {
                        delta,
                        rabi: rabi * (1.0 + epsilon),
                        carrier_phase,
                    },
                    ControlSignals::Exchange { cx, cy, cz } => ControlSignals::Exchange {
                        cx: cx * (1.0 + epsilon),
                        cy: cy * (1.0 + epsilon),
                        cz,
                    },
                });
                let eval_controls = scaled.clone();
                Self {
                    dim: self.dim,
                    tau: self.tau,
                    eval: Arc::new(move |t| eval_controls(t).reconstruct()),
                    controls: Some(scaled),
                    breakpoints: self.breakpoints.clone(),
                }
            }
            None => {
                let eval = self.eval.clone();
                Self {
                    dim: self.dim,
                    tau: self.tau,
                    eval: Arc::new(move |t| eval(t).scaled(1.0 + epsilon)),
                    controls: None,
                    breakpoints: self.breakpoints.clone(),
                }
            }
        }
    }

    /// Add a static detuning offset d·σ_z/2 (d·R^z/2 on the exchange block).
    pub fn detuning_offset(&self, offset: f64) -> Self {
        let eval = self.eval.clone();
        let bias = match self.dim {
            2 => crate::qcore::sigma_z().scaled(0.5 * offset),
            4 => z_imbalance().scaled(0.5 * offset),
            d => panic!("detuning offset undefined for dimension {d}"),
        };
        Self {
            dim: self.dim,
            tau: self.tau,
            eval: Arc::new(move |t| eval(t).add(&bias)),
            controls: None,
            breakpoints: self.breakpoints.clone(),
        }
    }

    /// Sample the schedule on a uniform grid: (t, H(t), controls(t)).
    pub fn sample(&self, n: usize) -> Vec<(f64, HermitianMatrix, Option<ControlSignals>)> {
        (0..=n)
            .map(|j| {
                let t = self.tau * j as f64 / n as f64;
                (t, self.hamiltonian(t), self.controls(t))
            })
            .collect()
    }
}

type BasisFn = dyn Fn(f64) -> Vec<StateVector> + Send + Sync;
type DerivFn = dyn Fn(f64) -> Vec<Array1<C64>> + Send + Sync;

/// Orthonormal time-dependent basis {|ν_k(t)⟩} with ν_k(τ) = ν_k(0).
#[derive(Clone)]
pub struct AuxiliaryFrame {
    dim: usize,
    tau: f64,
    basis: Arc<BasisFn>,
    derivative: Option<Arc<DerivFn>>,
    fd_step: f64,
}

impl AuxiliaryFrame {
    /// Generic frame with numerical differentiation (central differences of
    /// step `fd_step`, default τ·1e-6; one-sided near the interval ends).
    pub fn from_fn<F>(dim: usize, tau: f64, basis: F) -> Self
    where
        F: Fn(f64) -> Vec<StateVector> + Send + Sync + 'static,
    {
        Self {
            dim,
            tau,
            basis: Arc::new(basis),
            derivative: None,
            fd_step: tau * DEFAULT_FD_STEP_FRACTION,
        }
    }

    pub fn with_derivative<F>(mut self, derivative: F) -> Self
    where
        F: Fn(f64) -> Vec<Array1<C64>> + Send + Sync + 'static,
    {
        self.derivative = Some(Arc::new(derivative));
        self
    }

    pub fn with_fd_step(mut self, h: f64) -> Self {
        assert!(h > 0.0);
        self.fd_step = h;
        self
    }

    /// The auxiliary frame over a one-qubit parameter curve:
    /// ν₁ = cos(θ/2)|0⟩ + sin(θ/2)e^{iφ}|1⟩,
    /// ν₂ = sin(θ/2)e^{−iφ}|0⟩ − cos(θ/2)|1⟩, with analytic derivatives.
    pub fn one_qubit(curve: &ParamCurve) -> Self {
        let c1 = curve.clone();
        let c2 = curve.clone();
        Self::from_fn(2, curve.tau(), move |t| {
            let p = c1.eval(t);
            one_qubit_frame_vectors(&p)
        })
        .with_derivative(move |t| {
            let p = c2.eval(t);
            one_qubit_frame_derivatives(&p)
        })
    }

    /// The two-qubit frame over (α, β): ν₁ = |00⟩, ν₂ = |11⟩ constant, and
    /// the one-qubit pattern on {|01⟩, |10⟩} for ν₃, ν₄.
    pub fn two_qubit(curve: &ParamCurve) -> Self {
        let c1 = curve.clone();
        let c2 = curve.clone();
        Self::from_fn(4, curve.tau(), move |t| {
            let p = c1.eval(t);
            two_qubit_frame_vectors(&p)
        })
        .with_derivative(move |t| {
            let p = c2.eval(t);
            two_qubit_frame_derivatives(&p)
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn is_analytic(&self) -> bool {
        self.derivative.is_some()
    }

    pub fn fd_step(&self) -> f64 {
        self.fd_step
    }

    pub fn basis_at(&self, t: f64) -> Vec<StateVector> {
        (self.basis)(t)
    }

    /// ν̇_k(t): analytic when supplied, otherwise finite differences.
    pub fn derivative_at(&self, t: f64) -> Vec<Array1<C64>> {
        if let Some(d) = &self.derivative {
            return d(t);
        }
        let h = self.fd_step;
        if t - h >= 0.0 && t + h <= self.tau {
            let plus = (self.basis)(t + h);
            let minus = (self.basis)(t - h);
            plus.iter()
                .zip(minus.iter())
                .map(|(p, m)| (p.amplitudes() - m.amplitudes()).mapv(|z| z / (2.0 * h)))
                .collect()
        } else {
            // Second-order one-sided stencil at the interval ends.
            let sign = if t - h < 0.0 { 1.0 } else { -1.0 };
            let f0 = (self.basis)(t);
            let f1 = (self.basis)(t + sign * h);
            let f2 = (self.basis)(t + sign * 2.0 * h);
            f0.iter()
                .zip(f1.iter().zip(f2.iter()))
                .map(|(a, (b, c))| {
                    (a.amplitudes().mapv(|z| z * -3.0) + b.amplitudes().mapv(|z| z * 4.0)
                        - c.amplitudes())
                    .mapv(|z| z * (sign / (2.0 * h)))
                })
                .collect()
        }
    }

    /// Check orthonormality on a sampled grid and cyclicity at the ends.
    pub fn validate(&self, n_samples: usize) -> Result<(), SynthError> {
        for j in 0..=n_samples {
            let t = self.tau * j as f64 / n_samples as f64;
            let basis = self.basis_at(t);
            let mut defect = 0.0f64;
            for (i, a) in basis.iter().enumerate() {
                for (j2, b) in basis.iter().enumerate() {
                    let want = if i == j2 { 1.0 } else { 0.0 };
                    defect = defect.max((a.inner(b) - want).norm());
                }
            }
            if defect > FRAME_TOL {
                return Err(SynthError::FrameNotOrthonormal { t, defect });
            }
        }
        let start = self.basis_at(0.0);
        let end = self.basis_at(self.tau);
        let mut defect = 0.0f64;
        for (a, b) in start.iter().zip(end.iter()) {
            let diff: f64 = a
                .amplitudes()
                .iter()
                .zip(b.amplitudes().iter())
                .map(|(x, y)| (x - y).norm_sqr())
                .sum::<f64>()
                .sqrt();
            defect = defect.max(diff);
        }
        if defect > FRAME_TOL {
            return Err(SynthError::NonCyclicFrame { defect });
        }
        Ok(())
    }
}

pub(crate) fn one_qubit_frame_vectors(p: &CurvePoint) -> Vec<StateVector> {
    let (s, c) = (0.5 * p.theta).sin_cos();
    let eip = C64::from_polar(1.0, p.phi);
    let nu1 = Array1::from(vec![C64::new(c, 0.0), eip * s]);
    let nu2 = Array1::from(vec![eip.conj() * s, C64::new(-c, 0.0)]);
    vec![
        StateVector::new(nu1).unwrap(),
        StateVector::new(nu2).unwrap(),
    ]
}

fn one_qubit_frame_derivatives(p: &CurvePoint) -> Vec<Array1<C64>> {
    let (s, c) = (0.5 * p.theta).sin_cos();
    let eip = C64::from_polar(1.0, p.phi);
    let i = C64::new(0.0, 1.0);
    let half_td = 0.5 * p.theta_dot;
    let d1 = Array1::from(vec![
        C64::new(-half_td * s, 0.0),
        eip * (C64::new(half_td * c, 0.0) + i * p.phi_dot * s),
    ]);
    let d2 = Array1::from(vec![
        eip.conj() * (C64::new(half_td * c, 0.0) - i * p.phi_dot * s),
        C64::new(half_td * s, 0.0),
    ]);
    vec![d1, d2]
}

fn two_qubit_frame_vectors(p: &CurvePoint) -> Vec<StateVector> {
    let inner = one_qubit_frame_vectors(p);
    let zero = C64::new(0.0, 0.0);
    let lift = |v: &StateVector| {
        StateVector::new(Array1::from(vec![zero, v.amp(0), v.amp(1), zero])).unwrap()
    };
    vec![
        StateVector::basis_state(4, 0),
        StateVector::basis_state(4, 3),
        lift(&inner[0]),
        lift(&inner[1]),
    ]
}

fn two_qubit_frame_derivatives(p: &CurvePoint) -> Vec<Array1<C64>> {
    let inner = one_qubit_frame_derivatives(p);
    let zero = C64::new(0.0, 0.0);
    let lift = |v: &Array1<C64>| Array1::from(vec![zero, v[0], v[1], zero]);
    vec![
        Array1::zeros(4),
        Array1::zeros(4),
        lift(&inner[0]),
        lift(&inner[1]),
    ]
}

/// Inverse-engineer the driving Hamiltonian from an auxiliary frame via the
/// sum over ⟨ν_l|ν̇_k⟩ projectors, Hermitized as (H + H†)/2 to absorb the
/// O(h²) asymmetry of numerical frame derivatives.
pub fn frame_to_hamiltonian(frame: &AuxiliaryFrame) -> Result<HamiltonianSchedule, SynthError> {
    frame.validate(64)?;
    let f = frame.clone();
    Ok(HamiltonianSchedule::from_fn(
        frame.dim(),
        frame.tau(),
        move |t| HermitianMatrix::hermitize(frame_generator(&f, t)),
    ))
}

/// The raw (pre-Hermitization) generator i Σ_{l≠k} ⟨ν_l|ν̇_k⟩ |ν_l⟩⟨ν_k|.
pub(crate) fn frame_generator(frame: &AuxiliaryFrame, t: f64) -> Array2<C64> {
    let basis = frame.basis_at(t);
    let derivs = frame.derivative_at(t);
    let dim = frame.dim();
    let i = C64::new(0.0, 1.0);
    let mut h = Array2::zeros((dim, dim));
    for k in 0..dim {
        for l in 0..dim {
            if l == k {
                continue;
            }
            let coupling: C64 = basis[l]
                .amplitudes()
                .iter()
                .zip(derivs[k].iter())
                .map(|(a, b)| a.conj() * b)
                .sum();
            let coeff = i * coupling;
            for r in 0..dim {
                for c in 0..dim {
                    h[(r, c)] += coeff * basis[l].amp(r) * basis[k].amp(c).conj();
                }
            }
        }
    }
    h
}

/// Anti-Hermitian residual of the generator before symmetrization; a
/// diagnostic for frame quality (≤ 1e-10 for analytic frames).
pub fn generator_asymmetry(frame: &AuxiliaryFrame, t: f64) -> f64 {
    anti_hermitian_defect(&frame_generator(frame, t))
}

fn one_qubit_coefficients(p: &CurvePoint) -> (f64, f64, f64) {
    let (st, ct) = p.theta.sin_cos();
    let (sp, cp) = p.phi.sin_cos();
    let cx = -0.5 * (p.theta_dot * sp + p.phi_dot * st * ct * cp);
    let cy = 0.5 * (p.theta_dot * cp - p.phi_dot * st * ct * sp);
    let cz = 0.5 * p.phi_dot * st * st;
    (cx, cy, cz)
}

/// Closed-form one-qubit schedule for a parameter curve:
/// H = c_x σ_x + c_y σ_y + c_z σ_z with
/// c_x = −½(θ̇ sinφ + φ̇ sinθ cosθ cosφ),
/// c_y = +½(θ̇ cosφ − φ̇ sinθ cosθ sinφ),
/// c_z = +½ φ̇ sin²θ.
///
/// Controls: Δ = −½ φ̇ sin²θ and Ω = ⟨1|H|0⟩ = c_x + i c_y, which splits into
/// a meridian component (θ̇/2 at drive phase φ + π/2) and an arc component
/// (−½ φ̇ sinθ cosθ at drive phase φ). All coefficients are polynomial in
/// sinθ, cosθ, so pole segments are exactly representable.
pub fn onequbit_hamiltonian(curve: &ParamCurve) -> HamiltonianSchedule {
    let c1 = curve.clone();
    let c2 = curve.clone();
    let breakpoints = curve.segment_boundaries();
    let mut schedule = HamiltonianSchedule::from_fn(2, curve.tau(), move |t| {
        let p = c1.eval(t);
        let (cx, cy, cz) = one_qubit_coefficients(&p);
        let mut m = Array2::zeros((2, 2));
        m[(0, 0)] = C64::new(cz, 0.0);
        m[(1, 1)] = C64::new(-cz, 0.0);
        m[(1, 0)] = C64::new(cx, cy);
        m[(0, 1)] = C64::new(cx, -cy);
        HermitianMatrix::hermitize(m)
    })
    .with_breakpoints(breakpoints);
    schedule.controls = Some(Arc::new(move |t| {
        let p = c2.eval(t);
        let (cx, cy, cz) = one_qubit_coefficients(&p);
        ControlSignals::Qubit {
            delta: -cz,
            rabi: C64::new(cx, cy),
            carrier_phase: p.phi,
        }
    }));
    schedule
}

/// Closed-form two-qubit schedule: H = g_x R^x + g_y R^y + g_z R^z with the
/// one-qubit coefficient pattern over (α, β) and the DM term entering with
/// the opposite sign. Annihilates |00⟩ and |11⟩ exactly.
pub fn twoqubit_hamiltonian(curve: &ParamCurve) -> HamiltonianSchedule {
    let c1 = curve.clone();
    let c2 = curve.clone();
    let breakpoints = curve.segment_boundaries();
    let mut schedule = HamiltonianSchedule::from_fn(4, curve.tau(), move |t| {
        let p = c1.eval(t);
        let (gx, cy, gz) = one_qubit_coefficients(&p);
        let gy = -cy;
        let mut m = Array2::zeros((4, 4));
        m[(1, 1)] = C64::new(gz, 0.0);
        m[(2, 2)] = C64::new(-gz, 0.0);
        m[(1, 2)] = C64::new(gx, gy);
        m[(2, 1)] = C64::new(gx, -gy);
        HermitianMatrix::hermitize(m)
    })
    .with_breakpoints(breakpoints);
    schedule.controls = Some(Arc::new(move |t| {
        let p = c2.eval(t);
        let (gx, cy, gz) = one_qubit_coefficients(&p);
        ControlSignals::Exchange {
            cx: gx,
            cy: -cy,
            cz: gz,
        }
    }));
    schedule
}

/// Signed pulse area ∫ envelope dt over [t_from, t_to].
///
/// The envelope is the real coefficient of the constant-phase drive on the
/// window: θ̇/2 on meridian-type windows (drive phase φ + π/2),
/// −½ φ̇ sinθ cosθ on arc-type windows (drive phase φ). Windows mixing both
/// components have no real envelope and are rejected.
pub fn pulse_area(
    schedule: &HamiltonianSchedule,
    t_from: f64,
    t_to: f64,
) -> Result<f64, SynthError> {
    let controls = schedule
        .controls
        .as_ref()
        .ok_or(SynthError::MissingControls)?
        .clone();
    if t_from > t_to || t_from < -1e-12 || t_to > schedule.tau() + 1e-12 {
        return Err(SynthError::BadWindow(t_from, t_to));
    }
    if t_from == t_to {
        return Ok(0.0);
    }
    let components = move |t: f64| -> (f64, f64) {
        match controls(t) {
            ControlSignals::Qubit {
                rabi,
                carrier_phase,
                ..
            } => {
                // Ω e^{−iφ} = arc + i·meridian.
                let rotated = rabi * C64::from_polar(1.0, -carrier_phase);
                (rotated.im, rotated.re)
            }
            ControlSignals::Exchange { cx, cy, .. } => {
                // Block drive quadratures; exchange schedules carry no
                // separate carrier.
                (-cy, cx)
            }
        }
    };
    // Classify the window: at most one quadrature may be active. Probe at
    // midpoints so exact segment boundaries do not leak the neighbour in.
    let n_probe = 64;
    let mut max_meridian = 0.0f64;
    let mut max_arc = 0.0f64;
    for j in 0..n_probe {
        let t = t_from + (t_to - t_from) * (j as f64 + 0.5) / n_probe as f64;
        let (m, a) = components(t);
        max_meridian = max_meridian.max(m.abs());
        max_arc = max_arc.max(a.abs());
    }
    if max_meridian == 0.0 && max_arc == 0.0 {
        return Ok(0.0);
    }
    let tol = 1e-9 * max_meridian.max(max_arc);
    let use_meridian = max_arc <= tol;
    let use_arc = max_meridian <= tol;
    if !use_meridian && !use_arc {
        return Err(SynthError::ComplexEnvelope { t_from, t_to });
    }
    let envelope = move |t: f64| {
        let (m, a) = components(t);
        if use_meridian {
            m
        } else {
            a
        }
    };
    Ok(quad::integrate(envelope, t_from, t_to, 1e-12))
}

/// ∫ |Ω(t)| dt over the whole schedule: the total pulse area a cap-saturating
/// envelope must supply, i.e. evolution time × amplitude cap.
pub fn total_rabi_area(schedule: &HamiltonianSchedule) -> Result<f64, SynthError> {
    let controls = schedule
        .controls
        .as_ref()
        .ok_or(SynthError::MissingControls)?
        .clone();
    let modulus = move |t: f64| match controls(t) {
        ControlSignals::Qubit { rabi, .. } => rabi.norm(),
        ControlSignals::Exchange { cx, cy, .. } => (cx * cx + cy * cy).sqrt(),
    };
    Ok(quad::integrate(modulus, 0.0, schedule.tau(), 1e-12))
}
