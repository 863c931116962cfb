//! Time-ordered propagation under a Hamiltonian schedule, holonomy
//! extraction, and the full evolution report.
//!
//! The default integrator is the exponential midpoint rule
//! U ← exp(−i H(t + dt/2) dt) U, globally second order and exactly unitary
//! per step, so the reported unitarity and cyclicity defects measure only
//! floating-point noise. Dimension 2 uses the closed-form SU(2) exponential;
//! dimension 4 with the exchange-block structure exponentiates per invariant
//! block; anything else falls back to scaled-and-squared Taylor series.

use crate::paths::{LengthConvention, ParamCurve};
use crate::qcore::{
    embed_central_block, gate_fidelity, gate_from_spec, holonomy_extract, principal_angle, C64,
    GateSpec, HermitianMatrix, QcoreError, StateVector, UnitaryMatrix,
};
use crate::quad;
use crate::synth::{
    onequbit_hamiltonian, total_rabi_area, twoqubit_hamiltonian, AuxiliaryFrame,
    HamiltonianSchedule, SynthError,
};
use ndarray::Array2;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum EvolveError {
    #[error(
        "unitarity lost during propagation: defect {defect:.3e} > {tol:.3e}; \
         raise n_steps or switch method"
    )]
    UnitarityLost { defect: f64, tol: f64 },
    #[error("propagator config: {0}")]
    BadConfig(String),
    #[error("two-qubit evolution leaks out of the aligned subspace: defect {defect:.3e}")]
    SubspaceNotPreserved { defect: f64 },
    #[error(transparent)]
    Path(#[from] crate::paths::PathError),
    #[error(transparent)]
    Synth(#[from] SynthError),
    #[error(transparent)]
    Qcore(#[from] QcoreError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Method {
    MidpointExponential,
    Rk4,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct PropagatorConfig {
    pub n_steps: usize,
    pub method: Method,
    pub unitarity_tol: f64,
    pub eigentol: f64,
}

impl Default for PropagatorConfig {
    fn default() -> Self {
        Self {
            n_steps: 4096,
            method: Method::MidpointExponential,
            unitarity_tol: 1e-9,
            eigentol: 1e-6,
        }
    }
}

impl PropagatorConfig {
    pub fn with_steps(n_steps: usize) -> Self {
        Self {
            n_steps,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), EvolveError> {
        if self.n_steps < 16 {
            return Err(EvolveError::BadConfig(format!(
                "n_steps {} below the minimum of 16",
                self.n_steps
            )));
        }
        if self.unitarity_tol <= 0.0 || self.eigentol <= 0.0 {
            return Err(EvolveError::BadConfig("tolerances must be positive".into()));
        }
        Ok(())
    }
}

/// exp(−i H t) for 2×2 Hermitian H via the SU(2) closed form:
/// with H = c₀I + c·σ, exp(−iHt) = e^{−ic₀t}(cos(|c|t) I − i sin(|c|t) ĉ·σ).
fn expm_2x2(h: &HermitianMatrix, t: f64) -> Array2<C64> {
    let c0 = 0.5 * (h.entry(0, 0).re + h.entry(1, 1).re);
    let cz = 0.5 * (h.entry(0, 0).re - h.entry(1, 1).re);
    let cx = h.entry(1, 0).re;
    let cy = h.entry(1, 0).im;
    let omega = (cx * cx + cy * cy + cz * cz).sqrt();
    let phase = C64::from_polar(1.0, -c0 * t);
    let (cos, sinc) = if omega * t.abs() < 1e-9 {
        let wt = omega * t;
        (1.0 - 0.5 * wt * wt, t * (1.0 - wt * wt / 6.0))
    } else {
        ((omega * t).cos(), (omega * t).sin() / omega)
    };
    let mi = C64::new(0.0, -1.0);
    let mut m = Array2::zeros((2, 2));
    m[(0, 0)] = phase * (C64::new(cos, 0.0) + mi * sinc * cz);
    m[(1, 1)] = phase * (C64::new(cos, 0.0) - mi * sinc * cz);
    m[(0, 1)] = phase * mi * sinc * C64::new(cx, -cy);
    m[(1, 0)] = phase * mi * sinc * C64::new(cx, cy);
    m
}

fn is_exchange_block(h: &HermitianMatrix) -> bool {
    if h.dim() != 4 {
        return false;
    }
    let zero = C64::new(0.0, 0.0);
    for k in [0usize, 3] {
        for j in 0..4 {
            if h.entry(k, j) != zero || h.entry(j, k) != zero {
                return false;
            }
        }
    }
    true
}

/// exp(−i H t) for Hermitian H. Closed form in dimension 2 and on the
/// 4×4 exchange-block structure; scaled-and-squared Taylor series otherwise
/// (converged to machine precision, hence unitary to machine precision).
pub fn expm_ihermitian(h: &HermitianMatrix, t: f64) -> UnitaryMatrix {
    let dim = h.dim();
    if dim == 2 {
        return UnitaryMatrix::from_raw(expm_2x2(h, t));
    }
    if is_exchange_block(h) {
        let mut block = Array2::zeros((2, 2));
        for a in 0..2 {
            for b in 0..2 {
                block[(a, b)] = h.entry(a + 1, b + 1);
            }
        }
        let u2 = expm_2x2(&HermitianMatrix::hermitize(block), t);
        let mut m = Array2::eye(4);
        for a in 0..2 {
            for b in 0..2 {
                m[(a + 1, b + 1)] = u2[(a, b)];
            }
        }
        return UnitaryMatrix::from_raw(m);
    }
    UnitaryMatrix::from_raw(expm_taylor(h, t))
}

fn expm_taylor(h: &HermitianMatrix, t: f64) -> Array2<C64> {
    let dim = h.dim();
    let scale = h.max_abs() * t.abs() * dim as f64;
    let squarings = if scale > 0.5 {
        (scale / 0.5).log2().ceil() as u32
    } else {
        0
    };
    let factor = C64::new(0.0, -t / 2f64.powi(squarings as i32));
    let a = h.matrix().mapv(|z| z * factor);
    let mut result = Array2::eye(dim);
    let mut term: Array2<C64> = Array2::eye(dim);
    for k in 1..=40 {
        term = term.dot(&a).mapv(|z| z / k as f64);
        result += &term;
        let largest = term.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if largest < 1e-18 {
            break;
        }
    }
    for _ in 0..squarings {
        result = result.dot(&result);
    }
    result
}

/// Step edges over [0, τ]: at least `n_steps` uniform steps, with edges
/// aligned to the schedule's discontinuity breakpoints so every step sees a
/// smooth generator.
fn step_edges(schedule: &HamiltonianSchedule, n_steps: usize) -> Vec<f64> {
    let tau = schedule.tau();
    let mut piece_ends: Vec<f64> = schedule.breakpoints().to_vec();
    piece_ends.push(tau);
    let mut edges = Vec::with_capacity(n_steps + piece_ends.len() + 1);
    edges.push(0.0);
    let mut start = 0.0;
    for end in piece_ends {
        let span = end - start;
        let count = ((n_steps as f64 * span / tau).round() as usize).max(1);
        for j in 1..=count {
            edges.push(start + span * j as f64 / count as f64);
        }
        start = end;
    }
    edges
}

/// Time-ordered propagation of the full evolution operator over [0, τ].
///
/// The result is checked against `cfg.unitarity_tol`, never re-unitarized;
/// failure signals that `n_steps` is too low for the schedule.
pub fn propagate(
    schedule: &HamiltonianSchedule,
    cfg: &PropagatorConfig,
) -> Result<UnitaryMatrix, EvolveError> {
    cfg.validate()?;
    let edges = step_edges(schedule, cfg.n_steps);
    let dim = schedule.dim();
    let mut u = Array2::eye(dim);
    match cfg.method {
        Method::MidpointExponential => {
            for w in edges.windows(2) {
                let dt = w[1] - w[0];
                let step = expm_ihermitian(&schedule.hamiltonian(0.5 * (w[0] + w[1])), dt);
                u = step.matrix().dot(&u);
            }
        }
        Method::Rk4 => {
            let mi = C64::new(0.0, -1.0);
            for w in edges.windows(2) {
                let (t, dt) = (w[0], w[1] - w[0]);
                // Edge evaluations stay strictly inside the smooth piece so a
                // breakpoint's other side never leaks into the stage values.
                let nudge = 1e-9 * dt;
                let f = |time: f64, m: &Array2<C64>| -> Array2<C64> {
                    schedule.hamiltonian(time).matrix().dot(m).mapv(|z| z * mi)
                };
                let k1 = f(t + nudge, &u);
                let k2 = f(t + 0.5 * dt, &(&u + &k1.mapv(|z| z * (0.5 * dt))));
                let k3 = f(t + 0.5 * dt, &(&u + &k2.mapv(|z| z * (0.5 * dt))));
                let k4 = f(t + dt - nudge, &(&u + &k3.mapv(|z| z * dt)));
                u = &u
                    + &(k1 + k2.mapv(|z| z * 2.0) + k3.mapv(|z| z * 2.0) + k4)
                        .mapv(|z| z * (dt / 6.0));
            }
        }
    }
    let unitary = UnitaryMatrix::from_raw(u);
    let defect = unitary.unitarity_defect();
    if defect > cfg.unitarity_tol {
        return Err(EvolveError::UnitarityLost {
            defect,
            tol: cfg.unitarity_tol,
        });
    }
    Ok(unitary)
}

/// Propagate a state with the midpoint exponential applied directly to the
/// vector (Taylor-expanded in dimensions without a closed form), invoking
/// `observe(t, ψ(t))` after every step. Norm drift of the result is
/// available from [`StateVector::norm_defect`].
pub fn propagate_state_with<F>(
    schedule: &HamiltonianSchedule,
    psi0: &StateVector,
    cfg: &PropagatorConfig,
    mut observe: F,
) -> Result<StateVector, EvolveError>
where
    F: FnMut(f64, &StateVector),
{
    cfg.validate()?;
    let edges = step_edges(schedule, cfg.n_steps);
    let dim = schedule.dim();
    let mut amps = psi0.amplitudes().clone();
    observe(0.0, psi0);
    for w in edges.windows(2) {
        let dt = w[1] - w[0];
        let h = schedule.hamiltonian(0.5 * (w[0] + w[1]));
        if dim == 2 || is_exchange_block(&h) {
            amps = expm_ihermitian(&h, dt).matrix().dot(&amps);
        } else {
            amps = expm_multiply(&h, dt, amps);
        }
        let state = StateVector::from_raw(amps.clone());
        observe(w[1], &state);
    }
    let psi = StateVector::from_raw(amps);
    let defect = psi.norm_defect();
    if defect > cfg.unitarity_tol {
        return Err(EvolveError::UnitarityLost {
            defect,
            tol: cfg.unitarity_tol,
        });
    }
    Ok(psi)
}

/// exp(−iH dt)·ψ by a fully converged Taylor series with scaling, using only
/// matrix–vector products.
fn expm_multiply(h: &HermitianMatrix, dt: f64, psi: ndarray::Array1<C64>) -> ndarray::Array1<C64> {
    let scale = h.max_abs() * dt.abs() * h.dim() as f64;
    let halvings = if scale > 0.5 {
        (scale / 0.5).log2().ceil() as u32
    } else {
        0
    };
    let substeps = 1usize << halvings;
    let factor = C64::new(0.0, -dt / substeps as f64);
    let mut out = psi;
    for _ in 0..substeps {
        let mut acc = out.clone();
        let mut term = out;
        for k in 1..=40 {
            term = h.matrix().dot(&term).mapv(|z| z * factor / k as f64);
            acc += &term;
            let largest = term.iter().map(|z| z.norm()).fold(0.0, f64::max);
            if largest < 1e-18 {
                break;
            }
        }
        out = acc;
    }
    out
}

/// Continuous geometric phase γ_k(τ) = i ∫₀^τ ⟨ν_k|ν̇_k⟩ dt, unwrapped.
///
/// The integrand is real for a normalized frame; its imaginary part is
/// checked against 1e-10 and dropped.
pub fn geometric_phase_continuous(frame: &AuxiliaryFrame, k: usize) -> f64 {
    let overlap_at = |t: f64| -> C64 {
        let nu = &frame.basis_at(t)[k];
        let dnu = &frame.derivative_at(t)[k];
        nu.amplitudes()
            .iter()
            .zip(dnu.iter())
            .map(|(a, b)| a.conj() * b)
            .sum()
    };
    // i·⟨ν|ν̇⟩: real part is −Im, residual imaginary part is Re.
    let gamma = quad::integrate(|t| -overlap_at(t).im, 0.0, frame.tau(), 1e-12);
    let imag = quad::integrate(|t| overlap_at(t).re, 0.0, frame.tau(), 1e-12);
    debug_assert!(
        imag.abs() < 1e-10,
        "geometric phase picked up an imaginary part {imag:e}"
    );
    gamma
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum GateKind {
    OneQubit,
    TwoQubit,
}

/// Everything measured about one simulated geometric gate.
#[derive(Clone, Debug, Serialize)]
pub struct EvolutionReport {
    pub kind: GateKind,
    pub final_unitary: UnitaryMatrix,
    /// Unwrapped phases from the continuous frame integral, one per frame
    /// vector.
    pub holonomy_continuous: Vec<f64>,
    /// Principal-branch phases extracted from the final unitary.
    pub holonomy_principal: Vec<f64>,
    /// max_t,k |⟨φ_k(t)|H(t)|φ_k(t)⟩| on the diagnostic grid.
    pub pt_residual_max: f64,
    /// max_k ‖|φ_k(τ)⟩⟨φ_k(τ)| − |φ_k(0)⟩⟨φ_k(0)|‖_F.
    pub cyclicity_defect: f64,
    pub fidelity_vs_target: f64,
    pub unitarity_defect: f64,
    pub solid_angle: f64,
    pub length_spherical: f64,
    pub length_param_sum: f64,
    /// Evolution time × amplitude cap: ∫|Ω(t)| dt.
    pub time_estimate: f64,
    /// Grid size the parallel-transport residual converged on.
    pub pt_grid: usize,
}

/// max_t max_k |⟨ν_k(t)|H(t)|ν_k(t)⟩| on a grid of at least `min_grid`
/// points, doubled until the maximum moves by less than 10%.
pub fn parallel_transport_residual(
    schedule: &HamiltonianSchedule,
    frame: &AuxiliaryFrame,
    min_grid: usize,
) -> (f64, usize) {
    let residual_on = |n: usize| -> f64 {
        let mut worst = 0.0f64;
        for j in 0..=n {
            let t = schedule.tau() * j as f64 / n as f64;
            let h = schedule.hamiltonian(t);
            for nu in frame.basis_at(t) {
                worst = worst.max(h.expectation(&nu).abs());
            }
        }
        worst
    };
    let mut grid = min_grid;
    let mut value = residual_on(grid);
    loop {
        let next = residual_on(grid * 2);
        let moved = (next - value).abs();
        let scale = value.abs().max(next.abs());
        if scale == 0.0 || moved <= 0.1 * scale || grid >= 8 * min_grid {
            return (value.max(next), grid * 2);
        }
        grid *= 2;
        value = next;
    }
}

/// Synthesize, propagate and verify a geometric gate along a closed curve.
///
/// For [`GateKind::TwoQubit`] the target acts on the {|01⟩, |10⟩} block and
/// |00⟩, |11⟩ must return to themselves within 1e-8.
pub fn run_geometric_gate(
    curve: &ParamCurve,
    kind: GateKind,
    target: &GateSpec,
    cfg: &PropagatorConfig,
) -> Result<EvolutionReport, EvolveError> {
    if !curve.is_closed() {
        return Err(crate::paths::PathError::OpenCurve {
            defect: curve.closure_defect(),
            tol: 100.0 * crate::paths::CHAIN_TOL,
        }
        .into());
    }
    let (schedule, frame, target_u) = match kind {
        GateKind::OneQubit => (
            onequbit_hamiltonian(curve),
            AuxiliaryFrame::one_qubit(curve),
            gate_from_spec(target),
        ),
        GateKind::TwoQubit => (
            twoqubit_hamiltonian(curve),
            AuxiliaryFrame::two_qubit(curve),
            embed_central_block(&gate_from_spec(target)),
        ),
    };
    let u = propagate(&schedule, cfg)?;

    if kind == GateKind::TwoQubit {
        let mut defect = 0.0f64;
        for k in [0usize, 3] {
            let e = StateVector::basis_state(4, k);
            let ue = u.apply(&e);
            let diff: f64 = ue
                .amplitudes()
                .iter()
                .enumerate()
                .map(|(j, z)| {
                    let want = if j == k {
                        C64::new(1.0, 0.0)
                    } else {
                        C64::new(0.0, 0.0)
                    };
                    (z - want).norm_sqr()
                })
                .sum::<f64>()
                .sqrt();
            defect = defect.max(diff);
        }
        if defect > 1e-8 {
            return Err(EvolveError::SubspaceNotPreserved { defect });
        }
    }

    let basis = frame.basis_at(0.0);
    let holonomy_principal = holonomy_extract(&u, &basis, cfg.eigentol)?;
    let holonomy_continuous: Vec<f64> = (0..frame.dim())
        .map(|k| geometric_phase_continuous(&frame, k))
        .collect();

    let (pt_residual_max, pt_grid) = parallel_transport_residual(&schedule, &frame, 256);

    let mut cyclicity_defect = 0.0f64;
    for phi0 in &basis {
        let phi_tau = u.apply(phi0);
        // ‖|φ(τ)⟩⟨φ(τ)| − |φ(0)⟩⟨φ(0)|‖_F, formed entrywise.
        let mut sq = 0.0f64;
        for i in 0..u.dim() {
            for j in 0..u.dim() {
                let p_tau = phi_tau.amp(i) * phi_tau.amp(j).conj();
                let p_0 = phi0.amp(i) * phi0.amp(j).conj();
                sq += (p_tau - p_0).norm_sqr();
            }
        }
        cyclicity_defect = cyclicity_defect.max(sq.sqrt());
    }

    let fidelity_vs_target = gate_fidelity(&u, &target_u)?;
    let solid_angle = curve.solid_angle_phase()?;
    let time_estimate = total_rabi_area(&schedule)?;

    Ok(EvolutionReport {
        kind,
        unitarity_defect: u.unitarity_defect(),
        final_unitary: u,
        holonomy_continuous,
        holonomy_principal,
        pt_residual_max,
        cyclicity_defect,
        fidelity_vs_target,
        solid_angle,
        length_spherical: curve.path_length(LengthConvention::Spherical),
        length_param_sum: curve.path_length(LengthConvention::ParamSum),
        time_estimate,
        pt_grid,
    })
}

impl EvolutionReport {
    /// Principal-branch view of the continuous holonomies.
    pub fn holonomy_continuous_principal(&self) -> Vec<f64> {
        self.holonomy_continuous
            .iter()
            .map(|g| principal_angle(*g))
            .collect()
    }
}
