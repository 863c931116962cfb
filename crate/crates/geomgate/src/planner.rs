//! Candidate evolution paths for a target gate, with pulse-area accounting
//! and evolution-time estimates under an amplitude cap.
//!
//! All families are constructed in the chart where the gate axis is ẑ; for
//! a general axis the synthesized schedule is conjugated by the fixed
//! rotation taking ẑ to n (exact, and free of pole-chart pathologies).
//! Time estimates assume rectangular cap-saturating envelopes, so
//! τ·Ω̄ equals the total pulse area, which is envelope-shape-invariant.

use crate::evolve::{
    propagate, run_geometric_gate, EvolutionReport, EvolveError, GateKind, PropagatorConfig,
};
use crate::paths::{min_circle_curve, LengthConvention, ParamCurve, PathError, Segment};
use crate::qcore::{
    gate_fidelity, gate_from_spec, holonomy_extract, C64, GateSpec, StateVector, UnitaryMatrix,
};
use crate::synth::{onequbit_hamiltonian, total_rabi_area, HamiltonianSchedule};
use ndarray::Array2;
use serde::Serialize;
use std::f64::consts::PI;
use thiserror::Error;

/// Time share handed to drive-free pole turns (and other zero-area
/// segments); the active segments split the rest in proportion to area.
const IDLE_FRACTION: f64 = 1.0 / 64.0;

#[derive(Debug, Error)]
pub enum PlanError {
    #[error("arc sweep |{sweep}| exceeds 2π: γ too large for θ_mid = {theta_mid}")]
    SweepTooLarge { sweep: f64, theta_mid: f64 },
    #[error("θ_mid = {0} outside (0, π]")]
    BadThetaMid(f64),
    #[error("plan {family} failed end-to-end verification: fidelity {fidelity} < {required}")]
    VerificationFailed {
        family: PathFamily,
        fidelity: f64,
        required: f64,
    },
    #[error(transparent)]
    Path(#[from] PathError),
    #[error(transparent)]
    Evolve(#[from] EvolveError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum PathFamily {
    OrangeSlice,
    ThreeSegment,
    MinCircle,
}

impl std::fmt::Display for PathFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            PathFamily::OrangeSlice => "orange_slice",
            PathFamily::ThreeSegment => "three_segment",
            PathFamily::MinCircle => "min_circle",
        };
        f.write_str(name)
    }
}

/// A candidate path realizing a target gate, with its geometric invariants
/// precomputed. The curve lives in the ẑ chart; [`chart_rotation`] maps it
/// onto the spec's axis.
#[derive(Clone, Debug, Serialize)]
pub struct PathPlan {
    pub spec: GateSpec,
    pub family: PathFamily,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta_mid: Option<f64>,
    pub curve: ParamCurve,
    pub predicted_gamma: f64,
    pub length_spherical: f64,
    pub length_param_sum: f64,
    /// Signed envelope areas per drive window (one unsigned total for the
    /// mixed-quadrature circle family).
    pub pulse_areas: Vec<f64>,
    /// Σ|pulse areas| = evolution time × amplitude cap.
    pub time_times_cap: f64,
}

/// Evolution time under an amplitude cap Ω̄, assuming every window runs at
/// the cap: Σ|pulse areas| / Ω̄.
pub fn time_estimate(plan: &PathPlan, amp_cap: f64) -> f64 {
    assert!(amp_cap > 0.0, "amplitude cap must be positive");
    plan.time_times_cap / amp_cap
}

/// Duration fractions proportional to |area|, with (near-)zero-area
/// segments sharing a small fixed idle allowance. The idle class must be
/// relative: an equator arc's area carries a cos(π/2) ≈ 6e-17 residue, and
/// allocating time proportional to it would starve the segment below f64
/// time resolution.
fn fractions_from_areas(areas: &[f64]) -> Vec<f64> {
    let total: f64 = areas.iter().map(|a| a.abs()).sum();
    let idle_threshold = 1e-12 * total.max(1e-300);
    let is_idle = |a: &f64| a.abs() <= idle_threshold;
    let active_total: f64 = areas.iter().filter(|a| !is_idle(a)).map(|a| a.abs()).sum();
    let idle_count = areas.iter().filter(|a| is_idle(a)).count();
    let idle_total = IDLE_FRACTION * idle_count as f64;
    areas
        .iter()
        .map(|a| {
            if is_idle(a) {
                IDLE_FRACTION
            } else {
                a.abs() / active_total * (1.0 - idle_total)
            }
        })
        .collect()
}

fn chart_phi0(spec: &GateSpec) -> f64 {
    spec.start_point().1
}

/// Two meridians joined by a pole turn, enclosing Δφ = γ.
pub fn plan_orange_slice(spec: &GateSpec) -> Result<PathPlan, PlanError> {
    let gamma = spec.half_angle();
    let phi0 = chart_phi0(spec);
    let areas = [PI / 2.0, 0.0, -PI / 2.0];
    let fractions = fractions_from_areas(&areas);
    let curve = ParamCurve::new(
        vec![
            Segment::Meridian {
                phi: phi0,
                theta_from: 0.0,
                theta_to: PI,
                duration_fraction: fractions[0],
            },
            Segment::LatitudeArc {
                theta: PI,
                phi_from: phi0,
                phi_to: phi0 + gamma,
                duration_fraction: fractions[1],
            },
            Segment::Meridian {
                phi: phi0 + gamma,
                theta_from: PI,
                theta_to: 0.0,
                duration_fraction: fractions[2],
            },
        ],
        1.0,
    )?;
    finish_plan(
        spec,
        PathFamily::OrangeSlice,
        None,
        curve,
        vec![areas[0], areas[2]],
    )
}

/// Meridian down to θ_mid, latitude arc Δφ = 2γ/(1 − cosθ_mid), meridian
/// back. θ_mid = π degenerates to the orange slice.
pub fn plan_three_segment(spec: &GateSpec, theta_mid: f64) -> Result<PathPlan, PlanError> {
    if !(theta_mid > 0.0 && theta_mid <= PI) {
        return Err(PlanError::BadThetaMid(theta_mid));
    }
    let gamma = spec.half_angle();
    let phi0 = chart_phi0(spec);
    let dphi = 2.0 * gamma / (1.0 - theta_mid.cos());
    if dphi.abs() > 2.0 * PI + 1e-12 {
        return Err(PlanError::SweepTooLarge {
            sweep: dphi,
            theta_mid,
        });
    }
    let arc_area = -0.5 * theta_mid.sin() * theta_mid.cos() * dphi;
    let areas = [0.5 * theta_mid, arc_area, -0.5 * theta_mid];
    let fractions = fractions_from_areas(&areas);
    let curve = ParamCurve::new(
        vec![
            Segment::Meridian {
                phi: phi0,
                theta_from: 0.0,
                theta_to: theta_mid,
                duration_fraction: fractions[0],
            },
            Segment::LatitudeArc {
                theta: theta_mid,
                phi_from: phi0,
                phi_to: phi0 + dphi,
                duration_fraction: fractions[1],
            },
            Segment::Meridian {
                phi: phi0 + dphi,
                theta_from: theta_mid,
                theta_to: 0.0,
                duration_fraction: fractions[2],
            },
        ],
        1.0,
    )?;
    finish_plan(
        spec,
        PathFamily::ThreeSegment,
        Some(theta_mid),
        curve,
        areas.to_vec(),
    )
}

/// The shortest-length family: the circle through the start point enclosing
/// solid angle 2γ. Its drive mixes both quadratures, so the single reported
/// area is the unsigned total ∫|Ω| dt, evaluated numerically.
///
/// Like the other families the stored curve lives in the ẑ chart (circle
/// through the chart pole); [`min_circle_curve`] itself also accepts general
/// start points directly.
pub fn plan_min_circle(spec: &GateSpec) -> Result<PathPlan, PlanError> {
    let curve = min_circle_curve(&GateSpec::z(spec.half_angle()))?;
    let area = total_rabi_area(&onequbit_hamiltonian(&curve)).expect("closed form has controls");
    finish_plan(spec, PathFamily::MinCircle, None, curve, vec![area])
}

fn finish_plan(
    spec: &GateSpec,
    family: PathFamily,
    theta_mid: Option<f64>,
    curve: ParamCurve,
    pulse_areas: Vec<f64>,
) -> Result<PathPlan, PlanError> {
    let predicted_gamma = curve.solid_angle_phase()?;
    let time_times_cap = pulse_areas.iter().map(|a| a.abs()).sum();
    Ok(PathPlan {
        spec: *spec,
        family,
        theta_mid,
        length_spherical: curve.path_length(LengthConvention::Spherical),
        length_param_sum: curve.path_length(LengthConvention::ParamSum),
        curve,
        predicted_gamma,
        pulse_areas,
        time_times_cap,
    })
}

/// SU(2) rotation taking ẑ to the spec's axis: R = e^{−iφ₀σ_z/2} e^{−iθ₀σ_y/2}.
pub fn chart_rotation(spec: &GateSpec) -> UnitaryMatrix {
    let (theta0, phi0) = spec.start_point();
    let (s, c) = (0.5 * theta0).sin_cos();
    let half_phase = C64::from_polar(1.0, -0.5 * phi0);
    let mut m = Array2::zeros((2, 2));
    m[(0, 0)] = half_phase * c;
    m[(0, 1)] = half_phase * (-s);
    m[(1, 0)] = half_phase.conj() * s;
    m[(1, 1)] = half_phase.conj() * c;
    UnitaryMatrix::new(m, 1e-12).expect("rotation is unitary by construction")
}

/// End-to-end check of a plan in the laboratory frame.
#[derive(Clone, Debug, Serialize)]
pub struct PlanVerification {
    /// Report of the chart-frame simulation.
    pub chart: EvolutionReport,
    /// Fidelity of R U_chart R† against the target gate on the spec's axis.
    pub lab_fidelity: f64,
    /// Holonomies extracted from the lab-frame unitary on the rotated basis.
    pub lab_holonomies: Vec<f64>,
}

/// Simulate the plan's chart curve, rotate the result onto the target axis
/// and compare against the target gate.
pub fn verify_plan(plan: &PathPlan, cfg: &PropagatorConfig) -> Result<PlanVerification, PlanError> {
    let chart_target = GateSpec::z(plan.spec.half_angle());
    let chart = run_geometric_gate(&plan.curve, GateKind::OneQubit, &chart_target, cfg)?;
    let rotation = chart_rotation(&plan.spec);
    let lab_unitary = chart.final_unitary.conjugated_by(&rotation);
    let lab_fidelity =
        gate_fidelity(&lab_unitary, &gate_from_spec(&plan.spec)).map_err(EvolveError::Qcore)?;
    let lab_basis: Vec<StateVector> = (0..2)
        .map(|k| rotation.apply(&StateVector::basis_state(2, k)))
        .collect();
    let lab_holonomies =
        holonomy_extract(&lab_unitary, &lab_basis, cfg.eigentol).map_err(EvolveError::Qcore)?;
    Ok(PlanVerification {
        chart,
        lab_fidelity,
        lab_holonomies,
    })
}

/// One row of a plan comparison.
#[derive(Clone, Debug, Serialize)]
pub struct PlanRow {
    pub plan: PathPlan,
    pub fidelity: f64,
    pub time_estimate: f64,
}

/// Build and verify all families (three-segment once per grid point), keep
/// only plans whose simulated lab fidelity reaches 1 − 1e-6, and sort by
/// time estimate.
pub fn compare_plans(
    spec: &GateSpec,
    theta_mid_grid: &[f64],
    amp_cap: f64,
    cfg: &PropagatorConfig,
) -> Result<Vec<PlanRow>, PlanError> {
    let mut plans = vec![plan_orange_slice(spec)?];
    for &theta_mid in theta_mid_grid {
        plans.push(plan_three_segment(spec, theta_mid)?);
    }
    if spec.half_angle() != 0.0 {
        plans.push(plan_min_circle(spec)?);
    }
    let mut rows = Vec::with_capacity(plans.len());
    for plan in plans {
        let verification = verify_plan(&plan, cfg)?;
        let required = 1.0 - 1e-6;
        if verification.lab_fidelity < required {
            return Err(PlanError::VerificationFailed {
                family: plan.family,
                fidelity: verification.lab_fidelity,
                required,
            });
        }
        rows.push(PlanRow {
            time_estimate: time_estimate(&plan, amp_cap),
            fidelity: verification.lab_fidelity,
            plan,
        });
    }
    rows.sort_by(|a, b| a.time_estimate.partial_cmp(&b.time_estimate).unwrap());
    Ok(rows)
}

/// Chart schedule conjugated onto the spec's axis.
pub fn lab_schedule(plan: &PathPlan) -> HamiltonianSchedule {
    onequbit_hamiltonian(&plan.curve).conjugated(&chart_rotation(&plan.spec))
}

/// Propagate a lab-frame schedule and compare against the target gate.
pub fn lab_fidelity_of_schedule(
    schedule: &HamiltonianSchedule,
    spec: &GateSpec,
    cfg: &PropagatorConfig,
) -> Result<f64, EvolveError> {
    let u = propagate(schedule, cfg)?;
    Ok(gate_fidelity(&u, &gate_from_spec(spec))?)
}
