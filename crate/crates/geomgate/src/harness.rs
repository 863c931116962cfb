//! Deterministic robustness probes around the geometric-invariance
//! properties: path-preserving time warps leave the gate untouched, while
//! path-changing amplitude and detuning errors degrade it.
//!
//! No stochastic noise: random warps and axes come from a fixed seeded
//! generator so every sweep is reproducible, and the seed is part of the
//! output.

use crate::evolve::{EvolveError, PropagatorConfig};
use crate::paths::RateProfile;
use crate::planner::{chart_rotation, lab_fidelity_of_schedule, PathPlan};
use crate::qcore::GateSpec;
use crate::synth::{onequbit_hamiltonian, HamiltonianSchedule};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

/// Perturbative probes beyond this size stop meaning anything.
pub const MAX_ERROR_MAGNITUDE: f64 = 0.2;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("error magnitude {0} outside [-{MAX_ERROR_MAGNITUDE}, {MAX_ERROR_MAGNITUDE}]")]
    MagnitudeTooLarge(f64),
    #[error("time warp profile rejected: {0}")]
    BadWarp(#[from] crate::paths::PathError),
    #[error(transparent)]
    Evolve(#[from] EvolveError),
}

/// A control-error channel applied to a schedule.
#[derive(Clone, Debug, Serialize)]
pub enum ErrorModel {
    /// Ω → (1 + ε)Ω with the duration fixed. Path-changing.
    AmplitudeScale { epsilon: f64 },
    /// H → H + d·σ_z/2. Path-changing.
    DetuningOffset { offset: f64 },
    /// Monotone reparameterization of the drive clock. Path-preserving.
    TimeWarp { profile: RateProfile },
}

impl ErrorModel {
    pub fn validate(&self) -> Result<(), HarnessError> {
        match self {
            ErrorModel::AmplitudeScale { epsilon } => {
                if epsilon.abs() > MAX_ERROR_MAGNITUDE {
                    return Err(HarnessError::MagnitudeTooLarge(*epsilon));
                }
            }
            ErrorModel::DetuningOffset { offset } => {
                if offset.abs() > MAX_ERROR_MAGNITUDE {
                    return Err(HarnessError::MagnitudeTooLarge(*offset));
                }
            }
            ErrorModel::TimeWarp { profile } => profile.validate()?,
        }
        Ok(())
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            ErrorModel::AmplitudeScale { .. } => "amplitude_scale",
            ErrorModel::DetuningOffset { .. } => "detuning_offset",
            ErrorModel::TimeWarp { .. } => "time_warp",
        }
    }

    /// A scalar summary of the probe size: ε, d, or the warp's coefficient
    /// budget.
    pub fn magnitude(&self) -> f64 {
        match self {
            ErrorModel::AmplitudeScale { epsilon } => *epsilon,
            ErrorModel::DetuningOffset { offset } => *offset,
            ErrorModel::TimeWarp { profile } => match profile {
                RateProfile::Uniform => 0.0,
                RateProfile::Power { exponent } => exponent - 1.0,
                RateProfile::Fourier { coeffs } => coeffs.iter().map(|c| c.abs()).sum(),
            },
        }
    }
}

/// Apply a control-error channel to a schedule.
pub fn apply_error(
    schedule: &HamiltonianSchedule,
    error: &ErrorModel,
) -> Result<HamiltonianSchedule, HarnessError> {
    error.validate()?;
    Ok(match error {
        ErrorModel::AmplitudeScale { epsilon } => schedule.amplitude_scaled(*epsilon),
        ErrorModel::DetuningOffset { offset } => schedule.detuning_offset(*offset),
        ErrorModel::TimeWarp { profile } => schedule.time_warped(profile.clone()),
    })
}

/// Seeded family of strictly monotone warps with fixed endpoints.
pub fn seeded_warps(seed: u64, count: usize) -> Vec<RateProfile> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let n_modes = rng.gen_range(1..=4usize);
            // Keep Σ|c| ≤ 0.8 so the rate stays strictly positive.
            let mut budget = 0.8;
            let coeffs = (0..n_modes)
                .map(|_| {
                    let c: f64 = rng.gen_range(-budget..budget) * 0.6;
                    budget -= c.abs();
                    c
                })
                .collect();
            RateProfile::Fourier { coeffs }
        })
        .collect()
}

/// Seeded set of unit axes, biased nowhere.
pub fn seeded_axes(seed: u64, count: usize) -> Vec<[f64; 3]> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| loop {
            let v: [f64; 3] = [
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
            ];
            let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
            if n > 0.1 && n <= 1.0 {
                break [v[0] / n, v[1] / n, v[2] / n];
            }
        })
        .collect()
}

/// One row of a fidelity sweep.
#[derive(Clone, Debug, Serialize)]
pub struct SweepRow {
    pub family: String,
    pub gamma: f64,
    pub axis: [f64; 3],
    pub error_kind: String,
    pub magnitude: f64,
    pub fidelity: f64,
}

/// Simulate every (plan, error) pair against the ideal gate. Rows appear in
/// input order (plans outer, errors inner).
pub fn fidelity_sweep(
    spec: &GateSpec,
    plans: &[PathPlan],
    errors: &[ErrorModel],
    cfg: &PropagatorConfig,
) -> Result<Vec<SweepRow>, HarnessError> {
    let mut rows = Vec::with_capacity(plans.len() * errors.len());
    let rotation = chart_rotation(spec);
    for plan in plans {
        let chart_schedule = onequbit_hamiltonian(&plan.curve);
        for error in errors {
            let perturbed = apply_error(&chart_schedule, error)?;
            let lab = perturbed.conjugated(&rotation);
            let fidelity = lab_fidelity_of_schedule(&lab, spec, cfg)?;
            rows.push(SweepRow {
                family: plan.family.to_string(),
                gamma: spec.half_angle(),
                axis: spec.axis(),
                error_kind: error.kind_name().to_string(),
                magnitude: error.magnitude(),
                fidelity,
            });
        }
    }
    Ok(rows)
}
