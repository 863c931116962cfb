//! Inverse-engineering of driving Hamiltonians for nonadiabatic geometric
//! quantum gates from prescribed evolution paths on the Bloch sphere.
//!
//! The library is organized around a single pipeline:
//!
//! 1. [`paths`] — describe a closed parameter curve t ↦ (θ(t), φ(t)) and
//!    compute its geometric functionals (enclosed solid angle, path lengths).
//! 2. [`synth`] — construct the driving Hamiltonian that transports a cyclic
//!    auxiliary frame along that curve, either from the generic frame formula
//!    or from the closed-form one- and two-qubit expressions, together with
//!    the laboratory control decomposition (detuning Δ, Rabi signal Ω).
//! 3. [`evolve`] — propagate the Schrödinger equation under the schedule,
//!    extract holonomy phases and verify cyclicity / parallel transport.
//! 4. [`planner`] — map a target gate to candidate curves (orange slice,
//!    three-segment, minimal circle) and compare lengths and pulse timing.
//! 5. [`ionmodel`] — trapped-ion blue-sideband realization of the two-qubit
//!    exchange interaction and numerical validation of its adiabatic
//!    elimination to the effective XY/DM Hamiltonian.
//! 6. [`harness`] — deterministic robustness probes (time warps, amplitude
//!    and detuning errors) around the geometric-invariance properties.

pub mod evolve;
pub mod harness;
pub mod ionmodel;
pub mod paths;
pub mod planner;
pub mod qcore;
pub mod quad;
pub mod synth;

pub use qcore::{GateSpec, HermitianMatrix, StateVector, UnitaryMatrix};
