//! Cross-module property checks of the full pipeline on randomized curves:
//! whatever closed path is prescribed, the synthesized schedule realizes
//! exp(−iγ n·σ) with n set by the start point and γ by half the enclosed
//! solid angle.

use geomgate::evolve::{run_geometric_gate, GateKind, PropagatorConfig};
use geomgate::harness::seeded_axes;
use geomgate::paths::{ParamCurve, Segment};
use geomgate::planner::{plan_min_circle, plan_orange_slice, plan_three_segment, verify_plan};
use geomgate::qcore::{principal_angle, GateSpec};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

fn unit_axis(theta: f64, phi: f64) -> [f64; 3] {
    [
        theta.sin() * phi.cos(),
        theta.sin() * phi.sin(),
        theta.cos(),
    ]
}

fn band_loop(theta_lo: f64, theta_hi: f64, phi0: f64, dphi: f64) -> ParamCurve {
    ParamCurve::new(
        vec![
            Segment::Meridian {
                phi: phi0,
                theta_from: theta_lo,
                theta_to: theta_hi,
                duration_fraction: 0.25,
            },
            Segment::LatitudeArc {
                theta: theta_hi,
                phi_from: phi0,
                phi_to: phi0 + dphi,
                duration_fraction: 0.25,
            },
            Segment::Meridian {
                phi: phi0 + dphi,
                theta_from: theta_hi,
                theta_to: theta_lo,
                duration_fraction: 0.25,
            },
            Segment::LatitudeArc {
                theta: theta_lo,
                phi_from: phi0 + dphi,
                phi_to: phi0,
                duration_fraction: 0.25,
            },
        ],
        1.0,
    )
    .unwrap()
}

#[test]
fn random_band_loops_realize_their_geometric_gate() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let cfg = PropagatorConfig::default();
    for case in 0..8 {
        let theta_lo = rng.gen_range(0.3..1.3);
        let theta_hi = rng.gen_range(theta_lo + 0.3..2.7);
        let phi0 = rng.gen_range(-PI..PI);
        let dphi = rng.gen_range(0.3..2.0) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        let curve = band_loop(theta_lo, theta_hi, phi0, dphi);
        let gamma = curve.solid_angle_phase().unwrap();
        let axis = unit_axis(theta_lo, phi0);
        let target = GateSpec::new(axis, principal_angle(gamma)).unwrap();
        let report = run_geometric_gate(&curve, GateKind::OneQubit, &target, &cfg).unwrap();
        assert!(
            report.fidelity_vs_target >= 1.0 - 1e-6,
            "case {case}: fidelity {}",
            report.fidelity_vs_target
        );
        // Holonomies are ∓γ in the principal branch.
        let want = principal_angle(gamma);
        assert!(
            (report.holonomy_principal[0] - principal_angle(-want)).abs() < 1e-6,
            "case {case}: {} vs {}",
            report.holonomy_principal[0],
            principal_angle(-want)
        );
        assert!((report.holonomy_principal[1] - want).abs() < 1e-6, "case {case}");
        assert!(report.pt_residual_max < 1e-9, "case {case}");
        assert!(report.cyclicity_defect < 1e-7, "case {case}");
    }
}

#[test]
fn random_tilted_circles_realize_their_geometric_gate() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let cfg = PropagatorConfig::default();
    for case in 0..6 {
        let tilt = rng.gen_range(0.9..2.2);
        let az = rng.gen_range(-PI..PI);
        let radius = rng.gen_range(0.25..0.65);
        let start_angle = rng.gen_range(-PI..PI);
        let curve = ParamCurve::new(
            vec![Segment::TiltedCircle {
                axis: unit_axis(tilt, az),
                radius,
                start_angle,
                sweep: 2.0 * PI,
                duration_fraction: 1.0,
            }],
            1.0,
        )
        .unwrap();
        let (theta0, phi0) = curve.start();
        let gamma = curve.solid_angle_phase().unwrap();
        let target = GateSpec::new(unit_axis(theta0, phi0), principal_angle(gamma)).unwrap();
        let report = run_geometric_gate(&curve, GateKind::OneQubit, &target, &cfg).unwrap();
        assert!(
            report.fidelity_vs_target >= 1.0 - 1e-6,
            "case {case}: fidelity {}",
            report.fidelity_vs_target
        );
    }
}

#[test]
fn two_qubit_block_follows_any_curve() {
    let mut rng = ChaCha8Rng::seed_from_u64(57);
    let cfg = PropagatorConfig::default();
    for _ in 0..4 {
        let theta_lo = rng.gen_range(0.4..1.0);
        let theta_hi = rng.gen_range(theta_lo + 0.4..2.4);
        let dphi = rng.gen_range(0.4..1.6);
        let curve = band_loop(theta_lo, theta_hi, 0.2, dphi);
        let gamma = curve.solid_angle_phase().unwrap();
        let target = GateSpec::new(unit_axis(theta_lo, 0.2), principal_angle(gamma)).unwrap();
        let report = run_geometric_gate(&curve, GateKind::TwoQubit, &target, &cfg).unwrap();
        assert!(report.fidelity_vs_target >= 1.0 - 1e-6);
        // The aligned states never acquire phase.
        assert!(report.holonomy_principal[0].abs() < 1e-8);
        assert!(report.holonomy_principal[1].abs() < 1e-8);
    }
}

#[test]
fn chart_rotation_verified_on_seeded_axes() {
    let cfg = PropagatorConfig::default();
    for (k, axis) in seeded_axes(99, 6).into_iter().enumerate() {
        let spec = GateSpec::new(axis, PI / 8.0).unwrap();
        for plan in [
            plan_orange_slice(&spec).unwrap(),
            plan_three_segment(&spec, PI / 2.5).unwrap(),
            plan_min_circle(&spec).unwrap(),
        ] {
            let v = verify_plan(&plan, &cfg).unwrap();
            assert!(
                v.lab_fidelity >= 1.0 - 1e-6,
                "axis {k} {:?} family {}: fidelity {}",
                axis,
                plan.plan_family_name(),
                v.lab_fidelity
            );
        }
    }
}

trait FamilyName {
    fn plan_family_name(&self) -> String;
}

impl FamilyName for geomgate::planner::PathPlan {
    fn plan_family_name(&self) -> String {
        self.family.to_string()
    }
}
