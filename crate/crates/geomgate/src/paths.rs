//! Prescribed parameter curves t ↦ (θ(t), φ(t)) on the unit sphere and their
//! geometric functionals.
//!
//! A curve is an ordered chain of segments covering a unit of internal
//! parameter, an overall nominal duration τ, and an optional monotone rate
//! profile warping physical time onto the internal parameter. Geometric
//! quantities (solid angle, lengths) are integrated in the internal parameter
//! and are therefore invariant under any rate profile by construction.
//!
//! Pole bookkeeping: a `LatitudeArc` at θ ∈ {0, π} is a "pole turn" — a
//! physically instantaneous relabeling of the azimuth carrying the φ jump.
//! It contributes (1 − cosθ)Δφ/2 to the enclosed solid angle (Δφ at the
//! south pole, 0 at the north pole) and zero to both length conventions.

use crate::qcore::{principal_angle, GateSpec};
use crate::quad;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use thiserror::Error;

/// Chaining / closure tolerance on angles.
pub const CHAIN_TOL: f64 = 1e-10;
/// Distance from a pole below which a latitude arc counts as a pole turn.
pub const POLE_TOL: f64 = 1e-9;
/// Guard band for the (θ, φ) chart conversion of 3D circle points.
const POLE_GUARD: f64 = 1e-8;
/// Absolute tolerance for geometric quadratures.
pub const QUAD_TOL: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum PathError {
    #[error("curve has no segments")]
    Empty,
    #[error("invalid segment: {0}")]
    BadSegment(String),
    #[error("segments {0} and {1} do not chain: endpoint gap {2:.3e}")]
    ChainGap(usize, usize, f64),
    #[error("segment duration fractions sum to {0}, expected 1")]
    BadDurations(f64),
    #[error("invalid rate profile: {0}")]
    BadRateProfile(String),
    #[error("curve is not closed: endpoint defect {defect:.3e} exceeds {tol:.3e}")]
    OpenCurve { defect: f64, tol: f64 },
    #[error("{0}")]
    Domain(String),
    #[error("curve JSON: {0}")]
    Json(String),
}

/// Monotone reparameterization x ↦ w(x) of [0, 1] with fixed endpoints.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RateProfile {
    Uniform,
    /// w(x) = x^p with p ≥ 1.
    Power { exponent: f64 },
    /// w(x) = x + Σ_j c_j sin(πjx)/(πj); requires Σ|c_j| < 1.
    Fourier { coeffs: Vec<f64> },
}

impl RateProfile {
    pub fn validate(&self) -> Result<(), PathError> {
        match self {
            RateProfile::Uniform => Ok(()),
            RateProfile::Power { exponent } => {
                if !exponent.is_finite() || *exponent < 1.0 {
                    Err(PathError::BadRateProfile(format!(
                        "power exponent {exponent} must be >= 1"
                    )))
                } else {
                    Ok(())
                }
            }
            RateProfile::Fourier { coeffs } => {
                let budget: f64 = coeffs.iter().map(|c| c.abs()).sum();
                if !budget.is_finite() || budget >= 1.0 {
                    Err(PathError::BadRateProfile(format!(
                        "fourier coefficient sum {budget} must be < 1 for monotonicity"
                    )))
                } else {
                    Ok(())
                }
            }
        }
    }

    pub fn warp(&self, x: f64) -> f64 {
        match self {
            RateProfile::Uniform => x,
            RateProfile::Power { exponent } => x.powf(*exponent),
            RateProfile::Fourier { coeffs } => {
                let mut w = x;
                for (j, c) in coeffs.iter().enumerate() {
                    let k = (j + 1) as f64 * PI;
                    w += c * (k * x).sin() / k;
                }
                w
            }
        }
    }

    /// Inverse warp: the x with w(x) = u.
    pub fn inverse(&self, u: f64) -> f64 {
        match self {
            RateProfile::Uniform => u,
            RateProfile::Power { exponent } => u.powf(1.0 / exponent),
            RateProfile::Fourier { .. } => {
                let (mut lo, mut hi) = (0.0f64, 1.0f64);
                for _ in 0..80 {
                    let mid = 0.5 * (lo + hi);
                    if self.warp(mid) < u {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                0.5 * (lo + hi)
            }
        }
    }

    /// dw/dx.
    pub fn rate(&self, x: f64) -> f64 {
        match self {
            RateProfile::Uniform => 1.0,
            RateProfile::Power { exponent } => {
                if *exponent == 1.0 {
                    1.0
                } else {
                    exponent * x.powf(exponent - 1.0)
                }
            }
            RateProfile::Fourier { coeffs } => {
                let mut r = 1.0;
                for (j, c) in coeffs.iter().enumerate() {
                    let k = (j + 1) as f64 * PI;
                    r += c * (k * x).cos();
                }
                r
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum LengthConvention {
    /// ∫ √(θ̇² + sin²θ φ̇²) dt — the round-sphere metric.
    Spherical,
    /// Σ over segments of |Δθ| + |Δφ| (total variation on non-monotone
    /// segments); reproduces pulse-area style accounting.
    ParamSum,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CustomSample {
    pub u: f64,
    pub theta: f64,
    pub phi: f64,
}

/// One piece of a curve, parameterized by a local s ∈ [0, 1].
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Segment {
    Meridian {
        phi: f64,
        theta_from: f64,
        theta_to: f64,
        duration_fraction: f64,
    },
    LatitudeArc {
        theta: f64,
        phi_from: f64,
        phi_to: f64,
        duration_fraction: f64,
    },
    /// Circle of angular radius `radius` about the unit 3-vector `axis`,
    /// traversed from `start_angle` through `sweep` radians in the
    /// right-handed sense about `axis`.
    TiltedCircle {
        axis: [f64; 3],
        radius: f64,
        start_angle: f64,
        sweep: f64,
        duration_fraction: f64,
    },
    /// Sampled (u, θ, φ) table over a monotone local grid spanning [0, 1];
    /// values interpolate linearly, derivatives by central differences.
    Custom {
        samples: Vec<CustomSample>,
        duration_fraction: f64,
    },
}

/// Deterministic right-handed orthonormal frame (e1, e2, axis).
fn circle_frame(axis: [f64; 3]) -> ([f64; 3], [f64; 3]) {
    let h = if axis[2].abs() < 0.9 {
        [0.0, 0.0, 1.0]
    } else {
        [1.0, 0.0, 0.0]
    };
    let d = h[0] * axis[0] + h[1] * axis[1] + h[2] * axis[2];
    let mut e1 = [h[0] - d * axis[0], h[1] - d * axis[1], h[2] - d * axis[2]];
    let n = (e1[0] * e1[0] + e1[1] * e1[1] + e1[2] * e1[2]).sqrt();
    e1 = [e1[0] / n, e1[1] / n, e1[2] / n];
    let e2 = [
        axis[1] * e1[2] - axis[2] * e1[1],
        axis[2] * e1[0] - axis[0] * e1[2],
        axis[0] * e1[1] - axis[1] * e1[0],
    ];
    (e1, e2)
}

/// Chart angles and their s-derivatives at local parameter s.
#[derive(Clone, Copy, Debug)]
struct ChartPoint {
    theta: f64,
    phi: f64,
    dtheta_ds: f64,
    dphi_ds: f64,
}

impl Segment {
    pub fn duration_fraction(&self) -> f64 {
        match self {
            Segment::Meridian {
                duration_fraction, ..
            }
            | Segment::LatitudeArc {
                duration_fraction, ..
            }
            | Segment::TiltedCircle {
                duration_fraction, ..
            }
            | Segment::Custom {
                duration_fraction, ..
            } => *duration_fraction,
        }
    }

    pub fn is_pole_turn(&self) -> bool {
        matches!(self, Segment::LatitudeArc { theta, .. }
            if theta.min(PI - theta).abs() <= POLE_TOL)
    }

    pub fn validate(&self) -> Result<(), PathError> {
        let f = self.duration_fraction();
        if !(f > 0.0 && f <= 1.0) {
            return Err(PathError::BadSegment(format!(
                "duration fraction {f} outside (0, 1]"
            )));
        }
        match self {
            Segment::Meridian {
                theta_from,
                theta_to,
                ..
            } => {
                for th in [theta_from, theta_to] {
                    if !(-1e-12..=PI + 1e-12).contains(th) {
                        return Err(PathError::BadSegment(format!(
                            "meridian polar angle {th} outside [0, pi]"
                        )));
                    }
                }
                Ok(())
            }
            Segment::LatitudeArc { theta, .. } => {
                if !(-1e-12..=PI + 1e-12).contains(theta) {
                    return Err(PathError::BadSegment(format!(
                        "latitude arc at theta {theta} outside [0, pi]"
                    )));
                }
                Ok(())
            }
            Segment::TiltedCircle { axis, radius, .. } => {
                let n = (axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]).sqrt();
                if (n - 1.0).abs() > 1e-9 {
                    return Err(PathError::BadSegment(format!(
                        "circle axis norm {n} is not 1"
                    )));
                }
                if !(*radius > 0.0 && *radius < PI) {
                    return Err(PathError::BadSegment(format!(
                        "circle radius {radius} outside (0, pi)"
                    )));
                }
                Ok(())
            }
            Segment::Custom { samples, .. } => {
                if samples.len() < 2 {
                    return Err(PathError::BadSegment(
                        "custom segment needs at least 2 samples".into(),
                    ));
                }
                if samples.first().unwrap().u.abs() > 1e-12
                    || (samples.last().unwrap().u - 1.0).abs() > 1e-12
                {
                    return Err(PathError::BadSegment(
                        "custom sample grid must span [0, 1]".into(),
                    ));
                }
                for w in samples.windows(2) {
                    if w[1].u <= w[0].u {
                        return Err(PathError::BadSegment(
                            "custom sample grid must be strictly increasing".into(),
                        ));
                    }
                }
                for s in samples {
                    if !(-1e-12..=PI + 1e-12).contains(&s.theta) {
                        return Err(PathError::BadSegment(format!(
                            "custom sample theta {} outside [0, pi]",
                            s.theta
                        )));
                    }
                }
                Ok(())
            }
        }
    }

    fn chart_at(&self, s: f64) -> ChartPoint {
        match self {
            Segment::Meridian {
                phi,
                theta_from,
                theta_to,
                ..
            } => ChartPoint {
                theta: theta_from + (theta_to - theta_from) * s,
                phi: *phi,
                dtheta_ds: theta_to - theta_from,
                dphi_ds: 0.0,
            },
            Segment::LatitudeArc {
                theta,
                phi_from,
                phi_to,
                ..
            } => ChartPoint {
                theta: *theta,
                phi: phi_from + (phi_to - phi_from) * s,
                dtheta_ds: 0.0,
                dphi_ds: phi_to - phi_from,
            },
            Segment::TiltedCircle {
                axis,
                radius,
                start_angle,
                sweep,
                ..
            } => circle_chart_at(*axis, *radius, *start_angle, *sweep, s),
            Segment::Custom { samples, .. } => custom_chart_at(samples, s),
        }
    }

    fn start_point(&self) -> (f64, f64) {
        let p = self.chart_at(0.0);
        (p.theta, p.phi)
    }

    fn end_point(&self) -> (f64, f64) {
        let p = self.chart_at(1.0);
        (p.theta, p.phi)
    }

    /// ∫ over the segment of f(chart point) ds, by adaptive quadrature.
    fn integrate<F: Fn(&ChartPoint) -> f64>(&self, f: F, tol: f64) -> f64 {
        quad::integrate(|s| f(&self.chart_at(s)), 0.0, 1.0, tol)
    }

    /// Reverse the traversal direction.
    pub fn reversed(&self) -> Segment {
        match self.clone() {
            Segment::Meridian {
                phi,
                theta_from,
                theta_to,
                duration_fraction,
            } => Segment::Meridian {
                phi,
                theta_from: theta_to,
                theta_to: theta_from,
                duration_fraction,
            },
            Segment::LatitudeArc {
                theta,
                phi_from,
                phi_to,
                duration_fraction,
            } => Segment::LatitudeArc {
                theta,
                phi_from: phi_to,
                phi_to: phi_from,
                duration_fraction,
            },
            Segment::TiltedCircle {
                axis,
                radius,
                start_angle,
                sweep,
                duration_fraction,
            } => Segment::TiltedCircle {
                axis,
                radius,
                start_angle: start_angle + sweep,
                sweep: -sweep,
                duration_fraction,
            },
            Segment::Custom {
                mut samples,
                duration_fraction,
            } => {
                samples.reverse();
                for s in &mut samples {
                    s.u = 1.0 - s.u;
                }
                Segment::Custom {
                    samples,
                    duration_fraction,
                }
            }
        }
    }
}

fn circle_chart_at(axis: [f64; 3], radius: f64, start_angle: f64, sweep: f64, s: f64) -> ChartPoint {
    let (e1, e2) = circle_frame(axis);
    let eval = |s: f64| -> ([f64; 3], [f64; 3]) {
        let a = start_angle + sweep * s;
        let (sa, ca) = a.sin_cos();
        let (sr, cr) = (radius.sin(), radius.cos());
        let p = [
            cr * axis[0] + sr * (ca * e1[0] + sa * e2[0]),
            cr * axis[1] + sr * (ca * e1[1] + sa * e2[1]),
            cr * axis[2] + sr * (ca * e1[2] + sa * e2[2]),
        ];
        let dp = [
            sr * sweep * (-sa * e1[0] + ca * e2[0]),
            sr * sweep * (-sa * e1[1] + ca * e2[1]),
            sr * sweep * (-sa * e1[2] + ca * e2[2]),
        ];
        (p, dp)
    };

    let (p, _) = eval(s);
    let rxy0 = (p[0] * p[0] + p[1] * p[1]).sqrt();
    // θ = atan2(r, z) is well defined everywhere, including the poles.
    let theta = rxy0.atan2(p[2]);
    // φ and the chart derivatives are ill-conditioned near a pole; evaluate
    // them a guarded step into the segment interior instead.
    let (p, dp, rxy) = if rxy0 < POLE_GUARD {
        let speed = radius.sin() * sweep.abs();
        let ds = if speed > 0.0 {
            (POLE_GUARD / speed).min(1e-3)
        } else {
            0.0
        };
        let s_nudged = if s < 0.5 { s + ds } else { s - ds };
        let (pn, dpn) = eval(s_nudged);
        let rn = (pn[0] * pn[0] + pn[1] * pn[1]).sqrt();
        if rn == 0.0 {
            // Degenerate circle sitting on a pole.
            return ChartPoint {
                theta,
                phi: 0.0,
                dtheta_ds: 0.0,
                dphi_ds: 0.0,
            };
        }
        (pn, dpn, rn)
    } else {
        let (p, dp) = eval(s);
        (p, dp, rxy0)
    };
    let phi = p[1].atan2(p[0]);
    // θ = atan2(r, z) on the unit sphere (r² + z² = 1):
    //   dθ = z·dr − r·dz,  dr = (x·dx + y·dy)/r,  dφ = (x·dy − y·dx)/r².
    let dr = (p[0] * dp[0] + p[1] * dp[1]) / rxy;
    let dtheta_ds = p[2] * dr - rxy * dp[2];
    let dphi_ds = (p[0] * dp[1] - p[1] * dp[0]) / (rxy * rxy);
    ChartPoint {
        theta,
        phi,
        dtheta_ds,
        dphi_ds,
    }
}

fn custom_chart_at(samples: &[CustomSample], s: f64) -> ChartPoint {
    let n = samples.len();
    let s = s.clamp(0.0, 1.0);
    // Node derivative by central difference (one-sided at the ends).
    let node_deriv = |i: usize| -> (f64, f64) {
        let (lo, hi) = if i == 0 {
            (0, 1)
        } else if i == n - 1 {
            (n - 2, n - 1)
        } else {
            (i - 1, i + 1)
        };
        let du = samples[hi].u - samples[lo].u;
        (
            (samples[hi].theta - samples[lo].theta) / du,
            (samples[hi].phi - samples[lo].phi) / du,
        )
    };
    let mut k = samples
        .partition_point(|smp| smp.u <= s)
        .saturating_sub(1)
        .min(n - 2);
    if samples[k + 1].u < s {
        k = n - 2;
    }
    let (u0, u1) = (samples[k].u, samples[k + 1].u);
    let w = ((s - u0) / (u1 - u0)).clamp(0.0, 1.0);
    let (d0t, d0p) = node_deriv(k);
    let (d1t, d1p) = node_deriv(k + 1);
    ChartPoint {
        theta: samples[k].theta + (samples[k + 1].theta - samples[k].theta) * w,
        phi: samples[k].phi + (samples[k + 1].phi - samples[k].phi) * w,
        dtheta_ds: d0t + (d1t - d0t) * w,
        dphi_ds: d0p + (d1p - d0p) * w,
    }
}

/// One evaluated point of a curve: physical time, chart angles and their
/// physical-time derivatives.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CurvePoint {
    pub t: f64,
    pub theta: f64,
    pub phi: f64,
    pub theta_dot: f64,
    pub phi_dot: f64,
}

fn points_equal_defect(a: (f64, f64), b: (f64, f64)) -> f64 {
    let dtheta = (a.0 - b.0).abs();
    let at_pole =
        a.0.min(PI - a.0).abs() <= CHAIN_TOL && b.0.min(PI - b.0).abs() <= CHAIN_TOL;
    if at_pole {
        dtheta
    } else {
        dtheta.max(principal_angle(a.1 - b.1).abs())
    }
}

/// Piecewise-smooth closed parameter curve on the unit sphere.
#[derive(Clone, Debug, Serialize)]
pub struct ParamCurve {
    segments: Vec<Segment>,
    tau: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    rate_profile: Option<RateProfile>,
}

#[derive(Deserialize)]
struct CurveDoc {
    segments: Vec<Segment>,
    tau: f64,
    #[serde(default)]
    rate_profile: Option<RateProfile>,
}

impl ParamCurve {
    pub fn new(segments: Vec<Segment>, tau: f64) -> Result<Self, PathError> {
        if segments.is_empty() {
            return Err(PathError::Empty);
        }
        if !(tau > 0.0 && tau.is_finite()) {
            return Err(PathError::Domain(format!("tau {tau} must be positive")));
        }
        for seg in &segments {
            seg.validate()?;
        }
        let total: f64 = segments.iter().map(|s| s.duration_fraction()).sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(PathError::BadDurations(total));
        }
        for i in 0..segments.len() - 1 {
            let gap = points_equal_defect(segments[i].end_point(), segments[i + 1].start_point());
            if gap > 100.0 * CHAIN_TOL {
                return Err(PathError::ChainGap(i, i + 1, gap));
            }
        }
        Ok(Self {
            segments,
            tau,
            rate_profile: None,
        })
    }

    pub fn with_rate_profile(mut self, profile: RateProfile) -> Result<Self, PathError> {
        profile.validate()?;
        self.rate_profile = match profile {
            RateProfile::Uniform => None,
            p => Some(p),
        };
        Ok(self)
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn rate_profile(&self) -> Option<&RateProfile> {
        self.rate_profile.as_ref()
    }

    pub fn start(&self) -> (f64, f64) {
        self.segments[0].start_point()
    }

    pub fn end(&self) -> (f64, f64) {
        self.segments.last().unwrap().end_point()
    }

    /// Endpoint mismatch under the pole-equivalence rule.
    pub fn closure_defect(&self) -> f64 {
        points_equal_defect(self.end(), self.start())
    }

    pub fn is_closed(&self) -> bool {
        self.closure_defect() <= 100.0 * CHAIN_TOL
    }

    fn require_closed(&self) -> Result<(), PathError> {
        let defect = self.closure_defect();
        if defect > 100.0 * CHAIN_TOL {
            return Err(PathError::OpenCurve {
                defect,
                tol: 100.0 * CHAIN_TOL,
            });
        }
        Ok(())
    }

    /// Evaluate at physical time t ∈ [0, τ].
    pub fn eval(&self, t: f64) -> CurvePoint {
        let x = (t / self.tau).clamp(0.0, 1.0);
        let (u, du_dx) = match &self.rate_profile {
            None => (x, 1.0),
            Some(p) => (p.warp(x), p.rate(x)),
        };
        let mut acc = 0.0;
        let mut idx = self.segments.len() - 1;
        let mut s_local = 1.0;
        for (i, seg) in self.segments.iter().enumerate() {
            let f = seg.duration_fraction();
            if u <= acc + f || i == self.segments.len() - 1 {
                idx = i;
                s_local = ((u - acc) / f).clamp(0.0, 1.0);
                break;
            }
            acc += f;
        }
        let seg = &self.segments[idx];
        let p = seg.chart_at(s_local);
        let scale = du_dx / (seg.duration_fraction() * self.tau);
        CurvePoint {
            t,
            theta: p.theta,
            phi: p.phi,
            theta_dot: p.dtheta_ds * scale,
            phi_dot: p.dphi_ds * scale,
        }
    }

    /// Physical times of the interior segment boundaries, where the
    /// synthesized Hamiltonian may jump.
    pub fn segment_boundaries(&self) -> Vec<f64> {
        let mut acc = 0.0;
        let mut out = Vec::new();
        for seg in &self.segments[..self.segments.len() - 1] {
            acc += seg.duration_fraction();
            let x = match &self.rate_profile {
                None => acc,
                Some(p) => p.inverse(acc),
            };
            out.push(x * self.tau);
        }
        out
    }

    /// Uniform-in-t grid of n_steps + 1 points including both endpoints.
    pub fn sample(&self, n_steps: usize) -> Vec<CurvePoint> {
        assert!(n_steps >= 2, "sample needs n_steps >= 2");
        (0..=n_steps)
            .map(|j| self.eval(self.tau * j as f64 / n_steps as f64))
            .collect()
    }

    /// γ = ½ ∮ (1 − cosθ) dφ, the continuous (unwrapped) value.
    pub fn solid_angle_phase(&self) -> Result<f64, PathError> {
        self.require_closed()?;
        let mut gamma = 0.0;
        for seg in &self.segments {
            gamma += match seg {
                Segment::Meridian { .. } => 0.0,
                _ => seg.integrate(|p| 0.5 * (1.0 - p.theta.cos()) * p.dphi_ds, QUAD_TOL),
            };
        }
        Ok(gamma)
    }

    pub fn path_length(&self, convention: LengthConvention) -> f64 {
        let mut total = 0.0;
        for seg in &self.segments {
            if seg.is_pole_turn() {
                continue;
            }
            total += match convention {
                LengthConvention::Spherical => seg.integrate(
                    |p| {
                        let v = p.theta.sin() * p.dphi_ds;
                        (p.dtheta_ds * p.dtheta_ds + v * v).sqrt()
                    },
                    QUAD_TOL,
                ),
                LengthConvention::ParamSum => match seg {
                    Segment::Meridian {
                        theta_from,
                        theta_to,
                        ..
                    } => (theta_to - theta_from).abs(),
                    Segment::LatitudeArc {
                        phi_from, phi_to, ..
                    } => (phi_to - phi_from).abs(),
                    _ => seg.integrate(|p| p.dtheta_ds.abs() + p.dphi_ds.abs(), QUAD_TOL),
                },
            };
        }
        total
    }

    /// Traverse the same image in the opposite direction.
    pub fn reversed(&self) -> ParamCurve {
        let mut segments: Vec<Segment> = self.segments.iter().rev().map(|s| s.reversed()).collect();
        // Keep fractions attached to their (reversed) segments.
        for (new, old) in segments.iter_mut().zip(self.segments.iter().rev()) {
            debug_assert_eq!(new.duration_fraction(), old.duration_fraction());
        }
        ParamCurve {
            segments,
            tau: self.tau,
            rate_profile: self.rate_profile.clone(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("curve serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<Self, PathError> {
        let doc: CurveDoc =
            serde_json::from_str(text).map_err(|e| PathError::Json(e.to_string()))?;
        let curve = ParamCurve::new(doc.segments, doc.tau)?;
        match doc.rate_profile {
            Some(p) => curve.with_rate_profile(p),
            None => Ok(curve),
        }
    }
}

/// Solve 2π(1 − cosρ) = |two_gamma| for the angular radius ρ.
pub fn min_circle_radius(two_gamma: f64) -> Result<f64, PathError> {
    if two_gamma == 0.0 || !two_gamma.is_finite() {
        return Err(PathError::Domain(
            "minimal circle needs a nonzero rotation angle".into(),
        ));
    }
    if two_gamma.abs() >= 4.0 * PI {
        return Err(PathError::Domain(format!(
            "rotation angle {two_gamma} outside (0, 4*pi): no enclosing circle exists"
        )));
    }
    let cos_rho = 1.0 - two_gamma.abs() / (2.0 * PI);
    Ok(cos_rho.clamp(-1.0, 1.0).acos())
}

/// Shortest-path circle for a gate: passes through the spec's start point,
/// has angular radius ρ with 2π(1 − cosρ) = |2γ|, and is traversed so the
/// signed enclosed solid angle is 2γ. Spherical length is 2π sinρ.
pub fn min_circle_curve(spec: &GateSpec) -> Result<ParamCurve, PathError> {
    let gamma = spec.half_angle();
    let rho = min_circle_radius(2.0 * gamma)?;
    let (theta0, phi0) = spec.start_point();
    let p0 = spec.axis();
    // Unit tangent at p0 pointing toward increasing θ; at a pole this is the
    // azimuth-φ0 horizontal direction.
    let d = [
        theta0.cos() * phi0.cos(),
        theta0.cos() * phi0.sin(),
        -theta0.sin(),
    ];
    let (sr, cr) = (rho.sin(), rho.cos());
    let c = [
        cr * p0[0] + sr * d[0],
        cr * p0[1] + sr * d[1],
        cr * p0[2] + sr * d[2],
    ];
    let (e1, e2) = circle_frame(c);
    let v = [p0[0] - cr * c[0], p0[1] - cr * c[1], p0[2] - cr * c[2]];
    let start_angle = (v[0] * e2[0] + v[1] * e2[1] + v[2] * e2[2])
        .atan2(v[0] * e1[0] + v[1] * e1[1] + v[2] * e1[2]);
    // A right-handed full sweep about the center encloses +2π(1 − cosρ).
    let sweep = if gamma >= 0.0 { 2.0 * PI } else { -2.0 * PI };
    ParamCurve::new(
        vec![Segment::TiltedCircle {
            axis: c,
            radius: rho,
            start_angle,
            sweep,
            duration_fraction: 1.0,
        }],
        1.0,
    )
}
