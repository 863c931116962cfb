//! Scenario assembly and execution: ties curve files or inline gate specs
//! to the simulate / plan / sweep / ion-check pipelines and writes their
//! artifacts.
//!
//! Outputs are deterministic: floats are printed with 17 significant digits,
//! row order follows input order, and reports embed the scenario echo and
//! tool version instead of timestamps.

use geomgate::evolve::{run_geometric_gate, EvolveError, GateKind, Method, PropagatorConfig};
use geomgate::harness::{fidelity_sweep, seeded_warps, ErrorModel, HarnessError};
use geomgate::ionmodel::{infidelity_slope, reduction_sweep, IonError};
use geomgate::paths::{ParamCurve, PathError};
use geomgate::planner::{compare_plans, PlanError};
use geomgate::qcore::{GateSpec, QcoreError};
use geomgate::synth::{onequbit_hamiltonian, ControlSignals, SynthError};
use serde::Serialize;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use thiserror::Error;

pub const TOOL_NAME: &str = "geomgate";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config: {0}")]
    Config(String),
    #[error(transparent)]
    Path(#[from] PathError),
    #[error(transparent)]
    Synth(#[from] SynthError),
    #[error(transparent)]
    Evolve(#[from] EvolveError),
    #[error(transparent)]
    Plan(#[from] PlanError),
    #[error(transparent)]
    Harness(#[from] HarnessError),
    #[error(transparent)]
    Ion(#[from] IonError),
    #[error(transparent)]
    Qcore(#[from] QcoreError),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Qcore(_) => 2,
            // Unparseable input files are config failures; geometric
            // violations get their own code.
            CliError::Path(PathError::Json(_)) => 2,
            CliError::Path(_) => 3,
            CliError::Synth(_) => 4,
            CliError::Evolve(_) | CliError::Plan(_) | CliError::Harness(_) => 5,
            CliError::Ion(_) => 6,
            CliError::Io(_) => 7,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Config(_) => "config",
            CliError::Qcore(_) => "gate_spec",
            CliError::Path(_) => "path",
            CliError::Synth(_) => "synthesis",
            CliError::Evolve(_) => "evolution",
            CliError::Plan(_) => "planner",
            CliError::Harness(_) => "harness",
            CliError::Ion(_) => "ion_model",
            CliError::Io(_) => "io",
        }
    }

    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Payload<'a> {
            code: i32,
            kind: &'a str,
            message: String,
        }
        #[derive(Serialize)]
        struct Doc<'a> {
            error: Payload<'a>,
        }
        serde_json::to_string(&Doc {
            error: Payload {
                code: self.exit_code(),
                kind: self.kind(),
                message: self.to_string(),
            },
        })
        .expect("error serialization cannot fail")
    }
}

#[derive(Clone, Debug, Serialize)]
pub enum Mode {
    Simulate {
        curve_file: PathBuf,
        target: GateSpec,
        two_qubit: bool,
        trajectory: bool,
        schedule_csv: bool,
    },
    Plan {
        spec: GateSpec,
        theta_mid: Vec<f64>,
        cap: f64,
    },
    Sweep {
        spec: GateSpec,
        theta_mid: f64,
        amplitudes: Vec<f64>,
        detunings: Vec<f64>,
        n_warps: usize,
        seed: u64,
    },
    IonCheck {
        eta: f64,
        omega: f64,
        ratios: Vec<f64>,
        n_max: usize,
        area: f64,
    },
}

#[derive(Clone, Debug, Serialize)]
pub struct Scenario {
    pub mode: Mode,
    pub n_steps: usize,
    pub method: Method,
    /// Not part of the config echo: identical logical inputs produce
    /// byte-identical artifacts wherever they are written.
    #[serde(skip)]
    pub out_dir: PathBuf,
}

impl Scenario {
    fn config(&self) -> PropagatorConfig {
        PropagatorConfig {
            n_steps: self.n_steps,
            method: self.method,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if let Mode::Simulate { curve_file, .. } = &self.mode {
            if !curve_file.is_file() {
                return Err(CliError::Config(format!(
                    "curve file {} does not exist",
                    curve_file.display()
                )));
            }
        }
        Ok(())
    }
}

/// 17 significant digits, round-trip exact for f64.
fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents)?;
    Ok(())
}

#[derive(Serialize)]
struct ReportDoc<'a, T: Serialize> {
    tool: ToolStamp,
    scenario: &'a Scenario,
    report: T,
}

#[derive(Serialize)]
struct ToolStamp {
    name: &'static str,
    version: &'static str,
}

fn stamp() -> ToolStamp {
    ToolStamp {
        name: TOOL_NAME,
        version: TOOL_VERSION,
    }
}

/// Execute a scenario; returns the artifact paths written, in order.
pub fn run(scenario: &Scenario) -> Result<Vec<PathBuf>, CliError> {
    scenario.validate()?;
    std::fs::create_dir_all(&scenario.out_dir)?;
    match &scenario.mode {
        Mode::Simulate {
            curve_file,
            target,
            two_qubit,
            trajectory,
            schedule_csv,
        } => run_simulate(
            scenario,
            curve_file,
            target,
            *two_qubit,
            *trajectory,
            *schedule_csv,
        ),
        Mode::Plan {
            spec,
            theta_mid,
            cap,
        } => run_plan(scenario, spec, theta_mid, *cap),
        Mode::Sweep {
            spec,
            theta_mid,
            amplitudes,
            detunings,
            n_warps,
            seed,
        } => run_sweep(scenario, spec, *theta_mid, amplitudes, detunings, *n_warps, *seed),
        Mode::IonCheck {
            eta,
            omega,
            ratios,
            n_max,
            area,
        } => run_ion_check(scenario, *eta, *omega, ratios, *n_max, *area),
    }
}

fn run_simulate(
    scenario: &Scenario,
    curve_file: &Path,
    target: &GateSpec,
    two_qubit: bool,
    trajectory: bool,
    schedule_csv: bool,
) -> Result<Vec<PathBuf>, CliError> {
    let text = std::fs::read_to_string(curve_file)?;
    let curve = ParamCurve::from_json(&text)?;
    let kind = if two_qubit {
        GateKind::TwoQubit
    } else {
        GateKind::OneQubit
    };
    let cfg = scenario.config();
    let report = run_geometric_gate(&curve, kind, target, &cfg)?;
    let mut written = Vec::new();

    let report_path = scenario.out_dir.join("report.json");
    let doc = ReportDoc {
        tool: stamp(),
        scenario,
        report: &report,
    };
    write_file(&report_path, &serde_json::to_string_pretty(&doc)?)?;
    written.push(report_path);

    if trajectory {
        let path = scenario.out_dir.join("trajectory.csv");
        write_file(&path, &trajectory_csv(&curve, kind, &cfg)?)?;
        written.push(path);
    }
    if schedule_csv {
        let path = scenario.out_dir.join("schedule.csv");
        write_file(&path, &schedule_csv_text(&curve, kind, 512))?;
        written.push(path);
    }
    Ok(written)
}

fn trajectory_csv(
    curve: &ParamCurve,
    kind: GateKind,
    cfg: &PropagatorConfig,
) -> Result<String, CliError> {
    let (schedule, frame) = match kind {
        GateKind::OneQubit => (
            onequbit_hamiltonian(curve),
            geomgate::synth::AuxiliaryFrame::one_qubit(curve),
        ),
        GateKind::TwoQubit => (
            geomgate::synth::twoqubit_hamiltonian(curve),
            geomgate::synth::AuxiliaryFrame::two_qubit(curve),
        ),
    };
    let psi0 = frame.basis_at(0.0).into_iter().next().expect("nonempty frame");
    let dim = schedule.dim();
    let mut out = String::from("t");
    for k in 0..dim {
        write!(out, ",re_{k},im_{k}").unwrap();
    }
    out.push_str(",h_expectation\n");
    geomgate::evolve::propagate_state_with(&schedule, &psi0, cfg, |t, psi| {
        let mut row = fmt(t);
        for k in 0..dim {
            let a = psi.amp(k);
            row.push(',');
            row.push_str(&fmt(a.re));
            row.push(',');
            row.push_str(&fmt(a.im));
        }
        row.push(',');
        row.push_str(&fmt(schedule.hamiltonian(t).expectation(psi)));
        row.push('\n');
        out.push_str(&row);
    })?;
    Ok(out)
}

fn schedule_csv_text(curve: &ParamCurve, kind: GateKind, n: usize) -> String {
    let schedule = match kind {
        GateKind::OneQubit => onequbit_hamiltonian(curve),
        GateKind::TwoQubit => geomgate::synth::twoqubit_hamiltonian(curve),
    };
    let dim = schedule.dim();
    let mut out = String::from("t");
    for i in 0..dim {
        for j in i..dim {
            write!(out, ",re_h{i}{j},im_h{i}{j}").unwrap();
        }
    }
    out.push_str(",delta,re_omega,im_omega\n");
    for (t, h, controls) in schedule.sample(n) {
        let mut row = fmt(t);
        for i in 0..dim {
            for j in i..dim {
                let z = h.entry(i, j);
                row.push(',');
                row.push_str(&fmt(z.re));
                row.push(',');
                row.push_str(&fmt(z.im));
            }
        }
        let (delta, rabi) = match controls {
            Some(ControlSignals::Qubit { delta, rabi, .. }) => (delta, rabi),
            Some(ControlSignals::Exchange { cx, cy, cz }) => {
                // Block drive quadratures; R^z coefficient doubles as the
                // detuning column.
                (cz, geomgate::qcore::C64::new(cx, -cy))
            }
            None => (0.0, geomgate::qcore::C64::new(0.0, 0.0)),
        };
        row.push(',');
        row.push_str(&fmt(delta));
        row.push(',');
        row.push_str(&fmt(rabi.re));
        row.push(',');
        row.push_str(&fmt(rabi.im));
        row.push('\n');
        out.push_str(&row);
    }
    out
}

fn run_plan(
    scenario: &Scenario,
    spec: &GateSpec,
    theta_mid: &[f64],
    cap: f64,
) -> Result<Vec<PathBuf>, CliError> {
    if cap <= 0.0 {
        return Err(CliError::Config(format!("amplitude cap {cap} must be positive")));
    }
    let cfg = scenario.config();
    let rows = compare_plans(spec, theta_mid, cap, &cfg)?;

    let mut csv = String::from(
        "family,theta_mid,gamma,length_spherical,length_paramsum,time_times_cap,fidelity\n",
    );
    let mut written = Vec::new();
    let mut three_segment_index = 0usize;
    for row in &rows {
        let theta_field = match row.plan.theta_mid {
            Some(tm) => fmt(tm),
            None => String::new(),
        };
        writeln!(
            csv,
            "{},{},{},{},{},{},{}",
            row.plan.family,
            theta_field,
            fmt(row.plan.predicted_gamma),
            fmt(row.plan.length_spherical),
            fmt(row.plan.length_param_sum),
            fmt(row.plan.time_times_cap),
            fmt(row.fidelity),
        )
        .unwrap();
        let file_name = match row.plan.family {
            geomgate::planner::PathFamily::ThreeSegment => {
                three_segment_index += 1;
                format!("three_segment_{three_segment_index}.json")
            }
            family => format!("{family}.json"),
        };
        let curve_path = scenario.out_dir.join(file_name);
        write_file(&curve_path, &row.plan.curve.to_json())?;
        written.push(curve_path);
    }
    let csv_path = scenario.out_dir.join("plan.csv");
    write_file(&csv_path, &csv)?;
    written.insert(0, csv_path);

    let meta_path = scenario.out_dir.join("plan.json");
    let doc = ReportDoc {
        tool: stamp(),
        scenario,
        report: &rows,
    };
    write_file(&meta_path, &serde_json::to_string_pretty(&doc)?)?;
    written.push(meta_path);
    Ok(written)
}

fn run_sweep(
    scenario: &Scenario,
    spec: &GateSpec,
    theta_mid: f64,
    amplitudes: &[f64],
    detunings: &[f64],
    n_warps: usize,
    seed: u64,
) -> Result<Vec<PathBuf>, CliError> {
    let cfg = scenario.config();
    let plans = vec![
        geomgate::planner::plan_orange_slice(spec)?,
        geomgate::planner::plan_three_segment(spec, theta_mid)?,
        geomgate::planner::plan_min_circle(spec)?,
    ];
    // Sanity row first, then the requested probes.
    let mut errors = vec![ErrorModel::AmplitudeScale { epsilon: 0.0 }];
    errors.extend(
        amplitudes
            .iter()
            .map(|&epsilon| ErrorModel::AmplitudeScale { epsilon }),
    );
    errors.extend(
        detunings
            .iter()
            .map(|&offset| ErrorModel::DetuningOffset { offset }),
    );
    errors.extend(
        seeded_warps(seed, n_warps)
            .into_iter()
            .map(|profile| ErrorModel::TimeWarp { profile }),
    );
    let rows = fidelity_sweep(spec, &plans, &errors, &cfg)?;

    let axis = spec.axis();
    let axis_field = format!("{}:{}:{}", fmt(axis[0]), fmt(axis[1]), fmt(axis[2]));
    let mut csv = String::from("plan_family,gamma,axis,error_kind,magnitude,fidelity\n");
    for row in &rows {
        writeln!(
            csv,
            "{},{},{},{},{},{}",
            row.family,
            fmt(row.gamma),
            axis_field,
            row.error_kind,
            fmt(row.magnitude),
            fmt(row.fidelity),
        )
        .unwrap();
    }
    let csv_path = scenario.out_dir.join("sweep.csv");
    write_file(&csv_path, &csv)?;

    let meta_path = scenario.out_dir.join("sweep.json");
    let doc = ReportDoc {
        tool: stamp(),
        scenario,
        report: &rows,
    };
    write_file(&meta_path, &serde_json::to_string_pretty(&doc)?)?;
    Ok(vec![csv_path, meta_path])
}

fn run_ion_check(
    scenario: &Scenario,
    eta: f64,
    omega: f64,
    ratios: &[f64],
    n_max: usize,
    area: f64,
) -> Result<Vec<PathBuf>, CliError> {
    if ratios.is_empty() {
        return Err(CliError::Config("ion-check needs at least one ratio".into()));
    }
    let reports = reduction_sweep(eta, omega, n_max, ratios, area)?;
    let mut csv = String::from(
        "ratio,eta,n_max,subspace_fidelity,leakage,phase_error,block_fidelity\n",
    );
    for r in &reports {
        writeln!(
            csv,
            "{},{},{},{},{},{},{}",
            fmt(r.ratio),
            fmt(r.eta),
            r.n_max,
            fmt(r.subspace_fidelity),
            fmt(r.leakage),
            fmt(r.phase_error),
            fmt(r.block_fidelity),
        )
        .unwrap();
    }
    let csv_path = scenario.out_dir.join("ion_check.csv");
    write_file(&csv_path, &csv)?;

    #[derive(Serialize)]
    struct IonSummary<'a> {
        reports: &'a [geomgate::ionmodel::ReductionReport],
        infidelity_slope: Option<f64>,
    }
    let slope = (reports.len() >= 2).then(|| infidelity_slope(&reports));
    let meta_path = scenario.out_dir.join("ion_check.json");
    let doc = ReportDoc {
        tool: stamp(),
        scenario,
        report: IonSummary {
            reports: &reports,
            infidelity_slope: slope,
        },
    };
    write_file(&meta_path, &serde_json::to_string_pretty(&doc)?)?;
    Ok(vec![csv_path, meta_path])
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Config(format!("serialization: {e}"))
    }
}
