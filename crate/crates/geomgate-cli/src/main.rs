mod angle;
mod scenario;

use angle::{parse_angle, parse_axis, parse_target};
use clap::{Args, Parser, Subcommand};
use geomgate::evolve::Method;
use geomgate::qcore::GateSpec;
use scenario::{run, CliError, Mode, Scenario};
use std::path::PathBuf;

#[derive(Parser)]
#[command(
    name = "geomgate",
    version,
    about = "Synthesize, simulate, plan and stress-test nonadiabatic geometric gates \
             driven along prescribed Bloch-sphere paths"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonOpts {
    /// Output directory for reports and CSVs.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Propagation steps per curve.
    #[arg(long, default_value_t = 4096)]
    n_steps: usize,
    /// Integrator: midpoint (exponential midpoint rule) or rk4.
    #[arg(long, default_value = "midpoint")]
    method: String,
    /// Print the list of written artifacts.
    #[arg(long)]
    verbose: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Propagate a curve file against a target gate and write report.json.
    Simulate {
        /// Curve JSON file (as emitted by `plan`).
        #[arg(long)]
        curve: PathBuf,
        /// Target gate, axis:angle (e.g. z:pi/8 or 1,1,1:pi/4).
        #[arg(long)]
        target: String,
        /// Treat the curve as (α, β) driving the two-qubit exchange block.
        #[arg(long)]
        two_qubit: bool,
        /// Also write the per-step trajectory CSV.
        #[arg(long)]
        trajectory: bool,
        /// Also write the sampled schedule CSV.
        #[arg(long)]
        schedule: bool,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Compare candidate paths for a gate and emit their curve files.
    Plan {
        /// Rotation axis (x|y|z or three components).
        #[arg(long)]
        axis: String,
        /// Half rotation angle γ (e.g. pi/8).
        #[arg(long)]
        gamma: String,
        /// θ_mid grid for the three-segment family (comma separated angles).
        #[arg(long, value_delimiter = ',', default_value = "pi/3")]
        theta_mid: Vec<String>,
        /// Amplitude cap Ω̄ used for time estimates.
        #[arg(long, default_value = "1.0")]
        cap: String,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Fidelity sweep of control-error probes across path families.
    Sweep {
        #[arg(long)]
        axis: String,
        #[arg(long)]
        gamma: String,
        /// θ_mid for the three-segment family.
        #[arg(long, default_value = "pi/3")]
        theta_mid: String,
        /// Amplitude-scale errors ε (comma separated).
        #[arg(long, value_delimiter = ',', default_value = "0.01,0.05,0.1")]
        amplitudes: Vec<f64>,
        /// Detuning offsets d (comma separated).
        #[arg(long, value_delimiter = ',', default_value = "0.01,0.05,0.1")]
        detunings: Vec<f64>,
        /// Number of seeded random time warps.
        #[arg(long, default_value_t = 10)]
        warps: usize,
        /// Seed for the warp generator (recorded in the output).
        #[arg(long, default_value_t = 17)]
        seed: u64,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Validate the trapped-ion reduction to the effective exchange model.
    IonCheck {
        /// Lamb-Dicke parameter η.
        #[arg(long, default_value = "0.05")]
        eta: String,
        /// Constant Rabi amplitude Ω of both sideband drives.
        #[arg(long, default_value = "1.0")]
        omega: String,
        /// Detuning ratios R = δ/(ηΩ) to sweep (comma separated).
        #[arg(long, value_delimiter = ',', default_value = "10,20,40")]
        ratios: Vec<f64>,
        /// Fock cutoff.
        #[arg(long, default_value_t = 5)]
        n_max: usize,
        /// Exchange pulse area ∫|Ω_eff| dt (e.g. pi/4).
        #[arg(long, default_value = "pi/4")]
        area: String,
        #[command(flatten)]
        common: CommonOpts,
    },
}

fn parse_method(token: &str) -> Result<Method, CliError> {
    match token {
        "midpoint" => Ok(Method::MidpointExponential),
        "rk4" => Ok(Method::Rk4),
        other => Err(CliError::Config(format!(
            "unknown method '{other}' (expected midpoint or rk4)"
        ))),
    }
}

fn spec_from(axis: &str, gamma: &str) -> Result<GateSpec, CliError> {
    let axis = parse_axis(axis).map_err(CliError::Config)?;
    let gamma = parse_angle(gamma).map_err(CliError::Config)?;
    Ok(GateSpec::new(axis, gamma)?)
}

fn build_scenario(command: Command) -> Result<(Scenario, bool), CliError> {
    let (mode, common) = match command {
        Command::Simulate {
            curve,
            target,
            two_qubit,
            trajectory,
            schedule,
            common,
        } => {
            let (axis, gamma) = parse_target(&target).map_err(CliError::Config)?;
            let target = GateSpec::new(axis, gamma)?;
            (
                Mode::Simulate {
                    curve_file: curve,
                    target,
                    two_qubit,
                    trajectory,
                    schedule_csv: schedule,
                },
                common,
            )
        }
        Command::Plan {
            axis,
            gamma,
            theta_mid,
            cap,
            common,
        } => {
            let spec = spec_from(&axis, &gamma)?;
            let theta_mid = theta_mid
                .iter()
                .map(|t| parse_angle(t).map_err(CliError::Config))
                .collect::<Result<Vec<f64>, CliError>>()?;
            let cap = parse_angle(&cap).map_err(CliError::Config)?;
            (
                Mode::Plan {
                    spec,
                    theta_mid,
                    cap,
                },
                common,
            )
        }
        Command::Sweep {
            axis,
            gamma,
            theta_mid,
            amplitudes,
            detunings,
            warps,
            seed,
            common,
        } => {
            let spec = spec_from(&axis, &gamma)?;
            let theta_mid = parse_angle(&theta_mid).map_err(CliError::Config)?;
            (
                Mode::Sweep {
                    spec,
                    theta_mid,
                    amplitudes,
                    detunings,
                    n_warps: warps,
                    seed,
                },
                common,
            )
        }
        Command::IonCheck {
            eta,
            omega,
            ratios,
            n_max,
            area,
            common,
        } => {
            let eta = parse_angle(&eta).map_err(CliError::Config)?;
            let omega = parse_angle(&omega).map_err(CliError::Config)?;
            let area = parse_angle(&area).map_err(CliError::Config)?;
            (
                Mode::IonCheck {
                    eta,
                    omega,
                    ratios,
                    n_max,
                    area,
                },
                common,
            )
        }
    };
    let scenario = Scenario {
        mode,
        n_steps: common.n_steps,
        method: parse_method(&common.method)?,
        out_dir: common.out.clone(),
    };
    Ok((scenario, common.verbose))
}

fn main() {
    let cli = Cli::parse();
    let outcome = build_scenario(cli.command).and_then(|(scenario, verbose)| {
        let written = run(&scenario)?;
        Ok((written, verbose))
    });
    match outcome {
        Ok((written, verbose)) => {
            if verbose {
                for path in written {
                    println!("{}", path.display());
                }
            }
        }
        Err(err) => {
            eprintln!("{}", err.to_json());
            std::process::exit(err.exit_code());
        }
    }
}
