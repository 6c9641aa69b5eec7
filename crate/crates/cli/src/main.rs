//! `mgems` — day-ahead microgrid scheduling, plant emulation and
//! planned-vs-realized discrepancy analysis.

mod artifact;
mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use mgems::analysis::AnalysisError;
use mgems::config::ScenarioError;
use mgems::dispatch::DispatchError;
use mgems::plant::PlantError;
use mgems::simplex::LpError;

/// Exit codes: 0 success, 1 input error, 2 infeasible scheduling problem,
/// 3 internal/solver error.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Infeasible(String),
    #[error("{0}")]
    Internal(String),
}

impl CliError {
    pub fn input(msg: impl Into<String>) -> Self {
        CliError::Input(msg.into())
    }

    pub fn internal(msg: impl Into<String>) -> Self {
        CliError::Internal(msg.into())
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => 1,
            CliError::Infeasible(_) => 2,
            CliError::Internal(_) => 3,
        }
    }
}

impl From<ScenarioError> for CliError {
    fn from(e: ScenarioError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<DispatchError> for CliError {
    fn from(e: DispatchError) -> Self {
        match e {
            DispatchError::Infeasible { .. } => CliError::Infeasible(e.to_string()),
            DispatchError::Validation(_) => CliError::Input(e.to_string()),
            DispatchError::Unbounded
            | DispatchError::Solver(LpError::IterationLimit { .. })
            | DispatchError::Solver(_)
            | DispatchError::NonOptimal(_)
            | DispatchError::Schedule(_) => CliError::Internal(e.to_string()),
        }
    }
}

impl From<PlantError> for CliError {
    fn from(e: PlantError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<AnalysisError> for CliError {
    fn from(e: AnalysisError) -> Self {
        CliError::Input(e.to_string())
    }
}

#[derive(Parser)]
#[command(
    name = "mgems",
    version,
    about = "Day-ahead scheduling, plant emulation and discrepancy analysis for a PV-battery DC microgrid"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the day-ahead schedule for a scenario
    Schedule(ScheduleArgs),
    /// Replay a schedule against the electrical plant model
    Emulate(EmulateArgs),
    /// Compare a schedule with an emulation trace
    Compare(CompareArgs),
    /// Run the schedule/emulate/compare pipeline over many synthetic days
    Sweep(SweepArgs),
}

#[derive(Args)]
pub struct ScheduleArgs {
    /// Scenario config (TOML)
    #[arg(long, conflicts_with = "preset")]
    pub config: Option<PathBuf>,
    /// PV profile CSV (step_index,power_kw)
    #[arg(long)]
    pub pv: Option<PathBuf>,
    /// Load profile CSV (step_index,power_kw)
    #[arg(long)]
    pub load: Option<PathBuf>,
    /// Built-in scenario preset (known: paper-day)
    #[arg(long)]
    pub preset: Option<String>,
    /// Output directory
    #[arg(long)]
    pub out: PathBuf,
    /// Also write the LP in plain text for external cross-checking
    #[arg(long)]
    pub dump_lp: Option<PathBuf>,
}

#[derive(Args)]
pub struct EmulateArgs {
    /// schedule.json produced by `mgems schedule`
    #[arg(long)]
    pub schedule: PathBuf,
    /// Output directory
    #[arg(long)]
    pub out: PathBuf,
    /// Sub-steps per scheduler step
    #[arg(long, default_value_t = 60)]
    pub substeps: usize,
    #[command(flatten)]
    pub plant: PlantArgs,
}

/// Electrical plant selection: the VRLA bank by default, each field
/// overridable, or the ideal lossless plant.
#[derive(Args)]
pub struct PlantArgs {
    /// Lossless plant whose voltage and current limits never engage
    #[arg(long)]
    pub ideal_plant: bool,
    /// Cells in series (scales voltages)
    #[arg(long, default_value_t = 1)]
    pub n_series: u32,
    /// Strings in parallel (scales currents)
    #[arg(long, default_value_t = 1)]
    pub n_parallel: u32,
    /// Open-circuit voltage at empty (V)
    #[arg(long)]
    pub ocv_empty: Option<f64>,
    /// Open-circuit voltage at full (V)
    #[arg(long)]
    pub ocv_full: Option<f64>,
    /// Series resistance (ohm)
    #[arg(long)]
    pub r_internal: Option<f64>,
    /// CV charge voltage ceiling (V)
    #[arg(long)]
    pub v_max: Option<f64>,
    /// Discharge voltage floor (V)
    #[arg(long)]
    pub v_min: Option<f64>,
    /// Max charge current (A, <= 0)
    #[arg(long)]
    pub i_charge_max: Option<f64>,
    /// Max discharge current (A, >= 0)
    #[arg(long)]
    pub i_discharge_max: Option<f64>,
    /// Initial hidden true state (defaults to the scenario's soe_init)
    #[arg(long)]
    pub true_state_init: Option<f64>,
}

#[derive(Args)]
pub struct CompareArgs {
    /// schedule.json produced by `mgems schedule`
    #[arg(long)]
    pub schedule: PathBuf,
    /// trace.json produced by `mgems emulate`
    #[arg(long)]
    pub trace: PathBuf,
    /// Output directory
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args)]
pub struct SweepArgs {
    /// Scenario config (TOML); profiles are synthesized per seed
    #[arg(long)]
    pub config: PathBuf,
    /// Number of seeds to run (0..seeds)
    #[arg(long)]
    pub seeds: u64,
    /// Synthetic PV peak power (kW)
    #[arg(long)]
    pub pv_peak: f64,
    /// Synthetic load base power (kW)
    #[arg(long)]
    pub load_base: f64,
    /// Output directory
    #[arg(long)]
    pub out: PathBuf,
    /// Sub-steps per scheduler step
    #[arg(long, default_value_t = 60)]
    pub substeps: usize,
    #[command(flatten)]
    pub plant: PlantArgs,
}

fn run(cli: Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Schedule(args) => commands::run_schedule(args),
        Command::Emulate(args) => commands::run_emulate(args),
        Command::Compare(args) => commands::run_compare(args),
        Command::Sweep(args) => commands::run_sweep(args),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
