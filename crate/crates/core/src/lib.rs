//! Day-ahead energy management for a grid-connected PV-battery DC microgrid.
//!
//! The crate covers the full desk-scale pipeline:
//!
//! 1. [`scenario`] / [`config`] — problem instances: time grid, PV/load
//!    profiles, battery, grid and tariff parameters, loaded from a TOML
//!    config plus CSV profiles or synthesized deterministically.
//! 2. [`dispatch`] — the day-ahead scheduling linear program (power balance,
//!    grid/storage bounds, state-of-energy recursion, time-of-use prices and
//!    battery-ageing cost) and the [`dispatch::Schedule`] it produces.
//! 3. [`simplex`] — a self-contained dense two-phase primal simplex solver,
//!    so no external LP dependency is needed.
//! 4. [`plant`] — replays a schedule against an electrical battery model with
//!    CC-CV charge limiting and produces wattmeter-style SoC/SoE estimates.
//! 5. [`analysis`] — realized cost and the planned-vs-realized discrepancy
//!    report.
//!
//! All powers are in kW, energies in kWh, time in hours, prices in €/kWh and
//! state fractions in `[0, 1]`. Battery sign conventions follow the plant:
//! discharge power/current is positive, charge is negative.

pub mod analysis;
pub mod config;
pub mod dispatch;
pub mod plant;
pub mod preset;
pub mod scenario;
pub mod simplex;
pub mod tariff;

pub use analysis::{compare, realized_cost, DiscrepancyReport};
pub use config::{load_scenario, ScenarioConfig};
pub use dispatch::{objective_cost, solve_day_ahead, Schedule};
pub use plant::{emulate, ElectricalBatteryModel, EmulationTrace};
pub use scenario::{net_power, synth_profiles, Scenario};

/// Version tag carried by every config and artifact file this crate reads or
/// writes. Readers reject other versions.
pub const SCHEMA_VERSION: u32 = 1;
