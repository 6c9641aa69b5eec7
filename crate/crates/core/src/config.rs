//! Scenario ingestion: TOML config document plus CSV power profiles.
//!
//! The config schema is versioned through a top-level `schema_version` field
//! and documented in the project README. Profiles are headered CSV with
//! columns `step_index,power_kw`, UTF-8, decimal point, LF line endings.

use serde::Deserialize;
use thiserror::Error;

use crate::scenario::{
    BatteryParams, GridParams, PowerProfile, ProfileKind, Scenario, TimeGrid, ValidationError,
};
use crate::tariff::{AgeingParams, HourWindow, TariffSchedule};
use crate::SCHEMA_VERSION;

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("config parse error: {0}")]
    ConfigParse(#[from] toml::de::Error),
    #[error("{kind} profile parse error at line {line}: {message}")]
    ProfileParse {
        kind: ProfileKind,
        line: usize,
        message: String,
    },
    #[error("{kind} profile has {actual} rows, expected {expected}")]
    LengthMismatch {
        kind: ProfileKind,
        expected: usize,
        actual: usize,
    },
    #[error(transparent)]
    Validation(#[from] ValidationError),
    #[error("unknown tariff preset '{0}' (known: paper-future, paper-actual)")]
    UnknownPreset(String),
    #[error("unsupported schema_version {found}, this build reads version {supported}")]
    SchemaVersion { found: u32, supported: u32 },
}

/// Top-level TOML schema. Tariff and ageing sections are optional and fall
/// back to the paper-future tariff and the calibrated ageing defaults.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub schema_version: u32,
    pub time: TimeConfig,
    pub battery: BatteryConfig,
    pub grid: GridConfig,
    #[serde(default)]
    pub tariff: TariffConfig,
    #[serde(default)]
    pub ageing: AgeingConfig,
    /// Optional end-of-horizon SoE floor, fraction.
    #[serde(default)]
    pub terminal_soe_min: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeConfig {
    #[serde(default)]
    pub t_start_hour: f64,
    pub step_hours: f64,
    pub n_steps: usize,
    #[serde(default)]
    pub multi_day: bool,
}

/// Battery section. Cell-level capacities scale with `n_series * n_parallel`;
/// power limits, efficiencies and the SoE box are given at bank level.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BatteryConfig {
    pub e_nom_kwh: f64,
    pub soe_min: f64,
    pub soe_max: f64,
    pub soe_init: f64,
    pub p_charge_max_kw: f64,
    pub p_discharge_max_kw: f64,
    pub eta_cvs: f64,
    pub eta_e: f64,
    pub c_nom_ah: f64,
    pub eta_f: f64,
    pub nominal_voltage_v: f64,
    #[serde(default = "one")]
    pub n_series: u32,
    #[serde(default = "one")]
    pub n_parallel: u32,
}

fn one() -> u32 {
    1
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub p_buy_max_kw: f64,
    pub p_sell_max_kw: f64,
}

/// Tariff section: a named preset, explicit fields, or a preset with
/// selected fields overridden.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TariffConfig {
    pub preset: Option<String>,
    pub buy_offpeak_eur_per_kwh: Option<f64>,
    pub buy_onpeak_eur_per_kwh: Option<f64>,
    pub sell_eur_per_kwh: Option<f64>,
    /// Hour-of-day pairs, e.g. `[[0.0, 8.0]]`.
    pub offpeak_windows: Option<Vec<[f64; 2]>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AgeingConfig {
    pub c_batt_per_kwh: f64,
    pub n_cycles: f64,
    pub dod: f64,
    #[serde(default)]
    pub c_st_override: Option<f64>,
}

impl Default for AgeingConfig {
    fn default() -> Self {
        let d = AgeingParams::paper_default();
        Self {
            c_batt_per_kwh: d.c_batt_per_kwh,
            n_cycles: d.n_cycles,
            dod: d.dod,
            c_st_override: None,
        }
    }
}

impl ScenarioConfig {
    pub fn from_toml(text: &str) -> Result<Self, ScenarioError> {
        let config: ScenarioConfig = toml::from_str(text)?;
        if config.schema_version != SCHEMA_VERSION {
            return Err(ScenarioError::SchemaVersion {
                found: config.schema_version,
                supported: SCHEMA_VERSION,
            });
        }
        Ok(config)
    }

    pub fn time_grid(&self) -> TimeGrid {
        TimeGrid {
            t_start_hour: self.time.t_start_hour,
            step_hours: self.time.step_hours,
            n_steps: self.time.n_steps,
            multi_day: self.time.multi_day,
        }
    }

    fn battery_params(&self) -> BatteryParams {
        let b = &self.battery;
        let cells = (b.n_series * b.n_parallel) as f64;
        BatteryParams {
            e_nom_kwh: b.e_nom_kwh * cells,
            soe_min: b.soe_min,
            soe_max: b.soe_max,
            soe_init: b.soe_init,
            p_charge_max_kw: b.p_charge_max_kw,
            p_discharge_max_kw: b.p_discharge_max_kw,
            eta_cvs: b.eta_cvs,
            eta_e: b.eta_e,
            c_nom_ah: b.c_nom_ah * b.n_parallel as f64,
            eta_f: b.eta_f,
            nominal_voltage_v: b.nominal_voltage_v * b.n_series as f64,
        }
    }

    fn tariff_schedule(&self) -> Result<TariffSchedule, ScenarioError> {
        let mut tariff = match &self.tariff.preset {
            Some(name) => TariffSchedule::preset(name)
                .ok_or_else(|| ScenarioError::UnknownPreset(name.clone()))?,
            None => TariffSchedule::paper_future(),
        };
        if let Some(v) = self.tariff.buy_offpeak_eur_per_kwh {
            tariff.buy_offpeak_eur_per_kwh = v;
        }
        if let Some(v) = self.tariff.buy_onpeak_eur_per_kwh {
            tariff.buy_onpeak_eur_per_kwh = v;
        }
        if let Some(v) = self.tariff.sell_eur_per_kwh {
            tariff.sell_eur_per_kwh = v;
        }
        if let Some(windows) = &self.tariff.offpeak_windows {
            tariff.offpeak_windows = windows.iter().map(|w| HourWindow::new(w[0], w[1])).collect();
        }
        Ok(tariff)
    }

    /// Assemble and validate a full scenario from this config and two
    /// already-parsed profiles.
    pub fn into_scenario(
        self,
        pv: PowerProfile,
        load: PowerProfile,
    ) -> Result<Scenario, ScenarioError> {
        let tariff = self.tariff_schedule()?;
        let scenario = Scenario {
            time: self.time_grid(),
            pv,
            load,
            battery: self.battery_params(),
            grid: GridParams {
                p_buy_max_kw: self.grid.p_buy_max_kw,
                p_sell_max_kw: self.grid.p_sell_max_kw,
            },
            tariff,
            ageing: AgeingParams {
                c_batt_per_kwh: self.ageing.c_batt_per_kwh,
                n_cycles: self.ageing.n_cycles,
                dod: self.ageing.dod,
                c_st_override: self.ageing.c_st_override,
            },
            terminal_soe_constraint: self.terminal_soe_min,
        };
        scenario.validate()?;
        Ok(scenario)
    }
}

#[derive(Debug, Deserialize)]
struct ProfileRow {
    step_index: usize,
    power_kw: f64,
}

/// Parse a headered `step_index,power_kw` CSV. Rows must be dense and in
/// order; the row count must match `expected_steps`.
pub fn parse_profile_csv(
    text: &str,
    kind: ProfileKind,
    expected_steps: usize,
) -> Result<PowerProfile, ScenarioError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(text.as_bytes());
    let mut values = Vec::with_capacity(expected_steps);
    for (i, row) in reader.deserialize::<ProfileRow>().enumerate() {
        let row = row.map_err(|e| ScenarioError::ProfileParse {
            kind,
            line: i + 2,
            message: e.to_string(),
        })?;
        if row.step_index != i {
            return Err(ScenarioError::ProfileParse {
                kind,
                line: i + 2,
                message: format!("step_index {} out of order (expected {})", row.step_index, i),
            });
        }
        values.push(row.power_kw);
    }
    if values.len() != expected_steps {
        return Err(ScenarioError::LengthMismatch {
            kind,
            expected: expected_steps,
            actual: values.len(),
        });
    }
    Ok(PowerProfile::new(kind, values)?)
}

/// Render a profile back to the `step_index,power_kw` CSV format.
pub fn profile_to_csv(profile: &PowerProfile) -> String {
    let mut out = String::from("step_index,power_kw\n");
    for (i, v) in profile.values.iter().enumerate() {
        out.push_str(&format!("{i},{v}\n"));
    }
    out
}

/// Load and validate a scenario from a TOML config document and two profile
/// CSV documents. All inputs are text; file IO is the caller's business.
pub fn load_scenario(
    config_text: &str,
    pv_csv: &str,
    load_csv: &str,
) -> Result<Scenario, ScenarioError> {
    let config = ScenarioConfig::from_toml(config_text)?;
    let n_steps = config.time.n_steps;
    let pv = parse_profile_csv(pv_csv, ProfileKind::Pv, n_steps)?;
    let load = parse_profile_csv(load_csv, ProfileKind::Load, n_steps)?;
    config.into_scenario(pv, load)
}
