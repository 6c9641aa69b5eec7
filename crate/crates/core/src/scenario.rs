//! Problem instances: time discretization, PV/load profiles, battery, grid.
//!
//! A [`Scenario`] is immutable after construction and is validated as a
//! whole by [`Scenario::validate`]; every loader goes through it.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::tariff::{AgeingParams, TariffSchedule};

/// An invariant violation, naming the offending field.
#[derive(Debug, Clone, Error, PartialEq)]
#[error("invalid {field}: {message}")]
pub struct ValidationError {
    pub field: String,
    pub message: String,
}

impl ValidationError {
    pub fn new(field: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            field: field.into(),
            message: message.into(),
        }
    }
}

fn require(cond: bool, field: &str, message: &str) -> Result<(), ValidationError> {
    if cond {
        Ok(())
    } else {
        Err(ValidationError::new(field, message))
    }
}

fn require_finite(value: f64, field: &str) -> Result<(), ValidationError> {
    require(value.is_finite(), field, "must be finite")
}

/// Uniform time discretization of the scheduling horizon.
///
/// `t_start_hour` is the wall-clock hour-of-day at which step 0 begins;
/// tariff lookups use hour-of-day modulo 24.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    /// Wall-clock hour-of-day origin of step 0, in `[0, 24)`.
    pub t_start_hour: f64,
    /// Step length Δt in hours.
    pub step_hours: f64,
    /// Number of steps in the horizon.
    pub n_steps: usize,
    /// Permit horizons longer than 24 h.
    #[serde(default)]
    pub multi_day: bool,
}

impl TimeGrid {
    /// A horizon of `n_steps` steps of `step_hours` each, at most one day.
    pub fn new(t_start_hour: f64, step_hours: f64, n_steps: usize) -> Result<Self, ValidationError> {
        let grid = Self {
            t_start_hour,
            step_hours,
            n_steps,
            multi_day: false,
        };
        grid.validate()?;
        Ok(grid)
    }

    /// The default grid: 48 half-hour steps starting at midnight.
    pub fn default_day() -> Self {
        Self {
            t_start_hour: 0.0,
            step_hours: 0.5,
            n_steps: 48,
            multi_day: false,
        }
    }

    pub fn validate(&self) -> Result<(), ValidationError> {
        require_finite(self.t_start_hour, "time.t_start_hour")?;
        require(
            (0.0..24.0).contains(&self.t_start_hour),
            "time.t_start_hour",
            "must lie in [0, 24)",
        )?;
        require_finite(self.step_hours, "time.step_hours")?;
        require(self.step_hours > 0.0, "time.step_hours", "must be > 0")?;
        require(self.n_steps >= 1, "time.n_steps", "must be >= 1")?;
        if !self.multi_day {
            require(
                self.span_hours() <= 24.0 + 1e-9,
                "time",
                "step_hours * n_steps exceeds 24 h (set multi_day to allow)",
            )?;
        }
        Ok(())
    }

    /// Total horizon length in hours.
    pub fn span_hours(&self) -> f64 {
        self.step_hours * self.n_steps as f64
    }

    /// Hour-of-day (in `[0, 24)`) at which step `i` begins.
    pub fn step_start_hour(&self, i: usize) -> f64 {
        (self.t_start_hour + self.step_hours * i as f64).rem_euclid(24.0)
    }

    /// Elapsed horizon time in hours at which step `i` begins.
    pub fn step_start_elapsed(&self, i: usize) -> f64 {
        self.step_hours * i as f64
    }

    /// Hour-of-day for an elapsed horizon time.
    pub fn hour_of_day(&self, elapsed_hours: f64) -> f64 {
        (self.t_start_hour + elapsed_hours).rem_euclid(24.0)
    }
}

/// What a power profile describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProfileKind {
    Pv,
    Load,
}

impl std::fmt::Display for ProfileKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ProfileKind::Pv => write!(f, "pv"),
            ProfileKind::Load => write!(f, "load"),
        }
    }
}

/// Mean power per step, in kW. Values are nonnegative; PV is production
/// potential, load is demand.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerProfile {
    pub kind: ProfileKind,
    pub values: Vec<f64>,
}

impl PowerProfile {
    pub fn new(kind: ProfileKind, values: Vec<f64>) -> Result<Self, ValidationError> {
        let profile = Self { kind, values };
        profile.validate()?;
        Ok(profile)
    }

    pub fn validate(&self) -> Result<(), ValidationError> {
        for (i, v) in self.values.iter().enumerate() {
            if !v.is_finite() || *v < 0.0 {
                return Err(ValidationError::new(
                    format!("{}.values[{i}]", self.kind),
                    "must be finite and >= 0",
                ));
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Battery and converter parameters.
///
/// Power limits are bus-facing battery capabilities at the battery terminal
/// side (C-rate and converter rating combined): `p_charge_max_kw <= 0`,
/// `p_discharge_max_kw >= 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BatteryParams {
    /// Nominal energy capacity E_nom (kWh).
    pub e_nom_kwh: f64,
    /// State-of-energy floor, fraction.
    pub soe_min: f64,
    /// State-of-energy ceiling, fraction.
    pub soe_max: f64,
    /// State of energy at the start of the horizon, fraction.
    pub soe_init: f64,
    /// Maximum charging power at the battery side (kW, <= 0).
    pub p_charge_max_kw: f64,
    /// Maximum discharging power at the battery side (kW, >= 0).
    pub p_discharge_max_kw: f64,
    /// Converter efficiency of the bidirectional DC/DC stage, in (0, 1].
    pub eta_cvs: f64,
    /// Round-trip energy efficiency, applied at charging, in (0, 1].
    pub eta_e: f64,
    /// Nominal charge capacity C_nom (Ah).
    pub c_nom_ah: f64,
    /// Faradic (charge-acceptance) efficiency, in (0, 1].
    pub eta_f: f64,
    /// Nominal terminal voltage of the bank (V).
    pub nominal_voltage_v: f64,
}

impl BatteryParams {
    /// A single 6 V / 12 Ah VRLA monobloc (0.072 kWh), the desk-scale default.
    pub fn vrla_cell() -> Self {
        Self {
            e_nom_kwh: 0.072,
            soe_min: 0.05,
            soe_max: 0.95,
            soe_init: 0.5,
            p_charge_max_kw: -0.036,
            p_discharge_max_kw: 0.036,
            eta_cvs: 0.95,
            eta_e: 0.9,
            c_nom_ah: 12.0,
            eta_f: 0.96,
            nominal_voltage_v: 6.0,
        }
    }

    pub fn validate(&self) -> Result<(), ValidationError> {
        require_finite(self.e_nom_kwh, "battery.e_nom_kwh")?;
        require(self.e_nom_kwh > 0.0, "battery.e_nom_kwh", "must be > 0")?;
        require_finite(self.c_nom_ah, "battery.c_nom_ah")?;
        require(self.c_nom_ah > 0.0, "battery.c_nom_ah", "must be > 0")?;
        for (name, v) in [
            ("battery.soe_min", self.soe_min),
            ("battery.soe_max", self.soe_max),
            ("battery.soe_init", self.soe_init),
        ] {
            require_finite(v, name)?;
            require((0.0..=1.0).contains(&v), name, "must lie in [0, 1]")?;
        }
        require(
            self.soe_min <= self.soe_max,
            "battery.soe_min",
            "soe_min above soe_max",
        )?;
        require(
            self.soe_init >= self.soe_min,
            "battery.soe_init",
            "soe_init below soe_min",
        )?;
        require(
            self.soe_init <= self.soe_max,
            "battery.soe_init",
            "soe_init above soe_max",
        )?;
        require_finite(self.p_charge_max_kw, "battery.p_charge_max_kw")?;
        require(
            self.p_charge_max_kw <= 0.0,
            "battery.p_charge_max_kw",
            "must be <= 0 (charging power is negative)",
        )?;
        require_finite(self.p_discharge_max_kw, "battery.p_discharge_max_kw")?;
        require(
            self.p_discharge_max_kw >= 0.0,
            "battery.p_discharge_max_kw",
            "must be >= 0",
        )?;
        for (name, v) in [
            ("battery.eta_cvs", self.eta_cvs),
            ("battery.eta_e", self.eta_e),
            ("battery.eta_f", self.eta_f),
        ] {
            require_finite(v, name)?;
            require(v > 0.0 && v <= 1.0, name, "must lie in (0, 1]")?;
        }
        require_finite(self.nominal_voltage_v, "battery.nominal_voltage_v")?;
        require(
            self.nominal_voltage_v > 0.0,
            "battery.nominal_voltage_v",
            "must be > 0",
        )?;
        Ok(())
    }

    /// Nominal energy capacity in Wh, as used by the wattmeter SoE estimator.
    pub fn e_nom_wh(&self) -> f64 {
        self.e_nom_kwh * 1000.0
    }
}

/// Contracted grid exchange limits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridParams {
    /// Contracted import limit (kW, >= 0).
    pub p_buy_max_kw: f64,
    /// Contracted export limit (kW, <= 0).
    pub p_sell_max_kw: f64,
}

impl GridParams {
    pub fn validate(&self) -> Result<(), ValidationError> {
        require_finite(self.p_buy_max_kw, "grid.p_buy_max_kw")?;
        require_finite(self.p_sell_max_kw, "grid.p_sell_max_kw")?;
        require(self.p_buy_max_kw >= 0.0, "grid.p_buy_max_kw", "must be >= 0")?;
        require(
            self.p_sell_max_kw <= 0.0,
            "grid.p_sell_max_kw",
            "must be <= 0 (export power is negative)",
        )?;
        Ok(())
    }
}

/// A full problem instance. Immutable once built; safe to share across
/// concurrent schedulers and emulators.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub time: TimeGrid,
    pub pv: PowerProfile,
    pub load: PowerProfile,
    pub battery: BatteryParams,
    pub grid: GridParams,
    pub tariff: TariffSchedule,
    pub ageing: AgeingParams,
    /// Optional end-of-horizon SoE floor, fraction.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub terminal_soe_constraint: Option<f64>,
}

impl Scenario {
    pub fn validate(&self) -> Result<(), ValidationError> {
        self.time.validate()?;
        self.pv.validate()?;
        self.load.validate()?;
        require(
            self.pv.kind == ProfileKind::Pv,
            "pv.kind",
            "pv profile must have kind 'pv'",
        )?;
        require(
            self.load.kind == ProfileKind::Load,
            "load.kind",
            "load profile must have kind 'load'",
        )?;
        if self.pv.len() != self.time.n_steps {
            return Err(ValidationError::new(
                "pv.values",
                format!("length {} does not match n_steps {}", self.pv.len(), self.time.n_steps),
            ));
        }
        if self.load.len() != self.time.n_steps {
            return Err(ValidationError::new(
                "load.values",
                format!("length {} does not match n_steps {}", self.load.len(), self.time.n_steps),
            ));
        }
        self.battery.validate()?;
        self.grid.validate()?;
        self.tariff.validate()?;
        self.ageing.validate()?;
        if let Some(t) = self.terminal_soe_constraint {
            require_finite(t, "terminal_soe_constraint")?;
            require(
                t >= self.battery.soe_min && t <= self.battery.soe_max,
                "terminal_soe_constraint",
                "must lie within [soe_min, soe_max]",
            )?;
        }
        Ok(())
    }

    /// Battery ageing unit cost in effect for this scenario (€/kWh).
    pub fn ageing_unit_cost(&self) -> f64 {
        crate::tariff::ageing_unit_cost(&self.ageing, self.battery.e_nom_kwh)
    }
}

/// Per-step PV-minus-load power (kW): positive means local surplus.
pub fn net_power(scenario: &Scenario) -> Vec<f64> {
    scenario
        .pv
        .values
        .iter()
        .zip(&scenario.load.values)
        .map(|(pv, load)| pv - load)
        .collect()
}

/// Deterministic synthetic day: a PV bell curve centered on midday (zero
/// outside the 06:00–18:00 daylight window) and a load curve with morning
/// and evening peaks. Identical seeds give identical profiles.
pub fn synth_profiles(
    seed: u64,
    time: &TimeGrid,
    pv_peak_kw: f64,
    load_base_kw: f64,
) -> (PowerProfile, PowerProfile) {
    assert!(pv_peak_kw >= 0.0, "pv_peak_kw must be >= 0");
    assert!(load_base_kw >= 0.0, "load_base_kw must be >= 0");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let gauss = |h: f64, center: f64, width: f64| (-0.5 * ((h - center) / width).powi(2)).exp();

    let mut pv = Vec::with_capacity(time.n_steps);
    let mut load = Vec::with_capacity(time.n_steps);
    for i in 0..time.n_steps {
        // Mid-step hour so symmetric windows stay symmetric.
        let h = time.hour_of_day(time.step_start_elapsed(i) + 0.5 * time.step_hours);
        let pv_jitter: f64 = rng.gen_range(0.85..1.0);
        let load_jitter: f64 = rng.gen_range(0.9..1.1);

        let pv_value = if (6.0..18.0).contains(&h) {
            pv_peak_kw * gauss(h, 12.0, 2.6) * pv_jitter
        } else {
            0.0
        };
        let load_value =
            load_base_kw * load_jitter * (0.6 + 1.1 * gauss(h, 8.0, 1.4) + 1.7 * gauss(h, 19.5, 2.0));
        pv.push(pv_value.max(0.0));
        load.push(load_value.max(0.0));
    }
    (
        PowerProfile {
            kind: ProfileKind::Pv,
            values: pv,
        },
        PowerProfile {
            kind: ProfileKind::Load,
            values: load,
        },
    )
}
