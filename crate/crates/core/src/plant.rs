//! Plant emulator: replays a schedule's battery setpoints against an
//! electrical battery model at sub-step resolution.
//!
//! The battery is a zeroth-order Thevenin circuit — open-circuit voltage
//! linear in the hidden true state plus a series resistance — which is the
//! minimal model that exhibits CC-CV charge tapering: once the terminal
//! voltage hits the charge ceiling the current falls back to
//! `(ocv - v_max) / r` and shrinks as the battery fills. A symmetric floor
//! caps discharge at `v_min`. The grid absorbs whatever slack the battery
//! leaves in the power balance, and wattmeter-style SoC/SoE estimators
//! integrate the measured current and voltage alongside.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dispatch::Schedule;
use crate::scenario::{BatteryParams, Scenario, ValidationError};

/// Zeroth-order Thevenin battery with CC-CV limits.
///
/// Sign convention: charge current/power negative, discharge positive.
/// `true_state` is the hidden ground-truth energy fraction the emulator
/// integrates; estimators never see it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ElectricalBatteryModel {
    pub ocv_at_empty_v: f64,
    pub ocv_at_full_v: f64,
    pub r_internal_ohm: f64,
    /// CV charge ceiling.
    pub v_max_v: f64,
    /// Discharge voltage floor.
    pub v_min_v: f64,
    /// Maximum charge current (A, <= 0; may be -inf).
    pub i_charge_max_a: f64,
    /// Maximum discharge current (A, >= 0; may be +inf).
    pub i_discharge_max_a: f64,
    /// Hidden ground-truth state fraction at the start of the horizon.
    pub true_state: f64,
}

impl ElectricalBatteryModel {
    /// Plausible defaults for a 6 V VRLA monobloc; configurable, not
    /// manufacturer data.
    pub fn default_vrla() -> Self {
        Self {
            ocv_at_empty_v: 5.91,
            ocv_at_full_v: 6.45,
            r_internal_ohm: 0.05,
            v_max_v: 7.35,
            v_min_v: 5.25,
            i_charge_max_a: -30.0,
            i_discharge_max_a: 30.0,
            true_state: 0.5,
        }
    }

    /// The VRLA cell scaled to an `n_series` x `n_parallel` bank: voltages
    /// scale with the series count, currents with the parallel count.
    pub fn vrla_bank(n_series: u32, n_parallel: u32) -> Self {
        let cell = Self::default_vrla();
        let s = n_series.max(1) as f64;
        let p = n_parallel.max(1) as f64;
        Self {
            ocv_at_empty_v: cell.ocv_at_empty_v * s,
            ocv_at_full_v: cell.ocv_at_full_v * s,
            r_internal_ohm: cell.r_internal_ohm * s / p,
            v_max_v: cell.v_max_v * s,
            v_min_v: cell.v_min_v * s,
            i_charge_max_a: cell.i_charge_max_a * p,
            i_discharge_max_a: cell.i_discharge_max_a * p,
            true_state: cell.true_state,
        }
    }

    /// A plant whose voltage limits never engage: vanishing series
    /// resistance, unreachable CV ceiling, unlimited current. Combined with
    /// unit efficiencies this reproduces the planned trajectory exactly.
    pub fn ideal() -> Self {
        Self {
            ocv_at_empty_v: 5.91,
            ocv_at_full_v: 6.45,
            r_internal_ohm: 1e-9,
            v_max_v: 1e9,
            v_min_v: 0.0,
            i_charge_max_a: f64::NEG_INFINITY,
            i_discharge_max_a: f64::INFINITY,
            true_state: 0.5,
        }
    }

    pub fn with_true_state(mut self, state: f64) -> Self {
        self.true_state = state;
        self
    }

    pub fn validate(&self) -> Result<(), ValidationError> {
        for (name, v) in [
            ("plant.ocv_at_empty_v", self.ocv_at_empty_v),
            ("plant.ocv_at_full_v", self.ocv_at_full_v),
            ("plant.r_internal_ohm", self.r_internal_ohm),
            ("plant.v_max_v", self.v_max_v),
            ("plant.v_min_v", self.v_min_v),
        ] {
            if !v.is_finite() {
                return Err(ValidationError::new(name, "must be finite"));
            }
        }
        if self.ocv_at_empty_v >= self.ocv_at_full_v {
            return Err(ValidationError::new(
                "plant.ocv_at_empty_v",
                "must be below ocv_at_full_v",
            ));
        }
        if self.ocv_at_full_v > self.v_max_v {
            return Err(ValidationError::new(
                "plant.v_max_v",
                "must be at or above ocv_at_full_v",
            ));
        }
        if self.r_internal_ohm <= 0.0 {
            return Err(ValidationError::new("plant.r_internal_ohm", "must be > 0"));
        }
        if self.v_min_v >= self.ocv_at_empty_v {
            return Err(ValidationError::new(
                "plant.v_min_v",
                "must be below ocv_at_empty_v",
            ));
        }
        if self.i_charge_max_a.is_nan() || self.i_charge_max_a > 0.0 {
            return Err(ValidationError::new("plant.i_charge_max_a", "must be <= 0"));
        }
        if self.i_discharge_max_a.is_nan() || self.i_discharge_max_a < 0.0 {
            return Err(ValidationError::new("plant.i_discharge_max_a", "must be >= 0"));
        }
        if !(0.0..=1.0).contains(&self.true_state) {
            return Err(ValidationError::new("plant.true_state", "must lie in [0, 1]"));
        }
        Ok(())
    }

    /// Open-circuit voltage at a state fraction.
    pub fn ocv_at(&self, state: f64) -> f64 {
        let s = state.clamp(0.0, 1.0);
        self.ocv_at_empty_v + (self.ocv_at_full_v - self.ocv_at_empty_v) * s
    }

    /// Current that delivers terminal power `p_w` at open-circuit voltage
    /// `ocv`: the physical root of `r i^2 - ocv i + p = 0`, in the
    /// cancellation-free form `i = 2p / (ocv + sqrt(ocv^2 - 4 r p))`.
    /// Discharge demands beyond the maximum power point cap at `ocv / 2r`.
    fn current_for_power(&self, p_w: f64, ocv: f64) -> f64 {
        if p_w == 0.0 {
            return 0.0;
        }
        let disc = ocv * ocv - 4.0 * self.r_internal_ohm * p_w;
        if disc <= 0.0 {
            return ocv / (2.0 * self.r_internal_ohm);
        }
        2.0 * p_w / (ocv + disc.sqrt())
    }
}

/// One sub-step of measurements and estimator states.
///
/// `time_h` is the elapsed horizon time at the *end* of the sub-step; the
/// recorded current, voltage and powers are constant over the sub-step and
/// the estimator values are taken at its end.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    pub time_h: f64,
    /// Measured battery terminal power (kW, charge negative).
    pub p_batt_kw: f64,
    /// Measured battery current (A, charge negative).
    pub i_batt_a: f64,
    /// Measured battery terminal voltage (V).
    pub v_batt_v: f64,
    /// Coulomb-counting state-of-charge estimate, clamped to [0, 1].
    pub soc_est: f64,
    /// Wattmeter state-of-energy estimate, clamped to [0, 1].
    pub soe_est: f64,
    /// Realized grid exchange (kW, import positive).
    pub p_grid_kw: f64,
    /// Whether the CV ceiling limited the charge current this sub-step.
    pub cv_limited: bool,
    /// Realized bus-side storage power (kW, discharge positive).
    pub p_st_bus_kw: f64,
    /// Unclamped estimator integrals, for diagnostics.
    pub soc_est_raw: f64,
    pub soe_est_raw: f64,
    /// Hidden ground-truth state fraction at the end of the sub-step.
    pub true_state: f64,
    /// Whether the discharge voltage floor or an empty/full battery limited
    /// the current this sub-step.
    pub cutoff_limited: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    GridImportLimit,
    GridExportLimit,
}

/// A contract violation observed during emulation; the grid still absorbs
/// the slack and emulation continues.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ViolationEvent {
    pub time_h: f64,
    pub kind: ViolationKind,
    pub excess_kw: f64,
}

/// Fine-grained plant measurements over the horizon.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmulationTrace {
    pub substeps_per_step: usize,
    pub dt_sub_hours: f64,
    pub points: Vec<TracePoint>,
    pub events: Vec<ViolationEvent>,
}

impl EmulationTrace {
    /// SoE estimate at the boundary after scheduler step `t`.
    pub fn soe_est_at_boundary(&self, t: usize) -> f64 {
        self.points[(t + 1) * self.substeps_per_step - 1].soe_est
    }

    pub fn final_point(&self) -> &TracePoint {
        self.points.last().expect("trace has at least one point")
    }

    /// Total time spent CV-limited (h).
    pub fn cv_limited_hours(&self) -> f64 {
        self.points.iter().filter(|p| p.cv_limited).count() as f64 * self.dt_sub_hours
    }

    /// Realized battery-side charge energy over the horizon (kWh, >= 0).
    pub fn realized_charge_energy_kwh(&self) -> f64 {
        self.points
            .iter()
            .map(|p| if p.p_batt_kw < 0.0 { -p.p_batt_kw * self.dt_sub_hours } else { 0.0 })
            .sum()
    }

    /// Render the trace CSV
    /// (`time_h,p_batt_kw,i_batt_a,v_batt_v,soc_est,soe_est,p_grid_kw,cv_limited`).
    pub fn to_csv(&self) -> String {
        let mut out = String::from("time_h,p_batt_kw,i_batt_a,v_batt_v,soc_est,soe_est,p_grid_kw,cv_limited\n");
        for p in &self.points {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{}\n",
                p.time_h,
                p.p_batt_kw,
                p.i_batt_a,
                p.v_batt_v,
                p.soc_est,
                p.soe_est,
                p.p_grid_kw,
                if p.cv_limited { 1 } else { 0 },
            ));
        }
        out
    }
}

#[derive(Debug, Error)]
pub enum PlantError {
    #[error(transparent)]
    Validation(#[from] ValidationError),
    #[error("schedule has {schedule} steps, scenario {scenario}")]
    StepMismatch { schedule: usize, scenario: usize },
    #[error("substeps_per_step must be >= 1")]
    InvalidSubsteps,
}

/// Coulomb-counting SoC update: charge current weighted by the faradic
/// efficiency, discharge taken at face value, clamped to [0, 1].
pub fn soc_update(
    soc: f64,
    i_charge_a: f64,
    i_discharge_a: f64,
    _v: f64,
    dt_hours: f64,
    battery: &BatteryParams,
) -> f64 {
    debug_assert!(i_charge_a <= 0.0 && i_discharge_a >= 0.0);
    debug_assert!(
        i_charge_a == 0.0 || i_discharge_a == 0.0,
        "at most one of charge/discharge current may be nonzero"
    );
    let next = soc - (i_charge_a * battery.eta_f * dt_hours) / battery.c_nom_ah
        - (i_discharge_a * dt_hours) / battery.c_nom_ah;
    next.clamp(0.0, 1.0)
}

/// Wattmeter SoE update: like `soc_update` but energy-based — currents are
/// weighted by the measured terminal voltage and normalized by the nominal
/// energy in Wh. Clamped to [0, 1].
pub fn soe_update(
    soe: f64,
    i_charge_a: f64,
    i_discharge_a: f64,
    v: f64,
    dt_hours: f64,
    battery: &BatteryParams,
) -> f64 {
    debug_assert!(i_charge_a <= 0.0 && i_discharge_a >= 0.0);
    debug_assert!(
        i_charge_a == 0.0 || i_discharge_a == 0.0,
        "at most one of charge/discharge current may be nonzero"
    );
    let e_nom_wh = battery.e_nom_wh();
    let next = soe - (i_charge_a * v * battery.eta_f * dt_hours) / e_nom_wh
        - (i_discharge_a * v * dt_hours) / e_nom_wh;
    next.clamp(0.0, 1.0)
}

/// Replay a schedule against the plant model.
///
/// Each scheduler step's battery-side power is held constant (zero-order
/// hold) and split into `substeps_per_step` sub-steps. Per sub-step the
/// commanded power becomes a current request, which is clamped by the current
/// limits, by CC-CV voltage limits, and by the physical [0, 1] range of the
/// true state; the realized storage power is folded back through the
/// converter chain and the grid picks up the slack. Contract violations are
/// recorded as events, never errors.
pub fn emulate(
    scenario: &Scenario,
    schedule: &Schedule,
    model: &ElectricalBatteryModel,
    substeps_per_step: usize,
) -> Result<EmulationTrace, PlantError> {
    scenario.validate()?;
    model.validate()?;
    if substeps_per_step < 1 {
        return Err(PlantError::InvalidSubsteps);
    }
    if schedule.n_steps() != scenario.time.n_steps {
        return Err(PlantError::StepMismatch {
            schedule: schedule.n_steps(),
            scenario: scenario.time.n_steps,
        });
    }

    let battery = &scenario.battery;
    let r = model.r_internal_ohm;
    let dt = scenario.time.step_hours / substeps_per_step as f64;
    let e_nom_wh = battery.e_nom_wh();

    let mut true_state = model.true_state;
    let mut soc_est = battery.soe_init;
    let mut soe_est = battery.soe_init;
    let mut soc_raw = battery.soe_init;
    let mut soe_raw = battery.soe_init;

    let n = scenario.time.n_steps;
    let mut trace = EmulationTrace {
        substeps_per_step,
        dt_sub_hours: dt,
        points: Vec::with_capacity(n * substeps_per_step),
        events: Vec::new(),
    };

    for t in 0..n {
        let p_cmd_w = schedule.p_batt_kw[t] * 1000.0;
        for k in 0..substeps_per_step {
            let time_h = scenario.time.step_start_elapsed(t) + (k + 1) as f64 * dt;
            let ocv = model.ocv_at(true_state);

            let mut i = model.current_for_power(p_cmd_w, ocv);
            let mut cutoff_limited = false;
            if i < model.i_charge_max_a {
                i = model.i_charge_max_a;
            }
            if i > model.i_discharge_max_a {
                i = model.i_discharge_max_a;
            }
            let mut v = ocv - i * r;
            let mut cv_limited = false;
            if i < 0.0 && v > model.v_max_v {
                // CV ceiling: hold v_max and accept the reduced charge current.
                i = (ocv - model.v_max_v) / r;
                v = model.v_max_v;
                cv_limited = true;
            } else if i > 0.0 && v < model.v_min_v {
                // Discharge floor.
                i = (ocv - model.v_min_v) / r;
                v = model.v_min_v;
                cutoff_limited = true;
            }

            // Physical limits of the stored energy: taper the current so the
            // true state lands exactly on 0 or 1 instead of overshooting.
            let delta_wh = if i < 0.0 {
                -i * v * battery.eta_f * dt
            } else {
                -i * v * dt
            };
            if i < 0.0 {
                let headroom_wh = (1.0 - true_state) * e_nom_wh;
                if delta_wh > headroom_wh {
                    let g = headroom_wh / (battery.eta_f * dt);
                    i = -2.0 * g / (ocv + (ocv * ocv + 4.0 * r * g).sqrt());
                    v = ocv - i * r;
                    true_state = 1.0;
                    cutoff_limited = true;
                } else {
                    true_state += delta_wh / e_nom_wh;
                }
            } else if i > 0.0 {
                let available_wh = true_state * e_nom_wh;
                if -delta_wh > available_wh {
                    let g = available_wh / dt;
                    i = 2.0 * g / (ocv + (ocv * ocv - 4.0 * r * g).sqrt());
                    v = ocv - i * r;
                    true_state = 0.0;
                    cutoff_limited = true;
                } else {
                    true_state += delta_wh / e_nom_wh;
                }
            }

            let p_batt_kw = i * v / 1000.0;
            // Invert the converter chain to the realized bus-side power.
            let p_st_bus_kw = if p_batt_kw >= 0.0 {
                p_batt_kw * battery.eta_cvs
            } else {
                p_batt_kw / (battery.eta_cvs * battery.eta_e)
            };
            let p_grid_kw = scenario.load.values[t] - scenario.pv.values[t] - p_st_bus_kw;
            if p_grid_kw > scenario.grid.p_buy_max_kw + 1e-9 {
                trace.events.push(ViolationEvent {
                    time_h,
                    kind: ViolationKind::GridImportLimit,
                    excess_kw: p_grid_kw - scenario.grid.p_buy_max_kw,
                });
            } else if p_grid_kw < scenario.grid.p_sell_max_kw - 1e-9 {
                trace.events.push(ViolationEvent {
                    time_h,
                    kind: ViolationKind::GridExportLimit,
                    excess_kw: scenario.grid.p_sell_max_kw - p_grid_kw,
                });
            }

            let i_ch = i.min(0.0);
            let i_dis = i.max(0.0);
            soc_est = soc_update(soc_est, i_ch, i_dis, v, dt, battery);
            soe_est = soe_update(soe_est, i_ch, i_dis, v, dt, battery);
            soc_raw -= (i_ch * battery.eta_f * dt) / battery.c_nom_ah + (i_dis * dt) / battery.c_nom_ah;
            soe_raw -= (i_ch * v * battery.eta_f * dt) / e_nom_wh + (i_dis * v * dt) / e_nom_wh;

            trace.points.push(TracePoint {
                time_h,
                p_batt_kw,
                i_batt_a: i,
                v_batt_v: v,
                soc_est,
                soe_est,
                p_grid_kw,
                cv_limited,
                p_st_bus_kw,
                soc_est_raw: soc_raw,
                soe_est_raw: soe_raw,
                true_state,
                cutoff_limited,
            });
        }
    }
    Ok(trace)
}
