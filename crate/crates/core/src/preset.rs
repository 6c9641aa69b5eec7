//! Shipped demo scenario: a desk-scale day shaped like the experimental one —
//! a 6 V / 12 Ah VRLA unit at 35% initial SoE inside a 5%/95% box, a
//! household-style load with morning and evening peaks, a modest PV bump, and
//! an off-peak charging plan aggressive enough to run into the plant's CC-CV
//! ceiling when replayed.

use crate::plant::ElectricalBatteryModel;
use crate::scenario::{
    BatteryParams, GridParams, PowerProfile, ProfileKind, Scenario, TimeGrid,
};
use crate::tariff::{AgeingParams, TariffSchedule};

/// Default sub-step count for emulating the demo day (9 s at Δt = 0.05 h),
/// fine enough to resolve the CV taper.
pub const DEMO_SUBSTEPS: usize = 20;

/// The deterministic demo day. Notable choices:
///
/// * The scheduler's battery charge limit (-0.5 kW) far exceeds what the
///   electrical model can accept (the CV ceiling holds charging near
///   0.15-0.18 kW over the whole state range), and the 3-minute step keeps
///   the planned charge pinned at that limit for whole steps. Replaying the
///   plan therefore leaves a large charge shortfall — the mismatch between
///   the scheduler's power-energy battery view and the plant.
/// * The ageing unit cost is overridden to 0.01 €/kWh and the converter and
///   charging efficiencies are high; at the default 0.235 €/kWh the
///   off-peak/on-peak spread cannot pay for a full charge/discharge round
///   trip and the scheduler would leave the battery idle overnight.
/// * PV stays strictly below load, so every planned charge draws from the
///   off-peak grid.
pub fn paper_day_scenario() -> Scenario {
    let time = TimeGrid {
        t_start_hour: 0.0,
        step_hours: 0.05,
        n_steps: 480,
        multi_day: false,
    };
    let gauss = |h: f64, center: f64, width: f64| (-0.5f64 * ((h - center) / width).powi(2)).exp();
    let mut pv = Vec::with_capacity(time.n_steps);
    let mut load = Vec::with_capacity(time.n_steps);
    for i in 0..time.n_steps {
        let h = (i as f64 + 0.5) * time.step_hours;
        let pv_value = if (6.0..18.0).contains(&h) {
            0.012 * gauss(h, 12.0, 2.6)
        } else {
            0.0
        };
        let load_value = 0.025 * (0.6 + 1.1 * gauss(h, 8.0, 1.4) + 1.7 * gauss(h, 19.5, 2.0));
        pv.push(pv_value);
        load.push(load_value);
    }

    let scenario = Scenario {
        time,
        pv: PowerProfile {
            kind: ProfileKind::Pv,
            values: pv,
        },
        load: PowerProfile {
            kind: ProfileKind::Load,
            values: load,
        },
        battery: BatteryParams {
            e_nom_kwh: 0.072,
            soe_min: 0.05,
            soe_max: 0.95,
            soe_init: 0.35,
            p_charge_max_kw: -0.5,
            p_discharge_max_kw: 0.06,
            eta_cvs: 0.99,
            eta_e: 0.99,
            c_nom_ah: 12.0,
            eta_f: 0.96,
            nominal_voltage_v: 6.0,
        },
        grid: GridParams {
            p_buy_max_kw: 1.0,
            p_sell_max_kw: -1.0,
        },
        tariff: TariffSchedule::paper_future(),
        ageing: AgeingParams {
            c_st_override: Some(0.01),
            ..AgeingParams::paper_default()
        },
        terminal_soe_constraint: None,
    };
    debug_assert!(scenario.validate().is_ok());
    scenario
}

/// The plant model paired with the demo day: the default VRLA cell starting
/// at the scenario's initial SoE.
pub fn paper_day_plant_model() -> ElectricalBatteryModel {
    ElectricalBatteryModel::default_vrla().with_true_state(0.35)
}
