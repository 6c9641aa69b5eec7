//! Realized cost and planned-vs-realized discrepancy metrics.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dispatch::Schedule;
use crate::plant::EmulationTrace;
use crate::scenario::Scenario;

/// Planned-vs-realized comparison over one horizon.
///
/// `cost_error_pct` is `(realized - planned) / planned * 100`, reported
/// against the planned cost; it is `None` when the planned cost is zero.
/// SoE deviations are in percentage points, taken at schedule boundaries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscrepancyReport {
    pub planned_cost_eur: f64,
    pub realized_cost_eur: f64,
    pub cost_error_pct: Option<f64>,
    pub soe_plan_final: f64,
    pub soe_est_final: f64,
    pub soe_deviation_pct: f64,
    pub max_soe_deviation_pct: f64,
    pub cv_limited_hours: f64,
    pub violation_count: usize,
    pub planned_charge_energy_kwh: f64,
    pub realized_charge_energy_kwh: f64,
}

impl DiscrepancyReport {
    /// Human-readable summary table.
    pub fn to_text_table(&self) -> String {
        let cost_error = match self.cost_error_pct {
            Some(e) => format!("{e:.2} %"),
            None => "undefined (planned cost is zero)".to_string(),
        };
        format!(
            "planned cost              {:>12.4} EUR\n\
             realized cost             {:>12.4} EUR\n\
             cost error                {:>12}\n\
             planned final SoE         {:>12.4}\n\
             estimated final SoE       {:>12.4}\n\
             final SoE deviation       {:>12.2} pp\n\
             max SoE deviation         {:>12.2} pp\n\
             CV-limited time           {:>12.3} h\n\
             planned charge energy     {:>12.6} kWh\n\
             realized charge energy    {:>12.6} kWh\n\
             contract violations       {:>12}\n",
            self.planned_cost_eur,
            self.realized_cost_eur,
            cost_error,
            self.soe_plan_final,
            self.soe_est_final,
            self.soe_deviation_pct,
            self.max_soe_deviation_pct,
            self.cv_limited_hours,
            self.planned_charge_energy_kwh,
            self.realized_charge_energy_kwh,
            self.violation_count,
        )
    }
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum AnalysisError {
    #[error("trace covers {trace_points} sub-steps but the scenario needs {expected}")]
    TraceMismatch { trace_points: usize, expected: usize },
    #[error("schedule has {schedule} steps, scenario {scenario}")]
    ScheduleMismatch { schedule: usize, scenario: usize },
}

/// Percentage cost error against the planned cost; `None` when planned is 0.
pub fn cost_error_pct(planned_eur: f64, realized_eur: f64) -> Option<f64> {
    if planned_eur == 0.0 {
        None
    } else {
        Some((realized_eur - planned_eur) / planned_eur * 100.0)
    }
}

/// Cost realized by the plant (€): tariff applied to the realized grid
/// exchange per sub-step (purchase price when importing, sale price when
/// exporting) plus the ageing unit cost on realized bus-side storage
/// throughput — the wattmeter accounting of the experimental cost.
pub fn realized_cost(scenario: &Scenario, trace: &EmulationTrace) -> f64 {
    let c_st = scenario.ageing_unit_cost();
    let dt = trace.dt_sub_hours;
    let mut total = 0.0;
    for p in &trace.points {
        // Price by the sub-step midpoint: robust against float dust putting
        // an exact window boundary a hair on the wrong side.
        let mid_hour = scenario.time.hour_of_day(p.time_h - 0.5 * dt);
        let grid_cost = if p.p_grid_kw >= 0.0 {
            scenario.tariff.buy_price_at_hour(mid_hour) * p.p_grid_kw
        } else {
            scenario.tariff.sell_eur_per_kwh * p.p_grid_kw
        };
        total += dt * (grid_cost + c_st * p.p_st_bus_kw.abs());
    }
    total
}

/// Build the discrepancy report for a plan and its emulated realization.
pub fn compare(
    scenario: &Scenario,
    schedule: &Schedule,
    trace: &EmulationTrace,
) -> Result<DiscrepancyReport, AnalysisError> {
    let n = scenario.time.n_steps;
    if schedule.n_steps() != n {
        return Err(AnalysisError::ScheduleMismatch {
            schedule: schedule.n_steps(),
            scenario: n,
        });
    }
    let expected = n * trace.substeps_per_step;
    if trace.points.len() != expected {
        return Err(AnalysisError::TraceMismatch {
            trace_points: trace.points.len(),
            expected,
        });
    }

    let planned_cost_eur = schedule.planned_cost_eur;
    let realized_cost_eur = realized_cost(scenario, trace);

    let mut max_dev_pp = 0.0f64;
    for t in 0..n {
        let dev = (schedule.soe_plan[t] - trace.soe_est_at_boundary(t)).abs() * 100.0;
        max_dev_pp = max_dev_pp.max(dev);
    }
    let soe_plan_final = schedule.soe_plan[n - 1];
    let soe_est_final = trace.soe_est_at_boundary(n - 1);

    Ok(DiscrepancyReport {
        planned_cost_eur,
        realized_cost_eur,
        cost_error_pct: cost_error_pct(planned_cost_eur, realized_cost_eur),
        soe_plan_final,
        soe_est_final,
        soe_deviation_pct: (soe_plan_final - soe_est_final).abs() * 100.0,
        max_soe_deviation_pct: max_dev_pp,
        cv_limited_hours: trace.cv_limited_hours(),
        violation_count: trace.events.len(),
        planned_charge_energy_kwh: schedule.planned_charge_energy_kwh(scenario.time.step_hours),
        realized_charge_energy_kwh: trace.realized_charge_energy_kwh(),
    })
}
