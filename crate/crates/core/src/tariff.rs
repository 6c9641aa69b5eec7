//! Time-of-use purchase/sale tariffs and the battery-ageing unit cost.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scenario::{TimeGrid, ValidationError};

/// Half-open hour-of-day interval `[start, end)`, hours in `[0, 24]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HourWindow {
    pub start: f64,
    pub end: f64,
}

impl HourWindow {
    pub fn new(start: f64, end: f64) -> Self {
        Self { start, end }
    }

    pub fn contains(&self, hour_of_day: f64) -> bool {
        hour_of_day >= self.start && hour_of_day < self.end
    }

    pub fn duration_hours(&self) -> f64 {
        self.end - self.start
    }
}

/// Two-level time-of-use purchase tariff plus a flat sale price (€/kWh).
///
/// Off-peak windows may be a single block or scattered through the day.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TariffSchedule {
    pub buy_offpeak_eur_per_kwh: f64,
    pub buy_onpeak_eur_per_kwh: f64,
    pub sell_eur_per_kwh: f64,
    pub offpeak_windows: Vec<HourWindow>,
}

impl TariffSchedule {
    /// The extrapolated future prices the study is run with:
    /// buy 0.68 / 0.9105, sell 0.20 €/kWh, 8 off-peak hours from midnight.
    pub fn paper_future() -> Self {
        Self {
            buy_offpeak_eur_per_kwh: 0.68,
            buy_onpeak_eur_per_kwh: 0.9105,
            sell_eur_per_kwh: 0.20,
            offpeak_windows: vec![HourWindow::new(0.0, 8.0)],
        }
    }

    /// The regulated French residential tariff the future prices scale from:
    /// buy 0.1360 / 0.1821, sell 0.10 €/kWh.
    pub fn paper_actual() -> Self {
        Self {
            buy_offpeak_eur_per_kwh: 0.1360,
            buy_onpeak_eur_per_kwh: 0.1821,
            sell_eur_per_kwh: 0.10,
            offpeak_windows: vec![HourWindow::new(0.0, 8.0)],
        }
    }

    /// Look a preset up by its config name.
    pub fn preset(name: &str) -> Option<Self> {
        match name {
            "paper-future" => Some(Self::paper_future()),
            "paper-actual" => Some(Self::paper_actual()),
            _ => None,
        }
    }

    pub fn validate(&self) -> Result<(), ValidationError> {
        for (name, v) in [
            ("tariff.buy_offpeak_eur_per_kwh", self.buy_offpeak_eur_per_kwh),
            ("tariff.buy_onpeak_eur_per_kwh", self.buy_onpeak_eur_per_kwh),
            ("tariff.sell_eur_per_kwh", self.sell_eur_per_kwh),
        ] {
            if !v.is_finite() || v < 0.0 {
                return Err(ValidationError::new(name, "must be finite and >= 0"));
            }
        }
        // Buying must never be cheaper than selling; this is what makes
        // simultaneous purchase and sale suboptimal in the dispatch LP.
        if self.buy_offpeak_eur_per_kwh < self.sell_eur_per_kwh
            || self.buy_onpeak_eur_per_kwh < self.sell_eur_per_kwh
        {
            return Err(ValidationError::new(
                "tariff",
                "buy prices must be >= sell price",
            ));
        }
        for (i, w) in self.offpeak_windows.iter().enumerate() {
            if !(w.start.is_finite() && w.end.is_finite())
                || w.start < 0.0
                || w.end > 24.0
                || w.start >= w.end
            {
                return Err(ValidationError::new(
                    format!("tariff.offpeak_windows[{i}]"),
                    "must satisfy 0 <= start < end <= 24",
                ));
            }
        }
        Ok(())
    }

    pub fn is_offpeak(&self, hour_of_day: f64) -> bool {
        self.offpeak_windows.iter().any(|w| w.contains(hour_of_day))
    }

    /// Purchase price in effect at a wall-clock hour-of-day.
    pub fn buy_price_at_hour(&self, hour_of_day: f64) -> f64 {
        if self.is_offpeak(hour_of_day) {
            self.buy_offpeak_eur_per_kwh
        } else {
            self.buy_onpeak_eur_per_kwh
        }
    }

    /// Sum of configured off-peak window durations (h).
    pub fn offpeak_hours_per_day(&self) -> f64 {
        self.offpeak_windows.iter().map(HourWindow::duration_hours).sum()
    }
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum TariffError {
    #[error("step {step} out of range (n_steps = {n_steps})")]
    StepOutOfRange { step: usize, n_steps: usize },
}

/// Purchase price for a scheduler step: off-peak iff the step's start time
/// falls inside an off-peak window.
pub fn buy_price(tariff: &TariffSchedule, step: usize, time: &TimeGrid) -> Result<f64, TariffError> {
    if step >= time.n_steps {
        return Err(TariffError::StepOutOfRange {
            step,
            n_steps: time.n_steps,
        });
    }
    Ok(tariff.buy_price_at_hour(time.step_start_hour(step)))
}

/// Battery ageing parameters behind the per-kWh wear cost.
///
/// `n_cycles` and `dod` default to a pair calibrated so that an 85 €/kWh
/// battery yields the 0.235 €/kWh unit cost used throughout the study; the
/// product `n_cycles * dod` is what matters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AgeingParams {
    /// Battery price per kWh of nominal capacity (€/kWh).
    pub c_batt_per_kwh: f64,
    /// Cycle life at the reference depth of discharge.
    pub n_cycles: f64,
    /// Depth of discharge per cycle, fraction in (0, 1].
    pub dod: f64,
    /// When set, used verbatim as the ageing unit cost (€/kWh).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c_st_override: Option<f64>,
}

impl AgeingParams {
    /// 85 €/kWh with the calibrated (226 cycles, 0.8 DoD) pair.
    pub fn paper_default() -> Self {
        Self {
            c_batt_per_kwh: 85.0,
            n_cycles: 226.0,
            dod: 0.8,
            c_st_override: None,
        }
    }

    pub fn validate(&self) -> Result<(), ValidationError> {
        for (name, v) in [
            ("ageing.c_batt_per_kwh", self.c_batt_per_kwh),
            ("ageing.n_cycles", self.n_cycles),
        ] {
            if !v.is_finite() || v <= 0.0 {
                return Err(ValidationError::new(name, "must be finite and > 0"));
            }
        }
        if !self.dod.is_finite() || self.dod <= 0.0 || self.dod > 1.0 {
            return Err(ValidationError::new("ageing.dod", "must lie in (0, 1]"));
        }
        if let Some(c) = self.c_st_override {
            if !c.is_finite() || c <= 0.0 {
                return Err(ValidationError::new(
                    "ageing.c_st_override",
                    "must be finite and > 0",
                ));
            }
        }
        Ok(())
    }
}

/// Total energy the battery can exchange over its life (kWh):
/// `e_nom * n_cycles * dod`.
pub fn lifetime_energy(ageing: &AgeingParams, e_nom_kwh: f64) -> f64 {
    e_nom_kwh * ageing.n_cycles * ageing.dod
}

/// Ageing unit cost c_st (€/kWh of exchanged energy): half the battery price
/// spread over the lifetime energy, the half accounting for charge and
/// discharge both being billed. Battery size cancels.
pub fn ageing_unit_cost(ageing: &AgeingParams, e_nom_kwh: f64) -> f64 {
    if let Some(c) = ageing.c_st_override {
        return c;
    }
    0.5 * (ageing.c_batt_per_kwh * e_nom_kwh) / lifetime_energy(ageing, e_nom_kwh)
}
