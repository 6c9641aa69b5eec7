//! The day-ahead scheduling LP and the schedule it produces.
//!
//! Per step `t` the LP decides four nonnegative variables — grid purchase
//! `b_t`, grid sale magnitude `s_t`, bus-side storage discharge `d_t` and
//! bus-side storage charge magnitude `c_t` — plus one explicit state-of-energy
//! variable `e_t` for the boundary after step `t`. Signed quantities
//! (`P_g^- = -s_t`, `P_st^ch = -c_t`) are stored negated so the solver sees a
//! plain nonnegative LP; signs are restored on extraction.
//!
//! Constraints: per-step power balance (grid + storage = load − PV), the SoE
//! recursion linking `e_t` to `e_{t-1}` through converter and charging
//! efficiencies, box bounds on every variable, and an optional end-of-horizon
//! SoE floor. The objective prices grid purchase at the time-of-use tariff,
//! credits sales at the flat sale price, and charges the ageing unit cost on
//! storage throughput in both directions, all weighted by Δt.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scenario::{Scenario, ValidationError};
use crate::simplex::{self, LpError, LpProblem, LpSolution, LpStatus, Relation};
use crate::tariff::buy_price;

/// Power-balance residual tolerance on user-facing schedule checks (kW).
pub const BALANCE_TOL_KW: f64 = 1e-6;
/// SoE box tolerance on user-facing schedule checks (fraction).
pub const SOE_TOL: f64 = 1e-9;
/// Complementarity tolerance: no step may simultaneously charge/discharge or
/// buy/sell beyond this (kW).
pub const COMPLEMENTARITY_TOL_KW: f64 = 1e-6;

/// Deterministic variable/row indexing for the day-ahead LP.
///
/// Decision variables come first (4 per step), followed by one explicit SoE
/// variable per step boundary, so the total is `5 * n_steps`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DecisionLayout {
    pub n_steps: usize,
}

/// What a constraint row of the day-ahead LP encodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowKind {
    /// Power balance of a step (grid + storage = load − PV).
    Balance(usize),
    /// SoE recursion linking boundary `t` to boundary `t-1`.
    SoeLink(usize),
}

impl RowKind {
    pub fn class(&self) -> &'static str {
        match self {
            RowKind::Balance(_) => "power balance",
            RowKind::SoeLink(_) => "storage energy recursion",
        }
    }
}

impl DecisionLayout {
    pub fn new(n_steps: usize) -> Self {
        Self { n_steps }
    }

    /// Grid purchase `P_g^+(t) >= 0`.
    pub fn buy(&self, t: usize) -> usize {
        4 * t
    }

    /// Grid sale magnitude `-P_g^-(t) >= 0`.
    pub fn sell(&self, t: usize) -> usize {
        4 * t + 1
    }

    /// Bus-side storage discharge `P_st^dis(t) >= 0`.
    pub fn dis(&self, t: usize) -> usize {
        4 * t + 2
    }

    /// Bus-side storage charge magnitude `-P_st^ch(t) >= 0`.
    pub fn ch(&self, t: usize) -> usize {
        4 * t + 3
    }

    /// SoE at the boundary after step `t`.
    pub fn soe(&self, t: usize) -> usize {
        4 * self.n_steps + t
    }

    pub fn n_decision_vars(&self) -> usize {
        4 * self.n_steps
    }

    pub fn n_vars(&self) -> usize {
        5 * self.n_steps
    }

    /// Row kinds in constraint order: balances first, then SoE links.
    pub fn row_kind(&self, row: usize) -> RowKind {
        if row < self.n_steps {
            RowKind::Balance(row)
        } else {
            RowKind::SoeLink(row - self.n_steps)
        }
    }

    pub fn n_rows(&self) -> usize {
        2 * self.n_steps
    }
}

/// The solved day-ahead plan.
///
/// Signs follow the model convention: `p_g_sell_kw <= 0`, `p_st_ch_kw <= 0`.
/// `soe_plan[t]` is the planned state of energy at the boundary *after* step
/// `t`, integrated from `soe_init` by the SoE recursion. `p_batt_kw` is the
/// battery-side power reconstructed through the converter efficiency chain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    pub p_g_buy_kw: Vec<f64>,
    pub p_g_sell_kw: Vec<f64>,
    pub p_st_dis_kw: Vec<f64>,
    pub p_st_ch_kw: Vec<f64>,
    pub p_batt_kw: Vec<f64>,
    pub soe_plan: Vec<f64>,
    pub planned_cost_eur: f64,
}

impl Schedule {
    pub fn n_steps(&self) -> usize {
        self.p_g_buy_kw.len()
    }

    /// Net grid exchange per step (kW, import positive).
    pub fn p_grid_kw(&self, t: usize) -> f64 {
        self.p_g_buy_kw[t] + self.p_g_sell_kw[t]
    }

    /// Net bus-side storage power per step (kW, discharge positive).
    pub fn p_st_kw(&self, t: usize) -> f64 {
        self.p_st_dis_kw[t] + self.p_st_ch_kw[t]
    }

    /// Scheduled battery-side charge energy over the horizon (kWh, >= 0).
    pub fn planned_charge_energy_kwh(&self, dt_hours: f64) -> f64 {
        self.p_batt_kw
            .iter()
            .map(|&p| if p < 0.0 { -p * dt_hours } else { 0.0 })
            .sum()
    }

    /// Check the schedule invariants against its scenario: power balance,
    /// SoE box, and no simultaneous charge/discharge or buy/sell.
    pub fn validate(&self, scenario: &Scenario) -> Result<(), ScheduleViolation> {
        let n = scenario.time.n_steps;
        if self.n_steps() != n {
            return Err(ScheduleViolation {
                step: 0,
                message: format!("schedule has {} steps, scenario {n}", self.n_steps()),
            });
        }
        let b = &scenario.battery;
        for t in 0..n {
            let residual = self.p_grid_kw(t) + self.p_st_kw(t) + scenario.pv.values[t]
                - scenario.load.values[t];
            if residual.abs() > BALANCE_TOL_KW {
                return Err(ScheduleViolation {
                    step: t,
                    message: format!("power balance residual {residual:.3e} kW"),
                });
            }
            if self.soe_plan[t] < b.soe_min - SOE_TOL || self.soe_plan[t] > b.soe_max + SOE_TOL {
                return Err(ScheduleViolation {
                    step: t,
                    message: format!("soe_plan {} outside [{}, {}]", self.soe_plan[t], b.soe_min, b.soe_max),
                });
            }
            let simultaneous_storage = self.p_st_dis_kw[t].min(-self.p_st_ch_kw[t]);
            if simultaneous_storage > COMPLEMENTARITY_TOL_KW {
                return Err(ScheduleViolation {
                    step: t,
                    message: format!("simultaneous charge/discharge of {simultaneous_storage:.3e} kW"),
                });
            }
            let simultaneous_grid = self.p_g_buy_kw[t].min(-self.p_g_sell_kw[t]);
            if simultaneous_grid > COMPLEMENTARITY_TOL_KW {
                return Err(ScheduleViolation {
                    step: t,
                    message: format!("simultaneous buy/sell of {simultaneous_grid:.3e} kW"),
                });
            }
        }
        Ok(())
    }

    /// Render to the schedule CSV format
    /// (`step,p_g_buy_kw,p_g_sell_kw,p_st_dis_kw,p_st_ch_kw,p_batt_kw,soe_plan`).
    pub fn to_csv(&self) -> String {
        let mut out =
            String::from("step,p_g_buy_kw,p_g_sell_kw,p_st_dis_kw,p_st_ch_kw,p_batt_kw,soe_plan\n");
        for t in 0..self.n_steps() {
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                t,
                self.p_g_buy_kw[t],
                self.p_g_sell_kw[t],
                self.p_st_dis_kw[t],
                self.p_st_ch_kw[t],
                self.p_batt_kw[t],
                self.soe_plan[t],
            ));
        }
        out
    }
}

#[derive(Debug, Clone, Error, PartialEq)]
#[error("schedule invariant violated at step {step}: {message}")]
pub struct ScheduleViolation {
    pub step: usize,
    pub message: String,
}

#[derive(Debug, Error)]
pub enum DispatchError {
    #[error(transparent)]
    Validation(#[from] ValidationError),
    #[error("scheduling problem is infeasible (binding: {})", .classes.join(", "))]
    Infeasible { classes: Vec<String> },
    #[error("solver reported an unbounded objective; the model is box-bounded, so this is a model error")]
    Unbounded,
    #[error("LP solver failed: {0}")]
    Solver(#[from] LpError),
    #[error("solution status {0:?} cannot be extracted into a schedule")]
    NonOptimal(LpStatus),
    #[error(transparent)]
    Schedule(#[from] ScheduleViolation),
}

/// Build the day-ahead LP for a scenario.
///
/// Returns the problem plus the layout that maps its variables and rows back
/// to schedule quantities.
pub fn build_lp(scenario: &Scenario) -> Result<(LpProblem, DecisionLayout), DispatchError> {
    scenario.validate()?;
    let n = scenario.time.n_steps;
    let layout = DecisionLayout::new(n);
    let dt = scenario.time.step_hours;
    let b = &scenario.battery;
    let c_st = scenario.ageing_unit_cost();

    // Bus-side storage power caps through the converter chain.
    let dis_cap = b.p_discharge_max_kw * b.eta_cvs;
    let ch_cap = -b.p_charge_max_kw / (b.eta_cvs * b.eta_e);
    // SoE recursion coefficients: e_t = e_{t-1} - k_dis * d_t + k_ch * c_t.
    let k_dis = dt / (b.eta_cvs * b.e_nom_kwh);
    let k_ch = b.eta_cvs * b.eta_e * dt / b.e_nom_kwh;

    let mut objective = vec![0.0; layout.n_vars()];
    let mut bounds = vec![(0.0, 0.0); layout.n_vars()];
    for t in 0..n {
        // buy_price can only fail out of range; t < n_steps by construction.
        let buy = buy_price(&scenario.tariff, t, &scenario.time).expect("step in range");
        objective[layout.buy(t)] = dt * buy;
        objective[layout.sell(t)] = -dt * scenario.tariff.sell_eur_per_kwh;
        objective[layout.dis(t)] = dt * c_st;
        objective[layout.ch(t)] = dt * c_st;

        bounds[layout.buy(t)] = (0.0, scenario.grid.p_buy_max_kw);
        bounds[layout.sell(t)] = (0.0, -scenario.grid.p_sell_max_kw);
        bounds[layout.dis(t)] = (0.0, dis_cap);
        bounds[layout.ch(t)] = (0.0, ch_cap);
        let soe_floor = if t == n - 1 {
            scenario.terminal_soe_constraint.unwrap_or(b.soe_min).max(b.soe_min)
        } else {
            b.soe_min
        };
        bounds[layout.soe(t)] = (soe_floor, b.soe_max);
    }

    let mut problem = LpProblem::new(objective, bounds);
    // Balance rows: b - s + d - c = load - pv.
    for t in 0..n {
        let mut coeffs = vec![0.0; layout.n_vars()];
        coeffs[layout.buy(t)] = 1.0;
        coeffs[layout.sell(t)] = -1.0;
        coeffs[layout.dis(t)] = 1.0;
        coeffs[layout.ch(t)] = -1.0;
        problem.push_constraint(
            coeffs,
            Relation::Eq,
            scenario.load.values[t] - scenario.pv.values[t],
        );
    }
    // SoE links: e_t + k_dis * d_t - k_ch * c_t - e_{t-1} = 0 (e_{-1} = soe_init).
    for t in 0..n {
        let mut coeffs = vec![0.0; layout.n_vars()];
        coeffs[layout.soe(t)] = 1.0;
        coeffs[layout.dis(t)] = k_dis;
        coeffs[layout.ch(t)] = -k_ch;
        let rhs = if t == 0 {
            b.soe_init
        } else {
            coeffs[layout.soe(t - 1)] = -1.0;
            0.0
        };
        problem.push_constraint(coeffs, Relation::Eq, rhs);
    }
    Ok((problem, layout))
}

/// Evaluate the schedule's cost under the scenario's tariff and ageing
/// parameters (€): Δt · Σ [buy·P_g⁺ + sell·P_g⁻ + c_st·(P_st^dis − P_st^ch)].
pub fn objective_cost(scenario: &Scenario, schedule: &Schedule) -> f64 {
    let dt = scenario.time.step_hours;
    let c_st = scenario.ageing_unit_cost();
    let mut total = 0.0;
    for t in 0..schedule.n_steps() {
        let buy = buy_price(&scenario.tariff, t, &scenario.time).expect("step in range");
        total += dt
            * (buy * schedule.p_g_buy_kw[t]
                + scenario.tariff.sell_eur_per_kwh * schedule.p_g_sell_kw[t]
                + c_st * schedule.p_st_dis_kw[t]
                - c_st * schedule.p_st_ch_kw[t]);
    }
    total
}

/// Map an optimal LP solution back to a schedule: restore signs, reconstruct
/// the battery-side power through the converter chain and integrate the SoE
/// trajectory from `soe_init`.
pub fn extract_schedule(scenario: &Scenario, solution: &LpSolution) -> Result<Schedule, DispatchError> {
    if solution.status != LpStatus::Optimal {
        return Err(DispatchError::NonOptimal(solution.status));
    }
    let n = scenario.time.n_steps;
    let layout = DecisionLayout::new(n);
    let b = &scenario.battery;
    let dt = scenario.time.step_hours;
    let snap = |v: f64| if v.abs() < 1e-12 { 0.0 } else { v };

    let mut schedule = Schedule {
        p_g_buy_kw: Vec::with_capacity(n),
        p_g_sell_kw: Vec::with_capacity(n),
        p_st_dis_kw: Vec::with_capacity(n),
        p_st_ch_kw: Vec::with_capacity(n),
        p_batt_kw: Vec::with_capacity(n),
        soe_plan: Vec::with_capacity(n),
        planned_cost_eur: solution.objective_value,
    };
    let mut soe = b.soe_init;
    for t in 0..n {
        let buy = snap(solution.x[layout.buy(t)]);
        let sell = -snap(solution.x[layout.sell(t)]);
        let dis = snap(solution.x[layout.dis(t)]);
        let ch = -snap(solution.x[layout.ch(t)]);
        schedule.p_g_buy_kw.push(buy);
        schedule.p_g_sell_kw.push(sell);
        schedule.p_st_dis_kw.push(dis);
        schedule.p_st_ch_kw.push(ch);
        schedule.p_batt_kw.push(dis / b.eta_cvs + ch * b.eta_cvs * b.eta_e);
        soe = soe - dis * dt / (b.eta_cvs * b.e_nom_kwh) - ch * b.eta_cvs * b.eta_e * dt / b.e_nom_kwh;
        schedule.soe_plan.push(soe);
    }
    Ok(schedule)
}

/// Solve the full day-ahead scheduling problem for a scenario.
pub fn solve_day_ahead(scenario: &Scenario) -> Result<Schedule, DispatchError> {
    let (problem, layout) = build_lp(scenario)?;
    let solution = simplex::solve(&problem)?;
    match solution.status {
        LpStatus::Optimal => {}
        LpStatus::Infeasible => {
            let mut classes: Vec<String> = solution
                .infeasible_rows
                .iter()
                .map(|&r| layout.row_kind(r).class().to_string())
                .collect();
            classes.dedup();
            if classes.is_empty() {
                classes.push("power balance".to_string());
            }
            return Err(DispatchError::Infeasible { classes });
        }
        LpStatus::Unbounded => {
            // Every variable is box-bounded, so an unbounded ray cannot exist.
            debug_assert!(false, "box-bounded LP reported unbounded");
            return Err(DispatchError::Unbounded);
        }
    }
    let schedule = extract_schedule(scenario, &solution)?;
    schedule.validate(scenario)?;
    Ok(schedule)
}
