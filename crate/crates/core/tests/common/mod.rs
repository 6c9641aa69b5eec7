//! Shared test oracles and fuzz generators.
//!
//! Everything here is deliberately independent of the solver and model code
//! it checks: the LP oracle enumerates basic solutions by brute force with
//! its own Gaussian elimination and feasibility test, and the dispatch
//! oracle grid-searches battery setpoints with the grid as slack.

#![allow(dead_code)]

use mgems::dispatch::Schedule;
use mgems::scenario::{
    BatteryParams, GridParams, PowerProfile, ProfileKind, Scenario, TimeGrid,
};
use mgems::simplex::{LpProblem, Relation};
use mgems::synth_profiles;
use mgems::tariff::{AgeingParams, HourWindow, TariffSchedule};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

// ---------------------------------------------------------------------------
// Vertex-enumeration LP oracle
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct VertexOracleResult {
    pub feasible: bool,
    pub best_objective: f64,
    pub best_x: Vec<f64>,
}

/// Solve `a x = b` by Gaussian elimination with partial pivoting.
fn solve_square(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&i, &j| a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap())
            .unwrap();
        if a[pivot_row][col].abs() < 1e-9 {
            return None;
        }
        a.swap(col, pivot_row);
        b.swap(col, pivot_row);
        for row in (col + 1)..n {
            let f = a[row][col] / a[col][col];
            if f != 0.0 {
                for k in col..n {
                    a[row][k] -= f * a[col][k];
                }
                b[row] -= f * b[col];
            }
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let mut acc = b[row];
        for k in (row + 1)..n {
            acc -= a[row][k] * x[k];
        }
        x[row] = acc / a[row][row];
    }
    Some(x)
}

fn oracle_feasible(problem: &LpProblem, x: &[f64], tol: f64) -> bool {
    for (xj, &(lo, hi)) in x.iter().zip(&problem.bounds) {
        if *xj < lo - tol || *xj > hi + tol {
            return false;
        }
    }
    for row in &problem.constraints {
        let lhs: f64 = row.coeffs.iter().zip(x).map(|(c, v)| c * v).sum();
        let ok = match row.relation {
            Relation::Le => lhs <= row.rhs + tol,
            Relation::Ge => lhs >= row.rhs - tol,
            Relation::Eq => (lhs - row.rhs).abs() <= tol,
        };
        if !ok {
            return false;
        }
    }
    true
}

/// Enumerate every basic solution (each choice of `n` candidate equalities:
/// constraint rows taken with equality plus active finite bounds), keep the
/// feasible ones, and minimize the objective over them. For bounded feasible
/// problems this is exact.
pub fn vertex_enumeration_oracle(problem: &LpProblem) -> VertexOracleResult {
    let n = problem.n_vars();
    let mut candidates: Vec<(Vec<f64>, f64)> = Vec::new();
    for row in &problem.constraints {
        candidates.push((row.coeffs.clone(), row.rhs));
    }
    for (j, &(lo, hi)) in problem.bounds.iter().enumerate() {
        let mut unit = vec![0.0; n];
        unit[j] = 1.0;
        if lo.is_finite() {
            candidates.push((unit.clone(), lo));
        }
        if hi.is_finite() {
            candidates.push((unit, hi));
        }
    }

    let mut best: Option<(f64, Vec<f64>)> = None;
    let total = candidates.len();
    if total < n {
        return VertexOracleResult {
            feasible: false,
            best_objective: f64::NAN,
            best_x: vec![],
        };
    }
    let mut pick: Vec<usize> = (0..n).collect();
    loop {
        let a: Vec<Vec<f64>> = pick.iter().map(|&i| candidates[i].0.clone()).collect();
        let b: Vec<f64> = pick.iter().map(|&i| candidates[i].1).collect();
        if let Some(x) = solve_square(a, b) {
            if oracle_feasible(problem, &x, 1e-8) {
                let obj: f64 = problem.objective.iter().zip(&x).map(|(c, v)| c * v).sum();
                if best.as_ref().map_or(true, |(o, _)| obj < *o) {
                    best = Some((obj, x));
                }
            }
        }
        // Next combination in lexicographic order.
        let mut i = n;
        loop {
            if i == 0 {
                match best {
                    Some((obj, x)) => {
                        return VertexOracleResult {
                            feasible: true,
                            best_objective: obj,
                            best_x: x,
                        }
                    }
                    None => {
                        return VertexOracleResult {
                            feasible: false,
                            best_objective: f64::NAN,
                            best_x: vec![],
                        }
                    }
                }
            }
            i -= 1;
            if pick[i] != i + total - n {
                pick[i] += 1;
                for k in (i + 1)..n {
                    pick[k] = pick[k - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Random bounded LP with up to `max_vars` variables and `max_rows` rows.
/// All bounds are finite, so unboundedness is impossible and vertex
/// enumeration is exact. `degenerate` injects duplicate rows, zero rows and
/// fixed variables.
pub fn random_lp(rng: &mut ChaCha8Rng, max_vars: usize, max_rows: usize, degenerate: bool) -> LpProblem {
    let n = rng.gen_range(1..=max_vars);
    let m = rng.gen_range(0..=max_rows);
    let mut objective = Vec::with_capacity(n);
    let mut bounds = Vec::with_capacity(n);
    for _ in 0..n {
        objective.push(rng.gen_range(-5..=5) as f64);
        let lo = rng.gen_range(-3..=1) as f64;
        let width = if degenerate && rng.gen_bool(0.15) {
            0.0
        } else {
            rng.gen_range(0..=6) as f64
        };
        bounds.push((lo, lo + width));
    }
    let mut problem = LpProblem::new(objective, bounds);
    for _ in 0..m {
        let coeffs: Vec<f64> = if degenerate && rng.gen_bool(0.1) {
            vec![0.0; n]
        } else {
            (0..n).map(|_| rng.gen_range(-5..=5) as f64).collect()
        };
        let relation = match rng.gen_range(0..3) {
            0 => Relation::Le,
            1 => Relation::Ge,
            _ => Relation::Eq,
        };
        let rhs = rng.gen_range(-8..=8) as f64;
        problem.push_constraint(coeffs, relation, rhs);
        if degenerate && rng.gen_bool(0.25) {
            let last = problem.constraints.last().unwrap().clone();
            problem.constraints.push(last);
        }
    }
    problem
}

// ---------------------------------------------------------------------------
// Brute-force dispatch oracle
// ---------------------------------------------------------------------------

/// Grid-search the bus-side storage power per step over a lattice of
/// `res_kw` multiples (plus the exact caps), dispatch the grid as slack, and
/// return the cheapest feasible cost. Exponential in the horizon; use on
/// 2-3 step scenarios only.
pub fn dispatch_oracle(scenario: &Scenario, res_kw: f64) -> Option<f64> {
    let b = &scenario.battery;
    let dt = scenario.time.step_hours;
    let dis_cap = b.p_discharge_max_kw * b.eta_cvs;
    let ch_cap = -b.p_charge_max_kw / (b.eta_cvs * b.eta_e);
    let c_st = scenario.ageing_unit_cost();

    let mut candidates = vec![0.0];
    let mut p = res_kw;
    while p < dis_cap - 1e-12 {
        candidates.push(p);
        p += res_kw;
    }
    if dis_cap > 0.0 {
        candidates.push(dis_cap);
    }
    p = -res_kw;
    while p > -ch_cap + 1e-12 {
        candidates.push(p);
        p -= res_kw;
    }
    if ch_cap > 0.0 {
        candidates.push(-ch_cap);
    }

    fn recurse(
        scenario: &Scenario,
        candidates: &[f64],
        t: usize,
        soe: f64,
        cost: f64,
        dt: f64,
        c_st: f64,
        best: &mut Option<f64>,
    ) {
        let b = &scenario.battery;
        if t == scenario.time.n_steps {
            if best.map_or(true, |bst| cost < bst) {
                *best = Some(cost);
            }
            return;
        }
        let buy = scenario
            .tariff
            .buy_price_at_hour(scenario.time.step_start_hour(t));
        for &p_st in candidates {
            let d = p_st.max(0.0);
            let c = (-p_st).max(0.0);
            let grid = scenario.load.values[t] - scenario.pv.values[t] - p_st;
            if grid > scenario.grid.p_buy_max_kw + 1e-9 || grid < scenario.grid.p_sell_max_kw - 1e-9 {
                continue;
            }
            let soe_next = soe - d * dt / (b.eta_cvs * b.e_nom_kwh)
                + c * b.eta_cvs * b.eta_e * dt / b.e_nom_kwh;
            if soe_next < b.soe_min - 1e-9 || soe_next > b.soe_max + 1e-9 {
                continue;
            }
            let step_cost = dt
                * (buy * grid.max(0.0)
                    + scenario.tariff.sell_eur_per_kwh * grid.min(0.0)
                    + c_st * (d + c));
            recurse(scenario, candidates, t + 1, soe_next, cost + step_cost, dt, c_st, best);
        }
    }

    let mut best = None;
    recurse(scenario, &candidates, 0, b.soe_init, 0.0, dt, c_st, &mut best);
    best
}

// ---------------------------------------------------------------------------
// Scenario fuzz generators
// ---------------------------------------------------------------------------

/// Random short scenario (2-3 steps) for oracle comparison. The grid is
/// generous enough that the all-idle dispatch is feasible and the oracle's
/// lattice perturbations stay inside the contract.
pub fn random_small_scenario(rng: &mut ChaCha8Rng) -> Scenario {
    let n_steps = rng.gen_range(2..=3);
    let dt = [0.5, 1.0][rng.gen_range(0..2)];
    random_scenario_with(rng, n_steps, dt)
}

/// Random day-long scenario at the default half-hour resolution.
pub fn random_day_scenario(rng: &mut ChaCha8Rng) -> Scenario {
    random_scenario_with(rng, 48, 0.5)
}

fn random_scenario_with(rng: &mut ChaCha8Rng, n_steps: usize, dt: f64) -> Scenario {
    let time = TimeGrid {
        t_start_hour: rng.gen_range(0.0..24.0),
        step_hours: dt,
        n_steps,
        multi_day: false,
    };
    let pv_peak = rng.gen_range(0.0..3.0);
    let load_base = rng.gen_range(0.1..1.5);
    let (pv, load) = synth_profiles(rng.gen(), &time, pv_peak, load_base);

    let soe_min = rng.gen_range(0.0..0.2);
    let soe_max = rng.gen_range(0.8..1.0);
    let battery = BatteryParams {
        e_nom_kwh: rng.gen_range(0.5..5.0),
        soe_min,
        soe_max,
        soe_init: rng.gen_range(soe_min..=soe_max),
        p_charge_max_kw: -rng.gen_range(0.1..2.0),
        p_discharge_max_kw: rng.gen_range(0.1..2.0),
        eta_cvs: rng.gen_range(0.85..=1.0),
        eta_e: rng.gen_range(0.85..=1.0),
        c_nom_ah: rng.gen_range(5.0..100.0),
        eta_f: rng.gen_range(0.9..=1.0),
        nominal_voltage_v: rng.gen_range(6.0..48.0),
    };

    let max_load = load.values.iter().cloned().fold(0.0f64, f64::max);
    let max_pv = pv.values.iter().cloned().fold(0.0f64, f64::max);
    let ch_draw = -battery.p_charge_max_kw / (battery.eta_cvs * battery.eta_e);
    let dis_push = battery.p_discharge_max_kw * battery.eta_cvs;
    let grid = GridParams {
        p_buy_max_kw: max_load + ch_draw + 1.0,
        p_sell_max_kw: -(max_pv + dis_push + 1.0),
    };

    let sell = rng.gen_range(0.01..0.3);
    let buy_offpeak = sell + rng.gen_range(0.05..0.5);
    let buy_onpeak = buy_offpeak + rng.gen_range(0.0..0.5);
    let tariff = TariffSchedule {
        buy_offpeak_eur_per_kwh: buy_offpeak,
        buy_onpeak_eur_per_kwh: buy_onpeak,
        sell_eur_per_kwh: sell,
        offpeak_windows: vec![HourWindow::new(0.0, 8.0)],
    };
    let ageing = AgeingParams {
        c_batt_per_kwh: rng.gen_range(50.0..300.0),
        n_cycles: rng.gen_range(100.0..2000.0),
        dod: rng.gen_range(0.3..=1.0),
        c_st_override: None,
    };

    let scenario = Scenario {
        time,
        pv,
        load,
        battery,
        grid,
        tariff,
        ageing,
        terminal_soe_constraint: None,
    };
    scenario.validate().expect("generator produces valid scenarios");
    scenario
}

/// Max price appearing anywhere in the scenario (for oracle gap bounds).
pub fn max_price(scenario: &Scenario) -> f64 {
    scenario
        .tariff
        .buy_onpeak_eur_per_kwh
        .max(scenario.tariff.buy_offpeak_eur_per_kwh)
        .max(scenario.tariff.sell_eur_per_kwh)
        .max(scenario.ageing_unit_cost())
}

/// Build an all-idle schedule for a scenario: the battery rests and the grid
/// carries the whole net load.
pub fn idle_schedule(scenario: &Scenario) -> Schedule {
    let n = scenario.time.n_steps;
    let mut schedule = Schedule {
        p_g_buy_kw: vec![0.0; n],
        p_g_sell_kw: vec![0.0; n],
        p_st_dis_kw: vec![0.0; n],
        p_st_ch_kw: vec![0.0; n],
        p_batt_kw: vec![0.0; n],
        soe_plan: vec![scenario.battery.soe_init; n],
        planned_cost_eur: 0.0,
    };
    for t in 0..n {
        let net = scenario.load.values[t] - scenario.pv.values[t];
        schedule.p_g_buy_kw[t] = net.max(0.0);
        schedule.p_g_sell_kw[t] = net.min(0.0);
    }
    schedule.planned_cost_eur = mgems::objective_cost(scenario, &schedule);
    schedule
}

/// A flat profile of the given kind.
pub fn flat_profile(kind: ProfileKind, n: usize, value: f64) -> PowerProfile {
    PowerProfile::new(kind, vec![value; n]).unwrap()
}
