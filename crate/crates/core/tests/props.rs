//! Property tests for the value modules: profiles, tariffs, config loading.

mod common;

use mgems::config::{load_scenario, ScenarioError};
use mgems::net_power;
use mgems::scenario::{PowerProfile, ProfileKind, Scenario, TimeGrid};
use mgems::tariff::{
    ageing_unit_cost, buy_price, lifetime_energy, AgeingParams, HourWindow, TariffSchedule,
};
use proptest::prelude::*;

fn arb_profile_values(n: usize) -> impl Strategy<Value = Vec<f64>> {
    proptest::collection::vec(0.0..10.0f64, n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// net_power is linear: scaling both profiles scales the result.
    #[test]
    fn net_power_is_homogeneous(
        pv in arb_profile_values(8),
        load in arb_profile_values(8),
        a in 0.0..50.0f64,
    ) {
        let mut scenario = base_scenario(8);
        scenario.pv = PowerProfile::new(ProfileKind::Pv, pv.clone()).unwrap();
        scenario.load = PowerProfile::new(ProfileKind::Load, load.clone()).unwrap();
        let base = net_power(&scenario);

        let mut scaled = scenario.clone();
        scaled.pv = PowerProfile::new(ProfileKind::Pv, pv.iter().map(|v| a * v).collect()).unwrap();
        scaled.load = PowerProfile::new(ProfileKind::Load, load.iter().map(|v| a * v).collect()).unwrap();
        let scaled_net = net_power(&scaled);

        for (s, b) in scaled_net.iter().zip(&base) {
            prop_assert!((s - a * b).abs() <= 1e-9 * (1.0 + a * b.abs()));
        }
    }

    /// Serializing a scenario and reloading it yields an identical instance.
    #[test]
    fn scenario_round_trips_through_json(
        pv in arb_profile_values(6),
        load in arb_profile_values(6),
        soe_init in 0.2..0.8f64,
    ) {
        let mut scenario = base_scenario(6);
        scenario.pv = PowerProfile::new(ProfileKind::Pv, pv).unwrap();
        scenario.load = PowerProfile::new(ProfileKind::Load, load).unwrap();
        scenario.battery.soe_init = soe_init;
        scenario.validate().unwrap();

        let json = serde_json::to_string(&scenario).unwrap();
        let back: Scenario = serde_json::from_str(&json).unwrap();
        prop_assert_eq!(scenario, back);
    }

    /// The loader accepts a config exactly when the independent invariant
    /// predicate holds.
    #[test]
    fn config_accept_reject_consistency(
        soe_min in 0.0..1.0f64,
        soe_max in 0.0..1.0f64,
        soe_init in 0.0..1.0f64,
        e_nom in prop_oneof![Just(0.0), 0.01..2.0f64],
        p_charge in -1.0..0.5f64,
    ) {
        let n = 4usize;
        let config = format!(
            "schema_version = 1\n\
             [time]\nstep_hours = 1.0\nn_steps = {n}\n\
             [battery]\ne_nom_kwh = {e_nom}\nsoe_min = {soe_min}\nsoe_max = {soe_max}\n\
             soe_init = {soe_init}\np_charge_max_kw = {p_charge}\np_discharge_max_kw = 0.5\n\
             eta_cvs = 0.95\neta_e = 0.9\nc_nom_ah = 12.0\neta_f = 0.96\nnominal_voltage_v = 6.0\n\
             [grid]\np_buy_max_kw = 5.0\np_sell_max_kw = -5.0\n"
        );
        let csv = {
            let mut s = String::from("step_index,power_kw\n");
            for i in 0..n {
                s.push_str(&format!("{i},0.0\n"));
            }
            s
        };
        let result = load_scenario(&config, &csv, &csv);
        let should_accept = e_nom > 0.0
            && soe_min <= soe_max
            && soe_init >= soe_min
            && soe_init <= soe_max
            && p_charge <= 0.0;
        match (result, should_accept) {
            (Ok(_), true) | (Err(ScenarioError::Validation(_)), false) => {}
            (Ok(_), false) => prop_assert!(false, "accepted an invalid config"),
            (Err(e), true) => prop_assert!(false, "rejected a valid config: {e}"),
            (Err(e), false) => prop_assert!(
                matches!(e, ScenarioError::Validation(_)),
                "wrong error class: {e}"
            ),
        }
    }

    /// Ageing unit cost does not depend on battery size.
    #[test]
    fn ageing_cost_is_degree_zero_in_capacity(
        c_batt in 10.0..500.0f64,
        n_cycles in 50.0..5000.0f64,
        dod in 0.1..1.0f64,
        e_a in 0.01..10.0f64,
        e_b in 0.01..10.0f64,
    ) {
        let ageing = AgeingParams { c_batt_per_kwh: c_batt, n_cycles, dod, c_st_override: None };
        let a = ageing_unit_cost(&ageing, e_a);
        let b = ageing_unit_cost(&ageing, e_b);
        prop_assert!((a - b).abs() <= 1e-9 * a.abs().max(1.0));
    }

    /// Lifetime energy grows with each of its factors.
    #[test]
    fn lifetime_energy_is_monotone(
        n_cycles in 50.0..5000.0f64,
        dod in 0.1..0.99f64,
        e_nom in 0.01..10.0f64,
        bump in 0.001..1.0f64,
    ) {
        let ageing = AgeingParams { c_batt_per_kwh: 85.0, n_cycles, dod, c_st_override: None };
        let base = lifetime_energy(&ageing, e_nom);
        let more_cycles = AgeingParams { n_cycles: n_cycles + bump * 100.0, ..ageing };
        prop_assert!(lifetime_energy(&more_cycles, e_nom) > base);
        let deeper = AgeingParams { dod: (dod + bump * 0.009).min(1.0), ..ageing };
        prop_assert!(lifetime_energy(&deeper, e_nom) >= base);
        prop_assert!(lifetime_energy(&ageing, e_nom + bump) > base);
    }

    /// buy_price is piecewise constant over the two price levels, and the
    /// off-peak step hours sum to the configured window length.
    #[test]
    fn offpeak_step_hours_sum_to_window_length(
        start in 0.0..16.0f64,
        len in 1.0..8.0f64,
    ) {
        // Align the window to the half-hour grid so partial overlaps cannot
        // blur the count.
        let start = (start * 2.0).round() / 2.0;
        let len = (len * 2.0).round() / 2.0;
        let tariff = TariffSchedule {
            offpeak_windows: vec![HourWindow::new(start, start + len)],
            ..TariffSchedule::paper_future()
        };
        let time = TimeGrid::new(0.0, 0.5, 48).unwrap();
        let mut offpeak_hours = 0.0;
        for step in 0..48 {
            let price = buy_price(&tariff, step, &time).unwrap();
            prop_assert!(
                price == tariff.buy_offpeak_eur_per_kwh || price == tariff.buy_onpeak_eur_per_kwh
            );
            if price == tariff.buy_offpeak_eur_per_kwh {
                offpeak_hours += time.step_hours;
            }
        }
        prop_assert!((offpeak_hours - len).abs() < 1e-9);
    }
}

fn base_scenario(n: usize) -> Scenario {
    use mgems::scenario::{BatteryParams, GridParams};
    Scenario {
        time: TimeGrid::new(0.0, 1.0, n).unwrap(),
        pv: common::flat_profile(ProfileKind::Pv, n, 0.0),
        load: common::flat_profile(ProfileKind::Load, n, 0.0),
        battery: BatteryParams::vrla_cell(),
        grid: GridParams {
            p_buy_max_kw: 5.0,
            p_sell_max_kw: -5.0,
        },
        tariff: TariffSchedule::paper_future(),
        ageing: AgeingParams::paper_default(),
        terminal_soe_constraint: None,
    }
}
