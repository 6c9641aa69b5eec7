//! Helpers for driving the installed binary in tests.

#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

pub fn mgems() -> Command {
    Command::new(env!("CARGO_BIN_EXE_mgems"))
}

pub fn run(args: &[&str]) -> Output {
    mgems().args(args).output().expect("binary runs")
}

pub fn assert_exit(output: &Output, code: i32) {
    assert_eq!(
        output.status.code(),
        Some(code),
        "stdout: {}\nstderr: {}",
        String::from_utf8_lossy(&output.stdout),
        String::from_utf8_lossy(&output.stderr)
    );
}

/// Two-step hand-checkable scenario with optimum 0.25 €, as config files.
pub fn write_s1(dir: &Path) -> (PathBuf, PathBuf, PathBuf) {
    let config = dir.join("s1.toml");
    let pv = dir.join("pv.csv");
    let load = dir.join("load.csv");
    std::fs::write(
        &config,
        r#"schema_version = 1

[time]
step_hours = 1.0
n_steps = 2

[battery]
e_nom_kwh = 1.0
soe_min = 0.0
soe_max = 1.0
soe_init = 0.5
p_charge_max_kw = -1.0
p_discharge_max_kw = 1.0
eta_cvs = 1.0
eta_e = 1.0
c_nom_ah = 10.0
eta_f = 1.0
nominal_voltage_v = 100.0

[grid]
p_buy_max_kw = 10.0
p_sell_max_kw = -10.0

[tariff]
buy_offpeak_eur_per_kwh = 0.2
buy_onpeak_eur_per_kwh = 0.9
sell_eur_per_kwh = 0.05
offpeak_windows = [[0.0, 1.0]]

[ageing]
c_batt_per_kwh = 1.0
n_cycles = 5.0
dod = 1.0
c_st_override = 0.1
"#,
    )
    .unwrap();
    std::fs::write(&pv, "step_index,power_kw\n0,0.0\n1,0.0\n").unwrap();
    std::fs::write(&load, "step_index,power_kw\n0,0.0\n1,1.0\n").unwrap();
    (config, pv, load)
}

pub fn read_json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}
