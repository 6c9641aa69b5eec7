//! Subcommand implementations.
//!
//! Every command reads and checks all its inputs before writing anything, so
//! a failing run leaves no partial outputs.

use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use mgems::analysis::{compare, DiscrepancyReport};
use mgems::config::ScenarioConfig;
use mgems::dispatch::{build_lp, solve_day_ahead, Schedule};
use mgems::plant::{emulate, ElectricalBatteryModel, EmulationTrace, ViolationEvent};
use mgems::preset;
use mgems::scenario::Scenario;
use mgems::{load_scenario, synth_profiles, SCHEMA_VERSION};

use crate::artifact::{
    digest_bytes, scenario_digest, to_json_pretty, RunManifest, ScheduleArtifact, TraceArtifact,
};
use crate::{CliError, CompareArgs, EmulateArgs, PlantArgs, ScheduleArgs, SweepArgs};

fn read_input(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path)
        .map_err(|e| CliError::input(format!("cannot read {}: {e}", path.display())))
}

fn write_output(dir: &Path, name: &str, contents: &str) -> Result<PathBuf, CliError> {
    let path = dir.join(name);
    fs::write(&path, contents)
        .map_err(|e| CliError::internal(format!("cannot write {}: {e}", path.display())))?;
    Ok(path)
}

fn ensure_out_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir)
        .map_err(|e| CliError::internal(format!("cannot create {}: {e}", dir.display())))
}

impl PlantArgs {
    /// Resolve the electrical model: ideal plant, or the VRLA bank with any
    /// per-field overrides. The hidden true state defaults to the scenario's
    /// initial SoE.
    pub fn build_model(&self, soe_init: f64) -> ElectricalBatteryModel {
        let mut model = if self.ideal_plant {
            ElectricalBatteryModel::ideal()
        } else {
            ElectricalBatteryModel::vrla_bank(self.n_series, self.n_parallel)
        };
        if let Some(v) = self.ocv_empty {
            model.ocv_at_empty_v = v;
        }
        if let Some(v) = self.ocv_full {
            model.ocv_at_full_v = v;
        }
        if let Some(v) = self.r_internal {
            model.r_internal_ohm = v;
        }
        if let Some(v) = self.v_max {
            model.v_max_v = v;
        }
        if let Some(v) = self.v_min {
            model.v_min_v = v;
        }
        if let Some(v) = self.i_charge_max {
            model.i_charge_max_a = v;
        }
        if let Some(v) = self.i_discharge_max {
            model.i_discharge_max_a = v;
        }
        model.true_state = self.true_state_init.unwrap_or(soe_init);
        model
    }

    pub fn record(&self, manifest: &mut RunManifest) {
        manifest.record_param("ideal_plant", self.ideal_plant);
        manifest.record_param("n_series", self.n_series);
        manifest.record_param("n_parallel", self.n_parallel);
        for (name, v) in [
            ("ocv_empty", self.ocv_empty),
            ("ocv_full", self.ocv_full),
            ("r_internal", self.r_internal),
            ("v_max", self.v_max),
            ("v_min", self.v_min),
            ("i_charge_max", self.i_charge_max),
            ("i_discharge_max", self.i_discharge_max),
            ("true_state_init", self.true_state_init),
        ] {
            if let Some(v) = v {
                manifest.record_param(name, v);
            }
        }
    }
}

pub fn run_schedule(args: &ScheduleArgs) -> Result<(), CliError> {
    let mut input_digests: Vec<(String, Vec<u8>)> = Vec::new();
    let scenario: Scenario = if let Some(preset_name) = &args.preset {
        match preset_name.as_str() {
            "paper-day" => preset::paper_day_scenario(),
            other => {
                return Err(CliError::input(format!(
                    "unknown preset '{other}' (known: paper-day)"
                )))
            }
        }
    } else {
        let config_path = args
            .config
            .as_ref()
            .ok_or_else(|| CliError::input("either --preset or --config is required"))?;
        let (pv_path, load_path) = match (&args.pv, &args.load) {
            (Some(pv), Some(load)) => (pv, load),
            _ => return Err(CliError::input("--config requires --pv and --load")),
        };
        let config_text = read_input(config_path)?;
        let pv_text = read_input(pv_path)?;
        let load_text = read_input(load_path)?;
        input_digests.push(("config".into(), config_text.clone().into_bytes()));
        input_digests.push(("pv".into(), pv_text.clone().into_bytes()));
        input_digests.push(("load".into(), load_text.clone().into_bytes()));
        load_scenario(&config_text, &pv_text, &load_text)?
    };

    let mut manifest = RunManifest::new("schedule", scenario_digest(&scenario));
    for (label, bytes) in &input_digests {
        manifest.record_input(label, bytes);
    }
    if let Some(name) = &args.preset {
        manifest.record_param("preset", name);
    }

    let lp_dump = if args.dump_lp.is_some() {
        let (problem, _) = build_lp(&scenario)?;
        Some(problem.to_debug_text())
    } else {
        None
    };
    let schedule = solve_day_ahead(&scenario)?;
    let planned_cost = schedule.planned_cost_eur;

    ensure_out_dir(&args.out)?;
    let artifact = ScheduleArtifact::new(scenario, schedule);
    write_output(&args.out, "schedule.json", &to_json_pretty(&artifact))?;
    write_output(&args.out, "schedule.csv", &artifact.schedule.to_csv())?;
    write_output(&args.out, "schedule.manifest.json", &to_json_pretty(&manifest))?;
    if let Some(dump_path) = &args.dump_lp {
        fs::write(dump_path, lp_dump.unwrap())
            .map_err(|e| CliError::internal(format!("cannot write {}: {e}", dump_path.display())))?;
    }
    println!("planned cost: {planned_cost:.6} EUR");
    println!("schedule written to {}", args.out.display());
    Ok(())
}

/// Summary written beside the full trace: headline numbers plus every
/// contract violation event.
#[derive(Debug, Serialize)]
struct EmulationSummary {
    schema_version: u32,
    scenario_digest: String,
    substeps_per_step: usize,
    cv_limited_hours: f64,
    realized_charge_energy_kwh: f64,
    soc_est_final: f64,
    soe_est_final: f64,
    violation_count: usize,
    violations: Vec<ViolationEvent>,
}

impl EmulationSummary {
    fn new(digest: String, trace: &EmulationTrace) -> Self {
        let last = trace.final_point();
        Self {
            schema_version: SCHEMA_VERSION,
            scenario_digest: digest,
            substeps_per_step: trace.substeps_per_step,
            cv_limited_hours: trace.cv_limited_hours(),
            realized_charge_energy_kwh: trace.realized_charge_energy_kwh(),
            soc_est_final: last.soc_est,
            soe_est_final: last.soe_est,
            violation_count: trace.events.len(),
            violations: trace.events.clone(),
        }
    }
}

pub fn run_emulate(args: &EmulateArgs) -> Result<(), CliError> {
    let schedule_text = read_input(&args.schedule)?;
    let artifact = ScheduleArtifact::from_json(&schedule_text)?;
    let model = args.plant.build_model(artifact.scenario.battery.soe_init);

    let mut manifest = RunManifest::new("emulate", artifact.scenario_digest.clone());
    manifest.record_input("schedule", schedule_text.as_bytes());
    manifest.record_param("substeps", args.substeps);
    args.plant.record(&mut manifest);

    let trace = emulate(&artifact.scenario, &artifact.schedule, &model, args.substeps)?;
    let summary = EmulationSummary::new(artifact.scenario_digest.clone(), &trace);
    let cv_hours = summary.cv_limited_hours;
    let violations = summary.violation_count;

    ensure_out_dir(&args.out)?;
    let trace_artifact = TraceArtifact::new(artifact.scenario_digest, model, trace);
    write_output(&args.out, "trace.json", &to_json_pretty(&trace_artifact))?;
    write_output(&args.out, "trace.csv", &trace_artifact.trace.to_csv())?;
    write_output(&args.out, "emulation.json", &to_json_pretty(&summary))?;
    write_output(&args.out, "emulate.manifest.json", &to_json_pretty(&manifest))?;
    println!("CV-limited time: {cv_hours:.3} h, contract violations: {violations}");
    println!("trace written to {}", args.out.display());
    Ok(())
}

#[derive(Debug, Serialize)]
struct ReportArtifact {
    schema_version: u32,
    kind: String,
    scenario_digest: String,
    report: DiscrepancyReport,
}

pub fn run_compare(args: &CompareArgs) -> Result<(), CliError> {
    let schedule_text = read_input(&args.schedule)?;
    let trace_text = read_input(&args.trace)?;
    let schedule_artifact = ScheduleArtifact::from_json(&schedule_text)?;
    let trace_artifact = TraceArtifact::from_json(&trace_text)?;
    if schedule_artifact.scenario_digest != trace_artifact.scenario_digest {
        return Err(CliError::input(format!(
            "artifact scenario digests differ: schedule {} vs trace {}",
            schedule_artifact.scenario_digest, trace_artifact.scenario_digest
        )));
    }

    let mut manifest = RunManifest::new("compare", schedule_artifact.scenario_digest.clone());
    manifest.record_input("schedule", schedule_text.as_bytes());
    manifest.record_input("trace", trace_text.as_bytes());

    let scenario = &schedule_artifact.scenario;
    let schedule = &schedule_artifact.schedule;
    let trace = &trace_artifact.trace;
    let report = compare(scenario, schedule, trace)?;

    ensure_out_dir(&args.out)?;
    let report_artifact = ReportArtifact {
        schema_version: SCHEMA_VERSION,
        kind: "report".to_string(),
        scenario_digest: schedule_artifact.scenario_digest.clone(),
        report: report.clone(),
    };
    write_output(&args.out, "report.json", &to_json_pretty(&report_artifact))?;
    write_output(&args.out, "report.txt", &report.to_text_table())?;
    write_output(&args.out, "compare_power.csv", &power_compare_csv(schedule, trace))?;
    write_output(&args.out, "compare_soe.csv", &soe_compare_csv(scenario, schedule, trace))?;
    write_output(&args.out, "compare.manifest.json", &to_json_pretty(&manifest))?;
    print!("{}", report.to_text_table());
    println!("report written to {}", args.out.display());
    Ok(())
}

/// Plot data: planned (zero-order hold) vs realized battery and grid power
/// at trace resolution.
fn power_compare_csv(schedule: &Schedule, trace: &EmulationTrace) -> String {
    let mut out = String::from("time_h,p_batt_plan_kw,p_batt_real_kw,p_grid_plan_kw,p_grid_real_kw\n");
    let sub = trace.substeps_per_step;
    for (idx, p) in trace.points.iter().enumerate() {
        let t = idx / sub;
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            p.time_h,
            schedule.p_batt_kw[t],
            p.p_batt_kw,
            schedule.p_grid_kw(t),
            p.p_grid_kw,
        ));
    }
    out
}

/// Plot data: planned SoE (linear within each step, exact under constant
/// power) against the estimated SoE/SoC, with the configured operating box
/// as constant columns.
fn soe_compare_csv(scenario: &Scenario, schedule: &Schedule, trace: &EmulationTrace) -> String {
    let mut out = String::from("time_h,soe_plan,soe_est,soc_est,soe_min,soe_max,soc_min,soc_max\n");
    let b = &scenario.battery;
    let sub = trace.substeps_per_step;
    for (idx, p) in trace.points.iter().enumerate() {
        let t = idx / sub;
        let frac = (idx % sub + 1) as f64 / sub as f64;
        let prev = if t == 0 { b.soe_init } else { schedule.soe_plan[t - 1] };
        let soe_plan = prev + frac * (schedule.soe_plan[t] - prev);
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            p.time_h, soe_plan, p.soe_est, p.soc_est, b.soe_min, b.soe_max, b.soe_min, b.soe_max,
        ));
    }
    out
}

#[derive(Debug, Clone, Serialize)]
struct SweepRow {
    seed: u64,
    planned_cost_eur: f64,
    realized_cost_eur: f64,
    cost_error_pct: Option<f64>,
    cv_limited_hours: f64,
    soe_deviation_pct: f64,
    violation_count: usize,
}

pub fn run_sweep(args: &SweepArgs) -> Result<(), CliError> {
    let config_text = read_input(&args.config)?;
    let config = ScenarioConfig::from_toml(&config_text)?;
    let mut manifest = RunManifest::new("sweep", digest_bytes(config_text.as_bytes()));
    manifest.record_input("config", config_text.as_bytes());
    manifest.record_param("seeds", args.seeds);
    manifest.record_param("pv_peak_kw", args.pv_peak);
    manifest.record_param("load_base_kw", args.load_base);
    manifest.record_param("substeps", args.substeps);
    args.plant.record(&mut manifest);

    let rows: Result<Vec<SweepRow>, CliError> = (0..args.seeds)
        .into_par_iter()
        .map(|seed| {
            let time = config.time_grid();
            let (pv, load) = synth_profiles(seed, &time, args.pv_peak, args.load_base);
            let scenario = config.clone().into_scenario(pv, load)?;
            let schedule = solve_day_ahead(&scenario)?;
            let model = args.plant.build_model(scenario.battery.soe_init);
            let trace = emulate(&scenario, &schedule, &model, args.substeps)?;
            let report = compare(&scenario, &schedule, &trace)?;
            Ok(SweepRow {
                seed,
                planned_cost_eur: report.planned_cost_eur,
                realized_cost_eur: report.realized_cost_eur,
                cost_error_pct: report.cost_error_pct,
                cv_limited_hours: report.cv_limited_hours,
                soe_deviation_pct: report.soe_deviation_pct,
                violation_count: report.violation_count,
            })
        })
        .collect();
    let mut rows = rows?;
    rows.sort_by_key(|r| r.seed);

    ensure_out_dir(&args.out)?;
    let mut csv = String::from(
        "seed,planned_cost_eur,realized_cost_eur,cost_error_pct,cv_limited_hours,soe_deviation_pct,violation_count\n",
    );
    for r in &rows {
        csv.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.seed,
            r.planned_cost_eur,
            r.realized_cost_eur,
            r.cost_error_pct.map_or(String::from(""), |v| v.to_string()),
            r.cv_limited_hours,
            r.soe_deviation_pct,
            r.violation_count,
        ));
    }
    write_output(&args.out, "sweep_summary.csv", &csv)?;
    write_output(&args.out, "sweep.manifest.json", &to_json_pretty(&manifest))?;
    println!("{} scenarios swept, summary written to {}", rows.len(), args.out.display());
    Ok(())
}
