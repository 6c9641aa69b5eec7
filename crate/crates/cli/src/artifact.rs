//! On-disk artifact envelopes and the run manifest.
//!
//! Every artifact carries a `schema_version`, a `kind` tag and the SHA-256
//! digest of the canonical scenario JSON it was computed from, so later
//! pipeline stages can refuse mixed-up inputs. Nothing here records
//! timestamps or absolute paths: identical runs produce identical bytes.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use mgems::dispatch::Schedule;
use mgems::plant::{ElectricalBatteryModel, EmulationTrace};
use mgems::scenario::Scenario;
use mgems::SCHEMA_VERSION;

use crate::CliError;

/// SHA-256 hex digest of arbitrary bytes.
pub fn digest_bytes(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Digest of the canonical (serde_json) form of a scenario.
pub fn scenario_digest(scenario: &Scenario) -> String {
    let json = serde_json::to_string(scenario).expect("scenario serializes");
    digest_bytes(json.as_bytes())
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ScheduleArtifact {
    pub schema_version: u32,
    pub kind: String,
    pub scenario_digest: String,
    pub scenario: Scenario,
    pub schedule: Schedule,
}

impl ScheduleArtifact {
    pub const KIND: &'static str = "schedule";

    pub fn new(scenario: Scenario, schedule: Schedule) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            kind: Self::KIND.to_string(),
            scenario_digest: scenario_digest(&scenario),
            scenario,
            schedule,
        }
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let artifact: Self = serde_json::from_str(text)
            .map_err(|e| CliError::input(format!("schedule artifact parse error: {e}")))?;
        check_envelope(artifact.schema_version, &artifact.kind, Self::KIND)?;
        let recomputed = scenario_digest(&artifact.scenario);
        if recomputed != artifact.scenario_digest {
            return Err(CliError::input(format!(
                "schedule artifact scenario digest mismatch: recorded {}, recomputed {recomputed}",
                artifact.scenario_digest
            )));
        }
        Ok(artifact)
    }
}

#[derive(Debug, Serialize, Deserialize)]
pub struct TraceArtifact {
    pub schema_version: u32,
    pub kind: String,
    pub scenario_digest: String,
    pub plant_model: ElectricalBatteryModel,
    pub trace: EmulationTrace,
}

impl TraceArtifact {
    pub const KIND: &'static str = "trace";

    pub fn new(scenario_digest: String, plant_model: ElectricalBatteryModel, trace: EmulationTrace) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            kind: Self::KIND.to_string(),
            scenario_digest,
            plant_model,
            trace,
        }
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let artifact: Self = serde_json::from_str(text)
            .map_err(|e| CliError::input(format!("trace artifact parse error: {e}")))?;
        check_envelope(artifact.schema_version, &artifact.kind, Self::KIND)?;
        Ok(artifact)
    }
}

fn check_envelope(version: u32, kind: &str, expected_kind: &str) -> Result<(), CliError> {
    if version != SCHEMA_VERSION {
        return Err(CliError::input(format!(
            "unsupported schema_version {version}, this build reads version {SCHEMA_VERSION}"
        )));
    }
    if kind != expected_kind {
        return Err(CliError::input(format!(
            "expected a {expected_kind} artifact, found '{kind}'"
        )));
    }
    Ok(())
}

/// What went into a run: input digests recorded before any computation, the
/// resolved parameters, and the tool version. Identical manifests reproduce
/// identical outputs.
#[derive(Debug, Serialize, Deserialize)]
pub struct RunManifest {
    pub schema_version: u32,
    pub tool: String,
    pub tool_version: String,
    pub subcommand: String,
    pub scenario_digest: String,
    /// Input label -> SHA-256 of the raw input bytes.
    pub input_digests: Vec<(String, String)>,
    /// Flag name -> rendered value.
    pub parameters: Vec<(String, String)>,
}

impl RunManifest {
    pub fn new(subcommand: &str, scenario_digest: String) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            tool: "mgems".to_string(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            subcommand: subcommand.to_string(),
            scenario_digest,
            input_digests: Vec::new(),
            parameters: Vec::new(),
        }
    }

    pub fn record_input(&mut self, label: &str, bytes: &[u8]) {
        self.input_digests.push((label.to_string(), digest_bytes(bytes)));
    }

    pub fn record_param(&mut self, name: &str, value: impl ToString) {
        self.parameters.push((name.to_string(), value.to_string()));
    }
}

/// Pretty JSON with a trailing newline (stable across runs).
pub fn to_json_pretty<T: Serialize>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("artifact serializes");
    text.push('\n');
    text
}
