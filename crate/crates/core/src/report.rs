//! Result files: plans, costs, traces, dispatch, reliability tables and run manifests.
//!
//! Every CSV has a fixed header given by the `*_COLUMNS` constants, independent of the instance.

use std::fs;
use std::io;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::inner::{InnerTraceRow, Phase};
use crate::model::{
    Carrier, CostBreakdown, EquipmentKind, InvestmentDecision, OperationPlan, PlanningInstance, StorageCapacity, StorageKind,
};
use crate::reliability::ReliabilityIndices;
use crate::robust::OuterTraceRow;

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("{path}: {source}")]
    Io { path: String, source: io::Error },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    TomlWrite(#[from] toml::ser::Error),
    #[error(transparent)]
    TomlRead(#[from] toml::de::Error),
    #[error("plan does not fit the instance: {0}")]
    PlanMismatch(String),
}

pub type Result<T> = std::result::Result<T, ReportError>;

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> ReportError + '_ {
    move |source| ReportError::Io { path: path.display().to_string(), source }
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(io_err(path))
}

fn write_rows<R: Serialize>(path: &Path, columns: &[&str], rows: &[R]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    if rows.is_empty() {
        w.write_record(columns)?;
    }
    for r in rows {
        w.serialize(r)?;
    }
    w.flush().map_err(io_err(path))?;
    Ok(())
}

pub const OUTER_TRACE_COLUMNS: [&str; 6] = ["q", "lower", "upper", "mp_time_s", "sp_time_s", "scenario"];

#[derive(Serialize)]
struct OuterRecord<'a> {
    q: usize,
    lower: f64,
    upper: f64,
    mp_time_s: f64,
    sp_time_s: f64,
    scenario: &'a str,
}

pub fn write_outer_trace(path: &Path, trace: &[OuterTraceRow]) -> Result<()> {
    let rows: Vec<OuterRecord> = trace
        .iter()
        .map(|r| OuterRecord {
            q: r.q,
            lower: r.lower,
            upper: r.upper,
            mp_time_s: r.mp_time.as_secs_f64(),
            sp_time_s: r.sp_time.as_secs_f64(),
            scenario: &r.scenario,
        })
        .collect();
    write_rows(path, &OUTER_TRACE_COLUMNS, &rows)
}

pub const INNER_TRACE_COLUMNS: [&str; 8] = ["q", "phase", "r", "lower", "upper", "mps_time_s", "sps_time_s", "binaries"];

#[derive(Serialize)]
struct InnerRecord {
    q: usize,
    phase: &'static str,
    r: usize,
    lower: f64,
    upper: f64,
    mps_time_s: f64,
    sps_time_s: f64,
    binaries: usize,
}

pub fn write_inner_trace(path: &Path, trace: &[(usize, InnerTraceRow)]) -> Result<()> {
    let rows: Vec<InnerRecord> = trace
        .iter()
        .map(|(q, r)| InnerRecord {
            q: *q,
            phase: match r.phase {
                Phase::Feasibility => "feasibility",
                Phase::Cost => "cost",
            },
            r: r.iteration,
            lower: r.lower,
            upper: r.upper,
            mps_time_s: r.mps_time.as_secs_f64(),
            sps_time_s: r.sps_time.as_secs_f64(),
            binaries: r.binaries,
        })
        .collect();
    write_rows(path, &INNER_TRACE_COLUMNS, &rows)
}

/// Dispatch in long form so the header does not depend on the catalog.
pub const DISPATCH_COLUMNS: [&str; 5] = ["scenario", "hour", "series", "id", "value"];

#[derive(Serialize)]
struct DispatchRecord<'a> {
    scenario: u8,
    hour: usize,
    series: &'static str,
    id: &'a str,
    value: f64,
}

pub fn write_dispatch(path: &Path, instance: &PlanningInstance, plan: &OperationPlan) -> Result<()> {
    let kinds: Vec<String> = instance.storage.iter().map(|s| s.kind.to_string()).collect();
    let mut rows = Vec::new();
    for (sc, op) in plan.scenarios.iter().enumerate() {
        let sc = sc as u8;
        for t in 0..op.hours() {
            let mut push = |series, id, value| rows.push(DispatchRecord { scenario: sc, hour: t, series, id, value });
            push("substation", "grid", op.substation[t]);
            for (n, eq) in instance.equipment.iter().enumerate() {
                push("equipment", &eq.id, op.equipment[n][t]);
            }
            for (k, kind) in kinds.iter().enumerate() {
                push("charge", kind, op.charge[k][t]);
                push("discharge", kind, op.discharge[k][t]);
                push("energy", kind, op.energy[k][t]);
            }
            for d in Carrier::LOADS {
                push("shed", d.short(), op.shed.get(d)[t]);
            }
        }
    }
    write_rows(path, &DISPATCH_COLUMNS, &rows)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlannedUnit {
    pub id: String,
    pub kind: EquipmentKind,
    pub build: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlannedStorage {
    pub kind: StorageKind,
    pub energy: f64,
    pub power: f64,
}

/// Investment decision keyed by equipment id, as written to `plan.toml`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlanFile {
    #[serde(default)]
    pub instance: String,
    #[serde(default)]
    pub equipment: Vec<PlannedUnit>,
    #[serde(default)]
    pub storage: Vec<PlannedStorage>,
}

impl PlanFile {
    pub fn new(instance: &PlanningInstance, decision: &InvestmentDecision) -> Self {
        PlanFile {
            instance: instance.name.clone(),
            equipment: instance
                .equipment
                .iter()
                .zip(&decision.build)
                .map(|(e, &build)| PlannedUnit { id: e.id.clone(), kind: e.kind, build })
                .collect(),
            storage: instance
                .storage
                .iter()
                .zip(&decision.storage)
                .map(|(s, c)| PlannedStorage { kind: s.kind, energy: c.energy, power: c.power })
                .collect(),
        }
    }

    /// Maps the file back onto the instance's catalog order.
    pub fn decision(&self, instance: &PlanningInstance) -> Result<InvestmentDecision> {
        let build = instance
            .equipment
            .iter()
            .map(|e| {
                self.equipment
                    .iter()
                    .find(|u| u.id == e.id)
                    .map(|u| u.build)
                    .ok_or_else(|| ReportError::PlanMismatch(format!("no entry for equipment '{}'", e.id)))
            })
            .collect::<Result<Vec<_>>>()?;
        if let Some(extra) = self.equipment.iter().find(|u| !instance.equipment.iter().any(|e| e.id == u.id)) {
            return Err(ReportError::PlanMismatch(format!("unknown equipment '{}'", extra.id)));
        }
        let storage = instance
            .storage
            .iter()
            .map(|s| {
                self.storage
                    .iter()
                    .find(|p| p.kind == s.kind)
                    .map(|p| StorageCapacity { energy: p.energy, power: p.power })
                    .unwrap_or(StorageCapacity { energy: 0.0, power: 0.0 })
            })
            .collect();
        Ok(InvestmentDecision { build, storage })
    }
}

pub fn write_plan(path: &Path, instance: &PlanningInstance, decision: &InvestmentDecision) -> Result<()> {
    write_text(path, &toml::to_string_pretty(&PlanFile::new(instance, decision))?)
}

pub fn read_plan(path: &Path) -> Result<PlanFile> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    Ok(toml::from_str(&text)?)
}

/// Cost breakdown plus the bounds and status of the run that produced it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CostFile {
    pub mode: String,
    pub status: String,
    pub costs: CostBreakdown,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lower: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub upper: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub iterations: Option<usize>,
}

pub fn write_costs(path: &Path, costs: &CostFile) -> Result<()> {
    write_text(path, &toml::to_string_pretty(costs)?)
}

pub const RELIABILITY_COLUMNS: [&str; 5] = ["carrier", "index", "value", "ci95", "years"];

#[derive(Serialize)]
struct ReliabilityRecord {
    carrier: &'static str,
    index: &'static str,
    value: f64,
    ci95: f64,
    years: usize,
}

pub fn write_reliability(path: &Path, r: &ReliabilityIndices) -> Result<()> {
    let mut rows = Vec::new();
    for d in Carrier::LOADS {
        let c = r.of(d);
        for (index, value, ci95) in [("EENS", c.eens, c.eens_ci), ("LOLE", c.lole, c.lole_ci), ("LOLF", c.lolf, c.lolf_ci)] {
            rows.push(ReliabilityRecord { carrier: d.short(), index, value, ci95, years: r.years });
        }
    }
    write_rows(path, &RELIABILITY_COLUMNS, &rows)
}

pub const SWEEP_COLUMNS: [&str; 12] = [
    "parameter",
    "value",
    "status",
    "total_cost",
    "invest_cost",
    "built",
    "bess_energy",
    "bess_power",
    "bess_ratio",
    "tess_energy",
    "tess_power",
    "error",
];

/// One sweep point. `built` lists the ids of built options separated by `;`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub parameter: String,
    pub value: usize,
    pub status: String,
    pub total_cost: Option<f64>,
    pub invest_cost: Option<f64>,
    pub built: String,
    pub bess_energy: Option<f64>,
    pub bess_power: Option<f64>,
    pub bess_ratio: Option<f64>,
    pub tess_energy: Option<f64>,
    pub tess_power: Option<f64>,
    pub error: String,
}

impl SweepRow {
    pub fn solved(parameter: &str, value: usize, status: &str, instance: &PlanningInstance, decision: &InvestmentDecision, costs: &CostBreakdown) -> Self {
        let cap = |kind| instance.storage_of(kind).map(|k| &decision.storage[k]);
        let bess = cap(StorageKind::Bess);
        let tess = cap(StorageKind::Tess);
        SweepRow {
            parameter: parameter.into(),
            value,
            status: status.into(),
            total_cost: Some(costs.total),
            invest_cost: Some(costs.invest),
            built: built_ids(instance, decision),
            bess_energy: bess.map(|c| c.energy),
            bess_power: bess.map(|c| c.power),
            bess_ratio: bess.and_then(|c| (c.power > 1e-9).then(|| c.energy / c.power)),
            tess_energy: tess.map(|c| c.energy),
            tess_power: tess.map(|c| c.power),
            error: String::new(),
        }
    }

    pub fn failed(parameter: &str, value: usize, error: &str) -> Self {
        SweepRow { parameter: parameter.into(), value, status: "error".into(), error: error.into(), ..Default::default() }
    }
}

pub fn built_ids(instance: &PlanningInstance, decision: &InvestmentDecision) -> String {
    instance
        .equipment
        .iter()
        .zip(&decision.build)
        .filter(|(_, &b)| b)
        .map(|(e, _)| e.id.as_str())
        .collect::<Vec<_>>()
        .join(";")
}

pub fn write_sweep(path: &Path, rows: &[SweepRow]) -> Result<()> {
    write_rows(path, &SWEEP_COLUMNS, rows)
}

pub const COMPARE_COLUMNS: [&str; 14] = [
    "mode",
    "status",
    "total_cost",
    "cost_increment",
    "eens_total",
    "eens_e",
    "eens_h",
    "eens_c",
    "lole_e",
    "lole_h",
    "lole_c",
    "lolf_e",
    "lolf_h",
    "lolf_c",
];

/// One planner in a comparison table; the increment is relative to the first row.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CompareRow {
    pub mode: String,
    pub status: String,
    pub total_cost: Option<f64>,
    pub cost_increment: Option<f64>,
    pub eens_total: Option<f64>,
    pub eens_e: Option<f64>,
    pub eens_h: Option<f64>,
    pub eens_c: Option<f64>,
    pub lole_e: Option<f64>,
    pub lole_h: Option<f64>,
    pub lole_c: Option<f64>,
    pub lolf_e: Option<f64>,
    pub lolf_h: Option<f64>,
    pub lolf_c: Option<f64>,
}

impl CompareRow {
    pub fn new(mode: &str, status: &str, total_cost: f64, r: &ReliabilityIndices) -> Self {
        let [e, h, c] = r.carriers;
        CompareRow {
            mode: mode.into(),
            status: status.into(),
            total_cost: Some(total_cost),
            cost_increment: None,
            eens_total: Some(r.total_eens()),
            eens_e: Some(e.eens),
            eens_h: Some(h.eens),
            eens_c: Some(c.eens),
            lole_e: Some(e.lole),
            lole_h: Some(h.lole),
            lole_c: Some(c.lole),
            lolf_e: Some(e.lolf),
            lolf_h: Some(h.lolf),
            lolf_c: Some(c.lolf),
        }
    }

    pub fn failed(mode: &str, error: &str) -> Self {
        CompareRow { mode: mode.into(), status: format!("error: {error}"), ..Default::default() }
    }
}

/// Fills `cost_increment` against the first row that has a cost.
pub fn fill_increments(rows: &mut [CompareRow]) {
    let base = rows.iter().find_map(|r| r.total_cost);
    for r in rows {
        r.cost_increment = match (r.total_cost, base) {
            (Some(c), Some(b)) => Some(c - b),
            _ => None,
        };
    }
}

pub fn write_compare(path: &Path, rows: &[CompareRow]) -> Result<()> {
    write_rows(path, &COMPARE_COLUMNS, rows)
}

/// Enough to rerun a job exactly: hashes of the inputs, the seed and the tool versions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub command: String,
    pub config_hash: String,
    pub instance_hash: String,
    pub seed: u64,
    pub iesplan_version: String,
    pub solver: String,
    pub arguments: Vec<String>,
}

impl Manifest {
    pub fn new(command: &str, config_text: &str, instance_text: &str, seed: u64, arguments: Vec<String>) -> Self {
        Manifest {
            command: command.into(),
            config_hash: sha256_hex(config_text.as_bytes()),
            instance_hash: sha256_hex(instance_text.as_bytes()),
            seed,
            iesplan_version: env!("CARGO_PKG_VERSION").into(),
            solver: crate::solver::backend_description(),
            arguments,
        }
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

pub fn write_manifest(path: &Path, manifest: &Manifest) -> Result<()> {
    write_text(path, &toml::to_string_pretty(manifest)?)
}
