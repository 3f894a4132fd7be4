use super::CliError;
use crate::blocking::Assembly;
use crate::geom2d::Point2;
use crate::planner::{AssemblySequence, Operation, PlanReport};
use crate::blocking::Subassembly;
use serde::{Deserialize, Serialize};
use std::path::Path;

pub const SCHEMA_VERSION: u32 = 1;

/// On-disk assembly: a name and polygonal parts with unique ids.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AssemblyFile {
    pub name: String,
    pub parts: Vec<PartFile>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PartFile {
    pub id: String,
    pub vertices: Vec<[f64; 2]>,
}

/// Loads, validates, and normalizes an assembly (bounding-box center to the
/// origin, larger dimension scaled to 10 world units).
pub fn load_assembly(path: &Path) -> Result<Assembly, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    let file: AssemblyFile = serde_json::from_str(&text)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    let mut ids = std::collections::HashSet::new();
    for p in &file.parts {
        if !ids.insert(p.id.clone()) {
            return Err(CliError::Input(format!(
                "{}: duplicate part id '{}'",
                path.display(),
                p.id
            )));
        }
    }
    let parts = file
        .parts
        .into_iter()
        .map(|p| {
            (
                p.id,
                p.vertices
                    .into_iter()
                    .map(|[x, y]| Point2::new(x, y))
                    .collect::<Vec<_>>(),
            )
        })
        .collect();
    let assembly = Assembly::from_raw(file.name, parts)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    Ok(assembly.normalized())
}

/// Sequence JSON written by `plan` and consumed by `render`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SequenceFile {
    pub schema_version: u32,
    pub assembly: String,
    pub scorer: String,
    pub seed: u64,
    pub steps: Vec<SequenceStep>,
    #[serde(rename = "R")]
    pub r: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SequenceStep {
    pub s1_mask: u64,
    pub s2_mask: u64,
    pub direction_rad: f64,
    pub score: f64,
}

impl SequenceFile {
    pub fn from_sequence(
        assembly: &str,
        scorer: &str,
        seed: u64,
        seq: &AssemblySequence,
    ) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            assembly: assembly.to_string(),
            scorer: scorer.to_string(),
            seed,
            steps: seq
                .steps
                .iter()
                .map(|(op, r)| SequenceStep {
                    s1_mask: op.s1.mask(),
                    s2_mask: op.s2.mask(),
                    direction_rad: op.direction,
                    score: *r,
                })
                .collect(),
            r: seq.total,
        }
    }

    pub fn operations(&self) -> Vec<Operation> {
        self.steps
            .iter()
            .map(|s| Operation {
                parent: Subassembly::from_mask(s.s1_mask | s.s2_mask),
                s1: Subassembly::from_mask(s.s1_mask),
                s2: Subassembly::from_mask(s.s2_mask),
                direction: s.direction_rad,
            })
            .collect()
    }
}

/// Plan report JSON (schema-wrapped [`PlanReport`]).
#[derive(Clone, Debug, Serialize)]
pub struct PlanReportFile {
    pub schema_version: u32,
    #[serde(flatten)]
    pub report: PlanReport,
}

/// Per-assembly comparison row of the evaluation harness.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EvalAssembly {
    pub name: String,
    pub rap_r: f64,
    pub sim_only_r: f64,
    pub random_mean_r: f64,
    pub optimal_r: f64,
    pub rap_time_s: f64,
    pub sim_only_time_s: f64,
    pub sim_calls_rap: usize,
    pub sim_calls_baseline: usize,
    pub rap_fallback_nodes: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub classifier_accuracy: Option<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EvalReport {
    pub schema_version: u32,
    pub seed: u64,
    pub trials: usize,
    pub random_sequences: usize,
    pub assemblies: Vec<EvalAssembly>,
}

/// Writes a JSON value with a trailing newline (stable bytes for reruns).
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::Input(format!("serialize: {e}")))?;
    text.push('\n');
    std::fs::write(path, text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    Ok(())
}
