//! JSON documents written by the command-line tool.
//!
//! Field names are frozen per [`SCHEMA_VERSION`]; see `docs/report-schema.md`.

use serde::{Deserialize, Serialize};

use crate::gap::{Estimate, GapConfig, SelectedK};
use crate::sim::ExperimentReport;

pub const SCHEMA_VERSION: u32 = 1;

/// Gap estimate for one dataset and one variant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapReport {
    pub schema_version: u32,
    pub config: GapConfig,
    pub n: usize,
    pub p: usize,
    pub k: Vec<usize>,
    pub w: Vec<f64>,
    pub e_star: Vec<f64>,
    pub gap: Vec<f64>,
    pub s: Vec<f64>,
    pub rule_trace: Vec<bool>,
    pub selected_k: SelectedK,
    /// Cluster labels at the selected `k`, `null` when undefined.
    pub labels: Option<Vec<usize>>,
}

impl From<&Estimate> for GapReport {
    fn from(e: &Estimate) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            config: e.config.clone(),
            n: e.n,
            p: e.p,
            k: (1..=e.curve.k_max()).collect(),
            w: e.curve.w.clone(),
            e_star: e.curve.e_star.clone(),
            gap: e.curve.gap.clone(),
            s: e.curve.s.clone(),
            rule_trace: e.selection.rule_trace.clone(),
            selected_k: e.selection.selected_k,
            labels: e.partition.as_ref().map(|p| p.labels().to_vec()),
        }
    }
}

/// Per-repetition traces and tallies of a simulation run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceDocument {
    pub schema_version: u32,
    #[serde(flatten)]
    pub report: ExperimentReport,
}

impl From<ExperimentReport> for TraceDocument {
    fn from(report: ExperimentReport) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            report,
        }
    }
}
