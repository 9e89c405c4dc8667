//! JSON and CSV reports.

use std::collections::BTreeMap;
use std::path::Path;

use ftconn_core::labeling::{label_stats, FinalLabel, Section};
use ftconn_core::scheme::{PartitionMode, Scheme};
use ftconn_core::verify::{depth_bound, SuiteResult};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Clone, Debug, Default, Serialize, Deserialize, PartialEq)]
pub struct ConfigEcho {
    pub command: String,
    pub graph: Option<String>,
    pub labels: Option<String>,
    pub n: usize,
    pub m: Option<usize>,
    pub f: usize,
    pub seed: u64,
    pub c: f64,
    pub c_sparse: f64,
    pub uid_bits: u32,
    pub partition: String,
    pub queries: Option<usize>,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize, PartialEq)]
pub struct ErrorReport {
    pub queries: usize,
    pub agree: usize,
    pub false_connected: usize,
    pub false_disconnected: usize,
    pub truly_connected: usize,
    pub error_rate: f64,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize, PartialEq)]
pub struct LabelReport {
    pub count: usize,
    pub total_bits: u64,
    pub max_bits: u64,
    pub mean_bits: f64,
    pub by_section: BTreeMap<String, u64>,
    /// Total bits per color hierarchy.
    pub by_hierarchy: Vec<u64>,
}

impl LabelReport {
    pub fn of(labels: &[FinalLabel]) -> Self {
        let s = label_stats(labels);
        LabelReport {
            count: s.count,
            total_bits: s.total_bits,
            max_bits: s.max_bits,
            mean_bits: s.mean_bits,
            by_section: Section::ALL.iter().map(|sec| (sec.name().to_string(), s.by_section[*sec as usize])).collect(),
            by_hierarchy: s.by_hierarchy,
        }
    }
}

#[derive(Clone, Debug, Default, Serialize, Deserialize, PartialEq)]
pub struct ColorReport {
    pub color: usize,
    pub part_size: usize,
    pub components: usize,
    pub height: usize,
    /// Largest tree degree of a vertex outside the color's part.
    pub max_tree_degree_outside_part: usize,
    pub max_neighbor_set: usize,
    pub aux_edges: usize,
    pub max_outdegree: usize,
    pub sparsify_rounds: usize,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize, PartialEq)]
pub struct HierarchyReport {
    pub levels: usize,
    pub level_bound: f64,
    pub base_components: usize,
    pub base_height: usize,
    pub max_union_tree_degree: usize,
    pub union_tree_degree_bound: f64,
    pub tree_degree_bound: f64,
    pub decomp_calls: usize,
    pub colors: Vec<ColorReport>,
}

impl HierarchyReport {
    pub fn of(sc: &Scheme) -> Self {
        let log_n = (sc.n().max(2) as f64).log2();
        let colors = sc
            .colors
            .iter()
            .map(|c| {
                let h = &c.hierarchy;
                ColorReport {
                    color: c.color,
                    part_size: h.in_s.iter().filter(|&&b| b).count(),
                    components: h.components.len(),
                    height: h.height(),
                    max_tree_degree_outside_part: (0..h.n).filter(|&v| !h.in_s[v]).map(|v| h.tree_degree(v)).max().unwrap_or(0),
                    max_neighbor_set: h.components.iter().map(|k| k.neighbors.len()).max().unwrap_or(0),
                    aux_edges: c.aux.edges.len(),
                    max_outdegree: c.aux.max_outdegree(),
                    sparsify_rounds: c.aux.rounds,
                }
            })
            .collect();
        HierarchyReport {
            levels: sc.base.levels(),
            level_bound: depth_bound(sc.n()),
            base_components: sc.base.components.len(),
            base_height: sc.base.height(),
            max_union_tree_degree: sc.base.max_t_union_degree(),
            union_tree_degree_bound: 2.0 * log_n,
            tree_degree_bound: 3.0 * log_n,
            decomp_calls: sc.decomp_calls,
            colors,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct SuiteReport {
    pub name: String,
    pub checked: u64,
    pub failures: u64,
    pub tolerance: f64,
    pub passed: bool,
    pub note: String,
}

impl From<&SuiteResult> for SuiteReport {
    fn from(r: &SuiteResult) -> Self {
        SuiteReport {
            name: r.name.to_string(),
            checked: r.checked,
            failures: r.failures,
            tolerance: r.tolerance,
            passed: r.passed(),
            note: r.note.clone(),
        }
    }
}

#[derive(Clone, Debug, Default, Serialize, Deserialize, PartialEq)]
pub struct Report {
    pub config: ConfigEcho,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub errors: Option<ErrorReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub labels: Option<LabelReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hierarchy: Option<HierarchyReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub suites: Option<Vec<SuiteReport>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub file_bytes: Option<u64>,
    /// Wall time per phase, in milliseconds.
    pub wall_ms: BTreeMap<String, f64>,
}

impl Report {
    pub fn write_json(&self, path: &Path) -> Result<(), CliError> {
        let text = serde_json::to_string_pretty(self).map_err(|e| CliError::Invariant(e.to_string()))?;
        std::fs::write(path, text + "\n").map_err(|e| CliError::io(path, e))
    }

    pub fn read_json(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
    }
}

pub fn partition_name(p: PartitionMode) -> &'static str {
    match p {
        PartitionMode::Random => "random",
        PartitionMode::Derandomized => "derandomized",
    }
}

#[derive(Serialize)]
struct BenchRow<'a> {
    graph: &'a str,
    n: usize,
    f: usize,
    seed: u64,
    queries: usize,
    agree: usize,
    false_connected: usize,
    false_disconnected: usize,
    error_rate: f64,
    mean_bits: f64,
    max_bits: u64,
}

pub fn write_bench_csv(path: &Path, r: &Report) -> Result<(), CliError> {
    let e = r.errors.clone().unwrap_or_default();
    let l = r.labels.clone().unwrap_or_default();
    let row = BenchRow {
        graph: r.config.graph.as_deref().unwrap_or(""),
        n: r.config.n,
        f: r.config.f,
        seed: r.config.seed,
        queries: e.queries,
        agree: e.agree,
        false_connected: e.false_connected,
        false_disconnected: e.false_disconnected,
        error_rate: e.error_rate,
        mean_bits: l.mean_bits,
        max_bits: l.max_bits,
    };
    write_csv(path, std::iter::once(row))
}

pub fn write_suites_csv(path: &Path, suites: &[SuiteReport]) -> Result<(), CliError> {
    write_csv(path, suites.iter())
}

fn write_csv<T: Serialize>(path: &Path, rows: impl Iterator<Item = T>) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    for row in rows {
        w.serialize(row).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}
