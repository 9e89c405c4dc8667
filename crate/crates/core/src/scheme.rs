//! End-to-end construction: base hierarchy, color partition, one coarse
//! hierarchy and sparsified auxiliary graph per color, then labels.

use alloc::string::String;
use alloc::vec::Vec;

use crate::auxgraph::{build_aux_graph, sparsify_orient, AuxGraph, SparsifyParams};
use crate::graph::{Graph, VertexSet};
use crate::hierarchy::{
    base::{build_base_hierarchy_logged, DEGREE_THRESHOLD},
    check_decomp, coarsen, derandomized_partition, random_partition, BaseHierarchy, CoarseHierarchy, ColorPartition, HierarchyError,
};
use crate::labeling::{build_hierarchy_labels, FinalLabel, HierarchyArtifacts, LabelHeader, LABEL_VERSION};
use crate::sketch::{SketchContext, SketchError, SketchParams, Seeds};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PartitionMode {
    /// Independent uniform colors from the seed.
    Random,
    /// Conditional-expectations coloring hitting every large neighbor set.
    Derandomized,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BuildConfig {
    pub f: usize,
    pub seed: u64,
    /// Round constant in `p = ⌈c · log₂ n⌉`.
    pub c: f64,
    /// Round constant of the sparsifier.
    pub c_sparse: f64,
    pub uid_bits: u32,
    pub partition: PartitionMode,
    /// Keep the unsparsified `Ĝ` per color for reference checks.
    pub keep_full_aux: bool,
}

impl Default for BuildConfig {
    fn default() -> Self {
        BuildConfig { f: 1, seed: 0, c: 8.0, c_sparse: 4.0, uid_bits: 64, partition: PartitionMode::Random, keep_full_aux: false }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum BuildError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Hierarchy(#[from] HierarchyError),
    #[error(transparent)]
    Sketch(#[from] SketchError),
}

/// Per-color build artifacts.
#[derive(Clone, Debug)]
pub struct ColorArtifacts {
    /// 1-based color.
    pub color: usize,
    pub hierarchy: CoarseHierarchy,
    pub full_aux: Option<AuxGraph>,
    pub aux: AuxGraph,
}

#[derive(Clone, Debug)]
pub struct Scheme {
    pub config: BuildConfig,
    pub base: BaseHierarchy,
    /// Number of decomposition calls made (each was contract-checked).
    pub decomp_calls: usize,
    pub partition: ColorPartition,
    pub colors: Vec<ColorArtifacts>,
    pub ctx: SketchContext,
    pub labels: Vec<FinalLabel>,
}

impl Scheme {
    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn label(&self, v: usize) -> &FinalLabel {
        &self.labels[v]
    }

    /// Artifacts of color `i` (1-based).
    pub fn artifacts(&self, i: usize) -> HierarchyArtifacts<'_> {
        let c = &self.colors[i - 1];
        HierarchyArtifacts { h: &c.hierarchy, aux: &c.aux, ctx: &self.ctx }
    }

    /// The color whose part avoids `faults`.
    pub fn free_color(&self, faults: &VertexSet) -> usize {
        self.partition.free_color(faults.as_slice()).expect("pigeonhole")
    }
}

pub fn validate_config(n: usize, cfg: &BuildConfig) -> Result<(), BuildError> {
    if !(1..=254).contains(&cfg.f) {
        return Err(BuildError::InvalidConfig(alloc::format!("f must lie in 1..=254, got {}", cfg.f)));
    }
    if n == 0 {
        return Err(BuildError::InvalidConfig("graph has no vertices".into()));
    }
    if cfg.c.is_nan() || cfg.c <= 0.0 || cfg.c_sparse.is_nan() || cfg.c_sparse <= 0.0 {
        return Err(BuildError::InvalidConfig("round constants must be positive".into()));
    }
    Ok(())
}

pub fn sparsify_seed(seed: u64, color: usize) -> u64 {
    seed.wrapping_mul(0x9e37_79b9_7f4a_7c15).wrapping_add(color as u64)
}

pub fn build_scheme(g: &Graph, cfg: &BuildConfig) -> Result<Scheme, BuildError> {
    let n = g.n();
    validate_config(n, cfg)?;
    let params = SketchParams::new(n, cfg.f, cfg.c, cfg.uid_bits)?;
    let ctx = SketchContext::new(params, Seeds::from_seed(cfg.seed));

    let mut calls = 0usize;
    let mut violation = None;
    let base = build_base_hierarchy_logged(g, &mut |terms, r| {
        calls += 1;
        if let Err(e) = check_decomp(g, terms, DEGREE_THRESHOLD, r) {
            violation.get_or_insert(e);
        }
    })?;
    if let Some(e) = violation {
        return Err(HierarchyError::Decomp(e).into());
    }
    let partition = match cfg.partition {
        PartitionMode::Random => random_partition(n, cfg.f, cfg.seed),
        PartitionMode::Derandomized => derandomized_partition(&base, cfg.f),
    };

    let mut colors = Vec::with_capacity(cfg.f + 1);
    for color in 1..=cfg.f + 1 {
        let hierarchy = coarsen(g, &base, &partition, color)?;
        let full = build_aux_graph(g, &hierarchy);
        let sp = SparsifyParams { f: cfg.f, c_sparse: cfg.c_sparse, seed: sparsify_seed(cfg.seed, color) };
        let aux = sparsify_orient(&full, &hierarchy, &sp);
        colors.push(ColorArtifacts { color, hierarchy, full_aux: cfg.keep_full_aux.then_some(full), aux });
    }

    let comp = g.components();
    let mut per_color: Vec<_> = colors
        .iter()
        .map(|c| build_hierarchy_labels(HierarchyArtifacts { h: &c.hierarchy, aux: &c.aux, ctx: &ctx }).into_iter())
        .collect();
    let labels = (0..n)
        .map(|v| FinalLabel {
            header: LabelHeader {
                version: LABEL_VERSION,
                params,
                seeds: ctx.seeds,
                vertex: v as u32,
                color: partition.color(v) as u8,
                graph_component: comp[v] as u32,
            },
            hierarchies: per_color.iter_mut().map(|it| it.next().expect("one label per vertex")).collect(),
        })
        .collect();

    Ok(Scheme { config: cfg.clone(), base, decomp_calls: calls, partition, colors, ctx, labels })
}
