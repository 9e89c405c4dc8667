//! Component labels, per-hierarchy vertex labels and the final concatenated
//! label, with an exact bit-level serialization.

use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::sketch::{AncLabel, Eid, Seeds, Sketch, SketchParams};

pub mod build;
pub mod codec;

pub use build::{build_hierarchy_labels, HierarchyArtifacts};
pub use codec::{BitCounter, BitReader, BitSink, BitWriter, Section};

pub const LABEL_VERSION: u8 = 1;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LabelError {
    #[error("label truncated at bit {0}")]
    Truncated(u64),
    #[error("unsupported label version {0}")]
    Version(u8),
    #[error("invalid label field: {0}")]
    Invalid(&'static str),
}

/// `sketch(Ê(v,K) ⊕ Ê_K(v))` for one `v ∈ N(H_K)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NeighborEntry {
    pub vertex: u32,
    pub anc: AncLabel,
    pub sketch: Sketch,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComponentLabel {
    pub id: u32,
    /// `anc(r_K)`.
    pub anc: AncLabel,
    pub sketch_up: Arc<Sketch>,
    pub neighbors: Vec<NeighborEntry>,
}

/// A `T(K_v)`-child `u` of `v` with `sketch_up(T_u(K_v))`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChildEntry {
    pub vertex: u32,
    pub anc: AncLabel,
    pub sketch_up: Arc<Sketch>,
}

/// Present only for `v ∉ S`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubtreeBlock {
    pub sketch_up: Arc<Sketch>,
    pub children: Vec<ChildEntry>,
    /// Eids of the sparsified edges oriented out of `v`.
    pub out_edges: Vec<Eid>,
}

/// `L_{H(S)}(v)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HierarchyLabel {
    pub anc: AncLabel,
    /// Labels of `K_v` and all its ancestors, `K_v` first.
    pub components: Vec<Arc<ComponentLabel>>,
    pub subtree: Option<SubtreeBlock>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LabelHeader {
    pub version: u8,
    pub params: SketchParams,
    pub seeds: Seeds,
    pub vertex: u32,
    /// `φ(v) ∈ 1..=f+1`.
    pub color: u8,
    /// Connected component of `v` in `G`.
    pub graph_component: u32,
}

/// `L(v)`: header plus one [`HierarchyLabel`] per color.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FinalLabel {
    pub header: LabelHeader,
    pub hierarchies: Vec<HierarchyLabel>,
}

impl FinalLabel {
    pub fn vertex(&self) -> usize {
        self.header.vertex as usize
    }

    /// Exact serialized length.
    pub fn bit_length(&self) -> u64 {
        let mut c = BitCounter::default();
        codec::encode(self, &mut c);
        c.total
    }

    pub fn breakdown(&self) -> BitCounter {
        let mut c = BitCounter::default();
        codec::encode(self, &mut c);
        c
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = BitWriter::default();
        codec::encode(self, &mut w);
        w.into_bytes()
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, LabelError> {
        codec::decode(&mut BitReader::new(bytes))
    }
}

/// Aggregate label sizes.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct LabelStats {
    pub count: usize,
    pub total_bits: u64,
    pub max_bits: u64,
    pub mean_bits: f64,
    /// Totals per [`Section`], in declaration order.
    pub by_section: [u64; Section::COUNT],
    /// Totals per hierarchy (color `i` at index `i − 1`).
    pub by_hierarchy: Vec<u64>,
}

pub fn label_stats(labels: &[FinalLabel]) -> LabelStats {
    let mut s = LabelStats::default();
    for l in labels {
        let c = l.breakdown();
        s.count += 1;
        s.total_bits += c.total;
        s.max_bits = s.max_bits.max(c.total);
        for (a, b) in s.by_section.iter_mut().zip(c.by_section) {
            *a += b;
        }
        if s.by_hierarchy.len() < c.by_hierarchy.len() {
            s.by_hierarchy.resize(c.by_hierarchy.len(), 0);
        }
        for (a, b) in s.by_hierarchy.iter_mut().zip(&c.by_hierarchy) {
            *a += b;
        }
    }
    if s.count > 0 {
        s.mean_bits = s.total_bits as f64 / s.count as f64;
    }
    s
}
