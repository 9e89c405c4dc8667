//! Label construction for one coarse hierarchy.

use alloc::sync::Arc;
use alloc::vec::Vec;

use super::{ChildEntry, ComponentLabel, HierarchyLabel, NeighborEntry, SubtreeBlock};
use crate::auxgraph::{AuxGraph, EdgeType, TypedEdge};
use crate::hierarchy::CoarseHierarchy;
use crate::sketch::{AncLabel, Eid, Sketch, SketchContext};

/// Inputs for one color: the hierarchy and its sparsified, oriented `Ĝ`.
#[derive(Clone, Copy)]
pub struct HierarchyArtifacts<'a> {
    pub h: &'a CoarseHierarchy,
    pub aux: &'a AuxGraph,
    pub ctx: &'a SketchContext,
}

impl HierarchyArtifacts<'_> {
    pub fn eid(&self, e: &TypedEdge) -> Eid {
        self.ctx.eid(e.tail, e.head, e.ty.code(self.h.n), AncLabel::of(self.h, e.tail), AncLabel::of(self.h, e.head))
    }

    /// `sketch` of the given edge indices of `aux`.
    pub fn sketch_of_edges(&self, edges: impl IntoIterator<Item = usize>) -> Sketch {
        let mut sk = Sketch::zero(&self.ctx.params);
        for i in edges {
            self.ctx.add_eid(&mut sk, &self.eid(&self.aux.edges[i]));
        }
        sk
    }
}

struct Builder<'a> {
    art: HierarchyArtifacts<'a>,
    eids: Vec<Eid>,
    slots: Vec<Vec<u32>>,
}

impl Builder<'_> {
    fn add(&self, sk: &mut Sketch, i: usize) {
        let head = self.art.aux.edges[i].head;
        self.art.ctx.add_eid_slots(sk, &self.eids[i], &self.slots[head]);
    }
}

/// `L_{H(S)}(v)` for every vertex.
pub fn build_hierarchy_labels(art: HierarchyArtifacts<'_>) -> Vec<HierarchyLabel> {
    let (h, aux, ctx) = (art.h, art.aux, art.ctx);
    let n = h.n;
    let anc: Vec<AncLabel> = (0..n).map(|v| AncLabel::of(h, v)).collect();
    let b = Builder {
        art,
        eids: aux.edges.iter().map(|e| ctx.eid(e.tail, e.head, e.ty.code(n), anc[e.tail], anc[e.head])).collect(),
        slots: (0..n).map(|v| ctx.head_slots(v)).collect(),
    };

    // sketch(Ê_up(v)), then accumulated into sketch_up(T_v(K_v)) children-first
    let mut sub: Vec<Sketch> = (0..n)
        .map(|v| {
            let mut sk = Sketch::zero(&ctx.params);
            let kv = h.comp_of[v];
            for &i in &aux.incident[v] {
                if h.is_descendant(kv, h.comp_of[aux.edges[i].other(v)]) {
                    b.add(&mut sk, i);
                }
            }
            sk
        })
        .collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_unstable_by_key(|&v| core::cmp::Reverse(h.tree_pre[v]));
    for &v in &order {
        if let Some(p) = h.tree_parent[v] {
            let child = core::mem::replace(&mut sub[v], Sketch::from_words(0, Vec::new()));
            sub[p].xor_assign(&child).expect("uniform dimensions");
            sub[v] = child;
        }
    }
    let sub: Vec<Arc<Sketch>> = sub.into_iter().map(Arc::new).collect();

    let comps: Vec<Arc<ComponentLabel>> = h
        .components
        .iter()
        .enumerate()
        .map(|(k, comp)| {
            let ty = EdgeType::Component(comp.id);
            let neighbors = comp
                .neighbors
                .iter()
                .map(|u| {
                    let mut sk = Sketch::zero(&ctx.params);
                    for &i in &aux.incident[u] {
                        let e = &aux.edges[i];
                        if h.comp_of[e.other(u)] == k || e.ty == ty {
                            b.add(&mut sk, i);
                        }
                    }
                    NeighborEntry { vertex: u as u32, anc: anc[u], sketch: sk }
                })
                .collect();
            Arc::new(ComponentLabel { id: comp.id, anc: anc[comp.root], sketch_up: sub[comp.root].clone(), neighbors })
        })
        .collect();

    (0..n)
        .map(|v| {
            let components = h.ancestors(h.comp_of[v]).into_iter().map(|k| comps[k].clone()).collect();
            let subtree = (!h.in_s[v]).then(|| SubtreeBlock {
                sketch_up: sub[v].clone(),
                children: h.tree_children[v].iter().map(|&u| ChildEntry { vertex: u as u32, anc: anc[u], sketch_up: sub[u].clone() }).collect(),
                out_edges: aux.out[v].iter().map(|&i| b.eids[i]).collect(),
            });
            HierarchyLabel { anc: anc[v], components, subtree }
        })
        .collect()
}
