//! The typed auxiliary multigraph `Ĝ`: the original edges plus, for each
//! component `K`, a clique on `N(H_K)` whose edges carry type `K`. Also the
//! sparsification/orientation step and reference (non-label) implementations
//! of affected components, valid edges, the query graph `G*` and the edge
//! classes used by the cut formula.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dsu::UnionFind;
use crate::graph::{Graph, VertexSet};
use crate::hierarchy::CoarseHierarchy;

/// Edge type: an original graph edge, or a clique edge of the component with
/// the given id.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EdgeType {
    Original,
    Component(u32),
}

impl EdgeType {
    /// Numeric code: component ids are `1..=n`, original is `n + 1`.
    pub fn code(self, n: usize) -> u32 {
        match self {
            EdgeType::Original => n as u32 + 1,
            EdgeType::Component(id) => id,
        }
    }

    pub fn from_code(code: u32, n: usize) -> Option<Self> {
        if code == n as u32 + 1 {
            Some(EdgeType::Original)
        } else if (1..=n as u32).contains(&code) {
            Some(EdgeType::Component(code))
        } else {
            None
        }
    }
}

/// An `Ĝ` edge oriented `tail → head`. Identity is `(endpoints, type)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TypedEdge {
    pub tail: usize,
    pub head: usize,
    pub ty: EdgeType,
}

impl TypedEdge {
    /// Identity key ignoring orientation.
    pub fn key(&self) -> (usize, usize, EdgeType) {
        (self.tail.min(self.head), self.tail.max(self.head), self.ty)
    }

    pub fn other(&self, v: usize) -> usize {
        if self.tail == v {
            self.head
        } else {
            self.tail
        }
    }

    pub fn touches(&self, v: usize) -> bool {
        self.tail == v || self.head == v
    }
}

/// `Ĝ` (or its sparsified, oriented subgraph).
#[derive(Clone, Debug)]
pub struct AuxGraph {
    pub n: usize,
    /// Edges sorted by identity key.
    pub edges: Vec<TypedEdge>,
    /// Edge indices incident to each vertex.
    pub incident: Vec<Vec<usize>>,
    /// Edge indices whose tail is the vertex.
    pub out: Vec<Vec<usize>>,
    /// Sampling rounds used to produce this graph (0 if unsparsified).
    pub rounds: usize,
}

impl AuxGraph {
    fn from_edges(n: usize, mut edges: Vec<TypedEdge>, rounds: usize) -> Self {
        edges.sort_by_key(TypedEdge::key);
        let mut incident = alloc::vec![Vec::new(); n];
        let mut out = alloc::vec![Vec::new(); n];
        for (i, e) in edges.iter().enumerate() {
            incident[e.tail].push(i);
            incident[e.head].push(i);
            out[e.tail].push(i);
        }
        AuxGraph { n, edges, incident, out, rounds }
    }

    pub fn max_outdegree(&self) -> usize {
        self.out.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn find(&self, key: (usize, usize, EdgeType)) -> Option<usize> {
        self.edges.binary_search_by_key(&key, TypedEdge::key).ok()
    }

    /// Text rendering of the typed edge list, one `tail head type` per line.
    pub fn dump(&self) -> alloc::string::String {
        use core::fmt::Write;
        let mut s = alloc::string::String::new();
        for e in &self.edges {
            let _ = match e.ty {
                EdgeType::Original => writeln!(s, "{} {} original", e.tail, e.head),
                EdgeType::Component(id) => writeln!(s, "{} {} K{}", e.tail, e.head, id),
            };
        }
        s
    }
}

/// Unsparsified `Ĝ`; edges are oriented from the smaller endpoint.
pub fn build_aux_graph(g: &Graph, h: &CoarseHierarchy) -> AuxGraph {
    let mut edges: Vec<TypedEdge> = g.edges().iter().map(|&(u, v)| TypedEdge { tail: u, head: v, ty: EdgeType::Original }).collect();
    for k in &h.components {
        let nb = k.neighbors.as_slice();
        for (i, &a) in nb.iter().enumerate() {
            for &b in &nb[i + 1..] {
                edges.push(TypedEdge { tail: a, head: b, ty: EdgeType::Component(k.id) });
            }
        }
    }
    AuxGraph::from_edges(g.n(), edges, 0)
}

/// Parameters of the sparsifier.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SparsifyParams {
    pub f: usize,
    /// Multiplier in the round count `⌈c_sparse · f³ · log₂² n⌉`.
    pub c_sparse: f64,
    pub seed: u64,
}

impl SparsifyParams {
    pub fn rounds(&self, n: usize) -> usize {
        let l = crate::hierarchy::log2(n);
        let f = self.f as f64;
        (libm::ceil(self.c_sparse * f * f * f * l * l) as usize).max(1)
    }

    /// Per-round vertex sampling probability. `2/(f+2)` maximizes
    /// `p²(1-p)^f`, the chance that both endpoints of an edge are sampled
    /// while all `f` faults are not.
    pub fn vertex_probability(&self) -> f64 {
        2.0 / (self.f as f64 + 2.0)
    }

    /// Per-round component sampling probability `1/(f·⌈log₂ n⌉ + 1)`.
    pub fn component_probability(&self, n: usize) -> f64 {
        let l = libm::ceil(crate::hierarchy::log2(n)).max(1.0);
        1.0 / (self.f as f64 * l + 1.0)
    }
}

/// Depth of `K_u`.
pub fn vertex_depth(h: &CoarseHierarchy, u: usize) -> usize {
    h.components[h.comp_of[u]].depth
}

/// Union of minimum spanning forests (weight = deeper endpoint depth) of
/// randomly sampled subgraphs; each forest is oriented toward the smallest
/// vertex of its tree. An edge keeps the orientation of the first forest
/// that contains it.
pub fn sparsify_orient(aux: &AuxGraph, h: &CoarseHierarchy, params: &SparsifyParams) -> AuxGraph {
    let n = aux.n;
    let rounds = params.rounds(n);
    let pa = params.vertex_probability();
    let pb = params.component_probability(n);
    let depth = |e: &TypedEdge| vertex_depth(h, e.tail).max(vertex_depth(h, e.head));
    let mut order: Vec<usize> = (0..aux.edges.len()).collect();
    order.sort_by_key(|&i| (depth(&aux.edges[i]), aux.edges[i].key()));
    let mut rank = alloc::vec![0usize; aux.edges.len()];
    for (r, &i) in order.iter().enumerate() {
        rank[i] = r;
    }
    let originals: Vec<usize> = (0..aux.edges.len()).filter(|&i| aux.edges[i].ty == EdgeType::Original).collect();
    let mut typed: Vec<Vec<usize>> = alloc::vec![Vec::new(); h.components.len()];
    for (i, e) in aux.edges.iter().enumerate() {
        if let EdgeType::Component(id) = e.ty {
            typed[h.component_by_id(id).expect("edge type names a component")].push(i);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut orient: Vec<Option<usize>> = alloc::vec![None; aux.edges.len()];
    let mut in_a = alloc::vec![false; n];
    let mut tree_adj: Vec<Vec<(usize, usize)>> = alloc::vec![Vec::new(); n];
    let mut visited = alloc::vec![false; n];
    for _ in 0..rounds {
        for a in in_a.iter_mut() {
            *a = rng.gen_bool(pa);
        }
        let mut cand: Vec<usize> = originals.iter().copied().filter(|&i| in_a[aux.edges[i].tail] && in_a[aux.edges[i].head]).collect();
        for list in &typed {
            if rng.gen_bool(pb) {
                cand.extend(list.iter().copied().filter(|&i| in_a[aux.edges[i].tail] && in_a[aux.edges[i].head]));
            }
        }
        if cand.is_empty() {
            continue;
        }
        cand.sort_unstable_by_key(|&i| rank[i]);
        let mut uf = UnionFind::new(n);
        let mut touched = Vec::new();
        for &i in &cand {
            let e = &aux.edges[i];
            if uf.union(e.tail, e.head).is_some() {
                tree_adj[e.tail].push((e.head, i));
                tree_adj[e.head].push((e.tail, i));
                touched.push(e.tail);
                touched.push(e.head);
            }
        }
        touched.sort_unstable();
        touched.dedup();
        for &r in &touched {
            if visited[r] {
                continue;
            }
            visited[r] = true;
            let mut st = alloc::vec![r];
            while let Some(u) = st.pop() {
                for &(w, i) in &tree_adj[u] {
                    if !visited[w] {
                        visited[w] = true;
                        if orient[i].is_none() {
                            orient[i] = Some(w); // tail = child
                        }
                        st.push(w);
                    }
                }
            }
        }
        for &v in &touched {
            tree_adj[v].clear();
            visited[v] = false;
        }
    }
    let edges = aux
        .edges
        .iter()
        .zip(&orient)
        .filter_map(|(e, o)| o.map(|tail| TypedEdge { tail, head: e.other(tail), ty: e.ty }))
        .collect();
    AuxGraph::from_edges(n, edges, rounds)
}

/// A query `⟨s, t, F⟩` with its affected components.
#[derive(Clone, Debug)]
pub struct QueryContext {
    pub s: usize,
    pub t: usize,
    pub faults: VertexSet,
    pub affected: Vec<bool>,
}

impl QueryContext {
    /// `K` is affected iff `V(H_K)` meets `F ∪ {s, t}`.
    pub fn new(h: &CoarseHierarchy, s: usize, t: usize, faults: VertexSet) -> Self {
        let mut affected = alloc::vec![false; h.components.len()];
        for x in faults.iter().chain([s, t]) {
            for c in h.ancestors(h.comp_of[x]) {
                affected[c] = true;
            }
        }
        QueryContext { s, t, faults, affected }
    }

    pub fn vertex_in_gstar(&self, h: &CoarseHierarchy, v: usize) -> bool {
        self.affected[h.comp_of[v]]
    }

    fn type_affected(&self, h: &CoarseHierarchy, ty: EdgeType) -> bool {
        match ty {
            EdgeType::Original => false,
            EdgeType::Component(id) => self.affected[h.component_by_id(id).expect("valid type")],
        }
    }

    /// Valid: the type is not an affected component and both endpoints lie in `G*`.
    pub fn is_valid(&self, h: &CoarseHierarchy, e: &TypedEdge) -> bool {
        !self.type_affected(h, e.ty) && self.vertex_in_gstar(h, e.tail) && self.vertex_in_gstar(h, e.head)
    }
}

/// Symmetric difference of two sorted index lists.
pub fn xor_sorted(a: &[usize], b: &[usize]) -> Vec<usize> {
    let (mut i, mut j) = (0, 0);
    let mut out = Vec::with_capacity(a.len() + b.len());
    while i < a.len() || j < b.len() {
        if j == b.len() || (i < a.len() && a[i] < b[j]) {
            out.push(a[i]);
            i += 1;
        } else if i == a.len() || b[j] < a[i] {
            out.push(b[j]);
            j += 1;
        } else {
            i += 1;
            j += 1;
        }
    }
    out
}

/// `Ê(v, K)`: edges at `v` whose other endpoint lies in component `k`.
pub fn edges_to_component(aux: &AuxGraph, h: &CoarseHierarchy, v: usize, k: usize) -> Vec<usize> {
    aux.incident[v].iter().copied().filter(|&i| h.comp_of[aux.edges[i].other(v)] == k).collect()
}

/// `Ê_K(v)`: edges at `v` of type `K`.
pub fn edges_of_type(aux: &AuxGraph, h: &CoarseHierarchy, v: usize, k: usize) -> Vec<usize> {
    let ty = EdgeType::Component(h.components[k].id);
    aux.incident[v].iter().copied().filter(|&i| aux.edges[i].ty == ty).collect()
}

/// `Ê_up(v)`: edges at `v` whose other endpoint lies in `K_v` or an ancestor.
pub fn edges_up(aux: &AuxGraph, h: &CoarseHierarchy, v: usize) -> Vec<usize> {
    let kv = h.comp_of[v];
    aux.incident[v].iter().copied().filter(|&i| h.is_descendant(kv, h.comp_of[aux.edges[i].other(v)])).collect()
}

/// The edge sets around a vertex of `G*`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeClasses {
    pub up: Vec<usize>,
    pub down: Vec<usize>,
    pub bad: Vec<usize>,
    pub star: Vec<usize>,
}

/// Classes computed directly from their definitions.
pub fn classify_edges(aux: &AuxGraph, h: &CoarseHierarchy, ctx: &QueryContext, v: usize) -> Option<EdgeClasses> {
    if !ctx.vertex_in_gstar(h, v) {
        return None;
    }
    let kv = h.comp_of[v];
    let up = edges_up(aux, h, v);
    let down = aux.incident[v]
        .iter()
        .copied()
        .filter(|&i| {
            let k = h.comp_of[aux.edges[i].other(v)];
            k != kv && h.is_descendant(k, kv) && ctx.affected[k]
        })
        .collect();
    let bad = aux.incident[v].iter().copied().filter(|&i| ctx.type_affected(h, aux.edges[i].ty)).collect();
    let star = aux.incident[v].iter().copied().filter(|&i| ctx.is_valid(h, &aux.edges[i])).collect();
    Some(EdgeClasses { up, down, bad, star })
}

/// `Ê_down(v)` and `Ê_bad(v)` assembled from per-component sets over the
/// affected `K` with `v ∈ N(H_K)`.
pub fn down_and_bad_by_formula(aux: &AuxGraph, h: &CoarseHierarchy, ctx: &QueryContext, v: usize) -> (Vec<usize>, Vec<usize>) {
    let mut down = Vec::new();
    let mut bad = Vec::new();
    for (k, comp) in h.components.iter().enumerate() {
        if ctx.affected[k] && comp.neighbors.contains(v) {
            down = xor_sorted(&down, &edges_to_component(aux, h, v, k));
            bad = xor_sorted(&bad, &edges_of_type(aux, h, v, k));
        }
    }
    (down, bad)
}

/// `E*_cut(U)` computed directly: valid edges with exactly one endpoint in `U`.
pub fn cut_direct(aux: &AuxGraph, h: &CoarseHierarchy, ctx: &QueryContext, u: &VertexSet) -> Vec<usize> {
    (0..aux.edges.len())
        .filter(|&i| {
            let e = &aux.edges[i];
            ctx.is_valid(h, e) && (u.contains(e.tail) != u.contains(e.head))
        })
        .collect()
}

/// `E*_cut(U)` via `⊕_{v∈U} Ê_up(v) ⊕ ⊕_{K affected} ⊕_{v ∈ U ∩ N(H_K)} (Ê(v,K) ⊕ Ê_K(v))`.
pub fn cut_formula(aux: &AuxGraph, h: &CoarseHierarchy, ctx: &QueryContext, u: &VertexSet) -> Vec<usize> {
    let mut acc = Vec::new();
    for v in u.iter() {
        acc = xor_sorted(&acc, &edges_up(aux, h, v));
    }
    for (k, comp) in h.components.iter().enumerate() {
        if !ctx.affected[k] {
            continue;
        }
        for v in comp.neighbors.iter().filter(|&v| u.contains(v)) {
            acc = xor_sorted(&acc, &xor_sorted(&edges_to_component(aux, h, v, k), &edges_of_type(aux, h, v, k)));
        }
    }
    acc
}

/// Connectivity of `x` and `y` in `G* - F` over the given aux graph.
pub fn gstar_connected(aux: &AuxGraph, h: &CoarseHierarchy, ctx: &QueryContext, x: usize, y: usize) -> bool {
    let mut uf = UnionFind::new(aux.n);
    for e in &aux.edges {
        if ctx.is_valid(h, e) && !ctx.faults.contains(e.tail) && !ctx.faults.contains(e.head) {
            uf.union(e.tail, e.head);
        }
    }
    uf.same(x, y)
}

/// Vertex mask and valid edge indices of `G*`.
pub fn query_graph(aux: &AuxGraph, h: &CoarseHierarchy, ctx: &QueryContext) -> (Vec<bool>, Vec<usize>) {
    let verts = (0..aux.n).map(|v| ctx.vertex_in_gstar(h, v)).collect();
    let edges = (0..aux.edges.len()).filter(|&i| ctx.is_valid(h, &aux.edges[i])).collect();
    (verts, edges)
}
