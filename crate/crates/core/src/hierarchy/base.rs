//! The base hierarchy `H⁰`: components `γ` obtained from the sequence of
//! decompositions `(T_i, B_i) = decomp(G, B_{i-1}, 4)` starting at `B_0 = V`.

use alloc::vec::Vec;

use crate::graph::{Graph, VertexSet};

use super::decomp::{decomp, DecompResult, Forest};
use super::{euler_times, HierarchyError};

/// Degree threshold used for every decomposition call.
pub const DEGREE_THRESHOLD: usize = 4;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BaseComponent {
    pub vertices: VertexSet,
    /// Index `i` of the level `C_i` this component belongs to.
    pub level: usize,
    pub parent: Option<usize>,
    /// Children ordered by smallest vertex.
    pub children: Vec<usize>,
    /// Edges of the degree-4 Steiner tree `T⁰(γ)`.
    pub tree_edges: Vec<(usize, usize)>,
    /// `N(H⁰_γ)`: vertices outside the subtree adjacent to it.
    pub neighbors: VertexSet,
    pub depth: usize,
    pub pre: u32,
    pub post: u32,
}

#[derive(Clone, Debug)]
pub struct BaseHierarchy {
    pub n: usize,
    /// `B_0, …, B_L` (the last one is empty).
    pub b_history: Vec<VertexSet>,
    /// `T_1, …, T_L`.
    pub forests: Vec<Forest>,
    pub components: Vec<BaseComponent>,
    pub comp_of: Vec<usize>,
    /// Root components ordered by smallest vertex (one per connected component of G).
    pub roots: Vec<usize>,
    /// Components in postorder (children in order, then parent).
    pub postorder: Vec<usize>,
    /// `T^∪`: union of the edges of `T_i - B_i`, sorted.
    pub t_union: Vec<(usize, usize)>,
    pub t_union_adj: Vec<Vec<usize>>,
}

impl BaseHierarchy {
    /// Number of decomposition calls `L`.
    pub fn levels(&self) -> usize {
        self.forests.len()
    }

    /// Number of components on the longest root-to-leaf chain.
    pub fn height(&self) -> usize {
        self.components.iter().map(|c| c.depth + 1).max().unwrap_or(0)
    }

    /// `a ⪯ b`: `a` is `b` or a descendant of `b`.
    pub fn is_descendant(&self, a: usize, b: usize) -> bool {
        let (ca, cb) = (&self.components[a], &self.components[b]);
        cb.pre <= ca.pre && ca.post <= cb.post
    }

    /// Vertices of the subhierarchy rooted at `c`, sorted.
    pub fn subtree_vertices(&self, c: usize) -> VertexSet {
        let mut out = Vec::new();
        let mut st = alloc::vec![c];
        while let Some(x) = st.pop() {
            out.extend(self.components[x].vertices.iter());
            st.extend(self.components[x].children.iter().copied());
        }
        VertexSet::from_unsorted(out)
    }

    pub fn max_t_union_degree(&self) -> usize {
        self.t_union_adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Indented text rendering, one line per component.
    pub fn dump(&self) -> alloc::string::String {
        use core::fmt::Write;
        let mut s = alloc::string::String::new();
        let mut st: Vec<usize> = self.roots.iter().rev().copied().collect();
        while let Some(c) = st.pop() {
            let k = &self.components[c];
            let _ = writeln!(
                s,
                "{:indent$}γ{} level={} vertices={:?} tree={:?}",
                "",
                c,
                k.level,
                k.vertices.as_slice(),
                k.tree_edges,
                indent = 2 * k.depth
            );
            st.extend(k.children.iter().rev().copied());
        }
        s
    }
}

/// Builds `H⁰`, checking the decomposition contract on every call.
pub fn build_base_hierarchy(g: &Graph) -> Result<BaseHierarchy, HierarchyError> {
    build_base_hierarchy_logged(g, &mut |_, _| {})
}

/// Like [`build_base_hierarchy`], reporting each `(terminals, result)` pair.
pub fn build_base_hierarchy_logged(
    g: &Graph,
    log: &mut dyn FnMut(&VertexSet, &DecompResult),
) -> Result<BaseHierarchy, HierarchyError> {
    let n = g.n();
    let mut b_history: Vec<VertexSet> = alloc::vec![(0..n).collect()];
    let mut forests = Vec::new();
    loop {
        let terms = b_history.last().unwrap();
        let r = decomp(g, terms, DEGREE_THRESHOLD)?;
        log(terms, &r);
        if !r.bad.is_empty() && r.bad.len() >= terms.len() {
            return Err(HierarchyError::Internal("bad set did not shrink".into()));
        }
        let done = r.bad.is_empty();
        forests.push(r.forest);
        b_history.push(r.bad);
        if done {
            break;
        }
    }
    let l = forests.len();
    let masks: Vec<Vec<bool>> = b_history.iter().map(|b| b.to_mask(n)).collect();
    // suffix[i] = B_{i+1} ∪ … ∪ B_{L-1}
    let mut suffix = alloc::vec![alloc::vec![false; n]; l];
    for i in (0..l.saturating_sub(1)).rev() {
        let mut m = suffix[i + 1].clone();
        for v in b_history[i + 1].iter() {
            m[v] = true;
        }
        suffix[i] = m;
    }
    let level_comps: Vec<Vec<usize>> = suffix.iter().map(|s| g.components_avoiding(s).0).collect();

    // components, created from the top level down
    let mut components: Vec<BaseComponent> = Vec::new();
    let mut comp_of = alloc::vec![usize::MAX; n];
    let mut by_level_key: Vec<Vec<usize>> = alloc::vec![alloc::vec![usize::MAX; n]; l];
    for i in (0..l).rev() {
        let mut groups: alloc::collections::BTreeMap<usize, Vec<usize>> = alloc::collections::BTreeMap::new();
        for v in b_history[i].iter().filter(|&v| !suffix[i][v]) {
            groups.entry(level_comps[i][v]).or_default().push(v);
        }
        let mut gs: Vec<(usize, Vec<usize>)> = groups.into_iter().collect();
        gs.sort_by_key(|(_, vs)| vs[0]);
        for (key, vs) in gs {
            let id = components.len();
            by_level_key[i][key] = id;
            for &v in &vs {
                comp_of[v] = id;
            }
            let parent = (i + 1..l).find_map(|j| {
                let p = by_level_key[j][level_comps[j][vs[0]]];
                (p != usize::MAX).then_some(p)
            });
            let tree_edges = steiner_subtree(&forests[i], &masks[i + 1], &vs)?;
            components.push(BaseComponent {
                vertices: VertexSet::from_unsorted(vs),
                level: i,
                parent,
                children: Vec::new(),
                tree_edges,
                neighbors: VertexSet::new(),
                depth: 0,
                pre: 0,
                post: 0,
            });
        }
    }
    if comp_of.contains(&usize::MAX) {
        return Err(HierarchyError::Internal("levels do not partition V".into()));
    }
    let nc = components.len();
    let mut children = alloc::vec![Vec::new(); nc];
    let mut roots = Vec::new();
    for c in 0..nc {
        match components[c].parent {
            Some(p) => children[p].push(c),
            None => roots.push(c),
        }
    }
    let minv = |c: usize| components[c].vertices.as_slice()[0];
    for ch in &mut children {
        ch.sort_by_key(|&c| minv(c));
    }
    roots.sort_by_key(|&c| minv(c));
    let (pre, post) = euler_times(&children, &roots);
    let mut postorder: Vec<usize> = (0..nc).collect();
    postorder.sort_by_key(|&c| post[c]);
    for &c in postorder.iter().rev() {
        components[c].depth = components[c].parent.map_or(0, |p| components[p].depth + 1);
    }
    for c in 0..nc {
        components[c].children = core::mem::take(&mut children[c]);
        components[c].pre = pre[c];
        components[c].post = post[c];
    }
    let mut t_union = Vec::new();
    for (i, t) in forests.iter().enumerate() {
        t_union.extend(t.edges().into_iter().filter(|&(u, v)| !masks[i + 1][u] && !masks[i + 1][v]));
    }
    t_union.sort_unstable();
    t_union.dedup();
    let mut t_union_adj = alloc::vec![Vec::new(); n];
    for &(u, v) in &t_union {
        t_union_adj[u].push(v);
        t_union_adj[v].push(u);
    }
    let mut h = BaseHierarchy { n, b_history, forests, components, comp_of, roots, postorder, t_union, t_union_adj };
    for c in 0..nc {
        let inside = h.subtree_vertices(c);
        let mut nb = Vec::new();
        for v in inside.iter() {
            nb.extend(g.neighbors(v).iter().copied().filter(|&w| !h.is_descendant(h.comp_of[w], c)));
        }
        h.components[c].neighbors = VertexSet::from_unsorted(nb);
    }
    Ok(h)
}

/// Minimal subtree of `forest - removed` spanning `keep` (all in one tree).
fn steiner_subtree(forest: &Forest, removed: &[bool], keep: &[usize]) -> Result<Vec<(usize, usize)>, HierarchyError> {
    let n = forest.n();
    let mut seen = alloc::vec![false; n];
    let mut edges = Vec::new();
    let mut order = Vec::new();
    let root = keep[0];
    if !forest.contains(root) || removed[root] {
        return Err(HierarchyError::Internal("component vertex missing from its level forest".into()));
    }
    let mut parent = alloc::vec![usize::MAX; n];
    seen[root] = true;
    let mut st = alloc::vec![root];
    while let Some(u) = st.pop() {
        order.push(u);
        for &w in forest.neighbors(u) {
            if !removed[w] && !seen[w] {
                seen[w] = true;
                parent[w] = u;
                st.push(w);
            }
        }
    }
    let mut needed = alloc::vec![false; n];
    for &k in keep {
        if !seen[k] {
            return Err(HierarchyError::Internal("component split across trees of T - B".into()));
        }
        needed[k] = true;
    }
    // a vertex is needed iff its subtree (rooted at keep[0]) contains a kept vertex
    for &u in order.iter().rev() {
        if needed[u] && u != root {
            let p = parent[u];
            needed[p] = true;
            edges.push((u.min(p), u.max(p)));
        }
    }
    edges.sort_unstable();
    Ok(edges)
}
