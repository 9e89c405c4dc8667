//! Per-color coarsening of `H⁰`: components are unified along `T^∪` edges and
//! along graph edges leaving `S`-vertices until every spanning tree `T(K)` is
//! Steiner-free and non-`S` vertices keep low tree degree.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::dsu::UnionFind;
use crate::graph::{Graph, VertexSet};

use super::base::BaseHierarchy;
use super::partition::ColorPartition;
use super::{euler_times, HierarchyError};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoarseComponent {
    /// `id(K) = r_K + 1`.
    pub id: u32,
    pub vertices: VertexSet,
    /// Root `r_K` of `T(K)`: the smallest vertex of `K`.
    pub root: usize,
    pub parent: Option<usize>,
    pub children: Vec<usize>,
    pub depth: usize,
    pub pre: u32,
    pub post: u32,
    /// `N(H_K)`.
    pub neighbors: VertexSet,
    /// Base components unified into `K`.
    pub gammas: Vec<usize>,
    pub tree_edges: Vec<(usize, usize)>,
}

#[derive(Clone, Debug)]
pub struct CoarseHierarchy {
    pub n: usize,
    /// 1-based color `i` of the set `S = S_i` this hierarchy was built for.
    pub color: usize,
    pub in_s: Vec<bool>,
    /// Components ordered by root vertex.
    pub components: Vec<CoarseComponent>,
    pub comp_of: Vec<usize>,
    pub roots: Vec<usize>,
    pub tree_parent: Vec<Option<usize>>,
    pub tree_children: Vec<Vec<usize>>,
    pub tree_pre: Vec<u32>,
    pub tree_post: Vec<u32>,
}

impl CoarseHierarchy {
    /// `a ⪯ b` on component indices.
    pub fn is_descendant(&self, a: usize, b: usize) -> bool {
        let (ca, cb) = (&self.components[a], &self.components[b]);
        cb.pre <= ca.pre && ca.post <= cb.post
    }

    /// Index of the component with the given id.
    pub fn component_by_id(&self, id: u32) -> Option<usize> {
        let root = (id as usize).checked_sub(1)?;
        let c = *self.comp_of.get(root)?;
        (self.components[c].root == root).then_some(c)
    }

    /// Whether `a` is `b` or a `T(K)`-ancestor of `b` (same component required).
    pub fn tree_ancestor(&self, a: usize, b: usize) -> bool {
        self.comp_of[a] == self.comp_of[b] && self.tree_pre[a] <= self.tree_pre[b] && self.tree_post[b] <= self.tree_post[a]
    }

    /// Vertices of `T_v(K_v)`.
    pub fn subtree(&self, v: usize) -> Vec<usize> {
        let mut out = Vec::new();
        let mut st = alloc::vec![v];
        while let Some(x) = st.pop() {
            out.push(x);
            st.extend(self.tree_children[x].iter().copied());
        }
        out.sort_unstable();
        out
    }

    /// `V(H_K)`, sorted.
    pub fn subtree_vertices(&self, c: usize) -> Vec<usize> {
        let mut out = Vec::new();
        let mut st = alloc::vec![c];
        while let Some(x) = st.pop() {
            out.extend(self.components[x].vertices.iter());
            st.extend(self.components[x].children.iter().copied());
        }
        out.sort_unstable();
        out
    }

    /// Chain `K_v, parent(K_v), …, root`.
    pub fn ancestors(&self, c: usize) -> Vec<usize> {
        let mut out = alloc::vec![c];
        let mut x = c;
        while let Some(p) = self.components[x].parent {
            out.push(p);
            x = p;
        }
        out
    }

    pub fn tree_degree(&self, v: usize) -> usize {
        self.tree_children[v].len() + usize::from(self.tree_parent[v].is_some())
    }

    pub fn height(&self) -> usize {
        self.components.iter().map(|c| c.depth + 1).max().unwrap_or(0)
    }

    pub fn dump(&self) -> alloc::string::String {
        use core::fmt::Write;
        let mut s = alloc::string::String::new();
        let mut st: Vec<usize> = self.roots.iter().rev().copied().collect();
        while let Some(c) = st.pop() {
            let k = &self.components[c];
            let _ = writeln!(
                s,
                "{:indent$}K{} depth={} vertices={:?} tree={:?}",
                "",
                k.id,
                k.depth,
                k.vertices.as_slice(),
                k.tree_edges,
                indent = 2 * k.depth
            );
            st.extend(k.children.iter().rev().copied());
        }
        s
    }
}

/// Coarsens `h0` for `S = S_color`, processing base components in postorder.
pub fn coarsen(g: &Graph, h0: &BaseHierarchy, part: &ColorPartition, color: usize) -> Result<CoarseHierarchy, HierarchyError> {
    coarsen_with_order(g, h0, part, color, &h0.postorder)
}

/// A postorder of `H⁰` with siblings visited in a seeded random order.
pub fn shuffled_postorder(h0: &BaseHierarchy, seed: u64) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(h0.components.len());
    let mut roots = h0.roots.clone();
    roots.shuffle(&mut rng);
    let mut st: Vec<(usize, bool)> = roots.into_iter().rev().map(|r| (r, false)).collect();
    while let Some((c, expanded)) = st.pop() {
        if expanded {
            out.push(c);
            continue;
        }
        st.push((c, true));
        let mut ch = h0.components[c].children.clone();
        ch.shuffle(&mut rng);
        st.extend(ch.into_iter().rev().map(|x| (x, false)));
    }
    out
}

struct State<'a> {
    g: &'a Graph,
    h0: &'a BaseHierarchy,
    uf: UnionFind,
    top: Vec<usize>,
    members: Vec<Vec<usize>>,
    edges: Vec<Vec<(usize, usize)>>,
}

impl State<'_> {
    fn rep(&self, gamma: usize) -> usize {
        self.uf.find_const(gamma)
    }

    fn rep_of_vertex(&self, v: usize) -> usize {
        self.rep(self.h0.comp_of[v])
    }

    /// The child of component `k` whose subtree contains component `target`.
    fn child_toward(&self, k: usize, target: usize) -> Result<usize, HierarchyError> {
        let mut cur = self.top[target];
        while let Some(p) = self.h0.components[cur].parent {
            if self.rep(p) == k {
                return Ok(self.rep(cur));
            }
            cur = p;
        }
        Err(HierarchyError::Internal("component is not a descendant".into()))
    }

    fn unify(&self, k0: usize, list: &[usize]) -> Result<Vec<(usize, usize)>, HierarchyError> {
        let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for &r in list {
            if r != k0 {
                let c = self.child_toward(k0, r)?;
                groups.entry(c).or_default().push(r);
            }
        }
        let mut out = Vec::new();
        for (child, mut ls) in groups {
            let ctop = self.top[child];
            let e = self.members[k0]
                .iter()
                .find_map(|&u| {
                    self.g.neighbors(u).iter().find(|&&w| self.h0.is_descendant(self.h0.comp_of[w], ctop)).map(|&w| (u, w))
                })
                .ok_or_else(|| HierarchyError::Internal("no edge from a component into its child's subtree".into()))?;
            ls.push(self.rep_of_vertex(e.1));
            ls.sort_unstable();
            ls.dedup();
            out.extend(self.unify(child, &ls)?);
            out.push(e);
        }
        Ok(out)
    }
}

/// Coarsening with an explicit processing order (must be a postorder of `H⁰`).
pub fn coarsen_with_order(
    g: &Graph,
    h0: &BaseHierarchy,
    part: &ColorPartition,
    color: usize,
    order: &[usize],
) -> Result<CoarseHierarchy, HierarchyError> {
    let n = g.n();
    if part.colors.len() != n || color == 0 || color > part.parts() {
        return Err(HierarchyError::InvalidParameter("color partition does not match the graph".into()));
    }
    let in_s = part.part_mask(color);
    let nc = h0.components.len();
    let mut st = State {
        g,
        h0,
        uf: UnionFind::new(nc),
        top: (0..nc).collect(),
        members: h0.components.iter().map(|c| c.vertices.as_slice().to_vec()).collect(),
        edges: h0.components.iter().map(|c| c.tree_edges.clone()).collect(),
    };
    for &gamma in order {
        loop {
            let k = st.rep(gamma);
            let topk = st.top[k];
            let eligible = |y: usize| {
                let gy = h0.comp_of[y];
                h0.is_descendant(gy, topk) && st.rep(gy) != k
            };
            let mut best: Option<(usize, usize)> = None;
            for x in h0.components[gamma].vertices.iter() {
                let cands = h0.t_union_adj[x].iter().chain(if in_s[x] { g.neighbors(x) } else { &[] });
                for &y in cands {
                    if eligible(y) && best.is_none_or(|b| (x, y) < b) {
                        best = Some((x, y));
                    }
                }
            }
            let Some((x, y)) = best else { break };
            let k1 = st.rep_of_vertex(y);
            let k0 = st.child_toward(k, k1)?;
            let extra = st.unify(k0, &[k1])?;
            let mut reps = alloc::vec![k, k0, k1];
            for &(a, b) in &extra {
                reps.push(st.rep_of_vertex(a));
                reps.push(st.rep_of_vertex(b));
            }
            reps.sort_unstable();
            reps.dedup();
            // the unified set must be a connected subtree hanging from k
            for &r in &reps {
                if r != k {
                    let p = h0.components[st.top[r]].parent.map(|p| st.rep(p));
                    if !p.is_some_and(|p| reps.contains(&p)) {
                        return Err(HierarchyError::Internal("unification is not a connected subtree".into()));
                    }
                }
            }
            let mut verts = Vec::new();
            let mut edges = Vec::new();
            for &r in &reps {
                verts.append(&mut st.members[r]);
                edges.append(&mut st.edges[r]);
            }
            edges.extend(extra);
            edges.push((x, y));
            verts.sort_unstable();
            let top = st.top[k];
            for &r in &reps {
                st.uf.union(k, r);
            }
            let nr = st.rep(gamma);
            st.top[nr] = top;
            st.members[nr] = verts;
            st.edges[nr] = edges;
        }
    }
    finalize(g, h0, st, color, in_s)
}

fn finalize(g: &Graph, h0: &BaseHierarchy, st: State<'_>, color: usize, in_s: Vec<bool>) -> Result<CoarseHierarchy, HierarchyError> {
    let n = g.n();
    let nc0 = h0.components.len();
    let mut reps: Vec<usize> = (0..nc0).filter(|&c| st.rep(c) == c).collect();
    reps.sort_by_key(|&r| st.members[r][0]);
    let mut index_of = alloc::vec![usize::MAX; nc0];
    for (i, &r) in reps.iter().enumerate() {
        index_of[r] = i;
    }
    let mut comp_of = alloc::vec![usize::MAX; n];
    let mut tree_parent = alloc::vec![None; n];
    let mut tree_children = alloc::vec![Vec::new(); n];
    let mut tree_pre = alloc::vec![0u32; n];
    let mut tree_post = alloc::vec![0u32; n];
    let mut comps = Vec::with_capacity(reps.len());
    let mut vuf = UnionFind::new(n);
    for (i, &r) in reps.iter().enumerate() {
        let verts = &st.members[r];
        for &v in verts {
            comp_of[v] = i;
        }
        let mut tree_edges = Vec::new();
        for &(a, b) in &st.edges[r] {
            if comp_of[a] != i || comp_of[b] != i {
                return Err(HierarchyError::Internal("spanning tree keeps a Steiner point".into()));
            }
            if !g.has_edge(a, b) {
                return Err(HierarchyError::Internal("tree edge is not a graph edge".into()));
            }
            if vuf.union(a, b).is_some() {
                tree_edges.push((a.min(b), a.max(b)));
            }
        }
        if tree_edges.len() + 1 != verts.len() {
            return Err(HierarchyError::Internal("component tree does not span its component".into()));
        }
        tree_edges.sort_unstable();
        let root = verts[0];
        let mut adj: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for &(a, b) in &tree_edges {
            adj.entry(a).or_default().push(b);
            adj.entry(b).or_default().push(a);
        }
        let mut stack = alloc::vec![root];
        while let Some(u) = stack.pop() {
            if let Some(ns) = adj.get(&u) {
                for &w in ns {
                    if Some(w) != tree_parent[u] {
                        tree_parent[w] = Some(u);
                        tree_children[u].push(w);
                        stack.push(w);
                    }
                }
            }
        }
        for &v in verts {
            tree_children[v].sort_unstable();
        }
        let (pre, post) = euler_times_subset(&tree_children, root);
        for (v, p, q) in pre.into_iter().zip(post).map(|((v, p), (_, q))| (v, p, q)) {
            tree_pre[v] = p;
            tree_post[v] = q;
        }
        let mut gammas: Vec<usize> = (0..nc0).filter(|&c| st.rep(c) == r).collect();
        gammas.sort_unstable();
        comps.push(CoarseComponent {
            id: root as u32 + 1,
            vertices: VertexSet::from_unsorted(verts.clone()),
            root,
            parent: h0.components[st.top[r]].parent.map(|p| index_of[st.rep(p)]),
            children: Vec::new(),
            depth: 0,
            pre: 0,
            post: 0,
            neighbors: h0.components[st.top[r]].neighbors.clone(),
            gammas,
            tree_edges,
        });
    }
    let k = comps.len();
    let mut children = alloc::vec![Vec::new(); k];
    let mut roots = Vec::new();
    for c in 0..k {
        match comps[c].parent {
            Some(p) => children[p].push(c),
            None => roots.push(c),
        }
    }
    let (pre, post) = euler_times(&children, &roots);
    let mut by_pre: Vec<usize> = (0..k).collect();
    by_pre.sort_by_key(|&c| pre[c]);
    for &c in &by_pre {
        comps[c].depth = comps[c].parent.map_or(0, |p| comps[p].depth + 1);
    }
    for c in 0..k {
        comps[c].children = core::mem::take(&mut children[c]);
        comps[c].pre = pre[c];
        comps[c].post = post[c];
    }
    Ok(CoarseHierarchy { n, color, in_s, components: comps, comp_of, roots, tree_parent, tree_children, tree_pre, tree_post })
}

/// Pre/post times `1..=2|T|` for the tree rooted at `root`.
fn euler_times_subset(children: &[Vec<usize>], root: usize) -> (Vec<(usize, u32)>, Vec<(usize, u32)>) {
    let mut pre = Vec::new();
    let mut post = Vec::new();
    let mut clock = 0u32;
    let mut stack: Vec<(usize, usize)> = alloc::vec![(root, 0)];
    clock += 1;
    pre.push((root, clock));
    while let Some(&mut (v, ref mut i)) = stack.last_mut() {
        if *i < children[v].len() {
            let c = children[v][*i];
            *i += 1;
            clock += 1;
            pre.push((c, clock));
            stack.push((c, 0));
        } else {
            clock += 1;
            post.push((v, clock));
            stack.pop();
        }
    }
    pre.sort_unstable();
    post.sort_unstable();
    (pre, post)
}
