//! Simple undirected graphs, generators, the edge-list text format and the
//! brute-force connectivity oracle.

use alloc::collections::VecDeque;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dsu::UnionFind;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GraphError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("duplicate edge {{{0}, {1}}}")]
    DuplicateEdge(usize, usize),
    #[error("vertex {v} out of range for n = {n}")]
    OutOfRange { v: usize, n: usize },
    #[error("invalid generator parameter: {0}")]
    InvalidParameter(String),
    #[error("invalid query: {0}")]
    InvalidQuery(String),
}

/// Immutable simple undirected graph on vertices `0..n`.
#[derive(Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
    adj: Vec<Vec<usize>>,
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Graph(n={}, m={}, edges={:?})", self.n, self.edges.len(), self.edges)
    }
}

impl Graph {
    /// Builds a graph, rejecting self-loops, duplicates and out-of-range ids.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self, GraphError> {
        let mut list = Vec::new();
        for (u, v) in edges {
            for x in [u, v] {
                if x >= n {
                    return Err(GraphError::OutOfRange { v: x, n });
                }
            }
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            list.push((u.min(v), u.max(v)));
        }
        list.sort_unstable();
        if let Some(w) = list.windows(2).find(|w| w[0] == w[1]) {
            return Err(GraphError::DuplicateEdge(w[0].0, w[0].1));
        }
        let mut adj = alloc::vec![Vec::new(); n];
        for &(u, v) in &list {
            adj[u].push(v);
            adj[v].push(u);
        }
        for a in &mut adj {
            a.sort_unstable();
        }
        Ok(Graph { n, edges: list, adj })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    /// Edges as `(min, max)` pairs in lexicographic order.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Sorted neighbor list.
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n && v < self.n && self.adj[u].binary_search(&v).is_ok()
    }

    /// Connected-component label per vertex; labels are numbered in order of
    /// each component's smallest vertex.
    pub fn components(&self) -> Vec<usize> {
        self.components_avoiding(&alloc::vec![false; self.n]).0
    }

    /// Component labels of `G - removed`; removed vertices get `usize::MAX`.
    /// Also returns the number of components.
    pub fn components_avoiding(&self, removed: &[bool]) -> (Vec<usize>, usize) {
        let mut comp = alloc::vec![usize::MAX; self.n];
        let mut count = 0;
        let mut queue = VecDeque::new();
        for s in 0..self.n {
            if removed[s] || comp[s] != usize::MAX {
                continue;
            }
            comp[s] = count;
            queue.push_back(s);
            while let Some(u) = queue.pop_front() {
                for &w in &self.adj[u] {
                    if !removed[w] && comp[w] == usize::MAX {
                        comp[w] = count;
                        queue.push_back(w);
                    }
                }
            }
            count += 1;
        }
        (comp, count)
    }

    /// Renders the graph in the edge-list text format.
    pub fn to_edge_list(&self) -> String {
        use core::fmt::Write;
        let mut s = String::new();
        let _ = writeln!(s, "{} {}", self.n, self.m());
        for &(u, v) in &self.edges {
            let _ = writeln!(s, "{u} {v}");
        }
        s
    }
}

/// Strictly increasing list of vertex ids.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexSet(Vec<usize>);

impl VertexSet {
    pub fn new() -> Self {
        VertexSet(Vec::new())
    }

    /// Sorts and deduplicates.
    pub fn from_unsorted(mut v: Vec<usize>) -> Self {
        v.sort_unstable();
        v.dedup();
        VertexSet(v)
    }

    /// Validates elements against `n`.
    pub fn checked(v: Vec<usize>, n: usize) -> Result<Self, GraphError> {
        if let Some(&x) = v.iter().find(|&&x| x >= n) {
            return Err(GraphError::OutOfRange { v: x, n });
        }
        Ok(Self::from_unsorted(v))
    }

    pub fn from_mask(mask: &[bool]) -> Self {
        VertexSet(mask.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i).collect())
    }

    pub fn contains(&self, v: usize) -> bool {
        self.0.binary_search(&v).is_ok()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    pub fn to_mask(&self, n: usize) -> Vec<bool> {
        let mut m = alloc::vec![false; n];
        for &v in &self.0 {
            m[v] = true;
        }
        m
    }

    pub fn into_vec(self) -> Vec<usize> {
        self.0
    }
}

impl FromIterator<usize> for VertexSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        Self::from_unsorted(iter.into_iter().collect())
    }
}

/// Parses the edge-list format: a header line `n m`, then `m` lines `u v`.
/// Blank lines and lines starting with `#` are ignored.
pub fn load_edge_list(text: &str) -> Result<Graph, GraphError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (hline, header) = lines.next().ok_or(GraphError::Parse { line: 1, msg: "missing header".into() })?;
    let (n, m) = parse_pair(header, hline)?;
    let mut edges = Vec::with_capacity(m);
    let mut seen = alloc::collections::BTreeSet::new();
    for (line, l) in lines {
        let (u, v) = parse_pair(l, line)?;
        let err = |msg: String| GraphError::Parse { line, msg };
        if u >= n || v >= n {
            return Err(err(alloc::format!("vertex out of range (n = {n})")));
        }
        if u == v {
            return Err(err(alloc::format!("self-loop at {u}")));
        }
        if !seen.insert((u.min(v), u.max(v))) {
            return Err(err(alloc::format!("duplicate edge {u} {v}")));
        }
        edges.push((u, v));
    }
    if edges.len() != m {
        return Err(GraphError::Parse {
            line: hline,
            msg: alloc::format!("header declares {m} edges, found {}", edges.len()),
        });
    }
    Graph::new(n, edges)
}

fn parse_pair(l: &str, line: usize) -> Result<(usize, usize), GraphError> {
    let mut it = l.split_whitespace();
    let mut next = || -> Result<usize, GraphError> {
        it.next()
            .ok_or_else(|| GraphError::Parse { line, msg: "expected two integers".into() })?
            .parse()
            .map_err(|_| GraphError::Parse { line, msg: alloc::format!("not an integer: {l:?}") })
    };
    let a = next()?;
    let b = next()?;
    if it.next().is_some() {
        return Err(GraphError::Parse { line, msg: "trailing tokens".into() });
    }
    Ok((a, b))
}

/// Random and structured graph families.
#[derive(Clone, Debug, PartialEq)]
pub enum Model {
    /// Erdős–Rényi: each of the `n(n-1)/2` pairs independently with probability `p`.
    Gnp { n: usize, p: f64 },
    /// `w × h` grid; vertex `(x, y)` has id `y·w + x`.
    Grid { w: usize, h: usize },
    /// `K_{1,k}` with center `0` and leaves `1..=k`.
    Star { k: usize },
    /// Cycle `0-1-…-(k-1)-0`; `k = 1` is a single vertex, `k = 2` a single edge.
    Cycle { k: usize },
    /// Path `0-1-…-(k-1)`.
    Path { k: usize },
    /// Complete graph `K_k`.
    Complete { k: usize },
    /// `hubs` hub vertices (ids `0..hubs`) and `leaves` leaf vertices; each
    /// hub–leaf pair is an edge independently with probability `p`, and the
    /// hubs form a path. Produces high-degree hubs and deep hierarchies.
    Hubs { hubs: usize, leaves: usize, p: f64 },
    /// Layered graph: tier `j` holds `tiers[j]` vertices (ids assigned tier by
    /// tier) and every pair in consecutive tiers is an edge with probability
    /// `p`. Small upper tiers over large lower ones give deep hierarchies.
    Tiered { tiers: Vec<usize>, p: f64 },
    /// Complete `k`-ary tree of the given depth (root `0`, BFS numbering);
    /// each pair of siblings is additionally joined with probability `p`.
    KaryTree { k: usize, depth: usize, p: f64 },
}

impl Model {
    pub fn vertex_count(&self) -> usize {
        match *self {
            Model::Gnp { n, .. } => n,
            Model::Grid { w, h } => w * h,
            Model::Star { k } => k + 1,
            Model::Cycle { k } | Model::Path { k } | Model::Complete { k } => k,
            Model::Hubs { hubs, leaves, .. } => hubs + leaves,
            Model::Tiered { ref tiers, .. } => tiers.iter().sum(),
            Model::KaryTree { k, depth, .. } => (0..=depth).map(|d| k.pow(d as u32)).sum(),
        }
    }
}

/// Deterministic for a fixed `(model, seed)`.
pub fn generate(model: &Model, seed: u64) -> Result<Graph, GraphError> {
    let bad = |s: &str| Err(GraphError::InvalidParameter(s.into()));
    let prob_ok = |p: f64| (0.0..=1.0).contains(&p);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    match *model {
        Model::Gnp { n, p } => {
            if !prob_ok(p) {
                return bad("p must lie in [0, 1]");
            }
            for u in 0..n {
                for v in u + 1..n {
                    if rng.gen_bool(p) {
                        edges.push((u, v));
                    }
                }
            }
        }
        Model::Grid { w, h } => {
            if w < 1 || h < 1 {
                return bad("grid dimensions must be >= 1");
            }
            for y in 0..h {
                for x in 0..w {
                    let id = y * w + x;
                    if x + 1 < w {
                        edges.push((id, id + 1));
                    }
                    if y + 1 < h {
                        edges.push((id, id + w));
                    }
                }
            }
        }
        Model::Star { k } => {
            if k < 1 {
                return bad("k must be >= 1");
            }
            edges.extend((1..=k).map(|v| (0, v)));
        }
        Model::Cycle { k } => {
            if k < 1 {
                return bad("k must be >= 1");
            }
            edges.extend((0..k.saturating_sub(1)).map(|v| (v, v + 1)));
            if k >= 3 {
                edges.push((0, k - 1));
            }
        }
        Model::Path { k } => {
            if k < 1 {
                return bad("k must be >= 1");
            }
            edges.extend((0..k - 1).map(|v| (v, v + 1)));
        }
        Model::Complete { k } => {
            if k < 1 {
                return bad("k must be >= 1");
            }
            for u in 0..k {
                for v in u + 1..k {
                    edges.push((u, v));
                }
            }
        }
        Model::Hubs { hubs, leaves, p } => {
            if hubs < 1 || !prob_ok(p) {
                return bad("hubs must be >= 1 and p must lie in [0, 1]");
            }
            edges.extend((0..hubs - 1).map(|h| (h, h + 1)));
            for l in 0..leaves {
                for h in 0..hubs {
                    if rng.gen_bool(p) {
                        edges.push((h, hubs + l));
                    }
                }
            }
        }
        Model::Tiered { ref tiers, p } => {
            if !prob_ok(p) {
                return bad("p must lie in [0, 1]");
            }
            let mut start = 0;
            for w in tiers.windows(2) {
                for a in start..start + w[0] {
                    for b in start + w[0]..start + w[0] + w[1] {
                        if rng.gen_bool(p) {
                            edges.push((a, b));
                        }
                    }
                }
                start += w[0];
            }
        }
        Model::KaryTree { k, p, .. } => {
            if k < 1 || !prob_ok(p) {
                return bad("k must be >= 1 and p must lie in [0, 1]");
            }
            let n = model.vertex_count();
            for parent in 0.. {
                let first = parent * k + 1;
                if first >= n {
                    break;
                }
                for a in first..first + k {
                    edges.push((parent, a));
                    for b in a + 1..first + k {
                        if rng.gen_bool(p) {
                            edges.push((a, b));
                        }
                    }
                }
            }
        }
    }
    Graph::new(model.vertex_count(), edges)
}

/// Ground truth: is there an `s`–`t` path in `G - faults`?
pub fn oracle_connected(g: &Graph, s: usize, t: usize, faults: &VertexSet) -> Result<bool, GraphError> {
    for x in [s, t] {
        if x >= g.n() {
            return Err(GraphError::OutOfRange { v: x, n: g.n() });
        }
        if faults.contains(x) {
            return Err(GraphError::InvalidQuery(alloc::format!("vertex {x} is in the fault set")));
        }
    }
    if s == t {
        return Ok(true);
    }
    let mut seen = faults.to_mask(g.n());
    seen[s] = true;
    let mut stack = alloc::vec![s];
    while let Some(u) = stack.pop() {
        for &w in g.neighbors(u) {
            if w == t {
                return Ok(true);
            }
            if !seen[w] {
                seen[w] = true;
                stack.push(w);
            }
        }
    }
    Ok(false)
}

/// Edge with an integer weight and a tag that distinguishes parallel edges.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct WeightedEdge {
    pub u: usize,
    pub v: usize,
    pub tag: u64,
    pub weight: u64,
}

impl WeightedEdge {
    fn key(&self) -> (u64, usize, usize, u64) {
        (self.weight, self.u.min(self.v), self.u.max(self.v), self.tag)
    }
}

/// Kruskal's algorithm. Ties are broken by the endpoint pair, then the tag,
/// so the result is deterministic. Returns indices into `edges`, ascending.
pub fn min_spanning_forest(n: usize, edges: &[WeightedEdge]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..edges.len()).collect();
    order.sort_by_key(|&i| edges[i].key());
    let mut uf = UnionFind::new(n);
    let mut out: Vec<usize> = order.into_iter().filter(|&i| edges[i].u != edges[i].v && uf.union(edges[i].u, edges[i].v).is_some()).collect();
    out.sort_unstable();
    out
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use alloc::vec;
    use proptest::prelude::*;

    pub(crate) fn petersen() -> Graph {
        let mut e = vec![];
        for i in 0..5 {
            e.push((i, (i + 1) % 5));
            e.push((i, i + 5));
            e.push((5 + i, 5 + (i + 2) % 5));
        }
        Graph::new(10, e).unwrap()
    }

    #[test]
    fn parses_path_and_rejects_self_loop() {
        let g = load_edge_list("3 2\n0 1\n1 2").unwrap();
        assert_eq!(g.m(), 2);
        assert_eq!(g.neighbors(1), &[0, 2]);
        assert!(matches!(load_edge_list("2 1\n0 0"), Err(GraphError::Parse { line: 2, .. })));
        assert!(matches!(load_edge_list("3 2\n0 1\n1 0"), Err(GraphError::Parse { line: 3, .. })));
        assert!(matches!(load_edge_list("3 1\n0 5"), Err(GraphError::Parse { line: 2, .. })));
        assert!(matches!(load_edge_list("3 1\n0 x"), Err(GraphError::Parse { line: 2, .. })));
        assert!(load_edge_list("3 2\n0 1").is_err());
    }

    #[test]
    fn k4_from_text() {
        let g = load_edge_list("4 6\n0 1\n0 2\n0 3\n1 2\n1 3\n2 3\n").unwrap();
        assert!((0..4).all(|v| g.degree(v) == 3));
        assert_eq!(load_edge_list(&g.to_edge_list()).unwrap(), g);
    }

    #[test]
    fn generators() {
        let s = generate(&Model::Star { k: 9 }, 0).unwrap();
        assert_eq!(s.degree(0), 9);
        assert_eq!(s.n(), 10);
        let gr = generate(&Model::Grid { w: 3, h: 3 }, 0).unwrap();
        assert_eq!((gr.n(), gr.m()), (9, 2 * 9 - 3 - 3));
        let e = generate(&Model::Gnp { n: 50, p: 0.0 }, 7).unwrap();
        assert_eq!(e.m(), 0);
        let full = generate(&Model::Gnp { n: 12, p: 1.0 }, 7).unwrap();
        assert_eq!(full.m(), 66);
        assert_eq!(generate(&Model::Cycle { k: 8 }, 0).unwrap().m(), 8);
        assert!(generate(&Model::Gnp { n: 5, p: 1.5 }, 0).is_err());
        assert!(generate(&Model::Star { k: 0 }, 0).is_err());
        let a = generate(&Model::Gnp { n: 40, p: 0.2 }, 3).unwrap();
        let b = generate(&Model::Gnp { n: 40, p: 0.2 }, 3).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn oracle_basics() {
        let p = generate(&Model::Path { k: 3 }, 0).unwrap();
        assert!(!oracle_connected(&p, 0, 2, &VertexSet::from_unsorted(vec![1])).unwrap());
        assert!(oracle_connected(&p, 0, 2, &VertexSet::new()).unwrap());
        assert!(oracle_connected(&p, 1, 1, &VertexSet::new()).unwrap());
        assert!(oracle_connected(&p, 0, 2, &VertexSet::from_unsorted(vec![0])).is_err());
    }

    #[test]
    fn petersen_is_3_connected() {
        let g = petersen();
        for a in 0..10 {
            for b in a + 1..10 {
                let f = VertexSet::from_unsorted(vec![a, b]);
                for s in 0..10 {
                    for t in 0..10 {
                        if !f.contains(s) && !f.contains(t) {
                            assert!(oracle_connected(&g, s, t, &f).unwrap());
                        }
                    }
                }
            }
        }
    }

    fn w(u: usize, v: usize, weight: u64) -> WeightedEdge {
        WeightedEdge { u, v, tag: 0, weight }
    }

    #[test]
    fn msf_examples() {
        assert_eq!(min_spanning_forest(3, &[w(0, 1, 1), w(1, 2, 1), w(0, 2, 2)]), vec![0, 1]);
        assert_eq!(min_spanning_forest(4, &[w(0, 1, 5), w(2, 3, 1)]), vec![0, 1]);
        let c4 = [w(0, 1, 1), w(1, 2, 2), w(2, 3, 3), w(3, 0, 4)];
        assert_eq!(min_spanning_forest(4, &c4), vec![0, 1, 2]);
        // parallel edges: smaller tag wins
        let par = [WeightedEdge { u: 0, v: 1, tag: 9, weight: 1 }, WeightedEdge { u: 1, v: 0, tag: 3, weight: 1 }];
        assert_eq!(min_spanning_forest(2, &par), vec![1]);
    }

    fn arb_graph(max_n: usize) -> impl Strategy<Value = Graph> {
        (1..=max_n, 0.0..1.0f64, any::<u64>()).prop_map(|(n, p, s)| generate(&Model::Gnp { n, p }, s).unwrap())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn oracle_is_equivalence(g in arb_graph(24), fs in proptest::collection::vec(0usize..24, 0..3)) {
            let f = VertexSet::from_unsorted(fs.into_iter().filter(|&x| x < g.n()).collect());
            let live: Vec<usize> = (0..g.n()).filter(|&v| !f.contains(v)).collect();
            let c = |a: usize, b: usize| oracle_connected(&g, a, b, &f).unwrap();
            for &a in &live {
                prop_assert!(c(a, a));
                for &b in &live {
                    prop_assert_eq!(c(a, b), c(b, a));
                    if c(a, b) {
                        for &d in &live {
                            prop_assert_eq!(c(b, d), c(a, d));
                        }
                    }
                }
            }
        }

        #[test]
        fn msf_cycle_property(g in arb_graph(32), ws in proptest::collection::vec(0u64..5, 600)) {
            let es: Vec<WeightedEdge> = g.edges().iter().enumerate().map(|(i, &(u, v))| w(u, v, ws[i % ws.len()])).collect();
            let chosen = min_spanning_forest(g.n(), &es);
            let mut uf = UnionFind::new(g.n());
            for &i in &chosen {
                prop_assert!(uf.union(es[i].u, es[i].v).is_some(), "cycle in forest");
            }
            let comps = g.components();
            for &(u, v) in g.edges() {
                prop_assert!(uf.same(u, v));
                prop_assert_eq!(comps[u], comps[v]);
            }
            // cycle property: each non-tree edge is at least as heavy as every forest edge on its path
            let mut adj = vec![Vec::new(); g.n()];
            for &i in &chosen {
                adj[es[i].u].push((es[i].v, es[i].weight));
                adj[es[i].v].push((es[i].u, es[i].weight));
            }
            for (i, e) in es.iter().enumerate() {
                if chosen.binary_search(&i).is_ok() { continue; }
                let mut best = vec![None; g.n()];
                best[e.u] = Some(0u64);
                let mut st = vec![e.u];
                while let Some(x) = st.pop() {
                    for &(y, wt) in &adj[x] {
                        if best[y].is_none() {
                            best[y] = Some(best[x].unwrap().max(wt));
                            st.push(y);
                        }
                    }
                }
                prop_assert!(best[e.v].unwrap() <= e.weight);
            }
        }
    }
}
