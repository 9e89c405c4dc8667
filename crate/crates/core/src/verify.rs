//! Property suites over a built scheme. Each suite recomputes a structural
//! guarantee directly and counts violations.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::auxgraph::{
    build_aux_graph, classify_edges, cut_direct, cut_formula, down_and_bad_by_formula, gstar_connected, xor_sorted, AuxGraph,
    QueryContext,
};
use crate::dsu::UnionFind;
use crate::graph::{oracle_connected, Graph, VertexSet};
use crate::harness::QuerySampler;
use crate::hierarchy::{
    base::{build_base_hierarchy_logged, DEGREE_THRESHOLD},
    check_decomp, log2, partition::hitting_failures, BaseHierarchy, CoarseHierarchy,
};
use crate::labeling::{FinalLabel, HierarchyArtifacts};
use crate::query::{Prepared, QueryInput, QueryState};
use crate::scheme::{PartitionMode, Scheme};
use crate::sketch::{AncLabel, Sketch};

#[derive(Clone, Debug, PartialEq)]
pub struct SuiteResult {
    pub name: &'static str,
    pub checked: u64,
    pub failures: u64,
    /// Allowed failure fraction; 0 for exact properties.
    pub tolerance: f64,
    pub note: String,
}

impl SuiteResult {
    fn new(name: &'static str) -> Self {
        SuiteResult { name, checked: 0, failures: 0, tolerance: 0.0, note: String::new() }
    }

    fn check(&mut self, ok: bool) {
        self.checked += 1;
        self.failures += u64::from(!ok);
    }

    pub fn passed(&self) -> bool {
        self.failures as f64 <= self.tolerance * self.checked as f64
    }
}

#[derive(Clone, Debug)]
pub struct VerifyOptions {
    pub seed: u64,
    /// Sampled queries for query-driven suites.
    pub queries: usize,
    /// Label sketches are recomputed for every vertex up to this `n`, and for
    /// a sample of vertices beyond it.
    pub label_check_vertices: usize,
    /// Round-by-round invariant checks run only up to this `n`.
    pub invariant_max_n: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { seed: 0, queries: 200, label_check_vertices: 64, invariant_max_n: 128 }
    }
}

/// Bound on the number of decomposition levels: `max(2, log₂ n − 1)`.
pub fn depth_bound(n: usize) -> f64 {
    (log2(n) - 1.0).max(2.0)
}

pub fn decomp_contract(g: &Graph) -> SuiteResult {
    let mut r = SuiteResult::new("decomp_contract");
    let built = build_base_hierarchy_logged(g, &mut |terms, res| {
        r.check(check_decomp(g, terms, DEGREE_THRESHOLD, res).is_ok());
    });
    if let Err(e) = built {
        r.failures += 1;
        r.note = format!("{e}");
    }
    r
}

pub fn base_hierarchy_suites(g: &Graph, h: &BaseHierarchy) -> Vec<SuiteResult> {
    let n = g.n();
    let mut depth = SuiteResult::new("hierarchy_depth");
    depth.check(h.levels() as f64 <= depth_bound(n));
    depth.note = format!("L = {}, bound {:.2}", h.levels(), depth_bound(n));

    let mut anc = SuiteResult::new("base_edge_ancestry");
    for &(u, v) in g.edges() {
        let (a, b) = (h.comp_of[u], h.comp_of[v]);
        anc.check(h.is_descendant(a, b) || h.is_descendant(b, a));
    }

    let mut conn = SuiteResult::new("base_subtree_connected");
    let mut steiner = SuiteResult::new("steiner_tree_degree");
    for c in 0..h.components.len() {
        let inside = h.subtree_vertices(c);
        let removed: Vec<bool> = (0..n).map(|v| !inside.contains(v)).collect();
        conn.check(g.components_avoiding(&removed).1 == 1);
        let mut deg = alloc::collections::BTreeMap::new();
        for &(a, b) in &h.components[c].tree_edges {
            *deg.entry(a).or_insert(0usize) += 1;
            *deg.entry(b).or_insert(0usize) += 1;
        }
        steiner.check(deg.values().all(|&d| d <= DEGREE_THRESHOLD));
    }

    let mut tu = SuiteResult::new("t_union_degree");
    let bound = 2.0 * log2(n);
    tu.check(n < 2 || h.max_t_union_degree() as f64 <= bound);
    tu.note = format!("max degree {}, bound {:.2}", h.max_t_union_degree(), bound);
    alloc::vec![depth, anc, conn, steiner, tu]
}

pub fn coarse_hierarchy_suites(g: &Graph, h0: &BaseHierarchy, hs: &[&CoarseHierarchy]) -> Vec<SuiteResult> {
    let n = g.n();
    let mut coarsening = SuiteResult::new("coarsening_valid");
    let mut tree = SuiteResult::new("coarse_spanning_tree");
    let mut deg = SuiteResult::new("coarse_tree_degree");
    let mut nb = SuiteResult::new("neighbor_ancestry");
    let mut conn = SuiteResult::new("coarse_subtree_connected");
    let bound = 3.0 * log2(n);
    let mut max_deg = 0;
    for h in hs {
        let mut seen = alloc::vec![0u32; n];
        for (k, comp) in h.components.iter().enumerate() {
            // union of γ's forming a connected subtree of H⁰
            let mut from_gammas: Vec<usize> = comp.gammas.iter().flat_map(|&c| h0.components[c].vertices.iter()).collect();
            from_gammas.sort_unstable();
            let tops = comp.gammas.iter().filter(|&&c| h0.components[c].parent.is_none_or(|p| !comp.gammas.contains(&p))).count();
            coarsening.check(from_gammas.as_slice() == comp.vertices.as_slice() && tops == 1);
            for v in comp.vertices.iter() {
                seen[v] += 1;
            }
            // T(K): a tree on exactly K rooted at min(K)
            let mut uf = UnionFind::new(n);
            let mut ok = comp.tree_edges.len() + 1 == comp.vertices.len() && comp.root == comp.vertices.as_slice()[0];
            for &(a, b) in &comp.tree_edges {
                ok &= comp.vertices.contains(a) && comp.vertices.contains(b) && uf.union(a, b).is_some();
            }
            tree.check(ok);
            // N(H_K)
            let inside = h.subtree_vertices(k);
            let mask: Vec<bool> = (0..n).map(|v| inside.binary_search(&v).is_ok()).collect();
            let mut direct: Vec<usize> = inside.iter().flat_map(|&v| g.neighbors(v).iter().copied()).filter(|&w| !mask[w]).collect();
            direct.sort_unstable();
            direct.dedup();
            let strict = comp.neighbors.iter().all(|u| {
                let ku = h.comp_of[u];
                ku != k && h.is_descendant(k, ku)
            });
            nb.check(strict && direct.as_slice() == comp.neighbors.as_slice());
            let removed: Vec<bool> = mask.iter().map(|&b| !b).collect();
            conn.check(g.components_avoiding(&removed).1 == 1);
        }
        coarsening.check(seen.iter().all(|&c| c == 1));
        for v in 0..n {
            if !h.in_s[v] {
                let d = h.tree_degree(v);
                max_deg = max_deg.max(d);
                deg.check(d as f64 <= bound);
            }
        }
    }
    deg.note = format!("max non-S degree {max_deg}, bound {bound:.2}");
    alloc::vec![coarsening, tree, deg, nb, conn]
}

/// Typed-edge structure of the unsparsified and sparsified auxiliary graphs.
pub fn aux_suites(g: &Graph, h: &CoarseHierarchy, full: &AuxGraph, sparse: &AuxGraph) -> Vec<SuiteResult> {
    let n = g.n();
    let mut related = SuiteResult::new("aux_endpoint_ancestry");
    for e in &full.edges {
        let (a, b) = (h.comp_of[e.tail], h.comp_of[e.head]);
        related.check(h.is_descendant(a, b) || h.is_descendant(b, a));
    }
    let mut nset = SuiteResult::new("aux_neighbor_sets");
    for (k, comp) in h.components.iter().enumerate() {
        let inside = h.subtree_vertices(k);
        let mut nbrs: Vec<usize> = Vec::new();
        for &v in &inside {
            for &i in &full.incident[v] {
                let w = full.edges[i].other(v);
                if inside.binary_search(&w).is_err() {
                    nbrs.push(w);
                }
            }
        }
        nset.check(VertexSet::from_unsorted(nbrs) == comp.neighbors);
    }
    let mut orient = SuiteResult::new("orientation");
    let mut out_total = 0;
    for e in &sparse.edges {
        orient.check(full.find(e.key()).is_some() && e.tail != e.head);
    }
    for v in 0..n {
        out_total += sparse.out[v].len();
        orient.check(sparse.out[v].iter().all(|&i| sparse.edges[i].tail == v));
    }
    orient.check(out_total == sparse.edges.len() && sparse.max_outdegree() <= sparse.rounds.max(1));
    orient.note = format!("max outdegree {}, rounds {}", sparse.max_outdegree(), sparse.rounds);
    alloc::vec![related, nset, orient]
}

fn random_subset(rng: &mut ChaCha8Rng, from: &[usize]) -> VertexSet {
    let p: f64 = rng.gen();
    from.iter().copied().filter(|_| rng.gen::<f64>() < p).collect()
}

/// Edge classes, the cut formula and query-graph equivalence on sampled
/// queries, against the unsparsified `Ĝ` (equivalence also over the
/// sparsified one, which may fail with small probability).
pub fn query_graph_suites(g: &Graph, sc: &Scheme, full: &[AuxGraph], opts: &VerifyOptions) -> Vec<SuiteResult> {
    let n = g.n();
    let mut classes = SuiteResult::new("edge_classes");
    let mut cut = SuiteResult::new("cut_formula");
    let mut obs = SuiteResult::new("cut_is_sum_of_vertex_sets");
    let mut eq_full = SuiteResult::new("query_graph_equivalence");
    let mut eq_sparse = SuiteResult::new("sparsified_equivalence");
    eq_sparse.tolerance = 0.01;
    let Some(mut sampler) = QuerySampler::new(n, sc.config.f) else {
        return alloc::vec![classes, cut, obs, eq_full, eq_sparse];
    };
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0xc1a55);
    for _ in 0..opts.queries {
        let q = sampler.sample(&mut rng);
        let color = sc.free_color(&q.faults);
        let h = &sc.colors[color - 1].hierarchy;
        let aux = &full[color - 1];
        let sparse = &sc.colors[color - 1].aux;
        let ctx = QueryContext::new(h, q.s, q.t, q.faults.clone());
        let gverts: Vec<usize> = (0..n).filter(|&v| ctx.vertex_in_gstar(h, v)).collect();
        let mut star_of: Vec<Vec<usize>> = alloc::vec![Vec::new(); n];
        for &v in &gverts {
            let c = classify_edges(aux, h, &ctx, v).expect("vertex in G*");
            let (down, bad) = down_and_bad_by_formula(aux, h, &ctx, v);
            let ud = xor_sorted(&c.up, &c.down);
            classes.check(
                down == c.down
                    && bad == c.bad
                    && ud.len() == c.up.len() + c.down.len()
                    && c.bad.iter().all(|i| ud.binary_search(i).is_ok())
                    && xor_sorted(&ud, &c.bad) == c.star,
            );
            star_of[v] = c.star;
        }
        let u = random_subset(&mut rng, &gverts);
        let direct = cut_direct(aux, h, &ctx, &u);
        cut.check(cut_formula(aux, h, &ctx, &u) == direct);
        let mut acc = Vec::new();
        for v in u.iter() {
            acc = xor_sorted(&acc, &star_of[v]);
        }
        obs.check(acc == direct);
        let want = oracle_connected(g, q.s, q.t, &q.faults).expect("valid query");
        eq_full.check(gstar_connected(aux, h, &ctx, q.s, q.t) == want);
        eq_sparse.check(gstar_connected(sparse, h, &ctx, q.s, q.t) == want);
    }
    alloc::vec![classes, cut, obs, eq_full, eq_sparse]
}

/// Anc-label tests against direct traversal.
pub fn ancestry_suite(sc: &Scheme, samples: usize, seed: u64) -> SuiteResult {
    let mut r = SuiteResult::new("ancestry_labels");
    let n = sc.n();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for c in &sc.colors {
        let h = &c.hierarchy;
        for _ in 0..samples {
            let (u, v) = (rng.gen_range(0..n), rng.gen_range(0..n));
            let (a, b) = (AncLabel::of(h, u), AncLabel::of(h, v));
            let (ku, kv) = (h.comp_of[u], h.comp_of[v]);
            let mut in_tree = false;
            let mut x = Some(v);
            while let Some(y) = x {
                if y == u {
                    in_tree = true;
                }
                x = h.tree_parent[y];
            }
            r.check(a.comp_below(&b) == h.is_descendant(ku, kv) && a.same_comp(&b) == (ku == kv) && b.tree_below(&a) == in_tree && (a == b) == (u == v));
        }
    }
    r
}

fn vertex_sample(n: usize, limit: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    if n <= limit {
        (0..n).collect()
    } else {
        let mut v: Vec<usize> = (0..limit).map(|_| rng.gen_range(0..n)).collect();
        v.sort_unstable();
        v.dedup();
        v
    }
}

/// Every stored sketch equals its recomputation from the sparsified `Ĝ`.
pub fn label_sketch_suite(sc: &Scheme, opts: &VerifyOptions) -> SuiteResult {
    let mut r = SuiteResult::new("label_sketches");
    let n = sc.n();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0x1abe1);
    let verts = vertex_sample(n, opts.label_check_vertices, &mut rng);
    for c in &sc.colors {
        let art = sc.artifacts(c.color);
        let (h, aux) = (art.h, art.aux);
        let up = |v: usize| crate::auxgraph::edges_up(aux, h, v);
        let subtree_sketch = |v: usize| {
            let mut edges = Vec::new();
            for u in h.subtree(v) {
                edges = xor_sorted(&edges, &up(u));
            }
            art.sketch_of_edges(edges)
        };
        let mut comps: Vec<usize> = verts.iter().map(|&v| h.comp_of[v]).collect();
        comps.sort_unstable();
        comps.dedup();
        for &k in &comps {
            let comp = &h.components[k];
            let label = sc.labels[comp.root].hierarchies[c.color - 1].components[0].clone();
            r.check(label.id == comp.id && *label.sketch_up == subtree_sketch(comp.root));
            r.check(label.neighbors.len() == comp.neighbors.len());
            for (e, u) in label.neighbors.iter().zip(comp.neighbors.iter()) {
                let set = xor_sorted(&crate::auxgraph::edges_to_component(aux, h, u, k), &crate::auxgraph::edges_of_type(aux, h, u, k));
                r.check(e.vertex as usize == u && e.sketch == art.sketch_of_edges(set));
            }
        }
        for &v in &verts {
            let hl = &sc.labels[v].hierarchies[c.color - 1];
            let chain: Vec<u32> = h.ancestors(h.comp_of[v]).iter().map(|&k| h.components[k].id).collect();
            r.check(hl.components.iter().map(|k| k.id).collect::<Vec<_>>() == chain);
            match &hl.subtree {
                None => r.check(h.in_s[v]),
                Some(b) => {
                    r.check(!h.in_s[v] && *b.sketch_up == subtree_sketch(v));
                    r.check(b.children.iter().map(|c| c.vertex as usize).eq(h.tree_children[v].iter().copied()));
                    for ch in &b.children {
                        r.check(*ch.sketch_up == subtree_sketch(ch.vertex as usize));
                    }
                    let want: Vec<_> = aux.out[v].iter().map(|&i| art.eid(&aux.edges[i])).collect();
                    r.check(b.out_edges == want);
                }
            }
        }
    }
    r
}

/// Serialization round trip and bit accounting.
pub fn label_codec_suite(sc: &Scheme, samples: usize, seed: u64) -> SuiteResult {
    let mut r = SuiteResult::new("label_roundtrip");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for v in vertex_sample(sc.n(), samples, &mut rng) {
        let l = &sc.labels[v];
        let bytes = l.to_bytes();
        let back = FinalLabel::from_bytes(&bytes);
        let bd = l.breakdown();
        r.check(
            back.as_ref() == Ok(l)
                && bytes.len() as u64 == l.bit_length().div_ceil(8)
                && bd.by_section.iter().sum::<u64>() == bd.total
                && bd.by_hierarchy.iter().sum::<u64>() + crate::labeling::codec::HEADER_BITS == bd.total,
        );
    }
    r
}

/// Membership of a vertex in exactly one part, parts inside single
/// components of `G* − F`, and part sketches equal to direct recomputation,
/// after initialization and after every round.
pub fn query_invariant_suite(g: &Graph, sc: &Scheme, opts: &VerifyOptions) -> SuiteResult {
    let mut r = SuiteResult::new("query_invariants");
    let n = g.n();
    if n > opts.invariant_max_n {
        r.note = format!("skipped: n = {n} exceeds {}", opts.invariant_max_n);
        return r;
    }
    let Some(mut sampler) = QuerySampler::new(n, sc.config.f) else {
        return r;
    };
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0x1a1a);
    let queries = opts.queries.min(50);
    for _ in 0..queries {
        let q = sampler.sample(&mut rng);
        let input = QueryInput { s: sc.label(q.s), t: sc.label(q.t), faults: q.faults.iter().map(|x| sc.label(x)).collect() };
        let Ok(Prepared::Running(mut st)) = QueryState::prepare(&input, false) else { continue };
        let art = sc.artifacts(st.color);
        let ctx = QueryContext::new(art.h, q.s, q.t, q.faults.clone());
        let mut comp = UnionFind::new(n);
        for e in &art.aux.edges {
            if ctx.is_valid(art.h, e) && !q.faults.contains(e.tail) && !q.faults.contains(e.head) {
                comp.union(e.tail, e.head);
            }
        }
        let anc: Vec<AncLabel> = (0..n).map(|v| AncLabel::of(art.h, v)).collect();
        let check = |st: &QueryState, r: &mut SuiteResult, comp: &mut UnionFind| {
            for v in 0..n {
                if ctx.vertex_in_gstar(art.h, v) && !q.faults.contains(v) {
                    r.check(st.parts().filter(|p| p.contains(&anc[v])).count() == 1);
                }
            }
            for p in st.parts() {
                let members: VertexSet = (0..n).filter(|&v| ctx.vertex_in_gstar(art.h, v) && !q.faults.contains(v) && p.contains(&anc[v])).collect();
                let first = members.iter().next();
                r.check(first.is_some_and(|a| members.iter().all(|b| comp.same(a, b))));
                r.check(p.sketch == expected_part_sketch(&art, &ctx, &members));
            }
        };
        check(&st, &mut r, &mut comp);
        for round in 0..st.ctx.params.p {
            if st.decided() {
                break;
            }
            st.round(round);
            check(&st, &mut r, &mut comp);
        }
    }
    r
}

/// `sketch(E*_cut(P) − E*(F → P))` from the reference edge sets.
pub fn expected_part_sketch(art: &HierarchyArtifacts<'_>, ctx: &QueryContext, members: &VertexSet) -> Sketch {
    let cut = cut_direct(art.aux, art.h, ctx, members);
    let from_f: Vec<usize> = cut
        .iter()
        .copied()
        .filter(|&i| {
            let e = &art.aux.edges[i];
            ctx.faults.contains(e.tail) && members.contains(e.head)
        })
        .collect();
    art.sketch_of_edges(xor_sorted(&cut, &from_f))
}

/// Agreement with the oracle over sampled queries, and the one-sided error.
pub fn query_oracle_suites(g: &Graph, sc: &Scheme, opts: &VerifyOptions) -> Vec<SuiteResult> {
    let mut agree = SuiteResult::new("query_oracle_agreement");
    agree.tolerance = 0.01;
    let mut fc = SuiteResult::new("no_false_connected");
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0x0a11);
    if let Ok(c) = crate::harness::bench(g, sc, opts.queries, &mut rng) {
        agree.checked = c.queries as u64;
        agree.failures = (c.queries - c.agree) as u64;
        fc.checked = c.queries as u64;
        fc.failures = c.false_connected as u64;
    } else {
        agree.failures = 1;
        agree.note = "query error".into();
    }
    alloc::vec![agree, fc]
}

/// Every suite for one built scheme.
pub fn run_all(g: &Graph, sc: &Scheme, opts: &VerifyOptions) -> Vec<SuiteResult> {
    let mut out = alloc::vec![decomp_contract(g)];
    out.extend(base_hierarchy_suites(g, &sc.base));
    let hs: Vec<&CoarseHierarchy> = sc.colors.iter().map(|c| &c.hierarchy).collect();
    out.extend(coarse_hierarchy_suites(g, &sc.base, &hs));
    if sc.config.partition == PartitionMode::Derandomized {
        let mut hit = SuiteResult::new("hitting_guarantee");
        let q = crate::hierarchy::partition::qualifying_components(&sc.base, sc.config.f).len();
        hit.checked = (q * (sc.config.f + 1)) as u64;
        hit.failures = hitting_failures(&sc.base, &sc.partition).len() as u64;
        hit.note = format!("{q} qualifying components");
        out.push(hit);
    }
    let full: Vec<AuxGraph> = sc.colors.iter().map(|c| c.full_aux.clone().unwrap_or_else(|| build_aux_graph(g, &c.hierarchy))).collect();
    let mut merged: Vec<SuiteResult> = Vec::new();
    for (c, f) in sc.colors.iter().zip(&full) {
        for s in aux_suites(g, &c.hierarchy, f, &c.aux) {
            match merged.iter_mut().find(|m| m.name == s.name) {
                Some(m) => {
                    m.checked += s.checked;
                    m.failures += s.failures;
                }
                None => merged.push(s),
            }
        }
    }
    out.extend(merged);
    out.extend(query_graph_suites(g, sc, &full, opts));
    out.push(ancestry_suite(sc, opts.queries, opts.seed));
    out.push(label_sketch_suite(sc, opts));
    out.push(label_codec_suite(sc, 8, opts.seed));
    out.push(query_invariant_suite(g, sc, opts));
    out.extend(query_oracle_suites(g, sc, opts));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate, Model};
    use crate::scheme::{build_scheme, BuildConfig};

    #[test]
    fn all_suites_pass_on_small_graphs() {
        for (i, model) in [Model::Gnp { n: 24, p: 0.2 }, Model::KaryTree { k: 3, depth: 2, p: 0.3 }, Model::Star { k: 9 }, Model::Grid { w: 4, h: 3 }]
            .iter()
            .enumerate()
        {
            let g = generate(model, i as u64).unwrap();
            for partition in [PartitionMode::Random, PartitionMode::Derandomized] {
                let cfg = BuildConfig { f: 2, seed: i as u64, partition, keep_full_aux: true, ..Default::default() };
                let sc = build_scheme(&g, &cfg).unwrap();
                let opts = VerifyOptions { queries: 40, ..Default::default() };
                for s in run_all(&g, &sc, &opts) {
                    assert!(s.passed(), "{model:?} {partition:?}: {s:?}");
                }
            }
        }
    }
}
