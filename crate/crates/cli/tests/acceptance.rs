//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Ground truth here comes from test-local oracles (BFS connectivity, a
//! separate decomposition-contract checker, direct hierarchy walks, sketches
//! rebuilt from the hash definitions), not from the library's own checkers.

use std::collections::{BTreeSet, VecDeque};
use std::time::Instant;

use ftconn_cli::report::LabelReport;
use ftconn_core::auxgraph::{cut_formula, gstar_connected, AuxGraph, EdgeType, QueryContext};
use ftconn_core::graph::{generate, Model};
use ftconn_core::harness::QuerySampler;
use ftconn_core::hierarchy::base::{build_base_hierarchy_logged, DEGREE_THRESHOLD};
use ftconn_core::hierarchy::partition::hitting_failures;
use ftconn_core::hierarchy::{build_base_hierarchy, derandomized_partition, CoarseHierarchy, DecompResult};
use ftconn_core::query::{answer, QueryInput};
use ftconn_core::sketch::{bits_for, AncLabel, Eid, Seeds, Sketch, SketchContext, SketchParams};
use ftconn_core::{build_scheme, BuildConfig, Graph, PartitionMode, Scheme, VertexSet};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    id: usize,
    name: &'static str,
    passed: bool,
    detail: String,
}

// ---------- oracles ----------

/// BFS connectivity of `s` and `t` in `G − F`.
fn bfs_connected(g: &Graph, s: usize, t: usize, faults: &[usize]) -> bool {
    if faults.contains(&s) || faults.contains(&t) {
        return false;
    }
    let mut seen = vec![false; g.n()];
    for &x in faults {
        seen[x] = true;
    }
    seen[s] = true;
    let mut queue = VecDeque::from([s]);
    while let Some(u) = queue.pop_front() {
        if u == t {
            return true;
        }
        for &w in g.neighbors(u) {
            if !seen[w] {
                seen[w] = true;
                queue.push_back(w);
            }
        }
    }
    false
}

/// Component labels of the graph on `0..n` with `edges`, ignoring vertices in `skip`.
fn components(n: usize, edges: &[(usize, usize)], skip: &[bool]) -> Vec<usize> {
    let mut adj = vec![Vec::new(); n];
    for &(u, v) in edges {
        if !skip[u] && !skip[v] {
            adj[u].push(v);
            adj[v].push(u);
        }
    }
    let mut comp = vec![usize::MAX; n];
    let mut next = 0;
    for r in 0..n {
        if skip[r] || comp[r] != usize::MAX {
            continue;
        }
        comp[r] = next;
        let mut stack = vec![r];
        while let Some(u) = stack.pop() {
            for &w in &adj[u] {
                if comp[w] == usize::MAX {
                    comp[w] = next;
                    stack.push(w);
                }
            }
        }
        next += 1;
    }
    comp
}

/// Independent check of one decomposition call; `Err` names the failed clause.
fn check_decomposition(g: &Graph, terms: &VertexSet, r: &DecompResult, s: usize) -> Result<(), &'static str> {
    let n = g.n();
    let tedges = r.forest.edges();
    let in_t: Vec<bool> = (0..n).map(|v| r.forest.contains(v)).collect();
    let bad: Vec<bool> = (0..n).map(|v| r.bad.contains(v)).collect();
    let none = vec![false; n];
    if tedges.iter().any(|&(u, v)| !g.has_edge(u, v)) {
        return Err("forest edge not in G");
    }
    let tc = components(n, &tedges, &none);
    let tverts = in_t.iter().filter(|&&b| b).count();
    let tcomps: BTreeSet<usize> = (0..n).filter(|&v| in_t[v]).map(|v| tc[v]).collect();
    if tedges.len() + tcomps.len() != tverts {
        return Err("forest has a cycle");
    }
    let gc = components(n, g.edges(), &none);
    let tl: Vec<usize> = terms.iter().collect();
    for (i, &a) in tl.iter().enumerate() {
        if !in_t[a] {
            return Err("terminal outside forest");
        }
        for &b in &tl[i + 1..] {
            if gc[a] == gc[b] && tc[a] != tc[b] {
                return Err("terminals split");
            }
        }
    }
    for v in 0..n {
        if in_t[v] && !bad[v] {
            let deg = r.forest.neighbors(v).iter().filter(|&&w| !bad[w]).count();
            if deg > s {
                return Err("degree of T − B above s");
            }
        }
    }
    let (u, b) = (terms.len(), r.bad.len());
    let bu = r.bad.iter().filter(|&x| terms.contains(x)).count();
    if u > 0 && b * (s - 2) >= u {
        return Err("|B| ≥ |U|/(s−2)");
    }
    if u > 0 && bu * (s - 1) >= u {
        return Err("|B ∩ U| ≥ |U|/(s−1)");
    }
    // No path in G − B between different trees of T − B.
    let tb = components(n, &tedges, &bad);
    let gb = components(n, g.edges(), &bad);
    let mut first: Vec<Option<usize>> = vec![None; n];
    for v in (0..n).filter(|&v| in_t[v] && !bad[v]) {
        match first[gb[v]] {
            None => first[gb[v]] = Some(tb[v]),
            Some(c) if c != tb[v] => return Err("G − B path between trees of T − B"),
            _ => {}
        }
    }
    Ok(())
}

fn comp_ancestors(h: &CoarseHierarchy, c: usize) -> Vec<usize> {
    let mut out = vec![c];
    let mut x = c;
    while let Some(p) = h.components[x].parent {
        out.push(p);
        x = p;
    }
    out
}

// ---------- shared bookkeeping for criteria 4 and 5 ----------

#[derive(Default)]
struct Tally {
    decomp_calls: u64,
    decomp_failures: Vec<String>,
    builds: u64,
    bound_checks: u64,
    bound_failures: Vec<String>,
}

impl Tally {
    fn decomp(&mut self, g: &Graph, tag: &str) {
        let mut fails = Vec::new();
        let mut calls = 0;
        let built = build_base_hierarchy_logged(g, &mut |terms, r| {
            calls += 1;
            if let Err(e) = check_decomposition(g, terms, r, DEGREE_THRESHOLD) {
                fails.push(format!("{tag}: {e}"));
            }
        });
        if let Err(e) = built {
            fails.push(format!("{tag}: {e}"));
        }
        self.decomp_calls += calls;
        self.decomp_failures.extend(fails);
    }

    fn observe(&mut self, g: &Graph, sc: &Scheme, tag: &str) {
        self.builds += 1;
        self.decomp(g, tag);
        let n = g.n();
        let lg = (n.max(2) as f64).log2();
        let mut check = |ok: bool, what: String| {
            self.bound_checks += 1;
            if !ok {
                self.bound_failures.push(format!("{tag}: {what}"));
            }
        };
        let levels = sc.base.levels();
        let level_bound = (lg - 1.0).max(2.0);
        check(levels as f64 <= level_bound, format!("levels {levels} > {level_bound:.2}"));
        let tu = sc.base.t_union_adj.iter().map(Vec::len).max().unwrap_or(0);
        check(tu as f64 <= 2.0 * lg, format!("T∪ degree {tu} > 2 log n"));
        for (c, b) in sc.base.components.iter().enumerate() {
            let mut anc = BTreeSet::new();
            let mut x = b.parent;
            while let Some(p) = x {
                anc.insert(p);
                x = sc.base.components[p].parent;
            }
            let ok = b.neighbors.iter().all(|v| anc.contains(&sc.base.comp_of[v]));
            check(ok, format!("base component {c} has a neighbor outside its ancestors"));
        }
        for col in &sc.colors {
            let h = &col.hierarchy;
            let deg = (0..n)
                .filter(|&v| !h.in_s[v])
                .map(|v| h.tree_children[v].len() + usize::from(h.tree_parent[v].is_some()))
                .max()
                .unwrap_or(0);
            check(deg as f64 <= 3.0 * lg, format!("color {} non-S tree degree {deg} > 3 log n", col.color));
            for (c, k) in h.components.iter().enumerate() {
                let anc = comp_ancestors(h, c);
                let ok = k.neighbors.iter().all(|v| anc[1..].contains(&h.comp_of[v]));
                check(ok, format!("color {} component {c} has a neighbor outside its ancestors", col.color));
            }
        }
    }
}

fn summarize(fails: &[String]) -> String {
    match fails.first() {
        None => String::new(),
        Some(f) => format!("; first failure: {f}"),
    }
}

// ---------- criteria ----------

/// Criteria 1 and 2: sampled queries against BFS on gnp(256).
fn end_to_end(tally: &mut Tally) -> (Outcome, Outcome) {
    let mut worst = 1.0f64;
    let mut false_connected = 0;
    let mut total = 0;
    let mut slowest = 0.0f64;
    let mut failures = Vec::new();
    for gi in 0..10u64 {
        let p = if gi % 2 == 0 { 0.02 } else { 0.05 };
        let g = generate(&Model::Gnp { n: 256, p }, 100 + gi).unwrap();
        for f in 1..=3usize {
            let started = Instant::now();
            let seed = 1000 + gi * 10 + f as u64;
            let sc = build_scheme(&g, &BuildConfig { f, seed, ..Default::default() }).unwrap();
            let mut sampler = QuerySampler::new(g.n(), f).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut agree = 0;
            const QUERIES: usize = 10_000;
            for _ in 0..QUERIES {
                let q = sampler.sample(&mut rng);
                let input = QueryInput {
                    s: sc.label(q.s),
                    t: sc.label(q.t),
                    faults: q.faults.iter().map(|x| sc.label(x)).collect(),
                };
                let got = answer(&input).unwrap().is_connected();
                let want = bfs_connected(&g, q.s, q.t, q.faults.as_slice());
                agree += usize::from(got == want);
                false_connected += usize::from(got && !want);
            }
            total += QUERIES;
            let rate = agree as f64 / QUERIES as f64;
            worst = worst.min(rate);
            if rate < 0.99 {
                failures.push(format!("graph {gi} p={p} f={f}: agreement {rate:.4}"));
            }
            slowest = slowest.max(started.elapsed().as_secs_f64());
            tally.observe(&g, &sc, &format!("gnp256 #{gi} f={f}"));
        }
    }
    let c1 = Outcome {
        id: 1,
        name: "end-to-end agreement ≥ 99% (gnp n=256, 10 graphs × f∈{1,2,3}, 10⁴ queries each)",
        passed: failures.is_empty() && slowest <= 600.0,
        detail: format!("worst agreement {worst:.4}, slowest configuration {slowest:.1}s{}", summarize(&failures)),
    };
    let c2 = Outcome {
        id: 2,
        name: "zero false-connected answers",
        passed: false_connected == 0,
        detail: format!("{false_connected} false-connected out of {total} queries"),
    };
    (c1, c2)
}

/// Criterion 3: exhaustive unsparsified query-graph connectivity on tiny graphs.
fn exhaustive_small(tally: &mut Tally) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut checked = 0u64;
    let mut fails = Vec::new();
    for gi in 0..200u64 {
        let n = rng.gen_range(3..=10);
        let p = rng.gen_range(0.15..0.7);
        let g = generate(&Model::Gnp { n, p }, gi).unwrap();
        let cfg = BuildConfig { f: 2, seed: gi, keep_full_aux: true, ..Default::default() };
        let sc = build_scheme(&g, &cfg).unwrap();
        tally.observe(&g, &sc, &format!("small #{gi}"));
        for s in 0..n {
            for t in 0..n {
                if s == t {
                    continue;
                }
                let others: Vec<usize> = (0..n).filter(|&v| v != s && v != t).collect();
                let mut fsets: Vec<Vec<usize>> = vec![vec![]];
                for (i, &a) in others.iter().enumerate() {
                    fsets.push(vec![a]);
                    for &b in &others[i + 1..] {
                        fsets.push(vec![a, b]);
                    }
                }
                for fs in fsets {
                    let faults = VertexSet::from_unsorted(fs.clone());
                    let color = sc.free_color(&faults);
                    let c = &sc.colors[color - 1];
                    let full: &AuxGraph = c.full_aux.as_ref().unwrap();
                    let ctx = QueryContext::new(&c.hierarchy, s, t, faults);
                    let got = gstar_connected(full, &c.hierarchy, &ctx, s, t);
                    checked += 1;
                    if got != bfs_connected(&g, s, t, &fs) {
                        fails.push(format!("graph {gi} (n={n}) s={s} t={t} F={fs:?}"));
                    }
                }
            }
        }
    }
    Outcome {
        id: 3,
        name: "exhaustive unsparsified query graph = oracle (200 graphs, n ≤ 10, |F| ≤ 2)",
        passed: fails.is_empty(),
        detail: format!("{} mismatches over {checked} queries{}", fails.len(), summarize(&fails)),
    }
}

/// Criterion 6: derandomized coloring hits every qualifying neighbor set.
fn derandomized(tally: &mut Tally) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut models = vec![
        (Model::Hubs { hubs: 100, leaves: 400, p: 0.8 }, 1),
        (Model::Hubs { hubs: 100, leaves: 400, p: 0.8 }, 3),
        (Model::Hubs { hubs: 20, leaves: 300, p: 0.5 }, 2),
        (Model::Tiered { tiers: vec![4, 32, 256], p: 0.3 }, 2),
    ];
    while models.len() < 50 {
        let n = rng.gen_range(16..=512);
        let deg = rng.gen_range(2.0..40.0);
        models.push((Model::Gnp { n, p: (deg / n as f64).min(1.0) }, rng.gen_range(1..=3)));
    }
    let (mut qualifying, mut pairs, mut fails) = (0usize, 0usize, Vec::new());
    let mut reproducible = true;
    for (i, (m, f)) in models.iter().enumerate() {
        let g = generate(m, i as u64).unwrap();
        tally.decomp(&g, &format!("derandomized #{i}"));
        let base = build_base_hierarchy(&g).unwrap();
        let part = derandomized_partition(&base, *f);
        reproducible &= part == derandomized_partition(&build_base_hierarchy(&g).unwrap(), *f);
        let threshold = 3.0 * (*f as f64 + 1.0) * (g.n() as f64).ln();
        for c in &base.components {
            if (c.neighbors.len() as f64) < threshold {
                continue;
            }
            qualifying += 1;
            for col in 1..=f + 1 {
                pairs += 1;
                if !c.neighbors.iter().any(|v| part.colors[v] as usize == col) {
                    fails.push(format!("graph {i} ({m:?}): color {col} missing"));
                }
            }
        }
        // The library's own report must agree.
        if hitting_failures(&base, &part).is_empty() != fails.is_empty() {
            fails.push(format!("graph {i}: library hitting report disagrees"));
        }
    }
    Outcome {
        id: 6,
        name: "derandomized partition hits every qualifying neighbor set (50 graphs, n ≤ 512, f ≤ 3)",
        passed: fails.is_empty() && reproducible && qualifying > 0,
        detail: format!(
            "{qualifying} qualifying components, {pairs} (component, color) pairs, {} misses, reproducible: {reproducible}{}",
            fails.len(),
            summarize(&fails)
        ),
    }
}

/// Criterion 7: XOR cut formula equals the directly enumerated cut.
fn cut_identity(tally: &mut Tally) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (mut checked, mut fails) = (0, Vec::new());
    for gi in 0..10u64 {
        let n = rng.gen_range(16..=64);
        let p = rng.gen_range(0.05..0.3);
        let g = generate(&Model::Gnp { n, p }, 70 + gi).unwrap();
        let f = 1 + gi as usize % 3;
        let sc = build_scheme(&g, &BuildConfig { f, seed: gi, keep_full_aux: true, ..Default::default() }).unwrap();
        tally.observe(&g, &sc, &format!("cut #{gi}"));
        let mut sampler = QuerySampler::new(n, f).unwrap();
        for _ in 0..100 {
            let q = sampler.sample(&mut rng);
            let c = &sc.colors[sc.free_color(&q.faults) - 1];
            let (h, aux) = (&c.hierarchy, c.full_aux.as_ref().unwrap());
            // Affected components and valid edges, from scratch.
            let mut affected = vec![false; h.components.len()];
            for x in q.faults.iter().chain([q.s, q.t]) {
                for a in comp_ancestors(h, h.comp_of[x]) {
                    affected[a] = true;
                }
            }
            let in_gstar: Vec<usize> = (0..n).filter(|&v| affected[h.comp_of[v]]).collect();
            let u = VertexSet::from_unsorted(in_gstar.iter().copied().filter(|_| rng.gen_bool(0.5)).collect());
            let direct: Vec<usize> = (0..aux.edges.len())
                .filter(|&i| {
                    let e = &aux.edges[i];
                    let type_ok = match e.ty {
                        EdgeType::Original => true,
                        EdgeType::Component(id) => !affected[h.component_by_id(id).unwrap()],
                    };
                    type_ok
                        && affected[h.comp_of[e.tail]]
                        && affected[h.comp_of[e.head]]
                        && u.contains(e.tail) != u.contains(e.head)
                })
                .collect();
            let ctx = QueryContext::new(h, q.s, q.t, q.faults.clone());
            checked += 1;
            if cut_formula(aux, h, &ctx, &u) != direct {
                fails.push(format!("graph {gi} s={} t={} F={:?}", q.s, q.t, q.faults.as_slice()));
            }
        }
    }
    Outcome {
        id: 7,
        name: "cut formula = direct cut (10³ query/U pairs, n ≤ 64)",
        passed: fails.is_empty() && checked == 1000,
        detail: format!("{} mismatches over {checked} pairs{}", fails.len(), summarize(&fails)),
    }
}

fn random_eid(c: &SketchContext, rng: &mut ChaCha8Rng, tail: usize, head: usize) -> Eid {
    let n = c.params.n as u32;
    let mut a = || AncLabel {
        k_pre: rng.gen_range(1..=2 * n),
        k_post: rng.gen_range(1..=2 * n),
        t_pre: rng.gen_range(1..=2 * n),
        t_post: rng.gen_range(1..=2 * n),
    };
    let (at, ah) = (a(), a());
    let ty = rng.gen_range(1..=n + 1);
    c.eid(tail, head, ty, at, ah)
}

fn random_pair(rng: &mut ChaCha8Rng, n: usize) -> (usize, usize) {
    let t = rng.gen_range(0..n);
    let h = (t + rng.gen_range(1..n)) % n;
    (t, h)
}

/// Criterion 8: sketch linearity and single-edge consistency.
fn sketch_algebra() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let c = SketchContext::new(SketchParams::new(64, 2, 8.0, 64).unwrap(), Seeds::from_seed(8));
    let pool: Vec<Eid> = (0..200)
        .map(|_| {
            let (t, h) = random_pair(&mut rng, 64);
            random_eid(&c, &mut rng, t, h)
        })
        .collect();
    let mut lin_fail = 0;
    const PAIRS: usize = 10_000;
    for _ in 0..PAIRS {
        let pick = |rng: &mut ChaCha8Rng| -> BTreeSet<usize> { (0..rng.gen_range(0..12)).map(|_| rng.gen_range(0..pool.len())).collect() };
        let (a, b) = (pick(&mut rng), pick(&mut rng));
        let sym: Vec<&Eid> = a.symmetric_difference(&b).map(|&i| &pool[i]).collect();
        let merged = Sketch::merge(&c.sketch_of(a.iter().map(|&i| &pool[i])), &c.sketch_of(b.iter().map(|&i| &pool[i]))).unwrap();
        lin_fail += usize::from(merged != c.sketch_of(sym));
    }
    let mut single_fail = 0;
    for e in &pool {
        let want = reference_single_words(&c, e);
        single_fail += usize::from(c.sketch_of_single(e).as_words() != want.as_slice());
        single_fail += usize::from(c.sketch_of([e]).as_words() != want.as_slice());
    }
    Outcome {
        id: 8,
        name: "sketch linearity (10⁴ pairs) and single-edge sketch consistency",
        passed: lin_fail == 0 && single_fail == 0,
        detail: format!("{lin_fail}/{PAIRS} linearity mismatches, {single_fail} single-edge mismatches over {} edges", pool.len()),
    }
}

/// Flat cell words of `sketch({e})` from the membership definition.
fn reference_single_words(c: &SketchContext, eid: &Eid) -> Vec<u64> {
    let p = &c.params;
    let d = c.decode_single(&eid.0).expect("well-formed eid");
    let key = c.key(d.tail, d.head, d.ty);
    let mut words = vec![0u64; p.cells() * p.words()];
    for q in 0..p.p {
        for i in 0..p.f {
            if c.h(q, i, d.head) != 1 {
                continue;
            }
            let top = p.omega - bits_for(c.phi(q, i, key)).min(p.omega);
            for j in 0..=top as usize {
                let at = p.cell_index(q, i, j) * p.words();
                for (w, e) in words[at..at + p.words()].iter_mut().zip(&eid.0) {
                    *w ^= e;
                }
            }
        }
    }
    words
}

/// Criterion 9: per-round GetEdge success on eligible cut sets.
fn get_edge_statistics() -> Outcome {
    const TRIALS: usize = 10_000;
    let n = 64;
    let floor = 1.0 / 16.0;
    let sigma = (floor * (1.0 - floor) / TRIALS as f64).sqrt();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut lines = Vec::new();
    let mut passed = true;
    let mut unsound = 0;
    for f in 1..=4usize {
        let mut ok = 0;
        let mut c = SketchContext::new(SketchParams::new(n, f, 8.0, 64).unwrap(), Seeds::from_seed(rng.gen()));
        for trial in 0..TRIALS {
            if trial % 100 == 0 {
                c = SketchContext::new(SketchParams::new(n, f, 8.0, 64).unwrap(), Seeds::from_seed(rng.gen()));
            }
            let mut verts: Vec<usize> = (0..n).collect();
            verts.shuffle(&mut rng);
            let faults: Vec<usize> = verts[..f].to_vec();
            let healthy = &verts[f..];
            // Edges never leave a fault; heads may be faults. At least one edge avoids F.
            let size = 1usize << rng.gen_range(0..7);
            let mut keys = BTreeSet::new();
            let first = (healthy[0], healthy[1 + rng.gen_range(0..healthy.len() - 1)]);
            keys.insert(first);
            while keys.len() < size {
                let t = healthy[rng.gen_range(0..healthy.len())];
                let h = rng.gen_range(0..n);
                if h != t {
                    keys.insert((t, h));
                }
            }
            let eids: Vec<Eid> = keys.iter().map(|&(t, h)| random_eid(&c, &mut rng, t, h)).collect();
            let sk = c.sketch_of(&eids);
            let q = rng.gen_range(0..c.params.p);
            if let Some(e) = c.get_edge(&sk, q, &faults) {
                ok += 1;
                if !keys.contains(&(e.tail, e.head)) || faults.contains(&e.tail) || faults.contains(&e.head) {
                    unsound += 1;
                }
            }
        }
        let rate = ok as f64 / TRIALS as f64;
        passed &= rate >= floor - 3.0 * sigma;
        lines.push(format!("f={f}: {rate:.3}"));
    }
    Outcome {
        id: 9,
        name: "GetEdge per-round success ≥ 1/16 (f ≤ 4, 10⁴ trials each, 3σ)",
        passed: passed && unsound == 0,
        detail: format!("{}; {unsound} unsound returns", lines.join(", ")),
    }
}

/// Criterion 10: label-length growth in n and in f.
fn label_scaling(tally: &mut Tally) -> Outcome {
    let mean = |n: usize, f: usize, tally: &mut Tally| -> f64 {
        let mut total = 0.0;
        for seed in 0..2u64 {
            let g = generate(&Model::Gnp { n, p: 6.0 / n as f64 }, seed).unwrap();
            let sc = build_scheme(&g, &BuildConfig { f, seed, ..Default::default() }).unwrap();
            // Same statistic the bench report prints.
            total += LabelReport::of(&sc.labels).mean_bits;
            tally.observe(&g, &sc, &format!("scaling n={n} f={f} #{seed}"));
        }
        total / 2.0
    };
    let (small, large) = (mean(64, 2, tally), mean(512, 2, tally));
    let (f1, f4) = (mean(128, 1, tally), mean(128, 4, tally));
    let (rn, rf) = (large / small, f4 / f1);
    let bn = 2.0 * (9.0f64 / 6.0).powi(5);
    let bf = 2.0 * 64.0;
    Outcome {
        id: 10,
        name: "label-length scaling (n: 64→512 at f=2; f: 1→4 at n=128)",
        passed: rn <= bn && rf <= bf,
        detail: format!(
            "n-ratio {rn:.2} (≤ {bn:.2}; {small:.0} → {large:.0} bits), f-ratio {rf:.2} (≤ {bf:.0}; {f1:.0} → {f4:.0} bits)"
        ),
    }
}

/// Extra structured and derandomized builds so criteria 4 and 5 cover deep hierarchies.
fn structured_builds(tally: &mut Tally) {
    let models = [
        Model::Grid { w: 12, h: 12 },
        Model::Star { k: 40 },
        Model::KaryTree { k: 5, depth: 3, p: 0.0 },
        Model::KaryTree { k: 7, depth: 3, p: 0.05 },
        Model::Hubs { hubs: 10, leaves: 150, p: 0.4 },
        Model::Tiered { tiers: vec![3, 24, 120], p: 0.3 },
        Model::Complete { k: 12 },
    ];
    for (i, m) in models.iter().enumerate() {
        for partition in [PartitionMode::Random, PartitionMode::Derandomized] {
            let g = generate(m, i as u64).unwrap();
            let sc = build_scheme(&g, &BuildConfig { f: 2, seed: i as u64, partition, ..Default::default() }).unwrap();
            tally.observe(&g, &sc, &format!("{m:?} {partition:?}"));
        }
    }
}

fn main() {
    let mut tally = Tally::default();
    let mut out = Vec::new();
    let (c1, c2) = end_to_end(&mut tally);
    out.extend([c1, c2]);
    out.push(exhaustive_small(&mut tally));
    let c6 = derandomized(&mut tally);
    let c7 = cut_identity(&mut tally);
    let c8 = sketch_algebra();
    let c9 = get_edge_statistics();
    let c10 = label_scaling(&mut tally);
    structured_builds(&mut tally);
    out.push(Outcome {
        id: 4,
        name: "decomposition contract on every invocation",
        passed: tally.decomp_failures.is_empty() && tally.decomp_calls > 0,
        detail: format!(
            "{} invocations, {} violations{}",
            tally.decomp_calls,
            tally.decomp_failures.len(),
            summarize(&tally.decomp_failures)
        ),
    });
    out.push(Outcome {
        id: 5,
        name: "hierarchy bounds: levels, T∪ degree ≤ 2 log n, non-S degree ≤ 3 log n, neighbor ancestry",
        passed: tally.bound_failures.is_empty(),
        detail: format!(
            "{} builds, {} checks, {} violations{}",
            tally.builds,
            tally.bound_checks,
            tally.bound_failures.len(),
            summarize(&tally.bound_failures)
        ),
    });
    out.extend([c6, c7, c8, c9, c10]);
    out.sort_by_key(|o| o.id);

    println!();
    for o in &out {
        println!("criterion {:>2} [{}] {} — {}", o.id, if o.passed { "PASS" } else { "FAIL" }, o.name, o.detail);
    }
    let failed: Vec<usize> = out.iter().filter(|o| !o.passed).map(|o| o.id).collect();
    println!("acceptance: {}/{} criteria passed", out.len() - failed.len(), out.len());
    if !failed.is_empty() {
        eprintln!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
