//! Low-degree Steiner forests: `decomp(G, U, s)` returns `(T, B)` where `T` is a
//! Steiner forest for the terminals `U` and `T - B` has maximum degree `s`.
//!
//! The construction is a Fürer–Raghavachari style local search. Starting from
//! a BFS Steiner forest, each phase blocks every tree vertex of degree `≥ s`,
//! grows the classes (components of `T` minus blocked vertices) by searching
//! for connecting segments — graph edges between classes, or paths through
//! vertices outside the tree — and unblocks degree-`s` vertices on the tree
//! path each segment would close. When a segment's tree path contains a
//! vertex of degree `> s`, the chain of recorded segments is realized as tree
//! swaps that lower that degree by one without raising any other vertex above
//! `s`. A phase that finds no segment certifies that the blocked set `B`
//! separates the classes, which is exactly the output contract.

use alloc::collections::VecDeque;
use alloc::string::String;
use alloc::vec::Vec;

use crate::dsu::UnionFind;
use crate::graph::{Graph, VertexSet};

use super::HierarchyError;

/// Forest stored as adjacency lists over all graph vertices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Forest {
    adj: Vec<Vec<usize>>,
    present: Vec<bool>,
}

impl Forest {
    pub fn empty(n: usize) -> Self {
        Forest { adj: alloc::vec![Vec::new(); n], present: alloc::vec![false; n] }
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn contains(&self, v: usize) -> bool {
        self.present[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn vertices(&self) -> VertexSet {
        VertexSet::from_mask(&self.present)
    }

    pub fn add_vertex(&mut self, v: usize) {
        self.present[v] = true;
    }

    pub fn add_edge(&mut self, u: usize, v: usize) {
        self.present[u] = true;
        self.present[v] = true;
        self.adj[u].push(v);
        self.adj[v].push(u);
    }

    pub fn remove_edge(&mut self, u: usize, v: usize) -> bool {
        let Some(i) = self.adj[u].iter().position(|&x| x == v) else { return false };
        self.adj[u].swap_remove(i);
        let j = self.adj[v].iter().position(|&x| x == u).expect("asymmetric forest");
        self.adj[v].swap_remove(j);
        true
    }

    /// Sorted `(min, max)` edge list.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out: Vec<(usize, usize)> = (0..self.n())
            .flat_map(|u| self.adj[u].iter().filter(move |&&v| u < v).map(move |&v| (u, v)))
            .collect();
        out.sort_unstable();
        out
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Repeatedly deletes leaves (and isolated vertices) that are not terminals.
    pub fn prune(&mut self, keep: &[bool]) {
        let mut stack: Vec<usize> = (0..self.n()).filter(|&v| self.present[v] && !keep[v] && self.adj[v].len() <= 1).collect();
        while let Some(v) = stack.pop() {
            if !self.present[v] || keep[v] || self.adj[v].len() > 1 {
                continue;
            }
            if let Some(&u) = self.adj[v].first() {
                self.remove_edge(v, u);
                if !keep[u] && self.adj[u].len() <= 1 {
                    stack.push(u);
                }
            }
            self.present[v] = false;
        }
    }

    /// Vertex sequence of the tree path from `a` to `b`, if they share a tree.
    pub fn path(&self, a: usize, b: usize) -> Option<Vec<usize>> {
        if !self.present[a] || !self.present[b] {
            return None;
        }
        let mut parent = alloc::vec![usize::MAX; self.n()];
        parent[a] = a;
        let mut queue = VecDeque::from([a]);
        while let Some(u) = queue.pop_front() {
            if u == b {
                break;
            }
            for &w in &self.adj[u] {
                if parent[w] == usize::MAX {
                    parent[w] = u;
                    queue.push_back(w);
                }
            }
        }
        if parent[b] == usize::MAX {
            return None;
        }
        let mut out = alloc::vec![b];
        let mut x = b;
        while x != a {
            x = parent[x];
            out.push(x);
        }
        out.reverse();
        Some(out)
    }

    /// Component label per present vertex of `T - removed`; others get `usize::MAX`.
    pub fn components_avoiding(&self, removed: &[bool]) -> Vec<usize> {
        let n = self.n();
        let mut comp = alloc::vec![usize::MAX; n];
        let mut c = 0;
        for s in 0..n {
            if !self.present[s] || removed[s] || comp[s] != usize::MAX {
                continue;
            }
            comp[s] = c;
            let mut st = alloc::vec![s];
            while let Some(u) = st.pop() {
                for &w in &self.adj[u] {
                    if !removed[w] && comp[w] == usize::MAX {
                        comp[w] = c;
                        st.push(w);
                    }
                }
            }
            c += 1;
        }
        comp
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecompResult {
    pub forest: Forest,
    pub bad: VertexSet,
}

/// A violated clause of the decomposition contract.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ContractViolation {
    #[error("forest has a cycle or uses a non-graph edge")]
    NotAForest,
    #[error("terminals {0} and {1} are connected in G but not in T")]
    TerminalsSplit(usize, usize),
    #[error("terminals {0} and {1} share a tree of T but not a component of G")]
    TreeAcrossComponents(usize, usize),
    #[error("a leaf {0} of T is not a terminal")]
    SteinerLeaf(usize),
    #[error("vertices {0} and {1} lie in different components of T - B but are joined in G - B")]
    PathBetweenComponents(usize, usize),
    #[error("vertex {v} has degree {deg} in T - B, above {s}")]
    DegreeTooHigh { v: usize, deg: usize, s: usize },
    #[error("|B| = {b} is not below |U|/(s-2) with |U| = {u}")]
    BadSetTooLarge { b: usize, u: usize },
    #[error("|B ∩ U| = {bu} is not below |U|/(s-1) with |U| = {u}")]
    BadTerminalsTooMany { bu: usize, u: usize },
    #[error("B contains a vertex {0} outside T")]
    BadOutsideForest(usize),
}

/// Checks every clause of the output contract.
pub fn check_decomp(g: &Graph, terminals: &VertexSet, s: usize, r: &DecompResult) -> Result<(), ContractViolation> {
    let n = g.n();
    let t = &r.forest;
    let is_term = terminals.to_mask(n);
    let bad = r.bad.to_mask(n);
    // acyclic, edges of G
    let mut uf = UnionFind::new(n);
    for (u, v) in t.edges() {
        if !g.has_edge(u, v) || uf.union(u, v).is_none() {
            return Err(ContractViolation::NotAForest);
        }
    }
    // Steiner forest for U: terminal pairs connected in G iff connected in T
    let gc = g.components();
    let mut rep_in_gcomp: Vec<Option<usize>> = alloc::vec![None; n];
    for u in terminals.iter() {
        if !t.contains(u) {
            return Err(ContractViolation::TerminalsSplit(u, u));
        }
        match rep_in_gcomp[gc[u]] {
            None => rep_in_gcomp[gc[u]] = Some(u),
            Some(r0) => {
                if !uf.same(r0, u) {
                    return Err(ContractViolation::TerminalsSplit(r0, u));
                }
            }
        }
    }
    for v in 0..n {
        if t.contains(v) {
            if !is_term[v] && t.degree(v) <= 1 {
                return Err(ContractViolation::SteinerLeaf(v));
            }
            let root = uf.find(v);
            let _ = root;
        }
    }
    for &(u, v) in &t.edges() {
        if gc[u] != gc[v] {
            return Err(ContractViolation::TreeAcrossComponents(u, v));
        }
    }
    for &b in r.bad.as_slice() {
        if !t.contains(b) {
            return Err(ContractViolation::BadOutsideForest(b));
        }
    }
    // degree of T - B
    for v in 0..n {
        if t.contains(v) && !bad[v] {
            let deg = t.neighbors(v).iter().filter(|&&w| !bad[w]).count();
            if deg > s {
                return Err(ContractViolation::DegreeTooHigh { v, deg, s });
            }
        }
    }
    // no (G - B)-path between distinct components of T - B
    let tc = t.components_avoiding(&bad);
    let (gbc, _) = g.components_avoiding(&bad);
    let mut seen: Vec<Option<(usize, usize)>> = alloc::vec![None; n];
    for v in 0..n {
        if tc[v] == usize::MAX {
            continue;
        }
        match seen[gbc[v]] {
            None => seen[gbc[v]] = Some((tc[v], v)),
            Some((c, w)) if c != tc[v] => return Err(ContractViolation::PathBetweenComponents(w, v)),
            _ => {}
        }
    }
    // size bounds
    let (u, b) = (terminals.len(), r.bad.len());
    let bu = r.bad.iter().filter(|&x| is_term[x]).count();
    if b * (s - 2) >= u && !(u == 0 && b == 0) {
        return Err(ContractViolation::BadSetTooLarge { b, u });
    }
    if bu * (s - 1) >= u && !(u == 0 && bu == 0) {
        return Err(ContractViolation::BadTerminalsTooMany { bu, u });
    }
    Ok(())
}

/// Computes `(T, B)` and verifies the contract before returning.
pub fn decomp(g: &Graph, terminals: &VertexSet, s: usize) -> Result<DecompResult, HierarchyError> {
    if s < 3 {
        return Err(HierarchyError::InvalidParameter(alloc::format!("degree threshold s = {s} must be >= 3")));
    }
    if let Some(&x) = terminals.as_slice().last() {
        if x >= g.n() {
            return Err(HierarchyError::InvalidParameter(alloc::format!("terminal {x} out of range")));
        }
    }
    let r = Search::new(g, terminals, s).run()?;
    check_decomp(g, terminals, s, &r).map_err(HierarchyError::Decomp)?;
    Ok(r)
}

struct Segment {
    a: usize,
    c: usize,
    inner: Vec<usize>,
    unblocked: Vec<usize>,
    realized: bool,
}

struct Search<'g> {
    g: &'g Graph,
    s: usize,
    is_term: Vec<bool>,
    t: Forest,
}

enum Phase {
    Improved,
    Done(VertexSet),
}

fn internal(msg: &str) -> HierarchyError {
    HierarchyError::Internal(String::from(msg))
}

impl<'g> Search<'g> {
    fn new(g: &'g Graph, terminals: &VertexSet, s: usize) -> Self {
        let n = g.n();
        let is_term = terminals.to_mask(n);
        let mut t = Forest::empty(n);
        let mut seen = alloc::vec![false; n];
        // BFS tree of each component that contains a terminal, rooted at its smallest terminal
        for r in terminals.iter() {
            if seen[r] {
                continue;
            }
            seen[r] = true;
            t.add_vertex(r);
            let mut queue = VecDeque::from([r]);
            while let Some(u) = queue.pop_front() {
                for &w in g.neighbors(u) {
                    if !seen[w] {
                        seen[w] = true;
                        t.add_edge(u, w);
                        queue.push_back(w);
                    }
                }
            }
        }
        t.prune(&is_term);
        Search { g, s, is_term, t }
    }

    fn run(mut self) -> Result<DecompResult, HierarchyError> {
        let n = self.g.n();
        loop {
            if !(0..n).any(|v| self.t.contains(v) && self.t.degree(v) > self.s) {
                return Ok(DecompResult { forest: self.t, bad: VertexSet::new() });
            }
            match self.phase()? {
                Phase::Improved => self.t.prune(&self.is_term),
                Phase::Done(bad) => return Ok(DecompResult { forest: self.t, bad }),
            }
        }
    }

    fn phase(&mut self) -> Result<Phase, HierarchyError> {
        let n = self.g.n();
        let s = self.s;
        let mut blocked: Vec<bool> = (0..n).map(|v| self.t.contains(v) && self.t.degree(v) >= s).collect();
        let mut member: Vec<bool> = (0..n).map(|v| self.t.contains(v) && !blocked[v]).collect();
        let mut pending: Vec<Option<usize>> = alloc::vec![None; n];
        let mut segs: Vec<Segment> = Vec::new();
        let mut uf = UnionFind::new(n);
        for (u, v) in self.t.edges() {
            if member[u] && member[v] {
                uf.union(u, v);
            }
        }
        loop {
            let Some((a, c, inner)) = self.find_segment(&member, &mut uf) else {
                return Ok(Phase::Done(VertexSet::from_mask(&blocked)));
            };
            let anchor = |mut v: usize, segs: &[Segment], pending: &[Option<usize>]| {
                while !self.t.contains(v) {
                    v = segs[pending[v].expect("virtual vertex without segment")].a;
                }
                v
            };
            let (ra, rc) = (anchor(a, &segs, &pending), anchor(c, &segs, &pending));
            let path = self.t.path(ra, rc).ok_or_else(|| internal("segment endpoints in different trees"))?;
            let on_path: Vec<usize> = path.iter().copied().filter(|&v| blocked[v]).collect();
            if on_path.is_empty() {
                return Err(internal("segment between classes with no blocked vertex on its tree path"));
            }
            let high = on_path.iter().copied().filter(|&v| self.t.degree(v) > s).min_by_key(|&v| (core::cmp::Reverse(self.t.degree(v)), v));
            if let Some(b) = high {
                segs.push(Segment { a, c, inner, unblocked: Vec::new(), realized: false });
                let top = segs.len() - 1;
                self.realize(&mut segs, &pending, top, b)?;
                return Ok(Phase::Improved);
            }
            let idx = segs.len();
            for &w in &on_path {
                blocked[w] = false;
                member[w] = true;
                pending[w] = Some(idx);
            }
            for &x in &inner {
                member[x] = true;
                pending[x] = Some(idx);
            }
            for win in path.windows(2) {
                uf.union(win[0], win[1]);
            }
            for &w in &on_path {
                for &u in self.t.neighbors(w) {
                    if member[u] {
                        uf.union(w, u);
                    }
                }
            }
            let mut prev = a;
            for &x in inner.iter().chain(core::iter::once(&c)) {
                uf.union(prev, x);
                prev = x;
            }
            uf.union(a, ra);
            segs.push(Segment { a, c, inner, unblocked: on_path, realized: false });
        }
    }

    /// A direct edge or a path through free (non-tree, non-member) vertices
    /// joining two distinct classes.
    fn find_segment(&self, member: &[bool], uf: &mut UnionFind) -> Option<(usize, usize, Vec<usize>)> {
        let n = self.g.n();
        for u in 0..n {
            if !member[u] {
                continue;
            }
            for &v in self.g.neighbors(u) {
                if v > u && member[v] && uf.find(u) != uf.find(v) {
                    return Some((u, v, Vec::new()));
                }
            }
        }
        let free = |v: usize| !member[v] && !self.t.contains(v);
        let mut blob = alloc::vec![usize::MAX; n];
        let mut parent = alloc::vec![usize::MAX; n];
        for start in 0..n {
            if !free(start) || blob[start] != usize::MAX {
                continue;
            }
            blob[start] = start;
            parent[start] = start;
            let mut queue = VecDeque::from([start]);
            let mut first: Option<(usize, usize, usize)> = None; // (class, member, via)
            while let Some(x) = queue.pop_front() {
                for &y in self.g.neighbors(x) {
                    if member[y] {
                        let cls = uf.find(y);
                        match first {
                            None => first = Some((cls, y, x)),
                            Some((c0, y0, x0)) if c0 != cls => {
                                // path x0 .. start .. x inside the blob (tree paths via parent pointers)
                                let up = |mut v: usize| {
                                    let mut p = alloc::vec![v];
                                    while parent[v] != v {
                                        v = parent[v];
                                        p.push(v);
                                    }
                                    p
                                };
                                let mut p0 = up(x0);
                                let mut p1 = up(x);
                                while p0.len() >= 2 && p1.len() >= 2 && p0[p0.len() - 2] == p1[p1.len() - 2] {
                                    p0.pop();
                                    p1.pop();
                                }
                                p1.pop();
                                p1.reverse();
                                p0.extend(p1);
                                return Some((y0, y, p0));
                            }
                            _ => {}
                        }
                    } else if free(y) && blob[y] == usize::MAX {
                        blob[y] = start;
                        parent[y] = x;
                        queue.push_back(y);
                    }
                }
            }
        }
        None
    }

    fn realize(&mut self, segs: &mut Vec<Segment>, pending: &[Option<usize>], idx: usize, target: usize) -> Result<(), HierarchyError> {
        if segs[idx].realized {
            return Err(internal("segment realized twice"));
        }
        segs[idx].realized = true;
        for end in [segs[idx].a, segs[idx].c] {
            if let Some(p) = pending[end] {
                if segs[p].realized {
                    if segs[p].unblocked.contains(&end) {
                        return Err(internal("unblocked vertex used by two realized segments"));
                    }
                    continue;
                }
                let tgt = if segs[p].unblocked.contains(&end) { end } else { segs[p].unblocked[0] };
                self.realize(segs, pending, p, tgt)?;
            }
        }
        let (a, c) = (segs[idx].a, segs[idx].c);
        let path = self.t.path(a, c).ok_or_else(|| internal("realized segment endpoints not in one tree"))?;
        let k = path.iter().position(|&v| v == target).ok_or_else(|| internal("swap target not on the cycle"))?;
        if k == 0 || k + 1 == path.len() {
            return Err(internal("swap target is a segment endpoint"));
        }
        self.t.remove_edge(path[k - 1], path[k]);
        let mut prev = a;
        for &x in segs[idx].inner.iter().chain(core::iter::once(&c)) {
            self.t.add_edge(prev, x);
            prev = x;
        }
        Ok(())
    }
}
