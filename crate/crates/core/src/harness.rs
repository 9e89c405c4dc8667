//! Query sampling and oracle comparison.
//!
//! Sampling: `s ≠ t` uniform; the fault count `k ∈ [0, min(f, n−2)]` is drawn
//! with probability proportional to `C(n−2, k)`, then `F` is a uniform
//! `k`-subset of `V − {s, t}`. Together this is uniform over all valid
//! `⟨s, t, F⟩` with `|F| ≤ f`.

use alloc::vec::Vec;

use rand::Rng;

use crate::graph::{oracle_connected, Graph, VertexSet};
use crate::labeling::FinalLabel;
use crate::query::{answer, QueryError, QueryInput};
use crate::scheme::Scheme;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuerySample {
    pub s: usize,
    pub t: usize,
    pub faults: VertexSet,
}

/// Reusable sampler for one `(n, f)`.
#[derive(Clone, Debug)]
pub struct QuerySampler {
    n: usize,
    /// Cumulative weights of `k = 0..`.
    cumulative: Vec<f64>,
    pool: Vec<usize>,
}

impl QuerySampler {
    /// `None` when `n < 2`.
    pub fn new(n: usize, f: usize) -> Option<Self> {
        if n < 2 {
            return None;
        }
        let kmax = f.min(n - 2);
        let logs: Vec<f64> = (0..=kmax).map(|k| log_binomial(n - 2, k)).collect();
        let top = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let mut acc = 0.0;
        let cumulative = logs
            .iter()
            .map(|&l| {
                acc += libm::exp(l - top);
                acc
            })
            .collect();
        Some(QuerySampler { n, cumulative, pool: (0..n).collect() })
    }

    pub fn sample<R: Rng>(&mut self, rng: &mut R) -> QuerySample {
        let n = self.n;
        let s = rng.gen_range(0..n);
        let mut t = rng.gen_range(0..n - 1);
        if t >= s {
            t += 1;
        }
        let total = *self.cumulative.last().expect("nonempty");
        let x = rng.gen::<f64>() * total;
        let k = self.cumulative.iter().position(|&c| x < c).unwrap_or(self.cumulative.len() - 1);
        // partial Fisher–Yates over V − {s, t}
        let pool = &mut self.pool;
        pool.clear();
        pool.extend((0..n).filter(|&v| v != s && v != t));
        for i in 0..k {
            let j = rng.gen_range(i..pool.len());
            pool.swap(i, j);
        }
        QuerySample { s, t, faults: VertexSet::from_unsorted(pool[..k].to_vec()) }
    }
}

fn log_binomial(n: usize, k: usize) -> f64 {
    libm::lgamma(n as f64 + 1.0) - libm::lgamma(k as f64 + 1.0) - libm::lgamma((n - k) as f64 + 1.0)
}

/// Aggregated comparison against the oracle.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct BenchCounts {
    pub queries: usize,
    pub agree: usize,
    /// Answered connected, oracle says disconnected.
    pub false_connected: usize,
    /// Answered disconnected, oracle says connected.
    pub false_disconnected: usize,
    /// Oracle-connected queries.
    pub truly_connected: usize,
}

impl BenchCounts {
    pub fn record(&mut self, got: bool, want: bool) {
        self.queries += 1;
        self.truly_connected += usize::from(want);
        match (got, want) {
            (a, b) if a == b => self.agree += 1,
            (true, false) => self.false_connected += 1,
            _ => self.false_disconnected += 1,
        }
    }

    pub fn merge(&mut self, o: &BenchCounts) {
        self.queries += o.queries;
        self.agree += o.agree;
        self.false_connected += o.false_connected;
        self.false_disconnected += o.false_disconnected;
        self.truly_connected += o.truly_connected;
    }

    pub fn agreement(&self) -> f64 {
        if self.queries == 0 {
            1.0
        } else {
            self.agree as f64 / self.queries as f64
        }
    }

    pub fn error_rate(&self) -> f64 {
        1.0 - self.agreement()
    }
}

/// Answers one sampled query from labels and compares with the oracle.
pub fn check_query(g: &Graph, sc: &Scheme, q: &QuerySample) -> Result<(bool, bool), QueryError> {
    check_query_labels(g, &sc.labels, q)
}

/// As [`check_query`], over a label table indexed by vertex.
pub fn check_query_labels(g: &Graph, labels: &[FinalLabel], q: &QuerySample) -> Result<(bool, bool), QueryError> {
    let input = QueryInput { s: &labels[q.s], t: &labels[q.t], faults: q.faults.iter().map(|x| &labels[x]).collect() };
    let got = answer(&input)?.is_connected();
    let want = oracle_connected(g, q.s, q.t, &q.faults).map_err(|e| QueryError::Invalid(alloc::format!("{e}")))?;
    Ok((got, want))
}

/// Runs `queries` sampled queries.
pub fn bench<R: Rng>(g: &Graph, sc: &Scheme, queries: usize, rng: &mut R) -> Result<BenchCounts, QueryError> {
    bench_labels(g, &sc.labels, sc.config.f, queries, rng)
}

/// Runs `queries` sampled queries with up to `f` faults against `labels`.
pub fn bench_labels<R: Rng>(g: &Graph, labels: &[FinalLabel], f: usize, queries: usize, rng: &mut R) -> Result<BenchCounts, QueryError> {
    let mut c = BenchCounts::default();
    if labels.len() != g.n() {
        return Err(QueryError::Invalid(alloc::format!("{} labels for {} vertices", labels.len(), g.n())));
    }
    let Some(mut sampler) = QuerySampler::new(g.n(), f) else {
        return Ok(c);
    };
    for _ in 0..queries {
        let q = sampler.sample(rng);
        let (got, want) = check_query_labels(g, labels, &q)?;
        c.record(got, want);
    }
    Ok(c)
}
