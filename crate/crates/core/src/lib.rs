//! Vertex-fault-tolerant connectivity labels.
//!
//! Every vertex receives a self-contained label. Given the labels of `s`, `t`
//! and of up to `f` failed vertices `F`, [`query::answer`] decides whether `s`
//! and `t` are connected in `G - F` without looking at the graph.
//!
//! The pipeline is: [`hierarchy`] (low-degree decomposition, color partition,
//! per-color coarse hierarchies) → [`auxgraph`] (typed auxiliary multigraph,
//! sparsified and oriented) → [`sketch`] (XOR cut sketches) → [`labeling`]
//! (component and vertex labels) → [`query`] (Borůvka over sketches).

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod auxgraph;
pub mod dsu;
pub mod graph;
pub mod harness;
pub mod hierarchy;
pub mod labeling;
pub mod query;
pub mod scheme;
pub mod sketch;
pub mod verify;

pub use graph::{Graph, GraphError, VertexSet};
pub use scheme::{build_scheme, BuildConfig, BuildError, PartitionMode, Scheme};
