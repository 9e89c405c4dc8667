//! Low-degree hierarchies: the base hierarchy over repeated decompositions,
//! the `f+1` color partition, and the coarsened per-color hierarchies.

use alloc::string::String;

pub mod base;
pub mod coarse;
pub mod decomp;
pub mod partition;

pub use base::{build_base_hierarchy, BaseComponent, BaseHierarchy};
pub use coarse::{coarsen, coarsen_with_order, CoarseComponent, CoarseHierarchy};
pub use decomp::{check_decomp, decomp, ContractViolation, DecompResult, Forest};
pub use partition::{derandomized_partition, psi, random_partition, ColorPartition};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum HierarchyError {
    #[error("decomposition contract violated: {0}")]
    Decomp(#[from] ContractViolation),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("internal consistency failure: {0}")]
    Internal(String),
}

/// `log₂ n` as a float; 0 for `n ≤ 1`.
pub fn log2(n: usize) -> f64 {
    if n <= 1 {
        0.0
    } else {
        libm::log2(n as f64)
    }
}

/// Pre/post DFS timestamps in `1..=2N` for a rooted forest given by child
/// lists; roots are visited in the given order.
pub(crate) fn euler_times(children: &[alloc::vec::Vec<usize>], roots: &[usize]) -> (alloc::vec::Vec<u32>, alloc::vec::Vec<u32>) {
    let n = children.len();
    let mut pre = alloc::vec![0u32; n];
    let mut post = alloc::vec![0u32; n];
    let mut clock = 0u32;
    let mut stack: alloc::vec::Vec<(usize, usize)> = alloc::vec::Vec::new();
    for &r in roots {
        clock += 1;
        pre[r] = clock;
        stack.push((r, 0));
        while let Some(&mut (v, ref mut i)) = stack.last_mut() {
            if *i < children[v].len() {
                let c = children[v][*i];
                *i += 1;
                clock += 1;
                pre[c] = clock;
                stack.push((c, 0));
            } else {
                clock += 1;
                post[v] = clock;
                stack.pop();
            }
        }
    }
    (pre, post)
}
