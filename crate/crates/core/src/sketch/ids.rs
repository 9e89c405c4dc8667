//! Ancestry labels and bit-packed extended edge identifiers.

use crate::hierarchy::CoarseHierarchy;

/// Words reserved for an eid; enough for `n` up to the key-space limit.
pub const EID_WORDS: usize = 5;

/// DFS interval labels: `K_v` in the hierarchy, then `v` in `T(K_v)`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct AncLabel {
    pub k_pre: u32,
    pub k_post: u32,
    pub t_pre: u32,
    pub t_post: u32,
}

impl AncLabel {
    pub fn of(h: &CoarseHierarchy, v: usize) -> Self {
        let k = &h.components[h.comp_of[v]];
        AncLabel { k_pre: k.pre, k_post: k.post, t_pre: h.tree_pre[v], t_post: h.tree_post[v] }
    }

    /// `K_self ⪯ K_other`.
    pub fn comp_below(&self, other: &AncLabel) -> bool {
        other.k_pre <= self.k_pre && self.k_post <= other.k_post
    }

    pub fn same_comp(&self, other: &AncLabel) -> bool {
        self.k_pre == other.k_pre
    }

    /// `self` lies in `T_other(K)` (same component, tree descendant or equal).
    pub fn tree_below(&self, other: &AncLabel) -> bool {
        self.same_comp(other) && other.t_pre <= self.t_pre && self.t_post <= other.t_post
    }

    pub(crate) fn fields(&self) -> [u32; 4] {
        [self.k_pre, self.k_post, self.t_pre, self.t_post]
    }

    pub(crate) fn from_fields(f: [u64; 4]) -> Self {
        AncLabel { k_pre: f[0] as u32, k_post: f[1] as u32, t_pre: f[2] as u32, t_post: f[3] as u32 }
    }
}

/// An extended edge identifier (or a ⊕-sum of several), zero-padded.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct Eid(pub [u64; EID_WORDS]);

impl Eid {
    pub fn xor_assign(&mut self, other: &Eid) {
        for (a, b) in self.0.iter_mut().zip(other.0.iter()) {
            *a ^= b;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&w| w == 0)
    }
}

/// Number of bits needed to write `x`.
pub fn bits_for(x: u64) -> u32 {
    64 - x.leading_zeros()
}

pub(crate) fn put_bits(words: &mut [u64], offset: u32, width: u32, value: u64) {
    if width == 0 {
        return;
    }
    debug_assert!(width == 64 || value >> width == 0);
    let (w, b) = ((offset / 64) as usize, offset % 64);
    words[w] |= value << b;
    if b + width > 64 {
        words[w + 1] |= value >> (64 - b);
    }
}

pub(crate) fn get_bits(words: &[u64], offset: u32, width: u32) -> u64 {
    if width == 0 {
        return 0;
    }
    let (w, b) = ((offset / 64) as usize, offset % 64);
    let mut v = words[w] >> b;
    if b + width > 64 {
        v |= words[w + 1] << (64 - b);
    }
    if width == 64 {
        v
    } else {
        v & ((1u64 << width) - 1)
    }
}

/// Decoded eid fields.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EidFields {
    pub uid: u64,
    pub tail: usize,
    pub head: usize,
    /// Type code: component id in `1..=n`, or `n + 1` for original edges.
    pub ty: u32,
    pub anc_tail: AncLabel,
    pub anc_head: AncLabel,
}
