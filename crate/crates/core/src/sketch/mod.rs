//! Identifier machinery and linear XOR cut sketches.
//!
//! A sketch is a `p × f × (ω+1)` array of eid-wide cells. Edge `u → v` lands
//! in cell `(q, i, j)` when `h_{q,i}(v) = 1` and `φ_{q,i}(e) < 2^{ω−j}`.
//!
//! Eid bit layout, least significant bit first:
//!
//! | field        | width        |
//! |--------------|--------------|
//! | uid          | `uid_bits`   |
//! | id(tail)     | `id_bits`    |
//! | id(head)     | `id_bits`    |
//! | type code    | `id_bits`    |
//! | anc(tail) ×4 | `anc_bits`   |
//! | anc(head) ×4 | `anc_bits`   |
//!
//! Vertex ids are the vertex indices; type codes are component ids (`1..=n`)
//! or `n + 1` for original edges. Anc fields are in `k_pre, k_post, t_pre,
//! t_post` order.

use alloc::vec::Vec;
use core::hash::Hasher;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use siphasher::sip::SipHasher13;

pub mod hash;
pub mod ids;

pub use hash::Pairwise;
pub use ids::{bits_for, AncLabel, Eid, EidFields, EID_WORDS};

use ids::{get_bits, put_bits};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SketchError {
    #[error("sketch dimensions differ ({0} vs {1} words)")]
    DimensionMismatch(usize, usize),
    #[error("invalid sketch parameter: {0}")]
    InvalidParameter(&'static str),
}

/// Largest `n` whose edge keys fit below the hash prime.
pub const MAX_VERTICES: usize = 1 << 20;

/// Fixed widths and dimensions.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SketchParams {
    pub n: usize,
    pub f: usize,
    /// Borůvka rounds.
    pub p: usize,
    pub omega: u32,
    pub uid_bits: u32,
    pub id_bits: u32,
    pub anc_bits: u32,
}

impl SketchParams {
    /// `p = ⌈c · log₂ n⌉` (at least 1), `ω = ⌈log₂(2n²(n+1))⌉`.
    pub fn new(n: usize, f: usize, c: f64, uid_bits: u32) -> Result<Self, SketchError> {
        if n == 0 || n > MAX_VERTICES {
            return Err(SketchError::InvalidParameter("vertex count out of range"));
        }
        if f == 0 {
            return Err(SketchError::InvalidParameter("f must be at least 1"));
        }
        if c.is_nan() || c <= 0.0 {
            return Err(SketchError::InvalidParameter("round constant must be positive"));
        }
        if !(8..=64).contains(&uid_bits) {
            return Err(SketchError::InvalidParameter("uid width must be in 8..=64"));
        }
        let p = (libm::ceil(c * crate::hierarchy::log2(n)) as usize).max(1);
        let all = 2 * (n as u64) * (n as u64) * (n as u64 + 1);
        let omega = bits_for(all - 1).max(1);
        Self::with_dims(n, f, p, omega, uid_bits)
    }

    /// Explicit dimensions (as read back from a label header).
    pub fn with_dims(n: usize, f: usize, p: usize, omega: u32, uid_bits: u32) -> Result<Self, SketchError> {
        if n == 0 || n > MAX_VERTICES || f == 0 || p == 0 || omega == 0 || omega > 63 || !(8..=64).contains(&uid_bits) {
            return Err(SketchError::InvalidParameter("dimension out of range"));
        }
        let s = SketchParams {
            n,
            f,
            p,
            omega,
            uid_bits,
            id_bits: bits_for(n as u64 + 1),
            anc_bits: bits_for(2 * n as u64),
        };
        debug_assert!(s.eid_bits() as usize <= 64 * EID_WORDS);
        Ok(s)
    }

    pub fn eid_bits(&self) -> u32 {
        self.uid_bits + 3 * self.id_bits + 8 * self.anc_bits
    }

    pub fn words(&self) -> usize {
        self.eid_bits().div_ceil(64) as usize
    }

    pub fn levels(&self) -> usize {
        self.omega as usize + 1
    }

    pub fn cells(&self) -> usize {
        self.p * self.f * self.levels()
    }

    /// Serialized size of one sketch.
    pub fn sketch_bits(&self) -> u64 {
        self.cells() as u64 * self.eid_bits() as u64
    }

    #[inline]
    pub fn cell_index(&self, q: usize, i: usize, j: usize) -> usize {
        (q * self.f + i) * self.levels() + j
    }

    pub fn original_code(&self) -> u32 {
        self.n as u32 + 1
    }
}

/// Seeds determining uids (`s_id`) and every hash function (`s_hash`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Seeds {
    pub s_id: [u64; 2],
    pub s_hash: u64,
}

impl Seeds {
    pub fn from_seed(seed: u64) -> Self {
        use rand::Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_5eed_5eed_5eed);
        Seeds { s_id: [rng.gen(), rng.gen()], s_hash: rng.gen() }
    }
}

/// A linear cut sketch: flat cell array with `words` u64s per cell.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Sketch {
    words: usize,
    data: Vec<u64>,
}

impl Sketch {
    pub fn zero(params: &SketchParams) -> Self {
        Sketch { words: params.words(), data: alloc::vec![0; params.cells() * params.words()] }
    }

    pub fn words_per_cell(&self) -> usize {
        self.words
    }

    pub fn as_words(&self) -> &[u64] {
        &self.data
    }

    pub(crate) fn from_words(words: usize, data: Vec<u64>) -> Self {
        Sketch { words, data }
    }

    pub fn cell(&self, idx: usize) -> &[u64] {
        &self.data[idx * self.words..(idx + 1) * self.words]
    }

    fn cell_mut(&mut self, idx: usize) -> &mut [u64] {
        &mut self.data[idx * self.words..(idx + 1) * self.words]
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&w| w == 0)
    }

    /// Cell-wise ⊕ (Merge).
    pub fn xor_assign(&mut self, other: &Sketch) -> Result<(), SketchError> {
        if self.data.len() != other.data.len() || self.words != other.words {
            return Err(SketchError::DimensionMismatch(self.data.len(), other.data.len()));
        }
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a ^= b;
        }
        Ok(())
    }

    pub fn merge(a: &Sketch, b: &Sketch) -> Result<Sketch, SketchError> {
        let mut out = a.clone();
        out.xor_assign(b)?;
        Ok(out)
    }

    /// Whether round `q` is all zero.
    pub fn round_is_zero(&self, params: &SketchParams, q: usize) -> bool {
        let span = params.f * params.levels() * self.words;
        self.data[q * span..(q + 1) * span].iter().all(|&w| w == 0)
    }
}

/// Seeds expanded into hash functions, plus the widths.
#[derive(Clone, Debug)]
pub struct SketchContext {
    pub params: SketchParams,
    pub seeds: Seeds,
    h: Vec<Pairwise>,
    phi: Vec<Pairwise>,
}

impl SketchContext {
    pub fn new(params: SketchParams, seeds: Seeds) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seeds.s_hash);
        let slots = params.p * params.f;
        let h = (0..slots).map(|_| Pairwise::random(&mut rng)).collect();
        let phi = (0..slots).map(|_| Pairwise::random(&mut rng)).collect();
        SketchContext { params, seeds, h, phi }
    }

    /// `h_{q,i}(v) ∈ [1, 2f]`.
    #[inline]
    pub fn h(&self, q: usize, i: usize, v: usize) -> u64 {
        self.h[q * self.params.f + i].eval(v as u64) % (2 * self.params.f as u64) + 1
    }

    /// `φ_{q,i}(key) ∈ [0, 2^ω)`.
    #[inline]
    pub fn phi(&self, q: usize, i: usize, key: u64) -> u64 {
        self.phi[q * self.params.f + i].eval(key) & ((1u64 << self.params.omega) - 1)
    }

    /// Slots `q·f + i` with `h_{q,i}(v) = 1`.
    pub fn head_slots(&self, v: usize) -> Vec<u32> {
        (0..self.params.p * self.params.f).filter(|&s| self.h[s].eval(v as u64) % (2 * self.params.f as u64) == 0).map(|s| s as u32).collect()
    }

    /// Edge key in `[0, (n+2)³)`; orientation-sensitive.
    pub fn key(&self, tail: usize, head: usize, ty: u32) -> u64 {
        let b = self.params.n as u64 + 2;
        (tail as u64 * b + head as u64) * b + ty as u64
    }

    pub fn uid(&self, tail: usize, head: usize, ty: u32) -> u64 {
        let mut s = SipHasher13::new_with_keys(self.seeds.s_id[0], self.seeds.s_id[1]);
        s.write_u64(tail as u64);
        s.write_u64(head as u64);
        s.write_u32(ty);
        let x = s.finish();
        if self.params.uid_bits == 64 {
            x
        } else {
            x & ((1u64 << self.params.uid_bits) - 1)
        }
    }

    pub fn eid(&self, tail: usize, head: usize, ty: u32, anc_tail: AncLabel, anc_head: AncLabel) -> Eid {
        let p = &self.params;
        let mut w = [0u64; EID_WORDS];
        let mut off = 0;
        let mut put = |width: u32, v: u64| {
            put_bits(&mut w, off, width, v);
            off += width;
        };
        put(p.uid_bits, self.uid(tail, head, ty));
        put(p.id_bits, tail as u64);
        put(p.id_bits, head as u64);
        put(p.id_bits, ty as u64);
        for a in anc_tail.fields().into_iter().chain(anc_head.fields()) {
            put(p.anc_bits, a as u64);
        }
        Eid(w)
    }

    /// Raw field extraction without validation.
    pub fn fields(&self, words: &[u64]) -> EidFields {
        let p = &self.params;
        let mut off = 0;
        let mut get = |width: u32| {
            let v = get_bits(words, off, width);
            off += width;
            v
        };
        let uid = get(p.uid_bits);
        let tail = get(p.id_bits) as usize;
        let head = get(p.id_bits) as usize;
        let ty = get(p.id_bits) as u32;
        let at = [get(p.anc_bits), get(p.anc_bits), get(p.anc_bits), get(p.anc_bits)];
        let ah = [get(p.anc_bits), get(p.anc_bits), get(p.anc_bits), get(p.anc_bits)];
        EidFields { uid, tail, head, ty, anc_tail: AncLabel::from_fields(at), anc_head: AncLabel::from_fields(ah) }
    }

    /// Decodes a cell that holds exactly one eid; `None` when the cell is a
    /// sum of zero or several eids (up to uid collisions).
    pub fn decode_single(&self, words: &[u64]) -> Option<EidFields> {
        if words.iter().all(|&w| w == 0) {
            return None;
        }
        let p = &self.params;
        let e = self.fields(words);
        if e.tail >= p.n || e.head >= p.n || e.tail == e.head || e.ty == 0 || e.ty > p.original_code() {
            return None;
        }
        (self.uid(e.tail, e.head, e.ty) == e.uid).then_some(e)
    }

    /// Inserts `eid` (⊕) into every cell it belongs to.
    pub fn add_eid(&self, sk: &mut Sketch, eid: &Eid) {
        let f = self.fields(&eid.0);
        let slots = self.head_slots(f.head);
        self.add_eid_slots(sk, eid, &slots);
    }

    /// As [`add_eid`](Self::add_eid) with precomputed [`head_slots`](Self::head_slots).
    pub fn add_eid_slots(&self, sk: &mut Sketch, eid: &Eid, slots: &[u32]) {
        let f = self.fields(&eid.0);
        let key = self.key(f.tail, f.head, f.ty);
        let omega = self.params.omega;
        let words = sk.words;
        for &s in slots {
            let s = s as usize;
            let (q, i) = (s / self.params.f, s % self.params.f);
            let x = self.phi(q, i, key);
            let top = omega - bits_for(x).min(omega);
            for j in 0..=top as usize {
                let cell = sk.cell_mut(self.params.cell_index(q, i, j));
                for (c, e) in cell.iter_mut().zip(&eid.0[..words]) {
                    *c ^= e;
                }
            }
        }
    }

    /// `sketch({e})` rebuilt from the eid and the hash seed.
    pub fn sketch_of_single(&self, eid: &Eid) -> Sketch {
        let mut sk = Sketch::zero(&self.params);
        self.add_eid(&mut sk, eid);
        sk
    }

    pub fn sketch_of<'a>(&self, eids: impl IntoIterator<Item = &'a Eid>) -> Sketch {
        let mut sk = Sketch::zero(&self.params);
        for e in eids {
            self.add_eid(&mut sk, e);
        }
        sk
    }

    /// Scans the cells of round `q` and returns the first isolated edge with
    /// both endpoints outside `faults`.
    pub fn get_edge(&self, sk: &Sketch, q: usize, faults: &[usize]) -> Option<EidFields> {
        for i in 0..self.params.f {
            for j in 0..self.params.levels() {
                if let Some(e) = self.decode_single(sk.cell(self.params.cell_index(q, i, j))) {
                    if !faults.contains(&e.tail) && !faults.contains(&e.head) {
                        return Some(e);
                    }
                }
            }
        }
        None
    }
}
