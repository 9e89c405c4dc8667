//! Little-endian packed bitstream encoding of [`FinalLabel`].
//!
//! Header: version (8), n (32), f (8), p (16), ω (8), uid width (8),
//! `S_id` (128), `S_hash` (64), vertex (32), color (8), graph component (32).
//! Then per color: anc (4 × anc width), chain length (8), each component
//! label, a presence bit and the optional subtree block. Counts of
//! neighbors and children use the id width; the out-edge count uses 32 bits.
//! Sketch cells are written at exactly the eid width.

use alloc::sync::Arc;
use alloc::vec::Vec;

use super::*;
use crate::sketch::{AncLabel, Eid, Seeds, Sketch, SketchParams, EID_WORDS};

/// Bits of the fixed header preceding the per-color blocks.
pub const HEADER_BITS: u64 = 344;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Section {
    Header,
    Components,
    Subtree,
    OutEdges,
}

impl Section {
    pub const COUNT: usize = 4;
    pub const ALL: [Section; 4] = [Section::Header, Section::Components, Section::Subtree, Section::OutEdges];

    pub fn name(self) -> &'static str {
        match self {
            Section::Header => "header",
            Section::Components => "component_labels",
            Section::Subtree => "subtree_sketches",
            Section::OutEdges => "out_edge_eids",
        }
    }
}

pub trait BitSink {
    fn put(&mut self, width: u32, value: u64);
    fn section(&mut self, _s: Section) {}
    fn hierarchy(&mut self, _i: usize) {}
}

#[derive(Clone, Debug, Default)]
pub struct BitWriter {
    words: Vec<u64>,
    len: u64,
}

impl BitWriter {
    pub fn bit_len(&self) -> u64 {
        self.len
    }

    pub fn into_bytes(self) -> Vec<u8> {
        let nbytes = self.len.div_ceil(8) as usize;
        let mut out: Vec<u8> = self.words.iter().flat_map(|w| w.to_le_bytes()).collect();
        out.truncate(nbytes);
        out
    }
}

impl BitSink for BitWriter {
    fn put(&mut self, width: u32, value: u64) {
        if width == 0 {
            return;
        }
        let b = (self.len % 64) as u32;
        if b == 0 {
            self.words.push(0);
        }
        let last = self.words.len() - 1;
        self.words[last] |= value << b;
        if b + width > 64 {
            self.words.push(value >> (64 - b));
        }
        self.len += width as u64;
    }
}

/// Counts bits, split by section and by hierarchy.
#[derive(Clone, Debug)]
pub struct BitCounter {
    pub total: u64,
    pub by_section: [u64; Section::COUNT],
    pub by_hierarchy: Vec<u64>,
    cur: Section,
    cur_h: Option<usize>,
}

impl Default for BitCounter {
    fn default() -> Self {
        BitCounter { total: 0, by_section: [0; Section::COUNT], by_hierarchy: Vec::new(), cur: Section::Header, cur_h: None }
    }
}

impl BitSink for BitCounter {
    fn put(&mut self, width: u32, _value: u64) {
        self.total += width as u64;
        self.by_section[self.cur as usize] += width as u64;
        if let Some(h) = self.cur_h {
            self.by_hierarchy[h] += width as u64;
        }
    }

    fn section(&mut self, s: Section) {
        self.cur = s;
    }

    fn hierarchy(&mut self, i: usize) {
        if self.by_hierarchy.len() <= i {
            self.by_hierarchy.resize(i + 1, 0);
        }
        self.cur_h = Some(i);
    }
}

pub struct BitReader {
    words: Vec<u64>,
    len: u64,
    pos: u64,
}

impl BitReader {
    pub fn new(bytes: &[u8]) -> Self {
        let mut words = alloc::vec![0u64; bytes.len().div_ceil(8)];
        for (i, &b) in bytes.iter().enumerate() {
            words[i / 8] |= (b as u64) << (8 * (i % 8));
        }
        BitReader { words, len: bytes.len() as u64 * 8, pos: 0 }
    }

    pub fn get(&mut self, width: u32) -> Result<u64, LabelError> {
        if width == 0 {
            return Ok(0);
        }
        if self.pos + width as u64 > self.len {
            return Err(LabelError::Truncated(self.pos));
        }
        let v = crate::sketch::ids::get_bits(&self.words, self.pos as u32, width);
        self.pos += width as u64;
        Ok(v)
    }

    pub fn position(&self) -> u64 {
        self.pos
    }
}

fn put_anc(w: &mut impl BitSink, p: &SketchParams, a: &AncLabel) {
    for x in a.fields() {
        w.put(p.anc_bits, x as u64);
    }
}

fn get_anc(r: &mut BitReader, p: &SketchParams) -> Result<AncLabel, LabelError> {
    Ok(AncLabel::from_fields([r.get(p.anc_bits)?, r.get(p.anc_bits)?, r.get(p.anc_bits)?, r.get(p.anc_bits)?]))
}

fn put_eid_words(w: &mut impl BitSink, bits: u32, words: &[u64]) {
    let mut left = bits;
    for &x in words {
        if left == 0 {
            break;
        }
        let take = left.min(64);
        w.put(take, if take == 64 { x } else { x & ((1 << take) - 1) });
        left -= take;
    }
}

fn get_eid_words(r: &mut BitReader, bits: u32, out: &mut [u64]) -> Result<(), LabelError> {
    let mut left = bits;
    for x in out.iter_mut() {
        let take = left.min(64);
        *x = r.get(take)?;
        left -= take;
    }
    Ok(())
}

fn put_sketch(w: &mut impl BitSink, p: &SketchParams, sk: &Sketch) {
    let words = sk.words_per_cell();
    for c in 0..p.cells() {
        put_eid_words(w, p.eid_bits(), &sk.as_words()[c * words..(c + 1) * words]);
    }
}

fn get_sketch(r: &mut BitReader, p: &SketchParams) -> Result<Sketch, LabelError> {
    let words = p.words();
    let mut data = alloc::vec![0u64; p.cells() * words];
    for c in 0..p.cells() {
        get_eid_words(r, p.eid_bits(), &mut data[c * words..(c + 1) * words])?;
    }
    Ok(Sketch::from_words(words, data))
}

pub fn encode(l: &FinalLabel, w: &mut impl BitSink) {
    let h = &l.header;
    let p = &h.params;
    w.section(Section::Header);
    w.put(8, h.version as u64);
    w.put(32, p.n as u64);
    w.put(8, p.f as u64);
    w.put(16, p.p as u64);
    w.put(8, p.omega as u64);
    w.put(8, p.uid_bits as u64);
    w.put(64, h.seeds.s_id[0]);
    w.put(64, h.seeds.s_id[1]);
    w.put(64, h.seeds.s_hash);
    w.put(32, h.vertex as u64);
    w.put(8, h.color as u64);
    w.put(32, h.graph_component as u64);
    for (i, hl) in l.hierarchies.iter().enumerate() {
        w.hierarchy(i);
        w.section(Section::Header);
        put_anc(w, p, &hl.anc);
        w.put(8, hl.components.len() as u64);
        w.section(Section::Components);
        for k in &hl.components {
            w.put(p.id_bits, k.id as u64);
            put_anc(w, p, &k.anc);
            put_sketch(w, p, &k.sketch_up);
            w.put(p.id_bits, k.neighbors.len() as u64);
            for e in &k.neighbors {
                w.put(p.id_bits, e.vertex as u64);
                put_anc(w, p, &e.anc);
                put_sketch(w, p, &e.sketch);
            }
        }
        w.section(Section::Subtree);
        w.put(1, hl.subtree.is_some() as u64);
        if let Some(b) = &hl.subtree {
            put_sketch(w, p, &b.sketch_up);
            w.put(p.id_bits, b.children.len() as u64);
            for c in &b.children {
                w.put(p.id_bits, c.vertex as u64);
                put_anc(w, p, &c.anc);
                put_sketch(w, p, &c.sketch_up);
            }
            w.section(Section::OutEdges);
            w.put(32, b.out_edges.len() as u64);
            for e in &b.out_edges {
                put_eid_words(w, p.eid_bits(), &e.0);
            }
        }
    }
}

pub fn decode(r: &mut BitReader) -> Result<FinalLabel, LabelError> {
    let version = r.get(8)? as u8;
    if version != LABEL_VERSION {
        return Err(LabelError::Version(version));
    }
    let n = r.get(32)? as usize;
    let f = r.get(8)? as usize;
    let pp = r.get(16)? as usize;
    let omega = r.get(8)? as u32;
    let uid_bits = r.get(8)? as u32;
    let params = SketchParams::with_dims(n, f, pp, omega, uid_bits).map_err(|_| LabelError::Invalid("header dimensions"))?;
    let seeds = Seeds { s_id: [r.get(64)?, r.get(64)?], s_hash: r.get(64)? };
    let vertex = r.get(32)? as u32;
    let color = r.get(8)? as u8;
    let graph_component = r.get(32)? as u32;
    if vertex as usize >= n || color == 0 || color as usize > f + 1 {
        return Err(LabelError::Invalid("vertex or color"));
    }
    let p = &params;
    let mut hierarchies = Vec::with_capacity(f + 1);
    for _ in 0..=f {
        let anc = get_anc(r, p)?;
        let chain = r.get(8)? as usize;
        let mut components = Vec::with_capacity(chain);
        for _ in 0..chain {
            let id = r.get(p.id_bits)? as u32;
            let kanc = get_anc(r, p)?;
            let sketch_up = Arc::new(get_sketch(r, p)?);
            let cnt = r.get(p.id_bits)? as usize;
            let mut neighbors = Vec::with_capacity(cnt);
            for _ in 0..cnt {
                let vertex = r.get(p.id_bits)? as u32;
                let anc = get_anc(r, p)?;
                neighbors.push(NeighborEntry { vertex, anc, sketch: get_sketch(r, p)? });
            }
            components.push(Arc::new(ComponentLabel { id, anc: kanc, sketch_up, neighbors }));
        }
        let subtree = if r.get(1)? == 1 {
            let sketch_up = Arc::new(get_sketch(r, p)?);
            let cnt = r.get(p.id_bits)? as usize;
            let mut children = Vec::with_capacity(cnt);
            for _ in 0..cnt {
                let vertex = r.get(p.id_bits)? as u32;
                let anc = get_anc(r, p)?;
                children.push(ChildEntry { vertex, anc, sketch_up: Arc::new(get_sketch(r, p)?) });
            }
            let cnt = r.get(32)? as usize;
            let mut out_edges = Vec::with_capacity(cnt.min(1 << 16));
            for _ in 0..cnt {
                let mut e = [0u64; EID_WORDS];
                get_eid_words(r, p.eid_bits(), &mut e[..p.words()])?;
                out_edges.push(Eid(e));
            }
            Some(SubtreeBlock { sketch_up, children, out_edges })
        } else {
            None
        };
        hierarchies.push(HierarchyLabel { anc, components, subtree });
    }
    Ok(FinalLabel { header: LabelHeader { version, params, seeds, vertex, color, graph_component }, hierarchies })
}
