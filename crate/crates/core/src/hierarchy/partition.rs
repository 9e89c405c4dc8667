//! Color partitions `(S_1, …, S_{f+1})`: uniformly random, or derandomized by
//! conditional expectations so every large neighbor set sees every color.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::base::BaseHierarchy;

/// Color `φ(v) ∈ 1..=f+1` per vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColorPartition {
    pub f: usize,
    pub colors: Vec<u8>,
}

impl ColorPartition {
    pub fn color(&self, v: usize) -> usize {
        self.colors[v] as usize
    }

    /// Number of parts, `f + 1`.
    pub fn parts(&self) -> usize {
        self.f + 1
    }

    /// Membership mask of `S_i` (1-based `i`).
    pub fn part_mask(&self, i: usize) -> Vec<bool> {
        self.colors.iter().map(|&c| c as usize == i).collect()
    }

    /// Smallest `i` with `S_i ∩ F = ∅`.
    pub fn free_color(&self, faults: &[usize]) -> Option<usize> {
        (1..=self.parts()).find(|&i| faults.iter().all(|&x| self.color(x) != i))
    }
}

pub fn random_partition(n: usize, f: usize, seed: u64) -> ColorPartition {
    assert!((1..=254).contains(&f), "f must lie in 1..=254");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let colors = (0..n).map(|_| rng.gen_range(1..=f as u8 + 1)).collect();
    ColorPartition { f, colors }
}

/// Probability that at least one of `y` missing colors stays missing after
/// `x` more vertices are colored uniformly from `f + 1` colors.
pub fn psi(x: usize, y: usize, f: usize) -> f64 {
    let q = (f + 1) as f64;
    let mut sum = 0.0;
    let mut binom = 1.0;
    for k in 1..=y {
        binom = binom * (y + 1 - k) as f64 / k as f64;
        let term = binom * libm::pow(1.0 - k as f64 / q, x as f64);
        sum += if k % 2 == 1 { term } else { -term };
    }
    sum.clamp(0.0, 1.0)
}

/// Neighbor-set size at which a component must see every color: `3(f+1)·ln n`.
pub fn hitting_threshold(n: usize, f: usize) -> f64 {
    if n <= 1 {
        return 0.0;
    }
    3.0 * (f + 1) as f64 * libm::log(n as f64)
}

/// Components of `h` whose neighbor sets reach the hitting threshold.
pub fn qualifying_components(h: &BaseHierarchy, f: usize) -> Vec<usize> {
    let th = hitting_threshold(h.n, f);
    (0..h.components.len()).filter(|&c| h.n > 1 && h.components[c].neighbors.len() as f64 >= th).collect()
}

/// Conditional-expectation coloring. Vertices are colored in id order; each
/// takes the color minimizing the sum of conditional failure probabilities
/// over the (truncated) neighbor sets containing it. Ties go to the color
/// used least so far, then the smallest color.
pub fn derandomized_partition(h: &BaseHierarchy, f: usize) -> ColorPartition {
    assert!((1..=254).contains(&f), "f must lie in 1..=254");
    let n = h.n;
    let k = f + 1;
    let qual = qualifying_components(h, f);
    let cap = libm::ceil(hitting_threshold(n, f)) as usize;
    // truncated sets and the reverse index vertex -> sets
    let mut member_of: Vec<Vec<usize>> = alloc::vec![Vec::new(); n];
    let mut remaining: Vec<usize> = Vec::with_capacity(qual.len());
    let mut present: Vec<Vec<bool>> = Vec::with_capacity(qual.len());
    for (j, &c) in qual.iter().enumerate() {
        let set = &h.components[c].neighbors.as_slice()[..cap.min(h.components[c].neighbors.len())];
        for &v in set {
            member_of[v].push(j);
        }
        remaining.push(set.len());
        present.push(alloc::vec![false; k]);
    }
    let mut colors = alloc::vec![0u8; n];
    let mut used = alloc::vec![0usize; k];
    for v in 0..n {
        let mut best: Option<(f64, usize, usize)> = None;
        for col in 0..k {
            let mut delta = 0.0;
            for &j in &member_of[v] {
                let missing = present[j].iter().filter(|&&b| !b).count();
                let before = psi(remaining[j], missing, f);
                let after_missing = if present[j][col] { missing } else { missing - 1 };
                delta += psi(remaining[j] - 1, after_missing, f) - before;
            }
            let cand = (delta, used[col], col);
            let better = match best {
                None => true,
                Some((bd, bu, _)) => delta < bd - 1e-15 || ((delta - bd).abs() <= 1e-15 && used[col] < bu),
            };
            if better {
                best = Some(cand);
            }
        }
        let col = best.map_or(0, |b| b.2);
        colors[v] = (col + 1) as u8;
        used[col] += 1;
        for &j in &member_of[v] {
            present[j][col] = true;
            remaining[j] -= 1;
        }
    }
    ColorPartition { f, colors }
}

/// `(component, color)` pairs violating the hitting guarantee.
pub fn hitting_failures(h: &BaseHierarchy, part: &ColorPartition) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for c in qualifying_components(h, part.f) {
        for col in 1..=part.parts() {
            if !h.components[c].neighbors.iter().any(|v| part.color(v) == col) {
                out.push((c, col));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate, Model};
    use crate::hierarchy::build_base_hierarchy;

    #[test]
    fn psi_identities() {
        for x in 0..20 {
            assert_eq!(psi(x, 0, 3), 0.0);
        }
        for y in 1..=4 {
            assert!((psi(0, y, 3) - 1.0).abs() < 1e-12);
        }
        for f in 1..6 {
            assert!((psi(1, 1, f) - (1.0 - 1.0 / (f + 1) as f64)).abs() < 1e-12);
        }
        // all f+1 colors missing: psi is the coupon-collector failure probability
        let exact = 1.0 - 6.0 / 27.0; // x = 3 draws, 3 colors: 1 - 3!/3³
        assert!((psi(3, 3, 2) - exact).abs() < 1e-12);
    }

    #[test]
    fn pigeonhole() {
        let p = random_partition(100, 2, 9);
        assert!(p.colors.iter().all(|&c| (1..=3).contains(&c)));
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..10_000 {
            let k = rng.gen_range(0..=2);
            let f: Vec<usize> = (0..k).map(|_| rng.gen_range(0..100)).collect();
            let i = p.free_color(&f).unwrap();
            assert!(f.iter().all(|&x| p.color(x) != i));
        }
        assert_eq!(random_partition(1, 1, 0).colors.len(), 1);
        assert_eq!(random_partition(50, 3, 4), random_partition(50, 3, 4));
    }

    #[test]
    fn derandomized_hits_every_color() {
        let g = generate(&Model::Hubs { hubs: 100, leaves: 400, p: 0.8 }, 3).unwrap();
        let h = build_base_hierarchy(&g).unwrap();
        for f in 1..=3 {
            let p = derandomized_partition(&h, f);
            assert!(!qualifying_components(&h, f).is_empty());
            assert!(hitting_failures(&h, &p).is_empty());
            assert_eq!(p, derandomized_partition(&h, f));
        }
    }

    #[test]
    fn star_partition() {
        let g = generate(&Model::Star { k: 9 }, 0).unwrap();
        let h = build_base_hierarchy(&g).unwrap();
        let p = derandomized_partition(&h, 1);
        assert!(hitting_failures(&h, &p).is_empty());
        assert!(p.colors.iter().all(|&c| c == 1 || c == 2));
    }
}
