//! Structure families: exhaustive small digraphs, hereditarily finite
//! universes, doppelgänger and atom injection, seeded random structures.
//!
//! Random structures come from ChaCha8 seeded with `seed_from_u64`; for each
//! ordered pair `(z, x)` in row-major order one `f64` is drawn and the edge
//! `z ∈ x` is present when it is below the density. The stream is fixed by
//! the generator's specification, so outputs agree across platforms.

use crate::memstruct::{MemStructure, StructError};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::ops::Range;
use thiserror::Error;

pub const MAX_EXHAUSTIVE_NODES: usize = 4;
pub const MAX_HF_RANK: usize = 4;
pub const MAX_RANDOM_NODES: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenError {
    #[error("{what} {value} out of supported range {range}")]
    OutOfRange { what: &'static str, value: String, range: &'static str },
    #[error(transparent)]
    Struct(#[from] StructError),
    #[error("extension {0:?} is closed under co-extensionality, so the node would be a set")]
    NotAnAtom(Vec<usize>),
}

/// Number of structures on `n` nodes.
pub fn mask_count(n: usize) -> u64 {
    1u64 << (n * n)
}

/// Bit `z * n + x` of `mask` is the edge `z ∈ x`.
pub fn structure_from_mask(n: usize, mask: u64) -> MemStructure {
    let mut members = vec![Vec::new(); n];
    for (x, ms) in members.iter_mut().enumerate() {
        for z in 0..n {
            if mask >> (z * n + x) & 1 == 1 {
                ms.push(z);
            }
        }
    }
    MemStructure::from_members(members).expect("ids in range")
}

/// The edge mask of a structure (inverse of [`structure_from_mask`]).
pub fn mask_of(s: &MemStructure) -> u64 {
    let n = s.len();
    s.edges().fold(0, |m, (z, x)| m | 1 << (z * n + x))
}

/// Smallest mask over all relabelings of the nodes.
pub fn canonical_mask(n: usize, mask: u64) -> u64 {
    let mut perm: Vec<usize> = (0..n).collect();
    let mut best = mask;
    loop {
        let mut m = 0u64;
        for z in 0..n {
            for x in 0..n {
                if mask >> (z * n + x) & 1 == 1 {
                    m |= 1 << (perm[z] * n + perm[x]);
                }
            }
        }
        best = best.min(m);
        if !next_permutation(&mut perm) {
            return best;
        }
    }
}

fn next_permutation(p: &mut [usize]) -> bool {
    let Some(i) = (1..p.len()).rev().find(|&i| p[i - 1] < p[i]) else {
        return false;
    };
    let j = (i..p.len()).rev().find(|&j| p[j] > p[i - 1]).expect("successor exists");
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// Pull-based stream over a range of edge masks.
#[derive(Clone, Debug)]
pub struct Enumeration {
    n: usize,
    masks: Range<u64>,
    dedup: bool,
}

impl Iterator for Enumeration {
    type Item = (u64, MemStructure);

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            let m = self.masks.next()?;
            if !self.dedup || canonical_mask(self.n, m) == m {
                return Some((m, structure_from_mask(self.n, m)));
            }
        }
    }
}

fn check_exhaustive(n: usize) -> Result<(), GenError> {
    if (1..=MAX_EXHAUSTIVE_NODES).contains(&n) {
        Ok(())
    } else {
        Err(GenError::OutOfRange { what: "node count", value: n.to_string(), range: "1..=4" })
    }
}

/// Every edge subset on `n` nodes, once each, in mask order.
pub fn enumerate_all(n: usize) -> Result<Enumeration, GenError> {
    enumerate_range(n, 0..mask_count(n), false)
}

/// One representative per isomorphism class (the one with the least mask).
pub fn enumerate_dedup(n: usize) -> Result<Enumeration, GenError> {
    enumerate_range(n, 0..mask_count(n), true)
}

pub fn enumerate_range(n: usize, masks: Range<u64>, dedup: bool) -> Result<Enumeration, GenError> {
    check_exhaustive(n)?;
    let end = masks.end.min(mask_count(n));
    Ok(Enumeration { n, masks: masks.start.min(end)..end, dedup })
}

/// Splits `0..2^(n²)` into `shards` contiguous mask ranges (prefix sharding).
pub fn shard_ranges(n: usize, shards: usize) -> Vec<Range<u64>> {
    let total = mask_count(n);
    let k = (shards.max(1) as u64).min(total);
    (0..k).map(|i| total * i / k..total * (i + 1) / k).collect()
}

/// Hereditarily finite sets of rank `≤ rank`, one node per set. Node `i` is
/// the set with Ackermann code `i`: `j ∈ i` iff bit `j` of `i` is set.
pub fn build_hf(rank: usize) -> Result<MemStructure, GenError> {
    if rank > MAX_HF_RANK {
        return Err(GenError::OutOfRange { what: "rank", value: rank.to_string(), range: "0..=4" });
    }
    // |V_{k+1}| = 2^|V_k|
    let mut size = 1usize;
    for _ in 0..rank {
        size = 1 << size;
    }
    let mut labels: Vec<String> = Vec::with_capacity(size);
    let mut members = Vec::with_capacity(size);
    for i in 0..size {
        let ms: Vec<usize> = (0..usize::BITS as usize).filter(|&j| i >> j & 1 == 1).collect();
        let label = if ms.is_empty() {
            "∅".to_string()
        } else {
            let parts: Vec<&str> = ms.iter().map(|&j| labels[j].as_str()).collect();
            format!("{{{}}}", parts.join(","))
        };
        labels.push(label);
        members.push(ms);
    }
    let mut s = MemStructure::from_members(members)?;
    for (i, l) in labels.into_iter().enumerate() {
        s.set_label(i, l)?;
    }
    Ok(s)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum DoppelMode {
    /// The copy is a member of nothing.
    #[default]
    Shallow,
    /// The copy is added to every container of the original.
    Deep,
}

/// Appends `count` co-extensional copies of each listed node.
pub fn add_doppelgangers(
    s: &MemStructure,
    copies: &[(usize, usize)],
    mode: DoppelMode,
) -> Result<MemStructure, GenError> {
    let mut out = s.clone();
    for &(x, count) in copies {
        let ext = s.extension(x)?;
        let containers = s.containers(x);
        let base = s.label(x).map(str::to_string).unwrap_or_else(|| x.to_string());
        for k in 0..count {
            let label = format!("{base}{}", "′".repeat(k + 1));
            let id = out.add_node(ext.iter().copied(), Some(label))?;
            if mode == DoppelMode::Deep {
                for &c in &containers {
                    out.add_edge(id, c)?;
                }
            }
        }
    }
    Ok(out)
}

/// Appends one atom per spec. A spec is rejected unless it omits part of some
/// co-extensionality class that it meets.
pub fn add_atoms(s: &MemStructure, specs: &[Vec<usize>]) -> Result<MemStructure, GenError> {
    let mut out = s.clone();
    for spec in specs {
        for &z in spec {
            if z >= out.len() {
                return Err(StructError::NodeOutOfRange { node: z, len: out.len() }.into());
            }
        }
        let ext: crate::memstruct::NodeSet = spec.iter().copied().collect();
        if out.saturate(&ext) == ext {
            return Err(GenError::NotAnAtom(spec.clone()));
        }
        let id = out.add_node(ext.iter().copied(), Some(format!("atom{}", out.len())))?;
        debug_assert!(!out.is_set(id));
    }
    Ok(out)
}

/// Seeded random structure; see the module docs for the exact stream.
pub fn random_structure(n: usize, edge_prob: f64, seed: u64) -> Result<MemStructure, GenError> {
    if n > MAX_RANDOM_NODES {
        return Err(GenError::OutOfRange { what: "node count", value: n.to_string(), range: "0..=16" });
    }
    if !(0.0..=1.0).contains(&edge_prob) {
        return Err(GenError::OutOfRange { what: "edge probability", value: edge_prob.to_string(), range: "[0, 1]" });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut s = MemStructure::new(n);
    for z in 0..n {
        for x in 0..n {
            if rng.gen::<f64>() < edge_prob {
                s.add_edge(z, x)?;
            }
        }
    }
    Ok(s)
}

/// HF(3) with two doppelgängers of `∅` and one of `{∅}`, shallow mode.
pub fn standard_family() -> MemStructure {
    let hf = build_hf(3).expect("rank in range");
    add_doppelgangers(&hf, &[(0, 2), (1, 1)], DoppelMode::Shallow).expect("nodes in range")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn enumeration_counts() {
        assert_eq!(enumerate_all(1).unwrap().count(), 2);
        assert_eq!(enumerate_all(2).unwrap().count(), 16);
        assert_eq!(enumerate_all(3).unwrap().count(), 512);
        assert!(enumerate_all(0).is_err());
        assert!(enumerate_all(5).is_err());
    }

    #[test]
    fn masks_round_trip() {
        for (m, s) in enumerate_all(3).unwrap() {
            assert_eq!(mask_of(&s), m);
        }
        let s = structure_from_mask(2, 0b0010);
        // bit 1 = z 0, x 1
        assert!(s.contains(1, 0));
    }

    #[test]
    fn dedup_counts_match_unlabeled_digraphs_with_loops() {
        // OEIS A000595: 2, 10, 104
        assert_eq!(enumerate_dedup(1).unwrap().count(), 2);
        assert_eq!(enumerate_dedup(2).unwrap().count(), 10);
        assert_eq!(enumerate_dedup(3).unwrap().count(), 104);
    }

    #[test]
    fn shards_cover_everything() {
        let r = shard_ranges(3, 7);
        assert_eq!(r.first().unwrap().start, 0);
        assert_eq!(r.last().unwrap().end, 512);
        assert!(r.windows(2).all(|w| w[0].end == w[1].start));
    }

    #[test]
    fn hf_sizes_and_labels() {
        assert_eq!(build_hf(0).unwrap().len(), 1);
        assert_eq!(build_hf(1).unwrap().len(), 2);
        assert_eq!(build_hf(2).unwrap().len(), 4);
        let hf3 = build_hf(3).unwrap();
        assert_eq!(hf3.len(), 16);
        assert_eq!(hf3.label(3), Some("{∅,{∅}}"));
        assert!(build_hf(5).is_err());
    }

    #[test]
    fn hf_is_extensional_and_acyclic() {
        let hf = build_hf(3).unwrap();
        assert!(hf.is_acyclic());
        assert_eq!(hf.coext_classes().len(), hf.len());
        assert!(hf.nodes().all(|x| hf.is_set(x)));
    }

    #[test]
    fn doppelganger_of_empty_joins_its_class() {
        let s = add_doppelgangers(&build_hf(2).unwrap(), &[(0, 1)], DoppelMode::Shallow).unwrap();
        assert_eq!(s.len(), 5);
        assert!(s.coext(0, 4));
        assert_eq!(s.label(4), Some("∅′"));
        // {∅} now misses ∅′
        assert!(!s.is_set(1));
        let deep = add_doppelgangers(&build_hf(2).unwrap(), &[(0, 1)], DoppelMode::Deep).unwrap();
        assert!(deep.nodes().all(|x| deep.is_set(x)));
    }

    #[test]
    fn atoms_must_break_a_class() {
        let s = add_doppelgangers(&build_hf(2).unwrap(), &[(0, 1)], DoppelMode::Deep).unwrap();
        let a = add_atoms(&s, &[vec![0]]).unwrap();
        assert!(!a.is_set(5));
        assert_eq!(add_atoms(&s, &[vec![0, 4]]), Err(GenError::NotAnAtom(vec![0, 4])));
        assert_eq!(add_atoms(&s, &[vec![]]), Err(GenError::NotAnAtom(vec![])));
    }

    #[test]
    fn random_extremes() {
        assert_eq!(random_structure(3, 0.0, 9).unwrap().edge_count(), 0);
        assert_eq!(random_structure(3, 1.0, 9).unwrap().edge_count(), 9);
        assert!(random_structure(17, 0.5, 0).is_err());
        assert!(random_structure(3, 1.5, 0).is_err());
        assert_eq!(random_structure(6, 0.4, 5).unwrap(), random_structure(6, 0.4, 5).unwrap());
    }

    #[test]
    fn standard_family_shape() {
        let f = standard_family();
        assert_eq!(f.len(), 19);
        assert_eq!(f.coext_classes().class_members(0), &[0, 16, 17]);
        assert!(f.coext(1, 18));
    }
}
