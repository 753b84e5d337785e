//! Finite membership structures.
//!
//! Nodes are `0..n`. An edge `(z, x)` means `z ∈ x` (member first, container
//! second). Extensionality is not assumed: distinct nodes may have identical
//! extensions, and such nodes are co-extensional (`=*`).

mod hierarchy;
mod io;
mod ordinal;

use std::collections::{BTreeSet, HashMap};
use std::sync::OnceLock;
use thiserror::Error;

pub use hierarchy::{hierarchy_stages, in_hierarchy};
pub use io::StructParseError;
pub use ordinal::{
    copy_relation_to, copy_relation_violation, find_star_copy, is_eps_ordinal, is_star_ordinal, successor_node,
    CopyClause, CopyRelation, CopyViolation,
};

pub type NodeSet = BTreeSet<usize>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StructError {
    #[error("node {node} out of range (structure has {len} nodes)")]
    NodeOutOfRange { node: usize, len: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

/// A finite, possibly non-extensional membership graph.
#[derive(Clone, Default)]
pub struct MemStructure {
    // sorted, deduplicated member lists
    members: Vec<Vec<usize>>,
    labels: Vec<Option<String>>,
    cache: OnceLock<Cache>,
}

#[derive(Clone, Debug)]
struct Cache {
    partition: Partition,
    sets: Vec<bool>,
}

/// The `=*`-equivalence classes of a structure.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Partition {
    /// Class id per node. Ids are assigned in order of first appearance.
    pub class_of: Vec<usize>,
    /// Members of each class, ascending.
    pub classes: Vec<Vec<usize>>,
}

impl Partition {
    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn class_members(&self, node: usize) -> &[usize] {
        &self.classes[self.class_of[node]]
    }
}

impl PartialEq for MemStructure {
    fn eq(&self, other: &Self) -> bool {
        self.members == other.members && self.labels == other.labels
    }
}

impl Eq for MemStructure {}

impl std::fmt::Debug for MemStructure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "⟨{};", self.len())?;
        let mut first = true;
        for (z, x) in self.edges() {
            write!(f, "{} {z}→{x}", if first { "" } else { "," })?;
            first = false;
        }
        write!(f, "⟩")
    }
}

impl MemStructure {
    /// `n` nodes, no edges.
    pub fn new(n: usize) -> Self {
        MemStructure { members: vec![Vec::new(); n], labels: vec![None; n], cache: OnceLock::new() }
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self, StructError> {
        let mut s = MemStructure::new(n);
        for &(z, x) in edges {
            s.add_edge(z, x)?;
        }
        Ok(s)
    }

    /// Builds from member lists directly.
    pub fn from_members(members: Vec<Vec<usize>>) -> Result<Self, StructError> {
        let n = members.len();
        let mut s = MemStructure::new(n);
        for (x, ms) in members.into_iter().enumerate() {
            for z in ms {
                s.add_edge(z, x)?;
            }
        }
        Ok(s)
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn nodes(&self) -> std::ops::Range<usize> {
        0..self.len()
    }

    fn check(&self, node: usize) -> Result<(), StructError> {
        if node < self.len() {
            Ok(())
        } else {
            Err(StructError::NodeOutOfRange { node, len: self.len() })
        }
    }

    pub fn add_edge(&mut self, member: usize, container: usize) -> Result<(), StructError> {
        self.check(member)?;
        self.check(container)?;
        let ms = &mut self.members[container];
        if let Err(pos) = ms.binary_search(&member) {
            ms.insert(pos, member);
            self.cache = OnceLock::new();
        }
        Ok(())
    }

    /// Appends a node with the given extension; returns its id.
    pub fn add_node<I: IntoIterator<Item = usize>>(
        &mut self,
        extension: I,
        label: Option<String>,
    ) -> Result<usize, StructError> {
        let id = self.len();
        let mut ms: Vec<usize> = extension.into_iter().collect();
        ms.sort_unstable();
        ms.dedup();
        if let Some(&bad) = ms.iter().find(|&&m| m >= id) {
            return Err(StructError::NodeOutOfRange { node: bad, len: id });
        }
        self.members.push(ms);
        self.labels.push(label);
        self.cache = OnceLock::new();
        Ok(id)
    }

    pub fn set_label(&mut self, node: usize, label: impl Into<String>) -> Result<(), StructError> {
        self.check(node)?;
        self.labels[node] = Some(label.into());
        Ok(())
    }

    pub fn label(&self, node: usize) -> Option<&str> {
        self.labels.get(node).and_then(|l| l.as_deref())
    }

    /// Members of `x`, ascending. Panics if `x` is out of range.
    pub fn members(&self, x: usize) -> &[usize] {
        &self.members[x]
    }

    pub fn contains(&self, container: usize, member: usize) -> bool {
        self.members[container].binary_search(&member).is_ok()
    }

    /// All edges `(member, container)`, ordered by container then member.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.members.iter().enumerate().flat_map(|(x, ms)| ms.iter().map(move |&z| (z, x)))
    }

    pub fn edge_count(&self) -> usize {
        self.members.iter().map(Vec::len).sum()
    }

    /// `{ z : z ∈ x }`.
    pub fn extension(&self, x: usize) -> Result<NodeSet, StructError> {
        self.check(x)?;
        Ok(self.members[x].iter().copied().collect())
    }

    /// Nodes having `x` as a member.
    pub fn containers(&self, x: usize) -> Vec<usize> {
        self.nodes().filter(|&c| self.contains(c, x)).collect()
    }

    fn cache(&self) -> &Cache {
        self.cache.get_or_init(|| {
            let mut index: HashMap<&[usize], usize> = HashMap::new();
            let mut class_of = Vec::with_capacity(self.len());
            let mut classes: Vec<Vec<usize>> = Vec::new();
            for (x, ms) in self.members.iter().enumerate() {
                let id = *index.entry(ms.as_slice()).or_insert_with(|| {
                    classes.push(Vec::new());
                    classes.len() - 1
                });
                classes[id].push(x);
                class_of.push(id);
            }
            let partition = Partition { class_of, classes };
            // x is a set iff every class meeting ext(x) lies inside ext(x)
            let sets = self
                .members
                .iter()
                .map(|ms| {
                    ms.iter().all(|&m| {
                        partition.class_members(m).iter().all(|k| ms.binary_search(k).is_ok())
                    })
                })
                .collect();
            Cache { partition, sets }
        })
    }

    /// The `=*` partition: nodes grouped by equal extensions.
    pub fn coext_classes(&self) -> &Partition {
        &self.cache().partition
    }

    pub fn class_of(&self, x: usize) -> usize {
        self.cache().partition.class_of[x]
    }

    /// `x =* y`.
    pub fn coext(&self, x: usize, y: usize) -> bool {
        self.members[x] == self.members[y]
    }

    /// `set(x)`: the extension of `x` is a union of `=*`-classes.
    pub fn is_set(&self, x: usize) -> bool {
        self.cache().sets[x]
    }

    /// `At(x)`, i.e. `¬set(x)`.
    pub fn at(&self, x: usize) -> bool {
        !self.is_set(x)
    }

    /// `x ∈* y ⟺ set(y) ∧ x ∈ y`.
    pub fn memstar(&self, x: usize, y: usize) -> bool {
        self.is_set(y) && self.contains(y, x)
    }

    /// `{ z : z ∈* x }`: the extension for sets, empty for atoms.
    pub fn star_extension(&self, x: usize) -> NodeSet {
        if self.is_set(x) {
            self.members[x].iter().copied().collect()
        } else {
            NodeSet::new()
        }
    }

    /// Union of the `=*`-classes of the given nodes.
    pub fn saturate<'a, I: IntoIterator<Item = &'a usize>>(&self, nodes: I) -> NodeSet {
        let p = self.coext_classes();
        nodes.into_iter().flat_map(|&x| p.class_members(x).iter().copied()).collect()
    }

    /// Lowest node whose extension equals `ext` exactly.
    pub fn find_extension(&self, ext: &NodeSet) -> Option<usize> {
        self.nodes().find(|&x| self.members[x].len() == ext.len() && self.members[x].iter().eq(ext.iter()))
    }

    /// Collapses `=*`-classes. Returns the quotient and the node → class map.
    /// The quotient has an edge `([z], [x])` iff `z ∈* x`.
    pub fn quotient(&self) -> (MemStructure, Vec<usize>) {
        let p = self.coext_classes();
        let mut q = MemStructure::new(p.len());
        for (c, reps) in p.classes.iter().enumerate() {
            let x = reps[0];
            if self.is_set(x) {
                q.members[c] = self.members[x].iter().map(|&z| p.class_of[z]).collect::<BTreeSet<_>>().into_iter().collect();
            }
            if let Some(l) = self.label(x) {
                q.labels[c] = Some(l.to_string());
            }
        }
        (q, p.class_of.clone())
    }

    /// `j` union steps from `x`: step 0 is `ext(x)`, step `j+1` is the union of
    /// the extensions of step `j`.
    pub fn iterated_union(&self, x: usize, j: usize) -> Result<NodeSet, StructError> {
        let mut level = self.extension(x)?;
        for _ in 0..j {
            level = level.iter().flat_map(|&m| self.members[m].iter().copied()).collect();
        }
        Ok(level)
    }

    /// `y` is an `n`-th union of `x` (`n ≥ 1`; `n = 1` means `y =* x`).
    pub fn is_nth_union(&self, x: usize, n: usize, y: usize) -> Result<bool, StructError> {
        if n == 0 {
            return Err(StructError::InvalidArgument("n-th union needs n ≥ 1".into()));
        }
        self.check(y)?;
        let target = self.iterated_union(x, n - 1)?;
        Ok(self.members[y].iter().copied().eq(target))
    }

    /// Transitive closure class of `x`: the union of all iterated unions.
    pub fn tc(&self, x: usize) -> Result<NodeSet, StructError> {
        let mut level = self.extension(x)?;
        let mut acc = level.clone();
        loop {
            level = level.iter().flat_map(|&m| self.members[m].iter().copied()).collect();
            let before = acc.len();
            acc.extend(level.iter().copied());
            if acc.len() == before {
                return Ok(acc);
            }
        }
    }

    /// `x` is a set and every member of its transitive closure is a set.
    pub fn is_pure_set(&self, x: usize) -> Result<bool, StructError> {
        Ok(self.is_set(x) && self.tc(x)?.into_iter().all(|y| self.is_set(y)))
    }

    /// Purity of every node, computed in one pass.
    pub fn pure_sets(&self) -> Vec<bool> {
        // impure(x) iff x is not a set or some member is impure; greatest fixpoint on purity
        let mut pure: Vec<bool> = self.nodes().map(|x| self.is_set(x)).collect();
        loop {
            let mut changed = false;
            for x in self.nodes() {
                if pure[x] && self.members[x].iter().any(|&m| !pure[m]) {
                    pure[x] = false;
                    changed = true;
                }
            }
            if !changed {
                return pure;
            }
        }
    }

    /// Well-founded rank of every node; `None` where a membership cycle is reachable.
    pub fn ranks(&self) -> Vec<Option<usize>> {
        let mut rank: Vec<Option<usize>> = vec![None; self.len()];
        loop {
            let mut changed = false;
            for x in self.nodes() {
                if rank[x].is_some() {
                    continue;
                }
                let mut r = 0;
                let mut ok = true;
                for &m in &self.members[x] {
                    match rank[m] {
                        Some(rm) => r = r.max(rm + 1),
                        None => {
                            ok = false;
                            break;
                        }
                    }
                }
                if ok {
                    rank[x] = Some(r);
                    changed = true;
                }
            }
            if !changed {
                return rank;
            }
        }
    }

    pub fn is_acyclic(&self) -> bool {
        self.ranks().iter().all(Option::is_some)
    }

    /// `ext(x) ⊆ ext(y)`.
    pub fn subset(&self, x: usize, y: usize) -> bool {
        self.members[x].iter().all(|m| self.members[y].binary_search(m).is_ok())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(n: usize, edges: &[(usize, usize)]) -> MemStructure {
        MemStructure::from_edges(n, edges).unwrap()
    }

    fn set(xs: &[usize]) -> NodeSet {
        xs.iter().copied().collect()
    }

    #[test]
    fn extension_examples() {
        assert_eq!(s(3, &[(0, 2)]).extension(2).unwrap(), set(&[0]));
        assert_eq!(s(3, &[(0, 2)]).extension(0).unwrap(), set(&[]));
        assert_eq!(s(1, &[(0, 0)]).extension(0).unwrap(), set(&[0]));
        assert_eq!(
            s(1, &[]).extension(3),
            Err(StructError::NodeOutOfRange { node: 3, len: 1 })
        );
    }

    #[test]
    fn coext_class_examples() {
        assert_eq!(s(3, &[(0, 2)]).coext_classes().classes, vec![vec![0, 1], vec![2]]);
        assert_eq!(s(2, &[]).coext_classes().classes, vec![vec![0, 1]]);
        assert_eq!(s(2, &[(0, 1)]).coext_classes().classes, vec![vec![0], vec![1]]);
    }

    #[test]
    fn sethood_and_memstar() {
        let atom = s(3, &[(0, 2)]);
        assert!(!atom.is_set(2));
        assert!(atom.at(2));
        assert!(!atom.memstar(0, 2));
        let full = s(3, &[(0, 2), (1, 2)]);
        assert!(full.is_set(2));
        assert!(full.memstar(0, 2));
        assert!(atom.is_set(0) && atom.is_set(1));
    }

    #[test]
    fn quotient_examples() {
        let (q, map) = s(3, &[(0, 2), (1, 2)]).quotient();
        assert_eq!(q.len(), 2);
        assert_eq!(map, vec![0, 0, 1]);
        assert_eq!(q.extension(1).unwrap(), set(&[0]));

        let (q, _) = s(2, &[]).quotient();
        assert_eq!((q.len(), q.edge_count()), (1, 0));

        // the atom class is ∈*-empty
        let (q, _) = s(3, &[(0, 2)]).quotient();
        assert_eq!((q.len(), q.edge_count()), (2, 0));
    }

    #[test]
    fn iterated_unions_on_a_chain() {
        // b=0 ∈ a=1 ∈ x=2
        let c = s(3, &[(0, 1), (1, 2)]);
        assert_eq!(c.iterated_union(2, 0).unwrap(), set(&[1]));
        assert_eq!(c.iterated_union(2, 1).unwrap(), set(&[0]));
        assert_eq!(c.iterated_union(2, 2).unwrap(), set(&[]));
        assert_eq!(c.tc(2).unwrap(), set(&[0, 1]));
        assert!(c.is_nth_union(2, 2, 1).unwrap());
        assert!(c.is_nth_union(2, 1, 2).unwrap());
        assert!(c.is_nth_union(2, 0, 2).is_err());
    }

    #[test]
    fn first_union_is_coextensionality() {
        let t = s(4, &[(0, 2), (0, 3), (1, 1)]);
        for x in t.nodes() {
            for y in t.nodes() {
                assert_eq!(t.is_nth_union(x, 1, y).unwrap(), t.coext(x, y));
            }
        }
    }

    #[test]
    fn purity_examples() {
        let full = s(3, &[(0, 2), (1, 2)]);
        assert_eq!(full.tc(2).unwrap(), set(&[0, 1]));
        assert!(full.is_pure_set(2).unwrap());
        assert!(!s(3, &[(0, 2)]).is_pure_set(2).unwrap());
        assert!(s(3, &[(0, 2)]).is_pure_set(0).unwrap());
        // a set containing an atom is not pure
        let t = s(4, &[(0, 2), (2, 3)]);
        assert!(t.is_set(3) && !t.is_set(2));
        assert!(!t.is_pure_set(3).unwrap());
        let batch = t.pure_sets();
        for x in t.nodes() {
            assert_eq!(batch[x], t.is_pure_set(x).unwrap());
        }
    }

    #[test]
    fn self_loop_has_no_rank_but_is_a_set() {
        let t = s(1, &[(0, 0)]);
        assert_eq!(t.ranks(), vec![None]);
        assert!(t.is_set(0));
        assert_eq!(t.tc(0).unwrap(), set(&[0]));
    }

    #[test]
    fn empty_structure_is_legal() {
        let t = MemStructure::new(0);
        assert!(t.coext_classes().is_empty());
        assert_eq!(t.quotient().0.len(), 0);
    }
}
