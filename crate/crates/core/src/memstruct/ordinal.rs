//! ∈-ordinals, ∈*-ordinals and ordinal copying relations.
//!
//! Copying relations are kept outside the structure as explicit pair lists;
//! small structures rarely contain the Kuratowski pairs needed to encode them.

use super::MemStructure;
use std::collections::BTreeSet;
use std::fmt;

fn transitive(s: &MemStructure, x: usize) -> bool {
    s.members(x).iter().all(|&m| s.subset(m, x))
}

fn well_founded(s: &MemStructure, x: usize) -> bool {
    s.ranks()[x].is_some()
}

/// Transitive, with transitive members, no two distinct members co-extensional,
/// and well-founded.
pub fn is_eps_ordinal(s: &MemStructure, x: usize) -> bool {
    if !well_founded(s, x) || !transitive(s, x) {
        return false;
    }
    let ms = s.members(x);
    if !ms.iter().all(|&m| transitive(s, m)) {
        return false;
    }
    let classes: BTreeSet<usize> = ms.iter().map(|&m| s.class_of(m)).collect();
    classes.len() == ms.len()
}

/// A transitive set of transitive sets, well-founded.
pub fn is_star_ordinal(s: &MemStructure, x: usize) -> bool {
    well_founded(s, x)
        && s.is_set(x)
        && transitive(s, x)
        && s.members(x).iter().all(|&m| s.is_set(m) && transitive(s, m))
}

/// The ordinal copying relation `F` from `source` (n) to `target` (m).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CopyRelation {
    pub source: usize,
    pub target: usize,
    pub pairs: Vec<(usize, usize)>,
}

impl CopyRelation {
    pub fn new(source: usize, target: usize, mut pairs: Vec<(usize, usize)>) -> Self {
        pairs.sort_unstable();
        pairs.dedup();
        CopyRelation { source, target, pairs }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CopyClause {
    /// every pair `(a, b)` must have `a ∈ n` and `b ∈ m`
    Precondition,
    /// `a = c ⟺ b =* d`
    QuasiInjectivity,
    /// every member of `n` and of `m` occurs in some pair
    QuasiSurjectivity,
    /// `a ∈ c ⟺ b ∈* d`
    QuasiIsomorphism,
}

impl CopyClause {
    pub fn tag(self) -> &'static str {
        match self {
            CopyClause::Precondition => "precondition",
            CopyClause::QuasiInjectivity => "quasi-injectivity",
            CopyClause::QuasiSurjectivity => "quasi-surjectivity",
            CopyClause::QuasiIsomorphism => "quasi-isomorphism",
        }
    }

    pub fn from_tag(tag: &str) -> Option<CopyClause> {
        [
            CopyClause::Precondition,
            CopyClause::QuasiInjectivity,
            CopyClause::QuasiSurjectivity,
            CopyClause::QuasiIsomorphism,
        ]
        .into_iter()
        .find(|c| c.tag() == tag)
    }
}

impl fmt::Display for CopyClause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// The first violated clause, with the offending pairs (or the unmatched node).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CopyViolation {
    pub clause: CopyClause,
    pub detail: String,
}

/// Checks the copying conditions in order: precondition, quasi-injectivity,
/// quasi-surjectivity, quasi-isomorphism.
pub fn copy_relation_violation(s: &MemStructure, f: &CopyRelation) -> Option<CopyViolation> {
    let (n, m) = (f.source, f.target);
    if n >= s.len() || m >= s.len() {
        return Some(CopyViolation {
            clause: CopyClause::Precondition,
            detail: format!("source {n} or target {m} out of range"),
        });
    }
    for &(a, b) in &f.pairs {
        if a >= s.len() || b >= s.len() || !s.contains(n, a) || !s.contains(m, b) {
            return Some(CopyViolation {
                clause: CopyClause::Precondition,
                detail: format!("pair ({a},{b}) not in {n}×{m}"),
            });
        }
    }
    for &(a, b) in &f.pairs {
        for &(c, d) in &f.pairs {
            if (a == c) != s.coext(b, d) {
                return Some(CopyViolation {
                    clause: CopyClause::QuasiInjectivity,
                    detail: format!("pairs ({a},{b}) and ({c},{d})"),
                });
            }
        }
    }
    for &a in s.members(n) {
        if !f.pairs.iter().any(|&(x, _)| x == a) {
            return Some(CopyViolation {
                clause: CopyClause::QuasiSurjectivity,
                detail: format!("source member {a} unmatched"),
            });
        }
    }
    for &b in s.members(m) {
        if !f.pairs.iter().any(|&(_, y)| y == b) {
            return Some(CopyViolation {
                clause: CopyClause::QuasiSurjectivity,
                detail: format!("target member {b} unmatched"),
            });
        }
    }
    for &(a, b) in &f.pairs {
        for &(c, d) in &f.pairs {
            if s.contains(c, a) != s.memstar(b, d) {
                return Some(CopyViolation {
                    clause: CopyClause::QuasiIsomorphism,
                    detail: format!("pairs ({a},{b}) and ({c},{d})"),
                });
            }
        }
    }
    None
}

/// The member `p` of `n` with `ext(n) = ext(p) ∪ {p}`, if any.
pub fn predecessor(s: &MemStructure, n: usize) -> Option<usize> {
    s.members(n).iter().copied().find(|&p| {
        !s.contains(p, p)
            && s.members(n).len() == s.members(p).len() + 1
            && s.subset(p, n)
    })
}

/// Lowest ∈-ordinal node with extension `ext(n) ∪ {n}`.
pub fn successor_node(s: &MemStructure, n: usize) -> Option<usize> {
    s.nodes().find(|&c| {
        s.contains(c, n)
            && s.members(c).len() == s.members(n).len() + 1
            && s.subset(n, c)
            && is_eps_ordinal(s, c)
    })
}

const EXHAUSTIVE_LIMIT: usize = 6;

/// Finds an ∈*-ordinal copy of the ∈-ordinal `n` together with a verified
/// copying relation. The empty ordinal is its own copy. Otherwise candidate
/// targets are tried in ascending id order, first by the successor recipe
/// (`G = F ∪ {p} × {x : x =* p*}`) and then, for `|ext(n)| ≤ 6`, by trying
/// every matching of members of `n` to member classes of the target.
pub fn find_star_copy(s: &MemStructure, n: usize) -> Option<(usize, CopyRelation)> {
    if n >= s.len() || !is_eps_ordinal(s, n) {
        return None;
    }
    if s.members(n).is_empty() {
        return Some((n, CopyRelation::new(n, n, Vec::new())));
    }
    let recipe_base = predecessor(s, n).and_then(|p| find_star_copy(s, p).map(|c| (p, c)));
    for m in s.nodes() {
        if !is_star_ordinal(s, m) {
            continue;
        }
        if let Some((p, (p_star, fp))) = &recipe_base {
            let mut pairs = fp.pairs.clone();
            pairs.extend(s.members(m).iter().filter(|&&b| s.coext(b, *p_star)).map(|&b| (*p, b)));
            let g = CopyRelation::new(n, m, pairs);
            if copy_relation_violation(s, &g).is_none() {
                return Some((m, g));
            }
        }
        if s.members(n).len() <= EXHAUSTIVE_LIMIT {
            if let Some(g) = search_matching(s, n, m) {
                return Some((m, g));
            }
        }
    }
    None
}

/// A verified copying relation from the ∈-ordinal `n` to the ∈*-ordinal `m`,
/// by exhaustive matching (`|ext(n)| ≤ 6`).
pub fn copy_relation_to(s: &MemStructure, n: usize, m: usize) -> Option<CopyRelation> {
    if n >= s.len() || m >= s.len() || !is_eps_ordinal(s, n) || !is_star_ordinal(s, m) {
        return None;
    }
    if s.members(n).len() > EXHAUSTIVE_LIMIT {
        return None;
    }
    if s.members(n).is_empty() {
        return s.members(m).is_empty().then(|| CopyRelation::new(n, m, Vec::new()));
    }
    search_matching(s, n, m)
}

/// A quasi-bijective relation is fixed by a bijection from members of `n` to
/// the `=*`-classes met by `ext(m)`; enumerate those bijections.
fn search_matching(s: &MemStructure, n: usize, m: usize) -> Option<CopyRelation> {
    let sources = s.members(n).to_vec();
    let mut classes: Vec<usize> = s.members(m).iter().map(|&b| s.class_of(b)).collect();
    classes.sort_unstable();
    classes.dedup();
    if classes.len() != sources.len() {
        return None;
    }
    let mut perm: Vec<usize> = (0..classes.len()).collect();
    loop {
        let pairs = sources
            .iter()
            .zip(&perm)
            .flat_map(|(&a, &ci)| {
                let c = classes[ci];
                s.members(m).iter().filter(move |&&b| s.class_of(b) == c).map(move |&b| (a, b))
            })
            .collect();
        let g = CopyRelation::new(n, m, pairs);
        if copy_relation_violation(s, &g).is_none() {
            return Some(g);
        }
        if !next_permutation(&mut perm) {
            return None;
        }
    }
}

fn next_permutation(p: &mut [usize]) -> bool {
    if p.len() < 2 {
        return false;
    }
    let mut i = p.len() - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = p.len() - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    // 0 = ∅, 1 = ∅′, 2 = {∅}, 3 = {∅,∅′}, 4 = self-loop
    fn sample() -> MemStructure {
        MemStructure::from_edges(5, &[(0, 2), (0, 3), (1, 3), (4, 4)]).unwrap()
    }

    #[test]
    fn ordinal_predicates() {
        let s = sample();
        assert!(is_eps_ordinal(&s, 0) && is_eps_ordinal(&s, 2));
        assert!(is_star_ordinal(&s, 3));
        assert!(!is_eps_ordinal(&s, 3));
        assert!(!is_eps_ordinal(&s, 4) && !is_star_ordinal(&s, 4));
        // {∅} misses ∅′, so it is an atom
        assert!(!is_star_ordinal(&s, 2));
    }

    #[test]
    fn empty_relation_between_empty_nodes() {
        let s = sample();
        assert_eq!(copy_relation_violation(&s, &CopyRelation::new(0, 1, vec![])), None);
    }

    #[test]
    fn dropped_pair_breaks_surjectivity() {
        let s = sample();
        let f = CopyRelation::new(2, 3, vec![(0, 0)]);
        assert_eq!(copy_relation_violation(&s, &f).unwrap().clause, CopyClause::QuasiSurjectivity);
        let f = CopyRelation::new(2, 3, vec![(0, 0), (0, 1)]);
        assert_eq!(copy_relation_violation(&s, &f), None);
    }

    #[test]
    fn out_of_range_pairs_fail_the_precondition() {
        let s = sample();
        let f = CopyRelation::new(2, 3, vec![(1, 0)]);
        assert_eq!(copy_relation_violation(&s, &f).unwrap().clause, CopyClause::Precondition);
    }

    #[test]
    fn empty_ordinal_copies_to_itself() {
        let s = sample();
        assert_eq!(find_star_copy(&s, 1), Some((1, CopyRelation::new(1, 1, vec![]))));
    }

    #[test]
    fn copy_of_one_is_the_node_of_all_empties() {
        let s = sample();
        let (m, f) = find_star_copy(&s, 2).unwrap();
        assert_eq!(m, 3);
        assert_eq!(f.pairs, vec![(0, 0), (0, 1)]);
    }

    #[test]
    fn no_copy_without_a_node_of_all_empties() {
        // ∅, ∅′, {∅}
        let s = MemStructure::from_edges(3, &[(0, 2)]).unwrap();
        assert_eq!(find_star_copy(&s, 2), None);
    }

    #[test]
    fn permutations_enumerate_all() {
        let mut p = vec![0, 1, 2];
        let mut count = 1;
        while next_permutation(&mut p) {
            count += 1;
        }
        assert_eq!(count, 6);
    }
}
