//! Witness completion of a base structure. Each round computes, for every
//! parameter tuple within the rank bounds, the extension that the axiom's
//! construction produces (pairing as the saturation of `{a, b}`, unions of
//! the sets in `A`, the starred power, separation, co-extensional closure,
//! replacement images, Scott's image set and its derived replacement set) and
//! adds a node for each extension not yet realized. Added nodes are members of
//! nothing and their extensions are new, so `=*`-classes and sethood of the
//! existing nodes never change.

use super::corpus::{corpus, functional_corpus, STARRED};
use crate::eval::{Compiled, EvalError, Model, DEFAULT_DEPTH_LIMIT};
use crate::fol::Var;
use crate::memstruct::{MemStructure, NodeSet, StructError};
use std::collections::BTreeMap;
use thiserror::Error;

/// Rank of the base universe the bounds are measured against.
pub const FAMILY_RANK: usize = 3;

const MAX_FAMILY_NODES: usize = 2000;
const MAX_ROUNDS: usize = 32;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FamilyError {
    #[error("closure exceeded {0} nodes")]
    TooLarge(usize),
    #[error("closure did not stabilize within {0} rounds")]
    NoFixpoint(usize),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Struct(#[from] StructError),
}

/// Nodes whose rank is at most `r`.
pub(crate) fn rank_bounded(s: &MemStructure, r: usize) -> Vec<usize> {
    s.ranks().iter().enumerate().filter(|(_, k)| k.is_some_and(|k| k <= r)).map(|(x, _)| x).collect()
}

/// `rows[x] = { y : φ(x, y) }` for a formula with free variables `x, y`.
pub(crate) fn relation_rows(model: &Model, phi: &Compiled) -> Vec<NodeSet> {
    let n = model.len();
    let mut env = Vec::with_capacity(phi.slots());
    (0..n)
        .map(|x| {
            (0..n)
                .filter(|&y| {
                    env.clear();
                    env.extend_from_slice(&[x, y]);
                    phi.run_in(model, &mut env)
                })
                .collect()
        })
        .collect()
}

/// `row` is a single, nonempty `=*`-class.
pub(crate) fn is_one_class(s: &MemStructure, row: &NodeSet) -> bool {
    row.first().is_some_and(|&k| row.len() == s.coext_classes().class_members(k).len() && row.iter().all(|&y| s.coext(y, k)))
}

/// All members of `row` are co-extensional (vacuous when empty).
pub(crate) fn within_one_class(s: &MemStructure, row: &NodeSet) -> bool {
    row.first().is_none_or(|&k| row.iter().all(|&y| s.coext(y, k)))
}

struct Recipes {
    separation: Vec<Compiled>,
    functional: Vec<Compiled>,
}

impl Recipes {
    fn new() -> Result<Self, EvalError> {
        let yw = [Var::new("y"), Var::new("w")];
        let xy = [Var::new("x"), Var::new("y")];
        Ok(Recipes {
            separation: corpus(1, &yw, STARRED)
                .iter()
                .map(|f| Compiled::new(f, &yw, DEFAULT_DEPTH_LIMIT))
                .collect::<Result<_, _>>()?,
            functional: functional_corpus()
                .iter()
                .map(|f| Compiled::new(f, &xy, DEFAULT_DEPTH_LIMIT))
                .collect::<Result<_, _>>()?,
        })
    }

    /// Extensions the current structure should realize, with a label each.
    fn targets(&self, s: &MemStructure) -> Result<BTreeMap<NodeSet, String>, FamilyError> {
        let model = Model::new(s)?;
        let mut out = BTreeMap::new();
        let mut want = |ext: NodeSet, label: String| {
            out.entry(ext).or_insert(label);
        };
        let p1 = rank_bounded(s, FAMILY_RANK - 2);
        let p2 = rank_bounded(s, FAMILY_RANK - 1);
        let atoms: Vec<usize> = s.nodes().filter(|&x| !s.is_set(x)).collect();

        for &a in &p2 {
            for &b in p2.iter().filter(|&&b| b >= a) {
                want(s.saturate([a, b].iter()), format!("pair*({a},{b})"));
            }
            let union: NodeSet = s.star_extension(a).iter().flat_map(|&z| s.star_extension(z)).collect();
            want(union, format!("union*({a})"));
            want(s.saturate(s.members(a)), format!("coext({a})"));
        }
        for &a in &p1 {
            let ext_a = s.star_extension(a);
            let mut power: NodeSet = atoms.iter().copied().collect();
            power.extend(s.nodes().filter(|&y| s.is_set(y) && s.members(y).iter().all(|m| ext_a.contains(m))));
            want(power, format!("power*({a})"));
        }
        let mut env = Vec::new();
        for (i, phi) in self.separation.iter().enumerate() {
            for &a in &p2 {
                let star_a = s.star_extension(a);
                if star_a.is_empty() {
                    continue;
                }
                for &w in &p2 {
                    let sep: NodeSet = star_a
                        .iter()
                        .copied()
                        .filter(|&y| {
                            env.clear();
                            env.extend_from_slice(&[y, w]);
                            phi.run_in(&model, &mut env)
                        })
                        .collect();
                    want(sep, format!("sep*#{i}({w},{a})"));
                }
            }
        }
        for (i, phi) in self.functional.iter().enumerate() {
            let rows = relation_rows(&model, phi);
            for &a in &p2 {
                let star_a = s.star_extension(a);
                if star_a.iter().all(|&x| is_one_class(s, &rows[x])) {
                    want(star_a.iter().flat_map(|&x| rows[x].iter().copied()).collect(), format!("repl*#{i}({a})"));
                }
            }
            if rows.iter().all(|r| within_one_class(s, r)) {
                for &a in &p2 {
                    let direct: NodeSet = s.members(a).iter().flat_map(|&x| rows[x].iter().copied()).collect();
                    want(direct, format!("scott#{i}({a})"));
                    // Replacement* with ∃k (φ(X,k) ∧ Z ∈ k): the sets U_X
                    let us: Vec<NodeSet> = s
                        .members(a)
                        .iter()
                        .map(|&x| rows[x].iter().flat_map(|&k| s.members(k).iter().copied()).collect())
                        .collect();
                    let b0: NodeSet = s.nodes().filter(|&y| us.iter().any(|u| same(s.members(y), u))).collect();
                    want(b0, format!("scott-b0#{i}({a})"));
                }
            }
        }
        Ok(out)
    }
}

fn same(members: &[usize], ext: &NodeSet) -> bool {
    members.len() == ext.len() && members.iter().eq(ext.iter())
}

/// Closes `base` under the witness constructions with parameters of rank at
/// most `FAMILY_RANK − 1` (`− 2` for the starred power).
pub fn closed_family(base: &MemStructure) -> Result<MemStructure, FamilyError> {
    let recipes = Recipes::new()?;
    let mut s = base.clone();
    for _ in 0..MAX_ROUNDS {
        let mut missing: Vec<(NodeSet, String)> = Vec::new();
        for (ext, label) in recipes.targets(&s)? {
            if s.find_extension(&ext).is_none() {
                missing.push((ext, label));
            }
        }
        if missing.is_empty() {
            return Ok(s);
        }
        if s.len() + missing.len() > MAX_FAMILY_NODES {
            return Err(FamilyError::TooLarge(MAX_FAMILY_NODES));
        }
        for (ext, label) in missing {
            s.add_node(ext, Some(label))?;
        }
    }
    Err(FamilyError::NoFixpoint(MAX_ROUNDS))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modelgen::{build_hf, standard_family};

    #[test]
    fn extensional_base_needs_no_sets_of_classes() {
        let hf = build_hf(2).unwrap();
        let c = closed_family(&hf).unwrap();
        // every original node keeps its extension and sethood
        for x in hf.nodes() {
            assert_eq!(c.members(x), hf.members(x));
            assert_eq!(c.is_set(x), hf.is_set(x));
        }
        assert!(c.len() >= hf.len());
    }

    #[test]
    fn standard_family_closes_and_preserves_the_base() {
        let base = standard_family();
        let c = closed_family(&base).unwrap();
        for x in base.nodes() {
            assert_eq!(c.members(x), base.members(x));
            assert_eq!(c.is_set(x), base.is_set(x), "node {x}");
        }
        // all empties as one set: the 1* witness
        let empties = c.saturate([0].iter());
        assert_eq!(empties.len(), 3);
        let one_star = c.find_extension(&empties).unwrap();
        assert!(c.is_set(one_star));
        // a second pass adds nothing
        assert_eq!(closed_family(&c).unwrap().len(), c.len());
    }
}
