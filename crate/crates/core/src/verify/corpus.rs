use crate::fol::{Atom, Conn, Formula, Pred, Quant, Var};
use crate::xlate::translate_zfa_starred;
use rand::Rng;
use std::collections::HashSet;

pub const STARRED: &[Pred] = &[Pred::InStar, Pred::EqStar];
pub const RAW: &[Pred] = &[Pred::In, Pred::Eq];

fn atoms(vars: &[Var], sig: &[Pred]) -> Vec<Formula> {
    let mut out = Vec::new();
    for &p in sig {
        if p.is_binary() {
            for a in vars {
                for b in vars {
                    out.push(Formula::Atom(Atom::binary(p, a.clone(), b.clone())));
                }
            }
        } else {
            for a in vars {
                out.push(Formula::Atom(Atom::unary(p, a.clone())));
            }
        }
    }
    out
}

fn push_unique(out: &mut Vec<Formula>, seen: &mut HashSet<Formula>, f: Formula) {
    if seen.insert(f.canonical()) {
        out.push(f);
    }
}

/// Formulas up to `depth` layers over the atoms of `sig` on `vars`.
///
/// Layer 0 is the atoms. Layer `d` adds to layer `d − 1` its negations, its
/// combinations `f ∘ a` with an atom `a` under each binary connective (both
/// orders only for `→`, or when `f` is not an atom), and `∀u f`, `∃u f` for
/// `f` of layer `d − 1` over `vars ∪ {u}` that mention `u`. The result is
/// deduplicated up to alpha-equivalence and its order is deterministic.
pub fn corpus(depth: usize, vars: &[Var], sig: &[Pred]) -> Vec<Formula> {
    assert!(depth <= 3, "corpus depth is limited to 3");
    layer(depth, vars, sig)
}

fn layer(depth: usize, vars: &[Var], sig: &[Pred]) -> Vec<Formula> {
    let base = atoms(vars, sig);
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    if depth == 0 {
        for f in base {
            push_unique(&mut out, &mut seen, f);
        }
        return out;
    }
    let prev = layer(depth - 1, vars, sig);
    for f in &prev {
        push_unique(&mut out, &mut seen, f.clone());
    }
    for f in &prev {
        push_unique(&mut out, &mut seen, Formula::not(f.clone()));
    }
    for (i, f) in prev.iter().enumerate() {
        let f_is_atom = matches!(f, Formula::Atom(_));
        for c in [Conn::And, Conn::Or, Conn::Implies, Conn::Iff] {
            for (j, a) in base.iter().enumerate() {
                if f_is_atom && c != Conn::Implies && j < i {
                    continue;
                }
                push_unique(&mut out, &mut seen, Formula::Bin(c, Box::new(f.clone()), Box::new(a.clone())));
            }
        }
    }
    let u = Var::new(format!("u{depth}"));
    let mut wider = vars.to_vec();
    wider.push(u.clone());
    let inner: Vec<Formula> = layer(depth - 1, &wider, sig).into_iter().filter(|f| f.has_free(&u)).collect();
    for q in [Quant::Forall, Quant::Exists] {
        for f in &inner {
            push_unique(&mut out, &mut seen, Formula::Quant(q, u.clone(), Box::new(f.clone())));
        }
    }
    out
}

/// Five relations `φ(x, y)` that are functional up to `=*`, written in the
/// ZFA language and translated into the starred one: identity, singleton,
/// empty set, the set of empty members of `x`, and the union of `x`.
pub fn functional_corpus() -> Vec<Formula> {
    [
        "y = x",
        "~At(y) & all z. (z in y <-> z = x)",
        "~At(y) & all z. ~(z in y)",
        "~At(y) & all z. (z in y <-> (z in x & ~(ex w. w in z)))",
        "~At(y) & all z. (z in y <-> ex w. (w in x & z in w))",
    ]
    .iter()
    .map(|s| translate_zfa_starred(&crate::fol::parse(s).expect("corpus parses")).expect("ZFA language"))
    .collect()
}

/// A random formula with quantifier and connective nesting at most `depth`.
/// Bound variables are drawn from `u0, u1, ...` and may shadow.
pub fn random_formula<R: Rng>(rng: &mut R, depth: usize, vars: &[Var], sig: &[Pred]) -> Formula {
    fn go<R: Rng>(rng: &mut R, depth: usize, scope: &mut Vec<Var>, sig: &[Pred], next: &mut usize) -> Formula {
        if depth == 0 || rng.gen_bool(0.3) {
            let p = sig[rng.gen_range(0..sig.len())];
            let pick = |rng: &mut R| scope[rng.gen_range(0..scope.len())].clone();
            return if p.is_binary() {
                let a = pick(rng);
                let b = pick(rng);
                Formula::Atom(Atom::binary(p, a, b))
            } else {
                Formula::Atom(Atom::unary(p, pick(rng)))
            };
        }
        match rng.gen_range(0..4) {
            0 => Formula::not(go(rng, depth - 1, scope, sig, next)),
            1 => {
                let c = [Conn::And, Conn::Or, Conn::Implies, Conn::Iff][rng.gen_range(0..4)];
                let a = go(rng, depth - 1, scope, sig, next);
                let b = go(rng, depth - 1, scope, sig, next);
                Formula::Bin(c, Box::new(a), Box::new(b))
            }
            _ => {
                let u = Var::new(format!("u{}", *next % 3));
                *next += 1;
                scope.push(u.clone());
                let body = go(rng, depth - 1, scope, sig, next);
                scope.pop();
                let q = if rng.gen_bool(0.5) { Quant::Forall } else { Quant::Exists };
                Formula::Quant(q, u, Box::new(body))
            }
        }
    }
    assert!(!vars.is_empty() && !sig.is_empty());
    go(rng, depth, &mut vars.to_vec(), sig, &mut 0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fol::parse;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn vs(names: &[&str]) -> Vec<Var> {
        names.iter().map(|n| Var::new(*n)).collect()
    }

    #[test]
    fn atomic_layer() {
        let c = corpus(0, &vs(&["y", "w"]), STARRED);
        assert_eq!(c.len(), 8);
        for s in ["y in* w", "w in* y", "y =* w"] {
            assert!(c.contains(&parse(s).unwrap()), "{s}");
        }
    }

    #[test]
    fn depth_one_layer() {
        let c = corpus(1, &vs(&["y", "w"]), STARRED);
        assert_eq!(c.len(), 208);
        assert!(c.contains(&parse("~(y in* w)").unwrap()));
        assert!(c.contains(&parse("ex u1. u1 in* y").unwrap()));
        assert!(c.contains(&parse("y =* w -> w in* y").unwrap()));
        // commutative atom pairs appear once
        assert!(!c.contains(&parse("w in* y & y in* w").unwrap()) || !c.contains(&parse("y in* w & w in* y").unwrap()));
        let canon: HashSet<_> = c.iter().map(Formula::canonical).collect();
        assert_eq!(canon.len(), c.len());
        assert!(c.iter().all(|f| f.quantifier_depth() <= 1));
    }

    #[test]
    fn deterministic() {
        let a = corpus(1, &vs(&["z", "w"]), RAW);
        let b = corpus(1, &vs(&["z", "w"]), RAW);
        assert_eq!(a, b);
    }

    #[test]
    fn functional_relations_translate() {
        let c = functional_corpus();
        assert_eq!(c.len(), 5);
        assert_eq!(c[0], parse("y =* x").unwrap());
        for f in &c {
            assert!(f.free_vars().iter().all(|v| v.as_str() == "x" || v.as_str() == "y"));
            assert!(!f.preds().contains(&Pred::In));
        }
    }

    #[test]
    fn random_formulas_respect_depth_and_vars() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let sig = [Pred::InStar, Pred::EqStar, Pred::Set];
        for _ in 0..200 {
            let f = random_formula(&mut rng, 2, &vs(&["x", "y"]), &sig);
            assert!(f.quantifier_depth() <= 2);
            assert!(f.free_vars().iter().all(|v| v.as_str() == "x" || v.as_str() == "y"));
        }
    }
}
