//! First-order formulas over the membership signature `{∈, =, ∈*, =*, set, At}`.
//!
//! The language is purely relational: the only terms are variables. `Pure` is
//! an extra unary marker produced by [`crate::xlate::relativize_pure`]; the
//! evaluator resolves it semantically.

mod parse;
mod print;

use std::collections::{BTreeSet, HashMap};
use std::fmt;

pub use parse::{parse, parse_with, ParseError, ParseOptions};

/// Prefix reserved for machine-generated variables. User input may not use it.
pub const RESERVED_PREFIX: char = '_';

/// A variable name.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var(String);

impl Var {
    pub fn new(name: impl Into<String>) -> Self {
        let name = name.into();
        assert!(!name.is_empty(), "variable names are nonempty");
        Var(name)
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn is_reserved(&self) -> bool {
        self.0.starts_with(RESERVED_PREFIX)
    }

    /// Smallest `self_k` (k = 1, 2, ...) not in `avoid`.
    pub fn fresh_variant(&self, avoid: &BTreeSet<Var>) -> Var {
        (1..)
            .map(|k| Var(format!("{}_{k}", self.0)))
            .find(|v| !avoid.contains(v))
            .expect("unbounded counter")
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for Var {
    fn from(s: &str) -> Self {
        Var::new(s)
    }
}

/// Predicate symbols, used to describe signatures.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Pred {
    In,
    Eq,
    InStar,
    EqStar,
    Set,
    At,
    Pure,
}

impl Pred {
    pub fn is_binary(self) -> bool {
        matches!(self, Pred::In | Pred::Eq | Pred::InStar | Pred::EqStar)
    }

    pub fn is_starred(self) -> bool {
        matches!(self, Pred::InStar | Pred::EqStar | Pred::Set)
    }
}

/// An atomic formula. Arity is enforced by construction.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Atom {
    In(Var, Var),
    Eq(Var, Var),
    InStar(Var, Var),
    EqStar(Var, Var),
    Set(Var),
    At(Var),
    Pure(Var),
}

impl Atom {
    pub fn binary(pred: Pred, a: Var, b: Var) -> Atom {
        match pred {
            Pred::In => Atom::In(a, b),
            Pred::Eq => Atom::Eq(a, b),
            Pred::InStar => Atom::InStar(a, b),
            Pred::EqStar => Atom::EqStar(a, b),
            _ => panic!("{pred:?} is unary"),
        }
    }

    pub fn unary(pred: Pred, a: Var) -> Atom {
        match pred {
            Pred::Set => Atom::Set(a),
            Pred::At => Atom::At(a),
            Pred::Pure => Atom::Pure(a),
            _ => panic!("{pred:?} is binary"),
        }
    }

    pub fn pred(&self) -> Pred {
        match self {
            Atom::In(..) => Pred::In,
            Atom::Eq(..) => Pred::Eq,
            Atom::InStar(..) => Pred::InStar,
            Atom::EqStar(..) => Pred::EqStar,
            Atom::Set(_) => Pred::Set,
            Atom::At(_) => Pred::At,
            Atom::Pure(_) => Pred::Pure,
        }
    }

    pub fn args(&self) -> Vec<&Var> {
        match self {
            Atom::In(a, b) | Atom::Eq(a, b) | Atom::InStar(a, b) | Atom::EqStar(a, b) => {
                vec![a, b]
            }
            Atom::Set(a) | Atom::At(a) | Atom::Pure(a) => vec![a],
        }
    }

    pub fn map_vars(&self, mut f: impl FnMut(&Var) -> Var) -> Atom {
        match self {
            Atom::In(a, b) => Atom::In(f(a), f(b)),
            Atom::Eq(a, b) => Atom::Eq(f(a), f(b)),
            Atom::InStar(a, b) => Atom::InStar(f(a), f(b)),
            Atom::EqStar(a, b) => Atom::EqStar(f(a), f(b)),
            Atom::Set(a) => Atom::Set(f(a)),
            Atom::At(a) => Atom::At(f(a)),
            Atom::Pure(a) => Atom::Pure(f(a)),
        }
    }
}

/// Binary connectives.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Conn {
    And,
    Or,
    Implies,
    Iff,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Quant {
    Forall,
    Exists,
}

/// A first-order formula. Immutable once built; cheap to clone for small trees.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    Atom(Atom),
    Not(Box<Formula>),
    Bin(Conn, Box<Formula>, Box<Formula>),
    Quant(Quant, Var, Box<Formula>),
}

impl From<Atom> for Formula {
    fn from(a: Atom) -> Self {
        Formula::Atom(a)
    }
}

// Builders. Names mirror the surface syntax.
impl Formula {
    pub fn mem(a: impl Into<Var>, b: impl Into<Var>) -> Formula {
        Atom::In(a.into(), b.into()).into()
    }
    pub fn eq(a: impl Into<Var>, b: impl Into<Var>) -> Formula {
        Atom::Eq(a.into(), b.into()).into()
    }
    pub fn mem_star(a: impl Into<Var>, b: impl Into<Var>) -> Formula {
        Atom::InStar(a.into(), b.into()).into()
    }
    pub fn eq_star(a: impl Into<Var>, b: impl Into<Var>) -> Formula {
        Atom::EqStar(a.into(), b.into()).into()
    }
    pub fn set(a: impl Into<Var>) -> Formula {
        Atom::Set(a.into()).into()
    }
    pub fn at(a: impl Into<Var>) -> Formula {
        Atom::At(a.into()).into()
    }
    pub fn pure(a: impl Into<Var>) -> Formula {
        Atom::Pure(a.into()).into()
    }
    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }
    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::Bin(Conn::And, Box::new(a), Box::new(b))
    }
    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Bin(Conn::Or, Box::new(a), Box::new(b))
    }
    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Bin(Conn::Implies, Box::new(a), Box::new(b))
    }
    pub fn iff(a: Formula, b: Formula) -> Formula {
        Formula::Bin(Conn::Iff, Box::new(a), Box::new(b))
    }
    pub fn forall(v: impl Into<Var>, body: Formula) -> Formula {
        Formula::Quant(Quant::Forall, v.into(), Box::new(body))
    }
    pub fn exists(v: impl Into<Var>, body: Formula) -> Formula {
        Formula::Quant(Quant::Exists, v.into(), Box::new(body))
    }
    /// `∀v1 ... ∀vk body`, outermost first.
    pub fn forall_all<I: IntoIterator<Item = Var>>(vars: I, body: Formula) -> Formula {
        let vars: Vec<Var> = vars.into_iter().collect();
        vars.into_iter().rev().fold(body, |acc, v| Formula::forall(v, acc))
    }
    /// Bounded `∃v (v ∈ a ∧ body)`.
    pub fn exists_in(v: impl Into<Var>, a: impl Into<Var>, body: Formula) -> Formula {
        let v = v.into();
        Formula::exists(v.clone(), Formula::and(Formula::mem(v, a), body))
    }
    /// Bounded `∃v (v ∈* a ∧ body)`.
    pub fn exists_in_star(v: impl Into<Var>, a: impl Into<Var>, body: Formula) -> Formula {
        let v = v.into();
        Formula::exists(v.clone(), Formula::and(Formula::mem_star(v, a), body))
    }
}

impl Formula {
    pub fn free_vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        let mut bound = Vec::new();
        collect_free(self, &mut bound, &mut out);
        out
    }

    pub fn has_free(&self, v: &Var) -> bool {
        match self {
            Formula::Atom(a) => a.args().into_iter().any(|x| x == v),
            Formula::Not(f) => f.has_free(v),
            Formula::Bin(_, a, b) => a.has_free(v) || b.has_free(v),
            Formula::Quant(_, x, body) => x != v && body.has_free(v),
        }
    }

    /// Every variable occurring anywhere, free or bound (including binder positions).
    pub fn all_vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.visit_vars(&mut |v| {
            out.insert(v.clone());
        });
        out
    }

    pub fn bound_vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        fn go(f: &Formula, out: &mut BTreeSet<Var>) {
            match f {
                Formula::Atom(_) => {}
                Formula::Not(g) => go(g, out),
                Formula::Bin(_, a, b) => {
                    go(a, out);
                    go(b, out);
                }
                Formula::Quant(_, v, body) => {
                    out.insert(v.clone());
                    go(body, out);
                }
            }
        }
        go(self, &mut out);
        out
    }

    fn visit_vars(&self, f: &mut impl FnMut(&Var)) {
        match self {
            Formula::Atom(a) => a.args().into_iter().for_each(&mut *f),
            Formula::Not(g) => g.visit_vars(f),
            Formula::Bin(_, a, b) => {
                a.visit_vars(f);
                b.visit_vars(f);
            }
            Formula::Quant(_, v, body) => {
                f(v);
                body.visit_vars(f);
            }
        }
    }

    /// Predicates used anywhere in the formula.
    pub fn preds(&self) -> BTreeSet<Pred> {
        let mut out = BTreeSet::new();
        self.visit_atoms(&mut |a| {
            out.insert(a.pred());
        });
        out
    }

    pub fn visit_atoms(&self, f: &mut impl FnMut(&Atom)) {
        match self {
            Formula::Atom(a) => f(a),
            Formula::Not(g) => g.visit_atoms(f),
            Formula::Bin(_, a, b) => {
                a.visit_atoms(f);
                b.visit_atoms(f);
            }
            Formula::Quant(_, _, body) => body.visit_atoms(f),
        }
    }

    /// Maximum nesting of quantifiers.
    pub fn quantifier_depth(&self) -> usize {
        match self {
            Formula::Atom(_) => 0,
            Formula::Not(g) => g.quantifier_depth(),
            Formula::Bin(_, a, b) => a.quantifier_depth().max(b.quantifier_depth()),
            Formula::Quant(_, _, body) => 1 + body.quantifier_depth(),
        }
    }

    /// Number of connectives and quantifiers.
    pub fn size(&self) -> usize {
        match self {
            Formula::Atom(_) => 1,
            Formula::Not(g) => 1 + g.size(),
            Formula::Bin(_, a, b) => 1 + a.size() + b.size(),
            Formula::Quant(_, _, body) => 1 + body.size(),
        }
    }

    /// Capture-avoiding replacement of the free occurrences of `from` by `to`.
    pub fn substitute(&self, from: &Var, to: &Var) -> Formula {
        if from == to {
            return self.clone();
        }
        match self {
            Formula::Atom(a) => Formula::Atom(a.map_vars(|v| if v == from { to.clone() } else { v.clone() })),
            Formula::Not(g) => Formula::not(g.substitute(from, to)),
            Formula::Bin(c, a, b) => Formula::Bin(
                *c,
                Box::new(a.substitute(from, to)),
                Box::new(b.substitute(from, to)),
            ),
            Formula::Quant(q, v, body) => {
                if v == from || !body.has_free(from) {
                    return self.clone();
                }
                if v == to {
                    let mut avoid = body.all_vars();
                    avoid.insert(from.clone());
                    avoid.insert(to.clone());
                    let renamed = v.fresh_variant(&avoid);
                    let body = body.substitute(v, &renamed).substitute(from, to);
                    Formula::Quant(*q, renamed, Box::new(body))
                } else {
                    Formula::Quant(*q, v.clone(), Box::new(body.substitute(from, to)))
                }
            }
        }
    }

    /// Renames bound variables to `_b0, _b1, ...` in preorder. Two formulas are
    /// alpha-equivalent iff their canonical forms are equal.
    pub fn canonical(&self) -> Formula {
        fn go(f: &Formula, env: &mut Vec<(Var, Var)>, next: &mut usize) -> Formula {
            match f {
                Formula::Atom(a) => Formula::Atom(a.map_vars(|v| {
                    env.iter()
                        .rev()
                        .find(|(orig, _)| orig == v)
                        .map(|(_, c)| c.clone())
                        .unwrap_or_else(|| v.clone())
                })),
                Formula::Not(g) => Formula::not(go(g, env, next)),
                Formula::Bin(c, a, b) => {
                    let a = go(a, env, next);
                    let b = go(b, env, next);
                    Formula::Bin(*c, Box::new(a), Box::new(b))
                }
                Formula::Quant(q, v, body) => {
                    let c = Var(format!("_b{next}"));
                    *next += 1;
                    env.push((v.clone(), c.clone()));
                    let body = go(body, env, next);
                    env.pop();
                    Formula::Quant(*q, c, Box::new(body))
                }
            }
        }
        go(self, &mut Vec::new(), &mut 0)
    }

    pub fn alpha_eq(&self, other: &Formula) -> bool {
        self.canonical() == other.canonical()
    }

    /// Strips a leading block of universal quantifiers.
    pub fn strip_forall_prefix(&self) -> (Vec<Var>, &Formula) {
        let mut vars = Vec::new();
        let mut cur = self;
        while let Formula::Quant(Quant::Forall, v, body) = cur {
            vars.push(v.clone());
            cur = body;
        }
        (vars, cur)
    }

    /// Universal closure over the free variables (sorted by name).
    pub fn universal_closure(&self) -> Formula {
        Formula::forall_all(self.free_vars(), self.clone())
    }

    /// Renames free variables simultaneously. Bound variables that would capture
    /// a target name are renamed first.
    pub fn rename_free(&self, map: &HashMap<Var, Var>) -> Formula {
        // Route through fresh intermediates so swaps like {x↦y, y↦x} work.
        let mut avoid = self.all_vars();
        avoid.extend(map.values().cloned());
        let mut staged = Vec::new();
        let mut cur = self.clone();
        for (from, to) in map {
            let tmp = Var::new(format!("_t{}", from.as_str())).fresh_variant(&avoid);
            avoid.insert(tmp.clone());
            cur = cur.substitute(from, &tmp);
            staged.push((tmp, to.clone()));
        }
        for (tmp, to) in staged {
            cur = cur.substitute(&tmp, &to);
        }
        cur
    }
}

fn collect_free(f: &Formula, bound: &mut Vec<Var>, out: &mut BTreeSet<Var>) {
    match f {
        Formula::Atom(a) => {
            for v in a.args() {
                if !bound.contains(v) {
                    out.insert(v.clone());
                }
            }
        }
        Formula::Not(g) => collect_free(g, bound, out),
        Formula::Bin(_, a, b) => {
            collect_free(a, bound, out);
            collect_free(b, bound, out);
        }
        Formula::Quant(_, v, body) => {
            bound.push(v.clone());
            collect_free(body, bound, out);
            bound.pop();
        }
    }
}

/// Smallest reserved name `_v{k}` not in `avoid`.
pub fn reserved_fresh(avoid: &BTreeSet<Var>) -> Var {
    (0..)
        .map(|k| Var(format!("_v{k}")))
        .find(|v| !avoid.contains(v))
        .expect("unbounded counter")
}
