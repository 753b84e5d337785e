//! Brute-force Tarskian evaluation over finite membership structures.
//!
//! Quantifiers range over every node, in ascending id order, so the first
//! witness or counterexample found is the least one. `=` is node identity.
//! Starred atoms (`∈*`, `=*`, `set`, `At`) and the `Pure` marker are decided
//! natively from precomputed tables; their expansions into `∈`/`=` evaluate
//! to the same values.

use crate::fol::{Atom, Conn, Formula, Quant, Var};
use crate::memstruct::MemStructure;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

/// Default bound on quantifier nesting.
pub const DEFAULT_DEPTH_LIMIT: usize = 6;

/// Largest structure the table model accepts.
pub const MAX_MODEL_NODES: usize = 4096;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("free variable `{0}` is not assigned")]
    UnboundVariable(Var),
    #[error("variable `{var}` assigned node {node}, but the structure has {len} nodes")]
    NodeOutOfRange { var: Var, node: usize, len: usize },
    #[error("quantifier depth {depth} exceeds the limit {limit}")]
    DepthExceeded { depth: usize, limit: usize },
    #[error("structure with {0} nodes is too large to evaluate on")]
    StructureTooLarge(usize),
}

/// Variable → node map.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Assignment(pub BTreeMap<Var, usize>);

impl Assignment {
    pub fn new() -> Self {
        Assignment(BTreeMap::new())
    }

    pub fn with(mut self, v: impl Into<Var>, node: usize) -> Self {
        self.0.insert(v.into(), node);
        self
    }

    pub fn insert(&mut self, v: impl Into<Var>, node: usize) {
        self.0.insert(v.into(), node);
    }

    pub fn get(&self, v: &Var) -> Option<usize> {
        self.0.get(v).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Var, &usize)> {
        self.0.iter()
    }
}

impl<const N: usize> From<[(&str, usize); N]> for Assignment {
    fn from(pairs: [(&str, usize); N]) -> Self {
        Assignment(pairs.into_iter().map(|(v, n)| (Var::from(v), n)).collect())
    }
}

impl fmt::Display for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|(v, n)| format!("{v}={n}")).collect();
        f.write_str(&parts.join(" "))
    }
}

impl FromStr for Assignment {
    type Err = String;

    /// `x=0 y=2` or `x=0,y=2`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut out = Assignment::new();
        for part in s.split(|c: char| c == ',' || c.is_whitespace()).filter(|p| !p.is_empty()) {
            let (v, n) = part.split_once('=').ok_or_else(|| format!("expected VAR=NODE, got `{part}`"))?;
            let node = n.trim().parse().map_err(|_| format!("bad node id in `{part}`"))?;
            let v = v.trim();
            if v.is_empty() {
                return Err(format!("empty variable in `{part}`"));
            }
            out.insert(v, node);
        }
        Ok(out)
    }
}

/// Precomputed truth tables for one structure.
pub struct Model {
    n: usize,
    mem: Vec<bool>,
    memstar: Vec<bool>,
    class: Vec<usize>,
    set: Vec<bool>,
    pure: Vec<bool>,
}

impl Model {
    pub fn new(s: &MemStructure) -> Result<Model, EvalError> {
        let n = s.len();
        if n > MAX_MODEL_NODES {
            return Err(EvalError::StructureTooLarge(n));
        }
        let mut mem = vec![false; n * n];
        for (z, x) in s.edges() {
            mem[z * n + x] = true;
        }
        let set: Vec<bool> = s.nodes().map(|x| s.is_set(x)).collect();
        let memstar = (0..n * n).map(|i| mem[i] && set[i % n]).collect();
        let class = s.nodes().map(|x| s.class_of(x)).collect();
        Ok(Model { n, mem, memstar, class, set, pure: s.pure_sets() })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }
}

#[derive(Debug, Clone)]
enum Code {
    In(usize, usize),
    Eq(usize, usize),
    InStar(usize, usize),
    EqStar(usize, usize),
    Set(usize),
    At(usize),
    Pure(usize),
    Not(Box<Code>),
    And(Box<Code>, Box<Code>),
    Or(Box<Code>, Box<Code>),
    Implies(Box<Code>, Box<Code>),
    Iff(Box<Code>, Box<Code>),
    Forall(usize, Box<Code>),
    Exists(usize, Box<Code>),
}

impl Code {
    fn run(&self, m: &Model, env: &mut [usize]) -> bool {
        let n = m.n;
        match self {
            Code::In(a, b) => m.mem[env[*a] * n + env[*b]],
            Code::Eq(a, b) => env[*a] == env[*b],
            Code::InStar(a, b) => m.memstar[env[*a] * n + env[*b]],
            Code::EqStar(a, b) => m.class[env[*a]] == m.class[env[*b]],
            Code::Set(a) => m.set[env[*a]],
            Code::At(a) => !m.set[env[*a]],
            Code::Pure(a) => m.pure[env[*a]],
            Code::Not(f) => !f.run(m, env),
            Code::And(a, b) => a.run(m, env) && b.run(m, env),
            Code::Or(a, b) => a.run(m, env) || b.run(m, env),
            Code::Implies(a, b) => !a.run(m, env) || b.run(m, env),
            Code::Iff(a, b) => a.run(m, env) == b.run(m, env),
            Code::Forall(slot, body) => (0..n).all(|v| {
                env[*slot] = v;
                body.run(m, env)
            }),
            Code::Exists(slot, body) => (0..n).any(|v| {
                env[*slot] = v;
                body.run(m, env)
            }),
        }
    }
}

/// A formula resolved to slot indices. Slots `0..free.len()` hold the free
/// variables in the order given at compile time.
#[derive(Debug, Clone)]
pub struct Compiled {
    code: Code,
    free: Vec<Var>,
    slots: usize,
}

impl Compiled {
    pub fn new(f: &Formula, free: &[Var], depth_limit: usize) -> Result<Compiled, EvalError> {
        let depth = f.quantifier_depth();
        if depth > depth_limit {
            return Err(EvalError::DepthExceeded { depth, limit: depth_limit });
        }
        let mut scope: Vec<(Var, usize)> = free.iter().cloned().zip(0..).collect();
        let mut slots = free.len();
        let code = compile(f, &mut scope, &mut slots)?;
        Ok(Compiled { code, free: free.to_vec(), slots })
    }

    pub fn free(&self) -> &[Var] {
        &self.free
    }

    /// Evaluates with the free slots taken from `values` (same order as `free`).
    pub fn run(&self, m: &Model, values: &[usize]) -> bool {
        let mut env = vec![0; self.slots.max(1)];
        env[..values.len()].copy_from_slice(values);
        self.code.run(m, &mut env)
    }

    /// Evaluates reusing a caller-provided environment buffer.
    pub fn run_in(&self, m: &Model, env: &mut Vec<usize>) -> bool {
        if env.len() < self.slots {
            env.resize(self.slots, 0);
        }
        self.code.run(m, env)
    }

    pub fn slots(&self) -> usize {
        self.slots
    }
}

fn compile(f: &Formula, scope: &mut Vec<(Var, usize)>, slots: &mut usize) -> Result<Code, EvalError> {
    let lookup = |v: &Var, scope: &Vec<(Var, usize)>| {
        scope
            .iter()
            .rev()
            .find(|(name, _)| name == v)
            .map(|(_, s)| *s)
            .ok_or_else(|| EvalError::UnboundVariable(v.clone()))
    };
    Ok(match f {
        Formula::Atom(a) => match a {
            Atom::In(x, y) => Code::In(lookup(x, scope)?, lookup(y, scope)?),
            Atom::Eq(x, y) => Code::Eq(lookup(x, scope)?, lookup(y, scope)?),
            Atom::InStar(x, y) => Code::InStar(lookup(x, scope)?, lookup(y, scope)?),
            Atom::EqStar(x, y) => Code::EqStar(lookup(x, scope)?, lookup(y, scope)?),
            Atom::Set(x) => Code::Set(lookup(x, scope)?),
            Atom::At(x) => Code::At(lookup(x, scope)?),
            Atom::Pure(x) => Code::Pure(lookup(x, scope)?),
        },
        Formula::Not(g) => Code::Not(Box::new(compile(g, scope, slots)?)),
        Formula::Bin(c, a, b) => {
            let a = Box::new(compile(a, scope, slots)?);
            let b = Box::new(compile(b, scope, slots)?);
            match c {
                Conn::And => Code::And(a, b),
                Conn::Or => Code::Or(a, b),
                Conn::Implies => Code::Implies(a, b),
                Conn::Iff => Code::Iff(a, b),
            }
        }
        Formula::Quant(q, v, body) => {
            let slot = *slots;
            *slots += 1;
            scope.push((v.clone(), slot));
            let body = Box::new(compile(body, scope, slots)?);
            scope.pop();
            match q {
                Quant::Forall => Code::Forall(slot, body),
                Quant::Exists => Code::Exists(slot, body),
            }
        }
    })
}

/// Evaluation with a configurable quantifier-depth guard.
#[derive(Debug, Clone, Copy)]
pub struct Evaluator {
    pub depth_limit: usize,
}

impl Default for Evaluator {
    fn default() -> Self {
        Evaluator { depth_limit: DEFAULT_DEPTH_LIMIT }
    }
}

impl Evaluator {
    pub fn with_depth_limit(depth_limit: usize) -> Self {
        Evaluator { depth_limit }
    }

    pub fn eval(&self, s: &MemStructure, f: &Formula, rho: &Assignment) -> Result<bool, EvalError> {
        let free: Vec<Var> = f.free_vars().into_iter().collect();
        let mut values = Vec::with_capacity(free.len());
        for v in &free {
            let node = rho.get(v).ok_or_else(|| EvalError::UnboundVariable(v.clone()))?;
            if node >= s.len() {
                return Err(EvalError::NodeOutOfRange { var: v.clone(), node, len: s.len() });
            }
            values.push(node);
        }
        let c = Compiled::new(f, &free, self.depth_limit)?;
        Ok(c.run(&Model::new(s)?, &values))
    }

    /// Truth of the universal closure.
    pub fn eval_all_assignments(&self, s: &MemStructure, f: &Formula) -> Result<bool, EvalError> {
        Ok(self.counterexample(s, f)?.is_none())
    }

    /// Least assignment (to the free variables, then to the leading `∀` block)
    /// under which the formula fails. The caller replays it against
    /// `f.strip_forall_prefix().1`.
    pub fn counterexample(&self, s: &MemStructure, f: &Formula) -> Result<Option<Assignment>, EvalError> {
        let depth = f.quantifier_depth();
        if depth > self.depth_limit {
            return Err(EvalError::DepthExceeded { depth, limit: self.depth_limit });
        }
        let (prefix, body) = f.strip_forall_prefix();
        let mut vars: Vec<Var> = f.free_vars().into_iter().collect();
        for v in prefix {
            // a repeated binder shadows the outer one
            vars.retain(|w| *w != v);
            vars.push(v);
        }
        let c = Compiled::new(body, &vars, usize::MAX)?;
        let m = Model::new(s)?;
        Ok(first_failure(&c, &m, vars.len()).map(|vals| {
            Assignment(vars.iter().cloned().zip(vals).collect())
        }))
    }
}

/// Odometer over `k` slots (first slot most significant); first failing tuple.
pub fn first_failure(c: &Compiled, m: &Model, k: usize) -> Option<Vec<usize>> {
    let n = m.len();
    if k > 0 && n == 0 {
        return None;
    }
    let mut env = vec![0; c.slots().max(k).max(1)];
    loop {
        if !c.run_in(m, &mut env) {
            return Some(env[..k].to_vec());
        }
        // restore the free slots (bound slots may have been overwritten)
        let mut i = k;
        loop {
            if i == 0 {
                return None;
            }
            i -= 1;
            env[i] += 1;
            if env[i] < n {
                break;
            }
            env[i] = 0;
        }
    }
}

pub fn eval(s: &MemStructure, f: &Formula, rho: &Assignment) -> Result<bool, EvalError> {
    Evaluator::default().eval(s, f, rho)
}

pub fn eval_all_assignments(s: &MemStructure, f: &Formula) -> Result<bool, EvalError> {
    Evaluator::default().eval_all_assignments(s, f)
}
